#![allow(dead_code)]

use num_complex::Complex64;
use photon_arena::fock::{FockState, ModeUnitary, StateVector};
use photon_arena::format::fmt12;
use photon_arena::Strategy;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Uniformly random polarization state with random phases.
pub fn random_strategy<R: Rng>(rng: &mut R) -> Strategy {
    let a = gaussian_complex(rng);
    let b = gaussian_complex(rng);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    Strategy::new(a / n, b / n).unwrap()
}

/// Real non-negative amplitudes with a uniformly drawn `|first|²`.
pub fn random_real_strategy<R: Rng>(rng: &mut R) -> Strategy {
    Strategy::from_probability(rng.random::<f64>()).unwrap()
}

/// Haar-ish random unitary from Gram-Schmidt on Gaussian columns.
pub fn random_unitary<R: Rng>(modes: usize, rng: &mut R) -> ModeUnitary {
    let dim = 2 * modes;
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        for q in &cols {
            let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut data = vec![Complex64::default(); dim * dim];
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            data[i * dim + j] = *z;
        }
    }
    ModeUnitary::new(dim, data).unwrap()
}

/// Random normalized superposition of all kets with `photons` photons.
pub fn random_state<R: Rng>(modes: usize, photons: u32, rng: &mut R) -> StateVector {
    let kets = FockState::enumerate(modes, photons);
    let terms: Vec<_> = kets.into_iter().map(|k| (k, gaussian_complex(rng))).collect();
    StateVector::from_terms(modes, terms).unwrap().normalized().unwrap()
}

/// Parses a per-output polarization string such as `HVHV` into a ket with
/// one photon per output.
pub fn pol_ket(s: &str) -> FockState {
    use photon_arena::PolarizedMode;
    let photons: Vec<_> = s
        .chars()
        .enumerate()
        .map(|(i, c)| match c {
            'H' => PolarizedMode::h(i),
            'V' => PolarizedMode::v(i),
            _ => panic!("bad letter {c}"),
        })
        .collect();
    FockState::from_photons(s.len(), &photons).unwrap()
}

/// Equality up to a global phase: `1 - |<a|b>|` for normalized inputs.
pub fn phase_distance(a: &StateVector, b: &StateVector) -> f64 {
    1.0 - a.inner_product(b).unwrap().norm()
}

/// Brute-force cell classifier written straight from the definitions,
/// independent of the library scanner: weighted payoffs per cell, every
/// unilateral deviation, every pairwise domination.
pub mod brute {
    use super::fmt12;

    const PAYOFF: [[(f64, f64); 2]; 2] = [[(2.0, 2.0), (5.0, 1.0)], [(1.0, 5.0), (4.0, 4.0)]];
    const LABELS: [char; 2] = ['H', 'V'];

    fn prob(choice: usize, p: f64) -> f64 {
        if choice == 0 {
            p
        } else {
            1.0 - p
        }
    }

    fn tie(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * 1f64.max(a.abs()).max(b.abs())
    }

    fn better(a: f64, b: f64) -> bool {
        a > b && !tie(a, b)
    }

    fn at_least(a: f64, b: f64) -> bool {
        a > b || tie(a, b)
    }

    pub fn table(x: f64, y: f64) -> [[(f64, f64); 2]; 2] {
        let mut t = [[(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                let w = prob(r, x) * prob(c, y);
                t[r][c] = (PAYOFF[r][c].0 * w, PAYOFF[r][c].1 * w);
            }
        }
        t
    }

    /// `(nash, pareto)` flags for every cell.
    pub fn classify(x: f64, y: f64, strict: bool) -> [[(bool, bool); 2]; 2] {
        let t = table(x, y);
        let mut out = [[(false, false); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                let (a, b) = t[r][c];
                let mut nash = true;
                for r2 in 0..2 {
                    if r2 != r {
                        let dev = t[r2][c].0;
                        nash &= if strict { better(a, dev) } else { at_least(a, dev) };
                    }
                }
                for c2 in 0..2 {
                    if c2 != c {
                        let dev = t[r][c2].1;
                        nash &= if strict { better(b, dev) } else { at_least(b, dev) };
                    }
                }
                let mut pareto = true;
                for r2 in 0..2 {
                    for c2 in 0..2 {
                        if (r2, c2) == (r, c) {
                            continue;
                        }
                        let (a2, b2) = t[r2][c2];
                        if at_least(a2, a) && at_least(b2, b) && (better(a2, a) || better(b2, b)) {
                            pareto = false;
                        }
                    }
                }
                out[r][c] = (nash, pareto);
            }
        }
        out
    }

    /// Same layout as the scanner CSV.
    pub fn csv(n: usize, strict: bool) -> String {
        let mut s = String::from("x,y,cell,nash,pareto,degenerate\n");
        for i in 0..n {
            for j in 0..n {
                let x = i as f64 / (n - 1) as f64;
                let y = j as f64 / (n - 1) as f64;
                let flags = classify(x, y, strict);
                let degenerate = i == 0 || j == 0 || i == n - 1 || j == n - 1;
                for r in 0..2 {
                    for c in 0..2 {
                        s.push_str(&format!(
                            "{},{},{}{},{},{},{}\n",
                            fmt12(x),
                            fmt12(y),
                            LABELS[r],
                            LABELS[c],
                            flags[r][c].0,
                            flags[r][c].1,
                            degenerate
                        ));
                    }
                }
            }
        }
        s
    }
}
