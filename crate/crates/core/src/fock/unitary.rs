use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::state::{FockState, StateVector};
use super::VALIDATION_TOL;

/// Unitary on the single-photon space of `2 * modes` polarized channels.
///
/// Row-major; entry `(k, j)` is the amplitude for a photon entering channel
/// `j` to leave in channel `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    dim: usize,
    data: Vec<Complex64>,
}

impl ModeUnitary {
    /// Validates shape (square, even dimension) and unitarity.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        let u = Self::new_unchecked(dim, data)?;
        let deviation = u.unitarity_deviation();
        if deviation > VALIDATION_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    pub(crate) fn new_unchecked(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if !dim.is_multiple_of(2) {
            return Err(Error::ShapeMismatch {
                expected: dim + 1,
                found: dim,
            });
        }
        if data.len() != dim * dim {
            return Err(Error::ShapeMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn identity(modes: usize) -> Self {
        let dim = 2 * modes;
        let mut data = vec![Complex64::default(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.dim / 2
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &ModeUnitary) -> Result<ModeUnitary> {
        if self.dim != rhs.dim {
            return Err(Error::ShapeMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        let n = self.dim;
        let mut data = vec![Complex64::default(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::default() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Ok(ModeUnitary { dim: n, data })
    }

    /// `later · self`: apply `self` first, then `later`.
    pub fn then(&self, later: &ModeUnitary) -> Result<ModeUnitary> {
        later.matmul(self)
    }

    pub fn adjoint(&self) -> ModeUnitary {
        let n = self.dim;
        let mut data = vec![Complex64::default(); n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        ModeUnitary { dim: n, data }
    }

    /// Largest elementwise deviation of `U·U†` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::default();
                for k in 0..n {
                    acc += self.data[i * n + k] * self.data[j * n + k].conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }

    /// Largest elementwise distance to `other`.
    pub fn max_diff(&self, other: &ModeUnitary) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Lifts the mode transformation to Fock space: every creation operator
    /// `a†_j` becomes `Σ_k U[k][j] a†_k`.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if 2 * state.modes() != self.dim {
            return Err(Error::ShapeMismatch {
                expected: self.dim,
                found: 2 * state.modes(),
            });
        }
        let factorials = factorial_sqrt_table(state.photon_count() as usize);
        let mut out: BTreeMap<FockState, Complex64> = BTreeMap::new();
        let mut photons = Vec::new();
        for (ket, amp) in state.terms() {
            photons.clear();
            let mut norm_in = 1.0;
            for (j, &n) in ket.occupations().iter().enumerate() {
                norm_in *= factorials[n as usize];
                photons.extend(std::iter::repeat_n(j, n as usize));
            }
            let mut occ = FockState::vacuum(state.modes());
            self.expand(&photons, 0, *amp / norm_in, &mut occ, &factorials, &mut out);
        }
        Ok(StateVector::from_map_unchecked(state.modes(), out))
    }

    // Sums over every assignment of output channels to the input photons.
    fn expand(
        &self,
        photons: &[usize],
        depth: usize,
        coeff: Complex64,
        occ: &mut FockState,
        factorials: &[f64],
        out: &mut BTreeMap<FockState, Complex64>,
    ) {
        if depth == photons.len() {
            let bosonic: f64 = occ
                .occupations()
                .iter()
                .map(|&m| factorials[m as usize])
                .product();
            *out.entry(occ.clone()).or_default() += coeff * bosonic;
            return;
        }
        let j = photons[depth];
        for k in 0..self.dim {
            let u = self.data[k * self.dim + j];
            if u.norm_sqr() == 0.0 {
                continue;
            }
            occ.occupations_mut()[k] += 1;
            self.expand(photons, depth + 1, coeff * u, occ, factorials, out);
            occ.occupations_mut()[k] -= 1;
        }
    }
}

fn factorial_sqrt_table(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut f = 1.0_f64;
    table.push(1.0);
    for i in 1..=n {
        f *= i as f64;
        table.push(f.sqrt());
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{PolarizedMode, StateVector};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_non_unitary() {
        let err = ModeUnitary::new(2, vec![c(1.0), c(1.0), c(0.0), c(1.0)]).unwrap_err();
        assert!(matches!(err, Error::NotUnitary { .. }));
    }

    #[test]
    fn rejects_odd_dimension() {
        assert!(matches!(
            ModeUnitary::new(3, vec![c(1.0); 9]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn hong_ou_mandel_bunching() {
        // 50:50 mixing of the two H channels of two spatial modes.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut u = ModeUnitary::identity(2);
        u.set(0, 0, c(s));
        u.set(0, 2, c(s));
        u.set(2, 0, c(s));
        u.set(2, 2, c(-s));
        let input = StateVector::basis(
            FockState::from_photons(2, &[PolarizedMode::h(0), PolarizedMode::h(1)]).unwrap(),
        );
        let out = u.apply(&input).unwrap();
        let both0 = FockState::from_photons(2, &[PolarizedMode::h(0), PolarizedMode::h(0)]).unwrap();
        let both1 = FockState::from_photons(2, &[PolarizedMode::h(1), PolarizedMode::h(1)]).unwrap();
        assert_eq!(out.len(), 2);
        assert!((out.amplitude(&both0).norm() - s).abs() < 1e-12);
        assert!((out.amplitude(&both1).norm() - s).abs() < 1e-12);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch_on_apply() {
        let u = ModeUnitary::identity(3);
        let s = StateVector::vacuum(2);
        assert!(matches!(u.apply(&s), Err(Error::ShapeMismatch { .. })));
    }
}
