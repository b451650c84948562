use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{DEFAULT_MAX_PHOTONS, PRUNE_TOL, VALIDATION_TOL};

/// Photon polarization in the horizontal/vertical basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    pub fn letter(self) -> char {
        match self {
            Polarization::H => 'H',
            Polarization::V => 'V',
        }
    }
}

/// A (spatial path, polarization) channel; the label of one creation operator.
///
/// Ordering is spatial-major with `H` before `V`, which is also the order of
/// the flat channel index returned by [`PolarizedMode::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolarizedMode {
    pub spatial: usize,
    pub pol: Polarization,
}

impl PolarizedMode {
    pub fn new(spatial: usize, pol: Polarization) -> Self {
        Self { spatial, pol }
    }

    pub fn h(spatial: usize) -> Self {
        Self::new(spatial, Polarization::H)
    }

    pub fn v(spatial: usize) -> Self {
        Self::new(spatial, Polarization::V)
    }

    pub fn index(self) -> usize {
        2 * self.spatial + (self.pol == Polarization::V) as usize
    }

    pub fn from_index(index: usize) -> Self {
        let pol = if index.is_multiple_of(2) {
            Polarization::H
        } else {
            Polarization::V
        };
        Self::new(index / 2, pol)
    }
}

/// Occupation-number basis ket over `2 * modes` polarized channels.
///
/// Occupations are stored as `[H0, V0, H1, V1, ...]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockState {
    occupations: Vec<u8>,
}

impl FockState {
    pub fn vacuum(modes: usize) -> Self {
        Self {
            occupations: vec![0; 2 * modes],
        }
    }

    /// Builds a ket from a flat occupation vector; its length must be even.
    pub fn from_occupations(occupations: Vec<u8>) -> Result<Self> {
        if !occupations.len().is_multiple_of(2) {
            return Err(Error::ShapeMismatch {
                expected: occupations.len() + 1,
                found: occupations.len(),
            });
        }
        Ok(Self { occupations })
    }

    /// Ket with one photon in each listed channel (repeats stack).
    pub fn from_photons(modes: usize, photons: &[PolarizedMode]) -> Result<Self> {
        let mut state = Self::vacuum(modes);
        for &p in photons {
            if p.spatial >= modes {
                return Err(Error::ModeOutOfRange {
                    index: p.spatial,
                    modes,
                });
            }
            state.occupations[p.index()] += 1;
        }
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.occupations.len() / 2
    }

    pub fn occupations(&self) -> &[u8] {
        &self.occupations
    }

    pub fn occupation(&self, mode: PolarizedMode) -> u8 {
        self.occupations[mode.index()]
    }

    pub(crate) fn occupations_mut(&mut self) -> &mut [u8] {
        &mut self.occupations
    }

    pub fn photon_count(&self) -> u32 {
        self.occupations.iter().map(|&n| n as u32).sum()
    }

    /// Photons in spatial mode `spatial`, both polarizations.
    pub fn spatial_count(&self, spatial: usize) -> u32 {
        self.occupations[2 * spatial] as u32 + self.occupations[2 * spatial + 1] as u32
    }

    /// Every ket with exactly `photons` photons over `modes` spatial modes,
    /// in canonical order.
    pub fn enumerate(modes: usize, photons: u32) -> Vec<FockState> {
        fn fill(slots: usize, left: u32, acc: &mut Vec<u8>, out: &mut Vec<FockState>) {
            if slots == 1 {
                acc.push(left as u8);
                out.push(FockState {
                    occupations: acc.clone(),
                });
                acc.pop();
                return;
            }
            for n in 0..=left {
                acc.push(n as u8);
                fill(slots - 1, left - n, acc, out);
                acc.pop();
            }
        }
        if modes == 0 {
            return if photons == 0 {
                vec![FockState::vacuum(0)]
            } else {
                Vec::new()
            };
        }
        let mut out = Vec::new();
        fill(2 * modes, photons, &mut Vec::new(), &mut out);
        out
    }

    /// Ket label such as `|H,V>` or `|HV,0>`, one field per spatial mode.
    pub fn label(&self) -> String {
        let fields: Vec<String> = (0..self.modes())
            .map(|s| {
                let h = self.occupations[2 * s] as usize;
                let v = self.occupations[2 * s + 1] as usize;
                if h + v == 0 {
                    "0".to_string()
                } else {
                    format!("{}{}", "H".repeat(h), "V".repeat(v))
                }
            })
            .collect();
        format!("|{}>", fields.join(","))
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Sparse superposition of Fock kets with a common mode count and photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    modes: usize,
    terms: BTreeMap<FockState, Complex64>,
}

impl StateVector {
    /// The vacuum over `modes` spatial modes.
    pub fn vacuum(modes: usize) -> Self {
        Self::basis(FockState::vacuum(modes))
    }

    pub fn basis(ket: FockState) -> Self {
        let modes = ket.modes();
        let mut terms = BTreeMap::new();
        terms.insert(ket, Complex64::new(1.0, 0.0));
        Self { modes, terms }
    }

    /// Collects `(ket, amplitude)` pairs, summing duplicates and pruning
    /// amplitudes below `1e-12`. Norm is not checked.
    pub fn from_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FockState, Complex64)>,
    {
        let mut map: BTreeMap<FockState, Complex64> = BTreeMap::new();
        let mut photons = None;
        for (ket, amp) in terms {
            if ket.modes() != modes {
                return Err(Error::ShapeMismatch {
                    expected: modes,
                    found: ket.modes(),
                });
            }
            let n = ket.photon_count();
            match photons {
                None => photons = Some(n),
                Some(p) if p != n => {
                    return Err(Error::Invalid(format!(
                        "superposition mixes photon numbers {p} and {n}"
                    )))
                }
                _ => {}
            }
            *map.entry(ket).or_default() += amp;
        }
        map.retain(|_, a| a.norm() >= PRUNE_TOL);
        Ok(Self { modes, terms: map })
    }

    pub(crate) fn from_map_unchecked(modes: usize, mut terms: BTreeMap<FockState, Complex64>) -> Self {
        terms.retain(|_, a| a.norm() >= PRUNE_TOL);
        Self { modes, terms }
    }

    /// One photon in spatial mode `spatial` with polarization `h|H> + v|V>`.
    pub fn single_photon(modes: usize, spatial: usize, amps: (Complex64, Complex64)) -> Result<Self> {
        if spatial >= modes {
            return Err(Error::ModeOutOfRange {
                index: spatial,
                modes,
            });
        }
        let norm_sqr = amps.0.norm_sqr() + amps.1.norm_sqr();
        if (norm_sqr - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let h = FockState::from_photons(modes, &[PolarizedMode::h(spatial)])?;
        let v = FockState::from_photons(modes, &[PolarizedMode::v(spatial)])?;
        Self::from_terms(modes, [(h, amps.0), (v, amps.1)])
    }

    /// Product state of independent subsystems; spatial modes are concatenated
    /// in argument order. Fails if the total exceeds the default photon limit.
    pub fn tensor(states: &[StateVector]) -> Result<Self> {
        Self::tensor_with_limit(states, DEFAULT_MAX_PHOTONS)
    }

    pub fn tensor_with_limit(states: &[StateVector], max_photons: u32) -> Result<Self> {
        let photons: u32 = states.iter().map(|s| s.photon_count()).sum();
        if photons > max_photons {
            return Err(Error::Capacity {
                photons,
                limit: max_photons,
            });
        }
        let mut acc = StateVector::from_map_unchecked(0, {
            let mut m = BTreeMap::new();
            m.insert(FockState::vacuum(0), Complex64::new(1.0, 0.0));
            m
        });
        for s in states {
            let modes = acc.modes + s.modes;
            let mut out = BTreeMap::new();
            for (ka, aa) in &acc.terms {
                for (kb, ab) in &s.terms {
                    let mut occ = ka.occupations.clone();
                    occ.extend_from_slice(&kb.occupations);
                    *out.entry(FockState { occupations: occ }).or_default() += aa * ab;
                }
            }
            acc = StateVector::from_map_unchecked(modes, out);
        }
        Ok(acc)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Total photon number (0 for an empty term list).
    pub fn photon_count(&self) -> u32 {
        self.terms
            .keys()
            .next()
            .map(FockState::photon_count)
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&FockState, &Complex64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, ket: &FockState) -> Complex64 {
        self.terms.get(ket).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= VALIDATION_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= PRUNE_TOL * PRUNE_TOL {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, a)| (k.clone(), a * factor))
            .collect();
        Self::from_map_unchecked(self.modes, terms)
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.modes != other.modes {
            return Err(Error::ShapeMismatch {
                expected: self.modes,
                found: other.modes,
            });
        }
        let (small, large, flip) = if self.terms.len() <= other.terms.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Complex64::default();
        for (k, a) in &small.terms {
            if let Some(b) = large.terms.get(k) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        Ok(acc)
    }

    /// Projects onto `pattern` and renormalizes the kept branch.
    pub fn post_select(&self, pattern: &PhotonPattern) -> Result<PostSelected> {
        if pattern.modes() != self.modes {
            return Err(Error::ShapeMismatch {
                expected: self.modes,
                found: pattern.modes(),
            });
        }
        let kept: BTreeMap<FockState, Complex64> = self
            .terms
            .iter()
            .filter(|(k, _)| pattern.matches(k))
            .map(|(k, a)| (k.clone(), *a))
            .collect();
        let kept = StateVector::from_map_unchecked(self.modes, kept);
        let probability = kept.norm_sqr().min(1.0);
        let state = if kept.is_empty() || probability <= PRUNE_TOL * PRUNE_TOL {
            None
        } else {
            Some(kept.normalized()?)
        };
        Ok(PostSelected { state, probability })
    }

    /// The component orthogonal to `pattern`, unnormalized.
    pub fn rejected_branch(&self, pattern: &PhotonPattern) -> StateVector {
        let rest = self
            .terms
            .iter()
            .filter(|(k, _)| !pattern.matches(k))
            .map(|(k, a)| (k.clone(), *a))
            .collect();
        StateVector::from_map_unchecked(self.modes, rest)
    }

    /// Largest amplitude-wise distance to `other`.
    pub fn max_amplitude_diff(&self, other: &StateVector) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, a) in &self.terms {
            worst = worst.max((a - other.amplitude(k)).norm());
        }
        for (k, b) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(b.norm());
            }
        }
        worst
    }

    /// Fidelity-style overlap `|<self|other>|`.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm())
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i){}", a.re, a.im, k)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Photon-count requirement per spatial mode; `None` accepts any count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhotonPattern {
    counts: Vec<Option<u32>>,
}

impl PhotonPattern {
    pub fn new(counts: Vec<Option<u32>>) -> Self {
        Self { counts }
    }

    /// Exactly one photon in every spatial mode.
    pub fn one_per_mode(modes: usize) -> Self {
        Self::new(vec![Some(1); modes])
    }

    pub fn exact(counts: &[u32]) -> Self {
        Self::new(counts.iter().map(|&c| Some(c)).collect())
    }

    pub fn modes(&self) -> usize {
        self.counts.len()
    }

    pub fn matches(&self, ket: &FockState) -> bool {
        self.counts
            .iter()
            .enumerate()
            .all(|(s, req)| req.is_none_or(|n| ket.spatial_count(s) == n))
    }
}

/// Result of a post-selection: the renormalized kept branch (absent when the
/// projection vanishes) and its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSelected {
    pub state: Option<StateVector>,
    pub probability: f64,
}

impl PostSelected {
    pub fn is_empty(&self) -> bool {
        self.state.is_none()
    }
}
