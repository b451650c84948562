//! Linear-optical elements as mode unitaries, plus a photon-loss channel
//! sampled as quantum trajectories.
//!
//! Circulators, mirrors and fiber spans only reroute spatial paths, so they
//! are all [`router`]s. Fiber delays are assumed synchronized and carry no
//! state of their own.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::fock::{ModeUnitary, PhotonPattern, PolarizedMode, Polarization, StateVector};

/// 2×2 polarization (Jones) matrix acting on `(H, V)` amplitudes, row-major.
pub type Jones = [[Complex64; 2]; 2];

/// Which polarization a PBS passes straight through; the other swaps ports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PbsConvention {
    #[default]
    TransmitH,
    TransmitV,
}

fn check_port(modes: usize, port: usize) -> Result<()> {
    if port < modes {
        Ok(())
    } else {
        Err(Error::ModeOutOfRange { index: port, modes })
    }
}

/// Polarizing beam splitter between spatial ports `p` and `q` with the
/// default convention (H transmits, V swaps).
pub fn pbs(modes: usize, p: usize, q: usize) -> Result<ModeUnitary> {
    pbs_with(modes, p, q, PbsConvention::TransmitH)
}

pub fn pbs_with(modes: usize, p: usize, q: usize, convention: PbsConvention) -> Result<ModeUnitary> {
    check_port(modes, p)?;
    check_port(modes, q)?;
    if p == q {
        return Err(Error::InvalidDevice(format!("PBS ports must differ, got {p} twice")));
    }
    let swapped = match convention {
        PbsConvention::TransmitH => Polarization::V,
        PbsConvention::TransmitV => Polarization::H,
    };
    let mut u = ModeUnitary::identity(modes);
    let (a, b) = (
        PolarizedMode::new(p, swapped).index(),
        PolarizedMode::new(q, swapped).index(),
    );
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    u.set(a, a, zero);
    u.set(b, b, zero);
    u.set(b, a, one);
    u.set(a, b, one);
    Ok(u)
}

/// Applies `jones` to the polarization of spatial mode `port`.
pub fn rotator(modes: usize, port: usize, jones: &Jones) -> Result<ModeUnitary> {
    check_port(modes, port)?;
    let local = ModeUnitary::new(2, vec![jones[0][0], jones[0][1], jones[1][0], jones[1][1]])?;
    let mut u = ModeUnitary::identity(modes);
    let (h, v) = (PolarizedMode::h(port).index(), PolarizedMode::v(port).index());
    for (r, row) in [h, v].into_iter().enumerate() {
        for (c, col) in [h, v].into_iter().enumerate() {
            u.set(row, col, local.get(r, c));
        }
    }
    Ok(u)
}

/// Spatial permutation: a photon in mode `i` moves to `permutation[i]`,
/// keeping its polarization.
pub fn router(modes: usize, permutation: &[usize]) -> Result<ModeUnitary> {
    if permutation.len() != modes {
        return Err(Error::ShapeMismatch {
            expected: modes,
            found: permutation.len(),
        });
    }
    let mut seen = vec![false; modes];
    for &dst in permutation {
        if dst >= modes || std::mem::replace(&mut seen[dst], true) {
            return Err(Error::InvalidDevice(format!(
                "router map {permutation:?} is not a permutation of 0..{modes}"
            )));
        }
    }
    let zero = Complex64::default();
    let mut u = ModeUnitary::identity(modes);
    for i in 0..2 * modes {
        u.set(i, i, zero);
    }
    for (src, &dst) in permutation.iter().enumerate() {
        for pol in Polarization::BOTH {
            let from = PolarizedMode::new(src, pol).index();
            let to = PolarizedMode::new(dst, pol).index();
            u.set(to, from, Complex64::new(1.0, 0.0));
        }
    }
    Ok(u)
}

/// Jones matrix whose first column is `(first, second)`, i.e. it maps `|H>`
/// to `first|H> + second|V>`.
pub fn jones_from_column(first: Complex64, second: Complex64) -> Jones {
    [[first, -second.conj()], [second, first.conj()]]
}

/// One quantum-trajectory step of a loss channel with survival probability
/// `eta` on both polarizations of spatial mode `port`.
///
/// The number of photons lost from each polarized channel is drawn from the
/// channel's Kraus decomposition, the matching branch is kept and
/// renormalized. Returns whether any photon was lost.
pub fn loss_branch<R: Rng + ?Sized>(
    state: &StateVector,
    port: usize,
    eta: f64,
    rng: &mut R,
) -> Result<(StateVector, bool)> {
    check_port(state.modes(), port)?;
    check_unit_interval("eta", eta)?;
    let mut current = state.clone();
    let mut lost_any = false;
    for pol in Polarization::BOTH {
        let channel = PolarizedMode::new(port, pol).index();
        let max_n = current
            .terms()
            .map(|(k, _)| k.occupations()[channel] as u32)
            .max()
            .unwrap_or(0);
        // probability of losing k photons from this channel
        let mut weights = vec![0.0; max_n as usize + 1];
        for (ket, amp) in current.terms() {
            let n = ket.occupations()[channel] as u32;
            for k in 0..=n {
                weights[k as usize] += amp.norm_sqr() * loss_weight(n, k, eta);
            }
        }
        let total: f64 = weights.iter().sum();
        let u: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut lost = max_n;
        for (k, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                lost = k as u32;
                break;
            }
        }
        if lost > 0 {
            lost_any = true;
        }
        let mut terms = BTreeMap::new();
        for (ket, amp) in current.terms() {
            let n = ket.occupations()[channel] as u32;
            if n < lost {
                continue;
            }
            let mut next = ket.clone();
            next.occupations_mut()[channel] -= lost as u8;
            *terms.entry(next).or_insert(Complex64::default()) += amp * loss_weight(n, lost, eta).sqrt();
        }
        current = StateVector::from_map_unchecked(current.modes(), terms).normalized()?;
    }
    Ok((current, lost_any))
}

// C(n, k) (1 - eta)^k eta^(n - k)
fn loss_weight(n: u32, k: u32, eta: f64) -> f64 {
    binomial(n, k) * (1.0 - eta).powi(k as i32) * eta.powi((n - k) as i32)
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Kind tag of a [`DeviceSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeviceKind {
    #[serde(rename = "PBS")]
    Pbs,
    Rotator,
    Router,
    Loss,
}

/// Kind-specific parameters. Unused fields are omitted on the wire.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParams {
    /// Rotator Jones matrix as `[[re, im]; 4]`, row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jones: Option<[[f64; 2]; 4]>,
    /// Loss survival probability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<PbsConvention>,
}

/// Serializable description of one circuit element:
/// `{"kind": "...", "ports": [...], "params": {...}}`.
///
/// For a router, `ports[i]` is the destination of spatial mode `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSpec {
    pub kind: DeviceKind,
    pub ports: Vec<usize>,
    #[serde(default)]
    pub params: DeviceParams,
}

impl DeviceSpec {
    pub fn pbs(p: usize, q: usize) -> Self {
        Self {
            kind: DeviceKind::Pbs,
            ports: vec![p, q],
            params: DeviceParams::default(),
        }
    }

    pub fn rotator(port: usize, jones: &Jones) -> Self {
        let flat = [jones[0][0], jones[0][1], jones[1][0], jones[1][1]].map(|z| [z.re, z.im]);
        Self {
            kind: DeviceKind::Rotator,
            ports: vec![port],
            params: DeviceParams {
                jones: Some(flat),
                ..Default::default()
            },
        }
    }

    pub fn router(permutation: Vec<usize>) -> Self {
        Self {
            kind: DeviceKind::Router,
            ports: permutation,
            params: DeviceParams::default(),
        }
    }

    pub fn loss(ports: Vec<usize>, eta: f64) -> Self {
        Self {
            kind: DeviceKind::Loss,
            ports,
            params: DeviceParams {
                eta: Some(eta),
                ..Default::default()
            },
        }
    }

    /// Checks port arity and parameters against `modes`.
    pub fn validate(&self, modes: usize) -> Result<()> {
        match self.kind {
            DeviceKind::Loss => {
                if self.ports.is_empty() {
                    return Err(Error::InvalidDevice("loss needs at least one port".into()));
                }
                for &p in &self.ports {
                    check_port(modes, p)?;
                }
                let eta = self
                    .params
                    .eta
                    .ok_or_else(|| Error::InvalidDevice("loss requires params.eta".into()))?;
                check_unit_interval("eta", eta)
            }
            _ => self.unitary(modes).map(|_| ()),
        }
    }

    /// Mode unitary of a lossless element. Loss elements have none.
    pub fn unitary(&self, modes: usize) -> Result<ModeUnitary> {
        match self.kind {
            DeviceKind::Pbs => match self.ports.as_slice() {
                &[p, q] => pbs_with(modes, p, q, self.params.convention.unwrap_or_default()),
                other => Err(Error::InvalidDevice(format!(
                    "PBS takes exactly 2 ports, got {}",
                    other.len()
                ))),
            },
            DeviceKind::Rotator => {
                let &[port] = self.ports.as_slice() else {
                    return Err(Error::InvalidDevice(format!(
                        "rotator takes exactly 1 port, got {}",
                        self.ports.len()
                    )));
                };
                let flat = self
                    .params
                    .jones
                    .ok_or_else(|| Error::InvalidDevice("rotator requires params.jones".into()))?;
                let z = flat.map(|[re, im]| Complex64::new(re, im));
                rotator(modes, port, &[[z[0], z[1]], [z[2], z[3]]])
            }
            DeviceKind::Router => router(modes, &self.ports),
            DeviceKind::Loss => Err(Error::InvalidDevice(
                "loss is not a unitary element".into(),
            )),
        }
    }
}

/// Ordered list of elements on `modes` spatial modes, with an optional
/// post-selection pattern applied after the last element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circuit {
    pub modes: usize,
    pub elements: Vec<DeviceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_select: Option<Vec<Option<u32>>>,
}

impl Circuit {
    pub fn new(modes: usize) -> Self {
        Self {
            modes,
            elements: Vec::new(),
            post_select: None,
        }
    }

    pub fn push(mut self, element: DeviceSpec) -> Self {
        self.elements.push(element);
        self
    }

    pub fn with_post_selection(mut self, pattern: Vec<Option<u32>>) -> Self {
        self.post_select = Some(pattern);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.elements {
            e.validate(self.modes)?;
        }
        if let Some(p) = &self.post_select {
            if p.len() != self.modes {
                return Err(Error::ShapeMismatch {
                    expected: self.modes,
                    found: p.len(),
                });
            }
        }
        Ok(())
    }

    pub fn pattern(&self) -> Option<PhotonPattern> {
        self.post_select.clone().map(PhotonPattern::new)
    }

    pub fn is_lossless(&self) -> bool {
        self.elements.iter().all(|e| e.kind != DeviceKind::Loss)
    }

    /// Product of all element unitaries; fails if the circuit has loss.
    pub fn unitary(&self) -> Result<ModeUnitary> {
        let mut total = ModeUnitary::identity(self.modes);
        for e in &self.elements {
            total = total.then(&e.unitary(self.modes)?)?;
        }
        Ok(total)
    }

    /// Propagates `input` through a lossless circuit, before post-selection.
    pub fn propagate(&self, input: &StateVector) -> Result<StateVector> {
        let mut state = input.clone();
        for e in &self.elements {
            state = e.unitary(self.modes)?.apply(&state)?;
        }
        Ok(state)
    }

    /// Propagates one trajectory, sampling every loss element with `rng`.
    /// Returns the final state and whether any photon was lost.
    pub fn propagate_trajectory<R: Rng + ?Sized>(
        &self,
        input: &StateVector,
        rng: &mut R,
    ) -> Result<(StateVector, bool)> {
        let mut state = input.clone();
        let mut lost = false;
        for e in &self.elements {
            if e.kind == DeviceKind::Loss {
                e.validate(self.modes)?;
                let eta = e.params.eta.unwrap_or(1.0);
                for &port in &e.ports {
                    let (next, l) = loss_branch(&state, port, eta, rng)?;
                    state = next;
                    lost |= l;
                }
            } else {
                state = e.unitary(self.modes)?.apply(&state)?;
            }
        }
        Ok((state, lost))
    }
}
