//! The two game networks.
//!
//! * Prisoner's dilemma: each player rotates an `H` photon into their
//!   strategy and both photons meet on one PBS. Output 1 (spatial mode 0) is
//!   Alice's measurement port, output 2 (mode 1) is Bob's.
//! * Zero-sum fusion: each player's photon is fused with that player's
//!   ancilla on its own PBS, then exactly one photon is required at each of
//!   the four outputs. Outputs 1..4 are spatial modes 0..3; the pairs (1,3)
//!   and (2,4) come out entangled.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::fock::{FockState, Polarization, PolarizedMode, StateVector, VALIDATION_TOL};
use crate::optics::{jones_from_column, Circuit, DeviceSpec, Jones};

/// A player's polarization choice `first|H> + second|V>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct Strategy {
    first: Complex64,
    second: Complex64,
}

impl Strategy {
    pub fn new(first: Complex64, second: Complex64) -> Result<Self> {
        let norm_sqr = first.norm_sqr() + second.norm_sqr();
        if (norm_sqr - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { first, second })
    }

    pub fn real(first: f64, second: f64) -> Result<Self> {
        Self::new(Complex64::new(first, 0.0), Complex64::new(second, 0.0))
    }

    /// Real non-negative amplitudes with `|first|² = p`.
    pub fn from_probability(p: f64) -> Result<Self> {
        check_unit_interval("probability", p)?;
        Self::real(p.sqrt(), (1.0 - p).sqrt())
    }

    pub fn h() -> Self {
        Self {
            first: Complex64::new(1.0, 0.0),
            second: Complex64::default(),
        }
    }

    pub fn v() -> Self {
        Self {
            first: Complex64::default(),
            second: Complex64::new(1.0, 0.0),
        }
    }

    pub fn balanced() -> Self {
        Self {
            first: Complex64::new(FRAC_1_SQRT_2, 0.0),
            second: Complex64::new(FRAC_1_SQRT_2, 0.0),
        }
    }

    pub fn first(&self) -> Complex64 {
        self.first
    }

    pub fn second(&self) -> Complex64 {
        self.second
    }

    pub fn amps(&self) -> (Complex64, Complex64) {
        (self.first, self.second)
    }

    /// `|first|²`, the probability of measuring `H` on the bare photon.
    pub fn probability(&self) -> f64 {
        self.first.norm_sqr()
    }

    /// Rotator taking `|H>` to this strategy.
    pub fn jones(&self) -> Jones {
        jones_from_column(self.first, self.second)
    }

    pub fn amplitude(&self, pol: Polarization) -> Complex64 {
        match pol {
            Polarization::H => self.first,
            Polarization::V => self.second,
        }
    }
}

impl TryFrom<[[f64; 2]; 2]> for Strategy {
    type Error = Error;

    fn try_from(v: [[f64; 2]; 2]) -> Result<Self> {
        Strategy::new(Complex64::new(v[0][0], v[0][1]), Complex64::new(v[1][0], v[1][1]))
    }
}

impl From<Strategy> for [[f64; 2]; 2] {
    fn from(s: Strategy) -> Self {
        [[s.first.re, s.first.im], [s.second.re, s.second.im]]
    }
}

/// Output of a game network.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitRun {
    /// Full state after the last optical element.
    pub pre_selection: StateVector,
    /// Renormalized kept branch; `None` when post-selection has probability 0.
    pub output: Option<StateVector>,
    pub success_probability: f64,
    pub post_selected: bool,
}

impl CircuitRun {
    /// Squared norm of the branch rejected by post-selection.
    pub fn failure_probability(&self, pattern: &crate::fock::PhotonPattern) -> f64 {
        self.pre_selection.rejected_branch(pattern).norm_sqr()
    }
}

fn h_photons(modes: usize) -> StateVector {
    let photons: Vec<_> = (0..modes).map(PolarizedMode::h).collect();
    StateVector::basis(FockState::from_photons(modes, &photons).expect("in range"))
}

/// Prisoner's dilemma network: strategy rotators, circulator routing, one PBS.
pub fn pd_circuit(alice: &Strategy, bob: &Strategy) -> Circuit {
    Circuit::new(2)
        .push(DeviceSpec::rotator(0, &alice.jones()))
        .push(DeviceSpec::rotator(1, &bob.jones()))
        // circulators hand each input to its PBS port unchanged
        .push(DeviceSpec::router(vec![0, 1]))
        .push(DeviceSpec::pbs(0, 1))
}

/// Zero-sum fusion network. Sources are laid out in argument order
/// (player A, ancilla A, player B, ancilla B) and routed so that A's pair
/// meets on the PBS feeding outputs (1,3) and B's pair on outputs (2,4).
pub fn zs_circuit(player_a: &Strategy, ancilla_a: &Strategy, player_b: &Strategy, ancilla_b: &Strategy) -> Circuit {
    Circuit::new(4)
        .push(DeviceSpec::rotator(0, &player_a.jones()))
        .push(DeviceSpec::rotator(1, &ancilla_a.jones()))
        .push(DeviceSpec::rotator(2, &player_b.jones()))
        .push(DeviceSpec::rotator(3, &ancilla_b.jones()))
        .push(DeviceSpec::router(vec![0, 2, 1, 3]))
        .push(DeviceSpec::pbs(0, 2))
        .push(DeviceSpec::pbs(1, 3))
        .with_post_selection(vec![Some(1); 4])
}

/// Input of both networks: an `H` photon in every source mode.
pub fn source_state(modes: usize) -> StateVector {
    h_photons(modes)
}

/// Runs the prisoner's dilemma network. No post-selection: every outcome,
/// including both photons on one side, carries a payoff.
pub fn run_pd(alice: &Strategy, bob: &Strategy) -> Result<CircuitRun> {
    let out = pd_circuit(alice, bob).propagate(&source_state(2))?;
    Ok(CircuitRun {
        pre_selection: out.clone(),
        output: Some(out),
        success_probability: 1.0,
        post_selected: false,
    })
}

/// Runs the fusion network and keeps the one-photon-per-output branch.
pub fn run_zs(
    player_a: &Strategy,
    ancilla_a: &Strategy,
    player_b: &Strategy,
    ancilla_b: &Strategy,
) -> Result<CircuitRun> {
    let circuit = zs_circuit(player_a, ancilla_a, player_b, ancilla_b);
    let pre = circuit.propagate(&source_state(4))?;
    let pattern = circuit.pattern().expect("fusion circuit post-selects");
    let kept = pre.post_select(&pattern)?;
    Ok(CircuitRun {
        pre_selection: pre,
        output: kept.state,
        success_probability: kept.probability,
        post_selected: true,
    })
}

/// Ideal two-pair state `(a|HH> + b|VV>)_{1,3} ⊗ (c|HH> + d|VV>)_{2,4}`
/// on outputs 1..4.
pub fn target_state(a: &Strategy, c: &Strategy) -> Result<StateVector> {
    let mut terms = Vec::with_capacity(4);
    for pa in Polarization::BOTH {
        for pc in Polarization::BOTH {
            let photons = [
                PolarizedMode::new(0, pa),
                PolarizedMode::new(1, pc),
                PolarizedMode::new(2, pa),
                PolarizedMode::new(3, pc),
            ];
            terms.push((
                FockState::from_photons(4, &photons)?,
                a.amplitude(pa) * c.amplitude(pc),
            ));
        }
    }
    StateVector::from_terms(4, terms)
}

/// Closed-form prisoner's dilemma output
/// `αλ|H,H> + βξ|V,V> + αξ|HV,0> + βλ|0,HV>`.
pub fn pd_closed_form(alice: &Strategy, bob: &Strategy) -> Result<StateVector> {
    let (al, be) = alice.amps();
    let (la, xi) = bob.amps();
    let k = |p: &[PolarizedMode]| FockState::from_photons(2, p);
    StateVector::from_terms(
        2,
        [
            (k(&[PolarizedMode::h(0), PolarizedMode::h(1)])?, al * la),
            (k(&[PolarizedMode::v(0), PolarizedMode::v(1)])?, be * xi),
            (k(&[PolarizedMode::h(0), PolarizedMode::v(0)])?, al * xi),
            (k(&[PolarizedMode::h(1), PolarizedMode::v(1)])?, be * la),
        ],
    )
}
