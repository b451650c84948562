//! Payoffs and winners of the two games.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detection::OutcomeRecord;
use crate::error::{check_unit_interval, Error, Result};
use crate::fock::Polarization;

/// A player's pure polarization choice; row/column label of a payoff table.
pub type Choice = Polarization;

/// 2×2 bimatrix indexed `[alice][bob]` with `H = 0`, `V = 1`; each entry is
/// `(alice_payoff, bob_payoff)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffTable {
    pub entries: [[(f64, f64); 2]; 2],
}

impl Default for PayoffTable {
    /// The classical prisoner's dilemma in polarization labels.
    fn default() -> Self {
        Self {
            entries: [[(2.0, 2.0), (5.0, 1.0)], [(1.0, 5.0), (4.0, 4.0)]],
        }
    }
}

pub(crate) fn idx(c: Choice) -> usize {
    match c {
        Polarization::H => 0,
        Polarization::V => 1,
    }
}

impl PayoffTable {
    pub fn new(entries: [[(f64, f64); 2]; 2]) -> Result<Self> {
        let t = Self { entries };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self
            .entries
            .iter()
            .flatten()
            .all(|(a, b)| a.is_finite() && b.is_finite());
        if finite {
            Ok(())
        } else {
            Err(Error::Invalid("payoff table entries must be finite".into()))
        }
    }

    pub fn get(&self, alice: Choice, bob: Choice) -> (f64, f64) {
        self.entries[idx(alice)][idx(bob)]
    }
}

/// The four detectable prisoner's dilemma outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PdOutcome {
    HH,
    VV,
    BothAtAlice,
    BothAtBob,
}

impl PdOutcome {
    pub const ALL: [PdOutcome; 4] = [PdOutcome::HH, PdOutcome::VV, PdOutcome::BothAtAlice, PdOutcome::BothAtBob];

    /// Payoff-table cell this outcome pays out: two photons at Alice pays
    /// as (H, V), two at Bob as (V, H).
    pub fn cell(self) -> (Choice, Choice) {
        use Polarization::*;
        match self {
            PdOutcome::HH => (H, H),
            PdOutcome::VV => (V, V),
            PdOutcome::BothAtAlice => (H, V),
            PdOutcome::BothAtBob => (V, H),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PdOutcome::HH => "HH",
            PdOutcome::VV => "VV",
            PdOutcome::BothAtAlice => "BothAtAlice",
            PdOutcome::BothAtBob => "BothAtBob",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameResultPd {
    pub outcome: PdOutcome,
    pub payoffs: (f64, f64),
}

/// A detector record that matches no ideal outcome (loss, dark counts, or a
/// failed post-selection).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("inconclusive record {0}")]
pub struct Inconclusive(pub OutcomeRecord);

/// Maps a two-output record to its prisoner's dilemma outcome and payoffs.
pub fn pd_classify(record: &OutcomeRecord, table: &PayoffTable) -> Result<GameResultPd, Inconclusive> {
    let outcome = match record.outputs.as_slice() {
        [a, b] => match ((a.h, a.v), (b.h, b.v)) {
            ((1, 0), (1, 0)) => PdOutcome::HH,
            ((0, 1), (0, 1)) => PdOutcome::VV,
            ((1, 1), (0, 0)) => PdOutcome::BothAtAlice,
            ((0, 0), (1, 1)) => PdOutcome::BothAtBob,
            _ => return Err(Inconclusive(record.clone())),
        },
        _ => return Err(Inconclusive(record.clone())),
    };
    let (a, b) = outcome.cell();
    Ok(GameResultPd {
        outcome,
        payoffs: table.get(a, b),
    })
}

/// Probability weight of each payoff cell for `x = |α|²`, `y = |λ|²`.
pub fn pd_cell_weights(x: f64, y: f64) -> [[f64; 2]; 2] {
    [[x * y, x * (1.0 - y)], [(1.0 - x) * y, (1.0 - x) * (1.0 - y)]]
}

/// Expected payoffs `(E_A, E_B)` summed over the four weighted cells.
pub fn pd_expected(x: f64, y: f64, table: &PayoffTable) -> Result<(f64, f64)> {
    check_unit_interval("x", x)?;
    check_unit_interval("y", y)?;
    table.validate()?;
    let w = pd_cell_weights(x, y);
    let mut ea = 0.0;
    let mut eb = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let (pa, pb) = table.entries[r][c];
            ea += pa * w[r][c];
            eb += pb * w[r][c];
        }
    }
    Ok((ea, eb))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Player {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameResultZs {
    pub winner: Player,
    /// A's two results (outputs 1 and 2) agree.
    pub a_equal: bool,
    /// B's two results (outputs 3 and 4) agree.
    pub b_equal: bool,
}

impl GameResultZs {
    /// `a_equal != b_equal` cannot happen on the ideal two-pair state.
    pub fn violates_correlation(&self) -> bool {
        self.a_equal != self.b_equal
    }
}

/// Decides the zero-sum game from a post-selected record (one click at each
/// of four outputs). A wins iff its two results agree.
pub fn zs_classify(record: &OutcomeRecord) -> Result<GameResultZs, Inconclusive> {
    let pols: Option<Vec<Polarization>> = match record.outputs.len() {
        4 => record.outputs.iter().map(|c| c.single()).collect(),
        _ => None,
    };
    let Some(p) = pols else {
        return Err(Inconclusive(record.clone()));
    };
    let a_equal = p[0] == p[1];
    let b_equal = p[2] == p[3];
    Ok(GameResultZs {
        winner: if a_equal { Player::A } else { Player::B },
        a_equal,
        b_equal,
    })
}

/// `(P_A, P_B)` with `P_A = 1 - (pa - 2 pa pc + pc)` and `P_B = 1 - P_A`.
pub fn zs_win_probability(pa: f64, pc: f64) -> Result<(f64, f64)> {
    check_unit_interval("pa", pa)?;
    check_unit_interval("pc", pc)?;
    let p_a = 1.0 - (pa - 2.0 * pa * pc + pc);
    Ok((p_a, 1.0 - p_a))
}
