//! Polarization-resolved photon counting at every spatial output.
//!
//! Each output carries an `H` and a `V` detector. The ideal model resolves
//! photon number, so `|HV,0>` (two clicks at output 1) is distinguishable
//! from a single click. Imperfections are applied per detector: each would-be
//! click survives with probability `efficiency`, then a dark click is added
//! with probability `dark_count_prob`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::fock::{FockState, Polarization, StateVector};
use crate::format::fmt12;
use crate::optics::binomial;
use crate::rng::{seeded, SimRng};

/// Click counts of the `H` and `V` detectors at one output.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Clicks {
    pub h: u32,
    pub v: u32,
}

impl Clicks {
    pub fn total(&self) -> u32 {
        self.h + self.v
    }

    /// The single polarization seen, if exactly one click occurred.
    pub fn single(&self) -> Option<Polarization> {
        match (self.h, self.v) {
            (1, 0) => Some(Polarization::H),
            (0, 1) => Some(Polarization::V),
            _ => None,
        }
    }

    fn get(&self, pol: Polarization) -> u32 {
        match pol {
            Polarization::H => self.h,
            Polarization::V => self.v,
        }
    }

    fn get_mut(&mut self, pol: Polarization) -> &mut u32 {
        match pol {
            Polarization::H => &mut self.h,
            Polarization::V => &mut self.v,
        }
    }
}

/// One run's detector record, indexed by spatial output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub outputs: Vec<Clicks>,
}

impl OutcomeRecord {
    pub fn new(outputs: Vec<Clicks>) -> Self {
        Self { outputs }
    }

    /// Ideal photon-number-resolving record of a basis ket.
    pub fn from_ket(ket: &FockState) -> Self {
        let occ = ket.occupations();
        Self {
            outputs: occ
                .chunks(2)
                .map(|c| Clicks {
                    h: c[0] as u32,
                    v: c[1] as u32,
                })
                .collect(),
        }
    }

    pub fn total_clicks(&self) -> u32 {
        self.outputs.iter().map(Clicks::total).sum()
    }

    /// Serializes as `1:H;2:HV`: 1-based output index, then one letter per
    /// click with `H` before `V`. Outputs without clicks keep an empty field.
    pub fn pattern(&self) -> String {
        self.outputs
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{}:{}{}", i + 1, "H".repeat(c.h as usize), "V".repeat(c.v as usize)))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse_pattern(text: &str) -> Result<Self> {
        let mut outputs = Vec::new();
        for (i, field) in text.split(';').enumerate() {
            let (idx, letters) = field
                .split_once(':')
                .ok_or_else(|| Error::Invalid(format!("pattern field `{field}` lacks `:`")))?;
            if idx.parse::<usize>().ok() != Some(i + 1) {
                return Err(Error::Invalid(format!("pattern field `{field}` out of order")));
            }
            let mut c = Clicks::default();
            for ch in letters.chars() {
                match ch {
                    'H' if c.v == 0 => c.h += 1,
                    'V' => c.v += 1,
                    _ => return Err(Error::Invalid(format!("bad click letters `{letters}`"))),
                }
            }
            outputs.push(c);
        }
        Ok(Self { outputs })
    }
}

impl fmt::Display for OutcomeRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pattern())
    }
}

/// Detector imperfections, identical for every detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub efficiency: f64,
    pub dark_count_prob: f64,
    /// Photon-number resolving; otherwise counts saturate at one click.
    pub resolving: bool,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl DetectorModel {
    pub fn ideal() -> Self {
        Self {
            efficiency: 1.0,
            dark_count_prob: 0.0,
            resolving: true,
        }
    }

    pub fn new(efficiency: f64, dark_count_prob: f64, resolving: bool) -> Result<Self> {
        let m = Self {
            efficiency,
            dark_count_prob,
            resolving,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit_interval("efficiency", self.efficiency)?;
        check_unit_interval("dark_count_prob", self.dark_count_prob)?;
        if self.dark_count_prob >= 1.0 {
            return Err(Error::OutOfRange {
                name: "dark_count_prob",
                value: self.dark_count_prob,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.efficiency == 1.0 && self.dark_count_prob == 0.0 && self.resolving
    }

    // distribution of the reported count for `n` incident photons
    fn detector_response(&self, n: u32) -> Vec<(u32, f64)> {
        let mut out: BTreeMap<u32, f64> = BTreeMap::new();
        for k in 0..=n {
            let pk = binomial(n, k) * self.efficiency.powi(k as i32) * (1.0 - self.efficiency).powi((n - k) as i32);
            if pk == 0.0 {
                continue;
            }
            for (dark, pd) in [(0, 1.0 - self.dark_count_prob), (1, self.dark_count_prob)] {
                if pd == 0.0 {
                    continue;
                }
                let mut count = k + dark;
                if !self.resolving {
                    count = count.min(1);
                }
                *out.entry(count).or_default() += pk * pd;
            }
        }
        out.into_iter().collect()
    }

    fn apply<R: Rng + ?Sized>(&self, ideal: &OutcomeRecord, rng: &mut R) -> OutcomeRecord {
        let mut rec = ideal.clone();
        for clicks in &mut rec.outputs {
            for pol in Polarization::BOTH {
                let n = clicks.get(pol);
                let mut kept = 0;
                for _ in 0..n {
                    if rng.random::<f64>() < self.efficiency {
                        kept += 1;
                    }
                }
                if rng.random::<f64>() < self.dark_count_prob {
                    kept += 1;
                }
                if !self.resolving {
                    kept = kept.min(1);
                }
                *clicks.get_mut(pol) = kept;
            }
        }
        rec
    }
}

/// Exact ideal click-pattern distribution in canonical record order.
pub fn outcome_distribution(state: &StateVector) -> Vec<(OutcomeRecord, f64)> {
    let mut dist: BTreeMap<OutcomeRecord, f64> = BTreeMap::new();
    for (ket, amp) in state.terms() {
        *dist.entry(OutcomeRecord::from_ket(ket)).or_default() += amp.norm_sqr();
    }
    dist.into_iter().collect()
}

/// Exact click-pattern distribution under an imperfect detector model.
pub fn outcome_distribution_with_model(state: &StateVector, model: &DetectorModel) -> Vec<(OutcomeRecord, f64)> {
    let mut dist: BTreeMap<OutcomeRecord, f64> = outcome_distribution(state).into_iter().collect();
    for output in 0..state.modes() {
        for pol in Polarization::BOTH {
            let mut next: BTreeMap<OutcomeRecord, f64> = BTreeMap::new();
            for (rec, p) in dist {
                for (count, q) in model.detector_response(rec.outputs[output].get(pol)) {
                    let mut r = rec.clone();
                    *r.outputs[output].get_mut(pol) = count;
                    *next.entry(r).or_default() += p * q;
                }
            }
            dist = next;
        }
    }
    dist.into_iter().collect()
}

/// Exact mean number of clicks per run.
pub fn expected_clicks(state: &StateVector, model: &DetectorModel) -> f64 {
    outcome_distribution_with_model(state, model)
        .iter()
        .map(|(r, p)| r.total_clicks() as f64 * p)
        .sum()
}

/// Repeated sampling from one state. Builds the cumulative table once.
#[derive(Debug, Clone)]
pub struct Sampler {
    records: Vec<OutcomeRecord>,
    cumulative: Vec<f64>,
    model: DetectorModel,
}

impl Sampler {
    pub fn new(state: &StateVector, model: DetectorModel) -> Result<Self> {
        model.validate()?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > crate::fock::VALIDATION_TOL {
            return Err(Error::NotNormalized { norm_sqr: norm });
        }
        let dist = outcome_distribution(state);
        let mut acc = 0.0;
        let mut records = Vec::with_capacity(dist.len());
        let mut cumulative = Vec::with_capacity(dist.len());
        for (r, p) in dist {
            acc += p;
            records.push(r);
            cumulative.push(acc);
        }
        Ok(Self {
            records,
            cumulative,
            model,
        })
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> OutcomeRecord {
        let u = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.records.len() - 1);
        let ideal = &self.records[idx];
        if self.model.is_ideal() {
            ideal.clone()
        } else {
            self.model.apply(ideal, rng)
        }
    }

    pub fn sample(&self, seed: u64) -> OutcomeRecord {
        let mut rng: SimRng = seeded(seed);
        self.sample_with(&mut rng)
    }
}

/// One seeded detection run on `state`.
pub fn sample(state: &StateVector, model: &DetectorModel, seed: u64) -> Result<OutcomeRecord> {
    Ok(Sampler::new(state, *model)?.sample(seed))
}

/// Detects one trajectory whose distribution is not cached.
pub fn sample_with<R: Rng + ?Sized>(state: &StateVector, model: &DetectorModel, rng: &mut R) -> Result<OutcomeRecord> {
    Ok(Sampler::new(state, *model)?.sample_with(rng))
}

/// CSV with columns `pattern,probability`, probabilities at 12 significant digits.
pub fn distribution_csv(dist: &[(OutcomeRecord, f64)]) -> String {
    let mut out = String::from("pattern,probability\n");
    for (r, p) in dist {
        out.push_str(&r.pattern());
        out.push(',');
        out.push_str(&fmt12(*p));
        out.push('\n');
    }
    out
}
