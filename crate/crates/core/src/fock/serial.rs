use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;

use super::state::{FockState, StateVector};

/// Wire form of a [`StateVector`]: `{"modes": m, "terms": [{"occ", "re", "im"}]}`.
///
/// `occ` lists `2 * modes` occupations as `[H0, V0, H1, V1, ...]`; terms are in
/// canonical basis order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateVectorJson {
    pub modes: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub occ: Vec<u8>,
    pub re: f64,
    pub im: f64,
}

impl From<&StateVector> for StateVectorJson {
    fn from(s: &StateVector) -> Self {
        Self {
            modes: s.modes(),
            terms: s
                .terms()
                .map(|(k, a)| TermJson {
                    occ: k.occupations().to_vec(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<StateVectorJson> for StateVector {
    type Error = Error;

    fn try_from(j: StateVectorJson) -> Result<Self, Error> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in j.terms {
            if t.occ.len() != 2 * j.modes {
                return Err(Error::ShapeMismatch {
                    expected: 2 * j.modes,
                    found: t.occ.len(),
                });
            }
            terms.push((FockState::from_occupations(t.occ)?, Complex64::new(t.re, t.im)));
        }
        StateVector::from_terms(j.modes, terms)
    }
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StateVectorJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let j = StateVectorJson::deserialize(deserializer)?;
        StateVector::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl StateVector {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state vectors always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(text)?)
    }
}
