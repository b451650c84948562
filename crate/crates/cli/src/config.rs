use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use photon_arena::game::PayoffTable;
use photon_arena::Strategy;
use serde::Deserialize;

use crate::Failure;

pub const SEED_ENV: &str = "PHOTON_ARENA_SEED";

/// Contents of a `--config` file. Keys mirror the long flag names with
/// underscores; flags win over anything set here.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub pa: Option<f64>,
    pub pc: Option<f64>,
    pub ancilla_a: Option<f64>,
    pub ancilla_b: Option<f64>,
    /// Full amplitude pairs per role (`alice`, `bob`, `player_a`,
    /// `ancilla_a`, `player_b`, `ancilla_b`), as `[[re, im], [re, im]]`.
    #[serde(default)]
    pub amplitudes: BTreeMap<String, Strategy>,
    pub table: Option<PayoffTable>,
    pub eta: Option<f64>,
    pub dark: Option<f64>,
    pub non_resolving: Option<bool>,
    pub channel_eta: Option<f64>,
    pub n: Option<usize>,
    pub strict: Option<bool>,
    pub game: Option<String>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub svg_cell: Option<String>,
}

const ROLES: [&str; 6] = ["alice", "bob", "player_a", "ancilla_a", "player_b", "ancilla_b"];

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let cfg: Self =
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        if let Some(role) = cfg.amplitudes.keys().find(|k| !ROLES.contains(&k.as_str())) {
            return Err(Failure::Usage(format!("unknown strategy role {role:?} in config")));
        }
        Ok(cfg)
    }

    /// Strategy for `role`: a flag probability, else config amplitudes,
    /// else a config probability, else `default`.
    pub fn strategy(&self, role: &str, flag: Option<f64>, config: Option<f64>, default: f64) -> Result<Strategy, Failure> {
        if let Some(p) = flag {
            return Ok(Strategy::from_probability(p)?);
        }
        if let Some(s) = self.amplitudes.get(role) {
            return Ok(*s);
        }
        Ok(Strategy::from_probability(config.unwrap_or(default))?)
    }

    /// Flag, then config, then the seed environment variable, then 0.
    pub fn seed(&self, flag: Option<u64>) -> Result<u64, Failure> {
        if let Some(s) = flag.or(self.seed) {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))),
            Err(_) => Ok(0),
        }
    }

    pub fn table(&self) -> PayoffTable {
        self.table.unwrap_or_default()
    }
}
