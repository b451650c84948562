//! Seeded Monte Carlo matches with imperfect detection.
//!
//! Run `i` of a match draws all of its randomness from
//! [`run_rng(seed, i)`](crate::rng::run_rng) and the tallies are integer
//! counts, so reports are bit-identical however the runs are scheduled.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{run_pd, run_zs, CircuitRun, Strategy};
use crate::detection::{DetectorModel, OutcomeRecord, Sampler};
use crate::error::{check_unit_interval, Error, Result};
use crate::fock::StateVector;
use crate::game::{pd_classify, zs_classify, PayoffTable, PdOutcome, Player};
use crate::optics::loss_branch;
use crate::rng::run_rng;

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Game {
    Pd,
    Zs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategies {
    Pd {
        alice: Strategy,
        bob: Strategy,
    },
    Zs {
        player_a: Strategy,
        ancilla_a: Strategy,
        player_b: Strategy,
        ancilla_b: Strategy,
    },
}

impl Strategies {
    pub fn pd(x: f64, y: f64) -> Result<Self> {
        Ok(Strategies::Pd {
            alice: Strategy::from_probability(x)?,
            bob: Strategy::from_probability(y)?,
        })
    }

    /// Zero-sum strategies with both ancillas balanced.
    pub fn zs(pa: f64, pc: f64) -> Result<Self> {
        Ok(Strategies::Zs {
            player_a: Strategy::from_probability(pa)?,
            ancilla_a: Strategy::balanced(),
            player_b: Strategy::from_probability(pc)?,
            ancilla_b: Strategy::balanced(),
        })
    }

    pub fn game(&self) -> Game {
        match self {
            Strategies::Pd { .. } => Game::Pd,
            Strategies::Zs { .. } => Game::Zs,
        }
    }

    /// Exact network output before detection.
    pub fn circuit_run(&self) -> Result<CircuitRun> {
        match self {
            Strategies::Pd { alice, bob } => run_pd(alice, bob),
            Strategies::Zs {
                player_a,
                ancilla_a,
                player_b,
                ancilla_b,
            } => run_zs(player_a, ancilla_a, player_b, ancilla_b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchConfig {
    pub strategies: Strategies,
    pub trials: u64,
    pub seed: u64,
    pub detector: DetectorModel,
    /// Survival probability of every output path ahead of the detectors,
    /// sampled as quantum trajectories.
    pub channel_eta: f64,
    pub table: PayoffTable,
}

impl MatchConfig {
    pub fn new(strategies: Strategies, trials: u64, seed: u64) -> Self {
        Self {
            strategies,
            trials,
            seed,
            detector: DetectorModel::ideal(),
            channel_eta: 1.0,
            table: PayoffTable::default(),
        }
    }
}

/// Serialized summary of a match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub game: Game,
    pub trials: u64,
    /// Counts per conclusive outcome: PD outcome names, or the four
    /// measured polarizations (`HVHV`, ...) for the zero-sum game.
    pub outcomes: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_payoff: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub win_freq: Option<BTreeMap<Player, f64>>,
    /// PD: records matching no outcome. ZS: runs failing post-selection.
    pub inconclusive: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_selected: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success_probability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation_violations: Option<u64>,
    /// Standard errors of the reported estimates.
    pub std_error: BTreeMap<String, f64>,
    /// 99% normal-approximation confidence intervals.
    pub ci99: BTreeMap<String, [f64; 2]>,
    pub seed: u64,
}

impl MatchReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    outcomes: BTreeMap<String, u64>,
    inconclusive: u64,
    a_wins: u64,
    violations: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for (k, v) in other.outcomes {
            *self.outcomes.entry(k).or_default() += v;
        }
        self.inconclusive += other.inconclusive;
        self.a_wins += other.a_wins;
        self.violations += other.violations;
        self
    }
}

/// Ideal detection defaults; see [`run_match`] for the full configuration.
pub fn monte_carlo(strategies: Strategies, trials: u64, seed: u64, model: DetectorModel) -> Result<MatchReport> {
    run_match(&MatchConfig {
        detector: model,
        ..MatchConfig::new(strategies, trials, seed)
    })
}

pub fn run_match(cfg: &MatchConfig) -> Result<MatchReport> {
    if cfg.trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    cfg.detector.validate()?;
    check_unit_interval("channel_eta", cfg.channel_eta)?;
    cfg.table.validate()?;

    let run = cfg.strategies.circuit_run()?;
    let state = run.pre_selection;
    let sampler = Sampler::new(&state, cfg.detector)?;
    let game = cfg.strategies.game();

    let tally = (0..cfg.trials)
        .into_par_iter()
        .map(|i| detect(cfg, &state, &sampler, i))
        .try_fold(Tally::default, |mut t, rec| {
            score(game, &cfg.table, &rec?, &mut t);
            Ok::<_, Error>(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    Ok(match game {
        Game::Pd => pd_report(cfg, tally),
        Game::Zs => zs_report(cfg, tally),
    })
}

fn detect(cfg: &MatchConfig, state: &StateVector, sampler: &Sampler, index: u64) -> Result<OutcomeRecord> {
    let mut rng = run_rng(cfg.seed, index);
    if cfg.channel_eta >= 1.0 {
        return Ok(sampler.sample_with(&mut rng));
    }
    let mut s = state.clone();
    for port in 0..s.modes() {
        s = loss_branch(&s, port, cfg.channel_eta, &mut rng)?.0;
    }
    Ok(Sampler::new(&s, cfg.detector)?.sample_with(&mut rng))
}

fn score(game: Game, table: &PayoffTable, rec: &OutcomeRecord, t: &mut Tally) {
    match game {
        Game::Pd => match pd_classify(rec, table) {
            Ok(r) => *t.outcomes.entry(r.outcome.name().to_string()).or_default() += 1,
            Err(_) => t.inconclusive += 1,
        },
        Game::Zs => match zs_classify(rec) {
            Ok(r) => {
                let key: String = rec
                    .outputs
                    .iter()
                    .map(|c| c.single().expect("classified").letter())
                    .collect();
                *t.outcomes.entry(key).or_default() += 1;
                if r.winner == Player::A {
                    t.a_wins += 1;
                }
                if r.violates_correlation() {
                    t.violations += 1;
                }
            }
            Err(_) => t.inconclusive += 1,
        },
    }
}

fn interval(mean: f64, se: f64) -> [f64; 2] {
    [mean - Z99 * se, mean + Z99 * se]
}

fn pd_report(cfg: &MatchConfig, t: Tally) -> MatchReport {
    let n: u64 = t.outcomes.values().sum();
    let mut std_error = BTreeMap::new();
    let mut ci99 = BTreeMap::new();
    let mean_payoff = (n > 0).then(|| {
        let mut mean = [0.0; 2];
        let mut sq = [0.0; 2];
        for o in PdOutcome::ALL {
            let count = t.outcomes.get(o.name()).copied().unwrap_or(0) as f64;
            let (a, b) = cfg.table.get(o.cell().0, o.cell().1);
            for (k, p) in [a, b].into_iter().enumerate() {
                mean[k] += count * p;
                sq[k] += count * p * p;
            }
        }
        let nf = n as f64;
        for (k, name) in ["alice", "bob"].into_iter().enumerate() {
            mean[k] /= nf;
            let var = if n > 1 {
                ((sq[k] - nf * mean[k] * mean[k]) / (nf - 1.0)).max(0.0)
            } else {
                0.0
            };
            let se = (var / nf).sqrt();
            std_error.insert(name.to_string(), se);
            ci99.insert(name.to_string(), interval(mean[k], se));
        }
        mean
    });
    MatchReport {
        game: Game::Pd,
        trials: cfg.trials,
        outcomes: t.outcomes,
        mean_payoff,
        win_freq: None,
        inconclusive: t.inconclusive,
        post_selected: None,
        success_probability: None,
        correlation_violations: None,
        std_error,
        ci99,
        seed: cfg.seed,
    }
}

fn zs_report(cfg: &MatchConfig, t: Tally) -> MatchReport {
    let kept: u64 = t.outcomes.values().sum();
    let mut std_error = BTreeMap::new();
    let mut ci99 = BTreeMap::new();

    let success = kept as f64 / cfg.trials as f64;
    let se = (success * (1.0 - success) / cfg.trials as f64).sqrt();
    std_error.insert("success_probability".to_string(), se);
    ci99.insert("success_probability".to_string(), interval(success, se));

    let win_freq = (kept > 0).then(|| {
        let fa = t.a_wins as f64 / kept as f64;
        let se = (fa * (1.0 - fa) / kept as f64).sqrt();
        std_error.insert("A".to_string(), se);
        ci99.insert("A".to_string(), interval(fa, se));
        BTreeMap::from([(Player::A, fa), (Player::B, 1.0 - fa)])
    });
    MatchReport {
        game: Game::Zs,
        trials: cfg.trials,
        outcomes: t.outcomes,
        mean_payoff: None,
        win_freq,
        inconclusive: t.inconclusive,
        post_selected: Some(kept),
        success_probability: Some(success),
        correlation_violations: Some(t.violations),
        std_error,
        ci99,
        seed: cfg.seed,
    }
}
