//! Exact simulation of two polarization-encoded quantum games played over
//! linear-optical networks.
//!
//! * [`fock`]: sparse few-photon Fock states and lifted mode unitaries.
//! * [`optics`]: polarizing beam splitters, polarization rotators, routers
//!   and a trajectory-sampled loss channel.
//! * [`circuits`]: the prisoner's dilemma network and the zero-sum fusion
//!   network with one-photon-per-output post-selection.
//! * [`detection`]: click-pattern distributions and seeded sampling with
//!   detector efficiency and dark counts.
//! * [`game`], [`montecarlo`]: payoffs, winners and Monte Carlo matches.
//! * [`equilibrium`]: Nash/Pareto grid scan of the strategy square.

pub mod circuits;
pub mod detection;
pub mod equilibrium;
pub mod error;
pub mod fock;
pub mod format;
pub mod game;
pub mod montecarlo;
pub mod optics;
pub mod rng;

pub use circuits::{run_pd, run_zs, target_state, CircuitRun, Strategy};
pub use detection::{outcome_distribution, sample, Clicks, DetectorModel, OutcomeRecord};
pub use equilibrium::{classify_point, extract_square_regions, scan, GridClassification, PointClassification};
pub use error::{Error, Result};
pub use fock::{FockState, ModeUnitary, PhotonPattern, Polarization, PolarizedMode, StateVector};
pub use game::{pd_classify, pd_expected, zs_classify, zs_win_probability, PayoffTable, Player};
pub use montecarlo::{monte_carlo, run_match, Game, MatchConfig, MatchReport, Strategies};
pub use num_complex::Complex64;
