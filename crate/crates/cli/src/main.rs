mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use photon_arena::detection::DetectorModel;
use photon_arena::equilibrium::{scan, scan_report, Cell, CellPredicate};
use photon_arena::format::fmt12;
use photon_arena::game::{pd_cell_weights, pd_expected, zs_win_probability};
use photon_arena::montecarlo::{run_match, MatchConfig, Strategies};
use photon_arena::StateVector;
use serde::Serialize;

use config::FileConfig;
use output::{emit, write_atomic};

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or parameter values (exit 2).
    Usage(String),
    /// Reading or writing files (exit 3).
    Io(String),
}

impl From<photon_arena::Error> for Failure {
    fn from(e: photon_arena::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Simulator for two-player games played with photons on linear-optical
/// networks.
#[derive(Parser)]
#[command(name = "photon-arena", version)]
struct Cli {
    /// JSON file with default parameters; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected prisoner's-dilemma payoffs and cell weights.
    PdExpected(PdArgs),
    /// Monte Carlo prisoner's-dilemma match.
    PdSample(PdSampleArgs),
    /// Exact zero-sum win probabilities.
    ZsProb(ZsArgs),
    /// Monte Carlo zero-sum match.
    ZsSample(ZsSampleArgs),
    /// Equilibrium scan over the strategy grid.
    Scan(ScanArgs),
    /// Network output state before and after post-selection, as JSON.
    CircuitDump(DumpArgs),
}

#[derive(Args)]
struct PdArgs {
    /// Alice's probability of playing H.
    #[arg(long)]
    x: Option<f64>,
    /// Bob's probability of playing H.
    #[arg(long)]
    y: Option<f64>,
}

#[derive(Args)]
struct ZsArgs {
    /// Player A's probability of H.
    #[arg(long)]
    pa: Option<f64>,
    /// Player B's probability of H.
    #[arg(long)]
    pc: Option<f64>,
}

#[derive(Args)]
struct AncillaArgs {
    /// Probability of H for A's ancilla photon [default: 0.5].
    #[arg(long)]
    ancilla_a: Option<f64>,
    /// Probability of H for B's ancilla photon [default: 0.5].
    #[arg(long)]
    ancilla_b: Option<f64>,
}

#[derive(Args)]
struct SampleArgs {
    /// Number of runs [default: 10000].
    #[arg(long)]
    trials: Option<u64>,
    /// RNG seed [default: $PHOTON_ARENA_SEED or 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Detector efficiency [default: 1].
    #[arg(long)]
    eta: Option<f64>,
    /// Per-detector dark-count probability [default: 0].
    #[arg(long)]
    dark: Option<f64>,
    /// Detectors only report click / no click.
    #[arg(long)]
    non_resolving: bool,
    /// Transmission of every output path before detection [default: 1].
    #[arg(long)]
    channel_eta: Option<f64>,
    /// Report file; standard output if omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PdSampleArgs {
    #[command(flatten)]
    strategies: PdArgs,
    #[command(flatten)]
    sample: SampleArgs,
}

#[derive(Args)]
struct ZsSampleArgs {
    #[command(flatten)]
    strategies: ZsArgs,
    #[command(flatten)]
    ancillas: AncillaArgs,
    #[command(flatten)]
    sample: SampleArgs,
}

#[derive(Args)]
struct ScanArgs {
    /// Grid points per axis [default: 1000].
    #[arg(long)]
    n: Option<usize>,
    /// Nash cells must strictly beat every deviation (the default).
    #[arg(long, conflicts_with = "weak")]
    strict: bool,
    /// Ties with a deviation still count as Nash.
    #[arg(long)]
    weak: bool,
    /// Directory for scan.csv and regions.json; the region report goes to
    /// standard output if omitted.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Heatmap of one cell's Nash+Pareto region.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Cell drawn in the heatmap [default: VV].
    #[arg(long, value_name = "CELL")]
    svg_cell: Option<String>,
}

#[derive(Args)]
struct DumpArgs {
    /// Which network: pd or zs [default: pd].
    #[arg(long)]
    game: Option<String>,
    #[command(flatten)]
    pd: PdArgs,
    #[command(flatten)]
    zs: ZsArgs,
    #[command(flatten)]
    ancillas: AncillaArgs,
    /// Output file; standard output if omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::PdExpected(a) => pd_expected_cmd(&cfg, &a),
        Command::PdSample(a) => pd_sample(&cfg, &a),
        Command::ZsProb(a) => zs_prob(&cfg, &a),
        Command::ZsSample(a) => zs_sample(&cfg, &a),
        Command::Scan(a) => scan_cmd(&cfg, &a),
        Command::CircuitDump(a) => circuit_dump(&cfg, &a),
    }
}

fn pd_expected_cmd(cfg: &FileConfig, a: &PdArgs) -> Result<(), Failure> {
    let x = a.x.or(cfg.x).unwrap_or(0.5);
    let y = a.y.or(cfg.y).unwrap_or(0.5);
    let (ea, eb) = pd_expected(x, y, &cfg.table())?;
    let mut text = format!("{} {}\n", fmt12(ea), fmt12(eb));
    let w = pd_cell_weights(x, y);
    for cell in Cell::ALL {
        let weight = w[idx(cell.0)][idx(cell.1)];
        text.push_str(&format!("{} {}\n", cell.label(), fmt12(weight)));
    }
    emit(None, &text)
}

fn idx(c: photon_arena::Polarization) -> usize {
    match c {
        photon_arena::Polarization::H => 0,
        photon_arena::Polarization::V => 1,
    }
}

fn zs_prob(cfg: &FileConfig, a: &ZsArgs) -> Result<(), Failure> {
    let pa = a.pa.or(cfg.pa).unwrap_or(0.5);
    let pc = a.pc.or(cfg.pc).unwrap_or(0.5);
    let (p_a, p_b) = zs_win_probability(pa, pc)?;
    emit(None, &format!("{} {}\n", fmt12(p_a), fmt12(p_b)))
}

fn pd_strategies(cfg: &FileConfig, a: &PdArgs) -> Result<Strategies, Failure> {
    Ok(Strategies::Pd {
        alice: cfg.strategy("alice", a.x, cfg.x, 0.5)?,
        bob: cfg.strategy("bob", a.y, cfg.y, 0.5)?,
    })
}

fn zs_strategies(cfg: &FileConfig, a: &ZsArgs, anc: &AncillaArgs) -> Result<Strategies, Failure> {
    Ok(Strategies::Zs {
        player_a: cfg.strategy("player_a", a.pa, cfg.pa, 0.5)?,
        ancilla_a: cfg.strategy("ancilla_a", anc.ancilla_a, cfg.ancilla_a, 0.5)?,
        player_b: cfg.strategy("player_b", a.pc, cfg.pc, 0.5)?,
        ancilla_b: cfg.strategy("ancilla_b", anc.ancilla_b, cfg.ancilla_b, 0.5)?,
    })
}

fn match_config(cfg: &FileConfig, s: &SampleArgs, strategies: Strategies) -> Result<MatchConfig, Failure> {
    let mut mc = MatchConfig::new(strategies, s.trials.or(cfg.trials).unwrap_or(10_000), cfg.seed(s.seed)?);
    let resolving = !(s.non_resolving || cfg.non_resolving.unwrap_or(false));
    mc.detector = DetectorModel::new(
        s.eta.or(cfg.eta).unwrap_or(1.0),
        s.dark.or(cfg.dark).unwrap_or(0.0),
        resolving,
    )?;
    mc.channel_eta = s.channel_eta.or(cfg.channel_eta).unwrap_or(1.0);
    mc.table = cfg.table();
    Ok(mc)
}

fn sample_cmd(cfg: &FileConfig, s: &SampleArgs, strategies: Strategies) -> Result<(), Failure> {
    let report = run_match(&match_config(cfg, s, strategies)?)?;
    emit(s.out.as_deref().or(cfg.out.as_deref()), &report.to_json())
}

fn pd_sample(cfg: &FileConfig, a: &PdSampleArgs) -> Result<(), Failure> {
    sample_cmd(cfg, &a.sample, pd_strategies(cfg, &a.strategies)?)
}

fn zs_sample(cfg: &FileConfig, a: &ZsSampleArgs) -> Result<(), Failure> {
    sample_cmd(cfg, &a.sample, zs_strategies(cfg, &a.strategies, &a.ancillas)?)
}

fn scan_cmd(cfg: &FileConfig, a: &ScanArgs) -> Result<(), Failure> {
    let n = a.n.or(cfg.n).unwrap_or(1000);
    let strict = if a.weak {
        false
    } else if a.strict {
        true
    } else {
        cfg.strict.unwrap_or(true)
    };
    let svg_cell = a
        .svg_cell
        .as_deref()
        .or(cfg.svg_cell.as_deref())
        .map(Cell::parse)
        .transpose()?;
    let grid = scan(n, &cfg.table(), strict)?;
    let report = scan_report(&grid).to_json();

    match a.out.as_deref().or(cfg.out.as_deref()) {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
            write_atomic(&dir.join("scan.csv"), grid.to_csv().as_bytes())?;
            write_atomic(&dir.join("regions.json"), report.as_bytes())?;
        }
        None => emit(None, &report)?,
    }

    if let Some(path) = a.svg.as_deref().or(cfg.svg.as_deref()) {
        let cell = svg_cell.unwrap_or(Cell(photon_arena::Polarization::V, photon_arena::Polarization::V));
        let pred = CellPredicate::nash_and_pareto(cell);
        let notion = if strict { "strict" } else { "weak" };
        let mut buf = Vec::new();
        grid.write_svg(&mut buf, &format!("{} ({notion}, n = {n})", pred.describe()), |p| pred.holds(p))
            .map_err(|e| Failure::Io(e.to_string()))?;
        write_atomic(path, &buf)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Dump<'a> {
    game: &'a str,
    success_probability: f64,
    pre_selection: &'a StateVector,
    post_selection: Option<&'a StateVector>,
}

fn circuit_dump(cfg: &FileConfig, a: &DumpArgs) -> Result<(), Failure> {
    let game = a.game.as_deref().or(cfg.game.as_deref()).unwrap_or("pd");
    let strategies = match game {
        "pd" => pd_strategies(cfg, &a.pd)?,
        "zs" => zs_strategies(cfg, &a.zs, &a.ancillas)?,
        other => return Err(Failure::Usage(format!("unknown game {other:?}, expected pd or zs"))),
    };
    let run = strategies.circuit_run()?;
    let dump = Dump {
        game,
        success_probability: run.success_probability,
        pre_selection: &run.pre_selection,
        post_selection: run.output.as_ref(),
    };
    let mut text = serde_json::to_string_pretty(&dump).map_err(|e| Failure::Usage(e.to_string()))?;
    text.push('\n');
    emit(a.out.as_deref().or(cfg.out.as_deref()).map(Path::new), &text)
}
