//! Command-line front end. Every command is a thin wrapper over the library;
//! results print as JSON (17-significant-digit numbers) on stdout, sweeps can
//! additionally be written as CSV. Exit codes: 0 success, 2 usage, 3
//! validation failure, 4 i/o failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qtg_core::compile::{
    compile_entangler, compile_protocol, noisy_run, phase_aligned_max_deviation, Circuit,
    CircuitOp,
};
use qtg_core::game::{builtin_game, load_game, NormalFormGame, Strategy, BUILTIN_NAMES};
use qtg_core::lab::{
    self, emit_csv, flatness_check, flatness_check_vs, run_mixed_theta_sweep, run_sweep, AxisName,
    AxisSpec, LabError, PlayerStrategy, ProtocolKind, StrategyFamily, SweepResult, SweepSpec,
};
use qtg_core::numfmt::{parse_angle, to_json_string};
use qtg_core::protocols::{
    default_init_bit, play_du, play_ewl2, play_mixed_quantum, sample_shots, MixedQuantumStrategy,
    ProtocolResult, QuantumStrategy,
};
use qtg_core::qsim::{entangler, EntanglerBasis, StateVector};
use qtg_core::referee::{is_correlated_equilibrium, RefereeDistribution, DEFAULT_TOL};

const EXIT_VALIDATION: u8 = 3;
const EXIT_IO: u8 = 4;

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

macro_rules! from_validation {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> CliError {
                CliError::validation(e.to_string())
            }
        }
    )*};
}

from_validation!(
    qtg_core::game::GameError,
    qtg_core::protocols::ProtocolError,
    qtg_core::qsim::QsimError,
    qtg_core::referee::RefereeError,
    qtg_core::compile::CompileError
);

impl From<LabError> for CliError {
    fn from(e: LabError) -> CliError {
        match e {
            LabError::Io(inner) => CliError::io(inner.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qtg",
    version,
    about = "Trading games under classical and quantum referees"
)]
struct Cli {
    /// Seed for any stochastic output (shot sampling, noise runs).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List or display the built-in games.
    Games {
        #[command(subcommand)]
        action: GamesAction,
    },
    /// Classical analysis: equilibria, dominance, refereed play.
    Classical {
        #[command(subcommand)]
        action: ClassicalAction,
    },
    /// Quantum-refereed play.
    Quantum {
        #[command(subcommand)]
        action: QuantumAction,
    },
    /// Payoff sweeps over strategy-parameter grids.
    Sweep {
        #[command(subcommand)]
        action: SweepAction,
    },
    /// Payoff spread over (alpha, gamma) at fixed theta.
    Flatness(FlatnessArgs),
    /// Compile the n-player referee to the native gate set.
    Compile(CompileArgs),
}

#[derive(Subcommand)]
enum GamesAction {
    /// Print the names of the built-in games.
    List,
    /// Print a game as a JSON document.
    Show {
        #[arg(long)]
        game: String,
    },
}

#[derive(Subcommand)]
enum ClassicalAction {
    /// All pure Nash equilibria.
    PureNash {
        #[arg(long)]
        game: String,
    },
    /// Interior mixed equilibrium of a 2-player game.
    MixedNash {
        #[arg(long)]
        game: String,
    },
    /// Check a refereeing distribution for correlated equilibrium.
    Correlated {
        #[arg(long)]
        game: String,
        /// Comma-separated outcome probabilities in outcome-index order.
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Strictly dominant strategy of one player, if any.
    Dominant {
        #[arg(long)]
        game: String,
        /// 1-based player index.
        #[arg(long)]
        player: usize,
    },
}

#[derive(Subcommand)]
enum QuantumAction {
    /// Evaluate a protocol for pure strategies.
    Play(PlayArgs),
    /// Evaluate the two-player protocol for probabilistic strategies.
    Mixed(MixedArgs),
}

#[derive(Args)]
struct PlayArgs {
    /// Protocol: `ewl2` (two players) or `du` (n players).
    #[arg(long)]
    protocol: String,
    #[arg(long)]
    game: String,
    /// Trader 1's strategy, e.g. `ewl:theta=pi,phi=0` or `named:quantumLong`.
    #[arg(long)]
    s1: Option<String>,
    /// Trader 2's strategy.
    #[arg(long)]
    s2: Option<String>,
    /// Semicolon-separated strategies for all traders (alternative to --s1/--s2).
    #[arg(long)]
    strategies: Option<String>,
    /// Initial qubit value (du protocol); defaults to 1 for even player counts.
    #[arg(long)]
    init: Option<u8>,
    /// Draw this many measurement samples in addition to the exact result.
    #[arg(long)]
    shots: Option<u64>,
    /// Write the final state amplitudes to stderr.
    #[arg(long)]
    dump_state: bool,
}

#[derive(Args)]
struct MixedArgs {
    #[arg(long)]
    game: String,
    /// Trader 1's mixture as JSON (`[{"weight": …, "strategy": …}, …]`) or `@file`.
    #[arg(long)]
    m1: String,
    /// Trader 2's mixture.
    #[arg(long)]
    m2: String,
}

#[derive(Subcommand)]
enum SweepAction {
    /// Vary one trader over a (theta, phi) grid.
    Grid(GridSweepArgs),
    /// Vary one trader's probabilistic-advice family over theta.
    MixedTheta(MixedThetaArgs),
}

#[derive(Args)]
struct GridSweepArgs {
    /// Protocol: `ewl2` or `du`.
    #[arg(long, default_value = "du")]
    protocol: String,
    #[arg(long)]
    game: String,
    /// 1-based index of the varying trader.
    #[arg(long)]
    vary: usize,
    /// Semicolon-separated strategies of the other traders, in player order.
    #[arg(long)]
    others: String,
    #[arg(long, default_value_t = 41)]
    theta_points: usize,
    #[arg(long, default_value_t = 21)]
    phi_points: usize,
    #[arg(long)]
    init: Option<u8>,
    /// Write the grid as CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MixedThetaArgs {
    #[arg(long)]
    game: String,
    /// 1-based index of the varying trader (1 or 2).
    #[arg(long)]
    vary: usize,
    #[arg(long, default_value_t = 41)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlatnessArgs {
    #[arg(long)]
    game: String,
    /// 1-based index of the varying trader (1 or 2).
    #[arg(long)]
    vary: usize,
    /// Fixed theta of the varying trader (decimal or pi literal).
    #[arg(long)]
    theta: String,
    #[arg(long, default_value_t = 17)]
    points: usize,
    /// Pure opponent strategy; defaults to their equilibrium mixture.
    #[arg(long)]
    opponent: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long)]
    players: usize,
    /// Compile the disentangler instead.
    #[arg(long)]
    dagger: bool,
    /// Semicolon-separated strategies; compiles the full protocol when given.
    #[arg(long)]
    strategies: Option<String>,
    /// Initial qubit value; defaults to 1 for even player counts (protocol only).
    #[arg(long)]
    init: Option<u8>,
    /// Check the compiled circuit against the direct construction.
    #[arg(long)]
    verify: bool,
    /// Write the circuit as JSON to this path.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Depolarizing run, e.g. `p=0.015,trials=10000,seed=0`.
    #[arg(long)]
    noise: Option<String>,
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            println!("{output}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

/// QTG_THREADS caps the worker pool; 0 or unset means automatic.
fn configure_threads() {
    if let Ok(value) = std::env::var("QTG_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Games { action } => match action {
            GamesAction::List => Ok(to_json_string(&BUILTIN_NAMES)),
            GamesAction::Show { game } => Ok(resolve_game(&game)?.to_json()),
        },
        Command::Classical { action } => run_classical(action),
        Command::Quantum { action } => run_quantum(action, cli.seed),
        Command::Sweep { action } => run_sweep_command(action),
        Command::Flatness(args) => run_flatness(args),
        Command::Compile(args) => run_compile(args, cli.seed),
    }
}

/// Game selector: a built-in name, `hawk_dove:v=…,c=…`, or `@file.json`.
fn resolve_game(selector: &str) -> Result<NormalFormGame, CliError> {
    if let Some(path) = selector.strip_prefix('@') {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read game file {path}: {e}")))?;
        return Ok(load_game(&text)?);
    }
    if let Some((name, params)) = selector.split_once(':') {
        if name != "hawk_dove" {
            return Err(CliError::validation(format!(
                "only hawk_dove takes parameters, got `{selector}`"
            )));
        }
        let mut v = None;
        let mut c = None;
        for pair in params.split(',') {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| CliError::validation(format!("expected key=value, got `{pair}`")))?;
            let parsed: f64 = value
                .parse()
                .map_err(|_| CliError::validation(format!("cannot parse `{value}`")))?;
            match key.trim() {
                "v" | "V" => v = Some(parsed),
                "c" | "C" => c = Some(parsed),
                other => {
                    return Err(CliError::validation(format!(
                        "unknown hawk_dove parameter `{other}`"
                    )))
                }
            }
        }
        let (v, c) = v
            .zip(c)
            .ok_or_else(|| CliError::validation("hawk_dove requires v=… and c=…".to_string()))?;
        return Ok(builtin_game("hawk_dove", Some((v, c)))?);
    }
    if selector == "hawk_dove" {
        return Err(CliError::validation(
            "hawk_dove requires parameters, e.g. hawk_dove:v=4,c=3",
        ));
    }
    Ok(builtin_game(selector, None)?)
}

fn labels(profile: &qtg_core::game::StrategyProfile) -> Vec<&'static str> {
    profile.choices().iter().map(|s| s.label()).collect()
}

fn parse_distribution(text: &str) -> Result<Vec<f64>, CliError> {
    let values: Result<Vec<f64>, _> = text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let mut values =
        values.map_err(|e| CliError::validation(format!("cannot parse distribution: {e}")))?;
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(CliError::validation(format!(
            "distribution sums to {sum}, more than 1e-6 away from 1"
        )));
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
    Ok(values)
}

fn run_classical(action: ClassicalAction) -> Result<String, CliError> {
    match action {
        ClassicalAction::PureNash { game } => {
            let game = resolve_game(&game)?;
            #[derive(Serialize)]
            struct Out {
                game: String,
                equilibria: Vec<Vec<&'static str>>,
            }
            Ok(to_json_string(&Out {
                game: game.name().to_string(),
                equilibria: game.pure_nash().iter().map(labels).collect(),
            }))
        }
        ClassicalAction::MixedNash { game } => {
            let game = resolve_game(&game)?;
            let report = game.mixed_nash_2p2s()?;
            #[derive(Serialize)]
            struct Solution {
                p_long: Vec<f64>,
                payoffs: Vec<f64>,
            }
            #[derive(Serialize)]
            struct Out {
                game: String,
                solution: Option<Solution>,
                degenerate: bool,
            }
            Ok(to_json_string(&Out {
                game: game.name().to_string(),
                solution: report.solution.map(|s| Solution {
                    p_long: s.profile.p_long().to_vec(),
                    payoffs: s.payoffs,
                }),
                degenerate: report.degenerate,
            }))
        }
        ClassicalAction::Correlated { game, dist, tol } => {
            let game = resolve_game(&game)?;
            let probs = parse_distribution(&dist)?;
            if probs.len() != game.outcome_count() {
                return Err(CliError::validation(format!(
                    "distribution has {} entries, game has {} outcomes",
                    probs.len(),
                    game.outcome_count()
                )));
            }
            let referee = RefereeDistribution::from_probs(probs)?;
            let verdict = is_correlated_equilibrium(&game, &referee, tol)?;
            let payoffs = game.expected_payoffs(referee.distribution())?;
            #[derive(Serialize)]
            struct Violation {
                player: usize,
                advice: &'static str,
                follow_payoff: f64,
                deviation_payoff: f64,
            }
            #[derive(Serialize)]
            struct Out {
                equilibrium: bool,
                payoffs: Vec<f64>,
                violations: Vec<Violation>,
            }
            Ok(to_json_string(&Out {
                equilibrium: verdict.holds,
                payoffs,
                violations: verdict
                    .violations
                    .iter()
                    .map(|r| Violation {
                        player: r.player + 1,
                        advice: r.advice.label(),
                        follow_payoff: r.follow_payoff,
                        deviation_payoff: r.deviation_payoff,
                    })
                    .collect(),
            }))
        }
        ClassicalAction::Dominant { game, player } => {
            let game = resolve_game(&game)?;
            if player == 0 || player > game.players() {
                return Err(CliError::validation(format!(
                    "player {player} out of range 1..={}",
                    game.players()
                )));
            }
            let dominant = game.strictly_dominant(player - 1)?;
            #[derive(Serialize)]
            struct Out {
                game: String,
                player: usize,
                dominant: Option<&'static str>,
            }
            Ok(to_json_string(&Out {
                game: game.name().to_string(),
                player,
                dominant: dominant.map(Strategy::label),
            }))
        }
    }
}

#[derive(Serialize)]
struct PlayOut {
    protocol: String,
    game: String,
    distribution: Vec<f64>,
    payoffs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical_payoffs: Option<Vec<f64>>,
}

fn play_output(
    protocol: &str,
    game: &NormalFormGame,
    result: &ProtocolResult,
    shots: Option<u64>,
    seed: u64,
    dump_state: bool,
) -> Result<String, CliError> {
    if dump_state {
        match &result.final_state {
            Some(state) => eprintln!("{}", state.debug_dump()),
            None => eprintln!("(mixed play: no pure final state)"),
        }
    }
    let (counts, empirical_payoffs) = match shots {
        Some(n) if n > 0 => {
            let counts = sample_shots(&result.distribution, n, seed);
            let empirical = qtg_core::game::OutcomeDistribution::new(
                counts.iter().map(|&c| c as f64 / n as f64).collect(),
            )?;
            (Some(counts), Some(game.expected_payoffs(&empirical)?))
        }
        _ => (None, None),
    };
    Ok(to_json_string(&PlayOut {
        protocol: protocol.to_string(),
        game: game.name().to_string(),
        distribution: result.distribution.probs().to_vec(),
        payoffs: result.payoffs.clone(),
        shots,
        counts,
        empirical_payoffs,
    }))
}

fn parse_strategy_list(text: &str) -> Result<Vec<QuantumStrategy>, CliError> {
    text.split(';')
        .map(|s| QuantumStrategy::parse(s.trim()).map_err(CliError::from))
        .collect()
}

fn resolve_mixture(text: &str) -> Result<MixedQuantumStrategy, CliError> {
    let body = if let Some(path) = text.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read mixture file {path}: {e}")))?
    } else {
        text.to_string()
    };
    Ok(MixedQuantumStrategy::from_json(&body)?)
}

fn run_quantum(action: QuantumAction, seed: u64) -> Result<String, CliError> {
    match action {
        QuantumAction::Play(args) => {
            let game = resolve_game(&args.game)?;
            let strategies: Vec<QuantumStrategy> = match (&args.strategies, &args.s1, &args.s2) {
                (Some(list), None, None) => parse_strategy_list(list)?,
                (None, Some(s1), Some(s2)) => {
                    vec![QuantumStrategy::parse(s1)?, QuantumStrategy::parse(s2)?]
                }
                _ => {
                    return Err(CliError::validation(
                        "give either --strategies or both --s1 and --s2",
                    ))
                }
            };
            let result = match args.protocol.as_str() {
                "ewl2" => {
                    if strategies.len() != 2 {
                        return Err(CliError::validation(format!(
                            "ewl2 takes 2 strategies, got {}",
                            strategies.len()
                        )));
                    }
                    play_ewl2(&game, &strategies[0], &strategies[1])?
                }
                "du" => play_du(&game, &strategies, args.init)?,
                other => {
                    return Err(CliError::validation(format!(
                        "unknown protocol `{other}` (expected ewl2 or du)"
                    )))
                }
            };
            play_output(
                &args.protocol,
                &game,
                &result,
                args.shots,
                seed,
                args.dump_state,
            )
        }
        QuantumAction::Mixed(args) => {
            let game = resolve_game(&args.game)?;
            let m1 = resolve_mixture(&args.m1)?;
            let m2 = resolve_mixture(&args.m2)?;
            let result = play_mixed_quantum(&game, &m1, &m2)?;
            play_output("ewl2-mixed", &game, &result, None, seed, false)
        }
    }
}

#[derive(Serialize)]
struct AxisValue {
    axis: &'static str,
    value: f64,
}

#[derive(Serialize)]
struct SweepOut {
    rows: usize,
    argmax: Vec<AxisValue>,
    payoff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    csv: Option<String>,
}

fn sweep_output(result: &SweepResult, out: Option<PathBuf>) -> Result<String, CliError> {
    let csv = match out {
        Some(path) => {
            emit_csv(result, &path)?;
            Some(path.display().to_string())
        }
        None => None,
    };
    Ok(to_json_string(&SweepOut {
        rows: result.values.len(),
        argmax: result
            .axes
            .iter()
            .zip(&result.argmax_coords)
            .map(|(axis, &value)| AxisValue {
                axis: axis.name.label(),
                value,
            })
            .collect(),
        payoff: result.argmax_payoff,
        csv,
    }))
}

fn vary_index(vary: usize, players: usize) -> Result<usize, CliError> {
    if vary == 0 || vary > players {
        return Err(CliError::validation(format!(
            "--vary {vary} out of range 1..={players}"
        )));
    }
    Ok(vary - 1)
}

fn run_sweep_command(action: SweepAction) -> Result<String, CliError> {
    match action {
        SweepAction::Grid(args) => {
            let game = resolve_game(&args.game)?;
            let varying = vary_index(args.vary, game.players())?;
            let others = parse_strategy_list(&args.others)?;
            if others.len() != game.players() - 1 {
                return Err(CliError::validation(format!(
                    "--others lists {} strategies for {} fixed traders",
                    others.len(),
                    game.players() - 1
                )));
            }
            let (protocol, family) = match args.protocol.as_str() {
                "du" => (ProtocolKind::Du, StrategyFamily::DuGrid),
                "ewl2" => (ProtocolKind::Ewl2, StrategyFamily::EwlGrid),
                other => {
                    return Err(CliError::validation(format!(
                        "unknown protocol `{other}` (expected ewl2 or du)"
                    )))
                }
            };
            let spec = SweepSpec {
                protocol,
                game,
                varying,
                fixed: others.into_iter().map(PlayerStrategy::Pure).collect(),
                family,
                axes: vec![
                    AxisSpec::new(
                        AxisName::Theta,
                        lab::linspace(0.0, std::f64::consts::PI, args.theta_points),
                    )?,
                    AxisSpec::new(
                        AxisName::Phi,
                        lab::linspace(0.0, std::f64::consts::FRAC_PI_2, args.phi_points),
                    )?,
                ],
                init_bit: args.init,
            };
            let result = run_sweep(&spec)?;
            sweep_output(&result, args.out)
        }
        SweepAction::MixedTheta(args) => {
            let game = resolve_game(&args.game)?;
            let varying = vary_index(args.vary, game.players())?;
            let result = run_mixed_theta_sweep(&game, varying, args.points)?;
            sweep_output(&result, args.out)
        }
    }
}

fn run_flatness(args: FlatnessArgs) -> Result<String, CliError> {
    let game = resolve_game(&args.game)?;
    let varying = vary_index(args.vary, game.players())?;
    let theta = parse_angle(&args.theta).map_err(CliError::validation)?;
    let report = match args.opponent {
        Some(text) => flatness_check_vs(
            &game,
            varying,
            theta,
            args.points,
            PlayerStrategy::Pure(QuantumStrategy::parse(&text)?),
        )?,
        None => flatness_check(&game, varying, theta, args.points)?,
    };
    let csv = match args.out {
        Some(path) => {
            emit_csv(&report.result, &path)?;
            Some(path.display().to_string())
        }
        None => None,
    };
    #[derive(Serialize)]
    struct Out {
        theta: f64,
        spread: f64,
        min: f64,
        max: f64,
        rows: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        csv: Option<String>,
    }
    Ok(to_json_string(&Out {
        theta,
        spread: report.spread,
        min: report.min,
        max: report.max,
        rows: report.result.values.len(),
        csv,
    }))
}

fn parse_noise(text: &str, default_seed: u64) -> Result<(f64, u64, u64), CliError> {
    let mut p = None;
    let mut trials = None;
    let mut seed = default_seed;
    for pair in text.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::validation(format!("expected key=value, got `{pair}`")))?;
        match key.trim() {
            "p" => {
                p = Some(value.parse::<f64>().map_err(|_| {
                    CliError::validation(format!("cannot parse noise probability `{value}`"))
                })?)
            }
            "trials" => {
                trials = Some(value.parse::<u64>().map_err(|_| {
                    CliError::validation(format!("cannot parse trial count `{value}`"))
                })?)
            }
            "seed" => {
                seed = value
                    .parse::<u64>()
                    .map_err(|_| CliError::validation(format!("cannot parse seed `{value}`")))?
            }
            other => {
                return Err(CliError::validation(format!(
                    "unknown noise parameter `{other}`"
                )))
            }
        }
    }
    Ok((
        p.ok_or_else(|| CliError::validation("noise spec needs p=…"))?,
        trials.unwrap_or(10_000),
        seed,
    ))
}

fn run_compile(args: CompileArgs, seed: u64) -> Result<String, CliError> {
    let n = args.players;
    let (circuit, is_protocol, init_bit): (Circuit, bool, u8) = match &args.strategies {
        Some(list) => {
            let strategies = parse_strategy_list(list)?;
            if strategies.len() != n {
                return Err(CliError::validation(format!(
                    "{} strategies for {n} players",
                    strategies.len()
                )));
            }
            let init = args.init.unwrap_or_else(|| default_init_bit(n));
            (compile_protocol(n, &strategies, init)?, true, init)
        }
        None => (
            compile_entangler(n, args.dagger)?,
            false,
            args.init.unwrap_or(0),
        ),
    };

    let verify_max_deviation = if args.verify {
        Some(if is_protocol {
            let compiled = circuit.run(StateVector::init(n, 0)?)?.measure_distribution();
            let direct = protocol_reference_distribution(&circuit, n, init_bit)?;
            compiled
                .probs()
                .iter()
                .zip(direct.probs())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        } else {
            let sign = if args.dagger { -1 } else { 1 };
            let reference = entangler(EntanglerBasis::PauliX, sign, n)?;
            phase_aligned_max_deviation(&reference, &circuit.unitary()?)
        })
    } else {
        None
    };

    let emitted = match &args.emit {
        Some(path) => {
            std::fs::write(path, circuit.to_json())
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
            Some(path.display().to_string())
        }
        None => None,
    };

    #[derive(Serialize)]
    struct NoiseOut {
        p2q: f64,
        trials: u64,
        seed: u64,
        distribution: Vec<f64>,
    }
    let noise = match &args.noise {
        Some(spec) => {
            let (p2q, trials, noise_seed) = parse_noise(spec, seed)?;
            // Protocol circuits embed their init layer; bare entanglers start
            // from the requested basis state.
            let start_bit = if is_protocol { 0 } else { init_bit };
            let distribution = noisy_run(&circuit, start_bit, p2q, trials, noise_seed)?;
            Some(NoiseOut {
                p2q,
                trials,
                seed: noise_seed,
                distribution: distribution.probs().to_vec(),
            })
        }
        None => None,
    };

    #[derive(Serialize)]
    struct Out {
        qubits: usize,
        kind: &'static str,
        ops: usize,
        entangling_gates: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        verify_max_deviation: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        emitted: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        noise: Option<NoiseOut>,
    }
    Ok(to_json_string(&Out {
        qubits: circuit.qubits(),
        kind: if is_protocol {
            "protocol"
        } else if args.dagger {
            "entangler-dagger"
        } else {
            "entangler"
        },
        ops: circuit.ops().len(),
        entangling_gates: circuit.entangling_gate_count(),
        verify_max_deviation,
        emitted,
        noise,
    }))
}

/// Re-run a compiled protocol with the ladder blocks replaced by the direct
/// matrix-exponential entanglers, keeping the strategy layer between them.
fn protocol_reference_distribution(
    circuit: &Circuit,
    n: usize,
    init_bit: u8,
) -> Result<qtg_core::game::OutcomeDistribution, CliError> {
    let first_ent = circuit
        .ops()
        .iter()
        .position(CircuitOp::is_entangling)
        .ok_or_else(|| CliError::validation("protocol circuit has no entangling block"))?;
    let last_ent = circuit.ops().len()
        - 1
        - circuit
            .ops()
            .iter()
            .rev()
            .position(CircuitOp::is_entangling)
            .unwrap();
    let j = entangler(EntanglerBasis::PauliX, 1, n)?;
    let targets: Vec<usize> = (0..n).collect();
    let mut state = StateVector::init(n, init_bit)?.apply(&j, &targets)?;
    for op in &circuit.ops()[first_ent..=last_ent] {
        if let CircuitOp::Single { target, u } = op {
            state = state.apply(u, &[*target])?;
        }
    }
    let state = state.apply(&j.dagger(), &targets)?;
    Ok(state.measure_distribution())
}
