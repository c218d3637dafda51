//! Command-line front end for `bellkit`.
//!
//! Exit codes: 0 on success, 1 when a computed result fails an internal
//! consistency check, 2 for usage and I/O errors.

pub mod mixture_file;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use bellkit::inequalities::{
    chsh_quantum_max, evaluate, BellExpression, ChshOptimizerConfig, ChshSettings, ViolationReport,
};
use bellkit::lhv::{
    classical_bound, monte_carlo_correlator, single_spin_lhv, EstimatedCorrelator, Scenario,
    StrategyFilter,
};
use bellkit::quantum::{joint_distribution, sample_outcomes, singlet, TwoQubitState, UnitVector3};
use bellkit::rng::stream_rng;
use bellkit::scan::{find_min_margin, scan_landscape, AxisRange, GridSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::json;

use crate::mixture_file::parse_mixture;
use crate::output::{render_csv, render_json, render_table_json, Cell, Meta, Table};

pub const CLASSICAL_CHSH_BOUND: f64 = 2.0;
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Debug, Parser)]
#[command(name = "bellkit", version, about = "Bell and CHSH inequality toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every random stream
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Read angle arguments in degrees
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateArg {
    Singlet,
    ProductUpUp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExprArg {
    #[value(name = "bell1964")]
    Bell1964,
    Chsh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SettingsArg {
    /// Optimizer-found CHSH settings, four pairs
    Chsh,
    /// Both parties along z, one pair
    Zz,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Three-observable margin over the (theta, theta') plane
    Scan {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
        /// Grid step for both polar angles [default: pi/200 rad]
        #[arg(long)]
        step: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Largest CHSH value over measurement settings
    Chsh {
        #[arg(long, value_enum, default_value = "singlet")]
        state: StateArg,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
        starts: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Exact classical bound by strategy enumeration
    Bound {
        #[arg(long, value_enum, default_value = "chsh")]
        expr: ExprArg,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo correlator estimates
    Simulate {
        /// LHV mixture file; the singlet is simulated when absent
        #[arg(long)]
        mixture: Option<PathBuf>,
        /// Outcome columns belonging to Alice in the mixture file
        #[arg(long)]
        alice_settings: Option<usize>,
        #[arg(long, value_enum, default_value = "chsh")]
        settings: SettingsArg,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
        starts: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Single-spin hidden variable model against cos(theta)
    SpinModel {
        /// Angle step over [0, pi] [default: pi/49 rad, 50 angles]
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Consistency(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<bellkit::Error> for CliError {
    fn from(e: bellkit::Error) -> Self {
        if e.is_consistency() {
            CliError::Consistency(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (common, content) = match command {
        Command::Scan { phi, step, common } => (common, cmd_scan(*phi, *step, common)?),
        Command::Chsh {
            state,
            starts,
            common,
        } => (common, cmd_chsh(*state, *starts, common)?),
        Command::Bound { expr, common } => (common, cmd_bound(*expr, common)?),
        Command::Simulate {
            mixture,
            alice_settings,
            settings,
            n,
            starts,
            common,
        } => (
            common,
            cmd_simulate(
                mixture.as_deref(),
                *alice_settings,
                *settings,
                *n,
                *starts,
                common,
            )?,
        ),
        Command::SpinModel { step, n, common } => (common, cmd_spin_model(*step, *n, common)?),
    };
    emit(common.out.as_deref(), &content, stdout)
}

fn emit(out: Option<&Path>, content: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}"))),
    }
}

fn angle(value: f64, common: &Common) -> f64 {
    if common.degrees {
        value.to_radians()
    } else {
        value
    }
}

fn render(meta: &Meta, table: &Table, format: Format) -> String {
    match format {
        Format::Csv => render_csv(meta, table),
        Format::Json => render_table_json(meta, table),
    }
}

fn json_only(command: &str, common: &Common) -> Result<(), CliError> {
    if common.format == Some(Format::Csv) {
        return Err(CliError::Usage(format!("{command} reports are JSON only")));
    }
    Ok(())
}

fn cmd_scan(phi: f64, step: Option<f64>, common: &Common) -> Result<String, CliError> {
    let phi = angle(phi, common);
    let step = step.map_or(std::f64::consts::PI / 200.0, |s| angle(s, common));
    let grid = GridSpec::full(step, phi)?;
    let points = scan_landscape(&grid);
    let min = find_min_margin(&grid);

    let mut meta = Meta::new("scan", common.seed);
    meta.push("phi", Cell::Num(phi));
    meta.push("step", Cell::Num(step));
    meta.push("rows", Cell::Int(points.len() as u64));
    meta.push("min_theta", Cell::Num(min.theta));
    meta.push("min_theta_prime", Cell::Num(min.theta_prime));
    meta.push("min_margin", Cell::Num(min.margin));

    let mut table = Table::new(vec!["theta", "theta_prime", "margin"]);
    for p in points {
        table.push(vec![
            Cell::Num(p.theta),
            Cell::Num(p.theta_prime),
            Cell::Num(p.margin),
        ]);
    }
    Ok(render(&meta, &table, common.format.unwrap_or(Format::Csv)))
}

fn state_for(arg: StateArg) -> TwoQubitState {
    match arg {
        StateArg::Singlet => singlet(),
        StateArg::ProductUpUp => TwoQubitState::up_up(),
    }
}

fn state_name(arg: StateArg) -> &'static str {
    match arg {
        StateArg::Singlet => "singlet",
        StateArg::ProductUpUp => "product-up-up",
    }
}

fn optimize(state: &TwoQubitState, starts: u64, seed: u64) -> Result<(f64, ChshSettings), CliError> {
    let config = ChshOptimizerConfig {
        starts: starts as usize,
        seed,
        ..Default::default()
    };
    let best = chsh_quantum_max(state, &config)?;
    if best.value > TSIRELSON_BOUND + 1e-9 {
        return Err(CliError::Consistency(format!(
            "CHSH value {} exceeds 2√2",
            best.value
        )));
    }
    Ok((best.value, best.settings))
}

fn cmd_chsh(state: StateArg, starts: u64, common: &Common) -> Result<String, CliError> {
    json_only("chsh", common)?;
    let (value, settings) = optimize(&state_for(state), starts, common.seed)?;
    let report = ViolationReport::new(value, CLASSICAL_CHSH_BOUND);

    let mut meta = Meta::new("chsh", common.seed);
    meta.push("state", Cell::Text(state_name(state).into()));
    meta.push("starts", Cell::Int(starts));
    let data = json!({
        "value": value,
        "settings": {
            "a": settings.alice[0].to_array(),
            "a_prime": settings.alice[1].to_array(),
            "b": settings.bob[0].to_array(),
            "b_prime": settings.bob[1].to_array(),
        },
        "classical_bound": CLASSICAL_CHSH_BOUND,
        "tsirelson_bound": TSIRELSON_BOUND,
        "margin": report.margin,
        "violated": report.violated,
    });
    Ok(render_json(&meta, data))
}

fn cmd_bound(expr: ExprArg, common: &Common) -> Result<String, CliError> {
    json_only("bound", common)?;
    let (expression, scenario, filter) = match expr {
        ExprArg::Chsh => (BellExpression::chsh(), Scenario::chsh(), StrategyFilter::All),
        ExprArg::Bell1964 => (
            BellExpression::bell1964(),
            Scenario::bell1964(),
            StrategyFilter::Anticorrelated,
        ),
    };
    let bound = classical_bound(&expression, &scenario, filter)?;
    let check = evaluate(&expression, &bound.witness.correlator_table())?;
    if check.value != bound.value {
        return Err(CliError::Consistency(format!(
            "witness evaluates to {} instead of {}",
            check.value, bound.value
        )));
    }

    let mut meta = Meta::new("bound", common.seed);
    meta.push("expr", Cell::Text(expression.name().into()));
    let data = json!({
        "expression": expression.name(),
        "bound": bound.value,
        "anticorrelation_constraint": filter == StrategyFilter::Anticorrelated,
        "strategies": bound.strategies,
        "witness": {
            "index": bound.witness.index(),
            "alice": bound.witness.alice(),
            "bob": bound.witness.bob(),
        },
    });
    Ok(render_json(&meta, data))
}

fn estimate_row(table: &mut Table, label: String, est: &EstimatedCorrelator) {
    table.push(vec![
        Cell::Text(label),
        Cell::Num(est.mean),
        Cell::Num(est.standard_error),
        Cell::Int(est.sample_count),
    ]);
}

fn cmd_simulate(
    mixture: Option<&Path>,
    alice_settings: Option<usize>,
    settings: SettingsArg,
    n: u64,
    starts: u64,
    common: &Common,
) -> Result<String, CliError> {
    let mut meta = Meta::new("simulate", common.seed);
    meta.push("n", Cell::Int(n));
    let mut estimates: Vec<((usize, usize), EstimatedCorrelator)> = Vec::new();

    if let Some(path) = mixture {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let mixture = parse_mixture(&text, alice_settings)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        meta.push("source", Cell::Text("mixture".into()));
        meta.push("mixture_file", Cell::Text(path.display().to_string()));
        let cols = mixture.settings_b();
        for i in 0..mixture.settings_a() {
            for j in 0..cols {
                let mut rng = stream_rng(common.seed, (i * cols + j) as u64);
                estimates.push(((i, j), monte_carlo_correlator(&mixture, i, j, n, &mut rng)?));
            }
        }
    } else {
        let psi = singlet();
        meta.push("source", Cell::Text("singlet".into()));
        let pairs: Vec<((usize, usize), UnitVector3, UnitVector3)> = match settings {
            SettingsArg::Zz => {
                meta.push("settings", Cell::Text("zz".into()));
                vec![((0, 0), UnitVector3::z_axis(), UnitVector3::z_axis())]
            }
            SettingsArg::Chsh => {
                meta.push("settings", Cell::Text("chsh".into()));
                meta.push("starts", Cell::Int(starts));
                let (_, s) = optimize(&psi, starts, common.seed)?;
                let mut pairs = Vec::new();
                for i in 0..2 {
                    for j in 0..2 {
                        pairs.push(((i, j), s.alice[i], s.bob[j]));
                    }
                }
                pairs
            }
        };
        for (k, (idx, a, b)) in pairs.into_iter().enumerate() {
            let dist = joint_distribution(&psi, &a, &b)?;
            let mut rng = stream_rng(common.seed, k as u64);
            let products = (0..n).map(|_| {
                let (x, y) = sample_outcomes(&dist, &mut rng);
                x * y
            });
            estimates.push((idx, EstimatedCorrelator::from_products(products)?));
        }
    }

    if estimates.len() == 4 && estimates.iter().all(|((i, j), _)| *i < 2 && *j < 2) {
        let mean = |i: usize, j: usize| {
            estimates
                .iter()
                .find(|(idx, _)| *idx == (i, j))
                .map(|(_, e)| *e)
                .expect("all four pairs present")
        };
        let sum = mean(0, 0).mean + mean(0, 1).mean + mean(1, 0).mean - mean(1, 1).mean;
        let se = estimates
            .iter()
            .map(|(_, e)| e.standard_error * e.standard_error)
            .sum::<f64>()
            .sqrt();
        meta.push("chsh_estimate", Cell::Num(sum.abs()));
        meta.push("chsh_standard_error", Cell::Num(se));
    }

    let mut table = Table::new(vec!["pair", "mean", "stderr", "n"]);
    for ((i, j), est) in &estimates {
        estimate_row(&mut table, format!("A{i}B{j}"), est);
    }
    Ok(render(&meta, &table, common.format.unwrap_or(Format::Csv)))
}

fn cmd_spin_model(step: Option<f64>, n: u64, common: &Common) -> Result<String, CliError> {
    let pi = std::f64::consts::PI;
    let step = step.map_or(pi / 49.0, |s| angle(s, common));
    let axis = AxisRange::new(0.0, pi, step)?;
    let polarization = UnitVector3::z_axis();

    let mut meta = Meta::new("spin-model", common.seed);
    meta.push("step", Cell::Num(step));
    meta.push("n", Cell::Int(n));

    let mut table = Table::new(vec!["theta", "empirical_mean", "quantum_expectation", "abs_error"]);
    for (k, theta) in axis.nodes().into_iter().enumerate() {
        let measurement = UnitVector3::from_spherical(theta, 0.0);
        let mut rng = stream_rng(common.seed, k as u64);
        let mut sum = 0i64;
        for _ in 0..n {
            sum += i64::from(single_spin_lhv(&polarization, &measurement, rng.gen())?);
        }
        let mean = sum as f64 / n as f64;
        let expected = theta.cos();
        table.push(vec![
            Cell::Num(theta),
            Cell::Num(mean),
            Cell::Num(expected),
            Cell::Num((mean - expected).abs()),
        ]);
    }
    Ok(render(&meta, &table, common.format.unwrap_or(Format::Csv)))
}
