//! `dcl` command-line experiment runner.
//!
//! Every command computes a table and writes it as CSV (stdout or `--out`),
//! preceded by `#` lines recording the version, the resolved parameters and
//! a command line that reruns the experiment. Parameters may also come from a
//! flat `key = value` file given with `--config`; command-line flags win.
//!
//! Exit codes: 0 success, 2 configuration or precondition error, 3 infeasible
//! program, 4 model or domain error.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::{
    exact_outage_k1, high_snr_objective, high_snr_outage, optimal_k_high_snr, outage_lower_bound, outage_upper_bound,
    SingleChannelConfig, HIGH_SNR_MIN_POWER,
};
use crate::channel::{AttackModel, FadingModel, PowerVector};
use crate::error::Error;
use crate::montecarlo::{
    estimate_outage_parallel, estimate_outage_parallel_mdep, estimate_outage_single, outage_capacity_search, McOptions,
    UniformMc, DEFAULT_TRIALS,
};
use crate::parallel::{
    gaussian_outage_indep, gaussian_outage_mdep, outage_exponent_indep, outage_exponent_mdep, y_moments,
    ParallelConfig, GAUSSIAN_MIN_N,
};
use crate::power::{solve_power, HighSnrProgram, OptimizedMc, PowerProgram, SolveStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_MODEL: i32 = 4;

/// Flags that take no value; in a config file they are written `key = true`.
const SWITCHES: &[&str] = &["gnuplot", "no-attack"];

/// Keys that configure the same quantity; a flag for one suppresses file
/// values for the others.
const ALIASES: &[&[&str]] = &[&["P", "P-dB"], &["inv-lambda", "lambda", "no-attack"]];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Parse failures, help and version requests.
    Clap(clap::Error),
    Run(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Clap(e) if !e.use_stderr() => EXIT_OK,
            CliError::Clap(_) => EXIT_CONFIG,
            CliError::Run(e) => exit_code_for(e),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Clap(e) => write!(f, "{e}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Precondition(_) => EXIT_CONFIG,
        Error::Infeasible { .. } => EXIT_INFEASIBLE,
        Error::Domain(_)
        | Error::Model(_)
        | Error::UnsupportedModel(_)
        | Error::Calibration { .. }
        | Error::OutOfRegime(_) => EXIT_MODEL,
    }
}

#[derive(Debug, Parser)]
#[command(name = "dcl", version, about = "Outage experiments for dying channels", args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lower/upper bounds and high-SNR approximation over K.
    SingleBounds(SingleBoundsArgs),
    /// Optimal coding length in the high-SNR Rayleigh regime.
    OptimalK(OptimalKArgs),
    /// Outage-minimising block powers for one K.
    PowerOpt(PowerOptArgs),
    /// Outage capacity over K.
    Capacity(CapacityArgs),
    /// Monte Carlo outage of one configuration.
    Mc(McArgs),
    /// Parallel sub-channels: Monte Carlo versus Gaussian approximation over N.
    Parallel(ParallelArgs),
    /// Outage exponents over the rate per unit cost.
    Exponent(ExponentArgs),
    /// Curves of one of the eight reference figures.
    ReproduceFig(FigArgs),
}

#[derive(Debug, Args, Clone)]
struct OutputArgs {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script next to `--out`.
    #[arg(long)]
    gnuplot: bool,
    /// Flat `key = value` parameter file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
struct PowerArgs {
    /// Average power per block, linear.
    #[arg(long = "P", conflicts_with = "p_db")]
    p: Option<f64>,
    /// Average power per block in dB.
    #[arg(long = "P-dB")]
    p_db: Option<f64>,
}

impl PowerArgs {
    fn resolve(&self, default: f64) -> f64 {
        match (self.p, self.p_db) {
            (Some(p), _) => p,
            (None, Some(db)) => 10f64.powf(db / 10.0),
            (None, None) => default,
        }
    }
}

#[derive(Debug, Args, Clone)]
struct AttackArgs {
    /// Mean attack time in blocks (exponential attack).
    #[arg(long = "inv-lambda", conflicts_with_all = ["lambda", "no_attack"])]
    inv_lambda: Option<f64>,
    /// Attack rate (exponential attack).
    #[arg(long, conflicts_with = "no_attack")]
    lambda: Option<f64>,
    /// No attack.
    #[arg(long = "no-attack")]
    no_attack: bool,
}

impl AttackArgs {
    fn resolve(&self, default_mean: f64) -> Result<(AttackModel, String), CliError> {
        if self.no_attack {
            return Ok((AttackModel::NeverAttack, "--no-attack".into()));
        }
        let rate = match (self.inv_lambda, self.lambda) {
            (Some(m), _) => {
                if !(m > 0.0) {
                    return Err(CliError::Usage(format!("--inv-lambda must be positive, got {m}")));
                }
                1.0 / m
            }
            (None, Some(l)) => l,
            (None, None) => 1.0 / default_mean,
        };
        let a = AttackModel::exponential(rate).map_err(|e| CliError::Usage(format!("--lambda: {e}")))?;
        Ok((a, format!("--lambda {rate}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FadingKind {
    Rayleigh,
    Lognormal,
    IdenticalRayleigh,
    IdenticalLognormal,
}

#[derive(Debug, Args, Clone)]
struct FadingArgs {
    #[arg(long, value_enum)]
    fading: Option<FadingKind>,
    /// Rate of the exponential power gain (Rayleigh kinds).
    #[arg(long = "fading-rate")]
    fading_rate: Option<f64>,
}

impl FadingArgs {
    fn resolve(&self, default: FadingKind) -> Result<(FadingModel, String), CliError> {
        let kind = self.fading.unwrap_or(default);
        let rate = self.fading_rate.unwrap_or(1.0);
        let ray = || FadingModel::rayleigh(rate).map_err(|e| CliError::Usage(format!("--fading-rate: {e}")));
        let model = match kind {
            FadingKind::Rayleigh => ray()?,
            FadingKind::Lognormal => FadingModel::LogNormalStd,
            FadingKind::IdenticalRayleigh => FadingModel::identical(ray()?),
            FadingKind::IdenticalLognormal => FadingModel::identical(FadingModel::LogNormalStd),
        };
        let name = kind.to_possible_value().expect("no skipped variants").get_name().to_string();
        let mut flags = format!("--fading {name}");
        if matches!(kind, FadingKind::Rayleigh | FadingKind::IdenticalRayleigh) {
            write!(flags, " --fading-rate {rate}").unwrap();
        }
        Ok((model, flags))
    }
}

#[derive(Debug, Args, Clone)]
struct MonteCarloArgs {
    /// Monte Carlo trials.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl MonteCarloArgs {
    fn resolve(&self) -> McOptions {
        McOptions::new(self.trials.unwrap_or(DEFAULT_TRIALS), self.seed.unwrap_or(1))
    }
}

#[derive(Debug, Args)]
struct SingleBoundsArgs {
    #[arg(long = "K-max")]
    k_max: Option<usize>,
    /// Target rate, nats per channel use.
    #[arg(long = "R")]
    r: Option<f64>,
    #[command(flatten)]
    power: PowerArgs,
    #[command(flatten)]
    attack: AttackArgs,
    #[command(flatten)]
    fading: FadingArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OptimalKArgs {
    /// Largest K for the integer grid check.
    #[arg(long = "K-max")]
    k_max: Option<usize>,
    #[arg(long = "R")]
    r: Option<f64>,
    #[command(flatten)]
    power: PowerArgs,
    #[command(flatten)]
    attack: AttackArgs,
    #[command(flatten)]
    fading: FadingArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProgramKind {
    /// Pick the program matching the fading model.
    Auto,
    Uniform,
    HighSnr,
    Lognormal,
}

impl ProgramKind {
    fn resolve(self, fading: &FadingModel) -> Result<PowerProgram, Error> {
        match self {
            ProgramKind::Auto => PowerProgram::for_fading(fading),
            ProgramKind::Uniform => Ok(PowerProgram::Uniform),
            ProgramKind::HighSnr => Ok(PowerProgram::HighSnrRayleigh),
            ProgramKind::Lognormal => Ok(PowerProgram::LogNormalUpper),
        }
    }

    fn name(self) -> &'static str {
        match self {
            ProgramKind::Auto => "auto",
            ProgramKind::Uniform => "uniform",
            ProgramKind::HighSnr => "high-snr",
            ProgramKind::Lognormal => "lognormal",
        }
    }
}

#[derive(Debug, Args)]
struct PowerOptArgs {
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long = "R")]
    r: Option<f64>,
    #[arg(long, value_enum)]
    program: Option<ProgramKind>,
    #[command(flatten)]
    power: PowerArgs,
    #[command(flatten)]
    attack: AttackArgs,
    #[command(flatten)]
    fading: FadingArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Allocation {
    Uniform,
    Optimized,
    Both,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    /// Outage target.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long = "K-max")]
    k_max: Option<usize>,
    /// Rate tolerance of the bisection.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    allocation: Option<Allocation>,
    #[command(flatten)]
    power: PowerArgs,
    #[command(flatten)]
    attack: AttackArgs,
    #[command(flatten)]
    fading: FadingArgs,
    #[command(flatten)]
    mc: MonteCarloArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long = "R")]
    r: Option<f64>,
    /// Comma-separated block powers; uniform when absent.
    #[arg(long)]
    powers: Option<String>,
    #[command(flatten)]
    power: PowerArgs,
    #[command(flatten)]
    attack: AttackArgs,
    #[command(flatten)]
    fading: FadingArgs,
    #[command(flatten)]
    mc: MonteCarloArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ParallelArgs {
    /// Comma-separated sub-channel counts.
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long = "K")]
    k: Option<usize>,
    /// Total rate.
    #[arg(long = "R")]
    r: Option<f64>,
    /// Dependence range of the attacks (0 = independent).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[command(flatten)]
    power: PowerArgs,
    #[command(flatten)]
    attack: AttackArgs,
    #[command(flatten)]
    fading: FadingArgs,
    #[command(flatten)]
    mc: MonteCarloArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ExponentArgs {
    /// Comma-separated rates per unit cost.
    #[arg(long)]
    t: Option<String>,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[command(flatten)]
    attack: AttackArgs,
    #[command(flatten)]
    fading: FadingArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct FigArgs {
    /// Figure number, 1 to 8.
    id: u32,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long = "K-max")]
    k_max: Option<usize>,
    #[arg(long = "R")]
    r: Option<f64>,
    #[arg(long = "inv-lambda")]
    inv_lambda: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[command(flatten)]
    power: PowerArgs,
    #[command(flatten)]
    mc: MonteCarloArgs,
    #[command(flatten)]
    output: OutputArgs,
}

/// A CSV table with `#` metadata lines.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    fn new(header: &[&str]) -> Self {
        CsvTable { meta: Vec::new(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for m in &self.meta {
            writeln!(s, "# {m}").unwrap();
        }
        writeln!(s, "{}", self.header.join(",")).unwrap();
        for r in &self.rows {
            writeln!(s, "{}", r.join(",")).unwrap();
        }
        s
    }
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x}")
    }
}

/// How to plot a table: x column, y columns, optional grouping column.
struct PlotSpec {
    x: usize,
    ys: Vec<usize>,
    group: Option<usize>,
    log_y: bool,
}

fn gnuplot_script(table: &CsvTable, csv: &Path, spec: &PlotSpec) -> String {
    let mut s = String::new();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set key outside").unwrap();
    writeln!(s, "set xlabel '{}'", table.header[spec.x]).unwrap();
    if spec.log_y {
        writeln!(s, "set logscale y").unwrap();
    }
    let file = csv.display();
    let mut parts = Vec::new();
    let groups: Vec<String> = match spec.group {
        Some(g) => {
            let mut seen = Vec::new();
            for r in &table.rows {
                if !seen.contains(&r[g]) {
                    seen.push(r[g].clone());
                }
            }
            seen
        }
        None => vec![String::new()],
    };
    for gv in &groups {
        for &y in &spec.ys {
            let (using, title) = match spec.group {
                Some(g) => (
                    format!("{}:(${} == {gv} ? ${} : 1/0)", spec.x + 1, g + 1, y + 1),
                    format!("{} {}={gv}", table.header[y], table.header[g]),
                ),
                None => (format!("{}:{}", spec.x + 1, y + 1), table.header[y].clone()),
            };
            parts.push(format!("'{file}' using {using} with linespoints title '{title}'"));
        }
    }
    writeln!(s, "plot {}", parts.join(", \\\n     ")).unwrap();
    s
}

struct Output {
    table: CsvTable,
    plot: PlotSpec,
}

/// Resolved parameters of a run, in rerun-flag form.
struct Params {
    command: String,
    flags: Vec<String>,
}

impl Params {
    fn new(command: &str) -> Self {
        Params { command: command.into(), flags: Vec::new() }
    }

    fn set(&mut self, key: &str, value: impl std::fmt::Display) {
        self.flags.push(format!("--{key} {value}"));
    }

    fn raw(&mut self, flags: String) {
        self.flags.push(flags);
    }

    fn meta(&self) -> Vec<String> {
        vec![
            format!("dcl {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", self.command),
            format!("params: {}", self.flags.join(" ")),
            format!("rerun: dcl {} {}", self.command, self.flags.join(" ")),
        ]
    }
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn positive_usize(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        return Err(CliError::Usage(format!("--{name} must be at least 1")));
    }
    Ok(v)
}

fn positive_f64(name: &str, v: f64) -> Result<f64, CliError> {
    if !(v.is_finite() && v > 0.0) {
        return Err(CliError::Usage(format!("--{name} must be positive, got {v}")));
    }
    Ok(v)
}

fn parse_list<T: std::str::FromStr>(name: &str, s: &str) -> Result<Vec<T>, CliError> {
    let v: Result<Vec<T>, _> = s.split(',').map(|x| x.trim().parse::<T>()).collect();
    match v {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::Usage(format!("--{name}: cannot parse list {s:?}"))),
    }
}

fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn bounds_table(base: &SingleChannelConfig, k_max: usize, mc: Option<&McOptions>) -> Result<CsvTable, CliError> {
    let mut cols = vec!["K", "lower", "upper", "high_snr"];
    if mc.is_some() {
        cols.extend(["mc", "mc_stderr"]);
    }
    let mut t = CsvTable::new(&cols);
    let rayleigh = matches!(base.fading, FadingModel::RayleighExp { .. })
        && matches!(base.attack, AttackModel::Exponential { .. });
    for k in 1..=k_max {
        let cfg = base.with_k(k)?;
        let hs = if rayleigh { high_snr_outage(&cfg)? } else { f64::NAN };
        let mut row = vec![k.to_string(), num(outage_lower_bound(&cfg)?), num(outage_upper_bound(&cfg)?), num(hs)];
        if let Some(opts) = mc {
            let e = estimate_outage_single(&cfg, &PowerVector::uniform(k, cfg.power)?, opts)?;
            row.push(num(e.p_hat));
            row.push(num(e.stderr));
        }
        t.push(row);
    }
    Ok(t)
}

fn cmd_single_bounds(a: &SingleBoundsArgs) -> Result<(Params, Output), CliError> {
    let k_max = positive_usize("K-max", a.k_max.unwrap_or(15))?;
    let r = positive_f64("R", a.r.unwrap_or(1.0))?;
    let p = positive_f64("P", a.power.resolve(100.0))?;
    let (attack, af) = a.attack.resolve(10.0)?;
    let (fading, ff) = a.fading.resolve(FadingKind::Rayleigh)?;
    if p < HIGH_SNR_MIN_POWER {
        warn("high-SNR approximation is unreliable below 20 dB");
    }
    let mut params = Params::new("single-bounds");
    params.set("K-max", k_max);
    params.set("R", r);
    params.set("P", p);
    params.raw(af);
    params.raw(ff);
    let base = SingleChannelConfig::new(1, r, p, fading, attack)?;
    let table = bounds_table(&base, k_max, None)?;
    Ok((params, Output { table, plot: PlotSpec { x: 0, ys: vec![1, 2, 3], group: None, log_y: true } }))
}

fn cmd_optimal_k(a: &OptimalKArgs) -> Result<(Params, Output), CliError> {
    let k_max = positive_usize("K-max", a.k_max.unwrap_or(30))?;
    let r = positive_f64("R", a.r.unwrap_or(1.0))?;
    let p = positive_f64("P", a.power.resolve(1000.0))?;
    let (attack, af) = a.attack.resolve(10.0)?;
    let (fading, ff) = a.fading.resolve(FadingKind::Rayleigh)?;
    if p < HIGH_SNR_MIN_POWER {
        warn("high-SNR approximation is unreliable below 20 dB");
    }
    let mut params = Params::new("optimal-k");
    params.set("K-max", k_max);
    params.set("R", r);
    params.set("P", p);
    params.raw(af);
    params.raw(ff);
    let cfg = SingleChannelConfig::new(1, r, p, fading, attack)?;
    let s = optimal_k_high_snr(&cfg)?;
    let mut grid_k = 1;
    let mut grid_v = f64::INFINITY;
    for k in 1..=k_max {
        let v = high_snr_objective(&cfg, k)?;
        if v < grid_v {
            grid_v = v;
            grid_k = k;
        }
    }
    let mut t = CsvTable::new(&["beta", "c", "xi", "k_real", "k_int", "interior", "grid_k", "grid_outage"]);
    t.push(vec![
        num(s.beta),
        num(s.c),
        num(s.xi),
        num(s.k_real),
        s.k_int.to_string(),
        (s.interior as u8).to_string(),
        grid_k.to_string(),
        num(grid_v),
    ]);
    Ok((params, Output { table: t, plot: PlotSpec { x: 4, ys: vec![7], group: None, log_y: false } }))
}

fn cmd_power_opt(a: &PowerOptArgs) -> Result<(Params, Output), CliError> {
    let k = positive_usize("K", a.k.unwrap_or(4))?;
    let r = positive_f64("R", a.r.unwrap_or(0.5))?;
    let p = positive_f64("P", a.power.resolve(10.0))?;
    let (attack, af) = a.attack.resolve(5.0)?;
    let (fading, ff) = a.fading.resolve(FadingKind::Rayleigh)?;
    let kind = a.program.unwrap_or(ProgramKind::Auto);
    let mut params = Params::new("power-opt");
    params.set("K", k);
    params.set("R", r);
    params.set("P", p);
    params.set("program", kind.name());
    params.raw(af);
    params.raw(ff);
    let cfg = SingleChannelConfig::new(k, r, p, fading.clone(), attack)?;
    let program = kind.resolve(&fading)?;
    let rep = solve_power(&cfg, program)?;
    let uniform_obj = match program {
        PowerProgram::HighSnrRayleigh => HighSnrProgram::new(&cfg)?.objective(&vec![p; k]),
        PowerProgram::LogNormalUpper => crate::power::lognormal_upper_objective(&cfg, &vec![p; k])?,
        PowerProgram::Uniform => f64::NAN,
    };
    let status = match rep.status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::MaxIter => "max-iter",
    };
    let mut t = CsvTable::new(&["block", "power", "uniform_power"]);
    for (i, v) in rep.power.as_slice().iter().enumerate() {
        t.push(vec![(i + 1).to_string(), num(*v), num(p)]);
    }
    t.meta.push(format!(
        "result: objective={} uniform_objective={} status={status} kkt_residual={} iterations={}",
        num(rep.objective),
        num(uniform_obj),
        num(rep.kkt_residual),
        rep.iterations
    ));
    Ok((params, Output { table: t, plot: PlotSpec { x: 0, ys: vec![1, 2], group: None, log_y: false } }))
}

#[allow(clippy::too_many_arguments)]
fn capacity_table(
    fading: &FadingModel,
    attack: &AttackModel,
    p: f64,
    eta: f64,
    k_max: usize,
    tol: f64,
    allocation: Allocation,
    opts: &McOptions,
) -> Result<CsvTable, CliError> {
    let mut cols = vec!["K"];
    let mut runs = Vec::new();
    if matches!(allocation, Allocation::Uniform | Allocation::Both) {
        cols.push("uniform_capacity");
        let ev = UniformMc { fading: fading.clone(), attack: attack.clone(), power: p, opts: *opts };
        runs.push(outage_capacity_search(&ev, eta, k_max, tol)?);
    }
    if matches!(allocation, Allocation::Optimized | Allocation::Both) {
        cols.push("optimized_capacity");
        let ev = OptimizedMc {
            fading: fading.clone(),
            attack: attack.clone(),
            power: p,
            opts: *opts,
            program: PowerProgram::for_fading(fading)?,
        };
        runs.push(outage_capacity_search(&ev, eta, k_max, tol)?);
    }
    let mut t = CsvTable::new(&cols);
    for k in 0..k_max {
        let mut row = vec![(k + 1).to_string()];
        row.extend(runs.iter().map(|r| num(r.per_k[k])));
        t.push(row);
    }
    for (name, r) in cols[1..].iter().zip(&runs) {
        t.meta.push(format!(
            "result: {name} c_out={} k_star={} hit_cap={} zero_capacity={}",
            num(r.c_out),
            r.k_star,
            r.hit_cap,
            r.zero_capacity
        ));
    }
    Ok(t)
}

fn cmd_capacity(a: &CapacityArgs) -> Result<(Params, Output), CliError> {
    let eta = a.eta.unwrap_or(0.3);
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(CliError::Usage(format!("--eta must lie in (0, 1], got {eta}")));
    }
    let k_max = positive_usize("K-max", a.k_max.unwrap_or(8))?;
    let tol = positive_f64("tol", a.tol.unwrap_or(1e-3))?;
    let p = positive_f64("P", a.power.resolve(3.0))?;
    let (attack, af) = a.attack.resolve(4.0)?;
    let (fading, ff) = a.fading.resolve(FadingKind::Lognormal)?;
    let allocation = a.allocation.unwrap_or(Allocation::Both);
    let opts = a.mc.resolve();
    let mut params = Params::new("capacity");
    params.set("eta", eta);
    params.set("K-max", k_max);
    params.set("tol", tol);
    params.set("allocation", allocation.to_possible_value().unwrap().get_name());
    params.set("P", p);
    params.raw(af);
    params.raw(ff);
    params.set("trials", opts.trials);
    params.set("seed", opts.seed);
    let t = capacity_table(&fading, &attack, p, eta, k_max, tol, allocation, &opts)?;
    let ys = (1..t.header.len()).collect();
    Ok((params, Output { table: t, plot: PlotSpec { x: 0, ys, group: None, log_y: false } }))
}

fn cmd_mc(a: &McArgs) -> Result<(Params, Output), CliError> {
    let r = positive_f64("R", a.r.unwrap_or(1.0))?;
    let p = positive_f64("P", a.power.resolve(10.0))?;
    let (attack, af) = a.attack.resolve(5.0)?;
    let (fading, ff) = a.fading.resolve(FadingKind::Rayleigh)?;
    let opts = a.mc.resolve();
    let powers: Option<Vec<f64>> = a.powers.as_deref().map(|s| parse_list("powers", s)).transpose()?;
    let k = match (&powers, a.k) {
        (Some(v), Some(k)) if v.len() != k => {
            return Err(CliError::Usage(format!("--powers has {} entries but --K is {k}", v.len())))
        }
        (Some(v), _) => v.len(),
        (None, k) => positive_usize("K", k.unwrap_or(1))?,
    };
    let mut params = Params::new("mc");
    params.set("K", k);
    params.set("R", r);
    params.set("P", p);
    if let Some(v) = &powers {
        params.set("powers", join(v));
    }
    params.raw(af);
    params.raw(ff);
    params.set("trials", opts.trials);
    params.set("seed", opts.seed);
    let cfg = SingleChannelConfig::new(k, r, p, fading.clone(), attack)?;
    let pv = match powers {
        Some(v) => PowerVector::new(v, p)?,
        None => PowerVector::uniform(k, p)?,
    };
    let e = estimate_outage_single(&cfg, &pv, &opts)?;
    let (lo, hi) = if fading.is_identical() || powers_nonuniform(&pv) {
        (f64::NAN, f64::NAN)
    } else {
        (outage_lower_bound(&cfg)?, outage_upper_bound(&cfg)?)
    };
    let exact = if k == 1 && !powers_nonuniform(&pv) { exact_outage_k1(&cfg)? } else { f64::NAN };
    let mut t = CsvTable::new(&["K", "R", "P", "p_hat", "stderr", "trials", "seed", "lower", "upper", "exact_k1"]);
    t.push(vec![
        k.to_string(),
        num(r),
        num(p),
        num(e.p_hat),
        num(e.stderr),
        e.trials.to_string(),
        e.seed.to_string(),
        num(lo),
        num(hi),
        num(exact),
    ]);
    Ok((params, Output { table: t, plot: PlotSpec { x: 0, ys: vec![3, 7, 8], group: None, log_y: false } }))
}

fn powers_nonuniform(p: &PowerVector) -> bool {
    p.as_slice().iter().any(|v| *v != p.budget())
}

/// Table over `N` of Monte Carlo versus Gaussian approximation.
fn parallel_rows(
    base: &ParallelConfig,
    ns: &[usize],
    opts: &McOptions,
    mdep: bool,
    t: &mut CsvTable,
    lead: &[String],
) -> Result<(), CliError> {
    for &n in ns {
        let pc = base.with_n(n)?;
        let mut row = lead.to_vec();
        row.push(n.to_string());
        if mdep {
            let e = estimate_outage_parallel_mdep(&pc, opts)?;
            if !e.corr_ok {
                warn(&format!("realized neighbour correlation {} misses target {}", e.realized_corr, base.rho));
            }
            row.extend([
                num(e.estimate.p_hat),
                num(e.estimate.stderr),
                num(gaussian_outage_mdep(&pc)?),
                num(e.realized_corr),
            ]);
        } else {
            let e = estimate_outage_parallel(&pc, opts)?;
            row.extend([num(e.p_hat), num(e.stderr), num(gaussian_outage_indep(&pc)?), "nan".into()]);
        }
        t.push(row);
    }
    Ok(())
}

fn check_ns(ns: &[usize]) -> Result<(), CliError> {
    if ns.contains(&0) {
        return Err(CliError::Usage("--N entries must be at least 1".into()));
    }
    if ns.iter().any(|n| *n < GAUSSIAN_MIN_N) {
        warn(&format!("Gaussian approximation is unreliable below N = {GAUSSIAN_MIN_N}"));
    }
    Ok(())
}

fn cmd_parallel(a: &ParallelArgs) -> Result<(Params, Output), CliError> {
    let ns: Vec<usize> = parse_list("N", a.n.as_deref().unwrap_or("10,25,50,100,150,200"))?;
    check_ns(&ns)?;
    let k = positive_usize("K", a.k.unwrap_or(5))?;
    let r = positive_f64("R", a.r.unwrap_or(0.5))?;
    let p = positive_f64("P", a.power.resolve(2.0))?;
    let m = a.m.unwrap_or(0);
    let rho = a.rho.unwrap_or(0.0);
    let (attack, af) = a.attack.resolve(5.0)?;
    let (fading, ff) = a.fading.resolve(FadingKind::Rayleigh)?;
    let opts = a.mc.resolve();
    let mut params = Params::new("parallel");
    params.set("N", join(&ns));
    params.set("K", k);
    params.set("R", r);
    params.set("P", p);
    params.set("m", m);
    params.set("rho", rho);
    params.raw(af);
    params.raw(ff);
    params.set("trials", opts.trials);
    params.set("seed", opts.seed);
    let base = ParallelConfig::new(ns[0], k, p, r, m, rho, fading, attack).map_err(|e| match e {
        Error::Precondition(m) => CliError::Usage(m),
        e => e.into(),
    })?;
    let mut t = CsvTable::new(&["N", "mc_outage", "mc_stderr", "gaussian_approx", "realized_corr"]);
    parallel_rows(&base, &ns, &opts, m > 0, &mut t, &[])?;
    Ok((params, Output { table: t, plot: PlotSpec { x: 0, ys: vec![1, 3], group: None, log_y: true } }))
}

#[allow(clippy::too_many_arguments)]
fn exponent_rows(
    fading: &FadingModel,
    attack: &AttackModel,
    k: usize,
    m: usize,
    rho: f64,
    ts: &[f64],
    t: &mut CsvTable,
    lead: &[String],
) -> Result<(), CliError> {
    for &x in ts {
        let ind = outage_exponent_indep(fading, attack, k, x)?;
        let dep = outage_exponent_mdep(fading, attack, k, m, rho, x)?;
        if ind.bracket_capped {
            warn(&format!("exponent search at t = {x} hit the bracket limit"));
        }
        if ind.low_t {
            warn(&format!("t = {x} lies below the 1e-3 quantile of the per-channel throughput"));
        }
        let mut row = lead.to_vec();
        row.extend([num(x), num(ind.value), num(ind.s_star), num(ind.gaussian_bound), num(dep.value)]);
        t.push(row);
    }
    Ok(())
}

fn cmd_exponent(a: &ExponentArgs) -> Result<(Params, Output), CliError> {
    let ts: Vec<f64> = parse_list("t", a.t.as_deref().unwrap_or("0.1,0.2,0.3,0.4,0.5"))?;
    let k = positive_usize("K", a.k.unwrap_or(5))?;
    let m = positive_usize("m", a.m.unwrap_or(1))?;
    let rho = a.rho.unwrap_or(0.8);
    let (attack, af) = a.attack.resolve(5.0)?;
    let (fading, ff) = a.fading.resolve(FadingKind::Rayleigh)?;
    let mut params = Params::new("exponent");
    params.set("t", join(&ts));
    params.set("K", k);
    params.set("m", m);
    params.set("rho", rho);
    params.raw(af);
    params.raw(ff);
    let mut t = CsvTable::new(&["t", "indep_ldp", "s_star", "indep_gaussian_bound", "mdep_gaussian_bound"]);
    exponent_rows(&fading, &attack, k, m, rho, &ts, &mut t, &[])?;
    Ok((params, Output { table: t, plot: PlotSpec { x: 0, ys: vec![1, 3, 4], group: None, log_y: false } }))
}

fn cmd_figure(a: &FigArgs) -> Result<(Params, Output), CliError> {
    let opts = a.mc.resolve();
    let mut params = Params::new(&format!("reproduce-fig {}", a.id));
    let rayleigh = FadingModel::unit_rayleigh();
    let out = match a.id {
        1 | 2 => {
            let p = positive_f64("P", a.power.resolve(if a.id == 1 { 100.0 } else { 1000.0 }))?;
            let r = positive_f64("R", a.r.unwrap_or(1.0))?;
            let mean = positive_f64("inv-lambda", a.inv_lambda.unwrap_or(10.0))?;
            let k_max = positive_usize("K-max", a.k_max.unwrap_or(15))?;
            params.set("P", p);
            params.set("R", r);
            params.set("inv-lambda", mean);
            params.set("K-max", k_max);
            params.set("trials", opts.trials);
            params.set("seed", opts.seed);
            let base = SingleChannelConfig::new(1, r, p, rayleigh, AttackModel::with_mean(mean)?)?;
            let table = bounds_table(&base, k_max, Some(&opts))?;
            Output { table, plot: PlotSpec { x: 0, ys: vec![1, 2, 3, 4], group: None, log_y: true } }
        }
        3 => {
            let p = positive_f64("P", a.power.resolve(10.0))?;
            let r = positive_f64("R", a.r.unwrap_or(0.5))?;
            let mean = positive_f64("inv-lambda", a.inv_lambda.unwrap_or(5.0))?;
            let k_max = positive_usize("K-max", a.k_max.unwrap_or(8))?;
            params.set("P", p);
            params.set("R", r);
            params.set("inv-lambda", mean);
            params.set("K-max", k_max);
            params.set("trials", opts.trials);
            params.set("seed", opts.seed);
            let base = SingleChannelConfig::new(1, r, p, rayleigh, AttackModel::with_mean(mean)?)?;
            let mut t = CsvTable::new(&[
                "K",
                "uniform_mc",
                "uniform_stderr",
                "optimized_mc",
                "optimized_stderr",
                "uniform_objective",
                "optimized_objective",
            ]);
            for k in 1..=k_max {
                let cfg = base.with_k(k)?;
                let prog = HighSnrProgram::new(&cfg)?;
                let rep = crate::power::solve_high_snr_rayleigh(&prog)?;
                let uni = PowerVector::uniform(k, p)?;
                let eu = estimate_outage_single(&cfg, &uni, &opts)?;
                let eo = estimate_outage_single(&cfg, &rep.power, &opts)?;
                t.push(vec![
                    k.to_string(),
                    num(eu.p_hat),
                    num(eu.stderr),
                    num(eo.p_hat),
                    num(eo.stderr),
                    num(prog.objective(uni.as_slice())),
                    num(rep.objective),
                ]);
            }
            Output { table: t, plot: PlotSpec { x: 0, ys: vec![1, 3], group: None, log_y: true } }
        }
        4 => {
            let p = positive_f64("P", a.power.resolve(3.0))?;
            let mean = positive_f64("inv-lambda", a.inv_lambda.unwrap_or(4.0))?;
            let eta = a.eta.unwrap_or(0.3);
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(CliError::Usage(format!("--eta must lie in (0, 1], got {eta}")));
            }
            let k_max = positive_usize("K-max", a.k_max.unwrap_or(8))?;
            params.set("P", p);
            params.set("inv-lambda", mean);
            params.set("eta", eta);
            params.set("K-max", k_max);
            params.set("trials", opts.trials);
            params.set("seed", opts.seed);
            let t = capacity_table(
                &FadingModel::LogNormalStd,
                &AttackModel::with_mean(mean)?,
                p,
                eta,
                k_max,
                1e-3,
                Allocation::Both,
                &opts,
            )?;
            Output { table: t, plot: PlotSpec { x: 0, ys: vec![1, 2], group: None, log_y: false } }
        }
        5..=7 => {
            let ns: Vec<usize> = parse_list("N", a.n.as_deref().unwrap_or("10,25,50,100,150,200"))?;
            check_ns(&ns)?;
            let p = positive_f64("P", a.power.resolve(2.0))?;
            let k = positive_usize("K", a.k.unwrap_or(5))?;
            let mean = positive_f64("inv-lambda", a.inv_lambda.unwrap_or(5.0))?;
            let m = positive_usize("m", a.m.unwrap_or(1))?;
            let rho = a.rho.unwrap_or(0.8);
            if !(0.0..1.0).contains(&rho) {
                return Err(CliError::Usage(format!("--rho must lie in [0, 1), got {rho}")));
            }
            let rates: Vec<f64> = match (a.id, a.r) {
                (_, Some(r)) => vec![positive_f64("R", r)?],
                (7, None) => vec![0.5],
                _ => vec![0.5, 1.6],
            };
            params.set("N", join(&ns));
            params.set("P", p);
            params.set("K", k);
            params.set("inv-lambda", mean);
            if a.r.is_some() {
                params.set("R", rates[0]);
            }
            if a.id != 5 {
                params.set("m", m);
                params.set("rho", rho);
            }
            params.set("trials", opts.trials);
            params.set("seed", opts.seed);
            let attack = AttackModel::with_mean(mean)?;
            let mut t;
            match a.id {
                5 => {
                    t = CsvTable::new(&["R", "N", "mc_outage", "mc_stderr", "gaussian_approx", "realized_corr"]);
                    for &r in &rates {
                        let base = ParallelConfig::new(ns[0], k, p, r, 0, 0.0, rayleigh.clone(), attack.clone())?;
                        parallel_rows(&base, &ns, &opts, false, &mut t, &[num(r)])?;
                    }
                }
                6 => {
                    t = CsvTable::new(&[
                        "R",
                        "N",
                        "mdep_mc",
                        "mdep_stderr",
                        "mdep_gaussian",
                        "realized_corr",
                        "indep_mc",
                        "indep_stderr",
                        "indep_gaussian",
                    ]);
                    for &r in &rates {
                        let base = ParallelConfig::new(ns[0], k, p, r, m, rho, rayleigh.clone(), attack.clone())?;
                        let mut dep = CsvTable::new(&["R", "N", "a", "b", "c", "d"]);
                        parallel_rows(&base, &ns, &opts, true, &mut dep, &[num(r)])?;
                        let mut ind = CsvTable::new(&["R", "N", "a", "b", "c", "d"]);
                        parallel_rows(&base, &ns, &opts, false, &mut ind, &[num(r)])?;
                        for (d, i) in dep.rows.into_iter().zip(ind.rows) {
                            let mut row = d;
                            row.extend(i[2..5].iter().cloned());
                            t.push(row);
                        }
                    }
                }
                _ => {
                    t = CsvTable::new(&[
                        "N",
                        "indep_mc",
                        "indep_stderr",
                        "indep_gaussian",
                        "mdep_mc",
                        "mdep_stderr",
                        "mdep_gaussian",
                        "realized_corr",
                    ]);
                    let base = ParallelConfig::new(ns[0], k, p, rates[0], m, rho, rayleigh.clone(), attack.clone())?;
                    let mut ind = CsvTable::new(&["N", "a", "b", "c", "d"]);
                    parallel_rows(&base, &ns, &opts, false, &mut ind, &[])?;
                    let mut dep = CsvTable::new(&["N", "a", "b", "c", "d"]);
                    parallel_rows(&base, &ns, &opts, true, &mut dep, &[])?;
                    for (i, d) in ind.rows.into_iter().zip(dep.rows) {
                        let mut row = i[..4].to_vec();
                        row.extend(d[1..].iter().cloned());
                        t.push(row);
                    }
                }
            }
            let plot = match a.id {
                5 => PlotSpec { x: 1, ys: vec![2, 4], group: Some(0), log_y: false },
                6 => PlotSpec { x: 1, ys: vec![2, 4, 6, 8], group: Some(0), log_y: false },
                _ => PlotSpec { x: 0, ys: vec![1, 4], group: None, log_y: true },
            };
            Output { table: t, plot }
        }
        8 => {
            let k = positive_usize("K", a.k.unwrap_or(5))?;
            let m = positive_usize("m", a.m.unwrap_or(1))?;
            let rho = a.rho.unwrap_or(0.8);
            let means = match a.inv_lambda {
                Some(v) => vec![positive_f64("inv-lambda", v)?],
                None => vec![3.0, 5.0, 10.0],
            };
            params.set("K", k);
            params.set("m", m);
            params.set("rho", rho);
            if a.inv_lambda.is_some() {
                params.set("inv-lambda", means[0]);
            }
            let mut t = CsvTable::new(&[
                "inv_lambda",
                "t",
                "indep_ldp",
                "s_star",
                "indep_gaussian_bound",
                "mdep_gaussian_bound",
            ]);
            for &mean in &means {
                let attack = AttackModel::with_mean(mean)?;
                let mu = y_moments(&rayleigh, &attack, k)?.mean;
                // grid of t in steps of 0.05 strictly below the mean throughput
                let ts: Vec<f64> = (1..).map(|i| i as f64 * 0.05).take_while(|x| *x < mu - 1e-9).collect();
                exponent_rows(&rayleigh, &attack, k, m, rho, &ts, &mut t, &[num(mean)])?;
            }
            Output { table: t, plot: PlotSpec { x: 1, ys: vec![2, 5], group: Some(0), log_y: false } }
        }
        other => return Err(CliError::Usage(format!("figure id must be 1 to 8, got {other}"))),
    };
    Ok((params, out))
}

/// Parse a `key = value` file into `--key value` tokens, skipping keys set
/// on the command line (directly or through an alias).
fn config_tokens(path: &Path, given: &HashSet<String>) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected `key = value`", path.display(), no + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "config" {
            return Err(CliError::Usage(format!(
                "{}:{}: nested config files are not supported",
                path.display(),
                no + 1
            )));
        }
        let overridden =
            given.contains(key) || ALIASES.iter().any(|g| g.contains(&key) && g.iter().any(|k| given.contains(*k)));
        if overridden {
            continue;
        }
        if SWITCHES.contains(&key) {
            match value {
                "true" | "yes" | "1" => out.push(format!("--{key}")),
                "false" | "no" | "0" => {}
                _ => return Err(CliError::Usage(format!("key `{key}` takes true or false, got {value:?}"))),
            }
        } else {
            out.push(format!("--{key}"));
            out.push(value.to_string());
        }
    }
    Ok(out)
}

/// Splice config-file values in front of the command-line flags.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let pos = args.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(args) };
    let path = match args[pos].split_once('=') {
        Some((_, p)) => PathBuf::from(p),
        None => PathBuf::from(args.get(pos + 1).ok_or_else(|| CliError::Usage("--config needs a file".into()))?),
    };
    let given: HashSet<String> = args
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let tokens = config_tokens(&path, &given)?;
    // tokens go right after the subcommand name; `--config` implies it exists
    let mut out = args[..2].to_vec();
    out.extend(tokens);
    out.extend(args[2..].iter().cloned());
    Ok(out)
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::SingleBounds(a) => &a.output,
        Command::OptimalK(a) => &a.output,
        Command::PowerOpt(a) => &a.output,
        Command::Capacity(a) => &a.output,
        Command::Mc(a) => &a.output,
        Command::Parallel(a) => &a.output,
        Command::Exponent(a) => &a.output,
        Command::ReproduceFig(a) => &a.output,
    }
}

/// Run a command and return the rendered CSV without writing anything.
pub fn execute(args: Vec<String>) -> Result<String, CliError> {
    Ok(execute_inner(args)?.csv)
}

struct Rendered {
    csv: String,
    out: Option<PathBuf>,
    script: Option<(PathBuf, String)>,
}

fn execute_inner(args: Vec<String>) -> Result<Rendered, CliError> {
    let args = expand_config(args)?;
    let cli = Cli::try_parse_from(args).map_err(CliError::Clap)?;
    let oa = output_args(&cli.command).clone();
    if oa.gnuplot && oa.out.is_none() {
        return Err(CliError::Usage("--gnuplot needs --out".into()));
    }
    let (params, out) = match &cli.command {
        Command::SingleBounds(a) => cmd_single_bounds(a)?,
        Command::OptimalK(a) => cmd_optimal_k(a)?,
        Command::PowerOpt(a) => cmd_power_opt(a)?,
        Command::Capacity(a) => cmd_capacity(a)?,
        Command::Mc(a) => cmd_mc(a)?,
        Command::Parallel(a) => cmd_parallel(a)?,
        Command::Exponent(a) => cmd_exponent(a)?,
        Command::ReproduceFig(a) => cmd_figure(a)?,
    };
    let mut table = out.table;
    let mut meta = params.meta();
    meta.append(&mut table.meta);
    table.meta = meta;
    let csv = table.render();
    let script = oa.out.as_ref().filter(|_| oa.gnuplot).map(|p| {
        let gp = p.with_extension("gp");
        (gp, gnuplot_script(&table, p, &out.plot))
    });
    Ok(Rendered { csv, out: oa.out, script })
}

/// Entry point of the binary; returns the process exit code.
pub fn run<I: IntoIterator<Item = String>>(args: I) -> i32 {
    match execute_inner(args.into_iter().collect()) {
        Ok(Rendered { csv, out, script }) => {
            let written = match &out {
                Some(p) => std::fs::write(p, &csv).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => std::io::stdout().write_all(csv.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
            if let Some((gp, s)) = script {
                if let Err(e) = std::fs::write(&gp, s) {
                    eprintln!("error: cannot write {}: {e}", gp.display());
                    return EXIT_CONFIG;
                }
            }
            EXIT_OK
        }
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            CliError::Clap(e).exit_code()
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", if msg.starts_with("error") { msg } else { format!("error: {msg}") });
            e.exit_code()
        }
    }
}
