//! `mdecs`: single-point evaluation, figure datasets, optimization and
//! oracle checks from the command line.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mdecs::approx::{fit_d_prime, FitPoint};
use mdecs::exact::DEFAULT_EXACT_LIMIT;
use mdecs::experiments::{evaluate_point, optimize_global, Figure, MethodChoice, SweepRange, SweepRecord, DEFAULT_POINTS};
use mdecs::fock::compare_with_exact;
use mdecs::params::alpha_from_delta;
use mdecs::{Error, ExactConfig, SystemParams};

use config::{flag_name, parse_list, parse_pair, Either, Settings};
use output::{Cell, Format, Table};

pub const EXACT_LIMIT_ENV: &str = "ECS_EXACT_LIMIT";
const ORACLE_MAX_M: usize = 5;
const ORACLE_MAX_ALPHA2: f64 = 4.0;
const ORACLE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("exact and oracle differ by {difference:.3e} > {tolerance:e}")]
    OracleMismatch { difference: f64, tolerance: f64 },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 4,
            CliError::OracleMismatch { .. } => 1,
            CliError::Core(e) => match e {
                Error::InvalidParameter { .. } | Error::DegenerateGrid { .. } => 2,
                Error::SizeLimit { .. } => 3,
                Error::MonotoneEdge { .. } => 5,
                Error::Truncation { .. } => 6,
                _ => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(Error::InvalidParameter { name, reason }) => format!("{}: {reason}", flag_name(name)),
            CliError::Core(Error::SizeLimit { m, limit }) => format!(
                "--m {m} exceeds the exact-method limit M <= {limit}; use --method approx or raise {EXACT_LIMIT_ENV}"
            ),
            CliError::Core(Error::MonotoneEdge { edge, lo, hi }) => format!(
                "no interior optimum: E_N is largest at the {edge} edge of |alpha|^2 in [{lo}, {hi}]"
            ),
            other => other.to_string(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "mdecs", version, about = "Logarithmic negativity of M-branch entangled coherent states under photon loss")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// key=value file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write here instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Omit the timestamp header
    #[arg(long)]
    no_meta: bool,
}

#[derive(Args, Debug, Clone)]
struct Loss {
    /// Surviving photon fraction
    #[arg(long, conflicts_with = "epsilon")]
    eta: Option<f64>,
    /// Lost photon fraction, 1 - eta
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct Amplitude {
    /// Mean photon number per branch
    #[arg(long, conflicts_with = "delta")]
    alpha2: Option<f64>,
    /// Adjacent-branch overlap; fixes |alpha|^2 through M
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Approx,
    Auto,
}

impl MethodArg {
    fn choice(self) -> MethodChoice {
        match self {
            MethodArg::Exact => MethodChoice::Exact,
            MethodArg::Approx => MethodChoice::Approx,
            MethodArg::Auto => MethodChoice::Auto,
        }
    }
}

impl std::fmt::Display for MethodArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

impl std::str::FromStr for MethodArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl FigureArg {
    fn figure(self) -> Figure {
        match self {
            FigureArg::Fig1 => Figure::Fig1,
            FigureArg::Fig2 => Figure::Fig2,
            FigureArg::Fig3 => Figure::Fig3,
            FigureArg::Fig4 => Figure::Fig4,
            FigureArg::Fig5 => Figure::Fig5,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate E_N at one parameter point
    Compute {
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        loss: Loss,
        #[command(flatten)]
        amplitude: Amplitude,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[command(flatten)]
        common: Common,
    },
    /// Regenerate a figure dataset
    Figure {
        #[arg(value_enum)]
        name: FigureArg,
        /// Samples per curve
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Maximize E_N over |alpha|^2, for one M or a range lo:hi
    Optimize {
        #[command(flatten)]
        loss: Loss,
        #[arg(long, conflicts_with = "m_range")]
        m: Option<usize>,
        #[arg(long)]
        m_range: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the exact pipeline with the Fock-basis oracle
    OracleCheck {
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        loss: Loss,
        #[command(flatten)]
        amplitude: Amplitude,
        /// Fock truncation per mode
        #[arg(long)]
        n_max: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Fit D' of the cutoff estimate to the F-sum
    FitDprime {
        /// Comma-separated M values
        #[arg(long)]
        m_list: Option<String>,
        /// Comma-separated delta values
        #[arg(long)]
        delta_list: Option<String>,
        /// lo:hi:points, log-spaced
        #[arg(long)]
        epsilon_range: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Compute { .. } => "compute",
            Command::Figure { .. } => "figure",
            Command::Optimize { .. } => "optimize",
            Command::OracleCheck { .. } => "oracle-check",
            Command::FitDprime { .. } => "fit-dprime",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Compute { common, .. }
            | Command::Figure { common, .. }
            | Command::Optimize { common, .. }
            | Command::OracleCheck { common, .. }
            | Command::FitDprime { common, .. } => common,
        }
    }
}

struct Outcome {
    table: Table,
    /// Set when the run completed but the command reports failure.
    failure: Option<CliError>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self { table, failure: None }
    }
}

fn exact_config(s: &mut Settings) -> Result<ExactConfig, CliError> {
    let limit = match std::env::var(EXACT_LIMIT_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{EXACT_LIMIT_ENV}: expected a positive integer, got {v:?}")))?,
        Err(_) => DEFAULT_EXACT_LIMIT,
    };
    if limit < 2 {
        return Err(CliError::Usage(format!("{EXACT_LIMIT_ENV} must be at least 2")));
    }
    if limit != DEFAULT_EXACT_LIMIT {
        s.record("exact_limit", limit);
    }
    Ok(ExactConfig::with_max_m(limit))
}

fn resolve_eta(s: &mut Settings, loss: &Loss) -> Result<f64, CliError> {
    match s.either(("eta", loss.eta), ("epsilon", loss.epsilon))? {
        Some(Either::First(eta)) => Ok(eta),
        Some(Either::Second(eps)) => Ok(1.0 - eps),
        None => Err(CliError::Usage("missing required --eta or --epsilon".into())),
    }
}

fn resolve_alpha2(s: &mut Settings, amp: &Amplitude, m: usize) -> Result<f64, CliError> {
    match s.either(("alpha2", amp.alpha2), ("delta", amp.delta))? {
        Some(Either::First(a2)) => Ok(a2),
        Some(Either::Second(delta)) => Ok(alpha_from_delta(delta, m)?),
        None => Err(CliError::Usage("missing required --alpha2 or --delta".into())),
    }
}

const RECORD_COLUMNS: &[&str] = &[
    "m", "alpha2", "eta", "epsilon", "delta", "delta_n", "e_n", "delta_e_n", "rate", "method",
];

fn record_row(r: &SweepRecord) -> Vec<Cell> {
    vec![
        r.m.into(),
        r.alpha2.into(),
        r.eta.into(),
        r.epsilon.into(),
        r.delta.into(),
        r.delta_n.into(),
        r.e_n.into(),
        r.delta_e_n.into(),
        r.rate.into(),
        r.method.as_str().into(),
    ]
}

fn records_table(records: &[SweepRecord]) -> Table {
    let mut t = Table::new(RECORD_COLUMNS);
    for r in records {
        t.push(record_row(r));
    }
    t
}

fn compute(s: &mut Settings, m: Option<usize>, loss: &Loss, amp: &Amplitude, method: Option<MethodArg>) -> Result<Outcome, CliError> {
    let m = s.require("m", m)?;
    let method = s.get("method", method)?.unwrap_or(MethodArg::Auto);
    let cfg = exact_config(s)?;
    // Refuse oversize exact runs before asking for anything else.
    let resolved = method.choice().resolve(m, &cfg)?;
    let eta = resolve_eta(s, loss)?;
    let alpha2 = resolve_alpha2(s, amp, m)?;
    let r = evaluate_point(m, alpha2, eta, resolved, true, &cfg)?;
    Ok(records_table(&[r]).into())
}

fn figure(s: &mut Settings, name: FigureArg, points: Option<usize>) -> Result<Outcome, CliError> {
    let fig = name.figure();
    s.record("figure", fig.name());
    let points = s.get("points", points)?.unwrap_or(DEFAULT_POINTS);
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let cfg = exact_config(s)?;
    Ok(records_table(&fig.records(points, &cfg)?).into())
}

fn optimize(s: &mut Settings, loss: &Loss, m: Option<usize>, m_range: Option<String>) -> Result<Outcome, CliError> {
    let eta = resolve_eta(s, loss)?;
    let range = match s.either(("m", m.map(|m| m.to_string())), ("m_range", m_range))? {
        Some(Either::First(v)) => {
            let m = v.trim().parse().map_err(|_| CliError::Usage(format!("--m: cannot parse {v:?}")))?;
            (m, m)
        }
        Some(Either::Second(v)) => parse_pair::<usize>("m_range", &v)?,
        None => {
            s.record("m_range", "2:12");
            (2, 12)
        }
    };
    if range.0 < 2 || range.0 > range.1 {
        return Err(CliError::Usage(format!("--m-range: need 2 <= lo <= hi, got {}:{}", range.0, range.1)));
    }
    let cfg = exact_config(s)?;
    let global = optimize_global(eta, range.0..=range.1, &cfg)?;
    let mut t = Table::new(&["m", "eta", "alpha2_opt", "e_n_opt", "delta_at_opt", "best"]);
    for o in &global.per_m {
        t.push(vec![o.m.into(), o.eta.into(), o.alpha2.into(), o.e_n.into(), o.delta.into(), (o.m == global.best.m).into()]);
    }
    Ok(t.into())
}

fn oracle_check(s: &mut Settings, m: Option<usize>, loss: &Loss, amp: &Amplitude, n_max: Option<usize>) -> Result<Outcome, CliError> {
    let m = s.require("m", m)?;
    if m > ORACLE_MAX_M {
        return Err(CliError::Usage(format!("--m {m} is outside the oracle envelope (M <= {ORACLE_MAX_M})")));
    }
    let eta = resolve_eta(s, loss)?;
    let alpha2 = resolve_alpha2(s, amp, m)?;
    if alpha2 > ORACLE_MAX_ALPHA2 {
        return Err(CliError::Usage(format!(
            "--alpha2 {alpha2} is outside the oracle envelope (|alpha|^2 <= {ORACLE_MAX_ALPHA2})"
        )));
    }
    let n_max = s.get("n_max", n_max)?;
    let cfg = exact_config(s)?;
    let p = SystemParams::from_alpha2(alpha2, m, eta)?;
    let cmp = compare_with_exact(&p, n_max, &cfg)?;
    let diff = cmp.difference();
    let mut t = Table::new(&["m", "alpha2", "eta", "n_max", "exact", "oracle", "difference", "pass"]);
    t.push(vec![
        m.into(),
        alpha2.into(),
        eta.into(),
        cmp.n_max.into(),
        cmp.exact.into(),
        cmp.oracle.into(),
        diff.into(),
        (diff <= ORACLE_TOLERANCE).into(),
    ]);
    let failure = (diff > ORACLE_TOLERANCE).then_some(CliError::OracleMismatch {
        difference: diff,
        tolerance: ORACLE_TOLERANCE,
    });
    Ok(Outcome { table: t, failure })
}

/// Defaults reproduce the large-loss regime grid.
fn fit_grid(s: &mut Settings, m_list: Option<String>, delta_list: Option<String>, eps_range: Option<String>) -> Result<Vec<FitPoint>, CliError> {
    let m_list = s.get("m_list", m_list)?.unwrap_or_else(|| "20,200,2000,20000".into());
    let delta_list = s.get("delta_list", delta_list)?.unwrap_or_else(|| "0.01,0.0001".into());
    let eps_range = s.get("epsilon_range", eps_range)?.unwrap_or_else(|| "0.001:0.5:21".into());
    let ms: Vec<usize> = parse_list("m_list", &m_list)?;
    let deltas: Vec<f64> = parse_list("delta_list", &delta_list)?;
    let parts: Vec<&str> = eps_range.split(':').collect();
    let bad = || CliError::Usage(format!("--epsilon-range: expected lo:hi:points, got {eps_range:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    let eps = SweepRange::log10(lo, hi, n).values()?;
    let mut grid = Vec::new();
    for &delta in &deltas {
        for &m in &ms {
            for &epsilon in &eps {
                grid.push(FitPoint { epsilon, delta, m });
            }
        }
    }
    Ok(grid)
}

fn fit_dprime_cmd(s: &mut Settings, m_list: Option<String>, delta_list: Option<String>, eps_range: Option<String>) -> Result<Outcome, CliError> {
    let grid = fit_grid(s, m_list, delta_list, eps_range)?;
    let d = fit_d_prime(&grid)?;
    let mut t = Table::new(&["d_prime", "points"]);
    t.push(vec![d.into(), grid.len().into()]);
    Ok(t.into())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = cli.command.common().clone();
    let mut s = Settings::load(common.config.as_deref())?;
    let format = s.get("format", common.format)?.unwrap_or(Format::Csv);
    let output = match common.output {
        Some(p) => Some(p),
        None => s.get::<String>("output", None)?.map(PathBuf::from),
    };
    let no_meta = common.no_meta || s.get::<bool>("no_meta", None)?.unwrap_or(false);
    let threads = s.get("threads", common.threads)?;
    // Execution knobs do not belong in the echoed configuration.
    s.clear_echo();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    s.record("command", cli.command.name());

    let outcome = match cli.command {
        Command::Compute { m, loss, amplitude, method, .. } => compute(&mut s, m, &loss, &amplitude, method)?,
        Command::Figure { name, points, .. } => figure(&mut s, name, points)?,
        Command::Optimize { loss, m, m_range, .. } => optimize(&mut s, &loss, m, m_range)?,
        Command::OracleCheck { m, loss, amplitude, n_max, .. } => oracle_check(&mut s, m, &loss, &amplitude, n_max)?,
        Command::FitDprime { m_list, delta_list, epsilon_range, .. } => fit_dprime_cmd(&mut s, m_list, delta_list, epsilon_range)?,
    };

    let timestamp = (!no_meta).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let text = outcome.table.render(format, s.echo(), timestamp);
    output::write(&text, output.as_deref())?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
