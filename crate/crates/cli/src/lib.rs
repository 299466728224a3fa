//! Argument model and command implementations for the `melonlab` binary.

use std::fmt::Write as _;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use melonlab::exact::{ExactDistribution, MelonCounter};
use melonlab::gauss::{kappa, moment_asymptotic, table1, tau};
use melonlab::limit::{convergence_report, LimitCurve, Stat};
use melonlab::{brute, MelonConfig, MelonError, StripBound};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use thiserror::Error;

mod number;

pub use number::format_sig;

/// Largest `p` for commands built on symbolic determinants.
pub const MAX_SYMBOLIC_P: usize = 6;
/// Largest `p` for exact counting.
pub const MAX_EXACT_P: usize = 20;
/// Largest `n` for exact counting and height laws.
pub const MAX_EXACT_N: usize = 5000;
/// Largest `n` for exact range laws, which cost `O(n²)` determinants.
pub const MAX_RANGE_N: usize = 1000;
/// Largest grid accepted by `limit` and `compare`.
pub const MAX_STEPS: usize = 10_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Capacity(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<MelonError> for CliError {
    fn from(e: MelonError) -> Self {
        match e {
            MelonError::Capacity { .. } => CliError::Capacity(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatArg {
    Height,
    Range,
}

impl From<StatArg> for Stat {
    fn from(s: StatArg) -> Stat {
        match s {
            StatArg::Height => Stat::Height,
            StatArg::Range => Stat::Range,
        }
    }
}

/// Exact and asymptotic statistics of p-watermelons.
#[derive(Debug, Parser)]
#[command(name = "melonlab", version)]
pub struct Cli {
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,

    /// Significant digits of decimal columns.
    #[arg(long, env = "MELONLAB_PRECISION", default_value_t = 12, global = true)]
    pub precision: usize,

    /// Print the κ_p and τ_p term lists as JSON on stderr.
    #[arg(long, global = true)]
    pub dump_symbolic: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Shape {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct Grid {
    #[arg(long, default_value_t = 0.1)]
    pub t_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 39)]
    pub steps: usize,
    /// Truncation and quadrature tolerance of the limit laws.
    #[arg(long, default_value_t = 1e-10)]
    pub eps: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Number of watermelons, optionally inside a strip.
    Count {
        #[command(flatten)]
        shape: Shape,
        /// Only count height < H.
        #[arg(long, value_name = "H", allow_negative_numbers = true)]
        height_lt: Option<i64>,
        /// Only count depth > D.
        #[arg(long, value_name = "D", allow_negative_numbers = true)]
        depth_gt: Option<i64>,
    },
    /// Exact probability mass function.
    Pmf {
        #[arg(long, value_enum)]
        stat: StatArg,
        #[command(flatten)]
        shape: Shape,
    },
    /// Exact cumulative distribution function.
    Cdf {
        #[arg(long, value_enum)]
        stat: StatArg,
        #[command(flatten)]
        shape: Shape,
    },
    /// Exact height moments, optionally with their two-term asymptotics.
    Moments {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 3)]
        s_max: u32,
        #[arg(long)]
        asymptotic: bool,
    },
    /// Sampled limiting CDF of (stat+1)/√n.
    Limit {
        #[arg(long, value_enum)]
        stat: StatArg,
        #[arg(long)]
        p: usize,
        #[command(flatten)]
        grid: Grid,
    },
    /// Exact CDF of (stat+1)/√n next to its limit.
    Compare {
        #[arg(long, value_enum)]
        stat: StatArg,
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        grid: Grid,
    },
    /// Leading moment coefficients s·Ξ₁(κ_p h^{s-1}) for p ≤ 4, s ≤ 3.
    Table1,
    /// Joint height/depth counts by exhaustive enumeration.
    Brute {
        #[command(flatten)]
        shape: Shape,
    },
}

/// One output cell. Decimals are stored already formatted.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Index-like integer, a JSON number.
    Small(i64),
    /// Count, a JSON string since it may exceed every machine integer.
    Int(BigInt),
    Text(String),
    Real(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Small(i) => i.to_string(),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(s) | Cell::Real(s) => s.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Array of row objects. Counts and fractions are strings, indices and decimals numbers.
    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (key, cell) in self.header.iter().zip(row) {
                    let v = match cell {
                        Cell::Small(i) => Value::from(*i),
                        Cell::Int(i) => Value::String(i.to_string()),
                        Cell::Text(s) => Value::String(s.clone()),
                        Cell::Real(s) => real_json(s),
                    };
                    obj.insert((*key).to_string(), v);
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

fn real_json(s: &str) -> Value {
    s.parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(s.to_string()))
}

struct Ctx {
    precision: usize,
}

impl Ctx {
    fn real(&self, x: f64) -> Cell {
        Cell::Real(format_sig(x, self.precision))
    }

    fn fraction(&self, q: &BigRational) -> [Cell; 2] {
        [
            Cell::Text(fraction_text(q)),
            self.real(q.to_f64().unwrap_or(f64::NAN)),
        ]
    }
}

fn fraction_text(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn capacity(what: &str, requested: usize, limit: usize) -> CliError {
    CliError::Capacity(format!("{what}: {requested} exceeds the supported limit of {limit}"))
}

fn check_shape(shape: &Shape, max_n: usize) -> CliResult<MelonConfig> {
    if shape.p == 0 {
        return Err(invalid("--p must be at least 1"));
    }
    if shape.p > MAX_EXACT_P {
        return Err(capacity("--p", shape.p, MAX_EXACT_P));
    }
    if shape.n > max_n {
        return Err(capacity("--n", shape.n, max_n));
    }
    Ok(MelonConfig::new(shape.p, shape.n)?)
}

fn check_law_shape(stat: StatArg, shape: &Shape) -> CliResult<MelonConfig> {
    if shape.n == 0 {
        return Err(invalid("--n must be at least 1 for distributions"));
    }
    check_shape(
        shape,
        match stat {
            StatArg::Height => MAX_EXACT_N,
            StatArg::Range => MAX_RANGE_N,
        },
    )
}

fn check_symbolic_p(p: usize) -> CliResult<()> {
    if p == 0 {
        return Err(invalid("--p must be at least 1"));
    }
    if p > MAX_SYMBOLIC_P {
        return Err(capacity("--p for symbolic commands", p, MAX_SYMBOLIC_P));
    }
    Ok(())
}

fn check_grid(grid: &Grid) -> CliResult<()> {
    if !(grid.t_min > 0.0 && grid.t_min.is_finite()) {
        return Err(invalid("--t-min must be positive"));
    }
    if !(grid.t_max >= grid.t_min && grid.t_max.is_finite()) {
        return Err(invalid("--t-max must be finite and at least --t-min"));
    }
    if grid.steps == 0 && grid.t_max > grid.t_min {
        return Err(invalid("--steps must be positive"));
    }
    if grid.steps > MAX_STEPS {
        return Err(capacity("--steps", grid.steps, MAX_STEPS));
    }
    if !(grid.eps > 0.0 && grid.eps < 1.0) {
        return Err(invalid("--eps must lie in (0, 1)"));
    }
    Ok(())
}

fn grid_points(grid: &Grid) -> Vec<f64> {
    let step = if grid.steps == 0 {
        0.0
    } else {
        (grid.t_max - grid.t_min) / grid.steps as f64
    };
    (0..=grid.steps)
        .map(|i| grid.t_min + step * i as f64)
        .collect()
}

/// The `p` a command works with, if any.
fn command_p(cmd: &Command) -> Option<usize> {
    match cmd {
        Command::Count { shape, .. }
        | Command::Pmf { shape, .. }
        | Command::Cdf { shape, .. }
        | Command::Moments { shape, .. }
        | Command::Compare { shape, .. }
        | Command::Brute { shape } => Some(shape.p),
        Command::Limit { p, .. } => Some(*p),
        Command::Table1 => None,
    }
}

/// Checks every flag without computing anything.
pub fn validate(cli: &Cli) -> CliResult<()> {
    if !(1..=17).contains(&cli.precision) {
        return Err(invalid("--precision must lie in 1..=17"));
    }
    if cli.dump_symbolic {
        match command_p(&cli.command) {
            Some(p) => check_symbolic_p(p)?,
            None => return Err(invalid("--dump-symbolic needs a command with --p")),
        }
    }
    match &cli.command {
        Command::Count { shape, .. } => {
            check_shape(shape, MAX_EXACT_N)?;
        }
        Command::Pmf { stat, shape } | Command::Cdf { stat, shape } => {
            check_law_shape(*stat, shape)?;
        }
        Command::Moments {
            shape,
            s_max,
            asymptotic,
        } => {
            check_shape(shape, MAX_EXACT_N)?;
            if *s_max == 0 || *s_max > 12 {
                return Err(invalid("--s-max must lie in 1..=12"));
            }
            if *asymptotic {
                check_symbolic_p(shape.p)?;
                if shape.n == 0 {
                    return Err(invalid("--asymptotic needs --n at least 1"));
                }
            }
        }
        Command::Limit { p, grid, .. } => {
            check_symbolic_p(*p)?;
            check_grid(grid)?;
        }
        Command::Compare { stat, shape, grid } => {
            check_symbolic_p(shape.p)?;
            check_law_shape(*stat, shape)?;
            check_grid(grid)?;
        }
        Command::Table1 => {}
        Command::Brute { shape } => {
            check_shape(shape, MAX_EXACT_N)?;
            let cells = shape.p * 2 * shape.n;
            if cells > brute::MAX_CELLS {
                return Err(capacity("p*2n for enumeration", cells, brute::MAX_CELLS));
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and validates them.
pub fn parse_and_validate<I, T>(args: I) -> CliResult<Cli>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| invalid(e.to_string()))?;
    validate(&cli)?;
    Ok(cli)
}

/// JSON object with the term lists of `κ_p` and `τ_p`.
pub fn symbolic_dump(p: usize) -> CliResult<Value> {
    check_symbolic_p(p)?;
    let parse = |s: String| serde_json::from_str::<Value>(&s).expect("term list is valid JSON");
    Ok(json!({
        "p": p,
        "kappa": parse(kappa(p)?.to_json()),
        "tau": parse(tau(p)?.to_json()),
    }))
}

fn law(stat: StatArg, cfg: MelonConfig) -> CliResult<ExactDistribution> {
    let counter = MelonCounter::new(cfg);
    Ok(match stat {
        StatArg::Height => counter.height_distribution()?,
        StatArg::Range => counter.range_distribution()?,
    })
}

fn count(shape: &Shape, height_lt: Option<i64>, depth_gt: Option<i64>) -> CliResult<Output> {
    let cfg = check_shape(shape, MAX_EXACT_N)?;
    let counter = MelonCounter::new(cfg);
    let value = match (height_lt, depth_gt) {
        (None, None) => counter.total(),
        (Some(h), None) => counter.height_lt(h),
        (h, Some(d)) => {
            // a ceiling above every path is the same as none
            let h = h.unwrap_or(cfg.max_height() + 1);
            counter.strip(StripBound::new(h, d.saturating_neg()))
        }
    };
    Ok(Output::Scalar {
        json: json!({
            "p": shape.p,
            "n": shape.n,
            "height_lt": height_lt,
            "depth_gt": depth_gt,
            "count": value.to_string(),
        }),
        text: value.to_string(),
    })
}

fn pmf(ctx: &Ctx, stat: StatArg, shape: &Shape) -> CliResult<Table> {
    let d = law(stat, check_law_shape(stat, shape)?)?;
    let mut t = Table::new(vec!["value", "count", "probability", "decimal"]);
    for ((v, c), m) in d.support().iter().zip(d.counts()).zip(d.masses()) {
        let [frac, dec] = ctx.fraction(&m);
        t.rows.push(vec![Cell::Small(*v), Cell::Int(c.clone()), frac, dec]);
    }
    Ok(t)
}

fn cdf(ctx: &Ctx, stat: StatArg, shape: &Shape) -> CliResult<Table> {
    let d = law(stat, check_law_shape(stat, shape)?)?;
    let mut t = Table::new(vec!["value", "count", "probability", "decimal"]);
    for ((v, c), q) in d.support().iter().zip(d.cdf_counts()).zip(d.cdf()) {
        let [frac, dec] = ctx.fraction(&q);
        t.rows.push(vec![Cell::Small(*v), Cell::Int(c), frac, dec]);
    }
    Ok(t)
}

fn moments(ctx: &Ctx, shape: &Shape, s_max: u32, asymptotic: bool) -> CliResult<Table> {
    let cfg = check_shape(shape, MAX_EXACT_N)?;
    let counter = MelonCounter::new(cfg);
    let mut header = vec!["s", "exact", "decimal"];
    if asymptotic {
        header.extend(["asymptotic", "abs_err"]);
    }
    let mut t = Table::new(header);
    for s in 1..=s_max {
        let exact = counter.height_moment(s)?;
        let [frac, dec] = ctx.fraction(&exact);
        let mut row = vec![Cell::Small(s.into()), frac, dec];
        if asymptotic {
            let a = moment_asymptotic(shape.p, s, shape.n as u64)?;
            let e = exact.to_f64().unwrap_or(f64::NAN);
            row.push(ctx.real(a));
            row.push(ctx.real((e - a).abs()));
        }
        t.rows.push(row);
    }
    Ok(t)
}

fn limit(ctx: &Ctx, stat: StatArg, p: usize, grid: &Grid) -> CliResult<Output> {
    check_symbolic_p(p)?;
    check_grid(grid)?;
    let curve = LimitCurve::sample(stat.into(), p, grid.t_min, grid.t_max, grid.steps, grid.eps)?;
    let mut t = Table::new(vec!["t", "cdf"]);
    for &(x, f) in &curve.points {
        t.rows.push(vec![ctx.real(x), ctx.real(f)]);
    }
    let meta = json!({
        "stat": curve.stat,
        "p": curve.p,
        "truncation_eps": curve.truncation_eps,
        "quad_tol": curve.quad_tol,
    });
    Ok(Output::Curve { table: t, meta })
}

fn compare(ctx: &Ctx, stat: StatArg, shape: &Shape, grid: &Grid) -> CliResult<Table> {
    check_symbolic_p(shape.p)?;
    check_law_shape(stat, shape)?;
    check_grid(grid)?;
    let rows = convergence_report(stat.into(), shape.p, shape.n, &grid_points(grid), grid.eps)?;
    let mut t = Table::new(vec!["t", "exact", "limit", "abs_err"]);
    for r in rows {
        t.rows.push(vec![ctx.real(r.t), ctx.real(r.exact), ctx.real(r.limit), ctx.real(r.abs_err)]);
    }
    Ok(t)
}

fn table_one(ctx: &Ctx) -> CliResult<Table> {
    let mut t = Table::new(vec!["p", "s", "exact", "decimal"]);
    for e in table1()? {
        t.rows.push(vec![
            Cell::Small(e.p as i64),
            Cell::Small(e.s.into()),
            Cell::Text(e.value.to_string()),
            ctx.real(e.value.to_f64()),
        ]);
    }
    Ok(t)
}

fn brute_table(shape: &Shape) -> CliResult<Table> {
    let cfg = check_shape(shape, MAX_EXACT_N)?;
    let stats = brute::stats(&cfg)?;
    let mut t = Table::new(vec!["height", "depth", "count"]);
    for (&(h, d), &c) in stats.joint() {
        t.rows.push(vec![Cell::Small(h), Cell::Small(d), Cell::Int(c.into())]);
    }
    Ok(t)
}

enum Output {
    Scalar { json: Value, text: String },
    Table(Table),
    Curve { table: Table, meta: Value },
}

/// Runs the command and returns the rendered output.
pub fn render(cli: &Cli) -> CliResult<String> {
    validate(cli)?;
    let ctx = Ctx {
        precision: cli.precision,
    };
    let out = match &cli.command {
        Command::Count {
            shape,
            height_lt,
            depth_gt,
        } => count(shape, *height_lt, *depth_gt)?,
        Command::Pmf { stat, shape } => Output::Table(pmf(&ctx, *stat, shape)?),
        Command::Cdf { stat, shape } => Output::Table(cdf(&ctx, *stat, shape)?),
        Command::Moments {
            shape,
            s_max,
            asymptotic,
        } => Output::Table(moments(&ctx, shape, *s_max, *asymptotic)?),
        Command::Limit { stat, p, grid } => limit(&ctx, *stat, *p, grid)?,
        Command::Compare { stat, shape, grid } => Output::Table(compare(&ctx, *stat, shape, grid)?),
        Command::Table1 => Output::Table(table_one(&ctx)?),
        Command::Brute { shape } => Output::Table(brute_table(shape)?),
    };
    Ok(match (out, cli.format) {
        (Output::Scalar { text, .. }, Format::Csv) => format!("{text}\n"),
        (Output::Scalar { json, .. }, Format::Json) => format!("{json}\n"),
        (Output::Table(t), Format::Csv) | (Output::Curve { table: t, .. }, Format::Csv) => t.to_csv(),
        (Output::Table(t), Format::Json) => format!("{}\n", t.to_json()),
        (Output::Curve { table, meta }, Format::Json) => {
            let mut obj = meta;
            obj["points"] = table.to_json();
            format!("{obj}\n")
        }
    })
}

/// Runs the command, writing to `--out` or `stdout` and the symbolic dump to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let text = render(cli)?;
    if cli.dump_symbolic {
        let p = command_p(&cli.command).expect("validated");
        writeln!(stderr, "{}", symbolic_dump(p)?)?;
    }
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}
