//! Command-line front end.
//!
//! Exit codes: 0 on success (or a PASS / INCONCLUSIVE trend), 2 on a FAIL
//! trend or failed verify suite, 1 on usage and runtime errors. Every argument
//! is validated before any computation starts.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::arith::{self, Lattice, WeightSpec};
use crate::engine::{pow10_ladder, Mode, SumEngine, Value, MAX_EXACT_X, MAX_FLOAT_X};
use crate::error::{Error, Result};
use crate::factor::{classify, FactorTable, SegmentedSieve, TrialDivision, DEFAULT_SEGMENT_SIZE};
use crate::prime_set::{empirical_density, PrimeSet};
use crate::rational::{to_fraction_string, Rational};
use crate::report::{analyze_against, DualityReport, Format, TargetSource, Verdict};
use crate::verify::{run_suite, SUITES};

/// Environment variable naming the directory of SPF cache files.
pub const CACHE_ENV: &str = "ALLADI_CACHE";

#[derive(Debug, Parser)]
#[command(
    name = "alladi",
    version,
    about = "Checks Alladi-type prime density sums numerically"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Float,
    Exact,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Checkpoint ladder end; scientific notation is floored (`1e7`)
    #[arg(long)]
    xmax: Option<String>,
    /// `pow10` or a comma list of x values
    #[arg(long, default_value = "pow10")]
    checkpoints: String,
    #[arg(long, value_enum, default_value = "float")]
    mode: ModeArg,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEGMENT_SIZE)]
    segment_size: usize,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Trailing checkpoint steps checked for decay
    #[arg(long, default_value_t = 3)]
    window: usize,
    /// Extra `log10_x,abs_error` CSV for plotting
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// C * sum_{n <= x, p(n) in S} w(n) against delta(S)
    Sum {
        #[arg(long)]
        weight: String,
        #[arg(long)]
        set: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Both sides of the duality: the weighted p(n) sum and P(n) counts
    Duality {
        #[arg(long)]
        set: String,
        #[arg(long, default_value = "mu/n")]
        weight: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Identity suites; one PASS/FAIL line each
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Builds an SPF table and writes it as a cache file
    Sieve {
        #[arg(long)]
        limit: String,
        /// Defaults to `$ALLADI_CACHE/spf-<limit>.alsv`
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluates one arithmetic function
    Eval {
        /// classify, sigma, psi, ramanujan, r4, r8 or theta
        function: String,
        n: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long, default_value = "e8")]
        lattice: String,
    },
    /// R(x, y) = sum_{n <= x, p(n) > y} mu(n) / n
    Rsum {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
    },
}

/// Parses `12345`, `1e7` or `2.5e6`, flooring non-integers.
pub fn parse_count(s: &str) -> Result<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let bad = || Error::Parse(format!("not a count: \"{s}\""));
    let v: f64 = s.parse().map_err(|_| bad())?;
    if !v.is_finite() || v < 0.0 || v >= u64::MAX as f64 {
        return Err(bad());
    }
    Ok(v.floor() as u64)
}

fn parse_checkpoints(spec: &str, xmax: Option<u64>) -> Result<Vec<u64>> {
    if spec == "pow10" {
        return Ok(pow10_ladder(xmax.unwrap_or(1_000_000)));
    }
    let xs = spec
        .split(',')
        .map(|t| parse_count(t.trim()))
        .collect::<Result<Vec<u64>>>()?;
    if let (Some(x), Some(&last)) = (xmax, xs.last()) {
        if x != last {
            return Err(Error::Parse(format!(
                "--xmax {x} disagrees with last checkpoint {last}"
            )));
        }
    }
    Ok(xs)
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Float => Mode::Float,
        ModeArg::Exact => Mode::Exact,
    }
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

/// Everything a series run needs, validated up front.
struct Plan {
    engine: SumEngine,
    checkpoints: Vec<u64>,
    mode: Mode,
    format: Format,
    window: usize,
    out: Option<PathBuf>,
    plot: Option<PathBuf>,
}

impl Plan {
    fn new(run: &RunArgs) -> Result<Self> {
        let xmax = run.xmax.as_deref().map(parse_count).transpose()?;
        let checkpoints = parse_checkpoints(&run.checkpoints, xmax)?;
        let mode = mode_of(run.mode);
        if checkpoints.is_empty()
            || checkpoints[0] == 0
            || checkpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::Parse(
                "checkpoints must be positive and strictly ascending".into(),
            ));
        }
        let cap = match mode {
            Mode::Float => MAX_FLOAT_X,
            Mode::Exact => MAX_EXACT_X,
        };
        let last = *checkpoints.last().expect("non-empty");
        if last > cap {
            return Err(Error::Capacity(format!(
                "{mode} mode supports x <= {cap}, got {last}"
            )));
        }
        if run.window == 0 {
            return Err(Error::Parse("--window must be >= 1".into()));
        }
        let engine = match run.threads {
            Some(t) => SumEngine::new(t, run.segment_size)?,
            None => SumEngine::new(SumEngine::default().threads(), run.segment_size)?,
        };
        Ok(Plan {
            engine,
            checkpoints,
            mode,
            format: format_of(run.format),
            window: run.window,
            out: run.out.clone(),
            plot: run.plot.clone(),
        })
    }

    fn x_max(&self) -> u64 {
        *self.checkpoints.last().expect("non-empty")
    }

    /// Analytic density, or the empirical one at the largest checkpoint.
    fn target(&self, set: &PrimeSet) -> Result<(Option<Rational>, TargetSource)> {
        if let Some(d) = set.analytic_density() {
            return Ok((Some(d), TargetSource::Analytic));
        }
        let x = self.x_max();
        if x < 2 {
            return Ok((None, TargetSource::None));
        }
        let c = empirical_density(set, x, &SegmentedSieve::new(x + 1))?;
        Ok((
            Some(Rational::from((c.in_set, c.total))),
            TargetSource::Empirical,
        ))
    }

    fn write(
        &self,
        stdout: &mut dyn Write,
        emit: impl FnOnce(&mut dyn Write) -> Result<()>,
    ) -> Result<()> {
        match &self.out {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                emit(&mut w)?;
                w.flush()?;
                Ok(())
            }
            None => emit(stdout),
        }
    }
}

fn exit_for(v: Verdict) -> i32 {
    match v {
        Verdict::Fail => 2,
        Verdict::Pass | Verdict::Inconclusive => 0,
    }
}

fn cmd_sum(
    weight: &str,
    set: &str,
    run: &RunArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let weight: WeightSpec = weight.parse()?;
    let set: PrimeSet = set.parse()?;
    let plan = Plan::new(run)?;
    let (target, source) = plan.target(&set)?;

    let start = Instant::now();
    let series = plan
        .engine
        .alladi_series(&weight, &set, &plan.checkpoints, plan.mode)?;
    let report = analyze_against(&series, plan.window, target, source)?;
    let elapsed = start.elapsed().as_secs_f64();

    plan.write(out, |w| report.emit(plan.format, w))?;
    if let Some(path) = &plan.plot {
        report.write_plot_csv(BufWriter::new(File::create(path)?))?;
    }
    writeln!(
        err,
        "{weight} over {set}: trend {} final_error {} ({elapsed:.2} s)",
        report.trend_verdict,
        report
            .final_error
            .map_or("n/a".into(), |e| format!("{e:.6e}")),
    )?;
    Ok(exit_for(report.trend_verdict))
}

fn cmd_duality(
    weight: &str,
    set: &str,
    run: &RunArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let weight: WeightSpec = weight.parse()?;
    let set: PrimeSet = set.parse()?;
    if !weight.is_over_n() {
        return Err(Error::Domain(format!(
            "duality needs a weight with denominator n, got {weight}"
        )));
    }
    let plan = Plan::new(run)?;
    let (target, source) = plan.target(&set)?;

    let start = Instant::now();
    let series =
        plan.engine
            .weighted_duality_series(&set, &weight, &plan.checkpoints, plan.mode)?;
    let report = DualityReport::new(&series, plan.window, target, source)?;
    let elapsed = start.elapsed().as_secs_f64();

    plan.write(out, |w| report.emit(plan.format, w))?;
    if let Some(path) = &plan.plot {
        report
            .alladi
            .write_plot_csv(BufWriter::new(File::create(path)?))?;
    }
    writeln!(
        err,
        "duality over {set}: alladi {} duality {} ({elapsed:.2} s)",
        report.alladi.trend_verdict, report.duality.trend_verdict
    )?;
    Ok(exit_for(report.verdict()))
}

fn cmd_verify(suite: Option<&str>, threads: Option<usize>, out: &mut dyn Write) -> Result<i32> {
    let names: Vec<&str> = match suite {
        Some(s) if SUITES.contains(&s) => vec![s],
        Some(s) => {
            return Err(Error::Parse(format!(
                "unknown suite \"{s}\" (expected one of {})",
                SUITES.join(", ")
            )))
        }
        None => SUITES.to_vec(),
    };
    let engine = match threads {
        Some(t) => SumEngine::new(t, DEFAULT_SEGMENT_SIZE)?,
        None => SumEngine::default(),
    };
    let mut all = true;
    for name in names {
        let start = Instant::now();
        let o = run_suite(name, &engine)?;
        all &= o.passed;
        writeln!(
            out,
            "{} {:<10} {} ({:.1} s)",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail,
            start.elapsed().as_secs_f64()
        )?;
    }
    Ok(if all { 0 } else { 2 })
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(PathBuf::from)
}

pub fn cache_file(dir: &std::path::Path, limit: u64) -> PathBuf {
    dir.join(format!("spf-{limit}.alsv"))
}

fn cmd_sieve(limit: &str, path: Option<PathBuf>, out: &mut dyn Write) -> Result<i32> {
    let limit = parse_count(limit)?;
    let path = match path.or_else(|| cache_dir().map(|d| cache_file(&d, limit))) {
        Some(p) => p,
        None => {
            return Err(Error::Parse(format!(
                "sieve needs --out or the {CACHE_ENV} environment variable"
            )))
        }
    };
    let table = FactorTable::build(limit)?;
    table.save(&path)?;
    writeln!(
        out,
        "limit {limit}: {} primes, written to {}",
        table.primes().count(),
        path.display()
    )?;
    Ok(0)
}

/// The smallest cached table covering `n`, if any.
fn cached_table(n: u64) -> Option<FactorTable> {
    let dir = cache_dir()?;
    let mut best: Option<u64> = None;
    for entry in std::fs::read_dir(&dir).ok()?.flatten() {
        let name = entry.file_name();
        let limit = name
            .to_str()
            .and_then(|s| s.strip_prefix("spf-"))
            .and_then(|s| s.strip_suffix(".alsv"))
            .and_then(|s| s.parse::<u64>().ok());
        if let Some(l) = limit.filter(|&l| l >= n) {
            best = Some(best.map_or(l, |b| b.min(l)));
        }
    }
    FactorTable::load(&cache_file(&dir, best?)).ok()
}

fn cmd_eval(
    function: &str,
    n: &str,
    k: u32,
    m: u64,
    lattice: &str,
    out: &mut dyn Write,
) -> Result<i32> {
    let n = parse_count(n)?;
    let lattice = match lattice {
        "e8" => Lattice::E8,
        "e8e8" => Lattice::E8PlusE8OrGamma16,
        _ => return Err(Error::Parse(format!("unknown lattice \"{lattice}\""))),
    };
    let text = match function {
        "classify" => {
            let c = match cached_table(n) {
                Some(t) => classify(n, &t)?,
                None => classify(n, &TrialDivision)?,
            };
            format!(
                "n={} p={} P={} mu={} phi={} lambda={} omega_big={}",
                c.n, c.p, c.big_p, c.mu, c.phi, c.lambda, c.omega_big
            )
        }
        "sigma" => arith::sigma_k(n, k)?.to_string(),
        "psi" => arith::dedekind_psi(n)?.to_string(),
        "ramanujan" => arith::ramanujan_sum(n, m)?.to_string(),
        "r4" => arith::r4(n)?.to_string(),
        "r8" => arith::r8(n)?.to_string(),
        "theta" => arith::theta_coeff(lattice, n)?.to_string(),
        _ => {
            return Err(Error::Parse(format!(
                "unknown function \"{function}\" (expected classify, sigma, psi, ramanujan, r4, r8, theta)"
            )))
        }
    };
    writeln!(out, "{text}")?;
    Ok(0)
}

fn cmd_rsum(x: &str, y: &str, mode: ModeArg, out: &mut dyn Write) -> Result<i32> {
    let (x, y) = (parse_count(x)?, parse_count(y)?);
    let q = SumEngine::default().r_sum(x, y, mode_of(mode))?;
    let v = match &q.value {
        Value::Float(f) => f.to_string(),
        Value::Exact(r) => to_fraction_string(r),
    };
    writeln!(out, "R({x}, {y}) = {v}")?;
    Ok(if q.within_bound() { 0 } else { 2 })
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Sum { weight, set, run } => cmd_sum(weight, set, run, out, err),
        Command::Duality { set, weight, run } => cmd_duality(weight, set, run, out, err),
        Command::Verify { suite, threads } => cmd_verify(suite.as_deref(), *threads, out),
        Command::Sieve { limit, out: path } => cmd_sieve(limit, path.clone(), out),
        Command::Eval {
            function,
            n,
            k,
            m,
            lattice,
        } => cmd_eval(function, n, *k, *m, lattice, out),
        Command::Rsum { x, y, mode } => cmd_rsum(x, y, *mode, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
