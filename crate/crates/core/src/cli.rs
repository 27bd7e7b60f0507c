//! The `circlelab` command line.
//!
//! Every subcommand produces one table, printed to stdout or written to
//! `--out` with a manifest beside it. Exit status: 0 success, 1 a check
//! failed, 2 usage error, 3 and up one code per [`Error`] variant.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::arcs;
use crate::arith;
use crate::counting::{mean_value, restricted_mean_value, MeanValueSpec, MeetInMiddle, RepresentationTable, TableMode};
use crate::error::{Error, Result};
use crate::exponents::{all_pass, verify_all, PermissibleExponentTable, BUNDLED_TABLE};
use crate::params::{parse_config, GlobalParameters, ParamsBuilder, DEFAULT_N};
use crate::report::{self, Cell, Format, RunManifest, Table};
use crate::series::{self, SeriesContext, DEFAULT_SERIES_CUTOFF};
use crate::signature::PowerSignature;
use crate::sums::{self, SumKind, WeylSum};

/// Worker-count override for the data-parallel kernels.
pub const THREADS_ENV: &str = "CIRCLELAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "circlelab", version, about = "Desk-scale circle-method laboratory", arg_required_else_help = true)]
struct Cli {
    /// key=value parameter file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one parameter, e.g. --set lambda=0.9
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, global = true, default_value = "csv")]
    format: Format,
    /// Shorthand for --format json
    #[arg(long, global = true)]
    json: bool,
    /// Write the report here (plus PATH.manifest.json) instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

impl clap::builder::ValueParserFactory for Format {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<Format>().map_err(|e| e.to_string()))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exponent bookkeeping against the printed constants
    #[command(subcommand)]
    Constants(ConstantsCmd),
    /// Modular sums and multiplicative functions
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Major and minor arcs
    #[command(subcommand)]
    Arcs(ArcsCmd),
    /// Exponential sums and their major-arc approximants
    #[command(subcommand)]
    Sums(SumsCmd),
    /// Truncated singular series
    Series(SeriesArgs),
    /// Singular integral
    Integral(IntegralArgs),
    /// Exact weighted counts against the main term
    Maincompare(MainCompareArgs),
    /// Representation tables, exceptional sets and mean values
    #[command(subcommand)]
    Count(CountCmd),
}

#[derive(Debug, Subcommand)]
enum ConstantsCmd {
    /// Recompute every derived constant and compare
    Verify {
        /// Permissible-exponent table to use instead of the bundled one
        #[arg(long, value_name = "PATH")]
        table: Option<PathBuf>,
    },
    /// Print the bundled permissible-exponent table
    Table,
}

#[derive(Debug, Subcommand)]
enum KernelCmd {
    /// S_k(q, a), complete or over units
    Gauss {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        coprime: bool,
    },
    /// The multiplicative majorant ω_k(q)
    Omega {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: u32,
    },
    /// Largest |S_k(q,a)| / (q ω_k(q)) over a box
    Majorant {
        #[arg(long, default_value_t = 512)]
        qmax: u64,
        #[arg(long, default_value_t = 14)]
        kmax: u32,
    },
    /// Least m with d | m^k
    Radical {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        k: u32,
    },
    /// Size of the set of R-smooth integers up to P
    Smooth {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u64,
    },
    /// Prime factorisation
    Factor {
        #[arg(long)]
        m: u64,
    },
}

#[derive(Debug, Subcommand)]
enum ArcsCmd {
    /// List the arcs for a threshold Q
    Build(ArcsArgs),
    /// Locate points
    Classify {
        #[command(flatten)]
        arcs: ArcsArgs,
        #[arg(long, required = true, num_args = 1.., allow_negative_numbers = true)]
        alpha: Vec<f64>,
    },
}

#[derive(Debug, Args)]
struct ArcsArgs {
    #[arg(long = "q")]
    q_param: f64,
    /// Clip halfwidths to n^(nu-1)
    #[arg(long)]
    star: bool,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum KindArg {
    Weighted,
    Smooth,
    Prime,
}

impl From<KindArg> for SumKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Weighted => SumKind::Weighted,
            KindArg::Smooth => SumKind::Smooth,
            KindArg::Prime => SumKind::PrimeProduct,
        }
    }
}

#[derive(Debug, Subcommand)]
enum SumsCmd {
    /// Evaluate a sum at given points
    Eval {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value = "weighted")]
        kind: KindArg,
        #[arg(long, required = true, num_args = 1.., allow_negative_numbers = true)]
        alpha: Vec<f64>,
    },
    /// ∫|F_k|² by arc panels against Σ w²
    Parseval {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long = "q", default_value_t = 100.0)]
        q_param: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Largest |F_k − F_k*| over sampled major-arc points
    Delta {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long = "q", default_value_t = 100.0)]
        q_param: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Largest |F_k| over a grid of minor-arc points
    Minor {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long = "q", default_value_t = 50.0)]
        q_param: f64,
        #[arg(long, default_value_t = 100_000)]
        grid: usize,
    },
}

#[derive(Debug, Args)]
struct SeriesArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = DEFAULT_SERIES_CUTOFF)]
    qmax: u64,
    #[arg(long)]
    signature: Option<PowerSignature>,
    /// One row per modulus instead of a summary
    #[arg(long)]
    per_q: bool,
}

#[derive(Debug, Args)]
struct IntegralArgs {
    #[arg(long)]
    n: u64,
    /// Half-width of the integration range, or `auto`
    #[arg(long = "B", default_value = "auto")]
    b: String,
    #[arg(long, default_value = "2w,3w")]
    signature: PowerSignature,
}

#[derive(Debug, Args)]
struct MainCompareArgs {
    #[arg(long)]
    n_start: u64,
    #[arg(long, default_value_t = 100)]
    n_count: u64,
    #[arg(long, default_value = "2w,3w")]
    signature: PowerSignature,
    #[arg(long, default_value_t = DEFAULT_SERIES_CUTOFF)]
    qmax: u64,
    #[arg(long = "B", default_value = "auto")]
    b: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Method {
    Dp,
    Mitm,
    Both,
}

#[derive(Debug, Subcommand)]
enum CountCmd {
    /// Build a representation table and optionally save it
    Table {
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        signature: Option<PowerSignature>,
        #[arg(long, default_value = "bitset")]
        mode: TableMode,
        /// Binary table file to write
        #[arg(long, value_name = "PATH")]
        save: Option<PathBuf>,
    },
    /// Integers up to the limit with no representation
    Exceptional {
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        signature: Option<PowerSignature>,
        #[arg(long, value_enum, default_value = "dp")]
        method: Method,
    },
    /// Exact mean value, e.g. "f3[Y=30,R=7]^4"
    Meanvalue {
        #[arg(long)]
        spec: MeanValueSpec,
        /// Also split over the major arcs of this threshold
        #[arg(long = "arcs-q")]
        arcs_q: Option<f64>,
    },
}

impl clap::builder::ValueParserFactory for TableMode {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<TableMode>().map_err(|e| e.to_string()))
    }
}

impl clap::builder::ValueParserFactory for PowerSignature {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<PowerSignature>().map_err(|e| e.to_string()))
    }
}

impl clap::builder::ValueParserFactory for MeanValueSpec {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<MeanValueSpec>().map_err(|e| e.to_string()))
    }
}

/// A finished command: its table and whether its checks held.
struct Outcome {
    table: Table,
    passed: bool,
    flags: Vec<(&'static str, bool)>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self { table, passed: true, flags: Vec::new() }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit status. Errors go to stderr as one `error: ...` line.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => return usage_error(e),
    };
    let words: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match run(cli, &words) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn usage_error(e: clap::Error) -> i32 {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            print!("{e}");
            0
        }
        ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand | ErrorKind::MissingSubcommand => {
            eprint!("{}", e.render());
            2
        }
        _ => {
            let text = e.render().to_string();
            let line = text.lines().next().unwrap_or("usage error");
            eprintln!("error: {}", line.trim_start_matches("error: "));
            2
        }
    }
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| Error::InvalidParameter {
            name: THREADS_ENV.into(),
            reason: format!("{v:?} is not a worker count"),
        })?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Infeasible(e.to_string()))
}

fn parameters(cli: &Cli) -> Result<ParamsBuilder> {
    let mut b = match &cli.config {
        Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
        None => ParamsBuilder::new(DEFAULT_N),
    };
    for kv in &cli.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        b = b.apply(k.trim(), v.trim())?;
    }
    Ok(b)
}

fn run(cli: Cli, words: &[String]) -> Result<i32> {
    let start = Instant::now();
    let builder = parameters(&cli)?;
    let format = if cli.json { Format::Json } else { cli.format };
    let pool = worker_pool()?;
    let (outcome, params) = pool.install(|| execute(&cli.command, builder))?;
    let mut manifest = RunManifest::new(words, &params);
    for (name, ok) in &outcome.flags {
        manifest.flag(name, *ok);
    }
    manifest.wall_time_secs = start.elapsed().as_secs_f64();
    report::emit(&outcome.table, format, cli.out.as_deref(), &manifest)?;
    if cli.out.is_none() {
        eprintln!("manifest {}", manifest.id);
    }
    Ok(if outcome.passed { 0 } else { 1 })
}

fn parse_b(s: &str) -> Result<Option<f64>> {
    if s == "auto" {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(b) if b > 0.0 && b.is_finite() => Ok(Some(b)),
        _ => Err(Error::InvalidParameter {
            name: "B".into(),
            reason: format!("expected `auto` or a positive number, got {s:?}"),
        }),
    }
}

fn execute(cmd: &Command, builder: ParamsBuilder) -> Result<(Outcome, GlobalParameters)> {
    // Commands that take their own n fix the variable ranges at that n.
    let params = match cmd {
        Command::Series(a) => builder.n(a.n).build()?,
        Command::Integral(a) => builder.n(a.n).build()?,
        _ => builder.build()?,
    };
    let outcome = match cmd {
        Command::Constants(c) => constants(c)?,
        Command::Kernel(c) => kernel(c)?,
        Command::Arcs(c) => arcs_cmd(c, &params)?,
        Command::Sums(c) => sums_cmd(c, &params)?,
        Command::Series(a) => series_cmd(a, &params)?,
        Command::Integral(a) => integral_cmd(a, &params)?,
        Command::Maincompare(a) => maincompare(a, &params)?,
        Command::Count(c) => count(c, &params)?,
    };
    Ok((outcome, params))
}

fn constants(cmd: &ConstantsCmd) -> Result<Outcome> {
    match cmd {
        ConstantsCmd::Verify { table } => {
            let t = match table {
                Some(p) => PermissibleExponentTable::parse(&std::fs::read_to_string(p)?)?,
                None => PermissibleExponentTable::bundled(),
            };
            let rows = verify_all(&t);
            let passed = all_pass(&rows);
            Ok(Outcome { table: report::constant_checks(&rows), passed, flags: vec![("constants", passed)] })
        }
        ConstantsCmd::Table => {
            let mut t = Table::new(&["k", "s", "lambda"]);
            for (k, s, lambda) in PermissibleExponentTable::parse(BUNDLED_TABLE)?.iter() {
                t.push(vec![k.into(), format!("{}/{}", s.numer(), s.denom()).into(), lambda.into()]);
            }
            Ok(Outcome::ok(t))
        }
    }
}

fn kernel(cmd: &KernelCmd) -> Result<Outcome> {
    Ok(match *cmd {
        KernelCmd::Gauss { q, a, k, coprime } => {
            let v = if coprime { arith::coprime_sum(q, a, k)? } else { arith::complete_sum(q, a, k)? };
            let mut t = Table::new(&["q", "a", "k", "re", "im", "abs"]);
            t.push(vec![q.into(), a.into(), k.into(), v.re.into(), v.im.into(), v.abs().into()]);
            Outcome::ok(t)
        }
        KernelCmd::Omega { q, k } => {
            let mut t = Table::new(&["q", "k", "omega"]);
            t.push(vec![q.into(), k.into(), arith::omega_k(q, k)?.into()]);
            Outcome::ok(t)
        }
        KernelCmd::Majorant { qmax, kmax } => {
            let r = arith::majorant_scan(qmax, kmax)?;
            let mut t = Table::new(&["ratio", "q", "a", "k", "abs", "max_normalised", "s2_residual", "evaluations"]);
            t.push(vec![
                r.ratio.into(),
                r.q.into(),
                r.a.into(),
                r.k.into(),
                r.abs_value.into(),
                r.max_normalised.into(),
                r.s2_residual.into(),
                r.evaluations.into(),
            ]);
            let passed = r.max_normalised <= 1.0 + 1e-9 && r.s2_residual <= 1e-9;
            Outcome { table: t, passed, flags: vec![("gauss_bounds", passed)] }
        }
        KernelCmd::Radical { d, k } => {
            let mut t = Table::new(&["d", "k", "radical"]);
            t.push(vec![d.into(), k.into(), arith::k_radical(d, k)?.into()]);
            Outcome::ok(t)
        }
        KernelCmd::Smooth { p, r } => {
            let s = arith::smooth_sieve(p, r)?;
            let mut t = Table::new(&["bound", "smoothness", "count", "largest"]);
            let largest = s.members().last().copied().unwrap_or(0);
            t.push(vec![p.into(), r.into(), s.len().into(), largest.into()]);
            Outcome::ok(t)
        }
        KernelCmd::Factor { m } => {
            let mut t = Table::new(&["prime", "exponent"]);
            for (p, e) in arith::factorize(m)? {
                t.push(vec![p.into(), e.into()]);
            }
            if t.rows.is_empty() {
                t.push(vec![1u64.into(), 0u32.into()]);
            }
            Outcome::ok(t)
        }
    })
}

fn arcs_cmd(cmd: &ArcsCmd, params: &GlobalParameters) -> Result<Outcome> {
    let (args, alphas) = match cmd {
        ArcsCmd::Build(a) => (a, None),
        ArcsCmd::Classify { arcs, alpha } => (arcs, Some(alpha)),
    };
    let system = arcs::build(params, args.q_param, args.star)?;
    if system.overlap_warning {
        eprintln!("warning: Q exceeds sqrt(n)/2, arcs may overlap");
    }
    let table = match alphas {
        None => {
            let mut t = Table::new(&["q", "a", "center", "halfwidth"]);
            for arc in &system.arcs {
                t.push(vec![arc.q.into(), arc.a.into(), arc.center.into(), arc.halfwidth.into()]);
            }
            t
        }
        Some(alphas) => {
            let mut t = Table::new(&["alpha", "kind", "q", "a", "beta"]);
            for &alpha in alphas {
                let l = system.classify(alpha);
                let kind = match l.kind {
                    arcs::ArcKind::Major => "major",
                    arcs::ArcKind::MajorStar => "major_star",
                    arcs::ArcKind::Minor => "minor",
                };
                t.push(vec![alpha.into(), kind.into(), l.q.into(), l.a.into(), l.beta.into()]);
            }
            t
        }
    };
    Ok(Outcome { table, passed: true, flags: vec![("arcs_disjoint", !system.overlap_warning)] })
}

fn sums_cmd(cmd: &SumsCmd, params: &GlobalParameters) -> Result<Outcome> {
    Ok(match cmd {
        SumsCmd::Eval { k, kind, alpha } => {
            let f = WeylSum::for_kind((*kind).into(), *k, params)?;
            let mut t = Table::new(&["alpha", "re", "im", "abs", "terms", "at_zero"]);
            for &a in alpha {
                let v = f.eval(a);
                t.push(vec![a.into(), v.re.into(), v.im.into(), v.abs().into(), v.terms.into(), v.at_zero.into()]);
            }
            Outcome::ok(t)
        }
        SumsCmd::Parseval { k, q_param, tol } => {
            let system = arcs::build(params, *q_param, false)?;
            let f = WeylSum::weighted(*k, params.x(*k))?;
            let c = sums::parseval_check(&f, &system);
            let passed = c.rel_error <= *tol;
            let mut t = Table::new(&["k", "Q", "exact", "quadrature", "major", "minor", "rel_error", "pass"]);
            t.push(vec![
                (*k).into(),
                (*q_param).into(),
                c.exact.into(),
                c.quadrature.total.into(),
                c.quadrature.major.into(),
                c.quadrature.minor.into(),
                c.rel_error.into(),
                passed.into(),
            ]);
            Outcome { table: t, passed, flags: vec![("parseval", passed)] }
        }
        SumsCmd::Delta { k, q_param, samples } => {
            let d = sums::delta_scan(*k, params, *q_param, *samples)?;
            let mut t = Table::new(&["k", "Q", "samples", "ratio", "max_abs", "q", "a", "beta"]);
            t.push(vec![
                (*k).into(),
                (*q_param).into(),
                d.samples.into(),
                d.ratio.into(),
                d.max_abs.into(),
                d.q.into(),
                d.a.into(),
                d.beta.into(),
            ]);
            Outcome::ok(t)
        }
        SumsCmd::Minor { k, q_param, grid } => {
            let m = sums::minor_arc_sup_scan(*k, *q_param, params, *grid)?;
            let mut t = Table::new(&["k", "Q", "grid", "minor_points", "ratio", "sup", "alpha"]);
            t.push(vec![
                (*k).into(),
                (*q_param).into(),
                (*grid).into(),
                m.minor_points.into(),
                m.ratio.into(),
                m.sup.into(),
                m.alpha.into(),
            ]);
            Outcome::ok(t)
        }
    })
}

fn series_cmd(a: &SeriesArgs, params: &GlobalParameters) -> Result<Outcome> {
    let sig = a.signature.clone().unwrap_or_else(|| PowerSignature::unlike_powers_mixed(params));
    let ctx = SeriesContext::new(&sig, a.qmax)?;
    let s = ctx.series(a.n);
    let real = s.max_imag <= 1e-9;
    let table = if a.per_q {
        let mut t = Table::new(&["q", "re", "im", "partial"]);
        for (v, p) in s.aq.iter().zip(&s.partial) {
            t.push(vec![v.q.into(), v.re.into(), v.im.into(), (*p).into()]);
        }
        t
    } else {
        let mut t = Table::new(&["n", "qmax", "series", "tail_constant", "tail_estimate", "max_imag", "cauchy_decay"]);
        let decay = a.qmax >= 4 && s.cauchy_decay(a.qmax / 4);
        t.push(vec![
            a.n.into(),
            a.qmax.into(),
            s.value().into(),
            s.tail_constant.into(),
            s.tail_estimate.into(),
            s.max_imag.into(),
            decay.into(),
        ]);
        t
    };
    Ok(Outcome { table, passed: true, flags: vec![("series_real", real)] })
}

fn integral_cmd(a: &IntegralArgs, params: &GlobalParameters) -> Result<Outcome> {
    let v = series::singular_integral(a.n, parse_b(&a.b)?, &a.signature, params)?;
    let mut t = Table::new(&["n", "B", "value", "imag", "at_zero", "decayed", "accurate"]);
    t.push(vec![
        v.n.into(),
        v.b.into(),
        v.value.into(),
        v.imag.into(),
        v.at_zero.into(),
        v.decayed.into(),
        v.accurate.into(),
    ]);
    Ok(Outcome { table: t, passed: true, flags: vec![("integral_decayed", v.decayed), ("integral_accurate", v.accurate)] })
}

fn maincompare(a: &MainCompareArgs, params: &GlobalParameters) -> Result<Outcome> {
    let ns: Vec<u64> = (a.n_start..a.n_start.saturating_add(a.n_count)).collect();
    let r = series::main_term_vs_count(&ns, &a.signature, params, a.qmax, parse_b(&a.b)?)?;
    let mut t = Table::new(&["n", "count", "series", "integral", "main_term", "ratio", "flagged"]);
    for row in &r.rows {
        t.push(vec![
            row.n.into(),
            row.count.into(),
            row.series.into(),
            row.integral.into(),
            row.main_term.into(),
            row.ratio.into(),
            row.flagged.into(),
        ]);
    }
    eprintln!(
        "mean ratio {}  pooled ratio {}  solutions {}",
        report::fmt_real(r.mean_ratio),
        report::fmt_real(r.pooled_ratio),
        r.solutions
    );
    Ok(Outcome { table: t, passed: true, flags: vec![("integral_decayed", r.decayed)] })
}

fn count(cmd: &CountCmd, params: &GlobalParameters) -> Result<Outcome> {
    let sig_or_default = |s: &Option<PowerSignature>| s.clone().unwrap_or_else(PowerSignature::unlike_powers);
    Ok(match cmd {
        CountCmd::Table { limit, signature, mode, save } => {
            let table = RepresentationTable::build(&sig_or_default(signature), params, *limit, *mode)?;
            if let Some(path) = save {
                let file = std::fs::File::create(path)?;
                table.write_to(std::io::BufWriter::new(file))?;
            }
            let exc = table.exceptional();
            let mut t = Table::new(&["limit", "mode", "exceptional", "largest", "saturated"]);
            let mode = match table.mode() {
                TableMode::Count => "count",
                TableMode::Bitset => "bitset",
            };
            t.push(vec![
                (*limit).into(),
                mode.into(),
                exc.values.len().into(),
                largest_cell(exc.largest),
                table.saturated().into(),
            ]);
            Outcome::ok(t)
        }
        CountCmd::Exceptional { limit, signature, method } => {
            let sig = sig_or_default(signature);
            let dp = match method {
                Method::Mitm => None,
                _ => Some(RepresentationTable::build(&sig, params, *limit, TableMode::Bitset)?),
            };
            let mitm = match method {
                Method::Dp => None,
                _ => Some(MeetInMiddle::new(&sig, params, *limit)?.to_table()),
            };
            let agree = match (&dp, &mitm) {
                (Some(a), Some(b)) => a.same_support(b),
                _ => true,
            };
            let exc = dp.as_ref().or(mitm.as_ref()).expect("one method ran").exceptional();
            let values: Vec<String> = exc.values.iter().map(u64::to_string).collect();
            let mut t = Table::new(&["limit", "method", "exceptional", "largest", "agree", "values"]);
            let method = match method {
                Method::Dp => "dp",
                Method::Mitm => "mitm",
                Method::Both => "both",
            };
            t.push(vec![
                (*limit).into(),
                method.into(),
                exc.values.len().into(),
                largest_cell(exc.largest),
                agree.into(),
                values.join(" ").into(),
            ]);
            Outcome { table: t, passed: agree, flags: vec![("methods_agree", agree)] }
        }
        CountCmd::Meanvalue { spec, arcs_q } => {
            let m = mean_value(spec)?;
            let exact = m.exact.map(Cell::from).unwrap_or(Cell::Text(String::new()));
            match arcs_q {
                None => {
                    let mut t = Table::new(&["spec", "exact", "value", "left_tuples", "right_tuples"]);
                    t.push(vec![
                        spec.to_string().into(),
                        exact,
                        m.value.into(),
                        m.left_tuples.into(),
                        m.right_tuples.into(),
                    ]);
                    Outcome::ok(t)
                }
                Some(q) => {
                    let system = arcs::build(params, *q, false)?;
                    let r = restricted_mean_value(spec, &system)?;
                    let mut t = Table::new(&["spec", "Q", "exact", "value", "major", "minor", "minor_quadrature", "closure_error"]);
                    t.push(vec![
                        spec.to_string().into(),
                        (*q).into(),
                        exact,
                        r.exact.into(),
                        r.major.into(),
                        r.minor.into(),
                        r.minor_quadrature.into(),
                        r.closure_error.into(),
                    ]);
                    let closed = r.closure_error <= 1e-4;
                    Outcome { table: t, passed: closed, flags: vec![("closure", closed)] }
                }
            }
        }
    })
}

fn largest_cell(v: Option<u64>) -> Cell {
    v.map(Cell::from).unwrap_or(Cell::Text(String::new()))
}
