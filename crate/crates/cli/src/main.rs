mod config;
mod suites;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use peanut::elliptic::Modulus;
use peanut::flatring::{coordinate_lines, peanut_mesh, write_lines_csv, CartesianPoint, PeanutRegion};
use peanut::harmonics::{HarmonicBasis, PeanutHarmonicIndex};
use peanut::lame::{eigenvalue_bracket, LameProblem, ModeCache};
use rayon::prelude::*;

use config::{parse_f64_list, Scaled, Settings};

/// Everything that ends a run early, with its exit code.
#[derive(Debug)]
pub enum Failure {
    Verification(usize),
    Numeric(peanut::Error),
    Usage(String),
}

impl From<peanut::Error> for Failure {
    fn from(e: peanut::Error) -> Self {
        Failure::Numeric(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numeric(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Numeric(e.into())
    }
}

#[derive(Parser, Debug)]
#[command(name = "peanut", version, about = "Peanut harmonics in flat-ring cyclide coordinates")]
struct Cli {
    /// `key=value` file; flags take precedence over its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Eigenvalue cache (default: $PEANUT_CACHE or ./peanut-cache.json).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true)]
    parallelism: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalue table with the comparison brackets.
    Eigen(EigenArgs),
    /// Evaluate an internal or external harmonic at a Cartesian point.
    Eval(EvalArgs),
    /// Run a verification suite, one JSON line per check.
    Verify(VerifyArgs),
    /// Peanut surface mesh as OBJ and CSV.
    Mesh(MeshArgs),
    /// Coordinate lines in the (R, z) half-plane as CSV.
    Lines(LinesArgs),
    /// Inspect, warm or clear the eigenvalue cache.
    Cache(CacheArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args, Debug)]
struct EigenArgs {
    /// Modulus of the Lamé equation.
    #[arg(long)]
    k: Option<f64>,
    /// Comma-separated orders, each >= -1/2.
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Internal,
    External,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i32>,
    #[arg(long)]
    n: Option<usize>,
    /// `x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long, value_enum, default_value = "internal")]
    kind: Kind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Addition,
    Integral,
    Inteq1,
    Inteq2,
    LimitK0,
    LimitK1,
    Expansion,
    Multipole,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[arg(long)]
    k: Option<f64>,
    /// Azimuthal orders: `2`, `0..3` or `0,2`.
    #[arg(long)]
    m: Option<String>,
    /// Degrees, same syntax as `--m`.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Phase sign for the inteq2 prefactor: `minus` or `plus`.
    #[arg(long)]
    phase: Option<String>,
}

#[derive(Args, Debug)]
struct MeshArgs {
    #[arg(long)]
    k: Option<f64>,
    /// Surface parameter, absolute or as a multiple of K (e.g. `1.7K`).
    #[arg(long)]
    s0: Option<Scaled>,
    #[arg(long)]
    n_t: Option<usize>,
    #[arg(long)]
    n_phi: Option<usize>,
    /// OBJ file; the CSV goes to `--output` or stdout.
    #[arg(long)]
    obj: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LinesArgs {
    #[arg(long)]
    k: Option<f64>,
    /// Comma-separated multiples of K.
    #[arg(long)]
    s: Option<String>,
    /// Comma-separated multiples of K'.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CacheAction {
    Info,
    Warm,
    Clear,
}

#[derive(Args, Debug)]
struct CacheArgs {
    #[arg(value_enum)]
    action: CacheAction,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
}

pub struct Context {
    pub settings: Settings,
    pub cache_path: PathBuf,
    output: Option<PathBuf>,
}

impl Context {
    fn writer(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.output {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    pub fn open_cache(&self) -> Result<ModeCache, Failure> {
        Ok(ModeCache::open(&self.cache_path)?)
    }
}

pub fn modulus(k: f64) -> Result<Modulus, Failure> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Failure::Usage(format!("modulus k = {k} outside (0, 1)")));
    }
    Ok(Modulus::new(k)?)
}

fn cmd_eigen(ctx: &mut Context, a: EigenArgs) -> Result<(), Failure> {
    let k = ctx.settings.pick("k", a.k, 0.6)?;
    let nus_text = ctx.settings.pick("nu", a.nu, "-0.5,0.5,1.5".to_string())?;
    let n_max = ctx.settings.pick("n-max", a.n_max, 10)?;
    let format = ctx.settings.pick("format", a.format, Format::Csv)?;
    let kappa = modulus(k)?;
    let nus = parse_f64_list(&nus_text)?;
    if let Some(bad) = nus.iter().find(|&&nu| !(nu >= -0.5)) {
        return Err(Failure::Usage(format!("nu = {bad} below -1/2")));
    }
    let problems = nus
        .iter()
        .flat_map(|&nu| (0..=n_max).map(move |n| (nu, n)))
        .map(|(nu, n)| LameProblem::new(nu, n, kappa))
        .collect::<peanut::Result<Vec<_>>>()?;
    let mut cache = ctx.open_cache()?;
    let modes = problems.par_iter().map(|p| cache.solve(p)).collect::<peanut::Result<Vec<_>>>()?;
    eprintln!("cache: {} hits, {} misses", cache.hits(), cache.misses());
    for m in &modes {
        cache.insert(m);
    }
    cache.save()?;
    let mut out = ctx.writer()?;
    match format {
        Format::Csv => {
            writeln!(out, "# {}", ctx.settings.header())?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["nu", "n", "kappa", "lambda", "lower_bound", "upper_bound", "in_bracket"])?;
            for m in &modes {
                let p = &m.problem;
                let (lo, hi) = eigenvalue_bracket(p.nu, p.n, p.kappa.omega());
                let inside = lo <= m.lambda && m.lambda <= hi;
                w.write_record(&[
                    p.nu.to_string(),
                    p.n.to_string(),
                    p.kappa.k().to_string(),
                    m.lambda.to_string(),
                    lo.to_string(),
                    hi.to_string(),
                    inside.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::Json => {
            writeln!(out, "{}", serde_json::json!({ "config": ctx.settings.as_json() }))?;
            for m in &modes {
                let p = &m.problem;
                let (lo, hi) = eigenvalue_bracket(p.nu, p.n, p.kappa.omega());
                let row = serde_json::json!({
                    "nu": p.nu, "n": p.n, "kappa": p.kappa.k(), "lambda": m.lambda,
                    "lower_bound": lo, "upper_bound": hi, "in_bracket": lo <= m.lambda && m.lambda <= hi,
                });
                writeln!(out, "{row}")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

fn cmd_eval(ctx: &mut Context, a: EvalArgs) -> Result<(), Failure> {
    let k = ctx.settings.pick("k", a.k, 0.7)?;
    let m = ctx.settings.pick("m", a.m, 0)?;
    let n = ctx.settings.pick("n", a.n, 0)?;
    ctx.settings.record("point", &a.point);
    ctx.settings.record("kind", a.kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default());
    let xyz = parse_f64_list(&a.point)?;
    let [x, y, z] = xyz[..] else {
        return Err(Failure::Usage("point needs three coordinates".into()));
    };
    let p = CartesianPoint::new(x, y, z);
    let mut cache = ctx.open_cache()?;
    let basis = HarmonicBasis::with_cache(modulus(k)?, m.unsigned_abs() as usize, n, &mut cache)?;
    cache.save()?;
    let idx = PeanutHarmonicIndex::new(m, n);
    let value = match a.kind {
        Kind::Internal => basis.internal_g_at(idx, &p)?,
        Kind::External => basis.external_h_at(idx, &p)?,
    };
    let mut out = ctx.writer()?;
    writeln!(out, "{}", serde_json::json!({ "config": ctx.settings.as_json() }))?;
    writeln!(out, "{}", serde_json::json!({ "m": m, "n": n, "re": value.re, "im": value.im }))?;
    out.flush()?;
    Ok(())
}

fn cmd_verify(ctx: &mut Context, a: VerifyArgs) -> Result<(), Failure> {
    let lines = suites::run(ctx, &a)?;
    let mut out = ctx.writer()?;
    writeln!(out, "{}", serde_json::json!({ "config": ctx.settings.as_json() }))?;
    let mut failed = 0;
    for (line, passed) in &lines {
        writeln!(out, "{line}")?;
        if !passed {
            failed += 1;
        }
    }
    out.flush()?;
    if failed > 0 {
        return Err(Failure::Verification(failed));
    }
    Ok(())
}

fn cmd_mesh(ctx: &mut Context, a: MeshArgs) -> Result<(), Failure> {
    let k = ctx.settings.pick("k", a.k, 0.5)?;
    let s0 = ctx.settings.pick("s0", a.s0, Scaled::K(1.7))?;
    let n_t = ctx.settings.pick("n-t", a.n_t, 40)?;
    let n_phi = ctx.settings.pick("n-phi", a.n_phi, 48)?;
    let m = modulus(k)?;
    let s0 = s0.resolve(m.big_k(), m.big_k_prime());
    if !(s0 > 0.0 && s0 < 2.0 * m.big_k()) {
        return Err(Failure::Usage(format!("s0 = {s0} outside (0, 2K)")));
    }
    if n_t < 2 || n_phi < 3 {
        return Err(Failure::Usage("mesh needs n-t >= 2 and n-phi >= 3".into()));
    }
    let mesh = peanut_mesh(&PeanutRegion::new(s0, m)?, n_t, n_phi)?;
    if let Some(path) = &a.obj {
        let mut f = BufWriter::new(File::create(path)?);
        mesh.write_obj(&mut f)?;
        f.flush()?;
    }
    let mut out = ctx.writer()?;
    writeln!(out, "# {}", ctx.settings.header())?;
    mesh.write_csv(s0, &mut out)?;
    out.flush()?;
    log::info!("mesh: {} vertices, area {:.6}", mesh.vertices.len(), mesh.area());
    Ok(())
}

fn cmd_lines(ctx: &mut Context, a: LinesArgs) -> Result<(), Failure> {
    let k = ctx.settings.pick("k", a.k, std::f64::consts::FRAC_1_SQRT_2)?;
    let s = ctx.settings.pick("s", a.s, "0.5,1,1.5".to_string())?;
    let t = ctx.settings.pick("t", a.t, "-0.7,-0.5,-0.2,0.2,0.5,0.7".to_string())?;
    let samples = ctx.settings.pick("samples", a.samples, 200)?;
    let m = modulus(k)?;
    let s: Vec<f64> = parse_f64_list(&s)?.into_iter().map(|x| x * m.big_k()).collect();
    let t: Vec<f64> = parse_f64_list(&t)?.into_iter().map(|x| x * m.big_k_prime()).collect();
    if s.iter().any(|&x| !(x > 0.0 && x < 2.0 * m.big_k())) || t.iter().any(|&x| !(x.abs() < m.big_k_prime())) {
        return Err(Failure::Usage("s must lie in (0, 2K) and t in (-K', K')".into()));
    }
    if samples < 2 {
        return Err(Failure::Usage("samples must be at least 2".into()));
    }
    let lines = coordinate_lines(&m, &s, &t, samples);
    let mut out = ctx.writer()?;
    writeln!(out, "# {}", ctx.settings.header())?;
    write_lines_csv(&lines, &mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_cache(ctx: &mut Context, a: CacheArgs) -> Result<(), Failure> {
    let mut cache = ctx.open_cache()?;
    ctx.settings.record("cache", ctx.cache_path.display());
    match a.action {
        CacheAction::Info => {}
        CacheAction::Clear => {
            cache.clear();
            cache.save()?;
        }
        CacheAction::Warm => {
            let k = ctx.settings.pick("k", a.k, 0.7)?;
            let m_max = ctx.settings.pick("m-max", a.m_max, 12)?;
            let n_max = ctx.settings.pick("n-max", a.n_max, 25)?;
            HarmonicBasis::with_cache(modulus(k)?, m_max, n_max, &mut cache)?;
            cache.save()?;
        }
    }
    let mut out = ctx.writer()?;
    writeln!(out, "{}", serde_json::json!({ "config": ctx.settings.as_json() }))?;
    writeln!(out, "{}", serde_json::json!({ "records": cache.len(), "hits": cache.hits(), "misses": cache.misses() }))?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut settings = Settings::load(cli.config.as_deref())?;
    let threads = settings.pick("parallelism", cli.parallelism, 0usize)?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    let cache_path = match cli.cache {
        Some(p) => p,
        None => ModeCache::default_path(),
    };
    // thread count and cache location never change results, so they stay out of headers
    settings.forget("parallelism");
    let mut ctx = Context { settings, cache_path, output: cli.output };
    match cli.command {
        Command::Eigen(a) => cmd_eigen(&mut ctx, a),
        Command::Eval(a) => cmd_eval(&mut ctx, a),
        Command::Verify(a) => cmd_verify(&mut ctx, a),
        Command::Mesh(a) => cmd_mesh(&mut ctx, a),
        Command::Lines(a) => cmd_lines(&mut ctx, a),
        Command::Cache(a) => cmd_cache(&mut ctx, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(n)) => {
            eprintln!("{n} check(s) failed");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(3)
        }
    }
}
