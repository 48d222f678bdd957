//! Command-line interface. Every subcommand writes CSV preceded by a
//! provenance header; options may also come from a JSON file given with
//! `--config`, whose keys mirror the long flag names. Flags win over the file.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperwave_core::chaos::{summarize, Kernel, McPlan, PolyspectrumSample};
use hyperwave_core::hypgeo::{ball_volume, sample_uniform_ball};
use hyperwave_core::moments::{contraction_mc, euclid_variance, Method, MomentEngine, Power};
use hyperwave_core::rng::{stream, AUX_DOMAIN};
use hyperwave_core::specfun::{
    asymptotic_tail, bessel_approx, integrate_radial, spherical_f, CovarianceRoute, ODE_RTOL,
};
use hyperwave_core::waves::{sample_gaussian_field, sample_superposition, FieldRealization};
use hyperwave_core::SpectralParams;
use rayon::ThreadPool;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::acceptance::{run_suite, write_report, Profile};
use crate::orchestrate::{par_map, pool, resolve_workers, run_kernel};
use crate::output::{num, CsvSink, Provenance};
use crate::stats::{clt_report, local_limit_sup};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ACCURACY: i32 = 3;

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "hyperwave", version, about = "Gaussian random waves on hyperbolic space")]
pub struct Cli {
    /// JSON file whose keys mirror the long flags of the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: HYPERWAVE_THREADS, then all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Exit with status 3 when any result is flagged as inaccurate.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Covariance function F along a radial grid, by every route.
    Covar(CovarArgs),
    /// Field values on random points of a ball.
    Sample(SampleArgs),
    /// Deterministic polyspectrum variances over an α or R grid.
    VarianceTable(VarianceTableArgs),
    /// Monte Carlo contraction integrals.
    Contractions(ContractionArgs),
    /// Euclidean random-wave variance on a disc or ball.
    Euclid(EuclidArgs),
    /// Distance of polyspectrum samples to a Gaussian.
    Clt(CltArgs),
    /// Excursion-volume samples.
    Excursion(ExcursionArgs),
    /// Approximate Leray measure samples.
    Leray(LerayArgs),
    /// Deviation from the Euclidean Berry covariance at small scales.
    LocalLimit(LocalLimitArgs),
    /// Runs the acceptance suite and writes report.csv.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Routes {
    All,
    Ode,
    Quad,
    Hyp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMethod {
    Cholesky,
    Superposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Lambda,
    Radius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceMethod {
    Exact,
    SandwichLower,
    SandwichUpper,
    Montecarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PowerArg {
    Signed,
    Absolute,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CovarArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub routes: Option<Routes>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SampleArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<SampleMethod>,
    /// Plane waves per superposition realization.
    #[arg(long)]
    pub waves: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct VarianceTableArgs {
    #[arg(long, value_enum)]
    pub regime: Option<Regime>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<usize>>,
    /// α values (λ regime) or radii (R regime).
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Fixed radius in the λ regime.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Fixed α in the R regime.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<VarianceMethod>,
    #[arg(long, value_enum)]
    pub power: Option<PowerArg>,
    #[arg(long)]
    pub spatial_points: Option<usize>,
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ContractionArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub radius: Option<Vec<f64>>,
    /// Exponents of the two covariance factors.
    #[arg(long)]
    pub a: Option<usize>,
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct EuclidArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub radius: Option<Vec<f64>>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CltArgs {
    #[arg(long, value_enum)]
    pub regime: Option<Regime>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    /// α values (λ regime) or radii (R regime).
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub spatial_points: Option<usize>,
    #[arg(long)]
    pub realizations: Option<usize>,
    /// Realizations sharing one random point design.
    #[arg(long)]
    pub design_block: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Options shared by the sampled functionals.
#[derive(Debug, Clone, Default)]
pub struct FunctionalArgs {
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub radius: Option<f64>,
    pub spatial_points: Option<usize>,
    pub realizations: Option<usize>,
    pub design_block: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

macro_rules! functional_args {
    ($name:ident, $extra:ident, $doc:literal) => {
        #[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
        #[serde(deny_unknown_fields, rename_all = "kebab-case")]
        pub struct $name {
            #[arg(long)]
            pub n: Option<usize>,
            #[arg(long)]
            pub alpha: Option<f64>,
            #[arg(long)]
            pub radius: Option<f64>,
            #[arg(long)]
            pub spatial_points: Option<usize>,
            #[arg(long)]
            pub realizations: Option<usize>,
            /// Realizations sharing one random point design.
            #[arg(long)]
            pub design_block: Option<usize>,
            #[arg(long)]
            pub seed: Option<u64>,
            #[arg(long)]
            pub out: Option<PathBuf>,
            #[doc = $doc]
            #[arg(long)]
            pub $extra: Option<f64>,
        }

        impl $name {
            pub fn common(&self) -> FunctionalArgs {
                FunctionalArgs {
                    n: self.n,
                    alpha: self.alpha,
                    radius: self.radius,
                    spatial_points: self.spatial_points,
                    realizations: self.realizations,
                    design_block: self.design_block,
                    seed: self.seed,
                    out: self.out.clone(),
                }
            }
        }
    };
}

functional_args!(ExcursionArgs, t, "Excursion level.");
functional_args!(LerayArgs, eps, "Half-width of the level band.");

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct LocalLimitArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    /// Largest rescaled radius `|v|`.
    #[arg(long)]
    pub extent: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ReproduceArgs {
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory receiving report.csv.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Restrict to these criterion numbers.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<u8>>,
}

/// Run-wide settings after merging the config file.
#[derive(Debug, Clone, Copy)]
struct Globals {
    workers: usize,
    strict: bool,
}

/// Outcome of a subcommand: whether any value was flagged as inaccurate.
struct Outcome {
    flagged: bool,
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok((outcome, globals)) if outcome.flagged && globals.strict => {
            eprintln!("hyperwave: results flagged as inaccurate (--strict)");
            EXIT_ACCURACY
        }
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("hyperwave: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    use hyperwave_core::Error as Core;
    match e {
        Error::Config(_) | Error::Json(_) => EXIT_CONFIG,
        Error::Core(Core::Domain(_) | Core::InvalidPoint(_) | Core::TooFewSamples { .. } | Core::TooManyPoints { .. }) => {
            EXIT_CONFIG
        }
        _ => EXIT_NUMERICAL,
    }
}

fn execute(cli: Cli) -> Result<(Outcome, Globals)> {
    let mut file = match &cli.config {
        Some(path) => match serde_json::from_str::<Value>(&std::fs::read_to_string(path)?)? {
            Value::Object(map) => map,
            _ => return Err(Error::Config("config file must hold a JSON object".into())),
        },
        None => Map::new(),
    };
    let file_workers = take_opt::<usize>(&mut file, "workers")?;
    let file_strict = take_opt::<bool>(&mut file, "strict")?.unwrap_or(false);
    let globals = Globals {
        workers: resolve_workers(cli.workers.or(file_workers)),
        strict: cli.strict || file_strict,
    };
    let pool = pool(globals.workers)?;
    let outcome = match cli.command {
        Command::Covar(a) => {
            let (a, cfg) = merge(file, a)?;
            covar(a, cfg)?
        }
        Command::Sample(a) => {
            let (a, cfg) = merge(file, a)?;
            sample(a, cfg, &pool)?
        }
        Command::VarianceTable(a) => {
            let (a, cfg) = merge(file, a)?;
            variance_table(a, cfg, &pool)?
        }
        Command::Contractions(a) => {
            let (a, cfg) = merge(file, a)?;
            contractions(a, cfg, &pool)?
        }
        Command::Euclid(a) => {
            let (a, cfg) = merge(file, a)?;
            euclid(a, cfg, &pool)?
        }
        Command::Clt(a) => {
            let (a, cfg) = merge(file, a)?;
            clt(a, cfg, &pool)?
        }
        Command::Excursion(a) => {
            let (a, cfg) = merge(file, a)?;
            let t = a.t.unwrap_or(1.0);
            if !Kernel::Excursion(t).has_clt_claim() {
                eprintln!("hyperwave: t = 0 keeps only odd chaoses; samples are descriptive, no Gaussian limit is claimed");
            }
            functional("excursion", a.common(), Kernel::Excursion(t), cfg, &pool)?
        }
        Command::Leray(a) => {
            let (a, cfg) = merge(file, a)?;
            let eps = a.eps.unwrap_or(0.05);
            if !(eps > 0.0) {
                return Err(Error::Config(format!("--eps must be positive, got {eps}")));
            }
            functional("leray", a.common(), Kernel::Leray(eps), cfg, &pool)?
        }
        Command::LocalLimit(a) => {
            let (a, cfg) = merge(file, a)?;
            local_limit(a, cfg)?
        }
        Command::Reproduce(a) => {
            let (a, _) = merge(file, a)?;
            reproduce(a, &pool)?
        }
    };
    Ok((outcome, globals))
}

fn take_opt<T: DeserializeOwned>(map: &mut Map<String, Value>, key: &str) -> Result<Option<T>> {
    match map.remove(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v).map(Some).map_err(|e| Error::Config(format!("{key}: {e}"))),
    }
}

/// Overlays the flags that were given on the config-file map and
/// deserializes the result, rejecting unknown keys. Returns the merged
/// arguments and their JSON echo.
fn merge<A: Serialize + DeserializeOwned>(mut file: Map<String, Value>, flags: A) -> Result<(A, Value)> {
    if let Value::Object(given) = serde_json::to_value(&flags)? {
        for (k, v) in given {
            if !v.is_null() {
                file.insert(k, v);
            }
        }
    }
    let merged = Value::Object(file);
    let args = serde_json::from_value(merged.clone()).map_err(|e| Error::Config(e.to_string()))?;
    Ok((args, merged))
}

fn provenance(command: &str, config: Value, seed: Option<u64>) -> Provenance {
    Provenance { command: command.to_string(), config, seed }
}

fn out_path(out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| PathBuf::from("-"))
}

fn params(n: Option<usize>, alpha: Option<f64>) -> Result<SpectralParams> {
    Ok(SpectralParams::new(n.unwrap_or(2), alpha.unwrap_or(5.0))?)
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn covar(a: CovarArgs, cfg: Value) -> Result<Outcome> {
    let p = params(a.n, a.alpha)?;
    let (lo, hi) = (a.r_min.unwrap_or(1e-3), a.r_max.unwrap_or(6.0));
    let count = a.points.unwrap_or(200);
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(Error::Config(format!("need 0 < r-min < r-max and at least 2 points, got [{lo}, {hi}] with {count}")));
    }
    let routes = a.routes.unwrap_or(Routes::All);
    let radii: Vec<f64> = (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect();
    let want = |r: Routes| routes == Routes::All || routes == r;
    let ode = if want(Routes::Ode) { Some(integrate_radial(&p, &radii, ODE_RTOL)) } else { None };
    let mut sink = CsvSink::create(
        &out_path(a.out),
        &provenance("covar", cfg, None),
        &["r", "F_ode", "F_quad", "F_hyp", "tail_main", "tail_bound", "bessel_approx"],
    )?;
    let mut flagged = false;
    for (k, &r) in radii.iter().enumerate() {
        let mut route = |on: bool, route: CovarianceRoute| -> Result<Option<f64>> {
            if !on {
                return Ok(None);
            }
            let e = spherical_f(&p, r, route)?;
            flagged |= e.degraded;
            Ok(Some(e.value))
        };
        let quad = route(want(Routes::Quad), CovarianceRoute::Quadrature)?;
        let hyp = route(want(Routes::Hyp), CovarianceRoute::Hypergeometric)?;
        let tail = asymptotic_tail(&p, r).ok();
        sink.row([
            num(r),
            opt_num(ode.as_ref().map(|s| s[k].value)),
            opt_num(quad),
            opt_num(hyp),
            opt_num(tail.map(|t| t.main_term)),
            opt_num(tail.map(|t| t.error_bound)),
            num(bessel_approx(&p, r)),
        ])?;
    }
    sink.finish()?;
    Ok(Outcome { flagged })
}

fn sample(a: SampleArgs, cfg: Value, pool: &ThreadPool) -> Result<Outcome> {
    let p = params(a.n, a.alpha)?;
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let radius = a.radius.unwrap_or(2.0);
    let count = a.points.unwrap_or(500);
    let realizations = a.realizations.unwrap_or(8);
    let mut rng = stream(seed, AUX_DOMAIN);
    let points = Arc::new(sample_uniform_ball(p.n(), radius, count, &mut rng)?);
    let fields: Vec<FieldRealization> = match a.method.unwrap_or(SampleMethod::Cholesky) {
        SampleMethod::Cholesky => sample_gaussian_field(points, &p, realizations, seed)?,
        SampleMethod::Superposition => {
            let waves = a.waves.unwrap_or(1000);
            let idx: Vec<u64> = (0..realizations as u64).collect();
            par_map(pool, &idx, |&k| {
                let mut rng = stream(seed, AUX_DOMAIN + 1 + k);
                Ok(sample_superposition(points.clone(), &p, waves, &mut rng)?.real)
            })?
        }
    };
    let mut header = vec!["realization".to_string()];
    header.extend((0..=p.n()).map(|i| format!("x{i}")));
    header.push("value".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut sink = CsvSink::create(&out_path(a.out), &provenance("sample", cfg, Some(seed)), &header)?;
    for (k, field) in fields.iter().enumerate() {
        for (x, v) in field.points.iter().zip(&field.values) {
            let mut row = vec![k.to_string()];
            row.extend(x.coords().iter().map(|&c| num(c)));
            row.push(num(*v));
            sink.row(row)?;
        }
    }
    sink.finish()?;
    Ok(Outcome { flagged: false })
}

fn grid_params(regime: Regime, n: usize, x: f64, radius: Option<f64>, alpha: Option<f64>) -> Result<(SpectralParams, f64)> {
    match regime {
        Regime::Lambda => Ok((SpectralParams::new(n, x)?, radius.unwrap_or(2.0))),
        Regime::Radius => Ok((SpectralParams::new(n, alpha.unwrap_or(2.0))?, x)),
    }
}

fn default_grid(regime: Regime) -> Vec<f64> {
    match regime {
        Regime::Lambda => vec![10.0, 20.0, 40.0, 80.0],
        Regime::Radius => vec![3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
    }
}

fn variance_table(a: VarianceTableArgs, cfg: Value, pool: &ThreadPool) -> Result<Outcome> {
    let regime = a.regime.unwrap_or(Regime::Lambda);
    let n = a.n.unwrap_or(2);
    let qs = a.q.clone().unwrap_or_else(|| vec![2, 4, 6]);
    let grid = a.grid.clone().unwrap_or_else(|| default_grid(regime));
    let method = a.method.unwrap_or(VarianceMethod::Exact);
    let power = match a.power.unwrap_or(PowerArg::Signed) {
        PowerArg::Signed => Power::Signed,
        PowerArg::Absolute => Power::Absolute,
    };
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let max_q = qs.iter().copied().max().unwrap_or(1);
    let rows = par_map(pool, &grid, |&x| {
        let (p, radius) = grid_params(regime, n, x, a.radius, a.alpha)?;
        let mut rows = Vec::new();
        for &q in &qs {
            let fact: f64 = (1..=q).map(|k| k as f64).product();
            let (value, err, label) = match method {
                VarianceMethod::Montecarlo => {
                    let plan = McPlan::new(p, radius, a.spatial_points.unwrap_or(1000), a.realizations.unwrap_or(500), seed)
                        .with_design_block(a.realizations.unwrap_or(500));
                    let s = summarize(&plan.run(&[Kernel::Hermite(q)])?.into_iter().map(|r| r[0]).collect::<Vec<_>>());
                    let v = s.variance - s.spatial_noise;
                    (v, s.variance * (2.0 / (s.count as f64 - 1.0)).sqrt(), Method::MonteCarlo.as_str())
                }
                m => {
                    let method = match m {
                        VarianceMethod::SandwichLower => Method::SandwichLower,
                        VarianceMethod::SandwichUpper => Method::SandwichUpper,
                        _ => Method::ExactAngular,
                    };
                    let v = MomentEngine::new(p, radius, max_q)?.variance(q, power, method)?;
                    (v.value, v.est_abs_error, method.as_str())
                }
            };
            rows.push(vec![
                n.to_string(),
                q.to_string(),
                num(radius),
                num(p.alpha()),
                num(p.lambda()),
                num(value),
                num(value / fact),
                label.to_string(),
                num(err),
            ]);
        }
        Ok(rows)
    })?;
    let mut sink = CsvSink::create(
        &out_path(a.out),
        &provenance("variance-table", cfg, (method == VarianceMethod::Montecarlo).then_some(seed)),
        &["n", "q", "R", "alpha", "lambda", "value", "value_per_qfact", "method", "est_abs_error"],
    )?;
    for row in rows.into_iter().flatten() {
        sink.row(row)?;
    }
    sink.finish()?;
    Ok(Outcome { flagged: false })
}

fn contractions(a: ContractionArgs, cfg: Value, pool: &ThreadPool) -> Result<Outcome> {
    let n = a.n.unwrap_or(2);
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let (ea, eb) = (a.a.unwrap_or(1), a.b.unwrap_or(1));
    let samples = a.samples.unwrap_or(100_000);
    let mut cases = Vec::new();
    for &alpha in a.alpha.as_deref().unwrap_or(&[2.0]) {
        for &r in a.radius.as_deref().unwrap_or(&[2.0]) {
            cases.push((cases.len() as u64, alpha, r));
        }
    }
    let rows = par_map(pool, &cases, |&(k, alpha, r)| {
        let p = SpectralParams::new(n, alpha)?;
        let mut rng = stream(seed, AUX_DOMAIN + k);
        let c = contraction_mc(&p, r, ea, eb, samples, &mut rng)?;
        let q = ea + eb;
        let v = MomentEngine::new(p, r, q)?.variance(q, Power::Signed, Method::ExactAngular)?.value;
        Ok(vec![
            n.to_string(),
            num(r),
            num(alpha),
            num(p.lambda()),
            ea.to_string(),
            eb.to_string(),
            num(c.value),
            num(c.std_error),
            c.samples.to_string(),
            num(v),
            num(c.value / (v * v)),
        ])
    })?;
    let mut sink = CsvSink::create(
        &out_path(a.out),
        &provenance("contractions", cfg, Some(seed)),
        &["n", "R", "alpha", "lambda", "a", "b", "value", "std_error", "samples", "variance", "ratio"],
    )?;
    for row in rows {
        sink.row(row)?;
    }
    sink.finish()?;
    Ok(Outcome { flagged: false })
}

fn euclid(a: EuclidArgs, cfg: Value, pool: &ThreadPool) -> Result<Outcome> {
    let n = a.n.unwrap_or(2);
    let q = a.q.unwrap_or(4);
    let mut cases = Vec::new();
    for &lambda in a.lambda.as_deref().unwrap_or(&[4.0]) {
        for &r in a.radius.as_deref().unwrap_or(&[5.0, 10.0, 20.0, 40.0]) {
            cases.push((lambda, r));
        }
    }
    let rows = par_map(pool, &cases, |&(lambda, r)| Ok((lambda, r, euclid_variance(n, lambda, r, q)?)))?;
    let mut sink = CsvSink::create(
        &out_path(a.out),
        &provenance("euclid", cfg, None),
        &["n", "q", "R", "lambda", "value", "abs_err", "per_volume"],
    )?;
    let mut flagged = false;
    for (lambda, r, e) in rows {
        flagged |= e.degraded;
        let volume = euclid_ball_volume(n, r);
        sink.row([n.to_string(), q.to_string(), num(r), num(lambda), num(e.value), num(e.abs_err), num(e.value / volume)])?;
    }
    sink.finish()?;
    Ok(Outcome { flagged })
}

fn euclid_ball_volume(n: usize, r: f64) -> f64 {
    let half = n as f64 / 2.0;
    std::f64::consts::PI.powf(half) / hyperwave_core::specfun::gamma(half + 1.0) * r.powi(n as i32)
}

fn clt(a: CltArgs, cfg: Value, pool: &ThreadPool) -> Result<Outcome> {
    let regime = a.regime.unwrap_or(Regime::Lambda);
    let n = a.n.unwrap_or(2);
    let q = a.q.unwrap_or(2);
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let grid = a.grid.clone().unwrap_or_else(|| match regime {
        Regime::Lambda => vec![10.0, 30.0, 100.0],
        Regime::Radius => vec![3.0, 5.0, 7.0],
    });
    let mut sink = CsvSink::create(
        &out_path(a.out.clone()),
        &provenance("clt", cfg, Some(seed)),
        &["n", "q", "R", "alpha", "K", "M", "seed", "w1", "var_emp", "var_theory"],
    )?;
    for &x in &grid {
        let (p, radius) = grid_params(regime, n, x, a.radius, a.alpha)?;
        let plan = McPlan::new(p, radius, a.spatial_points.unwrap_or(2000), a.realizations.unwrap_or(2000), seed)
            .with_design_block(a.design_block.unwrap_or(100));
        let rep = clt_report(pool, &plan, q)?;
        sink.row([
            n.to_string(),
            q.to_string(),
            num(radius),
            num(p.alpha()),
            rep.samples.to_string(),
            rep.spatial_points.to_string(),
            seed.to_string(),
            num(rep.w1_to_gaussian),
            num(rep.empirical_variance),
            num(rep.theoretical_variance),
        ])?;
    }
    sink.finish()?;
    Ok(Outcome { flagged: false })
}

fn functional(name: &str, a: FunctionalArgs, kernel: Kernel, cfg: Value, pool: &ThreadPool) -> Result<Outcome> {
    let p = params(a.n, a.alpha)?;
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let radius = a.radius.unwrap_or(1.5);
    ball_volume(p.n(), radius)?;
    let plan = McPlan::new(p, radius, a.spatial_points.unwrap_or(1000), a.realizations.unwrap_or(1000), seed)
        .with_design_block(a.design_block.unwrap_or(50));
    let samples: Vec<PolyspectrumSample> = run_kernel(pool, &plan, kernel)?;
    let mut sink = CsvSink::create(
        &out_path(a.out),
        &provenance(name, cfg, Some(seed)),
        &["realization", "estimate", "spatial_noise_var"],
    )?;
    for (k, s) in samples.iter().enumerate() {
        sink.row([k.to_string(), num(s.estimate), num(s.spatial_noise_var)])?;
    }
    sink.finish()?;
    Ok(Outcome { flagged: false })
}

fn local_limit(a: LocalLimitArgs, cfg: Value) -> Result<Outcome> {
    let lambdas = a.lambda.clone().unwrap_or_else(|| vec![1e2, 1e3, 1e4]);
    let pts = local_limit_sup(&lambdas, a.n.unwrap_or(2), a.extent.unwrap_or(5.0), a.grid_points.unwrap_or(21))?;
    let mut sink = CsvSink::create(&out_path(a.out), &provenance("local-limit", cfg, None), &["lambda", "sup_dev"])?;
    for pt in pts {
        sink.row([num(pt.lambda), num(pt.sup_dev)])?;
    }
    sink.finish()?;
    Ok(Outcome { flagged: false })
}

fn reproduce(a: ReproduceArgs, pool: &ThreadPool) -> Result<Outcome> {
    let profile = a.profile.unwrap_or(Profile::Desk);
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let dir = a.out_dir.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let only = a.only.unwrap_or_default();
    let results = run_suite(profile, seed, pool, &only, |c| eprintln!("{}", c.line()));
    let path = dir.join("report.csv");
    let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
    use std::io::Write;
    for line in provenance("reproduce", serde_json::json!({"profile": profile, "seed": seed}), Some(seed)).lines() {
        writeln!(file, "{line}")?;
    }
    write_report(file, &results)?;
    let failed = results.iter().filter(|c| !c.passed).count();
    eprintln!("{} criteria, {failed} failed; report written to {}", results.len(), path.display());
    Ok(Outcome { flagged: failed > 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_and_unknown_keys_fail() {
        let file: Map<String, Value> = serde_json::from_str(r#"{"n": 3, "alpha": 7.0}"#).unwrap();
        let flags = CovarArgs { alpha: Some(9.0), ..Default::default() };
        let (merged, _) = merge(file, flags).unwrap();
        assert_eq!(merged.n, Some(3));
        assert_eq!(merged.alpha, Some(9.0));
        let bad: Map<String, Value> = serde_json::from_str(r#"{"bogus": 1}"#).unwrap();
        assert!(matches!(merge(bad, CovarArgs::default()), Err(Error::Config(_))));
    }

    #[test]
    fn functional_arguments_round_trip() {
        let file: Map<String, Value> = serde_json::from_str(r#"{"spatial-points": 50, "t": 0.5}"#).unwrap();
        let (merged, _) = merge(file, ExcursionArgs::default()).unwrap();
        assert_eq!(merged.common().spatial_points, Some(50));
        assert_eq!(merged.t, Some(0.5));
    }

    #[test]
    fn usage_errors_map_to_config_status() {
        assert_eq!(run(["hyperwave", "covar", "--no-such-flag"]), EXIT_CONFIG);
        assert_eq!(run(["hyperwave", "frobnicate"]), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Core(hyperwave_core::Error::NoConvergence { achieved: 1.0 })), EXIT_NUMERICAL);
    }
}
