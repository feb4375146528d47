//! Argument validation, dispatch and report assembly for the `modulieis` binary.

pub mod cache;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use modulieis_core::analytic::{
    check_division_slopes, check_slope_formula, quasi_periods, LatticeConfig, DEFAULT_RADIUS,
    DEFAULT_TOL,
};
use modulieis_core::curve::{full_torsion_curves, WeierstrassCurve};
use modulieis_core::exactfield::is_prime;
use modulieis_core::hecke::{
    reduce_lambda_convolution, required_level, verify_trace_identities, CompositeTorsionContext,
};
use modulieis_core::identities::{verify_all, IdentityId};
use modulieis_core::modelbuild::build_model;
use modulieis_core::series::{SeriesContext, DEFAULT_ORDER};
use modulieis_core::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

pub use cache::{cache_torsion, cached_table, load_torsion, resolve_cache_dir};

pub const SCHEMA_VERSION: u32 = 1;
/// Curves tried by `--prime auto` before giving up on a rank deficit.
pub const AUTO_ATTEMPTS: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Parser, Debug)]
#[command(
    name = "modulieis",
    version,
    about = "Torsion slopes, identity checks and quadric models of X(l)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Subcommand, Debug)]
pub enum Sub {
    /// Find a curve over F_p with all l-torsion rational.
    FindCurve(Flags),
    /// Check the identity catalog on a found curve.
    Verify(Flags),
    /// Build the quadric model of X(l) from one curve.
    BuildModel(Flags),
    /// Trace identities and a reduction certificate over composite torsion.
    Hecke(Flags),
    /// Floating-point lattice-sum cross-checks.
    AnalyticCheck(Flags),
}

#[derive(Args, Debug, Clone)]
pub struct Flags {
    #[arg(long)]
    pub level: Option<u32>,
    /// A prime, or `auto`.
    #[arg(long)]
    pub prime: Option<String>,
    /// Comma-separated identity ids, or `all`.
    #[arg(long)]
    pub identities: Option<String>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub s: Option<i64>,
    /// `re,im` with im > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    pub radius: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    FindCurve,
    Verify,
    BuildModel,
    Hecke,
    AnalyticCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimeChoice {
    Auto,
    Fixed(u64),
}

impl FromStr for PrimeChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<PrimeChoice, CliError> {
        if s == "auto" {
            return Ok(PrimeChoice::Auto);
        }
        s.parse().map(PrimeChoice::Fixed).map_err(|_| {
            CliError::Usage(format!("--prime expects an integer or `auto`, got `{s}`"))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Params {
    pub level: u32,
    pub prime: PrimeChoice,
    #[serde(serialize_with = "ser_ids")]
    pub identities: Vec<IdentityId>,
    pub trials: usize,
    pub n: u32,
    pub s: i64,
    pub tau: (f64, f64),
    pub radius: f64,
    pub tol: f64,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
}

fn ser_ids<S: serde::Serializer>(ids: &[IdentityId], s: S) -> Result<S::Ok, S::Error> {
    ids.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommandSpec {
    pub command: Command,
    pub params: Params,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn factorial(n: u32) -> u64 {
    (1..=n as u64).product()
}

impl CommandSpec {
    /// Parses argv (including the program name) and validates every flag.
    pub fn from_args<I, T>(args: I) -> Result<CommandSpec, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
        CommandSpec::from_cli(cli)
    }

    pub fn from_cli(cli: Cli) -> Result<CommandSpec, CliError> {
        let (command, f) = match cli.command {
            Sub::FindCurve(f) => (Command::FindCurve, f),
            Sub::Verify(f) => (Command::Verify, f),
            Sub::BuildModel(f) => (Command::BuildModel, f),
            Sub::Hecke(f) => (Command::Hecke, f),
            Sub::AnalyticCheck(f) => (Command::AnalyticCheck, f),
        };
        let level = match (command, f.level) {
            (Command::AnalyticCheck, l) => l.unwrap_or(5),
            (Command::Hecke, l) => l.unwrap_or(3),
            (_, Some(l)) => l,
            (_, None) => return usage("--level is required"),
        };
        let min_level = match command {
            Command::Verify | Command::BuildModel => 3,
            Command::AnalyticCheck => 1,
            _ => 2,
        };
        if level < min_level || level > 64 {
            return usage(format!("--level must lie in {min_level}..=64"));
        }
        let prime = match (&f.prime, command) {
            (None, Command::FindCurve) => return usage("--prime is required"),
            (None, _) => PrimeChoice::Auto,
            (Some(s), _) => s.parse()?,
        };
        let identities = match f.identities.as_deref() {
            None | Some("all") => IdentityId::ALL.to_vec(),
            Some(csv) => csv
                .split(',')
                .map(|s| {
                    s.parse::<IdentityId>()
                        .map_err(|e| CliError::Usage(e.to_string()))
                })
                .collect::<Result<_, _>>()?,
        };
        let n = f.n.unwrap_or(2);
        let s = f.s.unwrap_or(1);
        if command == Command::Hecke && !(1..=4).contains(&n) {
            return usage("--n must lie in 1..=4");
        }
        let tau = match f.tau.as_deref() {
            None => (0.31, 1.7),
            Some(t) => {
                let parts: Vec<f64> = t
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError::Usage(format!("--tau expects re,im, got `{t}`")))?;
                match parts[..] {
                    [re, im] if im > 0.0 => (re, im),
                    _ => return usage("--tau expects re,im with im > 0"),
                }
            }
        };
        if command == Command::AnalyticCheck && (f.radius < 10.0 || f.tol <= 0.0) {
            return usage("--radius must be at least 10 and --tol positive");
        }
        if f.trials == 0 {
            return usage("--trials must be positive");
        }
        let spec = CommandSpec {
            command,
            params: Params {
                level,
                prime,
                identities,
                trials: f.trials,
                n,
                s,
                tau,
                radius: f.radius,
                tol: f.tol,
                cache_dir: f.cache_dir,
            },
            seed: f.seed,
            out: f.out,
        };
        if let PrimeChoice::Fixed(p) = prime {
            spec.check_prime(p)?;
        }
        Ok(spec)
    }

    /// The level at which torsion must be rational for this command.
    pub fn torsion_level(&self) -> u32 {
        match self.command {
            Command::Hecke => required_level(self.params.n, self.params.s, self.params.level),
            _ => self.params.level,
        }
    }

    fn check_prime(&self, p: u64) -> Result<(), CliError> {
        let m = self.torsion_level() as u64;
        if !is_prime(p) {
            return usage(format!("{p} is not prime"));
        }
        if p % m != 1 {
            return usage(format!("{p} is not 1 mod {m}: E[{m}] cannot be rational"));
        }
        if (6 * m).is_multiple_of(p) {
            return usage(format!("characteristic {p} divides {}", 6 * m));
        }
        Ok(())
    }

    /// Candidate curves in a fixed order: every curve of each admissible prime.
    fn curves(&self) -> Result<Box<dyn Iterator<Item = WeierstrassCurve>>, CliError> {
        let m = self.torsion_level();
        match self.params.prime {
            PrimeChoice::Fixed(p) => Ok(Box::new(full_torsion_curves(p, m)?)),
            PrimeChoice::Auto => {
                let floor = (DEFAULT_ORDER as u64).max(factorial(self.params.n.min(20)))
                    + self.params.level as u64;
                let m = m as u64;
                let primes = (floor..1 << 31)
                    .filter(move |&p| p % m == 1 && !(6 * m).is_multiple_of(p) && is_prime(p));
                Ok(Box::new(primes.flat_map(move |p| {
                    full_torsion_curves(p, m as u32).into_iter().flatten()
                })))
            }
        }
    }

    fn first_curve(&self) -> Result<WeierstrassCurve, CliError> {
        let m = self.torsion_level();
        self.curves()?
            .next()
            .ok_or_else(|| match self.params.prime {
                PrimeChoice::Fixed(p) => Error::NoCurveFound { p, level: m }.into(),
                PrimeChoice::Auto => CliError::Usage("no prime found".into()),
            })
    }

    pub fn echo(&self) -> Value {
        serde_json::to_value(self).expect("plain fields")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fail,
    Retry,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: Value,
    pub version: &'static str,
    pub elapsed_ms: u128,
    pub cache_hit: bool,
    pub status: Status,
    pub payload: Value,
}

impl RunReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("plain fields")
    }

    /// Canonical payload bytes; timing and cache state are excluded.
    pub fn payload_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(&self.payload).expect("json value")
    }
}

struct Outcome {
    status: Status,
    payload: Value,
    cache_hit: bool,
}

fn ok_if(pass: bool, payload: Value, cache_hit: bool) -> Outcome {
    Outcome {
        status: if pass { Status::Ok } else { Status::Fail },
        payload,
        cache_hit,
    }
}

pub fn dispatch(spec: &CommandSpec) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let cache_dir = resolve_cache_dir(spec.params.cache_dir.as_deref());
    let outcome = match run(spec, cache_dir.as_deref()) {
        Ok(o) => o,
        Err(CliError::Core(e)) => Outcome {
            status: if matches!(e, Error::RetryNeeded { .. }) {
                Status::Retry
            } else {
                Status::Fail
            },
            payload: json!({"error": e.to_string()}),
            cache_hit: false,
        },
        Err(e) => return Err(e),
    };
    Ok(RunReport {
        schema: SCHEMA_VERSION,
        command: spec.echo(),
        version: env!("CARGO_PKG_VERSION"),
        elapsed_ms: start.elapsed().as_millis(),
        cache_hit: outcome.cache_hit,
        status: outcome.status,
        payload: outcome.payload,
    })
}

fn run(spec: &CommandSpec, cache: Option<&Path>) -> Result<Outcome, CliError> {
    let p = &spec.params;
    match spec.command {
        Command::FindCurve => {
            let curve = spec.first_curve()?;
            let (table, hit) = cached_table(cache, &curve, p.level)?;
            Ok(ok_if(
                true,
                json!({"curve": curve.to_json(), "table": table.to_json()}),
                hit,
            ))
        }
        Command::Verify => {
            let curve = spec.first_curve()?;
            let (table, hit) = cached_table(cache, &curve, p.level)?;
            let ctx = SeriesContext::new(&table, DEFAULT_ORDER)?;
            let reports = verify_all(&ctx, &p.identities, p.trials, spec.seed)?;
            let pass = reports.iter().all(|r| r.passed());
            let payload = json!({
                "curve": curve.to_json(),
                "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            });
            Ok(ok_if(pass, payload, hit))
        }
        Command::BuildModel => {
            let mut last = None;
            let mut any_hit = false;
            for (attempt, curve) in spec.curves()?.take(AUTO_ATTEMPTS).enumerate() {
                let (table, hit) = cached_table(cache, &curve, p.level)?;
                any_hit |= hit;
                match build_model(&table) {
                    Ok(model) => {
                        let payload = json!({"curve": curve.to_json(), "attempt": attempt, "model": model.to_json()});
                        return Ok(ok_if(true, payload, any_hit));
                    }
                    Err(e @ Error::RetryNeeded { .. }) => last = Some(e),
                    Err(e) => return Err(e.into()),
                }
            }
            Err(last
                .unwrap_or(Error::NoCurveFound {
                    p: 0,
                    level: p.level,
                })
                .into())
        }
        Command::Hecke => {
            let m = spec.torsion_level();
            let curve = spec.first_curve()?;
            let (table, hit) = cached_table(cache, &curve, m)?;
            let ctx = CompositeTorsionContext::new(&table, p.n, p.level, DEFAULT_ORDER)?;
            let trace = verify_trace_identities(&ctx)?;
            let step = (m / (p.n * p.level)) as i64;
            let t = ctx.table();
            let (a, b) = (t.idx(step, 0), t.idx(step, step));
            let cert = reduce_lambda_convolution(&ctx, a, b, p.s, p.n)?;
            let violations = cert.constraint_violations();
            let holds = cert.holds_at(&ctx)?;
            let payload = json!({
                "curve": curve.to_json(),
                "context_level": m,
                "inclusions": ctx.inclusions_hold(),
                "trace": trace.to_json(),
                "certificate": cert.to_json(),
                "constraint_violations": violations,
                "specialized_equality": holds,
            });
            Ok(ok_if(
                trace.passed() && violations.is_empty() && holds,
                payload,
                hit,
            ))
        }
        Command::AnalyticCheck => {
            let cfg =
                LatticeConfig::new(Complex64::new(p.tau.0, p.tau.1), p.level, p.radius, p.tol)?;
            let half = cfg.with_radius(p.radius / 2.0)?;
            let eta = quasi_periods(&cfg)?;
            let eta_half = quasi_periods(&half)?;
            let mut probes = Vec::new();
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            while probes.len() < 10 {
                let a = Complex64::new(
                    rng.random::<f64>() - 0.5,
                    (rng.random::<f64>() - 0.5) * cfg.tau.im,
                );
                let b = Complex64::new(
                    rng.random::<f64>() - 0.5,
                    (rng.random::<f64>() - 0.5) * cfg.tau.im,
                );
                match check_slope_formula(&cfg, a, b) {
                    Ok(r) => probes.push(r),
                    Err(Error::DegenerateTriple) | Err(Error::PoleProximity) => {}
                    Err(e) => return Err(e.into()),
                }
            }
            let division = if p.level >= 3 {
                Some(check_division_slopes(&cfg)?)
            } else {
                None
            };
            let worst = probes.iter().map(|r| r.residual).fold(0.0, f64::max);
            let pass = worst < p.tol
                && eta.legendre_residual < p.tol
                && eta.legendre_residual <= eta_half.legendre_residual
                && division.as_ref().is_none_or(|d| d.residual < 10.0 * p.tol);
            let payload = json!({
                "config": cfg,
                "legendre": {
                    "eta1": [eta.eta1.re, eta.eta1.im],
                    "eta2": [eta.eta2.re, eta.eta2.im],
                    "residual": eta.legendre_residual,
                    "residual_at_half_radius": eta_half.legendre_residual,
                },
                "slope_probes": probes.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
                "division_slopes": division.map(|d| d.to_json()),
            });
            Ok(ok_if(pass, payload, false))
        }
    }
}

/// Serializes a report and writes it to `out` or standard output.
pub fn emit(report: &RunReport, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&report.to_json()).expect("json value");
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r?,
            }
        }
    }
    Ok(())
}
