//! `rotnum`: rotation numbers, derivative formulas, tongues and conjugacies
//! for catalog families of circle diffeomorphisms.
//!
//! Every subcommand writes CSV (default) or JSON to `--output` or stdout.
//! Failures print one line `error: kind=<kind> message=<text>` to stderr and
//! exit with 2 for bad configuration, 3 for an exhausted iteration budget
//! and 1 otherwise.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rotnum_core::catalog::{catalog, FamilySpec};
use rotnum_core::conjugacy::{conjugacy_defect, integral_conjugacy, MonotoneTable};
use rotnum_core::monotone_family::{
    build_global_conjugacy, continuity_modulus, derivative_report, irrational_grid, DEFAULT_FD_STEP,
    DEFAULT_FD_TOL, DEFAULT_QUAD_POINTS,
};
use rotnum_core::report::fmt_float;
use rotnum_core::rotation::{detect_rational, rotation_number_with, RotationConfig};
use rotnum_core::tongues::{matsumoto_probe, tongue_scan_with, tongues_to_csv, Side};
use rotnum_core::Error;

#[derive(Parser)]
#[command(name = "rotnum", version, about = "Rotation numbers of circle diffeomorphism families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Profile {
    Identity,
    Sin,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Orbit,
    Integral,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct FamilyArgs {
    /// rotation, arnold, conj_rotation, dehn or example8.
    #[arg(long)]
    family: Option<String>,
    /// Arnold coupling.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Amplitude of the sine conjugacy (conj_rotation, dehn).
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Coefficient in g(t) = t + beta·sin(2πt) (conj_rotation).
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Rotation profile g of conj_rotation.
    #[arg(long, value_enum)]
    g: Option<Profile>,
    /// JSON family spec, e.g. {"name":"arnold","params":{"a":0.1}}.
    #[arg(long, conflicts_with_all = ["family", "a", "c", "beta", "g"])]
    spec_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Rotation number enclosure and rational detection.
    Rho {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Largest period tried for periodic orbits.
        #[arg(long, default_value_t = 10_000)]
        q_max: u64,
        /// Lift evaluations allowed.
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Derivative of the rotation number at a rational parameter.
    Drho {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        p: i64,
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[arg(long, default_value_t = DEFAULT_QUAD_POINTS)]
        quad_n: usize,
        /// Finite-difference step.
        #[arg(long, default_value_t = DEFAULT_FD_STEP)]
        h: f64,
        /// Rotation-number enclosure width for the finite difference.
        #[arg(long, default_value_t = DEFAULT_FD_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Plateau intervals of p/q across values of the secondary parameter.
    Tongue {
        #[arg(long)]
        family: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long, value_enum)]
        g: Option<Profile>,
        #[arg(long, conflicts_with_all = ["family", "beta", "g"])]
        spec_file: Option<PathBuf>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        p: i64,
        #[arg(long, default_value_t = 1)]
        q: u64,
        /// Secondary-parameter values: a for arnold, c for dehn and conj_rotation.
        #[arg(long = "a", value_delimiter = ',', default_value = "0.02,0.05,0.1")]
        values: Vec<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Search bracket lo:hi; defaults to p/q ± (coupling + 1e-3).
        #[arg(long, allow_hyphen_values = true)]
        bracket: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Difference quotients of the rotation number next to a parameter.
    Probe {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        t_boundary: f64,
        #[arg(long, default_value = "above")]
        side: String,
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4")]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Conjugacy to a rotation at one parameter value, as an x,y table.
    Conjugacy {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, value_enum, default_value = "orbit")]
        method: Method,
        /// Orbit length (orbit) or table size (integral).
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// Period of the power map (integral method).
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Continuity of recovered conjugacies across a dehn-family grid.
    DehnCheck {
        #[arg(long, default_value_t = 1.0 / (4.0 * PI))]
        c: f64,
        #[arg(long, default_value_t = 50)]
        grid: usize,
        /// Parameter span lo:hi.
        #[arg(long, default_value = "0.3:0.32")]
        span: String,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// Sample points for sup-distances.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Conjugacies of the example8 family at 2/((4k+3)π) and 2/((4k+1)π).
    Example8 {
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        out: Output,
    },
}

enum Failure {
    Core(Error),
    Config(String),
    Io(String),
    /// Output was written but the computation hit its budget.
    Budget,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<(), Failure>;

impl FamilyArgs {
    /// Builds the family spec; `default` is used when `--family` is absent.
    fn spec(&self, default: &str) -> Result<FamilySpec, Failure> {
        if let Some(path) = &self.spec_file {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            let spec = FamilySpec::from_json(&text)?;
            spec.validate()?;
            return Ok(spec);
        }
        let name = self.family.as_deref().unwrap_or(default);
        let declared = FamilySpec::declared_params(name)?;
        let mut spec = FamilySpec::new(name);
        let beta = match (self.g, self.beta) {
            (Some(Profile::Identity), Some(b)) if b != 0.0 => {
                return Err(Failure::Config("--g identity conflicts with a nonzero --beta".into()))
            }
            (Some(Profile::Identity), _) => Some(0.0),
            (Some(Profile::Sin), None) => Some(0.1),
            (_, b) => b,
        };
        let flags = [("a", self.a), ("c", self.c), ("beta", beta)];
        for (key, value) in flags {
            match (declared.contains(&key), value) {
                (true, Some(v)) => spec = spec.with(key, v),
                (true, None) => spec = spec.with(key, default_param(name, key)),
                (false, Some(_)) => {
                    return Err(Error::UnexpectedParameter {
                        family: name.into(),
                        name: key.into(),
                    }
                    .into())
                }
                (false, None) => {}
            }
        }
        if self.g.is_some() && name != "conj_rotation" {
            return Err(Error::UnexpectedParameter {
                family: name.into(),
                name: "g".into(),
            }
            .into());
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn default_param(family: &str, key: &str) -> f64 {
    match (family, key) {
        ("arnold", "a") => 0.1,
        ("dehn", "c") => 1.0 / (4.0 * PI),
        ("conj_rotation", "c") => 0.05,
        _ => 0.0,
    }
}

fn parse_span(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Config(format!("expected lo:hi, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn emit(out: &Output, csv: String, json: serde_json::Value) -> CmdResult {
    let text = match out.format {
        Format::Csv => csv,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json).expect("json values serialize");
            s.push('\n');
            s
        }
    };
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Config(format!("--{name} must be positive, got {v}")))
    }
}

fn cmd_rho(family: &FamilyArgs, t: f64, tol: f64, q_max: u64, budget: u64, out: &Output) -> CmdResult {
    positive("tol", tol)?;
    let f = catalog(&family.spec("rotation")?)?;
    let lift = f.at(t);
    let cfg = RotationConfig {
        budget,
        q_max,
        ..RotationConfig::default()
    };
    let raw = rotation_number_with(&lift, tol, &cfg);
    let guess = detect_rational(&lift, &raw, q_max);
    let est = raw.mod_one();
    let rational = guess.map(|g| (g.p.rem_euclid(g.q as i64), g.q));
    let (p, q) = rational.map_or((String::new(), String::new()), |(p, q)| (p.to_string(), q.to_string()));
    let csv = format!(
        "value,lower,upper,n_iter,budget_exceeded,p,q\n{},{},{},{},{},{p},{q}\n",
        fmt_float(est.value),
        fmt_float(est.lower),
        fmt_float(est.upper),
        est.n_iter,
        est.budget_exceeded
    );
    let json = json!({
        "value": est.value,
        "lower": est.lower,
        "upper": est.upper,
        "n_iter": est.n_iter,
        "budget_exceeded": est.budget_exceeded,
        "rational": rational.map(|(p, q)| json!({"p": p, "q": q, "confirmed": true})),
    });
    emit(out, csv, json)?;
    if est.budget_exceeded {
        return Err(Failure::Budget);
    }
    Ok(())
}

fn cmd_tongue(
    family: &FamilyArgs,
    p: i64,
    q: u64,
    values: &[f64],
    tol: f64,
    bracket: Option<&str>,
    out: &Output,
) -> CmdResult {
    positive("tol", tol)?;
    let spec = family.spec("arnold")?;
    let bracket = bracket.map(parse_span).transpose()?;
    let rows = tongue_scan_with(&spec, p, q, values, tol, bracket);
    for r in rows.iter().filter(|r| r.is_failed()) {
        eprintln!("warning: row a={} failed: {}", r.a, r.error.as_deref().unwrap_or(""));
    }
    let json = serde_json::to_value(&rows).expect("records serialize");
    emit(out, tongues_to_csv(&rows), json)
}

fn cmd_probe(family: &FamilyArgs, t_boundary: f64, side: &str, deltas: &[f64], tol: f64, out: &Output) -> CmdResult {
    let side: Side = side.parse()?;
    let f = catalog(&family.spec("arnold")?)?;
    let probe = matsumoto_probe(&f, t_boundary, side, deltas, tol)?;
    emit(out, probe.to_csv(), serde_json::to_value(&probe).expect("probe serializes"))?;
    if probe.truncated {
        return Err(Failure::Budget);
    }
    Ok(())
}

fn cmd_conjugacy(family: &FamilyArgs, t: f64, method: Method, n: usize, q: u64, out: &Output) -> CmdResult {
    let f = catalog(&family.spec("dehn")?)?;
    let (table, alpha): (MonotoneTable, Option<f64>) = match method {
        Method::Orbit => {
            let s = build_global_conjugacy(&f, &[t], n)?.remove(0);
            (s.table, Some(s.alpha))
        }
        Method::Integral => (integral_conjugacy(&f, t, q, n)?, None),
    };
    let defect = alpha.map(|a| conjugacy_defect(&f.at(t), &table, a, 1000));
    let json = json!({
        "t": t,
        "alpha": alpha,
        "defect": defect,
        "x": table.xs(),
        "y": table.ys(),
    });
    emit(out, table.to_csv(), json)
}

fn cmd_continuity(family: &FamilySpec, grid: &[f64], n: usize, samples: usize, out: &Output) -> CmdResult {
    let f = catalog(family)?;
    let tables = build_global_conjugacy(&f, grid, n)?;
    let report = continuity_modulus(&tables, samples);
    emit(out, report.to_csv(), serde_json::to_value(&report).expect("report serializes"))
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Rho {
            family,
            t,
            tol,
            q_max,
            budget,
            out,
        } => cmd_rho(&family, t, tol, q_max, budget, &out),
        Command::Drho {
            family,
            t0,
            p,
            q,
            quad_n,
            h,
            tol,
            out,
        } => {
            let f = catalog(&family.spec("dehn")?)?;
            let report = derivative_report(&f, t0, p, q, quad_n, h, tol)?;
            if report.status.as_str() != "ok" {
                eprintln!("warning: {}", report.status.as_str());
            }
            emit(&out, report.to_csv(), serde_json::to_value(&report).expect("report serializes"))
        }
        Command::Tongue {
            family,
            beta,
            g,
            spec_file,
            p,
            q,
            values,
            tol,
            bracket,
            out,
        } => {
            let family = FamilyArgs {
                family,
                a: None,
                c: None,
                beta,
                g,
                spec_file,
            };
            cmd_tongue(&family, p, q, &values, tol, bracket.as_deref(), &out)
        }
        Command::Probe {
            family,
            t_boundary,
            side,
            deltas,
            tol,
            out,
        } => cmd_probe(&family, t_boundary, &side, &deltas, tol, &out),
        Command::Conjugacy {
            family,
            t,
            method,
            n,
            q,
            out,
        } => cmd_conjugacy(&family, t, method, n, q, &out),
        Command::DehnCheck {
            c,
            grid,
            span,
            n,
            samples,
            out,
        } => {
            let (lo, hi) = parse_span(&span)?;
            if grid < 2 {
                return Err(Failure::Config("--grid needs at least 2 points".into()));
            }
            cmd_continuity(&FamilySpec::dehn(c), &irrational_grid(lo, hi, grid), n, samples, &out)
        }
        Command::Example8 { k, n, samples, out } => {
            let k = k as f64;
            let grid = [2.0 / ((4.0 * k + 3.0) * PI), 2.0 / ((4.0 * k + 1.0) * PI)];
            cmd_continuity(&FamilySpec::example8(), &grid, n, samples, &out)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("ROTNUM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("ROTNUM_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli));
    let (code, kind, message) = match result {
        Ok(()) => return ExitCode::SUCCESS,
        Err(Failure::Budget) => (3, "budget_exceeded", "iteration budget exhausted; output is partial".to_string()),
        Err(Failure::Config(m)) => (2, "invalid_config", m),
        Err(Failure::Io(m)) => (1, "io", m),
        Err(Failure::Core(e)) => {
            let code = if e.is_config() {
                2
            } else if matches!(e, Error::BudgetExceeded { .. }) {
                3
            } else {
                1
            };
            (code, e.kind(), e.to_string())
        }
    };
    eprintln!("error: kind={kind} message={}", message.replace('\n', " "));
    ExitCode::from(code)
}
