use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use markov_infogeom::families::{
    ExperimentReport, FamilyTag, MHULL_DEFAULT_EPSILON, counterexample_report, ehull_report,
    family_residual, mhull_report,
};
use markov_infogeom::geometry::{e_geodesic, expectation_coords, m_geodesic, natural_coords};
use markov_infogeom::io::{coords_to_value, kernel_to_value, read_kernel, to_json_string};
use markov_infogeom::models::{edge_walk, lazy_cycle};
use markov_infogeom::perron::PositiveEdgeFunction;
use markov_infogeom::projections::{
    Divergence, ProjectionMode, bisection_check, kl_divergence, project, pythagorean_residual,
};
use markov_infogeom::reversibility::{
    DEFAULT_TOL, KOLMOGOROV_MAX_STATES, balance_residual, kolmogorov_residual,
    pf_symmetry_residual,
};
use markov_infogeom::{Error, Kernel, stationary_distribution, time_reversal};
use serde_json::{Map, Value, json};

const EHULL_SAMPLES: usize = 40;

#[derive(Debug, Parser)]
#[command(name = "markov-geom", version, about = "Information geometry of Markov kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test a kernel for reversibility.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Time reversal P*.
    Reverse {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// m- or e-projection onto the reversible family.
    Project {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[command(flatten)]
        out: Output,
    },
    /// Information divergence D(p1 ‖ p2).
    Divergence { p1: PathBuf, p2: PathBuf },
    /// Points on the e- or m-geodesic between two kernels.
    Geodesic {
        p0: PathBuf,
        p1: PathBuf,
        #[arg(long, value_enum)]
        kind: Mode,
        #[command(flatten)]
        at: GeodesicPoints,
    },
    /// Natural or expectation coordinates of a reversible kernel.
    Coords {
        file: PathBuf,
        #[arg(long, value_enum)]
        chart: Chart,
    },
    /// Stationary distribution.
    Stationary { file: PathBuf },
    /// Membership in one of the remarkable families.
    Family {
        file: PathBuf,
        #[arg(long, value_enum)]
        test: Family,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Built-in experiments and worked examples.
    Demo {
        #[arg(value_enum)]
        name: Demo,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct Output {
    /// Write the kernel to this file instead of standard output.
    #[arg(short = 'o', long = "out")]
    path: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct GeodesicPoints {
    #[arg(long)]
    t: Option<f64>,
    /// Emit the N + 1 points t = 0, 1/N, ..., 1.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Balance,
    Pf,
    Kolmogorov,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    M,
    E,
}

impl From<Mode> for ProjectionMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::M => ProjectionMode::M,
            Mode::E => ProjectionMode::E,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Chart {
    Natural,
    Expectation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Rev,
    Sym,
    Bis,
    Iid,
}

impl From<Family> for FamilyTag {
    fn from(f: Family) -> Self {
        match f {
            Family::Rev => FamilyTag::Reversible,
            Family::Sym => FamilyTag::Symmetric,
            Family::Bis => FamilyTag::Bistochastic,
            Family::Iid => FamilyTag::Memoryless,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Demo {
    Hulls,
    Counterexample,
    Lazycycle,
}

/// Why a run did not finish with a result.
#[derive(Debug)]
enum Failure {
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

/// A JSON payload and the verdict it carries, if any.
struct Outcome {
    payload: Value,
    verdict: Option<bool>,
}

impl Outcome {
    fn plain(payload: Value) -> Self {
        Self { payload, verdict: None }
    }

    fn verdict(payload: Value, verdict: bool) -> Self {
        Self { payload, verdict: Some(verdict) }
    }
}

fn write_kernel(kernel: &Kernel, out: &Output) -> Result<Outcome, Failure> {
    let value = kernel_to_value(kernel);
    match &out.path {
        Some(path) => {
            write_file(path, &value)?;
            Ok(Outcome::plain(json!({"written": path.display().to_string()})))
        }
        None => Ok(Outcome::plain(value)),
    }
}

fn write_file(path: &Path, value: &Value) -> Result<(), Failure> {
    std::fs::write(path, to_json_string(value) + "\n")
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn residual_value(r: f64) -> Value {
    if r.is_finite() { r.into() } else { "infinity".into() }
}

fn check(kernel: &Kernel, method: Method, tol: f64) -> Result<Outcome, Failure> {
    let h = PositiveEdgeFunction::from(kernel);
    let single = |name: &str, residual: f64| {
        let reversible = residual <= tol;
        Outcome::verdict(
            json!({"reversible": reversible, "method": name, "residual": residual_value(residual)}),
            reversible,
        )
    };
    match method {
        Method::Balance => Ok(single("balance", balance_residual(kernel)?)),
        Method::Pf => {
            let r = if kernel.support().is_symmetric() {
                pf_symmetry_residual(&h)?
            } else {
                f64::INFINITY
            };
            Ok(single("pf", r))
        }
        Method::Kolmogorov => Ok(single("kolmogorov", kolmogorov_residual(&h)?)),
        Method::All => {
            let mut residuals = Map::new();
            residuals.insert("balance".into(), residual_value(balance_residual(kernel)?));
            let pf = if kernel.support().is_symmetric() {
                pf_symmetry_residual(&h)?
            } else {
                f64::INFINITY
            };
            residuals.insert("pf".into(), residual_value(pf));
            if kernel.size() <= KOLMOGOROV_MAX_STATES {
                residuals.insert("kolmogorov".into(), residual_value(kolmogorov_residual(&h)?));
            }
            let verdicts: Map<String, Value> = residuals
                .iter()
                .map(|(k, v)| (k.clone(), Value::Bool(v.as_f64().is_some_and(|r| r <= tol))))
                .collect();
            let values: Vec<bool> = verdicts.values().map(|v| v == &Value::Bool(true)).collect();
            let reversible = values[0];
            let payload = json!({
                "reversible": reversible,
                "method": "all",
                "residual": residuals["balance"],
                "verdicts": verdicts,
                "residuals": residuals,
            });
            if values.iter().any(|&v| v != reversible) {
                println!("{}", to_json_string(&payload));
                return Err(Failure::Numerical(
                    "reversibility tests disagree".into(),
                ));
            }
            Ok(Outcome::verdict(payload, reversible))
        }
    }
}

fn project_with_sample(kernel: &Kernel, mode: Mode, out: &Output) -> Result<Outcome, Failure> {
    let projected = project(kernel, mode.into())?;
    let reference = edge_walk(projected.support())?;
    let residual = pythagorean_residual(kernel, &reference, mode.into())?;
    let mut outcome = write_kernel(&projected, out)?;
    if let Value::Object(map) = &mut outcome.payload {
        map.insert("pythagorean_residual_sample".into(), residual.into());
    }
    Ok(outcome)
}

fn divergence_value(d: Divergence) -> Value {
    match d {
        Divergence::Finite(v) => json!({"value": v}),
        Divergence::Infinite => json!({"value": "infinity"}),
    }
}

fn geodesic(p0: &Kernel, p1: &Kernel, kind: Mode, at: &GeodesicPoints) -> Result<Outcome, Failure> {
    let point = |t: f64| match kind {
        Mode::E => e_geodesic(p0, p1, t),
        Mode::M => m_geodesic(p0, p1, t),
    };
    if let Some(t) = at.t {
        if !t.is_finite() {
            return Err(Failure::Input(format!("--t {t} is not finite")));
        }
        return Ok(Outcome::plain(kernel_to_value(&point(t)?)));
    }
    let steps = at.steps.unwrap_or(1);
    if steps == 0 {
        return Err(Failure::Input("--steps must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let mut value = kernel_to_value(&point(t)?);
        if let Value::Object(map) = &mut value {
            map.insert("t".into(), t.into());
        }
        points.push(value);
    }
    Ok(Outcome::plain(Value::Array(points)))
}

fn lazycycle_report(m: usize) -> Result<ExperimentReport, Failure> {
    let theta2 = 2f64.ln();
    let p = lazy_cycle(m, 0.0, theta2)?;
    let star = time_reversal(&p)?;
    let pm = project(&p, ProjectionMode::M)?;
    let pe = project(&p, ProjectionMode::E)?;
    let d = kl_divergence(&p, &pm)?;
    let (m_gap, e_gap) = bisection_check(&p)?;
    let mut worst = star.max_abs_diff(&lazy_cycle(m, 0.0, -theta2)?);
    for x in 0..m {
        let next = (x + 1) % m;
        worst = worst
            .max((pm.get(x, x) - 2.0 / 7.0).abs())
            .max((pm.get(x, next) - 5.0 / 14.0).abs())
            .max((pm.get(next, x) - 5.0 / 14.0).abs())
            .max((pe.get(x, x) - 1.0 / 3.0).abs())
            .max((pe.get(x, next) - 1.0 / 3.0).abs())
            .max((pe.get(next, x) - 1.0 / 3.0).abs());
    }
    Ok(ExperimentReport::new(
        "lazycycle",
        json!({"m": m, "theta": [0.0, theta2]}),
        worst <= 1e-12,
    )
    .with("kernel", kernel_to_value(&p))
    .with("reversal", kernel_to_value(&star))
    .with("m_projection", kernel_to_value(&pm))
    .with("e_projection", kernel_to_value(&pe))
    .with("divergence_to_m_projection", divergence_value(d)["value"].clone())
    .with("bisection_gaps", json!([m_gap, e_gap]))
    .with("max_closed_form_error", json!(worst)))
}

fn demo(name: Demo, m: usize, seed: u64) -> Result<Outcome, Failure> {
    let reports = match name {
        Demo::Hulls => vec![
            ehull_report(m, EHULL_SAMPLES, seed)?,
            mhull_report(m, MHULL_DEFAULT_EPSILON)?,
        ],
        Demo::Counterexample => vec![counterexample_report()?],
        Demo::Lazycycle => vec![lazycycle_report(m)?],
    };
    let pass = reports.iter().all(|r| r.pass);
    let payload = if reports.len() == 1 {
        reports[0].to_value()
    } else {
        Value::Array(reports.iter().map(ExperimentReport::to_value).collect())
    };
    Ok(Outcome::verdict(payload, pass))
}

fn execute(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Check { file, method, tol } => check(&read_kernel(file)?, method, tol),
        Command::Reverse { file, out } => write_kernel(&time_reversal(&read_kernel(file)?)?, &out),
        Command::Project { file, mode, out } => project_with_sample(&read_kernel(file)?, mode, &out),
        Command::Divergence { p1, p2 } => Ok(Outcome::plain(divergence_value(kl_divergence(
            &read_kernel(p1)?,
            &read_kernel(p2)?,
        )?))),
        Command::Geodesic { p0, p1, kind, at } => {
            geodesic(&read_kernel(p0)?, &read_kernel(p1)?, kind, &at)
        }
        Command::Coords { file, chart } => {
            let kernel = read_kernel(file)?;
            let value = match chart {
                Chart::Natural => coords_to_value(&natural_coords(&kernel)?.0),
                Chart::Expectation => coords_to_value(&expectation_coords(&kernel)?.0),
            };
            Ok(Outcome::plain(value))
        }
        Command::Stationary { file } => {
            let pi = stationary_distribution(&read_kernel(file)?)?;
            Ok(Outcome::plain(json!({"pi": pi.as_slice()})))
        }
        Command::Family { file, test, tol } => {
            let residual = family_residual(&read_kernel(file)?, test.into())?;
            let member = residual <= tol;
            Ok(Outcome::verdict(
                json!({"member": member, "family": FamilyTag::from(test).short_name(), "residual": residual}),
                member,
            ))
        }
        Command::Demo { name, m, seed } => demo(name, m, seed),
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", json!({"error": kind, "message": message}));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("").trim_start_matches("error: ");
            return fail("usage", first, 2);
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            println!("{}", to_json_string(&outcome.payload));
            match outcome.verdict {
                Some(false) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Input(message)) => fail("input", &message, 2),
        Err(Failure::Numerical(message)) => fail("numerical", &message, 3),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("markov-geom").chain(args.iter().copied()))
    }

    #[test]
    fn check_with_method() {
        let cli = parse(&["check", "p.json", "--method", "pf"]).unwrap();
        match cli.command {
            Command::Check { file, method, tol } => {
                assert_eq!(file, PathBuf::from("p.json"));
                assert_eq!(method, Method::Pf);
                assert_eq!(tol, DEFAULT_TOL);
            }
            other => panic!("parsed {other:?}"),
        }
    }

    #[test]
    fn bad_mode_is_rejected() {
        let err = parse(&["project", "p.json", "--mode", "x"]).unwrap_err();
        assert!(err.to_string().contains("'x'"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn geodesic_point() {
        let cli = parse(&["geodesic", "a.json", "b.json", "--kind", "e", "--t", "0.5"]).unwrap();
        match cli.command {
            Command::Geodesic { kind, at, .. } => {
                assert_eq!(kind, Mode::E);
                assert_eq!(at.t, Some(0.5));
                assert_eq!(at.steps, None);
            }
            other => panic!("parsed {other:?}"),
        }
    }

    #[test]
    fn geodesic_needs_exactly_one_of_t_and_steps() {
        assert!(parse(&["geodesic", "a", "b", "--kind", "m"]).is_err());
        assert!(parse(&["geodesic", "a", "b", "--kind", "m", "--t", "0.1", "--steps", "3"]).is_err());
    }

    #[test]
    fn unknown_flag_is_rejected() {
        let err = parse(&["stationary", "p.json", "--frobnicate"]).unwrap_err();
        assert!(err.to_string().contains("--frobnicate"));
    }
}
