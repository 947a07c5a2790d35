use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use dwfinsler::connection::SprayPath;
use dwfinsler::lab::{self, Format, RunSpec, Suite};
use dwfinsler::metric::{fixture_description, FIXTURES};
use dwfinsler::{DwGeometry, Error, TangentSample};

#[derive(Parser)]
#[command(name = "dwf", version, about = "Doubly warped product Finsler geometry: evaluation and verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print tensors at given or sampled points.
    Eval(EvalArgs),
    /// Run verification suites and report residuals.
    Verify(VerifyArgs),
    /// List the built-in configurations.
    Fixtures {
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Re-render a stored JSON report.
    Report {
        path: PathBuf,
        /// Print JSON instead of the text table.
        #[arg(long)]
        as_json: bool,
    },
}

#[derive(Args)]
struct Source {
    /// Run-spec document (JSON).
    #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
    spec: Option<PathBuf>,
    /// Built-in configuration name.
    #[arg(long)]
    fixture: Option<String>,
    /// Sampling seed; overrides the document's, and is 0 for a fixture when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sampled points.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    /// Suite to run; repeatable. Defaults to the document's list, or all suites for a fixture.
    #[arg(long = "suite")]
    suites: Vec<String>,
    /// Tolerance override `suite=value` or `suite.check=value`; repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    tols: Vec<(String, f64)>,
    /// Write the full JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    source: Source,
    /// Explicit point `x1,..;u1,..;y1,..;v1,..`; repeatable. Overrides sampling.
    #[arg(long = "at", allow_hyphen_values = true)]
    at: Vec<String>,
    /// Tensor to print; repeatable (`all` for every one).
    #[arg(long = "tensor")]
    tensors: Vec<String>,
    #[arg(long)]
    json: Option<PathBuf>,
}

const TENSORS: &[&str] = &[
    "f2",
    "g",
    "ginv",
    "angular",
    "cartan",
    "mean-cartan",
    "matsumoto",
    "spray",
    "nonlinear",
    "berwald-connection",
    "horizontal",
    "bracket",
    "berwald",
    "hh",
    "riemann-map",
    "lifted-metric",
];

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected name=value")?;
    let v: f64 = value.trim().parse().map_err(|e| format!("bad tolerance `{value}`: {e}"))?;
    Ok((name.trim().to_string(), v))
}

fn usage(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("dwf: {e}");
    ExitCode::from(2)
}

fn load(src: &Source) -> Result<RunSpec, Error> {
    let mut spec = match (&src.spec, &src.fixture) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Spec { path: path.display().to_string(), message: e.to_string() })?;
            lab::parse_spec(&text)?
        }
        (None, Some(name)) => RunSpec::from_fixture(name, src.seed.unwrap_or(0))?,
        (None, None) => return Err(Error::InvalidConfig("one of --spec or --fixture is required".into())),
    };
    if let Some(seed) = src.seed {
        spec.sampling.seed = seed;
    }
    if let Some(n) = src.points {
        spec.sampling.count = n;
    }
    spec.sampling.validate(spec.config.n())?;
    Ok(spec)
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Spec { path: path.display().to_string(), message: e.to_string() })
}

fn verify(a: VerifyArgs) -> ExitCode {
    let mut spec = match load(&a.source) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    if !a.suites.is_empty() {
        match a.suites.iter().map(|s| Suite::parse(s)).collect::<Result<Vec<_>, _>>() {
            Ok(s) => spec.suites = s,
            Err(e) => return usage(e),
        }
    }
    if let Err(e) = spec.set_tolerances(&a.tols) {
        return usage(e);
    }
    let report = match lab::run_suites(&spec) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    print!("{}", lab::emit_report(&report, Format::Text));
    if let Some(p) = &a.json {
        if let Err(e) = write(p, &lab::emit_report(&report, Format::Json)) {
            return usage(e);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}

fn parse_point(s: &str, n1: usize, n2: usize) -> Result<TangentSample, Error> {
    let groups: Vec<&str> = s.split(';').collect();
    if groups.len() != 4 {
        return Err(Error::InvalidConfig(format!("point `{s}` needs four groups x;u;y;v")));
    }
    let nums = |g: &str| -> Result<Vec<f64>, Error> {
        g.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::InvalidConfig(format!("bad number `{t}`: {e}"))))
            .collect()
    };
    let p = TangentSample::new(nums(groups[0])?, nums(groups[1])?, nums(groups[2])?, nums(groups[3])?)?;
    if p.n1() != n1 || p.n2() != n2 {
        return Err(Error::Dimension(format!("point has dims ({}, {}), configuration ({n1}, {n2})", p.n1(), p.n2())));
    }
    Ok(p)
}

fn tensor_value(d: &DwGeometry, name: &str) -> Result<Value, Error> {
    let to = |v: &dyn erased::Ser| v.value();
    Ok(match name {
        "f2" => json!(d.f2_value()),
        "g" => to(&d.fundamental_tensor().0),
        "ginv" => to(&d.fundamental_tensor().1),
        "angular" => to(&d.angular_metric()),
        "cartan" => to(&d.cartan_tensor()),
        "mean-cartan" => to(&d.mean_cartan()),
        "matsumoto" => to(&d.matsumoto_torsion()?),
        "spray" => to(&d.spray(SprayPath::Generic)?),
        "nonlinear" => to(&d.nonlinear_connection()),
        "berwald-connection" => to(&d.frame_brackets().1),
        "horizontal" => to(&d.horizontal_coefficients()),
        "bracket" => to(&d.frame_brackets().0),
        "berwald" => to(&d.berwald_curvature()),
        "hh" => to(&d.hh_curvature()),
        "riemann-map" => to(&d.riemann_map()),
        "lifted-metric" => to(&d.lifted_metric()),
        other => return Err(Error::InvalidConfig(format!("unknown tensor `{other}`; known: {}", TENSORS.join(", ")))),
    })
}

mod erased {
    use serde::Serialize;
    use serde_json::Value;

    pub trait Ser {
        fn value(&self) -> Value;
    }

    impl<T: Serialize> Ser for T {
        fn value(&self) -> Value {
            serde_json::to_value(self).expect("tensor serializes")
        }
    }
}

fn eval(a: EvalArgs) -> ExitCode {
    let mut spec = match load(&a.source) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let (n1, n2) = (spec.config.n1(), spec.config.n2());
    let points = if a.at.is_empty() {
        if a.source.points.is_none() {
            spec.sampling.count = 1;
        }
        lab::sample_points(&spec)
    } else {
        a.at.iter().map(|s| parse_point(s, n1, n2)).collect()
    };
    let points = match points {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let mut names: Vec<String> = if a.tensors.is_empty() {
        ["f2", "g", "spray", "nonlinear"].iter().map(|s| s.to_string()).collect()
    } else {
        a.tensors.clone()
    };
    if names.iter().any(|t| t == "all") {
        names = TENSORS.iter().map(|s| s.to_string()).collect();
    }
    let mut out = Vec::new();
    for p in &points {
        let d = match DwGeometry::new(&spec.config, p) {
            Ok(d) => d,
            Err(e) => return usage(e),
        };
        let mut tensors = BTreeMap::new();
        for t in &names {
            match tensor_value(&d, t) {
                Ok(v) => {
                    tensors.insert(t.clone(), v);
                }
                Err(e) => return usage(e),
            }
        }
        out.push(json!({ "point": p, "tensors": tensors }));
    }
    let doc = serde_json::to_string_pretty(&json!({ "config_id": spec.config_id, "results": out })).expect("json");
    println!("{doc}");
    if let Some(path) = &a.json {
        if let Err(e) = write(path, &doc) {
            return usage(e);
        }
    }
    ExitCode::SUCCESS
}

fn fixtures(json_path: Option<PathBuf>) -> ExitCode {
    let mut rows = Vec::new();
    for name in FIXTURES {
        let desc = fixture_description(name).unwrap_or("");
        println!("{name:<8} {desc}");
        let expected: Vec<&str> = lab::fixture_expected_failures(name).iter().map(|s| s.name()).collect();
        rows.push(json!({ "name": name, "description": desc, "expected_failures": expected }));
    }
    if let Some(p) = json_path {
        let doc = serde_json::to_string_pretty(&rows).expect("json");
        if let Err(e) = write(&p, &doc) {
            return usage(e);
        }
    }
    ExitCode::SUCCESS
}

fn report(path: &Path, as_json: bool) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return usage(format!("{}: {e}", path.display())),
    };
    let r = match lab::parse_report(&text) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    let format = if as_json { Format::Json } else { Format::Text };
    print!("{}", lab::emit_report(&r, format));
    if as_json {
        println!();
    }
    ExitCode::from(r.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Eval(a) => eval(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Fixtures { json } => fixtures(json),
        Cmd::Report { path, as_json } => report(&path, as_json),
    }
}
