use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::sample_points;
use super::spec::RunSpec;
use super::suites::{measure_point, measure_region, Measurement, Suite};
use crate::error::{Error, Result};
use crate::finsler::DwGeometry;
use crate::geometry::ENGINE_ORDER;
use crate::sample::TangentSample;

/// One residual of one check at one point (or for the whole region when `point` is absent).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub check: String,
    pub point: Option<usize>,
    /// Absent when evaluation failed.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Option<usize>,
    pub sample: Option<TangentSample>,
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub tolerance: f64,
    pub max_residual: Option<f64>,
    pub pass: usize,
    pub fail: usize,
    /// Worst failing entry.
    pub witness: Option<Witness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    /// Failed, and the run spec declares the failure.
    ExpectedFail,
    /// Passed although the run spec declares a failure.
    UnexpectedPass,
    Skipped,
}

impl Outcome {
    pub fn as_expected(self) -> bool {
        matches!(self, Outcome::Pass | Outcome::ExpectedFail | Outcome::Skipped)
    }

    fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "FAIL",
            Outcome::ExpectedFail => "expected-fail",
            Outcome::UnexpectedPass => "UNEXPECTED-PASS",
            Outcome::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub suite: Suite,
    pub expected_failure: bool,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub checks: Vec<CheckSummary>,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineInfo {
    pub jet_order: usize,
    pub seed: u64,
    pub points: usize,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub entries: usize,
    pub pass_count: usize,
    pub fail_count: usize,
    /// Every suite outcome matches the declared expectations.
    pub as_expected: bool,
    pub unexpected: Vec<Suite>,
    /// Keyed by `suite.check`.
    pub max_residual: BTreeMap<String, Option<f64>>,
}

/// The part of a report that is a pure function of the run spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diffable {
    pub config_id: String,
    pub engine: EngineInfo,
    pub points: Vec<TangentSample>,
    pub suites: Vec<SuiteRecord>,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub generated_unix: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub diffable: Diffable,
    pub meta: Meta,
}

impl DiagnosticsReport {
    pub fn suite(&self, s: Suite) -> Option<&SuiteRecord> {
        self.diffable.suites.iter().find(|r| r.suite == s)
    }

    pub fn exit_code(&self) -> i32 {
        if self.diffable.summary.as_expected {
            0
        } else {
            1
        }
    }
}

impl SuiteRecord {
    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.check == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

fn entries_from(
    spec: &RunSpec,
    suite: Suite,
    point: Option<usize>,
    r: &Result<Vec<Measurement>>,
) -> Vec<Entry> {
    match r {
        Ok(ms) => ms
            .iter()
            .map(|x| {
                let tolerance = spec.tolerance(suite, x.check);
                let finite = x.residual.is_finite();
                Entry {
                    check: x.check.to_string(),
                    point,
                    residual: finite.then_some(x.residual),
                    tolerance,
                    pass: finite && x.residual <= tolerance,
                    detail: x.detail.clone(),
                    error: (!finite).then(|| "non-finite residual".to_string()),
                }
            })
            .collect(),
        Err(e) => suite
            .checks()
            .iter()
            .map(|(c, _)| Entry {
                check: c.to_string(),
                point,
                residual: None,
                tolerance: spec.tolerance(suite, c),
                pass: false,
                detail: None,
                error: Some(e.to_string()),
            })
            .collect(),
    }
}

fn summarize(suite: Suite, entries: &[Entry], points: &[TangentSample]) -> Vec<CheckSummary> {
    suite
        .checks()
        .iter()
        .filter_map(|(name, _)| {
            let es: Vec<&Entry> = entries.iter().filter(|e| e.check == *name).collect();
            if es.is_empty() {
                return None;
            }
            let max_residual = if es.iter().all(|e| e.residual.is_some()) {
                Some(es.iter().filter_map(|e| e.residual).fold(0.0, f64::max))
            } else {
                None
            };
            let worst = es
                .iter()
                .filter(|e| !e.pass)
                .max_by(|a, b| a.residual.unwrap_or(f64::INFINITY).total_cmp(&b.residual.unwrap_or(f64::INFINITY)));
            Some(CheckSummary {
                check: name.to_string(),
                tolerance: es[0].tolerance,
                max_residual,
                pass: es.iter().filter(|e| e.pass).count(),
                fail: es.iter().filter(|e| !e.pass).count(),
                witness: worst.map(|e| Witness {
                    point: e.point,
                    sample: e.point.map(|i| points[i].clone()),
                    residual: e.residual,
                    detail: e.detail.clone().or_else(|| e.error.clone()),
                }),
            })
        })
        .collect()
}

/// Runs the selected suites over the sampled points.
pub fn run_suites(spec: &RunSpec) -> Result<DiagnosticsReport> {
    let points = sample_points(spec)?;
    run_suites_on(spec, &points)
}

/// Runs the selected suites over explicit points.
pub fn run_suites_on(spec: &RunSpec, points: &[TangentSample]) -> Result<DiagnosticsReport> {
    for p in points {
        if p.n1() != spec.config.n1() || p.n2() != spec.config.n2() {
            return Err(Error::Dimension("sample does not match configuration dimensions".into()));
        }
    }
    let engines: Vec<Result<DwGeometry>> = if spec.suites.is_empty() {
        Vec::new()
    } else {
        points.par_iter().map(|p| DwGeometry::new(&spec.config, p)).collect()
    };
    let mut suites = Vec::with_capacity(spec.suites.len());
    for &suite in &spec.suites {
        let expected_failure = spec.is_expected_failure(suite);
        if let Some(reason) = suite.not_applicable(&spec.config, points.len()) {
            suites.push(SuiteRecord {
                suite,
                expected_failure,
                outcome: Outcome::Skipped,
                skipped: Some(reason),
                checks: vec![],
                entries: vec![],
            });
            continue;
        }
        let per: Vec<Result<Vec<Measurement>>> = engines
            .par_iter()
            .map(|e| match e {
                Ok(d) => measure_point(suite, d),
                Err(err) => Err(err.clone()),
            })
            .collect();
        let mut entries: Vec<Entry> =
            per.iter().enumerate().flat_map(|(i, r)| entries_from(spec, suite, Some(i), r)).collect();
        let ok: Vec<Vec<Measurement>> = per.into_iter().filter_map(|r| r.ok()).collect();
        let tol = |c: &str| spec.tolerance(suite, c);
        let region = measure_region(suite, &spec.config, points, &ok, &tol);
        if !matches!(&region, Ok(v) if v.is_empty()) {
            entries.extend(entries_from(spec, suite, None, &region));
            // a region-level error yields entries for every check; keep only the region ones
            if region.is_err() {
                let point_checks: Vec<String> = entries.iter().filter(|e| e.point.is_some()).map(|e| e.check.clone()).collect();
                entries.retain(|e| e.point.is_some() || !point_checks.contains(&e.check));
            }
        }
        let failed = entries.iter().any(|e| !e.pass);
        let outcome = match (failed, expected_failure) {
            (false, false) => Outcome::Pass,
            (false, true) => Outcome::UnexpectedPass,
            (true, true) => Outcome::ExpectedFail,
            (true, false) => Outcome::Fail,
        };
        suites.push(SuiteRecord { suite, expected_failure, outcome, skipped: None, checks: summarize(suite, &entries, points), entries });
    }

    let all: Vec<&Entry> = suites.iter().flat_map(|s| &s.entries).collect();
    let unexpected: Vec<Suite> = suites.iter().filter(|s| !s.outcome.as_expected()).map(|s| s.suite).collect();
    let max_residual = suites
        .iter()
        .flat_map(|s| s.checks.iter().map(move |c| (format!("{}.{}", s.suite.name(), c.check), c.max_residual)))
        .collect();
    let summary = Summary {
        entries: all.len(),
        pass_count: all.iter().filter(|e| e.pass).count(),
        fail_count: all.iter().filter(|e| !e.pass).count(),
        as_expected: unexpected.is_empty(),
        unexpected,
        max_residual,
    };
    let generated_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(DiagnosticsReport {
        diffable: Diffable {
            config_id: spec.config_id.clone(),
            engine: EngineInfo {
                jet_order: ENGINE_ORDER,
                seed: spec.sampling.seed,
                points: points.len(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            points: points.to_vec(),
            suites,
            summary,
        },
        meta: Meta { generated_unix },
    })
}

fn sci(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "error".into())
}

fn fmt_point(p: &TangentSample) -> String {
    let v = |a: &[f64]| a.iter().map(|t| format!("{t:.6}")).collect::<Vec<_>>().join(", ");
    format!("x=({}) u=({}) y=({}) v=({})", v(&p.x), v(&p.u), v(&p.y), v(&p.v))
}

fn render_text(r: &DiagnosticsReport) -> String {
    let d = &r.diffable;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "config {}  seed {}  points {}  jet order {}",
        d.config_id, d.engine.seed, d.engine.points, d.engine.jet_order
    );
    let _ = writeln!(out, "{:<24} {:<16} {:<24} {:>12} {:>12}", "suite", "outcome", "check", "max residual", "tolerance");
    for s in &d.suites {
        if let Some(reason) = &s.skipped {
            let _ = writeln!(out, "{:<24} {:<16} {reason}", s.suite.name(), s.outcome.label());
            continue;
        }
        // the first failing check, else the headline one
        let Some(c) = s.checks.iter().find(|c| c.fail > 0).or(s.checks.first()) else {
            let _ = writeln!(out, "{:<24} {:<16}", s.suite.name(), s.outcome.label());
            continue;
        };
        let _ = writeln!(
            out,
            "{:<24} {:<16} {:<24} {:>12} {:>12}",
            s.suite.name(),
            s.outcome.label(),
            c.check,
            sci(c.max_residual),
            format!("{:.1e}", c.tolerance)
        );
        for c in s.checks.iter().filter(|c| c.fail > 0) {
            if let Some(w) = &c.witness {
                let at = match &w.sample {
                    Some(p) => fmt_point(p),
                    None => "region".into(),
                };
                let detail = w.detail.as_deref().map(|t| format!(" [{t}]")).unwrap_or_default();
                let _ = writeln!(out, "    {} witness {} at {at}{detail}", c.check, sci(w.residual));
            }
        }
    }
    let sm = &d.summary;
    let _ = writeln!(out, "{} entries: {} pass, {} fail", sm.entries, sm.pass_count, sm.fail_count);
    if sm.as_expected {
        let _ = writeln!(out, "all verdicts as expected");
    } else {
        let names: Vec<&str> = sm.unexpected.iter().map(|s| s.name()).collect();
        let _ = writeln!(out, "unexpected verdicts: {}", names.join(", "));
    }
    out
}

pub fn emit_report(r: &DiagnosticsReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(r).expect("report serializes"),
        Format::Text => render_text(r),
    }
}

/// The diffable section alone, as stable-keyed JSON.
pub fn diffable_json(r: &DiagnosticsReport) -> String {
    serde_json::to_string_pretty(&r.diffable).expect("report serializes")
}

pub fn parse_report(text: &str) -> Result<DiagnosticsReport> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Spec { path: e.path().to_string(), message: e.into_inner().to_string() })
}
