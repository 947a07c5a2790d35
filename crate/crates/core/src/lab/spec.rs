//! Run-spec documents: a product configuration, a sampling plan, suite
//! selection, declared expected failures and tolerance overrides.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::suites::Suite;
use crate::error::{Error, Result};
use crate::metric::{fixture, FactorMetricSpec, Polynomial, ProductConfig, WarpSpec};

pub const DEFAULT_COUNT: usize = 25;
pub const DEFAULT_BOX: [f64; 2] = [-1.0, 1.0];
pub const DEFAULT_RADII: [f64; 2] = [0.5, 2.0];
/// Admissible range for fiber radii.
pub const RADIUS_LIMITS: [f64; 2] = [1e-6, 1e6];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    factors: Vec<FactorDoc>,
    warps: WarpsDoc,
    sampling: SamplingDoc,
    #[serde(default)]
    suites: Vec<String>,
    #[serde(default)]
    expected_failures: Vec<String>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FactorKind {
    Euclidean,
    RiemannianQuadratic,
    Randers,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorDoc {
    kind: FactorKind,
    dim: usize,
    #[serde(default)]
    parameters: FactorParams,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorParams {
    /// Row-major polynomial matrix of a quadratic metric (or a Randers base).
    entries: Option<Vec<Vec<Polynomial>>>,
    b: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WarpsDoc {
    f1: WarpDoc,
    f2: WarpDoc,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum WarpKind {
    Constant,
    PolyQuadratic,
    Exponential,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WarpDoc {
    kind: WarpKind,
    #[serde(default)]
    parameters: WarpParams,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct WarpParams {
    value: Option<f64>,
    a: Option<Vec<f64>>,
    k: Option<f64>,
    axis: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BoxDoc {
    Uniform([f64; 2]),
    PerCoordinate(Vec<[f64; 2]>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplingDoc {
    seed: u64,
    #[serde(default)]
    count: Option<usize>,
    #[serde(default, rename = "box")]
    bbox: Option<BoxDoc>,
    #[serde(default)]
    radii: Option<[f64; 2]>,
}

/// Deterministic sampling plan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sampling {
    pub seed: u64,
    pub count: usize,
    /// Bounds for each base coordinate `(x, u)`.
    pub bounds: Vec<[f64; 2]>,
    pub radii: [f64; 2],
}

impl Sampling {
    /// Default box and radii for an `n`-dimensional base.
    pub fn with_defaults(seed: u64, n: usize) -> Self {
        Sampling { seed, count: DEFAULT_COUNT, bounds: vec![DEFAULT_BOX; n], radii: DEFAULT_RADII }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.count == 0 {
            return Err(spec_err("sampling.count", "count must be ≥ 1"));
        }
        if self.bounds.len() != n {
            return Err(spec_err("sampling.box", format!("expected {n} coordinate bounds, got {}", self.bounds.len())));
        }
        for (i, [lo, hi]) in self.bounds.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(spec_err(&format!("sampling.box[{i}]"), format!("bounds must be finite with lo ≤ hi, got [{lo}, {hi}]")));
            }
        }
        let [r0, r1] = self.radii;
        if !(RADIUS_LIMITS[0] <= r0 && r0 <= r1 && r1 <= RADIUS_LIMITS[1]) {
            return Err(spec_err(
                "sampling.radii",
                format!("radius range [{r0}, {r1}] must satisfy {:e} ≤ lo ≤ hi ≤ {:e}", RADIUS_LIMITS[0], RADIUS_LIMITS[1]),
            ));
        }
        Ok(())
    }
}

/// A validated run description.
#[derive(Clone, Debug)]
pub struct RunSpec {
    /// Fixture name, or a tag describing an inline configuration.
    pub config_id: String,
    pub config: ProductConfig,
    pub sampling: Sampling,
    pub suites: Vec<Suite>,
    pub expected_failures: Vec<Suite>,
    /// Tolerance overrides keyed by `suite` (all its checks) or `suite.check`.
    pub tolerances: BTreeMap<String, f64>,
}

impl RunSpec {
    /// A built-in fixture with default sampling, all suites, and the failures the
    /// theorems predict for it.
    pub fn from_fixture(name: &str, seed: u64) -> Result<Self> {
        let config = fixture(name)?;
        let name = name.to_ascii_uppercase();
        let sampling = Sampling::with_defaults(seed, config.n());
        Ok(RunSpec {
            expected_failures: fixture_expected_failures(&name),
            config_id: name,
            config,
            sampling,
            suites: Suite::ALL.to_vec(),
            tolerances: BTreeMap::new(),
        })
    }

    /// Tolerance of one check: a `suite.check` override, else a `suite` override, else the default.
    pub fn tolerance(&self, suite: Suite, check: &str) -> f64 {
        let key = format!("{}.{check}", suite.name());
        self.tolerances
            .get(&key)
            .or_else(|| self.tolerances.get(suite.name()))
            .copied()
            .or_else(|| suite.default_tolerance(check))
            .unwrap_or(0.0)
    }

    /// Applies `name=value` overrides where `name` is `suite` or `suite.check`.
    pub fn set_tolerances(&mut self, pairs: &[(String, f64)]) -> Result<()> {
        for (name, value) in pairs {
            let path = format!("tolerances.{name}");
            let (suite_name, check) = match name.split_once('.') {
                Some((a, b)) => (a, Some(b)),
                None => (name.as_str(), None),
            };
            let suite = Suite::parse(suite_name).map_err(|_| spec_err(&path, format!("unknown suite `{suite_name}`")))?;
            if let Some(c) = check {
                if suite.default_tolerance(c).is_none() {
                    return Err(spec_err(&path, format!("suite `{suite}` has no check `{c}`")));
                }
            }
            if !(value.is_finite() && *value >= 0.0) {
                return Err(spec_err(&path, "tolerance must be finite and ≥ 0"));
            }
            let key = match check {
                Some(c) => format!("{}.{c}", suite.name()),
                None => suite.name().to_string(),
            };
            self.tolerances.insert(key, *value);
        }
        Ok(())
    }

    pub fn is_expected_failure(&self, suite: Suite) -> bool {
        self.expected_failures.contains(&suite)
    }
}

/// Suites that fail on a built-in fixture because the corresponding property
/// does not hold there.
pub fn fixture_expected_failures(name: &str) -> Vec<Suite> {
    match name.to_ascii_uppercase().as_str() {
        // non-Riemannian factor: not Reinhart, horizontal distribution not totally geodesic
        "FIX-R" => vec![Suite::Reinhart, Suite::Kahler, Suite::TotallyGeodesic],
        // warped with nonzero bracket curvature: not Kähler, and F ≠ G
        "FIX-E" | "FIX-1D" => vec![Suite::Kahler, Suite::TotallyGeodesic],
        _ => vec![],
    }
}

fn spec_err(path: &str, message: impl Into<String>) -> Error {
    Error::Spec { path: path.to_string(), message: message.into() }
}

fn semantic(path: &str, r: Result<impl Sized>) -> Result<()> {
    match r {
        Ok(_) => Ok(()),
        Err(e) => Err(spec_err(path, e.to_string())),
    }
}

fn build_factor(doc: &FactorDoc, path: &str) -> Result<FactorMetricSpec> {
    let FactorParams { entries, b } = &doc.parameters;
    let wrap = |r: Result<FactorMetricSpec>, sub: &str| r.map_err(|e| spec_err(&format!("{path}{sub}"), e.to_string()));
    if doc.dim == 0 {
        return Err(spec_err(&format!("{path}.dim"), "dimension must be ≥ 1"));
    }
    let quadratic = |entries: &Vec<Vec<Polynomial>>| -> Result<FactorMetricSpec> {
        if entries.len() != doc.dim {
            return Err(spec_err(&format!("{path}.parameters.entries"), format!("expected a {0}×{0} matrix", doc.dim)));
        }
        wrap(FactorMetricSpec::riemannian_quadratic(entries.clone()), ".parameters.entries")
    };
    match doc.kind {
        FactorKind::Euclidean => {
            if entries.is_some() || b.is_some() {
                return Err(spec_err(&format!("{path}.parameters"), "euclidean factors take no parameters"));
            }
            wrap(FactorMetricSpec::euclidean(doc.dim), "")
        }
        FactorKind::RiemannianQuadratic => {
            if b.is_some() {
                return Err(spec_err(&format!("{path}.parameters.b"), "b is only valid for randers factors"));
            }
            let entries = entries
                .as_ref()
                .ok_or_else(|| spec_err(&format!("{path}.parameters.entries"), "missing field `entries`"))?;
            quadratic(entries)
        }
        FactorKind::Randers => {
            let b = b.as_ref().ok_or_else(|| spec_err(&format!("{path}.parameters.b"), "missing field `b`"))?;
            let base = match entries {
                Some(e) => quadratic(e)?,
                None => FactorMetricSpec::euclidean(doc.dim)?,
            };
            wrap(FactorMetricSpec::randers(base, b.clone()), ".parameters.b")
        }
    }
}

fn build_warp(doc: &WarpDoc, path: &str) -> Result<WarpSpec> {
    let p = &doc.parameters;
    let need = |v: Option<f64>, field: &str| {
        v.ok_or_else(|| spec_err(&format!("{path}.parameters.{field}"), format!("missing field `{field}`")))
    };
    let extra = |ok: &[&str]| -> Result<()> {
        for (name, present) in [("value", p.value.is_some()), ("a", p.a.is_some()), ("k", p.k.is_some()), ("axis", p.axis.is_some())] {
            if present && !ok.contains(&name) {
                return Err(spec_err(&format!("{path}.parameters.{name}"), "not a parameter of this warp kind"));
            }
        }
        Ok(())
    };
    match doc.kind {
        WarpKind::Constant => {
            extra(&["value"])?;
            Ok(WarpSpec::Constant(need(p.value, "value")?))
        }
        WarpKind::PolyQuadratic => {
            extra(&["a"])?;
            let a = p.a.clone().ok_or_else(|| spec_err(&format!("{path}.parameters.a"), "missing field `a`"))?;
            Ok(WarpSpec::PolyQuadratic(a))
        }
        WarpKind::Exponential => {
            extra(&["k", "axis"])?;
            Ok(WarpSpec::Exponential { k: need(p.k, "k")?, axis: p.axis.unwrap_or(0) })
        }
    }
}

fn parse_names(names: &[String], path: &str) -> Result<Vec<Suite>> {
    names
        .iter()
        .enumerate()
        .map(|(i, s)| Suite::parse(s).map_err(|_| spec_err(&format!("{path}[{i}]"), format!("unknown suite `{s}`"))))
        .collect()
}

/// Parses and validates a run-spec document.
pub fn parse_spec(text: &str) -> Result<RunSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: SpecDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        spec_err(if path.is_empty() { "." } else { &path }, e.into_inner().to_string())
    })?;

    if doc.factors.len() != 2 {
        return Err(spec_err("factors", format!("expected two factors, got {}", doc.factors.len())));
    }
    let f1 = build_factor(&doc.factors[0], "factors[0]")?;
    let f2 = build_factor(&doc.factors[1], "factors[1]")?;
    let w1 = build_warp(&doc.warps.f1, "warps.f1")?;
    let w2 = build_warp(&doc.warps.f2, "warps.f2")?;
    semantic("warps.f1", w1.validate(f1.dim()))?;
    semantic("warps.f2", w2.validate(f2.dim()))?;
    let config_id = format!("{}{}×{}{}", f1.kind(), f1.dim(), f2.kind(), f2.dim());
    let config = ProductConfig::new(f1, f2, w1, w2).map_err(|e| spec_err("factors", e.to_string()))?;

    let n = config.n();
    let bounds = match doc.sampling.bbox {
        None => vec![DEFAULT_BOX; n],
        Some(BoxDoc::Uniform(b)) => vec![b; n],
        Some(BoxDoc::PerCoordinate(v)) => v,
    };
    let sampling = Sampling {
        seed: doc.sampling.seed,
        count: doc.sampling.count.unwrap_or(DEFAULT_COUNT),
        bounds,
        radii: doc.sampling.radii.unwrap_or(DEFAULT_RADII),
    };
    sampling.validate(n)?;

    let suites = parse_names(&doc.suites, "suites")?;
    let expected_failures = parse_names(&doc.expected_failures, "expected_failures")?;
    let mut spec = RunSpec { config_id, config, sampling, suites, expected_failures, tolerances: BTreeMap::new() };
    let pairs: Vec<(String, f64)> = doc.tolerances.into_iter().collect();
    spec.set_tolerances(&pairs)?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Classification;

    const ONE_D: &str = r#"{
        "factors": [{"kind": "euclidean", "dim": 1}, {"kind": "euclidean", "dim": 1}],
        "warps": {"f1": {"kind": "poly_quadratic", "parameters": {"a": [1.0]}},
                  "f2": {"kind": "poly_quadratic", "parameters": {"a": [1.0]}}},
        "sampling": {"seed": 7}
    }"#;

    #[test]
    fn one_dimensional_document() {
        let s = parse_spec(ONE_D).unwrap();
        assert_eq!((s.config.n1(), s.config.n2()), (1, 1));
        assert_eq!(s.config.f1, WarpSpec::PolyQuadratic(vec![1.0]));
        assert_eq!(s.config.classification(), Classification::ProperDoublyWarped);
        assert_eq!(s.sampling.count, DEFAULT_COUNT);
        assert_eq!(s.sampling.bounds, vec![DEFAULT_BOX; 2]);
        assert!(s.suites.is_empty());
    }

    #[test]
    fn long_randers_covector_is_rejected() {
        let doc = ONE_D.replace(
            r#"{"kind": "euclidean", "dim": 1}]"#,
            r#"{"kind": "randers", "dim": 2, "parameters": {"b": [1.2, 0]}}]"#,
        );
        match parse_spec(&doc) {
            Err(Error::Spec { path, message }) => {
                assert_eq!(path, "factors[1].parameters.b");
                assert!(message.contains("‖b‖ < 1"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn seed_is_required() {
        let doc = ONE_D.replace(r#"{"seed": 7}"#, "{}");
        match parse_spec(&doc) {
            Err(Error::Spec { path, message }) => {
                assert_eq!(path, "sampling");
                assert!(message.contains("seed"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let doc = ONE_D.replace(r#""seed": 7"#, r#""seed": 7, "sead": 1"#);
        let Err(Error::Spec { path, .. }) = parse_spec(&doc) else { panic!() };
        assert_eq!(path, "sampling.sead");
        let doc = ONE_D.replace(r#"{"a": [1.0]}},"#, r#"{"a": [1.0], "k": 2}},"#);
        let Err(Error::Spec { path, .. }) = parse_spec(&doc) else { panic!() };
        assert_eq!(path, "warps.f1.parameters.k");
    }

    #[test]
    fn sampling_ranges_are_checked() {
        let doc = ONE_D.replace(r#"{"seed": 7}"#, r#"{"seed": 7, "radii": [0.0, 1.0]}"#);
        assert!(matches!(parse_spec(&doc), Err(Error::Spec { path, .. }) if path == "sampling.radii"));
        let doc = ONE_D.replace(r#"{"seed": 7}"#, r#"{"seed": 7, "count": 0}"#);
        assert!(matches!(parse_spec(&doc), Err(Error::Spec { path, .. }) if path == "sampling.count"));
        let doc = ONE_D.replace(r#"{"seed": 7}"#, r#"{"seed": 7, "box": [[0, 1]]}"#);
        assert!(matches!(parse_spec(&doc), Err(Error::Spec { path, .. }) if path == "sampling.box"));
    }

    #[test]
    fn suite_names_are_checked() {
        let doc = ONE_D.replace(r#""sampling""#, r#""suites": ["homogeneity", "bogus"], "sampling""#);
        assert!(matches!(parse_spec(&doc), Err(Error::Spec { path, .. }) if path == "suites[1]"));
        let doc = ONE_D.replace(r#""sampling""#, r#""tolerances": {"nijenhuis": 1e-6, "hermitian.d-omega": 1e-4}, "sampling""#);
        let s = parse_spec(&doc).unwrap();
        assert_eq!(s.tolerance(Suite::Nijenhuis, "skew"), 1e-6);
        assert_eq!(s.tolerance(Suite::Hermitian, "d-omega"), 1e-4);
        assert_eq!(s.tolerance(Suite::Hermitian, "metric"), 1e-10);
        let doc = ONE_D.replace(r#""sampling""#, r#""tolerances": {"hermitian.bogus": 1e-4}, "sampling""#);
        assert!(matches!(parse_spec(&doc), Err(Error::Spec { path, .. }) if path == "tolerances.hermitian.bogus"));
    }
}
