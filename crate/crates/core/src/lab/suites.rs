//! Verification suites. Each suite is a list of named checks; a check yields a
//! residual per sample point (or one per region) that passes when it is within
//! the check's tolerance.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::connection::SprayPath;
use crate::error::{Error, Result};
use crate::finsler::{eval_f2, DwGeometry};
use crate::frame::FrameVector;
use crate::jets::{fd_partial_default, CoordIndex, MultiIndex};
use crate::lifted::{closedness_check, totally_geodesic_verdicts, MIN_REGION_POINTS};
use crate::metric::ProductConfig;
use crate::sample::TangentSample;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Homogeneity,
    BlockStructure,
    YfEqualsG,
    MatsumotoContraction,
    BerwaldBlocks,
    HhContraction,
    FlatFactor,
    ScalarFlag,
    KoszulVsClosed,
    VaismanAxioms,
    Reinhart,
    Hermitian,
    Nijenhuis,
    Kahler,
    TotallyGeodesic,
    FdCrosscheck,
    SprayDecomposition,
    ConnectionClosedForms,
}

use Suite::*;

impl Suite {
    pub const ALL: [Suite; 18] = [
        Homogeneity,
        BlockStructure,
        YfEqualsG,
        MatsumotoContraction,
        BerwaldBlocks,
        HhContraction,
        FlatFactor,
        ScalarFlag,
        KoszulVsClosed,
        VaismanAxioms,
        Reinhart,
        Hermitian,
        Nijenhuis,
        Kahler,
        TotallyGeodesic,
        FdCrosscheck,
        SprayDecomposition,
        ConnectionClosedForms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Homogeneity => "homogeneity",
            BlockStructure => "block-structure",
            YfEqualsG => "yF=G",
            MatsumotoContraction => "matsumoto-contraction",
            BerwaldBlocks => "berwald-blocks",
            HhContraction => "hh-contraction",
            FlatFactor => "flat-factor",
            ScalarFlag => "scalar-flag",
            KoszulVsClosed => "koszul-vs-closed",
            VaismanAxioms => "vaisman-axioms",
            Reinhart => "reinhart",
            Hermitian => "hermitian",
            Nijenhuis => "nijenhuis",
            Kahler => "kahler",
            TotallyGeodesic => "totally-geodesic",
            FdCrosscheck => "fd-crosscheck",
            SprayDecomposition => "spray-decomposition",
            ConnectionClosedForms => "connection-closed-forms",
        }
    }

    /// Accepts canonical names and the older short names `lemma41` and `con1`.
    pub fn parse(s: &str) -> Result<Suite> {
        match s {
            "lemma41" => return Ok(HhContraction),
            "con1" => return Ok(FlatFactor),
            _ => {}
        }
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }

    /// `(check name, default tolerance)`; the first entry is the headline check.
    pub fn checks(self) -> &'static [(&'static str, f64)] {
        match self {
            Homogeneity => &[("nonlinear-connection", 1e-8), ("spray", 1e-8)],
            BlockStructure => &[("metric-mixed", 1e-12), ("metric-pure", 1e-9), ("cartan-mixed", 1e-12), ("cartan-pure", 1e-9)],
            YfEqualsG => &[("contraction", 1e-8)],
            MatsumotoContraction => &[("identity", 1e-8)],
            BerwaldBlocks => &[("closed-forms", 1e-7)],
            HhContraction => &[("identity", 1e-7)],
            FlatFactor => &[("latin", 1e-6), ("greek", 1e-6)],
            ScalarFlag => &[("isotropy", 1e-6), ("coefficient", 1e-6)],
            KoszulVsClosed => &[
                ("metric-compatibility", 1e-7),
                ("torsion", 1e-7),
                ("closed-forms", 1e-7),
                ("induced-vertical", 1e-7),
            ],
            VaismanAxioms => &[("axioms", 1e-8), ("same-connection", 1e-8)],
            Reinhart => &[("defect", 1e-10), ("proof-identity", 1e-8)],
            Hermitian => &[("j-squared", 0.0), ("metric", 1e-10), ("omega-table", 1e-10), ("d-omega", 1e-5), ("liouville", 1e-5)],
            Nijenhuis => &[("closed-vs-direct", 1e-7), ("skew", 1e-10)],
            Kahler => &[("nijenhuis", 1e-7), ("bracket-curvature", 1e-7), ("biconditional", 0.0)],
            TotallyGeodesic => &[
                ("vertical", 1e-8),
                ("horizontal", 1e-8),
                ("vertical-consistency", 0.0),
                ("horizontal-consistency", 0.0),
            ],
            FdCrosscheck => &[("jet-vs-fd", 1e-5)],
            SprayDecomposition => &[("generic-vs-decomposed", 1e-9)],
            ConnectionClosedForms => &[("nonlinear-connection", 1e-9), ("berwald-connection", 1e-9), ("horizontal-coefficients", 1e-9)],
        }
    }

    pub fn default_tolerance(self, check: &str) -> Option<f64> {
        self.checks().iter().find(|(c, _)| *c == check).map(|(_, t)| *t)
    }

    /// Reason the suite cannot run on `cfg` with `points` samples, if any.
    pub fn not_applicable(self, cfg: &ProductConfig, points: usize) -> Option<String> {
        match self {
            FlatFactor if !cfg.factor1.is_riemannian() => Some("factor 1 is not Riemannian".into()),
            ScalarFlag if !cfg.factor1.is_riemannian() => Some("factor 1 is not Riemannian".into()),
            ScalarFlag if cfg.n1() < 2 => Some("needs n1 ≥ 2".into()),
            TotallyGeodesic if points < MIN_REGION_POINTS => {
                Some(format!("region has {points} points, needs at least {MIN_REGION_POINTS}"))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Suite {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Suite {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Suite::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// One residual of one check; `detail` names the worst component where useful.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub check: &'static str,
    pub residual: f64,
    pub detail: Option<String>,
}

fn m(check: &'static str, residual: f64) -> Measurement {
    Measurement { check, residual, detail: None }
}

fn md(check: &'static str, residual: f64, detail: String) -> Measurement {
    Measurement { check, residual, detail: Some(detail) }
}

/// Label of frame basis element `A` (1-based coordinate numbers).
pub fn frame_label(n1: usize, n: usize, a: usize) -> String {
    let (sym, k) = if a < n { ("δ", a) } else { ("∂", a - n) };
    let coord = match (a < n, k < n1) {
        (true, true) => format!("x^{}", k + 1),
        (true, false) => format!("u^{}", k - n1 + 1),
        (false, true) => format!("y^{}", k + 1),
        (false, false) => format!("v^{}", k - n1 + 1),
    };
    format!("{sym}{coord}")
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

/// Per-point measurements of a point-level suite.
pub fn measure_point(suite: Suite, d: &DwGeometry) -> Result<Vec<Measurement>> {
    let n = d.n();
    let n1 = d.n1();
    let y = d.point().fiber();
    Ok(match suite {
        Homogeneity => {
            let e = d.engine();
            let mut rn = 0.0f64;
            let mut rs = 0.0f64;
            for a in 0..n {
                let s: f64 = (0..n).map(|c| y[c] * e.spray(a).d(e.yv(c)).value()).sum();
                rs = rs.max((s - 2.0 * e.spray(a).value()).abs());
                for b in 0..n {
                    let s: f64 = (0..n).map(|c| y[c] * e.nl(a, b).d(e.yv(c)).value()).sum();
                    rn = rn.max((s - e.nl(a, b).value()).abs());
                }
            }
            vec![m("nonlinear-connection", rn), m("spray", rs)]
        }
        BlockStructure => {
            let p = d.parts()?;
            let (g, _) = d.fundamental_tensor();
            let c = d.cartan_tensor();
            let mut gp = 0.0f64;
            let mut cp = 0.0f64;
            for a in 0..n {
                for b in 0..n {
                    let (la, lb) = (a < n1, b < n1);
                    if la && lb {
                        gp = gp.max((g.get(&[a, b]) - p.b * p.g1(a, b)).abs());
                    } else if !la && !lb {
                        gp = gp.max((g.get(&[a, b]) - p.a * p.g2(a - n1, b - n1)).abs());
                    }
                    for k in 0..n {
                        if la && lb && k < n1 {
                            cp = cp.max((c.get(&[a, b, k]) - p.b * p.c1(a, b, k)).abs());
                        } else if !la && !lb && k >= n1 {
                            cp = cp.max((c.get(&[a, b, k]) - p.a * p.c2(a - n1, b - n1, k - n1)).abs());
                        }
                    }
                }
            }
            vec![m("metric-mixed", g.mixed_max_abs()), m("metric-pure", gp), m("cartan-mixed", c.mixed_max_abs()), m("cartan-pure", cp)]
        }
        YfEqualsG => {
            let f = d.horizontal_coefficients();
            let nl = d.nonlinear_connection();
            let mut r = 0.0f64;
            for a in 0..n {
                for b in 0..n {
                    let s: f64 = (0..n).map(|c| y[c] * f.get(&[a, b, c])).sum();
                    r = r.max((s - nl.get(&[a, b])).abs());
                }
            }
            vec![m("contraction", r)]
        }
        MatsumotoContraction => {
            let c = d.matsumoto_contraction()?;
            vec![md("identity", c.residual(), format!("side magnitude {:.3e}", c.magnitude()))]
        }
        BerwaldBlocks => {
            let worst = d.berwald_discrepancy()?.into_iter().max_by(|a, b| a.max_abs_diff.total_cmp(&b.max_abs_diff));
            let worst = worst.expect("ten blocks");
            vec![md("closed-forms", worst.max_abs_diff, worst.block)]
        }
        HhContraction => {
            let hh = d.hh_curvature();
            let (r, _) = d.frame_brackets();
            let mut res = 0.0f64;
            for a in 0..n {
                for c in 0..n {
                    for e in 0..n {
                        let s: f64 = (0..n).map(|b| y[b] * hh.get(&[a, b, c, e])).sum();
                        res = res.max((s - r.get(&[a, c, e])).abs());
                    }
                }
            }
            vec![m("identity", res)]
        }
        FlatFactor => {
            let r = d.flat_factor_residual()?;
            let mut out = vec![md("latin", r.latin_residual, format!("κ = {:.6}", r.latin_coefficient))];
            if let (Some(res), Some(k)) = (r.greek_residual, r.greek_coefficient) {
                out.push(md("greek", res, format!("κ = {k:.6}")));
            }
            out
        }
        ScalarFlag => {
            let fit = d.scalar_flag_residual()?;
            let factor = d.factor1_scalar_flag()?;
            let kappa = d.flat_factor_residual()?.latin_coefficient;
            let predicted = factor.lambda - kappa;
            vec![
                md("isotropy", fit.defect.max(factor.defect), format!("λ = {:.6}", fit.lambda)),
                md("coefficient", (fit.lambda - predicted).abs(), format!("K1 − κ = {predicted:.6}")),
            ]
        }
        KoszulVsClosed => {
            let r = d.levi_civita_residuals(d.koszul_levi_civita());
            let worst = d.levi_civita_discrepancy()?.into_iter().max_by(|a, b| a.max_abs_diff.total_cmp(&b.max_abs_diff));
            let worst = worst.expect("eleven blocks");
            let iv = d.induced_vertical_connection();
            vec![
                m("metric-compatibility", r.metric_compatibility),
                m("torsion", r.torsion),
                md("closed-forms", worst.max_abs_diff, worst.block),
                m("induced-vertical", iv.horizontal_rows.max(iv.vertical_rows).max(iv.mixed_vertical)),
            ]
        }
        VaismanAxioms => {
            let ax = d.vaisman_axioms(&d.vaisman_connection());
            // the induced and Vaisman connections agree on the vertical bundle exactly when F = G
            let gap = d.structural_bundle_gap();
            let fg = d.horizontal_minus_berwald();
            vec![m("axioms", ax.max()), md("same-connection", (gap - fg).abs(), format!("gap {gap:.3e}, max|F − G| {fg:.3e}"))]
        }
        Reinhart => {
            let mut defect = (0.0f64, String::new());
            let mut ident = 0.0f64;
            for a in 0..n {
                let x = FrameVector::vertical(n, a);
                for b in 0..n {
                    let yv = FrameVector::horizontal(n, b);
                    for c in 0..n {
                        let z = FrameVector::horizontal(n, c);
                        let r = d.reinhart_defect(&x, &yv, &z)?;
                        if r.covariant.abs() > defect.0 || defect.1.is_empty() {
                            let l = |k| frame_label(n1, n, k);
                            defect = (r.covariant.abs(), format!("X={}, Y={}, Z={}", l(n + a), l(b), l(c)));
                        }
                        ident = ident.max((r.covariant - r.cartan_identity).abs());
                    }
                }
            }
            vec![md("defect", defect.0, defect.1), m("proof-identity", ident)]
        }
        Hermitian => {
            let p = d.parts()?;
            let m2 = 2 * n;
            let basis: Vec<FrameVector> = (0..m2).map(|a| FrameVector::basis(n, a)).collect();
            let js = max_of(basis.iter().map(|e| (&e.complex().complex() + e).max_abs()));
            let mut herm = 0.0f64;
            let mut table = 0.0f64;
            let gfac = |a: usize, b: usize| match (a < n1, b < n1) {
                (true, true) => p.b * p.g1(a, b),
                (false, false) => p.a * p.g2(a - n1, b - n1),
                _ => 0.0,
            };
            for a in 0..m2 {
                for b in 0..m2 {
                    herm = herm.max(d.hermitian_defect(&basis[a], &basis[b]));
                    let expected = match (a < n, b < n) {
                        (true, false) => gfac(a, b - n),
                        (false, true) => -gfac(a - n, b),
                        _ => 0.0,
                    };
                    table = table.max((d.symplectic_form(&basis[a], &basis[b]) - expected).abs());
                }
            }
            let cl = closedness_check(d.config(), d.point())?;
            vec![
                m("j-squared", js),
                m("metric", herm),
                m("omega-table", table),
                m("d-omega", cl.d_omega),
                md("liouville", cl.exactness, format!("|Ω − dω| = {:.3e}", cl.opposite_sign)),
            ]
        }
        Nijenhuis => {
            let r = d.nijenhuis();
            vec![md("closed-vs-direct", r.max_diff, format!("max|N_J| = {:.3e}", r.max_abs)), m("skew", r.skew_defect)]
        }
        Kahler => {
            let r = d.nijenhuis();
            let direct = max_of(r.direct.iter().map(FrameVector::max_abs));
            vec![m("nijenhuis", r.max_abs.max(direct)), m("bracket-curvature", d.frame_brackets().0.max_abs())]
        }
        FdCrosscheck => {
            let (worst, label) = fd_crosscheck(d.config(), d.point())?;
            vec![md("jet-vs-fd", worst, label)]
        }
        SprayDecomposition => {
            let a = d.spray(SprayPath::Generic)?;
            let b = d.spray(SprayPath::ProductDecomposed)?;
            vec![m("generic-vs-decomposed", a.max_abs_diff(&b))]
        }
        ConnectionClosedForms => {
            let worst = |v: Vec<crate::connection::BlockDiscrepancy>| max_of(v.into_iter().map(|b| b.max_abs_diff));
            vec![
                m("nonlinear-connection", worst(d.nonlinear_connection_discrepancy()?)),
                m("berwald-connection", worst(d.berwald_connection_discrepancy()?)),
                m("horizontal-coefficients", worst(d.horizontal_coefficients_discrepancy()?)),
            ]
        }
        TotallyGeodesic => vec![],
    })
}

/// Largest relative disagreement `|jet − fd| / max(1, |jet|)` over every partial
/// of `F²` of order 1 to 3 in all coordinates.
pub fn fd_crosscheck(cfg: &ProductConfig, p: &TangentSample) -> Result<(f64, String)> {
    let (n1, n2) = (cfg.n1(), cfg.n2());
    let m = 2 * (n1 + n2);
    let seeds: Vec<CoordIndex> = (0..m).map(|k| CoordIndex::from_flat(n1, n2, k)).collect();
    let jet = eval_f2(cfg, p, &seeds, 3)?;
    let mut worst = (0.0f64, String::new());
    let mut visit = |seq: &[CoordIndex]| -> Result<()> {
        let mi = MultiIndex::from_sequence(seq)?;
        let ad = jet.partial(&mi)?;
        let fd = fd_partial_default(cfg, p, &mi)?;
        let r = (ad - fd).abs() / ad.abs().max(1.0);
        if r > worst.0 || worst.1.is_empty() {
            worst = (r, format!("{mi}"));
        }
        Ok(())
    };
    for a in 0..m {
        visit(&[seeds[a]])?;
        for b in a..m {
            visit(&[seeds[a], seeds[b]])?;
            for c in b..m {
                visit(&[seeds[a], seeds[b], seeds[c]])?;
            }
        }
    }
    Ok(worst)
}

/// Region-level measurements, computed from the per-point ones where possible.
pub fn measure_region(
    suite: Suite,
    cfg: &ProductConfig,
    points: &[TangentSample],
    per_point: &[Vec<Measurement>],
    tol: &dyn Fn(&str) -> f64,
) -> Result<Vec<Measurement>> {
    Ok(match suite {
        Kahler => {
            let col = |k: &str| max_of(per_point.iter().flatten().filter(|x| x.check == k).map(|x| x.residual));
            let (nj, r) = (col("nijenhuis"), col("bracket-curvature"));
            let consistent = (nj <= tol("nijenhuis")) == (r <= tol("bracket-curvature"));
            let verdict = if r <= tol("bracket-curvature") { "Kähler" } else { "not Kähler" };
            vec![md("biconditional", if consistent { 0.0 } else { 1.0 }, format!("{verdict}: max|N_J| = {nj:.3e}, max|R| = {r:.3e}"))]
        }
        TotallyGeodesic => {
            let t = totally_geodesic_verdicts(cfg, points, tol("vertical").max(tol("horizontal")))?;
            vec![
                md("vertical", t.max_f_minus_g, "max|F − G|".into()),
                md("horizontal", t.max_cartan.max(t.max_mixed_bracket), format!("max|C| = {:.3e}, max mixed |R| = {:.3e}", t.max_cartan, t.max_mixed_bracket)),
                md(
                    "vertical-consistency",
                    if t.vertical_consistent { 0.0 } else { 1.0 },
                    format!("Levi-Civita vertical leak {:.3e}", t.koszul_vertical_leak),
                ),
                md(
                    "horizontal-consistency",
                    if t.horizontal_consistent { 0.0 } else { 1.0 },
                    format!(
                        "Levi-Civita horizontal leak {:.3e}; unmixed |R| = {:.3e}",
                        t.koszul_horizontal_leak, t.max_unmixed_bracket
                    ),
                ),
            ]
        }
        _ => vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()).unwrap(), s);
            assert!(!s.checks().is_empty());
        }
        assert_eq!(Suite::parse("lemma41").unwrap(), HhContraction);
        assert_eq!(Suite::parse("con1").unwrap(), FlatFactor);
        assert!(matches!(Suite::parse("nope"), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn frame_labels() {
        assert_eq!(frame_label(2, 4, 0), "δx^1");
        assert_eq!(frame_label(2, 4, 3), "δu^2");
        assert_eq!(frame_label(2, 4, 5), "∂y^2");
        assert_eq!(frame_label(2, 4, 6), "∂v^1");
    }
}
