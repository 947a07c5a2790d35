//! Bracket, Berwald and hh-curvature, the Riemann map, flag curvature, and the
//! flat-factor and scalar-flag diagnostics of a doubly warped product.

use serde::Serialize;

use crate::connection::{compare_blocks, BlockDiscrepancy};
use crate::error::{Error, Result};
use crate::finsler::DwGeometry;
use crate::tensor::{Block, BlockTensor, Variance};

use Block::{Greek as Gk, Latin as Lt};
use Variance::{Lower, Upper};

/// Smallest admissible normalized Gram determinant of a flag.
pub const FLAG_DEGENERACY: f64 = 1e-10;

/// All curvature objects at one point.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureBundle {
    /// `R^c_ab` at `[c][a][b]`
    pub bracket: BlockTensor,
    /// `B^a_bcd`
    pub berwald: BlockTensor,
    /// `R_b^a_cd` at `[a][b][c][d]`
    pub hh: BlockTensor,
    /// `R^a_b`
    pub riemann_map: BlockTensor,
}

/// The ten Berwald blocks with closed forms, named by their index pattern.
pub const BERWALD_BLOCKS: &[(&str, &[Block])] = &[
    ("B^k_ijl", &[Lt, Lt, Lt, Lt]),
    ("B^k_iβl", &[Lt, Lt, Gk, Lt]),
    ("B^k_αβl", &[Lt, Gk, Gk, Lt]),
    ("B^k_αβλ", &[Lt, Gk, Gk, Gk]),
    ("B^k_iβλ", &[Lt, Lt, Gk, Gk]),
    ("B^γ_αβλ", &[Gk, Gk, Gk, Gk]),
    ("B^γ_iβλ", &[Gk, Lt, Gk, Gk]),
    ("B^γ_ijλ", &[Gk, Lt, Lt, Gk]),
    ("B^γ_ijk", &[Gk, Lt, Lt, Lt]),
    ("B^γ_iβk", &[Gk, Lt, Gk, Lt]),
];

/// Result of the flat-factor identity check.
#[derive(Clone, Debug, Serialize)]
pub struct FlatFactorReport {
    /// `‖grad f2‖² / f1²`
    pub latin_coefficient: f64,
    pub latin_residual: f64,
    /// Present when factor 2 is Riemannian: `‖grad f1‖² / f2²` and its residual.
    pub greek_coefficient: Option<f64>,
    pub greek_residual: Option<f64>,
}

/// Least-squares scalar-flag fit on the Latin block.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScalarFlagFit {
    pub lambda: f64,
    pub defect: f64,
}

impl DwGeometry {
    pub fn berwald_curvature(&self) -> BlockTensor {
        let e = self.engine();
        BlockTensor::from_fn(self.n1(), self.n2(), &[Upper, Lower, Lower, Lower], |i| {
            e.berwald(i[0], i[1], i[2], i[3])
        })
    }

    /// `B^a_bcd` assembled from the ten block formulas; other patterns use symmetry.
    pub fn berwald_curvature_closed(&self) -> Result<BlockTensor> {
        let p = self.parts()?;
        let (n1, n2) = (p.n1, p.n2);
        Ok(BlockTensor::from_fn(n1, n2, &[Upper, Lower, Lower, Lower], |idx| {
            let c = idx[0];
            let mut l = [idx[1], idx[2], idx[3]];
            let greek = |a: usize| a >= n1;
            let pat = l.map(greek);
            // reorder lower slots onto a listed pattern
            match (c < n1, pat) {
                (true, [true, false, false]) | (false, [true, false, false]) => l.swap(0, 1),
                (true, [false, false, true]) => l.swap(1, 2),
                (true, [true, false, true]) => l.swap(1, 2),
                (false, [true, false, true]) => l.swap(0, 1),
                (false, [true, true, false]) => l.swap(0, 2),
                _ => {}
            }
            let pat = l.map(greek);
            let [a, b, d] = l;
            if c < n1 {
                let k = c;
                let ginv_da = |ys: &[usize]| -> f64 { (0..n1).map(|h| p.e1.ginv_dy(k, h, ys) * p.da[h]).sum() };
                match pat {
                    [false, false, false] => {
                        p.e1.berwald(k, a, b, d) - ginv_da(&[a, b, d]) * p.q2 / (4.0 * p.b)
                    }
                    // B^k_iβl
                    [false, true, false] => -ginv_da(&[d, a]) * p.dq2[b - n1] / (4.0 * p.b),
                    // B^k_αβl
                    [true, true, false] => -p.g2(a - n1, b - n1) * ginv_da(&[d]) / (2.0 * p.b),
                    // B^k_αβλ
                    [true, true, true] => -p.c2(a - n1, b - n1, d - n1) * ginv_da(&[]) / p.b,
                    // B^k_iβλ
                    [false, true, true] => -ginv_da(&[a]) * p.g2(b - n1, d - n1) / (2.0 * p.b),
                    _ => unreachable!("pattern normalized above"),
                }
            } else {
                let ga = c - n1;
                let ginv_db = |ys: &[usize]| -> f64 { (0..n2).map(|al| p.e2.ginv_dy(al, ga, ys) * p.db[al]).sum() };
                match pat {
                    [true, true, true] => {
                        let s: f64 = (0..n2).map(|nu| p.e2.ginv_dy(ga, nu, &[b - n1, a - n1, d - n1]) * p.db[nu]).sum();
                        p.e2.berwald(ga, a - n1, b - n1, d - n1) - s * p.q1 / (4.0 * p.a)
                    }
                    // B^γ_iβλ
                    [false, true, true] => -ginv_db(&[b - n1, d - n1]) * p.dq1[a] / (4.0 * p.a),
                    // B^γ_ijλ
                    [false, false, true] => -p.g1(a, b) * ginv_db(&[d - n1]) / (2.0 * p.a),
                    // B^γ_ijk
                    [false, false, false] => -p.c1(a, b, d) * ginv_db(&[]) / p.a,
                    // B^γ_iβk
                    [false, true, false] => -ginv_db(&[b - n1]) * p.g1(a, d) / (2.0 * p.a),
                    _ => unreachable!("pattern normalized above"),
                }
            }
        }))
    }

    /// Per-block comparison of generic and closed-form Berwald curvature.
    pub fn berwald_discrepancy(&self) -> Result<Vec<BlockDiscrepancy>> {
        Ok(compare_blocks(&self.berwald_curvature(), &self.berwald_curvature_closed()?, BERWALD_BLOCKS))
    }

    /// `R_b^a_cd` stored at `[a][b][c][d]`.
    pub fn hh_curvature(&self) -> BlockTensor {
        let e = self.engine();
        BlockTensor::from_fn(self.n1(), self.n2(), &[Upper, Lower, Lower, Lower], |i| e.hh(i[0], i[1], i[2], i[3]))
    }

    pub fn riemann_map(&self) -> BlockTensor {
        let e = self.engine();
        BlockTensor::from_fn(self.n1(), self.n2(), &[Upper, Lower], |i| e.riemann_map(i[0], i[1]))
    }

    pub fn curvature_bundle(&self) -> CurvatureBundle {
        CurvatureBundle {
            bracket: self.frame_brackets().0,
            berwald: self.berwald_curvature(),
            hh: self.hh_curvature(),
            riemann_map: self.riemann_map(),
        }
    }

    /// Flag curvature of the flag with pole `𝐲` and edge `edge`.
    pub fn flag_curvature(&self, edge: &[f64]) -> Result<f64> {
        let n = self.n();
        if edge.len() != n {
            return Err(Error::Dimension(format!("flag edge has {} components, expected {n}", edge.len())));
        }
        let (g, _) = self.fundamental_tensor();
        let y = self.point().fiber();
        let ip = |a: &[f64], b: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += g.get(&[i, j]) * a[i] * b[j];
                }
            }
            s
        };
        let (yy, uu, yu) = (ip(&y, &y), ip(edge, edge), ip(&y, edge));
        let gram = yy * uu - yu * yu;
        let ratio = gram / (yy * uu);
        if !(ratio > FLAG_DEGENERACY) {
            return Err(Error::DegenerateFlag(gram));
        }
        let rm = self.riemann_map();
        let ru: Vec<f64> = (0..n).map(|a| (0..n).map(|b| rm.get(&[a, b]) * edge[b]).sum()).collect();
        Ok(ip(edge, &ru) / gram)
    }

    /// Residual of the flat-factor identity relating product and factor hh-curvature.
    pub fn flat_factor_residual(&self) -> Result<FlatFactorReport> {
        let cfg = self.config();
        if !cfg.factor1.is_riemannian() {
            return Err(Error::Precondition("factor 1 must be Riemannian".into()));
        }
        let p = self.parts()?;
        let (n1, n2) = (p.n1, p.n2);
        let hh = self.hh_curvature();
        let kappa = grad_sq(&p.db, |a, b| p.g2i(a, b), p.b) / p.a;
        let mut latin = 0.0f64;
        for i in 0..n1 {
            for j in 0..n1 {
                for k in 0..n1 {
                    for l in 0..n1 {
                        let pat = shape(i, j, k, l, &|a, b| p.g1(a, b));
                        let r = hh.get(&[i, j, k, l]) - p.e1.hh(i, j, k, l) + kappa * pat;
                        latin = latin.max(r.abs());
                    }
                }
            }
        }
        let (greek_coefficient, greek_residual) = if cfg.factor2.is_riemannian() {
            let kappa2 = grad_sq(&p.da, |a, b| p.g1i(a, b), p.a) / p.b;
            let mut greek = 0.0f64;
            for i in 0..n2 {
                for j in 0..n2 {
                    for k in 0..n2 {
                        for l in 0..n2 {
                            let pat = shape(i, j, k, l, &|a, b| p.g2(a, b));
                            let r = hh.get(&[n1 + i, n1 + j, n1 + k, n1 + l]) - p.e2.hh(i, j, k, l) + kappa2 * pat;
                            greek = greek.max(r.abs());
                        }
                    }
                }
            }
            (Some(kappa2), Some(greek))
        } else {
            (None, None)
        };
        Ok(FlatFactorReport { latin_coefficient: kappa, latin_residual: latin, greek_coefficient, greek_residual })
    }

    /// Fits the Latin block `R^i_jkl ≈ λ (δ^i_l g_jk − δ^i_k g_jl)` by least squares.
    pub fn scalar_flag_residual(&self) -> Result<ScalarFlagFit> {
        if !self.config().factor1.is_riemannian() {
            return Err(Error::Precondition("factor 1 must be Riemannian".into()));
        }
        let n1 = self.n1();
        if n1 < 2 {
            return Err(Error::Precondition("scalar-flag fit needs n1 ≥ 2".into()));
        }
        let p = self.parts()?;
        let hh = self.hh_curvature();
        Ok(fit_shape(n1, |i, j, k, l| hh.get(&[i, j, k, l]), |a, b| p.g1(a, b)))
    }

    /// The same fit for factor 1 alone; for an isotropic factor `λ` is its sectional curvature.
    pub fn factor1_scalar_flag(&self) -> Result<ScalarFlagFit> {
        if !self.config().factor1.is_riemannian() || self.n1() < 2 {
            return Err(Error::Precondition("factor 1 must be Riemannian with n1 ≥ 2".into()));
        }
        let p = self.parts()?;
        Ok(fit_shape(self.n1(), |i, j, k, l| p.e1.hh(i, j, k, l), |a, b| p.g1(a, b)))
    }
}

fn fit_shape(m: usize, hh: impl Fn(usize, usize, usize, usize) -> f64, g: impl Fn(usize, usize) -> f64) -> ScalarFlagFit {
    let mut quads = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    quads.push((hh(i, j, k, l), shape(i, j, k, l, &g)));
                }
            }
        }
    }
    let pp: f64 = quads.iter().map(|(_, s)| s * s).sum();
    if !(pp > 1e-300) {
        return ScalarFlagFit { lambda: f64::NAN, defect: f64::INFINITY };
    }
    let lambda = quads.iter().map(|(r, s)| r * s).sum::<f64>() / pp;
    let defect = quads.iter().fold(0.0f64, |m, (r, s)| m.max((r - lambda * s).abs()));
    ScalarFlagFit { lambda, defect }
}

/// `δ^i_l g_jk − δ^i_k g_jl`
fn shape(i: usize, j: usize, k: usize, l: usize, g: &impl Fn(usize, usize) -> f64) -> f64 {
    let mut s = 0.0;
    if i == l {
        s += g(j, k);
    }
    if i == k {
        s -= g(j, l);
    }
    s
}

/// `‖grad f‖²` from the derivatives of `f²`: `g^{ab} ∂_a f ∂_b f` with `∂f = ∂f² / (2f)`.
fn grad_sq(dfsq: &[f64], ginv: impl Fn(usize, usize) -> f64, fsq: f64) -> f64 {
    let m = dfsq.len();
    let mut s = 0.0;
    for a in 0..m {
        for b in 0..m {
            s += ginv(a, b) * dfsq[a] * dfsq[b];
        }
    }
    s / (4.0 * fsq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::fixture;
    use crate::sample::TangentSample;

    fn at(name: &str, x: &[f64], u: &[f64], y: &[f64], v: &[f64]) -> DwGeometry {
        let p = TangentSample::new(x.to_vec(), u.to_vec(), y.to_vec(), v.to_vec()).unwrap();
        DwGeometry::new(&fixture(name).unwrap(), &p).unwrap()
    }

    #[test]
    fn berwald_closed_blocks_match() {
        for name in ["FIX-R", "FIX-E"] {
            let d = at(name, &[0.4, -0.3], &[0.7, 0.2], &[1.1, -0.6], &[0.5, 0.9]);
            for r in d.berwald_discrepancy().unwrap() {
                assert!(r.max_abs_diff < 1e-7, "{name} {r:?}");
            }
        }
    }

    #[test]
    fn one_dimensional_berwald_vanishes() {
        let d = at("FIX-1D", &[0.0], &[1.0], &[1.0], &[1.0]);
        assert!(d.berwald_curvature().max_abs() < 1e-10);
    }

    #[test]
    fn hh_hand_value_and_flat_factor() {
        let d = at("FIX-E", &[0.0, 0.0], &[1.0, 0.0], &[0.8, -0.4], &[0.3, 1.1]);
        let hh = d.hh_curvature();
        assert!((hh.get(&[0, 1, 0, 1]) - 0.5).abs() < 1e-8);
        let rep = d.flat_factor_residual().unwrap();
        assert!((rep.latin_coefficient - 0.5).abs() < 1e-12);
        assert!(rep.latin_residual < 1e-8);
        assert!(rep.greek_residual.unwrap() < 1e-8);
        let fit = d.scalar_flag_residual().unwrap();
        assert!((fit.lambda + 0.5).abs() < 1e-8);
        assert!(fit.defect < 1e-8);
    }

    #[test]
    fn contraction_identities() {
        let d = at("FIX-E", &[0.3, 0.2], &[0.6, -0.4], &[0.8, -0.4], &[0.3, 1.1]);
        let hh = d.hh_curvature();
        let (r, _) = d.frame_brackets();
        let rm = d.riemann_map();
        let y = d.point().fiber();
        for a in 0..4 {
            for c in 0..4 {
                for e in 0..4 {
                    let s: f64 = (0..4).map(|b| y[b] * hh.get(&[a, b, c, e])).sum();
                    assert!((s - r.get(&[a, c, e])).abs() < 1e-8);
                }
                let s: f64 = (0..4).flat_map(|b| (0..4).map(move |e| (b, e))).map(|(b, e)| y[b] * y[e] * hh.get(&[a, b, e, c])).sum();
                assert!((s - rm.get(&[a, c])).abs() < 1e-7, "{a}{c}: {s} vs {}", rm.get(&[a, c]));
            }
        }
    }

    #[test]
    fn flag_curvature_depends_on_span() {
        let d = at("FIX-E", &[0.3, 0.2], &[0.6, -0.4], &[0.8, -0.4], &[0.3, 1.1]);
        let u = [0.2, 1.0, -0.5, 0.3];
        let k = d.flag_curvature(&u).unwrap();
        let y = d.point().fiber();
        let shifted: Vec<f64> = u.iter().zip(&y).map(|(a, b)| a + 0.7 * b).collect();
        assert!((d.flag_curvature(&shifted).unwrap() - k).abs() < 1e-8);
        let tripled: Vec<f64> = u.iter().map(|a| 3.0 * a).collect();
        assert!((d.flag_curvature(&tripled).unwrap() - k).abs() < 1e-8);
        assert!(matches!(d.flag_curvature(&y), Err(Error::DegenerateFlag(_))));
    }

    #[test]
    fn randers_factor_one_rejected_for_flat_identity() {
        let cfg = fixture("FIX-R").unwrap();
        let swapped = crate::metric::ProductConfig::new(cfg.factor2, cfg.factor1, cfg.f2, cfg.f1).unwrap();
        let p = TangentSample::new(vec![0.1, 0.1], vec![0.2, 0.3], vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let d = DwGeometry::new(&swapped, &p).unwrap();
        assert!(matches!(d.flat_factor_residual(), Err(Error::Precondition(_))));
    }
}
