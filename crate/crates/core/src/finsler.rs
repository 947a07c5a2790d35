//! Pointwise geometry of a doubly warped product and its zeroth-level tensors:
//! fundamental tensor, angular metric, Cartan, mean Cartan and Matsumoto torsions.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Geometry, ENGINE_ORDER};
use crate::jets::{jet_lift, CoordIndex, Jet, SeededJet};
use crate::lifted::{ConnectionTable, FrameData};
use crate::metric::ProductConfig;
use crate::sample::TangentSample;
use crate::tensor::{BlockTensor, Variance};

use Variance::{Lower, Upper};

/// Everything computed at one sample point: the product engine, lazily built
/// factor engines, and the warp jets.
pub struct DwGeometry {
    cfg: ProductConfig,
    point: TangentSample,
    geo: Geometry,
    f1sq: Jet,
    f2sq: Jet,
    factor1: OnceLock<Result<Geometry>>,
    factor2: OnceLock<Result<Geometry>>,
    frame: OnceLock<FrameData>,
    koszul: OnceLock<ConnectionTable>,
}

impl DwGeometry {
    pub fn new(cfg: &ProductConfig, point: &TangentSample) -> Result<Self> {
        Self::with_order(cfg, point, ENGINE_ORDER)
    }

    /// Reduced-order evaluation (≥ 3); curvature and Berwald objects need the full order.
    pub fn with_order(cfg: &ProductConfig, point: &TangentSample, order: usize) -> Result<Self> {
        point.validate()?;
        if point.n1() != cfg.n1() || point.n2() != cfg.n2() {
            return Err(Error::Dimension(format!(
                "sample has (n1,n2)=({},{}), configuration ({},{})",
                point.n1(),
                point.n2(),
                cfg.n1(),
                cfg.n2()
            )));
        }
        let geo = Geometry::with_order(cfg, &point.base(), &point.fiber(), order)?;
        let n1 = cfg.n1();
        let vars = geo.vars();
        let f1sq = cfg.f1.f_sq(&vars[..n1])?;
        let f2sq = cfg.f2.f_sq(&vars[n1..cfg.n()])?;
        Ok(DwGeometry {
            cfg: cfg.clone(),
            point: point.clone(),
            geo,
            f1sq,
            f2sq,
            factor1: OnceLock::new(),
            factor2: OnceLock::new(),
            frame: OnceLock::new(),
            koszul: OnceLock::new(),
        })
    }

    pub fn config(&self) -> &ProductConfig {
        &self.cfg
    }

    pub fn point(&self) -> &TangentSample {
        &self.point
    }

    /// The generic engine for `F²` over all `2(n1+n2)` coordinates.
    pub fn engine(&self) -> &Geometry {
        &self.geo
    }

    pub fn n1(&self) -> usize {
        self.cfg.n1()
    }

    pub fn n2(&self) -> usize {
        self.cfg.n2()
    }

    pub fn n(&self) -> usize {
        self.cfg.n()
    }

    /// True when combined index `a` belongs to `M1`.
    pub fn is_latin(&self, a: usize) -> bool {
        a < self.n1()
    }

    /// Engine for `(M1, F1)` at `(x, y)`.
    pub fn factor1(&self) -> Result<&Geometry> {
        self.factor1
            .get_or_init(|| Geometry::with_order(&self.cfg.factor1, &self.point.x, &self.point.y, self.geo.order()))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Engine for `(M2, F2)` at `(u, v)`.
    pub fn factor2(&self) -> Result<&Geometry> {
        self.factor2
            .get_or_init(|| Geometry::with_order(&self.cfg.factor2, &self.point.u, &self.point.v, self.geo.order()))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub(crate) fn frame_data(&self) -> &FrameData {
        self.frame.get_or_init(|| FrameData::new(self))
    }

    pub(crate) fn koszul_table(&self) -> &ConnectionTable {
        self.koszul.get_or_init(|| self.compute_koszul())
    }

    /// `f1²` at the point.
    pub fn f1sq(&self) -> f64 {
        self.f1sq.value()
    }

    pub fn f2sq(&self) -> f64 {
        self.f2sq.value()
    }

    /// `∂f1²/∂x^h`.
    pub fn df1sq(&self, h: usize) -> f64 {
        self.f1sq.d(h).value()
    }

    /// `∂f2²/∂u^α` (factor-local index `α`).
    pub fn df2sq(&self, alpha: usize) -> f64 {
        self.f2sq.d(self.n1() + alpha).value()
    }

    pub fn f2_value(&self) -> f64 {
        self.geo.f2().value()
    }

    /// `𝐠_ab` and `𝐠^ab`.
    pub fn fundamental_tensor(&self) -> (BlockTensor, BlockTensor) {
        let (n1, n2) = (self.n1(), self.n2());
        let g = BlockTensor::from_fn(n1, n2, &[Lower, Lower], |i| self.geo.g(i[0], i[1]).value());
        let gi = BlockTensor::from_fn(n1, n2, &[Upper, Upper], |i| self.geo.ginv(i[0], i[1]).value());
        (g, gi)
    }

    /// `𝐲_a = 𝐠_ab 𝐲^b`.
    pub fn lowered_fiber(&self) -> Vec<f64> {
        let y = self.point.fiber();
        (0..self.n()).map(|a| (0..self.n()).map(|b| self.geo.g(a, b).value() * y[b]).sum()).collect()
    }

    /// `h_ab = 𝐠_ab − F⁻² 𝐲_a 𝐲_b`.
    pub fn angular_metric(&self) -> BlockTensor {
        let yl = self.lowered_fiber();
        let f2 = self.f2_value();
        BlockTensor::from_fn(self.n1(), self.n2(), &[Lower, Lower], |i| {
            self.geo.g(i[0], i[1]).value() - yl[i[0]] * yl[i[1]] / f2
        })
    }

    /// `C_abc = ½ ∂𝐠_ab/∂𝐲^c`.
    pub fn cartan_tensor(&self) -> BlockTensor {
        BlockTensor::from_fn(self.n1(), self.n2(), &[Lower, Lower, Lower], |i| self.geo.cartan(i[0], i[1], i[2]))
    }

    /// `I_a = 𝐠^bc C_abc`.
    pub fn mean_cartan(&self) -> BlockTensor {
        let c = self.cartan_tensor();
        let n = self.n();
        BlockTensor::from_fn(self.n1(), self.n2(), &[Lower], |i| {
            let mut s = 0.0;
            for b in 0..n {
                for d in 0..n {
                    s += self.geo.ginv(b, d).value() * c.get(&[i[0], b, d]);
                }
            }
            s
        })
    }

    /// `M_abc = C_abc − (I_a h_bc + I_b h_ac + I_c h_ab)/(n+1)` with `n = n1 + n2`.
    pub fn matsumoto_torsion(&self) -> Result<BlockTensor> {
        let n = self.n();
        if n < 2 {
            return Err(Error::Precondition("Matsumoto torsion needs n1+n2 ≥ 2".into()));
        }
        let c = self.cartan_tensor();
        let ic = self.mean_cartan();
        let h = self.angular_metric();
        let k = 1.0 / (n as f64 + 1.0);
        Ok(BlockTensor::from_fn(self.n1(), self.n2(), &[Lower, Lower, Lower], |i| {
            let (a, b, d) = (i[0], i[1], i[2]);
            c.get(i) - k * (ic.get(&[a]) * h.get(&[b, d]) + ic.get(&[b]) * h.get(&[a, d]) + ic.get(&[d]) * h.get(&[a, b]))
        }))
    }
}

/// Both sides of the fiber contraction of the Matsumoto torsion against one factor:
/// `y^j y^k M_αjk` vs `−f1²f2²F1²F2² I_α / ((n+1)F²)` and the mirrored Latin form.
#[derive(Clone, Debug, Serialize)]
pub struct MatsumotoContraction {
    /// `(lhs, rhs)` for each Greek index.
    pub greek: Vec<(f64, f64)>,
    /// `v^β v^γ M_iβγ` against the same factor times `I_i`.
    pub latin: Vec<(f64, f64)>,
}

impl MatsumotoContraction {
    pub fn residual(&self) -> f64 {
        self.greek.iter().chain(&self.latin).fold(0.0, |m, (l, r)| m.max((l - r).abs()))
    }

    /// Smallest of the two sides' largest magnitudes.
    pub fn magnitude(&self) -> f64 {
        let side = |k: usize| self.greek.iter().chain(&self.latin).fold(0.0f64, |m, p| m.max(if k == 0 { p.0 } else { p.1 }.abs()));
        side(0).min(side(1))
    }
}

impl DwGeometry {
    pub fn matsumoto_contraction(&self) -> Result<MatsumotoContraction> {
        let m = self.matsumoto_torsion()?;
        let ic = self.mean_cartan();
        let (n1, n2, n) = (self.n1(), self.n2(), self.n());
        let p = self.point();
        let f1 = self.factor1()?.f2().value();
        let f2 = self.factor2()?.f2().value();
        let k = -self.f1sq() * self.f2sq() * f1 * f2 / ((n as f64 + 1.0) * self.f2_value());
        let greek = (0..n2)
            .map(|al| {
                let mut s = 0.0;
                for j in 0..n1 {
                    for l in 0..n1 {
                        s += p.y[j] * p.y[l] * m.get(&[n1 + al, j, l]);
                    }
                }
                (s, k * ic.get(&[n1 + al]))
            })
            .collect();
        let latin = (0..n1)
            .map(|i| {
                let mut s = 0.0;
                for b in 0..n2 {
                    for c in 0..n2 {
                        s += p.v[b] * p.v[c] * m.get(&[i, n1 + b, n1 + c]);
                    }
                }
                (s, k * ic.get(&[i]))
            })
            .collect();
        Ok(MatsumotoContraction { greek, latin })
    }
}

/// Jet of `F²` at `point` seeded on `seeds`.
pub fn eval_f2(cfg: &ProductConfig, point: &TangentSample, seeds: &[CoordIndex], order: usize) -> Result<SeededJet> {
    if point.n1() != cfg.n1() || point.n2() != cfg.n2() {
        return Err(Error::Dimension("sample does not match configuration dimensions".into()));
    }
    jet_lift(cfg, point, seeds, order)
}

pub fn fundamental_tensor(cfg: &ProductConfig, point: &TangentSample) -> Result<(BlockTensor, BlockTensor)> {
    Ok(DwGeometry::with_order(cfg, point, 3)?.fundamental_tensor())
}

pub fn angular_metric(cfg: &ProductConfig, point: &TangentSample) -> Result<BlockTensor> {
    Ok(DwGeometry::with_order(cfg, point, 3)?.angular_metric())
}

pub fn cartan_tensor(cfg: &ProductConfig, point: &TangentSample) -> Result<BlockTensor> {
    Ok(DwGeometry::with_order(cfg, point, 3)?.cartan_tensor())
}

pub fn mean_cartan(cfg: &ProductConfig, point: &TangentSample) -> Result<BlockTensor> {
    Ok(DwGeometry::with_order(cfg, point, 3)?.mean_cartan())
}

pub fn matsumoto_torsion(cfg: &ProductConfig, point: &TangentSample) -> Result<BlockTensor> {
    DwGeometry::with_order(cfg, point, 3)?.matsumoto_torsion()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{fixture, FactorMetricSpec, WarpSpec};

    fn sample(x: &[f64], u: &[f64], y: &[f64], v: &[f64]) -> TangentSample {
        TangentSample::new(x.to_vec(), u.to_vec(), y.to_vec(), v.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_factors_give_diagonal_tensor() {
        let e = FactorMetricSpec::euclidean;
        let cfg = ProductConfig::new(
            e(2).unwrap(),
            e(2).unwrap(),
            WarpSpec::Constant(1.0),
            WarpSpec::Constant(2f64.sqrt()),
        )
        .unwrap();
        let p = sample(&[0.1, 0.2], &[0.3, 0.4], &[1.0, 2.0], &[0.5, -1.0]);
        let (g, _) = fundamental_tensor(&cfg, &p).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let expect = if a != b { 0.0 } else if a < 2 { 2.0 } else { 1.0 };
                assert!((g.get(&[a, b]) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn angular_metric_annihilates_fiber() {
        let cfg = fixture("FIX-R").unwrap();
        let p = sample(&[0.3, -0.2], &[0.5, 0.1], &[1.0, 0.7], &[-0.4, 1.2]);
        let h = angular_metric(&cfg, &p).unwrap();
        let y = p.fiber();
        for a in 0..4 {
            let s: f64 = (0..4).map(|b| h.get(&[a, b]) * y[b]).sum();
            assert!(s.abs() < 1e-10);
        }
    }

    #[test]
    fn one_dimensional_angular_metric_has_rank_one() {
        let cfg = fixture("FIX-P").unwrap();
        let cfg = ProductConfig::new(
            FactorMetricSpec::euclidean(1).unwrap(),
            FactorMetricSpec::euclidean(1).unwrap(),
            cfg.f1,
            cfg.f2,
        )
        .unwrap();
        let p = sample(&[0.0], &[0.0], &[1.0], &[2.0]);
        let h = angular_metric(&cfg, &p).unwrap();
        let det = h.get(&[0, 0]) * h.get(&[1, 1]) - h.get(&[0, 1]) * h.get(&[1, 0]);
        assert!(det.abs() < 1e-12);
        assert!(h.max_abs() > 0.1);
    }

    #[test]
    fn riemannian_factors_have_zero_cartan() {
        let cfg = fixture("FIX-E").unwrap();
        let p = sample(&[0.3, -0.2], &[0.5, 0.1], &[1.0, 0.7], &[-0.4, 1.2]);
        assert!(cartan_tensor(&cfg, &p).unwrap().max_abs() < 1e-12);
        assert!(matsumoto_torsion(&cfg, &p).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn randers_cartan_is_block_diagonal() {
        let cfg = fixture("FIX-R").unwrap();
        let p = sample(&[0.3, -0.2], &[0.5, 0.1], &[1.0, 0.7], &[-0.4, 1.2]);
        let c = cartan_tensor(&cfg, &p).unwrap();
        assert!(c.mixed_max_abs() < 1e-12);
        assert!(c.max_abs() > 1e-3);
    }

    #[test]
    fn matsumoto_fully_contracted_vanishes() {
        let cfg = fixture("FIX-R").unwrap();
        let p = sample(&[0.3, -0.2], &[0.5, 0.1], &[1.0, 0.7], &[-0.4, 1.2]);
        let m = matsumoto_torsion(&cfg, &p).unwrap();
        let y = p.fiber();
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    s += m.get(&[a, b, c]) * y[a] * y[b] * y[c];
                }
            }
        }
        assert!(s.abs() < 1e-10);
    }

    #[test]
    fn matsumoto_contraction_against_factor() {
        let cfg = fixture("FIX-R").unwrap();
        let p = sample(&[0.3, -0.2], &[0.5, 0.1], &[1.0, 0.7], &[-0.4, 1.2]);
        let c = DwGeometry::new(&cfg, &p).unwrap().matsumoto_contraction().unwrap();
        assert!(c.residual() < 1e-10, "{c:?}");
        assert!(c.magnitude() > 1e-4, "{c:?}");
    }
}
