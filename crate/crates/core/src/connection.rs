//! Spray, nonlinear connection, adapted frame brackets and the horizontal
//! coefficients of a doubly warped product, each available from the generic
//! engine and from factor-level closed forms.

use serde::Serialize;

use crate::error::Result;
use crate::finsler::DwGeometry;
use crate::geometry::Geometry;
use crate::jets::{jet_lift, CoordIndex, MultiIndex, ScalarField};
use crate::tensor::{Block, BlockTensor, Variance};

use Block::{Greek as Gk, Latin as Lt};
use Variance::{Lower, Upper};

/// How the spray is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SprayPath {
    /// From the fundamental tensor of the product.
    Generic,
    /// From the factor sprays and the warps.
    ProductDecomposed,
}

/// Largest disagreement between two evaluations on one index block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockDiscrepancy {
    pub block: String,
    pub max_abs_diff: f64,
}

pub(crate) fn compare_blocks(a: &BlockTensor, b: &BlockTensor, blocks: &[(&str, &[Block])]) -> Vec<BlockDiscrepancy> {
    blocks
        .iter()
        .map(|(name, pat)| BlockDiscrepancy { block: name.to_string(), max_abs_diff: a.block_max_abs_diff(b, pat) })
        .collect()
}

/// Factor engines, warp values and their first derivatives at one point.
pub(crate) struct FactorParts<'a> {
    pub n1: usize,
    pub n2: usize,
    pub e1: &'a Geometry,
    pub e2: &'a Geometry,
    /// `f1²`, `f2²`
    pub a: f64,
    pub b: f64,
    /// `∂f1²/∂x^h`, `∂f2²/∂u^α`
    pub da: Vec<f64>,
    pub db: Vec<f64>,
    /// `F1²`, `F2²`
    pub q1: f64,
    pub q2: f64,
    /// `∂F1²/∂y^h`, `∂F2²/∂v^α`
    pub dq1: Vec<f64>,
    pub dq2: Vec<f64>,
    /// `∂_α f2² v^α`, `∂_j f1² y^j`
    pub dbv: f64,
    pub day: f64,
}

impl FactorParts<'_> {
    pub fn g1(&self, i: usize, j: usize) -> f64 {
        self.e1.g(i, j).value()
    }

    pub fn g2(&self, a: usize, b: usize) -> f64 {
        self.e2.g(a, b).value()
    }

    pub fn g1i(&self, i: usize, j: usize) -> f64 {
        self.e1.ginv(i, j).value()
    }

    pub fn g2i(&self, a: usize, b: usize) -> f64 {
        self.e2.ginv(a, b).value()
    }

    /// Lowered factor Cartan tensors.
    pub fn c1(&self, i: usize, j: usize, k: usize) -> f64 {
        self.e1.cartan(i, j, k)
    }

    pub fn c2(&self, a: usize, b: usize, c: usize) -> f64 {
        self.e2.cartan(a, b, c)
    }

    /// `C^s_ij` of factor 1.
    pub fn c1_up(&self, s: usize, i: usize, j: usize) -> f64 {
        (0..self.n1).map(|h| self.g1i(s, h) * self.c1(h, i, j)).sum()
    }

    pub fn c2_up(&self, s: usize, a: usize, b: usize) -> f64 {
        (0..self.n2).map(|h| self.g2i(s, h) * self.c2(h, a, b)).sum()
    }
}

impl DwGeometry {
    pub(crate) fn parts(&self) -> Result<FactorParts<'_>> {
        let (n1, n2) = (self.n1(), self.n2());
        let e1 = self.factor1()?;
        let e2 = self.factor2()?;
        let da: Vec<f64> = (0..n1).map(|h| self.df1sq(h)).collect();
        let db: Vec<f64> = (0..n2).map(|h| self.df2sq(h)).collect();
        let y = &self.point().y;
        let v = &self.point().v;
        let dbv = db.iter().zip(v).map(|(a, b)| a * b).sum();
        let day = da.iter().zip(y).map(|(a, b)| a * b).sum();
        Ok(FactorParts {
            n1,
            n2,
            e1,
            e2,
            a: self.f1sq(),
            b: self.f2sq(),
            q1: e1.f2().value(),
            q2: e2.f2().value(),
            dq1: (0..n1).map(|h| e1.f2_dy(h)).collect(),
            dq2: (0..n2).map(|h| e2.f2_dy(h)).collect(),
            da,
            db,
            dbv,
            day,
        })
    }

    /// Spray coefficients `𝐆^a`.
    pub fn spray(&self, path: SprayPath) -> Result<BlockTensor> {
        let (n1, n2) = (self.n1(), self.n2());
        match path {
            SprayPath::Generic => {
                Ok(BlockTensor::from_fn(n1, n2, &[Upper], |i| self.engine().spray(i[0]).value()))
            }
            SprayPath::ProductDecomposed => {
                let p = self.parts()?;
                Ok(BlockTensor::from_fn(n1, n2, &[Upper], |idx| {
                    let a = idx[0];
                    if a < n1 {
                        let s: f64 = (0..n1).map(|h| p.g1i(a, h) * (p.dbv * p.dq1[h] - p.da[h] * p.q2)).sum();
                        p.e1.spray(a).value() + s / (4.0 * p.b)
                    } else {
                        let al = a - n1;
                        let s: f64 = (0..n2).map(|g| p.g2i(al, g) * (p.day * p.dq2[g] - p.db[g] * p.q1)).sum();
                        p.e2.spray(al).value() + s / (4.0 * p.a)
                    }
                }))
            }
        }
    }

    /// `N^a_b = ∂𝐆^a/∂𝐲^b` from the generic engine, stored at `[a][b]`.
    pub fn nonlinear_connection(&self) -> BlockTensor {
        BlockTensor::from_fn(self.n1(), self.n2(), &[Upper, Lower], |i| self.engine().nl(i[0], i[1]).value())
    }

    /// Nonlinear connection from factor objects and warps.
    pub fn nonlinear_connection_closed(&self) -> Result<BlockTensor> {
        let p = self.parts()?;
        let (n1, n2) = (p.n1, p.n2);
        Ok(BlockTensor::from_fn(n1, n2, &[Upper, Lower], |idx| {
            let (a, b) = (idx[0], idx[1]);
            match (a < n1, b < n1) {
                (true, true) => {
                    let (i, j) = (a, b);
                    let mut s = p.e1.nl(i, j).value();
                    s -= (0..n1).map(|h| p.e1.ginv_dy(i, h, &[j]) * p.da[h]).sum::<f64>() * p.q2 / (4.0 * p.b);
                    if i == j {
                        s += p.dbv / (2.0 * p.b);
                    }
                    s
                }
                (true, false) => {
                    let (i, be) = (a, b - n1);
                    let s: f64 = (0..n1).map(|h| p.g1i(i, h) * (p.db[be] * p.dq1[h] - p.da[h] * p.dq2[be])).sum();
                    s / (4.0 * p.b)
                }
                (false, true) => {
                    let (al, j) = (a - n1, b);
                    let s: f64 = (0..n2).map(|g| p.g2i(al, g) * (p.da[j] * p.dq2[g] - p.db[g] * p.dq1[j])).sum();
                    s / (4.0 * p.a)
                }
                (false, false) => {
                    let (al, be) = (a - n1, b - n1);
                    let mut s = p.e2.nl(al, be).value();
                    s -= (0..n2).map(|g| p.e2.ginv_dy(al, g, &[be]) * p.db[g]).sum::<f64>() * p.q1 / (4.0 * p.a);
                    if al == be {
                        s += p.day / (2.0 * p.a);
                    }
                    s
                }
            }
        }))
    }

    /// Adapted derivative `δ_a φ = ∂φ/∂𝐱^a − N^c_a ∂φ/∂𝐲^c` of a scalar field.
    pub fn adapted_derivative(&self, field: &dyn ScalarField, a: usize) -> Result<f64> {
        let (n1, n2) = (self.n1(), self.n2());
        let n = n1 + n2;
        let seeds: Vec<CoordIndex> =
            (0..n).map(|c| CoordIndex::base(n1, c)).chain((0..n).map(|c| CoordIndex::fiber(n1, c))).collect();
        let jet = jet_lift(field, self.point(), &seeds, 1)?;
        let d = |c: CoordIndex| jet.partial(&MultiIndex::new([(c, 1)]).expect("valid"));
        let mut r = d(CoordIndex::base(n1, a))?;
        for c in 0..n {
            r -= self.engine().nl(c, a).value() * d(CoordIndex::fiber(n1, c))?;
        }
        Ok(r)
    }

    /// Frame bracket coefficients `(R, G)`: `[δ_a, δ_b] = R^c_ab ∂_c`, `[δ_a, ∂_b] = G^c_ab ∂_c`,
    /// both stored at `[c][a][b]`.
    pub fn frame_brackets(&self) -> (BlockTensor, BlockTensor) {
        let e = self.engine();
        let v = [Upper, Lower, Lower];
        let r = BlockTensor::from_fn(self.n1(), self.n2(), &v, |i| e.bracket_curvature(i[0], i[1], i[2]).value());
        let g = BlockTensor::from_fn(self.n1(), self.n2(), &v, |i| e.gconn(i[0], i[1], i[2]).value());
        (r, g)
    }

    /// `G^c_ab` from factor objects and warps.
    pub fn berwald_connection_closed(&self) -> Result<BlockTensor> {
        let p = self.parts()?;
        let (n1, n2) = (p.n1, p.n2);
        Ok(BlockTensor::from_fn(n1, n2, &[Upper, Lower, Lower], |idx| {
            let (c, mut a, mut b) = (idx[0], idx[1], idx[2]);
            if a >= n1 && b < n1 {
                std::mem::swap(&mut a, &mut b);
            }
            if c < n1 {
                let k = c;
                match (a < n1, b < n1) {
                    (true, true) => {
                        let s: f64 = (0..n1).map(|h| p.e1.ginv_dy(k, h, &[b, a]) * p.da[h]).sum();
                        p.e1.gconn(k, a, b).value() - s * p.q2 / (4.0 * p.b)
                    }
                    (true, false) => {
                        let (i, be) = (a, b - n1);
                        let s: f64 = (0..n1).map(|h| p.e1.ginv_dy(k, h, &[i]) * p.da[h]).sum();
                        let mut r = -s * p.dq2[be] / (4.0 * p.b);
                        if k == i {
                            r += p.db[be] / (2.0 * p.b);
                        }
                        r
                    }
                    _ => {
                        let (al, be) = (a - n1, b - n1);
                        let s: f64 = (0..n1).map(|h| p.g1i(k, h) * p.da[h]).sum();
                        -p.g2(al, be) * s / (2.0 * p.b)
                    }
                }
            } else {
                let ga = c - n1;
                match (a < n1, b < n1) {
                    (true, true) => {
                        let s: f64 = (0..n2).map(|al| p.g2i(al, ga) * p.db[al]).sum();
                        -p.g1(a, b) * s / (2.0 * p.a)
                    }
                    (true, false) => {
                        let (i, be) = (a, b - n1);
                        let s: f64 = (0..n2).map(|al| p.e2.ginv_dy(al, ga, &[be]) * p.db[al]).sum();
                        let mut r = -s * p.dq1[i] / (4.0 * p.a);
                        if ga == be {
                            r += p.da[i] / (2.0 * p.a);
                        }
                        r
                    }
                    _ => {
                        let (al, be) = (a - n1, b - n1);
                        let s: f64 = (0..n2).map(|l| p.e2.ginv_dy(ga, l, &[be, al]) * p.db[l]).sum();
                        p.e2.gconn(ga, al, be).value() - s * p.q1 / (4.0 * p.a)
                    }
                }
            }
        }))
    }

    /// Per-block comparison of generic and closed-form `G^c_ab`.
    pub fn berwald_connection_discrepancy(&self) -> Result<Vec<BlockDiscrepancy>> {
        let (_, g) = self.frame_brackets();
        let c = self.berwald_connection_closed()?;
        Ok(compare_blocks(&g, &c, CONNECTION_BLOCKS))
    }

    /// Horizontal coefficients `F^c_ab` from the generic engine, stored at `[c][a][b]`.
    pub fn horizontal_coefficients(&self) -> BlockTensor {
        let e = self.engine();
        BlockTensor::from_fn(self.n1(), self.n2(), &[Upper, Lower, Lower], |i| e.hcoef(i[0], i[1], i[2]).value())
    }

    /// `F^c_ab` from factor objects, warps and the closed-form nonlinear connection.
    pub fn horizontal_coefficients_closed(&self) -> Result<BlockTensor> {
        let p = self.parts()?;
        let nc = self.nonlinear_connection_closed()?;
        let (n1, n2) = (p.n1, p.n2);
        let dg1 = |h: usize, i: usize, r: usize| 2.0 * p.c1(h, i, r);
        let dg2 = |h: usize, i: usize, r: usize| 2.0 * p.c2(h, i, r);
        let m1 = |r: usize, i: usize| {
            let s: f64 = (0..n1).map(|h| p.e1.ginv_dy(r, h, &[i]) * p.da[h]).sum();
            let d = if r == i { p.dbv / (2.0 * p.b) } else { 0.0 };
            d - s * p.q2 / (4.0 * p.b)
        };
        let m2 = |m: usize, al: usize| {
            let s: f64 = (0..n2).map(|l| p.e2.ginv_dy(m, l, &[al]) * p.db[l]).sum();
            let d = if m == al { p.day / (2.0 * p.a) } else { 0.0 };
            d - s * p.q1 / (4.0 * p.a)
        };
        Ok(BlockTensor::from_fn(n1, n2, &[Upper, Lower, Lower], |idx| {
            let (c, mut a, mut b) = (idx[0], idx[1], idx[2]);
            if a >= n1 && b < n1 {
                std::mem::swap(&mut a, &mut b);
            }
            if c < n1 {
                let k = c;
                match (a < n1, b < n1) {
                    (true, true) => {
                        let (i, j) = (a, b);
                        let mut s = 0.0;
                        for h in 0..n1 {
                            let mut t = 0.0;
                            for r in 0..n1 {
                                t += m1(r, j) * dg1(h, i, r) + m1(r, i) * dg1(h, j, r) - m1(r, h) * dg1(i, j, r);
                            }
                            s += p.g1i(k, h) * t;
                        }
                        p.e1.hcoef(k, i, j).value() - 0.5 * s
                    }
                    (true, false) => {
                        let (i, be) = (a, b - n1);
                        let s: f64 = (0..n1)
                            .map(|h| {
                                let t: f64 = (0..n1).map(|r| nc.get(&[r, n1 + be]) * dg1(h, i, r)).sum();
                                p.g1i(k, h) * (p.db[be] * p.g1(h, i) - p.b * t)
                            })
                            .sum();
                        s / (2.0 * p.b)
                    }
                    _ => {
                        let (al, be) = (a - n1, b - n1);
                        let s: f64 = (0..n1)
                            .map(|h| {
                                let t: f64 = (0..n2).map(|l| nc.get(&[n1 + l, h]) * dg2(al, be, l)).sum();
                                p.g1i(k, h) * (p.da[h] * p.g2(al, be) - p.a * t)
                            })
                            .sum();
                        -s / (2.0 * p.b)
                    }
                }
            } else {
                let ga = c - n1;
                match (a < n1, b < n1) {
                    (true, true) => {
                        let (i, j) = (a, b);
                        let s: f64 = (0..n2)
                            .map(|l| {
                                let t: f64 = (0..n1).map(|r| nc.get(&[r, n1 + l]) * dg1(i, j, r)).sum();
                                p.g2i(ga, l) * (p.db[l] * p.g1(i, j) - p.b * t)
                            })
                            .sum();
                        -s / (2.0 * p.a)
                    }
                    (true, false) => {
                        let (i, be) = (a, b - n1);
                        let s: f64 = (0..n2)
                            .map(|l| {
                                let t: f64 = (0..n2).map(|al| nc.get(&[n1 + al, i]) * dg2(be, l, al)).sum();
                                p.g2i(ga, l) * (p.da[i] * p.g2(be, l) - p.a * t)
                            })
                            .sum();
                        s / (2.0 * p.a)
                    }
                    _ => {
                        let (al, be) = (a - n1, b - n1);
                        let mut s = 0.0;
                        for l in 0..n2 {
                            let mut t = 0.0;
                            for mu in 0..n2 {
                                t += m2(mu, be) * dg2(l, al, mu) + m2(mu, al) * dg2(l, be, mu) - m2(mu, l) * dg2(al, be, mu);
                            }
                            s += p.g2i(ga, l) * t;
                        }
                        p.e2.hcoef(ga, al, be).value() - 0.5 * s
                    }
                }
            }
        }))
    }

    /// Per-block comparison of generic and closed-form `F^c_ab`.
    pub fn horizontal_coefficients_discrepancy(&self) -> Result<Vec<BlockDiscrepancy>> {
        let a = self.horizontal_coefficients();
        let b = self.horizontal_coefficients_closed()?;
        Ok(compare_blocks(&a, &b, CONNECTION_BLOCKS))
    }

    /// Per-block comparison of generic and closed-form `N^a_b`.
    pub fn nonlinear_connection_discrepancy(&self) -> Result<Vec<BlockDiscrepancy>> {
        let a = self.nonlinear_connection();
        let b = self.nonlinear_connection_closed()?;
        Ok(compare_blocks(
            &a,
            &b,
            &[("N^i_j", &[Lt, Lt]), ("N^i_β", &[Lt, Gk]), ("N^α_j", &[Gk, Lt]), ("N^α_β", &[Gk, Gk])],
        ))
    }
}

/// The six independent blocks of a connection symmetric in its lower indices.
pub const CONNECTION_BLOCKS: &[(&str, &[Block])] = &[
    ("^k_ij", &[Lt, Lt, Lt]),
    ("^k_iβ", &[Lt, Lt, Gk]),
    ("^k_αβ", &[Lt, Gk, Gk]),
    ("^γ_ij", &[Gk, Lt, Lt]),
    ("^γ_iβ", &[Gk, Lt, Gk]),
    ("^γ_αβ", &[Gk, Gk, Gk]),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::fixture;
    use crate::sample::TangentSample;

    fn fix1d() -> DwGeometry {
        let cfg = fixture("FIX-1D").unwrap();
        let p = TangentSample::new(vec![0.0], vec![1.0], vec![1.0], vec![1.0]).unwrap();
        DwGeometry::new(&cfg, &p).unwrap()
    }

    fn generic_point(name: &str) -> DwGeometry {
        let cfg = fixture(name).unwrap();
        let p = TangentSample::new(vec![0.4, -0.3], vec![0.7, 0.2], vec![1.1, -0.6], vec![0.5, 0.9]).unwrap();
        DwGeometry::new(&cfg, &p).unwrap()
    }

    #[test]
    fn one_dimensional_spray_values() {
        let d = fix1d();
        for path in [SprayPath::Generic, SprayPath::ProductDecomposed] {
            let s = d.spray(path).unwrap();
            assert!((s.get(&[0]) - 0.5).abs() < 1e-12);
            assert!((s.get(&[1]) + 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn one_dimensional_nonlinear_connection() {
        let d = fix1d();
        let expect = [[0.5, 0.5], [-1.0, 0.0]];
        for t in [d.nonlinear_connection(), d.nonlinear_connection_closed().unwrap()] {
            for a in 0..2 {
                for b in 0..2 {
                    assert!((t.get(&[a, b]) - expect[a][b]).abs() < 1e-12, "{a}{b}: {}", t.get(&[a, b]));
                }
            }
        }
    }

    #[test]
    fn one_dimensional_brackets_and_horizontal() {
        let d = fix1d();
        let (_, g) = d.frame_brackets();
        assert!((g.get(&[1, 0, 0]) + 1.0).abs() < 1e-12);
        let f = d.horizontal_coefficients();
        assert!((f.get(&[0, 0, 1]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_match_generic() {
        for name in ["FIX-E", "FIX-R", "FIX-1D"] {
            let d = if name == "FIX-1D" { fix1d() } else { generic_point(name) };
            let s = d.spray(SprayPath::Generic).unwrap().max_abs_diff(&d.spray(SprayPath::ProductDecomposed).unwrap());
            assert!(s < 1e-10, "{name} spray {s}");
            for r in d.nonlinear_connection_discrepancy().unwrap() {
                assert!(r.max_abs_diff < 1e-10, "{name} {r:?}");
            }
            for r in d.berwald_connection_discrepancy().unwrap() {
                assert!(r.max_abs_diff < 1e-9, "{name} {r:?}");
            }
            for r in d.horizontal_coefficients_discrepancy().unwrap() {
                assert!(r.max_abs_diff < 1e-9, "{name} {r:?}");
            }
        }
    }

    #[test]
    fn adapted_derivative_of_energy_vanishes() {
        let d = generic_point("FIX-R");
        let cfg = d.config().clone();
        for a in 0..4 {
            assert!(d.adapted_derivative(&cfg, a).unwrap().abs() < 1e-10);
        }
    }
}
