//! Generic pointwise Finsler engine: every object is derived from jets of `F²`
//! over all base and fiber coordinates of one patch.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::jets::{Jet, JetSpace};
use crate::metric::FinslerFunction;

/// Jet order used for full evaluations; enough for third fiber derivatives of the spray.
pub const ENGINE_ORDER: usize = 5;

/// Condition estimate above which a fundamental tensor is rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Inverse of a small symmetric jet matrix by Gauss-Jordan elimination with
/// partial pivoting on the values.
pub fn invert_jet_matrix(a: &[Jet], m: usize) -> Result<Vec<Jet>> {
    let vals: Vec<f64> = a.iter().map(Jet::value).collect();
    let mut lhs: Vec<Jet> = a.to_vec();
    let one = a[0].scale(0.0).add_scalar(1.0);
    let zero = a[0].scale(0.0);
    let mut rhs: Vec<Jet> = (0..m * m).map(|k| if k / m == k % m { one.clone() } else { zero.clone() }).collect();
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| lhs[i * m + col].value().abs().total_cmp(&lhs[j * m + col].value().abs()))
            .expect("nonempty");
        if lhs[piv * m + col].value() == 0.0 {
            return Err(Error::Singular);
        }
        if piv != col {
            for k in 0..m {
                lhs.swap(piv * m + k, col * m + k);
                rhs.swap(piv * m + k, col * m + k);
            }
        }
        let inv = lhs[col * m + col].recip()?;
        for k in 0..m {
            lhs[col * m + k] = lhs[col * m + k].mul_jet(&inv);
            rhs[col * m + k] = rhs[col * m + k].mul_jet(&inv);
        }
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = lhs[r * m + col].clone();
            if f.coeffs().iter().all(|&c| c == 0.0) {
                continue;
            }
            for k in 0..m {
                let l = lhs[col * m + k].mul_jet(&f);
                lhs[r * m + k] = lhs[r * m + k].sub_jet(&l);
                let q = rhs[col * m + k].mul_jet(&f);
                rhs[r * m + k] = rhs[r * m + k].sub_jet(&q);
            }
        }
    }
    let norm1 = |v: &dyn Fn(usize, usize) -> f64| (0..m).map(|c| (0..m).map(|r| v(r, c).abs()).sum::<f64>()).fold(0.0, f64::max);
    let cond = norm1(&|r, c| vals[r * m + c]) * norm1(&|r, c| rhs[r * m + c].value());
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned(cond));
    }
    Ok(rhs)
}

/// Pointwise geometry of `F²` on an `m`-dimensional patch.
///
/// Variables `0..m` are base coordinates and `m..2m` fiber coordinates. With jet
/// order `N` the stored objects carry: `F²` order `N`, `g` and `g⁻¹` order `N−2`,
/// spray order `N−2`, nonlinear connection order `N−3`, `F^c_ab` order `N−3`.
pub struct Geometry {
    m: usize,
    base: Vec<f64>,
    fiber: Vec<f64>,
    vars: Vec<Jet>,
    f2: Jet,
    g: Vec<Jet>,
    ginv: Vec<Jet>,
    spray: Vec<Jet>,
    nl: Vec<Jet>,
    hcoef: Vec<Jet>,
    gconn: OnceLock<Vec<Jet>>,
    bracket: OnceLock<Vec<Jet>>,
    hh: OnceLock<Vec<f64>>,
}

impl Geometry {
    pub fn new(metric: &dyn FinslerFunction, base: &[f64], fiber: &[f64]) -> Result<Self> {
        Self::with_order(metric, base, fiber, ENGINE_ORDER)
    }

    /// Engine at a reduced jet order (at least 3); higher objects become unavailable.
    pub fn with_order(metric: &dyn FinslerFunction, base: &[f64], fiber: &[f64], order: usize) -> Result<Self> {
        let m = metric.dim();
        if base.len() != m || fiber.len() != m {
            return Err(Error::Dimension(format!("patch of dim {m} given {} / {}", base.len(), fiber.len())));
        }
        if order < 3 {
            return Err(Error::Precondition("engine order must be at least 3".into()));
        }
        let space = JetSpace::get(2 * m, order)?;
        let vars: Vec<Jet> = base.iter().chain(fiber).enumerate().map(|(k, &c)| Jet::variable(&space, k, c)).collect();
        let f2 = metric.f2(&vars[..m], &vars[m..])?;

        let fy: Vec<Jet> = (0..m).map(|a| f2.d(m + a)).collect();
        let mut g: Vec<Jet> = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                if b < a {
                    let t: Jet = g[b * m + a].clone();
                    g.push(t);
                } else {
                    g.push(fy[a].d(m + b).scale(0.5));
                }
            }
        }
        let ginv = invert_jet_matrix(&g, m)?;

        let mut rhs = Vec::with_capacity(m);
        for b in 0..m {
            let mut t = f2.d(b).scale(-1.0).truncate(order - 2);
            for c in 0..m {
                t = t.add_jet(&fy[b].d(c).mul_jet(&vars[m + c]));
            }
            rhs.push(t);
        }
        let mut spray = Vec::with_capacity(m);
        for a in 0..m {
            let mut s = rhs[0].scale(0.0);
            for b in 0..m {
                s = s.add_jet(&ginv[a * m + b].mul_jet(&rhs[b]));
            }
            spray.push(s.scale(0.25));
        }
        let nl: Vec<Jet> = (0..m * m).map(|k| spray[k / m].d(m + k % m)).collect();

        let mut geo = Geometry {
            m,
            base: base.to_vec(),
            fiber: fiber.to_vec(),
            vars,
            f2,
            g,
            ginv,
            spray,
            nl,
            hcoef: Vec::new(),
            gconn: OnceLock::new(),
            bracket: OnceLock::new(),
            hh: OnceLock::new(),
        };
        geo.hcoef = geo.compute_hcoef();
        Ok(geo)
    }

    fn compute_hcoef(&self) -> Vec<Jet> {
        let m = self.m;
        // dg[(e*m+a)*m+b] = δ_b g_ea
        let mut dg = Vec::with_capacity(m * m * m);
        for e in 0..m {
            for a in 0..m {
                for b in 0..m {
                    dg.push(self.delta(&self.g[e * m + a], b));
                }
            }
        }
        let at = |e: usize, a: usize, b: usize| &dg[(e * m + a) * m + b];
        let mut out: Vec<Jet> = Vec::with_capacity(m * m * m);
        for c in 0..m {
            for a in 0..m {
                for b in 0..m {
                    if b < a {
                        let t: Jet = out[(c * m + b) * m + a].clone();
                        out.push(t);
                        continue;
                    }
                    let mut s = at(0, 0, 0).scale(0.0);
                    for e in 0..m {
                        let bracket = at(e, a, b).add_jet(at(e, b, a)).sub_jet(at(a, b, e));
                        s = s.add_jet(&self.ginv[c * m + e].mul_jet(&bracket));
                    }
                    out.push(s.scale(0.5));
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.f2.order()
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn fiber(&self) -> &[f64] {
        &self.fiber
    }

    /// Jet variable index of base coordinate `a`.
    pub fn xv(&self, a: usize) -> usize {
        a
    }

    /// Jet variable index of fiber coordinate `a`.
    pub fn yv(&self, a: usize) -> usize {
        self.m + a
    }

    /// Coordinate function jets in the engine's variable space.
    pub fn vars(&self) -> &[Jet] {
        &self.vars
    }

    pub fn f2(&self) -> &Jet {
        &self.f2
    }

    pub fn g(&self, a: usize, b: usize) -> &Jet {
        &self.g[a * self.m + b]
    }

    pub fn ginv(&self, a: usize, b: usize) -> &Jet {
        &self.ginv[a * self.m + b]
    }

    pub fn spray(&self, a: usize) -> &Jet {
        &self.spray[a]
    }

    /// `N^a_b = ∂G^a/∂y^b`.
    pub fn nl(&self, a: usize, b: usize) -> &Jet {
        &self.nl[a * self.m + b]
    }

    /// `F^c_ab` built from adapted derivatives of `g`.
    pub fn hcoef(&self, c: usize, a: usize, b: usize) -> &Jet {
        &self.hcoef[(c * self.m + a) * self.m + b]
    }

    /// Adapted derivative `δ_a f = ∂f/∂x^a − N^c_a ∂f/∂y^c`.
    pub fn delta(&self, f: &Jet, a: usize) -> Jet {
        let mut r = f.d(self.xv(a));
        for c in 0..self.m {
            r = r.sub_jet(&self.nl(c, a).mul_jet(&f.d(self.yv(c))));
        }
        r
    }

    /// `G^c_ab = ∂N^c_a/∂y^b`.
    pub fn gconn(&self, c: usize, a: usize, b: usize) -> &Jet {
        let m = self.m;
        let t = self.gconn.get_or_init(|| {
            (0..m * m * m).map(|k| self.nl(k / (m * m), (k / m) % m).d(self.yv(k % m))).collect()
        });
        &t[(c * m + a) * m + b]
    }

    /// `R^c_ab = δ_b N^c_a − δ_a N^c_b`.
    pub fn bracket_curvature(&self, c: usize, a: usize, b: usize) -> &Jet {
        let m = self.m;
        let t = self.bracket.get_or_init(|| {
            (0..m * m * m)
                .map(|k| {
                    let (c, a, b) = (k / (m * m), (k / m) % m, k % m);
                    self.delta(self.nl(c, a), b).sub_jet(&self.delta(self.nl(c, b), a))
                })
                .collect()
        });
        &t[(c * m + a) * m + b]
    }

    /// Cartan tensor `C_abc = ½ ∂g_ab/∂y^c` (value).
    pub fn cartan(&self, a: usize, b: usize, c: usize) -> f64 {
        0.5 * self.g(a, b).d(self.yv(c)).value()
    }

    /// Berwald curvature `B^a_bcd = ∂³G^a/∂y^b∂y^c∂y^d` (value).
    pub fn berwald(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.spray(a).d(self.yv(b)).d(self.yv(c)).d(self.yv(d)).value()
    }

    /// hh-curvature `R_b^a_cd` (value), stored at `[a][b][c][d]`.
    pub fn hh(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let m = self.m;
        let t = self.hh.get_or_init(|| {
            let mut out = vec![0.0; m * m * m * m];
            let dh: Vec<Jet> = (0..m * m * m * m)
                .map(|k| {
                    let (a, b, c, d) = (k / (m * m * m), (k / (m * m)) % m, (k / m) % m, k % m);
                    self.delta(self.hcoef(a, b, c), d)
                })
                .collect();
            let dd = |a: usize, b: usize, c: usize, d: usize| dh[((a * m + b) * m + c) * m + d].value();
            let f = |c: usize, a: usize, b: usize| self.hcoef(c, a, b).value();
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            let mut v = dd(a, b, c, d) - dd(a, b, d, c);
                            for e in 0..m {
                                v += f(a, d, e) * f(e, b, c) - f(a, c, e) * f(e, b, d);
                            }
                            out[((a * m + b) * m + c) * m + d] = v;
                        }
                    }
                }
            }
            out
        });
        t[((a * m + b) * m + c) * m + d]
    }

    /// Riemann map `R^a_b` of the spray.
    pub fn riemann_map(&self, a: usize, b: usize) -> f64 {
        let m = self.m;
        let ga = self.spray(a);
        let mut r = 2.0 * ga.d(self.xv(b)).value();
        for c in 0..m {
            r -= self.fiber[c] * ga.d(self.xv(c)).d(self.yv(b)).value();
            r += 2.0 * self.spray(c).value() * ga.d(self.yv(c)).d(self.yv(b)).value();
            r -= ga.d(self.yv(c)).value() * self.spray(c).d(self.yv(b)).value();
        }
        r
    }

    /// `∂F²/∂y^a` (value).
    pub fn f2_dy(&self, a: usize) -> f64 {
        self.f2.d(self.yv(a)).value()
    }

    /// Fiber derivatives of `g^ab` (value); at most `order − 2` of them.
    pub fn ginv_dy(&self, a: usize, b: usize, ys: &[usize]) -> f64 {
        let mut j = self.ginv(a, b).clone();
        for &c in ys {
            j = j.d(self.yv(c));
        }
        j.value()
    }

    /// Values of `g_ab` as an `m×m` row-major vector.
    pub fn g_values(&self) -> Vec<f64> {
        self.g.iter().map(Jet::value).collect()
    }

    pub fn ginv_values(&self) -> Vec<f64> {
        self.ginv.iter().map(Jet::value).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FactorMetricSpec;

    #[test]
    fn euclidean_plane_is_flat() {
        let e = FactorMetricSpec::euclidean(2).unwrap();
        let geo = Geometry::new(&e, &[0.3, -0.2], &[1.0, 0.5]).unwrap();
        for a in 0..2 {
            assert!(geo.spray(a).value().abs() < 1e-14);
            for b in 0..2 {
                assert!((geo.g(a, b).value() - if a == b { 1.0 } else { 0.0 }).abs() < 1e-14);
                assert!(geo.riemann_map(a, b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn inverse_of_jet_matrix() {
        let s = JetSpace::get(1, 3).unwrap();
        let x = Jet::variable(&s, 0, 0.5);
        let a = vec![x.add_scalar(2.0), x.clone(), x.clone(), x.mul_jet(&x).add_scalar(3.0)];
        let inv = invert_jet_matrix(&a, 2).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let mut s = a[0].scale(0.0);
                for k in 0..2 {
                    s = s.add_jet(&a[r * 2 + k].mul_jet(&inv[k * 2 + c]));
                }
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!((s.value() - expect).abs() < 1e-14);
                for coef in &s.coeffs()[1..] {
                    assert!(coef.abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let s = JetSpace::get(1, 1).unwrap();
        let one = Jet::constant(&s, 1.0);
        let a = vec![one.clone(), one.clone(), one.clone(), one];
        assert!(matches!(invert_jet_matrix(&a, 2), Err(Error::Singular)));
    }

    #[test]
    fn ill_conditioned_matrix_rejected() {
        let s = JetSpace::get(1, 1).unwrap();
        let a = vec![Jet::constant(&s, 1.0), Jet::constant(&s, 0.0), Jet::constant(&s, 0.0), Jet::constant(&s, 1e-14)];
        assert!(matches!(invert_jet_matrix(&a, 2), Err(Error::IllConditioned(_))));
    }
}
