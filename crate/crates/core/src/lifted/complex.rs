use serde::Serialize;

use crate::error::Result;
use crate::finsler::DwGeometry;
use crate::frame::FrameVector;
use crate::jets::{default_step, jet_lift, CoordIndex, MultiIndex};
use crate::metric::ProductConfig;
use crate::sample::TangentSample;

/// Finite-difference checks of `dΩ = 0` and of `Ω` against `dω`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClosednessReport {
    /// `max |dΩ_IJK|`
    pub d_omega: f64,
    /// `max |Ω_IJ + (dω)_IJ|`
    pub exactness: f64,
    /// `max |Ω_IJ − (dω)_IJ|`, nonzero when `Ω = −dω`.
    pub opposite_sign: f64,
}

/// Nijenhuis tensor on all frame pairs from the bracket-curvature table and
/// from coordinate Lie brackets.
#[derive(Clone, Debug, Serialize)]
pub struct NijenhuisReport {
    pub closed_form: Vec<FrameVector>,
    pub direct: Vec<FrameVector>,
    pub max_abs: f64,
    pub max_diff: f64,
    pub skew_defect: f64,
}

impl DwGeometry {
    /// `Ω(X, Y) = 𝐆(X, JY)`.
    pub fn symplectic_form(&self, x: &FrameVector, y: &FrameVector) -> f64 {
        self.frame_data().metric.eval(x, &y.complex())
    }

    /// `|𝐆(JX, JY) − 𝐆(X, Y)|`
    pub fn hermitian_defect(&self, x: &FrameVector, y: &FrameVector) -> f64 {
        let g = &self.frame_data().metric;
        (g.eval(&x.complex(), &y.complex()) - g.eval(x, y)).abs()
    }

    /// `Ω` in the coordinate basis `(∂/∂𝐱, ∂/∂𝐲)`, row-major `2n × 2n`.
    pub fn symplectic_coordinates(&self) -> Vec<f64> {
        let n = self.n();
        let m = 2 * n;
        let e = self.engine();
        let g = |a: usize, b: usize| e.g(a, b).value();
        let nl = |a: usize, b: usize| e.nl(a, b).value();
        let mut out = vec![0.0; m * m];
        for a in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for b in 0..n {
                    s += g(a, b) * nl(b, c) - g(c, b) * nl(b, a);
                }
                out[a * m + c] = s;
                out[a * m + n + c] = g(a, c);
                out[(n + c) * m + a] = -g(a, c);
            }
        }
        out
    }

    /// `N_J(E_A, E_B)` built from `R^c_ab`, at `[A·2n + B]`.
    pub fn nijenhuis_closed_form(&self) -> Vec<FrameVector> {
        let fd = self.frame_data();
        let n = fd.n;
        let m = 2 * n;
        let mut out = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                let mut w = FrameVector::zeros(n);
                let (ai, bi) = (a % n, b % n);
                for c in 0..n {
                    let r = fd.r.get(&[c, ai, bi]);
                    match (a < n, b < n) {
                        (true, true) => w.v[c] = -r,
                        (false, false) => w.v[c] = r,
                        _ => w.h[c] = -r,
                    }
                }
                out.push(w);
            }
        }
        out
    }

    /// `N_J(E_A, E_B) = [JX,JY] − J[JX,Y] − J[X,JY] − [X,Y]` from coordinate Lie
    /// brackets of the frame fields.
    pub fn nijenhuis_direct(&self) -> Vec<FrameVector> {
        let n = self.n();
        let m = 2 * n;
        let e = self.engine();
        let zero = e.f2().scale(0.0).truncate(e.order() - 3);
        // coordinate components of frame fields
        let field = |a: usize| -> Vec<crate::jets::Jet> {
            let mut comps = vec![zero.clone(); m];
            if a < n {
                comps[a] = zero.add_scalar(1.0);
                for c in 0..n {
                    comps[n + c] = e.nl(c, a).scale(-1.0);
                }
            } else {
                comps[a] = zero.add_scalar(1.0);
            }
            comps
        };
        let fields: Vec<_> = (0..m).map(field).collect();
        let to_frame = |w: &[f64]| -> FrameVector {
            let mut f = FrameVector::zeros(n);
            f.h.copy_from_slice(&w[..n]);
            for c in 0..n {
                f.v[c] = w[n + c] + (0..n).map(|a| e.nl(c, a).value() * w[a]).sum::<f64>();
            }
            f
        };
        let mut brackets = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                let (x, y) = (&fields[a], &fields[b]);
                let w: Vec<f64> = (0..m)
                    .map(|k| {
                        (0..m).map(|i| x[i].value() * y[k].d(i).value() - y[i].value() * x[k].d(i).value()).sum()
                    })
                    .collect();
                brackets.push(to_frame(&w));
            }
        }
        let br = |a: usize, b: usize| &brackets[a * m + b];
        // J E_A = s · E_{A'}
        let jmap = |a: usize| if a < n { (-1.0, a + n) } else { (1.0, a - n) };
        let mut out = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                let (sa, ja) = jmap(a);
                let (sb, jb) = jmap(b);
                let mut w = br(ja, jb) * (sa * sb);
                w.add_scaled(-sa, &br(ja, b).complex());
                w.add_scaled(-sb, &br(a, jb).complex());
                w.add_scaled(-1.0, br(a, b));
                out.push(w);
            }
        }
        out
    }

    pub fn nijenhuis(&self) -> NijenhuisReport {
        let m = 2 * self.n();
        let closed_form = self.nijenhuis_closed_form();
        let direct = self.nijenhuis_direct();
        let max_abs = closed_form.iter().fold(0.0, |acc: f64, w| acc.max(w.max_abs()));
        let max_diff = closed_form.iter().zip(&direct).fold(0.0, |acc: f64, (a, b)| acc.max((a - b).max_abs()));
        let mut skew_defect = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                skew_defect = skew_defect.max((&direct[a * m + b] + &direct[b * m + a]).max_abs());
            }
        }
        NijenhuisReport { closed_form, direct, max_abs, max_diff, skew_defect }
    }
}

/// `ω_I`: `½ ∂F²/∂𝐲^a` on base coordinates, zero on fiber coordinates.
fn liouville_form(cfg: &ProductConfig, p: &TangentSample) -> Result<Vec<f64>> {
    let (n1, n) = (cfg.n1(), cfg.n());
    let seeds: Vec<CoordIndex> = (0..n).map(|a| CoordIndex::fiber(n1, a)).collect();
    let jet = jet_lift(cfg, p, &seeds, 1)?;
    let mut out = vec![0.0; 2 * n];
    for (a, s) in seeds.iter().enumerate() {
        out[a] = 0.5 * jet.partial(&MultiIndex::new([(*s, 1)])?)?;
    }
    Ok(out)
}

/// Central difference with one Richardson step of a vector-valued function along coordinate `k`.
fn fd_vector(p: &TangentSample, k: usize, f: &dyn Fn(&TangentSample) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    let flat = p.flat();
    let h = default_step(1, flat[k]);
    let eval = |t: f64| -> Result<Vec<f64>> {
        let mut c = flat.clone();
        c[k] += t;
        f(&TangentSample::from_flat(p.n1(), p.n2(), &c)?)
    };
    let (a, b, c, d) = (eval(h)?, eval(-h)?, eval(h / 2.0)?, eval(-h / 2.0)?);
    Ok((0..a.len())
        .map(|i| {
            let d1 = (a[i] - b[i]) / (2.0 * h);
            let d2 = (c[i] - d[i]) / h;
            (4.0 * d2 - d1) / 3.0
        })
        .collect())
}

/// Checks `dΩ = 0` and compares `Ω` with `dω` at `p` by finite differences of
/// coordinate components.
pub fn closedness_check(cfg: &ProductConfig, p: &TangentSample) -> Result<ClosednessReport> {
    let m = 2 * cfg.n();
    let omega_at = |q: &TangentSample| -> Result<Vec<f64>> { Ok(DwGeometry::with_order(cfg, q, 3)?.symplectic_coordinates()) };
    let omega = omega_at(p)?;
    let d_om: Vec<Vec<f64>> = (0..m).map(|k| fd_vector(p, k, &omega_at)).collect::<Result<_>>()?;
    let mut d_omega = 0.0f64;
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let s = d_om[i][j * m + k] + d_om[j][k * m + i] + d_om[k][i * m + j];
                d_omega = d_omega.max(s.abs());
            }
        }
    }
    let lf = |q: &TangentSample| liouville_form(cfg, q);
    let d_w: Vec<Vec<f64>> = (0..m).map(|k| fd_vector(p, k, &lf)).collect::<Result<_>>()?;
    let mut exactness = 0.0f64;
    let mut opposite_sign = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let dw = d_w[i][j] - d_w[j][i];
            exactness = exactness.max((omega[i * m + j] + dw).abs());
            opposite_sign = opposite_sign.max((omega[i * m + j] - dw).abs());
        }
    }
    Ok(ClosednessReport { d_omega, exactness, opposite_sign })
}

impl ClosednessReport {
    /// Combines reports from several points by maxima.
    pub fn merge(self, o: ClosednessReport) -> ClosednessReport {
        ClosednessReport {
            d_omega: self.d_omega.max(o.d_omega),
            exactness: self.exactness.max(o.exactness),
            opposite_sign: self.opposite_sign.max(o.opposite_sign),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::fixture;

    fn point() -> TangentSample {
        TangentSample::new(vec![0.4, -0.3], vec![0.7, 0.2], vec![1.1, -0.6], vec![0.5, 0.9]).unwrap()
    }

    #[test]
    fn nijenhuis_paths_agree() {
        for name in ["FIX-E", "FIX-R"] {
            let d = DwGeometry::new(&fixture(name).unwrap(), &point()).unwrap();
            let r = d.nijenhuis();
            assert!(r.max_diff < 1e-9, "{name} {}", r.max_diff);
            assert!(r.skew_defect < 1e-10);
            assert!(r.max_abs > 1e-3);
        }
    }

    #[test]
    fn one_dimensional_symplectic_value() {
        let cfg = fixture("FIX-1D").unwrap();
        let p = TangentSample::new(vec![0.0], vec![1.0], vec![1.0], vec![1.0]).unwrap();
        let d = DwGeometry::new(&cfg, &p).unwrap();
        let w = d.symplectic_form(&FrameVector::horizontal(2, 0), &FrameVector::vertical(2, 0));
        assert!((w - 2.0).abs() < 1e-12);
        let w = d.symplectic_form(&FrameVector::horizontal(2, 0), &FrameVector::horizontal(2, 1));
        assert_eq!(w, 0.0);
    }

    #[test]
    fn omega_is_closed_and_minus_d_liouville() {
        for name in ["FIX-E", "FIX-R"] {
            let r = closedness_check(&fixture(name).unwrap(), &point()).unwrap();
            assert!(r.d_omega < 1e-6, "{name} {r:?}");
            assert!(r.exactness < 1e-6, "{name} {r:?}");
            assert!(r.opposite_sign > 1e-2, "{name} {r:?}");
        }
    }
}
