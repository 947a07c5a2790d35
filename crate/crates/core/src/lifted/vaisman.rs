use serde::Serialize;

use super::{ConnectionKind, ConnectionTable};
use crate::error::{Error, Result};
use crate::finsler::DwGeometry;
use crate::frame::FrameVector;

/// Residuals of the three defining conditions of the Vaisman connection.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct VaismanAxioms {
    /// (i) `∇_X Y` stays in the distribution of `Y`.
    pub distribution: f64,
    /// (ii) `(∇_X 𝐆)(Y,Z)` on all-vertical triples.
    pub metric_vertical: f64,
    /// (ii) on all-horizontal triples.
    pub metric_horizontal: f64,
    /// (iii) `v(T(X,Y))` when an argument is vertical.
    pub torsion_vertical: f64,
    /// (iii) `h(T(X,Y))` when an argument is horizontal.
    pub torsion_horizontal: f64,
}

impl VaismanAxioms {
    pub fn max(&self) -> f64 {
        [self.distribution, self.metric_vertical, self.metric_horizontal, self.torsion_vertical, self.torsion_horizontal]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// `(∇^v_X 𝐆)(Y,Z)` computed from the connection table and from the Cartan identity.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReinhartDefect {
    pub covariant: f64,
    pub cartan_identity: f64,
}

impl DwGeometry {
    /// Vaisman connection of the vertical foliation on the adapted frame.
    pub fn vaisman_connection(&self) -> ConnectionTable {
        let fd = self.frame_data();
        let n = fd.n;
        let n1 = fd.n1;
        let mut t = ConnectionTable::new(ConnectionKind::Vaisman, self.n1(), n - n1);
        for a in 0..2 * n {
            for b in 0..2 * n {
                let mut w = FrameVector::zeros(n);
                match (a < n, b < n) {
                    (true, false) => {
                        for c in 0..n {
                            w.v[c] = fd.gc.get(&[c, a, b - n]);
                        }
                    }
                    (true, true) => {
                        for c in 0..n {
                            w.h[c] = fd.f.get(&[c, a, b]);
                        }
                    }
                    (false, false) => {
                        let (a, b) = (a - n, b - n);
                        if (a < n1) == (b < n1) {
                            for c in 0..n {
                                if (c < n1) == (a < n1) {
                                    w.v[c] = fd.c_up.get(&[c, a, b]);
                                }
                            }
                        }
                    }
                    (false, true) => {}
                }
                t.set(a, b, w);
            }
        }
        t
    }

    /// Checks the defining conditions on a connection table.
    pub fn vaisman_axioms(&self, table: &ConnectionTable) -> VaismanAxioms {
        let fd = self.frame_data();
        let n = fd.n;
        let m = 2 * n;
        let zero = FrameVector::zeros(n);
        let nab = |a: usize, b: usize| table.get(a, b).unwrap_or(&zero);
        let basis: Vec<FrameVector> = (0..m).map(|a| FrameVector::basis(n, a)).collect();
        let mut ax = VaismanAxioms {
            distribution: 0.0,
            metric_vertical: 0.0,
            metric_horizontal: 0.0,
            torsion_vertical: 0.0,
            torsion_horizontal: 0.0,
        };
        for a in 0..m {
            for b in 0..m {
                let w = nab(a, b);
                let off = if b < n { w.vertical_part() } else { w.horizontal_part() };
                ax.distribution = ax.distribution.max(off.max_abs());

                let t = &(w - nab(b, a)) - &fd.bracket(a, b);
                if a >= n || b >= n {
                    ax.torsion_vertical = ax.torsion_vertical.max(t.vertical_part().max_abs());
                }
                if a < n || b < n {
                    ax.torsion_horizontal = ax.torsion_horizontal.max(t.horizontal_part().max_abs());
                }

                for c in 0..m {
                    let same = (a < n) == (b < n) && (b < n) == (c < n);
                    if !same {
                        continue;
                    }
                    let r = (fd.dframe(a, b, c) - fd.metric.eval(w, &basis[c]) - fd.metric.eval(&basis[b], nab(a, c))).abs();
                    if a < n {
                        ax.metric_horizontal = ax.metric_horizontal.max(r);
                    } else {
                        ax.metric_vertical = ax.metric_vertical.max(r);
                    }
                }
            }
        }
        ax
    }

    /// Largest gap between the connections the Levi-Civita and Vaisman connections
    /// induce on the vertical bundle.
    pub fn structural_bundle_gap(&self) -> f64 {
        let induced = self.induced_vertical_connection().table;
        let vais = self.vaisman_connection();
        let n = self.n();
        let mut worst = 0.0f64;
        for a in 0..2 * n {
            for b in n..2 * n {
                let d = induced.get(a, b).expect("vertical rows") - vais.get(a, b).expect("complete");
                worst = worst.max(d.vertical_part().max_abs());
            }
        }
        worst
    }

    /// `max |F^c_ab − G^c_ab|`.
    pub fn horizontal_minus_berwald(&self) -> f64 {
        let fd = self.frame_data();
        fd.f.max_abs_diff(&fd.gc)
    }

    /// `(∇^v_X 𝐆)(Y, Z)` for vertical `X` and horizontal `Y`, `Z`.
    pub fn reinhart_defect(&self, x: &FrameVector, y: &FrameVector, z: &FrameVector) -> Result<ReinhartDefect> {
        let n = self.n();
        if x.dim() != n || y.dim() != n || z.dim() != n {
            return Err(Error::Dimension(format!("frame vectors must have {n}+{n} components")));
        }
        if !x.is_vertical(0.0) {
            return Err(Error::Precondition("X must be vertical".into()));
        }
        if !y.is_horizontal(0.0) || !z.is_horizontal(0.0) {
            return Err(Error::Precondition("Y and Z must be horizontal".into()));
        }
        let fd = self.frame_data();
        let vais = self.vaisman_connection();
        let covariant =
            fd.dmetric(x, y, z) - fd.metric.eval(&vais.apply(x, y), z) - fd.metric.eval(y, &vais.apply(x, z));
        let p = self.parts()?;
        let n1 = p.n1;
        let mut identity = 0.0;
        for i in 0..n1 {
            for j in 0..n1 {
                for k in 0..n1 {
                    identity += 2.0 * x.v[i] * y.h[j] * z.h[k] * p.b * p.c1(i, j, k);
                }
            }
        }
        for a in 0..p.n2 {
            for b in 0..p.n2 {
                for c in 0..p.n2 {
                    identity += 2.0 * x.v[n1 + a] * y.h[n1 + b] * z.h[n1 + c] * p.a * p.c2(a, b, c);
                }
            }
        }
        Ok(ReinhartDefect { covariant, cartan_identity: identity })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::fixture;
    use crate::sample::TangentSample;

    fn at(name: &str) -> DwGeometry {
        let p = TangentSample::new(vec![0.4, -0.3], vec![0.7, 0.2], vec![1.1, -0.6], vec![0.5, 0.9]).unwrap();
        DwGeometry::new(&fixture(name).unwrap(), &p).unwrap()
    }

    #[test]
    fn axioms_hold() {
        for name in ["FIX-E", "FIX-R", "FIX-P"] {
            let d = at(name);
            let ax = d.vaisman_axioms(&d.vaisman_connection());
            assert!(ax.max() < 1e-9, "{name} {ax:?}");
        }
    }

    #[test]
    fn reinhart_paths_agree() {
        let d = at("FIX-R");
        let x = FrameVector::from_components(4, &[0.0, 0.0, 0.0, 0.0, 0.3, -0.2, 0.7, 0.4]);
        let y = FrameVector::from_components(4, &[1.0, 0.5, -0.6, 0.8, 0.0, 0.0, 0.0, 0.0]);
        let z = FrameVector::from_components(4, &[-0.2, 0.9, 0.4, 1.1, 0.0, 0.0, 0.0, 0.0]);
        let r = d.reinhart_defect(&x, &y, &z).unwrap();
        assert!((r.covariant - r.cartan_identity).abs() < 1e-10);
        assert!(r.covariant.abs() > 1e-4);
        assert!(matches!(d.reinhart_defect(&y, &y, &z), Err(Error::Precondition(_))));
    }

    #[test]
    fn riemannian_factors_are_reinhart() {
        let d = at("FIX-E");
        let x = FrameVector::from_components(4, &[0.0, 0.0, 0.0, 0.0, 0.3, -0.2, 0.7, 0.4]);
        let y = FrameVector::from_components(4, &[1.0, 0.5, -0.6, 0.8, 0.0, 0.0, 0.0, 0.0]);
        assert!(d.reinhart_defect(&x, &y, &y).unwrap().covariant.abs() < 1e-10);
    }
}
