use serde::Serialize;

use super::{ConnectionKind, ConnectionTable};
use crate::connection::BlockDiscrepancy;
use crate::error::Result;
use crate::finsler::DwGeometry;
use crate::frame::FrameVector;

/// Input pairs with closed-form Levi-Civita components, as `(name, X kind, Y kind)`;
/// kinds: 0 `δx`, 1 `δu`, 2 `∂y`, 3 `∂v`.
pub const LEVI_CIVITA_BLOCKS: &[(&str, usize, usize)] = &[
    ("∇_{δx}δx", 0, 0),
    ("∇_{δx}∂y", 0, 2),
    ("∇_{δx}δu", 0, 1),
    ("∇_{δx}∂v", 0, 3),
    ("∇_{δu}δu", 1, 1),
    ("∇_{δu}δx", 1, 0),
    ("∇_{δu}∂y", 1, 2),
    ("∇_{δu}∂v", 1, 3),
    ("∇_{∂y}∂y", 2, 2),
    ("∇_{∂v}∂y", 3, 2),
    ("∇_{∂v}∂v", 3, 3),
];

/// Defining-property residuals of a Levi-Civita table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KoszulResiduals {
    pub metric_compatibility: f64,
    pub torsion: f64,
}

/// Comparison of the induced vertical connection with `F^c_ab` and `C^c_ab`.
#[derive(Clone, Debug, Serialize)]
pub struct InducedVerticalReport {
    pub table: ConnectionTable,
    /// `max |v(∇_{δa} ∂b) − F^c_ab ∂c|`
    pub horizontal_rows: f64,
    /// `max |v(∇_{∂a} ∂b) − C^c_ab ∂c|`
    pub vertical_rows: f64,
    /// `max |v(∇_{∂y} ∂v)|` and `|v(∇_{∂v} ∂y)|`
    pub mixed_vertical: f64,
}

impl DwGeometry {
    pub(crate) fn compute_koszul(&self) -> ConnectionTable {
        let fd = self.frame_data();
        let n = fd.n;
        let m = 2 * n;
        let gm = |x: &FrameVector, c: usize| fd.metric.eval(x, &FrameVector::basis(n, c));
        let mut table = ConnectionTable::new(ConnectionKind::LeviCivitaKoszul, self.n1(), self.n2());
        let brackets: Vec<FrameVector> = (0..m * m).map(|k| fd.bracket(k / m, k % m)).collect();
        let br = |a: usize, b: usize| &brackets[a * m + b];
        for a in 0..m {
            for b in 0..m {
                let w: Vec<f64> = (0..m)
                    .map(|c| {
                        0.5 * (fd.dframe(a, b, c) + fd.dframe(b, a, c) - fd.dframe(c, a, b) + gm(br(a, b), c)
                            - gm(br(a, c), b)
                            - gm(br(b, c), a))
                    })
                    .collect();
                table.set(a, b, fd.raise(&w));
            }
        }
        table
    }

    /// Levi-Civita connection of the lifted metric on the adapted frame, from the Koszul formula.
    pub fn koszul_levi_civita(&self) -> &ConnectionTable {
        self.koszul_table()
    }

    /// Metric-compatibility and torsion residuals of a connection table over all frame triples.
    pub fn levi_civita_residuals(&self, table: &ConnectionTable) -> KoszulResiduals {
        let fd = self.frame_data();
        let m = 2 * fd.n;
        let basis: Vec<FrameVector> = (0..m).map(|a| FrameVector::basis(fd.n, a)).collect();
        let zero = FrameVector::zeros(fd.n);
        let nab = |a: usize, b: usize| table.get(a, b).unwrap_or(&zero);
        let mut metric = 0.0f64;
        let mut torsion = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let r = fd.dframe(a, b, c) - fd.metric.eval(nab(a, b), &basis[c]) - fd.metric.eval(&basis[b], nab(a, c));
                    metric = metric.max(r.abs());
                }
                let t = &(nab(a, b) - nab(b, a)) - &fd.bracket(a, b);
                torsion = torsion.max(t.max_abs());
            }
        }
        KoszulResiduals { metric_compatibility: metric, torsion }
    }

    /// The closed-form Levi-Civita components, on the input pairs of [`LEVI_CIVITA_BLOCKS`]
    /// (and the symmetric `∇_{∂y}∂v`).
    pub fn levi_civita_closed_forms(&self) -> Result<ConnectionTable> {
        let p = self.parts()?;
        let fd = self.frame_data();
        let (n1, n2, n) = (p.n1, p.n2, fd.n);
        let (aa, bb) = (p.a, p.b);
        let e = self.engine();
        let nl = |c: usize, a: usize| e.nl(c, a).value();
        let fh = |c: usize, a: usize, b: usize| fd.f.get(&[c, a, b]);
        let rb = |c: usize, a: usize, b: usize| fd.r.get(&[c, a, b]);
        let gq = |c: usize, a: usize, b: usize| fd.gc.get(&[c, a, b]);
        let gk = |al: usize| n1 + al;
        // δ_a of factor metrics, through the product nonlinear connection
        let dg1 = |a: usize, j: usize, k: usize| -> f64 {
            let mut s = if a < n1 { p.e1.g(j, k).d(p.e1.xv(a)).value() } else { 0.0 };
            for r in 0..n1 {
                s -= nl(r, a) * 2.0 * p.c1(j, k, r);
            }
            s
        };
        let dg2 = |a: usize, be: usize, mu: usize| -> f64 {
            let mut s = if a >= n1 { p.e2.g(be, mu).d(p.e2.xv(a - n1)).value() } else { 0.0 };
            for l in 0..n2 {
                s -= nl(gk(l), a) * 2.0 * p.c2(be, mu, l);
            }
            s
        };
        // δ_a(f2² g_jk), δ_a(f1² g_βμ)
        let dbg1 = |a: usize, j: usize, k: usize| {
            let w = if a >= n1 { p.db[a - n1] } else { 0.0 };
            w * p.g1(j, k) + bb * dg1(a, j, k)
        };
        let dag2 = |a: usize, be: usize, mu: usize| {
            let w = if a < n1 { p.da[a] } else { 0.0 };
            w * p.g2(be, mu) + aa * dg2(a, be, mu)
        };
        let sum1 = |f: &dyn Fn(usize) -> f64| -> f64 { (0..n1).map(f).sum() };
        let sum2 = |f: &dyn Fn(usize) -> f64| -> f64 { (0..n2).map(f).sum() };

        let mut t = ConnectionTable::new(ConnectionKind::LeviCivitaClosedForm, n1, n2);
        let hx = |i: usize| i;
        let hu = |al: usize| n1 + al;
        let vy = |i: usize| n + i;
        let vv = |al: usize| n + n1 + al;

        for i in 0..n1 {
            for j in 0..n1 {
                // ∇_{δx^i} δx^j
                let mut w = FrameVector::zeros(n);
                for s in 0..n1 {
                    w.h[s] = fh(s, i, j);
                    w.v[s] = 0.5 * rb(s, i, j) - p.c1_up(s, i, j);
                }
                for ga in 0..n2 {
                    w.h[gk(ga)] = fh(gk(ga), i, j);
                    w.v[gk(ga)] = 0.5 * rb(gk(ga), i, j);
                }
                t.set(hx(i), hx(j), w);

                // ∇_{δx^i} ∂y^j
                let mut w = FrameVector::zeros(n);
                for s in 0..n1 {
                    let rr = sum1(&|r| sum1(&|k| p.g1(r, j) * p.g1i(k, s) * rb(r, k, i)));
                    w.h[s] = p.c1_up(s, i, j) + 0.5 * rr;
                    w.v[s] = 0.5
                        * sum1(&|k| {
                            p.g1i(k, s)
                                * (dg1(i, j, k) + sum1(&|r| gq(r, i, j) * p.g1(r, k)) - sum1(&|r| gq(r, i, k) * p.g1(r, j)))
                        });
                }
                for ga in 0..n2 {
                    w.h[gk(ga)] = bb / (2.0 * aa) * sum1(&|r| sum2(&|mu| p.g1(r, j) * p.g2i(ga, mu) * rb(r, gk(mu), i)));
                    w.v[gk(ga)] = 1.0 / (2.0 * aa)
                        * sum2(&|mu| {
                            p.g2i(ga, mu)
                                * (aa * sum2(&|l| gq(gk(l), i, j) * p.g2(l, mu)) - bb * sum1(&|r| gq(r, i, gk(mu)) * p.g1(r, j)))
                        });
                }
                t.set(hx(i), vy(j), w);

                // ∇_{∂y^i} ∂y^j
                let mut w = FrameVector::zeros(n);
                for s in 0..n1 {
                    w.h[s] = 0.5
                        * sum1(&|k| {
                            p.g1i(k, s)
                                * (sum1(&|r| gq(r, k, j) * p.g1(r, i)) + sum1(&|r| gq(r, k, i) * p.g1(r, j)) - dg1(k, i, j))
                        });
                    w.v[s] = p.c1_up(s, i, j);
                }
                for ga in 0..n2 {
                    w.h[gk(ga)] = 1.0 / (2.0 * aa)
                        * sum2(&|mu| {
                            p.g2i(ga, mu)
                                * (bb * sum1(&|r| gq(r, gk(mu), j) * p.g1(r, i)) + bb * sum1(&|r| gq(r, gk(mu), i) * p.g1(r, j))
                                    - dbg1(gk(mu), i, j))
                        });
                }
                t.set(vy(i), vy(j), w);
            }
            for be in 0..n2 {
                // ∇_{δx^i} δu^β
                let mut w = FrameVector::zeros(n);
                for c in 0..n {
                    w.h[c] = fh(c, i, gk(be));
                    w.v[c] = 0.5 * rb(c, i, gk(be));
                }
                t.set(hx(i), hu(be), w);

                // ∇_{δx^i} ∂v^β
                let mut w = FrameVector::zeros(n);
                for s in 0..n1 {
                    w.h[s] = aa / (2.0 * bb) * sum2(&|l| sum1(&|k| p.g2(l, be) * p.g1i(k, s) * rb(gk(l), k, i)));
                    w.v[s] = 1.0 / (2.0 * bb)
                        * sum1(&|k| {
                            p.g1i(k, s)
                                * (bb * sum1(&|r| gq(r, i, gk(be)) * p.g1(r, k)) - aa * sum2(&|l| gq(gk(l), i, k) * p.g2(l, be)))
                        });
                }
                for ga in 0..n2 {
                    w.h[gk(ga)] = 0.5 * sum2(&|l| sum2(&|mu| p.g2(l, be) * p.g2i(mu, ga) * rb(gk(l), gk(mu), i)));
                    w.v[gk(ga)] = 1.0 / (2.0 * aa)
                        * sum2(&|mu| {
                            p.g2i(ga, mu)
                                * (dag2(i, be, mu) + aa * sum2(&|l| gq(gk(l), i, gk(be)) * p.g2(l, mu))
                                    - aa * sum2(&|l| gq(gk(l), i, gk(mu)) * p.g2(l, be)))
                        });
                }
                t.set(hx(i), vv(be), w);
            }
        }

        for al in 0..n2 {
            for be in 0..n2 {
                // ∇_{δu^α} δu^β
                let mut w = FrameVector::zeros(n);
                for c in 0..n {
                    w.h[c] = fh(c, gk(al), gk(be));
                    w.v[c] = 0.5 * rb(c, gk(al), gk(be));
                }
                for ga in 0..n2 {
                    w.v[gk(ga)] -= p.c2_up(ga, al, be);
                }
                t.set(hu(al), hu(be), w);

                // ∇_{δu^α} ∂v^β
                let mut w = FrameVector::zeros(n);
                for s in 0..n1 {
                    w.h[s] = aa / (2.0 * bb) * sum2(&|l| sum1(&|k| p.g2(l, be) * p.g1i(k, s) * rb(gk(l), k, gk(al))));
                    w.v[s] = 1.0 / (2.0 * bb)
                        * sum1(&|k| {
                            p.g1i(k, s)
                                * (bb * sum1(&|r| gq(r, gk(al), gk(be)) * p.g1(r, k))
                                    - aa * sum2(&|l| gq(gk(l), gk(al), k) * p.g2(l, be)))
                        });
                }
                for ga in 0..n2 {
                    w.h[gk(ga)] = p.c2_up(ga, al, be)
                        + 0.5 * sum2(&|l| sum2(&|mu| p.g2(l, be) * p.g2i(mu, ga) * rb(gk(l), gk(mu), gk(al))));
                    w.v[gk(ga)] = 1.0 / (2.0 * aa)
                        * sum2(&|mu| {
                            p.g2i(ga, mu)
                                * (dag2(gk(al), be, mu) + aa * sum2(&|l| gq(gk(l), gk(al), gk(be)) * p.g2(l, mu))
                                    - aa * sum2(&|l| gq(gk(l), gk(al), gk(mu)) * p.g2(l, be)))
                        });
                }
                t.set(hu(al), vv(be), w);

                // ∇_{∂v^α} ∂v^β
                let mut w = FrameVector::zeros(n);
                for s in 0..n1 {
                    w.h[s] = 1.0 / (2.0 * bb)
                        * sum1(&|k| {
                            p.g1i(k, s)
                                * (-dag2(k, al, be)
                                    + aa * sum2(&|l| gq(gk(l), k, gk(be)) * p.g2(l, al))
                                    + aa * sum2(&|l| gq(gk(l), k, gk(al)) * p.g2(l, be)))
                        });
                }
                for ga in 0..n2 {
                    w.h[gk(ga)] = 1.0 / (2.0 * aa)
                        * sum2(&|mu| {
                            p.g2i(ga, mu)
                                * (-aa * dg2(gk(mu), al, be)
                                    + aa * sum2(&|l| gq(gk(l), gk(mu), gk(be)) * p.g2(l, al))
                                    + aa * sum2(&|l| gq(gk(l), gk(mu), gk(al)) * p.g2(l, be)))
                        });
                    w.v[gk(ga)] = p.c2_up(ga, al, be);
                }
                t.set(vv(al), vv(be), w);
            }
            for j in 0..n1 {
                // ∇_{δu^α} δx^j
                let mut w = FrameVector::zeros(n);
                for c in 0..n {
                    w.h[c] = fh(c, gk(al), j);
                    w.v[c] = 0.5 * rb(c, gk(al), j);
                }
                t.set(hu(al), hx(j), w);

                // ∇_{δu^α} ∂y^j
                let mut w = FrameVector::zeros(n);
                for s in 0..n1 {
                    w.v[s] = 1.0 / (2.0 * bb)
                        * sum1(&|k| {
                            p.g1i(k, s)
                                * (dbg1(gk(al), j, k) + bb * sum1(&|r| gq(r, gk(al), j) * p.g1(r, k))
                                    - bb * sum1(&|r| gq(r, gk(al), k) * p.g1(r, j)))
                        });
                    w.h[s] = 0.5 * sum1(&|r| sum1(&|k| p.g1(r, j) * p.g1i(k, s) * rb(r, k, gk(al))));
                }
                for ga in 0..n2 {
                    w.h[gk(ga)] =
                        bb / (2.0 * aa) * sum1(&|r| sum2(&|mu| p.g1(r, j) * p.g2i(ga, mu) * rb(r, gk(mu), gk(al))));
                    w.v[gk(ga)] = 1.0 / (2.0 * aa)
                        * sum2(&|mu| {
                            p.g2i(ga, mu)
                                * (aa * sum2(&|l| gq(gk(l), gk(al), j) * p.g2(l, mu))
                                    - bb * sum1(&|r| gq(r, gk(al), gk(mu)) * p.g1(r, j)))
                        });
                }
                t.set(hu(al), vy(j), w);

                // ∇_{∂v^α} ∂y^j = ∇_{∂y^j} ∂v^α
                let mut w = FrameVector::zeros(n);
                for s in 0..n1 {
                    w.h[s] = 1.0 / (2.0 * bb)
                        * sum1(&|k| {
                            p.g1i(k, s)
                                * (aa * sum2(&|l| gq(gk(l), k, j) * p.g2(l, al)) + bb * sum1(&|r| gq(r, k, gk(al)) * p.g1(r, j)))
                        });
                }
                for ga in 0..n2 {
                    w.h[gk(ga)] = 1.0 / (2.0 * aa)
                        * sum2(&|mu| {
                            p.g2i(ga, mu)
                                * (aa * sum2(&|l| gq(gk(l), gk(mu), j) * p.g2(l, al))
                                    + bb * sum1(&|r| gq(r, gk(mu), gk(al)) * p.g1(r, j)))
                        });
                }
                t.set(vy(j), vv(al), w.clone());
                t.set(vv(al), vy(j), w);
            }
        }
        Ok(t)
    }

    /// Largest disagreement between the closed forms and the Koszul table on each input pair.
    pub fn levi_civita_discrepancy(&self) -> Result<Vec<BlockDiscrepancy>> {
        let closed = self.levi_civita_closed_forms()?;
        let koszul = self.koszul_table();
        let (n1, n) = (self.n1(), self.n());
        let range = |kind: usize| -> Vec<usize> {
            match kind {
                0 => (0..n1).collect(),
                1 => (n1..n).collect(),
                2 => (n..n + n1).collect(),
                _ => (n + n1..2 * n).collect(),
            }
        };
        let mut out = Vec::new();
        for &(name, xk, yk) in LEVI_CIVITA_BLOCKS {
            let mut worst = 0.0f64;
            for &a in &range(xk) {
                for &b in &range(yk) {
                    if let (Some(c), Some(k)) = (closed.get(a, b), koszul.get(a, b)) {
                        worst = worst.max((c - k).max_abs());
                    }
                }
            }
            out.push(BlockDiscrepancy { block: name.to_string(), max_abs_diff: worst });
        }
        Ok(out)
    }

    /// `∇_X v^d Y = v^d(∇^d_X v^d Y)` on vertical basis fields, compared with `F` and `C`.
    pub fn induced_vertical_connection(&self) -> InducedVerticalReport {
        let koszul = self.koszul_table();
        let fd = self.frame_data();
        let (n1, n) = (self.n1(), fd.n);
        let mut table = ConnectionTable::new(ConnectionKind::LeviCivitaKoszul, self.n1(), self.n2());
        let mut horizontal_rows = 0.0f64;
        let mut vertical_rows = 0.0f64;
        let mut mixed_vertical = 0.0f64;
        for a in 0..2 * n {
            for b in 0..n {
                let w = koszul.get(a, n + b).expect("complete table").vertical_part();
                for c in 0..n {
                    if a < n {
                        horizontal_rows = horizontal_rows.max((w.v[c] - fd.f.get(&[c, a, b])).abs());
                    } else {
                        vertical_rows = vertical_rows.max((w.v[c] - fd.c_up.get(&[c, a - n, b])).abs());
                    }
                }
                if a >= n && ((a - n < n1) != (b < n1)) {
                    mixed_vertical = mixed_vertical.max(w.max_abs());
                }
                table.set(a, n + b, w);
            }
        }
        InducedVerticalReport { table, horizontal_rows, vertical_rows, mixed_vertical }
    }
}
