//! Geometry of the slit tangent bundle carrying the doubly warped
//! Sasaki-Matsumoto metric.

mod complex;
mod levi_civita;
mod vaisman;
mod verdicts;

use serde::Serialize;

use crate::finsler::DwGeometry;
use crate::frame::FrameVector;
use crate::tensor::BlockTensor;

pub use complex::{closedness_check, ClosednessReport, NijenhuisReport};
pub use levi_civita::{InducedVerticalReport, KoszulResiduals, LEVI_CIVITA_BLOCKS};
pub use vaisman::{ReinhartDefect, VaismanAxioms};
pub use verdicts::{kahler_verdict, totally_geodesic_verdicts, KahlerVerdict, TotallyGeodesicVerdicts, MIN_REGION_POINTS};

/// `𝐆 = 𝐠_ab (X^a_h Y^b_h + X^a_v Y^b_v)` in the adapted frame.
#[derive(Clone, Debug, Serialize)]
pub struct LiftedMetric {
    pub n1: usize,
    pub n2: usize,
    /// Row-major `𝐠_ab`.
    pub g: Vec<f64>,
}

impl LiftedMetric {
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn eval(&self, x: &FrameVector, y: &FrameVector) -> f64 {
        let n = self.n();
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += self.g[a * n + b] * (x.h[a] * y.h[b] + x.v[a] * y.v[b]);
            }
        }
        s
    }

    /// `𝐆(E_A, E_B)` on frame basis elements.
    pub fn frame(&self, a: usize, b: usize) -> f64 {
        let n = self.n();
        match (a < n, b < n) {
            (true, true) => self.g[a * n + b],
            (false, false) => self.g[(a - n) * n + b - n],
            _ => 0.0,
        }
    }

    /// Full `2n × 2n` component matrix, row-major.
    pub fn matrix(&self) -> Vec<f64> {
        let m = 2 * self.n();
        (0..m * m).map(|k| self.frame(k / m, k % m)).collect()
    }
}

/// Which connection a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConnectionKind {
    LeviCivitaKoszul,
    LeviCivitaClosedForm,
    Vaisman,
}

/// `∇_{E_A} E_B` for ordered pairs of frame basis fields; `None` where the
/// table does not define a value.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectionTable {
    pub kind: ConnectionKind,
    pub n1: usize,
    pub n2: usize,
    pub entries: Vec<Option<FrameVector>>,
}

impl ConnectionTable {
    fn new(kind: ConnectionKind, n1: usize, n2: usize) -> Self {
        let m = 2 * (n1 + n2);
        ConnectionTable { kind, n1, n2, entries: vec![None; m * m] }
    }

    pub fn size(&self) -> usize {
        2 * (self.n1 + self.n2)
    }

    pub fn get(&self, a: usize, b: usize) -> Option<&FrameVector> {
        self.entries[a * self.size() + b].as_ref()
    }

    fn set(&mut self, a: usize, b: usize, v: FrameVector) {
        let m = self.size();
        self.entries[a * m + b] = Some(v);
    }

    /// `∇_X Y` for constant-coefficient combinations of frame fields.
    pub fn apply(&self, x: &FrameVector, y: &FrameVector) -> FrameVector {
        let m = self.size();
        let (xc, yc) = (x.components(), y.components());
        let mut out = FrameVector::zeros(m / 2);
        for a in 0..m {
            if xc[a] == 0.0 {
                continue;
            }
            for b in 0..m {
                if yc[b] == 0.0 {
                    continue;
                }
                if let Some(e) = self.get(a, b) {
                    out.add_scaled(xc[a] * yc[b], e);
                }
            }
        }
        out
    }
}

/// Frame-level data shared by the lifted constructions.
pub(crate) struct FrameData {
    pub n1: usize,
    pub n: usize,
    pub metric: LiftedMetric,
    pub ginv: Vec<f64>,
    /// `E_A 𝐠_bc` at `[(A·n + b)·n + c]`.
    pub dmet: Vec<f64>,
    pub r: BlockTensor,
    pub gc: BlockTensor,
    pub f: BlockTensor,
    /// `𝐂^c_ab`
    pub c_up: BlockTensor,
}

impl FrameData {
    pub fn new(d: &DwGeometry) -> Self {
        let n = d.n();
        let e = d.engine();
        let (g, gi) = d.fundamental_tensor();
        let mut dmet = Vec::with_capacity(2 * n * n * n);
        for a in 0..2 * n {
            for b in 0..n {
                for c in 0..n {
                    dmet.push(if a < n { e.delta(e.g(b, c), a).value() } else { 2.0 * e.cartan(a - n, b, c) });
                }
            }
        }
        let (r, gc) = d.frame_brackets();
        let cart = d.cartan_tensor();
        let c_up = BlockTensor::from_fn(d.n1(), d.n2(), &[crate::tensor::Variance::Upper, crate::tensor::Variance::Lower, crate::tensor::Variance::Lower], |i| {
            (0..n).map(|h| gi.get(&[i[0], h]) * cart.get(&[h, i[1], i[2]])).sum()
        });
        FrameData {
            n1: d.n1(),
            n,
            metric: LiftedMetric { n1: d.n1(), n2: d.n2(), g: g.data },
            ginv: gi.data,
            dmet,
            r,
            gc,
            f: d.horizontal_coefficients(),
            c_up,
        }
    }

    /// `E_A 𝐆(E_B, E_C)`.
    pub fn dframe(&self, a: usize, b: usize, c: usize) -> f64 {
        let n = self.n;
        match (b < n, c < n) {
            (true, true) => self.dmet[(a * n + b) * n + c],
            (false, false) => self.dmet[(a * n + b - n) * n + c - n],
            _ => 0.0,
        }
    }

    /// `E_X 𝐆(Y, Z)` for constant-coefficient fields.
    pub fn dmetric(&self, x: &FrameVector, y: &FrameVector, z: &FrameVector) -> f64 {
        let m = 2 * self.n;
        let (xc, yc, zc) = (x.components(), y.components(), z.components());
        let mut s = 0.0;
        for a in 0..m {
            if xc[a] == 0.0 {
                continue;
            }
            for b in 0..m {
                if yc[b] == 0.0 {
                    continue;
                }
                for c in 0..m {
                    s += xc[a] * yc[b] * zc[c] * self.dframe(a, b, c);
                }
            }
        }
        s
    }

    /// `[E_A, E_B]` from the adapted-frame bracket table.
    pub fn bracket(&self, a: usize, b: usize) -> FrameVector {
        let n = self.n;
        let mut out = FrameVector::zeros(n);
        match (a < n, b < n) {
            (true, true) => {
                for c in 0..n {
                    out.v[c] = self.r.get(&[c, a, b]);
                }
            }
            (true, false) => {
                for c in 0..n {
                    out.v[c] = self.gc.get(&[c, a, b - n]);
                }
            }
            (false, true) => {
                for c in 0..n {
                    out.v[c] = -self.gc.get(&[c, b, a - n]);
                }
            }
            (false, false) => {}
        }
        out
    }

    /// Raises a covector given on the frame (`w_C = 𝐆(·, E_C)`) to a frame vector.
    pub fn raise(&self, w: &[f64]) -> FrameVector {
        let n = self.n;
        let mut out = FrameVector::zeros(n);
        for c in 0..n {
            for d in 0..n {
                let gi = self.ginv[c * n + d];
                out.h[c] += gi * w[d];
                out.v[c] += gi * w[n + d];
            }
        }
        out
    }
}

impl DwGeometry {
    pub fn lifted_metric(&self) -> LiftedMetric {
        let (g, _) = self.fundamental_tensor();
        LiftedMetric { n1: self.n1(), n2: self.n2(), g: g.data }
    }
}
