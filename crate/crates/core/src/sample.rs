use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible Euclidean norm of either fiber vector.
pub const SLIT_MIN: f64 = 1e-12;

/// A point `(x, u, y, v)` of the slit tangent bundle of `M1 × M2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentSample {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    pub v: Vec<f64>,
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|t| t * t).sum::<f64>().sqrt()
}

impl TangentSample {
    pub fn new(x: Vec<f64>, u: Vec<f64>, y: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let p = TangentSample { x, u, y, v };
        p.validate()?;
        Ok(p)
    }

    /// Checks dimensions, finiteness and the slit condition.
    pub fn validate(&self) -> Result<()> {
        if self.x.is_empty() || self.u.is_empty() {
            return Err(Error::Dimension("both factors need dimension ≥ 1".into()));
        }
        if self.x.len() != self.y.len() || self.u.len() != self.v.len() {
            return Err(Error::Dimension(format!(
                "base/fiber length mismatch: x {} y {}, u {} v {}",
                self.x.len(),
                self.y.len(),
                self.u.len(),
                self.v.len()
            )));
        }
        if self.flat().iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        let ny = norm(&self.y);
        if ny < SLIT_MIN {
            return Err(Error::SlitViolation { block: "y", norm: ny, min: SLIT_MIN });
        }
        let nv = norm(&self.v);
        if nv < SLIT_MIN {
            return Err(Error::SlitViolation { block: "v", norm: nv, min: SLIT_MIN });
        }
        Ok(())
    }

    pub fn n1(&self) -> usize {
        self.x.len()
    }

    pub fn n2(&self) -> usize {
        self.u.len()
    }

    /// Combined dimension `n1 + n2`.
    pub fn n(&self) -> usize {
        self.n1() + self.n2()
    }

    /// Coordinates in the order `[x, u, y, v]`.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.n());
        out.extend(&self.x);
        out.extend(&self.u);
        out.extend(&self.y);
        out.extend(&self.v);
        out
    }

    pub fn from_flat(n1: usize, n2: usize, c: &[f64]) -> Result<Self> {
        if c.len() != 2 * (n1 + n2) {
            return Err(Error::Dimension(format!("expected {} coordinates, got {}", 2 * (n1 + n2), c.len())));
        }
        let n = n1 + n2;
        TangentSample::new(
            c[..n1].to_vec(),
            c[n1..n].to_vec(),
            c[n..n + n1].to_vec(),
            c[n + n1..].to_vec(),
        )
    }

    /// Base point in combined coordinates `(x, u)`.
    pub fn base(&self) -> Vec<f64> {
        let mut b = self.x.clone();
        b.extend(&self.u);
        b
    }

    /// Fiber vector in combined coordinates `𝐲 = (y, v)`.
    pub fn fiber(&self) -> Vec<f64> {
        let mut f = self.y.clone();
        f.extend(&self.v);
        f
    }

    /// The same base point with fiber `(λy, λv)`.
    pub fn scale_fiber(&self, lambda: f64) -> Result<Self> {
        TangentSample::new(
            self.x.clone(),
            self.u.clone(),
            self.y.iter().map(|t| lambda * t).collect(),
            self.v.iter().map(|t| lambda * t).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_fiber() {
        let e = TangentSample::new(vec![0.0], vec![0.0], vec![0.0], vec![1.0]).unwrap_err();
        assert!(matches!(e, Error::SlitViolation { block: "y", .. }));
    }

    #[test]
    fn flat_round_trip() {
        let p = TangentSample::new(vec![1.0, 2.0], vec![3.0], vec![4.0, 5.0], vec![6.0]).unwrap();
        let q = TangentSample::from_flat(2, 1, &p.flat()).unwrap();
        assert_eq!(p, q);
    }
}
