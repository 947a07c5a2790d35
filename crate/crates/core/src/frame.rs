//! Tangent vectors of the slit tangent bundle in the adapted frame
//! `(δ/δx^i, δ/δu^α, ∂/∂y^i, ∂/∂v^α)`.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Horizontal components on `δ_a` and vertical components on `∂_a`, both over
/// the combined index `a ∈ 0..n1+n2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameVector {
    pub h: Vec<f64>,
    pub v: Vec<f64>,
}

impl FrameVector {
    pub fn zeros(n: usize) -> Self {
        FrameVector { h: vec![0.0; n], v: vec![0.0; n] }
    }

    /// `δ_a`
    pub fn horizontal(n: usize, a: usize) -> Self {
        let mut f = Self::zeros(n);
        f.h[a] = 1.0;
        f
    }

    /// `∂_a`
    pub fn vertical(n: usize, a: usize) -> Self {
        let mut f = Self::zeros(n);
        f.v[a] = 1.0;
        f
    }

    /// Frame basis element `A ∈ 0..2n`: `δ_A` for `A < n`, `∂_{A−n}` otherwise.
    pub fn basis(n: usize, idx: usize) -> Self {
        if idx < n {
            Self::horizontal(n, idx)
        } else {
            Self::vertical(n, idx - n)
        }
    }

    pub fn from_components(n: usize, c: &[f64]) -> Self {
        assert_eq!(c.len(), 2 * n);
        FrameVector { h: c[..n].to_vec(), v: c[n..].to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn components(&self) -> Vec<f64> {
        self.h.iter().chain(&self.v).copied().collect()
    }

    pub fn get(&self, idx: usize) -> f64 {
        let n = self.dim();
        if idx < n {
            self.h[idx]
        } else {
            self.v[idx - n]
        }
    }

    pub fn add_scaled(&mut self, c: f64, other: &FrameVector) {
        for (a, b) in self.h.iter_mut().zip(&other.h) {
            *a += c * b;
        }
        for (a, b) in self.v.iter_mut().zip(&other.v) {
            *a += c * b;
        }
    }

    /// Vertical projector `v^d`.
    pub fn vertical_part(&self) -> Self {
        FrameVector { h: vec![0.0; self.dim()], v: self.v.clone() }
    }

    /// Horizontal projector `h^d = id − v^d`.
    pub fn horizontal_part(&self) -> Self {
        FrameVector { h: self.h.clone(), v: vec![0.0; self.dim()] }
    }

    /// Almost tangent structure `J^d`: `δ_a ↦ ∂_a`, `∂_a ↦ 0`.
    pub fn almost_tangent(&self) -> Self {
        FrameVector { h: vec![0.0; self.dim()], v: self.h.clone() }
    }

    /// Almost complex structure: `δ_a ↦ −∂_a`, `∂_a ↦ δ_a`.
    pub fn complex(&self) -> Self {
        FrameVector { h: self.v.clone(), v: self.h.iter().map(|x| -x).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.h.iter().chain(&self.v).fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_vertical(&self, tol: f64) -> bool {
        self.h.iter().all(|x| x.abs() <= tol)
    }

    pub fn is_horizontal(&self, tol: f64) -> bool {
        self.v.iter().all(|x| x.abs() <= tol)
    }
}

impl Add for &FrameVector {
    type Output = FrameVector;
    fn add(self, o: &FrameVector) -> FrameVector {
        let mut r = self.clone();
        r.add_scaled(1.0, o);
        r
    }
}

impl Sub for &FrameVector {
    type Output = FrameVector;
    fn sub(self, o: &FrameVector) -> FrameVector {
        let mut r = self.clone();
        r.add_scaled(-1.0, o);
        r
    }
}

impl Mul<f64> for &FrameVector {
    type Output = FrameVector;
    fn mul(self, c: f64) -> FrameVector {
        FrameVector { h: self.h.iter().map(|x| x * c).collect(), v: self.v.iter().map(|x| x * c).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FrameVector {
        FrameVector::from_components(3, &[1.0, -2.0, 0.5, 3.0, 0.25, -1.5])
    }

    #[test]
    fn projector_algebra() {
        let x = sample();
        assert_eq!(x.vertical_part().vertical_part(), x.vertical_part());
        assert_eq!(x.horizontal_part().horizontal_part(), x.horizontal_part());
        assert_eq!(&x.vertical_part() + &x.horizontal_part(), x);
        assert_eq!(x.almost_tangent().almost_tangent(), FrameVector::zeros(3));
        assert!(x.horizontal_part().almost_tangent().is_vertical(0.0));
        assert_eq!(x.almost_tangent().v, x.h);
    }

    #[test]
    fn complex_squares_to_minus_identity() {
        let x = sample();
        assert_eq!(x.complex().complex(), &x * -1.0);
        assert_eq!(FrameVector::horizontal(3, 1).complex(), &FrameVector::vertical(3, 1) * -1.0);
        assert_eq!(FrameVector::vertical(3, 2).complex(), FrameVector::horizontal(3, 2));
    }
}
