use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::space::JetSpace;
use crate::error::{Error, Result};

/// Truncated multivariate Taylor expansion storing true partial derivatives.
///
/// Coefficient `i` is the mixed partial `∂^e f` for the exponent vector
/// `e = space.exponents(i)` (not divided by `e!`).
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.space.nvars())
            .field("order", &self.space.order())
            .field("value", &self.value())
            .finish()
    }
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, c: f64) -> Jet {
        let mut coeffs = vec![0.0; space.size()];
        coeffs[0] = c;
        Jet { space: space.clone(), coeffs }
    }

    /// The coordinate function for variable `k`, evaluated at `value`.
    pub fn variable(space: &Arc<JetSpace>, k: usize, value: f64) -> Jet {
        assert!(k < space.nvars(), "variable {k} out of range");
        let mut j = Jet::constant(space, value);
        if space.order() >= 1 {
            let mut e = vec![0; space.nvars()];
            e[k] = 1;
            let i = space.index_of(&e).expect("first-order monomial present");
            j.coeffs[i] = 1.0;
        }
        j
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.space.order()
    }

    pub fn nvars(&self) -> usize {
        self.space.nvars()
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Mixed partial with the given exponent vector, if within the truncation order.
    pub fn partial(&self, exponents: &[usize]) -> Option<f64> {
        self.space.index_of(exponents).map(|i| self.coeffs[i])
    }

    /// Drops all coefficients above total order `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order() {
            return self.clone();
        }
        let space = JetSpace::get(self.nvars(), order).expect("lower order is valid");
        let coeffs = self.coeffs[..space.size()].to_vec();
        Jet { space, coeffs }
    }

    /// Partial derivative with respect to variable `k`; the result has order one less.
    ///
    /// Panics on an order-0 jet, whose derivatives are unknown.
    pub fn d(&self, k: usize) -> Jet {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        assert!(k < self.nvars(), "variable {k} out of range");
        let space = JetSpace::get(self.nvars(), self.order() - 1).expect("lower order is valid");
        let coeffs = (0..space.size()).map(|m| self.coeffs[self.space.shifted(k, m)]).collect();
        Jet { space, coeffs }
    }

    fn aligned<'a>(&'a self, other: &'a Jet) -> (std::borrow::Cow<'a, Jet>, std::borrow::Cow<'a, Jet>) {
        use std::borrow::Cow;
        assert_eq!(self.nvars(), other.nvars(), "jets live in different variable sets");
        let o = self.order().min(other.order());
        let a = if self.order() == o { Cow::Borrowed(self) } else { Cow::Owned(self.truncate(o)) };
        let b = if other.order() == o { Cow::Borrowed(other) } else { Cow::Owned(other.truncate(o)) };
        (a, b)
    }

    pub fn add_jet(&self, other: &Jet) -> Jet {
        let (a, b) = self.aligned(other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Jet { space: a.space.clone(), coeffs }
    }

    pub fn sub_jet(&self, other: &Jet) -> Jet {
        let (a, b) = self.aligned(other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        Jet { space: a.space.clone(), coeffs }
    }

    pub fn mul_jet(&self, other: &Jet) -> Jet {
        let (a, b) = self.aligned(other);
        let mut coeffs = vec![0.0; a.space.size()];
        a.space.mul_into(&a.coeffs, &b.coeffs, &mut coeffs);
        Jet { space: a.space.clone(), coeffs }
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet { space: self.space.clone(), coeffs: self.coeffs.iter().map(|x| c * x).collect() }
    }

    pub fn add_scalar(&self, c: f64) -> Jet {
        let mut r = self.clone();
        r.coeffs[0] += c;
        r
    }

    /// `self += c * other`, with `other` truncated or matched to this order.
    pub fn axpy(&mut self, c: f64, other: &Jet) {
        assert_eq!(self.nvars(), other.nvars(), "jets live in different variable sets");
        if other.order() < self.order() {
            *self = self.truncate(other.order());
        }
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += c * y;
        }
    }

    /// Evaluates `Σ_k t_k (self − value)^k` for univariate Taylor coefficients `t_k`
    /// of a function expanded around `self.value()`.
    fn compose(&self, taylor: &[f64]) -> Jet {
        let n = self.order();
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut r = Jet::constant(&self.space, taylor[n]);
        let mut tmp = vec![0.0; self.space.size()];
        for k in (0..n).rev() {
            self.space.mul_into(&r.coeffs, &h.coeffs, &mut tmp);
            std::mem::swap(&mut r.coeffs, &mut tmp);
            r.coeffs[0] += taylor[k];
        }
        r
    }

    /// Generalized power `self^r` through the binomial series around the value.
    fn powr_series(&self, r: f64) -> Jet {
        let a = self.value();
        let n = self.order();
        let mut t = Vec::with_capacity(n + 1);
        let mut c = 1.0;
        for k in 0..=n {
            t.push(c * a.powf(r - k as f64));
            c *= (r - k as f64) / (k + 1) as f64;
        }
        self.compose(&t)
    }

    pub fn recip(&self) -> Result<Jet> {
        let a = self.value();
        if a == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.order();
        let t: Vec<f64> = (0..=n).map(|k| (-1f64).powi(k as i32) / a.powi(k as i32 + 1)).collect();
        Ok(self.compose(&t))
    }

    pub fn div_jet(&self, other: &Jet) -> Result<Jet> {
        Ok(self.mul_jet(&other.recip()?))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(Error::SqrtNonPositive(a));
        }
        Ok(self.powr_series(0.5))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let n = self.order();
        let mut t = Vec::with_capacity(n + 1);
        let mut fact = 1.0;
        for k in 0..=n {
            if k > 0 {
                fact *= k as f64;
            }
            t.push(e / fact);
        }
        self.compose(&t)
    }

    /// Integer power; negative exponents require a nonzero value.
    pub fn powi(&self, p: i32) -> Result<Jet> {
        if p >= 0 {
            let mut r = Jet::constant(&self.space, 1.0);
            for _ in 0..p {
                r = r.mul_jet(self);
            }
            return Ok(r);
        }
        self.powi(-p)?.recip()
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.add_jet(rhs)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.sub_jet(rhs)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_at(v: f64, order: usize) -> Jet {
        let s = JetSpace::get(1, order).unwrap();
        Jet::variable(&s, 0, v)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn square_at_three() {
        let x = x_at(3.0, 2);
        let f = &x * &x;
        assert_eq!(f.coeffs(), &[9.0, 6.0, 2.0]);
    }

    #[test]
    fn sqrt_of_square_is_identity_for_positive_argument() {
        let x = x_at(2.0, 2);
        let f = (&x * &x).sqrt().unwrap();
        assert!(close(f.value(), 2.0));
        assert!(close(f.coeffs()[1], 1.0));
        assert!(f.coeffs()[2].abs() < 1e-12);
    }

    #[test]
    fn quotient_of_equal_jets_is_one() {
        let x = x_at(1.0, 3);
        let f = &(&x * &x) + 1.0;
        let q = f.div_jet(&f).unwrap();
        assert!(close(q.value(), 1.0));
        for c in &q.coeffs()[1..] {
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn exp_derivatives_equal_value() {
        let x = x_at(0.3, 5);
        let e = x.exp();
        for c in e.coeffs() {
            assert!(close(*c, 0.3f64.exp()));
        }
    }

    #[test]
    fn recip_matches_closed_form() {
        let x = x_at(2.0, 3);
        let r = x.recip().unwrap();
        // d^k/dx^k 1/x = (-1)^k k! / x^{k+1}
        let expect = [0.5, -0.25, 2.0 / 8.0, -6.0 / 16.0];
        for (c, e) in r.coeffs().iter().zip(expect) {
            assert!(close(*c, e));
        }
    }

    #[test]
    fn powi_negative() {
        let x = x_at(2.0, 2);
        let r = x.powi(-2).unwrap();
        assert!(close(r.value(), 0.25));
        assert!(close(r.coeffs()[1], -2.0 / 8.0));
        assert!(close(r.coeffs()[2], 6.0 / 16.0));
    }

    #[test]
    fn errors_on_bad_domains() {
        let x = x_at(0.0, 2);
        assert!(matches!(x.recip(), Err(Error::DivisionByZero)));
        assert!(matches!(x.sqrt(), Err(Error::SqrtNonPositive(_))));
    }

    #[test]
    fn derivative_lowers_order() {
        let s = JetSpace::get(2, 3).unwrap();
        let x = Jet::variable(&s, 0, 1.0);
        let y = Jet::variable(&s, 1, 2.0);
        let f = &(&x * &x) * &y;
        let fx = f.d(0);
        assert_eq!(fx.order(), 2);
        assert!(close(fx.value(), 4.0));
        assert!(close(fx.partial(&[0, 1]).unwrap(), 2.0));
        assert!(close(fx.partial(&[1, 0]).unwrap(), 4.0));
    }

    #[test]
    fn mixed_orders_truncate_to_lower() {
        let s3 = JetSpace::get(1, 3).unwrap();
        let s1 = JetSpace::get(1, 1).unwrap();
        let a = Jet::variable(&s3, 0, 1.0);
        let b = Jet::variable(&s1, 0, 1.0);
        assert_eq!((&a * &b).order(), 1);
    }
}
