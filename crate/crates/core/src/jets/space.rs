use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Highest total derivative order a jet may carry.
pub const MAX_ORDER: usize = 6;
/// Highest number of independent variables in one jet space.
pub const MAX_VARS: usize = 16;

const BITS: u32 = 4;
const MASK: u64 = 0xf;

/// Packed exponent vector: 4 bits per variable.
pub(crate) type Monomial = u64;

pub(crate) fn exponent(m: Monomial, k: usize) -> usize {
    ((m >> (BITS * k as u32)) & MASK) as usize
}

pub(crate) fn unit(k: usize) -> Monomial {
    1u64 << (BITS * k as u32)
}

fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Layout and multiplication tables for truncated multivariate jets.
///
/// Monomials are listed by increasing degree, and within a degree in a fixed
/// lexicographic order that does not depend on the truncation order. The
/// monomials of a lower-order space therefore form a prefix of a higher one,
/// which makes truncation a slice operation.
#[derive(Debug)]
pub struct JetSpace {
    nvars: usize,
    order: usize,
    monomials: Vec<Monomial>,
    grade_start: Vec<usize>,
    index: HashMap<Monomial, usize>,
    prod_start: Vec<u32>,
    prod_terms: Vec<(u32, u32, f64)>,
    shift: Vec<u32>,
}

fn monomials_of_degree(nvars: usize, degree: usize) -> Vec<Monomial> {
    fn rec(var: usize, nvars: usize, left: usize, acc: Monomial, out: &mut Vec<Monomial>) {
        if var + 1 == nvars {
            out.push(acc | ((left as u64) << (BITS * var as u32)));
            return;
        }
        for e in (0..=left).rev() {
            rec(var + 1, nvars, left - e, acc | ((e as u64) << (BITS * var as u32)), out);
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(0);
        }
        return out;
    }
    rec(0, nvars, degree, 0, &mut out);
    out
}

impl JetSpace {
    fn build(nvars: usize, order: usize) -> JetSpace {
        let mut monomials = Vec::new();
        let mut grade_start = Vec::with_capacity(order + 2);
        for d in 0..=order {
            grade_start.push(monomials.len());
            monomials.extend(monomials_of_degree(nvars, d));
        }
        grade_start.push(monomials.len());
        let index: HashMap<Monomial, usize> =
            monomials.iter().enumerate().map(|(i, &m)| (m, i)).collect();

        let degree_of = |i: usize| grade_start.partition_point(|&s| s <= i) - 1;

        let size = monomials.len();
        let mut buckets: Vec<Vec<(u32, u32, f64)>> = vec![Vec::new(); size];
        for i in 0..size {
            let di = degree_of(i);
            let jmax = grade_start[order - di + 1];
            for j in 0..jmax {
                let m = monomials[i] + monomials[j];
                let out = index[&m];
                let mut w = 1.0;
                for k in 0..nvars {
                    w *= binom(exponent(m, k), exponent(monomials[i], k));
                }
                buckets[out].push((i as u32, j as u32, w));
            }
        }
        let mut prod_start = Vec::with_capacity(size + 1);
        let mut prod_terms = Vec::new();
        for b in buckets {
            prod_start.push(prod_terms.len() as u32);
            prod_terms.extend(b);
        }
        prod_start.push(prod_terms.len() as u32);

        let lower = grade_start[order];
        let mut shift = Vec::with_capacity(nvars * lower);
        for k in 0..nvars {
            for &m in &monomials[..lower] {
                shift.push(index[&(m + unit(k))] as u32);
            }
        }

        JetSpace { nvars, order, monomials, grade_start, index, prod_start, prod_terms, shift }
    }

    /// Shared space for `nvars` variables truncated at total order `order`.
    pub fn get(nvars: usize, order: usize) -> Result<Arc<JetSpace>> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh { requested: order, max: MAX_ORDER });
        }
        if nvars > MAX_VARS {
            return Err(Error::TooManyVariables(nvars));
        }
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(s) = cache.lock().expect("jet space cache poisoned").get(&(nvars, order)) {
            return Ok(s.clone());
        }
        // Built outside the lock; a racing builder produces an identical table.
        let built = Arc::new(JetSpace::build(nvars, order));
        let mut guard = cache.lock().expect("jet space cache poisoned");
        Ok(guard.entry((nvars, order)).or_insert(built).clone())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored coefficients.
    pub fn size(&self) -> usize {
        self.monomials.len()
    }

    /// Number of coefficients of total degree at most `d`.
    pub fn size_up_to(&self, d: usize) -> usize {
        self.grade_start[d.min(self.order) + 1]
    }

    /// Position of the coefficient with the given exponent vector.
    pub fn index_of(&self, exponents: &[usize]) -> Option<usize> {
        if exponents.len() != self.nvars || exponents.iter().any(|&e| e > MAX_ORDER) {
            return None;
        }
        let mut m = 0u64;
        for (k, &e) in exponents.iter().enumerate() {
            m |= (e as u64) << (BITS * k as u32);
        }
        self.index.get(&m).copied()
    }

    /// Exponent vector of coefficient `i`.
    pub fn exponents(&self, i: usize) -> Vec<usize> {
        (0..self.nvars).map(|k| exponent(self.monomials[i], k)).collect()
    }

    pub(crate) fn mul_into(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        for (m, o) in out.iter_mut().enumerate() {
            let lo = self.prod_start[m] as usize;
            let hi = self.prod_start[m + 1] as usize;
            let mut acc = 0.0;
            for &(i, j, w) in &self.prod_terms[lo..hi] {
                acc += w * a[i as usize] * b[j as usize];
            }
            *o = acc;
        }
    }

    /// Index in this space of monomial `m + e_k`, for `m` of degree < order.
    pub(crate) fn shifted(&self, k: usize, m: usize) -> usize {
        self.shift[k * self.grade_start[self.order] + m] as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_order_space_is_prefix() {
        let hi = JetSpace::get(3, 4).unwrap();
        let lo = JetSpace::get(3, 2).unwrap();
        for i in 0..lo.size() {
            assert_eq!(lo.exponents(i), hi.exponents(i));
        }
    }

    #[test]
    fn sizes_match_binomial_counts() {
        let s = JetSpace::get(4, 3).unwrap();
        // C(4+3, 3)
        assert_eq!(s.size(), 35);
        assert_eq!(s.size_up_to(1), 5);
    }

    #[test]
    fn rejects_excessive_order() {
        assert!(matches!(JetSpace::get(2, 7), Err(Error::OrderTooHigh { .. })));
        assert!(matches!(JetSpace::get(17, 1), Err(Error::TooManyVariables(17))));
    }

    #[test]
    fn empty_variable_space_is_scalar() {
        let s = JetSpace::get(0, 3).unwrap();
        assert_eq!(s.size(), 1);
    }
}
