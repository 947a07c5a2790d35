//! Factor metrics, warp functions and the doubly warped product `F² = f2²(u)F1² + f1²(x)F2²`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::{Jet, PointJets, ScalarField};

/// A squared Finsler norm `F²(base, fiber)` on a coordinate patch of dimension `dim()`.
pub trait FinslerFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn f2(&self, base: &[Jet], fiber: &[Jet]) -> Result<Jet>;
}

/// One term `coeff · Π x_k^{powers[k]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

/// Polynomial in the base coordinates of one factor.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial(pub Vec<PolyTerm>);

impl Polynomial {
    pub fn constant(c: f64) -> Self {
        Polynomial(vec![PolyTerm { coeff: c, powers: vec![] }])
    }

    pub fn eval(&self, x: &[Jet], zero: &Jet) -> Result<Jet> {
        let mut acc = zero.scale(0.0);
        for t in &self.0 {
            if t.powers.len() > x.len() {
                return Err(Error::Dimension(format!(
                    "polynomial term uses {} coordinates, factor has {}",
                    t.powers.len(),
                    x.len()
                )));
            }
            let mut m = zero.scale(0.0).add_scalar(t.coeff);
            for (k, &p) in t.powers.iter().enumerate() {
                if p > 0 {
                    m = m.mul_jet(&x[k].powi(p as i32)?);
                }
            }
            acc = acc.add_jet(&m);
        }
        Ok(acc)
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|t| t.powers.iter().all(|&p| p == 0))
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|t| t.coeff * t.powers.iter().enumerate().map(|(k, &p)| x[k].powi(p as i32)).product::<f64>())
            .sum()
    }
}

/// A user-supplied smooth `F²(x, y)` for one factor.
#[derive(Clone)]
pub struct CustomMetric {
    pub name: String,
    pub dim: usize,
    /// Whether `F²` is quadratic in the fiber (Cartan tensor identically zero).
    pub riemannian: bool,
    #[allow(clippy::type_complexity)]
    pub f2: Arc<dyn Fn(&[Jet], &[Jet]) -> Result<Jet> + Send + Sync>,
}

impl fmt::Debug for CustomMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMetric")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("riemannian", &self.riemannian)
            .finish()
    }
}

/// Declarative description of one factor `(M_k, F_k)`.
#[derive(Clone, Debug)]
pub enum FactorMetricSpec {
    Euclidean { dim: usize },
    /// `F² = a_ij(x) y^i y^j` with polynomial entries.
    RiemannianQuadratic { dim: usize, entries: Vec<Vec<Polynomial>> },
    /// `F = α + β` with `α` from a Riemannian base and constant `b`.
    Randers { base: Box<FactorMetricSpec>, b: Vec<f64> },
    Custom(CustomMetric),
}

fn leading_minors_positive(a: &[Vec<f64>]) -> Result<()> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let piv = m[k][k];
        det *= piv;
        if !(det > 0.0) {
            return Err(Error::NotPositiveDefinite { minor: k + 1, value: det });
        }
        for i in k + 1..n {
            let f = m[i][k] / piv;
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    Ok(())
}

fn solve_small(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &bi)| {
        let mut r = r.clone();
        r.push(bi);
        r
    }).collect();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).expect("nonempty");
        m.swap(k, p);
        if m[k][k] == 0.0 {
            return Err(Error::Singular);
        }
        for i in 0..n {
            if i != k {
                let f = m[i][k] / m[k][k];
                for j in k..=n {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
    }
    Ok((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

impl FactorMetricSpec {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("factor dimension must be ≥ 1".into()));
        }
        Ok(FactorMetricSpec::Euclidean { dim })
    }

    pub fn riemannian_quadratic(entries: Vec<Vec<Polynomial>>) -> Result<Self> {
        let dim = entries.len();
        if dim == 0 || entries.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidConfig("riemannian_quadratic matrix must be square and nonempty".into()));
        }
        for i in 0..dim {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::InvalidConfig(format!("matrix entry ({i},{j}) differs from ({j},{i})")));
                }
            }
            for p in &entries[i] {
                if p.0.iter().any(|t| t.powers.len() > dim || !t.coeff.is_finite()) {
                    return Err(Error::InvalidConfig(format!("bad polynomial in row {i}")));
                }
            }
        }
        Ok(FactorMetricSpec::RiemannianQuadratic { dim, entries })
    }

    /// Randers metric over a Riemannian base. For a Euclidean base the norm of `b`
    /// is checked here; otherwise it is checked at every evaluated point.
    pub fn randers(base: FactorMetricSpec, b: Vec<f64>) -> Result<Self> {
        match &base {
            FactorMetricSpec::Euclidean { dim } | FactorMetricSpec::RiemannianQuadratic { dim, .. } => {
                if b.len() != *dim {
                    return Err(Error::InvalidConfig(format!("randers b has length {}, expected {dim}", b.len())));
                }
            }
            _ => return Err(Error::InvalidConfig("randers base must be euclidean or riemannian_quadratic".into())),
        }
        if b.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig("randers b must be finite".into()));
        }
        let nb = match &base {
            FactorMetricSpec::Euclidean { .. } => Some(crate::sample::norm(&b)),
            FactorMetricSpec::RiemannianQuadratic { dim, entries } if entries.iter().flatten().all(|p| p.is_constant()) => {
                let a: Vec<Vec<f64>> = entries.iter().map(|r| r.iter().map(|p| p.eval_f64(&vec![0.0; *dim])).collect()).collect();
                leading_minors_positive(&a)?;
                let ab = solve_small(&a, &b)?;
                Some(b.iter().zip(&ab).map(|(x, y)| x * y).sum::<f64>().sqrt())
            }
            _ => None,
        };
        if let Some(nb) = nb {
            if nb >= 1.0 {
                return Err(Error::InvalidConfig(format!("randers requires ‖b‖ < 1, got {nb}")));
            }
        }
        Ok(FactorMetricSpec::Randers { base: Box::new(base), b })
    }

    pub fn custom(
        name: impl Into<String>,
        dim: usize,
        riemannian: bool,
        f2: impl Fn(&[Jet], &[Jet]) -> Result<Jet> + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("factor dimension must be ≥ 1".into()));
        }
        Ok(FactorMetricSpec::Custom(CustomMetric { name: name.into(), dim, riemannian, f2: Arc::new(f2) }))
    }

    pub fn dim(&self) -> usize {
        match self {
            FactorMetricSpec::Euclidean { dim } => *dim,
            FactorMetricSpec::RiemannianQuadratic { dim, .. } => *dim,
            FactorMetricSpec::Randers { base, .. } => base.dim(),
            FactorMetricSpec::Custom(c) => c.dim,
        }
    }

    /// True when `F²` is quadratic in the fiber.
    pub fn is_riemannian(&self) -> bool {
        match self {
            FactorMetricSpec::Euclidean { .. } | FactorMetricSpec::RiemannianQuadratic { .. } => true,
            FactorMetricSpec::Randers { b, .. } => b.iter().all(|&c| c == 0.0),
            FactorMetricSpec::Custom(c) => c.riemannian,
        }
    }

    /// Short tag used in reports.
    pub fn kind(&self) -> &str {
        match self {
            FactorMetricSpec::Euclidean { .. } => "euclidean",
            FactorMetricSpec::RiemannianQuadratic { .. } => "riemannian_quadratic",
            FactorMetricSpec::Randers { .. } => "randers",
            FactorMetricSpec::Custom(c) => &c.name,
        }
    }

    fn quadratic_matrix(&self, x: &[Jet]) -> Result<Option<Vec<Vec<Jet>>>> {
        match self {
            FactorMetricSpec::RiemannianQuadratic { dim, entries } => {
                let zero = &x[0];
                let mut a = vec![Vec::with_capacity(*dim); *dim];
                for (i, row) in entries.iter().enumerate() {
                    for p in row {
                        a[i].push(p.eval(x, zero)?);
                    }
                }
                let vals: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(Jet::value).collect()).collect();
                leading_minors_positive(&vals)?;
                Ok(Some(a))
            }
            _ => Ok(None),
        }
    }

    fn quadratic_form(&self, x: &[Jet], y: &[Jet]) -> Result<(Jet, Option<Vec<Vec<Jet>>>)> {
        match self.quadratic_matrix(x)? {
            Some(a) => {
                let mut acc = y[0].scale(0.0);
                for i in 0..y.len() {
                    let mut row = y[0].scale(0.0);
                    for j in 0..y.len() {
                        row = row.add_jet(&a[i][j].mul_jet(&y[j]));
                    }
                    acc = acc.add_jet(&row.mul_jet(&y[i]));
                }
                Ok((acc, Some(a)))
            }
            None => {
                let mut acc = y[0].scale(0.0);
                for yi in y {
                    acc = acc.add_jet(&yi.mul_jet(yi));
                }
                Ok((acc, None))
            }
        }
    }
}

impl FinslerFunction for FactorMetricSpec {
    fn dim(&self) -> usize {
        FactorMetricSpec::dim(self)
    }

    fn f2(&self, x: &[Jet], y: &[Jet]) -> Result<Jet> {
        if x.len() != self.dim() || y.len() != self.dim() {
            return Err(Error::Dimension(format!("factor of dim {} given {} / {}", self.dim(), x.len(), y.len())));
        }
        match self {
            FactorMetricSpec::Euclidean { .. } | FactorMetricSpec::RiemannianQuadratic { .. } => {
                Ok(self.quadratic_form(x, y)?.0)
            }
            FactorMetricSpec::Randers { base, b } => {
                let (a2, mat) = base.quadratic_form(x, y)?;
                if let Some(m) = mat {
                    let vals: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(Jet::value).collect()).collect();
                    let ainv_b = solve_small(&vals, b)?;
                    let nb2: f64 = ainv_b.iter().zip(b).map(|(p, q)| p * q).sum();
                    if nb2 >= 1.0 {
                        return Err(Error::Domain(format!("randers ‖b‖ = {} ≥ 1 at this point", nb2.sqrt())));
                    }
                }
                let alpha = a2.sqrt()?;
                let mut beta = y[0].scale(0.0);
                for (bi, yi) in b.iter().zip(y) {
                    beta.axpy(*bi, yi);
                }
                let f = alpha.add_jet(&beta);
                Ok(f.mul_jet(&f))
            }
            FactorMetricSpec::Custom(c) => (c.f2)(x, y),
        }
    }
}

/// A warp function, described through its square.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WarpSpec {
    /// `f = c`
    Constant(f64),
    /// `f² = 1 + Σ a_i (coordinate_i)²`
    PolyQuadratic(Vec<f64>),
    /// `f² = exp(2k · coordinate_axis)`
    Exponential { k: f64, axis: usize },
}

impl WarpSpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            WarpSpec::Constant(c) if !(*c > 0.0 && c.is_finite()) => {
                Err(Error::InvalidConfig(format!("constant warp must be positive, got {c}")))
            }
            WarpSpec::PolyQuadratic(a) => {
                if a.len() > dim {
                    return Err(Error::InvalidConfig(format!(
                        "poly_quadratic warp has {} coefficients for {dim} coordinates",
                        a.len()
                    )));
                }
                if a.iter().any(|c| !(*c >= 0.0 && c.is_finite())) {
                    return Err(Error::InvalidConfig("poly_quadratic coefficients must be ≥ 0".into()));
                }
                Ok(())
            }
            WarpSpec::Exponential { k, axis } => {
                if *axis >= dim {
                    return Err(Error::InvalidConfig(format!("exponential warp axis {axis} ≥ dim {dim}")));
                }
                if !k.is_finite() {
                    return Err(Error::InvalidConfig("exponential warp rate must be finite".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            WarpSpec::Constant(_) => true,
            WarpSpec::PolyQuadratic(a) => a.iter().all(|&c| c == 0.0),
            WarpSpec::Exponential { k, .. } => *k == 0.0,
        }
    }

    /// Jet of `f²` over the factor's base coordinates.
    pub fn f_sq(&self, coords: &[Jet]) -> Result<Jet> {
        let zero = coords[0].scale(0.0);
        Ok(match self {
            WarpSpec::Constant(c) => zero.add_scalar(c * c),
            WarpSpec::PolyQuadratic(a) => {
                let mut acc = zero.add_scalar(1.0);
                for (ai, ci) in a.iter().zip(coords) {
                    acc.axpy(*ai, &ci.mul_jet(ci));
                }
                acc
            }
            WarpSpec::Exponential { k, axis } => coords[*axis].scale(2.0 * k).exp(),
        })
    }

    /// Plain value of `f²`.
    pub fn f_sq_value(&self, coords: &[f64]) -> f64 {
        match self {
            WarpSpec::Constant(c) => c * c,
            WarpSpec::PolyQuadratic(a) => 1.0 + a.iter().zip(coords).map(|(ai, c)| ai * c * c).sum::<f64>(),
            WarpSpec::Exponential { k, axis } => (2.0 * k * coords[*axis]).exp(),
        }
    }
}

/// How many of the two warps are non-constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Both warps constant.
    Product,
    /// Exactly one warp non-constant.
    Warped,
    /// Both warps non-constant.
    ProperDoublyWarped,
}

/// Two factor metrics and two warps: `F² = f2²(u) F1²(x,y) + f1²(x) F2²(u,v)`.
///
/// `f1` is a function on `M1` (coordinates `x`), `f2` on `M2` (coordinates `u`).
#[derive(Clone, Debug)]
pub struct ProductConfig {
    pub factor1: FactorMetricSpec,
    pub factor2: FactorMetricSpec,
    pub f1: WarpSpec,
    pub f2: WarpSpec,
}

impl ProductConfig {
    pub fn new(factor1: FactorMetricSpec, factor2: FactorMetricSpec, f1: WarpSpec, f2: WarpSpec) -> Result<Self> {
        if factor1.dim() == 0 || factor2.dim() == 0 {
            return Err(Error::InvalidConfig("n1 and n2 must be ≥ 1".into()));
        }
        f1.validate(factor1.dim())?;
        f2.validate(factor2.dim())?;
        Ok(ProductConfig { factor1, factor2, f1, f2 })
    }

    pub fn n1(&self) -> usize {
        self.factor1.dim()
    }

    pub fn n2(&self) -> usize {
        self.factor2.dim()
    }

    pub fn n(&self) -> usize {
        self.n1() + self.n2()
    }

    pub fn classification(&self) -> Classification {
        match (self.f1.is_constant(), self.f2.is_constant()) {
            (true, true) => Classification::Product,
            (false, false) => Classification::ProperDoublyWarped,
            _ => Classification::Warped,
        }
    }

    pub fn both_riemannian(&self) -> bool {
        self.factor1.is_riemannian() && self.factor2.is_riemannian()
    }

    /// Evaluates `F²` from separately supplied factor coordinates.
    pub fn f2_split(&self, x: &[Jet], u: &[Jet], y: &[Jet], v: &[Jet]) -> Result<Jet> {
        let f1sq = self.f1.f_sq(x)?;
        let f2sq = self.f2.f_sq(u)?;
        let a = self.factor1.f2(x, y)?;
        let b = self.factor2.f2(u, v)?;
        Ok(f2sq.mul_jet(&a).add_jet(&f1sq.mul_jet(&b)))
    }
}

impl FinslerFunction for ProductConfig {
    fn dim(&self) -> usize {
        self.n()
    }

    fn f2(&self, base: &[Jet], fiber: &[Jet]) -> Result<Jet> {
        let n1 = self.n1();
        if base.len() != self.n() || fiber.len() != self.n() {
            return Err(Error::Dimension(format!("product of dim {} given {} / {}", self.n(), base.len(), fiber.len())));
        }
        self.f2_split(&base[..n1], &base[n1..], &fiber[..n1], &fiber[n1..])
    }
}

impl ScalarField for ProductConfig {
    fn eval(&self, p: &PointJets) -> Result<Jet> {
        if p.x.len() != self.n1() || p.u.len() != self.n2() {
            return Err(Error::Dimension("sample does not match configuration dimensions".into()));
        }
        self.f2_split(&p.x, &p.u, &p.y, &p.v)
    }
}

/// Names of the built-in configurations.
pub const FIXTURES: [&str; 4] = ["FIX-1D", "FIX-E", "FIX-P", "FIX-R"];

/// One-line description of a built-in configuration.
pub fn fixture_description(name: &str) -> Option<&'static str> {
    Some(match name {
        "FIX-1D" => "n1=n2=1, Euclidean factors, f1²=1+x², f2²=1+u²",
        "FIX-E" => "n1=n2=2, Euclidean factors, f1²=1+(x¹)², f2²=1+(u¹)²",
        "FIX-P" => "n1=n2=2, Euclidean factors, f1=f2=1",
        "FIX-R" => "n1=2 Euclidean; n2=2 Randers (Euclidean base, b=(0.3,0)); f1²=1+(x¹)², f2²=1+(u¹)²",
        _ => return None,
    })
}

/// Built-in configuration by name (case-insensitive).
pub fn fixture(name: &str) -> Result<ProductConfig> {
    let e = FactorMetricSpec::euclidean;
    match name.to_ascii_uppercase().as_str() {
        "FIX-1D" => ProductConfig::new(e(1)?, e(1)?, WarpSpec::PolyQuadratic(vec![1.0]), WarpSpec::PolyQuadratic(vec![1.0])),
        "FIX-E" => ProductConfig::new(
            e(2)?,
            e(2)?,
            WarpSpec::PolyQuadratic(vec![1.0, 0.0]),
            WarpSpec::PolyQuadratic(vec![1.0, 0.0]),
        ),
        "FIX-P" => ProductConfig::new(e(2)?, e(2)?, WarpSpec::Constant(1.0), WarpSpec::Constant(1.0)),
        "FIX-R" => ProductConfig::new(
            e(2)?,
            FactorMetricSpec::randers(e(2)?, vec![0.3, 0.0])?,
            WarpSpec::PolyQuadratic(vec![1.0, 0.0]),
            WarpSpec::PolyQuadratic(vec![1.0, 0.0]),
        ),
        _ => Err(Error::UnknownFixture(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{jet_lift, CoordIndex};
    use crate::sample::TangentSample;

    fn value(cfg: &ProductConfig, p: &TangentSample) -> f64 {
        cfg.value_at(p).unwrap()
    }

    #[test]
    fn plain_product_adds_squares() {
        let cfg = fixture("FIX-P").unwrap();
        let p = TangentSample::new(vec![0.1, 0.2], vec![0.3, 0.4], vec![3.0, 0.0], vec![0.0, 4.0]).unwrap();
        assert!((value(&cfg, &p) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn warped_evaluation() {
        let e = FactorMetricSpec::euclidean;
        let cfg = ProductConfig::new(e(1).unwrap(), e(1).unwrap(), WarpSpec::Constant(1.0), WarpSpec::Constant(2.0)).unwrap();
        let p = TangentSample::new(vec![0.0], vec![0.0], vec![3.0], vec![4.0]).unwrap();
        assert!((value(&cfg, &p) - 52.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_fixture_value() {
        let cfg = fixture("FIX-1D").unwrap();
        let p = TangentSample::new(vec![0.0], vec![1.0], vec![1.0], vec![1.0]).unwrap();
        assert!((value(&cfg, &p) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn randers_rejects_long_covector() {
        let e = FactorMetricSpec::euclidean(2).unwrap();
        assert!(FactorMetricSpec::randers(e, vec![1.2, 0.0]).is_err());
    }

    #[test]
    fn randers_value() {
        let e = FactorMetricSpec::euclidean(2).unwrap();
        let r = FactorMetricSpec::randers(e, vec![0.3, 0.0]).unwrap();
        let cfg = ProductConfig::new(FactorMetricSpec::euclidean(1).unwrap(), r, WarpSpec::Constant(1.0), WarpSpec::Constant(1.0)).unwrap();
        let p = TangentSample::new(vec![0.0], vec![0.0, 0.0], vec![1.0], vec![3.0, 4.0]).unwrap();
        // 1 + (5 + 0.9)²
        assert!((value(&cfg, &p) - (1.0 + 5.9f64 * 5.9)).abs() < 1e-12);
    }

    #[test]
    fn quadratic_metric_positive_definiteness_is_checked() {
        let bad = FactorMetricSpec::riemannian_quadratic(vec![
            vec![Polynomial::constant(1.0), Polynomial::constant(2.0)],
            vec![Polynomial::constant(2.0), Polynomial::constant(1.0)],
        ])
        .unwrap();
        let cfg = ProductConfig::new(bad, FactorMetricSpec::euclidean(1).unwrap(), WarpSpec::Constant(1.0), WarpSpec::Constant(1.0)).unwrap();
        let p = TangentSample::new(vec![0.0, 0.0], vec![0.0], vec![1.0, 0.0], vec![1.0]).unwrap();
        assert!(matches!(cfg.value_at(&p), Err(Error::NotPositiveDefinite { minor: 2, .. })));
    }

    #[test]
    fn classification_of_fixtures() {
        assert_eq!(fixture("FIX-P").unwrap().classification(), Classification::Product);
        assert_eq!(fixture("FIX-E").unwrap().classification(), Classification::ProperDoublyWarped);
        assert!(fixture("FIX-X").is_err());
    }

    #[test]
    fn warp_derivative_through_jets() {
        let cfg = fixture("FIX-1D").unwrap();
        let p = TangentSample::new(vec![0.5], vec![1.0], vec![1.0], vec![1.0]).unwrap();
        // F² = (1+u²) y² + (1+x²) v² ; ∂x F² = 2x v² = 1
        let j = jet_lift(&cfg, &p, &[CoordIndex::x(0)], 1).unwrap();
        assert!((j.jet().coeffs()[1] - 1.0).abs() < 1e-12);
    }
}
