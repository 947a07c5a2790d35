//! Totally-geodesic verdicts for the vertical and horizontal distributions
//! over a sampled region, cross-checked against the Levi-Civita connection.
//!
//! The horizontal criterion looks at the Cartan tensor and the mixed blocks of
//! the bracket curvature only. On a product with a curved Riemannian factor the
//! unmixed block `R^s_ij` is nonzero, the Levi-Civita connection moves
//! horizontal fields off the horizontal distribution, and the criterion's
//! verdict disagrees with that. `horizontal_consistent` reports the mismatch.

use dwfinsler::lab::{sample_with, Sampling};
use dwfinsler::lifted::totally_geodesic_verdicts;
use dwfinsler::metric::{PolyTerm, Polynomial, WarpSpec};
use dwfinsler::{fixture, FactorMetricSpec, ProductConfig};

fn conformal() -> Polynomial {
    let t = |powers: [u32; 2]| PolyTerm { coeff: 1.0, powers: powers.to_vec() };
    Polynomial(vec![t([0, 0]), t([2, 0]), t([0, 2])])
}

fn main() -> dwfinsler::Result<()> {
    // F1² = (1 + |x|²) |y|², a non-flat conformal metric
    let curved = FactorMetricSpec::riemannian_quadratic(vec![
        vec![conformal(), Polynomial::default()],
        vec![Polynomial::default(), conformal()],
    ])?;
    let product = ProductConfig::new(curved, FactorMetricSpec::euclidean(2)?, WarpSpec::Constant(1.0), WarpSpec::Constant(1.0))?;

    let mut sampling = Sampling::with_defaults(5, 4);
    sampling.count = 20;
    let configs = [
        ("FIX-P".to_string(), fixture("FIX-P")?),
        ("FIX-E".to_string(), fixture("FIX-E")?),
        ("FIX-R".to_string(), fixture("FIX-R")?),
        ("curved product".to_string(), product),
    ];
    for (name, cfg) in &configs {
        let points = sample_with(&sampling, cfg.n1(), cfg.n2())?;
        let t = totally_geodesic_verdicts(cfg, &points, 1e-8)?;
        println!(
            "{name:<15} vertical {:<5} (max|F − G| {:.2e}, consistent {})",
            t.vertical, t.max_f_minus_g, t.vertical_consistent
        );
        println!(
            "{:<15} horizontal {:<5} (max|C| {:.2e}, mixed |R| {:.2e}, unmixed |R| {:.2e}, LC leak {:.2e}, consistent {})",
            "", t.horizontal, t.max_cartan, t.max_mixed_bracket, t.max_unmixed_bracket, t.koszul_horizontal_leak, t.horizontal_consistent
        );
    }
    Ok(())
}
