//! A user-supplied factor metric: the round sphere in stereographic
//! coordinates, warped against a Euclidean plane.
//!
//! Factor 1 has constant sectional curvature 1, so the Latin block of the
//! product hh-curvature is isotropic with coefficient `1 − κ`, where
//! `κ = ‖grad f2‖² / f1²`.

use dwfinsler::metric::WarpSpec;
use dwfinsler::{DwGeometry, FactorMetricSpec, ProductConfig, TangentSample};

fn main() -> dwfinsler::Result<()> {
    // F1² = 4|y|² / (1 + |x|²)²
    let sphere = FactorMetricSpec::custom("stereographic-sphere", 2, true, |x, y| {
        let one = x[0].scale(0.0).add_scalar(1.0);
        let conformal = one.add_jet(&x[0].mul_jet(&x[0])).add_jet(&x[1].mul_jet(&x[1]));
        let yy = y[0].mul_jet(&y[0]).add_jet(&y[1].mul_jet(&y[1]));
        yy.scale(4.0).div_jet(&conformal.mul_jet(&conformal))
    })?;
    let cfg = ProductConfig::new(
        sphere,
        FactorMetricSpec::euclidean(2)?,
        WarpSpec::Constant(1.0),
        WarpSpec::PolyQuadratic(vec![0.5, 0.0]),
    )?;

    for (x, u) in [([0.0, 0.0], [1.0, 0.0]), ([0.3, -0.4], [0.7, 0.2]), ([-0.8, 0.1], [-0.5, 0.9])] {
        let p = TangentSample::new(x.to_vec(), u.to_vec(), vec![0.6, -1.1], vec![0.9, 0.4])?;
        let d = DwGeometry::new(&cfg, &p)?;
        let k1 = d.factor1_scalar_flag()?;
        let kappa = d.flat_factor_residual()?.latin_coefficient;
        let fit = d.scalar_flag_residual()?;
        println!(
            "x={x:?} u={u:?}  K1 = {:.12} (defect {:.1e})  κ = {kappa:.6}  λ = {:.12}  |λ − (K1 − κ)| = {:.2e}",
            k1.lambda,
            k1.defect,
            fit.lambda,
            (fit.lambda - (k1.lambda - kappa)).abs()
        );
    }
    Ok(())
}
