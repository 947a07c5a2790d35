//! hh-curvature of a product with flat factors: the flat-factor identity,
//! the scalar-flag fit and flag curvatures.

use dwfinsler::{fixture, DwGeometry, TangentSample};

fn main() -> dwfinsler::Result<()> {
    let cfg = fixture("FIX-E")?;
    let p = TangentSample::new(vec![0.0, 0.0], vec![1.0, 0.0], vec![0.8, -0.4], vec![0.3, 1.1])?;
    let d = DwGeometry::new(&cfg, &p)?;

    let hh = d.hh_curvature();
    println!("R_2^1_12 = {:.12}", hh.get(&[0, 1, 0, 1]));

    let r = d.flat_factor_residual()?;
    println!(
        "flat factor: κ = {:.6} residual {:.1e}; greek κ = {:?} residual {:?}",
        r.latin_coefficient, r.latin_residual, r.greek_coefficient, r.greek_residual
    );

    let fit = d.scalar_flag_residual()?;
    println!("scalar flag: λ = {:.12}, isotropy defect {:.1e}", fit.lambda, fit.defect);

    for edge in [[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0]] {
        println!("flag curvature along {edge:?}: {:.6}", d.flag_curvature(&edge)?);
    }

    let b = d.berwald_curvature();
    println!("Berwald curvature max {:.3e} (Riemannian factors, so the product is Berwald)", b.max_abs());
    Ok(())
}
