//! The almost complex structure on the slit tangent bundle: J² = −id,
//! Hermitian metric, the symplectic form, and the Nijenhuis tensor.
//! Kähler holds exactly when the bracket curvature vanishes.

use dwfinsler::frame::FrameVector;
use dwfinsler::lab::sample_with;
use dwfinsler::lab::Sampling;
use dwfinsler::lifted::{closedness_check, kahler_verdict};
use dwfinsler::{fixture, DwGeometry, TangentSample};

fn main() -> dwfinsler::Result<()> {
    let p = TangentSample::new(vec![0.4, -0.3], vec![0.7, 0.2], vec![1.1, -0.6], vec![0.5, 0.9])?;
    for name in ["FIX-P", "FIX-E", "FIX-R"] {
        let cfg = fixture(name)?;
        let d = DwGeometry::new(&cfg, &p)?;
        let n = d.n();
        let basis: Vec<FrameVector> = (0..2 * n).map(|a| FrameVector::basis(n, a)).collect();
        let mut herm = 0.0f64;
        for a in &basis {
            for b in &basis {
                herm = herm.max(d.hermitian_defect(a, b));
            }
        }
        let cl = closedness_check(&cfg, &p)?;
        let nj = d.nijenhuis();
        println!("{name}: Hermitian defect {herm:.1e}, |dΩ| {:.1e}, |Ω + dω| {:.1e}", cl.d_omega, cl.exactness);
        println!("    N_J max {:.3e}, closed form vs direct {:.1e}", nj.max_abs, nj.max_diff);

        let mut s = Sampling::with_defaults(7, n);
        s.count = 10;
        let v = kahler_verdict(&cfg, &sample_with(&s, cfg.n1(), cfg.n2())?, 1e-7, 1e-7)?;
        println!(
            "    Kähler: {} (max|R| {:.3e}, max|N_J| {:.3e}, consistent {})",
            v.kahler, v.max_bracket_curvature, v.max_nijenhuis, v.consistent
        );
    }
    Ok(())
}
