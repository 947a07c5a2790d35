//! Cartan, mean Cartan and Matsumoto torsion of a product with a Randers
//! factor, and the contraction of the mixed Matsumoto blocks.

use dwfinsler::{fixture, DwGeometry, TangentSample};
use dwfinsler::tensor::Block::{Greek, Latin};

fn main() -> dwfinsler::Result<()> {
    let cfg = fixture("FIX-R")?;
    let p = TangentSample::new(vec![0.4, -0.3], vec![0.7, 0.2], vec![1.1, -0.6], vec![0.5, 0.9])?;
    let d = DwGeometry::new(&cfg, &p)?;

    let c = d.cartan_tensor();
    println!("Cartan: mixed {:.1e}, Latin {:.1e}, Greek {:.3e}", c.mixed_max_abs(), c.block_max_abs(&[Latin; 3]), c.block_max_abs(&[Greek; 3]));

    let h = d.angular_metric();
    let y = p.fiber();
    let hy: f64 = (0..d.n()).map(|a| (0..d.n()).map(|b| h.get(&[a, b]) * y[b]).sum::<f64>().abs()).fold(0.0, f64::max);
    println!("angular metric annihilates the flagpole: max|h y| = {hy:.1e}");

    let m = d.matsumoto_torsion()?;
    println!(
        "Matsumoto torsion: Latin {:.1e}, Greek {:.3e}, mixed {:.3e}",
        m.block_max_abs(&[Latin; 3]),
        m.block_max_abs(&[Greek; 3]),
        m.mixed_max_abs()
    );

    let mc = d.matsumoto_contraction()?;
    println!("mixed Matsumoto contraction: residual {:.2e}, side magnitude {:.3e}", mc.residual(), mc.magnitude());
    Ok(())
}
