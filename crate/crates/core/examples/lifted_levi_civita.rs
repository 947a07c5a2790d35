//! Levi-Civita connection of the lifted metric on the slit tangent bundle:
//! the Koszul table, its closed-form blocks and the induced vertical connection.

use dwfinsler::metric::FIXTURES;
use dwfinsler::{fixture, DwGeometry, TangentSample};

fn main() -> dwfinsler::Result<()> {
    for name in FIXTURES {
        let cfg = fixture(name)?;
        let (n1, n2) = (cfg.n1(), cfg.n2());
        let p = TangentSample::new(vec![0.4; n1], vec![0.7; n2], vec![1.1; n1], vec![-0.6; n2])?;
        let d = DwGeometry::new(&cfg, &p)?;

        let r = d.levi_civita_residuals(d.koszul_levi_civita());
        println!("{name}: metric compatibility {:.1e}, torsion {:.1e}", r.metric_compatibility, r.torsion);
        for b in d.levi_civita_discrepancy()? {
            println!("    {:<12} closed form vs Koszul {:.2e}", b.block, b.max_abs_diff);
        }
        let iv = d.induced_vertical_connection();
        println!(
            "    induced vertical: vs F {:.2e}, vs C {:.2e}, mixed {:.2e}",
            iv.horizontal_rows, iv.vertical_rows, iv.mixed_vertical
        );
    }
    Ok(())
}
