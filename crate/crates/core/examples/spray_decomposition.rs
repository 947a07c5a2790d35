//! The spray of the product computed from its own fundamental tensor and
//! assembled from the factor sprays, and the 1D hand values.

use dwfinsler::connection::SprayPath;
use dwfinsler::metric::FIXTURES;
use dwfinsler::{fixture, DwGeometry, TangentSample};

fn main() -> dwfinsler::Result<()> {
    for name in FIXTURES {
        let cfg = fixture(name)?;
        let (n1, n2) = (cfg.n1(), cfg.n2());
        let p = TangentSample::new(vec![0.4; n1], vec![-0.3; n2], vec![1.1; n1], vec![0.5; n2])?;
        let d = DwGeometry::new(&cfg, &p)?;
        let generic = d.spray(SprayPath::Generic)?;
        let split = d.spray(SprayPath::ProductDecomposed)?;
        let nl = d.nonlinear_connection();
        let nl_closed = d.nonlinear_connection_closed()?;
        println!(
            "{name:<7} spray gap {:.2e}   nonlinear connection gap {:.2e}",
            generic.max_abs_diff(&split),
            nl.max_abs_diff(&nl_closed)
        );
    }

    // x = 0, u = 1, y = v = 1 on the one-dimensional product
    let cfg = fixture("FIX-1D")?;
    let d = DwGeometry::new(&cfg, &TangentSample::new(vec![0.0], vec![1.0], vec![1.0], vec![1.0])?)?;
    let s = d.spray(SprayPath::ProductDecomposed)?;
    println!("FIX-1D at x=0, u=1, y=v=1: G¹ = {:.12}, G² = {:.12}", s.get(&[0]), s.get(&[1]));
    Ok(())
}
