//! Evaluate the basic tensors of a built-in configuration at one point.
//!
//! ```bash
//! cargo run --example eval_fixture -- FIX-R
//! ```

use dwfinsler::connection::SprayPath;
use dwfinsler::metric::fixture_description;
use dwfinsler::{fixture, DwGeometry, TangentSample};

fn main() -> dwfinsler::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "FIX-E".into());
    let cfg = fixture(&name)?;
    println!("{name}: {}", fixture_description(&name).unwrap_or("?"));

    let (n1, n2) = (cfg.n1(), cfg.n2());
    let p = TangentSample::new(vec![0.4; n1], vec![0.7; n2], vec![1.1; n1], vec![-0.6; n2])?;
    let d = DwGeometry::new(&cfg, &p)?;
    println!("F² = {:.12}", d.f2_value());

    let (g, ginv) = d.fundamental_tensor();
    let n = d.n();
    println!("g (mixed blocks max {:.1e}):", g.mixed_max_abs());
    for a in 0..n {
        let row: Vec<String> = (0..n).map(|b| format!("{:>10.6}", g.get(&[a, b]))).collect();
        println!("  {}", row.join(" "));
    }
    let mut id = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let s: f64 = (0..n).map(|c| g.get(&[a, c]) * ginv.get(&[c, b])).sum();
            id = id.max((s - if a == b { 1.0 } else { 0.0 }).abs());
        }
    }
    println!("max|g g⁻¹ − I| = {id:.1e}");

    let spray = d.spray(SprayPath::Generic)?;
    println!("spray G^a = {:?}", (0..n).map(|a| spray.get(&[a])).collect::<Vec<_>>());
    println!("|C| max = {:.3e}, |I| max = {:.3e}", d.cartan_tensor().max_abs(), d.mean_cartan().max_abs());
    Ok(())
}
