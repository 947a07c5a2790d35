//! Taylor jets of F² seeded on a few coordinates, compared against the
//! Richardson-extrapolated finite-difference oracle.

use dwfinsler::finsler::eval_f2;
use dwfinsler::jets::{fd_partial_default, CoordIndex, MultiIndex};
use dwfinsler::{fixture, TangentSample};

fn main() -> dwfinsler::Result<()> {
    let cfg = fixture("FIX-R")?;
    let p = TangentSample::new(vec![0.4, -0.3], vec![0.7, 0.2], vec![1.1, -0.6], vec![0.5, 0.9])?;
    let seeds = [CoordIndex::x(0), CoordIndex::u(0), CoordIndex::v(0), CoordIndex::v(1)];
    let jet = eval_f2(&cfg, &p, &seeds, 4)?;
    println!("F² = {:.12}, {} stored coefficients", jet.value(), jet.coeffs().len());

    let probes: Vec<Vec<(CoordIndex, usize)>> = vec![
        vec![(CoordIndex::u(0), 1)],
        vec![(CoordIndex::v(0), 2)],
        vec![(CoordIndex::x(0), 1), (CoordIndex::v(1), 1)],
        vec![(CoordIndex::u(0), 1), (CoordIndex::v(0), 1), (CoordIndex::v(1), 1)],
        vec![(CoordIndex::v(0), 3)],
    ];
    for probe in probes {
        let mi = MultiIndex::new(probe)?;
        let ad = jet.partial(&mi)?;
        let fd = fd_partial_default(&cfg, &p, &mi)?;
        println!("{:<14} jet {ad:>16.10}  fd {fd:>16.10}  |Δ| {:.1e}", mi.to_string(), (ad - fd).abs());
    }
    // fourth order is beyond the oracle but still available from the jet
    let mi = MultiIndex::new([(CoordIndex::v(0), 2), (CoordIndex::v(1), 2)])?;
    println!("{:<14} jet {:>16.10}", mi.to_string(), jet.partial(&mi)?);
    Ok(())
}
