//! The Vaisman connection of the vertical foliation and the Reinhart test.
//!
//! With Riemannian factors the transversal metric is parallel along leaves.
//! A Randers factor breaks this; the defect is reported with the frame triple
//! where it is largest.

use dwfinsler::frame::FrameVector;
use dwfinsler::lab::frame_label;
use dwfinsler::{fixture, DwGeometry, TangentSample};

fn main() -> dwfinsler::Result<()> {
    for name in ["FIX-E", "FIX-R"] {
        let cfg = fixture(name)?;
        let p = TangentSample::new(vec![0.4, -0.3], vec![0.7, 0.2], vec![1.1, -0.6], vec![0.5, 0.9])?;
        let d = DwGeometry::new(&cfg, &p)?;
        let n = d.n();

        let ax = d.vaisman_axioms(&d.vaisman_connection());
        println!(
            "{name}: Vaisman axioms: distribution {:.1e}, metricity {:.1e}, torsion {:.1e}",
            ax.distribution,
            ax.metric_vertical.max(ax.metric_horizontal),
            ax.torsion_vertical.max(ax.torsion_horizontal)
        );
        println!(
            "    induced-vs-Vaisman gap {:.3e}, max|F − G| {:.3e}",
            d.structural_bundle_gap(),
            d.horizontal_minus_berwald()
        );

        let mut worst = (0.0f64, (n, 0, 0), 0.0f64);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let x = FrameVector::vertical(n, a);
                    let r = d.reinhart_defect(&x, &FrameVector::horizontal(n, b), &FrameVector::horizontal(n, c))?;
                    if r.covariant.abs() > worst.0 {
                        worst = (r.covariant.abs(), (n + a, b, c), (r.covariant - r.cartan_identity).abs());
                    }
                }
            }
        }
        let (a, b, c) = worst.1;
        let l = |k| frame_label(d.n1(), n, k);
        println!(
            "    Reinhart defect {:.3e} at X={}, Y={}, Z={} (Cartan identity gap {:.1e})",
            worst.0,
            l(a),
            l(b),
            l(c),
            worst.2
        );
    }
    Ok(())
}
