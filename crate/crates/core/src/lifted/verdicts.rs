use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finsler::DwGeometry;
use crate::metric::ProductConfig;
use crate::sample::TangentSample;
use crate::tensor::Block::{Greek as Gk, Latin as Lt};

/// Smallest region accepted by the totally-geodesic verdicts.
pub const MIN_REGION_POINTS: usize = 20;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KahlerVerdict {
    pub kahler: bool,
    pub max_bracket_curvature: f64,
    pub max_nijenhuis: f64,
    /// Largest disagreement between closed-form and direct Nijenhuis tensors.
    pub max_path_diff: f64,
    /// `(max|N_J| ≤ tol') ⇔ (max|R| ≤ tol)`
    pub consistent: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TotallyGeodesicVerdicts {
    /// `F^c_ab = G^c_ab` on the region.
    pub vertical: bool,
    /// Cartan tensor and the mixed bracket-curvature blocks `R^γ_ij, R^s_iβ, R^γ_iβ, R^s_αβ` vanish.
    pub horizontal: bool,
    pub max_f_minus_g: f64,
    pub max_cartan: f64,
    pub max_mixed_bracket: f64,
    /// `R^s_ij` and `R^γ_αβ`, which the horizontal criterion does not include.
    pub max_unmixed_bracket: f64,
    /// `max |h(∇_{∂a} ∂b)|` for the Levi-Civita connection.
    pub koszul_vertical_leak: f64,
    /// `max |v(∇_{δa} δb)|` for the Levi-Civita connection.
    pub koszul_horizontal_leak: f64,
    /// Verdict agrees with invariance of the distribution under the Levi-Civita connection.
    pub vertical_consistent: bool,
    pub horizontal_consistent: bool,
}

fn engines(cfg: &ProductConfig, points: &[TangentSample]) -> Result<Vec<DwGeometry>> {
    points.par_iter().map(|p| DwGeometry::new(cfg, p)).collect()
}

/// Kähler verdict over a sampled region: Kähler iff every `R^a_bc` is within `tol`.
pub fn kahler_verdict(cfg: &ProductConfig, points: &[TangentSample], tol: f64, tol_prime: f64) -> Result<KahlerVerdict> {
    if points.is_empty() {
        return Err(Error::Precondition("empty region".into()));
    }
    let per: Vec<(f64, f64, f64)> = engines(cfg, points)?
        .par_iter()
        .map(|d| {
            let r = d.frame_brackets().0.max_abs();
            let nj = d.nijenhuis();
            (r, nj.max_abs.max(nj.direct.iter().fold(0.0, |m, w| m.max(w.max_abs()))), nj.max_diff)
        })
        .collect();
    let (r, nj, diff) = per.iter().fold((0.0f64, 0.0f64, 0.0f64), |a, b| (a.0.max(b.0), a.1.max(b.1), a.2.max(b.2)));
    Ok(KahlerVerdict {
        kahler: r <= tol,
        max_bracket_curvature: r,
        max_nijenhuis: nj,
        max_path_diff: diff,
        consistent: (nj <= tol_prime) == (r <= tol),
    })
}

/// Totally-geodesic verdicts for the vertical and horizontal distributions over a region.
pub fn totally_geodesic_verdicts(cfg: &ProductConfig, points: &[TangentSample], tol: f64) -> Result<TotallyGeodesicVerdicts> {
    if points.len() < MIN_REGION_POINTS {
        return Err(Error::Precondition(format!(
            "region needs at least {MIN_REGION_POINTS} points, got {}",
            points.len()
        )));
    }
    let per: Vec<[f64; 6]> = engines(cfg, points)?
        .par_iter()
        .map(|d| {
            let n = d.n();
            let (r, _) = d.frame_brackets();
            let mixed = [[Gk, Lt, Lt], [Lt, Lt, Gk], [Gk, Lt, Gk], [Lt, Gk, Gk]]
                .iter()
                .map(|p| r.block_max_abs(p))
                .fold(0.0, f64::max);
            let unmixed = r.block_max_abs(&[Lt, Lt, Lt]).max(r.block_max_abs(&[Gk, Gk, Gk]));
            let k = d.koszul_levi_civita();
            let mut vleak = 0.0f64;
            let mut hleak = 0.0f64;
            for a in 0..n {
                for b in 0..n {
                    vleak = vleak.max(k.get(n + a, n + b).expect("complete").horizontal_part().max_abs());
                    hleak = hleak.max(k.get(a, b).expect("complete").vertical_part().max_abs());
                }
            }
            [d.horizontal_minus_berwald(), d.cartan_tensor().max_abs(), mixed, unmixed, vleak, hleak]
        })
        .collect();
    let mx = per.iter().fold([0.0f64; 6], |mut a, b| {
        for i in 0..6 {
            a[i] = a[i].max(b[i]);
        }
        a
    });
    let vertical = mx[0] <= tol;
    let horizontal = mx[1] <= tol && mx[2] <= tol;
    Ok(TotallyGeodesicVerdicts {
        vertical,
        horizontal,
        max_f_minus_g: mx[0],
        max_cartan: mx[1],
        max_mixed_bracket: mx[2],
        max_unmixed_bracket: mx[3],
        koszul_vertical_leak: mx[4],
        koszul_horizontal_leak: mx[5],
        vertical_consistent: vertical == (mx[4] <= tol),
        horizontal_consistent: horizontal == (mx[5] <= tol),
    })
}
