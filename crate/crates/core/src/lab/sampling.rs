use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::spec::{RunSpec, Sampling};
use crate::error::Result;
use crate::sample::TangentSample;

fn sphere(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let d: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = d.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return d.into_iter().map(|t| t * radius / norm).collect();
        }
    }
}

/// Samples `count` points: base coordinates uniform in the box, each fiber
/// block uniform on a sphere whose radius is uniform in the radius range.
pub fn sample_with(sampling: &Sampling, n1: usize, n2: usize) -> Result<Vec<TangentSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let [r0, r1] = sampling.radii;
    let radius = |rng: &mut ChaCha8Rng| if r0 == r1 { r0 } else { rng.random_range(r0..=r1) };
    (0..sampling.count)
        .map(|_| {
            let base: Vec<f64> = sampling
                .bounds
                .iter()
                .map(|&[lo, hi]| if lo == hi { lo } else { rng.random_range(lo..=hi) })
                .collect();
            let ry = radius(&mut rng);
            let y = sphere(&mut rng, n1, ry);
            let rv = radius(&mut rng);
            let v = sphere(&mut rng, n2, rv);
            TangentSample::new(base[..n1].to_vec(), base[n1..].to_vec(), y, v)
        })
        .collect()
}

pub fn sample_points(spec: &RunSpec) -> Result<Vec<TangentSample>> {
    sample_with(&spec.sampling, spec.config.n1(), spec.config.n2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::norm;

    #[test]
    fn deterministic_and_slit() {
        let mut s = Sampling::with_defaults(11, 4);
        s.count = 100;
        let a = sample_with(&s, 2, 2).unwrap();
        let b = sample_with(&s, 2, 2).unwrap();
        assert_eq!(a.len(), 100);
        assert_eq!(a, b);
        for p in &a {
            assert!(norm(&p.y) >= 0.5 - 1e-12 && norm(&p.y) <= 2.0 + 1e-12);
            assert!(norm(&p.v) >= 1e-6);
            assert!(p.x.iter().chain(&p.u).all(|c| c.abs() <= 1.0));
        }
        s.seed = 12;
        assert_ne!(sample_with(&s, 2, 2).unwrap(), a);
    }
}
