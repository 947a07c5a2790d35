use super::{MultiIndex, ScalarField};
use crate::error::{Error, Result};
use crate::sample::TangentSample;

/// Central-difference stencil `(offset multiple, weight)` for derivative order `k`, unscaled by `h^k`.
fn stencil(k: usize) -> &'static [(f64, f64)] {
    match k {
        1 => &[(1.0, 0.5), (-1.0, -0.5)],
        2 => &[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)],
        3 => &[(2.0, 0.5), (1.0, -1.0), (-1.0, 1.0), (-2.0, -0.5)],
        _ => &[(0.0, 1.0)],
    }
}

/// Default step for a derivative of total order `order` at coordinates of magnitude `scale`.
pub fn default_step(order: usize, scale: f64) -> f64 {
    let base = match order {
        0 | 1 => 1e-4,
        2 => 1e-3,
        _ => 1e-2,
    };
    base * (1.0 + scale.abs())
}

fn central(f: &dyn ScalarField, point: &TangentSample, multi: &MultiIndex, h: f64) -> Result<f64> {
    let (n1, n2) = (point.n1(), point.n2());
    let base = point.flat();
    let axes: Vec<(usize, &[(f64, f64)])> =
        multi.entries().iter().map(|&(c, k)| (c.flat(n1, n2), stencil(k))).collect();
    let mut acc = 0.0;
    let mut idx = vec![0usize; axes.len()];
    loop {
        let mut coords = base.clone();
        let mut w = 1.0;
        for (a, &(pos, st)) in axes.iter().enumerate() {
            let (off, wt) = st[idx[a]];
            coords[pos] += off * h;
            w *= wt;
        }
        let q = TangentSample::from_flat(n1, n2, &coords)?;
        acc += w * f.value_at(&q)?;

        let mut a = 0;
        loop {
            if a == axes.len() {
                return Ok(acc / h.powi(multi.total() as i32));
            }
            idx[a] += 1;
            if idx[a] < axes[a].1.len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// Central-difference estimate of a mixed partial with one Richardson step
/// (steps `h` and `h/2`). Total order must not exceed 3.
pub fn fd_partial(f: &dyn ScalarField, point: &TangentSample, multi: &MultiIndex, step: f64) -> Result<f64> {
    if multi.total() > 3 {
        return Err(Error::Precondition(format!(
            "finite differences limited to order 3, got {}",
            multi.total()
        )));
    }
    if !(step > 0.0) {
        return Err(Error::Precondition("step must be positive".into()));
    }
    for &(c, _) in multi.entries() {
        c.validate(point.n1(), point.n2())?;
    }
    if multi.total() == 0 {
        return f.value_at(point);
    }
    let d1 = central(f, point, multi, step)?;
    let d2 = central(f, point, multi, step / 2.0)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// [`fd_partial`] with the step chosen by [`default_step`] from the involved coordinates.
pub fn fd_partial_default(f: &dyn ScalarField, point: &TangentSample, multi: &MultiIndex) -> Result<f64> {
    let flat = point.flat();
    let scale = multi
        .entries()
        .iter()
        .map(|(c, _)| flat[c.flat(point.n1(), point.n2())].abs())
        .fold(0.0, f64::max);
    fd_partial(f, point, multi, default_step(multi.total(), scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{CoordIndex, PointJets};

    fn pt(x: f64, y: f64) -> TangentSample {
        TangentSample::new(vec![x], vec![0.0], vec![y], vec![1.0]).unwrap()
    }

    #[test]
    fn cubic_second_derivative() {
        let f = |p: &PointJets| Ok(&(&p.x[0] * &p.x[0]) * &p.x[0]);
        let m = MultiIndex::new([(CoordIndex::x(0), 2)]).unwrap();
        let d = fd_partial(&f, &pt(1.0, 1.0), &m, 1e-3).unwrap();
        assert!((d - 6.0).abs() < 1e-6);
    }

    #[test]
    fn constant_has_zero_derivative() {
        let f = |p: &PointJets| Ok(p.constant(3.0));
        let m = MultiIndex::new([(CoordIndex::x(0), 1), (CoordIndex::y(0), 1)]).unwrap();
        let d = fd_partial_default(&f, &pt(0.2, 1.0), &m).unwrap();
        assert!(d.abs() < 1e-10);
    }

    #[test]
    fn quadratic_first_derivative() {
        let f = |p: &PointJets| Ok(&p.y[0] * &p.y[0]);
        let m = MultiIndex::new([(CoordIndex::y(0), 1)]).unwrap();
        let d = fd_partial_default(&f, &pt(0.0, 2.0), &m).unwrap();
        assert!((d - 4.0).abs() < 1e-8);
    }

    #[test]
    fn third_order_mixed() {
        // ∂x ∂y² of x y³ = 6 y
        let f = |p: &PointJets| Ok(&p.x[0] * &(&(&p.y[0] * &p.y[0]) * &p.y[0]));
        let m = MultiIndex::new([(CoordIndex::x(0), 1), (CoordIndex::y(0), 2)]).unwrap();
        let d = fd_partial_default(&f, &pt(0.5, 1.5), &m).unwrap();
        assert!((d - 9.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_order_four() {
        let f = |p: &PointJets| Ok(p.x[0].clone());
        let m = MultiIndex::new([(CoordIndex::x(0), 4)]).unwrap();
        assert!(fd_partial(&f, &pt(0.0, 1.0), &m, 1e-3).is_err());
    }
}
