use proptest::prelude::*;

use dwfinsler::connection::SprayPath;
use dwfinsler::finsler::eval_f2;
use dwfinsler::jets::{fd_partial_default, CoordIndex, Jet, JetSpace, MultiIndex};
use dwfinsler::lab::{fd_crosscheck, sample_with, Sampling};
use dwfinsler::metric::FIXTURES;
use dwfinsler::{fixture, DwGeometry, TangentSample};

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

/// A fiber block bounded away from the zero section.
fn fiber(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n).prop_filter("slit", |v| v.iter().map(|t| t * t).sum::<f64>() > 0.25)
}

fn sample_2x2() -> impl Strategy<Value = TangentSample> {
    (coords(2), coords(2), fiber(2), fiber(2)).prop_map(|(x, u, y, v)| TangentSample::new(x, u, y, v).unwrap())
}

fn fixture_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["FIX-E", "FIX-P", "FIX-R"])
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Polynomial jet `c0 + Σ c_k t_k + t_0 t_1 t_2` in three variables.
fn poly(space: &std::sync::Arc<JetSpace>, at: &[f64], c: &[f64]) -> Jet {
    let vars: Vec<Jet> = (0..3).map(|k| Jet::variable(space, k, at[k])).collect();
    let mut acc = Jet::constant(space, c[0]);
    for k in 0..3 {
        acc.axpy(c[k + 1], &vars[k]);
    }
    acc.add_jet(&vars[0].mul_jet(&vars[1]).mul_jet(&vars[2]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixed_partials_do_not_depend_on_seed_order(name in fixture_name(), p in sample_2x2()) {
        let cfg = fixture(name).unwrap();
        let a = [CoordIndex::x(0), CoordIndex::u(1), CoordIndex::v(0)];
        let b = [CoordIndex::v(0), CoordIndex::x(0), CoordIndex::u(1)];
        let ja = eval_f2(&cfg, &p, &a, 3).unwrap();
        let jb = eval_f2(&cfg, &p, &b, 3).unwrap();
        for seq in [&a[..], &a[..2], &[a[2], a[2]], &[a[2], a[0], a[2]]] {
            let mi = MultiIndex::from_sequence(seq).unwrap();
            let mut rev = seq.to_vec();
            rev.reverse();
            prop_assert_eq!(&mi, &MultiIndex::from_sequence(&rev).unwrap());
            prop_assert!(close(ja.partial(&mi).unwrap(), jb.partial(&mi).unwrap(), 1e-13));
        }
    }

    #[test]
    fn product_rule_holds_under_truncation(
        at in coords(3),
        c1 in prop::collection::vec(-2.0f64..2.0, 4),
        c2 in prop::collection::vec(-2.0f64..2.0, 4),
        k in 0usize..3,
    ) {
        let space = JetSpace::get(3, 4).unwrap();
        let f = poly(&space, &at, &c1);
        let g = poly(&space, &at, &c2).exp();
        let lhs = f.mul_jet(&g).d(k);
        let rhs = f.d(k).mul_jet(&g).add_jet(&f.mul_jet(&g.d(k)));
        for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            prop_assert!(close(*a, *b, 1e-12), "{a} vs {b}");
        }
        // quotient and square root compose back to the identity
        let h = g.add_scalar(1.0);
        let back = f.div_jet(&h).unwrap().mul_jet(&h);
        let sq = h.sqrt().unwrap();
        for ((a, b), (s, t)) in back.coeffs().iter().zip(f.coeffs()).zip(sq.mul_jet(&sq).coeffs().iter().zip(h.coeffs())) {
            prop_assert!(close(*a, *b, 1e-11));
            prop_assert!(close(*s, *t, 1e-11));
        }
    }

    #[test]
    fn jets_agree_with_finite_differences(name in fixture_name(), p in sample_2x2(), i in 0usize..8, j in 0usize..8) {
        let cfg = fixture(name).unwrap();
        let (ci, cj) = (CoordIndex::from_flat(2, 2, i), CoordIndex::from_flat(2, 2, j));
        let jet = eval_f2(&cfg, &p, &[ci, cj], 3).unwrap();
        for seq in [vec![ci], vec![ci, cj], vec![ci, cj, cj]] {
            let mi = MultiIndex::from_sequence(&seq).unwrap();
            let ad = jet.partial(&mi).unwrap();
            let fd = fd_partial_default(&cfg, &p, &mi).unwrap();
            prop_assert!((ad - fd).abs() / ad.abs().max(1.0) <= 1e-5, "{mi}: {ad} vs {fd}");
        }
    }

    #[test]
    fn fiber_homogeneity(name in fixture_name(), p in sample_2x2(), lambda in 0.3f64..3.0) {
        let cfg = fixture(name).unwrap();
        let d = DwGeometry::with_order(&cfg, &p, 3).unwrap();
        let q = p.scale_fiber(lambda).unwrap();
        let e = DwGeometry::with_order(&cfg, &q, 3).unwrap();
        prop_assert!(close(e.f2_value(), lambda * lambda * d.f2_value(), 1e-12));
        let (g, h) = (d.fundamental_tensor().0, e.fundamental_tensor().0);
        prop_assert!(g.max_abs_diff(&h) <= 1e-12 * (1.0 + g.max_abs()));
        let (s, t) = (d.spray(SprayPath::Generic).unwrap(), e.spray(SprayPath::Generic).unwrap());
        for a in 0..4 {
            prop_assert!(close(t.get(&[a]), lambda * lambda * s.get(&[a]), 1e-11));
        }
        let (n, m) = (d.nonlinear_connection(), e.nonlinear_connection());
        for a in 0..4 {
            for b in 0..4 {
                prop_assert!(close(m.get(&[a, b]), lambda * n.get(&[a, b]), 1e-11));
            }
        }
    }

    #[test]
    fn sampling_is_a_function_of_the_seed(seed in any::<u64>(), count in 1usize..30) {
        let mut s = Sampling::with_defaults(seed, 4);
        s.count = count;
        let a = sample_with(&s, 2, 2).unwrap();
        prop_assert_eq!(&a, &sample_with(&s, 2, 2).unwrap());
        prop_assert_eq!(a.len(), count);
        // a longer run extends the shorter one
        s.count = count + 3;
        prop_assert_eq!(&sample_with(&s, 2, 2).unwrap()[..count], &a[..]);
    }
}

#[test]
fn fd_oracle_covers_every_fixture() {
    for name in FIXTURES {
        let cfg = fixture(name).unwrap();
        let (n1, n2) = (cfg.n1(), cfg.n2());
        let p = TangentSample::new(vec![0.3; n1], vec![-0.2; n2], vec![0.9; n1], vec![-1.3; n2]).unwrap();
        let (r, label) = fd_crosscheck(&cfg, &p).unwrap();
        assert!(r <= 1e-5, "{name}: {r} at {label}");
    }
}
