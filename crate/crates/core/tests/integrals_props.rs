use clebsch::integrals::{
    compute_hl, compute_integrals, kirchhoff_rhs, lie_poisson_bracket, pencil_field, BodyState, FiniteDifference,
    Integral, Observable,
};
use clebsch::params::SystemParams;
use clebsch::scenario::leaf_states;
use proptest::prelude::*;

fn params() -> SystemParams {
    SystemParams::new([1., 2., 3.], 1.0, 1.0).unwrap()
}

fn state() -> impl Strategy<Value = BodyState> {
    prop::array::uniform6(-2.0..2.0f64).prop_map(BodyState::from_array)
}

fn pencil() -> impl Strategy<Value = SystemParams> {
    (-5.0..5.0f64, 0.2..3.0f64, 0.2..3.0f64, -2.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(a, g1, g2, l, lp)| SystemParams::new([a, a + g1, a + g1 + g2], l, lp).unwrap())
        .prop_filter("physical member", |q| {
            q.n().iter().chain(q.n_prime().iter()).all(|v| v.abs() > 0.05)
        })
}

/// An arbitrary quadratic form used as a test observable.
struct Quadratic([[f64; 6]; 6]);

impl Observable for Quadratic {
    fn value(&self, s: &BodyState) -> f64 {
        let x = s.to_array();
        (0..6).map(|i| (0..6).map(|k| x[i] * self.0[i][k] * x[k]).sum::<f64>()).sum()
    }
    fn gradient(&self, s: &BodyState) -> BodyState {
        let x = s.to_array();
        BodyState::from_array(std::array::from_fn(|i| (0..6).map(|k| (self.0[i][k] + self.0[k][i]) * x[k]).sum()))
    }
}

fn gnorm(o: &dyn Observable, s: &BodyState) -> f64 {
    o.gradient(s).norm()
}

#[test]
fn integral_examples() {
    let q = params();
    let iv = compute_integrals(&BodyState::new([0.; 3], [1., 0., 0.]), &q);
    assert_eq!((iv.c1, iv.c2, iv.c3, iv.c4), (0.0, 1.0, 5.0, 6.0));
    let iv = compute_integrals(&BodyState::new([0., 0., 1.], [1., 0., 0.]), &q);
    assert_eq!((iv.c1, iv.c2, iv.c3, iv.c4), (0.0, 1.0, 6.0, 9.0));
    let iv = compute_integrals(&BodyState::new([0.; 3], [0.6, 0.8, 0.]), &q);
    assert!((iv.c3 - 4.36).abs() < 1e-14 && (iv.c4 - 4.08).abs() < 1e-14);
}

#[test]
fn hamiltonian_examples() {
    let q = SystemParams::new([1., 2., 3.], 0.0, 0.5).unwrap();
    let ph = q.derive_physical().unwrap();
    let s = BodyState::new([0.; 3], [1., 0., 0.]);
    let (h, _) = compute_hl(&s, &ph);
    assert!((h - 3.0).abs() < 1e-14);
    let iv = compute_integrals(&s, &q);
    assert!((h - (q.lambda() * iv.c3 + q.lambda_prime() * iv.c4)).abs() < 1e-14);
    assert_eq!(compute_hl(&BodyState::zero(), &ph), (0.0, 0.0));
}

#[test]
fn bracket_of_coordinates() {
    let s = BodyState::new([0.3, -1.2, 0.7], [0.1, 0.5, -0.4]);
    let k1 = FiniteDifference { f: |s: &BodyState| s.k.x, step: 1e-6 };
    let k2 = FiniteDifference { f: |s: &BodyState| s.k.y, step: 1e-6 };
    assert!((lie_poisson_bracket(&k1, &k2, &s) - 0.7).abs() < 1e-9);
}

#[test]
fn field_examples() {
    let q = params();
    let eq = BodyState::new([0.; 3], [1., 0., 0.]);
    assert_eq!(pencil_field(&eq, &q), BodyState::zero());
    let ph = q.derive_physical().unwrap();
    assert_eq!(kirchhoff_rhs(&eq, &ph), BodyState::zero());
    let mut ph1 = ph;
    ph1.inertia = [1.0; 3];
    assert_eq!(kirchhoff_rhs(&BodyState::new([1.; 3], [0.; 3]), &ph1).k, BodyState::zero().k);
}

#[test]
fn casimirs_annihilate_at_many_states() {
    let q = params();
    let ph = q.derive_physical().unwrap();
    let mut r = clebsch::scenario::rng(11);
    let rand_q = Quadratic(std::array::from_fn(|_| std::array::from_fn(|_| rand::Rng::random_range(&mut r, -1.0..1.0))));
    let others: Vec<Box<dyn Observable>> = vec![
        Box::new(Integral::C3(q)),
        Box::new(Integral::C4(q)),
        Box::new(Integral::H(ph)),
        Box::new(Integral::L(ph)),
        Box::new(rand_q),
    ];
    for s in leaf_states(1000, 3, 2.0) {
        for c in [Integral::C1, Integral::C2] {
            for g in &others {
                let v = lie_poisson_bracket(&c, g.as_ref(), &s);
                let scale = gnorm(&c, &s) * gnorm(g.as_ref(), &s) * s.norm().max(1.0);
                assert!(v.abs() <= 1e-12 * scale, "{v:e} at {s:?}");
            }
        }
    }
}

#[test]
fn c3_c4_commute_at_many_states() {
    let q = params();
    for s in leaf_states(1000, 4, 2.0) {
        let (a, b) = (Integral::C3(q), Integral::C4(q));
        let v = lie_poisson_bracket(&a, &b, &s);
        assert!(v.abs() <= 1e-12 * gnorm(&a, &s) * gnorm(&b, &s), "{v:e}");
    }
}

#[test]
fn field_matches_kirchhoff_at_many_states() {
    let q = params();
    let ph = q.derive_physical().unwrap();
    for s in leaf_states(1000, 5, 2.0) {
        let (u, v) = (pencil_field(&s, &q).to_array(), kirchhoff_rhs(&s, &ph).to_array());
        let scale = u.iter().chain(v.iter()).fold(1.0_f64, |m, x| m.max(x.abs()));
        for i in 0..6 {
            assert!((u[i] - v[i]).abs() <= 1e-12 * scale);
        }
    }
}

proptest! {
    #[test]
    fn bracket_is_antisymmetric(s in state(), q in pencil()) {
        let ph = q.derive_physical().unwrap();
        let obs = [Integral::C1, Integral::C2, Integral::C3(q), Integral::C4(q), Integral::H(ph), Integral::L(ph)];
        for f in &obs {
            for g in &obs {
                let (a, b) = (lie_poisson_bracket(f, g, &s), lie_poisson_bracket(g, f, &s));
                prop_assert!((a + b).abs() <= 1e-14 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn all_pairs_commute(s in state(), q in pencil()) {
        let ph = q.derive_physical().unwrap();
        let obs = [Integral::C1, Integral::C2, Integral::C3(q), Integral::C4(q), Integral::H(ph), Integral::L(ph)];
        for f in &obs {
            for g in &obs {
                let v = lie_poisson_bracket(f, g, &s);
                prop_assert!(v.abs() <= 1e-12 * gnorm(f, &s) * gnorm(g, &s) * s.norm().max(1.0), "{v:e}");
            }
        }
    }

    #[test]
    fn gradients_match_differences(s in state(), q in pencil()) {
        let ph = q.derive_physical().unwrap();
        let obs = [Integral::C1, Integral::C2, Integral::C3(q), Integral::C4(q), Integral::H(ph), Integral::L(ph)];
        for o in &obs {
            let fd = FiniteDifference { f: |x: &BodyState| o.value(x), step: 1e-6 };
            let (g, h) = (o.gradient(&s).to_array(), fd.gradient(&s).to_array());
            let scale = g.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
            for i in 0..6 {
                prop_assert!((g[i] - h[i]).abs() <= 1e-6 * scale, "{o:?} {i}: {} vs {}", g[i], h[i]);
            }
        }
    }

    #[test]
    fn field_matches_kirchhoff(s in state(), q in pencil()) {
        let ph = q.derive_physical().unwrap();
        let (u, v) = (pencil_field(&s, &q).to_array(), kirchhoff_rhs(&s, &ph).to_array());
        let scale = u.iter().chain(v.iter()).fold(1.0_f64, |m, x| m.max(x.abs()));
        for i in 0..6 {
            prop_assert!((u[i] - v[i]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn pencil_is_linear(s in state(), q in pencil()) {
        let q2 = q.with_pencil(2.0 * q.lambda(), 2.0 * q.lambda_prime()).unwrap();
        let (u, v) = (pencil_field(&s, &q).to_array(), pencil_field(&s, &q2).to_array());
        for i in 0..6 {
            prop_assert!((v[i] - 2.0 * u[i]).abs() <= 1e-14 * (1.0 + v[i].abs()));
        }
    }

    #[test]
    fn integrals_are_constant_along_the_field(s in state(), q in pencil()) {
        let ph = q.derive_physical().unwrap();
        let v = pencil_field(&s, &q);
        let obs = [Integral::C1, Integral::C2, Integral::C3(q), Integral::C4(q), Integral::H(ph), Integral::L(ph)];
        for o in &obs {
            let d = o.gradient(&s).dot(&v);
            prop_assert!(d.abs() <= 1e-12 * o.gradient(&s).norm() * v.norm().max(1.0), "{o:?}: {d:e}");
        }
    }
}

/// `L` with inertia products as the `p`-weights, as it is sometimes quoted.
#[test]
fn inertia_weighted_variant_is_not_conserved() {
    let q = params();
    let ph = q.derive_physical().unwrap();
    let i = ph.inertia;
    let s = leaf_states(1, 9, 1.0)[0];
    let v = pencil_field(&s, &q);
    let grad = BodyState::from_array(std::array::from_fn(|a| {
        if a < 3 {
            2.0 * s.k[a] / (ph.mass[a] * i[a])
        } else {
            let b = a - 3;
            -2.0 * s.p[b] / (i[(b + 1) % 3] * i[(b + 2) % 3])
        }
    }));
    assert!(grad.dot(&v).abs() > 1e-3);
}
