use clebsch::dynamics::integrate;
use clebsch::integrals::{compute_integrals, BodyState};
use clebsch::kummer::{certify, exact_form, DoublePointCase, KummerSurface, QuarticForm};
use clebsch::params::SystemParams;
use clebsch::scenario::{leaf_states, standard_params, standard_state};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn surface_036() -> KummerSurface {
    let q = SystemParams::new([1., 2., 3.], 1.0, 1.0).unwrap();
    KummerSurface::new(&q, 4.36, 4.08)
}

fn close(a: &[f64; 4], b: &[f64; 4], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

fn point() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-3.0..3.0f64)
}

fn form() -> impl Strategy<Value = QuarticForm<f64>> {
    (0.5..3.0f64, 0.5..3.0f64, 3.0..6.0f64, 2.0..8.0f64).prop_map(|(g1, g2, c3, c4)| {
        QuarticForm::from_params(&SystemParams::new([1.0, 1.0 + g1, 1.0 + g1 + g2], 1.0, 1.0).unwrap(), c3, c4)
    })
}

#[test]
fn quartic_examples() {
    let s = surface_036();
    assert_eq!(s.quartic_eval(&[0., 0., 0., 1.]), 0.0);
    assert_eq!(s.quartic_eval(&[1., 0., 0., 0.]), 0.0);
    assert_eq!(s.quartic_gradient(&[0., 0., 0., 1.]), [0.0; 4]);
    let d = s.form.d;
    let g = s.quartic_gradient(&[1.0 / d[0], 1.0 / d[1], 1.0 / d[2], 0.0]);
    assert!(g.iter().all(|v| v.abs() < 1e-12), "{g:?}");
}

#[test]
fn double_point_examples() {
    let rep = surface_036().double_points();
    let has = |want: [f64; 4]| rep.points.iter().any(|p| close(&p.coords, &want, 1e-12));
    assert!(has([1.0, -2.0, 1.0, 0.0]));
    assert!(has([0.64, 0.72, 0.0, 1.0]));
    for e in [[1., 0., 0., 0.], [0., 1., 0., 0.], [0., 0., 1., 0.], [0., 0., 0., 1.]] {
        assert!(has(e));
    }
    let s = surface_036();
    for p in &rep.points {
        let sc = s.form.scale(&p.coords);
        assert!(s.quartic_eval(&p.coords).abs() <= 1e-12 * sc);
        assert!(s.quartic_gradient(&p.coords).iter().all(|g| g.abs() <= 1e-12 * sc), "{p:?}");
    }
}

#[test]
fn quadratic_pair_discriminants_are_reported() {
    let rep = surface_036().double_points();
    assert_eq!(rep.quadratic_pairs.len(), 3);
    for q in &rep.quadratic_pairs {
        assert_eq!(q.real_roots == 2, q.line_discriminant >= 0.0);
        // the line discriminant and the closed form agree in sign
        assert!(q.discriminant * q.line_discriminant >= 0.0 || q.discriminant.abs() < 1e-12);
    }
    let n_pairs = rep.points.iter().filter(|p| p.case == DoublePointCase::QuadraticPair).count();
    assert_eq!(n_pairs, rep.quadratic_pairs.iter().map(|q| q.real_roots).sum::<usize>());
}

#[test]
fn rational_surfaces_are_certified_exactly() {
    let j = [rat(1, 1), rat(2, 1), rat(3, 1)];
    for (c3, c4) in [(rat(43, 10), rat(18, 5)), (rat(109, 25), rat(102, 25)), (rat(9, 2), rat(4, 1)), (rat(5, 1), rat(7, 1))] {
        let cert = certify(&exact_form(&j, &c3, &c4));
        assert!(cert.all_certified(), "{c3} {c4}");
    }
    let j = [rat(-1, 2), rat(1, 3), rat(4, 1)];
    let cert = certify(&exact_form(&j, &rat(3, 1), &rat(1, 7)));
    assert!(cert.all_certified());
}

#[test]
fn cover_images_of_many_states() {
    let q = SystemParams::new([1., 2., 3.], 1.0, 1.0).unwrap();
    for s in leaf_states(1000, 41, 1.5) {
        let iv = compute_integrals(&s, &q);
        let k = KummerSurface::new(&q, iv.c3, iv.c4);
        let x = k.state_to_kummer(&s, 1e-12).unwrap();
        assert!(k.relative_residual(&x) <= 1e-9);
        assert!(k.casimir_residual(&s).abs() <= 1e-10);
        let g = k.quartic_gradient(&x);
        assert!(g.iter().any(|v| v.abs() > 1e-8));
    }
}

#[test]
fn cover_is_blind_to_signs() {
    let q = standard_params();
    let s = standard_state();
    let iv = compute_integrals(&s, &q);
    let k = KummerSurface::new(&q, iv.c3, iv.c4);
    let x = k.state_to_kummer(&s, 1e-12).unwrap();
    for sg in [[-1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, -1.0, -1.0]] {
        // flipping K and p together keeps C1 = 0
        let t = BodyState::new(
            std::array::from_fn(|a| sg[a] * s.k[a]),
            std::array::from_fn(|a| sg[a] * s.p[a]),
        );
        assert_eq!(k.state_to_kummer(&t, 1e-12).unwrap(), x);
    }
    assert_eq!(k.state_to_kummer(&BodyState::new([0.; 3], [1., 0., 0.]), 1e-12).ok(), None);
}

#[test]
fn evolved_images_stay_on_the_surface() {
    let q = standard_params();
    let tr = integrate(&standard_state(), &q, 10.0, 1e-3).unwrap();
    let iv = compute_integrals(&tr.states[0], &q);
    let k = KummerSurface::new(&q, iv.c3, iv.c4);
    for s in &tr.states {
        let x = k.state_to_kummer(s, 1e-8).unwrap();
        assert!(k.relative_residual(&x) <= 1e-9);
    }
}

#[test]
fn origin_is_the_image_of_zero_k() {
    let q = SystemParams::new([1., 2., 3.], 1.0, 1.0).unwrap();
    let s = BodyState::new([0.; 3], [0.6, 0.8, 0.0]);
    let k = KummerSurface::new(&q, 4.36, 4.08);
    assert_eq!(k.state_to_kummer(&s, 1e-12).unwrap(), [0.0, 0.0, 0.0, 1.0]);
}

proptest! {
    #[test]
    fn quartic_is_homogeneous(f in form(), x in point()) {
        let v = f.eval(&x);
        for t in [2.0, -3.0, 1.0 / 7.0] {
            let y = x.map(|c| c * t);
            let w = f.eval(&y);
            prop_assert!((w - t.powi(4) * v).abs() <= 1e-12 * f.scale(&y).max(t.powi(4) * f.scale(&x)));
        }
    }

    #[test]
    fn euler_identity(f in form(), x in point()) {
        let g = f.gradient(&x);
        let lhs: f64 = (0..4).map(|i| g[i] * x[i]).sum();
        prop_assert!((lhs - 4.0 * f.eval(&x)).abs() <= 1e-12 * 4.0 * f.scale(&x));
    }

    #[test]
    fn gradient_matches_differences(f in form(), x in point()) {
        let g = f.gradient(&x);
        for i in 0..4 {
            let (mut a, mut b) = (x, x);
            a[i] += 1e-6;
            b[i] -= 1e-6;
            let fd = (f.eval(&a) - f.eval(&b)) / 2e-6;
            prop_assert!((fd - g[i]).abs() <= 1e-6 * f.scale(&x));
        }
    }

    #[test]
    fn float_double_points_are_singular(f in form()) {
        for p in clebsch::kummer::double_points_of(&f).points {
            let sc = f.scale(&p.coords);
            prop_assert!(f.eval(&p.coords).abs() <= 1e-12 * sc);
            prop_assert!(f.gradient(&p.coords).iter().all(|g| g.abs() <= 1e-10 * sc), "{p:?}");
        }
    }
}
