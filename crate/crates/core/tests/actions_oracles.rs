use clebsch::actions::{
    action_along, actions, default_cycles, period_matrix, singular_quadrature, verify_action_derivatives, DEFAULT_TOL,
    DEFAULT_W,
};
use clebsch::error::Error;
use clebsch::integrals::compute_integrals;
use clebsch::linearize::{curve_from_c, HyperellipticCurve};
use clebsch::params::SystemParams;
use clebsch::scenario::{leaf_states, standard_params};
use num_complex::Complex64;

/// Midpoint rule after `x = a + (b - a) sin^2(theta)`; independent of the
/// adaptive scheme in the library.
fn oracle<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    (0..n)
        .map(|k| {
            let t = (k as f64 + 0.5) * h;
            let (s, c) = t.sin_cos();
            f(a + (b - a) * s * s) * 2.0 * (b - a) * s * c * h
        })
        .sum()
}

/// `(j1..j3, j4, j5)` of a curve with real roots.
fn nodes(c: &HyperellipticCurve) -> ([f64; 3], f64, f64) {
    let (j4, j5) = c.roots.real().unwrap();
    (c.j, j4, j5)
}

fn generic_levels(n: usize) -> Vec<(f64, f64)> {
    let q = standard_params();
    leaf_states(4 * n, 77, 1.0)
        .into_iter()
        .map(|s| compute_integrals(&s, &q))
        .map(|iv| (iv.c3, iv.c4))
        .filter(|&(c3, c4)| {
            let c = curve_from_c(&q, c3, c4);
            !c.degenerate && c.roots.is_real() && {
                let v: Vec<f64> = c.real_branch_points().iter().map(|b| b.value).collect();
                v.windows(2).all(|w| w[1] - w[0] > 1e-2)
            }
        })
        .take(n)
        .collect()
}

#[test]
fn quadrature_examples() {
    let r = singular_quadrature(|x| 1.0 / (x - 1.0).sqrt(), 1.0, 2.0, DEFAULT_TOL).unwrap();
    assert!((r.value - 2.0).abs() <= 1e-10);
    let r = singular_quadrature(|x| 1.0 / (x * (1.0 - x)).sqrt(), 0.0, 1.0, DEFAULT_TOL).unwrap();
    assert!((r.value - std::f64::consts::PI).abs() <= 1e-10);
    let r = singular_quadrature(|x| x, 0.0, 1.0, DEFAULT_TOL).unwrap();
    assert!((r.value - 0.5).abs() <= 1e-10);
}

#[test]
fn closed_form_actions() {
    let q = SystemParams::new([1., 2., 3.], 1.0, 1.0).unwrap();
    let a = actions(&curve_from_c(&q, 5.0, 6.0), DEFAULT_TOL).unwrap();
    assert!((a.a1 + 4.0).abs() <= 1e-8);
    assert!((a.a2 - 4.0 * (2f64.sqrt() - 1.0)).abs() <= 1e-8);
}

#[test]
fn degenerate_curves_are_refused() {
    let q = SystemParams::new([1., 2., 3.], 1.0, 1.0).unwrap();
    let c = curve_from_c(&q, 5.0, 6.0);
    let cyc = default_cycles(&c).unwrap();
    assert!(matches!(period_matrix(&c, &cyc, DEFAULT_W, DEFAULT_TOL), Err(Error::DegenerateCurve(_))));
    assert!(verify_action_derivatives(&q, 5.0, 6.0, 1e-5, DEFAULT_TOL).is_err());
    // j4 = j5 = 2 = j2: three branch points in one place
    assert!(actions(&curve_from_c(&q, 4.0, 4.0), DEFAULT_TOL).is_err());
}

#[test]
fn period_entries_match_the_oracle() {
    let q = standard_params();
    for (c3, c4) in generic_levels(3) {
        let c = curve_from_c(&q, c3, c4);
        let cyc = default_cycles(&c).unwrap();
        let pm = period_matrix(&c, &cyc, DEFAULT_W, 1e-12).unwrap();
        let (j, j4, j5) = nodes(&c);
        for (col, cy) in cyc.iter().enumerate() {
            let (a, b) = (cy.from.value, cy.to.value);
            let mid = 0.5 * (a + b);
            let r2 = |x: f64| (j[0] - x) * (j[1] - x) * (j[2] - x) * (j4 - x) * (j5 - x);
            let psi_sign = ((mid - j4) * (mid - j5)).signum();
            for (row, w) in DEFAULT_W.iter().enumerate() {
                let v = 2.0 / w * oracle(|x| x.powi(row as i32) / r2(x).abs().sqrt(), a, b, 200_000);
                let want = if r2(mid) < 0.0 {
                    Complex64::new(0.0, -psi_sign * v)
                } else {
                    Complex64::new(psi_sign * v, 0.0)
                };
                assert!((pm.psi[row][col] - want).norm() <= 1e-7, "{:?} vs {want:?}", pm.psi[row][col]);
            }
        }
        assert!(pm.det().norm() > 0.0);
    }
}

#[test]
fn actions_match_the_oracle() {
    let q = standard_params();
    for (c3, c4) in generic_levels(3) {
        let c = curve_from_c(&q, c3, c4);
        let got = actions(&c, 1e-12).unwrap();
        let (j, j4, j5) = nodes(&c);
        let f = |x: f64| -2.0 * ((x - j4) * (x - j5) / ((x - j[0]) * (x - j[1]) * (x - j[2]))).sqrt();
        let want: Vec<f64> = got.cycles.iter().map(|cy| oracle(f, cy.from.value, cy.to.value, 200_000)).collect();
        assert!((got.a1 - want[0]).abs() <= 1e-8, "{} vs {}", got.a1, want[0]);
        assert!((got.a2 - want[1]).abs() <= 1e-8, "{} vs {}", got.a2, want[1]);
    }
}

#[test]
fn reversing_a_cycle_negates_it() {
    let q = standard_params();
    let (c3, c4) = generic_levels(1)[0];
    let c = curve_from_c(&q, c3, c4);
    let cyc = default_cycles(&c).unwrap();
    let pm = period_matrix(&c, &cyc, DEFAULT_W, DEFAULT_TOL).unwrap();
    let rev = period_matrix(&c, &[cyc[0].reversed(), cyc[1]], DEFAULT_W, DEFAULT_TOL).unwrap();
    for r in 0..2 {
        assert!((pm.psi[r][0] + rev.psi[r][0]).norm() <= 1e-12);
        assert_eq!(pm.psi[r][1], rev.psi[r][1]);
    }
    let a = action_along(&c, &cyc[1], DEFAULT_TOL).unwrap();
    let b = action_along(&c, &cyc[1].reversed(), DEFAULT_TOL).unwrap();
    assert!((a + b).abs() <= 1e-12);
}

#[test]
fn actions_scale_with_the_square_root() {
    let (c3, c4) = generic_levels(1)[0];
    let base = actions(&curve_from_c(&standard_params(), c3, c4), 1e-12).unwrap();
    for t in [0.5, 2.0, 3.0] {
        let q = SystemParams::new([t, 2.0 * t, 3.0 * t], 1.0, 1.0).unwrap();
        let a = actions(&curve_from_c(&q, t * c3, t * t * c4), 1e-12).unwrap();
        assert!((a.a1 - t.sqrt() * base.a1).abs() <= 1e-9, "{t}");
        assert!((a.a2 - t.sqrt() * base.a2).abs() <= 1e-9, "{t}");
    }
}

#[test]
fn tighter_tolerance_changes_little() {
    let q = standard_params();
    let (c3, c4) = generic_levels(1)[0];
    let c = curve_from_c(&q, c3, c4);
    let (a, b) = (actions(&c, DEFAULT_TOL).unwrap(), actions(&c, 1e-13).unwrap());
    assert!((a.a1 - b.a1).abs() <= DEFAULT_TOL && (a.a2 - b.a2).abs() <= DEFAULT_TOL);
}

#[test]
fn derivative_identity_and_step_refinement() {
    let q = standard_params();
    let (c3, c4) = generic_levels(1)[0];
    let err = |h: f64| verify_action_derivatives(&q, c3, c4, h, 1e-13).unwrap().max_error;
    assert!(err(1e-5) <= 1e-5);
    let ratio = err(1e-3) / err(5e-4);
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}
