use clebsch::params::{check_clebsch, roots_j45, Roots, SpectralData, SystemParams};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Ordered distinct moduli with gaps bounded away from zero.
fn moduli() -> impl Strategy<Value = [f64; 3]> {
    (-5.0..5.0f64, 0.1..4.0f64, 0.1..4.0f64).prop_map(|(a, g1, g2)| [a, a + g1, a + g1 + g2])
}

#[test]
fn physical_examples() {
    let q = SystemParams::new([1., 2., 3.], 0.0, 0.5).unwrap();
    let ph = q.derive_physical().unwrap();
    let want_i = [1.0, 0.5, 1.0 / 3.0];
    let want_m = [1.0 / 6.0, 1.0 / 3.0, 0.5];
    for a in 0..3 {
        assert!(rel(ph.inertia[a], want_i[a]) < 1e-15);
        assert!(rel(ph.mass[a], want_m[a]) < 1e-15);
    }
    let ph = q.with_pencil(0.5, 0.0).unwrap().derive_physical().unwrap();
    assert_eq!(ph.inertia, [1.0, 1.0, 1.0]);
    let want_m = [0.2, 0.25, 1.0 / 3.0];
    for a in 0..3 {
        assert!(rel(ph.mass[a], want_m[a]) < 1e-15);
    }
}

#[test]
fn clebsch_predicate_examples() {
    assert!(check_clebsch([1.0, 0.5, 1.0 / 3.0], [1.0 / 6.0, 1.0 / 3.0, 0.5]));
    assert!(check_clebsch([2.5; 3], [1.0, 7.0, -3.0]));
    assert!(!check_clebsch([1.0, 2.0, 3.0], [1.0, 1.0, 2.0]));
}

#[test]
fn degenerate_pencil_is_refused() {
    // n_1 = lambda + lambda' j_1 = 0
    let q = SystemParams::new([1., 2., 3.], -1.0, 1.0).unwrap();
    assert!(q.derive_physical().is_err());
    assert!(SystemParams::new([1., 1., 3.], 1.0, 1.0).is_err());
    assert!(SystemParams::new([3., 2., 1.], 1.0, 1.0).is_err());
}

#[test]
fn lmn_examples() {
    let q = SystemParams::new([1., 2., 3.], 1.0, 1.0).unwrap();
    let lmn = q.compute_lmn(5.0, 6.0);
    for (g, w) in lmn.iter().zip([1.0, 0.0, 0.0]) {
        assert!((g - w).abs() < 1e-12, "{lmn:?}");
    }
    let lmn = q.compute_lmn(4.36, 4.08);
    for (g, w) in lmn.iter().zip([0.36, 0.64, 0.0]) {
        assert!((g - w).abs() < 1e-12, "{lmn:?}");
    }
}

#[test]
fn root_examples() {
    assert_eq!(roots_j45(5.0, 6.0).real(), Some((2.0, 3.0)));
    let s = 1.7;
    let (a, b) = roots_j45(2.0 * s, s * s).real().unwrap();
    assert!((a - s).abs() < 1e-7 && (b - s).abs() < 1e-7);
    let (a, b) = roots_j45(4.36, 4.08).real().unwrap();
    assert!((a - 1.36).abs() < 1e-12 && (b - 3.0).abs() < 1e-12);
    assert!(matches!(roots_j45(2.0, 5.0), Roots::Conjugate { .. }));
}

#[test]
fn d_examples() {
    let d = SystemParams::new([1., 2., 3.], 1.0, 1.0).unwrap().d_params();
    assert_eq!(d, [1.0, -0.5, 1.0]);
    let d = SystemParams::new([1., 2., 4.], 1.0, 1.0).unwrap().d_params();
    assert!(rel(d[0], 0.5) < 1e-15 && rel(d[1], -1.0 / 3.0) < 1e-15 && rel(d[2], 1.0) < 1e-15);
}

proptest! {
    #[test]
    fn derived_constants_satisfy_clebsch(j in moduli(), lam in -3.0..3.0f64, lamp in -3.0..3.0f64) {
        let q = SystemParams::new(j, lam, lamp).unwrap();
        let n = q.n();
        let np = q.n_prime();
        prop_assume!(n.iter().chain(np.iter()).all(|v| v.abs() > 1e-3));
        let ph = q.derive_physical().unwrap();
        prop_assert!(check_clebsch(ph.inertia, ph.mass));
    }

    #[test]
    fn lmn_rebuilds_levels(j in moduli(), c3 in -10.0..10.0f64, c4 in -10.0..10.0f64) {
        let q = SystemParams::new(j, 1.0, 1.0).unwrap();
        let [l, m, n] = q.compute_lmn(c3, c4);
        let s = q.trace();
        // rows of the linear system, written independently of the solver
        let w = [l, m, n];
        let r1: f64 = w.iter().sum();
        let r2: f64 = (0..3).map(|a| (s - j[a]) * w[a]).sum();
        let r3: f64 = (0..3).map(|a| j[(a + 1) % 3] * j[(a + 2) % 3] * w[a]).sum();
        let scale = w.iter().map(|v| v.abs()).fold(1.0, f64::max) * j.iter().map(|v| v.abs()).fold(1.0, f64::max).powi(2);
        prop_assert!((r1 - 1.0).abs() <= 1e-12 * scale);
        prop_assert!((r2 - c3).abs() <= 1e-12 * scale.max(c3.abs()));
        prop_assert!((r3 - c4).abs() <= 1e-12 * scale.max(c4.abs()));
    }

    #[test]
    fn lmn_matches_root_form(j in moduli(), u in -8.0..8.0f64, v in -8.0..8.0f64) {
        // real j4, j5 = u, v
        let q = SystemParams::new(j, 1.0, 1.0).unwrap();
        let (c3, c4) = (u + v, u * v);
        let lmn = q.compute_lmn(c3, c4);
        let sd = SpectralData::new(&q, c3, c4);
        prop_assert!((sd.roots.sum() - c3).abs() <= 1e-12 * c3.abs().max(1.0));
        prop_assert!((sd.roots.product() - c4).abs() <= 1e-10 * c4.abs().max(1.0));
        for a in 0..3 {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let want = (j[a] - u) * (j[a] - v) / ((j[a] - j[b]) * (j[a] - j[c]));
            prop_assert!((lmn[a] - want).abs() <= 1e-12 * want.abs().max(1.0) * 1e2, "{} vs {}", lmn[a], want);
        }
    }

    #[test]
    fn d_reciprocals_cancel_at_unit_scale(a in -10.0..10.0f64, g1 in 0.1..5.0f64, g2 in 0.1..5.0f64) {
        let q = SystemParams::new([a, a + g1, a + g1 + g2], 1.0, 1.0).unwrap();
        let s: f64 = q.d_params().iter().map(|v| 1.0 / v).sum();
        prop_assert!(s.abs() <= 1e-14, "{s}");
    }
}

/// The bound is stated as `1e-14` absolute for `|j| <= 1e3`. One ulp at
/// `1e3` is about `1.1e-13`, so rounded `d` values cannot meet it there.
#[test]
fn d_reciprocals_cancel_up_to_1e3() {
    let mut r = clebsch::scenario::rng(7);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let mut j: [f64; 3] = std::array::from_fn(|_| rand::Rng::random_range(&mut r, -1e3..1e3));
        j.sort_by(f64::total_cmp);
        let Ok(q) = SystemParams::new(j, 1.0, 1.0) else { continue };
        let s: f64 = q.d_params().iter().map(|v| 1.0 / v).sum();
        worst = worst.max(s.abs());
    }
    assert!(worst <= 1e-14, "largest |1/d1 + 1/d2 + 1/d3| = {worst:e}");
}
