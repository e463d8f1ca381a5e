//! Hyperelliptic quadrature: action integrals, the period matrix and the
//! check that the period matrix is the Jacobian of the action map.
//!
//! Integrals run over segments between sorted real branch points with the
//! substitution `x = a + (b - a) sin^2(theta)`, which removes the inverse
//! square-root endpoint singularities, followed by adaptive Gauss-Kronrod.

use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linearize::{curve_from_c, BranchLabel, BranchPoint, HyperellipticCurve, COLLISION_TOL};
use crate::par;
use crate::params::{Roots, SystemParams};

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_INTERVALS: usize = 5000;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod estimate and `|K15 - G7|` on `[a, b]`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Globally adaptive GK15: bisects the interval with the largest error
/// until the summed error estimate is below `tol`.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    let (v, e) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let (mut total, mut err) = (v, e);
    while err > tol {
        if heap.len() >= MAX_INTERVALS || !err.is_finite() {
            return Err(Error::Tolerance { estimate: total, error: err, tol });
        }
        let p = heap.pop().unwrap();
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        heap.push(Piece { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Piece { a: m, b: p.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            // resum to shed accumulated cancellation
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
        }
    }
    let total = heap.iter().map(|p| p.value).sum();
    Ok(QuadResult { value: total, error: err, intervals: heap.len() })
}

/// `int_a^b f(x, x - a, b - x) dx` with the sine-squared substitution; the
/// two distances are passed separately because they are computed without
/// cancellation. `b < a` is allowed and flips the sign.
pub fn endpoint_quadrature<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    let w = b - a;
    let g = |th: f64| {
        let (s, c) = th.sin_cos();
        let (da, db) = (w * s * s, w * c * c);
        f(a + da, da, db) * w * 2.0 * s * c
    };
    adaptive(&g, 0.0, std::f64::consts::FRAC_PI_2, tol)
}

/// `int_a^b f(x) dx` for `f` with at worst inverse-square-root endpoint
/// singularities.
pub fn singular_quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    endpoint_quadrature(|x, _, _| f(x), a, b, tol)
}

/// An integration path between two real branch points, traversed from
/// `from` to `to`. As a closed cycle it counts twice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub from: BranchPoint,
    pub to: BranchPoint,
}

impl Cycle {
    pub fn reversed(&self) -> Cycle {
        Cycle { from: self.to, to: self.from }
    }
}

fn five_real(curve: &HyperellipticCurve) -> Result<Vec<BranchPoint>> {
    let bps = curve.real_branch_points();
    if bps.len() != 5 {
        return Err(Error::Precondition(format!(
            "j4, j5 are complex for c = ({}, {}); real cycles need five real branch points",
            curve.c3, curve.c4
        )));
    }
    Ok(bps)
}

/// Ascending branch points `b1..b5`; `gamma1 = b1 -> b2`, `gamma2 = b4 -> b3`.
///
/// Coinciding pairs are tolerated (the integrands stay integrable); three or
/// more coinciding branch points or a zero-length cycle are refused.
pub fn default_cycles(curve: &HyperellipticCurve) -> Result<[Cycle; 2]> {
    let b = five_real(curve)?;
    let tol = COLLISION_TOL * curve.scale();
    let mut i = 0;
    while i < 5 {
        let mut k = i;
        while k + 1 < 5 && (b[k + 1].value - b[i].value).abs() <= tol {
            k += 1;
        }
        if k - i >= 2 {
            let names: Vec<&str> = b[i..=k].iter().map(|p| p.label.as_str()).collect();
            return Err(Error::DegenerateCurve(format!(
                "branch points {} coincide at {}",
                names.join(", "),
                b[i].value
            )));
        }
        i = k + 1;
    }
    let cycles = [Cycle { from: b[0], to: b[1] }, Cycle { from: b[3], to: b[2] }];
    for (n, c) in cycles.iter().enumerate() {
        if (c.to.value - c.from.value).abs() <= tol {
            return Err(Error::DegenerateCurve(format!(
                "cycle gamma{} collapses: {} = {}",
                n + 1,
                c.from.label,
                c.to.label
            )));
        }
    }
    Ok(cycles)
}

/// Signed distances `x - b_k` to every real branch point, using the exact
/// endpoint distances for branch points sitting on a segment end.
fn distances(bps: &[BranchPoint], c: &Cycle, tol: f64, x: f64, da: f64, db: f64) -> Vec<(BranchLabel, f64)> {
    bps.iter()
        .map(|b| {
            let d = if (b.value - c.from.value).abs() <= tol {
                da
            } else if (b.value - c.to.value).abs() <= tol {
                -db
            } else {
                x - b.value
            };
            (b.label, d)
        })
        .collect()
}

/// `Psi(x) / ((x - j1)(x - j2)(x - j3))` and `R^2 = Phi Psi` in factored form.
fn factored(curve: &HyperellipticCurve, ds: &[(BranchLabel, f64)], x: f64) -> (f64, f64) {
    let den: f64 = ds.iter().filter(|(l, _)| l.is_modulus()).map(|(_, d)| d).product();
    let num = match curve.roots {
        Roots::Real { .. } => ds.iter().filter(|(l, _)| !l.is_modulus()).map(|(_, d)| d).product(),
        Roots::Conjugate { .. } => curve.psi(x),
    };
    (num / den, -den * num)
}

fn check_segment(bps: &[BranchPoint], c: &Cycle, tol: f64) -> Result<()> {
    let (lo, hi) = if c.from.value < c.to.value { (c.from.value, c.to.value) } else { (c.to.value, c.from.value) };
    for b in bps {
        if b.value > lo + tol && b.value < hi - tol {
            return Err(Error::DegenerateCurve(format!(
                "branch point {} = {} lies inside the segment {} -> {}",
                b.label, b.value, c.from.label, c.to.label
            )));
        }
    }
    Ok(())
}

/// `-2 int_gamma sqrt(Psi(x) / ((x-j1)(x-j2)(x-j3))) dx` along one path.
pub fn action_along(curve: &HyperellipticCurve, c: &Cycle, tol: f64) -> Result<f64> {
    let bps = curve.real_branch_points();
    let ctol = COLLISION_TOL * curve.scale();
    check_segment(&bps, c, ctol)?;
    let mid = 0.5 * (c.from.value + c.to.value);
    let half = 0.5 * (c.to.value - c.from.value);
    let (ratio, _) = factored(curve, &distances(&bps, c, ctol, mid, half, half), mid);
    if ratio < 0.0 {
        return Err(Error::Precondition(format!(
            "action integrand is imaginary on {} -> {}",
            c.from.label, c.to.label
        )));
    }
    let r = endpoint_quadrature(
        |x, da, db| {
            let (ratio, _) = factored(curve, &distances(&bps, c, ctol, x, da, db), x);
            -2.0 * ratio.max(0.0).sqrt()
        },
        c.from.value,
        c.to.value,
        tol,
    )?;
    Ok(r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Actions {
    pub a1: f64,
    pub a2: f64,
    pub cycles: [Cycle; 2],
}

/// Both actions on the default cycles.
pub fn actions(curve: &HyperellipticCurve, tol: f64) -> Result<Actions> {
    let cycles = default_cycles(curve)?;
    let v = par::map(&cycles, |c| action_along(curve, c, tol));
    let mut it = v.into_iter();
    Ok(Actions { a1: it.next().unwrap()?, a2: it.next().unwrap()?, cycles })
}

/// Period matrix. Row `i` pairs with `f = (C4, C3)`, column `j` with the
/// closed cycle `gamma_j`; entry `int_{gamma_j} x^i / (w_i sqrt(R^2)) dx`.
///
/// The branch is `sqrt(R^2) = Psi(x) sqrt(Phi(x) / Psi(x))` with the principal
/// root of the quotient. It is the branch the action integrand
/// `sqrt(Psi / -Phi) = Psi / sqrt(-R^2)` lives on; the bare principal root of
/// `R^2` disagrees with it on segments where `Psi < 0`. Segments where
/// `R^2 < 0` give purely imaginary entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodMatrix {
    pub psi: [[Complex64; 2]; 2],
    pub cycles: [Cycle; 2],
    pub w: [f64; 2],
}

impl PeriodMatrix {
    pub fn det(&self) -> Complex64 {
        self.psi[0][0] * self.psi[1][1] - self.psi[0][1] * self.psi[1][0]
    }
}

/// `W = diag(-2, 2)`.
pub const DEFAULT_W: [f64; 2] = [-2.0, 2.0];

pub fn period_matrix(curve: &HyperellipticCurve, cycles: &[Cycle; 2], w: [f64; 2], tol: f64) -> Result<PeriodMatrix> {
    if curve.degenerate {
        let pairs: Vec<String> = curve.collisions.iter().map(|(a, b)| format!("{a} = {b}")).collect();
        return Err(Error::DegenerateCurve(format!("coinciding branch points: {}", pairs.join(", "))));
    }
    let bps = five_real(curve)?;
    let ctol = COLLISION_TOL * curve.scale();
    let jobs: Vec<(usize, usize)> = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).collect();
    let vals = par::map(&jobs, |&(i, j)| -> Result<Complex64> {
        let c = &cycles[j];
        check_segment(&bps, c, ctol)?;
        let mid = 0.5 * (c.from.value + c.to.value);
        let half = 0.5 * (c.to.value - c.from.value);
        let ds = distances(&bps, c, ctol, mid, half, half);
        let (_, r2mid) = factored(curve, &ds, mid);
        let psi_sign = curve.psi(mid).signum();
        let r = endpoint_quadrature(
            |x, da, db| {
                let (_, r2) = factored(curve, &distances(&bps, c, ctol, x, da, db), x);
                x.powi(i as i32) / r2.abs().sqrt()
            },
            c.from.value,
            c.to.value,
            tol,
        )?;
        // closed cycle = twice the segment; sqrt(R^2) is taken as
        // Psi sqrt(Phi / Psi), so 1/sqrt(R^2) = -i sgn(Psi) / sqrt|R^2| on R^2 < 0
        let v = psi_sign * 2.0 * r.value / w[i];
        Ok(if r2mid < 0.0 { Complex64::new(0.0, -v) } else { Complex64::new(v, 0.0) })
    });
    let mut psi = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (&(i, j), v) in jobs.iter().zip(vals) {
        psi[i][j] = v?;
    }
    Ok(PeriodMatrix { psi, cycles: *cycles, w })
}

/// Finite-difference Jacobian of the actions against the period matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    /// `fd[i][j] = d a_j / d f_i`, `f = (C4, C3)`.
    pub fd: [[f64; 2]; 2],
    pub psi: PeriodMatrix,
    /// `max |fd[i][j] - i psi[i][j]|`.
    pub max_error: f64,
}

fn labels(curve: &HyperellipticCurve) -> Vec<BranchLabel> {
    curve.real_branch_points().iter().map(|b| b.label).collect()
}

/// Central differences of the actions in `(c4, c3)` against `i * Psi`.
pub fn verify_action_derivatives(params: &SystemParams, c3: f64, c4: f64, fd_step: f64, tol: f64) -> Result<DerivativeCheck> {
    let curve = curve_from_c(params, c3, c4);
    let pm = period_matrix(&curve, &default_cycles(&curve)?, DEFAULT_W, tol)?;
    let base = labels(&curve);
    let shifts = [(0.0, fd_step), (0.0, -fd_step), (fd_step, 0.0), (-fd_step, 0.0)];
    let acts = par::map(&shifts, |&(dc3, dc4)| -> Result<[f64; 2]> {
        let cv = curve_from_c(params, c3 + dc3, c4 + dc4);
        if cv.degenerate || labels(&cv) != base {
            return Err(Error::DegenerateCurve(format!(
                "step {fd_step} from c = ({c3}, {c4}) crosses the discriminant locus"
            )));
        }
        let a = actions(&cv, tol)?;
        Ok([a.a1, a.a2])
    });
    let acts: Vec<[f64; 2]> = acts.into_iter().collect::<Result<_>>()?;
    let mut fd = [[0.0; 2]; 2];
    for j in 0..2 {
        fd[0][j] = (acts[0][j] - acts[1][j]) / (2.0 * fd_step);
        fd[1][j] = (acts[2][j] - acts[3][j]) / (2.0 * fd_step);
    }
    let i = Complex64::new(0.0, 1.0);
    let mut max_error: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            max_error = max_error.max((Complex64::new(fd[r][c], 0.0) - i * pm.psi[r][c]).norm());
        }
    }
    Ok(DerivativeCheck { fd, psi: pm, max_error })
}
