//! Separation coordinates `(x1, x2)`, reconstruction of `(K, p)` from them,
//! the genus-two curve and a numerical check of the linearized flow.
//!
//! `x1, x2` are the roots of `C2 x^2 - E x + F` with
//! `E = sum (s - j_a) p_a^2` and `F = sum j_b j_c p_a^2`, equivalently of the
//! secular equation `sum p_a^2 / (x - j_a) = 0`. The differences
//! `x_i - j_a` are stored next to the roots because they carry the
//! conditioning of everything downstream.

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::integrals::{compute_integrals, pencil_field, BodyState, V3};
use crate::params::{roots_j45, Roots, SpectralData, SystemParams};

/// Gaps below this are recomputed from the secular equation.
const SMALL_GAP: f64 = 1e-2;

/// A point in separation coordinates with its reconstruction branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationPoint {
    pub x1: f64,
    pub x2: f64,
    /// Sign of each radical `sqrt((x1-j_a)(x2-j_a)/D_a)`, i.e. of `p_a`.
    pub signs: [i8; 3],
    /// `gaps[a][i] = x_{i+1} - j_{a+1}`.
    pub gaps: [[f64; 2]; 3],
}

impl SeparationPoint {
    pub fn x(&self) -> [f64; 2] {
        [self.x1, self.x2]
    }

    /// `x_i - j_a`.
    pub fn gap(&self, i: usize, a: usize) -> f64 {
        self.gaps[a][i]
    }

    /// `p_a^2` from the stored gaps.
    pub fn p_squared(&self, params: &SystemParams) -> [f64; 3] {
        let d = params.node_products();
        std::array::from_fn(|a| self.gap(0, a) * self.gap(1, a) / d[a])
    }

    /// `j1 <= x1 <= j2 <= x2 <= j3` up to `tol`.
    pub fn interlaced(&self, params: &SystemParams, tol: f64) -> bool {
        let j = params.j();
        j[0] - tol <= self.x1 && self.x1 <= j[1] + tol && j[1] - tol <= self.x2 && self.x2 <= j[2] + tol
    }
}

/// Roots of `C2 x^2 - E x + F` for the given `p`.
pub fn supplementary_coords(p: &V3, params: &SystemParams) -> Result<SeparationPoint> {
    let c2 = p.norm_squared();
    if (c2 - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!("|p|^2 = {c2} is not 1")));
    }
    let j = params.j();
    let s = params.trace();
    let p2: [f64; 3] = std::array::from_fn(|a| p[a] * p[a]);
    let e: f64 = (0..3).map(|a| (s - j[a]) * p2[a]).sum();
    let f: f64 = (0..3).map(|a| params.cofactor(a) * p2[a]).sum();
    // the discriminant is a sum of squares for real p; clamp rounding noise
    let disc = (e * e - 4.0 * c2 * f).max(0.0);
    let big = 0.5 * (e + disc.sqrt().copysign(e));
    let (ra, rb) = if big == 0.0 { (0.0, 0.0) } else { (big / c2, f / big) };
    let (x1, x2) = (ra.min(rb), ra.max(rb));

    let mut gaps = [[0.0; 2]; 3];
    for (i, &x) in [x1, x2].iter().enumerate() {
        for a in 0..3 {
            let mut g = x - j[a];
            if g.abs() < SMALL_GAP {
                let rest: f64 = (0..3).filter(|&b| b != a).map(|b| p2[b] / (x - j[b])).sum();
                let better = -p2[a] / rest;
                if rest != 0.0 && better.is_finite() {
                    g = better;
                }
            }
            gaps[a][i] = g;
        }
    }
    let signs = std::array::from_fn(|a| if p[a] < 0.0 { -1 } else { 1 });
    Ok(SeparationPoint { x1, x2, signs, gaps })
}

/// `p_a^2 = (x1 - j_a)(x2 - j_a) / ((j_a - j_b)(j_a - j_c))`. Values outside
/// the interlacing region may be negative and are returned as such.
pub fn p_squared_from_coords(x1: f64, x2: f64, params: &SystemParams) -> [f64; 3] {
    let j = params.j();
    let d = params.node_products();
    std::array::from_fn(|a| (x1 - j[a]) * (x2 - j[a]) / d[a])
}

/// `Phi(x) = (j1 - x)(j2 - x)(j3 - x)`.
pub fn phi(params: &SystemParams, x: f64) -> f64 {
    params.j().iter().map(|j| j - x).product()
}

/// `Psi(x) = (x - j4)(x - j5)`, factored when the roots are real.
pub fn psi(roots: &Roots, x: f64) -> f64 {
    match *roots {
        Roots::Real { j4, j5 } => (x - j4) * (x - j5),
        Roots::Conjugate { re, im } => (x - re) * (x - re) + im * im,
    }
}

/// `(A^2, B^2) = (Phi(x2) Psi(x1), Phi(x1) Psi(x2)) / (x2 - x1)^2`.
///
/// `A` and `B` are the real coefficients of `sqrt((x1-j)/(x2-j))` and its
/// reciprocal in `K`, so both squares are nonnegative on real states. This is
/// the unique solution of the two linear relations obtained from the `p1^2`
/// and `p2^2` expressions; the overall minus sign sometimes quoted with this
/// formula would make both negative.
pub fn ab_squared(x1: f64, x2: f64, spectral: &SpectralData, params: &SystemParams) -> Result<(f64, f64)> {
    if x1 == x2 {
        return Err(Error::SeparationDegenerate(x1));
    }
    let w = (x2 - x1) * (x2 - x1);
    Ok((
        phi(params, x2) * psi(&spectral.roots, x1) / w,
        phi(params, x1) * psi(&spectral.roots, x2) / w,
    ))
}

/// Real coefficients `(a, b)` with `K = b e1 + a e2`, `e_i = p / (x_i - j)`.
pub fn ab_coefficients(state: &BodyState, point: &SeparationPoint) -> Result<(f64, f64)> {
    let mut e = [[0.0; 3]; 2];
    for (i, ei) in e.iter_mut().enumerate() {
        for a in 0..3 {
            let g = point.gap(i, a);
            if g == 0.0 {
                return Err(Error::Branch(format!("x{} coincides with j{}; frame e{} is singular", i + 1, a + 1, i + 1)));
            }
            ei[a] = state.p[a] / g;
        }
    }
    let dot = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let k = [state.k.x, state.k.y, state.k.z];
    let (g11, g12, g22) = (dot(&e[0], &e[0]), dot(&e[0], &e[1]), dot(&e[1], &e[1]));
    let (r1, r2) = (dot(&e[0], &k), dot(&e[1], &k));
    let det = g11 * g22 - g12 * g12;
    if det == 0.0 || !det.is_finite() {
        return Err(Error::SeparationDegenerate(point.x1));
    }
    let b = (r1 * g22 - r2 * g12) / det;
    let a = (r2 * g11 - r1 * g12) / det;
    Ok((a, b))
}

/// `p` from the point and its sign pattern.
pub fn reconstruct_p(point: &SeparationPoint, params: &SystemParams) -> Result<V3> {
    let p2 = point.p_squared(params);
    let mut p = V3::zeros();
    for a in 0..3 {
        if p2[a] < -1e-12 {
            return Err(Error::Branch(format!(
                "radical sqrt((x1-j{0})(x2-j{0})/D{0}) has negative argument {1:e}",
                a + 1,
                p2[a]
            )));
        }
        p[a] = f64::from(point.signs[a]) * p2[a].max(0.0).sqrt();
    }
    Ok(p)
}

/// `K_a = p_a (b / (x1 - j_a) + a / (x2 - j_a))`.
pub fn reconstruct_k(point: &SeparationPoint, a: f64, b: f64, params: &SystemParams) -> Result<V3> {
    let p = reconstruct_p(point, params)?;
    let mut k = V3::zeros();
    for al in 0..3 {
        let (g1, g2) = (point.gap(0, al), point.gap(1, al));
        let term = |c: f64, g: f64| if c == 0.0 { 0.0 } else { c * p[al] / g };
        k[al] = term(b, g1) + term(a, g2);
        if !k[al].is_finite() {
            return Err(Error::Branch(format!("K{} is not finite: x_i meets j{}", al + 1, al + 1)));
        }
    }
    Ok(k)
}

/// Full state from the point, its sign pattern and `(a, b)`.
pub fn reconstruct_state(point: &SeparationPoint, a: f64, b: f64, params: &SystemParams) -> Result<BodyState> {
    Ok(BodyState { k: reconstruct_k(point, a, b, params)?, p: reconstruct_p(point, params)? })
}

/// Which of `j1..j5` a branch point is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchLabel {
    J1,
    J2,
    J3,
    J4,
    J5,
}

impl BranchLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BranchLabel::J1 => "j1",
            BranchLabel::J2 => "j2",
            BranchLabel::J3 => "j3",
            BranchLabel::J4 => "j4",
            BranchLabel::J5 => "j5",
        }
    }

    /// `j1, j2, j3` are zeros of `Phi`, `j4, j5` of `Psi`.
    pub fn is_modulus(&self) -> bool {
        matches!(self, BranchLabel::J1 | BranchLabel::J2 | BranchLabel::J3)
    }
}

impl std::fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A named branch point of the curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub label: BranchLabel,
    pub value: f64,
}

/// `y^2 = (j1-x)(j2-x)(j3-x)(j4-x)(j5-x) = Phi(x) Psi(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperellipticCurve {
    pub j: [f64; 3],
    pub c3: f64,
    pub c4: f64,
    pub roots: Roots,
    pub degenerate: bool,
    /// Label pairs of coinciding branch points.
    pub collisions: Vec<(&'static str, &'static str)>,
}

/// Relative distance below which two branch points count as coincident.
pub const COLLISION_TOL: f64 = 1e-10;

impl HyperellipticCurve {
    pub fn phi(&self, x: f64) -> f64 {
        self.j.iter().map(|j| j - x).product()
    }

    pub fn psi(&self, x: f64) -> f64 {
        psi(&self.roots, x)
    }

    pub fn r_squared(&self, x: f64) -> f64 {
        self.phi(x) * self.psi(x)
    }

    /// Principal square root of `R^2`; imaginary where `R^2 < 0`.
    pub fn r(&self, x: f64) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.r_squared(x), 0.0).sqrt()
    }

    /// Real branch points in ascending order (three or five of them).
    pub fn real_branch_points(&self) -> Vec<BranchPoint> {
        let mut v: Vec<BranchPoint> = [BranchLabel::J1, BranchLabel::J2, BranchLabel::J3]
            .into_iter()
            .zip(self.j)
            .map(|(label, value)| BranchPoint { label, value })
            .collect();
        if let Roots::Real { j4, j5 } = self.roots {
            v.push(BranchPoint { label: BranchLabel::J4, value: j4 });
            v.push(BranchPoint { label: BranchLabel::J5, value: j5 });
        }
        v.sort_by(|a, b| a.value.total_cmp(&b.value));
        v
    }

    pub fn scale(&self) -> f64 {
        self.real_branch_points().iter().fold(1.0_f64, |m, b| m.max(b.value.abs()))
    }
}

/// The curve of the level `(c3, c4)`.
pub fn curve_from_c(params: &SystemParams, c3: f64, c4: f64) -> HyperellipticCurve {
    let mut curve = HyperellipticCurve {
        j: params.j(),
        c3,
        c4,
        roots: roots_j45(c3, c4),
        degenerate: false,
        collisions: Vec::new(),
    };
    let tol = COLLISION_TOL * curve.scale();
    let bps = curve.real_branch_points();
    for (i, a) in bps.iter().enumerate() {
        for b in &bps[i + 1..] {
            if (a.value - b.value).abs() <= tol {
                let (x, y) = (a.label.min(b.label), a.label.max(b.label));
                let pair = (x.as_str(), y.as_str());
                curve.collisions.push(pair);
            }
        }
    }
    curve.collisions.sort();
    curve.degenerate = !curve.collisions.is_empty();
    curve
}

/// Time derivatives of `(x1, x2)` along the pencil field, by the chain rule.
pub fn separation_velocity(state: &BodyState, params: &SystemParams) -> Result<[f64; 2]> {
    let pt = supplementary_coords(&state.p, params)?;
    let v = pencil_field(state, params);
    let j = params.j();
    let s = params.trace();
    let (mut de, mut df, mut dc2) = (0.0, 0.0, 0.0);
    for a in 0..3 {
        let w = 2.0 * state.p[a] * v.p[a];
        de += (s - j[a]) * w;
        df += params.cofactor(a) * w;
        dc2 += w;
    }
    let c2 = state.p.norm_squared();
    let e: f64 = (0..3).map(|a| (s - j[a]) * state.p[a] * state.p[a]).sum();
    let mut out = [0.0; 2];
    for (i, &x) in pt.x().iter().enumerate() {
        let den = 2.0 * c2 * x - e;
        if den == 0.0 {
            return Err(Error::SeparationDegenerate(x));
        }
        out[i] = (x * de - df - x * x * dc2) / den;
    }
    Ok(out)
}

/// `|R(x_i)|` and `d|R|^2/dx` at `x_i`, from the stored gaps.
fn modulus_and_slope(pt: &SeparationPoint, i: usize, roots: &Roots) -> (f64, f64) {
    let x = pt.x()[i];
    let g = [pt.gap(i, 0), pt.gap(i, 1), pt.gap(i, 2)];
    let ph = -g[0] * g[1] * g[2];
    let dph = -(g[1] * g[2] + g[0] * g[2] + g[0] * g[1]);
    let ps = psi(roots, x);
    let dps = 2.0 * x - roots.sum();
    let r2 = ph * ps;
    let dr2 = dph * ps + ph * dps;
    (r2.abs().sqrt(), if r2 < 0.0 { -dr2 } else { dr2 })
}

/// Residuals `(r1, r2)` of
/// `q1 + q2 = -2 lambda'` and `x1 q1 + x2 q2 = 2 lambda`, `q_i = xdot_i / R(x_i)`,
/// where time is that of the flow of `(lambda C3 + lambda' C4) / 2`. The
/// field used here is twice as fast, hence the factor one half.
fn residual_pair(q: [f64; 2], x: [f64; 2], params: &SystemParams) -> (f64, f64) {
    (
        0.5 * (q[0] + q[1]) + 2.0 * params.lambda_prime(),
        0.5 * (x[0] * q[0] + x[1] * q[1]) - 2.0 * params.lambda(),
    )
}

const SHEETS: [[f64; 2]; 4] = [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]];

/// Residuals at a single state using the exact chain-rule velocities and
/// the sheet pair that fits best. Returns `(r1, r2, sheet)`.
pub fn exact_residual(state: &BodyState, params: &SystemParams) -> Result<(f64, f64, [i8; 2])> {
    let iv = compute_integrals(state, params);
    let roots = roots_j45(iv.c3, iv.c4);
    let pt = supplementary_coords(&state.p, params)?;
    let xd = separation_velocity(state, params)?;
    let base: [f64; 2] = std::array::from_fn(|i| {
        let (r, _) = modulus_and_slope(&pt, i, &roots);
        xd[i].abs() / r
    });
    let mut best = (f64::INFINITY, 0.0, 0.0, [1, 1]);
    for sh in SHEETS {
        let (r1, r2) = residual_pair([sh[0] * base[0], sh[1] * base[1]], pt.x(), params);
        if r1.abs().max(r2.abs()) < best.0 {
            best = (r1.abs().max(r2.abs()), r1, r2, [sh[0] as i8, sh[1] as i8]);
        }
    }
    Ok((best.1, best.2, best.3))
}

/// Summary of the residual check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_residual_1: f64,
    pub max_residual_2: f64,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub degenerate: bool,
}

/// Per-step record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub r1: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Linearization {
    pub report: ResidualReport,
    /// Sheet signs of `R(x1), R(x2)` relative to the direction of motion.
    pub sheet: [i8; 2],
    /// Interior steps only; empty for an equilibrium.
    pub series: Vec<ResidualSample>,
    /// Separation coordinates at every step.
    pub coords: Vec<(f64, f64, f64)>,
}

/// Checks the linearized flow along a trajectory with centered differences.
///
/// `R(x_i)` is lifted to a signed quantity `y_i` that changes sign with
/// the direction of motion of `x_i`, which makes it smooth through turning
/// points. `q_i = xdot_i / y_i` is then estimated in the least-squares sense
/// from `xdot_i = q_i y_i` and `2 ydot_i = q_i dP/dx`, both with centered
/// differences, so the estimate stays bounded where `y_i` vanishes.
/// The sheet pair is fitted on the first usable step and then held; a step
/// where another pair fits far better is a branch-tracking failure.
pub fn linearization_residual(traj: &Trajectory) -> Result<Linearization> {
    let params = &traj.params;
    let n = traj.len();
    if n < 3 {
        return Err(Error::Precondition("need at least three samples".into()));
    }
    let iv = compute_integrals(&traj.states[0], params);
    let curve = curve_from_c(params, iv.c3, iv.c4);
    let roots = curve.roots;

    let mut pts = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut slope = Vec::with_capacity(n);
    for s in &traj.states {
        let pt = supplementary_coords(&s.p, params)?;
        let xd = separation_velocity(s, params)?;
        let mut yy = [0.0; 2];
        let mut ss = [0.0; 2];
        for i in 0..2 {
            let (r, d) = modulus_and_slope(&pt, i, &roots);
            yy[i] = if xd[i] < 0.0 { -r } else { r };
            ss[i] = d;
        }
        pts.push(pt);
        y.push(yy);
        slope.push(ss);
    }
    let coords = traj.times.iter().zip(&pts).map(|(&t, p)| (t, p.x1, p.x2)).collect();

    let still = pts.windows(2).all(|w| w[0].x() == w[1].x());
    if still {
        return Ok(Linearization {
            report: ResidualReport {
                max_residual_1: 0.0,
                max_residual_2: 0.0,
                lambda: params.lambda(),
                lambda_prime: params.lambda_prime(),
                degenerate: true,
            },
            sheet: [1, 1],
            series: Vec::new(),
            coords,
        });
    }

    let mut sheet: Option<[f64; 2]> = None;
    let mut series = Vec::with_capacity(n - 2);
    let (mut m1, mut m2) = (0.0_f64, 0.0_f64);
    for k in 1..n - 1 {
        let dt = traj.times[k + 1] - traj.times[k - 1];
        let x = pts[k].x();
        let mut qb = [0.0; 2];
        let mut ok = true;
        for i in 0..2 {
            let xc = (pts[k + 1].x()[i] - pts[k - 1].x()[i]) / dt;
            let yc = (y[k + 1][i] - y[k - 1][i]) / dt;
            let (yy, pp) = (y[k][i], slope[k][i]);
            let den = yy * yy + pp * pp;
            if den == 0.0 {
                ok = false;
                break;
            }
            qb[i] = (xc * yy + 2.0 * yc * pp) / den;
        }
        if !ok {
            continue;
        }
        let eval = |sh: [f64; 2]| residual_pair([sh[0] * qb[0], sh[1] * qb[1]], x, params);
        let fit = |r: (f64, f64)| r.0.abs().max(r.1.abs());
        let held = *sheet.get_or_insert_with(|| {
            SHEETS
                .into_iter()
                .min_by(|a, b| fit(eval(*a)).total_cmp(&fit(eval(*b))))
                .unwrap()
        });
        let (r1, r2) = eval(held);
        let best_other = SHEETS
            .into_iter()
            .filter(|s| *s != held)
            .map(|s| fit(eval(s)))
            .fold(f64::INFINITY, f64::min);
        if fit((r1, r2)) > 0.5 && fit((r1, r2)) > 10.0 * best_other {
            return Err(Error::BranchTracking {
                step: k,
                detail: format!("held sheet {:?} gives residual {:.3e}, another gives {:.3e}", held, fit((r1, r2)), best_other),
            });
        }
        m1 = m1.max(r1.abs());
        m2 = m2.max(r2.abs());
        series.push(ResidualSample { t: traj.times[k], x1: x[0], x2: x[1], r1, r2 });
    }
    let sheet = sheet.unwrap_or([1.0, 1.0]);
    Ok(Linearization {
        report: ResidualReport {
            max_residual_1: m1,
            max_residual_2: m2,
            lambda: params.lambda(),
            lambda_prime: params.lambda_prime(),
            degenerate: curve.degenerate,
        },
        sheet: [sheet[0] as i8, sheet[1] as i8],
        series,
        coords,
    })
}
