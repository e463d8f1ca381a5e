//! The Kummer quartic
//! `F = a1^2 + a2^2 + a3^2 - 2 a1 a2 - 2 a2 a3 - 2 a3 a1`, `a_i = X_i U_i`,
//! with `U1 = l X4 + d2 X2 - d3 X3`, `U2 = m X4 + d3 X3 - d1 X1`,
//! `U3 = n X4 + d1 X1 - d2 X2`.
//!
//! The form is generic over a commutative ring so that the same code
//! evaluates in `f64`, in exact rationals and in `Q(sqrt D)`. Double points
//! are certified by exact evaluation of `F` and its gradient.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::{compute_integrals, BodyState};
use crate::params::SystemParams;

/// Commutative ring operations needed to evaluate the quartic.
pub trait Ring: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {}
impl<T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T>> Ring for T {}

/// Field operations for building the rational double points.
pub trait Field: Ring + Div<Output = Self> + Neg<Output = Self> {}
impl<T: Ring + Div<Output = T> + Neg<Output = T>> Field for T {}

fn twice<T: Ring>(x: T) -> T {
    x.clone() + x
}

/// Coefficients of the quartic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarticForm<T> {
    pub l: T,
    pub m: T,
    pub n: T,
    pub d: [T; 3],
}

impl<T: Ring> QuarticForm<T> {
    fn weight(&self, i: usize) -> &T {
        [&self.l, &self.m, &self.n][i]
    }

    /// `(U1, U2, U3)`.
    pub fn u(&self, x: &[T; 4]) -> [T; 3] {
        std::array::from_fn(|i| {
            let (b, c) = ((i + 1) % 3, (i + 2) % 3);
            self.weight(i).clone() * x[3].clone() + self.d[b].clone() * x[b].clone()
                - self.d[c].clone() * x[c].clone()
        })
    }

    fn a(&self, x: &[T; 4]) -> [T; 3] {
        let u = self.u(x);
        std::array::from_fn(|i| x[i].clone() * u[i].clone())
    }

    pub fn eval(&self, x: &[T; 4]) -> T {
        let [a1, a2, a3] = self.a(x);
        a1.clone() * a1.clone() + a2.clone() * a2.clone() + a3.clone() * a3.clone()
            - twice(a1.clone() * a2.clone())
            - twice(a2 * a3.clone())
            - twice(a3 * a1)
    }

    pub fn gradient(&self, x: &[T; 4]) -> [T; 4] {
        let u = self.u(x);
        let a: [T; 3] = std::array::from_fn(|i| x[i].clone() * u[i].clone());
        // dF/da_i
        let g: [T; 3] = std::array::from_fn(|i| {
            twice(a[i].clone() - a[(i + 1) % 3].clone() - a[(i + 2) % 3].clone())
        });
        let gx: [T; 3] = std::array::from_fn(|i| g[i].clone() * x[i].clone());
        let [d1, d2, d3] = self.d.clone();
        [
            g[0].clone() * u[0].clone() + d1 * (gx[2].clone() - gx[1].clone()),
            g[1].clone() * u[1].clone() + d2 * (gx[0].clone() - gx[2].clone()),
            g[2].clone() * u[2].clone() + d3 * (gx[1].clone() - gx[0].clone()),
            gx[0].clone() * self.l.clone() + gx[1].clone() * self.m.clone() + gx[2].clone() * self.n.clone(),
        ]
    }
}

impl QuarticForm<f64> {
    pub fn from_params(params: &SystemParams, c3: f64, c4: f64) -> Self {
        let [l, m, n] = params.compute_lmn(c3, c4);
        QuarticForm { l, m, n, d: params.d_params() }
    }

    /// Typical magnitude of `F` at `x`: the square of the summed `|a_i|`
    /// computed term by term, floored at one.
    pub fn scale(&self, x: &[f64; 4]) -> f64 {
        let w = [self.l, self.m, self.n];
        let s: f64 = (0..3)
            .map(|i| {
                let (b, c) = ((i + 1) % 3, (i + 2) % 3);
                x[i].abs() * (w[i].abs() * x[3].abs() + (self.d[b] * x[b]).abs() + (self.d[c] * x[c]).abs())
            })
            .sum();
        (s * s).max(1.0)
    }

    /// Exact rational copy of the (already rational) float coefficients.
    pub fn to_exact(&self) -> Option<QuarticForm<BigRational>> {
        let q = |v: f64| BigRational::from_float(v);
        Some(QuarticForm {
            l: q(self.l)?,
            m: q(self.m)?,
            n: q(self.n)?,
            d: [q(self.d[0])?, q(self.d[1])?, q(self.d[2])?],
        })
    }
}

/// Exact form for rational moduli and levels.
pub fn exact_form(j: &[BigRational; 3], c3: &BigRational, c4: &BigRational) -> QuarticForm<BigRational> {
    let w: [BigRational; 3] = std::array::from_fn(|a| {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let x = &j[a];
        (x * x - c3 * x + c4) / ((x - &j[b]) * (x - &j[c]))
    });
    let [l, m, n] = w;
    QuarticForm {
        l,
        m,
        n,
        d: [
            (&j[2] - &j[1]).recip(),
            (&j[0] - &j[2]).recip(),
            (&j[1] - &j[0]).recip(),
        ],
    }
}

/// `a + b sqrt(d)` over the rationals. `d` is never a rational square, so
/// `a + b sqrt(d) = 0` iff `a = b = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadExt {
    pub a: BigRational,
    pub b: BigRational,
    pub d: BigRational,
}

impl QuadExt {
    pub fn rational(a: BigRational, d: &BigRational) -> Self {
        QuadExt { a, b: BigRational::zero(), d: d.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, o: QuadExt) -> QuadExt {
        debug_assert_eq!(self.d, o.d);
        QuadExt { a: self.a + o.a, b: self.b + o.b, d: self.d }
    }
}

impl Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, o: QuadExt) -> QuadExt {
        debug_assert_eq!(self.d, o.d);
        QuadExt { a: self.a - o.a, b: self.b - o.b, d: self.d }
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, o: QuadExt) -> QuadExt {
        debug_assert_eq!(self.d, o.d);
        QuadExt {
            a: &self.a * &o.a + &self.b * &o.b * &self.d,
            b: &self.a * &o.b + &self.b * &o.a,
            d: self.d,
        }
    }
}

/// Exact square root of a nonnegative rational, if it is a square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

/// Which family of the fourteen a double point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DoublePointCase {
    Coordinate,
    Infinity,
    AffineThree,
    QuadraticPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublePoint {
    pub coords: [f64; 4],
    pub case: DoublePointCase,
    pub certified: bool,
}

/// The quadratic cutting the line `X_c = U_c = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticPairInfo {
    /// Index `c` in `1..=3` of the line `X_c = U_c = 0`.
    pub axis: usize,
    /// `[(m+n) d1 + (n+l) d2]^2 - 4 l m d1 d2` and its cyclic analogues.
    pub discriminant: f64,
    /// Discriminant of the quadratic in the line parameters actually solved.
    pub line_discriminant: f64,
    pub real_roots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublePointReport {
    pub points: Vec<DoublePoint>,
    pub quadratic_pairs: Vec<QuadraticPairInfo>,
}

/// Scales so that the last nonzero coordinate is one.
pub fn normalize(x: [f64; 4]) -> [f64; 4] {
    match x.iter().rposition(|v| *v != 0.0) {
        Some(i) => x.map(|v| v / x[i]),
        None => x,
    }
}

/// The eight points with rational coordinates: the four coordinate points,
/// `(1/d1 : 1/d2 : 1/d3 : 0)` and the three affine points.
fn rational_points<T: Field>(f: &QuarticForm<T>, zero: &T, one: &T) -> Vec<(DoublePointCase, [T; 4])> {
    let z = || zero.clone();
    let o = || one.clone();
    let [d1, d2, d3] = f.d.clone();
    let (l, m, n) = (f.l.clone(), f.m.clone(), f.n.clone());
    let mut v = vec![
        (DoublePointCase::Coordinate, [o(), z(), z(), z()]),
        (DoublePointCase::Coordinate, [z(), o(), z(), z()]),
        (DoublePointCase::Coordinate, [z(), z(), o(), z()]),
        (DoublePointCase::Coordinate, [z(), z(), z(), o()]),
        (DoublePointCase::Infinity, [o() / d1.clone(), o() / d2.clone(), o() / d3.clone(), z()]),
    ];
    v.push((DoublePointCase::AffineThree, [m.clone() / d1.clone(), -(l.clone() / d2.clone()), z(), o()]));
    v.push((DoublePointCase::AffineThree, [z(), n.clone() / d2, -(m / d3.clone()), o()]));
    v.push((DoublePointCase::AffineThree, [-(n / d1), z(), l / d3, o()]));
    v
}

/// Line `X_c = U_c = 0` spanned by `v` (with `X4 = 0`) and `w`, and the
/// binary quadratic `Q(s v + t w) = alpha s^2 + beta s t + gamma t^2`
/// where `Q = X_a U_a - X_b U_b`. On that line `F = Q^2`, and every zero of
/// `Q` there is a double point.
#[allow(clippy::type_complexity)]
fn line_quadratic<T: Ring>(f: &QuarticForm<T>, c: usize, zero: &T) -> ([T; 4], [T; 4], T, T, T) {
    let (a, b) = ((c + 1) % 3, (c + 2) % 3);
    let mut v: [T; 4] = std::array::from_fn(|_| zero.clone());
    v[a] = f.d[b].clone();
    v[b] = f.d[a].clone();
    let mut w: [T; 4] = std::array::from_fn(|_| zero.clone());
    w[b] = f.weight(c).clone();
    w[3] = f.d[b].clone();
    let q = |x: &[T; 4]| {
        let u = f.u(x);
        x[a].clone() * u[a].clone() - x[b].clone() * u[b].clone()
    };
    let vw: [T; 4] = std::array::from_fn(|k| v[k].clone() + w[k].clone());
    let (al, ga) = (q(&v), q(&w));
    let be = q(&vw) - al.clone() - ga.clone();
    (v, w, al, be, ga)
}

/// The closed-form discriminant for the line `X_c = U_c = 0`.
fn closed_form_discriminant(f: &QuarticForm<f64>, c: usize) -> f64 {
    let w = [f.l, f.m, f.n];
    let (a, b) = ((c + 1) % 3, (c + 2) % 3);
    let lin = (w[b] + w[c]) * f.d[a] + (w[c] + w[a]) * f.d[b];
    lin * lin - 4.0 * w[a] * w[b] * f.d[a] * f.d[b]
}

fn combine<T: Ring>(s: &T, v: &[T; 4], t: &T, w: &[T; 4]) -> [T; 4] {
    std::array::from_fn(|k| s.clone() * v[k].clone() + t.clone() * w[k].clone())
}

/// Root directions `(s, t)` of `alpha s^2 + beta s t + gamma t^2` in floats.
fn float_roots(al: f64, be: f64, ga: f64) -> Vec<(f64, f64)> {
    let disc = be * be - 4.0 * al * ga;
    if disc < 0.0 {
        return Vec::new();
    }
    if al == 0.0 {
        return if be == 0.0 && ga == 0.0 { Vec::new() } else { vec![(1.0, 0.0), (-ga, be)] };
    }
    let q = -0.5 * (be + disc.sqrt().copysign(be));
    if q == 0.0 {
        return vec![(0.0, 1.0), (0.0, 1.0)];
    }
    vec![(q, al), (ga, q)]
}

/// Floating double points of a form, with an exact certificate for each.
pub fn double_points_of(form: &QuarticForm<f64>) -> DoublePointReport {
    let exact = form.to_exact().map(|e| certify(&e));
    let mut points: Vec<DoublePoint> = rational_points(form, &0.0, &1.0)
        .into_iter()
        .enumerate()
        .map(|(k, (case, x))| DoublePoint {
            coords: normalize(x),
            case,
            certified: exact.as_ref().map(|e| e.rational_ok[k]).unwrap_or(false),
        })
        .collect();
    let mut pairs = Vec::new();
    for c in 0..3 {
        let (v, w, al, be, ga) = line_quadratic(form, c, &0.0);
        let roots = float_roots(al, be, ga);
        let cert = exact.as_ref().map(|e| &e.pairs[c]);
        for (r, (s, t)) in roots.iter().enumerate() {
            let x = normalize(combine(s, &v, t, &w));
            let certified = cert.is_some_and(|pc| {
                pc.points.get(r).is_some_and(|(ok, ex)| {
                    let ex = normalize(ex.clone().map(|q| q.to_f64()));
                    *ok && (0..4).all(|k| (ex[k] - x[k]).abs() <= 1e-8 * (1.0 + x[k].abs()))
                })
            });
            points.push(DoublePoint { coords: x, case: DoublePointCase::QuadraticPair, certified });
        }
        pairs.push(QuadraticPairInfo {
            axis: c + 1,
            discriminant: closed_form_discriminant(form, c),
            line_discriminant: be * be - 4.0 * al * ga,
            real_roots: roots.len(),
        });
    }
    DoublePointReport { points, quadratic_pairs: pairs }
}

/// Exact verification outcome for one line.
#[derive(Debug, Clone)]
pub struct PairCertificate {
    /// `(F = 0 and grad F = 0, point)` per real root.
    pub points: Vec<(bool, [QuadExt; 4])>,
    pub discriminant: BigRational,
}

#[derive(Debug, Clone)]
pub struct ExactCertificate {
    pub rational_points: Vec<(DoublePointCase, [BigRational; 4])>,
    pub rational_ok: Vec<bool>,
    pub pairs: Vec<PairCertificate>,
}

impl ExactCertificate {
    pub fn all_certified(&self) -> bool {
        self.rational_ok.iter().all(|b| *b) && self.pairs.iter().all(|p| p.points.iter().all(|(ok, _)| *ok))
    }

    pub fn point_count(&self) -> usize {
        self.rational_points.len() + self.pairs.iter().map(|p| p.points.len()).sum::<usize>()
    }
}

fn vanishes_rational(f: &QuarticForm<BigRational>, x: &[BigRational; 4]) -> bool {
    f.eval(x).is_zero() && f.gradient(x).iter().all(|g| g.is_zero())
}

/// Builds every real double point exactly and checks `F = 0`, `grad F = 0`
/// in exact arithmetic.
pub fn certify(f: &QuarticForm<BigRational>) -> ExactCertificate {
    let zero = BigRational::zero();
    let one = BigRational::from_integer(BigInt::from(1));
    let rational_points = rational_points(f, &zero, &one);
    let rational_ok = rational_points.iter().map(|(_, x)| vanishes_rational(f, x)).collect();
    let mut pairs = Vec::new();
    for c in 0..3 {
        let (v, w, al, be, ga) = line_quadratic(f, c, &zero);
        let disc = &be * &be - BigRational::from_integer(BigInt::from(4)) * &al * &ga;
        let mut pts = Vec::new();
        if !disc.is_negative() {
            if let Some(r) = rational_sqrt(&disc) {
                // rational roots; embed with a dummy extension for a uniform type
                let unit = one.clone() + one.clone();
                let roots: Vec<(BigRational, BigRational)> = if al.is_zero() {
                    if be.is_zero() && ga.is_zero() {
                        Vec::new()
                    } else {
                        vec![(one.clone(), zero.clone()), (-ga.clone(), be.clone())]
                    }
                } else {
                    let two_a = &al + &al;
                    vec![(-&be - &r, two_a.clone()), (-&be + &r, two_a)]
                };
                for (s, t) in roots {
                    let x = combine(&s, &v, &t, &w);
                    let ok = vanishes_rational(f, &x);
                    pts.push((ok, x.map(|q| QuadExt::rational(q, &unit))));
                }
            } else {
                let lift = |q: &BigRational| QuadExt::rational(q.clone(), &disc);
                let vq = v.clone().map(|q| lift(&q));
                let wq = w.clone().map(|q| lift(&q));
                let t = lift(&(&al + &al));
                for sign in [-1, 1] {
                    let s = QuadExt { a: -be.clone(), b: BigRational::from_integer(BigInt::from(sign)), d: disc.clone() };
                    let x = combine(&s, &vq, &t, &wq);
                    let ok = f_ext(f, &disc).eval(&x).is_zero() && f_ext(f, &disc).gradient(&x).iter().all(|g| g.is_zero());
                    pts.push((ok, x));
                }
            }
        }
        pairs.push(PairCertificate { points: pts, discriminant: disc });
    }
    ExactCertificate { rational_points, rational_ok, pairs }
}

fn f_ext(f: &QuarticForm<BigRational>, d: &BigRational) -> QuarticForm<QuadExt> {
    let lift = |q: &BigRational| QuadExt::rational(q.clone(), d);
    QuarticForm { l: lift(&f.l), m: lift(&f.m), n: lift(&f.n), d: [lift(&f.d[0]), lift(&f.d[1]), lift(&f.d[2])] }
}

/// The quartic of a level set together with the data that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct KummerSurface {
    pub form: QuarticForm<f64>,
    pub params: SystemParams,
    pub c3: f64,
    pub c4: f64,
}

impl KummerSurface {
    pub fn new(params: &SystemParams, c3: f64, c4: f64) -> Self {
        KummerSurface { form: QuarticForm::from_params(params, c3, c4), params: *params, c3, c4 }
    }

    pub fn quartic_eval(&self, x: &[f64; 4]) -> f64 {
        self.form.eval(x)
    }

    pub fn quartic_gradient(&self, x: &[f64; 4]) -> [f64; 4] {
        self.form.gradient(x)
    }

    /// `|F(x)|` divided by its natural magnitude at `x`.
    pub fn relative_residual(&self, x: &[f64; 4]) -> f64 {
        self.form.eval(x).abs() / self.form.scale(x)
    }

    pub fn double_points(&self) -> DoublePointReport {
        double_points_of(&self.form)
    }

    /// `(K1^2 : K2^2 : K3^2 : 1)` after checking that the state sits on the
    /// level set of this surface.
    pub fn state_to_kummer(&self, s: &BodyState, tol: f64) -> Result<[f64; 4]> {
        let v = compute_integrals(s, &self.params);
        let checks = [
            ("C1", v.c1, 0.0),
            ("C2", v.c2, 1.0),
            ("C3", v.c3, self.c3),
            ("C4", v.c4, self.c4),
        ];
        for (name, got, want) in checks {
            if (got - want).abs() > tol * want.abs().max(1.0) {
                return Err(Error::Consistency(format!("{name} = {got} but the surface has {want}")));
            }
        }
        Ok([s.k.x * s.k.x, s.k.y * s.k.y, s.k.z * s.k.z, 1.0])
    }

    /// `sum_a sign(p_a) sqrt(U_a(K^2)) K_a`, which equals `C1` on the level
    /// set because `U_a(K^2) = p_a^2` there.
    pub fn casimir_residual(&self, s: &BodyState) -> f64 {
        let u = self.form.u(&[s.k.x * s.k.x, s.k.y * s.k.y, s.k.z * s.k.z, 1.0]);
        (0..3).map(|a| s.p[a].signum() * u[a].max(0.0).sqrt() * s.k[a]).sum()
    }
}

/// Numeric search for singular points in the plane `X4 = 0`. Experimental:
/// no closed form is known to this crate, and nothing is asserted about
/// how many exist. Known points are excluded unless `include_known`.
pub fn search_infinity_points(form: &QuarticForm<f64>, grid: usize, include_known: bool) -> Vec<[f64; 4]> {
    let dir = |th: f64, ph: f64| [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos(), 0.0];
    let resid = |x: &[f64; 4]| form.gradient(x);
    let norm = |g: &[f64; 4]| g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let grid = grid.max(8);
    let (nt, np) = (grid, 2 * grid);
    let mut vals = vec![vec![0.0; np]; nt + 1];
    for (it, row) in vals.iter_mut().enumerate() {
        for (ip, v) in row.iter_mut().enumerate() {
            let th = std::f64::consts::FRAC_PI_2 * it as f64 / nt as f64;
            let ph = std::f64::consts::PI * ip as f64 / np as f64;
            *v = norm(&resid(&dir(th, ph)));
        }
    }
    let mut found: Vec<[f64; 4]> = Vec::new();
    for it in 0..=nt {
        for ip in 0..np {
            let v = vals[it][ip];
            let mut is_min = true;
            for (dt, dp) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let jt = it as i64 + dt;
                if jt < 0 || jt > nt as i64 {
                    continue;
                }
                let jp = (ip as i64 + dp).rem_euclid(np as i64) as usize;
                if vals[jt as usize][jp] < v {
                    is_min = false;
                }
            }
            if !is_min {
                continue;
            }
            // Gauss-Newton on (theta, phi)
            let mut th = std::f64::consts::FRAC_PI_2 * it as f64 / nt as f64;
            let mut ph = std::f64::consts::PI * ip as f64 / np as f64;
            for _ in 0..60 {
                let r = resid(&dir(th, ph));
                let e = 1e-7;
                let rt = resid(&dir(th + e, ph));
                let rp = resid(&dir(th, ph + e));
                let jt: Vec<f64> = (0..4).map(|k| (rt[k] - r[k]) / e).collect();
                let jp: Vec<f64> = (0..4).map(|k| (rp[k] - r[k]) / e).collect();
                let (a, b, c) = (
                    jt.iter().map(|v| v * v).sum::<f64>(),
                    jt.iter().zip(&jp).map(|(u, v)| u * v).sum::<f64>(),
                    jp.iter().map(|v| v * v).sum::<f64>(),
                );
                let (g1, g2) = (
                    jt.iter().zip(&r).map(|(u, v)| u * v).sum::<f64>(),
                    jp.iter().zip(&r).map(|(u, v)| u * v).sum::<f64>(),
                );
                let det = a * c - b * b;
                if det.abs() < 1e-300 {
                    break;
                }
                th -= (c * g1 - b * g2) / det;
                ph -= (a * g2 - b * g1) / det;
            }
            let x = dir(th, ph);
            if norm(&resid(&x)) > 1e-10 * (1.0 + form.scale(&x).sqrt()) {
                continue;
            }
            let xn = normalize(x);
            let same = |y: &[f64; 4]| {
                let cross = (0..4).flat_map(|i| (0..4).map(move |k| (i, k))).map(|(i, k)| (xn[i] * y[k] - xn[k] * y[i]).abs());
                cross.fold(0.0, f64::max) < 1e-6 * (1.0 + xn.iter().chain(y.iter()).fold(0.0_f64, |m, v| m.max(v.abs())).powi(2))
            };
            if found.iter().any(same) {
                continue;
            }
            found.push(xn);
        }
    }
    if !include_known {
        let known: Vec<[f64; 4]> = rational_points(form, &0.0, &1.0)
            .into_iter()
            .map(|(_, x)| normalize(x))
            .filter(|x| x[3] == 0.0)
            .collect();
        found.retain(|x| {
            !known.iter().any(|y| (0..4).all(|k| (x[k] - y[k]).abs() < 1e-6 * (1.0 + y[k].abs())))
        });
    }
    found
}
