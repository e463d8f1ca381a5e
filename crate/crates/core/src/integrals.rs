//! First integrals, the Lie-Poisson bracket on se(3)* and Hamiltonian
//! vector fields.

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::params::{Physical, SystemParams};

pub type V3 = Vector3<f64>;

/// Phase point `(K, p)`. Also used for velocities and gradients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyState {
    pub k: V3,
    pub p: V3,
}

impl BodyState {
    pub fn new(k: [f64; 3], p: [f64; 3]) -> Self {
        BodyState { k: V3::from(k), p: V3::from(p) }
    }

    pub fn zero() -> Self {
        BodyState { k: V3::zeros(), p: V3::zeros() }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.k.x, self.k.y, self.k.z, self.p.x, self.p.y, self.p.z]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        BodyState::new([a[0], a[1], a[2]], [a[3], a[4], a[5]])
    }

    pub fn dot(&self, o: &BodyState) -> f64 {
        self.k.dot(&o.k) + self.p.dot(&o.p)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn axpy(&self, a: f64, o: &BodyState) -> BodyState {
        BodyState { k: self.k + o.k * a, p: self.p + o.p * a }
    }

    pub fn scale(&self, a: f64) -> BodyState {
        BodyState { k: self.k * a, p: self.p * a }
    }

    /// `C1 = 0` and `C2 = 1` within `tol`.
    pub fn on_weber_leaf(&self, tol: f64) -> bool {
        self.k.dot(&self.p).abs() <= tol && (self.p.norm_squared() - 1.0).abs() <= tol
    }

    /// Normalizes `p` and removes the component of `K` along `p`.
    pub fn project_to_leaf(&self) -> BodyState {
        let p = self.p.normalize();
        BodyState { k: self.k - p * self.k.dot(&p), p }
    }
}

/// Samples a state with `C1 = 0`, `C2 = 1`: `p` uniform on the sphere,
/// `K` uniform in the ball of radius `k_radius`, then projected.
pub fn sample_leaf_state<R: Rng + ?Sized>(rng: &mut R, k_radius: f64) -> BodyState {
    let p = loop {
        let v = V3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            break v / n;
        }
    };
    let k = loop {
        let v = V3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if v.norm_squared() <= 1.0 {
            break v * k_radius;
        }
    };
    BodyState { k: k - p * k.dot(&p), p }
}

/// A scalar function on R^6 with a gradient.
pub trait Observable {
    fn value(&self, s: &BodyState) -> f64;
    fn gradient(&self, s: &BodyState) -> BodyState;
}

/// Built-in quadratic integrals with closed-form gradients.
///
/// `L = sum K_a^2 / (m_a I_a) - sum p_a^2 / (m_b m_c)`. The p-weights are
/// products of virtual masses; with inertias in their place the form is not
/// conserved by the Kirchhoff flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integral {
    C1,
    C2,
    C3(SystemParams),
    C4(SystemParams),
    H(Physical),
    L(Physical),
}

impl Integral {
    /// Diagonal weights `(a, b)` of a form `sum a_i K_i^2 + b_i p_i^2`.
    fn diag(&self) -> Option<([f64; 3], [f64; 3])> {
        match self {
            Integral::C1 => None,
            Integral::C2 => Some(([0.0; 3], [1.0; 3])),
            Integral::C3(q) => {
                let s = q.trace();
                Some(([1.0; 3], q.j().map(|j| s - j)))
            }
            Integral::C4(q) => Some((q.j(), std::array::from_fn(|a| q.cofactor(a)))),
            Integral::H(ph) => Some((
                ph.inertia.map(|i| 0.5 / i),
                ph.mass.map(|m| 0.5 / m),
            )),
            Integral::L(ph) => {
                let m = ph.mass;
                Some((
                    std::array::from_fn(|a| 1.0 / (m[a] * ph.inertia[a])),
                    std::array::from_fn(|a| -1.0 / (m[(a + 1) % 3] * m[(a + 2) % 3])),
                ))
            }
        }
    }
}

impl Observable for Integral {
    fn value(&self, s: &BodyState) -> f64 {
        match self.diag() {
            None => s.k.dot(&s.p),
            Some((a, b)) => (0..3).map(|i| a[i] * s.k[i] * s.k[i] + b[i] * s.p[i] * s.p[i]).sum(),
        }
    }

    fn gradient(&self, s: &BodyState) -> BodyState {
        match self.diag() {
            None => BodyState { k: s.p, p: s.k },
            Some((a, b)) => BodyState {
                k: V3::from_fn(|i, _| 2.0 * a[i] * s.k[i]),
                p: V3::from_fn(|i, _| 2.0 * b[i] * s.p[i]),
            },
        }
    }
}

/// Gradient by central differences for an arbitrary function.
pub struct FiniteDifference<F> {
    pub f: F,
    pub step: f64,
}

impl<F: Fn(&BodyState) -> f64> Observable for FiniteDifference<F> {
    fn value(&self, s: &BodyState) -> f64 {
        (self.f)(s)
    }

    fn gradient(&self, s: &BodyState) -> BodyState {
        let x = s.to_array();
        let mut g = [0.0; 6];
        for i in 0..6 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += self.step;
            xm[i] -= self.step;
            g[i] = ((self.f)(&BodyState::from_array(xp)) - (self.f)(&BodyState::from_array(xm)))
                / (2.0 * self.step);
        }
        BodyState::from_array(g)
    }
}

/// `{F,G} = <K, dKF x dKG> + <p, dKF x dpG - dKG x dpF>` from gradients.
pub fn bracket_from_gradients(gf: &BodyState, gg: &BodyState, s: &BodyState) -> f64 {
    s.k.dot(&gf.k.cross(&gg.k)) + s.p.dot(&(gf.k.cross(&gg.p) - gg.k.cross(&gf.p)))
}

/// Lie-Poisson bracket of two observables at `s`.
pub fn lie_poisson_bracket<F: Observable + ?Sized, G: Observable + ?Sized>(f: &F, g: &G, s: &BodyState) -> f64 {
    bracket_from_gradients(&f.gradient(s), &g.gradient(s), s)
}

/// `Xi_F = (K x dKF + p x dpF, p x dKF)` from the gradient of `F`.
pub fn hamiltonian_field(grad: &BodyState, s: &BodyState) -> BodyState {
    BodyState { k: s.k.cross(&grad.k) + s.p.cross(&grad.p), p: s.p.cross(&grad.k) }
}

/// Field of the pencil member `lambda C3 + lambda' C4`.
pub fn pencil_field(s: &BodyState, params: &SystemParams) -> BodyState {
    let g3 = Integral::C3(*params).gradient(s);
    let g4 = Integral::C4(*params).gradient(s);
    let g = g3.scale(params.lambda()).axpy(params.lambda_prime(), &g4);
    hamiltonian_field(&g, s)
}

/// Kirchhoff right-hand sides written out componentwise.
pub fn kirchhoff_rhs(s: &BodyState, ph: &Physical) -> BodyState {
    let [i1, i2, i3] = ph.inertia.map(|v| 1.0 / v);
    let [m1, m2, m3] = ph.mass.map(|v| 1.0 / v);
    let (k, p) = (&s.k, &s.p);
    BodyState::new(
        [
            (i3 - i2) * k[1] * k[2] + (m3 - m2) * p[1] * p[2],
            (i1 - i3) * k[2] * k[0] + (m1 - m3) * p[2] * p[0],
            (i2 - i1) * k[0] * k[1] + (m2 - m1) * p[0] * p[1],
        ],
        [
            i3 * p[1] * k[2] - i2 * p[2] * k[1],
            i1 * p[2] * k[0] - i3 * p[0] * k[2],
            i2 * p[0] * k[1] - i1 * p[1] * k[0],
        ],
    )
}

/// Values of the integrals at one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralValues {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub h: Option<f64>,
    pub l: Option<f64>,
}

impl IntegralValues {
    /// `(c1, c2, c3, c4, h, l)` with absent entries skipped.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![("C1", self.c1), ("C2", self.c2), ("C3", self.c3), ("C4", self.c4)];
        if let Some(h) = self.h {
            v.push(("H", h));
        }
        if let Some(l) = self.l {
            v.push(("L", l));
        }
        v
    }
}

/// `C1..C4`, plus `H` and `L` whenever the pencil has a physical member.
pub fn compute_integrals(s: &BodyState, params: &SystemParams) -> IntegralValues {
    let (h, l) = match params.derive_physical() {
        Ok(ph) => {
            let (h, l) = compute_hl(s, &ph);
            (Some(h), Some(l))
        }
        Err(_) => (None, None),
    };
    IntegralValues {
        c1: Integral::C1.value(s),
        c2: Integral::C2.value(s),
        c3: Integral::C3(*params).value(s),
        c4: Integral::C4(*params).value(s),
        h,
        l,
    }
}

/// Hamiltonian `H` and the additional integral `L`.
pub fn compute_hl(s: &BodyState, ph: &Physical) -> (f64, f64) {
    (Integral::H(*ph).value(s), Integral::L(*ph).value(s))
}
