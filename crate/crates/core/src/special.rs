//! Invariant three-dimensional subspaces: the axis families
//! `p_a = K_b = K_c = 0` and the families `p = delta * K`, with their
//! reduced dynamics under a modified Lie-Poisson bracket on R^3.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::integrate_field;
use crate::error::{Error, Result};
use crate::integrals::{BodyState, V3};
use crate::params::{Physical, SystemParams, DEFAULT_TOL};

/// Bracket `{F,G}_M(x) = <x, M (grad F x grad G)>` with `M = diag(mu)`
/// and Hamiltonian `1/2 <x, diag(f) x>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModifiedBracketSystem {
    pub mu: [f64; 3],
    pub f: [f64; 3],
}

impl ModifiedBracketSystem {
    /// Reduction to `x = (K_a, p_b, p_c)` on the family `p_a = K_b = K_c = 0`,
    /// `(a, b, c)` cyclic and `axis = a` 1-based.
    ///
    /// `mu = (1/I_a, 1/m_b, 1/m_c)` and `f = (0, -1, -1)`. Taking all three
    /// `mu` from the inertias gets the `K_a` equation wrong: it yields
    /// `(1/I_c - 1/I_b) p_b p_c` where the flow has `(1/m_c - 1/m_b) p_b p_c`.
    pub fn axis(axis: usize, ph: &Physical) -> Self {
        let a = axis - 1;
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        ModifiedBracketSystem {
            mu: [1.0 / ph.inertia[a], 1.0 / ph.mass[b], 1.0 / ph.mass[c]],
            f: [0.0, -1.0, -1.0],
        }
    }

    /// Coordinates `(K_a, p_b, p_c)` of a state for [`Self::axis`].
    pub fn axis_coords(axis: usize, s: &BodyState) -> V3 {
        let a = axis - 1;
        V3::new(s.k[a], s.p[(a + 1) % 3], s.p[(a + 2) % 3])
    }

    /// Reduction to `x = K` on a `p = delta * K` family.
    pub fn delta(delta: [f64; 3], ph: &Physical) -> Self {
        let [d1, d2, d3] = delta;
        ModifiedBracketSystem {
            mu: [d1 / (d2 * d3), d2 / (d3 * d1), d3 / (d1 * d2)],
            f: std::array::from_fn(|a| delta[a] / ph.inertia[a]),
        }
    }

    /// `(M x) x grad F` written out.
    pub fn field(&self, x: &V3) -> V3 {
        let (m, f) = (self.mu, self.f);
        V3::new(
            (m[1] * f[2] - m[2] * f[1]) * x[1] * x[2],
            (m[2] * f[0] - m[0] * f[2]) * x[2] * x[0],
            (m[0] * f[1] - m[1] * f[0]) * x[0] * x[1],
        )
    }

    /// `1/2 <x, M x>`.
    pub fn casimir(&self, x: &V3) -> f64 {
        0.5 * (0..3).map(|a| self.mu[a] * x[a] * x[a]).sum::<f64>()
    }

    /// `1/2 <x, diag(f) x>`.
    pub fn energy(&self, x: &V3) -> f64 {
        0.5 * (0..3).map(|a| self.f[a] * x[a] * x[a]).sum::<f64>()
    }

    /// RK4 on R^3; returns the largest relative drift of the two quadratics.
    pub fn conservation_drift(&self, x0: &V3, t_final: f64, h: f64) -> Result<f64> {
        let lift = |x: &V3| BodyState { k: *x, p: V3::zeros() };
        let (_, states) = integrate_field(|s| lift(&self.field(&s.k)), &lift(x0), t_final, h)?;
        let (c0, e0) = (self.casimir(x0), self.energy(x0));
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        Ok(states
            .iter()
            .map(|s| rel(self.casimir(&s.k), c0).max(rel(self.energy(&s.k), e0)))
            .fold(0.0, f64::max))
    }
}

/// `j_a^2 - c3 j_a + c4`, which must vanish for the axis family of `axis`.
pub fn axis_condition_residual(params: &SystemParams, c3: f64, c4: f64, axis: usize) -> f64 {
    let x = params.j()[axis - 1];
    x * x - c3 * x + c4
}

/// Whether the axis family of `axis` (1-based) is compatible with the level.
pub fn axis_subspace_check(params: &SystemParams, c3: f64, c4: f64, axis: usize) -> bool {
    let x = params.j()[axis - 1];
    let scale = (x * x).abs().max((c3 * x).abs()).max(c4.abs()).max(f64::MIN_POSITIVE);
    axis_condition_residual(params, c3, c4, axis).abs() <= DEFAULT_TOL * scale
}

/// Constants of a `p = delta * K` family: `j_a = sigma delta_a + sigma'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaFamily {
    pub delta: [f64; 3],
    pub sigma: f64,
    pub sigma_prime: f64,
}

/// `sigma = sqrt((j1 - s')(j2 - s')(j3 - s'))`, `delta_a = (j_a - s') / sigma`.
pub fn delta_family_from_sigma(params: &SystemParams, sigma_prime: f64) -> Result<DeltaFamily> {
    let prod: f64 = params.j().iter().map(|j| j - sigma_prime).product();
    if prod <= 0.0 {
        return Err(Error::NoRealFamily(format!(
            "(j1 - s')(j2 - s')(j3 - s') = {prod} is not positive for s' = {sigma_prime}"
        )));
    }
    let sigma = prod.sqrt();
    let delta = params.j().map(|j| (j - sigma_prime) / sigma);
    // C1 = sum delta_a K_a^2 must vanish with K != 0
    if delta.iter().all(|d| *d > 0.0) || delta.iter().all(|d| *d < 0.0) {
        return Err(Error::NoRealFamily(format!("s' = {sigma_prime} gives one-signed delta; no state has C1 = 0")));
    }
    Ok(DeltaFamily { delta, sigma, sigma_prime })
}

impl DeltaFamily {
    /// A state with `p = delta * K`, `C1 = 0`, `C2 = 1`. `(u, v)` seed the
    /// first two components of `K`; the third is solved from `C1 = 0`.
    pub fn leaf_state(&self, u: f64, v: f64) -> Result<BodyState> {
        let d = self.delta;
        let k3sq = -(d[0] * u * u + d[1] * v * v) / d[2];
        if !(k3sq >= 0.0) {
            return Err(Error::NoRealFamily(format!("no real K3 for seed ({u}, {v})")));
        }
        let k = V3::new(u, v, k3sq.sqrt());
        let p = V3::from_fn(|a, _| d[a] * k[a]);
        let n = p.norm();
        if n == 0.0 {
            return Err(Error::NoRealFamily("seed gives p = 0".into()));
        }
        Ok(BodyState { k: k / n, p: p / n })
    }

    /// Random leaf state of the family.
    pub fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> BodyState {
        loop {
            let (u, v) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if let Ok(s) = self.leaf_state(u, v) {
                return s;
            }
        }
    }
}

/// A three-dimensional subspace of R^6.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Subspace {
    /// `p_a = K_b = K_c = 0`, `a` in `1..=3`.
    Axis { axis: usize },
    /// `p = delta * K`.
    Delta { delta: [f64; 3] },
}

impl Subspace {
    /// Largest constrained coordinate.
    pub fn distance(&self, s: &BodyState) -> f64 {
        match *self {
            Subspace::Axis { axis } => {
                let a = axis - 1;
                let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                s.p[a].abs().max(s.k[b].abs()).max(s.k[c].abs())
            }
            Subspace::Delta { delta } => (0..3).map(|a| (s.p[a] - delta[a] * s.k[a]).abs()).fold(0.0, f64::max),
        }
    }
}

/// Integrates `field` from `state0` and reports the largest distance from
/// the subspace along the way.
pub fn subspace_invariance_test<F: Fn(&BodyState) -> BodyState>(
    field: F,
    subspace: &Subspace,
    state0: &BodyState,
    t_final: f64,
    h: f64,
) -> Result<f64> {
    let (_, states) = integrate_field(field, state0, t_final, h)?;
    Ok(states.iter().map(|s| subspace.distance(s)).fold(0.0, f64::max))
}
