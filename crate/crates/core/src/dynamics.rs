//! Fixed-step classical RK4 integration and invariant-drift monitoring.
//!
//! The integrator never re-projects onto the leaf: drift is a measured
//! quantity, and silent projection would hide it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::{compute_integrals, pencil_field, BodyState};
use crate::par;
use crate::params::SystemParams;

/// States whose norm exceeds this are treated as escaping to infinity.
pub const BLOW_UP_NORM: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BodyState>,
    pub params: SystemParams,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// One classical RK4 step.
pub fn rk4_step<F: Fn(&BodyState) -> BodyState>(f: &F, s: &BodyState, h: f64) -> BodyState {
    let k1 = f(s);
    let k2 = f(&s.axpy(0.5 * h, &k1));
    let k3 = f(&s.axpy(0.5 * h, &k2));
    let k4 = f(&s.axpy(h, &k3));
    let incr = k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4);
    s.axpy(h / 6.0, &incr)
}

/// Integrates an arbitrary field on `[0, t_final]`. The step count is
/// `ceil(t_final / h)` and the grid is uniform with spacing `t_final / n`,
/// which equals `h` whenever `h` divides the horizon.
pub fn integrate_field<F: Fn(&BodyState) -> BodyState>(
    field: F,
    state0: &BodyState,
    t_final: f64,
    h: f64,
) -> Result<(Vec<f64>, Vec<BodyState>)> {
    if !(h > 0.0 && t_final > 0.0 && h.is_finite() && t_final.is_finite()) {
        return Err(Error::Precondition(format!("need h > 0 and t_final > 0, got h={h}, T={t_final}")));
    }
    if !state0.is_finite() {
        return Err(Error::Precondition("initial state is not finite".into()));
    }
    let n = ((t_final / h) - 1e-9).ceil().max(1.0) as usize;
    let dt = t_final / n as f64;
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(0.0);
    states.push(*state0);
    let mut s = *state0;
    for i in 1..=n {
        s = rk4_step(&field, &s, dt);
        if !s.is_finite() || s.norm() > BLOW_UP_NORM {
            return Err(Error::BlowUp { last_good_time: times[i - 1] });
        }
        times.push(if i == n { t_final } else { i as f64 * dt });
        states.push(s);
    }
    Ok((times, states))
}

/// Integrates the pencil field of `params`.
pub fn integrate(state0: &BodyState, params: &SystemParams, t_final: f64, h: f64) -> Result<Trajectory> {
    let (times, states) = integrate_field(|s| pencil_field(s, params), state0, t_final, h)?;
    Ok(Trajectory { times, states, params: *params })
}

/// Independent trajectories, one per initial state.
pub fn integrate_batch(
    states: &[BodyState],
    params: &SystemParams,
    t_final: f64,
    h: f64,
) -> Vec<Result<Trajectory>> {
    par::map(states, |s| integrate(s, params, t_final, h))
}

/// Maximum relative drift of each monitored integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub h: Option<f64>,
    pub l: Option<f64>,
    /// `log2(drift(h) / drift(h/2))`, present when measured.
    pub order: Option<f64>,
}

impl DriftReport {
    /// Largest drift over all monitored integrals.
    pub fn max(&self) -> f64 {
        [self.c1, self.c2, self.c3, self.c4, self.h.unwrap_or(0.0), self.l.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![("C1", self.c1), ("C2", self.c2), ("C3", self.c3), ("C4", self.c4)];
        v.extend(self.h.map(|x| ("H", x)));
        v.extend(self.l.map(|x| ("L", x)));
        v
    }
}

/// `max_t |C(t) - C(0)| / max(1, |C(0)|)` per integral.
pub fn drift_report(traj: &Trajectory) -> Result<DriftReport> {
    let first = traj
        .states
        .first()
        .ok_or_else(|| Error::Precondition("empty trajectory".into()))?;
    let v0 = compute_integrals(first, &traj.params);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let mut r = DriftReport {
        c1: 0.0,
        c2: 0.0,
        c3: 0.0,
        c4: 0.0,
        h: v0.h.map(|_| 0.0),
        l: v0.l.map(|_| 0.0),
        order: None,
    };
    for s in &traj.states {
        let v = compute_integrals(s, &traj.params);
        r.c1 = r.c1.max(rel(v.c1, v0.c1));
        r.c2 = r.c2.max(rel(v.c2, v0.c2));
        r.c3 = r.c3.max(rel(v.c3, v0.c3));
        r.c4 = r.c4.max(rel(v.c4, v0.c4));
        if let (Some(d), Some(a), Some(b)) = (r.h.as_mut(), v.h, v0.h) {
            *d = d.max(rel(a, b));
        }
        if let (Some(d), Some(a), Some(b)) = (r.l.as_mut(), v.l, v0.l) {
            *d = d.max(rel(a, b));
        }
    }
    Ok(r)
}

/// Drift at step `h` with the order estimate from a second run at `h/2`.
pub fn drift_with_order(state0: &BodyState, params: &SystemParams, t_final: f64, h: f64) -> Result<DriftReport> {
    let runs = par::map(&[h, 0.5 * h], |&step| {
        integrate(state0, params, t_final, step).and_then(|t| drift_report(&t))
    });
    let mut it = runs.into_iter();
    let mut coarse = it.next().unwrap()?;
    let fine = it.next().unwrap()?;
    let (a, b) = (coarse.max(), fine.max());
    coarse.order = (a > 0.0 && b > 0.0).then(|| (a / b).log2());
    Ok(coarse)
}
