use std::path::{Path, PathBuf};

use clebsch::actions::{actions, verify_action_derivatives, Cycle};
use clebsch::dynamics::{drift_with_order, integrate};
use clebsch::integrals::{
    compute_integrals, kirchhoff_rhs, lie_poisson_bracket, pencil_field, Integral, IntegralValues, Observable,
};
use clebsch::kummer::{DoublePoint, KummerSurface, QuadraticPairInfo};
use clebsch::linearize::{curve_from_c, linearization_residual, BranchPoint};
use clebsch::special::{axis_condition_residual, delta_family_from_sigma, subspace_invariance_test, DeltaFamily, Subspace};
use clebsch::{par, BodyState};
use log::info;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::io::{self, QuarticResidualRow, SeparationRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Simulate,
    Invariants,
    Linearize,
    Kummer,
    Actions,
    Special,
}

/// Why a run stopped. Maps onto the process exit status.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Io(String),
    Numerical(clebsch::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Numerical(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "invalid-config",
            RunError::Io(_) => "io",
            RunError::Numerical(e) if e.is_numerical() => "numerical-refusal",
            RunError::Numerical(_) => "invalid-config",
        }
    }

    pub fn message(&self) -> String {
        match self {
            RunError::Config(m) | RunError::Io(m) => m.clone(),
            RunError::Numerical(e) => e.to_string(),
        }
    }
}

impl From<clebsch::Error> for RunError {
    fn from(e: clebsch::Error) -> Self {
        RunError::Numerical(e)
    }
}

fn io_err(e: impl std::fmt::Display) -> RunError {
    RunError::Io(e.to_string())
}

/// Largest normalized bracket over one pair of integrals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub a: String,
    pub b: String,
    /// `max |{A, B}| / (|grad A| |grad B|)` over the samples.
    pub max_normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantsReport {
    pub samples: usize,
    pub seed: u64,
    pub pairs: Vec<PairReport>,
    /// Largest relative gap between the pencil field and Kirchhoff's
    /// equations; absent when the pencil has no physical member.
    pub field_equivalence: Option<f64>,
    pub initial_integrals: IntegralValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KummerSummary {
    pub c3: f64,
    pub c4: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub d: [f64; 3],
    pub point_count: usize,
    pub all_certified: bool,
    pub quadratic_pairs: Vec<QuadraticPairInfo>,
    /// Largest relative quartic residual along the run; absent when the
    /// levels were given explicitly.
    pub max_quartic_residual: Option<f64>,
}

pub const CYCLE_CONVENTION: &str = "sorted-endpoints: gamma1 = b1 -> b2, gamma2 = b4 -> b3";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionsReport {
    pub c3: f64,
    pub c4: f64,
    pub branch_points: Vec<BranchPoint>,
    pub cycles: [Cycle; 2],
    pub cycle_convention: String,
    pub a1: f64,
    pub a2: f64,
    pub degenerate: bool,
    /// `psi[i][j]` as `[re, im]`; absent on a degenerate curve.
    pub psi: Option<[[Complex64; 2]; 2]>,
    pub det_psi: Option<Complex64>,
    /// Largest gap between finite-difference action derivatives and `psi`.
    pub derivative_check: Option<f64>,
    pub fd_step: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    #[serde(rename = "type")]
    pub kind: String,
    pub axis: Option<usize>,
    pub family: Option<DeltaFamily>,
    pub condition_residual: f64,
    pub invariance_deviation: f64,
}

/// Runs `cmd` and writes its artifacts into `out`. Returns the file names.
pub fn run(cmd: Command, cfg: &RunConfig, out: &Path, workers: Option<usize>) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(out).map_err(io_err)?;
    par::with_workers(workers, || match cmd {
        Command::Simulate => simulate(cfg, out),
        Command::Invariants => invariants(cfg, out),
        Command::Linearize => linearize(cfg, out),
        Command::Kummer => kummer(cfg, out),
        Command::Actions => action_report(cfg, out),
        Command::Special => special(cfg, out),
    })
}

fn put_json<T: Serialize + ?Sized>(out: &Path, name: &str, v: &T, files: &mut Vec<PathBuf>) -> Result<(), RunError> {
    io::write_json(&out.join(name), v).map_err(io_err)?;
    files.push(name.into());
    Ok(())
}

fn put_csv<T: Serialize>(out: &Path, name: &str, rows: &[T], files: &mut Vec<PathBuf>) -> Result<(), RunError> {
    io::write_csv(&out.join(name), rows).map_err(io_err)?;
    files.push(name.into());
    Ok(())
}

fn simulate(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, RunError> {
    let s0 = cfg.initial_state();
    let tr = integrate(&s0, &cfg.params, cfg.t_final, cfg.h)?;
    info!("integrated {} steps", tr.len());
    let drift = drift_with_order(&s0, &cfg.params, cfg.t_final, cfg.h)?;
    info!("max drift {:e}", drift.max());
    let mut files = Vec::new();
    put_csv(out, "trajectory.csv", &io::trajectory_rows(&tr), &mut files)?;
    put_json(out, "drift.json", &drift, &mut files)?;
    Ok(files)
}

fn named(q: &clebsch::SystemParams) -> Vec<(&'static str, Integral)> {
    let mut v = vec![("C1", Integral::C1), ("C2", Integral::C2), ("C3", Integral::C3(*q)), ("C4", Integral::C4(*q))];
    if let Ok(ph) = q.derive_physical() {
        v.push(("H", Integral::H(ph)));
        v.push(("L", Integral::L(ph)));
    }
    v
}

fn invariants(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, RunError> {
    let q = cfg.params;
    let states = clebsch::scenario::leaf_states(cfg.invariants.samples, cfg.seed, cfg.k_radius);
    let obs = named(&q);
    let per_state = par::map(&states, |s| {
        let mut v = Vec::new();
        for i in 0..obs.len() {
            for j in i + 1..obs.len() {
                let br = lie_poisson_bracket(&obs[i].1, &obs[j].1, s).abs();
                let g = obs[i].1.gradient(s).norm() * obs[j].1.gradient(s).norm();
                v.push(if g > 0.0 { br / g } else { br });
            }
        }
        v
    });
    let mut pairs = Vec::new();
    let mut k = 0;
    for i in 0..obs.len() {
        for j in i + 1..obs.len() {
            let max_normalized = per_state.iter().map(|v| v[k]).fold(0.0, f64::max);
            pairs.push(PairReport { a: obs[i].0.into(), b: obs[j].0.into(), max_normalized });
            k += 1;
        }
    }
    let field_equivalence = q.derive_physical().ok().map(|ph| {
        par::map(&states, |s| {
            let (u, v) = (pencil_field(s, &q).to_array(), kirchhoff_rhs(s, &ph).to_array());
            let scale = u.iter().chain(&v).fold(f64::MIN_POSITIVE, |m, x| m.max(x.abs()));
            (0..6).map(|i| (u[i] - v[i]).abs() / scale).fold(0.0, f64::max)
        })
        .into_iter()
        .fold(0.0, f64::max)
    });
    let report = InvariantsReport {
        samples: states.len(),
        seed: cfg.seed,
        pairs,
        field_equivalence,
        initial_integrals: compute_integrals(&cfg.initial_state(), &q),
    };
    let mut files = Vec::new();
    put_json(out, "invariants.json", &report, &mut files)?;
    Ok(files)
}

fn linearize(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, RunError> {
    let tr = integrate(&cfg.initial_state(), &cfg.params, cfg.t_final, cfg.h)?;
    let lin = linearization_residual(&tr)?;
    info!("residuals {:e} {:e}", lin.report.max_residual_1, lin.report.max_residual_2);
    let coords: Vec<SeparationRow> = lin.coords.iter().map(|&(t, x1, x2)| SeparationRow { t, x1, x2 }).collect();
    let mut files = Vec::new();
    put_json(out, "residual.json", &lin.report, &mut files)?;
    put_csv(out, "separation.csv", &coords, &mut files)?;
    put_csv(out, "residual_series.csv", &lin.series, &mut files)?;
    Ok(files)
}

fn levels(cfg: &RunConfig) -> (f64, f64) {
    match cfg.levels {
        Some(l) => (l.c3, l.c4),
        None => {
            let iv = compute_integrals(&cfg.initial_state(), &cfg.params);
            (iv.c3, iv.c4)
        }
    }
}

fn kummer(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, RunError> {
    let (c3, c4) = levels(cfg);
    let surf = KummerSurface::new(&cfg.params, c3, c4);
    let rep = surf.double_points();
    let mut files = Vec::new();
    let mut max_res = None;
    if cfg.levels.is_none() {
        let tr = integrate(&cfg.initial_state(), &cfg.params, cfg.t_final, cfg.h)?;
        let rows = tr
            .times
            .iter()
            .zip(&tr.states)
            .map(|(&t, s)| {
                let x = surf.state_to_kummer(s, 1e-8)?;
                Ok(QuarticResidualRow { t, x1: x[0], x2: x[1], x3: x[2], x4: x[3], residual: surf.relative_residual(&x) })
            })
            .collect::<clebsch::Result<Vec<_>>>()?;
        max_res = Some(rows.iter().map(|r| r.residual).fold(0.0, f64::max));
        put_csv(out, "quartic_residual.csv", &rows, &mut files)?;
    }
    let f = &surf.form;
    let summary = KummerSummary {
        c3,
        c4,
        l: f.l,
        m: f.m,
        n: f.n,
        d: f.d,
        point_count: rep.points.len(),
        all_certified: rep.points.iter().all(|p| p.certified),
        quadratic_pairs: rep.quadratic_pairs.clone(),
        max_quartic_residual: max_res,
    };
    let points: &[DoublePoint] = &rep.points;
    put_json(out, "double_points.json", points, &mut files)?;
    put_json(out, "kummer_summary.json", &summary, &mut files)?;
    Ok(files)
}

fn action_report(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, RunError> {
    let (c3, c4) = levels(cfg);
    let opts = cfg.actions;
    let curve = curve_from_c(&cfg.params, c3, c4);
    let a = actions(&curve, opts.quad_tol)?;
    let (psi, derivative_check, note) = if curve.degenerate {
        (None, None, Some(format!("branch points coincide ({:?}); the period matrix is singular here", curve.collisions)))
    } else {
        let chk = verify_action_derivatives(&cfg.params, c3, c4, opts.fd_step, opts.quad_tol)?;
        (Some(chk.psi), Some(chk.max_error), None)
    };
    let report = ActionsReport {
        c3,
        c4,
        branch_points: curve.real_branch_points(),
        cycles: a.cycles,
        cycle_convention: CYCLE_CONVENTION.into(),
        a1: a.a1,
        a2: a.a2,
        degenerate: curve.degenerate,
        psi: psi.map(|p| p.psi),
        det_psi: psi.map(|p| p.det()),
        derivative_check,
        fd_step: opts.fd_step,
        note,
    };
    let mut files = Vec::new();
    put_json(out, "actions.json", &report, &mut files)?;
    Ok(files)
}

fn axis_state(axis: usize, k: f64, theta: f64) -> BodyState {
    let a = axis - 1;
    let mut s = BodyState::zero();
    s.k[a] = k;
    s.p[(a + 1) % 3] = theta.cos();
    s.p[(a + 2) % 3] = theta.sin();
    s
}

fn special(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, RunError> {
    let q = cfg.params;
    let sp = cfg.special;
    let fam = delta_family_from_sigma(&q, sp.sigma_prime.unwrap_or(0.5 * (q.j()[1] + q.j()[2])))?;
    let delta_state = fam.sample_state(&mut clebsch::scenario::rng(cfg.seed));
    let jobs: Vec<Option<usize>> = vec![Some(1), Some(2), Some(3), None];
    let run_one = |job: &Option<usize>| -> clebsch::Result<FamilyReport> {
        let (state, sub, residual, kind) = match *job {
            Some(axis) => {
                let s = axis_state(axis, sp.axis_k, sp.axis_angle);
                let iv = compute_integrals(&s, &q);
                let r = axis_condition_residual(&q, iv.c3, iv.c4, axis).abs();
                (s, Subspace::Axis { axis }, r, "axis")
            }
            None => {
                let iv = compute_integrals(&delta_state, &q);
                let s2 = fam.sigma_prime;
                let r = (iv.c3 - 2.0 * s2).abs().max((iv.c4 - s2 * s2).abs()).max((iv.c3 * iv.c3 - 4.0 * iv.c4).abs());
                (delta_state, Subspace::Delta { delta: fam.delta }, r, "delta")
            }
        };
        let dev = subspace_invariance_test(|x| pencil_field(x, &q), &sub, &state, cfg.t_final, cfg.h)?;
        Ok(FamilyReport {
            kind: kind.into(),
            axis: *job,
            family: job.is_none().then_some(fam),
            condition_residual: residual,
            invariance_deviation: dev,
        })
    };
    let reports = par::map(&jobs, run_one).into_iter().collect::<clebsch::Result<Vec<_>>>()?;
    let mut files = Vec::new();
    put_json(out, "special.json", &reports, &mut files)?;
    Ok(files)
}
