//! Parameter algebra: validation, the pencil-to-physical map and the
//! level-dependent constants (l, m, n), (j4, j5), (d1, d2, d3).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for identity checks.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Moduli `j1 < j2 < j3` and the pencil weights `(lambda, lambda_prime)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SystemParams {
    j: [f64; 3],
    lambda: f64,
    lambda_prime: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    j: [f64; 3],
    lambda: f64,
    lambda_prime: f64,
}

impl TryFrom<RawParams> for SystemParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        SystemParams::new(r.j, r.lambda, r.lambda_prime)
    }
}

impl From<SystemParams> for RawParams {
    fn from(p: SystemParams) -> Self {
        RawParams { j: p.j, lambda: p.lambda, lambda_prime: p.lambda_prime }
    }
}

/// Physical inertias `I` and virtual masses `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Physical {
    pub inertia: [f64; 3],
    pub mass: [f64; 3],
}

impl SystemParams {
    pub fn new(j: [f64; 3], lambda: f64, lambda_prime: f64) -> Result<Self> {
        if !(j.iter().all(|v| v.is_finite()) && lambda.is_finite() && lambda_prime.is_finite()) {
            return Err(Error::InvalidParams("non-finite value".into()));
        }
        if !(j[0] < j[1] && j[1] < j[2]) {
            return Err(Error::InvalidParams(format!(
                "j must be strictly increasing, got {:?}",
                j
            )));
        }
        Ok(SystemParams { j, lambda, lambda_prime })
    }

    pub fn j(&self) -> [f64; 3] {
        self.j
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn lambda_prime(&self) -> f64 {
        self.lambda_prime
    }

    /// Same moduli, different pencil weights.
    pub fn with_pencil(&self, lambda: f64, lambda_prime: f64) -> Result<Self> {
        SystemParams::new(self.j, lambda, lambda_prime)
    }

    /// `j1 + j2 + j3`.
    pub fn trace(&self) -> f64 {
        self.j.iter().sum()
    }

    /// Product of the two moduli other than `j_alpha` (`j1 j2 j3 / j_alpha`
    /// without the division, so a vanishing modulus is harmless).
    pub fn cofactor(&self, alpha: usize) -> f64 {
        self.j[(alpha + 1) % 3] * self.j[(alpha + 2) % 3]
    }

    /// `-(j1-j2)(j2-j3)(j3-j1)`; nonzero for validated parameters.
    pub fn det(&self) -> f64 {
        let [a, b, c] = self.j;
        -(a - b) * (b - c) * (c - a)
    }

    /// Pencil coefficients `n_alpha = lambda + lambda' j_alpha`.
    pub fn n(&self) -> [f64; 3] {
        self.j.map(|ja| self.lambda + self.lambda_prime * ja)
    }

    /// Pencil coefficients `n'_alpha = lambda (s - j_alpha) + lambda' j_beta j_gamma`.
    pub fn n_prime(&self) -> [f64; 3] {
        let s = self.trace();
        std::array::from_fn(|a| self.lambda * (s - self.j[a]) + self.lambda_prime * self.cofactor(a))
    }

    /// `I_alpha = 1/(2 n_alpha)`, `m_alpha = 1/(2 n'_alpha)`.
    pub fn derive_physical(&self) -> Result<Physical> {
        let n = self.n();
        let np = self.n_prime();
        for a in 0..3 {
            if n[a] == 0.0 {
                return Err(Error::DegeneratePencil { which: "n", alpha: a + 1 });
            }
            if np[a] == 0.0 {
                return Err(Error::DegeneratePencil { which: "n'", alpha: a + 1 });
            }
        }
        Ok(Physical { inertia: n.map(|v| 0.5 / v), mass: np.map(|v| 0.5 / v) })
    }

    /// `d1 = 1/(j3-j2)`, `d2 = 1/(j1-j3)`, `d3 = 1/(j2-j1)`.
    pub fn d_params(&self) -> [f64; 3] {
        let [a, b, c] = self.j;
        [1.0 / (c - b), 1.0 / (a - c), 1.0 / (b - a)]
    }

    /// `D_alpha = (j_alpha - j_beta)(j_alpha - j_gamma)`.
    pub fn node_products(&self) -> [f64; 3] {
        std::array::from_fn(|a| {
            (self.j[a] - self.j[(a + 1) % 3]) * (self.j[a] - self.j[(a + 2) % 3])
        })
    }

    /// Weights `(l, m, n)` with `sum w = 1`, `sum (s - j_a) w_a = c3`,
    /// `sum j_b j_c w_a = c4`. Closed form: `w_a = Psi(j_a) / D_a`.
    pub fn compute_lmn(&self, c3: f64, c4: f64) -> [f64; 3] {
        let d = self.node_products();
        std::array::from_fn(|a| {
            let x = self.j[a];
            (x * x - c3 * x + c4) / d[a]
        })
    }
}

/// Clebsch compatibility of physical constants, default tolerance.
pub fn check_clebsch(inertia: [f64; 3], mass: [f64; 3]) -> bool {
    check_clebsch_tol(inertia, mass, DEFAULT_TOL)
}

/// `(I2-I3)/m1 + (I3-I1)/m2 + (I1-I2)/m3 = 0` relative to the largest term.
pub fn check_clebsch_tol(inertia: [f64; 3], mass: [f64; 3], tol: f64) -> bool {
    let [i1, i2, i3] = inertia;
    let terms = [(i2 - i3) / mass[0], (i3 - i1) / mass[1], (i1 - i2) / mass[2]];
    let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    if scale == 0.0 {
        return true;
    }
    (terms.iter().sum::<f64>()).abs() <= tol * scale
}

/// Roots of `x^2 - c3 x + c4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Roots {
    /// Real pair with `j4 <= j5`.
    Real { j4: f64, j5: f64 },
    /// `re -/+ i im`, `im > 0`; `j4` is the one with negative imaginary part.
    Conjugate { re: f64, im: f64 },
}

impl Roots {
    pub fn is_real(&self) -> bool {
        matches!(self, Roots::Real { .. })
    }
    pub fn real(&self) -> Option<(f64, f64)> {
        match *self {
            Roots::Real { j4, j5 } => Some((j4, j5)),
            Roots::Conjugate { .. } => None,
        }
    }
    pub fn sum(&self) -> f64 {
        match *self {
            Roots::Real { j4, j5 } => j4 + j5,
            Roots::Conjugate { re, .. } => 2.0 * re,
        }
    }
    pub fn product(&self) -> f64 {
        match *self {
            Roots::Real { j4, j5 } => j4 * j5,
            Roots::Conjugate { re, im } => re * re + im * im,
        }
    }
}

/// Both roots of `x^2 - c3 x + c4`, cancellation-free.
pub fn roots_j45(c3: f64, c4: f64) -> Roots {
    let half = 0.5 * c3;
    let mut disc = half * half - c4;
    // rounding noise around a double root is snapped to zero
    if disc.abs() <= 4.0 * f64::EPSILON * (half * half).max(c4.abs()) {
        disc = 0.0;
    }
    if disc < 0.0 {
        return Roots::Conjugate { re: half, im: (-disc).sqrt() };
    }
    let r = disc.sqrt();
    let big = half + r.copysign(half);
    let (a, b) = if big == 0.0 { (0.0, 0.0) } else { (big, c4 / big) };
    Roots::Real { j4: a.min(b), j5: a.max(b) }
}

/// Everything that depends on the level `(c3, c4)` but not on the state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub c3: f64,
    pub c4: f64,
    pub lmn: [f64; 3],
    pub roots: Roots,
    pub d: [f64; 3],
}

impl SpectralData {
    pub fn new(params: &SystemParams, c3: f64, c4: f64) -> Self {
        SpectralData {
            c3,
            c4,
            lmn: params.compute_lmn(c3, c4),
            roots: roots_j45(c3, c4),
            d: params.d_params(),
        }
    }
}
