//! The Clebsch top (a rigid body in an ideal fluid) restricted to Weber's
//! symplectic leaf `<K,p> = 0`, `|p| = 1`.
//!
//! Modules, bottom-up:
//! - [`params`]: moduli `j`, pencil weights, physical constants, level data.
//! - [`integrals`]: `C1..C4`, `H`, `L`, the Lie-Poisson bracket and fields.
//! - [`dynamics`]: fixed-step RK4 with drift monitoring.
//! - [`linearize`]: separation coordinates and the genus-two curve.
//! - [`kummer`]: the quartic surface and its certified double points.
//! - [`actions`]: period matrix and action integrals by quadrature.
//! - [`special`]: invariant three-dimensional subspaces.

#![allow(clippy::needless_range_loop, clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod actions;
pub mod dynamics;
pub mod error;
pub mod integrals;
pub mod kummer;
pub mod linearize;
pub mod par;
pub mod params;
pub mod scenario;
pub mod special;

pub use error::{Error, Result};
pub use integrals::{BodyState, IntegralValues};
pub use params::{SpectralData, SystemParams};
