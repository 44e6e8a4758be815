//! Modulational stability of periodic traveling waves for KdV-type equations.
//!
//! The crate decides whether periodic traveling waves of
//! `u_t + u_xxx + f(u)_x = 0` and of nonlocal analogues are modulationally
//! stable. It provides:
//!
//! * [`equations`]: equation definitions, the effective potential and
//!   classification of the profile ODE parameters `(a, E, c)`;
//! * [`waves`]: loop-integral quadrature for the period, mass, momentum and
//!   Hamiltonian, profile evaluation and explicit elliptic-function waves;
//! * [`picard_fuchs`]: the Sylvester-matrix system expressing the singular
//!   moments through regular ones, and the parameter Jacobian of `(T, M, P)`;
//! * [`mi_index`]: the instability index `Δ_MI`, the effective dispersion
//!   cubic and per-equation closed forms;
//! * [`bo`]: the explicit Benjamin–Ono wave family;
//! * [`smallamp`]: small-amplitude theory for nonlocal dispersion symbols;
//! * [`bloch`]: an independent Floquet–Bloch spectral verifier.

pub mod bloch;
pub mod bo;
pub mod conventions;
pub mod equations;
pub mod error;
pub mod linalg;
pub mod mi_index;
pub mod picard_fuchs;
pub mod poly;
pub mod quadrature;
pub mod sampling;
pub mod smallamp;
pub mod waves;

pub use error::{Error, Result};

/// Version of this library, recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
