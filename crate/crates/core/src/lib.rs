//! Closed-form global-optimal scattering matrices for beyond-diagonal
//! reconfigurable intelligent surfaces (BD-RIS).
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`]: dense eigen/SVD kernels with sorted, phase-pinned outputs.
//! * [`channel`]: scenario geometry, path loss and Rician/Rayleigh fading.
//! * [`synth`]: the closed-form symmetric-unitary synthesis for single-input
//!   single-output links, group assembly, bounds and property validators.
//! * [`design`]: the architecture strategies (single, group, fully connected)
//!   behind one trait, looked up by name.
//! * [`mimo`] and [`multiuser`]: single-user MIMO and weighted multi-user MISO
//!   designs built on top of the SISO synthesis.
//! * [`baselines`] and [`oracle`]: independent references used for
//!   cross-checking.
//! * [`experiments`]: config-driven Monte-Carlo sweeps and the benchmark.

pub mod baselines;
pub mod channel;
pub mod design;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod mimo;
pub mod multiuser;
pub mod oracle;
pub mod synth;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;
/// Complex row vector.
pub type CRow = nalgebra::RowDVector<Complex64>;
/// Dense real matrix.
pub type RMatrix = nalgebra::DMatrix<f64>;
/// Real column vector.
pub type RVector = nalgebra::DVector<f64>;
