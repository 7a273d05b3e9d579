//! Werner-parameter estimation from the measurement statistics of one round of
//! bilateral-CNOT entanglement distillation.
//!
//! The crate is split into:
//!
//! - [`qcore`]: a small dense density-matrix engine (4x4 and 16x16) used as the
//!   ground-truth oracle for every closed-form expression.
//! - [`protocol`]: closed-form outcome statistics of one distillation round,
//!   the fidelity map and the inversion from `p00` back to `w`.
//! - [`tomography`]: the single-copy Z⊗Z baseline estimator.
//! - [`bounds`]: Hoeffding tail bounds, minimum sample counts and the
//!   sample-complexity curves comparing the estimators.
//! - [`experiment`]: seeded Monte Carlo execution of the estimation procedure
//!   and a repetition harness for empirical failure rates.
//! - [`cli`]: the command-line front end and its CSV/JSON output formats.
//!
//! ```
//! use werner_distill::{protocol, WernerParam};
//!
//! let w = WernerParam::new(0.4).unwrap();
//! let p00 = protocol::p00_from_w(w);
//! assert!((p00 - 0.34).abs() < 1e-15);
//! let inv = protocol::w_from_p00(p00).unwrap();
//! assert!(!inv.clamped);
//! assert!((inv.w.value() - 0.4).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod format;
pub mod protocol;
pub mod qcore;
pub mod tomography;
pub mod validate;

pub use error::{Error, Result};
pub use qcore::{DensityMatrix, DepolarizingParam, WernerParam};
