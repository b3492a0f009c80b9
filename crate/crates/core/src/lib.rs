//! Metric projection onto simplicial cones `K = A·R^m₊`.
//!
//! The projection of `z` is `A·u⁺`, where `u` is the unique root of
//!
//! ```text
//! F(x) = (AᵀA − I)·x⁺ + x − Aᵀz
//! ```
//!
//! [`newton::solve`] finds `u` with a semi-smooth Newton iteration. Two
//! independent routes check it: [`oracle::enumerate_project`] tries every
//! sign pattern for small `m`, and [`lcp::lemke_solve`] solves the
//! equivalent complementarity problem `v = AᵀA·u + (−Aᵀz)`.
//!
//! ```
//! use simcone::{linalg::Matrix, cone::make_cone, newton::{solve, SolverConfig, Status}};
//!
//! let cone = make_cone(Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]])?)?;
//! let report = solve(&cone, &[0.0, 1.0], &SolverConfig::default())?;
//! assert_eq!(report.status, Status::SignStable);
//! assert_eq!(report.projection, vec![0.5, 0.5]);
//! # Ok::<(), simcone::Error>(())
//! ```
//!
//! Batch work (oracle enumeration, the contraction-condition pattern sweep, benchmark
//! suites) runs on rayon when the default `parallel` feature is on.

pub mod bench;
pub mod cone;
pub mod error;
pub mod instance;
pub mod lcp;
pub mod linalg;
pub mod newton;
pub mod oracle;
pub mod par;
pub mod rng;

pub use error::{Error, Result};
