//! Bell inequalities, local hidden variable models and two-qubit quantum
//! correlators.
//!
//! - [`quantum`]: singlet and other two-qubit pure states, spin observables,
//!   Born-rule correlators and outcome sampling.
//! - [`lhv`]: deterministic strategies, finite mixtures, exact classical
//!   bounds by enumeration, Monte Carlo estimation, single-spin model.
//! - [`inequalities`]: the three-observable and CHSH expressions, violation
//!   reports and the quantum CHSH maximum search.
//! - [`scan`]: the angle-parametrized three-observable margin over the
//!   `(θ, θ′)` plane.

pub mod error;
pub mod inequalities;
pub mod lhv;
pub mod quantum;
pub mod rng;
pub mod scan;

pub use error::{Error, Result};
