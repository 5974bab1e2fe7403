//! Finite-dimensional numerics for prevalence and shyness.
//!
//! A set of functions is *prevalent* when some compactly supported measure
//! gives every translate of its complement measure zero. At desk scale the
//! measure is Lebesgue measure on a finite-dimensional *probe* subspace, and
//! this crate turns that definition into computations:
//!
//! * [`polyjet`]: sparse polynomial maps and their k-jets
//! * [`probes`]: probe subspaces, including the Hermite 1-jet basis
//! * [`measures`]: discrete measures, convolution, interval sets, densities
//! * [`dynamics`]: periodic orbits, hyperbolicity, circle-map tongues,
//!   box-counting and injectivity checks
//! * [`hopf`]: nondegeneracy of Andronov-Hopf bifurcations
//! * [`engine`]: Monte-Carlo failure-measure estimation along probes
//! * [`cli`]: the batch front end behind the `prevlab` binary

pub mod cli;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod hopf;
pub mod linalg;
pub mod measures;
pub mod polyjet;
pub mod probes;
pub mod seeding;

pub use error::{Error, Result};
