//! Generalized reinforced random walks on ℤ.
//!
//! A walker sitting at site `x` steps right with probability `f(α)`, where `α`
//! is the proportion of past departures from `x` that went right (up to
//! initial weights). Each site therefore carries its own two-colour urn
//! process driven by the reinforcement function `f`.
//!
//! The crate is organised by subsystem:
//!
//! - [`funcs`]: parse, evaluate and analyse reinforcement functions, and the
//!   rescaled family `f_u`.
//! - [`urn`]: urn simulation and its exact finite-horizon law.
//! - [`drift`]: the per-site drift series and estimators of its limit.
//! - [`coupling`]: shared-uniform couplings of urn processes.
//! - [`walk`]: walk simulation, the nonnegative-side martingale functionals,
//!   and an exact small-horizon oracle.
//! - [`criteria`]: recurrence/transience classification.
//! - [`transition`]: threshold search along the `u` and `l` axes.
//! - [`cli`]: the `rrw` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coupling;
pub mod criteria;
pub mod drift;
pub mod error;
pub mod funcs;
pub mod rng;
pub mod stats;
pub mod transition;
pub mod urn;
pub mod walk;

pub use error::{Error, ErrorKind, Result};
pub use funcs::{FixedPointReport, ReinforcementFunction};
pub use urn::UrnState;
pub use walk::EnvironmentSpec;
