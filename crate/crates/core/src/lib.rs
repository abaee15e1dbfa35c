//! Exact two-time overlaps and quantum speed limits for states with a
//! bounded energy spectrum.
//!
//! * [`spectral`]: states as (energy, population) lists, moments, overlaps,
//!   the time-reversed (dual) state and example constructors.
//! * [`bounds`]: Mandelstam-Tamm, Margolus-Levitin, dual Margolus-Levitin,
//!   bandwidth and Lp bounds, the non-orthogonal envelope, crossover times,
//!   regimes and Popoviciu's inequality.
//! * [`verify`]: orthogonalization finder, envelope checks, the tangency
//!   oracle for `xi`, and the random falsification sweep.
//! * [`figures`]: datasets for the regime diagram and evolution traces.
//! * [`cli`]: the `qsl` command line.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod figures;
pub mod json;
pub mod solve;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
