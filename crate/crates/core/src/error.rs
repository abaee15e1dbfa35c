use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state has no levels")]
    EmptyState,

    #[error("level {index}: non-finite {field} ({value})")]
    NonFinite {
        index: usize,
        field: &'static str,
        value: f64,
    },

    #[error("level {index}: negative population {population}")]
    NegativePopulation { index: usize, population: f64 },

    #[error("populations sum to {sum}, which deviates from 1 by more than {tolerance}")]
    Normalization { sum: f64, tolerance: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("infeasible moments: weight of level {level} would be {weight}")]
    InfeasibleMoments { level: usize, weight: f64 },

    #[error("{context}: no convergence after {iterations} iterations (last step {last_step})")]
    NoConvergence {
        context: &'static str,
        iterations: usize,
        last_step: f64,
    },

    #[error("{context}: root not bracketed on [{lo}, {hi}] (f = {f_lo}, {f_hi})")]
    Bracket {
        context: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("tangency check failed for q = {q}: line falls below 1 - cos x by {deficit} at x = {x}")]
    Domination { q: f64, x: f64, deficit: f64 },

    #[error("q optimisation hit the search boundary q = {q} at x = {x}")]
    BoundaryMaximizer { q: f64, x: f64 },

    #[error("unknown scenario '{0}' (expected a, b or c)")]
    UnknownScenario(String),

    #[error("emitted dataset violates its magnitude floor at t = {t} by {excess}")]
    DatasetInvariant { t: f64, excess: f64 },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
