use thiserror::Error;

/// Errors raised by the numeric kernels and the geometry builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series did not converge within {max_terms} terms (tail bound {tail_bound:e})")]
    NonConvergent { max_terms: usize, tail_bound: f64 },

    #[error("divergent input: {0}")]
    DivergentInput(String),

    #[error("index {index} is outside the domain of weight `{weight}`")]
    InvalidIndex { index: usize, weight: String },

    #[error("incompatible weight: {0}")]
    IncompatibleWeight(String),

    #[error("evaluation point {0} coincides with a pole")]
    PoleHit(String),

    #[error("z = 1 is a branch point of (1 - 1/z)^d for d = {0}")]
    BranchPoint(f64),

    #[error("contour grid too coarse: refinement changed a coefficient by {change:e} (tolerance {tolerance:e})")]
    GridTooCoarse { change: f64, tolerance: f64 },

    #[error("divergent geometry: {0}")]
    Divergent(String),

    #[error("degenerate metric: |det g| = {det:e} below threshold {threshold:e}")]
    DegenerateMetric { det: f64, threshold: f64 },

    #[error("finite-difference stencil leaves the unit disk (max modulus reached {reach})")]
    StepTooLarge { reach: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
