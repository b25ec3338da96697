use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// No odd tile count makes every tile satisfy its far-field condition.
    #[error("infeasible tiling: d0 = {d0} m needs tiles finer than single elements (max {max_tiles} per axis)")]
    InfeasibleTiling { d0: f64, max_tiles: usize },

    /// The estimator could not produce a finite estimate.
    #[error("estimation failed: {0}")]
    EstimationFailure(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
