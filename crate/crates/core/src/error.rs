use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("surface is not spacelike at (u, v) = ({u}, {v}): E = {e}, EG - F^2 = {det}")]
    NotSpacelike { u: f64, v: f64, e: f64, det: f64 },

    #[error("normal frame construction failed: {0}")]
    DegenerateFrame(String),

    #[error("admissibility violated: {condition} fails at {location}")]
    Admissibility { condition: String, location: String },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("curvature mismatch: max |kbar^2 + 1/(2a)| = {max_deviation:e}")]
    CurvatureMismatch { max_deviation: f64 },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("projection matrix has rank {rank} < 3")]
    SingularProjection { rank: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
