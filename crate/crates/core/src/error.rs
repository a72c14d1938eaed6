use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not skew-symmetric: {0}")]
    NotSkew(String),

    #[error("invalid canonical block: {0}")]
    InvalidBlock(String),

    #[error("non-finite scalar encountered")]
    NonFinite,

    #[error("invalid star pattern: {0}")]
    InvalidPattern(String),

    /// The tangent space and the pattern space do not form a direct sum that
    /// covers every skew pair, so coset representatives are not unique.
    #[error(
        "tangent space and pattern are not complementary \
         (rank {rank_t} + params {params} vs ambient {ambient}, intersection {intersection_dim})"
    )]
    NotComplementary {
        rank_t: usize,
        params: usize,
        ambient: usize,
        intersection_dim: usize,
    },

    #[error("correction system is inconsistent (residual {residual:.3e})")]
    InconsistentStep { residual: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
