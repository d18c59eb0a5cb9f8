use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument {value} outside [-1, 1]")]
    Domain { value: f64 },

    #[error("order m = {m} invalid for degree k = {k}")]
    Order { k: usize, m: i64 },

    #[error("{what}: {detail}")]
    InvalidArgument { what: &'static str, detail: String },

    #[error("grid of {points} points exceeds the cap of {cap}")]
    Resource { points: usize, cap: usize },

    #[error("field is not L2-normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("grid too coarse: need n_phi >= {need_phi} and n_theta >= {need_theta}, have {have_phi} x {have_theta}")]
    GridResolution {
        need_phi: usize,
        need_theta: usize,
        have_phi: usize,
        have_theta: usize,
    },

    #[error("cannot place {count} circles with separation {delta}: {reason}")]
    PackingInfeasible {
        count: usize,
        delta: f64,
        reason: String,
    },

    #[error("Gram matrix is rank deficient (smallest eigenvalue {min_eigenvalue:e})")]
    RankDeficient { min_eigenvalue: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(what: &'static str, detail: impl Into<String>) -> Error {
    Error::InvalidArgument {
        what,
        detail: detail.into(),
    }
}
