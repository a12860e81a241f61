use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate shadow: projected points are collinear or coincident")]
    DegenerateShadow,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported method: {0}")]
    UnsupportedMethod(String),

    #[error("point ({theta}, {phi}) lies outside every branch of the fundamental domain")]
    OutOfDomain { theta: f64, phi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
