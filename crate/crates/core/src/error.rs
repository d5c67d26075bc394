use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("duplicate {what} `{key}`")]
    Duplicate { what: &'static str, key: String },

    #[error("{0}")]
    Validation(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("profile incomplete: {country} has no {kind} vector")]
    ProfileIncomplete { country: String, kind: String },

    #[error("missing profile for publisher `{0}`")]
    MissingProfile(String),

    #[error("empty group: {0}")]
    EmptyGroup(String),

    #[error("unsplittable class {class}: only {count} instance(s)")]
    Unsplittable { class: usize, count: usize },

    #[error("training diverged at epoch {epoch}: loss is {loss}")]
    Diverged { epoch: usize, loss: f64 },

    #[error("{0}")]
    Parse(String),

    #[error("artifact {path} was produced by config {found}, expected {expected}")]
    ConfigMismatch {
        path: PathBuf,
        found: String,
        expected: String,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
