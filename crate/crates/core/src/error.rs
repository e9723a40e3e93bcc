use thiserror::Error;

use crate::network::NodeId;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid node id {0}")]
    InvalidNode(NodeId),

    #[error("workflow contains a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("incomplete assignment: sub-task {0} has no assigned agent")]
    IncompleteAssignment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
