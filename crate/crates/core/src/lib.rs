//! Multi-period routing and spectrum assignment for elastic optical networks.
//!
//! A planning round receives `u` predicted bit-rates per connection and
//! provisions the spectrum that holds until the next round. Connections are
//! placed either by an exact integer program ([`ilp`]) or by the first-fit
//! heuristics MMD-SA and MAD-SA ([`heuristics`]). The [`planner`] replays a
//! test period round by round and scores every allocation against the true
//! 5-minute fluctuations.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod cli;
pub mod heuristics;
pub mod ilp;
pub mod planner;
pub mod spectrum;
pub mod topology;
pub mod traffic;

/// Connection identifier; equals the index of the connection's source node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConnId(pub usize);

impl fmt::Display for ConnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Topology(#[from] topology::TopologyError),
    #[error(transparent)]
    Traffic(#[from] traffic::TrafficError),
    #[error(transparent)]
    Ilp(#[from] ilp::IlpError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("data: {0}")]
    Data(String),
    #[error("epoch {epoch}: invalid network state: {detail}")]
    InvalidState { epoch: usize, detail: String },
    #[error("internal: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit status: 2 for configuration problems, 3 for bad or
    /// missing input data, 1 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Ilp(ilp::IlpError::BadWeights(_)) => 2,
            Error::InvalidState { .. } | Error::Internal(_) => 1,
            _ => 3,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io { path: path.display().to_string(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
