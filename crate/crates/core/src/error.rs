// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("fft size {0} is not a power of two >= 2")]
    FftSize(usize),

    #[error("no operator class executes `{symbol}` (node {node})")]
    UncoveredOperation { symbol: String, node: NodeId },

    #[error("invalid operator library: {0}")]
    Library(String),

    #[error("invalid I/O constraints: {0}")]
    IoConstraint(String),

    #[error("invalid memory mapping: {0}")]
    Mapping(String),

    #[error("unsupported graph construct: {0}")]
    Unsupported(String),

    #[error("brute-force oracle limited to {limit} operations, got {actual}")]
    InstanceTooLarge { limit: usize, actual: usize },

    #[error("search exhausted: {0}")]
    Search(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
