use std::path::PathBuf;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid graph spec: {0}")]
    InvalidSpec(String),

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },

    #[error("expected two distinct nodes, got {0} twice")]
    SameNode(NodeId),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("configuration has {got} states but graph has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("rule {rule} is not enabled at node {node}")]
    RuleNotEnabled { node: NodeId, rule: &'static str },

    #[error("oracle limited to {limit} nodes, graph has {n}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("unknown {what} `{token}`")]
    UnknownToken { what: &'static str, token: String },

    #[error("daemon `{daemon}` cannot drive a {needed} step")]
    WrongDaemonMode { daemon: String, needed: &'static str },

    #[error("run did not converge: {0}")]
    NonConvergence(String),

    #[error("{0}")]
    Invalid(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Errors caused by malformed user input (files, tokens, parameters),
    /// as opposed to failed properties or aborted runs.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_)
                | Error::Parse { .. }
                | Error::UnknownToken { .. }
                | Error::LengthMismatch { .. }
                | Error::NodeOutOfRange { .. }
                | Error::WrongDaemonMode { .. }
                | Error::Invalid(_)
                | Error::Io { .. }
                | Error::Csv { .. }
        )
    }
}
