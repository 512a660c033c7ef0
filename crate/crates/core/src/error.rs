use thiserror::Error;

use crate::cauchy::Violation;
use crate::tree::BallId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("ball {0} does not belong to this tree")]
    UnknownBall(BallId),

    #[error("measure of ball {ball} is {found}, but its maximal subballs sum to {expected}")]
    Additivity {
        ball: BallId,
        expected: f64,
        found: f64,
    },

    #[error("malformed tree: {0}")]
    Structure(String),

    #[error("ball {0} has fewer than two maximal subballs of positive measure")]
    DegenerateBall(BallId),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("an upward tail sum needs a scale-homogeneous symbol on a p-adic tree")]
    UnsupportedTail,

    #[error("symbol tail diverges: {0}")]
    Divergence(String),

    #[error("anchor ball {0:?} has zero measure")]
    Anchor(Vec<BallId>),

    #[error("necessary solvability conditions fail at {} index(es)", .0.len())]
    Unsolvable(Vec<Violation>),

    #[error("ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("{location}: {message}")]
    Parse { location: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Unsolvable(_) => 3,
            Error::IllConditioned(_) => 4,
            _ => 2,
        }
    }
}
