use thiserror::Error;

use crate::channel::RatePair;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must be {expected}, got {value}")]
    Domain {
        what: &'static str,
        expected: &'static str,
        value: f64,
    },

    #[error("operation requires a {required} channel")]
    WrongRegime { required: &'static str },

    #[error("region and channel parameters do not belong together: {0}")]
    Mismatch(&'static str),

    #[error("degenerate region: {0}")]
    Degenerate(&'static str),

    #[error("disagreement point ({}, {}) lies outside the feasible set", .0.r1, .0.r2)]
    OutsideRegion(RatePair),

    #[error("bargaining problem is not essential")]
    NotEssential,

    #[error("disagreement point is not strictly inside constraint `{0}`")]
    HypothesisViolated(&'static str),

    #[error("bargaining problem is not regular")]
    NotRegular,

    #[error("theta = ({}, {}, {}) is outside the strong, weak and mixed regimes", .0[0], .0[1], .0[2])]
    UnsupportedRegime([f64; 3]),

    #[error("breakdown probabilities ({0}, {1}) make the equilibrium system singular")]
    Singular(f64, f64),

    #[error("play-out reached the {0}-round cap")]
    RoundLimit(u64),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects non-finite values and values for which `ok` is false.
pub(crate) fn check_range(what: &'static str, expected: &'static str, value: f64, ok: bool) -> Result<f64> {
    if value.is_finite() && ok {
        Ok(value)
    } else {
        Err(Error::Domain {
            what,
            expected,
            value,
        })
    }
}
