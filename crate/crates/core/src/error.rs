use thiserror::Error;

use crate::space::Axiom;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed rational {0:?}")]
    MalformedRational(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),

    #[error("distance table is {rows}x? but there are {points} points")]
    TableShape { rows: usize, points: usize },
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("space has no points")]
    EmptySpace,
    #[error("{axiom} violated at {witness}")]
    Axiom { axiom: Axiom, witness: String },

    #[error("unknown point label {0:?}")]
    UnknownLabel(String),
    #[error("no value for point {0:?}")]
    MissingValue(String),
    #[error("objects live over different metric spaces")]
    SpaceMismatch,

    #[error("step function has no pieces")]
    EmptyPieces,
    #[error("breakpoint {0} lies outside [0,1]")]
    BreakpointOutOfRange(String),
    #[error("breakpoints must be nondecreasing from 0 to 1")]
    BadBreakpoints,
    #[error("{breakpoints} breakpoints cannot carry {values} values")]
    PieceCount { breakpoints: usize, values: usize },
    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("invalid window ({a}, {b})")]
    BadWindow { a: String, b: String },
    #[error("functional family is empty")]
    EmptyFamily,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid simplex weights: {0}")]
    BadWeights(String),

    #[error("unsupported dimension {0}; only 1 and 2 are built")]
    UnsupportedDimension(usize),
    #[error("point {0} is not in the open cube")]
    NotInterior(String),
    #[error("point {0} is not in the cube")]
    OutsideCube(String),
    #[error("no boundary value at {0}")]
    MissingBoundaryValue(String),

    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("document error: {0}")]
    Document(String),
}

impl Error {
    pub(crate) fn out_of_range(
        name: &'static str,
        value: impl std::fmt::Display,
        range: &'static str,
    ) -> Self {
        Error::OutOfRange {
            name,
            value: value.to_string(),
            range,
        }
    }
}
