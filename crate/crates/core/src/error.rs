use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operators act on different spaces: dim {left} vs dim {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("cannot compose: outer operator has source power {outer_source}, inner operator has target power {inner_target}")]
    GradingMismatch {
        outer_source: usize,
        inner_target: usize,
    },
    #[error("expected grading ({expected_k},{expected_l}), got ({k},{l})")]
    WrongGrading {
        expected_k: usize,
        expected_l: usize,
        k: usize,
        l: usize,
    },
    #[error("matrix of shape {rows}x{cols} does not match {expected_rows}x{expected_cols}")]
    Shape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("matrix is not invertible (smallest singular value {smallest:e})")]
    NotInvertible { smallest: f64 },
    #[error("(R*⊗ι)(ι⊗R) is not ±identity; conjugation sign undefined")]
    SignUndefined,
    #[error("bend would produce a negative tensor power")]
    GradingUnderflow,
    #[error("grading ({k},{l}) exceeds level {level}")]
    LevelExceeded { k: usize, l: usize, level: usize },
    #[error("memory guard: d^(2n) = {rows} exceeds cap {cap}")]
    GuardExceeded { rows: usize, cap: usize },
    #[error("element of degree {degree} cannot be paired at level {level}")]
    DegreeOverflow { degree: usize, level: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
