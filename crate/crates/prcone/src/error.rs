use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: String, right: String },

    #[error("matrix contains a non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not positive semidefinite: eigmin = {eigmin:.3e}")]
    NotPsd { eigmin: f64 },

    #[error("matrix is singular or too ill-conditioned (cond = {cond:.3e})")]
    Singular { cond: f64 },

    #[error("matrix is not positive real: eigmin(Re) = {eigmin:.3e}")]
    NotPositiveReal { eigmin: f64 },

    #[error("A is not below B in the pre-order: residual = {residual:.3e} (tol {tol:.3e})")]
    NotComparable { residual: f64, tol: f64 },

    #[error("A and B are not equivalent ({direction} direction failed): {source}")]
    NotEquivalent {
        direction: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("witness is invalid: {reason} (residual = {residual:.3e})")]
    InvalidWitness { reason: &'static str, residual: f64 },

    #[error("W is not J-contractive: eigmax(W*JW - J) = {excess:.3e}")]
    NotJContractive { excess: f64 },

    #[error("W is not invertible (cond = {cond:.3e}); the operation requires an invertible W")]
    WNotInvertible { cond: f64 },

    #[error("operand is outside the domain of the transformation: {detail}")]
    OutOfDomain { detail: String },

    #[error("the two representations of the transformation disagree: deviation = {deviation:.3e}")]
    ReprMismatch { deviation: f64 },

    #[error("point {point} is not in the open unit disc")]
    OutsideDisc { point: String },

    #[error("function model is not Caratheodory at {point}: eigmin(Re) = {eigmin:.3e}")]
    NotCaratheodory { point: String, eigmin: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
