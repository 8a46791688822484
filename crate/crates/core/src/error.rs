use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jets have different variable counts ({left} vs {right})")]
    VarMismatch { left: usize, right: usize },
    #[error("jets live in different jet spaces")]
    SpaceMismatch,
    #[error("jet order exhausted while computing {what}")]
    OrderExhausted { what: &'static str },
    #[error("{func} is not defined at base value {re}{im:+}i")]
    Domain { func: &'static str, re: f64, im: f64 },
    #[error("singular matrix in {0}")]
    Singular(&'static str),
    #[error("not strictly pseudoconvex here")]
    NotPseudoconvex,
    #[error("coframe does not match the chart: {0}")]
    Shape(&'static str),
    #[error("tractors are written in different gauges")]
    GaugeMismatch,
    #[error("internal inconsistency: {what} residual {residual:e}")]
    Inconsistent { what: &'static str, residual: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
