use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// The pointwise minimum of two convex profiles is not convex.
    #[error("pointwise minimum is not convex (crossing at r = {at})")]
    NotConvex { at: f64 },

    #[error("input is not coercive: {0}")]
    NotCoercive(String),

    #[error("operation needs a finitely represented profile; materialize a prefix first")]
    LazyOperand,

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("moment appears finite: {0}")]
    MomentFinite(String),

    #[error("integral is unbounded: {0}")]
    Unbounded(String),

    #[error("annulus sum did not reach the vanishing threshold after {0} terms")]
    NonTerminating(usize),

    #[error("dual range [{lo}, {hi}] does not cover the slope range [{need_lo}, {need_hi}]")]
    SlopeRangeExceeded {
        lo: f64,
        hi: f64,
        need_lo: f64,
        need_hi: f64,
    },

    #[error("support exceeds the sampling box: {0}")]
    SupportExceeded(String),

    #[error("empty set")]
    Empty,

    #[error("invalid zeta: {0}")]
    InvalidZeta(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("rejected: {0}")]
    Rejected(String),

    #[error("parse error: {0}")]
    Parse(String),
}
