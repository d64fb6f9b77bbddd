use thiserror::Error;

use crate::density::DensityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("divergent inverse transform (k = {k}, c = {c})")]
    DivergentInverseTransform { k: u32, c: f64 },

    #[error("principal log undefined at lambda = {lambda}")]
    PrincipalLogUndefined { lambda: f64 },

    #[error("principal log branch jump between lambda = {from} and lambda = {to}")]
    BranchJump { from: f64, to: f64 },

    #[error("moment matching fails at order {order}: got {got}, gaussian moment is {expected}")]
    MomentMismatch { order: usize, got: f64, expected: f64 },

    #[error("outside restricted window: |t| = {t} must be < {limit}")]
    OutsideRestrictedWindow { t: f64, limit: f64 },

    #[error("at or beyond pole: |t| = {t} must be < 4*pi")]
    AtOrBeyondPole { t: f64 },

    #[error("outside Sarnak window: |t| = {t} must be <= pi/12")]
    OutsideSarnakWindow { t: f64 },

    #[error("not certified nonnegative at sigma = {sigma} (grid minimum {min_value})")]
    NotCertified { sigma: f64, min_value: f64 },

    #[error("sigma search cap exceeded after {doublings} doublings; best report: {best:?}")]
    SearchCapExceeded { doublings: u32, best: DensityReport },

    #[error("not hyperbolic: trace {0} < 3")]
    NotHyperbolic(i64),

    #[error("parabolic/upper-triangular not needed (c = 0)")]
    UpperTriangular,

    #[error("not coprime or out of range: (d, c) = ({d}, {c})")]
    BadDedekindPair { d: i64, c: i64 },
}
