use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point left the disk (|z| = {norm:.3e}); word too long for double precision")]
    NumericalBlowUp { norm: f64 },

    #[error("group construction failed: {0}")]
    Construction(String),

    #[error("element hash collision: {0}")]
    HashCollision(String),

    #[error("support radius {needed} exceeds ball radius {radius}")]
    SupportOverflow { needed: usize, radius: usize },

    #[error(
        "no gap at threshold: E = {energy} lies between {lower} and {upper} \
         (width {width:.3e} <= threshold {threshold:.3e})"
    )]
    NoGap {
        energy: f64,
        lower: f64,
        upper: f64,
        width: f64,
        threshold: f64,
    },

    #[error("potential is not self-adjoint (defect {0:.3e})")]
    NotSelfAdjoint(f64),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("bulk interior is empty for support radius {support} in a ball of radius {radius}")]
    EmptyInterior { support: usize, radius: usize },

    #[error("least-squares system has nullity {nullity}, expected at most {expected}")]
    RankDeficient { nullity: usize, expected: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
