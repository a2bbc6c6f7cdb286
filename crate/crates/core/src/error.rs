use thiserror::Error;

/// Everything that can go wrong while building or analysing a surface.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not traceless (|tr| = {0:e})")]
    NotTraceless(f64),
    #[error("basis components have imaginary parts up to {0:e}")]
    NonRealComponents(f64),
    #[error("singular matrix (|det| = {0:e})")]
    SingularMatrix(f64),
    #[error("singular input: {0}")]
    SingularInput(String),
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("Airy function too close to a zero at t = {0}")]
    NearAiryZero(f64),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("no real sl(2,R) Lax pair for P3 with gamma = {gamma}, delta = {delta} (needs gamma >= 0, delta <= 0)")]
    NonRealLaxPair { gamma: f64, delta: f64 },
    #[error("alpha6 is nonzero but no R solution was supplied")]
    MissingRSolution,
    #[error("alpha6 surfaces have no closed form here; use quadrature")]
    UnsupportedAlpha6,
    #[error("tangent one-form is not closed: {measure:e} exceeds bound {bound:e}")]
    NonClosedForm { measure: f64, bound: f64 },
    #[error("normal vector is isotropic")]
    IsotropicNormal,
    #[error("tangent vectors are linearly dependent")]
    DegenerateTangents,
    #[error("first fundamental form is degenerate (det = {0:e})")]
    DegenerateMetric(f64),
    #[error("mixed second derivatives disagree along the normal by {0:e}")]
    AsymmetricMixedDerivatives(f64),
    #[error("wrong parameter regime: {0}")]
    WrongParameterRegime(String),
    #[error("solution has a pole near t = {0}")]
    PoleEncountered(f64),
    #[error("wave function overflowed at t = {t}, lambda = {lambda}")]
    FrameOverflow { t: f64, lambda: f64 },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
