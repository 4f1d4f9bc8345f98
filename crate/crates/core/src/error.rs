use thiserror::Error;

/// Errors raised across model ingestion, dynamics, control and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("model syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid model: {0}")]
    Semantic(String),

    #[error("unknown built-in model `{0}`")]
    UnknownModel(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular configuration: smallest singular value {sigma_min:.3e} below threshold {threshold:.1e}")]
    SingularConfiguration { sigma_min: f64, threshold: f64 },

    #[error("impedance parameters invalid: {0}")]
    InvalidParams(String),

    #[error("closed-form step response requires an underdamped axis, got damping ratio {zeta:.4}")]
    OverdampedUnsupported { zeta: f64 },

    #[error("interaction wrench data missing for general passivity margin")]
    MissingInteractionData,

    #[error("reference is not quasi-static at t = {t} s (desired velocity norm {speed:.3e})")]
    NonQuasiStaticReference { t: f64, speed: f64 },

    #[error("numerical divergence at t = {t} s: state magnitude {magnitude:.3e}")]
    NumericalDivergence { t: f64, magnitude: f64 },

    #[error("window [{t0}, {t1}] outside series range [{start}, {end}]")]
    WindowOutOfRange {
        t0: f64,
        t1: f64,
        start: f64,
        end: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
