use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module of the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate polynomial")]
    DegeneratePolynomial,
    #[error("singular fiber (h = {h:.3e})")]
    SingularFiber { h: f64 },
    #[error("non-conformal sample: |γ′|² = {speed2:.6e}, h = {h:.6e}")]
    NonConformal { speed2: f64, h: f64 },
    #[error("blow-up at y={y}")]
    BlowUp { y: f64 },
    #[error("rotate λ first (λ = {re} + {im}i is not real)")]
    LambdaNotReal { re: f64, im: f64 },
    #[error("μ must be unimodular, got |μ| = {0}")]
    NotUnimodular(f64),
    #[error("degenerate (totally umbilic): q vanishes identically")]
    TotallyUmbilic,
    #[error("too few samples: need {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("insufficient jet order for genus {0}")]
    InsufficientJet(usize),
    #[error("constants unidentifiable")]
    Unidentifiable,
    #[error("aperiodic potential: endpoint jet differs from start by {0:.3e}")]
    AperiodicPotential(f64),
    #[error("refine grid: no scan structure near a = {re} + {im}i")]
    RefineGrid { re: f64, im: f64 },
    #[error("incompatible Im q for (m,n)")]
    IncompatibleImQ,
    #[error("reconstruction diverged at y={y}: {what}")]
    ReconstructionDiverged { y: f64, what: String },
    #[error("monodromy not a fiber rotation (residual {0:.3e})")]
    NotFiberRotation(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
