use thiserror::Error;

/// Errors shared across configuration validation, oracle evaluation,
/// sampling and model fitting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid window: need 0 < t1 < t2 < t_end, got ({t1}, {t2}, {t_end})")]
    InvalidWindow { t1: f64, t2: f64, t_end: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} must lie in [{lo}, {hi}], got {value}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("point {0} is already present in the configuration")]
    DuplicatePoint(f64),

    #[error("oracle budget exceeded: {evals} density evaluations > ceiling {ceiling}")]
    BudgetExceeded { evals: u64, ceiling: u64 },

    #[error("conditioning configuration has numerically zero marginal density")]
    InfeasibleConditioning,

    #[error("local bound violated at u = {at}: intensity {intensity} > bound {bound}")]
    BoundViolation { at: f64, intensity: f64, bound: f64 },

    #[error("no fully observed inter-arrival interval in either segment")]
    NoObservableIntervals,

    #[error("Newton-Raphson step left the parameter space after {halvings} halvings")]
    NewtonDiverged { halvings: u32 },

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("no admissible pair of observed days at lag {lag}")]
    NoAdmissiblePairs { lag: usize },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
