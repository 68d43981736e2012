use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("family `{family}` requires parameter `{name}`")]
    MissingParameter { family: String, name: String },

    #[error("family `{family}` does not take parameter `{name}`")]
    UnexpectedParameter { family: String, name: String },

    #[error("parameter `{name}` = {value} out of range: {reason}")]
    ParameterOutOfRange {
        name: String,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inversion did not converge for y = {y} (residual {residual:e})")]
    InversionFailed { y: f64, residual: f64 },

    #[error("orbit points collide near x = {x} after {index} steps; the map looks periodic, use rational handling")]
    OrbitCollision { x: f64, index: usize },

    #[error("orbit order disagrees with rotation by {alpha} at x = {x}; alpha is inconsistent with the map")]
    InconsistentPairing { alpha: f64, x: f64 },

    #[error("t-partial is not positive at x = {x} (value {value:e})")]
    NonPositiveIntegrand { x: f64, value: f64 },

    #[error("no periodic orbit with rotation {p}/{q} found at t = {t}")]
    RationalNotConfirmed { p: i64, q: u64, t: f64 },

    #[error("parameter t = {t} has rational rotation number {p}/{q}; pick an off-rational grid")]
    RationalParameter { t: f64, p: i64, q: u64 },

    #[error("map has a fixed point at t = {t}; rotation time is infinite")]
    FixedPoint { t: f64 },

    #[error("enclosure width {width:e} too wide for step {h:e}; lower tol or raise h")]
    EnclosureTooWide { width: f64, h: f64 },

    #[error("conjugacy defect {defect:e} exceeds gate {gate:e}")]
    DefectTooLarge { defect: f64, gate: f64 },

    #[error("iteration budget of {budget} evaluations exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("bracket [{lo}, {hi}] does not straddle rotation number {p}/{q}")]
    BadBracket { lo: f64, hi: f64, p: i64, q: u64 },
}

impl Error {
    /// Short machine-readable tag, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownFamily(_) => "unknown_family",
            Error::MissingParameter { .. } => "missing_parameter",
            Error::UnexpectedParameter { .. } => "unexpected_parameter",
            Error::ParameterOutOfRange { .. } => "parameter_out_of_range",
            Error::InvalidInput(_) => "invalid_input",
            Error::InversionFailed { .. } => "inversion_failed",
            Error::OrbitCollision { .. } => "orbit_collision",
            Error::InconsistentPairing { .. } => "inconsistent_pairing",
            Error::NonPositiveIntegrand { .. } => "nonpositive_integrand",
            Error::RationalNotConfirmed { .. } => "rational_not_confirmed",
            Error::RationalParameter { .. } => "rational_parameter",
            Error::FixedPoint { .. } => "fixed_point",
            Error::EnclosureTooWide { .. } => "enclosure_too_wide",
            Error::DefectTooLarge { .. } => "defect_too_large",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::BadBracket { .. } => "bad_bracket",
        }
    }

    /// True for errors caused by invalid configuration rather than by the
    /// numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::UnknownFamily(_)
                | Error::MissingParameter { .. }
                | Error::UnexpectedParameter { .. }
                | Error::ParameterOutOfRange { .. }
                | Error::InvalidInput(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
