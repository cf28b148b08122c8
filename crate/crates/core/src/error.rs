use alloc::string::String;
use core::fmt;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(String),
    /// The ODE coefficient returned NaN or an infinity.
    NonFiniteCoefficient { t: f64 },
    /// The adaptive step collapsed below the machine-scaled floor.
    StepUnderflow { t: f64, step: f64 },
    /// An integrand returned NaN or an infinity.
    NonFiniteIntegrand { t: f64 },
    /// Truncation-point doubling did not settle within the budget.
    TailNotConvergent { truncation: f64, increment: f64 },
    /// Finite-interval quadrature could not reach the requested tolerance.
    QuadratureFailed { estimate: f64, requested: f64 },
    /// Extrapolation needs at least three samples.
    InsufficientSamples { got: usize },
    /// Successive eliminations grew instead of shrinking.
    NonMonotoneTail,
    /// Extrapolation samples were not on a geometric grid with ratio >= 2.
    IrregularSamples,
    /// The profile function is negative somewhere above its root.
    ProfileNegative { s: f64, omega: f64 },
    /// Built-in or configured manifold parameters are out of range.
    InvalidParameters(String),
    /// `t * envelope(t)` is not integrable on the probe horizon.
    EnvelopeNotIntegrable { radius: f64, exponent: f64 },
    /// An associated function is negative or increasing.
    NotAdmissible(String),
    /// A comparison inequality failed beyond tolerance.
    InequalityViolated {
        which: &'static str,
        t: f64,
        margin: f64,
    },
    /// A monotonicity property failed beyond tolerance.
    MonotonicityViolated {
        which: &'static str,
        t: f64,
        excess: f64,
    },
    /// The two volume-ratio estimators disagree beyond their error bars.
    MethodDisagreement {
        tube: f64,
        slope: f64,
        tolerance: f64,
    },
    /// Mandatory curvature conditions failed.
    ConditionsFailed(String),
    /// The minimal-area bound divides by `b1 = 0`.
    DivisionDegenerate,
    /// A non-spherical fiber needs an explicit diameter.
    MissingFiberDiameter,
    /// A root search could not bracket a sign change.
    NoBracket,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NonFiniteCoefficient { t } => {
                write!(f, "ODE coefficient is not finite at t = {t}")
            }
            Error::StepUnderflow { t, step } => {
                write!(f, "step size {step:e} underflowed at t = {t}")
            }
            Error::NonFiniteIntegrand { t } => write!(f, "integrand is not finite at t = {t}"),
            Error::TailNotConvergent {
                truncation,
                increment,
            } => write!(
                f,
                "tail did not converge: increment {increment:e} at truncation point {truncation:e}"
            ),
            Error::QuadratureFailed {
                estimate,
                requested,
            } => write!(
                f,
                "quadrature error estimate {estimate:e} exceeds requested {requested:e}"
            ),
            Error::InsufficientSamples { got } => {
                write!(f, "extrapolation needs at least 3 samples, got {got}")
            }
            Error::NonMonotoneTail => write!(f, "successive eliminations diverge"),
            Error::IrregularSamples => {
                write!(f, "samples must grow by a fixed ratio of at least 2")
            }
            Error::ProfileNegative { s, omega } => {
                write!(f, "profile is negative above its root: omega({s}) = {omega}")
            }
            Error::InvalidParameters(msg) => write!(f, "invalid parameters: {msg}"),
            Error::EnvelopeNotIntegrable { radius, exponent } => write!(
                f,
                "envelope is not integrable against t dt (decay exponent {exponent:.3} at r = {radius:e})"
            ),
            Error::NotAdmissible(msg) => write!(f, "associated function not admissible: {msg}"),
            Error::InequalityViolated { which, t, margin } => {
                write!(f, "{which} violated at t = {t} (margin {margin:e})")
            }
            Error::MonotonicityViolated { which, t, excess } => {
                write!(f, "{which} not monotone at t = {t} (excess {excess:e})")
            }
            Error::MethodDisagreement {
                tube,
                slope,
                tolerance,
            } => write!(
                f,
                "volume-ratio estimators disagree: tube {tube} vs slope {slope} (tolerance {tolerance:e})"
            ),
            Error::ConditionsFailed(msg) => write!(f, "curvature conditions failed: {msg}"),
            Error::DivisionDegenerate => {
                write!(f, "b1 = 0: the minimal-area bound is vacuous (+inf)")
            }
            Error::MissingFiberDiameter => {
                write!(f, "fiber diameter is required for non-spherical fibers")
            }
            Error::NoBracket => write!(f, "no sign change found in the search interval"),
        }
    }
}

impl core::error::Error for Error {}
