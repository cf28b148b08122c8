use std::fmt;

use thiserror::Error;

/// Process exit status. The four values are mutually exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExitStatus {
    Success = 0,
    /// A kernel failed to reach its tolerance (quadrature, ODE, extrapolation).
    NumericalFailure = 1,
    /// Malformed configuration, out-of-range parameters, or a manifold that
    /// does not meet the curvature conditions.
    InvalidInput = 2,
    /// The inequality (or one of the elementary inequalities) was violated
    /// beyond tolerance.
    Violation = 3,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for ExitStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ExitStatus::Success => "success",
            ExitStatus::NumericalFailure => "numerical failure",
            ExitStatus::InvalidInput => "invalid input",
            ExitStatus::Violation => "inequality violated",
        };
        write!(f, "{name} (exit {})", self.code())
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Core(willmore_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl From<willmore_core::Error> for CliError {
    fn from(e: willmore_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<toml::de::Error> for CliError {
    fn from(e: toml::de::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        use willmore_core::Error as E;
        match self {
            CliError::Config(_) => ExitStatus::InvalidInput,
            CliError::Io(_) | CliError::Csv(_) => ExitStatus::NumericalFailure,
            CliError::Core(e) => match e {
                E::InvalidArgument(_)
                | E::InvalidParameters(_)
                | E::ProfileNegative { .. }
                | E::EnvelopeNotIntegrable { .. }
                | E::NotAdmissible(_)
                | E::ConditionsFailed(_)
                | E::MissingFiberDiameter => ExitStatus::InvalidInput,
                E::InequalityViolated { .. } | E::MonotonicityViolated { .. } => ExitStatus::Violation,
                _ => ExitStatus::NumericalFailure,
            },
        }
    }
}
