//! Numerical kernel: adaptive Runge–Kutta integration with dense output,
//! Gauss–Kronrod quadrature with semi-infinite tails, limit extrapolation,
//! cubic splines and bracketed root finding.

pub mod extrapolate;
pub mod ivp;
pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod spline;

pub use extrapolate::extrapolate_limit;
pub use ivp::{solve_ivp, solve_ivp_with_breakpoints, SolutionTrajectory};
pub use ode::{DenseOutput, OdeOptions};
pub use quadrature::{integrate, QuadratureOptions, QuadratureResult, TailHint, UpperLimit};
pub use roots::bisect;
pub use spline::CubicSpline;

/// Default relative tolerance of the ODE integrator.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Default absolute tolerance of the quadrature routines.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
