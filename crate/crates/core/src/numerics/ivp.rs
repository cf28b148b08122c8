//! Second-order linear initial-value problems `y'' = λ(t) y`.

use super::ode::{integrate_with_stops, DenseOutput, OdeOptions};
use crate::{Error, Result};

/// Dense solution of `y'' − λ(t) y = 0` on `[0, t_max]`.
#[derive(Debug, Clone)]
pub struct SolutionTrajectory {
    dense: DenseOutput<2>,
}

impl SolutionTrajectory {
    pub fn grid(&self) -> &[f64] {
        self.dense.times()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.dense.states().iter().map(|s| s[0])
    }

    pub fn derivatives(&self) -> impl Iterator<Item = f64> + '_ {
        self.dense.states().iter().map(|s| s[1])
    }

    pub fn t_max(&self) -> f64 {
        self.dense.t_end()
    }

    pub fn tolerance_used(&self) -> f64 {
        self.dense.options().rel_tol
    }

    pub fn local_errors(&self) -> &[f64] {
        self.dense.local_errors()
    }

    /// Conservative global error bound for `y(t_max)`: the sum of the
    /// absolute local error estimates of every accepted step.
    pub fn error_estimate(&self) -> f64 {
        self.dense.accumulated_error()[0]
    }

    /// `(y(t), y'(t))`, or `None` outside `[0, t_max]`.
    pub fn evaluate(&self, t: f64) -> Option<(f64, f64)> {
        self.dense.evaluate(t).map(|s| (s[0], s[1]))
    }

    /// `y(t)`; NaN outside the solved range.
    pub fn y(&self, t: f64) -> f64 {
        self.evaluate(t).map_or(f64::NAN, |s| s.0)
    }

    /// `y'(t)`; NaN outside the solved range.
    pub fn dy(&self, t: f64) -> f64 {
        self.evaluate(t).map_or(f64::NAN, |s| s.1)
    }

    pub fn dense(&self) -> &DenseOutput<2> {
        &self.dense
    }
}

/// Solves `y'' = λ(t) y`, `y(0) = y0`, `y'(0) = y0p` on `[0, t_max]`.
pub fn solve_ivp<L>(
    lambda: L,
    y0: f64,
    y0p: f64,
    t_max: f64,
    rel_tol: f64,
) -> Result<SolutionTrajectory>
where
    L: Fn(f64) -> f64,
{
    solve_ivp_with_breakpoints(lambda, y0, y0p, t_max, rel_tol, &[])
}

/// As [`solve_ivp`], with the points where `λ` is not smooth (for example
/// the end of a compact support) passed as step boundaries.
pub fn solve_ivp_with_breakpoints<L>(
    lambda: L,
    y0: f64,
    y0p: f64,
    t_max: f64,
    rel_tol: f64,
    breakpoints: &[f64],
) -> Result<SolutionTrajectory>
where
    L: Fn(f64) -> f64,
{
    if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
        return Err(Error::InvalidArgument(alloc::format!(
            "rel_tol must lie in (0, 1e-3], got {rel_tol}"
        )));
    }
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "t_max must be positive and finite, got {t_max}"
        )));
    }
    let opts = OdeOptions::with_rel_tol(rel_tol);
    let dense = integrate_with_stops(
        |t, s: &[f64; 2]| {
            let l = lambda(t);
            [s[1], l * s[0]]
        },
        0.0,
        [y0, y0p],
        t_max,
        &opts,
        breakpoints,
    )?;
    Ok(SolutionTrajectory { dense })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficient_is_linear() {
        let sol = solve_ivp(|_| 0.0, 1.0, 0.5, 2.0, 1e-10).unwrap();
        assert_eq!(sol.y(2.0), 2.0);
        assert_eq!(sol.dy(1.3), 0.5);
    }

    #[test]
    fn constant_coefficient_matches_cosh() {
        let sol = solve_ivp(|_| 1.0, 1.0, 0.0, 1.0, 1e-10).unwrap();
        let expected = 1f64.cosh();
        assert!((sol.y(1.0) - expected).abs() / expected < 1e-9);
        assert!((sol.dy(1.0) - 1f64.sinh()).abs() / 1f64.sinh() < 1e-9);
        assert_eq!(sol.y(0.0), 1.0);
        assert_eq!(sol.dy(0.0), 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            solve_ivp(|_| 0.0, 1.0, 0.0, 1.0, 1e-2),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            solve_ivp(|_| 0.0, 1.0, 0.0, -1.0, 1e-8),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            solve_ivp(|_| f64::INFINITY, 1.0, 0.0, 1.0, 1e-8),
            Err(Error::NonFiniteCoefficient { .. })
        ));
    }

    #[test]
    fn outside_range_is_nan() {
        let sol = solve_ivp(|_| 0.0, 1.0, 0.0, 1.0, 1e-8).unwrap();
        assert!(sol.y(1.5).is_nan());
        assert!(sol.evaluate(-0.1).is_none());
    }
}
