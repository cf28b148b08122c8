//! Scalar Jacobi comparison: the solution `y` of `y″ = λ y` with
//! `y(0) = 1`, `y′(0) = |𝘩|`, the linear lower bound `j`, the envelope `𝕏`,
//! and checks of the inequalities that tie them to the geometry.

mod associated;
mod checks;

pub use associated::{decay_constants, AssociatedFunction, DecayConstants, Provenance, TailDescriptor};
pub use checks::{
    check_elementary_inequalities, decay_classification, log_inequality_margin,
    monotone_ratio_check, numerator_monotonicity, riccati_residual, DecayClass,
    InequalityReport, RatioReport, RiccatiReport,
};

use alloc::vec::Vec;

use crate::manifold::WarpedProduct;
use crate::math::{abs, exp, powi};
use crate::numerics::{solve_ivp, solve_ivp_with_breakpoints, SolutionTrajectory, DEFAULT_REL_TOL};
use crate::{Error, Result};

/// Everything the comparison needs about one outward normal direction.
#[derive(Debug, Clone)]
pub struct ComparisonInput {
    /// `𝘩 = H/(n−1)`, signed.
    pub mean_ratio: f64,
    pub abs_mean_ratio: f64,
    /// `f = |𝘩|(1 + b0) + b1`.
    pub f: f64,
    pub constants: DecayConstants,
    /// λ along the outward ray, already aligned with the slice.
    pub lambda: AssociatedFunction,
    /// Ambient dimension.
    pub n: usize,
}

impl ComparisonInput {
    pub fn new(
        lambda: AssociatedFunction,
        mean_ratio: f64,
        constants: DecayConstants,
        n: usize,
    ) -> Result<Self> {
        if !mean_ratio.is_finite() {
            return Err(Error::InvalidArgument("mean curvature must be finite".into()));
        }
        if n < 3 {
            return Err(Error::InvalidArgument(alloc::format!(
                "ambient dimension must be at least 3, got {n}"
            )));
        }
        if !(constants.b0 >= 0.0 && constants.b1 >= 0.0) {
            return Err(Error::InvalidArgument("decay constants must be nonnegative".into()));
        }
        let a = abs(mean_ratio);
        Ok(ComparisonInput {
            mean_ratio,
            abs_mean_ratio: a,
            f: a * (1.0 + constants.b0) + constants.b1,
            constants,
            lambda,
            n,
        })
    }

    /// `e^{b0} f`, the slope of `𝕏`.
    pub fn envelope_slope(&self) -> f64 {
        exp(self.constants.b0) * self.f
    }
}

/// `θ′(0⁺)` of `θ^{1/(n−1)} = y/𝕏`: `|𝘩| − e^{b0} f`.
pub fn theta_initial_slope(input: &ComparisonInput) -> f64 {
    input.abs_mean_ratio - input.envelope_slope()
}

/// `𝒥(t) = h(r0 + t)/h(r0)` for the slice `{r0} × N`.
pub fn slice_jacobian(w: &WarpedProduct, r0: f64, t: f64) -> f64 {
    w.warp.h(r0 + t) / w.warp.h(r0)
}

#[derive(Debug, Clone)]
pub struct ComparisonSolution {
    pub input: ComparisonInput,
    pub y: SolutionTrajectory,
}

impl ComparisonSolution {
    pub fn t_max(&self) -> f64 {
        self.y.t_max()
    }

    /// `𝕏(t) = e^{b0} f t + 1`.
    pub fn x(&self, t: f64) -> f64 {
        self.input.envelope_slope() * t + 1.0
    }

    /// `j(t) = 1 + |𝘩| t`.
    pub fn j(&self, t: f64) -> f64 {
        1.0 + self.input.abs_mean_ratio * t
    }

    /// `θ(t)^{1/(n−1)} = y(t)/𝕏(t)`.
    pub fn theta_root(&self, t: f64) -> f64 {
        self.y.y(t) / self.x(t)
    }

    pub fn theta(&self, t: f64) -> f64 {
        powi(self.theta_root(t), self.input.n as i32 - 1)
    }

    /// `y′𝕏 − 𝕏′y`, the numerator of `(y/𝕏)′`.
    pub fn numerator(&self, t: f64) -> f64 {
        let (y, dy) = self.y.evaluate(t).unwrap_or((f64::NAN, f64::NAN));
        dy * self.x(t) - self.input.envelope_slope() * y
    }

    /// `(y/𝕏)′` by centered differences of the dense output, step
    /// `1e-4·max(1, t)` (one-sided at the ends).
    pub fn theta_root_slope(&self, t: f64) -> f64 {
        let h = 1e-4 * t.max(1.0);
        let (a, b) = if t - h < 0.0 {
            (t, t + h)
        } else if t + h > self.t_max() {
            (t - h, t)
        } else {
            (t - h, t + h)
        };
        (self.theta_root(b) - self.theta_root(a)) / (b - a)
    }
}

pub fn solve_comparison(input: &ComparisonInput, t_max: f64) -> Result<ComparisonSolution> {
    solve_comparison_with(input, t_max, DEFAULT_REL_TOL)
}

pub fn solve_comparison_with(
    input: &ComparisonInput,
    t_max: f64,
    rel_tol: f64,
) -> Result<ComparisonSolution> {
    let lam = input.lambda.clone();
    let y = if lam.is_zero() {
        solve_ivp(|_| 0.0, 1.0, input.abs_mean_ratio, t_max, rel_tol)?
    } else {
        let stops: Vec<f64> = lam.breakpoints().into_iter().collect();
        solve_ivp_with_breakpoints(move |t| lam.eval(t), 1.0, input.abs_mean_ratio, t_max, rel_tol, &stops)?
    };
    Ok(ComparisonSolution {
        input: input.clone(),
        y,
    })
}

/// `n` points on `[0, t_max]`: half uniform, half geometric from `1e-3·t_max`,
/// merged and sorted.
pub fn sample_grid(t_max: f64, n: usize) -> Vec<f64> {
    let half = (n / 2).max(2);
    let mut g: Vec<f64> = (0..=half).map(|i| t_max * i as f64 / half as f64).collect();
    let lo = 1e-3 * t_max;
    for i in 0..half {
        g.push(lo * crate::math::powf(t_max / lo, i as f64 / half as f64));
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}
