//! Numerical checks of the comparison inequalities along a solved ray.

use alloc::vec::Vec;

use super::{slice_jacobian, AssociatedFunction, ComparisonInput, ComparisonSolution};
use crate::manifold::WarpedProduct;
use crate::math::{abs, exp, ln, powi};
use crate::numerics::{ode, OdeOptions};
use crate::{Error, Result};

/// Worst margins of `j ≤ y ≤ 𝕏` and `y′ ≤ e^{b0} f` on a grid.
///
/// Margins are normalised by `max(1, y)` (slope margins by `max(1, e^{b0} f)`)
/// so that one tolerance serves short and long horizons alike.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    /// `(t, min (y − j))`.
    pub lower: (f64, f64),
    /// `(t, min (𝕏 − y))`.
    pub upper: (f64, f64),
    /// `(t, min (e^{b0} f − y′))`.
    pub slope: (f64, f64),
}

impl InequalityReport {
    pub fn worst(&self) -> f64 {
        self.lower.1.min(self.upper.1).min(self.slope.1)
    }
}

pub fn check_elementary_inequalities(
    sol: &ComparisonSolution,
    grid: &[f64],
    tol: f64,
) -> Result<InequalityReport> {
    let cap = sol.input.envelope_slope();
    let mut rep = InequalityReport {
        lower: (0.0, f64::INFINITY),
        upper: (0.0, f64::INFINITY),
        slope: (0.0, f64::INFINITY),
    };
    for &t in grid {
        let Some((y, dy)) = sol.y.evaluate(t) else { continue };
        let s = y.abs().max(1.0);
        let lower = (y - sol.j(t)) / s;
        let upper = (sol.x(t) - y) / s;
        let slope = (cap - dy) / cap.max(1.0);
        if lower < rep.lower.1 {
            rep.lower = (t, lower);
        }
        if upper < rep.upper.1 {
            rep.upper = (t, upper);
        }
        if slope < rep.slope.1 {
            rep.slope = (t, slope);
        }
    }
    for (which, (t, margin)) in [("j <= y", rep.lower), ("y <= X", rep.upper), ("y' <= e^b0 f", rep.slope)] {
        if margin < -tol {
            return Err(Error::InequalityViolated { which, t, margin });
        }
    }
    Ok(rep)
}

/// Largest decrease of `y′𝕏 − 𝕏′y` between consecutive grid points, scaled
/// by `max(1, |N|)`; nonpositive when the numerator is nondecreasing.
pub fn numerator_monotonicity(sol: &ComparisonSolution, grid: &[f64]) -> (f64, f64) {
    let mut worst = (0.0, f64::NEG_INFINITY);
    let mut prev: Option<f64> = None;
    for &t in grid {
        let v = sol.numerator(t);
        if !v.is_finite() {
            continue;
        }
        if let Some(p) = prev {
            let drop = (p - v) / p.abs().max(1.0);
            if drop > worst.1 {
                worst = (t, drop);
            }
        }
        prev = Some(v);
    }
    worst
}

/// Monotonicity of `𝒥/y` for the slice `{r0} × N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    /// Largest relative increase of `𝒥/y` between consecutive grid points.
    pub max_increase: (f64, f64),
    /// Largest `sup_{t ≥ R′} θ̂(t) − (𝒥(R′)/y(R′))^{n−1}` over grid `R′`.
    pub theta_hat_excess: (f64, f64),
}

pub fn monotone_ratio_check(
    w: &WarpedProduct,
    r0: f64,
    sol: &ComparisonSolution,
    grid: &[f64],
    tol: f64,
) -> Result<RatioReport> {
    let k = sol.input.n as i32 - 1;
    let pts: Vec<(f64, f64, f64)> = grid
        .iter()
        .filter_map(|&t| {
            let y = sol.y.evaluate(t)?.0;
            let jac = slice_jacobian(w, r0, t);
            Some((t, jac / y, powi(jac / sol.x(t), k)))
        })
        .collect();
    let mut inc = (0.0, f64::NEG_INFINITY);
    for p in pts.windows(2) {
        let d = (p[1].1 - p[0].1) / p[0].1.abs().max(1e-300);
        if d > inc.1 {
            inc = (p[1].0, d);
        }
    }
    let mut excess = (0.0, f64::NEG_INFINITY);
    let mut sup_hat = f64::NEG_INFINITY;
    for &(t, ratio, hat) in pts.iter().rev() {
        sup_hat = sup_hat.max(hat);
        let bound = powi(ratio, k);
        let e = (sup_hat - bound) / bound.max(1e-300);
        if e > excess.1 {
            excess = (t, e);
        }
    }
    if inc.1 > tol {
        return Err(Error::MonotonicityViolated {
            which: "J/y",
            t: inc.0,
            excess: inc.1,
        });
    }
    if excess.1 > tol {
        return Err(Error::MonotonicityViolated {
            which: "sup theta_hat <= (J/y)^(n-1)",
            t: excess.0,
            excess: excess.1,
        });
    }
    Ok(RatioReport {
        max_increase: inc,
        theta_hat_excess: excess,
    })
}

/// Riccati identity of the slice foliation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiReport {
    /// `max |u′ + u² − h″/h|` with `u = h′/h` and `u′` by finite differences.
    pub identity_residual: f64,
    /// `max (u′ + u² − λ̂)`; nonpositive when `λ̂` bounds the curvature.
    pub envelope_excess: f64,
}

/// `u′` by five-point differences (forward near `r = 0`).
fn five_point(u: &impl Fn(f64) -> f64, r: f64, h: f64) -> f64 {
    if r >= 2.0 * h {
        (u(r - 2.0 * h) - 8.0 * u(r - h) + 8.0 * u(r + h) - u(r + 2.0 * h)) / (12.0 * h)
    } else {
        (-25.0 * u(r) + 48.0 * u(r + h) - 36.0 * u(r + 2.0 * h) + 16.0 * u(r + 3.0 * h)
            - 3.0 * u(r + 4.0 * h))
            / (12.0 * h)
    }
}

pub fn riccati_residual(
    w: &WarpedProduct,
    r0: f64,
    grid: &[f64],
    envelope: Option<&AssociatedFunction>,
) -> RiccatiReport {
    let u = |r: f64| {
        let v = w.eval(r);
        v.dh / v.h
    };
    let mut rep = RiccatiReport {
        identity_residual: 0.0,
        envelope_excess: f64::NEG_INFINITY,
    };
    for &t in grid {
        let r = r0 + t;
        let v = w.eval(r);
        let du = five_point(&u, r, 2e-3 * r.max(1.0));
        let ur = v.dh / v.h;
        let lhs = du + ur * ur;
        rep.identity_residual = rep.identity_residual.max(abs(lhs - v.ddh / v.h));
        if let Some(lam) = envelope {
            rep.envelope_excess = rep.envelope_excess.max(v.ddh / v.h - lam.eval(r));
        }
    }
    rep
}

/// Margin `RHS − LHS` of the logarithmic inequality
/// `log(|𝘩| + ∫₀ᵗ λy) ≤ ∫₀ᵗ sλ + ∫₀ᵗ λ/(|𝘩| + ∫₀ˢ λ(|𝘩|u + 1)du) ds + log|𝘩|`
/// at each grid time, from one augmented integration of
/// `(y, y′, ∫sλ, ∫λ(|𝘩|u+1), ∫λ/(|𝘩| + …))`.
pub fn log_inequality_margin(input: &ComparisonInput, grid: &[f64], rel_tol: f64) -> Result<Vec<(f64, f64)>> {
    let a = input.abs_mean_ratio;
    if a == 0.0 {
        return Err(Error::InvalidArgument(
            "the logarithmic inequality needs a nonzero mean curvature".into(),
        ));
    }
    let t_end = grid.iter().copied().fold(0.0, f64::max);
    if !(t_end > 0.0) {
        return Ok(Vec::new());
    }
    let lam = input.lambda.clone();
    let stops: Vec<f64> = lam.breakpoints().into_iter().collect();
    let dense = ode::integrate_with_stops(
        move |t, s: &[f64; 5]| {
            let l = lam.eval(t);
            [s[1], l * s[0], t * l, l * (a * t + 1.0), l / (a + s[3])]
        },
        0.0,
        [1.0, a, 0.0, 0.0, 0.0],
        t_end,
        &OdeOptions::with_rel_tol(rel_tol),
        &stops,
    )?;
    Ok(grid
        .iter()
        .filter_map(|&t| {
            let s = dense.evaluate(t)?;
            // y′(t) = |𝘩| + ∫₀ᵗ λy.
            let lhs = ln(s[1]);
            let rhs = s[2] + s[4] + ln(a);
            Some((t, rhs - lhs))
        })
        .collect())
}

/// Qualitative shape of `t ↦ θ(t)^{1/(n−1)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayClass {
    /// Slope identically (numerically) zero from `tau` on.
    CompactSupport { tau: f64 },
    /// Decreasing, then increasing with slope tending to zero.
    SlopeToZero { turning_point: f64 },
    DecreasingEverywhere,
    Indeterminate,
}

/// Slopes with `|θ′| < ZERO_SLOPE` count as zero.
pub const ZERO_SLOPE: f64 = 1e-8;

pub fn decay_classification(sol: &ComparisonSolution, horizon: f64) -> DecayClass {
    let horizon = horizon.min(sol.t_max());
    let n = 400;
    let lo = 1e-3 * horizon.min(1.0);
    let grid: Vec<f64> = (0..=n)
        .map(|i| (lo * exp(ln(horizon / lo) * i as f64 / n as f64)).min(horizon))
        .collect();
    let d: Vec<f64> = grid.iter().map(|&t| sol.theta_root_slope(t)).collect();
    if d.iter().any(|v| !v.is_finite()) {
        return DecayClass::Indeterminate;
    }
    let sign = |v: f64| if abs(v) < ZERO_SLOPE { 0 } else if v > 0.0 { 1 } else { -1 };
    let signs: Vec<i32> = d.iter().map(|&v| sign(v)).collect();

    if signs.iter().all(|&s| s == 0) {
        return DecayClass::CompactSupport { tau: 0.0 };
    }
    let last_nonzero = signs.iter().rposition(|&s| s != 0).expect("some nonzero");
    // A zero block covering at least the final quarter of the samples.
    if last_nonzero < n * 3 / 4 {
        return DecayClass::CompactSupport {
            tau: grid[last_nonzero + 1],
        };
    }
    let body = &signs[..=last_nonzero];
    if body.iter().all(|&s| s <= 0) {
        return DecayClass::DecreasingEverywhere;
    }
    // Single switch from nonpositive to nonnegative, with decaying slopes.
    if let Some(first_pos) = body.iter().position(|&s| s > 0) {
        let after_ok = body[first_pos..].iter().all(|&s| s >= 0);
        let before_ok = body[..first_pos].iter().all(|&s| s <= 0);
        let peak = d[first_pos..].iter().copied().fold(0.0, f64::max);
        let tail_small = d[n] < 0.5 * peak || abs(d[n]) < ZERO_SLOPE;
        if after_ok && before_ok && tail_small {
            return DecayClass::SlopeToZero {
                turning_point: grid[first_pos],
            };
        }
    }
    DecayClass::Indeterminate
}

#[cfg(test)]
mod tests {
    use super::super::{decay_constants, sample_grid, solve_comparison};
    use super::*;

    fn input(lam: AssociatedFunction, hm: f64) -> ComparisonInput {
        let c = decay_constants(&lam, 1e-11).unwrap();
        ComparisonInput::new(lam, hm, c, 3).unwrap()
    }

    #[test]
    fn power_law_inequalities_hold() {
        let inp = input(AssociatedFunction::power_law(1.0, 3.0).unwrap(), 0.3);
        let sol = solve_comparison(&inp, 50.0).unwrap();
        let grid = sample_grid(50.0, 200);
        let rep = check_elementary_inequalities(&sol, &grid, 1e-12).unwrap();
        assert!(rep.worst() >= -1e-12);
        assert!(numerator_monotonicity(&sol, &grid).1 <= 1e-12);
        let m = log_inequality_margin(&inp, &grid, 1e-10).unwrap();
        assert!(m.iter().all(|(_, v)| *v >= -1e-9));
    }

    #[test]
    fn zero_lambda_margins_vanish() {
        let inp = input(AssociatedFunction::zero(), 0.7);
        let sol = solve_comparison(&inp, 20.0).unwrap();
        let rep = check_elementary_inequalities(&sol, &sample_grid(20.0, 50), 1e-12).unwrap();
        assert!(rep.lower.1.abs() < 1e-14 && rep.upper.1.abs() < 1e-14);
    }

    #[test]
    fn broken_solution_is_flagged() {
        // Claims b0 = b1 = 0 for a nonzero λ, so y outgrows 𝕏.
        let lam = AssociatedFunction::power_law(1.0, 3.0).unwrap();
        let inp = ComparisonInput::new(lam, 0.0, super::super::DecayConstants::ZERO, 3).unwrap();
        let sol = solve_comparison(&inp, 10.0).unwrap();
        assert!(matches!(
            check_elementary_inequalities(&sol, &sample_grid(10.0, 40), 1e-9),
            Err(Error::InequalityViolated { .. })
        ));
    }

    #[test]
    fn triangular_lambda_beyond_support() {
        // Past the support y is affine, so y′𝕏 − 𝕏′y is constant; here it is
        // positive and θ creeps back up with vanishing slope.
        let inp = input(AssociatedFunction::triangular(2.0, 3.0).unwrap(), 0.0);
        let sol = solve_comparison(&inp, 1e5).unwrap();
        let (d5, d50) = (sol.y.dy(5.0), sol.y.dy(5e4));
        assert!((d5 - d50).abs() < 1e-9 * d5);
        assert!((sol.numerator(10.0) - sol.numerator(1e4)).abs() < 1e-8 * sol.numerator(10.0));
        assert!(matches!(decay_classification(&sol, 1e5), DecayClass::SlopeToZero { .. }));
    }

    #[test]
    fn zero_lambda_is_degenerate_compact_support() {
        let inp = input(AssociatedFunction::zero(), 1.0);
        let sol = solve_comparison(&inp, 100.0).unwrap();
        assert_eq!(decay_classification(&sol, 100.0), DecayClass::CompactSupport { tau: 0.0 });
    }
}
