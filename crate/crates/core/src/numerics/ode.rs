//! Dormand–Prince 5(4) integrator with the classical free dense output.

use alloc::vec::Vec;

use crate::math::{abs, powf};
use crate::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output weights (Hairer & Wanner, contd5).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Step-control settings for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rel_tol: f64,
    /// Absolute floor added to the relative error scale of every component.
    pub abs_tol: f64,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl OdeOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        OdeOptions {
            rel_tol,
            abs_tol: rel_tol * 1e-3,
            max_steps: 2_000_000,
            initial_step: None,
        }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self::with_rel_tol(super::DEFAULT_REL_TOL)
    }
}

/// Piecewise quartic interpolant over the accepted steps of an integration.
#[derive(Debug, Clone)]
pub struct DenseOutput<const N: usize> {
    times: Vec<f64>,
    states: Vec<[f64; N]>,
    coeffs: Vec<[[f64; N]; 5]>,
    local_errors: Vec<f64>,
    abs_errors: Vec<[f64; N]>,
    options: OdeOptions,
}

impl<const N: usize> DenseOutput<N> {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[[f64; N]] {
        &self.states
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn options(&self) -> &OdeOptions {
        &self.options
    }

    /// Scaled local error of each accepted step; `<= rel_tol` by construction.
    pub fn local_errors(&self) -> &[f64] {
        &self.local_errors
    }

    /// Sum over accepted steps of the absolute local error estimates.
    pub fn accumulated_error(&self) -> [f64; N] {
        let mut acc = [0.0; N];
        for e in &self.abs_errors {
            for i in 0..N {
                acc[i] += e[i];
            }
        }
        acc
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start() && t <= self.t_end()
    }

    /// Evaluates the interpolant; `None` outside the integrated range.
    pub fn evaluate(&self, t: f64) -> Option<[f64; N]> {
        if !self.contains(t) {
            return None;
        }
        // index of the last grid point <= t
        let idx = self.times.partition_point(|&x| x <= t) - 1;
        if self.times[idx] == t {
            return Some(self.states[idx]);
        }
        let t0 = self.times[idx];
        let h = self.times[idx + 1] - t0;
        let theta = (t - t0) / h;
        let theta1 = 1.0 - theta;
        let rc = &self.coeffs[idx];
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = rc[0][i]
                + theta * (rc[1][i] + theta1 * (rc[2][i] + theta * (rc[3][i] + theta1 * rc[4][i])));
        }
        Some(out)
    }
}

fn error_scale<const N: usize>(opts: &OdeOptions, y: &[f64; N], y_new: &[f64; N]) -> [f64; N] {
    let mut sc = [0.0; N];
    for i in 0..N {
        sc[i] = opts.abs_tol + opts.rel_tol * abs(y[i]).max(abs(y_new[i]));
    }
    sc
}

fn check_finite<const N: usize>(t: f64, v: &[f64; N]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteCoefficient { t })
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    span: f64,
    opts: &OdeOptions,
) -> Result<f64>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let sc = error_scale(opts, y0, y0);
    let norm = |v: &[f64; N]| -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..N {
            m = m.max(abs(v[i] / sc[i]));
        }
        m
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = f(t0 + h0, &y1);
    check_finite(t0 + h0, &f1)?;
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        powf(0.01 / d1.max(d2), 0.2)
    };
    Ok((100.0 * h0).min(h1).min(span))
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end > t0`.
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
) -> Result<DenseOutput<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    integrate_with_stops(f, t0, y0, t_end, opts, &[])
}

/// As [`integrate`], but no step crosses any of `stops`: steps are
/// shortened to land on them exactly.
///
/// Use this for right-hand sides with kinks at known points. The embedded
/// error estimate assumes a smooth right-hand side inside each step, and a
/// step straddling a kink can under-report its error by orders of magnitude.
pub fn integrate_with_stops<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    stops: &[f64],
) -> Result<DenseOutput<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut stops: Vec<f64> = stops
        .iter()
        .copied()
        .filter(|&s| s > t0 && s < t_end && s.is_finite())
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    let mut next_stop = 0usize;
    if !(t_end > t0) || !t_end.is_finite() || !t0.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "integration interval [{t0}, {t_end}] is empty or not finite"
        )));
    }
    if !(opts.rel_tol > 0.0) || !(opts.abs_tol >= 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    check_finite(t0, &y0)?;

    let mut out = DenseOutput {
        times: Vec::new(),
        states: Vec::new(),
        coeffs: Vec::new(),
        local_errors: Vec::new(),
        abs_errors: Vec::new(),
        options: *opts,
    };
    out.times.push(t0);
    out.states.push(y0);

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    check_finite(t, &k1)?;
    let mut h = match opts.initial_step {
        Some(h) => h.min(t_end - t0),
        None => initial_step(&mut f, t0, &y0, &k1, t_end - t0, opts)?,
    };
    let mut last_rejected = false;
    let mut steps = 0usize;

    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::StepUnderflow { t, step: h });
        }
        steps += 1;
        let floor = 16.0 * f64::EPSILON * abs(t).max(1.0);
        if h < floor {
            return Err(Error::StepUnderflow { t, step: h });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        while next_stop < stops.len() && stops[next_stop] <= t {
            next_stop += 1;
        }
        let stop = (!last && next_stop < stops.len() && t + h >= stops[next_stop])
            .then(|| stops[next_stop]);
        if let Some(s) = stop {
            h = s - t;
        }

        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        check_finite(t + C2 * h, &k2)?;
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        check_finite(t + C3 * h, &k3)?;
        let k4 = f(
            t + C4 * h,
            &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        check_finite(t + C4 * h, &k4)?;
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        check_finite(t + C5 * h, &k5)?;
        let k6 = f(
            t + h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        check_finite(t + h, &k6)?;
        let y_new = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let t_new = match (last, stop) {
            (true, _) => t_end,
            (false, Some(s)) => s,
            _ => t + h,
        };
        let k7 = f(t_new, &y_new);
        check_finite(t_new, &k7)?;

        let sc = error_scale(opts, &y, &y_new);
        let mut err_abs = [0.0; N];
        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            err_abs[i] = abs(e);
            err = err.max(abs(e) / sc[i]);
        }
        if !err.is_finite() {
            return Err(Error::NonFiniteCoefficient { t: t_new });
        }

        if err <= 1.0 {
            let mut rc = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                rc[0][i] = y[i];
                rc[1][i] = ydiff;
                rc[2][i] = bspl;
                rc[3][i] = ydiff - h * k7[i] - bspl;
                rc[4][i] = h
                    * (D1 * k1[i]
                        + D3 * k3[i]
                        + D4 * k4[i]
                        + D5 * k5[i]
                        + D6 * k6[i]
                        + D7 * k7[i]);
            }
            out.coeffs.push(rc);
            out.times.push(t_new);
            out.states.push(y_new);
            out.local_errors.push(err * opts.rel_tol);
            out.abs_errors.push(err_abs);

            t = t_new;
            y = y_new;
            k1 = k7;
            let mut fac = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * powf(err, -0.2)).clamp(FAC_MIN, FAC_MAX)
            };
            if last_rejected {
                fac = fac.min(1.0);
            }
            h *= fac;
            last_rejected = false;
        } else {
            let fac = (SAFETY * powf(err, -0.2)).clamp(FAC_MIN, 1.0);
            h *= fac;
            last_rejected = true;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let sol = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 2.0, &OdeOptions::default())
            .unwrap();
        let y = sol.evaluate(2.0).unwrap()[0];
        assert!((y - 2f64.exp()).abs() / 2f64.exp() < 1e-9);
        let mid = sol.evaluate(1.234).unwrap()[0];
        assert!((mid - 1.234f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn grid_points_match_stored_values() {
        let sol = integrate(
            |t, y: &[f64; 2]| [y[1], -y[0] * (1.0 + t)],
            0.0,
            [1.0, 0.0],
            5.0,
            &OdeOptions::default(),
        )
        .unwrap();
        for (t, s) in sol.times().iter().zip(sol.states()) {
            assert_eq!(sol.evaluate(*t).unwrap(), *s);
        }
        assert!(sol.local_errors().iter().all(|&e| e <= 1e-10));
        assert!(sol.evaluate(5.1).is_none());
    }

    #[test]
    fn nan_coefficient_is_reported() {
        let err = integrate(
            |t, y: &[f64; 1]| [if t > 0.5 { f64::NAN } else { y[0] }],
            0.0,
            [1.0],
            1.0,
            &OdeOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFiniteCoefficient { .. }));
    }

    #[test]
    fn step_underflow_on_blowup() {
        // y' = y^2 blows up at t = 1
        let err = integrate(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            [1.0],
            2.0,
            &OdeOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::StepUnderflow { .. } | Error::NonFiniteCoefficient { .. }
        ));
    }
}
