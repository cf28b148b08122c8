//! Adaptive Gauss–Kronrod quadrature with truncation-point doubling for
//! semi-infinite intervals.

use alloc::vec::Vec;

use crate::math::{abs, ln, powf};
use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Upper integration limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperLimit {
    Finite(f64),
    Infinite,
}

/// Optional knowledge about how the integrand decays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailHint {
    /// `|f(t)| ~ C t^(-exponent)` with `exponent > 1`.
    PowerLaw { exponent: f64 },
    /// `f(t) = 0` for `t >= radius`.
    CompactSupport { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    /// Starting truncation point is `max(1, 10 * characteristic_scale)`.
    pub characteristic_scale: f64,
    pub max_doublings: usize,
    pub max_subdivisions: usize,
}

impl QuadratureOptions {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        QuadratureOptions {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn scale(mut self, scale: f64) -> Self {
        self.characteristic_scale = scale;
        self
    }
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: super::DEFAULT_ABS_TOL,
            characteristic_scale: 1.0,
            max_doublings: 80,
            max_subdivisions: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    /// Where a semi-infinite tail was cut, if any.
    pub truncation_point: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn finite_or_err(t: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { t })
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = finite_or_err(center, f(center))?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = abs(res_k);
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = finite_or_err(center - x, f(center - x))?;
        let f2 = finite_or_err(center + x, f(center + x))?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (abs(f1) + abs(f2));
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * abs(fc - mean);
    for j in 0..7 {
        res_asc += WGK[j] * (abs(fv1[j] - mean) + abs(fv2[j] - mean));
    }
    let value = res_k * half;
    let res_abs = res_abs * abs(half);
    let res_asc = res_asc * abs(half);
    let mut error = abs((res_k - res_g) * half);
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * powf(200.0 * error / res_asc, 1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
    })
}

/// Globally adaptive 7–15 Gauss–Kronrod quadrature on `[a, b]`.
///
/// The effective tolerance never drops below `100 ε` times the integral of
/// `|f|` over the accepted segments.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadratureResult> {
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            truncation_point: None,
        });
    }
    let mut segments: Vec<Segment> = Vec::with_capacity(64);
    segments.push(gauss_kronrod(f, a, b)?);
    loop {
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        let total: f64 = segments.iter().map(|s| s.value).sum();
        // Requests below the round-off floor of the summed segments cannot be met.
        let magnitude: f64 = segments.iter().map(|s| abs(s.value)).sum();
        if total_err <= abs_tol.max(100.0 * f64::EPSILON * magnitude) {
            return Ok(QuadratureResult {
                value: total,
                abs_error_estimate: total_err,
                truncation_point: None,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if segments.len() + 2 > max_subdivisions || mid <= seg.a || mid >= seg.b {
            // cannot refine further
            segments.push(seg);
            let total_err: f64 = segments.iter().map(|s| s.error).sum();
            return Err(Error::QuadratureFailed {
                estimate: total_err,
                requested: abs_tol,
            });
        }
        segments.push(gauss_kronrod(f, seg.a, mid)?);
        segments.push(gauss_kronrod(f, mid, seg.b)?);
    }
}

/// Local power-law decay exponent of `f` at `x`, from `f(x/2)` and `f(x)`.
fn local_exponent<F: Fn(f64) -> f64>(f: &F, x: f64) -> Option<f64> {
    let a = abs(f(0.5 * x));
    let b = abs(f(x));
    if a > 0.0 && b > 0.0 {
        Some(ln(a / b) / core::f64::consts::LN_2)
    } else {
        None
    }
}

/// Power-law estimate of `∫_x^∞ f`; zero once `f` has vanished, `None`
/// while the local decay exponent is still too small to use (before the
/// asymptotic regime has been reached).
fn tail_estimate<F: Fn(f64) -> f64>(f: &F, x: f64) -> Option<f64> {
    let fx = f(x);
    if fx == 0.0 {
        return Some(0.0);
    }
    match local_exponent(f, x) {
        Some(p) if p > 1.0 + 1e-6 => Some(x * fx / (p - 1.0)),
        _ => None,
    }
}

/// Integrates `f` over `[a, b]` (or `[a, ∞)`).
///
/// Semi-infinite integrals are cut at a truncation point that starts at
/// `max(1, 10·scale)` and doubles until the increment drops below
/// `abs_tol / 4`. With a power-law hint the increment is measured on the
/// tail-corrected value `∫_a^T f + T f(T)/(p − 1)`, where `p` is the local
/// decay exponent at `T`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: UpperLimit,
    opts: &QuadratureOptions,
    tail: Option<TailHint>,
) -> Result<QuadratureResult> {
    if !(opts.abs_tol > 0.0) {
        return Err(Error::InvalidArgument("abs_tol must be positive".into()));
    }
    let b = match (b, tail) {
        (UpperLimit::Finite(b), Some(TailHint::CompactSupport { radius })) if a < radius && radius < b => {
            // The end of the support is usually a kink; no node-based error
            // estimate can see a kink hidden between the outermost nodes.
            let left = integrate_finite(&f, a, radius, 0.5 * opts.abs_tol, opts.max_subdivisions)?;
            let right = integrate_finite(&f, radius, b, 0.5 * opts.abs_tol, opts.max_subdivisions)?;
            return Ok(QuadratureResult {
                value: left.value + right.value,
                abs_error_estimate: left.abs_error_estimate + right.abs_error_estimate,
                truncation_point: None,
            });
        }
        (UpperLimit::Finite(b), _) => {
            return integrate_finite(&f, a, b, opts.abs_tol, opts.max_subdivisions);
        }
        (UpperLimit::Infinite, Some(TailHint::CompactSupport { radius })) => {
            let r = integrate_finite(&f, a, radius.max(a), opts.abs_tol, opts.max_subdivisions)?;
            return Ok(QuadratureResult {
                truncation_point: Some(radius.max(a)),
                ..r
            });
        }
        (UpperLimit::Infinite, hint) => hint,
    };
    let power_law = matches!(b, Some(TailHint::PowerLaw { .. }));

    let t0 = 1f64.max(10.0 * opts.characteristic_scale);
    let mut t = if a < t0 { t0 } else { a + t0 };
    let head = integrate_finite(&f, a, t, opts.abs_tol / 4.0, opts.max_subdivisions)?;
    let mut sum = head.value;
    let mut err = head.error_only();

    if !power_law {
        probe_decreasing(&f, t)?;
    }

    // NaN marks a step whose tail correction is not yet usable.
    let mut previous = if power_law {
        tail_estimate(&f, t).map_or(f64::NAN, |e| sum + e)
    } else {
        sum
    };
    let mut last_inc = f64::INFINITY;
    let mut seg_tol = opts.abs_tol / 8.0;
    for _ in 0..opts.max_doublings {
        let seg = integrate_finite(&f, t, 2.0 * t, seg_tol, opts.max_subdivisions)?;
        sum += seg.value;
        err += seg.abs_error_estimate;
        t *= 2.0;
        seg_tol *= 0.5;
        let current = if power_law {
            tail_estimate(&f, t).map_or(f64::NAN, |e| sum + e)
        } else {
            sum
        };
        let inc = abs(current - previous);
        let inc = if inc.is_nan() { f64::INFINITY } else { inc };
        if inc < opts.abs_tol / 4.0 {
            let tail_bound = if power_law {
                inc
            } else {
                let q = inc / last_inc;
                if q < 1.0 {
                    (inc * q / (1.0 - q)).max(inc)
                } else {
                    inc
                }
            };
            return Ok(QuadratureResult {
                value: current,
                abs_error_estimate: err + tail_bound,
                truncation_point: Some(t),
            });
        }
        previous = current;
        last_inc = inc;
    }
    Err(Error::TailNotConvergent {
        truncation: t,
        increment: last_inc,
    })
}

impl QuadratureResult {
    fn error_only(&self) -> f64 {
        self.abs_error_estimate
    }
}

/// Without a hint the integrand must be eventually decreasing in magnitude.
fn probe_decreasing<F: Fn(f64) -> f64>(f: &F, start: f64) -> Result<()> {
    let mut prev = abs(f(start));
    let mut x = start;
    for _ in 0..8 {
        x *= 2.0;
        let v = abs(f(x));
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { t: x });
        }
        if v > prev * (1.0 + 1e-12) {
            return Err(Error::TailNotConvergent {
                truncation: x,
                increment: v,
            });
        }
        prev = v;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|t| t * t, 0.0, UpperLimit::Finite(3.0), &Default::default(), None)
            .unwrap();
        assert!((r.value - 9.0).abs() < 1e-13);
        assert!(r.truncation_point.is_none());
    }

    #[test]
    fn inverse_cube_tail_with_and_without_hint() {
        let f = |t: f64| (1.0 + t).powi(-3);
        let opts = QuadratureOptions::default();
        let plain = integrate(f, 0.0, UpperLimit::Infinite, &opts, None).unwrap();
        assert!((plain.value - 0.5).abs() <= plain.abs_error_estimate.max(1e-10));
        let hinted = integrate(
            f,
            0.0,
            UpperLimit::Infinite,
            &opts,
            Some(TailHint::PowerLaw { exponent: 3.0 }),
        )
        .unwrap();
        assert!((hinted.value - 0.5).abs() < 1e-10);
        assert!(hinted.truncation_point.unwrap() < plain.truncation_point.unwrap());
    }

    #[test]
    fn zero_integrand() {
        let r = integrate(|_| 0.0, 0.0, UpperLimit::Infinite, &Default::default(), None).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn divergent_tail_is_rejected() {
        let r = integrate(
            |t| 1.0 / (1.0 + t),
            0.0,
            UpperLimit::Infinite,
            &QuadratureOptions {
                max_doublings: 30,
                ..Default::default()
            },
            None,
        );
        assert!(matches!(r, Err(Error::TailNotConvergent { .. })), "{r:?}");
        let r = integrate(
            |t| 1.0 / (1.0 + t),
            0.0,
            UpperLimit::Infinite,
            &Default::default(),
            Some(TailHint::PowerLaw { exponent: 1.0 }),
        );
        assert!(matches!(r, Err(Error::TailNotConvergent { .. })), "{r:?}");
    }

    #[test]
    fn increasing_integrand_fails_probe() {
        let r = integrate(|t| t, 0.0, UpperLimit::Infinite, &Default::default(), None);
        assert!(matches!(r, Err(Error::TailNotConvergent { .. })));
    }

    #[test]
    fn nan_integrand() {
        let r = integrate(
            |t| if t > 0.5 { f64::NAN } else { 1.0 },
            0.0,
            UpperLimit::Finite(1.0),
            &Default::default(),
            None,
        );
        assert!(matches!(r, Err(Error::NonFiniteIntegrand { .. })));
    }

    #[test]
    fn compact_support_hint() {
        let r = integrate(
            |t: f64| (1.0 - t / 3.0).max(0.0),
            0.0,
            UpperLimit::Infinite,
            &Default::default(),
            Some(TailHint::CompactSupport { radius: 3.0 }),
        )
        .unwrap();
        assert!((r.value - 1.5).abs() < 1e-12);
        assert_eq!(r.truncation_point, Some(3.0));
    }
}
