use alloc::sync::Arc;
use core::fmt;

use super::profile::ProfileWarp;
use crate::math::{abs, atanh, exp, ln, sqrt};
use crate::numerics::CubicSpline;
use crate::{Error, Result};

/// `h`, `h′` and `h″` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpValue {
    pub h: f64,
    pub dh: f64,
    pub ddh: f64,
}

/// How a warp function is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    ClosedForm,
    ProfileDerived,
    Tabulated,
}

type CustomWarp = Arc<dyn Fn(f64) -> WarpValue + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Affine { slope: f64, offset: f64 },
    Exponential { rate: f64, amplitude: f64 },
    Schwarzschild3 { m: f64 },
    Profile(Arc<ProfileWarp>),
    Tabulated(Arc<CubicSpline>),
    Scaled { inner: Arc<WarpFunction>, factor: f64 },
    Custom(CustomWarp),
}

/// The warping function `h : [0, ∞) → (0, ∞)` with its first two derivatives.
#[derive(Clone)]
pub struct WarpFunction {
    repr: Repr,
}

impl fmt::Debug for WarpFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Affine { slope, offset } => write!(f, "Affine({slope} r + {offset})"),
            Repr::Exponential { rate, amplitude } => write!(f, "Exponential({amplitude} e^({rate} r))"),
            Repr::Schwarzschild3 { m } => write!(f, "Schwarzschild3(m = {m})"),
            Repr::Profile(p) => write!(f, "Profile({:?})", p.profile()),
            Repr::Tabulated(s) => write!(f, "Tabulated({} knots)", s.knots().len()),
            Repr::Scaled { inner, factor } => write!(f, "Scaled({factor} × {inner:?})"),
            Repr::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl WarpFunction {
    /// `h(r) = slope·r + offset`.
    pub fn affine(slope: f64, offset: f64) -> Result<Self> {
        if !(slope >= 0.0 && slope.is_finite()) || !(offset > 0.0 && offset.is_finite()) {
            return Err(Error::InvalidParameters(alloc::format!(
                "affine warp needs slope >= 0 and offset > 0, got slope = {slope}, offset = {offset}"
            )));
        }
        Ok(WarpFunction {
            repr: Repr::Affine { slope, offset },
        })
    }

    /// `h(r) = amplitude · e^(rate·r)`.
    pub fn exponential(rate: f64, amplitude: f64) -> Result<Self> {
        if !rate.is_finite() || !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidParameters(alloc::format!(
                "exponential warp needs finite rate and amplitude > 0, got {rate}, {amplitude}"
            )));
        }
        Ok(WarpFunction {
            repr: Repr::Exponential { rate, amplitude },
        })
    }

    /// Three-dimensional Schwarzschild warp with `h(0) = m`, by inverting the
    /// closed form of `r = F(s)`.
    pub fn schwarzschild3(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameters(alloc::format!("mass must be positive, got {m}")));
        }
        Ok(WarpFunction {
            repr: Repr::Schwarzschild3 { m },
        })
    }

    pub(crate) fn from_profile_warp(p: ProfileWarp) -> Self {
        WarpFunction {
            repr: Repr::Profile(Arc::new(p)),
        }
    }

    /// Natural cubic spline through `(r_i, h_i)`; `r_0` must be 0.
    pub fn tabulated(r: alloc::vec::Vec<f64>, h: alloc::vec::Vec<f64>) -> Result<Self> {
        if r.first() != Some(&0.0) {
            return Err(Error::InvalidParameters("warp samples must start at r = 0".into()));
        }
        if h.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidParameters("warp samples must be positive".into()));
        }
        let spline = CubicSpline::new(r, h).map_err(|e| Error::InvalidParameters(alloc::format!("{e}")))?;
        let w = WarpFunction {
            repr: Repr::Tabulated(Arc::new(spline)),
        };
        let last = *w.tabulated_knots().last().expect("knots");
        if w.eval(last).dh < 0.0 {
            return Err(Error::InvalidParameters(
                "tabulated warp must be nondecreasing at its last sample".into(),
            ));
        }
        Ok(w)
    }

    /// Any user evaluator returning `(h, h′, h″)`.
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64) -> WarpValue + Send + Sync + 'static,
    {
        WarpFunction {
            repr: Repr::Custom(Arc::new(f)),
        }
    }

    /// `factor · h`.
    pub fn scaled(self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameters(alloc::format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Ok(WarpFunction {
            repr: Repr::Scaled {
                inner: Arc::new(self),
                factor,
            },
        })
    }

    fn tabulated_knots(&self) -> &[f64] {
        match &self.repr {
            Repr::Tabulated(s) => s.knots(),
            _ => &[],
        }
    }

    pub fn representation(&self) -> Representation {
        match &self.repr {
            Repr::Profile(_) => Representation::ProfileDerived,
            Repr::Tabulated(_) => Representation::Tabulated,
            Repr::Scaled { inner, .. } => inner.representation(),
            _ => Representation::ClosedForm,
        }
    }

    /// True when `h″ ≡ 0`.
    pub fn is_affine(&self) -> Option<(f64, f64)> {
        match &self.repr {
            Repr::Affine { slope, offset } => Some((*slope, *offset)),
            Repr::Scaled { inner, factor } => inner.is_affine().map(|(a, b)| (a * factor, b * factor)),
            _ => None,
        }
    }

    pub fn eval(&self, r: f64) -> WarpValue {
        match &self.repr {
            Repr::Affine { slope, offset } => WarpValue {
                h: slope * r + offset,
                dh: *slope,
                ddh: 0.0,
            },
            Repr::Exponential { rate, amplitude } => {
                let h = amplitude * exp(rate * r);
                WarpValue {
                    h,
                    dh: rate * h,
                    ddh: rate * rate * h,
                }
            }
            Repr::Schwarzschild3 { m } => schwarzschild3(*m, r),
            Repr::Profile(p) => p.eval(r),
            Repr::Tabulated(s) => {
                let (h, dh, ddh) = s.eval(r);
                WarpValue { h, dh, ddh }
            }
            Repr::Scaled { inner, factor } => {
                let v = inner.eval(r);
                WarpValue {
                    h: factor * v.h,
                    dh: factor * v.dh,
                    ddh: factor * v.ddh,
                }
            }
            Repr::Custom(f) => f(r),
        }
    }

    #[inline]
    pub fn h(&self, r: f64) -> f64 {
        self.eval(r).h
    }

    /// Compares `h′` and `h″` against centered differences at every grid point
    /// (`r ≥ eps`); returns the worst scaled discrepancy.
    pub fn check_derivatives(&self, grid: &[f64], tol: f64) -> Result<f64> {
        let mut worst = 0.0f64;
        for &r in grid {
            let eps = 1e-5 * r.max(1.0);
            if r < eps {
                continue;
            }
            let (a, b) = (self.eval(r - eps), self.eval(r + eps));
            let v = self.eval(r);
            let d1 = abs((b.h - a.h) / (2.0 * eps) - v.dh) / v.dh.abs().max(1.0);
            let d2 = abs((b.dh - a.dh) / (2.0 * eps) - v.ddh) / (v.ddh.abs().max(1.0));
            let d = d1.max(d2);
            if !(d <= tol) {
                return Err(Error::InvalidParameters(alloc::format!(
                    "warp derivatives inconsistent at r = {r} (discrepancy {d:e})"
                )));
            }
            worst = worst.max(d);
        }
        Ok(worst)
    }
}

/// Closed-form inverse of the 3-dimensional Schwarzschild radial map.
///
/// Near the horizon (`r < 4m`) Newton runs on `v = h′ = √(1 − m/s)`, where
/// `r = m v/(1 − v²) + m atanh v` is convex; farther out on `s` itself, where
/// `r = s√ω + m ln(1 + √ω) + (m/2) ln(s/m)` is concave. Both iterations are
/// monotone after at most one step.
pub(crate) fn schwarzschild3(m: f64, r: f64) -> WarpValue {
    let r = r.max(0.0);
    let (s, v) = if r < 4.0 * m {
        let mut v = (r / (2.0 * m)).min(1.0 - 1e-3);
        for _ in 0..200 {
            let w = 1.0 - v * v;
            let g = m * v / w + m * atanh(v) - r;
            let dg = 2.0 * m / (w * w);
            let step = g / dg;
            v -= step;
            if abs(step) <= 2.0 * f64::EPSILON * v.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        let v = v.clamp(0.0, 1.0);
        (m / (1.0 - v * v), v)
    } else {
        let mut s = r;
        for _ in 0..200 {
            let sq = sqrt(1.0 - m / s);
            let g = s * sq + m * ln(1.0 + sq) + 0.5 * m * ln(s / m) - r;
            let step = g * sq;
            s -= step;
            if abs(step) <= 2.0 * f64::EPSILON * s {
                break;
            }
        }
        (s, sqrt(1.0 - m / s))
    };
    WarpValue {
        h: s,
        dh: v,
        ddh: m / (2.0 * s * s),
    }
}

/// `r = F(s)` for 3-dimensional Schwarzschild.
pub fn schwarzschild3_radius(m: f64, s: f64) -> f64 {
    let sq = sqrt((1.0 - m / s).max(0.0));
    s * sq + m * ln(1.0 + sq) + 0.5 * m * ln(s / m)
}
