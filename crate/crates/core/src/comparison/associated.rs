//! Associated curvature-decay functions λ and their decay constants.

use alloc::sync::Arc;
use core::fmt;

use crate::math::powf;
use crate::numerics::{integrate, QuadratureOptions, TailHint, UpperLimit};
use crate::{Error, Result};

/// How an associated function behaves at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailDescriptor {
    /// `λ(t) = 0` for `t >= radius`.
    CompactSupport { radius: f64 },
    /// `λ(t) ~ C t^(-exponent)`.
    PowerLaw { exponent: f64 },
    /// Unknown; quadrature probes the integrand for eventual decrease.
    Probe,
}

/// Where an associated function came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Envelope,
    UserSupplied,
    Builtin,
}

/// A nonnegative, nonincreasing curvature-decay bound `λ(t)` on `[0, ∞)`.
#[derive(Clone)]
pub struct AssociatedFunction {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    tail: TailDescriptor,
    provenance: Provenance,
    scale: f64,
    zero: bool,
}

impl fmt::Debug for AssociatedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AssociatedFunction")
            .field("tail", &self.tail)
            .field("provenance", &self.provenance)
            .field("scale", &self.scale)
            .field("zero", &self.zero)
            .finish_non_exhaustive()
    }
}

impl AssociatedFunction {
    /// Wraps an arbitrary evaluator. `scale` is the length over which λ
    /// varies appreciably; quadrature starts its tail doubling at `10·scale`.
    pub fn from_fn<F>(f: F, tail: TailDescriptor, provenance: Provenance, scale: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        AssociatedFunction {
            eval: Arc::new(f),
            tail,
            provenance,
            scale: if scale.is_finite() && scale > 0.0 { scale } else { 1.0 },
            zero: false,
        }
    }

    /// `λ ≡ 0`.
    pub fn zero() -> Self {
        AssociatedFunction {
            eval: Arc::new(|_| 0.0),
            tail: TailDescriptor::CompactSupport { radius: 0.0 },
            provenance: Provenance::Builtin,
            scale: 1.0,
            zero: true,
        }
    }

    /// `c (1 + t)^(-p)`; integrable against `t dt` iff `p > 2`.
    pub fn power_law(c: f64, p: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) || !(p > 2.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "power-law family needs c >= 0 and p > 2, got c = {c}, p = {p}"
            )));
        }
        if c == 0.0 {
            return Ok(Self::zero());
        }
        Ok(Self::from_fn(
            move |t| c * powf(1.0 + t.max(0.0), -p),
            TailDescriptor::PowerLaw { exponent: p },
            Provenance::Builtin,
            1.0,
        ))
    }

    /// `c · max(0, 1 − t/a)`.
    pub fn triangular(c: f64, a: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) || !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "triangular family needs c >= 0 and a > 0, got c = {c}, a = {a}"
            )));
        }
        if c == 0.0 {
            return Ok(Self::zero());
        }
        Ok(Self::from_fn(
            move |t| c * (1.0 - t.max(0.0) / a).max(0.0),
            TailDescriptor::CompactSupport { radius: a },
            Provenance::Builtin,
            a / 10.0,
        ))
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn tail(&self) -> TailDescriptor {
        self.tail
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// True only for functions constructed as identically zero.
    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// `t ↦ λ(r0 + t)`, the associated function seen from a slice at `r0`.
    pub fn shifted(&self, r0: f64) -> Self {
        if self.zero || r0 == 0.0 {
            return self.clone();
        }
        let inner = self.eval.clone();
        let tail = match self.tail {
            TailDescriptor::CompactSupport { radius } => TailDescriptor::CompactSupport {
                radius: (radius - r0).max(0.0),
            },
            other => other,
        };
        AssociatedFunction {
            eval: Arc::new(move |t| inner(r0 + t)),
            tail,
            provenance: self.provenance,
            scale: self.scale,
            zero: false,
        }
    }

    /// Points where `λ` may fail to be smooth: the end of a compact support.
    pub fn breakpoints(&self) -> Option<f64> {
        match self.tail {
            TailDescriptor::CompactSupport { radius } if radius > 0.0 && !self.zero => Some(radius),
            _ => None,
        }
    }

    /// Tail hint for `∫ t^k λ(t) dt`.
    pub fn moment_hint(&self, k: u32) -> Option<TailHint> {
        match self.tail {
            TailDescriptor::CompactSupport { radius } => Some(TailHint::CompactSupport { radius }),
            TailDescriptor::PowerLaw { exponent } => Some(TailHint::PowerLaw {
                exponent: exponent - k as f64,
            }),
            TailDescriptor::Probe => None,
        }
    }

    /// Checks nonnegativity and monotonicity on `grid` (ascending).
    pub fn validate(&self, grid: &[f64], tol: f64) -> Result<()> {
        let mut prev: Option<(f64, f64)> = None;
        for &t in grid {
            let v = self.eval(t);
            if !v.is_finite() {
                return Err(Error::NotAdmissible(alloc::format!("λ({t}) is not finite")));
            }
            if v < -tol {
                return Err(Error::NotAdmissible(alloc::format!("λ({t}) = {v} is negative")));
            }
            if let Some((tp, vp)) = prev {
                if v > vp + tol * vp.abs().max(1.0) {
                    return Err(Error::NotAdmissible(alloc::format!(
                        "λ increases between t = {tp} and t = {t} ({vp} -> {v})"
                    )));
                }
            }
            prev = Some((t, v));
        }
        Ok(())
    }
}

/// `b0 = ∫ t λ` and `b1 = ∫ λ` with quadrature error estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayConstants {
    pub b0: f64,
    pub b1: f64,
    pub b0_error: f64,
    pub b1_error: f64,
}

impl DecayConstants {
    pub const ZERO: DecayConstants = DecayConstants {
        b0: 0.0,
        b1: 0.0,
        b0_error: 0.0,
        b1_error: 0.0,
    };

    pub fn is_zero(&self) -> bool {
        self.b0 == 0.0 && self.b1 == 0.0
    }
}

pub fn decay_constants(lambda: &AssociatedFunction, abs_tol: f64) -> Result<DecayConstants> {
    if lambda.is_zero() {
        return Ok(DecayConstants::ZERO);
    }
    let opts = QuadratureOptions::with_abs_tol(abs_tol).scale(lambda.scale());
    let b1 = integrate(|t| lambda.eval(t), 0.0, UpperLimit::Infinite, &opts, lambda.moment_hint(0))?;
    let b0 = integrate(
        |t| t * lambda.eval(t),
        0.0,
        UpperLimit::Infinite,
        &opts,
        lambda.moment_hint(1),
    )?;
    Ok(DecayConstants {
        b0: b0.value.max(0.0),
        b1: b1.value.max(0.0),
        b0_error: b0.abs_error_estimate,
        b1_error: b1.abs_error_estimate,
    })
}
