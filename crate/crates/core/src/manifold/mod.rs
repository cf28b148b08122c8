//! Warped products `[0, ∞) × N` with metric `dr² + h(r)² g_N`.

mod conditions;
mod profile;
mod warp;

pub use conditions::{
    check_conditions, envelope_lambda, envelope_table, lambda_bounds, radial_ricci,
    radial_ricci_from_riccati, ConditionFlags, Envelope, ProbeSettings,
};
pub use profile::{Profile, ProfileOptions, ProfileWarp};
pub use warp::{schwarzschild3_radius, Representation, WarpFunction, WarpValue};

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::avr::sphere_ball_constants;
use crate::comparison::{AssociatedFunction, TailDescriptor};
use crate::math::{abs, exp, ln};
use crate::numerics::solve_ivp_with_breakpoints;
use crate::{Error, Result};

/// The cross-section `N`; it enters every formula only through its dimension,
/// volume and lower Ricci bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberManifold {
    pub dim: usize,
    pub area: f64,
    /// `ρ` in `Ric_N ≥ (dim − 1) ρ g_N`.
    pub ricci_lower: f64,
    pub is_round_sphere: bool,
    /// Intrinsic diameter; only the rigidity checks use it.
    pub diameter: Option<f64>,
}

impl FiberManifold {
    /// Unit round sphere `S^dim`.
    pub fn round_sphere(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameters(alloc::format!(
                "fiber dimension must be at least 2, got {dim}"
            )));
        }
        Ok(FiberManifold {
            dim,
            area: sphere_ball_constants(dim + 1).0,
            ricci_lower: 1.0,
            is_round_sphere: true,
            diameter: Some(core::f64::consts::PI),
        })
    }

    /// A general fiber described by its data.
    pub fn new(dim: usize, area: f64, ricci_lower: f64, diameter: Option<f64>) -> Result<Self> {
        let fiber = FiberManifold {
            dim,
            area,
            ricci_lower,
            is_round_sphere: false,
            diameter,
        };
        fiber.validate()?;
        Ok(fiber)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParameters(alloc::format!(
                "fiber dimension must be at least 2, got {}",
                self.dim
            )));
        }
        if !(self.area > 0.0 && self.area.is_finite()) {
            return Err(Error::InvalidParameters(alloc::format!(
                "fiber area must be positive, got {}",
                self.area
            )));
        }
        if !self.ricci_lower.is_finite() {
            return Err(Error::InvalidParameters("fiber Ricci bound must be finite".into()));
        }
        if let Some(d) = self.diameter {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidParameters(alloc::format!(
                    "fiber diameter must be positive, got {d}"
                )));
            }
        }
        if self.is_round_sphere {
            let expected = sphere_ball_constants(self.dim + 1).0;
            if abs(self.area - expected) > 1e-12 * expected || self.ricci_lower != 1.0 {
                return Err(Error::InvalidParameters(
                    "a round-sphere fiber must have unit-sphere area and ρ = 1".into(),
                ));
            }
        }
        Ok(())
    }
}

/// `M = [0, ∞) × N`, `g = dr² + h(r)² g_N`.
#[derive(Debug, Clone)]
pub struct WarpedProduct {
    pub fiber: FiberManifold,
    pub warp: WarpFunction,
    /// Ambient dimension `fiber.dim + 1`.
    pub n: usize,
}

impl WarpedProduct {
    pub fn new(fiber: FiberManifold, warp: WarpFunction) -> Result<Self> {
        fiber.validate()?;
        for &r in &[0.0, 0.5, 1.0, 10.0, 100.0] {
            let h = warp.h(r);
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameters(alloc::format!(
                    "warp must be positive and finite, h({r}) = {h}"
                )));
            }
        }
        Ok(WarpedProduct {
            n: fiber.dim + 1,
            fiber,
            warp,
        })
    }

    /// Length scale `max(1, h(0))` used for probes and quadrature.
    pub fn scale(&self) -> f64 {
        self.warp.h(0.0).max(1.0)
    }

    pub fn eval(&self, r: f64) -> WarpValue {
        self.warp.eval(r)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameters(alloc::format!(
            "ambient dimension must be at least 3, got {n}"
        )));
    }
    Ok(())
}

/// Converts a profile `ω` with root (or left end) `s̲` into a warped product.
pub fn from_profile(profile: Profile, s_min: f64, fiber: FiberManifold) -> Result<WarpedProduct> {
    from_profile_with(profile, s_min, fiber, &ProfileOptions::default())
}

pub fn from_profile_with(
    profile: Profile,
    s_min: f64,
    fiber: FiberManifold,
    opts: &ProfileOptions,
) -> Result<WarpedProduct> {
    if let Profile::Flat = profile {
        return WarpedProduct::new(fiber, WarpFunction::affine(1.0, s_min)?);
    }
    let pw = profile::build_profile_warp(profile, s_min, opts)?;
    WarpedProduct::new(fiber, WarpFunction::from_profile_warp(pw))
}

/// Schwarzschild exterior of mass `m` in dimension `n`, starting at the horizon.
pub fn schwarzschild(m: f64, n: usize) -> Result<WarpedProduct> {
    check_dim(n)?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameters(alloc::format!("mass must be positive, got {m}")));
    }
    let fiber = FiberManifold::round_sphere(n - 1)?;
    if n == 3 {
        return WarpedProduct::new(fiber, WarpFunction::schwarzschild3(m)?);
    }
    let profile = Profile::Schwarzschild { m, n };
    let s = profile.root().expect("builtin root");
    from_profile(profile, s, fiber)
}

/// Reissner–Nordström exterior (`m > 2q > 0`), starting at the outer horizon.
pub fn reissner_nordstrom(m: f64, q: f64, n: usize) -> Result<WarpedProduct> {
    check_dim(n)?;
    if !(q > 0.0 && m > 2.0 * q && m.is_finite()) {
        return Err(Error::InvalidParameters(alloc::format!(
            "Reissner–Nordström needs m > 2q > 0, got m = {m}, q = {q}"
        )));
    }
    let profile = Profile::ReissnerNordstrom { m, q, n };
    let s = profile.root().expect("builtin root");
    from_profile(profile, s, FiberManifold::round_sphere(n - 1)?)
}

/// Truncated cone `h(r) = slope·r + offset` over `fiber`.
pub fn cone(slope: f64, offset: f64, fiber: FiberManifold) -> Result<WarpedProduct> {
    WarpedProduct::new(fiber, WarpFunction::affine(slope, offset)?)
}

/// `h(r) = amplitude·e^(rate·r)`.
pub fn exponential(rate: f64, amplitude: f64, fiber: FiberManifold) -> Result<WarpedProduct> {
    WarpedProduct::new(fiber, WarpFunction::exponential(rate, amplitude)?)
}

/// The warp whose radial curvature is exactly `λ`: `h″ = λ h`, `h(0) = 1`,
/// `h′(0) = initial_slope`.
///
/// `h` is integrated up to the end of the support of `λ` (or `1e9·scale`
/// for unbounded support) and continued linearly beyond.
pub fn jacobi(lambda: &AssociatedFunction, initial_slope: f64, fiber: FiberManifold) -> Result<WarpedProduct> {
    if !(initial_slope >= 0.0 && initial_slope.is_finite()) {
        return Err(Error::InvalidParameters(alloc::format!(
            "initial slope must be finite and nonnegative, got {initial_slope}"
        )));
    }
    if lambda.is_zero() {
        return WarpedProduct::new(fiber, WarpFunction::affine(initial_slope, 1.0)?);
    }
    let r_max = match lambda.tail() {
        TailDescriptor::CompactSupport { radius } if radius > 0.0 => 2.0 * radius,
        _ => 1e9 * lambda.scale().max(1.0),
    };
    let stops: Vec<f64> = lambda.breakpoints().into_iter().collect();
    let lam = lambda.clone();
    let sol = solve_ivp_with_breakpoints(move |t| lam.eval(t), 1.0, initial_slope, r_max, 1e-12, &stops)?;
    let end = sol.evaluate(r_max).expect("endpoint lies in range");
    let sol = Arc::new(sol);
    let lam = lambda.clone();
    let warp = WarpFunction::custom(move |r| {
        let r = r.max(0.0);
        let (h, dh) = sol
            .evaluate(r)
            .unwrap_or((end.0 + end.1 * (r - r_max), end.1));
        WarpValue { h, dh, ddh: lam.eval(r) * h }
    });
    WarpedProduct::new(fiber, warp)
}

/// `b0 = (1 + ln 4)/3` of the 3-dimensional Schwarzschild space (any mass).
pub fn schwarzschild3_b0() -> f64 {
    (1.0 + ln(4.0)) / 3.0
}

/// The mass `m = (2/(3κ)) e^{b0}` of the rescaled-Schwarzschild family.
pub fn modified_schwarzschild_mass(kappa: f64) -> f64 {
    2.0 / (3.0 * kappa) * exp(schwarzschild3_b0())
}

/// Three-dimensional Schwarzschild warp normalised to `ϱ = h/m`, `ϱ(0) = 1`,
/// with `m = (2/(3κ)) e^{b0}`.
pub fn modified_schwarzschild(kappa: f64) -> Result<WarpedProduct> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameters(alloc::format!("κ must be positive, got {kappa}")));
    }
    let m = modified_schwarzschild_mass(kappa);
    WarpedProduct::new(
        FiberManifold::round_sphere(2)?,
        WarpFunction::schwarzschild3(m)?.scaled(1.0 / m)?,
    )
}
