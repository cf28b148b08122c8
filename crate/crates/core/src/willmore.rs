//! The Willmore-type inequality on slices of warped products, its equality
//! cases, the minimal-area corollary, the slice functional `𝓕`, and the
//! rigidity / weaker-constant side checks.

use alloc::vec::Vec;

use crate::avr::{estimate_avr, sphere_ball_constants, AvrEstimate, AvrSettings};
use crate::comparison::{decay_constants, sample_grid, AssociatedFunction, DecayConstants};
use crate::manifold::{check_conditions, envelope_lambda, ConditionFlags, ProbeSettings, WarpedProduct};
use crate::math::{abs, exp, powf, powi};
use crate::numerics::{extrapolate_limit, DEFAULT_ABS_TOL};
use crate::{Error, Result};

/// The slice `Σ = {r0} × N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceData {
    pub r0: f64,
    /// `|Σ| = |N| h(r0)^{n−1}`.
    pub area: f64,
    /// `H = (n−1) h′(r0)/h(r0)`.
    pub mean_curvature: f64,
    /// `𝘩 = H/(n−1)`.
    pub mean_ratio: f64,
}

impl SliceData {
    pub fn new(w: &WarpedProduct, r0: f64) -> Result<Self> {
        if !(r0 >= 0.0 && r0.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "slice radius must be finite and nonnegative, got {r0}"
            )));
        }
        let v = w.eval(r0);
        let k = w.n as f64 - 1.0;
        Ok(SliceData {
            r0,
            area: w.fiber.area * powi(v.h, w.n as i32 - 1),
            mean_curvature: k * v.dh / v.h,
            mean_ratio: v.dh / v.h,
        })
    }
}

/// `e^{(n−1)b0} |Σ| (|𝘩|(1 + b0) + b1)^{n−1}`.
pub fn willmore_lhs(w: &WarpedProduct, slice: &SliceData, c: &DecayConstants) -> f64 {
    let k = w.n as i32 - 1;
    let f = abs(slice.mean_ratio) * (1.0 + c.b0) + c.b1;
    exp(k as f64 * c.b0) * slice.area * powi(f, k)
}

/// `∫_Σ |H/(n−1)|^{n−1} dσ`, the form the inequality takes when `λ ≡ 0`.
pub fn reduced_lhs(w: &WarpedProduct, slice: &SliceData) -> f64 {
    slice.area * powi(abs(slice.mean_ratio), w.n as i32 - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualityClass {
    /// Equality with `λ ≡ 0`: the exterior is a truncated cone.
    EqualityW1,
    /// Equality with `λ ≠ 0`: the warp grows like `e^{b0} f r`.
    EqualityW2,
    Strict,
    Indeterminate,
}

impl EqualityClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            EqualityClass::EqualityW1 => "equality-W1",
            EqualityClass::EqualityW2 => "equality-W2",
            EqualityClass::Strict => "strict",
            EqualityClass::Indeterminate => "indeterminate",
        }
    }
}

/// Numerical settings of a verification.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    pub probe: ProbeSettings,
    pub avr: AvrSettings,
    pub quad_abs_tol: f64,
    /// `|gap| ≤ equality_threshold·rhs` is a candidate equality, and
    /// `|limit_ratio − 1| ≤ equality_threshold` confirms the `W2` shape.
    pub equality_threshold: f64,
    /// Relative tolerance of the `W1` truncated-cone shape check.
    pub shape_tol: f64,
    /// `gap < −soundness_tol·rhs` counts as a violation.
    pub soundness_tol: f64,
    /// Horizon of the limit-ratio extrapolation, in units of the scale.
    pub limit_horizon: f64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings {
            probe: ProbeSettings::default(),
            avr: AvrSettings::default(),
            quad_abs_tol: DEFAULT_ABS_TOL,
            equality_threshold: 1e-4,
            shape_tol: 1e-6,
            soundness_tol: 1e-6,
            limit_horizon: 1e6,
        }
    }
}

/// Everything about a manifold that does not depend on the slice.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub manifold: WarpedProduct,
    pub flags: ConditionFlags,
    /// `true` when (Λ1) fails and the `λ ≡ 0` form applies.
    pub flat_regime: bool,
    pub lambda: AssociatedFunction,
    pub constants: DecayConstants,
    pub avr: AvrEstimate,
    pub settings: VerifySettings,
}

/// Probes conditions, builds the envelope and computes `b0`, `b1`, `AVR✠`.
pub fn analyze(w: &WarpedProduct, settings: &VerifySettings) -> Result<Analysis> {
    let flags = check_conditions(w, &settings.probe);
    if !flags.envelope_admissible {
        return Err(Error::ConditionsFailed(alloc::format!(
            "the curvature envelope is not admissible: {}",
            flags.diagnostics.join("; ")
        )));
    }
    let flat_regime = !flags.lambda1_positive_somewhere;
    let (lambda, constants) = if flat_regime {
        (AssociatedFunction::zero(), DecayConstants::ZERO)
    } else {
        let lam = envelope_lambda(w, &settings.probe)?;
        let c = decay_constants(&lam, settings.quad_abs_tol)?;
        (lam, c)
    };
    let avr = estimate_avr(w, &settings.avr)?;
    Ok(Analysis {
        manifold: w.clone(),
        flags,
        flat_regime,
        lambda,
        constants,
        avr,
        settings: settings.clone(),
    })
}

/// Result of the truncated-cone shape test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W1Check {
    /// `r₀* = (|Σ| / (AVR |S^{n−1}|))^{1/(n−1)}`.
    pub r0_star: f64,
    /// `max |h(r0+t) − h(r0)(1 + t/r₀*)| / h(r0+t)` on the sample grid.
    pub max_shape_error: f64,
    pub passes: bool,
}

pub fn equality_w1_check(w: &WarpedProduct, r0: f64, avr: f64, tol: f64) -> Result<W1Check> {
    let slice = SliceData::new(w, r0)?;
    let (sphere, _) = sphere_ball_constants(w.n);
    if !(avr > 0.0) {
        return Ok(W1Check {
            r0_star: f64::INFINITY,
            max_shape_error: f64::INFINITY,
            passes: false,
        });
    }
    let r0_star = powf(slice.area / (avr * sphere), 1.0 / (w.n as f64 - 1.0));
    let h0 = w.warp.h(r0);
    let err = sample_grid(1e3 * w.scale(), 200)
        .into_iter()
        .map(|t| {
            let h = w.warp.h(r0 + t);
            abs(h - h0 * (1.0 + t / r0_star)) / h
        })
        .fold(0.0, f64::max);
    Ok(W1Check {
        r0_star,
        max_shape_error: err,
        passes: err <= tol,
    })
}

/// `lim_{t→∞} ϱ(r0+t) / (e^{b0} f t)` with `ϱ(r0+t) = h(r0+t)/h(r0)`.
///
/// The limit is taken on the slope `h′(r0+t)/h(r0)`, which has the same
/// limit as `ϱ(r0+t)/t` and converges without logarithmic corrections;
/// samples at `horizon·{10⁻³, 10⁻², 10⁻¹, 1}` are Richardson-extrapolated.
/// Returns `None` when `f = 0` (the ratio is undefined).
pub fn equality_limit_ratio(
    w: &WarpedProduct,
    r0: f64,
    c: &DecayConstants,
    horizon: f64,
) -> Result<Option<(f64, f64)>> {
    let slice = SliceData::new(w, r0)?;
    let f = abs(slice.mean_ratio) * (1.0 + c.b0) + c.b1;
    if f == 0.0 {
        return Ok(None);
    }
    let h0 = w.warp.h(r0);
    let denom = exp(c.b0) * f * h0;
    let samples: Vec<(f64, f64)> = [1e-3, 1e-2, 1e-1, 1.0]
        .iter()
        .map(|&k| {
            let t = k * horizon;
            (t, w.eval(r0 + t).dh / denom)
        })
        .collect();
    let (v, e) = extrapolate_limit(&samples)?;
    Ok(Some((v, e)))
}

/// `|Σ| ≥ AVR |S^{n−1}| / (e^{b0} b1)^{n−1}` for closed minimal hypersurfaces.
pub fn minimal_area_bound(n: usize, c: &DecayConstants, avr: f64) -> Result<f64> {
    if c.b1 == 0.0 {
        return Err(Error::DivisionDegenerate);
    }
    let (sphere, _) = sphere_ball_constants(n);
    Ok(avr * sphere / powi(exp(c.b0) * c.b1, n as i32 - 1))
}

/// `𝓕(t) = |N| (|h′/h|(1 + b0) + b1)^{n−1}`.
pub fn script_f(w: &WarpedProduct, c: &DecayConstants, t: f64) -> f64 {
    let v = w.eval(t);
    w.fiber.area * powi(abs(v.dh / v.h) * (1.0 + c.b0) + c.b1, w.n as i32 - 1)
}

/// `𝓕′(t) = (n−1)|N|(1 + b0)(h′/h (1 + b0) + b1)^{n−2}(h″/h − h′²/h²)`,
/// valid where `h′ ≥ 0`.
pub fn script_f_prime(w: &WarpedProduct, c: &DecayConstants, t: f64) -> f64 {
    let v = w.eval(t);
    let u = v.dh / v.h;
    let k = w.n as f64 - 1.0;
    k * w.fiber.area * (1.0 + c.b0) * powi(u * (1.0 + c.b0) + c.b1, w.n as i32 - 2)
        * (v.ddh / v.h - u * u)
}

/// Full report for one slice.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub slice: SliceData,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    /// `gap / rhs` (infinite when `rhs = 0`).
    pub relative_slack: f64,
    /// The `λ ≡ 0` form `∫|H/(n−1)|^{n−1}`.
    pub reduced_lhs: f64,
    pub constants: DecayConstants,
    pub avr: AvrEstimate,
    pub flags: ConditionFlags,
    pub flat_regime: bool,
    pub equality_class: EqualityClass,
    /// `(value, error)` of the limit ratio when it is defined.
    pub limit_ratio: Option<(f64, f64)>,
    pub w1: Option<W1Check>,
    /// Numerical error budget of `gap`.
    pub tolerance: f64,
}

impl VerificationReport {
    /// `gap` is negative beyond the error budget.
    pub fn violated(&self) -> bool {
        self.gap < -self.tolerance
    }
}

pub fn verify_slice(a: &Analysis, r0: f64) -> Result<VerificationReport> {
    let w = &a.manifold;
    let s = &a.settings;
    let slice = SliceData::new(w, r0)?;
    let c = a.constants;
    let lhs = willmore_lhs(w, &slice, &c);
    let (sphere, _) = sphere_ball_constants(w.n);
    let rhs = a.avr.value * sphere;
    let gap = lhs - rhs;
    let relative_slack = if rhs > 0.0 { gap / rhs } else { f64::INFINITY };

    // First-order propagation of the b0, b1 and AVR errors.
    let k = w.n as f64 - 1.0;
    let f = abs(slice.mean_ratio) * (1.0 + c.b0) + c.b1;
    let lhs_err = if f > 0.0 {
        lhs * (k * c.b0_error + k * (abs(slice.mean_ratio) * c.b0_error + c.b1_error) / f)
    } else {
        0.0
    };
    let tolerance = (s.soundness_tol * rhs).max(lhs_err + a.avr.error_estimate * sphere);

    let limit_ratio = equality_limit_ratio(w, r0, &c, s.limit_horizon * w.scale())?;
    let eq = s.equality_threshold;
    let mut w1 = None;
    let equality_class = if gap > eq * rhs {
        EqualityClass::Strict
    } else if gap < -eq * rhs {
        EqualityClass::Indeterminate
    } else if a.flat_regime {
        let check = equality_w1_check(w, r0, a.avr.value, s.shape_tol)?;
        w1 = Some(check);
        if check.passes {
            EqualityClass::EqualityW1
        } else {
            EqualityClass::Indeterminate
        }
    } else {
        match limit_ratio {
            Some((v, _)) if abs(v - 1.0) <= eq => EqualityClass::EqualityW2,
            Some(_) => EqualityClass::Strict,
            None => EqualityClass::Indeterminate,
        }
    };
    Ok(VerificationReport {
        slice,
        lhs,
        rhs,
        gap,
        relative_slack,
        reduced_lhs: reduced_lhs(w, &slice),
        constants: c,
        avr: a.avr.clone(),
        flags: a.flags.clone(),
        flat_regime: a.flat_regime,
        equality_class,
        limit_ratio,
        w1,
        tolerance,
    })
}

/// One-shot verification of the slice `{r0} × N`.
pub fn verify_inequality(w: &WarpedProduct, r0: f64, settings: &VerifySettings) -> Result<VerificationReport> {
    verify_slice(&analyze(w, settings)?, r0)
}

/// Euclidean-rigidity criteria, Li's inradius bound and the weaker constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnexReport {
    pub r0_star: f64,
    /// `h(r0)·diam(N)` against `π r₀*`.
    pub slice_diameter: f64,
    pub diameter_criterion: bool,
    /// `|Σ|` against `r₀*^{n−1} |S^{n−1}|`.
    pub area_criterion: bool,
    /// `1/k` for `H = (n−1)k > 0`.
    pub li_bound: Option<f64>,
    /// Largest distance from `Σ` to a point of the region it encloses.
    pub inradius: f64,
    /// `inradius = 1/k`, the rigid case of Li's bound.
    pub li_equality: bool,
    /// `AVR |S^{n−1}|`.
    pub sharp_constant: f64,
    /// `AVR |S^{n−2}|/(n−1)`.
    pub weaker_constant: f64,
}

pub fn annex_checks(w: &WarpedProduct, r0: f64, avr: f64) -> Result<AnnexReport> {
    let slice = SliceData::new(w, r0)?;
    let (sphere, _) = sphere_ball_constants(w.n);
    let (sphere_low, _) = sphere_ball_constants(w.n - 1);
    let diam_n = match w.fiber.diameter {
        Some(d) => d,
        None if w.fiber.is_round_sphere => core::f64::consts::PI,
        None => return Err(Error::MissingFiberDiameter),
    };
    let k = w.n as f64 - 1.0;
    let r0_star = if avr > 0.0 {
        powf(slice.area / (avr * sphere), 1.0 / k)
    } else {
        f64::INFINITY
    };
    let v = w.eval(r0);
    let slice_diameter = v.h * diam_n;
    let kappa = v.dh / v.h;
    let li_bound = (kappa > 0.0).then(|| 1.0 / kappa);
    // A unit-slope affine warp over a round sphere closes up smoothly into a
    // Euclidean ball at r = −h(0); otherwise the enclosed region ends at Γ₀.
    let inradius = match w.warp.is_affine() {
        Some((a, b)) if w.fiber.is_round_sphere && abs(a - 1.0) < 1e-15 => r0 + b,
        _ => r0,
    };
    let li_equality = li_bound.is_some_and(|b| abs(b - inradius) <= 1e-12 * b.max(1.0));
    Ok(AnnexReport {
        r0_star,
        slice_diameter,
        diameter_criterion: slice_diameter >= core::f64::consts::PI * r0_star,
        area_criterion: slice.area >= powf(r0_star, k) * sphere,
        li_bound,
        inradius,
        li_equality,
        sharp_constant: avr * sphere,
        weaker_constant: avr * sphere_low / k,
    })
}
