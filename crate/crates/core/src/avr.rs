//! Geodesic-tube volumes around the core `Γ₀ = {0} × N`, the volume ratio
//! `Θ✠(R) = vol(T(R)) / (ω_n Rⁿ)` and its limit, the asymptotic volume ratio.

use alloc::vec::Vec;

use crate::manifold::WarpedProduct;
use crate::math::{abs, exp, lgamma, ln, powi};
use crate::numerics::{extrapolate_limit, quadrature::integrate_finite};
use crate::{Error, Result};

/// `(|S^{n−1}|, ω_n)`: unit-sphere area and unit-ball volume in `ℝⁿ`,
/// evaluated through `ln Γ` so large `n` cannot overflow.
pub fn sphere_ball_constants(n: usize) -> (f64, f64) {
    let half = n as f64 / 2.0;
    let area = 2.0 * exp(half * ln(core::f64::consts::PI) - lgamma(half));
    (area, area / n as f64)
}

const VOLUME_REL_TOL: f64 = 1e-13;

/// `∫_a^b h^{n−1}` on a geometric partition with relative accuracy.
fn warp_moment(w: &WarpedProduct, a: f64, b: f64) -> Result<(f64, f64)> {
    if b <= a {
        return Ok((0.0, 0.0));
    }
    let k = w.n as i32 - 1;
    let f = |t: f64| powi(w.warp.h(t), k);
    let mut cuts = alloc::vec![a];
    let mut x = a.max(0.0) + w.scale();
    while x < b {
        cuts.push(x);
        x *= 2.0;
    }
    cuts.push(b);
    let (mut sum, mut err) = (0.0, 0.0);
    for p in cuts.windows(2) {
        let size = (f(p[0]).max(f(p[1]))) * (p[1] - p[0]);
        let r = integrate_finite(&f, p[0], p[1], VOLUME_REL_TOL * size, 4000)?;
        sum += r.value;
        err += r.abs_error_estimate;
    }
    Ok((sum, err))
}

/// `vol(T(R)) = |N| ∫₀^R h^{n−1}`.
pub fn tube_volume(w: &WarpedProduct, radius: f64) -> Result<f64> {
    check_radius(radius)?;
    Ok(w.fiber.area * warp_moment(w, 0.0, radius)?.0)
}

/// Volume `|N| ∫_{r0}^{r0+R} h^{n−1}` of the outward tube of radius `R`
/// around the slice `{r0} × N`.
pub fn outward_tube_volume(w: &WarpedProduct, r0: f64, radius: f64) -> Result<f64> {
    check_radius(radius)?;
    Ok(w.fiber.area * warp_moment(w, r0, r0 + radius)?.0)
}

/// `|Ω_{r0}| = |N| ∫₀^{r0} h^{n−1}`, the region enclosed between `Γ₀` and a slice.
pub fn enclosed_volume(w: &WarpedProduct, r0: f64) -> Result<f64> {
    Ok(w.fiber.area * warp_moment(w, 0.0, r0)?.0)
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "radius must be positive and finite, got {radius}"
        )));
    }
    Ok(())
}

/// `Θ✠(R) = vol(T(R)) / (ω_n Rⁿ)`.
pub fn theta_star(w: &WarpedProduct, radius: f64) -> Result<f64> {
    let (_, omega_n) = sphere_ball_constants(w.n);
    Ok(tube_volume(w, radius)? / (omega_n * powi(radius, w.n as i32)))
}

/// `Θ✠(R)` through the ratio form `(|N|/|S^{n−1}|) ∫₀^R h^{n−1} / ∫₀^R t^{n−1}`.
pub fn theta_star_ratio_form(w: &WarpedProduct, radius: f64) -> Result<f64> {
    check_radius(radius)?;
    let (sphere, _) = sphere_ball_constants(w.n);
    let num = warp_moment(w, 0.0, radius)?.0;
    let den = powi(radius, w.n as i32) / w.n as f64;
    Ok(w.fiber.area / sphere * num / den)
}

/// First sampled radius where `Θ✠` increases, with the increase.
pub fn theta_star_increase(w: &WarpedProduct, radii: &[f64]) -> Result<Option<(f64, f64)>> {
    let mut prev: Option<f64> = None;
    for &r in radii {
        let v = theta_star(w, r)?;
        if let Some(p) = prev {
            if v > p * (1.0 + 1e-12) {
                return Ok(Some((r, v - p)));
            }
        }
        prev = Some(v);
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvrMethod {
    TubeExtrapolation,
    WarpSlopeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvrEstimate {
    /// The estimate with the smaller error bar.
    pub value: f64,
    pub method: AvrMethod,
    pub error_estimate: f64,
    /// `(R, Θ✠(R))` used by the tube method.
    pub samples: Vec<(f64, f64)>,
    pub tube: (f64, f64),
    pub slope: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvrSettings {
    /// Sampling radii in units of `max(1, h(0))`; must be geometric.
    pub radii: Vec<f64>,
}

impl Default for AvrSettings {
    fn default() -> Self {
        AvrSettings {
            radii: alloc::vec![1e3, 1e4, 1e5, 1e6],
        }
    }
}

/// `(value, error estimate, (R, Θ✠(R)) samples)` of the tube method.
pub type TubeEstimate = (f64, f64, Vec<(f64, f64)>);

/// Tube-extrapolation estimate `lim Θ✠(R)`.
pub fn avr_tube(w: &WarpedProduct, settings: &AvrSettings) -> Result<TubeEstimate> {
    let scale = w.scale();
    let samples = settings
        .radii
        .iter()
        .map(|&r| Ok((r * scale, theta_star(w, r * scale)?)))
        .collect::<Result<Vec<_>>>()?;
    let (v, e) = extrapolate_limit(&samples)?;
    Ok((v, e, samples))
}

/// Slope estimate `(|N|/|S^{n−1}|)(lim h(R)/R)^{n−1}`, with the limit taken
/// as `lim h′(R)` (equal by l'Hôpital, and free of the logarithmic
/// corrections that `h(R)/R` carries).
pub fn avr_slope(w: &WarpedProduct, settings: &AvrSettings) -> Result<(f64, f64)> {
    let scale = w.scale();
    let samples: Vec<(f64, f64)> = settings
        .radii
        .iter()
        .map(|&r| (r * scale, w.eval(r * scale).dh))
        .collect();
    let (a, ea) = extrapolate_limit(&samples)?;
    let (sphere, _) = sphere_ball_constants(w.n);
    let k = w.n as i32 - 1;
    let ratio = w.fiber.area / sphere;
    let value = ratio * powi(a.max(0.0), k);
    let err = ratio * k as f64 * powi(a.abs() + ea, k - 1) * ea;
    Ok((value, err))
}

/// Asymptotic volume ratio from both estimators, cross-checked.
pub fn estimate_avr(w: &WarpedProduct, settings: &AvrSettings) -> Result<AvrEstimate> {
    let (tv, te, samples) = avr_tube(w, settings)?;
    let (sv, se) = avr_slope(w, settings)?;
    // Both carry quadrature / rounding noise well below this floor.
    let floor = 1e-12 * tv.abs().max(sv.abs()).max(1.0);
    let tolerance = te + se + floor;
    if abs(tv - sv) > tolerance {
        return Err(Error::MethodDisagreement {
            tube: tv,
            slope: sv,
            tolerance,
        });
    }
    let (value, method, error_estimate) = if se <= te {
        (sv, AvrMethod::WarpSlopeLimit, se)
    } else {
        (tv, AvrMethod::TubeExtrapolation, te)
    };
    Ok(AvrEstimate {
        value: value.max(0.0),
        method,
        error_estimate,
        samples,
        tube: (tv, te),
        slope: (sv, se),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{cone, schwarzschild, FiberManifold};
    use core::f64::consts::PI;

    #[test]
    fn sphere_constants() {
        let (a, b) = sphere_ball_constants(3);
        assert!((a - 4.0 * PI).abs() < 1e-13 && (b - 4.0 * PI / 3.0).abs() < 1e-13);
        let (a, b) = sphere_ball_constants(2);
        assert!((a - 2.0 * PI).abs() < 1e-13 && (b - PI).abs() < 1e-13);
        for n in 1..40 {
            let (a, b) = sphere_ball_constants(n);
            assert!((a - n as f64 * b).abs() <= 1e-14 * a);
        }
        assert!(sphere_ball_constants(400).0.is_finite());
    }

    #[test]
    fn cone_volumes() {
        let c = cone(1.0, 1.0, FiberManifold::round_sphere(2).unwrap()).unwrap();
        assert!((tube_volume(&c, 1.0).unwrap() - 4.0 * PI * 7.0 / 3.0).abs() < 1e-12);
        assert!((theta_star(&c, 3.0).unwrap() - 7.0 / 3.0).abs() < 1e-13);
        let est = estimate_avr(&c, &AvrSettings::default()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn half_slope_cone() {
        let c = cone(0.5, 1.0, FiberManifold::round_sphere(2).unwrap()).unwrap();
        let est = estimate_avr(&c, &AvrSettings::default()).unwrap();
        assert!((est.value - 0.25).abs() < 1e-6, "{est:?}");
    }

    #[test]
    fn schwarzschild_avr() {
        let s = schwarzschild(2.0, 3).unwrap();
        let est = estimate_avr(&s, &AvrSettings::default()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-4, "{est:?}");
        assert!((est.tube.0 - 1.0).abs() <= est.tube.1, "{est:?}");
    }

    #[test]
    fn two_theta_paths_agree() {
        let s = schwarzschild(2.0, 3).unwrap();
        for &r in &[0.5, 3.0, 70.0] {
            let a = theta_star(&s, r).unwrap();
            let b = theta_star_ratio_form(&s, r).unwrap();
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}
