//! Curvature bounds λ₁, λ₂, their monotone envelope and the structural
//! conditions on the warp.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::WarpedProduct;
use crate::comparison::{AssociatedFunction, Provenance, TailDescriptor};
use crate::math::{ceil, ln, log10, powf};
use crate::{Error, Result};

/// Radial probe configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSettings {
    /// Probe horizon, in units of the manifold scale `max(1, h(0))`.
    pub r_probe: f64,
    /// Envelope grid density.
    pub points_per_decade: usize,
    /// Smallest envelope abscissa (after 0), in units of the scale.
    pub r_min: f64,
    /// Number of trailing geometric-grid points used for trend tests.
    pub trend_points: usize,
    /// `h(R_probe) > unbounded_factor · h(0)` counts as unbounded growth.
    pub unbounded_factor: f64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            r_probe: 1e6,
            points_per_decade: 512,
            r_min: 1e-6,
            trend_points: 8,
            unbounded_factor: 10.0,
        }
    }
}

/// `(λ₁, λ₂)` at radius `r`.
pub fn lambda_bounds(w: &WarpedProduct, r: f64) -> (f64, f64) {
    let v = w.eval(r);
    let n = w.n as f64;
    let l1 = v.ddh / v.h;
    let l2 = l1 / (n - 1.0) - (n - 2.0) / (n - 1.0) * (w.fiber.ricci_lower - v.dh * v.dh) / (v.h * v.h);
    (l1, l2)
}

fn g_max(w: &WarpedProduct, r: f64) -> f64 {
    let (a, b) = lambda_bounds(w, r);
    if a.is_nan() || b.is_nan() {
        return f64::NAN;
    }
    a.max(b).max(0.0)
}

/// `Ric(∂r, ∂r) = −(n−1) h″/h`.
pub fn radial_ricci(w: &WarpedProduct, r: f64) -> f64 {
    let v = w.eval(r);
    -(w.n as f64 - 1.0) * v.ddh / v.h
}

/// The same quantity through the Riccati equation of the slice foliation:
/// `Ric(∂r, ∂r) = −(n−1)(u′ + u²)` with `u = h′/h` and `u′` from centered
/// differences.
pub fn radial_ricci_from_riccati(w: &WarpedProduct, r: f64) -> f64 {
    let u = |t: f64| {
        let v = w.eval(t);
        v.dh / v.h
    };
    let eps = 1e-4 * r.max(1.0);
    let du = if r >= eps {
        (u(r + eps) - u(r - eps)) / (2.0 * eps)
    } else {
        (-3.0 * u(r) + 4.0 * u(r + eps) - u(r + 2.0 * eps)) / (2.0 * eps)
    };
    let ur = u(r);
    -(w.n as f64 - 1.0) * (du + ur * ur)
}

/// Tabulated monotone envelope of `max(λ₁, λ₂, 0)`.
///
/// `suffix[k] = max_{j ≥ k} g(grid[j])`; between grid points the envelope is
/// `max(g(r), suffix[k+1])`, which agrees with `g` wherever `g` is already
/// nonincreasing and otherwise majorizes it while staying continuous.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub grid: Vec<f64>,
    pub suffix: Vec<f64>,
    pub tail: TailDescriptor,
}

impl Envelope {
    fn value(&self, g: impl Fn(f64) -> f64, r: f64) -> f64 {
        let n = self.grid.len();
        if r <= 0.0 {
            return self.suffix[0];
        }
        if r >= self.grid[n - 1] {
            return match self.tail {
                TailDescriptor::CompactSupport { .. } => 0.0,
                _ => g(r).max(0.0).min(self.suffix[n - 1]),
            };
        }
        let k = match self.grid.binary_search_by(|v| v.total_cmp(&r)) {
            Ok(i) => return self.suffix[i],
            Err(i) => i - 1,
        };
        g(r).max(self.suffix[k + 1])
    }
}

/// Builds the envelope table on `{0} ∪` a log grid from `r_min` to `r_probe`.
pub fn envelope_table(w: &WarpedProduct, probe: &ProbeSettings) -> Result<Envelope> {
    let scale = w.scale();
    let lo = probe.r_min * scale;
    let hi = probe.r_probe * scale;
    let decades = log10(hi / lo);
    let count = ceil(decades * probe.points_per_decade as f64) as usize;
    let mut grid = Vec::with_capacity(count + 2);
    grid.push(0.0);
    for i in 0..=count {
        grid.push(lo * powf(hi / lo, i as f64 / count as f64));
    }
    let g: Vec<f64> = grid.iter().map(|&r| g_max(w, r)).collect();
    if let Some(i) = g.iter().position(|v| !v.is_finite()) {
        // The warp overflowed: the bound could not even be evaluated there.
        let r = grid[i];
        let j = grid.partition_point(|&t| t <= r / 10.0).min(i.saturating_sub(1));
        let exponent = if i >= 2 && g[j] > 0.0 && g[i - 1] > 0.0 {
            ln(g[j] / g[i - 1]) / ln(grid[i - 1] / grid[j])
        } else {
            0.0
        };
        return Err(Error::EnvelopeNotIntegrable { radius: r, exponent });
    }
    let mut suffix = g.clone();
    for k in (0..suffix.len() - 1).rev() {
        suffix[k] = suffix[k].max(suffix[k + 1]);
    }

    let g_hi = g_max(w, hi);
    let g_mid = g_max(w, hi / 10.0);
    let tail = if g_hi <= 0.0 {
        let first_zero = suffix.iter().position(|&v| v <= 0.0).unwrap_or(grid.len() - 1);
        TailDescriptor::CompactSupport {
            radius: grid[first_zero],
        }
    } else {
        let exponent = if g_mid > 0.0 {
            ln(g_mid / g_hi) / core::f64::consts::LN_10
        } else {
            0.0
        };
        if !(exponent > 2.05) || g_mid <= g_hi {
            return Err(Error::EnvelopeNotIntegrable {
                radius: hi,
                exponent,
            });
        }
        TailDescriptor::PowerLaw { exponent }
    };
    Ok(Envelope { grid, suffix, tail })
}

/// `λ̂(r) = sup_{t ≥ r} max(λ₁(t), λ₂(t), 0)` as an associated function.
pub fn envelope_lambda(w: &WarpedProduct, probe: &ProbeSettings) -> Result<AssociatedFunction> {
    let env = envelope_table(w, probe)?;
    if env.suffix[0] == 0.0 {
        return Ok(AssociatedFunction::zero());
    }
    let tail = env.tail;
    let env = Arc::new(env);
    let wc = w.clone();
    Ok(AssociatedFunction::from_fn(
        move |r| env.value(|t| g_max(&wc, t), r),
        tail,
        Provenance::Envelope,
        w.scale(),
    ))
}

/// Outcome of the structural probes, with the samples that back each flag.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionFlags {
    pub lambda1_positive_somewhere: bool,
    pub envelope_admissible: bool,
    pub h_over_r_eventually_nonincreasing: bool,
    pub h_eventually_nondecreasing_and_unbounded: bool,
    /// Start of the range where `h′ ≥ 0` on the probe grid.
    pub tau0: Option<f64>,
    /// First probe radius with `max(λ₁, λ₂) > 0`, and that value.
    pub lambda_positive_witness: Option<(f64, f64)>,
    pub envelope_tail: Option<TailDescriptor>,
    /// Trailing `(r, h(r)/r)` samples.
    pub h_over_r_samples: Vec<(f64, f64)>,
    /// Trailing `(r, h(r))` samples.
    pub h_samples: Vec<(f64, f64)>,
    pub diagnostics: Vec<String>,
}

impl ConditionFlags {
    /// The mandatory condition for the inequality pipeline.
    pub fn admissible(&self) -> bool {
        self.envelope_admissible
    }
}

fn nonincreasing(values: &[(f64, f64)]) -> Option<(f64, f64)> {
    values.windows(2).find_map(|p| {
        let excess = p[1].1 - p[0].1;
        (excess > 1e-12 * p[0].1.abs().max(1.0)).then_some((p[1].0, excess))
    })
}

/// Probes (Λ1)–(Λ4).
pub fn check_conditions(w: &WarpedProduct, probe: &ProbeSettings) -> ConditionFlags {
    let mut diagnostics = Vec::new();
    let scale = w.scale();

    // (Λ1) on the dense envelope grid, which also covers r < 1.
    let mut lambda_positive_witness = None;
    let env = envelope_table(w, probe);
    let dense_grid: Vec<f64> = match &env {
        Ok(e) => e.grid.clone(),
        Err(_) => (0..=60).map(|i| powf(2.0, i as f64 * 0.5) - 1.0).collect(),
    };
    for &r in &dense_grid {
        let (a, b) = lambda_bounds(w, r);
        if a > 0.0 || b > 0.0 {
            lambda_positive_witness = Some((r, a.max(b)));
            break;
        }
    }
    let (envelope_admissible, envelope_tail) = match &env {
        Ok(e) => (true, Some(e.tail)),
        Err(e) => {
            diagnostics.push(alloc::format!("{e}"));
            (false, None)
        }
    };

    // Geometric grid {0, 1, 2, 4, …, ≥ R_probe}.
    let r_end = probe.r_probe * scale;
    let mut radii = alloc::vec![0.0];
    let mut r = 1.0;
    while r < r_end {
        radii.push(r);
        r *= 2.0;
    }
    radii.push(r);
    let values: Vec<_> = radii.iter().map(|&r| (r, w.eval(r))).collect();
    let k = probe.trend_points.min(values.len() - 1).max(2);
    let tail = &values[values.len() - k..];

    let h_over_r_samples: Vec<(f64, f64)> = tail.iter().map(|(r, v)| (*r, v.h / r)).collect();
    let h_over_r = match nonincreasing(&h_over_r_samples) {
        None => true,
        Some((r, excess)) => {
            diagnostics.push(alloc::format!(
                "h(r)/r increases near r = {r:e} (by {excess:e}) over the last {k} probe points"
            ));
            false
        }
    };

    let tau0 = match values.iter().rposition(|(_, v)| v.dh < 0.0) {
        None => Some(0.0),
        Some(i) if i + 1 < values.len() - k => Some(values[i + 1].0),
        Some(_) => None,
    };
    let h_samples: Vec<(f64, f64)> = tail.iter().map(|(r, v)| (*r, v.h)).collect();
    let increasing = h_samples.windows(2).all(|p| p[1].1 >= p[0].1);
    let h0 = values[0].1.h;
    let unbounded = values.last().is_some_and(|(_, v)| v.h > probe.unbounded_factor * h0);
    if tau0.is_none() {
        diagnostics.push("h′ is negative among the trailing probe points".into());
    }
    if !(increasing && unbounded) {
        diagnostics.push(alloc::format!(
            "h does not grow beyond {}·h(0) with increasing trend",
            probe.unbounded_factor
        ));
    }

    ConditionFlags {
        lambda1_positive_somewhere: lambda_positive_witness.is_some(),
        envelope_admissible,
        h_over_r_eventually_nonincreasing: h_over_r,
        h_eventually_nondecreasing_and_unbounded: tau0.is_some() && increasing && unbounded,
        tau0,
        lambda_positive_witness,
        envelope_tail,
        h_over_r_samples,
        h_samples,
        diagnostics,
    }
}
