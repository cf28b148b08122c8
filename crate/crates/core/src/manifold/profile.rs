//! Warps defined through a profile `ω(s)`: `h′ = √ω(h)`, `h(0) = s̲`.
//!
//! Instead of the first-order equation, which is degenerate wherever
//! `ω(s̲) = 0`, the warp is obtained from its second-order consequence
//! `h″ = ω′(h)/2` with `h(0) = s̲`, `h′(0) = √ω(s̲)`. That system is regular at
//! a horizon, and its first integral `h′² − ω(h)` (constant zero) serves as an
//! accuracy diagnostic.

use alloc::sync::Arc;
use core::fmt;

use super::warp::WarpValue;
use crate::math::{powf, powi, sqrt};
use crate::numerics::{ode, CubicSpline, DenseOutput, OdeOptions};
use crate::{Error, Result};

type CustomProfile = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// A profile function `ω(s)` with its derivative.
#[derive(Clone)]
pub enum Profile {
    /// `1 − m s^(2−n)`.
    Schwarzschild { m: f64, n: usize },
    /// `1 − m s^(2−n) + q² s^(4−2n)`.
    ReissnerNordstrom { m: f64, q: f64, n: usize },
    /// `ω ≡ 1`.
    Flat,
    /// Spline through samples; held constant beyond the last knot.
    Tabulated(Arc<CubicSpline>),
    Custom(CustomProfile),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Schwarzschild { m, n } => write!(f, "Schwarzschild(m = {m}, n = {n})"),
            Profile::ReissnerNordstrom { m, q, n } => {
                write!(f, "ReissnerNordstrom(m = {m}, q = {q}, n = {n})")
            }
            Profile::Flat => write!(f, "Flat"),
            Profile::Tabulated(s) => write!(f, "Tabulated({} knots)", s.knots().len()),
            Profile::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Profile {
    /// `(ω(s), ω′(s))`.
    pub fn omega(&self, s: f64) -> (f64, f64) {
        match self {
            Profile::Schwarzschild { m, n } => {
                let k = *n as i32 - 2;
                let p = m * powi(s, -k);
                (1.0 - p, k as f64 * p / s)
            }
            Profile::ReissnerNordstrom { m, q, n } => {
                let k = *n as i32 - 2;
                let a = m * powi(s, -k);
                let b = q * q * powi(s, -2 * k);
                (1.0 - a + b, (k as f64 * a - 2.0 * k as f64 * b) / s)
            }
            Profile::Flat => (1.0, 0.0),
            Profile::Tabulated(sp) => {
                let last = *sp.knots().last().expect("knots");
                if s >= last {
                    (*sp.values().last().expect("values"), 0.0)
                } else {
                    let (v, d, _) = sp.eval(s);
                    (v, d)
                }
            }
            Profile::Custom(f) => f(s),
        }
    }

    /// The largest root of `ω` for the built-in families.
    pub fn root(&self) -> Option<f64> {
        match self {
            Profile::Schwarzschild { m, n } => Some(powf(*m, 1.0 / (*n as f64 - 2.0))),
            Profile::ReissnerNordstrom { m, q, n } => {
                let x = 0.5 * (m + sqrt(m * m - 4.0 * q * q));
                Some(powf(x, 1.0 / (*n as f64 - 2.0)))
            }
            _ => None,
        }
    }
}

/// Options for converting a profile into a warp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    pub rel_tol: f64,
    /// The ODE is integrated to `r_max_factor · max(1, s̲)`; beyond that the
    /// warp continues linearly.
    pub r_max_factor: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            rel_tol: 1e-12,
            r_max_factor: 1e9,
        }
    }
}

pub struct ProfileWarp {
    profile: Profile,
    s_min: f64,
    dense: DenseOutput<2>,
    r_max: f64,
    end: [f64; 2],
}

impl ProfileWarp {
    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn s_min(&self) -> f64 {
        self.s_min
    }

    pub fn eval(&self, r: f64) -> WarpValue {
        let [h, dh] = if r <= self.r_max {
            self.dense.evaluate(r.max(0.0)).unwrap_or(self.end)
        } else {
            [self.end[0] + self.end[1] * (r - self.r_max), self.end[1]]
        };
        WarpValue {
            h,
            dh,
            ddh: 0.5 * self.profile.omega(h).1,
        }
    }

    /// `max |h′(r)² − ω(h(r))|` over `grid`.
    pub fn first_integral_defect(&self, grid: &[f64]) -> f64 {
        grid.iter()
            .map(|&r| {
                let v = self.eval(r);
                (v.dh * v.dh - self.profile.omega(v.h).0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Probes `ω ≥ 0` on `(s̲, ∞)` over a geometric sample of offsets.
fn probe_profile(profile: &Profile, s_min: f64) -> Result<()> {
    let (w0, d0) = profile.omega(s_min);
    if !(w0.is_finite() && d0.is_finite()) {
        return Err(Error::InvalidParameters(alloc::format!(
            "profile is not finite at s = {s_min}"
        )));
    }
    if w0 < -1e-12 {
        return Err(Error::ProfileNegative { s: s_min, omega: w0 });
    }
    if w0 <= 1e-12 && d0 <= 0.0 {
        return Err(Error::InvalidParameters(alloc::format!(
            "profile has a degenerate root at s = {s_min} (omega' = {d0})"
        )));
    }
    let base = s_min.abs().max(1.0);
    for k in -8..=9 {
        for j in 1..10 {
            let s = s_min + base * j as f64 * powi(10.0, k);
            let (w, _) = profile.omega(s);
            if !(w >= 0.0) {
                return Err(Error::ProfileNegative { s, omega: w });
            }
        }
    }
    Ok(())
}

pub(crate) fn build_profile_warp(
    profile: Profile,
    s_min: f64,
    opts: &ProfileOptions,
) -> Result<ProfileWarp> {
    if !(s_min > 0.0 && s_min.is_finite()) {
        return Err(Error::InvalidParameters(alloc::format!(
            "profile root must be positive, got {s_min}"
        )));
    }
    probe_profile(&profile, s_min)?;
    let w0 = profile.omega(s_min).0.max(0.0);
    let r_max = opts.r_max_factor * s_min.max(1.0);
    let p = profile.clone();
    let dense = ode::integrate(
        move |_, y: &[f64; 2]| [y[1], 0.5 * p.omega(y[0]).1],
        0.0,
        [s_min, sqrt(w0)],
        r_max,
        &OdeOptions::with_rel_tol(opts.rel_tol),
    )?;
    let end = *dense.states().last().expect("non-empty trajectory");
    Ok(ProfileWarp {
        profile,
        s_min,
        dense,
        r_max,
        end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::warp::{schwarzschild3, schwarzschild3_radius};

    #[test]
    fn schwarzschild_profile_matches_closed_form() {
        let w = build_profile_warp(
            Profile::Schwarzschild { m: 2.0, n: 3 },
            2.0,
            &ProfileOptions::default(),
        )
        .unwrap();
        for &s in &[2.5, 4.0, 30.0, 1e4] {
            let r = schwarzschild3_radius(2.0, s);
            let v = w.eval(r);
            assert!((v.h - s).abs() < 1e-8 * s.max(1.0), "s={s} h={}", v.h);
            let exact = schwarzschild3(2.0, r);
            assert!((v.dh - exact.dh).abs() < 1e-8);
        }
        let grid: alloc::vec::Vec<f64> = (0..50).map(|i| i as f64 * 0.7).collect();
        assert!(w.first_integral_defect(&grid) < 1e-9);
    }

    #[test]
    fn rn_root() {
        let p = Profile::ReissnerNordstrom { m: 3.0, q: 1.0, n: 3 };
        let s = p.root().unwrap();
        assert!((s - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!(p.omega(s).0.abs() < 1e-14);
    }

    #[test]
    fn negative_profile_rejected() {
        let p = Profile::Custom(Arc::new(|s: f64| (1.0 - 4.0 / s + 1.0 / (s * s), 4.0 / (s * s))));
        assert!(matches!(
            build_profile_warp(p, 1.0, &ProfileOptions::default()),
            Err(Error::ProfileNegative { .. })
        ));
    }
}
