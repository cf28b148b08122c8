//! Manifold configuration files and run settings.
//!
//! A configuration file is TOML with three tables:
//!
//! ```toml
//! [fiber]              # optional; defaults to the unit round S²
//! dim = 2              # fiber dimension (ambient dimension is dim + 1)
//! area = 12.566370614359172
//! ricci_lower = 1.0    # ρ in Ric_N ≥ (dim − 1) ρ g_N
//! diameter = 3.141592653589793   # optional, used by the rigidity checks
//!
//! [warp]
//! family = "cone"      # see `WarpSpec` for the families and their keys
//! slope = 1.0
//! offset = 1.0
//!
//! [probe]              # optional overrides of the radial probe
//! r_probe = 1e6
//! ```
//!
//! Leaving out both `area` and `ricci_lower` selects the round sphere of
//! dimension `dim`. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use willmore_core::manifold::{self, FiberManifold, Profile, ProbeSettings, WarpFunction, WarpedProduct};
use willmore_core::numerics::CubicSpline;
use willmore_core::willmore::VerifySettings;

use crate::CliError;

/// Environment variable overriding the default soundness tolerance.
pub const TOLERANCE_ENV: &str = "WILLMORE_TOLERANCE";

/// Sanctioned range for every tolerance override.
pub const TOLERANCE_RANGE: (f64, f64) = (1e-14, 1e-4);

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    #[serde(default)]
    pub fiber: Option<FiberSpec>,
    pub warp: WarpSpec,
    #[serde(default)]
    pub probe: ProbeSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSpec {
    pub dim: usize,
    pub area: Option<f64>,
    pub ricci_lower: Option<f64>,
    pub diameter: Option<f64>,
}

/// The warping function `h`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WarpSpec {
    /// Schwarzschild exterior of mass `mass` in ambient dimension `dim`,
    /// starting at the horizon. The fiber is the round sphere.
    Schwarzschild {
        mass: f64,
        #[serde(default = "default_dim")]
        dim: usize,
    },
    /// Reissner–Nordström exterior (`mass > 2·charge > 0`).
    ReissnerNordstrom {
        mass: f64,
        charge: f64,
        #[serde(default = "default_dim")]
        dim: usize,
    },
    /// Three-dimensional Schwarzschild normalised to `h(0) = 1`, with mass
    /// `(2/(3κ)) e^{b0}`.
    ModifiedSchwarzschild { kappa: f64 },
    /// `h(r) = slope·r + offset`.
    Cone { slope: f64, offset: f64 },
    /// `h(r) = amplitude·e^(rate·r)`.
    Exponential { rate: f64, amplitude: f64 },
    /// Warp derived from profile samples `ω(s)` (`h′ = √ω(h)`), starting at
    /// `s_min` (default: the first sample).
    Profile {
        s: Vec<f64>,
        omega: Vec<f64>,
        #[serde(default)]
        s_min: Option<f64>,
    },
    /// Warp samples `h(r)`, interpolated by a cubic spline.
    Tabulated { r: Vec<f64>, h: Vec<f64> },
}

fn default_dim() -> usize {
    3
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub r_probe: Option<f64>,
    pub points_per_decade: Option<usize>,
    pub r_min: Option<f64>,
    pub trend_points: Option<usize>,
    pub unbounded_factor: Option<f64>,
}

impl ProbeSpec {
    pub fn apply(&self, mut p: ProbeSettings) -> ProbeSettings {
        if let Some(v) = self.r_probe {
            p.r_probe = v;
        }
        if let Some(v) = self.points_per_decade {
            p.points_per_decade = v;
        }
        if let Some(v) = self.r_min {
            p.r_min = v;
        }
        if let Some(v) = self.trend_points {
            p.trend_points = v;
        }
        if let Some(v) = self.unbounded_factor {
            p.unbounded_factor = v;
        }
        p
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => {
                Err(CliError::Config(format!("probe.{name} must be positive and finite, got {x}")))
            }
            _ => Ok(()),
        };
        positive("r_probe", self.r_probe)?;
        positive("r_min", self.r_min)?;
        if matches!(self.unbounded_factor, Some(x) if !(x > 1.0 && x.is_finite())) {
            return Err(CliError::Config("probe.unbounded_factor must exceed 1".into()));
        }
        if matches!(self.points_per_decade, Some(0)) {
            return Err(CliError::Config("probe.points_per_decade must be positive".into()));
        }
        if matches!(self.trend_points, Some(n) if n < 3) {
            return Err(CliError::Config("probe.trend_points must be at least 3".into()));
        }
        if let (Some(lo), Some(hi)) = (self.r_min, self.r_probe) {
            if lo >= hi {
                return Err(CliError::Config("probe.r_min must be below probe.r_probe".into()));
            }
        }
        Ok(())
    }
}

impl ManifoldSpec {
    pub fn builtin(warp: WarpSpec) -> Self {
        ManifoldSpec {
            fiber: None,
            warp,
            probe: ProbeSpec::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let spec: ManifoldSpec = toml::from_str(text)?;
        spec.probe.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Builds the warped product; parameter errors map to invalid input.
    pub fn build(&self) -> Result<WarpedProduct, CliError> {
        let implied_fiber = matches!(
            self.warp,
            WarpSpec::Schwarzschild { .. } | WarpSpec::ReissnerNordstrom { .. } | WarpSpec::ModifiedSchwarzschild { .. }
        );
        if implied_fiber && self.fiber.is_some() {
            return Err(CliError::Config(
                "this warp family fixes its fiber (the round sphere); remove the [fiber] table".into(),
            ));
        }
        let w = match &self.warp {
            WarpSpec::Schwarzschild { mass, dim } => manifold::schwarzschild(*mass, *dim)?,
            WarpSpec::ReissnerNordstrom { mass, charge, dim } => manifold::reissner_nordstrom(*mass, *charge, *dim)?,
            WarpSpec::ModifiedSchwarzschild { kappa } => manifold::modified_schwarzschild(*kappa)?,
            WarpSpec::Cone { slope, offset } => manifold::cone(*slope, *offset, self.fiber()?)?,
            WarpSpec::Exponential { rate, amplitude } => manifold::exponential(*rate, *amplitude, self.fiber()?)?,
            WarpSpec::Profile { s, omega, s_min } => {
                let spline = CubicSpline::new(s.clone(), omega.clone())?;
                let start = s_min.unwrap_or(s[0]);
                manifold::from_profile(Profile::Tabulated(Arc::new(spline)), start, self.fiber()?)?
            }
            WarpSpec::Tabulated { r, h } => WarpedProduct::new(self.fiber()?, WarpFunction::tabulated(r.clone(), h.clone())?)?,
        };
        Ok(w)
    }

    fn fiber(&self) -> Result<FiberManifold, CliError> {
        let Some(f) = &self.fiber else {
            return Ok(FiberManifold::round_sphere(2)?);
        };
        let mut fiber = match (f.area, f.ricci_lower) {
            (None, None) => FiberManifold::round_sphere(f.dim)?,
            (Some(area), Some(rho)) => FiberManifold::new(f.dim, area, rho, None)?,
            _ => {
                return Err(CliError::Config(
                    "fiber: give both area and ricci_lower, or neither for the round sphere".into(),
                ))
            }
        };
        if let Some(d) = f.diameter {
            if !(d > 0.0 && d.is_finite()) {
                return Err(CliError::Config(format!("fiber.diameter must be positive, got {d}")));
            }
            fiber.diameter = Some(d);
        }
        Ok(fiber)
    }
}

/// Tolerance and horizon overrides; `None` keeps the kernel default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub equality_threshold: Option<f64>,
    pub shape_tolerance: Option<f64>,
    pub quadrature_tolerance: Option<f64>,
    pub limit_horizon: Option<f64>,
    pub probe_horizon: Option<f64>,
}

impl Overrides {
    /// Applies the overrides on top of the defaults and the probe table of
    /// the manifold source.
    pub fn settings(&self, probe: &ProbeSpec) -> Result<VerifySettings, CliError> {
        let mut s = VerifySettings::default();
        s.probe = probe.apply(s.probe);
        let ranged = [
            ("tolerance", self.tolerance, &mut s.soundness_tol),
            ("equality threshold", self.equality_threshold, &mut s.equality_threshold),
            ("shape tolerance", self.shape_tolerance, &mut s.shape_tol),
            ("quadrature tolerance", self.quadrature_tolerance, &mut s.quad_abs_tol),
        ];
        for (name, value, slot) in ranged {
            if let Some(v) = value {
                check_tolerance(name, v)?;
                *slot = v;
            }
        }
        for (name, value, slot) in [
            ("limit horizon", self.limit_horizon, &mut s.limit_horizon),
            ("probe horizon", self.probe_horizon, &mut s.probe.r_probe),
        ] {
            if let Some(v) = value {
                if !(v >= 10.0 && v.is_finite()) {
                    return Err(CliError::Config(format!("{name} must be at least 10, got {v}")));
                }
                *slot = v;
            }
        }
        Ok(s)
    }
}

pub fn check_tolerance(name: &str, v: f64) -> Result<(), CliError> {
    let (lo, hi) = TOLERANCE_RANGE;
    if (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} {v:e} is outside the sanctioned range [{lo:e}, {hi:e}]")))
    }
}

/// Report format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Human,
}

/// Where the report goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputTarget {
    Stdout,
    File(PathBuf),
}

/// Everything one invocation needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub manifold: ManifoldSpec,
    pub settings: VerifySettings,
    pub format: Option<Format>,
    pub output: OutputTarget,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cone_with_round_fiber() {
        let spec = ManifoldSpec::from_toml(
            r#"
            [fiber]
            dim = 2
            [warp]
            family = "cone"
            slope = 0.5
            offset = 1.0
            "#,
        )
        .unwrap();
        let w = spec.build().unwrap();
        assert_eq!(w.n, 3);
        assert!(w.fiber.is_round_sphere);
        assert_eq!(w.eval(2.0).h, 2.0);
    }

    #[test]
    fn rejects_unknown_keys() {
        for text in [
            "[warp]\nfamily = \"cone\"\nslope = 1.0\noffset = 1.0\ncolour = 3\n",
            "[warp]\nfamily = \"cone\"\nslope = 1.0\noffset = 1.0\n[fiber]\ndim = 2\nvolume = 3.0\n",
            "[warp]\nfamily = \"cone\"\nslope = 1.0\noffset = 1.0\n[probe]\nradius = 3.0\n",
            "[warp]\nfamily = \"cone\"\nslope = 1.0\noffset = 1.0\n[extra]\n",
            "[warp]\nfamily = \"torus\"\n",
        ] {
            let err = ManifoldSpec::from_toml(text).unwrap_err();
            assert!(matches!(err, CliError::Config(_)), "{text}: {err}");
        }
    }

    #[test]
    fn negative_fiber_area_is_invalid_input() {
        let spec = ManifoldSpec::from_toml(
            "[fiber]\ndim = 2\narea = -1.0\nricci_lower = 1.0\n[warp]\nfamily = \"cone\"\nslope = 1.0\noffset = 1.0\n",
        )
        .unwrap();
        let err = spec.build().unwrap_err();
        assert_eq!(err.exit_status(), crate::ExitStatus::InvalidInput);
    }

    #[test]
    fn implied_fiber_conflict() {
        let spec = ManifoldSpec::from_toml("[fiber]\ndim = 2\n[warp]\nfamily = \"schwarzschild\"\nmass = 2.0\n").unwrap();
        assert!(matches!(spec.build(), Err(CliError::Config(_))));
    }

    #[test]
    fn half_specified_fiber() {
        let spec =
            ManifoldSpec::from_toml("[fiber]\ndim = 2\narea = 3.0\n[warp]\nfamily = \"cone\"\nslope = 1.0\noffset = 1.0\n")
                .unwrap();
        assert!(matches!(spec.build(), Err(CliError::Config(_))));
    }

    #[test]
    fn profile_samples_build_a_flat_warp() {
        // ω ≡ 1 gives h(r) = s_min + r.
        let s: Vec<f64> = (0..20).map(|i| 1.0 + i as f64).collect();
        let omega = vec![1.0; s.len()];
        let spec = ManifoldSpec {
            fiber: None,
            warp: WarpSpec::Profile { s, omega, s_min: None },
            probe: ProbeSpec::default(),
        };
        let w = spec.build().unwrap();
        assert!((w.eval(3.0).h - 4.0).abs() < 1e-9);
    }

    #[test]
    fn tolerance_range_is_enforced() {
        let ok = Overrides {
            tolerance: Some(1e-8),
            ..Overrides::default()
        };
        assert_eq!(ok.settings(&ProbeSpec::default()).unwrap().soundness_tol, 1e-8);
        for bad in [1e-15, 1e-3, f64::NAN] {
            let o = Overrides {
                tolerance: Some(bad),
                ..Overrides::default()
            };
            assert!(o.settings(&ProbeSpec::default()).is_err(), "{bad}");
        }
    }

    #[test]
    fn probe_table_overrides_defaults() {
        let spec = ManifoldSpec::from_toml(
            "[warp]\nfamily = \"cone\"\nslope = 1.0\noffset = 1.0\n[probe]\nr_probe = 1e4\npoints_per_decade = 64\n",
        )
        .unwrap();
        let s = Overrides::default().settings(&spec.probe).unwrap();
        assert_eq!(s.probe.r_probe, 1e4);
        assert_eq!(s.probe.points_per_decade, 64);
    }
}
