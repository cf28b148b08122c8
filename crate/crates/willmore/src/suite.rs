//! Seeded property suite over the comparison machinery.
//!
//! Random cases draw `λ` from two families whose moments always converge —
//! power laws `c(1+t)^{−p}` with `p ≥ 3` and triangular bumps
//! `c·max(0, 1 − t/a)` — together with a mean-curvature ratio `𝘩`. The
//! builtin manifolds contribute slices on which the full pipeline (envelope,
//! constants, volume ratio, report) is exercised.
//!
//! All cases are drawn up front from a ChaCha stream, evaluated in parallel
//! and folded in order, so a seed fully determines the report.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use willmore_core::comparison::{
    check_elementary_inequalities, decay_constants, log_inequality_margin, monotone_ratio_check,
    numerator_monotonicity, riccati_residual, sample_grid, solve_comparison, theta_initial_slope,
    AssociatedFunction, ComparisonInput, Provenance, TailDescriptor,
};
use willmore_core::manifold::{self, FiberManifold, WarpedProduct};
use willmore_core::willmore::{analyze, verify_slice, SliceData, VerifySettings};
use willmore_core::Error;

use crate::output::{fmt_num, num};
use crate::{CliError, ExitStatus};

/// Horizon and sampling of the random-case comparison solves.
const CASE_HORIZON: f64 = 60.0;
const CASE_SAMPLES: usize = 120;
/// Horizon and sampling of the builtin-slice ratio checks.
const SLICE_HORIZON: f64 = 50.0;
const SLICE_SAMPLES: usize = 100;
const QUAD_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub cases: usize,
    /// Prepend an increasing (inadmissible) `λ` as a negative control.
    pub inject_faulty_lambda: bool,
    pub settings: VerifySettings,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            cases: 200,
            inject_faulty_lambda: false,
            settings: VerifySettings::default(),
        }
    }
}

/// One randomly drawn `(λ, 𝘩)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    PowerLaw { c: f64, p: f64 },
    Triangular { c: f64, a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case {
    pub index: usize,
    pub family: Family,
    pub mean_ratio: f64,
}

impl Case {
    pub fn lambda(&self) -> Result<AssociatedFunction, Error> {
        match self.family {
            Family::PowerLaw { c, p } => AssociatedFunction::power_law(c, p),
            Family::Triangular { c, a } => AssociatedFunction::triangular(c, a),
        }
    }

    fn label(&self, seed: u64) -> String {
        let fam = match self.family {
            Family::PowerLaw { c, p } => format!("power-law c={c:.6} p={p:.6}"),
            Family::Triangular { c, a } => format!("triangular c={c:.6} a={a:.6}"),
        };
        format!("case {} (seed {seed}): {fam}, h={:.6}", self.index, self.mean_ratio)
    }
}

/// Draws the random cases for `seed`.
pub fn draw_cases(seed: u64, count: usize) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|index| {
            let family = if rng.gen_bool(0.5) {
                Family::PowerLaw {
                    c: rng.gen_range(0.01..4.0),
                    p: rng.gen_range(3.0..8.0),
                }
            } else {
                Family::Triangular {
                    c: rng.gen_range(0.01..4.0),
                    a: rng.gen_range(0.1..6.0),
                }
            };
            let mean_ratio = if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(-2.0..2.0) };
            Case {
                index,
                family,
                mean_ratio,
            }
        })
        .collect()
}

/// Where a property is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    RandomCases,
    BuiltinSlices,
}

/// Aggregate of one property. A check passes when `margin ≥ −tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub scope: Scope,
    pub tolerance: f64,
    pub checked: usize,
    /// Checks whose margin fell below `−tolerance`.
    pub failures: usize,
    /// Checks that could not be evaluated (a kernel error).
    pub errors: usize,
    pub worst_margin: f64,
    pub worst_at: Option<String>,
    pub first_failure: Option<String>,
}

impl PropertyResult {
    fn new(name: &'static str, scope: Scope, tolerance: f64) -> Self {
        PropertyResult {
            name,
            scope,
            tolerance,
            checked: 0,
            failures: 0,
            errors: 0,
            worst_margin: f64::INFINITY,
            worst_at: None,
            first_failure: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.errors == 0
    }

    fn record(&mut self, label: &str, outcome: &Result<f64, String>) {
        self.checked += 1;
        match outcome {
            Ok(m) => {
                if *m < self.worst_margin || self.worst_at.is_none() {
                    self.worst_margin = *m;
                    self.worst_at = Some(label.to_owned());
                }
                if !(*m >= -self.tolerance) {
                    self.failures += 1;
                    self.first_failure
                        .get_or_insert_with(|| format!("{label}: margin {}", fmt_num(*m)));
                }
            }
            Err(e) => {
                self.errors += 1;
                self.first_failure.get_or_insert_with(|| format!("{label}: {e}"));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub cases: usize,
    pub slices: usize,
    pub properties: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }

    pub fn exit_status(&self) -> ExitStatus {
        if self.properties.iter().any(|p| p.failures > 0) {
            ExitStatus::Violation
        } else if self.properties.iter().any(|p| p.errors > 0) {
            ExitStatus::NumericalFailure
        } else {
            ExitStatus::Success
        }
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "property suite: seed {}, {} random cases, {} builtin slices",
            self.seed, self.cases, self.slices
        );
        for p in &self.properties {
            let status = if p.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(
                s,
                "{status}  {:<44} checked {:>4}  worst margin {}",
                p.name,
                p.checked,
                fmt_num(p.worst_margin)
            );
            if let Some(f) = &p.first_failure {
                let _ = writeln!(s, "      first failure: {f}");
            }
        }
        let _ = writeln!(s, "{}", if self.passed() { "all properties pass" } else { "some properties FAILED" });
        s
    }

    pub fn json(&self) -> Value {
        let props: Vec<Value> = self
            .properties
            .iter()
            .map(|p| {
                json!({
                    "name": p.name,
                    "scope": match p.scope { Scope::RandomCases => "random", Scope::BuiltinSlices => "builtin" },
                    "passed": p.passed(),
                    "tolerance": num(p.tolerance),
                    "checked": p.checked,
                    "failures": p.failures,
                    "errors": p.errors,
                    "worst_margin": num(p.worst_margin),
                    "worst_at": p.worst_at,
                    "first_failure": p.first_failure,
                })
            })
            .collect();
        json!({
            "seed": self.seed,
            "cases": self.cases,
            "builtin_slices": self.slices,
            "passed": self.passed(),
            "properties": props,
        })
    }
}

// Property names, in report order.
pub const BOUNDS: &str = "comparison bounds j <= y <= X";
pub const SLOPE: &str = "slope bound y' <= e^b0 f";
pub const INITIAL_SLOPE: &str = "theta'(0+) <= 0";
pub const NUMERATOR: &str = "numerator y'X - X'y nondecreasing";
pub const LOG_INEQUALITY: &str = "logarithmic inequality";
pub const DERIVATIVE: &str = "solver derivative vs finite differences";
pub const RATIO: &str = "J/y nonincreasing";
pub const THETA_HAT: &str = "sup theta_hat <= (J/y)^(n-1)";
pub const RICCATI: &str = "Riccati identity";
pub const ENVELOPE: &str = "radial curvature <= envelope";
pub const SOUNDNESS: &str = "Willmore inequality gap >= -tolerance";
pub const AVR_AGREEMENT: &str = "volume-ratio estimators agree";

/// Margins of one random case, keyed by property.
type Margins = Vec<(&'static str, Result<f64, String>)>;

fn case_margins(case: &Case) -> Margins {
    let run = || -> Result<Margins, Error> {
        let lambda = case.lambda()?;
        let c = decay_constants(&lambda, QUAD_TOL)?;
        let input = ComparisonInput::new(lambda, case.mean_ratio, c, 3)?;
        let sol = solve_comparison(&input, CASE_HORIZON)?;
        let grid = sample_grid(CASE_HORIZON, CASE_SAMPLES);
        // The kernel's own threshold is disabled; the suite applies its own.
        let rep = check_elementary_inequalities(&sol, &grid, f64::INFINITY)?;
        let mut m: Margins = vec![
            (BOUNDS, Ok(rep.lower.1.min(rep.upper.1))),
            (SLOPE, Ok(rep.slope.1)),
            (INITIAL_SLOPE, Ok(-theta_initial_slope(&input))),
            (NUMERATOR, Ok(-numerator_monotonicity(&sol, &grid).1)),
        ];
        if case.mean_ratio != 0.0 {
            let margins = log_inequality_margin(&input, &grid, 1e-10)?;
            m.push((LOG_INEQUALITY, Ok(margins.iter().map(|p| p.1).fold(f64::INFINITY, f64::min))));
        }
        let e = 1e-4;
        let fd_err = [1.0, 7.0, 30.0]
            .iter()
            .map(|&t| {
                let fd = (sol.y.y(t + e) - sol.y.y(t - e)) / (2.0 * e);
                (fd - sol.y.dy(t)).abs() / sol.y.dy(t).abs().max(1.0)
            })
            .fold(0.0, f64::max);
        m.push((DERIVATIVE, Ok(-fd_err)));
        Ok(m)
    };
    run().unwrap_or_else(|e| {
        [BOUNDS, SLOPE, INITIAL_SLOPE, NUMERATOR, DERIVATIVE]
            .into_iter()
            .map(|name| (name, Err(e.to_string())))
            .collect()
    })
}

/// The builtin manifolds and their sampled slices.
pub fn builtin_slices() -> Vec<(&'static str, Result<WarpedProduct, Error>, Vec<f64>)> {
    let s2 = || FiberManifold::round_sphere(2);
    vec![
        ("schwarzschild m=2 n=3", manifold::schwarzschild(2.0, 3), vec![0.0, 1.0, 5.0]),
        ("schwarzschild m=1 n=4", manifold::schwarzschild(1.0, 4), vec![0.0, 2.0]),
        ("reissner-nordstrom m=3 q=1", manifold::reissner_nordstrom(3.0, 1.0, 3), vec![0.0, 2.0]),
        ("modified-schwarzschild kappa=1", manifold::modified_schwarzschild(1.0), vec![0.0]),
        ("cone slope=1 offset=1", s2().and_then(|f| manifold::cone(1.0, 1.0, f)), vec![0.0, 3.0]),
        ("cone slope=0.5 offset=1", s2().and_then(|f| manifold::cone(0.5, 1.0, f)), vec![0.0]),
    ]
}

fn builtin_margins(
    name: &str,
    w: &Result<WarpedProduct, Error>,
    radii: &[f64],
    settings: &VerifySettings,
) -> Vec<(String, Margins)> {
    let all = |e: String| -> Margins {
        [RATIO, THETA_HAT, RICCATI, ENVELOPE, SOUNDNESS]
            .into_iter()
            .map(|p| (p, Err(e.clone())))
            .collect()
    };
    let w = match w {
        Ok(w) => w,
        Err(e) => {
            let mut m = all(e.to_string());
            m.push((AVR_AGREEMENT, Err(e.to_string())));
            return vec![(name.to_owned(), m)];
        }
    };
    let a = match analyze(w, settings) {
        Ok(a) => a,
        Err(e) => {
            let mut m = all(e.to_string());
            m.push((AVR_AGREEMENT, Err(e.to_string())));
            return vec![(name.to_owned(), m)];
        }
    };
    let (tv, te) = a.avr.tube;
    let (sv, se) = a.avr.slope;
    let avr_margin = te + se - (tv - sv).abs();
    radii
        .iter()
        .enumerate()
        .map(|(i, &r0)| {
            let label = format!("{name} r0={r0}");
            let run = || -> Result<Margins, Error> {
                let slice = SliceData::new(w, r0)?;
                let shifted = a.lambda.shifted(r0);
                let c = decay_constants(&shifted, QUAD_TOL)?;
                let input = ComparisonInput::new(shifted, slice.mean_ratio, c, w.n)?;
                let sol = solve_comparison(&input, SLICE_HORIZON)?;
                let grid = sample_grid(SLICE_HORIZON, SLICE_SAMPLES);
                let ratio = monotone_ratio_check(w, r0, &sol, &grid, f64::INFINITY)?;
                let ric = riccati_residual(w, r0, &grid, (!a.flat_regime).then_some(&a.lambda));
                let report = verify_slice(&a, r0)?;
                let mut m: Margins = vec![
                    (RATIO, Ok(-ratio.max_increase.1)),
                    (THETA_HAT, Ok(-ratio.theta_hat_excess.1)),
                    (RICCATI, Ok(-ric.identity_residual)),
                ];
                if !a.flat_regime {
                    m.push((ENVELOPE, Ok(-ric.envelope_excess)));
                }
                // Scaled so that the check's tolerance is 1.
                m.push((SOUNDNESS, Ok(report.gap / report.tolerance)));
                if i == 0 {
                    m.push((AVR_AGREEMENT, Ok(avr_margin)));
                }
                Ok(m)
            };
            (label, run().unwrap_or_else(|e| all(e.to_string())))
        })
        .collect()
}

fn faulty_lambda() -> AssociatedFunction {
    AssociatedFunction::from_fn(|t| t / (1.0 + t), TailDescriptor::Probe, Provenance::UserSupplied, 1.0)
}

fn rejection(what: String, e: Error) -> CliError {
    let detail = match e {
        Error::NotAdmissible(msg) => msg,
        other => other.to_string(),
    };
    CliError::Core(Error::NotAdmissible(format!("{what} rejected: {detail}")))
}

/// Runs the suite. Inadmissible input (the negative control) is an error;
/// property failures are reported, not raised.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport, CliError> {
    let grid = sample_grid(CASE_HORIZON, CASE_SAMPLES);
    if cfg.inject_faulty_lambda {
        faulty_lambda()
            .validate(&grid, 0.0)
            .map_err(|e| rejection(format!("injected λ (seed {})", cfg.seed), e))?;
    }
    let cases = draw_cases(cfg.seed, cfg.cases);
    for case in &cases {
        case.lambda()?
            .validate(&grid, 0.0)
            .map_err(|e| rejection(case.label(cfg.seed), e))?;
    }

    let mut props = vec![
        PropertyResult::new(BOUNDS, Scope::RandomCases, 1e-9),
        PropertyResult::new(SLOPE, Scope::RandomCases, 1e-9),
        PropertyResult::new(INITIAL_SLOPE, Scope::RandomCases, 0.0),
        PropertyResult::new(NUMERATOR, Scope::RandomCases, 1e-9),
        PropertyResult::new(LOG_INEQUALITY, Scope::RandomCases, 1e-9),
        PropertyResult::new(DERIVATIVE, Scope::RandomCases, 1e-6),
        PropertyResult::new(RATIO, Scope::BuiltinSlices, 1e-9),
        PropertyResult::new(THETA_HAT, Scope::BuiltinSlices, 1e-9),
        PropertyResult::new(RICCATI, Scope::BuiltinSlices, 1e-7),
        PropertyResult::new(ENVELOPE, Scope::BuiltinSlices, 1e-12),
        PropertyResult::new(SOUNDNESS, Scope::BuiltinSlices, 1.0),
        PropertyResult::new(AVR_AGREEMENT, Scope::BuiltinSlices, 0.0),
    ];
    let mut fold = |label: &str, margins: &Margins| {
        for (name, outcome) in margins {
            let p = props.iter_mut().find(|p| p.name == *name).expect("known property");
            p.record(label, outcome);
        }
    };

    let case_results: Vec<Margins> = cases.par_iter().map(case_margins).collect();
    for (case, margins) in cases.iter().zip(&case_results) {
        fold(&case.label(cfg.seed), margins);
    }

    let builtins = builtin_slices();
    let slice_results: Vec<Vec<(String, Margins)>> = builtins
        .par_iter()
        .map(|(name, w, radii)| builtin_margins(name, w, radii, &cfg.settings))
        .collect();
    let mut slices = 0;
    for (label, margins) in slice_results.iter().flatten() {
        slices += 1;
        fold(label, margins);
    }

    Ok(SuiteReport {
        seed: cfg.seed,
        cases: cases.len(),
        slices,
        properties: props,
    })
}
