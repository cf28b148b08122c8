//! The four subcommands.

use rayon::prelude::*;
use willmore_core::numerics::bisect;
use willmore_core::willmore::{
    analyze, annex_checks, script_f, script_f_prime, verify_slice, Analysis, VerificationReport,
};

use crate::config::{Format, RunConfig};
use crate::output::{self, fmt_num, FPrimeRoot, RowData, SweepRow};
use crate::suite::{run_suite, SuiteConfig};
use crate::{CliError, ExitStatus};

/// What a command produced: the report body, its exit status, and any
/// diagnostics destined for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: ExitStatus,
    pub body: String,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome {
            status: ExitStatus::Success,
            body,
            diagnostics: Vec::new(),
        }
    }
}

fn format_or(cfg: Option<Format>, default: Format, allowed: &[Format], command: &str) -> Result<Format, CliError> {
    let f = cfg.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Config(format!("format {f:?} is not available for `{command}`").to_lowercase()))
    }
}

fn analysis(cfg: &RunConfig) -> Result<Analysis, CliError> {
    let w = cfg.manifold.build()?;
    Ok(analyze(&w, &cfg.settings)?)
}

/// `b0`, `b1`, `AVR✠` and the condition flags.
pub fn cmd_constants(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let format = format_or(cfg.format, Format::Json, &[Format::Json, Format::Human], "constants")?;
    let a = analysis(cfg)?;
    Ok(Outcome::ok(match format {
        Format::Human => output::constants_human(&a),
        _ => output::to_json_string(&output::constants_json(&a)),
    }))
}

/// Verifies the inequality on the slice `{r0} × N`.
pub fn cmd_verify(cfg: &RunConfig, r0: f64, annex: bool) -> Result<Outcome, CliError> {
    let format = format_or(cfg.format, Format::Json, &[Format::Json, Format::Human], "verify")?;
    check_radius("slice", r0)?;
    let a = analysis(cfg)?;
    let report = verify_slice(&a, r0)?;
    let annex = if annex {
        Some(annex_checks(&a.manifold, r0, a.avr.value)?)
    } else {
        None
    };
    let body = match format {
        Format::Human => output::report_human(&report, annex.as_ref()),
        _ => output::to_json_string(&output::report_json(&report, annex.as_ref())),
    };
    let mut out = Outcome::ok(body);
    if let Some(d) = violation(&report) {
        out.status = ExitStatus::Violation;
        out.diagnostics.push(d);
    }
    Ok(out)
}

/// The diagnostic for a violated report, if any.
pub fn violation(report: &VerificationReport) -> Option<String> {
    report.violated().then(|| {
        format!(
            "inequality violated on r0 = {}: gap {} below -tolerance {}",
            fmt_num(report.slice.r0),
            fmt_num(report.gap),
            fmt_num(report.tolerance)
        )
    })
}

fn check_radius(name: &str, r: f64) -> Result<(), CliError> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} radius must be finite and nonnegative, got {r}")))
    }
}

/// A uniform grid of slice radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepParams {
    pub fn radii(&self) -> Result<Vec<f64>, CliError> {
        check_radius("sweep start", self.from)?;
        check_radius("sweep end", self.to)?;
        if self.to < self.from {
            return Err(CliError::Config(format!(
                "sweep range is reversed: from {} to {}",
                self.from, self.to
            )));
        }
        if self.steps == 0 {
            return Err(CliError::Config("sweep needs at least one step".into()));
        }
        if self.steps == 1 {
            return Ok(vec![self.from]);
        }
        let h = (self.to - self.from) / (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|i| if i + 1 == self.steps { self.to } else { self.from + h * i as f64 })
            .collect())
    }
}

/// Rows of a sweep, computed in parallel and returned in radius order.
pub fn sweep_rows(a: &Analysis, radii: &[f64]) -> Vec<SweepRow> {
    let w = &a.manifold;
    let c = &a.constants;
    radii
        .par_iter()
        .map(|&r0| SweepRow {
            r0,
            outcome: verify_slice(a, r0)
                .map(|rep| RowData {
                    area: rep.slice.area,
                    mean_curvature: rep.slice.mean_curvature,
                    f: script_f(w, c, r0),
                    f_prime: script_f_prime(w, c, r0),
                    lhs: rep.lhs,
                    rhs: rep.rhs,
                    gap: rep.gap,
                    class: rep.equality_class.as_str().to_owned(),
                    violated: rep.violated(),
                })
                .map_err(|e| e.to_string()),
        })
        .collect()
}

/// Sign changes of `𝓕′` between consecutive successful rows, refined by
/// bisection in `r0`.
pub fn f_prime_roots(a: &Analysis, rows: &[SweepRow]) -> Vec<FPrimeRoot> {
    let w = &a.manifold;
    let c = &a.constants;
    let ok: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|d| (r.r0, d.f_prime)))
        .collect();
    let mut roots = Vec::new();
    for (i, &(r, v)) in ok.iter().enumerate() {
        if v == 0.0 {
            roots.push(r);
        } else if let Some(&(r1, v1)) = ok.get(i + 1) {
            if v1 != 0.0 && (v < 0.0) != (v1 < 0.0) {
                if let Ok(root) = bisect(|t| script_f_prime(w, c, t), r, r1, 1e-13) {
                    roots.push(root);
                }
            }
        }
    }
    roots
        .into_iter()
        .map(|r0| FPrimeRoot { r0, s: w.eval(r0).h })
        .collect()
}

/// One row per slice radius plus the located roots of `𝓕′`.
pub fn cmd_sweep(cfg: &RunConfig, params: SweepParams) -> Result<Outcome, CliError> {
    let format = format_or(cfg.format, Format::Csv, &[Format::Csv, Format::Json], "sweep")?;
    let radii = params.radii()?;
    let a = analysis(cfg)?;
    let rows = sweep_rows(&a, &radii);
    let roots = f_prime_roots(&a, &rows);
    let body = match format {
        Format::Json => output::to_json_string(&output::sweep_json(&rows, &roots)),
        _ => output::sweep_csv(&rows, &roots)?,
    };
    let mut out = Outcome::ok(body);
    for row in &rows {
        match &row.outcome {
            Ok(d) if d.violated => {
                out.status = ExitStatus::Violation;
                out.diagnostics.push(format!("inequality violated on r0 = {}", fmt_num(row.r0)));
            }
            Err(e) => {
                if out.status == ExitStatus::Success {
                    out.status = ExitStatus::NumericalFailure;
                }
                out.diagnostics.push(format!("row r0 = {} failed: {e}", fmt_num(row.r0)));
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Runs the property suite; exit 0 iff every property passes.
pub fn cmd_check(suite: &SuiteConfig, format: Option<Format>) -> Result<Outcome, CliError> {
    let format = format_or(format, Format::Human, &[Format::Human, Format::Json], "check")?;
    let report = run_suite(suite)?;
    let body = match format {
        Format::Json => output::to_json_string(&report.json()),
        _ => report.human(),
    };
    let mut out = Outcome::ok(body);
    out.status = report.exit_status();
    for p in report.properties.iter().filter(|p| !p.passed()) {
        out.diagnostics.push(format!(
            "property `{}` failed (reproduce with --seed {} --cases {}): {}",
            p.name,
            report.seed,
            report.cases,
            p.first_failure.as_deref().unwrap_or("")
        ));
    }
    Ok(out)
}
