//! Report serialization.
//!
//! Every number is written with 17 significant digits in scientific
//! notation (`{:.16e}`), which round-trips an `f64` exactly and does not
//! depend on locale. JSON objects keep their insertion order, so identical
//! inputs give byte-identical output.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value};
use willmore_core::avr::{AvrEstimate, AvrMethod};
use willmore_core::manifold::ConditionFlags;
use willmore_core::willmore::{Analysis, AnnexReport, VerificationReport};

use crate::CliError;

/// `x` with 17 significant digits; non-finite values as `nan`, `inf`, `-inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_owned()
    } else if x > 0.0 {
        "inf".to_owned()
    } else {
        "-inf".to_owned()
    }
}

/// A JSON number with 17 significant digits, or `null` when not finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fmt_num(x).parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn object(entries: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_owned(), v)).collect::<Map<_, _>>())
}

pub fn avr_method_name(m: AvrMethod) -> &'static str {
    match m {
        AvrMethod::TubeExtrapolation => "tube-extrapolation",
        AvrMethod::WarpSlopeLimit => "warp-slope",
    }
}

pub fn flags_json(flags: &ConditionFlags, flat_regime: bool) -> Value {
    object([
        ("lambda1_positive_somewhere", Value::Bool(flags.lambda1_positive_somewhere)),
        ("envelope_admissible", Value::Bool(flags.envelope_admissible)),
        ("h_over_r_eventually_nonincreasing", Value::Bool(flags.h_over_r_eventually_nonincreasing)),
        (
            "h_eventually_nondecreasing_and_unbounded",
            Value::Bool(flags.h_eventually_nondecreasing_and_unbounded),
        ),
        ("flat_regime", Value::Bool(flat_regime)),
        ("tau0", opt_num(flags.tau0)),
        (
            "diagnostics",
            Value::Array(flags.diagnostics.iter().cloned().map(Value::String).collect()),
        ),
    ])
}

fn avr_json(avr: &AvrEstimate) -> Value {
    object([
        ("value", num(avr.value)),
        ("error", num(avr.error_estimate)),
        ("method", Value::String(avr_method_name(avr.method).into())),
        ("tube", Value::Array(vec![num(avr.tube.0), num(avr.tube.1)])),
        ("slope", Value::Array(vec![num(avr.slope.0), num(avr.slope.1)])),
    ])
}

/// `{b0, b1, avr, errors, flags}` for the `constants` command.
pub fn constants_json(a: &Analysis) -> Value {
    let c = &a.constants;
    object([
        ("b0", num(c.b0)),
        ("b1", num(c.b1)),
        ("avr", num(a.avr.value)),
        (
            "errors",
            object([("b0", num(c.b0_error)), ("b1", num(c.b1_error)), ("avr", num(a.avr.error_estimate))]),
        ),
        ("avr_method", Value::String(avr_method_name(a.avr.method).into())),
        ("avr_estimators", avr_json(&a.avr)),
        ("flags", flags_json(&a.flags, a.flat_regime)),
    ])
}

pub fn constants_human(a: &Analysis) -> String {
    let c = &a.constants;
    let mut s = String::new();
    let _ = writeln!(s, "b0   = {} ± {}", fmt_num(c.b0), fmt_num(c.b0_error));
    let _ = writeln!(s, "b1   = {} ± {}", fmt_num(c.b1), fmt_num(c.b1_error));
    let _ = writeln!(
        s,
        "AVR  = {} ± {} ({})",
        fmt_num(a.avr.value),
        fmt_num(a.avr.error_estimate),
        avr_method_name(a.avr.method)
    );
    let _ = writeln!(s, "flat regime: {}", a.flat_regime);
    write_flags_human(&mut s, &a.flags);
    s
}

fn write_flags_human(s: &mut String, f: &ConditionFlags) {
    let _ = writeln!(s, "(Λ1) λ1 > 0 somewhere:            {}", f.lambda1_positive_somewhere);
    let _ = writeln!(s, "(Λ2) envelope admissible:         {}", f.envelope_admissible);
    let _ = writeln!(s, "(Λ3) h/r eventually nonincreasing: {}", f.h_over_r_eventually_nonincreasing);
    let _ = writeln!(s, "(Λ4) h nondecreasing, unbounded:  {}", f.h_eventually_nondecreasing_and_unbounded);
    for d in &f.diagnostics {
        let _ = writeln!(s, "  note: {d}");
    }
}

fn annex_json(a: &AnnexReport) -> Value {
    object([
        ("r0_star", num(a.r0_star)),
        ("slice_diameter", num(a.slice_diameter)),
        ("diameter_criterion", Value::Bool(a.diameter_criterion)),
        ("area_criterion", Value::Bool(a.area_criterion)),
        ("li_bound", opt_num(a.li_bound)),
        ("inradius", num(a.inradius)),
        ("li_equality", Value::Bool(a.li_equality)),
        ("sharp_constant", num(a.sharp_constant)),
        ("weaker_constant", num(a.weaker_constant)),
    ])
}

/// The verification report. The leading keys are the stable interface;
/// the trailing ones carry supporting detail.
pub fn report_json(r: &VerificationReport, annex: Option<&AnnexReport>) -> Value {
    let mut v = object([
        ("lhs", num(r.lhs)),
        ("rhs", num(r.rhs)),
        ("gap", num(r.gap)),
        ("relative_slack", num(r.relative_slack)),
        ("b0", num(r.constants.b0)),
        ("b1", num(r.constants.b1)),
        ("avr", num(r.avr.value)),
        ("avr_error", num(r.avr.error_estimate)),
        ("equality_class", Value::String(r.equality_class.as_str().into())),
        ("limit_ratio", opt_num(r.limit_ratio.map(|l| l.0))),
        ("flags", flags_json(&r.flags, r.flat_regime)),
        ("limit_ratio_error", opt_num(r.limit_ratio.map(|l| l.1))),
        ("tolerance", num(r.tolerance)),
        ("violated", Value::Bool(r.violated())),
        ("reduced_lhs", num(r.reduced_lhs)),
        (
            "slice",
            object([
                ("r0", num(r.slice.r0)),
                ("area", num(r.slice.area)),
                ("mean_curvature", num(r.slice.mean_curvature)),
                ("mean_ratio", num(r.slice.mean_ratio)),
            ]),
        ),
        (
            "constant_errors",
            object([("b0", num(r.constants.b0_error)), ("b1", num(r.constants.b1_error))]),
        ),
        (
            "w1",
            r.w1.map_or(Value::Null, |w| {
                object([
                    ("r0_star", num(w.r0_star)),
                    ("max_shape_error", num(w.max_shape_error)),
                    ("passes", Value::Bool(w.passes)),
                ])
            }),
        ),
    ]);
    if let (Some(a), Value::Object(m)) = (annex, &mut v) {
        m.insert("annex".into(), annex_json(a));
    }
    v
}

pub fn report_human(r: &VerificationReport, annex: Option<&AnnexReport>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "slice r0 = {}  (area {}, H = {})", fmt_num(r.slice.r0), fmt_num(r.slice.area), fmt_num(r.slice.mean_curvature));
    let _ = writeln!(s, "lhs  = {}", fmt_num(r.lhs));
    let _ = writeln!(s, "rhs  = {}", fmt_num(r.rhs));
    let _ = writeln!(s, "gap  = {}  (relative {}, tolerance {})", fmt_num(r.gap), fmt_num(r.relative_slack), fmt_num(r.tolerance));
    let _ = writeln!(s, "b0   = {}", fmt_num(r.constants.b0));
    let _ = writeln!(s, "b1   = {}", fmt_num(r.constants.b1));
    let _ = writeln!(s, "AVR  = {} ± {}", fmt_num(r.avr.value), fmt_num(r.avr.error_estimate));
    match r.limit_ratio {
        Some((v, e)) => {
            let _ = writeln!(s, "limit ratio = {} ± {}", fmt_num(v), fmt_num(e));
        }
        None => {
            let _ = writeln!(s, "limit ratio = n/a");
        }
    }
    let _ = writeln!(s, "class: {}", r.equality_class.as_str());
    write_flags_human(&mut s, &r.flags);
    if let Some(a) = annex {
        let _ = writeln!(s, "annex: r0* = {}, diameter criterion {}, area criterion {}, Li equality {}",
            fmt_num(a.r0_star), a.diameter_criterion, a.area_criterion, a.li_equality);
    }
    s
}

pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// The quantities of one sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowData {
    pub area: f64,
    pub mean_curvature: f64,
    pub f: f64,
    pub f_prime: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub class: String,
    pub violated: bool,
}

/// One sweep row; a failed slice keeps its radius and the error message.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub r0: f64,
    pub outcome: Result<RowData, String>,
}

/// A located sign change of `𝓕′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FPrimeRoot {
    pub r0: f64,
    /// `s = h(r0)`.
    pub s: f64,
}

pub const SWEEP_HEADER: [&str; 9] = ["r0", "area", "H", "F", "F_prime", "lhs", "rhs", "gap", "class"];

/// CSV body plus a `#` footer with the located roots of `𝓕′`.
pub fn sweep_csv(rows: &[SweepRow], roots: &[FPrimeRoot]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        let mut rec = vec![fmt_num(row.r0)];
        match &row.outcome {
            Ok(d) => {
                rec.extend([d.area, d.mean_curvature, d.f, d.f_prime, d.lhs, d.rhs, d.gap].map(fmt_num));
                rec.push(d.class.clone());
            }
            Err(msg) => {
                rec.extend(std::iter::repeat_n(String::new(), 7));
                rec.push(format!("error: {msg}"));
            }
        }
        w.write_record(&rec)?;
    }
    let mut out = String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.into_error()))?)
        .expect("CSV of UTF-8 fields is UTF-8");
    if roots.is_empty() {
        out.push_str("# F_prime root: none in range\n");
    }
    for r in roots {
        let _ = writeln!(out, "# F_prime root: r0={},s={}", fmt_num(r.r0), fmt_num(r.s));
    }
    Ok(out)
}

pub fn sweep_json(rows: &[SweepRow], roots: &[FPrimeRoot]) -> Value {
    let rows = rows
        .iter()
        .map(|row| match &row.outcome {
            Ok(d) => object([
                ("r0", num(row.r0)),
                ("area", num(d.area)),
                ("H", num(d.mean_curvature)),
                ("F", num(d.f)),
                ("F_prime", num(d.f_prime)),
                ("lhs", num(d.lhs)),
                ("rhs", num(d.rhs)),
                ("gap", num(d.gap)),
                ("class", Value::String(d.class.clone())),
            ]),
            Err(msg) => object([("r0", num(row.r0)), ("error", Value::String(msg.clone()))]),
        })
        .collect();
    object([
        ("rows", Value::Array(rows)),
        (
            "f_prime_roots",
            Value::Array(roots.iter().map(|r| object([("r0", num(r.r0)), ("s", num(r.s))])).collect()),
        ),
    ])
}
