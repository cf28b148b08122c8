//! Richardson extrapolation of sequences sampled on a geometric grid.

use crate::math::abs;
use crate::{Error, Result};

/// Limit of `v(R)` as `R → ∞` from samples `(R_i, v_i)` with `R_{i+1} = q R_i`.
///
/// The model is `v(R) = L + a/R + b/R² + …`; the first two correction terms
/// are eliminated with the tableau
/// `T_{i,k} = (q^k T_{i,k−1} − T_{i−1,k−1}) / (q^k − 1)`.
///
/// The returned error estimate is the last elimination increment
/// `|T_{m,K} − T_{m,K−1}|`; with four or more samples it is widened to also
/// cover the spread `|T_{m,K} − T_{m−1,K}|` between the last two fully
/// eliminated entries, which catches logarithmic terms the model ignores.
pub fn extrapolate_limit(samples: &[(f64, f64)]) -> Result<(f64, f64)> {
    let m = samples.len();
    if m < 3 {
        return Err(Error::InsufficientSamples { got: m });
    }
    if samples.iter().any(|(r, v)| !r.is_finite() || !v.is_finite() || *r <= 0.0) {
        return Err(Error::InvalidArgument(
            "extrapolation samples must be finite with positive abscissae".into(),
        ));
    }
    let q = samples[1].0 / samples[0].0;
    if !(q >= 2.0) {
        return Err(Error::IrregularSamples);
    }
    for w in samples.windows(2) {
        if abs(w[1].0 / w[0].0 - q) > 1e-9 * q {
            return Err(Error::IrregularSamples);
        }
    }

    let scale = samples.iter().fold(0.0f64, |acc, s| acc.max(abs(s.1)));
    let slack = 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    let mut prev_diff = f64::INFINITY;
    for w in samples.windows(2) {
        let d = abs(w[1].1 - w[0].1);
        if d > prev_diff * (1.0 + 1e-12) + slack {
            return Err(Error::NonMonotoneTail);
        }
        prev_diff = d;
    }

    // Tableau columns: col[k][i] for i >= k.
    let depth = 2.min(m - 1);
    let mut cols: [alloc::vec::Vec<f64>; 3] = Default::default();
    cols[0] = samples.iter().map(|s| s.1).collect();
    let mut qk = 1.0;
    for k in 1..=depth {
        qk *= q;
        let prev = &cols[k - 1];
        let next: alloc::vec::Vec<f64> = (1..prev.len())
            .map(|i| (qk * prev[i] - prev[i - 1]) / (qk - 1.0))
            .collect();
        cols[k] = next;
    }
    let last = &cols[depth];
    let limit = *last.last().expect("non-empty column");
    let mut err = abs(limit - cols[depth - 1].last().copied().unwrap_or(limit));
    if last.len() >= 2 {
        err = err.max(abs(limit - last[last.len() - 2]));
    }
    Ok((limit, err))
}
