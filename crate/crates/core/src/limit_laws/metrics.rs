use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::sampler::ExactPmf;

/// Kolmogorov distance between the empirical CDF of `sample` and a
/// continuous reference CDF.
pub fn ks_distance_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(invalid("sample", "must be nonempty"));
    }
    if sample.iter().any(|v| v.is_nan()) {
        return Err(invalid("sample", "contains NaN"));
    }
    let mut s = sample.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        let v = s[i];
        let mut j = i;
        while j < s.len() && s[j] == v {
            j += 1;
        }
        let f = cdf(v);
        d = d.max((i as f64 / n - f).abs()).max((j as f64 / n - f).abs());
        i = j;
    }
    Ok(d.min(1.0))
}

/// Kolmogorov distance between a finite pmf and a continuous reference CDF.
pub fn ks_distance_pmf<F: Fn(f64) -> f64>(pmf: &ExactPmf, cdf: F) -> Result<f64> {
    if pmf.support.is_empty() {
        return Err(invalid("pmf", "must be nonempty"));
    }
    let mut below = 0.0;
    let mut d: f64 = 0.0;
    for &(v, p) in &pmf.support {
        let f = cdf(v);
        let at = below + p;
        d = d.max((below - f).abs()).max((at - f).abs());
        below = at;
    }
    Ok(d.min(1.0))
}

/// `P(sup_t |B(t)| > lambda)` for the Brownian bridge, i.e. the asymptotic
/// survival function of `sqrt(n) D_n`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.3 {
        // Small-lambda branch of the Jacobi theta identity.
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=20)
            .map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp())
            .sum();
        return 1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let t = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        s += if k % 2 == 1 { t } else { -t };
        if t < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Total-variation distance between two laws keyed by arbitrary values.
pub fn tv_distance_maps<K: Ord>(a: &BTreeMap<K, f64>, b: &BTreeMap<K, f64>) -> f64 {
    let mut s = 0.0;
    for (k, &pa) in a {
        s += (pa - b.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &pb) in b {
        if !a.contains_key(k) {
            s += pb.abs();
        }
    }
    0.5 * s
}
