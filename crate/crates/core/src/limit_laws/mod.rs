//! Reference limit distributions, the GEM / Poisson-Dirichlet construction,
//! size-biased reordering, the Dickman-type function and distance metrics.

mod dickman;
mod metrics;

pub use dickman::{dickman_rho, DickmanSolution};
pub use metrics::{kolmogorov_sf, ks_distance_pmf, ks_distance_sample, tv_distance_maps};

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;
use statrs::function::{beta::beta_reg, erf::erfc, gamma::gamma_lr, gamma::ln_gamma};

use crate::error::{invalid, Error, Result};

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}

/// Draws from Beta(a, b). Beta(1, b) uses the closed-form inverse CDF.
pub fn beta_sample<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    if a == 1.0 {
        let u: f64 = rng.random();
        return Ok(1.0 - u.powf(1.0 / b));
    }
    let d = rand_distr::Beta::new(a, b).map_err(|e| invalid("beta", e.to_string()))?;
    Ok(d.sample(rng))
}

pub fn beta_cdf(a: f64, b: f64, t: f64) -> Result<f64> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    Ok(if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else if a == 1.0 {
        1.0 - (1.0 - t).powf(b)
    } else {
        beta_reg(a, b, t)
    })
}

/// Gamma CDF with density `rate^shape t^{shape-1} e^{-rate t} / Gamma(shape)`.
pub fn gamma_cdf(shape: f64, rate: f64, t: f64) -> Result<f64> {
    check_positive("shape", shape)?;
    check_positive("rate", rate)?;
    Ok(if t <= 0.0 { 0.0 } else { gamma_lr(shape, rate * t) })
}

pub fn gamma_sample<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    check_positive("shape", shape)?;
    check_positive("rate", rate)?;
    let d = rand_distr::Gamma::new(shape, 1.0 / rate).map_err(|e| invalid("gamma", e.to_string()))?;
    Ok(d.sample(rng))
}

pub fn normal_cdf(t: f64) -> f64 {
    0.5 * erfc(-t / std::f64::consts::SQRT_2)
}

pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * lambda.ln() - lambda - ln_gamma(k as f64 + 1.0)).exp()
}

/// Stick-breaking fractions truncated after `k` sticks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GemSequence {
    pub theta: f64,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    /// `(1 - Y_1)...(1 - Y_k)`, the unbroken mass.
    pub remainder: f64,
}

/// GEM fractions sorted into nonincreasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdSample {
    pub parts: Vec<f64>,
    pub remainder: f64,
}

impl PdSample {
    pub fn largest(&self) -> f64 {
        self.parts.first().copied().unwrap_or(0.0)
    }
}

pub const DEFAULT_TRUNCATION: usize = 200;

pub fn gem_sample<R: Rng + ?Sized>(theta: f64, k: usize, rng: &mut R) -> Result<GemSequence> {
    check_positive("theta", theta)?;
    if k == 0 {
        return Err(invalid("k", "must be >= 1"));
    }
    let mut y = Vec::with_capacity(k);
    for _ in 0..k {
        y.push(beta_sample(1.0, theta, rng)?);
    }
    let (z, remainder) = stick_break(&y);
    Ok(GemSequence { theta, y, z, remainder })
}

pub fn pd_sample<R: Rng + ?Sized>(theta: f64, k: usize, rng: &mut R) -> Result<PdSample> {
    let g = gem_sample(theta, k, rng)?;
    let mut parts = g.z;
    parts.sort_by(|a, b| b.total_cmp(a));
    Ok(PdSample {
        parts,
        remainder: g.remainder,
    })
}

/// `g(y)_j = (1 - y_1)...(1 - y_{j-1}) y_j`; also returns the leftover mass.
pub fn stick_break(y: &[f64]) -> (Vec<f64>, f64) {
    let mut rem = 1.0;
    let z = y
        .iter()
        .map(|&yj| {
            let zj = rem * yj;
            rem *= 1.0 - yj;
            zj
        })
        .collect();
    (z, rem)
}

/// Inverse of [`stick_break`]: `y_j = z_j / (1 - z_1 - ... - z_{j-1})`.
pub fn stick_unbreak(z: &[f64]) -> Result<Vec<f64>> {
    let mut rem = 1.0;
    z.iter()
        .map(|&zj| {
            if rem <= 0.0 {
                return Err(Error::NonPositiveRemainder(rem));
            }
            let y = zj / rem;
            rem *= 1.0 - y;
            Ok(y)
        })
        .collect()
}

/// Reorders `parts` by successive size-biased picks without replacement.
///
/// Implemented with exponential clocks: part `j` rings at `E_j / X_j` and
/// parts are listed in ringing order, which has the same law as the
/// sequential rule.
pub fn size_biased_permutation<R: Rng + ?Sized>(parts: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let total: f64 = parts.iter().sum();
    if parts.iter().any(|&p| p < 0.0 || !p.is_finite()) {
        return Err(invalid("parts", "must be nonnegative and finite"));
    }
    if total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid("parts", format!("must sum to 1, got {total}")));
    }
    let mut clocks: Vec<(f64, f64)> = parts
        .iter()
        .map(|&p| {
            let e: f64 = Exp1.sample(rng);
            (if p > 0.0 { e / p } else { f64::INFINITY }, p)
        })
        .collect();
    clocks.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(clocks.into_iter().map(|c| c.1).collect())
}

/// `X_j / (1 - X_1 - ... - X_{j-1})`, clamped to `[0, 1]`.
pub fn residual_ratios(reordered: &[f64]) -> Result<Vec<f64>> {
    let mut rem = 1.0;
    reordered
        .iter()
        .map(|&x| {
            if rem <= 0.0 {
                return Err(Error::NonPositiveRemainder(rem));
            }
            let r = (x / rem).clamp(0.0, 1.0);
            rem *= 1.0 - r;
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cdf_special_cases() {
        assert_eq!(normal_cdf(0.0), 0.5);
        for t in [0.1, 1.0, 3.7] {
            assert!((gamma_cdf(1.0, 1.0, t).unwrap() - (1.0 - (-t).exp())).abs() < 1e-14);
            assert!((gamma_cdf(2.0, 3.0, t).unwrap() - (1.0 - (1.0 + 3.0 * t) * (-3.0 * t).exp())).abs() < 1e-13);
        }
        let q = normal_cdf(1.959963984540054);
        assert!((q - 0.975).abs() < 1e-11, "{q}");
        assert!((beta_cdf(2.0, 2.0, 0.5).unwrap() - 0.5).abs() < 1e-14);
        assert!((beta_cdf(1.0, 3.0, 0.2).unwrap() - (1.0 - 0.8f64.powi(3))).abs() < 1e-15);
        assert!(gamma_cdf(0.0, 1.0, 1.0).is_err());
        assert!(beta_sample(1.0, -1.0, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn poisson_pmf_sums_to_one() {
        let s: f64 = (0..60).map(|k| poisson_pmf(2.5, k)).sum();
        assert!((s - 1.0).abs() < 1e-14);
        assert!((poisson_pmf(1.0, 0) - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn uniform_beta_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws: Vec<f64> = (0..100_000).map(|_| beta_sample(1.0, 1.0, &mut rng).unwrap()).collect();
        let d = ks_distance_sample(&draws, |t| t.clamp(0.0, 1.0)).unwrap();
        assert!(d <= 0.01, "{d}");
        let draws: Vec<f64> = (0..100_000).map(|_| beta_sample(2.5, 0.7, &mut rng).unwrap()).collect();
        let d = ks_distance_sample(&draws, |t| beta_cdf(2.5, 0.7, t).unwrap()).unwrap();
        assert!(d <= 0.01, "{d}");
    }

    #[test]
    fn gem_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for theta in [0.3, 1.0, 5.0] {
            for k in [1, 10, 200] {
                let g = gem_sample(theta, k, &mut rng).unwrap();
                assert_eq!(g.z.len(), k);
                assert!(g.z.iter().all(|&z| z >= 0.0));
                let s: f64 = g.z.iter().sum::<f64>() + g.remainder;
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
        assert!(gem_sample(0.0, 3, &mut rng).is_err());
        assert!(gem_sample(1.0, 0, &mut rng).is_err());
    }

    #[test]
    fn first_stick_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 200_000;
        let m: f64 = (0..n).map(|_| gem_sample(1.0, 1, &mut rng).unwrap().z[0]).sum::<f64>() / n as f64;
        assert!((m - 0.5).abs() < 0.004, "{m}");
    }

    #[test]
    fn pd_parts_sorted() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let p = pd_sample(2.0, 200, &mut rng).unwrap();
        assert!(p.parts.windows(2).all(|w| w[0] >= w[1]));
        assert!(p.parts.iter().sum::<f64>() <= 1.0 + 1e-12);
        assert_eq!(p.largest(), p.parts[0]);
    }

    #[test]
    fn size_biased_small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        assert_eq!(size_biased_permutation(&[1.0], &mut rng).unwrap(), vec![1.0]);
        let n = 200_000;
        let first_big = (0..n)
            .filter(|_| size_biased_permutation(&[2.0 / 3.0, 1.0 / 3.0], &mut rng).unwrap()[0] == 2.0 / 3.0)
            .count();
        let f = first_big as f64 / n as f64;
        assert!((f - 2.0 / 3.0).abs() < 0.005, "{f}");
        let mut p = size_biased_permutation(&[0.5, 0.0, 0.25, 0.25], &mut rng).unwrap();
        assert_eq!(p[3], 0.0);
        p.sort_by(|a, b| a.total_cmp(b));
        assert_eq!(p, vec![0.0, 0.25, 0.25, 0.5]);
        assert_eq!(size_biased_permutation(&[0.0, 0.0], &mut rng), Err(Error::ZeroMass));
        assert!(size_biased_permutation(&[0.5], &mut rng).is_err());
    }

    #[test]
    fn residual_ratio_examples() {
        assert_eq!(residual_ratios(&[0.5, 0.25, 0.25]).unwrap(), vec![0.5, 0.5, 1.0]);
        assert_eq!(residual_ratios(&[1.0]).unwrap(), vec![1.0]);
        assert!(matches!(residual_ratios(&[1.0, 0.0]), Err(Error::NonPositiveRemainder(_))));
    }

    #[test]
    fn stick_breaking_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..1000 {
            let y: Vec<f64> = (0..20).map(|_| rng.random::<f64>() * 0.9).collect();
            let (z, _) = stick_break(&y);
            let (again, _) = stick_break(&stick_unbreak(&z).unwrap());
            for (a, b) in z.iter().zip(&again) {
                assert!((a - b).abs() < 1e-12, "{a} {b}");
            }
            let y: Vec<f64> = (0..10).map(|_| rng.random::<f64>() * 0.5).collect();
            let back = stick_unbreak(&stick_break(&y).0).unwrap();
            for (a, b) in y.iter().zip(&back) {
                assert!((a - b).abs() < 1e-12, "{a} {b}");
            }
        }
    }
}
