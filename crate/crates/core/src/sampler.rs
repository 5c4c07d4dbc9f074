//! Sampling from the weighted measure `P(N_x = n) = alpha(n) / S(x)` and
//! exact, sampling-free distributions of factorization statistics.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{FactorProfile, SpfTable};
use crate::error::{invalid, Error, Result};
use crate::numeric::NeumaierSum;
use crate::weights::{MultiplicativeWeight, WeightTable};

/// Inverse-CDF sampler over a weight table's prefix sums.
#[derive(Debug, Clone, Copy)]
pub struct WeightedIntegerSampler<'a> {
    table: &'a WeightTable,
}

impl<'a> WeightedIntegerSampler<'a> {
    pub fn new(table: &'a WeightTable) -> Result<Self> {
        if table.total() <= 0.0 {
            return Err(Error::DegenerateTable);
        }
        Ok(WeightedIntegerSampler { table })
    }

    pub fn table(&self) -> &'a WeightTable {
        self.table
    }

    /// One draw of `N_x`, by binary search of `U * S(x)` in the prefix sums.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let prefix = self.table.prefix();
        let total = self.table.total();
        loop {
            let u = rng.random::<f64>() * total;
            let n = prefix.partition_point(|&c| c <= u);
            if n >= 1 && n < prefix.len() {
                return n as u64;
            }
        }
    }

    pub fn sample_many<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<u64> {
        (0..count).map(|_| self.sample(rng)).collect()
    }
}

/// Free-function form of [`WeightedIntegerSampler::sample`].
pub fn sample_n<R: Rng + ?Sized>(s: &WeightedIntegerSampler<'_>, rng: &mut R) -> u64 {
    s.sample(rng)
}

/// A finitely supported probability mass function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactPmf {
    /// `(value, probability)`, values strictly increasing.
    pub support: Vec<(f64, f64)>,
}

impl ExactPmf {
    /// Builds from unsorted atoms, merging equal values.
    pub fn from_atoms<I: IntoIterator<Item = (f64, f64)>>(atoms: I) -> Self {
        let mut v: Vec<(f64, f64)> = atoms.into_iter().collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (x, p) in v {
            match support.last_mut() {
                Some(last) if last.0 == x => last.1 += p,
                _ => support.push((x, p)),
            }
        }
        ExactPmf { support }
    }

    pub fn from_counts<K: Into<f64> + Copy>(counts: &BTreeMap<K, u64>) -> Self {
        let n: u64 = counts.values().sum();
        Self::from_atoms(counts.iter().map(|(&k, &c)| (k.into(), c as f64 / n as f64)))
    }

    /// Empirical pmf of integer observations.
    pub fn empirical<I: IntoIterator<Item = i64>>(obs: I) -> Self {
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        let mut n = 0u64;
        for o in obs {
            *counts.entry(o).or_default() += 1;
            n += 1;
        }
        Self::from_atoms(counts.into_iter().map(|(k, c)| (k as f64, c as f64 / n as f64)))
    }

    pub fn total_mass(&self) -> f64 {
        self.support.iter().map(|a| a.1).sum()
    }

    pub fn prob(&self, value: f64) -> f64 {
        self.support
            .binary_search_by(|a| a.0.total_cmp(&value))
            .map_or(0.0, |i| self.support[i].1)
    }

    /// `P(X <= t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        self.support.iter().take_while(|a| a.0 <= t).map(|a| a.1).sum()
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().map(|&(x, p)| x * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.support.iter().map(|&(x, p)| (x - m) * (x - m) * p).sum()
    }

    /// Applies `f` to every value; atoms that collide are merged.
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> ExactPmf {
        Self::from_atoms(self.support.iter().map(|&(x, p)| (f(x), p)))
    }

    /// Largest `|P(X=v) - P(Y=v)|` over the union of supports.
    pub fn max_atom_gap(&self, other: &ExactPmf) -> f64 {
        self.atom_diffs(other).into_iter().fold(0.0, f64::max)
    }

    pub fn tv_distance(&self, other: &ExactPmf) -> f64 {
        0.5 * self.atom_diffs(other).into_iter().sum::<f64>()
    }

    fn atom_diffs(&self, other: &ExactPmf) -> Vec<f64> {
        let (a, b) = (&self.support, &other.support);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(a.len().max(b.len()));
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.total_cmp(&y.0),
                (Some(_), None) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            match ord {
                std::cmp::Ordering::Less => {
                    out.push(a[i].1.abs());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].1.abs());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].1 - b[j].1).abs());
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }
}

const SCAN_CHUNK: u64 = 1 << 16;

/// Exact law of `stat(N_x)` for an arbitrary ordered key, by a full scan of
/// `n <= x`. Chunks are reduced in index order, so the result does not
/// depend on the thread count.
pub fn exact_distribution<K, F>(table: &WeightTable, spf: &SpfTable, stat: F) -> Result<BTreeMap<K, f64>>
where
    K: Ord + Send + Clone,
    F: Fn(&FactorProfile) -> K + Sync,
{
    let x = table.x();
    if x > spf.limit() {
        return Err(Error::OutOfRange {
            value: x,
            limit: spf.limit(),
        });
    }
    let chunks = x.div_ceil(SCAN_CHUNK);
    let partials: Vec<BTreeMap<K, NeumaierSum>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * SCAN_CHUNK + 1;
            let hi = ((c + 1) * SCAN_CHUNK).min(x);
            let mut map: BTreeMap<K, NeumaierSum> = BTreeMap::new();
            let mut prof = FactorProfile::one();
            for n in lo..=hi {
                let a = table.alpha(n);
                if a == 0.0 {
                    continue;
                }
                spf.factorize_into(n, &mut prof).expect("n within sieve range");
                map.entry(stat(&prof)).or_default().add(a);
            }
            map
        })
        .collect();
    let mut merged: BTreeMap<K, NeumaierSum> = BTreeMap::new();
    for part in &partials {
        for (k, s) in part {
            merged.entry(k.clone()).or_default().merge(s);
        }
    }
    let total = table.total();
    Ok(merged.into_iter().map(|(k, s)| (k, s.value() / total)).collect())
}

/// Exact pmf of an integer-valued statistic of `N_x`.
pub fn exact_pmf<F>(table: &WeightTable, spf: &SpfTable, stat: F) -> Result<ExactPmf>
where
    F: Fn(&FactorProfile) -> i64 + Sync,
{
    let dist = exact_distribution(table, spf, stat)?;
    Ok(ExactPmf::from_atoms(dist.into_iter().map(|(k, p)| (k as f64, p))))
}

/// `E f(N_x)` by a full scan.
pub fn exact_expectation<F>(table: &WeightTable, spf: &SpfTable, f: F) -> Result<f64>
where
    F: Fn(&FactorProfile) -> f64 + Sync,
{
    let x = table.x();
    if x > spf.limit() {
        return Err(Error::OutOfRange {
            value: x,
            limit: spf.limit(),
        });
    }
    let chunks = x.div_ceil(SCAN_CHUNK);
    let partials: Vec<NeumaierSum> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * SCAN_CHUNK + 1;
            let hi = ((c + 1) * SCAN_CHUNK).min(x);
            let mut acc = NeumaierSum::new();
            let mut prof = FactorProfile::one();
            for n in lo..=hi {
                let a = table.alpha(n);
                if a == 0.0 {
                    continue;
                }
                spf.factorize_into(n, &mut prof).expect("n within sieve range");
                acc.add(a * f(&prof));
            }
            acc
        })
        .collect();
    let mut acc = NeumaierSum::new();
    for p in &partials {
        acc.merge(p);
    }
    Ok(acc.value() / table.total())
}

/// Integer statistics of a factorization, selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `Omega(n)`, prime factors with multiplicity.
    BigOmega,
    /// `omega(n)`, distinct prime factors.
    SmallOmega,
    /// `nu_p(n)`.
    Nu(u64),
    /// `1{p_1(n) <= y}`.
    Smooth(u64),
    /// `n` itself.
    Identity,
}

impl Statistic {
    pub fn eval(&self, f: &FactorProfile) -> i64 {
        match *self {
            Statistic::BigOmega => f.big_omega() as i64,
            Statistic::SmallOmega => f.small_omega() as i64,
            Statistic::Nu(p) => f.nu(p) as i64,
            Statistic::Smooth(y) => (f.largest_prime() <= y) as i64,
            Statistic::Identity => f.n as i64,
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::BigOmega => write!(f, "big_omega"),
            Statistic::SmallOmega => write!(f, "small_omega"),
            Statistic::Nu(p) => write!(f, "nu:{p}"),
            Statistic::Smooth(y) => write!(f, "smooth:{y}"),
            Statistic::Identity => write!(f, "identity"),
        }
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.trim().split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s.trim(), None),
        };
        let num = |a: Option<&str>| -> Result<u64> {
            let a = a.ok_or_else(|| Error::Parse(format!("statistic `{name}` needs an argument")))?;
            crate::arith::parse_count(a)
        };
        match name {
            "big_omega" | "Omega" => Ok(Statistic::BigOmega),
            "small_omega" | "omega" => Ok(Statistic::SmallOmega),
            "nu" => Ok(Statistic::Nu(num(arg)?)),
            "smooth" => Ok(Statistic::Smooth(num(arg)?)),
            "identity" => Ok(Statistic::Identity),
            other => Err(Error::Parse(format!("unknown statistic `{other}`"))),
        }
    }
}

/// Picks a prime of `n` with probability `nu_p(n) log p / log n`.
pub fn size_biased_prime<R: Rng + ?Sized>(profile: &FactorProfile, rng: &mut R) -> Result<u64> {
    if profile.factors.is_empty() {
        return Err(Error::NoPrimeFactor);
    }
    let total = profile.log_sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for &(p, k) in &profile.factors {
        acc += k as f64 * (p as f64).ln();
        if u < acc {
            return Ok(p);
        }
    }
    Ok(profile.factors.last().unwrap().0)
}

/// `(log p_1(n)/log x, log p_2(n)/log x, ...)` with `p_1 >= p_2 >= ...`
/// repeated by multiplicity. Entries past `Omega(n)` are zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogPrimeSpectrum {
    pub n: u64,
    pub x: u64,
    pub ratios: Vec<f64>,
}

impl LogPrimeSpectrum {
    /// `k`-th entry, 1-based; zero past the last prime factor.
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.ratios.get(k - 1).copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.ratios.iter().sum()
    }
}

pub fn spectrum(profile: &FactorProfile, x: u64) -> Result<LogPrimeSpectrum> {
    if x < 2 {
        return Err(invalid("x", "must be >= 2"));
    }
    if profile.n > x {
        return Err(Error::OutOfRange {
            value: profile.n,
            limit: x,
        });
    }
    let lx = (x as f64).ln();
    let ratios = profile
        .primes_with_multiplicity_desc()
        .into_iter()
        .map(|p| (p as f64).ln() / lx)
        .collect();
    Ok(LogPrimeSpectrum {
        n: profile.n,
        x,
        ratios,
    })
}

/// Truncated limit law of `nu_p(N_x)` with the neglected mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitPmf {
    pub pmf: ExactPmf,
    /// Mass of `{k > kmax}` in the untruncated law.
    pub tail_mass: f64,
}

/// `P(X_p = k) = (sum_i alpha(p^i)/p^{i(d+1)})^{-1} alpha(p^k)/p^{k(d+1)}`
/// for `k <= kmax`.
pub fn nu_p_limit_pmf(w: &MultiplicativeWeight, p: u64, d: f64, kmax: u32) -> Result<LimitPmf> {
    const MAX_TERMS: u32 = 100_000;
    if p < 2 {
        return Err(invalid("p", "must be a prime >= 2"));
    }
    let lq = -(d + 1.0) * (p as f64).ln();
    let term = |k: u32| -> f64 {
        let a = w.prime_power_value(p, k);
        if a == 0.0 {
            0.0
        } else {
            (a.ln() + k as f64 * lq).exp()
        }
    };
    let mut head = Vec::with_capacity(kmax as usize + 1);
    let mut total = NeumaierSum::new();
    for k in 0..=kmax {
        let t = term(k);
        head.push(t);
        total.add(t);
    }
    let mut tail = NeumaierSum::new();
    let mut k = kmax + 1;
    let mut small_run = 0;
    loop {
        let t = term(k);
        if !t.is_finite() {
            return Err(Error::Divergent {
                what: format!("local factor of {} at p = {p}", w.name()),
            });
        }
        tail.add(t);
        if t <= 1e-18 * (total.value() + tail.value()) {
            small_run += 1;
            if small_run >= 8 {
                break;
            }
        } else {
            small_run = 0;
        }
        k += 1;
        if k > MAX_TERMS {
            return Err(Error::Divergent {
                what: format!("local factor of {} at p = {p}", w.name()),
            });
        }
    }
    let z = total.value() + tail.value();
    let pmf = ExactPmf {
        support: head
            .into_iter()
            .enumerate()
            .map(|(k, t)| (k as f64, t / z))
            .collect(),
    };
    Ok(LimitPmf {
        pmf,
        tail_mass: tail.value() / z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_spf;
    use crate::weights::{build_weight_table, builtin_weight};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn weight(s: &str) -> MultiplicativeWeight {
        builtin_weight(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn uniform_sampling_passes_chi_square() {
        let spf = build_spf(100).unwrap();
        let t = build_weight_table(&weight("power:0"), 100, &spf).unwrap();
        let s = WeightedIntegerSampler::new(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counts = [0u64; 101];
        let draws = 1_000_000;
        for _ in 0..draws {
            counts[s.sample(&mut rng) as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        let e = draws as f64 / 100.0;
        let chi2: f64 = counts[1..].iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // chi-square with 99 df: upper 0.001 quantile is 148.2.
        assert!(chi2 < 148.2, "chi2 = {chi2}");
    }

    #[test]
    fn point_mass_table_always_returns_its_atom() {
        let mut v = vec![0.0; 20];
        v[5] = 1.0;
        let t = WeightTable::from_values(&v).unwrap();
        let s = WeightedIntegerSampler::new(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!((0..10_000).all(|_| s.sample(&mut rng) == 6));
    }

    #[test]
    fn theta_omega_ratio_of_atoms() {
        let spf = build_spf(30).unwrap();
        let t = build_weight_table(&weight("theta_omega:2"), 30, &spf).unwrap();
        assert_eq!(t.alpha(2) / t.alpha(1), 2.0);
        let s = WeightedIntegerSampler::new(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (mut c1, mut c2) = (0u64, 0u64);
        for _ in 0..400_000 {
            match s.sample(&mut rng) {
                1 => c1 += 1,
                2 => c2 += 1,
                _ => {}
            }
        }
        let ratio = c2 as f64 / c1 as f64;
        assert!((ratio - 2.0).abs() < 0.15, "{ratio}");
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let spf = build_spf(1000).unwrap();
        let t = build_weight_table(&weight("divisor:2"), 1000, &spf).unwrap();
        let s = WeightedIntegerSampler::new(&t).unwrap();
        let a = s.sample_many(100, &mut ChaCha8Rng::seed_from_u64(9));
        let b = s.sample_many(100, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn exact_pmf_small_cases() {
        let spf = build_spf(8).unwrap();
        let one = weight("power:0");
        let t = build_weight_table(&one, 4, &spf).unwrap();
        let pmf = exact_pmf(&t, &spf, |f| f.big_omega() as i64).unwrap();
        assert_eq!(pmf.support, vec![(0.0, 0.25), (1.0, 0.5), (2.0, 0.25)]);
        let t = build_weight_table(&one, 8, &spf).unwrap();
        let pmf = exact_pmf(&t, &spf, |f| f.nu(2) as i64).unwrap();
        assert_eq!(pmf.support, vec![(0.0, 0.5), (1.0, 0.25), (2.0, 0.125), (3.0, 0.125)]);
    }

    #[test]
    fn empirical_law_matches_exact_identity_law() {
        let x = 100;
        let spf = build_spf(x).unwrap();
        let t = build_weight_table(&weight("theta_omega:2"), x, &spf).unwrap();
        let exact = exact_pmf(&t, &spf, |f| f.n as i64).unwrap();
        assert!((exact.total_mass() - 1.0).abs() < 1e-12);
        let s = WeightedIntegerSampler::new(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let emp = ExactPmf::empirical((0..1_000_000).map(|_| s.sample(&mut rng) as i64));
        let tv = emp.tv_distance(&exact);
        assert!(tv <= 0.01, "tv = {tv}");
    }

    #[test]
    fn exact_scan_matches_direct_sum() {
        let x = 300_000;
        let spf = build_spf(x).unwrap();
        let t = build_weight_table(&weight("divisor:1.5"), x, &spf).unwrap();
        let direct: f64 = (1..=x)
            .map(|n| t.alpha(n) * spf.factorize(n).unwrap().big_omega() as f64)
            .sum::<f64>()
            / t.total();
        let scanned = exact_expectation(&t, &spf, |f| f.big_omega() as f64).unwrap();
        assert!((direct - scanned).abs() < 1e-10 * direct);
        let pmf = exact_pmf(&t, &spf, |f| f.big_omega() as i64).unwrap();
        assert!((pmf.mean() - scanned).abs() < 1e-10 * scanned);
    }

    #[test]
    fn size_biased_prime_probabilities() {
        let spf = build_spf(100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = spf.factorize(97).unwrap();
        assert!((0..100).all(|_| size_biased_prime(&p, &mut rng).unwrap() == 97));
        assert_eq!(
            size_biased_prime(&spf.factorize(1).unwrap(), &mut rng),
            Err(Error::NoPrimeFactor)
        );
        for (n, expected2) in [(6u64, 2f64.ln() / 6f64.ln()), (12, 2.0 * 2f64.ln() / 12f64.ln())] {
            let f = spf.factorize(n).unwrap();
            let draws = 400_000;
            let twos = (0..draws)
                .filter(|_| size_biased_prime(&f, &mut rng).unwrap() == 2)
                .count();
            let freq = twos as f64 / draws as f64;
            assert!((freq - expected2).abs() < 0.005, "n={n}: {freq} vs {expected2}");
        }
    }

    #[test]
    fn spectra() {
        let spf = build_spf(100).unwrap();
        let s = spectrum(&spf.factorize(12).unwrap(), 12).unwrap();
        let l = 12f64.ln();
        assert_eq!(s.ratios, vec![3f64.ln() / l, 2f64.ln() / l, 2f64.ln() / l]);
        assert_eq!(s.get(4), 0.0);
        let s = spectrum(&spf.factorize(1).unwrap(), 50).unwrap();
        assert!(s.ratios.is_empty());
        assert_eq!(s.get(1), 0.0);
        let s = spectrum(&spf.factorize(97).unwrap(), 97).unwrap();
        assert_eq!(s.ratios, vec![1.0]);
        assert!(spectrum(&spf.factorize(50).unwrap(), 40).is_err());
    }

    #[test]
    fn spectrum_sums_to_log_ratio() {
        let spf = build_spf(100_000).unwrap();
        let x = 100_000u64;
        for n in (1..=x).step_by(7) {
            let s = spectrum(&spf.factorize(n).unwrap(), x).unwrap();
            let target = (n as f64).ln() / (x as f64).ln();
            assert!((s.sum() - target).abs() <= 1e-12);
            assert!(s.ratios.windows(2).all(|w| w[0] >= w[1]));
            assert!(s.ratios.iter().all(|&r| (0.0..=1.0).contains(&r)));
        }
    }

    #[test]
    fn limit_pmf_examples() {
        let lp = nu_p_limit_pmf(&weight("power:0"), 2, 0.0, 60).unwrap();
        for (k, &(v, p)) in lp.pmf.support.iter().enumerate() {
            assert_eq!(v, k as f64);
            assert!((p - 0.5f64.powi(k as i32 + 1)).abs() < 1e-15);
        }
        assert!(lp.tail_mass < 1e-12);

        let lp = nu_p_limit_pmf(&weight("powerfree:2"), 2, 0.0, 5).unwrap();
        assert!((lp.pmf.prob(0.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((lp.pmf.prob(1.0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(lp.pmf.prob(2.0), 0.0);
        assert_eq!(lp.tail_mass, 0.0);

        let lp = nu_p_limit_pmf(&weight("theta_omega:2"), 3, 0.0, 80).unwrap();
        assert!((lp.pmf.prob(0.0) - 0.5).abs() < 1e-15);
        assert!((lp.pmf.total_mass() + lp.tail_mass - 1.0).abs() < 1e-14);
    }

    #[test]
    fn limit_pmf_rejects_divergent_series() {
        let w = MultiplicativeWeight::custom(
            "p_cubed",
            crate::weights::Regime::Ewens { theta: 1.0, d: 0.0, r: 1.0 },
            |p, k| (p as f64).powi(2 * k as i32),
        );
        assert!(matches!(nu_p_limit_pmf(&w, 2, 0.0, 5), Err(Error::Divergent { .. })));
    }

    #[test]
    fn statistic_names_round_trip() {
        for s in [Statistic::BigOmega, Statistic::SmallOmega, Statistic::Nu(3), Statistic::Smooth(1000), Statistic::Identity] {
            assert_eq!(s.to_string().parse::<Statistic>().unwrap(), s);
        }
        assert!("nu".parse::<Statistic>().is_err());
    }

    #[test]
    fn pmf_distances() {
        let a = ExactPmf::from_atoms([(0.0, 0.5), (1.0, 0.5)]);
        let b = ExactPmf::from_atoms([(1.0, 0.25), (2.0, 0.75)]);
        assert!((a.tv_distance(&b) - 0.75).abs() < 1e-15);
        assert!((a.max_atom_gap(&b) - 0.75).abs() < 1e-15);
        assert_eq!(a.cdf(0.5), 0.5);
    }
}
