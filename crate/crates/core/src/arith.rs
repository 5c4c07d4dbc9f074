//! Smallest-prime-factor sieve and factorization.
//!
//! Every integer `2 <= n <= limit` is factorized in `O(log n)` by repeated
//! division through the table. Entries are stored as `u32`, so a table costs
//! four bytes per integer; the default ceiling of `10^8` entries is about
//! 400 MB.

use serde::Serialize;

use crate::error::{Error, Result};

/// Width in bytes of one sieve entry.
pub const SPF_ENTRY_BYTES: usize = std::mem::size_of::<u32>();

/// Default ceiling on table entries.
pub const DEFAULT_MAX_ENTRIES: u64 = 100_000_000;

/// Environment variable overriding [`DEFAULT_MAX_ENTRIES`].
pub const MAX_ENTRIES_ENV: &str = "ANATOMY_MAX_ENTRIES";

/// Upper bound on the number of entries a table may allocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget {
    pub max_entries: u64,
}

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget {
            max_entries: DEFAULT_MAX_ENTRIES,
        }
    }
}

impl MemoryBudget {
    pub fn new(max_entries: u64) -> Self {
        MemoryBudget { max_entries }
    }

    /// Reads `ANATOMY_MAX_ENTRIES`, falling back to the default. Accepts
    /// plain integers and scientific notation such as `1e9`.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_ENTRIES_ENV) {
            Ok(v) => Ok(MemoryBudget::new(parse_count(&v)?)),
            Err(_) => Ok(MemoryBudget::default()),
        }
    }

    pub fn check(&self, requested: u64) -> Result<()> {
        if requested > self.max_entries {
            Err(Error::Capacity {
                requested,
                budget: self.max_entries,
            })
        } else {
            Ok(())
        }
    }
}

/// Parses a positive integer written either plainly or as `1e7`.
pub fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim().replace('_', "");
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("not a count: `{s}`")))?;
    if !(f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f < 1.8e19) {
        return Err(Error::Parse(format!("not a count: `{s}`")));
    }
    Ok(f as u64)
}

/// Smallest prime factor of every `n <= limit`, plus the list of primes.
#[derive(Debug, Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

/// Builds the table with a linear sieve under the default (environment) budget.
pub fn build_spf(x: u64) -> Result<SpfTable> {
    SpfTable::with_budget(x, MemoryBudget::from_env()?)
}

impl SpfTable {
    pub fn new(x: u64) -> Result<Self> {
        build_spf(x)
    }

    pub fn with_budget(x: u64, budget: MemoryBudget) -> Result<Self> {
        if x < 2 {
            return Err(crate::error::invalid("x", format!("sieve limit must be >= 2, got {x}")));
        }
        if x > u32::MAX as u64 {
            return Err(Error::Capacity {
                requested: x,
                budget: u32::MAX as u64,
            });
        }
        budget.check(x + 1)?;
        let n = x as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::with_capacity(estimate_prime_count(x));
        if n >= 1 {
            spf[1] = 1;
        }
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(SpfTable {
            limit: x,
            spf,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n` (`2 <= n <= limit`).
    #[inline]
    pub fn spf(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    /// All primes up to the limit, increasing.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn prime_count(&self) -> usize {
        self.primes.len()
    }

    /// Primes `p` with `a <= p <= b`, increasing.
    pub fn primes_in(&self, a: u64, b: u64) -> Result<&[u32]> {
        if b > self.limit {
            return Err(Error::OutOfRange {
                value: b,
                limit: self.limit,
            });
        }
        if a > b {
            return Ok(&[]);
        }
        let lo = self.primes.partition_point(|&p| (p as u64) < a);
        let hi = self.primes.partition_point(|&p| (p as u64) <= b);
        Ok(&self.primes[lo..hi])
    }

    pub fn factorize(&self, n: u64) -> Result<FactorProfile> {
        let mut out = FactorProfile::one();
        self.factorize_into(n, &mut out)?;
        Ok(out)
    }

    /// Factorizes into an existing profile, reusing its allocation.
    pub fn factorize_into(&self, n: u64, out: &mut FactorProfile) -> Result<()> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange {
                value: n,
                limit: self.limit,
            });
        }
        out.n = n;
        out.factors.clear();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m];
            let mut k = 0u32;
            while m.is_multiple_of(p as usize) {
                m /= p as usize;
                k += 1;
            }
            out.factors.push((p as u64, k));
        }
        Ok(())
    }
}

/// Free-function form of [`SpfTable::factorize`].
pub fn factorize(n: u64, t: &SpfTable) -> Result<FactorProfile> {
    t.factorize(n)
}

/// Free-function form of [`SpfTable::primes_in`].
pub fn primes_in(a: u64, b: u64, t: &SpfTable) -> Result<Vec<u64>> {
    Ok(t.primes_in(a, b)?.iter().map(|&p| p as u64).collect())
}

fn estimate_prime_count(x: u64) -> usize {
    if x < 17 {
        return 8;
    }
    let xf = x as f64;
    (1.26 * xf / xf.ln()) as usize
}

/// Prime factorization of one integer: `(p, nu_p(n))` with increasing `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorProfile {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl FactorProfile {
    pub fn one() -> Self {
        FactorProfile {
            n: 1,
            factors: Vec::with_capacity(12),
        }
    }

    /// Number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, k)| k).sum()
    }

    /// Number of distinct prime factors.
    pub fn small_omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// Exponent of `p` in `n`.
    pub fn nu(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, k)| k)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, k)| k == 1)
    }

    /// Largest prime factor, or 1 for `n = 1`.
    pub fn largest_prime(&self) -> u64 {
        self.factors.last().map_or(1, |&(p, _)| p)
    }

    /// `sum nu_p * log p`, which equals `log n`.
    pub fn log_sum(&self) -> f64 {
        self.factors
            .iter()
            .map(|&(p, k)| k as f64 * (p as f64).ln())
            .sum()
    }

    /// Product of `p^nu` over the entries.
    pub fn recompose(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, k)| acc * p.pow(k))
    }

    /// Prime factors repeated by multiplicity, in nonincreasing order.
    pub fn primes_with_multiplicity_desc(&self) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.big_omega() as usize);
        for &(p, k) in self.factors.iter().rev() {
            for _ in 0..k {
                v.push(p);
            }
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn spf_of_small_numbers() {
        let t = build_spf(10).unwrap();
        let got: Vec<u64> = (2..=10).map(|n| t.spf(n)).collect();
        assert_eq!(got, vec![2, 3, 2, 5, 2, 7, 2, 3, 2]);
        let t = build_spf(2).unwrap();
        assert_eq!(t.spf(2), 2);
    }

    #[test]
    fn prime_count_to_a_million_matches_trial_division() {
        let t = build_spf(1_000_000).unwrap();
        let fixed = (2..=t.limit()).filter(|&n| t.spf(n) == n).count();
        // Trial-division oracle, odd candidates only.
        let oracle = 1 + (3..=1_000_000u64)
            .step_by(2)
            .filter(|&n| trial_is_prime(n))
            .count();
        assert_eq!(oracle, 78498);
        assert_eq!(fixed, oracle);
        assert_eq!(t.primes_in(1, 1_000_000).unwrap().len(), 78498);
    }

    #[test]
    fn spf_is_a_prime_divisor() {
        let t = build_spf(20_000).unwrap();
        for n in 2..=20_000 {
            let p = t.spf(n);
            assert_eq!(n % p, 0);
            assert!(trial_is_prime(p));
            assert_eq!(p == n, trial_is_prime(n));
        }
    }

    #[test]
    fn factorization_examples() {
        let t = build_spf(10_000_000).unwrap();
        let f = t.factorize(12).unwrap();
        assert_eq!(f.factors, vec![(2, 2), (3, 1)]);
        assert_eq!((f.big_omega(), f.small_omega()), (3, 2));

        let one = t.factorize(1).unwrap();
        assert!(one.factors.is_empty());
        assert_eq!(one.big_omega(), 0);
        assert_eq!(one.largest_prime(), 1);

        let f = t.factorize(9_699_690).unwrap();
        let primes: Vec<(u64, u32)> = [2, 3, 5, 7, 11, 13, 17, 19].iter().map(|&p| (p, 1)).collect();
        assert_eq!(f.factors, primes);
    }

    #[test]
    fn factorization_errors_out_of_range() {
        let t = build_spf(100).unwrap();
        assert!(matches!(t.factorize(0), Err(Error::OutOfRange { .. })));
        assert!(matches!(t.factorize(101), Err(Error::OutOfRange { .. })));
        assert!(t.primes_in(1, 101).is_err());
    }

    #[test]
    fn primes_in_intervals() {
        let t = build_spf(100).unwrap();
        assert_eq!(primes_in(1, 10, &t).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(primes_in(90, 100, &t).unwrap(), vec![97]);
        assert!(primes_in(24, 28, &t).unwrap().is_empty());
        assert!(primes_in(50, 40, &t).unwrap().is_empty());
    }

    #[test]
    fn exhaustive_recomposition_and_log_identity() {
        let t = build_spf(100_000).unwrap();
        let mut prof = FactorProfile::one();
        for n in 1..=100_000u64 {
            t.factorize_into(n, &mut prof).unwrap();
            assert_eq!(prof.recompose(), n);
            assert!(prof.factors.windows(2).all(|w| w[0].0 < w[1].0));
            let ln = (n as f64).ln();
            assert!((prof.log_sum() - ln).abs() <= 1e-12 * ln.max(1.0));
        }
    }

    #[test]
    fn omega_equality_iff_squarefree() {
        let t = build_spf(10_000).unwrap();
        for n in 1..=10_000u64 {
            let f = t.factorize(n).unwrap();
            assert!(f.big_omega() >= f.small_omega());
            let direct_squarefree = (2..=100u64).all(|d| n % (d * d) != 0);
            assert_eq!(f.big_omega() == f.small_omega(), direct_squarefree, "n = {n}");
            assert_eq!(f.is_squarefree(), direct_squarefree);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = SpfTable::with_budget(1000, MemoryBudget::new(500)).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        assert!(SpfTable::with_budget(1, MemoryBudget::default()).is_err());
    }

    #[test]
    fn counts_parse_scientific_notation() {
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_count("12345").unwrap(), 12345);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("abc").is_err());
    }
}
