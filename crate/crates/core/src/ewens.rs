//! Ewens and generalized Ewens measures on the symmetric group.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::sampler::ExactPmf;

/// Cycle weights `theta_1, ..., theta_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleWeights {
    theta: Vec<f64>,
}

impl CycleWeights {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(invalid("theta", "need at least one weight"));
        }
        if theta.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
            return Err(invalid("theta", "weights must be finite and >= 0"));
        }
        if theta.iter().all(|&t| t == 0.0) {
            return Err(invalid("theta", "at least one weight must be positive"));
        }
        Ok(CycleWeights { theta })
    }

    pub fn constant(n: usize, theta: f64) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(invalid("theta", "must be > 0"));
        }
        Self::new(vec![theta; n])
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    /// `theta_i`, 1-based.
    pub fn get(&self, i: usize) -> f64 {
        self.theta[i - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    /// The constant value, if all weights agree.
    pub fn constant_value(&self) -> Option<f64> {
        let t = self.theta[0];
        self.theta.iter().all(|&v| v == t).then_some(t)
    }
}

/// `theta_i = Gamma(gamma + i + 1) / i!`, computed through log-gamma.
pub fn poly_weights(gamma: f64, n: usize) -> Result<CycleWeights> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid("gamma", "must be > 0"));
    }
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    let theta = (1..=n)
        .map(|i| {
            let i = i as f64;
            if gamma.fract() == 0.0 && gamma <= 16.0 {
                // (i+1)(i+2)...(i+gamma), exact for integer gamma.
                (1..=gamma as u32).map(|j| i + j as f64).product::<f64>()
            } else {
                (ln_gamma(gamma + i + 1.0) - ln_gamma(i + 1.0)).exp()
            }
        })
        .collect();
    CycleWeights::new(theta)
}

/// Multiset of cycle lengths, stored in nonincreasing order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CycleType {
    lengths: Vec<usize>,
}

impl CycleType {
    pub fn new(mut lengths: Vec<usize>) -> Result<Self> {
        if lengths.contains(&0) {
            return Err(invalid("lengths", "cycle lengths must be positive"));
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType { lengths })
    }

    /// Sorted nonincreasing: `lengths()[0]` is the longest cycle.
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn n(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// `C(pi)`, the number of cycles.
    pub fn count(&self) -> usize {
        self.lengths.len()
    }

    /// `C_i(pi)`, the number of cycles of length `i`.
    pub fn multiplicity(&self, i: usize) -> usize {
        self.lengths.iter().filter(|&&l| l == i).count()
    }

    pub fn longest(&self) -> usize {
        self.lengths.first().copied().unwrap_or(0)
    }
}

/// A sampled cycle type with the length of the cycle containing 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleSample {
    pub cycle_type: CycleType,
    pub l1: usize,
}

/// `h_0..h_n` kept as `H_m = h_m e^{-lambda m}` with a tilt chosen so that
/// the scaled values stay in floating-point range.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionFunctionTable {
    lambda: f64,
    scaled: Vec<f64>,
    theta_scaled: Vec<f64>,
}

const RESCALE_AT: f64 = 1e250;

/// `m h_m = sum_{k=1}^m theta_k h_{m-k}`, `h_0 = 1`.
pub fn partition_function(w: &CycleWeights) -> Result<PartitionFunctionTable> {
    let n = w.n();
    let mut lambda = 0.0;
    let mut theta_scaled = w.theta.clone();
    let mut scaled = Vec::with_capacity(n + 1);
    scaled.push(1.0);
    for m in 1..=n {
        let s = dot_reversed(&theta_scaled[..m], &scaled[..m]);
        let hm = s / m as f64;
        if !hm.is_finite() {
            return Err(Error::Overflow(format!("partition function at m = {m}")));
        }
        scaled.push(hm);
        if hm > RESCALE_AT || (hm > 0.0 && hm < 1.0 / RESCALE_AT) {
            let shift = hm.ln() / m as f64;
            lambda += shift;
            for (j, v) in scaled.iter_mut().enumerate() {
                *v *= (-shift * j as f64).exp();
            }
            for (k, v) in theta_scaled.iter_mut().enumerate() {
                *v *= (-shift * (k + 1) as f64).exp();
            }
        }
    }
    Ok(PartitionFunctionTable {
        lambda,
        scaled,
        theta_scaled,
    })
}

/// `sum_{k=1}^m theta[k-1] h[m-k]` with eight independent accumulators.
fn dot_reversed(theta: &[f64], h: &[f64]) -> f64 {
    let m = theta.len();
    let mut acc = [0.0f64; 8];
    let chunks = m / 8;
    for c in 0..chunks {
        let base = c * 8;
        for l in 0..8 {
            let k = base + l;
            acc[l] += theta[k] * h[m - 1 - k];
        }
    }
    let mut s = 0.0;
    for k in chunks * 8..m {
        s += theta[k] * h[m - 1 - k];
    }
    s + acc.iter().sum::<f64>()
}

impl PartitionFunctionTable {
    pub fn n(&self) -> usize {
        self.scaled.len() - 1
    }

    pub fn ln_h(&self, m: usize) -> f64 {
        self.scaled[m].ln() + self.lambda * m as f64
    }

    pub fn h(&self, m: usize) -> f64 {
        self.ln_h(m).exp()
    }

    /// `theta_k h_{m-k} / (m h_m)`: probability that the cycle through a
    /// given element of an `m`-set has length `k`.
    pub fn first_cycle_prob(&self, m: usize, k: usize) -> f64 {
        self.theta_scaled[k - 1] * self.scaled[m - k] / (m as f64 * self.scaled[m])
    }

    /// Largest relative residual of the defining recursion.
    pub fn recursion_residual(&self) -> f64 {
        (1..=self.n())
            .map(|m| {
                let rhs = dot_reversed(&self.theta_scaled[..m], &self.scaled[..m]);
                let lhs = m as f64 * self.scaled[m];
                if lhs == 0.0 && rhs == 0.0 {
                    0.0
                } else {
                    (lhs - rhs).abs() / lhs.abs().max(rhs.abs())
                }
            })
            .fold(0.0, f64::max)
    }

    /// Exact law of `L_1`, the length of the cycle containing 1.
    pub fn l1_pmf(&self) -> ExactPmf {
        let n = self.n();
        ExactPmf {
            support: (1..=n).map(|k| (k as f64, self.first_cycle_prob(n, k))).collect(),
        }
    }

    /// `E C_k = (theta_k / k) h_{n-k} / h_n`, summed over `k`.
    pub fn expected_cycles(&self) -> f64 {
        let n = self.n();
        (1..=n)
            .map(|k| n as f64 * self.first_cycle_prob(n, k) / k as f64)
            .sum()
    }
}

/// Draws a cycle type by repeatedly removing the cycle through the
/// smallest remaining element.
pub fn sample_cycle_type<R: Rng + ?Sized>(table: &PartitionFunctionTable, rng: &mut R) -> Result<CycleSample> {
    let n = table.n();
    if table.scaled[n] <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let mut m = n;
    let mut lengths = Vec::new();
    while m > 0 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = 0;
        for k in 1..=m {
            let p = table.first_cycle_prob(m, k);
            acc += p;
            if p > 0.0 {
                pick = k;
            }
            if u < acc {
                break;
            }
        }
        if pick == 0 {
            return Err(Error::ZeroMass);
        }
        lengths.push(pick);
        m -= pick;
    }
    let l1 = lengths[0];
    Ok(CycleSample {
        cycle_type: CycleType::new(lengths)?,
        l1,
    })
}

/// Chinese restaurant process: customer `i` opens a new table with
/// probability `theta / (theta + i - 1)`, otherwise sits next to a
/// uniformly chosen earlier customer.
pub fn ewens_crp<R: Rng + ?Sized>(n: usize, theta: f64, rng: &mut R) -> Result<CycleSample> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(invalid("theta", "must be > 0"));
    }
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    let mut table_of = Vec::with_capacity(n);
    let mut sizes: Vec<usize> = Vec::new();
    for i in 0..n {
        let open = rng.random::<f64>() * (theta + i as f64) < theta;
        let t = if open {
            sizes.push(0);
            sizes.len() - 1
        } else {
            table_of[rng.random_range(0..i)]
        };
        sizes[t] += 1;
        table_of.push(t);
    }
    let l1 = sizes[table_of[0]];
    Ok(CycleSample {
        cycle_type: CycleType::new(sizes)?,
        l1,
    })
}

/// Constant-`theta` sampler using the closed form
/// `P(L > k | m) = Gamma(m) Gamma(m-k+theta) / (Gamma(m-k) Gamma(m+theta))`
/// for the cycle through the smallest of `m` remaining elements.
pub fn ewens_sample_fast<R: Rng + ?Sized>(n: usize, theta: f64, rng: &mut R) -> Result<CycleSample> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(invalid("theta", "must be > 0"));
    }
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    let mut m = n;
    let mut lengths = Vec::new();
    while m > 0 {
        let mf = m as f64;
        let base = ln_gamma(mf) - ln_gamma(mf + theta);
        // ln P(L > k); -inf at k = m.
        let ln_surv = |k: usize| -> f64 {
            if k >= m {
                f64::NEG_INFINITY
            } else {
                let r = (m - k) as f64;
                base + ln_gamma(r + theta) - ln_gamma(r)
            }
        };
        let target = (1.0 - rng.random::<f64>()).ln();
        // Smallest k in 1..=m with ln P(L > k) < target.
        let (mut lo, mut hi) = (1usize, m);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if ln_surv(mid) < target {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lengths.push(lo);
        m -= lo;
    }
    let l1 = lengths[0];
    Ok(CycleSample {
        cycle_type: CycleType::new(lengths)?,
        l1,
    })
}

/// Exact law of `C` under Ewens(`theta`) on `S_n`: a sum of independent
/// Bernoulli(`theta / (theta + i - 1)`), `i = 1..n`. Atoms below `1e-300`
/// are dropped as the convolution proceeds.
pub fn cycle_count_pmf_constant(n: usize, theta: f64) -> Result<ExactPmf> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(invalid("theta", "must be > 0"));
    }
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    let mut offset = 0usize;
    let mut probs = vec![1.0f64];
    for i in 1..=n {
        let q = theta / (theta + (i - 1) as f64);
        let mut next = vec![0.0; probs.len() + 1];
        for (j, &p) in probs.iter().enumerate() {
            next[j] += p * (1.0 - q);
            next[j + 1] += p * q;
        }
        let first = next.iter().position(|&p| p > 1e-300).unwrap_or(0);
        let last = next.iter().rposition(|&p| p > 1e-300).unwrap_or(next.len() - 1);
        offset += first;
        probs = next[first..=last].to_vec();
    }
    Ok(ExactPmf {
        support: probs
            .into_iter()
            .enumerate()
            .map(|(j, p)| ((offset + j) as f64, p))
            .collect(),
    })
}

/// Exact laws on `S_n` under generalized Ewens weights.
#[derive(Debug, Clone, Serialize)]
pub struct SnEnumeration {
    pub n: usize,
    /// `h_n` recomputed from the definition.
    pub h_n: f64,
    pub cycle_types: BTreeMap<CycleType, f64>,
    /// Law of the length of the cycle containing 1.
    pub l1: ExactPmf,
    /// Law of the length of a cycle chosen with probability proportional to
    /// its length.
    pub size_biased: ExactPmf,
}

pub const MAX_PERMUTATION_N: usize = 8;
pub const MAX_PARTITION_N: usize = 20;

/// Exact laws by brute force. For `n <= 8` every permutation is visited and
/// `L_1` is read off each permutation; for `n <= 20` integer partitions are
/// weighted by their class sizes `n! / prod(i^{C_i} C_i!)`.
pub fn enumerate_sn(n: usize, w: &CycleWeights) -> Result<SnEnumeration> {
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    if w.n() < n {
        return Err(invalid("weights", "fewer weights than n"));
    }
    if n <= MAX_PERMUTATION_N {
        enumerate_permutations(n, w)
    } else {
        enumerate_partitions(n, w)
    }
}

fn finish(
    n: usize,
    h_n: f64,
    types: BTreeMap<CycleType, f64>,
    l1_mass: Vec<f64>,
    total: f64,
) -> Result<SnEnumeration> {
    if total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let cycle_types: BTreeMap<CycleType, f64> = types.into_iter().map(|(c, m)| (c, m / total)).collect();
    let mut sb = vec![0.0; n + 1];
    for (c, &p) in &cycle_types {
        for &l in c.lengths() {
            sb[l] += p * l as f64 / n as f64;
        }
    }
    let l1 = ExactPmf {
        support: (1..=n).map(|k| (k as f64, l1_mass[k] / total)).collect(),
    };
    let size_biased = ExactPmf {
        support: (1..=n).map(|k| (k as f64, sb[k])).collect(),
    };
    Ok(SnEnumeration {
        n,
        h_n,
        cycle_types,
        l1,
        size_biased,
    })
}

/// Visits all `n!` permutations (Heap's algorithm).
pub fn enumerate_permutations(n: usize, w: &CycleWeights) -> Result<SnEnumeration> {
    if n > MAX_PERMUTATION_N {
        return Err(Error::EnumerationTooLarge {
            n,
            max: MAX_PERMUTATION_N,
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut types: BTreeMap<CycleType, f64> = BTreeMap::new();
    let mut l1_mass = vec![0.0; n + 1];
    let mut total = 0.0;
    let mut visit = |perm: &[usize]| {
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        let mut weight = 1.0;
        let mut len_of_zero = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = perm[j];
                len += 1;
            }
            if start == 0 {
                len_of_zero = len;
            }
            weight *= w.get(len);
            lengths.push(len);
        }
        if weight > 0.0 {
            *types.entry(CycleType::new(lengths).expect("positive lengths")).or_default() += weight;
            l1_mass[len_of_zero] += weight;
            total += weight;
        }
    };
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let n_fact: f64 = (1..=n).map(|k| k as f64).product();
    finish(n, total / n_fact, types, l1_mass, total)
}

/// Sums over integer partitions of `n` with conjugacy-class sizes.
pub fn enumerate_partitions(n: usize, w: &CycleWeights) -> Result<SnEnumeration> {
    if n > MAX_PARTITION_N {
        return Err(Error::EnumerationTooLarge {
            n,
            max: MAX_PARTITION_N,
        });
    }
    let mut types: BTreeMap<CycleType, f64> = BTreeMap::new();
    let mut l1_mass = vec![0.0; n + 1];
    let mut total = 0.0;
    let mut parts = Vec::new();
    let mut emit = |parts: &[usize]| {
        // Class size / n! = 1 / prod(i^{C_i} C_i!).
        let mut ln_class = 0.0;
        let mut weight = 1.0;
        let mut i = 0;
        while i < parts.len() {
            let l = parts[i];
            let mut j = i;
            while j < parts.len() && parts[j] == l {
                j += 1;
            }
            let c = (j - i) as f64;
            ln_class -= c * (l as f64).ln() + ln_gamma(c + 1.0);
            weight *= w.get(l).powi((j - i) as i32);
            i = j;
        }
        let mass = weight * ln_class.exp();
        if mass > 0.0 {
            let ct = CycleType::new(parts.to_vec()).expect("positive lengths");
            for l in 1..=n {
                let cl = ct.multiplicity(l);
                if cl > 0 {
                    l1_mass[l] += mass * (l * cl) as f64 / n as f64;
                }
            }
            types.insert(ct, mass);
            total += mass;
        }
    };
    partitions_rec(n, n, &mut parts, &mut emit);
    finish(n, total, types, l1_mass, total)
}

fn partitions_rec<F: FnMut(&[usize])>(rest: usize, max: usize, parts: &mut Vec<usize>, emit: &mut F) {
    if rest == 0 {
        emit(parts);
        return;
    }
    for p in (1..=max.min(rest)).rev() {
        parts.push(p);
        partitions_rec(rest - p, p, parts, emit);
        parts.pop();
    }
}

/// Writes `index,lengths` rows with space-separated nonincreasing lengths.
pub fn write_cycle_types_csv<W: Write>(samples: &[CycleType], mut w: W) -> std::io::Result<()> {
    writeln!(w, "index,lengths")?;
    for (i, c) in samples.iter().enumerate() {
        let ls: Vec<String> = c.lengths().iter().map(|l| l.to_string()).collect();
        writeln!(w, "{i},{}", ls.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_laws::tv_distance_maps;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binom_real(n: usize, theta: f64) -> f64 {
        // binom(n + theta - 1, n)
        (ln_gamma(n as f64 + theta) - ln_gamma(theta) - ln_gamma(n as f64 + 1.0)).exp()
    }

    #[test]
    fn partition_function_examples() {
        let t = partition_function(&CycleWeights::constant(10, 1.0).unwrap()).unwrap();
        for m in 0..=10 {
            assert!((t.h(m) - 1.0).abs() < 1e-14);
        }
        let t = partition_function(&CycleWeights::constant(3, 2.0).unwrap()).unwrap();
        assert!((t.h(3) - 4.0).abs() < 1e-14);
        let t = partition_function(&poly_weights(1.0, 2).unwrap()).unwrap();
        assert!((t.h(2) - 3.5).abs() < 1e-14);
    }

    #[test]
    fn partition_function_constant_theta_is_binomial() {
        for theta in [0.5, 1.0, 2.0] {
            let t = partition_function(&CycleWeights::constant(50, theta).unwrap()).unwrap();
            for n in 0..=50 {
                let b = binom_real(n, theta);
                assert!((t.h(n) / b - 1.0).abs() < 1e-10, "theta {theta}, n {n}");
            }
            assert!(t.recursion_residual() < 1e-12);
        }
    }

    #[test]
    fn tilt_keeps_large_tables_finite() {
        let w = poly_weights(3.0, 3000).unwrap();
        let t = partition_function(&w).unwrap();
        assert!(t.ln_h(3000).is_finite() && t.ln_h(3000) > 700.0);
        assert!(t.recursion_residual() < 1e-12);
        let total: f64 = t.l1_pmf().total_mass();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn poly_weight_values() {
        let w = poly_weights(1.0, 5).unwrap();
        assert_eq!(w.as_slice(), &[2.0, 3.0, 4.0, 5.0, 6.0]);
        let w = poly_weights(2.0, 4).unwrap();
        assert_eq!(w.as_slice(), &[6.0, 12.0, 20.0, 30.0]);
        let w = poly_weights(1.5, 1000).unwrap();
        assert!((w.get(1000) / 1000f64.powf(1.5) - 1.0).abs() < 0.01);
        let w = poly_weights(0.5, 3).unwrap();
        assert!((w.get(1) - (ln_gamma(2.5) - ln_gamma(2.0)).exp()).abs() < 1e-14);
    }

    #[test]
    fn enumeration_small_cases() {
        let e = enumerate_sn(3, &CycleWeights::constant(3, 1.0).unwrap()).unwrap();
        for k in 1..=3 {
            assert!((e.l1.prob(k as f64) - 1.0 / 3.0).abs() < 1e-15);
        }
        let e = enumerate_sn(2, &CycleWeights::constant(2, 2.0).unwrap()).unwrap();
        let fixed = CycleType::new(vec![1, 1]).unwrap();
        assert!((e.cycle_types[&fixed] - 2.0 / 3.0).abs() < 1e-15);
        assert!(enumerate_partitions(21, &CycleWeights::constant(21, 1.0).unwrap()).is_err());
        assert!(enumerate_permutations(9, &CycleWeights::constant(9, 1.0).unwrap()).is_err());
    }

    #[test]
    fn stirling_law_of_cycle_count() {
        // |s(7, k)| for k = 1..7.
        let stirling = [720.0, 1764.0, 1624.0, 735.0, 175.0, 21.0, 1.0];
        let e = enumerate_sn(7, &CycleWeights::constant(7, 1.0).unwrap()).unwrap();
        let mut by_count = [0.0; 8];
        for (c, p) in &e.cycle_types {
            by_count[c.count()] += p;
        }
        for k in 1..=7 {
            assert!((by_count[k] - stirling[k - 1] / 5040.0).abs() < 1e-15);
        }
        let pmf = cycle_count_pmf_constant(7, 1.0).unwrap();
        for k in 1..=7 {
            assert!((pmf.prob(k as f64) - stirling[k - 1] / 5040.0).abs() < 1e-15);
        }
    }

    #[test]
    fn permutation_and_partition_routes_agree() {
        for w in [
            CycleWeights::constant(8, 0.5).unwrap(),
            poly_weights(1.0, 8).unwrap(),
            CycleWeights::new(vec![0.0, 1.0, 3.0, 0.0, 2.0, 1.0, 1.0, 4.0]).unwrap(),
        ] {
            for n in 2..=8 {
                let a = enumerate_permutations(n, &w).unwrap();
                let b = enumerate_partitions(n, &w).unwrap();
                assert!((a.h_n / b.h_n - 1.0).abs() < 1e-12);
                assert!(tv_distance_maps(&a.cycle_types, &b.cycle_types) < 1e-13);
                assert!(a.l1.max_atom_gap(&b.l1) < 1e-13);
                let t = partition_function(&CycleWeights::new(w.as_slice()[..n].to_vec()).unwrap()).unwrap();
                assert!((t.h(n) / a.h_n - 1.0).abs() < 1e-12);
                assert!(t.l1_pmf().max_atom_gap(&a.l1) < 1e-13);
            }
        }
    }

    #[test]
    fn expected_cycles_is_harmonic() {
        for n in 1..=8 {
            let e = enumerate_sn(n, &CycleWeights::constant(n, 1.0).unwrap()).unwrap();
            let mean: f64 = e.cycle_types.iter().map(|(c, p)| c.count() as f64 * p).sum();
            let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
            assert!((mean - h).abs() < 1e-13);
            let t = partition_function(&CycleWeights::constant(n, 1.0).unwrap()).unwrap();
            assert!((t.expected_cycles() - h).abs() < 1e-13);
        }
    }

    fn empirical_types<F: FnMut() -> CycleSample>(draws: usize, mut f: F) -> BTreeMap<CycleType, f64> {
        let mut m: BTreeMap<CycleType, f64> = BTreeMap::new();
        for _ in 0..draws {
            *m.entry(f().cycle_type).or_default() += 1.0 / draws as f64;
        }
        m
    }

    #[test]
    fn samplers_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 6;
        let w = CycleWeights::constant(n, 2.0).unwrap();
        let exact = enumerate_sn(n, &w).unwrap().cycle_types;
        let t = partition_function(&w).unwrap();
        let draws = 200_000;
        let seq = empirical_types(draws, || sample_cycle_type(&t, &mut rng).unwrap());
        let crp = empirical_types(draws, || ewens_crp(n, 2.0, &mut rng).unwrap());
        let fast = empirical_types(draws, || ewens_sample_fast(n, 2.0, &mut rng).unwrap());
        for emp in [&seq, &crp, &fast] {
            let tv = tv_distance_maps(emp, &exact);
            assert!(tv < 0.01, "{tv}");
        }
    }

    #[test]
    fn first_cycle_uniform_for_unit_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let t = partition_function(&CycleWeights::constant(5, 1.0).unwrap()).unwrap();
        let mut counts = [0usize; 6];
        let draws = 100_000;
        for _ in 0..draws {
            counts[sample_cycle_type(&t, &mut rng).unwrap().l1] += 1;
        }
        for &c in &counts[1..] {
            assert!((c as f64 / draws as f64 - 0.2).abs() < 0.006);
        }
        let one = partition_function(&CycleWeights::constant(1, 3.0).unwrap()).unwrap();
        let s = sample_cycle_type(&one, &mut rng).unwrap();
        assert_eq!(s.cycle_type.lengths(), &[1]);
    }

    #[test]
    fn zero_weights_are_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let w = CycleWeights::new(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let t = partition_function(&w).unwrap();
        for _ in 0..1000 {
            let s = sample_cycle_type(&t, &mut rng).unwrap();
            assert!(s.cycle_type.lengths().iter().all(|&l| l == 2 || l == 4));
        }
        let odd = partition_function(&CycleWeights::new(vec![0.0, 1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(odd.h(3), 0.0);
        assert_eq!(sample_cycle_type(&odd, &mut rng), Err(Error::ZeroMass));
    }

    #[test]
    fn large_theta_gives_fixed_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let s = ewens_crp(50, 1e9, &mut rng).unwrap();
        assert_eq!(s.cycle_type.count(), 50);
    }

    #[test]
    fn cycle_type_accessors() {
        let c = CycleType::new(vec![1, 3, 1, 2]).unwrap();
        assert_eq!(c.lengths(), &[3, 2, 1, 1]);
        assert_eq!((c.n(), c.count(), c.multiplicity(1), c.longest()), (7, 4, 2, 3));
        assert!(CycleType::new(vec![0]).is_err());
        let mut buf = Vec::new();
        write_cycle_types_csv(&[c], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "index,lengths\n0,3 2 1 1\n");
    }
}
