//! Multiplicative weight functions and their dense tables.
//!
//! A weight is determined by its values on prime powers; `alpha(1) = 1`.
//! Tables are sieved by walking prime powers and multiplying `alpha(p^k)`
//! into every multiple of `p^k` that is not a multiple of `p^{k+1}`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{MemoryBudget, SpfTable};
use crate::error::{invalid, Error, Result};
use crate::numeric::NeumaierSum;

/// Parameters under which the limit theorems apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    /// `sum_{p<=x} alpha(p) log p / p^d ~ theta x` and `alpha(p^k)/p^{dk} = O(r^k)`.
    Ewens { theta: f64, d: f64, r: f64 },
    /// `alpha(p) = K log^gamma p` with a small prime-power tail.
    Poly { k: f64, gamma: f64 },
}

impl Regime {
    pub fn theta(&self) -> Option<f64> {
        match *self {
            Regime::Ewens { theta, .. } => Some(theta),
            Regime::Poly { .. } => None,
        }
    }

    /// The exponent `d` (zero in the polynomial regime).
    pub fn d(&self) -> f64 {
        match *self {
            Regime::Ewens { d, .. } => d,
            Regime::Poly { .. } => 0.0,
        }
    }
}

/// Values of a `poly_log` weight on `p^k`, `k >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PolyTail {
    #[default]
    Zero,
    /// `alpha(p^k) = c` for every `k >= 2`.
    Constant(f64),
}

/// Serializable description of a catalog weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    /// `theta^{omega(n)}`.
    ThetaOmega { theta: f64 },
    /// Real-order divisor function `d_k`.
    Divisor { k: f64 },
    /// Indicator of `k`-th-power-free integers.
    Powerfree { k: u32 },
    /// `phi(n)/n`.
    EulerRatio,
    /// `sigma_z(n) = sum_{d|n} d^z`.
    Sigma { z: f64 },
    /// `n^z`.
    Power { z: f64 },
    /// `alpha(p) = K log^gamma p`.
    PolyLog {
        #[serde(alias = "K")]
        k: f64,
        gamma: f64,
        #[serde(default)]
        tail: PolyTail,
    },
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::ThetaOmega { theta } => write!(f, "theta_omega:{theta}"),
            WeightSpec::Divisor { k } => write!(f, "divisor:{k}"),
            WeightSpec::Powerfree { k } => write!(f, "powerfree:{k}"),
            WeightSpec::EulerRatio => write!(f, "euler_ratio"),
            WeightSpec::Sigma { z } => write!(f, "sigma:{z}"),
            WeightSpec::Power { z } => write!(f, "power:{z}"),
            WeightSpec::PolyLog { k, gamma, tail } => match tail {
                PolyTail::Zero => write!(f, "poly_log:{k},{gamma}"),
                PolyTail::Constant(c) => write!(f, "poly_log:{k},{gamma},{c}"),
            },
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    /// Parses the compact CLI form, e.g. `theta_omega:2` or `poly_log:1,1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, a),
            None => (s, ""),
        };
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number `{a}` in weight `{s}`")))
                })
                .collect::<Result<_>>()?
        };
        let arity = |n: usize| -> Result<()> {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("weight `{name}` takes {n} argument(s): `{s}`")))
            }
        };
        let spec = match name {
            "theta_omega" => {
                arity(1)?;
                WeightSpec::ThetaOmega { theta: nums[0] }
            }
            "divisor" => {
                arity(1)?;
                WeightSpec::Divisor { k: nums[0] }
            }
            "powerfree" => {
                arity(1)?;
                if nums[0].fract() != 0.0 || nums[0] < 0.0 {
                    return Err(Error::Parse(format!("powerfree order must be an integer: `{s}`")));
                }
                WeightSpec::Powerfree { k: nums[0] as u32 }
            }
            "euler_ratio" => {
                arity(0)?;
                WeightSpec::EulerRatio
            }
            "sigma" => {
                arity(1)?;
                WeightSpec::Sigma { z: nums[0] }
            }
            "power" => {
                arity(1)?;
                WeightSpec::Power { z: nums[0] }
            }
            "poly_log" => match nums.len() {
                2 => WeightSpec::PolyLog {
                    k: nums[0],
                    gamma: nums[1],
                    tail: PolyTail::Zero,
                },
                3 => WeightSpec::PolyLog {
                    k: nums[0],
                    gamma: nums[1],
                    tail: PolyTail::Constant(nums[2]),
                },
                _ => return Err(Error::Parse(format!("poly_log takes K,gamma[,tail]: `{s}`"))),
            },
            other => return Err(Error::Parse(format!("unknown weight kind `{other}`"))),
        };
        Ok(spec)
    }
}

type CustomFn = dyn Fn(u64, u32) -> f64 + Send + Sync;

#[derive(Clone)]
enum Kind {
    Spec(WeightSpec),
    Custom(Arc<CustomFn>),
}

/// A multiplicative function given by its values on prime powers.
#[derive(Clone)]
pub struct MultiplicativeWeight {
    name: String,
    kind: Kind,
    regime: Regime,
}

impl fmt::Debug for MultiplicativeWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicativeWeight")
            .field("name", &self.name)
            .field("regime", &self.regime)
            .finish()
    }
}

/// Validates a catalog spec and attaches its regime parameters.
pub fn builtin_weight(spec: &WeightSpec) -> Result<MultiplicativeWeight> {
    let finite = |name: &'static str, v: f64| {
        if v.is_finite() {
            Ok(())
        } else {
            Err(invalid(name, "must be finite"))
        }
    };
    let regime = match *spec {
        WeightSpec::ThetaOmega { theta } => {
            finite("theta", theta)?;
            if theta <= 0.0 {
                return Err(invalid("theta", format!("must be > 0, got {theta}")));
            }
            Regime::Ewens { theta, d: 0.0, r: 1.0 }
        }
        WeightSpec::Divisor { k } => {
            finite("k", k)?;
            if k <= 0.0 {
                return Err(invalid("k", format!("divisor order must be > 0, got {k}")));
            }
            // d_k(p^i) grows polynomially in i, so any r > 1 works.
            let r = if k > 1.0 { 1.25 } else { 1.0 };
            Regime::Ewens { theta: k, d: 0.0, r }
        }
        WeightSpec::Powerfree { k } => {
            if k < 2 {
                return Err(invalid("k", format!("powerfree order must be >= 2, got {k}")));
            }
            Regime::Ewens { theta: 1.0, d: 0.0, r: 1.0 }
        }
        WeightSpec::EulerRatio => Regime::Ewens { theta: 1.0, d: 0.0, r: 1.0 },
        WeightSpec::Sigma { z } => {
            finite("z", z)?;
            if z > 0.0 {
                Regime::Ewens { theta: 1.0, d: z, r: 1.0 }
            } else if z == 0.0 {
                // sigma_0 is the divisor function.
                Regime::Ewens { theta: 2.0, d: 0.0, r: 1.25 }
            } else {
                Regime::Ewens { theta: 1.0, d: 0.0, r: 1.0 }
            }
        }
        WeightSpec::Power { z } => {
            finite("z", z)?;
            if z <= -1.0 {
                return Err(invalid("z", format!("must be > -1, got {z}")));
            }
            Regime::Ewens { theta: 1.0, d: z, r: 1.0 }
        }
        WeightSpec::PolyLog { k, gamma, tail } => {
            finite("K", k)?;
            finite("gamma", gamma)?;
            if k <= 0.0 {
                return Err(invalid("K", format!("must be > 0, got {k}")));
            }
            if gamma <= 0.0 {
                return Err(invalid("gamma", format!("must be > 0, got {gamma}")));
            }
            if let PolyTail::Constant(c) = tail {
                if !(c.is_finite() && c >= 0.0) {
                    return Err(invalid("tail", format!("must be finite and >= 0, got {c}")));
                }
            }
            Regime::Poly { k, gamma }
        }
    };
    Ok(MultiplicativeWeight {
        name: spec.to_string(),
        kind: Kind::Spec(spec.clone()),
        regime,
    })
}

/// Representative parameters for every catalog kind.
pub fn catalog() -> Vec<WeightSpec> {
    vec![
        WeightSpec::ThetaOmega { theta: 2.0 },
        WeightSpec::ThetaOmega { theta: 0.5 },
        WeightSpec::Divisor { k: 2.0 },
        WeightSpec::Divisor { k: std::f64::consts::SQRT_2 },
        WeightSpec::Powerfree { k: 2 },
        WeightSpec::Powerfree { k: 3 },
        WeightSpec::EulerRatio,
        WeightSpec::Sigma { z: 1.0 },
        WeightSpec::Sigma { z: 0.0 },
        WeightSpec::Sigma { z: -0.5 },
        WeightSpec::Power { z: 0.0 },
        WeightSpec::Power { z: 0.5 },
        WeightSpec::PolyLog {
            k: 1.0,
            gamma: 1.0,
            tail: PolyTail::Zero,
        },
        WeightSpec::PolyLog {
            k: 2.0,
            gamma: 0.5,
            tail: PolyTail::Constant(1.0),
        },
    ]
}

impl MultiplicativeWeight {
    /// Weight from an arbitrary prime-power rule. The rule is called with
    /// `k >= 1` only and must return nonnegative values.
    pub fn custom<F>(name: impl Into<String>, regime: Regime, f: F) -> Self
    where
        F: Fn(u64, u32) -> f64 + Send + Sync + 'static,
    {
        MultiplicativeWeight {
            name: name.into(),
            kind: Kind::Custom(Arc::new(f)),
            regime,
        }
    }

    pub fn from_spec(spec: &WeightSpec) -> Result<Self> {
        builtin_weight(spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn spec(&self) -> Option<&WeightSpec> {
        match &self.kind {
            Kind::Spec(s) => Some(s),
            Kind::Custom(_) => None,
        }
    }

    /// `(theta, d)` in the Ewens regime.
    pub fn ewens_params(&self) -> Result<(f64, f64)> {
        match self.regime {
            Regime::Ewens { theta, d, .. } => Ok((theta, d)),
            Regime::Poly { .. } => Err(Error::WrongRegime(self.name.clone())),
        }
    }

    /// `alpha(p^k)`; `k = 0` gives 1.
    pub fn prime_power_value(&self, p: u64, k: u32) -> f64 {
        if k == 0 {
            return 1.0;
        }
        match &self.kind {
            Kind::Custom(f) => f(p, k),
            Kind::Spec(spec) => {
                let pf = p as f64;
                match *spec {
                    WeightSpec::ThetaOmega { theta } => theta,
                    WeightSpec::Divisor { k: order } => divisor_prime_power(order, k),
                    WeightSpec::Powerfree { k: order } => {
                        if k < order {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    WeightSpec::EulerRatio => 1.0 - 1.0 / pf,
                    WeightSpec::Sigma { z } => {
                        if z == 0.0 {
                            (k + 1) as f64
                        } else {
                            let q = pf.powf(z);
                            let mut s = 1.0;
                            let mut t = 1.0;
                            for _ in 0..k {
                                t *= q;
                                s += t;
                            }
                            s
                        }
                    }
                    WeightSpec::Power { z } => pf.powf(z * k as f64),
                    WeightSpec::PolyLog { k: coef, gamma, tail } => {
                        if k == 1 {
                            coef * pf.ln().powf(gamma)
                        } else {
                            match tail {
                                PolyTail::Zero => 0.0,
                                PolyTail::Constant(c) => c,
                            }
                        }
                    }
                }
            }
        }
    }

    /// `ln alpha(p^k)`, evaluated without overflow where the closed form
    /// allows it. Returns `-inf` for zero values.
    pub fn ln_prime_power_value(&self, p: u64, k: u32) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let lp = (p as f64).ln();
        match &self.kind {
            Kind::Spec(WeightSpec::Power { z }) => z * k as f64 * lp,
            Kind::Spec(WeightSpec::Sigma { z }) if *z > 0.0 => {
                // sigma_z(p^k) = p^{kz} sum_{j<=k} p^{-jz}
                let q = (-z * lp).exp();
                let mut s = 1.0;
                let mut t = 1.0;
                for _ in 0..k {
                    t *= q;
                    s += t;
                }
                z * k as f64 * lp + s.ln()
            }
            Kind::Spec(WeightSpec::Divisor { k: order }) => ln_binomial_upper(*order, k),
            _ => self.prime_power_value(p, k).ln(),
        }
    }

    /// `alpha(n)` by factorization.
    pub fn eval(&self, n: u64, spf: &SpfTable) -> Result<f64> {
        let f = spf.factorize(n)?;
        Ok(f.factors
            .iter()
            .map(|&(p, k)| self.prime_power_value(p, k))
            .product())
    }
}

/// `d_k(p^i) = binom(i + k - 1, i)` for real `k > 0`.
///
/// Uses the running product `prod_{j<=i} (k + j - 1)/j`, which is exact for
/// small integer `k`, and falls back to log-gamma when the product leaves
/// the finite range.
pub fn divisor_prime_power(k: f64, i: u32) -> f64 {
    let mut v = 1.0;
    for j in 1..=i {
        v *= (k + j as f64 - 1.0) / j as f64;
    }
    if v.is_finite() {
        v
    } else {
        ln_binomial_upper(k, i).exp()
    }
}

fn ln_binomial_upper(k: f64, i: u32) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let i = i as f64;
    ln_gamma(i + k) - ln_gamma(k) - ln_gamma(i + 1.0)
}

/// Dense table of `alpha(n)` for `1 <= n <= x` with prefix sums.
#[derive(Debug, Clone)]
pub struct WeightTable {
    x: u64,
    /// `alpha[n]`; index 0 holds 0.
    alpha: Vec<f64>,
    /// `prefix[n] = S(n)`; `prefix[0] = 0`.
    prefix: Vec<f64>,
    name: String,
}

/// Sieves the weight over `[1, x]`.
pub fn build_weight_table(w: &MultiplicativeWeight, x: u64, spf: &SpfTable) -> Result<WeightTable> {
    WeightTable::build(w, x, spf, MemoryBudget::from_env()?)
}

impl WeightTable {
    pub fn build(
        w: &MultiplicativeWeight,
        x: u64,
        spf: &SpfTable,
        budget: MemoryBudget,
    ) -> Result<Self> {
        if x == 0 {
            return Err(invalid("x", "must be >= 1"));
        }
        if x > spf.limit() {
            return Err(Error::OutOfRange {
                value: x,
                limit: spf.limit(),
            });
        }
        budget.check(x + 1)?;
        let n = x as usize;
        let mut alpha = vec![1.0f64; n + 1];
        alpha[0] = 0.0;
        for &p in spf.primes() {
            let p = p as usize;
            if p > n {
                break;
            }
            let mut pk = p;
            let mut k = 1u32;
            loop {
                let v = w.prime_power_value(p as u64, k);
                if v < 0.0 || v.is_nan() {
                    return Err(invalid(
                        "weight",
                        format!("{}: alpha({p}^{k}) = {v} is not a nonnegative number", w.name()),
                    ));
                }
                if v != 1.0 {
                    // Multiples j*p^k with p not dividing j.
                    let mut c = 0usize;
                    let mut m = pk;
                    while m <= n {
                        c += 1;
                        if c == p {
                            c = 0;
                        } else {
                            alpha[m] *= v;
                        }
                        m += pk;
                    }
                }
                match pk.checked_mul(p) {
                    Some(next) if next <= n => {
                        pk = next;
                        k += 1;
                    }
                    _ => break,
                }
            }
        }
        Self::from_values_named(alpha, w.name().to_string())
    }

    /// Table from explicit values `alpha(1..=x)`; the measure need not be
    /// multiplicative. `values[0]` is `alpha(1)`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let mut alpha = Vec::with_capacity(values.len() + 1);
        alpha.push(0.0);
        alpha.extend_from_slice(values);
        Self::from_values_named(alpha, "custom".to_string())
    }

    fn from_values_named(alpha: Vec<f64>, name: String) -> Result<Self> {
        let x = (alpha.len() - 1) as u64;
        if x == 0 {
            return Err(invalid("x", "empty table"));
        }
        let mut prefix = Vec::with_capacity(alpha.len());
        prefix.push(0.0);
        let mut acc = NeumaierSum::new();
        for &a in &alpha[1..] {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(invalid("alpha", format!("value {a} is not finite and nonnegative")));
            }
            acc.add(a);
            prefix.push(acc.value());
        }
        if acc.value() <= 0.0 {
            return Err(Error::DegenerateTable);
        }
        Ok(WeightTable {
            x,
            alpha,
            prefix,
            name,
        })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn alpha(&self, n: u64) -> f64 {
        self.alpha[n as usize]
    }

    /// Values `alpha(1..=x)`.
    pub fn values(&self) -> &[f64] {
        &self.alpha[1..]
    }

    /// Prefix sums, `prefix()[n] = S(n)` with `prefix()[0] = 0`.
    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    /// `S(x)`.
    pub fn total(&self) -> f64 {
        self.prefix[self.x as usize]
    }

    /// `S(n)` for `n <= x`.
    pub fn partial_sum(&self, n: u64) -> f64 {
        self.prefix[n.min(self.x) as usize]
    }
}

/// `(x, sum_{p<=x} alpha(p) log p / p^d - theta x)` at each checkpoint.
pub fn condition_i_residuals(
    w: &MultiplicativeWeight,
    d: f64,
    checkpoints: &[u64],
    spf: &SpfTable,
) -> Result<Vec<(u64, f64)>> {
    let (theta, _) = w.ewens_params()?;
    let mut order: Vec<usize> = (0..checkpoints.len()).collect();
    order.sort_by_key(|&i| checkpoints[i]);
    if let Some(&last) = order.last() {
        if checkpoints[last] > spf.limit() {
            return Err(Error::OutOfRange {
                value: checkpoints[last],
                limit: spf.limit(),
            });
        }
    }
    let primes = spf.primes();
    let mut out = vec![(0u64, 0.0f64); checkpoints.len()];
    let mut acc = NeumaierSum::new();
    let mut idx = 0usize;
    for i in order {
        let x = checkpoints[i];
        while idx < primes.len() && primes[idx] as u64 <= x {
            let p = primes[idx] as f64;
            acc.add(w.prime_power_value(primes[idx] as u64, 1) * p.ln() / p.powf(d));
            idx += 1;
        }
        out[i] = (x, acc.value() - theta * x as f64);
    }
    Ok(out)
}

/// `sum_{p in [a,b]} alpha(p) g(p) / p^d` over sieved primes.
pub fn prime_weighted_sum<G: Fn(f64) -> f64>(
    w: &MultiplicativeWeight,
    g: G,
    a: u64,
    b: u64,
    d: f64,
    spf: &SpfTable,
) -> Result<f64> {
    let mut acc = NeumaierSum::new();
    for &p in spf.primes_in(a, b)? {
        let pf = p as f64;
        acc.add(w.prime_power_value(p as u64, 1) * g(pf) / pf.powf(d));
    }
    Ok(acc.value())
}

/// Outcome of the finite-grid check of `alpha(p^k)/p^{dk} <= C r^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionIiReport {
    pub r: f64,
    /// Smallest `C` that works on the grid.
    pub c_hat: f64,
    pub argmax_p: u64,
    pub argmax_k: u32,
    /// True when the supremum sits on the largest `k` checked and the ratio
    /// is still growing there by more than one part in `10^6`.
    pub still_growing: bool,
}

/// Spot-checks the prime-power growth condition on `p <= p_max`, `k <= k_max`.
///
/// A finite grid can only refute a declared `r`, never certify it.
pub fn check_condition_ii(
    w: &MultiplicativeWeight,
    p_max: u64,
    k_max: u32,
    spf: &SpfTable,
) -> Result<ConditionIiReport> {
    let Regime::Ewens { d, r, .. } = w.regime() else {
        return Err(Error::WrongRegime(w.name().to_string()));
    };
    let mut best = (f64::NEG_INFINITY, 2u64, 1u32);
    for &p in spf.primes_in(2, p_max)? {
        let lp = (p as f64).ln();
        for k in 1..=k_max {
            let v = w.ln_prime_power_value(p as u64, k) - d * k as f64 * lp - k as f64 * r.ln();
            if v > best.0 {
                best = (v, p as u64, k);
            }
        }
    }
    let ratio_ln = |p: u64, k: u32| {
        w.ln_prime_power_value(p, k) - d * k as f64 * (p as f64).ln() - k as f64 * r.ln()
    };
    let still_growing =
        best.2 == k_max && k_max > 1 && ratio_ln(best.1, k_max) - ratio_ln(best.1, k_max - 1) > 1e-6;
    Ok(ConditionIiReport {
        r,
        c_hat: best.0.exp(),
        argmax_p: best.1,
        argmax_k: best.2,
        still_growing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_spf;
    use rand::{Rng, SeedableRng};

    fn spec(s: &str) -> MultiplicativeWeight {
        builtin_weight(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn builtin_prime_power_values() {
        let d2 = spec("divisor:2");
        assert_eq!(d2.prime_power_value(5, 3), 4.0);
        let t2 = spec("theta_omega:2");
        for k in 1..10 {
            assert_eq!(t2.prime_power_value(3, k), 2.0);
        }
        let pf = spec("powerfree:2");
        assert_eq!(pf.prime_power_value(7, 1), 1.0);
        assert_eq!(pf.prime_power_value(7, 2), 0.0);
        assert!((spec("euler_ratio").prime_power_value(3, 2) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(spec("sigma:1").prime_power_value(2, 3), 15.0);
        assert_eq!(spec("power:2").prime_power_value(3, 2), 81.0);
        let pl = spec("poly_log:2,1");
        assert!((pl.prime_power_value(7, 1) - 2.0 * 7f64.ln()).abs() < 1e-15);
        assert_eq!(pl.prime_power_value(7, 2), 0.0);
        assert_eq!(spec("poly_log:2,1,0.5").prime_power_value(7, 3), 0.5);
    }

    #[test]
    fn real_divisor_order_matches_log_gamma() {
        for &k in &[0.5, std::f64::consts::SQRT_2, 3.7, 2.0] {
            for i in 0..30 {
                let direct = divisor_prime_power(k, i);
                let lg = ln_binomial_upper(k, i).exp();
                assert!((direct - lg).abs() <= 1e-12 * lg, "k={k} i={i}");
            }
        }
        // Huge orders stay finite through the log-gamma path.
        assert!(divisor_prime_power(1e200, 3).is_infinite() || divisor_prime_power(1e200, 3) > 0.0);
    }

    #[test]
    fn regimes_follow_the_catalog() {
        let r = |s: &str| spec(s).regime();
        assert!(matches!(r("theta_omega:2"), Regime::Ewens { theta, d, .. } if theta == 2.0 && d == 0.0));
        assert!(matches!(r("divisor:3"), Regime::Ewens { theta, d, .. } if theta == 3.0 && d == 0.0));
        assert!(matches!(r("powerfree:2"), Regime::Ewens { theta, d, .. } if theta == 1.0 && d == 0.0));
        assert!(matches!(r("euler_ratio"), Regime::Ewens { theta, d, .. } if theta == 1.0 && d == 0.0));
        assert!(matches!(r("sigma:0.5"), Regime::Ewens { theta, d, .. } if theta == 1.0 && d == 0.5));
        assert!(matches!(r("power:0.25"), Regime::Ewens { theta, d, .. } if theta == 1.0 && d == 0.25));
        assert!(matches!(r("poly_log:1,2"), Regime::Poly { k, gamma } if k == 1.0 && gamma == 2.0));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        for s in ["theta_omega:0", "divisor:-1", "powerfree:1", "power:-1", "poly_log:0,1", "poly_log:1,-2", "poly_log:1,1,-1"] {
            let parsed: WeightSpec = s.parse().unwrap();
            assert!(builtin_weight(&parsed).is_err(), "{s}");
        }
        assert!("nope:1".parse::<WeightSpec>().is_err());
        assert!("theta_omega".parse::<WeightSpec>().is_err());
        assert!("powerfree:2.5".parse::<WeightSpec>().is_err());
    }

    #[test]
    fn spec_json_and_string_forms() {
        let s: WeightSpec = serde_json::from_str(r#"{"kind": "theta_omega", "theta": 2.0}"#).unwrap();
        assert_eq!(s, WeightSpec::ThetaOmega { theta: 2.0 });
        let s: WeightSpec = serde_json::from_str(r#"{"kind": "poly_log", "K": 1.0, "gamma": 1.0}"#).unwrap();
        assert_eq!(s, "poly_log:1,1".parse().unwrap());
        assert!(serde_json::from_str::<WeightSpec>(r#"{"kind": "theta_omega", "theta": 2.0, "x": 1}"#).is_err());
        for spec in catalog() {
            let text = spec.to_string();
            assert_eq!(text.parse::<WeightSpec>().unwrap(), spec);
            let json = serde_json::to_string(&spec).unwrap();
            assert_eq!(serde_json::from_str::<WeightSpec>(&json).unwrap(), spec);
        }
    }

    #[test]
    fn small_partition_sums() {
        let spf = build_spf(100).unwrap();
        let t = build_weight_table(&spec("power:0"), 100, &spf).unwrap();
        assert_eq!(t.total(), 100.0);
        // Brute force: squarefree n <= 10 are 1,2,3,5,6,7,10.
        let t = build_weight_table(&spec("powerfree:2"), 10, &spf).unwrap();
        let brute = (1..=10u64).filter(|n| (2..=3u64).all(|d| n % (d * d) != 0)).count();
        assert_eq!(brute, 7);
        assert_eq!(t.total(), 7.0);
        // Brute force: sum of divisor counts.
        let t = build_weight_table(&spec("divisor:2"), 10, &spf).unwrap();
        let brute: usize = (1..=10u64).map(|n| (1..=n).filter(|d| n % d == 0).count()).sum();
        assert_eq!(brute, 27);
        assert_eq!(t.total(), 27.0);
    }

    #[test]
    fn sieved_table_matches_per_n_evaluation() {
        let spf = build_spf(10_000).unwrap();
        for s in catalog() {
            let w = builtin_weight(&s).unwrap();
            let t = build_weight_table(&w, 10_000, &spf).unwrap();
            assert_eq!(t.alpha(1), 1.0);
            for n in 1..=10_000u64 {
                let direct = w.eval(n, &spf).unwrap();
                let got = t.alpha(n);
                assert!((got - direct).abs() <= 1e-12 * direct.abs(), "{} n={n}: {got} vs {direct}", w.name());
            }
            assert!(t.prefix().windows(2).all(|p| p[1] >= p[0]));
            assert!(t.total() > 0.0);
        }
    }

    #[test]
    fn theta_one_sums_to_x() {
        let spf = build_spf(50_000).unwrap();
        let t = build_weight_table(&spec("theta_omega:1"), 50_000, &spf).unwrap();
        for x in [1u64, 17, 1000, 50_000] {
            assert_eq!(t.partial_sum(x), x as f64);
        }
    }

    #[test]
    fn table_is_multiplicative_on_random_coprime_pairs() {
        let x = 200_000u64;
        let spf = build_spf(x).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        for s in ["divisor:1.5", "sigma:0.7", "theta_omega:3", "euler_ratio"] {
            let t = build_weight_table(&spec(s), x, &spf).unwrap();
            let mut tested = 0;
            while tested < 1000 {
                let a = rng.random_range(1..=x);
                let b = rng.random_range(1..=(x / a).max(1));
                if a * b > x || gcd(a, b) != 1 {
                    continue;
                }
                let lhs = t.alpha(a * b);
                let rhs = t.alpha(a) * t.alpha(b);
                assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs(), "{s}: {a}*{b}");
                tested += 1;
            }
        }
    }

    #[test]
    fn explicit_tables_and_degeneracy() {
        let mut v = vec![0.0; 10];
        v[5] = 3.0;
        let t = WeightTable::from_values(&v).unwrap();
        assert_eq!(t.total(), 3.0);
        assert_eq!(WeightTable::from_values(&[0.0, 0.0]).unwrap_err(), Error::DegenerateTable);
        assert!(WeightTable::from_values(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn table_range_and_budget_errors() {
        let spf = build_spf(100).unwrap();
        let w = spec("theta_omega:2");
        assert!(matches!(build_weight_table(&w, 101, &spf), Err(Error::OutOfRange { .. })));
        assert!(matches!(
            WeightTable::build(&w, 100, &spf, MemoryBudget::new(10)),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn condition_i_examples() {
        let spf = build_spf(1_000_000).unwrap();
        let one = spec("theta_omega:1");
        let two = spec("theta_omega:2");
        // Direct summation oracle over trial-division primes.
        let mut oracle = NeumaierSum::new();
        for n in 2..=1_000_000u64 {
            if (2..).take_while(|d| d * d <= n).all(|d| n % d != 0) {
                oracle.add((n as f64).ln());
            }
        }
        let expected = oracle.value() - 1e6;
        let r1 = condition_i_residuals(&one, 0.0, &[1_000_000], &spf).unwrap()[0].1;
        assert!((r1 - expected).abs() < 1e-6, "{r1} vs {expected}");
        // Frozen from the oracle: theta(10^6) - 10^6.
        assert!((r1 - (-1515.8247)).abs() < 1e-3, "{r1}");
        let r2 = condition_i_residuals(&two, 0.0, &[1_000_000], &spf).unwrap()[0].1;
        assert!((r2 - 2.0 * r1).abs() < 1e-6);

        for s in ["sigma:0.5", "theta_omega:3", "euler_ratio"] {
            let w = spec(s);
            let (theta, d) = w.ewens_params().unwrap();
            let r = condition_i_residuals(&w, d, &[2], &spf).unwrap()[0].1;
            let single = w.prime_power_value(2, 1) * 2f64.ln() / 2f64.powf(d);
            assert!((r - (single - 2.0 * theta)).abs() < 1e-12);
        }
        assert!(condition_i_residuals(&spec("poly_log:1,1"), 0.0, &[10], &spf).is_err());
        let out = condition_i_residuals(&one, 0.0, &[1000, 10, 100], &spf).unwrap();
        assert_eq!(out.iter().map(|r| r.0).collect::<Vec<_>>(), vec![1000, 10, 100]);
    }

    #[test]
    fn prime_weighted_sums() {
        let spf = build_spf(1_000_000).unwrap();
        let one = spec("theta_omega:1");
        let v = prime_weighted_sum(&one, |t| 1.0 / t, 2, 3, 0.0, &spf).unwrap();
        assert!((v - (0.5 + 1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(prime_weighted_sum(&one, |t| t, 24, 28, 0.0, &spf).unwrap(), 0.0);
        // Mertens-type behaviour: the residual against theta(log log x - log log log^2 x)
        // stays bounded across scales.
        let mut residuals = Vec::new();
        for x in [10_000u64, 100_000, 1_000_000] {
            let lx = (x as f64).ln();
            let a = (lx * lx).ceil() as u64;
            let s = prime_weighted_sum(&one, |t| 1.0 / t, a, x, 0.0, &spf).unwrap();
            residuals.push(s - (lx.ln() - (lx * lx).ln().ln()));
        }
        for r in &residuals {
            assert!(r.abs() < 0.5, "{residuals:?}");
        }
    }

    #[test]
    fn condition_ii_spot_check() {
        let spf = build_spf(10_000).unwrap();
        for s in ["theta_omega:2", "divisor:3", "powerfree:2", "sigma:1", "power:0.5", "euler_ratio"] {
            let rep = check_condition_ii(&spec(s), 10_000, 30, &spf).unwrap();
            assert!(rep.c_hat.is_finite(), "{s}");
            assert!(!rep.still_growing, "{s}: {rep:?}");
        }
        // A weight growing like 2^k violates any r < sqrt 2.
        let bad = MultiplicativeWeight::custom(
            "two_pow",
            Regime::Ewens { theta: 1.0, d: 0.0, r: 1.2 },
            |_, k| 2f64.powi(k as i32),
        );
        assert!(check_condition_ii(&bad, 100, 30, &spf).unwrap().still_growing);
    }
}
