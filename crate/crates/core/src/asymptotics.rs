//! Predicted asymptotics: Euler-product constants in the Ewens regime and
//! the saddle-point machinery in the polynomial regime.

use serde::Serialize;
use statrs::function::gamma::{gamma, gamma_ur, ln_gamma};

use crate::arith::SpfTable;
use crate::error::{invalid, Error, Result};
use crate::numeric::NeumaierSum;
use crate::weights::{MultiplicativeWeight, Regime};

/// Leading-order constant of `S(x) ~ A x^{d+1} log^{theta-1} x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EwensAsymptotic {
    pub theta: f64,
    pub d: f64,
    pub a_alpha: f64,
    pub prime_cutoff: u64,
    /// Relative change of `a_alpha` between cutoffs `prime_cutoff / 2` and
    /// `prime_cutoff`; an estimate of the neglected tail.
    pub tail_estimate: f64,
}

/// `ln sum_{i>=1} alpha(p^i) p^{-i s}`-style local series: returns
/// `sum_{i>=1} alpha(p^i) / p^{i(d+1)}`.
fn local_excess(w: &MultiplicativeWeight, p: u64, d: f64) -> Result<f64> {
    const MAX_TERMS: u32 = 10_000;
    let lq = (d + 1.0) * (p as f64).ln();
    let mut s = NeumaierSum::new();
    let mut small_run = 0;
    for i in 1..=MAX_TERMS {
        let la = w.ln_prime_power_value(p, i);
        let t = if la == f64::NEG_INFINITY { 0.0 } else { (la - i as f64 * lq).exp() };
        if !t.is_finite() {
            break;
        }
        s.add(t);
        if t <= 1e-18 * s.value().max(1e-300) || t == 0.0 && i > 64 {
            small_run += 1;
            if small_run >= 4 {
                return Ok(s.value());
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::Divergent {
        what: format!("sum_i alpha(p^i)/p^(i(d+1)) for {} at p = {p}", w.name()),
    })
}

/// Truncated Euler product
/// `(d+1)^{-1} Gamma(theta)^{-1} prod_{p<=cutoff} (sum_i alpha(p^i)/p^{i(d+1)}) (1-1/p)^theta`.
pub fn euler_constant(w: &MultiplicativeWeight, cutoff: u64, spf: &SpfTable) -> Result<EwensAsymptotic> {
    let (theta, d) = w.ewens_params()?;
    if cutoff < 2 {
        return Err(invalid("cutoff", "must be >= 2"));
    }
    let primes = spf.primes_in(2, cutoff)?;
    let half = cutoff / 2;
    let mut log_sum = NeumaierSum::new();
    let mut log_half = 0.0;
    let mut passed_half = false;
    for &p in primes {
        let p = p as u64;
        if !passed_half && p > half {
            log_half = log_sum.value();
            passed_half = true;
        }
        let excess = local_excess(w, p, d)?;
        log_sum.add(excess.ln_1p() + theta * (-1.0 / p as f64).ln_1p());
    }
    if !passed_half {
        log_half = log_sum.value();
    }
    let norm = -((d + 1.0).ln() + ln_gamma(theta));
    let log_a = log_sum.value() + norm;
    Ok(EwensAsymptotic {
        theta,
        d,
        a_alpha: log_a.exp(),
        prime_cutoff: cutoff,
        tail_estimate: (log_sum.value() - log_half).abs(),
    })
}

/// `A x^{d+1} (log x)^{theta-1}`.
pub fn predict_s_ewens(a: &EwensAsymptotic, x: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(invalid("x", "must be >= 2"));
    }
    let l = x.ln();
    Ok(a.a_alpha * ((a.d + 1.0) * l + (a.theta - 1.0) * l.ln()).exp())
}

/// Prime logarithms up to a cutoff, for evaluating
/// `G^{(k)}(s) = (-1)^k sum_p log^{gamma+k} p / p^s`.
#[derive(Debug, Clone)]
pub struct PrimeSumTable {
    cutoff: u64,
    ln_p: Vec<f64>,
    /// `theta(cutoff) - cutoff`.
    chebyshev_error: f64,
}

/// A value of `G^{(k)}(s)` with its pieces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GValue {
    pub value: f64,
    /// Signed sum over `p <= cutoff`.
    pub truncated: f64,
    /// Signed estimate of the sum over `p > cutoff`.
    pub tail: f64,
    /// Bound on the error of `tail`, valid under the Riemann hypothesis.
    pub error_bound: f64,
}

pub const DEFAULT_G_TOLERANCE: f64 = 1e-3;

/// Schoenfeld's explicit form of `|theta(t) - t|` holds from here on.
const SCHOENFELD_MIN: u64 = 599;

impl PrimeSumTable {
    pub fn new(spf: &SpfTable, cutoff: u64) -> Result<Self> {
        if cutoff < SCHOENFELD_MIN {
            return Err(invalid("cutoff", format!("must be >= {SCHOENFELD_MIN}")));
        }
        let primes = spf.primes_in(2, cutoff)?;
        let ln_p: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
        let cheb = crate::numeric::neumaier_sum(ln_p.iter().copied());
        Ok(PrimeSumTable {
            cutoff,
            ln_p,
            chebyshev_error: cheb - cutoff as f64,
        })
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// `G^{(k)}(s)` for `k` in `0..=3`.
    ///
    /// The tail `sum_{p>y} log^a p / p^s` (`a = gamma + k`) is written as
    /// `int_y^inf log^{a-1} t t^{-s} d theta(t)`. With `theta(t) = t + E(t)`
    /// the main part is `Gamma(a, (s-1) log y) / (s-1)^a`, integration by
    /// parts leaves `-E(y) g(y)`, and the remaining `int E g'` is bounded
    /// with `|E(t)| < sqrt(t) log^2 t / (8 pi)`.
    pub fn g_eval(&self, gamma_exp: f64, s: f64, k: u32, tolerance: f64) -> Result<GValue> {
        if !(s > 1.0) {
            return Err(invalid("s", format!("must be > 1, got {s}")));
        }
        if k > 3 {
            return Err(invalid("k", "derivative order must be in 0..=3"));
        }
        if !(gamma_exp > 0.0) {
            return Err(invalid("gamma", "must be > 0"));
        }
        let a = gamma_exp + k as f64;
        let mut acc = NeumaierSum::new();
        for &lp in &self.ln_p {
            acc.add((a * lp.ln() - s * lp).exp());
        }
        let ly = (self.cutoff as f64).ln();
        let main = upper_gamma(a, (s - 1.0) * ly) / (s - 1.0).powf(a);
        let boundary = -self.chebyshev_error * ((a - 1.0) * ly.ln() - s * ly).exp();
        let sh = s - 0.5;
        let zb = sh * ly;
        let bound = (s * upper_gamma(a + 2.0, zb) / sh.powf(a + 2.0)
            + (a - 1.0).abs() * upper_gamma(a + 1.0, zb) / sh.powf(a + 1.0))
            / (8.0 * std::f64::consts::PI);
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let truncated = acc.value();
        let tail = main + boundary;
        let total = truncated + tail;
        if bound > tolerance * total {
            return Err(Error::CutoffInsufficient {
                cutoff: self.cutoff,
                bound: bound / total,
                tolerance,
            });
        }
        Ok(GValue {
            value: sign * total,
            truncated: sign * truncated,
            tail: sign * tail,
            error_bound: bound,
        })
    }
}

/// Unregularized upper incomplete gamma `Gamma(a, z)`.
fn upper_gamma(a: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return gamma(a);
    }
    gamma_ur(a, z) * gamma(a)
}

/// `G^{(k)}(s)` with a fresh prime table; see [`PrimeSumTable::g_eval`].
pub fn g_eval(gamma_exp: f64, s: f64, k: u32, spf: &SpfTable, cutoff: u64) -> Result<GValue> {
    PrimeSumTable::new(spf, cutoff)?.g_eval(gamma_exp, s, k, DEFAULT_G_TOLERANCE)
}

/// Saddle point of the polynomial regime and derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolySaddle {
    pub k: f64,
    pub gamma: f64,
    pub x: f64,
    pub sigma: f64,
    /// `1 + (K Gamma(gamma+1))^{1/(gamma+1)} (log x)^{-1/(gamma+1)}`.
    pub sigma_leading: f64,
    /// `(1 + 1/gamma)(K Gamma(gamma+1))^{1/(gamma+1)}`.
    pub b: f64,
    /// `|K G'(sigma) + log x|`.
    pub residual: f64,
    /// Error bound on `K G'(sigma)` from the prime tail.
    pub g_error_bound: f64,
    /// Truncated `prod_p (sum_k alpha(p^k)/p^k) exp(-K log^gamma p / p)`;
    /// 1 when not computed.
    pub euler_factor: f64,
}

fn check_poly(k: f64, gamma_exp: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(invalid("K", "must be > 0"));
    }
    if !(gamma_exp > 0.0 && gamma_exp.is_finite()) {
        return Err(invalid("gamma", "must be > 0"));
    }
    Ok(())
}

pub fn b_constant(k: f64, gamma_exp: f64) -> f64 {
    (1.0 + 1.0 / gamma_exp) * (k * gamma(gamma_exp + 1.0)).powf(1.0 / (gamma_exp + 1.0))
}

pub fn sigma_leading_order(k: f64, gamma_exp: f64, x: f64) -> f64 {
    1.0 + (k * gamma(gamma_exp + 1.0)).powf(1.0 / (gamma_exp + 1.0)) * x.ln().powf(-1.0 / (gamma_exp + 1.0))
}

/// Solves `K G'(sigma) = -log x` by bisection. `G'` is increasing, so the
/// bracket `(1, 2]` is widened to the right until it contains the root.
pub fn solve_saddle(k: f64, gamma_exp: f64, x: f64, table: &PrimeSumTable) -> Result<PolySaddle> {
    check_poly(k, gamma_exp)?;
    if !(x >= 3.0) {
        return Err(invalid("x", "must be >= 3"));
    }
    let lx = x.ln();
    let f = |s: f64| -> Result<(f64, f64)> {
        let g = table.g_eval(gamma_exp, s, 1, DEFAULT_G_TOLERANCE)?;
        Ok((k * g.value + lx, k * g.error_bound))
    };
    let mut lo = 1.0;
    let mut hi = 2.0;
    let mut widenings = 0;
    while f(hi)?.0 < 0.0 {
        lo = hi;
        hi = 1.0 + 2.0 * (hi - 1.0);
        widenings += 1;
        if widenings > 60 {
            return Err(Error::NonBracketing { what: "K G'(s) + log x" });
        }
    }
    // Walk the lower end towards 1 only as far as the tail estimate allows.
    if lo == 1.0 {
        let mut probe = 1.5;
        loop {
            match f(probe) {
                Ok((v, _)) if v < 0.0 => {
                    lo = probe;
                    break;
                }
                Ok(_) => {
                    hi = probe;
                    probe = 1.0 + 0.5 * (probe - 1.0);
                }
                Err(Error::CutoffInsufficient { .. }) => {
                    return Err(Error::NonBracketing { what: "K G'(s) + log x" })
                }
                Err(e) => return Err(e),
            }
            if probe - 1.0 < 1e-6 {
                return Err(Error::NonBracketing { what: "K G'(s) + log x" });
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)?.0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let (flo, _) = f(lo)?;
    let (fhi, err) = f(hi)?;
    let (sigma, residual) = if flo.abs() <= fhi.abs() { (lo, flo.abs()) } else { (hi, fhi.abs()) };
    Ok(PolySaddle {
        k,
        gamma: gamma_exp,
        x,
        sigma,
        sigma_leading: sigma_leading_order(k, gamma_exp, x),
        b: b_constant(k, gamma_exp),
        residual,
        g_error_bound: err,
        euler_factor: 1.0,
    })
}

/// `prod_{p<=cutoff} (sum_k alpha(p^k)/p^k) exp(-K log^gamma p / p)`.
pub fn poly_euler_factor(w: &MultiplicativeWeight, cutoff: u64, spf: &SpfTable) -> Result<f64> {
    let (k, gamma_exp) = match w.regime() {
        Regime::Poly { k, gamma } => (k, gamma),
        Regime::Ewens { .. } => return Err(Error::WrongRegime(w.name().to_string())),
    };
    let mut log_sum = NeumaierSum::new();
    for &p in spf.primes_in(2, cutoff)? {
        let p = p as u64;
        let lp = (p as f64).ln();
        let excess = local_excess(w, p, 0.0)?;
        log_sum.add(excess.ln_1p() - k * lp.powf(gamma_exp) / p as f64);
    }
    Ok(log_sum.value().exp())
}

/// `euler_factor * x * exp(B L^{gamma/(gamma+1)}) * L^{-(gamma+2)/(2(gamma+1))}`,
/// `L = log x`, omitting the unknown absolute constant.
pub fn predict_s_poly(saddle: &PolySaddle, x: f64) -> Result<f64> {
    if !(x >= 3.0) {
        return Err(invalid("x", "must be >= 3"));
    }
    let g = saddle.gamma;
    let l = x.ln();
    let log_pred = l + saddle.b * l.powf(g / (g + 1.0)) - (g + 2.0) / (2.0 * (g + 1.0)) * l.ln();
    Ok(saddle.euler_factor * log_pred.exp())
}

/// `(log x)^{gamma/(gamma+1)} (K Gamma(gamma)/gamma^gamma)^{1/(gamma+1)}`.
pub fn predict_mean_omega_poly(k: f64, gamma_exp: f64, x: f64) -> Result<f64> {
    check_poly(k, gamma_exp)?;
    if !(x > 1.0) {
        return Err(invalid("x", "must be > 1"));
    }
    let g = gamma_exp;
    Ok(x.ln().powf(g / (g + 1.0)) * (k * gamma(g) / g.powf(g)).powf(1.0 / (g + 1.0)))
}

/// `(shape, rate)` of the limit law of `log P_1 / (log x)^{1/(gamma+1)}`.
pub fn gamma_law_params(k: f64, gamma_exp: f64) -> Result<(f64, f64)> {
    check_poly(k, gamma_exp)?;
    Ok((gamma_exp + 1.0, (k * gamma(gamma_exp + 1.0)).powf(1.0 / (gamma_exp + 1.0))))
}
