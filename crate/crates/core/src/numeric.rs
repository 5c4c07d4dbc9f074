//! Small numerical kernels: compensated summation and quadrature rules.

use std::f64::consts::PI;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = NeumaierSum::new();
    for v in it {
        s.add(v);
    }
    s.value()
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(mid + half * x);
        }
        s * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tanh-sinh (double exponential) quadrature on a finite interval.
///
/// Tolerates integrable algebraic singularities at both endpoints. The
/// integrand is never evaluated exactly at `a` or `b`.
pub fn tanh_sinh<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, mut f: F) -> f64 {
    if a == b {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let t_max = 4.0;
    let mut h = 0.5;
    // Abscissae are placed by their distance to the nearest endpoint to avoid cancellation.
    let mut eval = |t: f64| -> f64 {
        let s = 0.5 * PI * t.sinh();
        let c = s.cosh();
        let w = 0.5 * PI * t.cosh() / (c * c);
        if w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        let off = half * 2.0 / ((2.0 * s.abs()).exp() + 1.0);
        let x = if t >= 0.0 { b - off } else { a + off };
        if x <= a || x >= b {
            return 0.0;
        }
        w * f(x)
    };
    let mut sum = eval(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > t_max {
            break;
        }
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h * half;
    for _level in 0..12 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > t_max {
                break;
            }
            add += eval(t) + eval(-t);
            k += 2;
        }
        sum += add;
        let next = sum * h * half;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= tol * estimate.abs().max(1e-300) {
            break;
        }
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancellation() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(v), 2.0);
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let gl = GaussLegendre::new(10);
        let v = gl.integrate(0.0, 2.0, |x| x.powi(19));
        assert!((v - 2f64.powi(20) / 20.0).abs() < 1e-9);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let v = tanh_sinh(0.0, 1.0, 1e-14, |x| 1.0 / x.sqrt());
        assert!((v - 2.0).abs() < 1e-12, "{v}");
        let v = tanh_sinh(0.0, 1.0, 1e-14, |x| (1.0 - x).sqrt().ln());
        assert!((v + 0.5).abs() < 1e-12, "{v}");
        let v = tanh_sinh(2.0, 3.0, 1e-14, |x| x.ln());
        let exact = 3.0 * 3f64.ln() - 3.0 - (2.0 * 2f64.ln() - 2.0);
        assert!((v - exact).abs() < 1e-13);
    }
}
