//! Reference values computed outside this crate (numpy sieves, mpmath,
//! classical tables) and frozen here.

use anatomy_core::asymptotics::{euler_constant, predict_s_ewens};
use anatomy_core::ewens::{cycle_count_pmf_constant, partition_function, CycleWeights};
use anatomy_core::harness::pd_largest_mean;
use anatomy_core::limit_laws::dickman_rho;
use anatomy_core::{build_spf, build_weight_table, builtin_weight, MultiplicativeWeight};

fn weight(s: &str) -> MultiplicativeWeight {
    builtin_weight(&s.parse().unwrap()).unwrap()
}

#[test]
fn divisor_summatory_function() {
    let spf = build_spf(100_000).unwrap();
    let t = build_weight_table(&weight("divisor:2"), 100_000, &spf).unwrap();
    assert_eq!(t.total(), 1_166_750.0);
}

#[test]
fn prime_counts() {
    let spf = build_spf(1_000_000).unwrap();
    assert_eq!(spf.prime_count(), 78_498);
    assert_eq!(spf.primes_in(999_000, 1_000_000).unwrap().len(), 65);
}

#[test]
fn squarefree_and_two_power_omega_sums() {
    let spf = build_spf(1_000_000).unwrap();
    let q = build_weight_table(&weight("powerfree:2"), 1_000_000, &spf).unwrap();
    assert_eq!(q.total(), 607_926.0);
    let t = build_weight_table(&weight("theta_omega:2"), 1_000_000, &spf).unwrap();
    assert_eq!(t.total(), 9_185_685.0);
}

#[test]
fn euler_constants() {
    let spf = build_spf(1_000_000).unwrap();
    // prod_{p <= 10^6} (1-1/p)^{1/2} (1 + (1/2)/(p-1)) / Gamma(1/2), mpmath.
    let a = euler_constant(&weight("theta_omega:0.5"), 1_000_000, &spf).unwrap();
    assert!((a.a_alpha - 0.618_906_443_888_694).abs() < 1e-11, "{}", a.a_alpha);
    // d_2 has constant exactly 1, so the prediction is x log x.
    let d2 = euler_constant(&weight("divisor:2"), 1_000_000, &spf).unwrap();
    assert!((d2.a_alpha - 1.0).abs() < 1e-12);
    let x = 1e6f64;
    assert!((predict_s_ewens(&d2, x).unwrap() / (x * x.ln()) - 1.0).abs() < 1e-12);
}

#[test]
fn dickman_classical_values() {
    let s = dickman_rho(1.0, 6.0, 1.0 / 64.0).unwrap();
    for (u, v) in [
        (2.0, 0.306_852_819_440_054_7),
        (3.0, 0.048_608_388_291_131_6),
        (4.0, 0.004_910_925_648_138_3),
        (5.0, 0.000_354_724_700_456_04),
        (6.0, 0.000_019_649_696_353_9),
    ] {
        assert!((s.eval(u) - v).abs() < 1e-12 * v.max(1e-3) * 1e3, "rho({u}) = {}", s.eval(u));
    }
}

#[test]
fn golomb_dickman_constant() {
    // Mean largest PD(1) part; sd of one draw is about 0.19.
    let m = pd_largest_mean(1.0, 100_000, 200, 17).unwrap();
    assert!((m - 0.624_329_988_543_550_9).abs() < 3e-3, "{m}");
}

#[test]
fn stirling_cycle_numbers() {
    let pmf = cycle_count_pmf_constant(5, 1.0).unwrap();
    let expected = [24.0, 50.0, 35.0, 10.0, 1.0];
    for (k, e) in expected.iter().enumerate() {
        assert!((pmf.prob((k + 1) as f64) - e / 120.0).abs() < 1e-15);
    }
}

#[test]
fn ewens_mean_cycle_count() {
    for theta in [0.5, 1.0, 3.0] {
        let n = 200;
        let t = partition_function(&CycleWeights::constant(n, theta).unwrap()).unwrap();
        let direct: f64 = (0..n).map(|i| theta / (theta + i as f64)).sum();
        assert!((t.expected_cycles() - direct).abs() < 1e-11 * direct);
    }
}
