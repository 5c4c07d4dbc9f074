//! Random integers weighted by multiplicative functions, their prime-factor
//! statistics, and the permutation-side analogues under Ewens-type measures.

pub mod arith;
pub mod asymptotics;
pub mod error;
pub mod ewens;
pub mod harness;
pub mod limit_laws;
pub mod numeric;
pub mod rng;
pub mod sampler;
pub mod weights;

pub use arith::{build_spf, factorize, primes_in, FactorProfile, MemoryBudget, SpfTable};
pub use error::{Error, Result};
pub use weights::{
    build_weight_table, builtin_weight, MultiplicativeWeight, PolyTail, Regime, WeightSpec,
    WeightTable,
};
pub use sampler::{
    exact_distribution, exact_expectation, exact_pmf, nu_p_limit_pmf, sample_n, size_biased_prime, spectrum,
    ExactPmf, LimitPmf, LogPrimeSpectrum, Statistic, WeightedIntegerSampler,
};
