//! Exact integer and modular arithmetic under every exponential sum.

pub mod factor;
pub mod gauss;
pub mod smooth;

pub use factor::{
    count_multiples_pow, divisor_count, divisor_shift_sum, euler_phi, factorize, gcd, k_decomposition,
    k_radical, primes_in_upper_half, primes_up_to, radical_series, SpfSieve,
};
pub use gauss::{complete_sum, coprime_sum, majorant_scan, omega_k, MajorantRecord, ModularSumValue, PowerResidues};
pub use smooth::{smooth_sieve, smooth_sieve_with_budget, tau_table, PrimeProductTable, SmoothSet};
