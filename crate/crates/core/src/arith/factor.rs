//! Trial-division factorisation and the multiplicative functions built on it.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Primes are tabulated up to this bound.
pub const PRIME_TABLE_LIMIT: u64 = 1_000_000;
/// Largest input accepted by [`factorize`].
pub const FACTOR_LIMIT: u64 = 1_000_000_000_000;

/// All primes `<= limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn prime_table() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| primes_up_to(PRIME_TABLE_LIMIT))
}

/// Primes `p` with `R/2 < p <= R`.
pub fn primes_in_upper_half(r: u64) -> Vec<u64> {
    let all = if r <= PRIME_TABLE_LIMIT {
        let t = prime_table();
        let end = t.partition_point(|&p| p <= r);
        t[..end].to_vec()
    } else {
        primes_up_to(r)
    };
    all.into_iter().filter(|&p| 2 * p > r).collect()
}

/// Prime factorisation as ascending `(p, v_p)` pairs. `factorize(1)` is empty.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n".into(),
            reason: "cannot factor 0".into(),
        });
    }
    if n > FACTOR_LIMIT {
        return Err(Error::Unfactored(n));
    }
    let mut m = n;
    let mut out = Vec::new();
    for &p in prime_table() {
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut v = 0;
            while m % p == 0 {
                m /= p;
                v += 1;
            }
            out.push((p, v));
        }
    }
    if m > 1 {
        out.push((m, 1));
    }
    Ok(out)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn euler_phi(q: u64) -> Result<u64> {
    Ok(factorize(q)?
        .iter()
        .map(|&(p, v)| (p - 1) * p.pow(v - 1))
        .product())
}

pub fn divisor_count(m: u64) -> Result<u64> {
    Ok(factorize(m)?.iter().map(|&(_, v)| v as u64 + 1).product())
}

/// Möbius function.
pub fn mobius(n: u64) -> Result<i64> {
    let f = factorize(n)?;
    if f.iter().any(|&(_, v)| v > 1) {
        Ok(0)
    } else if f.len() % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// All positive divisors in ascending order.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let mut out = vec![1u64];
    for (p, v) in factorize(n)? {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..v {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter {
            name: "k".into(),
            reason: "degree must be at least 2".into(),
        });
    }
    Ok(())
}

/// The k-radical `ϱ_k(d) = ∏ p^{⌈v_p(d)/k⌉}`, the least `m` with `d | m^k`.
pub fn k_radical(d: u64, k: u32) -> Result<u64> {
    check_k(k)?;
    Ok(factorize(d)?
        .iter()
        .map(|&(p, v)| p.pow(v.div_ceil(k)))
        .product())
}

/// Writes `d = d_1 d_2^2 ⋯ d_k^k` with `d_1 ⋯ d_{k−1}` squarefree and returns
/// `[d_1, …, d_k]`.
pub fn k_decomposition(d: u64, k: u32) -> Result<Vec<u64>> {
    check_k(k)?;
    let mut parts = vec![1u64; k as usize];
    for (p, v) in factorize(d)? {
        let (e, j) = (v / k, v % k);
        parts[k as usize - 1] *= p.pow(e);
        if j > 0 {
            parts[j as usize - 1] *= p;
        }
    }
    Ok(parts)
}

/// `#{1 <= m <= M : d | m^k} = ⌊M / ϱ_k(d)⌋`.
pub fn count_multiples_pow(m_max: u64, d: u64, k: u32) -> Result<u64> {
    Ok(m_max / k_radical(d, k)?)
}

/// Smallest-prime-factor table for bulk factorisation of `1..=limit`.
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> u64 {
        self.spf.len() as u64 - 1
    }

    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            n /= p;
            match out.last_mut() {
                Some((q, v)) if *q == p => *v += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    pub fn k_radical(&self, d: u64, k: u32) -> u64 {
        self.factorize(d)
            .iter()
            .map(|&(p, v)| p.pow(v.div_ceil(k)))
            .product()
    }

    pub fn divisor_count(&self, m: u64) -> u64 {
        self.factorize(m).iter().map(|&(_, v)| v as u64 + 1).product()
    }
}

/// `Σ_{d <= D} d · ϱ_k(d)^{−j}`, which stays `≪ D^ε` once `j >= k+1`.
pub fn radical_series(d_max: u64, k: u32, j: u32) -> Result<f64> {
    check_k(k)?;
    let sieve = SpfSieve::new(d_max);
    Ok(crate::numeric::sum(
        (1..=d_max).map(|d| d as f64 * (sieve.k_radical(d, k) as f64).powi(-(j as i32))),
    ))
}

/// `Σ_{1 <= x < N^{1/k}} d(N − x^k)`.
pub fn divisor_shift_sum(n: u64, k: u32) -> Result<u64> {
    let mut total = 0;
    let mut x = 1u64;
    while let Some(p) = x.checked_pow(k) {
        if p >= n {
            break;
        }
        total += divisor_count(n - p)?;
        x += 1;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_values() {
        assert_eq!(euler_phi(12).unwrap(), 4);
        assert_eq!(divisor_count(12).unwrap(), 6);
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(factorize(360).unwrap(), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(999_999_000_001).unwrap().iter().map(|&(p, v)| p.pow(v)).product::<u64>(), 999_999_000_001);
        assert!(matches!(factorize(FACTOR_LIMIT + 1), Err(Error::Unfactored(_))));
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(mobius(30).unwrap(), -1);
        assert_eq!(mobius(12).unwrap(), 0);
    }

    #[test]
    fn radical_examples() {
        assert_eq!(k_radical(8, 2).unwrap(), 4);
        assert_eq!(k_radical(12, 3).unwrap(), 6);
        assert_eq!(k_decomposition(8, 2).unwrap(), vec![2, 2]);
        assert_eq!(k_decomposition(12, 3).unwrap(), vec![3, 2, 1]);
        assert_eq!(count_multiples_pow(10, 8, 2).unwrap(), 2);
        assert_eq!(count_multiples_pow(37, 1, 5).unwrap(), 37);
    }

    #[test]
    fn radical_matches_literal_extraction() {
        for d in 1..=10_000u64 {
            for k in 2..=14 {
                let parts = k_decomposition(d, k).unwrap();
                let rebuilt: u64 = parts.iter().enumerate().map(|(i, &x)| x.pow(i as u32 + 1)).product();
                assert_eq!(rebuilt, d);
                let head: u64 = parts[..k as usize - 1].iter().product();
                assert!(factorize(head).unwrap().iter().all(|&(_, v)| v == 1));
                assert_eq!(parts.iter().product::<u64>(), k_radical(d, k).unwrap());
            }
        }
    }

    #[test]
    fn primes_in_upper_half_examples() {
        assert_eq!(primes_in_upper_half(10), vec![7]);
        assert_eq!(primes_in_upper_half(12), vec![7, 11]);
        assert_eq!(primes_in_upper_half(7), vec![5, 7]);
        assert!(primes_in_upper_half(1).is_empty());
    }

    #[test]
    fn spf_agrees_with_trial_division() {
        let s = SpfSieve::new(5000);
        for n in 1..=5000 {
            assert_eq!(s.factorize(n), factorize(n).unwrap());
        }
    }

    #[test]
    fn divisor_shift_sum_matches_double_loop() {
        let n = 10_000u64;
        let mut brute = 0;
        let mut x = 1;
        while x * x < n {
            let m = n - x * x;
            brute += (1..=m).filter(|d| m % d == 0).count() as u64;
            x += 1;
        }
        assert_eq!(divisor_shift_sum(n, 2).unwrap(), brute);
    }

    /// The local growth exponent `log10(Σ(10D)/Σ(D))` falls with `D` and is
    /// below 0.1 by `D = 10^5`.
    #[test]
    fn radical_series_grows_slowly() {
        for k in [2u32, 3, 5] {
            let s: Vec<f64> = [1_000u64, 10_000, 100_000]
                .iter()
                .map(|&d| radical_series(d, k, k + 1).unwrap())
                .collect();
            let g1 = (s[1] / s[0]).log10();
            let g2 = (s[2] / s[1]).log10();
            assert!(g2 < g1 && g2 < 0.1, "k={k}: {g1} {g2}");
        }
    }

    proptest! {
        #[test]
        fn radical_is_multiplicative(a in 1u64..5000, b in 1u64..5000, k in 2u32..15) {
            prop_assume!(gcd(a, b) == 1);
            prop_assert_eq!(k_radical(a * b, k).unwrap(), k_radical(a, k).unwrap() * k_radical(b, k).unwrap());
        }

        #[test]
        fn count_multiples_matches_loop(m in 0u64..3000, d in 1u64..500, k in 2u32..6) {
            let brute = (1..=m).filter(|&x| {
                let mut p = 1u128;
                for _ in 0..k { p = p * x as u128 % d as u128; }
                p == 0
            }).count() as u64;
            prop_assert_eq!(count_multiples_pow(m, d, k).unwrap(), brute);
        }
    }
}
