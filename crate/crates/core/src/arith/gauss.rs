//! Complete exponential sums `S_k(q,a)`, their coprime restriction
//! `S_k*(q,a)`, and the multiplicative majorant `ω_k(q)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::factor::{factorize, gcd};
use crate::error::{Error, Result};
use crate::numeric::ComplexSum;

/// Default largest modulus for direct summation.
pub const MODULUS_BOUND: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModularSumValue {
    pub q: u64,
    pub a: u64,
    pub k: u32,
    pub re: f64,
    pub im: f64,
}

impl ModularSumValue {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

pub fn pow_mod(x: u64, k: u32, q: u64) -> u64 {
    let mut result = 1 % q;
    let mut base = x % q;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = (result as u128 * base as u128 % q as u128) as u64;
        }
        base = (base as u128 * base as u128 % q as u128) as u64;
        e >>= 1;
    }
    result
}

fn check_fraction(q: u64, a: u64) -> Result<()> {
    if q == 0 || q > MODULUS_BOUND {
        return Err(Error::InvalidParameter {
            name: "q".into(),
            reason: format!("modulus must lie in [1, {MODULUS_BOUND}]"),
        });
    }
    if gcd(a % q, q) != 1 {
        return Err(Error::NotReduced { q, a });
    }
    Ok(())
}

/// Histogram of `x^k mod q` over `x = 1..=q`, optionally restricted to
/// `gcd(x, q) = 1`, as `(residue, multiplicity)` pairs.
#[derive(Debug, Clone)]
pub struct PowerResidues {
    pub q: u64,
    pub k: u32,
    pub coprime_only: bool,
    residues: Vec<(u64, u64)>,
}

impl PowerResidues {
    pub fn new(q: u64, k: u32, coprime_only: bool) -> Self {
        let mut hist = vec![0u64; q as usize];
        for x in 1..=q {
            if coprime_only && gcd(x, q) != 1 {
                continue;
            }
            hist[pow_mod(x, k, q) as usize] += 1;
        }
        let residues = hist
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(r, &c)| (r as u64, c))
            .collect();
        Self {
            q,
            k,
            coprime_only,
            residues,
        }
    }

    pub fn residues(&self) -> &[(u64, u64)] {
        &self.residues
    }

    /// `Σ_r c_r e(a r / q)` using a precomputed table of `e(j/q)`.
    pub fn eval_with(&self, a: u64, twiddle: &[Complex64]) -> Complex64 {
        let q = self.q as u128;
        let mut acc = ComplexSum::new();
        for &(r, c) in &self.residues {
            let idx = (a as u128 * r as u128 % q) as usize;
            acc.add(twiddle[idx] * c as f64);
        }
        acc.value()
    }

    pub fn eval(&self, a: u64) -> Complex64 {
        self.eval_with(a, &twiddles(self.q))
    }
}

/// `e(j/q)` for `j = 0..q`.
pub fn twiddles(q: u64) -> Vec<Complex64> {
    (0..q)
        .map(|j| crate::numeric::e(j as f64 / q as f64))
        .collect()
}

fn direct_sum(q: u64, a: u64, k: u32, coprime_only: bool) -> Complex64 {
    let mut acc = ComplexSum::new();
    for x in 1..=q {
        if coprime_only && gcd(x, q) != 1 {
            continue;
        }
        let r = (a as u128 * pow_mod(x, k, q) as u128 % q as u128) as u64;
        acc.add(crate::numeric::e(r as f64 / q as f64));
    }
    acc.value()
}

/// `S_k(q,a) = Σ_{x=1}^{q} e(a x^k / q)` by direct compensated summation.
pub fn complete_sum(q: u64, a: u64, k: u32) -> Result<ModularSumValue> {
    check_fraction(q, a)?;
    let z = direct_sum(q, a, k, false);
    Ok(ModularSumValue { q, a, k, re: z.re, im: z.im })
}

/// `S_k*(q,a)`: the same sum restricted to `gcd(x, q) = 1`.
pub fn coprime_sum(q: u64, a: u64, k: u32) -> Result<ModularSumValue> {
    check_fraction(q, a)?;
    let z = direct_sum(q, a, k, true);
    Ok(ModularSumValue { q, a, k, re: z.re, im: z.im })
}

/// `ω_k(q) = ∏_{p^{ku+v} ∥ q} ω_k(p^{ku+v})` with `1 <= v <= k`, where the
/// local factor is `k p^{−u−1/2}` for `v = 1` and `p^{−u−1}` otherwise.
pub fn omega_k(q: u64, k: u32) -> Result<f64> {
    let mut w = 1.0;
    for (p, e) in factorize(q)? {
        let (mut u, mut v) = (e / k, e % k);
        if v == 0 {
            u -= 1;
            v = k;
        }
        let pf = p as f64;
        w *= if v == 1 {
            k as f64 * pf.powf(-(u as f64) - 0.5)
        } else {
            pf.powi(-(u as i32) - 1)
        };
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MajorantRecord {
    /// `max |S_k(q,a)| / (q ω_k(q))`.
    pub ratio: f64,
    pub q: u64,
    pub a: u64,
    pub k: u32,
    pub abs_value: f64,
    /// `max |S_k(q,a)| / q`, which must not exceed 1.
    pub max_normalised: f64,
    /// Largest `|S_k(2,1)|` seen.
    pub s2_residual: f64,
    pub evaluations: u64,
}

fn better(a: MajorantRecord, b: MajorantRecord) -> MajorantRecord {
    let mut best = if b.ratio > a.ratio
        || (b.ratio == a.ratio && (b.q, b.k, b.a) < (a.q, a.k, a.a))
    {
        b
    } else {
        a
    };
    best.max_normalised = a.max_normalised.max(b.max_normalised);
    best.s2_residual = a.s2_residual.max(b.s2_residual);
    best.evaluations = a.evaluations + b.evaluations;
    best
}

/// Exhaustive scan of `|S_k(q,a)| / (q ω_k(q))` over `q <= q_max`,
/// `1 <= k <= k_max`, `(a,q) = 1`.
pub fn majorant_scan(q_max: u64, k_max: u32) -> Result<MajorantRecord> {
    let empty = MajorantRecord {
        ratio: 0.0,
        q: 1,
        a: 1,
        k: 1,
        abs_value: 0.0,
        max_normalised: 0.0,
        s2_residual: 0.0,
        evaluations: 0,
    };
    let per_q = (1..=q_max)
        .into_par_iter()
        .map(|q| -> Result<MajorantRecord> {
            let tw = twiddles(q);
            let units: Vec<u64> = (1..=q).filter(|&a| gcd(a, q) == 1).collect();
            let mut best = empty;
            for k in 1..=k_max {
                let omega = omega_k(q, k)?;
                let res = PowerResidues::new(q, k, false);
                for &a in &units {
                    let s = res.eval_with(a % q, &tw).norm();
                    let rec = MajorantRecord {
                        ratio: s / (q as f64 * omega),
                        q,
                        a,
                        k,
                        abs_value: s,
                        max_normalised: s / q as f64,
                        s2_residual: if q == 2 { s } else { 0.0 },
                        evaluations: 1,
                    };
                    best = better(best, rec);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_q.into_iter().fold(empty, better))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor::{divisors, mobius};
    use proptest::prelude::*;

    #[test]
    fn quadratic_gauss_sum() {
        let s = complete_sum(5, 1, 2).unwrap();
        assert!((s.re - 5f64.sqrt()).abs() < 1e-9 && s.im.abs() < 1e-9);
        for k in 1..=14 {
            assert!(complete_sum(2, 1, k).unwrap().abs() < 1e-12);
        }
        assert!(matches!(complete_sum(6, 3, 2), Err(Error::NotReduced { q: 6, a: 3 })));
    }

    #[test]
    fn residue_histogram_matches_direct() {
        for q in [7u64, 12, 64, 97, 360] {
            for k in [2u32, 3, 5] {
                let res = PowerResidues::new(q, k, false);
                let star = PowerResidues::new(q, k, true);
                for a in (1..=q).filter(|&a| gcd(a, q) == 1) {
                    assert!((res.eval(a) - complete_sum(q, a, k).unwrap().complex()).norm() < 1e-10);
                    assert!((star.eval(a) - coprime_sum(q, a, k).unwrap().complex()).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn omega_examples() {
        assert!((omega_k(4, 2).unwrap() - 0.5).abs() < 1e-15);
        for p in [2u64, 3, 5, 101] {
            assert!((omega_k(p, 3).unwrap() - 3.0 / (p as f64).sqrt()).abs() < 1e-15);
        }
        assert_eq!(omega_k(1, 5).unwrap(), 1.0);
        for q in 1..=10_000u64 {
            for k in 2..=14 {
                assert!((q as f64).powf(-0.5) <= omega_k(q, k).unwrap() * (1.0 + 1e-12));
            }
        }
    }

    /// For squarefree `q`: `S_k(q,a) = Σ_{d | q} S_k*(q/d, a d^{k−1})`,
    /// grouping `x` by `d = gcd(x, q)`.
    #[test]
    fn coprime_decomposition_on_squarefree_moduli() {
        for q in 1..=100u64 {
            if mobius(q).unwrap() == 0 {
                continue;
            }
            for k in [2u32, 3, 4] {
                for a in (1..=q).filter(|&a| gcd(a, q) == 1) {
                    let mut total = Complex64::new(0.0, 0.0);
                    for d in divisors(q).unwrap() {
                        let m = q / d;
                        let b = (a as u128 * pow_mod(d, k - 1, m) as u128 % m as u128) as u64;
                        let b = if m == 1 { 0 } else { b };
                        total += direct_sum(m, b, k, true);
                    }
                    let s = complete_sum(q, a, k).unwrap().complex();
                    assert!((total - s).norm() < 1e-9, "q={q} a={a} k={k}");
                }
            }
        }
    }

    #[test]
    fn unit_twists_preserve_modulus() {
        for q in 1..=200u64 {
            let units: Vec<u64> = (1..=q).filter(|&a| gcd(a, q) == 1).collect();
            for k in [2u32, 3, 6] {
                let res = PowerResidues::new(q, k, false);
                let tw = twiddles(q);
                for &a in units.iter().take(6) {
                    let s = res.eval_with(a % q, &tw).norm();
                    assert!((s - res.eval_with((a + q) % q, &tw).norm()).abs() < 1e-9);
                    for &u in units.iter().take(4) {
                        let b = (a as u128 * pow_mod(u, k, q) as u128 % q as u128) as u64;
                        assert!((s - res.eval_with(b, &tw).norm()).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn small_majorant_scan() {
        let rec = majorant_scan(64, 6).unwrap();
        assert!(rec.max_normalised <= 1.0 + 1e-12);
        assert!(rec.s2_residual < 1e-12);
        assert!(rec.ratio.is_finite() && rec.ratio > 0.0);
    }

    proptest! {
        #[test]
        fn sum_bounded_by_modulus(q in 1u64..400, a in 1u64..400, k in 1u32..15) {
            prop_assume!(gcd(a, q) == 1);
            let s = complete_sum(q, a, k).unwrap();
            prop_assert!(s.abs() <= q as f64 + 1e-9);
            prop_assert!(coprime_sum(q, a, k).unwrap().abs() <= q as f64 + 1e-9);
        }
    }
}
