//! Smooth numbers and prime-product multiplicities.

use std::collections::BTreeMap;

use crate::arith::factor::{primes_in_upper_half, primes_up_to};
use crate::error::{Error, Result};

/// Default ceiling on `P` for a single in-memory smooth enumeration.
pub const SMOOTH_BUDGET: u64 = 100_000_000;

/// The set `𝒜(P, R)` of `R`-smooth integers in `[1, P]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothSet {
    pub bound: u64,
    pub smoothness: u64,
    members: Vec<u64>,
}

impl SmoothSet {
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

pub fn smooth_sieve(p: u64, r: u64) -> Result<SmoothSet> {
    smooth_sieve_with_budget(p, r, SMOOTH_BUDGET)
}

/// Enumerates `𝒜(P, R)` by depth-first search over prime factors `<= R`.
pub fn smooth_sieve_with_budget(p: u64, r: u64, budget: u64) -> Result<SmoothSet> {
    if p == 0 || r == 0 {
        return Err(Error::InvalidParameter {
            name: if p == 0 { "P" } else { "R" }.into(),
            reason: "must be at least 1".into(),
        });
    }
    if p > budget {
        return Err(Error::RangeTooLarge {
            requested: p,
            budget,
        });
    }
    let primes = primes_up_to(r.min(p));
    let mut members = Vec::new();
    let mut stack = vec![(1u64, 0usize)];
    while let Some((x, start)) = stack.pop() {
        members.push(x);
        for (i, &q) in primes.iter().enumerate().skip(start) {
            match x.checked_mul(q) {
                Some(y) if y <= p => stack.push((y, i)),
                _ => break,
            }
        }
    }
    members.sort_unstable();
    Ok(SmoothSet {
        bound: p,
        smoothness: r,
        members,
    })
}

/// `τ_t(x)`: ordered `t`-tuples of primes in `(R/2, R]` with product `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeProductTable {
    pub r: u64,
    pub t: u32,
    counts: BTreeMap<u64, u64>,
}

impl PrimeProductTable {
    pub fn get(&self, x: u64) -> u64 {
        self.counts.get(&x).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&x, &c)| (x, c))
    }

    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn max_multiplicity(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Builds `τ_t` by `t`-fold convolution of the prime indicator on `(R/2, R]`.
pub fn tau_table(r: u64, t: u32) -> Result<PrimeProductTable> {
    if t == 0 {
        return Err(Error::InvalidParameter {
            name: "t".into(),
            reason: "must be at least 1".into(),
        });
    }
    let primes = primes_in_upper_half(r);
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    if !primes.is_empty() {
        counts.insert(1, 1);
        for _ in 0..t {
            let mut next = BTreeMap::new();
            for (&x, &c) in &counts {
                for &p in &primes {
                    let y = x.checked_mul(p).ok_or(Error::Infeasible(format!(
                        "prime products overflow u64 (R={r}, t={t})"
                    )))?;
                    *next.entry(y).or_insert(0) += c;
                }
            }
            counts = next;
        }
    }
    Ok(PrimeProductTable { r, t, counts })
}
