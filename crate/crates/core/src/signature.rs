//! Power signatures: which degrees appear, how many variables each, and what
//! range the variables run over.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::arith::{smooth_sieve, tau_table};
use crate::error::{Error, Result};
use crate::params::{int_root, GlobalParameters};
use crate::sums::{eval_weight, power};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VarRange {
    /// Positive integers up to the table limit.
    Plain,
    /// `X_k/2 <= x <= X_k` with weight `w(x/X_k)`.
    Weighted,
    /// `𝒜(Y_k, R)`.
    Smooth,
    /// Products of `primes` primes from `(R/2, R]`, counted with multiplicity.
    PrimeProduct { primes: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignatureTerm {
    pub k: u32,
    pub count: u32,
    pub range: VarRange,
}

/// A variable value `x` with its `x^k` and multiplicity or weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarValue {
    pub x: u64,
    pub power: u128,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerSignature {
    pub terms: Vec<SignatureTerm>,
}

impl PowerSignature {
    pub fn new(terms: Vec<SignatureTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Parse("empty signature".into()));
        }
        for t in &terms {
            if t.k < 2 || t.count < 1 {
                return Err(Error::InvalidParameter {
                    name: "signature".into(),
                    reason: format!("degree {} with count {}: degrees must be >= 2 and counts >= 1", t.k, t.count),
                });
            }
        }
        Ok(Self { terms })
    }

    /// `x_2² + x_3³ + ⋯ + x_14^14` over positive integers.
    pub fn unlike_powers() -> Self {
        Self::plain(&(2..=14).collect::<Vec<_>>())
    }

    /// One plain variable per listed degree.
    pub fn plain(degrees: &[u32]) -> Self {
        Self {
            terms: degrees
                .iter()
                .map(|&k| SignatureTerm { k, count: 1, range: VarRange::Plain })
                .collect(),
        }
    }

    /// The ranges the asymptotic formula is proved for: weighted squares and cubes,
    /// smooth variables for degrees 4, 12, 13, 14 and prime products for 5..=11.
    pub fn unlike_powers_mixed(params: &GlobalParameters) -> Self {
        let mut terms = vec![
            SignatureTerm { k: 2, count: 1, range: VarRange::Weighted },
            SignatureTerm { k: 3, count: 1, range: VarRange::Weighted },
            SignatureTerm { k: 4, count: 1, range: VarRange::Smooth },
        ];
        for k in crate::params::PRIME_PRODUCT_DEGREES {
            terms.push(SignatureTerm {
                k,
                count: 1,
                range: VarRange::PrimeProduct { primes: params.prime_count(k) },
            });
        }
        for k in 12..=14 {
            terms.push(SignatureTerm { k, count: 1, range: VarRange::Smooth });
        }
        Self { terms }
    }

    /// Total number of variables.
    pub fn variables(&self) -> u32 {
        self.terms.iter().map(|t| t.count).sum()
    }

    /// Each variable as a separate `(k, range)` entry.
    pub fn expanded(&self) -> Vec<(u32, VarRange)> {
        self.terms
            .iter()
            .flat_map(|t| std::iter::repeat((t.k, t.range)).take(t.count as usize))
            .collect()
    }

    /// Whether every variable carries an integer multiplicity.
    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|t| t.range != VarRange::Weighted)
    }
}

impl fmt::Display for PowerSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let suffix = match t.range {
                    VarRange::Plain => String::new(),
                    VarRange::Weighted => "w".into(),
                    VarRange::Smooth => "s".into(),
                    VarRange::PrimeProduct { primes } => format!("p{primes}"),
                };
                if t.count == 1 {
                    format!("{}{}", t.k, suffix)
                } else {
                    format!("{}{}x{}", t.k, suffix, t.count)
                }
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Comma-separated items `K[w|s|pR][xC]`: `2,3` is `x² + y³` over positive
/// integers, `2w,3w` the weighted pair, `3sx2` two smooth cubes, `5p2` a
/// product of two primes raised to the fifth power.
impl FromStr for PowerSignature {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |item: &str| Error::Parse(format!("bad signature item {item:?}"));
        let mut terms = Vec::new();
        for item in text.split(',').map(str::trim) {
            let (body, count) = match item.split_once('x') {
                Some((b, c)) => (b, c.parse::<u32>().map_err(|_| bad(item))?),
                None => (item, 1),
            };
            let digits = body.find(|c: char| !c.is_ascii_digit()).unwrap_or(body.len());
            let k = body[..digits].parse::<u32>().map_err(|_| bad(item))?;
            let range = match &body[digits..] {
                "" => VarRange::Plain,
                "w" => VarRange::Weighted,
                "s" => VarRange::Smooth,
                p if p.starts_with('p') => VarRange::PrimeProduct {
                    primes: p[1..].parse().map_err(|_| bad(item))?,
                },
                _ => return Err(bad(item)),
            };
            terms.push(SignatureTerm { k, count, range });
        }
        Self::new(terms)
    }
}

/// Values taken by one variable of degree `k`: `limit` caps `x^k` for plain
/// ranges; the other ranges come from `params`.
pub fn var_values(k: u32, range: VarRange, params: &GlobalParameters, limit: u64) -> Result<Vec<VarValue>> {
    let overflow = || Error::Infeasible(format!("x^{k} overflows"));
    let mk = |x: u64, weight: f64| -> Result<VarValue> {
        Ok(VarValue {
            x,
            power: power(x, k).ok_or_else(overflow)?,
            weight,
        })
    };
    match range {
        VarRange::Plain => {
            let top = int_root(limit, k).floor() as u64;
            let top = (top.saturating_sub(1)..=top + 1)
                .filter(|&x| power(x, k).is_some_and(|p| p <= limit as u128))
                .max()
                .unwrap_or(0);
            (1..=top).map(|x| mk(x, 1.0)).collect()
        }
        VarRange::Weighted => {
            let x_max = params.x(k);
            let lo = (x_max / 2.0).ceil().max(1.0) as u64;
            (lo..=x_max.floor() as u64)
                .map(|x| mk(x, eval_weight(x as f64 / x_max)))
                .collect()
        }
        VarRange::Smooth => smooth_sieve(params.y(k).floor().max(1.0) as u64, params.r)?
            .members()
            .iter()
            .map(|&x| mk(x, 1.0))
            .collect(),
        VarRange::PrimeProduct { primes } => {
            let table = tau_table(params.r, primes)?;
            if table.is_empty() {
                return Err(Error::NoPrimes(params.r));
            }
            table.iter().map(|(x, c)| mk(x, c as f64)).collect()
        }
    }
}
