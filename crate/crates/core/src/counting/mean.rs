//! Even moments of the generating functions as exact solution counts, and
//! weighted representation counts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::arcs::ArcSystem;
use crate::arith::{smooth_sieve, tau_table};
use crate::error::{Error, Result};
use crate::numeric::Neumaier;
use crate::params::GlobalParameters;
use crate::signature::{var_values, PowerSignature, VarValue};
use crate::sums::{eval_weight, moment_over_arcs, power, SumKind, WeylSum};

/// Upper bound on tuples enumerated per side of a join.
pub const JOIN_BUDGET: u128 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FactorSource {
    /// `F_k` over `X/2 <= x <= X`.
    Weighted { x: f64 },
    /// `f_k` over `𝒜(Y, R)`.
    Smooth { y: u64, r: u64 },
    /// `g_k` over products of `primes` primes from `(R/2, R]`.
    PrimeProduct { r: u64, primes: u32 },
}

/// `|sum|^moment` for one generating function; `moment` is even.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanFactor {
    pub k: u32,
    pub source: FactorSource,
    pub moment: u32,
}

impl MeanFactor {
    pub fn values(&self) -> Result<Vec<VarValue>> {
        let k = self.k;
        let mk = |x: u64, weight: f64| -> Result<VarValue> {
            Ok(VarValue {
                x,
                power: power(x, k).ok_or_else(|| Error::Infeasible(format!("{x}^{k} overflows")))?,
                weight,
            })
        };
        match self.source {
            FactorSource::Weighted { x } => {
                let lo = (x / 2.0).ceil().max(1.0) as u64;
                (lo..=x.floor() as u64).map(|v| mk(v, eval_weight(v as f64 / x))).collect()
            }
            FactorSource::Smooth { y, r } => smooth_sieve(y, r)?.members().iter().map(|&v| mk(v, 1.0)).collect(),
            FactorSource::PrimeProduct { r, primes } => {
                let t = tau_table(r, primes)?;
                if t.is_empty() {
                    return Err(Error::NoPrimes(r));
                }
                t.iter().map(|(v, c)| mk(v, c as f64)).collect()
            }
        }
    }

    pub fn weyl_sum(&self) -> Result<WeylSum> {
        let kind = match self.source {
            FactorSource::Weighted { .. } => SumKind::Weighted,
            FactorSource::Smooth { .. } => SumKind::Smooth,
            FactorSource::PrimeProduct { .. } => SumKind::PrimeProduct,
        };
        WeylSum::from_terms(kind, self.k, self.values()?.into_iter().map(|v| (v.x, v.weight)).collect())
    }

    fn integral(&self) -> bool {
        !matches!(self.source, FactorSource::Weighted { .. })
    }
}

impl fmt::Display for MeanFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.source {
            FactorSource::Weighted { x } => write!(f, "F{}[X={}]^{}", self.k, x, self.moment),
            FactorSource::Smooth { y, r } => write!(f, "f{}[Y={},R={}]^{}", self.k, y, r, self.moment),
            FactorSource::PrimeProduct { r, primes } => write!(f, "g{}[R={},r={}]^{}", self.k, r, primes, self.moment),
        }
    }
}

/// `∫₀¹ ∏ |sum_i|^{moment_i} dα`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanValueSpec {
    pub factors: Vec<MeanFactor>,
}

impl MeanValueSpec {
    pub fn new(factors: Vec<MeanFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Parse("empty mean-value spec".into()));
        }
        if let Some(f) = factors.iter().find(|f| f.moment == 0 || f.moment % 2 == 1) {
            return Err(Error::InvalidParameter {
                name: "moment".into(),
                reason: format!("{f}: moments must be even and positive"),
            });
        }
        Ok(Self { factors })
    }

    /// Variables on one side of the underlying equation.
    pub fn side(&self) -> Result<Vec<(MeanFactor, Vec<VarValue>)>> {
        let mut out = Vec::new();
        for f in &self.factors {
            let vals = f.values()?;
            for _ in 0..f.moment / 2 {
                out.push((*f, vals.clone()));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for MeanValueSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(" * "))
    }
}

/// Factors joined by `*`, each `F2[X=1000]^2`, `f3[Y=30,R=7]^4` or
/// `g5[R=40,r=2]^2`.
impl FromStr for MeanValueSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for item in text.split('*').map(str::trim) {
            let bad = |why: &str| Error::Parse(format!("mean-value factor {item:?}: {why}"));
            let (head, moment) = item.rsplit_once('^').ok_or_else(|| bad("missing ^moment"))?;
            let moment: u32 = moment.trim().parse().map_err(|_| bad("moment is not an integer"))?;
            let (name, args) = head
                .trim()
                .strip_suffix(']')
                .and_then(|h| h.split_once('['))
                .ok_or_else(|| bad("expected NAME[key=value,...]"))?;
            let mut kv = BTreeMap::new();
            for pair in args.split(',').filter(|s| !s.trim().is_empty()) {
                let (key, value) = pair.split_once('=').ok_or_else(|| bad("expected key=value"))?;
                kv.insert(key.trim().to_string(), value.trim().to_string());
            }
            let get = |key: &str| kv.get(key).ok_or_else(|| bad(&format!("missing {key}")));
            let int = |key: &str| -> Result<u64> { get(key)?.parse().map_err(|_| bad(&format!("{key} is not an integer"))) };
            let mut chars = name.chars();
            let kind = chars.next().ok_or_else(|| bad("empty name"))?;
            let k: u32 = chars.as_str().parse().map_err(|_| bad("degree is not an integer"))?;
            let source = match kind {
                'F' => FactorSource::Weighted {
                    x: get("X")?.parse().map_err(|_| bad("X is not a number"))?,
                },
                'f' => FactorSource::Smooth { y: int("Y")?, r: int("R")? },
                'g' => FactorSource::PrimeProduct {
                    r: int("R")?,
                    primes: int("r")? as u32,
                },
                _ => return Err(bad("kind must be F, f or g")),
            };
            factors.push(MeanFactor { k, source, moment });
        }
        Self::new(factors)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanValue {
    /// Exact count when every weight is an integer.
    pub exact: Option<u128>,
    pub value: f64,
    pub left_tuples: u128,
    pub right_tuples: u128,
}

/// Sparse distribution of `Σ x_i^{k_i}` with product weights.
fn distribution(vars: &[Vec<VarValue>]) -> HashMap<u128, (u128, f64)> {
    let mut acc: HashMap<u128, (u128, f64)> = HashMap::from([(0, (1, 1.0))]);
    for vals in vars {
        let mut next: HashMap<u128, (u128, f64)> = HashMap::with_capacity(acc.len() * vals.len());
        for (&s, &(c, w)) in &acc {
            for v in vals {
                let e = next.entry(s + v.power).or_insert((0, 0.0));
                e.0 += c * v.weight as u128;
                e.1 += w * v.weight;
            }
        }
        acc = next;
    }
    acc
}

fn tuple_count(vars: &[Vec<VarValue>]) -> u128 {
    vars.iter().map(|v| v.len() as u128).product()
}

/// Solutions of `Σ left = Σ right`, weighted by the product of all weights:
/// the left side is hashed, the right side streamed.
pub fn count_solutions(left: &[Vec<VarValue>], right: &[Vec<VarValue>], integral: bool) -> Result<MeanValue> {
    let (lt, rt) = (tuple_count(left), tuple_count(right));
    for (side, t) in [("left", lt), ("right", rt)] {
        if t > JOIN_BUDGET {
            let widest = left.iter().chain(right).map(Vec::len).max().unwrap_or(0);
            return Err(Error::Infeasible(format!(
                "{side} side enumerates {t} tuples (budget {JOIN_BUDGET}); widest factor has {widest} values"
            )));
        }
    }
    let table = distribution(left);
    let mut exact = 0u128;
    let mut value = Neumaier::new();
    // Stream the right side tuple by tuple.
    let mut idx = vec![0usize; right.len()];
    if right.iter().all(|v| !v.is_empty()) {
        loop {
            let (mut s, mut c, mut w) = (0u128, 1u128, 1.0f64);
            for (vals, &i) in right.iter().zip(&idx) {
                s += vals[i].power;
                c *= vals[i].weight as u128;
                w *= vals[i].weight;
            }
            if let Some(&(lc, lw)) = table.get(&s) {
                exact += lc * c;
                value.add(lw * w);
            }
            let mut j = 0;
            while j < idx.len() {
                idx[j] += 1;
                if idx[j] < right[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == idx.len() {
                break;
            }
        }
    }
    Ok(MeanValue {
        exact: integral.then_some(exact),
        value: if integral { exact as f64 } else { value.value() },
        left_tuples: lt,
        right_tuples: rt,
    })
}

/// `∫₀¹ ∏ |sum_i|^{moment_i}` as the number of solutions of the equation
/// with the same variables on both sides.
pub fn mean_value(spec: &MeanValueSpec) -> Result<MeanValue> {
    let side: Vec<Vec<VarValue>> = spec.side()?.into_iter().map(|(_, v)| v).collect();
    let integral = spec.factors.iter().all(MeanFactor::integral);
    count_solutions(&side, &side, integral)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestrictedMean {
    /// Quadrature over the major arcs.
    pub major: f64,
    /// Exact total minus the major part.
    pub minor: f64,
    /// Quadrature over the minor arcs, for the closure check.
    pub minor_quadrature: f64,
    pub exact: f64,
    /// `|major + minor_quadrature − exact| / exact`.
    pub closure_error: f64,
}

/// Splits a mean value over the arcs of `arcs`.
pub fn restricted_mean_value(spec: &MeanValueSpec, arcs: &ArcSystem) -> Result<RestrictedMean> {
    let exact = mean_value(spec)?.value;
    let sums: Vec<(WeylSum, u32)> = spec
        .factors
        .iter()
        .map(|f| Ok((f.weyl_sum()?, f.moment / 2)))
        .collect::<Result<_>>()?;
    let refs: Vec<(&WeylSum, u32)> = sums.iter().map(|(s, m)| (s, *m)).collect();
    let q = moment_over_arcs(&refs, arcs);
    Ok(RestrictedMean {
        major: q.major,
        minor: exact - q.major,
        minor_quadrature: q.minor,
        exact,
        closure_error: (q.total - exact).abs() / exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiagonalSplit {
    pub total: u128,
    /// Solutions with the two fourth powers equal.
    pub diagonal: u128,
    /// Solutions with distinct fourth powers, recounted pair by pair.
    pub off_diagonal: u128,
}

/// `x_1^4 − x_2^4 = Σ_{j≤s} (y_j^k − z_j^k)` with `x_i` from `quartic` and
/// `y_j, z_j` from `other`: the total against the split by `x_1 = x_2`.
pub fn diagonal_split(quartic: &MeanFactor, other: &MeanFactor, s: u32) -> Result<DiagonalSplit> {
    let q = MeanFactor { moment: 2, ..*quartic };
    let o = MeanFactor { moment: 2 * s, ..*other };
    let total = mean_value(&MeanValueSpec::new(vec![q, o])?)?
        .exact
        .ok_or_else(|| Error::InvalidParameter {
            name: "factor".into(),
            reason: "split check needs integer weights".into(),
        })?;
    let xs = q.values()?;
    let ys: Vec<Vec<VarValue>> = vec![o.values()?; s as usize];
    let r: HashMap<u128, (u128, f64)> = distribution(&ys);
    let x_mass: u128 = xs.iter().map(|v| (v.weight as u128).pow(2)).sum();
    let u: u128 = r.values().map(|&(c, _)| c * c).sum();
    let mut off = 0u128;
    for a in &xs {
        for b in &xs {
            if a.x == b.x {
                continue;
            }
            // Σz − Σy = b^4 − a^4, i.e. Σz = Σy + b^4 − a^4.
            let w = a.weight as u128 * b.weight as u128;
            for (&m, &(c, _)) in &r {
                let target = m as i128 + b.power as i128 - a.power as i128;
                if target >= 0 {
                    if let Some(&(c2, _)) = r.get(&(target as u128)) {
                        off += w * c * c2;
                    }
                }
            }
        }
    }
    Ok(DiagonalSplit {
        total,
        diagonal: x_mass * u,
        off_diagonal: off,
    })
}

/// Weighted counts `Σ ∏ weights` over representations of each `n` in `ns`.
pub fn weighted_counts(sig: &PowerSignature, params: &GlobalParameters, ns: &[u64]) -> Result<Vec<f64>> {
    let top = ns.iter().copied().max().unwrap_or(0);
    let mut vars: Vec<Vec<VarValue>> = sig
        .expanded()
        .into_iter()
        .map(|(k, range)| {
            var_values(k, range, params, top).map(|v| v.into_iter().filter(|x| x.power <= top as u128).collect())
        })
        .collect::<Result<_>>()?;
    vars.sort_by_key(Vec::len);
    let last = vars.pop().unwrap_or_default();
    let lookup: HashMap<u128, f64> = last.iter().map(|v| (v.power, v.weight)).collect();
    // Partial sums of the other variables, capped at the largest target.
    let mut partial: BTreeMap<u128, f64> = BTreeMap::from([(0, 1.0)]);
    for vals in &vars {
        let mut next = BTreeMap::new();
        for (&s, &w) in &partial {
            for v in vals {
                if s + v.power <= top as u128 {
                    *next.entry(s + v.power).or_insert(0.0) += w * v.weight;
                }
            }
        }
        if next.len() as u64 > params.table_budget {
            return Err(Error::RangeTooLarge {
                requested: next.len() as u64,
                budget: params.table_budget,
            });
        }
        partial = next;
    }
    Ok(ns
        .iter()
        .map(|&n| {
            let mut acc = Neumaier::new();
            for (&s, &w) in partial.range(..=n as u128) {
                if let Some(&lw) = lookup.get(&(n as u128 - s)) {
                    acc.add(w * lw);
                }
            }
            acc.value()
        })
        .collect())
}

pub fn weighted_count(n: u64, sig: &PowerSignature, params: &GlobalParameters) -> Result<f64> {
    Ok(weighted_counts(sig, params, &[n])?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sums::parseval_check;

    fn f3() -> MeanFactor {
        MeanFactor {
            k: 3,
            source: FactorSource::Smooth { y: 30, r: 7 },
            moment: 4,
        }
    }

    #[test]
    fn parse_spec() {
        let s: MeanValueSpec = "f3[Y=30,R=7]^4 * g5[R=40,r=2]^2 * F2[X=100]^2".parse().unwrap();
        assert_eq!(s.factors.len(), 3);
        assert_eq!(s.factors[0], f3());
        assert_eq!(s.to_string().parse::<MeanValueSpec>().unwrap(), s);
        for bad in ["f3[Y=30,R=7]^3", "f3[Y=30]^4", "h3[Y=1,R=2]^2", "f3^4", ""] {
            assert!(bad.parse::<MeanValueSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn fourth_moment_matches_quadruple_loop() {
        let xs = smooth_sieve(30, 7).unwrap().members().to_vec();
        let mut brute = 0u128;
        for &a in &xs {
            for &b in &xs {
                for &c in &xs {
                    for &d in &xs {
                        if a.pow(3) + b.pow(3) == c.pow(3) + d.pow(3) {
                            brute += 1;
                        }
                    }
                }
            }
        }
        let spec = MeanValueSpec::new(vec![f3()]).unwrap();
        assert_eq!(mean_value(&spec).unwrap().exact, Some(brute));
    }

    #[test]
    fn second_moments_are_diagonal() {
        let f = MeanFactor { moment: 2, ..f3() };
        let spec = MeanValueSpec::new(vec![f]).unwrap();
        assert_eq!(mean_value(&spec).unwrap().exact, Some(smooth_sieve(30, 7).unwrap().len() as u128));
        let g = MeanFactor {
            k: 5,
            source: FactorSource::PrimeProduct { r: 40, primes: 2 },
            moment: 2,
        };
        let tau = tau_table(40, 2).unwrap();
        let expect: u128 = tau.iter().map(|(_, c)| (c * c) as u128).sum();
        assert_eq!(mean_value(&MeanValueSpec::new(vec![g]).unwrap()).unwrap().exact, Some(expect));
    }

    #[test]
    fn swapping_sides_is_symmetric() {
        let a: Vec<VarValue> = MeanFactor { moment: 2, ..f3() }.values().unwrap();
        let b: Vec<VarValue> = MeanFactor {
            k: 2,
            source: FactorSource::Smooth { y: 40, r: 5 },
            moment: 2,
        }
        .values()
        .unwrap();
        let left = vec![a.clone(), b.clone(), b.clone()];
        let right = vec![b.clone(), a.clone(), b];
        let x = count_solutions(&left, &right, true).unwrap();
        let y = count_solutions(&right, &left, true).unwrap();
        assert_eq!(x.exact, y.exact);
    }

    #[test]
    fn parseval_closure_through_quadrature() {
        let spec: MeanValueSpec = "f3[Y=30,R=7]^4".parse().unwrap();
        let sum = spec.factors[0].weyl_sum().unwrap();
        let arcs = crate::arcs::build_raw(30u64.pow(3), 5.0, false, 1.0).unwrap();
        let r = restricted_mean_value(&spec, &arcs).unwrap();
        assert!(r.closure_error < 1e-4, "{r:?}");
        assert!(r.major > 0.0 && r.minor > 0.0);
        let wider = crate::arcs::build_raw(30u64.pow(3), 10.0, false, 1.0).unwrap();
        assert!(restricted_mean_value(&spec, &wider).unwrap().major >= r.major);
        assert!(parseval_check(&sum, &arcs).rel_error < 1e-8);
    }

    #[test]
    fn diagonal_split_adds_up() {
        let quartic = MeanFactor {
            k: 4,
            source: FactorSource::Smooth { y: 20, r: 5 },
            moment: 2,
        };
        let other = MeanFactor {
            k: 3,
            source: FactorSource::Smooth { y: 25, r: 5 },
            moment: 2,
        };
        let split = diagonal_split(&quartic, &other, 3).unwrap();
        assert_eq!(split.total, split.diagonal + split.off_diagonal);
        assert!(split.off_diagonal > 0);
    }

    #[test]
    fn weighted_pair_matches_double_loop() {
        let p = GlobalParameters::new(1_000_000).unwrap();
        let sig: PowerSignature = "2w,3w".parse().unwrap();
        let ns: Vec<u64> = (1_000_000..1_000_400).collect();
        let got = weighted_counts(&sig, &p, &ns).unwrap();
        for (i, &n) in ns.iter().enumerate() {
            let mut brute = 0.0;
            for x in 500..=1000u64 {
                for y in 50..=100u64 {
                    if x * x + y * y * y == n {
                        brute += eval_weight(x as f64 / 1000.0) * eval_weight(y as f64 / 100.0);
                    }
                }
            }
            assert!((got[i] - brute).abs() <= 1e-12 * brute.max(1e-300), "n={n}");
        }
        assert_eq!(weighted_count(5, &sig, &p).unwrap(), 0.0);
    }

    #[test]
    fn weighted_total_mass() {
        let p = GlobalParameters::new(10_000).unwrap();
        let sig: PowerSignature = "2w,3w".parse().unwrap();
        let ns: Vec<u64> = (0..=100 * 100 + 22 * 22 * 22).collect();
        let total: f64 = weighted_counts(&sig, &p, &ns).unwrap().iter().sum();
        let f2 = WeylSum::weighted(2, p.x(2)).unwrap().at_zero();
        let f3 = WeylSum::weighted(3, p.x(3)).unwrap().at_zero();
        assert!((total - f2 * f3).abs() < 1e-12 * f2 * f3);
    }

    #[test]
    fn oversized_join_is_refused() {
        let spec: MeanValueSpec = "f2[Y=100000,R=100]^8".parse().unwrap();
        assert!(matches!(mean_value(&spec), Err(Error::Infeasible(_))));
    }
}
