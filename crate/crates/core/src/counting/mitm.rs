//! Meet-in-the-middle: split the variables in two, tabulate the sums of
//! each half, and join on `m − a`.

use std::collections::HashMap;

use crate::counting::RepresentationTable;
use crate::error::{Error, Result};
use crate::params::GlobalParameters;
use crate::signature::{var_values, PowerSignature, VarRange};

/// Largest variable count for which every bipartition is tried.
const EXHAUSTIVE_SPLIT: usize = 20;

/// Indices of the two halves minimising the larger product of range sizes.
pub fn choose_split(sizes: &[u64]) -> (Vec<usize>, Vec<usize>) {
    let n = sizes.len();
    let logs: Vec<f64> = sizes.iter().map(|&s| (s.max(1) as f64).ln()).collect();
    let mask = if n <= EXHAUSTIVE_SPLIT {
        // The first variable stays on the left, so each split is seen once.
        (0u32..1 << n.saturating_sub(1))
            .map(|m| (m << 1) | 1)
            .min_by(|&a, &b| {
                let cost = |m: u32| {
                    let left: f64 = (0..n).filter(|i| m >> i & 1 == 1).map(|i| logs[i]).sum();
                    let right: f64 = logs.iter().sum::<f64>() - left;
                    left.max(right)
                };
                cost(a).total_cmp(&cost(b)).then(a.cmp(&b))
            })
            .unwrap_or(1)
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| logs[b].total_cmp(&logs[a]));
        let (mut l, mut r, mut m) = (0.0, 0.0, 0u32);
        for i in order {
            if l <= r {
                l += logs[i];
                m |= 1 << i;
            } else {
                r += logs[i];
            }
        }
        m
    };
    let left = (0..n).filter(|i| mask >> i & 1 == 1).collect();
    let right = (0..n).filter(|i| mask >> i & 1 == 0).collect();
    (left, right)
}

/// All sums `<= limit` of one value from each variable, with multiplicity.
pub fn side_sums(vars: &[&Vec<(u64, u64)>], limit: u64) -> HashMap<u64, u64> {
    let mut acc: HashMap<u64, u64> = HashMap::from([(0, 1)]);
    for vals in vars {
        let mut next = HashMap::with_capacity(acc.len() * 2);
        for (&s, &c) in &acc {
            for &(p, mult) in *vals {
                let t = s + p;
                if t > limit {
                    break;
                }
                *next.entry(t).or_insert(0) += c * mult;
            }
        }
        acc = next;
    }
    acc
}

/// Two tabulated halves of a signature.
#[derive(Debug, Clone)]
pub struct MeetInMiddle {
    limit: u64,
    /// Sorted `(sum, multiplicity)` of the half with fewer distinct sums.
    probe: Vec<(u64, u64)>,
    /// Hash table of the other half.
    table: HashMap<u64, u64>,
}

impl MeetInMiddle {
    pub fn new(sig: &PowerSignature, params: &GlobalParameters, limit: u64) -> Result<Self> {
        let mut vars = Vec::new();
        for (k, range) in sig.expanded() {
            if range == VarRange::Weighted {
                return Err(Error::InvalidParameter {
                    name: "signature".into(),
                    reason: "weighted ranges have no integer count".into(),
                });
            }
            let vals: Vec<(u64, u64)> = var_values(k, range, params, limit)?
                .into_iter()
                .filter(|v| v.power <= limit as u128)
                .map(|v| (v.power as u64, v.weight as u64))
                .collect();
            vars.push(vals);
        }
        let sizes: Vec<u64> = vars.iter().map(|v| v.len() as u64).collect();
        let (l, r) = choose_split(&sizes);
        let left = side_sums(&l.iter().map(|&i| &vars[i]).collect::<Vec<_>>(), limit);
        let right = side_sums(&r.iter().map(|&i| &vars[i]).collect::<Vec<_>>(), limit);
        let (probe, table) = if left.len() <= right.len() { (left, right) } else { (right, left) };
        let mut probe: Vec<(u64, u64)> = probe.into_iter().collect();
        probe.sort_unstable();
        Ok(Self { limit, probe, table })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Distinct sums in the two halves.
    pub fn side_sizes(&self) -> (usize, usize) {
        (self.probe.len(), self.table.len())
    }

    pub fn count(&self, m: u64) -> u64 {
        self.probe
            .iter()
            .take_while(|&&(a, _)| a <= m)
            .map(|&(a, c)| c * self.table.get(&(m - a)).copied().unwrap_or(0))
            .sum()
    }

    pub fn is_representable(&self, m: u64) -> bool {
        self.probe
            .iter()
            .take_while(|&&(a, _)| a <= m)
            .any(|&(a, _)| self.table.contains_key(&(m - a)))
    }

    /// Representability of every `0 <= m <= limit` as a bitset table.
    pub fn to_table(&self) -> RepresentationTable {
        RepresentationTable::from_predicate(self.limit, |m| self.is_representable(m))
    }

    /// `n` in `1..=limit` with no representation.
    pub fn exceptional(&self) -> Vec<u64> {
        (1..=self.limit).filter(|&m| !self.is_representable(m)).collect()
    }
}
