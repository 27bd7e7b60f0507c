//! Dense representation tables built by iterated additive convolution.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::GlobalParameters;
use crate::signature::{var_values, PowerSignature, VarRange};

pub const MAGIC: [u8; 4] = *b"CLRT";
pub const FORMAT_VERSION: u16 = 1;

/// Output cells handled per parallel work item.
const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableMode {
    /// Saturating 32-bit representation counts.
    Count,
    /// Representability only.
    Bitset,
}

impl TableMode {
    fn code(self) -> u16 {
        match self {
            TableMode::Count => 0,
            TableMode::Bitset => 1,
        }
    }
}

impl std::str::FromStr for TableMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(TableMode::Count),
            "bitset" => Ok(TableMode::Bitset),
            _ => Err(Error::Parse(format!("unknown table mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Cells {
    Count(Vec<u32>),
    Bitset(Vec<u64>),
}

/// Counts (or representability) of every `0 <= m <= limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationTable {
    limit: u64,
    cells: Cells,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionalSet {
    pub limit: u64,
    pub values: Vec<u64>,
    pub largest: Option<u64>,
}

/// Integer multiplicities for each variable, ordered by ascending support.
fn integral_values(sig: &PowerSignature, params: &GlobalParameters, limit: u64) -> Result<Vec<Vec<(usize, u64)>>> {
    let mut vars = Vec::new();
    for (k, range) in sig.expanded() {
        if range == VarRange::Weighted {
            return Err(Error::InvalidParameter {
                name: "signature".into(),
                reason: "weighted ranges have no integer table; use the weighted count".into(),
            });
        }
        let vals: Vec<(usize, u64)> = var_values(k, range, params, limit)?
            .into_iter()
            .filter(|v| v.power <= limit as u128)
            .map(|v| (v.power as usize, v.weight as u64))
            .collect();
        vars.push(vals);
    }
    vars.sort_by_key(|v| v.len());
    Ok(vars)
}

fn check_budget(limit: u64, params: &GlobalParameters) -> Result<()> {
    if limit.saturating_add(1) > params.table_budget {
        return Err(Error::RangeTooLarge {
            requested: limit.saturating_add(1),
            budget: params.table_budget,
        });
    }
    Ok(())
}

impl RepresentationTable {
    pub fn build(sig: &PowerSignature, params: &GlobalParameters, limit: u64, mode: TableMode) -> Result<Self> {
        check_budget(limit, params)?;
        let vars = integral_values(sig, params, limit)?;
        Ok(Self::from_variables(&vars, limit, mode))
    }

    /// Convolves in the given variable order; `vars[i]` holds `(x^k, multiplicity)`.
    pub fn from_variables(vars: &[Vec<(usize, u64)>], limit: u64, mode: TableMode) -> Self {
        let len = limit as usize + 1;
        let cells = match mode {
            TableMode::Count => {
                let mut counts = vec![0u32; len];
                counts[0] = 1;
                for vals in vars {
                    counts = convolve_counts(&counts, vals);
                }
                Cells::Count(counts)
            }
            TableMode::Bitset => {
                let mut bits = vec![0u64; len.div_ceil(64)];
                bits[0] = 1;
                for vals in vars {
                    bits = convolve_bits(&bits, vals, len);
                }
                Cells::Bitset(bits)
            }
        };
        Self { limit, cells }
    }

    /// Bitset table marking the `m` for which `representable(m)` holds.
    pub fn from_predicate(limit: u64, representable: impl Fn(u64) -> bool + Sync) -> Self {
        let len = limit as usize + 1;
        let bits: Vec<u64> = (0..len.div_ceil(64))
            .into_par_iter()
            .map(|w| {
                let mut word = 0u64;
                for b in 0..64 {
                    let m = w * 64 + b;
                    if m < len && representable(m as u64) {
                        word |= 1 << b;
                    }
                }
                word
            })
            .collect();
        Self {
            limit,
            cells: Cells::Bitset(bits),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn mode(&self) -> TableMode {
        match self.cells {
            Cells::Count(_) => TableMode::Count,
            Cells::Bitset(_) => TableMode::Bitset,
        }
    }

    pub fn is_representable(&self, m: u64) -> bool {
        match &self.cells {
            Cells::Count(c) => c[m as usize] > 0,
            Cells::Bitset(b) => b[(m / 64) as usize] >> (m % 64) & 1 == 1,
        }
    }

    /// Representation count, `None` in bitset mode.
    pub fn count(&self, m: u64) -> Option<u32> {
        match &self.cells {
            Cells::Count(c) => Some(c[m as usize]),
            Cells::Bitset(_) => None,
        }
    }

    /// Cells pinned at `u32::MAX`.
    pub fn saturated(&self) -> usize {
        match &self.cells {
            Cells::Count(c) => c.iter().filter(|&&v| v == u32::MAX).count(),
            Cells::Bitset(_) => 0,
        }
    }

    /// The representability projection as a bitset table.
    pub fn to_bitset(&self) -> Self {
        match &self.cells {
            Cells::Bitset(_) => self.clone(),
            Cells::Count(c) => {
                let mut bits = vec![0u64; c.len().div_ceil(64)];
                for (m, &v) in c.iter().enumerate() {
                    if v > 0 {
                        bits[m / 64] |= 1 << (m % 64);
                    }
                }
                Self {
                    limit: self.limit,
                    cells: Cells::Bitset(bits),
                }
            }
        }
    }

    /// Whether both tables mark the same cells representable.
    pub fn same_support(&self, other: &Self) -> bool {
        self.limit == other.limit && self.to_bitset().cells == other.to_bitset().cells
    }

    pub fn exceptional(&self) -> ExceptionalSet {
        let values: Vec<u64> = (1..=self.limit).filter(|&m| !self.is_representable(m)).collect();
        ExceptionalSet {
            limit: self.limit,
            largest: values.last().copied(),
            values,
        }
    }

    /// 16-byte header (magic, version, mode, limit) then little-endian cells.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&self.mode().code().to_le_bytes())?;
        w.write_all(&self.limit.to_le_bytes())?;
        let mut buf = Vec::new();
        match &self.cells {
            Cells::Count(c) => c.iter().for_each(|v| buf.extend_from_slice(&v.to_le_bytes())),
            Cells::Bitset(b) => b.iter().for_each(|v| buf.extend_from_slice(&v.to_le_bytes())),
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if header[..4] != MAGIC {
            return Err(Error::Parse("not a representation table".into()));
        }
        let version = u16::from_le_bytes([header[4], header[5]]);
        if version != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported table version {version}")));
        }
        let mode = u16::from_le_bytes([header[6], header[7]]);
        let limit = u64::from_le_bytes(header[8..16].try_into().expect("8 bytes"));
        let len = usize::try_from(limit).map_err(|_| Error::Parse("limit too large".into()))? + 1;
        let mut data = Vec::new();
        r.read_to_end(&mut data)?;
        let cells = match mode {
            0 if data.len() == 4 * len => Cells::Count(
                data.chunks_exact(4)
                    .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
                    .collect(),
            ),
            1 if data.len() == 8 * len.div_ceil(64) => Cells::Bitset(
                data.chunks_exact(8)
                    .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
                    .collect(),
            ),
            0 | 1 => return Err(Error::Parse("table payload has the wrong length".into())),
            _ => return Err(Error::Parse(format!("unknown table mode {mode}"))),
        };
        Ok(Self { limit, cells })
    }
}

fn convolve_counts(old: &[u32], vals: &[(usize, u64)]) -> Vec<u32> {
    let len = old.len();
    let mut out = vec![0u32; len];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let base = ci * CHUNK;
        let mut acc = vec![0u64; chunk.len()];
        for &(p, mult) in vals {
            if p >= base + chunk.len() {
                continue;
            }
            let start = base.max(p);
            for m in start..base + chunk.len() {
                acc[m - base] = acc[m - base].saturating_add(mult * old[m - p] as u64);
            }
        }
        for (c, a) in chunk.iter_mut().zip(acc) {
            *c = a.min(u32::MAX as u64) as u32;
        }
    });
    out
}

fn convolve_bits(old: &[u64], vals: &[(usize, u64)], len: usize) -> Vec<u64> {
    let words = old.len();
    let mut out = vec![0u64; words];
    out.par_chunks_mut(CHUNK / 64).enumerate().for_each(|(ci, chunk)| {
        let base = ci * (CHUNK / 64);
        for &(p, mult) in vals {
            if mult == 0 {
                continue;
            }
            let (ws, bs) = (p / 64, (p % 64) as u32);
            for (i, word) in chunk.iter_mut().enumerate() {
                let w = base + i;
                if w < ws {
                    continue;
                }
                let src = w - ws;
                let mut v = old[src] << bs;
                if bs > 0 && src > 0 {
                    v |= old[src - 1] >> (64 - bs);
                }
                *word |= v;
            }
        }
    });
    let spare = words * 64 - len;
    if spare > 0 {
        out[words - 1] &= u64::MAX >> spare;
    }
    out
}
