//! Experiment parameters: the target `n`, the smoothness bound, per-degree
//! ranges and the four arc thresholds.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{arc_exponents, solve_lambda_rho, PermissibleExponentTable};

pub const DEFAULT_LAMBDA: f64 = 0.9155538;
pub const DEFAULT_N: u64 = 1_000_000;
pub const DEFAULT_R: u64 = 100;
pub const DEFAULT_PRIME_COUNT: u32 = 2;
pub const DEFAULT_NU: f64 = 0.01;
pub const DEFAULT_A: f64 = 3.0;
pub const DEFAULT_ETA_INV: u64 = 1000;
pub const DEFAULT_TABLE_BUDGET: u64 = 100_000_000;

/// Degrees whose sums are prime products.
pub const PRIME_PRODUCT_DEGREES: std::ops::RangeInclusive<u32> = 5..=11;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalParameters {
    pub n: u64,
    pub lambda: f64,
    pub r: u64,
    /// Formal only; desk runs set `r` directly.
    pub eta_inv: u64,
    /// Number of prime factors in the products for degrees 5..=11.
    pub r_k: BTreeMap<u32, u32>,
    pub nu: f64,
    pub a: f64,
    pub table_budget: u64,
    pub smooth_budget: u64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
}

/// `n^{1/k}`, exact when `n` is a perfect k-th power.
pub fn int_root(n: u64, k: u32) -> f64 {
    let x = (n as f64).powf(1.0 / k as f64);
    let r = x.round();
    if (r as u128).checked_pow(k) == Some(n as u128) {
        r
    } else {
        x
    }
}

impl GlobalParameters {
    pub fn new(n: u64) -> Result<Self> {
        Self::builder(n).build()
    }

    pub fn builder(n: u64) -> ParamsBuilder {
        ParamsBuilder::new(n)
    }

    /// `X_k = n^{1/k}`.
    pub fn x(&self, k: u32) -> f64 {
        int_root(self.n, k)
    }

    /// `Y_k = n^{λ/k}`.
    pub fn y(&self, k: u32) -> f64 {
        (self.n as f64).powf(self.lambda / k as f64)
    }

    pub fn prime_count(&self, k: u32) -> u32 {
        self.r_k.get(&k).copied().unwrap_or(DEFAULT_PRIME_COUNT)
    }

    /// `n^{ν−1}`, the clipping width of the starred arcs.
    pub fn star_width(&self) -> f64 {
        (self.n as f64).powf(self.nu - 1.0)
    }

    pub fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    /// Whether `Q₄ <= Q₃ <= Q₂ <= Q₁ <= √n/4` holds at this `n`.
    pub fn thresholds_ordered(&self) -> bool {
        self.q4 <= self.q3 && self.q3 <= self.q2 && self.q2 <= self.q1 && self.q1 <= self.sqrt_n() / 4.0
    }

    /// `Σ_{k=5}^{11} r_k`.
    pub fn total_prime_count(&self) -> u32 {
        PRIME_PRODUCT_DEGREES.map(|k| self.prime_count(k)).sum()
    }

    /// Config file text reproducing these parameters.
    pub fn to_config(&self) -> String {
        let mut out = format!(
            "n={}\nlambda={}\nR={}\neta_inv={}\nnu={}\nA={}\ntable_budget={}\nsmooth_budget={}\n",
            self.n, self.lambda, self.r, self.eta_inv, self.nu, self.a, self.table_budget, self.smooth_budget
        );
        for (k, c) in &self.r_k {
            out.push_str(&format!("r{k}={c}\n"));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ParamsBuilder {
    n: u64,
    lambda: f64,
    r: u64,
    eta_inv: u64,
    r_k: BTreeMap<u32, u32>,
    nu: f64,
    a: f64,
    table_budget: u64,
    smooth_budget: u64,
}

impl ParamsBuilder {
    pub fn new(n: u64) -> Self {
        Self {
            n,
            lambda: DEFAULT_LAMBDA,
            r: DEFAULT_R,
            eta_inv: DEFAULT_ETA_INV,
            r_k: PRIME_PRODUCT_DEGREES.map(|k| (k, DEFAULT_PRIME_COUNT)).collect(),
            nu: DEFAULT_NU,
            a: DEFAULT_A,
            table_budget: DEFAULT_TABLE_BUDGET,
            smooth_budget: crate::arith::smooth::SMOOTH_BUDGET,
        }
    }

    pub fn n(mut self, n: u64) -> Self {
        self.n = n;
        self
    }
    pub fn lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }
    pub fn smoothness(mut self, r: u64) -> Self {
        self.r = r;
        self
    }
    pub fn prime_count(mut self, k: u32, count: u32) -> Self {
        self.r_k.insert(k, count);
        self
    }
    pub fn nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }
    pub fn log_power(mut self, a: f64) -> Self {
        self.a = a;
        self
    }
    pub fn table_budget(mut self, budget: u64) -> Self {
        self.table_budget = budget;
        self
    }

    /// Applies `key=value` pairs; unknown keys are rejected by name.
    pub fn apply(mut self, key: &str, value: &str) -> Result<Self> {
        let bad = |reason: String| Error::InvalidParameter {
            name: key.to_string(),
            reason,
        };
        let int = |v: &str| v.parse::<u64>().map_err(|e| bad(format!("{v:?}: {e}")));
        let real = |v: &str| v.parse::<f64>().map_err(|e| bad(format!("{v:?}: {e}")));
        match key {
            "n" => self.n = int(value)?,
            "lambda" => self.lambda = real(value)?,
            "R" | "r" => self.r = int(value)?,
            "eta_inv" => self.eta_inv = int(value)?,
            "nu" => self.nu = real(value)?,
            "A" => self.a = real(value)?,
            "table_budget" => self.table_budget = int(value)?,
            "smooth_budget" => self.smooth_budget = int(value)?,
            _ => {
                let k = key
                    .strip_prefix('r')
                    .and_then(|d| d.parse::<u32>().ok())
                    .filter(|k| PRIME_PRODUCT_DEGREES.contains(k))
                    .ok_or_else(|| bad("unknown key".into()))?;
                let c = int(value)?;
                self.r_k.insert(k, u32::try_from(c).map_err(|_| bad("too large".into()))?);
            }
        }
        Ok(self)
    }

    pub fn build(self) -> Result<GlobalParameters> {
        let invalid = |name: &str, reason: &str| Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        };
        if self.n < 2 {
            return Err(invalid("n", "must be at least 2"));
        }
        if !(self.lambda > 2.0 / 3.0 && self.lambda < 1.0) {
            return Err(invalid("lambda", "must lie in (2/3, 1)"));
        }
        if self.r < 2 {
            return Err(invalid("R", "must be at least 2"));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(invalid("nu", "must lie in (0, 1)"));
        }
        if !(self.a > 0.0) {
            return Err(invalid("A", "must be positive"));
        }
        if self.r_k.values().any(|&c| c == 0) {
            return Err(invalid("r_k", "prime counts must be at least 1"));
        }
        let rho = solve_lambda_rho(&PermissibleExponentTable::bundled())?.rho;
        let exps = arc_exponents(rho);
        let nf = self.n as f64;
        Ok(GlobalParameters {
            n: self.n,
            lambda: self.lambda,
            r: self.r,
            eta_inv: self.eta_inv,
            r_k: self.r_k,
            nu: self.nu,
            a: self.a,
            table_budget: self.table_budget,
            smooth_budget: self.smooth_budget,
            q1: nf.powf(exps.q1_exp),
            q2: nf.powf(exps.q2_exp),
            q3: nf.powf(2f64.powi(-20)),
            q4: nf.ln().powf(self.a),
        })
    }
}

/// Parses `key=value` lines (`#` comments, blank lines ignored).
pub fn parse_config(text: &str) -> Result<ParamsBuilder> {
    let mut builder = ParamsBuilder::new(DEFAULT_N);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key=value, got {raw:?}", i + 1)))?;
        builder = builder.apply(key.trim(), value.trim())?;
    }
    Ok(builder)
}

pub fn load_config(path: &Path) -> Result<GlobalParameters> {
    parse_config(&std::fs::read_to_string(path)?)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = parse_config("").unwrap().build().unwrap();
        assert_eq!(p.lambda, 0.9155538);
        assert_eq!(p.n, 1_000_000);
        assert_eq!(p.x(2), 1000.0);
        assert_eq!(p.x(3), 100.0);
        assert_eq!(p.total_prime_count(), 14);
    }

    #[test]
    fn rejects_bad_values() {
        let err = parse_config("lambda = 0.5").unwrap().build().unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { ref name, .. } if name == "lambda"));
        assert!(parse_config("bogus=1").is_err());
        assert!(parse_config("n").is_err());
        assert!(parse_config("n=abc").is_err());
    }

    #[test]
    fn keys_and_round_trip() {
        let p = parse_config("# desk run\nn=4096\nR=30\nr7=3\nnu=0.05\nA=2\n").unwrap().build().unwrap();
        assert_eq!((p.n, p.r, p.prime_count(7), p.prime_count(5)), (4096, 30, 3, 2));
        assert_eq!(p.x(2), 64.0);
        assert_eq!(p.x(12), 2.0);
        let again = parse_config(&p.to_config()).unwrap().build().unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "n=1000000\nlambda=0.9\n").unwrap();
        let p = load_config(&path).unwrap();
        assert_eq!(p.lambda, 0.9);
        assert!(load_config(&dir.path().join("missing.cfg")).is_err());
    }

    #[test]
    fn thresholds_at_desk_scale() {
        let p = GlobalParameters::new(1_000_000).unwrap();
        assert!(p.q2 < p.q1 && p.q3 < p.q2);
        assert!(p.q1 > p.sqrt_n() / 4.0);
        assert!(!p.thresholds_ordered());
    }
}
