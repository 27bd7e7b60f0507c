//! Exponent bookkeeping.
//!
//! Every numerical constant of the argument is a closed-form function of a
//! small table of cited permissible exponents `λ_{k,s}`. This module stores
//! that table, reproduces each derived constant, and checks it against the
//! printed value at an explicit tolerance.
//!
//! Half-moments `s` and Hölder weights `s_k` are kept as exact rationals until
//! the final floating-point evaluation.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact rational used for half-moments and Hölder weights.
pub type Half = Ratio<i64>;

/// The bundled exponent table.
pub const BUNDLED_TABLE: &str = include_str!("../data/permissible_exponents.txt");

/// Degrees whose smooth Weyl sums enter through the prime-product sums `g_k`.
pub const K1: [u32; 7] = [5, 6, 7, 8, 9, 10, 11];
/// Degrees whose smooth Weyl sums enter through `f_k`.
pub const K2: [u32; 4] = [4, 12, 13, 14];

/// ρ as fixed for the `F_3 F` mean value. The computed ρ rounds up to
/// this, and the later bookkeeping uses the rounded value.
pub const STATED_RHO: f64 = 0.004453;

/// Tolerance for one-step quotients of printed inputs.
pub const TOL_QUOTIENT: f64 = 1e-7;
/// Tolerance for constants derived through several rounded inputs.
pub const TOL_DERIVED: f64 = 2e-6;
/// Tolerance for θ, σ and σ′.
pub const TOL_THETA: f64 = 5e-7;
/// δ₂ stacks three rounded inputs.
pub const TOL_DELTA2: f64 = 3e-6;

pub fn half(num: i64, den: i64) -> Half {
    Ratio::new(num, den)
}

fn ratio_f64(r: Half) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn fmt_half(s: Half) -> String {
    if *s.denom() == 1 {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Permissible exponents keyed by `(k, s)` where `2s` is the moment.
#[derive(Debug, Clone, PartialEq)]
pub struct PermissibleExponentTable {
    entries: BTreeMap<(u32, Half), f64>,
}

impl PermissibleExponentTable {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// The cited exponents shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TABLE).expect("bundled exponent table is well formed")
    }

    /// Parses the plain-text format: one `k, s_num, s_den, lambda` per line,
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Self::empty();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            let bad = |what: &str| Error::Parse(format!("line {}: {what}: {raw:?}", lineno + 1));
            if fields.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let k: u32 = fields[0].parse().map_err(|_| bad("degree"))?;
            let num: i64 = fields[1].parse().map_err(|_| bad("s numerator"))?;
            let den: i64 = fields[2].parse().map_err(|_| bad("s denominator"))?;
            let lambda: f64 = fields[3].parse().map_err(|_| bad("lambda"))?;
            if den <= 0 || num <= 0 {
                return Err(bad("s must be a positive fraction"));
            }
            table.insert(k, half(num, den), lambda)?;
        }
        Ok(table)
    }

    /// Serialises back to the plain-text format.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# permissible-exponents v1\n# k, s-numerator, s-denominator, lambda\n");
        for (&(k, s), &lambda) in &self.entries {
            out.push_str(&format!("{k}, {}, {}, {lambda}\n", s.numer(), s.denom()));
        }
        out
    }

    /// Inserts an entry, enforcing `s <= λ <= 2s`.
    pub fn insert(&mut self, k: u32, s: Half, lambda: f64) -> Result<()> {
        let sf = ratio_f64(s);
        if !(lambda >= sf && lambda <= 2.0 * sf) {
            return Err(Error::InvalidParameter {
                name: format!("lambda_{{{k},{}}}", fmt_half(s)),
                reason: format!("{lambda} outside [s, 2s] = [{sf}, {}]", 2.0 * sf),
            });
        }
        self.entries.insert((k, s), lambda);
        Ok(())
    }

    /// Overwrites an entry without the range check (sensitivity experiments).
    pub fn set_unchecked(&mut self, k: u32, s: Half, lambda: f64) {
        self.entries.insert((k, s), lambda);
    }

    pub fn remove(&mut self, k: u32, s: Half) -> Option<f64> {
        self.entries.remove(&(k, s))
    }

    pub fn get(&self, k: u32, s: Half) -> Result<f64> {
        self.entries
            .get(&(k, s))
            .copied()
            .ok_or_else(|| Error::UnknownExponent { k, s: fmt_half(s) })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, Half, f64)> + '_ {
        self.entries.iter().map(|(&(k, s), &l)| (k, s, l))
    }

    /// Every exponent shifted by `delta` (the `λ* = λ + 1e-10` variant).
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|(&key, &l)| (key, l + delta)).collect(),
        }
    }
}

/// `α_{k,s} = (2s − λ_{k,s}) / k`.
pub fn alpha_ks(k: u32, s: Half, table: &PermissibleExponentTable) -> Result<f64> {
    let lambda = table.get(k, s)?;
    Ok((2.0 * ratio_f64(s) - lambda) / k as f64)
}

/// Hölder exponents `s_k` over a set of degrees with one weight left free.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderSystem {
    fixed: BTreeMap<u32, Half>,
    free_index: u32,
    solved: Option<Half>,
}

impl HolderSystem {
    pub fn new(fixed: &[(u32, Half)], free_index: u32) -> Self {
        Self {
            fixed: fixed.iter().copied().filter(|&(k, _)| k != free_index).collect(),
            free_index,
            solved: None,
        }
    }

    /// `K₁` with `s_5=4, s_6=6, s_8=8, …, s_11=11` and `s_7` free.
    pub fn k1() -> Self {
        let fixed: Vec<(u32, Half)> = [(5, 4), (6, 6), (8, 8), (9, 9), (10, 10), (11, 11)]
            .iter()
            .map(|&(k, s)| (k, half(s, 1)))
            .collect();
        Self::new(&fixed, 7)
    }

    /// `K₂` with `s_12=13/2, s_13=7, s_14=15/2` and `s_4` free.
    pub fn k2() -> Self {
        Self::new(&[(12, half(13, 2)), (13, half(7, 1)), (14, half(15, 2))], 4)
    }

    pub fn free_index(&self) -> u32 {
        self.free_index
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.fixed.keys().copied().collect();
        d.push(self.free_index);
        d.sort_unstable();
        d
    }

    /// Weight for degree `k`; `None` for the free index before solving.
    pub fn weight(&self, k: u32) -> Option<Half> {
        if k == self.free_index {
            self.solved
        } else {
            self.fixed.get(&k).copied()
        }
    }

    pub fn solved_weight(&self) -> Option<Half> {
        self.solved
    }

    pub fn fixed_weights(&self) -> impl Iterator<Item = (u32, Half)> + '_ {
        self.fixed.iter().map(|(&k, &s)| (k, s))
    }

    /// `Σ 1/s_k` over all indices, including the free one once solved.
    pub fn reciprocal_sum(&self) -> Option<Half> {
        let fixed: Half = self.fixed.values().map(|s| s.recip()).sum();
        self.solved.map(|s| fixed + s.recip())
    }
}

/// Solves `Σ 1/s_k = 1` for the free weight and stores it.
pub fn solve_holder(system: &mut HolderSystem) -> Result<Half> {
    let fixed: Half = system.fixed.values().map(|s| s.recip()).sum();
    if fixed >= half(1, 1) {
        return Err(Error::InfeasibleHolder {
            sum: ratio_f64(fixed),
        });
    }
    let s = (half(1, 1) - fixed).recip();
    system.solved = Some(s);
    Ok(s)
}

/// `α(K₁)`: each fixed degree contributes `α_{k,s_k}/s_k`; the free degree
/// interpolates between the two neighbouring integer moments
/// `m = ⌊s⌋` and `m+1` with weights `(m+1)/s − 1` and `1 − m/s`.
pub fn alpha_k1(table: &PermissibleExponentTable, system: &HolderSystem) -> Result<f64> {
    let s_free = system.solved_weight().ok_or(Error::HolderUnsolved)?;
    let mut total = 0.0;
    for (k, s) in system.fixed_weights() {
        total += alpha_ks(k, s, table)? / ratio_f64(s);
    }
    let lower = s_free.floor();
    let upper = lower + 1;
    let sf = ratio_f64(s_free);
    let lf = ratio_f64(lower);
    let kf = system.free_index();
    total += ((lf + 1.0) / sf - 1.0) * alpha_ks(kf, lower, table)?;
    total += (1.0 - lf / sf) * alpha_ks(kf, upper, table)?;
    Ok(total)
}

/// `α(K₂)`: fixed degrees contribute `α_{k,2s_k}/s_k`; the free quartic
/// contributes `α_{4,7/2}/s_4`, valid because `4 s_4 ≥ 7`.
pub fn alpha_k2(table: &PermissibleExponentTable, system: &HolderSystem) -> Result<f64> {
    let s_free = system.solved_weight().ok_or(Error::HolderUnsolved)?;
    let odd = half(7, 2);
    if s_free * 2 < odd {
        return Err(Error::InvalidParameter {
            name: "s_4".into(),
            reason: format!("4 s_4 = {} is below the seventh moment", ratio_f64(s_free * 4)),
        });
    }
    let mut total = 0.0;
    for (k, s) in system.fixed_weights() {
        total += alpha_ks(k, s * 2, table)? / ratio_f64(s);
    }
    total += alpha_ks(system.free_index(), odd, table)? / ratio_f64(s_free);
    Ok(total)
}

const THETA_PAIRS: [(u32, u32); 3] = [(13, 4), (14, 4), (14, 5)];

/// `θ_{k,s}` and `σ_{k,s}` for `(k,s) ∈ {(13,4), (14,4), (14,5)}`.
pub fn theta_sigma(k: u32, s: u32, table: &PermissibleExponentTable) -> Result<(f64, f64)> {
    if !THETA_PAIRS.contains(&(k, s)) {
        return Err(Error::ThetaSigmaUndefined { k, s });
    }
    let l1 = table.get(k, half(s as i64, 1))?;
    let l2 = table.get(k, half(2 * s as i64, 1))?;
    Ok(theta_sigma_from(k, s, l1, l2))
}

fn theta_sigma_from(k: u32, s: u32, lambda_s: f64, lambda_2s: f64) -> (f64, f64) {
    let kf = k as f64;
    let gap = lambda_2s - 2.0 * lambda_s;
    let theta = (4.0 / kf) * gap / (kf + 1.0 + gap);
    let sigma = 0.25 + s as f64 * theta / 2.0 + (1.0 / kf - theta / 4.0) * lambda_s;
    (theta, sigma)
}

/// Both sides of the balancing equation that determines θ:
/// `1 + θ + (4/k − θ)λ_{k,s}` and `1 − ((k−1)/2)θ + ½(4/k − θ)λ_{k,2s}`.
pub fn theta_balance(k: u32, lambda_s: f64, lambda_2s: f64, theta: f64) -> (f64, f64) {
    let kf = k as f64;
    let lhs = 1.0 + theta + (4.0 / kf - theta) * lambda_s;
    let rhs = 1.0 - (kf - 1.0) / 2.0 * theta + 0.5 * (4.0 / kf - theta) * lambda_2s;
    (lhs, rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaPrimes {
    pub s13_4: f64,
    pub s14_4: f64,
    pub s14_5: f64,
    /// `σ′ < σ` for the three pairs, in the order above.
    pub below_sigma: [bool; 3],
}

/// `σ′_{k,4} = 1/k + θ_{k,4}/4 + 1/4 + λ_{k,3}/k` and
/// `σ′_{14,5} = 1/14 + θ_{14,5}/4 + σ_{14,4}`.
pub fn sigma_primes(table: &PermissibleExponentTable) -> Result<SigmaPrimes> {
    let prime4 = |k: u32| -> Result<f64> {
        let (theta, _) = theta_sigma(k, 4, table)?;
        let l3 = table.get(k, half(3, 1))?;
        Ok(1.0 / k as f64 + theta / 4.0 + 0.25 + l3 / k as f64)
    };
    let s13_4 = prime4(13)?;
    let s14_4 = prime4(14)?;
    let (theta145, sigma145) = theta_sigma(14, 5, table)?;
    let (_, sigma144) = theta_sigma(14, 4, table)?;
    let (_, sigma134) = theta_sigma(13, 4, table)?;
    let s14_5 = 1.0 / 14.0 + theta145 / 4.0 + sigma144;
    Ok(SigmaPrimes {
        s13_4,
        s14_4,
        s14_5,
        below_sigma: [s13_4 < sigma134, s14_4 < sigma144, s14_5 < sigma145],
    })
}

/// `1/4 + 1/12 + 1/13 + 1/14`, the Y-exponent mass of `f_4 f_12 f_13 f_14`.
fn k2_reciprocal_mass() -> f64 {
    0.25 + 1.0 / 12.0 + 1.0 / 13.0 + 1.0 / 14.0
}

/// `κ₀(λ) = 2/3 + 2λ(1/4 + 1/12 + 1/13 + 1/14)`.
pub fn kappa0(lambda: f64) -> f64 {
    2.0 / 3.0 + 2.0 * lambda * k2_reciprocal_mass()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaRho {
    pub u1: f64,
    pub u2: f64,
    pub lambda: f64,
    pub kappa0: f64,
    pub rho: f64,
    pub rho_prime: f64,
}

/// Balances the two leading terms of the Davenport bound to fix λ, then
/// evaluates ρ and the classical baseline ρ′.
pub fn solve_lambda_rho(table: &PermissibleExponentTable) -> Result<LambdaRho> {
    let l3 = |k: u32| table.get(k, half(3, 1));
    let mut u1 = 0.25;
    for k in 12..=14u32 {
        u1 += l3(k)? / (3.0 * k as f64);
    }
    let (_, sigma134) = theta_sigma(13, 4, table)?;
    let (_, sigma144) = theta_sigma(14, 4, table)?;
    let (_, sigma145) = theta_sigma(14, 5, table)?;
    let u2 = (0.25 + l3(12)? / 12.0) / 3.0 + sigma134 / 4.0 + sigma144 / 12.0 + sigma145 / 3.0;
    let lambda = 1.0 / (1.0 + u2 - u1);
    let k0 = kappa0(lambda);
    let rho = 1.0 / 3.0 + lambda * u1 - (k0 - 7.0 / 9.0);
    let mass = k2_reciprocal_mass();
    let lambda_baseline = (4.0 / 3.0) / (1.0 + mass);
    let rho_prime = 4.0 / 9.0 - lambda_baseline * mass;
    Ok(LambdaRho {
        u1,
        u2,
        lambda,
        kappa0: k0,
        rho,
        rho_prime,
    })
}

/// `δ₂ = 2/9 − 5ρ + λα₂ − λ`.
pub fn delta2(lambda: f64, rho: f64, alpha2: f64) -> f64 {
    2.0 / 9.0 - 5.0 * rho + lambda * alpha2 - lambda
}

/// Upper bound printed for the exponent of `Q₂`.
pub const Q2_EXPONENT_BOUND: f64 = 0.4533505;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcExponents {
    pub q1_exp: f64,
    pub q2_exp: f64,
    pub check: bool,
}

/// Exponents of `n` in `Q₁ = n^{1/2−1/36+ρ}` and `Q₂ = n^{4/9+2ρ}`; `check`
/// requires `4/9+2ρ < 0.4533505` and `4/9+2ρ = 1/2 − 2(1/36 − ρ)`.
pub fn arc_exponents(rho: f64) -> ArcExponents {
    let q1_exp = 0.5 - 1.0 / 36.0 + rho;
    let q2_exp = 4.0 / 9.0 + 2.0 * rho;
    let alt = 0.5 - 2.0 * (1.0 / 36.0 - rho);
    ArcExponents {
        q1_exp,
        q2_exp,
        check: q2_exp < Q2_EXPONENT_BOUND && (q2_exp - alt).abs() <= 1e-12,
    }
}

/// Every derived constant of the exponent bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentReport {
    pub alpha_ks: Vec<(u32, String, f64)>,
    pub s7: f64,
    pub s4: f64,
    pub alpha_k1: f64,
    pub alpha_k2: f64,
    pub delta1: f64,
    /// δ₂ with the stated ρ = 0.004453.
    pub delta2: f64,
    /// δ₂ with the freshly computed ρ.
    pub delta2_recomputed: f64,
    pub rho: f64,
    pub rho_prime: f64,
    pub theta_ks: Vec<(u32, u32, f64)>,
    pub sigma_ks: Vec<(u32, u32, f64)>,
    pub sigma_prime: SigmaPrimes,
    pub u1: f64,
    pub u2: f64,
    pub lambda: f64,
    pub kappa0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub q1_exp: f64,
    pub q2_exp: f64,
    pub arc_check: bool,
}

impl ExponentReport {
    pub fn compute(table: &PermissibleExponentTable) -> Result<Self> {
        let alpha_ks = table
            .iter()
            .map(|(k, s, _)| Ok((k, fmt_half(s), alpha_ks(k, s, table)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut k1 = HolderSystem::k1();
        let s7 = ratio_f64(solve_holder(&mut k1)?);
        let mut k2 = HolderSystem::k2();
        let s4 = ratio_f64(solve_holder(&mut k2)?);
        let a1 = alpha_k1(table, &k1)?;
        let a2 = alpha_k2(table, &k2)?;
        let lr = solve_lambda_rho(table)?;
        let mut theta_ks = Vec::new();
        let mut sigma_ks = Vec::new();
        for &(k, s) in &THETA_PAIRS {
            let (t, sg) = theta_sigma(k, s, table)?;
            theta_ks.push((k, s, t));
            sigma_ks.push((k, s, sg));
        }
        let arcs = arc_exponents(lr.rho);
        Ok(Self {
            alpha_ks,
            s7,
            s4,
            alpha_k1: a1,
            alpha_k2: a2,
            delta1: a1 - 0.75,
            delta2: delta2(lr.lambda, STATED_RHO, a2),
            delta2_recomputed: delta2(lr.lambda, lr.rho, a2),
            rho: lr.rho,
            rho_prime: lr.rho_prime,
            theta_ks,
            sigma_ks,
            sigma_prime: sigma_primes(table)?,
            u1: lr.u1,
            u2: lr.u2,
            lambda: lr.lambda,
            kappa0: lr.kappa0,
            kappa1: K1.iter().map(|&k| 2.0 / k as f64).sum(),
            kappa2: K2.iter().map(|&k| 4.0 / k as f64).sum(),
            q1_exp: arcs.q1_exp,
            q2_exp: arcs.q2_exp,
            arc_check: arcs.check,
        })
    }
}

/// How a computed value is compared with its printed counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `|computed − printed| ≤ tolerance`
    Within,
    /// `computed < printed`
    Below,
    /// `computed > printed`
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantCheck {
    pub name: String,
    pub computed: f64,
    pub paper_value: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl ConstantCheck {
    pub fn new(name: impl Into<String>, computed: f64, paper_value: f64, tolerance: f64, relation: Relation) -> Self {
        let pass = match relation {
            Relation::Within => (computed - paper_value).abs() <= tolerance,
            Relation::Below => computed < paper_value,
            Relation::Above => computed > paper_value,
        };
        Self {
            name: name.into(),
            computed,
            paper_value,
            tolerance,
            relation,
            pass,
        }
    }

    fn failed(name: impl Into<String>, paper_value: f64, tolerance: f64, relation: Relation) -> Self {
        Self {
            name: name.into(),
            computed: f64::NAN,
            paper_value,
            tolerance,
            relation,
            pass: false,
        }
    }
}

impl fmt::Display for ConstantCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.relation {
            Relation::Within => "~",
            Relation::Below => "<",
            Relation::Above => ">",
        };
        write!(
            f,
            "[{}] {:<28} {:>16.10} {op} {:<14} (tol {:e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.computed,
            self.paper_value,
            self.tolerance
        )
    }
}

struct Rows<'a> {
    table: &'a PermissibleExponentTable,
    rows: Vec<ConstantCheck>,
}

impl Rows<'_> {
    fn push(
        &mut self,
        name: &str,
        paper: f64,
        tol: f64,
        relation: Relation,
        f: impl FnOnce(&PermissibleExponentTable) -> Result<f64>,
    ) {
        let row = match f(self.table) {
            Ok(v) => ConstantCheck::new(name, v, paper, tol, relation),
            Err(_) => ConstantCheck::failed(name, paper, tol, relation),
        };
        self.rows.push(row);
    }
}

fn solved(mut system: HolderSystem) -> Result<HolderSystem> {
    solve_holder(&mut system)?;
    Ok(system)
}

/// One row per printed constant. Missing inputs yield failed rows.
pub fn verify_all(table: &PermissibleExponentTable) -> Vec<ConstantCheck> {
    use Relation::*;
    let mut r = Rows {
        table,
        rows: Vec::new(),
    };

    r.push("s_7", 6.3974151, TOL_QUOTIENT, Within, |_| {
        Ok(ratio_f64(solve_holder(&mut HolderSystem::k1())?))
    });
    let printed_alphas: [(u32, i64, i64, f64); 12] = [
        (5, 4, 1, 0.7122687),
        (6, 6, 1, 0.7947394),
        (7, 6, 1, 0.7122311),
        (7, 7, 1, 0.7798443),
        (8, 8, 1, 0.7696422),
        (9, 9, 1, 0.7619441),
        (10, 10, 1, 0.7562432),
        (11, 11, 1, 0.7518888),
        (4, 7, 2, 0.787648),
        (12, 13, 1, 0.7824157),
        (13, 14, 1, 0.7772808),
        (14, 15, 1, 0.7729593),
    ];
    for (k, num, den, printed) in printed_alphas {
        let s = half(num, den);
        let tol = if (k, num) == (12, 13) { 2e-7 } else { TOL_QUOTIENT };
        r.push(&format!("alpha_{{{k},{}}}", fmt_half(s)), printed, tol, Within, |t| {
            alpha_ks(k, s, t)
        });
    }
    r.push("alpha(K1)", 0.7508985, TOL_DERIVED, Within, |t| alpha_k1(t, &solved(HolderSystem::k1())?));
    r.push("delta_1", 0.0008985, TOL_DERIVED, Within, |t| {
        Ok(alpha_k1(t, &solved(HolderSystem::k1())?)? - 0.75)
    });

    for (k, s, printed) in [(13, 4, 0.01721257), (14, 4, 0.01384513), (14, 5, 0.02117723)] {
        r.push(&format!("theta_{{{k},{s}}}"), printed, TOL_THETA, Within, |t| {
            Ok(theta_sigma(k, s, t)?.0)
        });
    }
    for (k, s, printed) in [(13, 4, 0.58202682), (14, 4, 0.5553779), (14, 5, 0.6482762)] {
        r.push(&format!("sigma_{{{k},{s}}}"), printed, TOL_THETA, Within, |t| {
            Ok(theta_sigma(k, s, t)?.1)
        });
    }
    r.push("sigma'_{13,4}", 0.5630657, TOL_THETA, Within, |t| Ok(sigma_primes(t)?.s13_4));
    r.push("sigma'_{14,4}", 0.5399863, TOL_THETA, Within, |t| Ok(sigma_primes(t)?.s14_4));
    r.push("sigma'_{14,5}", 0.6321008, TOL_THETA, Within, |t| Ok(sigma_primes(t)?.s14_5));
    for (i, (k, s)) in THETA_PAIRS.iter().enumerate() {
        r.push(&format!("sigma_{{{k},{s}}} - sigma'_{{{k},{s}}}"), 0.0, 0.0, Above, |t| {
            let sp = sigma_primes(t)?;
            let primes = [sp.s13_4, sp.s14_4, sp.s14_5];
            Ok(theta_sigma(*k, *s, t)?.1 - primes[i])
        });
    }

    r.push("u_1", 0.4827948, TOL_DERIVED, Within, |t| Ok(solve_lambda_rho(t)?.u1));
    r.push("u_2", 0.5750298, TOL_DERIVED, Within, |t| Ok(solve_lambda_rho(t)?.u2));
    r.push("lambda", 0.9155538, TOL_DERIVED, Within, |t| Ok(solve_lambda_rho(t)?.lambda));
    r.push("rho", 0.004453, TOL_DERIVED, Within, |t| Ok(solve_lambda_rho(t)?.rho));
    r.push("rho'", 0.0109875, TOL_DERIVED, Within, |t| Ok(solve_lambda_rho(t)?.rho_prime));

    r.push("4 s_4", 7.0179948, 1e-6, Within, |_| {
        Ok(4.0 * ratio_f64(solve_holder(&mut HolderSystem::k2())?))
    });
    r.push("alpha(K2)", 0.7834034, TOL_DERIVED, Within, |t| alpha_k2(t, &solved(HolderSystem::k2())?));
    r.push("delta_2", 0.001651382, TOL_DELTA2, Within, |t| {
        let lr = solve_lambda_rho(t)?;
        Ok(delta2(lr.lambda, STATED_RHO, alpha_k2(t, &solved(HolderSystem::k2())?)?))
    });
    r.push("delta_2 (computed rho)", 0.0, 0.0, Above, |t| {
        let lr = solve_lambda_rho(t)?;
        Ok(delta2(lr.lambda, lr.rho, alpha_k2(t, &solved(HolderSystem::k2())?)?))
    });
    r.push("4/9 + 2 rho", Q2_EXPONENT_BOUND, 0.0, Below, |t| {
        Ok(arc_exponents(solve_lambda_rho(t)?.rho).q2_exp)
    });
    r.push("4/9 + 2 rho_stated", Q2_EXPONENT_BOUND, 0.0, Below, |_| {
        Ok(arc_exponents(STATED_RHO).q2_exp)
    });
    r.push("(4/9+2rho) - (1/2-2(1/36-rho))", 0.0, 1e-12, Within, |t| {
        let rho = solve_lambda_rho(t)?.rho;
        Ok((4.0 / 9.0 + 2.0 * rho) - (0.5 - 2.0 * (1.0 / 36.0 - rho)))
    });

    // Margins under λ* = λ + 1e-10.
    let shifted = table.shifted(1e-10);
    let mut s = Rows {
        table: &shifted,
        rows: Vec::new(),
    };
    s.push("delta_1 (lambda+1e-10)", 0.0, 0.0, Above, |t| {
        Ok(alpha_k1(t, &solved(HolderSystem::k1())?)? - 0.75)
    });
    s.push("delta_2 (lambda+1e-10)", 0.0, 0.0, Above, |t| {
        let lr = solve_lambda_rho(t)?;
        Ok(delta2(lr.lambda, STATED_RHO, alpha_k2(t, &solved(HolderSystem::k2())?)?))
    });
    s.push("rho (lambda+1e-10)", 0.0, 0.0, Above, |t| Ok(solve_lambda_rho(t)?.rho));
    r.rows.extend(s.rows);
    r.rows
}

/// Overall verdict over a set of checks.
pub fn all_pass(rows: &[ConstantCheck]) -> bool {
    !rows.is_empty() && rows.iter().all(|r| r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table() -> PermissibleExponentTable {
        PermissibleExponentTable::bundled()
    }

    #[test]
    fn bundled_table_has_all_cited_values() {
        let t = table();
        assert_eq!(t.len(), 21);
        assert_eq!(t.get(5, half(4, 1)).unwrap(), 4.4386563);
        assert_eq!(t.get(4, half(7, 2)).unwrap(), 3.849408);
        assert_eq!(t.get(14, half(15, 1)).unwrap(), 19.1785686);
        for (_, s, l) in t.iter() {
            let sf = ratio_f64(s);
            assert!(sf <= l && l <= 2.0 * sf);
        }
    }

    #[test]
    fn text_round_trip() {
        let t = table();
        assert_eq!(PermissibleExponentTable::parse(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn parse_rejects_out_of_range_lambda() {
        assert!(PermissibleExponentTable::parse("5, 4, 1, 9.0").is_err());
        assert!(PermissibleExponentTable::parse("5, 4, 1").is_err());
    }

    #[test]
    fn alpha_examples() {
        let t = table();
        assert!((alpha_ks(5, half(4, 1), &t).unwrap() - 0.7122687).abs() <= 1e-7);
        assert!((alpha_ks(4, half(7, 2), &t).unwrap() - 0.787648).abs() <= 1e-12);
        let mut diag = PermissibleExponentTable::empty();
        diag.insert(6, half(3, 1), 6.0).unwrap();
        assert_eq!(alpha_ks(6, half(3, 1), &diag).unwrap(), 0.0);
        assert!(matches!(
            alpha_ks(3, half(2, 1), &t),
            Err(Error::UnknownExponent { .. })
        ));
    }

    #[test]
    fn holder_examples() {
        let mut k1 = HolderSystem::k1();
        let s7 = solve_holder(&mut k1).unwrap();
        assert_eq!(s7, half(3960, 619));
        assert!((ratio_f64(s7) - 6.3974151).abs() <= 1e-7);
        assert_eq!(k1.reciprocal_sum(), Some(half(1, 1)));

        let mut k2 = HolderSystem::k2();
        let s4 = solve_holder(&mut k2).unwrap();
        assert!((4.0 * ratio_f64(s4) - 7.0179948).abs() <= 1e-6);

        let mut pair = HolderSystem::new(&[(1, half(2, 1))], 2);
        assert_eq!(solve_holder(&mut pair).unwrap(), half(2, 1));

        let mut bad = HolderSystem::new(&[(1, half(2, 1)), (2, half(2, 1))], 3);
        assert!(matches!(solve_holder(&mut bad), Err(Error::InfeasibleHolder { .. })));
    }

    #[test]
    fn alpha_k1_and_delta1() {
        let t = table();
        let mut k1 = HolderSystem::k1();
        assert_eq!(alpha_k1(&t, &k1), Err(Error::HolderUnsolved));
        solve_holder(&mut k1).unwrap();
        let a = alpha_k1(&t, &k1).unwrap();
        assert!((a - 0.7508985).abs() <= 2e-6);
        assert!((a - 0.75 - 0.0008985).abs() <= 2e-6);
    }

    /// A table where every relevant α equals `value`.
    fn flat_table(value: f64) -> PermissibleExponentTable {
        let mut t = PermissibleExponentTable::empty();
        for (k, s) in [(5, 4), (6, 6), (7, 6), (7, 7), (8, 8), (9, 9), (10, 10), (11, 11), (12, 13), (13, 14), (14, 15)] {
            t.set_unchecked(k, half(s, 1), 2.0 * s as f64 - k as f64 * value);
        }
        t.set_unchecked(4, half(7, 2), 7.0 - 4.0 * value);
        t
    }

    #[test]
    fn convex_combination_of_equal_alphas() {
        let t = flat_table(0.75);
        let k1 = solved(HolderSystem::k1()).unwrap();
        assert!((alpha_k1(&t, &k1).unwrap() - 0.75).abs() < 1e-14);
        let t = flat_table(1.0 - 1e-9);
        let k2 = solved(HolderSystem::k2()).unwrap();
        assert!((alpha_k2(&t, &k2).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn theta_sigma_examples() {
        let t = table();
        let (th, sg) = theta_sigma(13, 4, &t).unwrap();
        assert!((th - 0.01721257).abs() <= 5e-7 && (sg - 0.58202682).abs() <= 5e-7);
        let (th, sg) = theta_sigma(14, 5, &t).unwrap();
        assert!((th - 0.02117723).abs() <= 5e-7 && (sg - 0.6482762).abs() <= 5e-7);
        assert_eq!(
            theta_sigma(12, 3, &t),
            Err(Error::ThetaSigmaUndefined { k: 12, s: 3 })
        );
        let (th, sg) = theta_sigma_from(13, 4, 4.2, 8.4);
        assert_eq!(th, 0.0);
        assert!((sg - (0.25 + 4.2 / 13.0)).abs() < 1e-15);
    }

    #[test]
    fn theta_balances_both_sides() {
        let t = table();
        for (k, s) in THETA_PAIRS {
            let l1 = t.get(k, half(s as i64, 1)).unwrap();
            let l2 = t.get(k, half(2 * s as i64, 1)).unwrap();
            let (theta, _) = theta_sigma(k, s, &t).unwrap();
            let (lhs, rhs) = theta_balance(k, l1, l2, theta);
            assert!((lhs - rhs).abs() <= 1e-12, "{k},{s}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn sigma_prime_examples() {
        let sp = sigma_primes(&table()).unwrap();
        assert!((sp.s13_4 - 0.5630657).abs() <= 5e-7);
        assert!((sp.s14_5 - 0.6321008).abs() <= 5e-7);
        assert_eq!(sp.below_sigma, [true, true, true]);
    }

    #[test]
    fn lambda_rho_examples() {
        let lr = solve_lambda_rho(&table()).unwrap();
        assert!((lr.u1 - 0.4827948).abs() <= 2e-6);
        assert!((lr.u2 - 0.5750298).abs() <= 2e-6);
        assert!((lr.lambda - 0.9155538).abs() <= 2e-6);
        assert!((lr.rho - 0.004453).abs() <= 2e-6);
        assert!((lr.rho_prime - 0.0109875).abs() <= 2e-6);
        assert!((lr.kappa0 - kappa0(lr.lambda)).abs() == 0.0);
    }

    #[test]
    fn alpha_k2_examples() {
        let t = table();
        let k2 = solved(HolderSystem::k2()).unwrap();
        assert!((alpha_k2(&t, &k2).unwrap() - 0.7834034).abs() <= 2e-6);
        assert!((alpha_ks(12, half(13, 1), &t).unwrap() - 0.7824157).abs() <= 2e-7);
    }

    #[test]
    fn delta2_examples() {
        let r = ExponentReport::compute(&table()).unwrap();
        assert!((r.delta2 - 0.001651382).abs() <= 3e-6);
        assert!((delta2(1.0, 0.0, 1.0) - 2.0 / 9.0).abs() < 1e-15);
        let (lambda, rho) = (0.9, 0.004);
        let root = 1.0 + 5.0 * rho / lambda - 2.0 / (9.0 * lambda);
        assert!(delta2(lambda, rho, root).abs() < 1e-15);
    }

    #[test]
    fn arc_exponent_examples() {
        let r = ExponentReport::compute(&table()).unwrap();
        let a = arc_exponents(r.rho);
        assert!(a.check && a.q2_exp < 0.4533505);
        assert!((a.q1_exp - 0.4767).abs() < 1e-4);
        assert!(((a.q1_exp - a.q2_exp) - (1.0 / 36.0 - r.rho)).abs() < 1e-14);
        assert_eq!(arc_exponents(0.0).q2_exp, 4.0 / 9.0);
    }

    #[test]
    fn report_viability() {
        let r = ExponentReport::compute(&table()).unwrap();
        assert!(r.lambda > 2.0 / 3.0 && r.lambda < 1.0);
        assert!(r.delta1 > 0.0 && r.delta2 > 0.0 && r.rho > 0.0);
        assert!(r.q2_exp < r.q1_exp);
        assert!((r.kappa1 - (2.0 / 5.0 + 2.0 / 6.0 + 2.0 / 7.0 + 2.0 / 8.0 + 2.0 / 9.0 + 2.0 / 10.0 + 2.0 / 11.0)).abs() < 1e-15);
    }

    #[test]
    fn verify_all_passes() {
        let rows = verify_all(&table());
        assert!(rows.len() >= 25);
        for row in &rows {
            assert!(row.pass, "{row}");
        }
    }

    #[test]
    fn perturbed_table_fails_alpha_k1() {
        let mut t = table();
        t.set_unchecked(5, half(4, 1), 4.4386563 + 0.1);
        let rows = verify_all(&t);
        let row = rows.iter().find(|r| r.name == "alpha(K1)").unwrap();
        assert!(!row.pass);
    }

    #[test]
    fn missing_entry_is_a_failed_row() {
        let mut t = table();
        t.remove(7, half(7, 1));
        let rows = verify_all(&t);
        let row = rows.iter().find(|r| r.name == "alpha(K1)").unwrap();
        assert!(!row.pass && row.computed.is_nan());
        assert!(rows.iter().any(|r| r.pass));
    }

    proptest! {
        #[test]
        fn alpha_decreases_in_lambda(l in 4.0f64..7.9, eps in 1e-6f64..0.05) {
            let mut a = PermissibleExponentTable::empty();
            a.insert(5, half(4, 1), l).unwrap();
            let mut b = PermissibleExponentTable::empty();
            b.insert(5, half(4, 1), l + eps).unwrap();
            prop_assert!(alpha_ks(5, half(4, 1), &b).unwrap() < alpha_ks(5, half(4, 1), &a).unwrap());
        }

        #[test]
        fn solved_holder_sums_to_one(ws in proptest::collection::vec(3i64..40, 1..6)) {
            let fixed: Vec<(u32, Half)> = ws.iter().enumerate()
                .map(|(i, &w)| (i as u32 + 1, half(w * ws.len() as i64, 2)))
                .collect();
            let mut sys = HolderSystem::new(&fixed, 99);
            if let Ok(s) = solve_holder(&mut sys) {
                let total: f64 = fixed.iter().map(|(_, w)| 1.0 / ratio_f64(*w)).sum::<f64>() + 1.0 / ratio_f64(s);
                prop_assert!((total - 1.0).abs() <= 1e-12);
                prop_assert_eq!(sys.reciprocal_sum(), Some(half(1, 1)));
                prop_assert!(s > half(1, 1));
            }
        }

        #[test]
        fn alpha_k1_is_convex(vals in proptest::collection::vec(0.5f64..0.99, 8)) {
            let pairs = [(5, 4), (6, 6), (7, 6), (7, 7), (8, 8), (9, 9), (10, 10), (11, 11)];
            let mut t = PermissibleExponentTable::empty();
            for (&(k, s), &v) in pairs.iter().zip(&vals) {
                t.set_unchecked(k, half(s, 1), 2.0 * s as f64 - k as f64 * v);
            }
            let k1 = solved(HolderSystem::k1()).unwrap();
            let a = alpha_k1(&t, &k1).unwrap();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(a >= lo - 1e-12 && a <= hi + 1e-12);
        }
    }
}
