//! Weyl sums `F_k`, `f_k`, `g_k`, the oscillatory integrals `v_k`, `v_k*`,
//! `ṽ_k`, and their major-arc approximants.

use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arcs::{ArcKind, ArcLabel, ArcSystem};
use crate::arith::{complete_sum, coprime_sum, euler_phi, smooth_sieve, tau_table};
use crate::error::{Error, Result};
use crate::numeric::{e, ComplexSum, Neumaier};
use crate::params::GlobalParameters;
use crate::quad::{adaptive, GaussLegendre, QuadResult};

/// Highest degree summed by recurrence.
const RECURRENCE_MAX_DEGREE: u32 = 3;

/// Terms between exact re-evaluations of the difference-table phasors; the
/// drift grows like `C(interval, k)` ulps.
fn resync_interval(k: u32) -> usize {
    match k {
        0..=2 => 64,
        _ => 16,
    }
}

/// The bump `exp(−1/(1/16 − (t − 3/4)²))` on `(1/2, 1)`, zero elsewhere.
pub fn eval_weight(t: f64) -> f64 {
    let d = t - 0.75;
    let g = 1.0 / 16.0 - d * d;
    if g <= 0.0 {
        0.0
    } else {
        (-1.0 / g).exp()
    }
}

/// `∫_{1/2}^{1} w(t) dt`.
pub fn weight_integral() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        let breaks: Vec<f64> = (0..=16).map(|i| 0.5 + i as f64 / 32.0).collect();
        adaptive(eval_weight, &breaks, 0.0, 1e-15, 10_000).value
    })
}

/// `frac(α·m)` evaluated exactly for the binary value of `α`, rounded once.
pub fn phase(alpha: f64, m: u128) -> f64 {
    if alpha == 0.0 || m == 0 {
        return 0.0;
    }
    let bits = alpha.abs().to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac_bits = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_bits == 0 {
        (frac_bits, -1074)
    } else {
        (frac_bits | (1u64 << 52), exp_bits - 1075)
    };
    if exp >= 0 {
        return 0.0;
    }
    let s = (-exp) as u32;
    let f = if s <= 64 {
        let mask = if s == 64 { u64::MAX as u128 } else { (1u128 << s) - 1 };
        let r = (mant as u128).wrapping_mul(m & mask) & mask;
        r as f64 * 2f64.powi(-(s as i32))
    } else if s <= 128 {
        let mask = if s == 128 { u128::MAX } else { (1u128 << s) - 1 };
        let mm = m & mask;
        let (lo, hi) = (mm & (u64::MAX as u128), mm >> 64);
        let hi_mask = if s - 64 >= 128 { u128::MAX } else { (1u128 << (s - 64)) - 1 };
        let part_hi = ((mant as u128).wrapping_mul(hi) & hi_mask) << 64;
        let r = (mant as u128).wrapping_mul(lo).wrapping_add(part_hi) & mask;
        (r as f64) * 2f64.powi(-(s as i32))
    } else {
        crate::numeric::frac_mul(alpha.abs(), m as f64)
    };
    let f = f - f.floor();
    if alpha < 0.0 && f != 0.0 {
        1.0 - f
    } else {
        f
    }
}

pub fn power(x: u64, k: u32) -> Option<u128> {
    (x as u128).checked_pow(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SumKind {
    /// `F_k`: bump-weighted over `X_k/2 <= x <= X_k`.
    Weighted,
    /// `f_k`: over the smooth set `𝒜(Y_k, R)`.
    Smooth,
    /// `g_k`: over products of `r_k` primes from `(R/2, R]`.
    PrimeProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub x: u64,
    pub power: u128,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumValue {
    pub re: f64,
    pub im: f64,
    pub terms: usize,
    pub at_zero: f64,
}

impl SumValue {
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// `Σ weight(x) e(x^k α)` over an explicit list of terms.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylSum {
    pub kind: SumKind,
    pub k: u32,
    terms: Vec<Term>,
    contiguous: bool,
    at_zero: f64,
}

impl WeylSum {
    /// Builds from `(x, weight)` pairs; `x` strictly increasing.
    pub fn from_terms(kind: SumKind, k: u32, items: Vec<(u64, f64)>) -> Result<Self> {
        let mut terms = Vec::with_capacity(items.len());
        for (x, weight) in items {
            let power = power(x, k).ok_or_else(|| Error::Infeasible(format!("{x}^{k} overflows 128 bits")))?;
            terms.push(Term { x, power, weight });
        }
        let contiguous = terms.windows(2).all(|w| w[1].x == w[0].x + 1)
            && terms
                .last()
                .map_or(true, |t| power(t.x + k as u64 + 64, k).is_some_and(|p| p < 1u128 << 126));
        let at_zero = crate::numeric::sum(terms.iter().map(|t| t.weight));
        Ok(Self {
            kind,
            k,
            terms,
            contiguous,
            at_zero,
        })
    }

    /// `F_k` with `X = x_max`: integers `X/2 <= x <= X`, weight `w(x/X)`.
    pub fn weighted(k: u32, x_max: f64) -> Result<Self> {
        let lo = (x_max / 2.0).ceil().max(1.0) as u64;
        let hi = x_max.floor() as u64;
        let items = (lo..=hi).map(|x| (x, eval_weight(x as f64 / x_max))).collect();
        Self::from_terms(SumKind::Weighted, k, items)
    }

    /// `f_k` over `𝒜(⌊Y⌋, R)`.
    pub fn smooth(k: u32, y: f64, r: u64) -> Result<Self> {
        let set = smooth_sieve(y.floor().max(1.0) as u64, r)?;
        Self::from_terms(SumKind::Smooth, k, set.members().iter().map(|&x| (x, 1.0)).collect())
    }

    /// `g_k = Σ τ_count(x) e(x^k α)` with primes in `(R/2, R]`.
    pub fn prime_product(k: u32, r: u64, count: u32) -> Result<Self> {
        let table = tau_table(r, count)?;
        if table.is_empty() {
            return Err(Error::NoPrimes(r));
        }
        Self::from_terms(SumKind::PrimeProduct, k, table.iter().map(|(x, c)| (x, c as f64)).collect())
    }

    pub fn for_kind(kind: SumKind, k: u32, params: &GlobalParameters) -> Result<Self> {
        match kind {
            SumKind::Weighted => Self::weighted(k, params.x(k)),
            SumKind::Smooth => Self::smooth(k, params.y(k), params.r),
            SumKind::PrimeProduct => Self::prime_product(k, params.r, params.prime_count(k)),
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at `α = 0`.
    pub fn at_zero(&self) -> f64 {
        self.at_zero
    }

    /// Whether the range holds at most one term (e.g. `X_k < 2`).
    pub fn degenerate(&self) -> bool {
        self.terms.len() <= 1
    }

    /// `Σ weight²`, the exact value of `∫₀¹ |sum|²`.
    pub fn l2_mass(&self) -> f64 {
        crate::numeric::sum(self.terms.iter().map(|t| t.weight * t.weight))
    }

    /// Spread of the exponents `x^k`.
    pub fn bandwidth(&self) -> u128 {
        match (self.terms.first(), self.terms.last()) {
            (Some(a), Some(b)) => b.power - a.power,
            _ => 0,
        }
    }

    pub fn value(&self, alpha: f64) -> Complex64 {
        if self.contiguous && self.k <= RECURRENCE_MAX_DEGREE && self.terms.len() > 2 * resync_interval(self.k) {
            self.value_recurrence(alpha)
        } else {
            self.value_direct(alpha)
        }
    }

    pub fn eval(&self, alpha: f64) -> SumValue {
        let z = self.value(alpha);
        SumValue {
            re: z.re,
            im: z.im,
            terms: self.terms.len(),
            at_zero: self.at_zero,
        }
    }

    pub fn value_direct(&self, alpha: f64) -> Complex64 {
        let mut acc = ComplexSum::new();
        for t in &self.terms {
            acc.add(e(phase(alpha, t.power)) * t.weight);
        }
        acc.value()
    }

    /// Consecutive `x`: phasors of the forward differences of `x^k α` are
    /// advanced by multiplication and re-synchronised every few terms.
    fn value_recurrence(&self, alpha: f64) -> Complex64 {
        let k = self.k as usize;
        let interval = resync_interval(self.k);
        let mut ph = [Complex64::new(0.0, 0.0); RECURRENCE_MAX_DEGREE as usize + 1];
        let mut acc = ComplexSum::new();
        for block in self.terms.chunks(interval) {
            let diffs = forward_differences(block[0].x, self.k);
            for j in 0..=k {
                ph[j] = e(phase(alpha, diffs[j]));
            }
            let mut part = Complex64::new(0.0, 0.0);
            for t in block {
                part += ph[0] * t.weight;
                for j in 0..k {
                    ph[j] *= ph[j + 1];
                }
            }
            acc.add(part);
        }
        acc.value()
    }
}

/// `Δ^j x^k` for `j = 0..=k`, `k <= 3`.
fn forward_differences(x: u64, k: u32) -> [u128; RECURRENCE_MAX_DEGREE as usize + 1] {
    let mut row = [0u128; RECURRENCE_MAX_DEGREE as usize + 1];
    for (i, v) in row.iter_mut().enumerate().take(k as usize + 1) {
        *v = ((x + i as u64) as u128).pow(k);
    }
    let mut out = row;
    for j in 1..=k as usize {
        for i in 0..=(k as usize - j) {
            row[i] = row[i + 1] - row[i];
        }
        out[j] = row[0];
    }
    out
}

/// Product of several sums at one point.
pub fn product_value(sums: &[WeylSum], alpha: f64) -> Complex64 {
    sums.iter().fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.value(alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Oscillatory {
    pub re: f64,
    pub im: f64,
    pub error: f64,
    /// Tolerance met.
    pub accurate: bool,
    /// Replaced by the endpoint term of integration by parts.
    pub asymptotic: bool,
}

impl Oscillatory {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    fn from_quad(r: QuadResult<Complex64>) -> Self {
        Self {
            re: r.value.re,
            im: r.value.im,
            error: r.error,
            accurate: r.converged,
            asymptotic: false,
        }
    }
}

/// Oscillation counts beyond this use the endpoint asymptotic.
const MAX_OSCILLATIONS: f64 = 2.0e5;

/// `∫_a^b amp(x) e(c x^k) dx` with panels no wider than a quarter period.
fn osc_integral(amp: impl Fn(f64) -> f64, k: u32, c: f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Oscillatory {
    let kf = k as f64;
    let (ua, ub) = (a.powf(kf), b.powf(kf));
    let oscillations = c.abs() * (ub - ua);
    let f = |x: f64| e(c * x.powf(kf)) * amp(x);
    if oscillations > MAX_OSCILLATIONS {
        let ibp = |x: f64| {
            let d = std::f64::consts::TAU * c * kf * x.powf(kf - 1.0);
            f(x) / Complex64::new(0.0, d)
        };
        let v = ibp(b) - ibp(a);
        return Oscillatory {
            re: v.re,
            im: v.im,
            error: v.norm(),
            accurate: true,
            asymptotic: true,
        };
    }
    let panels = (4.0 * oscillations).ceil().max(8.0) as usize;
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| (ua + (ub - ua) * i as f64 / panels as f64).powf(1.0 / kf))
        .map(|x| x.clamp(a, b))
        .collect();
    Oscillatory::from_quad(adaptive(f, &breaks, abs_tol, rel_tol, 4 * panels + 20_000))
}

/// `v_k(β) = ∫_{X/2}^{X} w(x/X) e(x^k β) dx`, to relative tolerance 1e-9
/// (absolute floor 1e-12·v_k(0)).
pub fn oscillatory_v(k: u32, beta: f64, x_max: f64) -> Oscillatory {
    // Substitute x = X t so the phase is (X^k β) t^k.
    let c = beta * x_max.powi(k as i32);
    let r = osc_integral(eval_weight, k, c, 0.5, 1.0, 1e-12 * weight_integral(), 1e-9);
    Oscillatory {
        re: r.re * x_max,
        im: r.im * x_max,
        error: r.error * x_max,
        accurate: r.accurate,
        asymptotic: r.asymptotic,
    }
}

/// `I_r(γ) = ∫_{[R/2,R]^r} amp(x) e((x_1⋯x_r)^k γ) dx` by nesting on the last
/// coordinate.
fn product_integral(k: u32, gamma: f64, r: u64, depth: usize, amp: &dyn Fn(f64) -> f64, tol: f64) -> Oscillatory {
    let (a, b) = (r as f64 / 2.0, r as f64);
    if depth == 1 {
        return osc_integral(amp, k, gamma, a, b, tol * (b - a), tol);
    }
    let kf = k as f64;
    let inner_span = b.powf(kf * (depth - 1) as f64);
    let oscillations = gamma.abs() * inner_span * (b.powf(kf) - a.powf(kf));
    let panels = (4.0 * oscillations).ceil().clamp(4.0, 4000.0) as usize;
    let breaks: Vec<f64> = (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect();
    let vol = (b - a).powi(depth as i32 - 1);
    let res = adaptive(
        |x: f64| product_integral(k, gamma * x.powf(kf), r, depth - 1, amp, tol).value() * amp(x),
        &breaks,
        tol * vol * (b - a),
        tol,
        4 * panels + 2000,
    );
    Oscillatory {
        re: res.value.re,
        im: res.value.im,
        error: res.error,
        accurate: res.converged,
        asymptotic: oscillations > MAX_OSCILLATIONS,
    }
}

fn check_dimension(count: u32) -> Result<()> {
    if count == 0 || count > 3 {
        return Err(Error::DimensionTooLarge(count as usize));
    }
    Ok(())
}

/// `v_k*(β) = (log R)^{−r} ∫_{[R/2,R]^r} e((x_1⋯x_r)^k β) dx`, `r <= 3`.
pub fn v_star(k: u32, beta: f64, r: u64, count: u32) -> Result<Oscillatory> {
    check_dimension(count)?;
    let one = |_: f64| 1.0;
    let raw = product_integral(k, beta, r, count as usize, &one, 1e-7);
    let s = (r as f64).ln().powi(-(count as i32));
    Ok(Oscillatory {
        re: raw.re * s,
        im: raw.im * s,
        error: raw.error * s,
        ..raw
    })
}

/// `ṽ_k(β) = ∫_{[R/2,R]^r} e((x_1⋯x_r)^k β) / ∏ log x_j dx`, `r <= 3`.
pub fn v_tilde(k: u32, beta: f64, r: u64, count: u32) -> Result<Oscillatory> {
    check_dimension(count)?;
    let amp = |x: f64| 1.0 / x.ln();
    Ok(product_integral(k, beta, r, count as usize, &amp, 1e-7))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ApproxKind {
    /// `F_k* = S_k(q,a) v_k(β) / q`.
    WeightedStar(u32),
    /// `g_k* = S_k*(q,a) v_k*(β) / φ(q)`.
    PrimeStar(u32),
    /// `g̃_k = S_k*(q,a) ṽ_k(β) / φ(q)`.
    PrimeTilde(u32),
    /// `f_k* = S_k(q,a) Y_k′ / q` with `Y_k′ = |𝒜(Y_k, R)|`.
    SmoothStar(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MajorArcApprox {
    pub kind: ApproxKind,
    pub re: f64,
    pub im: f64,
    pub label: ArcLabel,
    pub accurate: bool,
}

impl MajorArcApprox {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `Y_k′`: the cardinality of `𝒜(Y_k, R)`.
pub fn smooth_mass(k: u32, params: &GlobalParameters) -> Result<f64> {
    Ok(smooth_sieve(params.y(k).floor().max(1.0) as u64, params.r)?.len() as f64)
}

pub fn major_approx(kind: ApproxKind, label: &ArcLabel, params: &GlobalParameters) -> Result<MajorArcApprox> {
    if label.kind == ArcKind::Minor {
        return Err(Error::MinorArc);
    }
    let (q, a, beta) = (label.q, label.a, label.beta);
    let (z, accurate) = match kind {
        ApproxKind::WeightedStar(k) => {
            let s = complete_sum(q, a, k)?.complex();
            let v = oscillatory_v(k, beta, params.x(k));
            (s * v.value() / q as f64, v.accurate)
        }
        ApproxKind::PrimeStar(k) | ApproxKind::PrimeTilde(k) => {
            let s = coprime_sum(q, a, k)?.complex();
            let count = params.prime_count(k);
            let v = match kind {
                ApproxKind::PrimeStar(_) => v_star(k, beta, params.r, count)?,
                _ => v_tilde(k, beta, params.r, count)?,
            };
            (s * v.value() / euler_phi(q)? as f64, v.accurate)
        }
        ApproxKind::SmoothStar(k) => {
            let s = complete_sum(q, a, k)?.complex();
            (s * smooth_mass(k, params)? / q as f64, true)
        }
    };
    Ok(MajorArcApprox {
        kind,
        re: z.re,
        im: z.im,
        label: *label,
        accurate,
    })
}

/// Deterministic low-discrepancy pair `(frac(i/φ), frac(i√2))`.
pub fn kronecker(i: u64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let r2 = std::f64::consts::SQRT_2;
    ((i as f64 * inv_phi).fract(), (i as f64 * r2).fract())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaScan {
    /// `max |F_k − F_k*| / √Q`.
    pub ratio: f64,
    pub max_abs: f64,
    pub q: u64,
    pub a: u64,
    pub beta: f64,
    pub samples: usize,
}

/// `Δ_k(α) = F_k(α) − F_k*(α)` on `samples` major-arc points: sample `i`
/// takes arc `⌊frac(i/φ)·#arcs⌋` and offset `(2 frac(i√2) − 1)·halfwidth`.
pub fn delta_scan(k: u32, params: &GlobalParameters, q_param: f64, samples: usize) -> Result<DeltaScan> {
    let arcs = crate::arcs::build(params, q_param, false)?;
    let f = WeylSum::weighted(k, params.x(k))?;
    let rows: Vec<Result<(f64, u64, u64, f64)>> = (1..=samples as u64)
        .into_par_iter()
        .map(|i| {
            let (u, v) = kronecker(i);
            let arc = arcs.arcs[((u * arcs.arcs.len() as f64) as usize).min(arcs.arcs.len() - 1)];
            let beta = (2.0 * v - 1.0) * arc.halfwidth;
            let label = ArcLabel { q: arc.q, a: arc.a, beta, kind: ArcKind::Major };
            let approx = major_approx(ApproxKind::WeightedStar(k), &label, params)?;
            let exact = f.value(arc.center + beta);
            Ok(((exact - approx.value()).norm(), arc.q, arc.a, beta))
        })
        .collect();
    let mut best = DeltaScan { ratio: 0.0, max_abs: 0.0, q: 0, a: 0, beta: 0.0, samples };
    for r in rows {
        let (d, q, a, beta) = r?;
        if d > best.max_abs {
            best = DeltaScan { ratio: d / q_param.sqrt(), max_abs: d, q, a, beta, samples };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinorScan {
    /// `sup |F_k| / (F_k(0) Q^{−1/2})` over minor grid points.
    pub ratio: f64,
    pub sup: f64,
    pub alpha: f64,
    pub minor_points: usize,
}

/// Scans a uniform midpoint grid on the unit interval, keeping minor points.
pub fn minor_arc_sup_scan(k: u32, q_param: f64, params: &GlobalParameters, grid_size: usize) -> Result<MinorScan> {
    if grid_size < 1000 {
        return Err(Error::InvalidParameter {
            name: "grid_size".into(),
            reason: "must be at least 1000".into(),
        });
    }
    let arcs = crate::arcs::build(params, q_param, false)?;
    let f = WeylSum::weighted(k, params.x(k))?;
    let (lo, hi) = arcs.interval;
    let best = (0..grid_size)
        .into_par_iter()
        .filter_map(|i| {
            let alpha = lo + (hi - lo) * (i as f64 + 0.5) / grid_size as f64;
            (!arcs.classify(alpha).is_major()).then(|| (f.value(alpha).norm(), alpha))
        })
        .fold(|| (0.0f64, 0.0f64, 0usize), |acc, (v, a)| {
            if v > acc.0 {
                (v, a, acc.2 + 1)
            } else {
                (acc.0, acc.1, acc.2 + 1)
            }
        })
        .reduce(|| (0.0, 0.0, 0), |x, y| {
            let count = x.2 + y.2;
            if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                (y.0, y.1, count)
            } else {
                (x.0, x.1, count)
            }
        });
    Ok(MinorScan {
        ratio: best.0 / (f.at_zero() * q_param.powf(-0.5)),
        sup: best.0,
        alpha: best.1,
        minor_points: best.2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentIntegral {
    pub major: f64,
    pub minor: f64,
    pub total: f64,
}

/// Gauss–Legendre nodes per panel of width `1/(s · bandwidth)`.
pub const PANEL_NODES: usize = 10;

/// `∫ ∏ |sum_i|^{2 s_i}` over the unit interval, split into the major arcs
/// of `arcs` and the minor remainder. Panels are no wider than the shortest
/// period present in the integrand.
pub fn moment_over_arcs(factors: &[(&WeylSum, u32)], arcs: &ArcSystem) -> MomentIntegral {
    let band: f64 = factors.iter().map(|(f, s)| f.bandwidth() as f64 * *s as f64).sum();
    let width = 1.0 / band.max(1.0);
    let gl = GaussLegendre::new(PANEL_NODES);
    let panels = arcs.partition();
    let parts: Vec<(bool, f64)> = panels
        .par_iter()
        .map(|p| {
            let pieces = ((p.hi - p.lo) / width).ceil().max(1.0) as usize;
            let h = (p.hi - p.lo) / pieces as f64;
            let mut acc = Neumaier::new();
            for i in 0..pieces {
                let a = p.lo + i as f64 * h;
                let b = if i + 1 == pieces { p.hi } else { a + h };
                for (x, w) in gl.mapped(a, b) {
                    let mut m = 1.0;
                    for (f, s) in factors {
                        m *= f.value(x).norm_sqr().powi(*s as i32);
                    }
                    acc.add(w * m);
                }
            }
            (p.major, acc.value())
        })
        .collect();
    let mut major = Neumaier::new();
    let mut minor = Neumaier::new();
    for (is_major, v) in parts {
        if is_major {
            major.add(v);
        } else {
            minor.add(v);
        }
    }
    let (major, minor) = (major.value(), minor.value());
    MomentIntegral {
        major,
        minor,
        total: major + minor,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParsevalCheck {
    pub quadrature: MomentIntegral,
    pub exact: f64,
    pub rel_error: f64,
}

/// `∫₀¹ |sum|² = Σ weight²` through the arc-panel pipeline.
pub fn parseval_check(sum: &WeylSum, arcs: &ArcSystem) -> ParsevalCheck {
    let quadrature = moment_over_arcs(&[(sum, 1)], arcs);
    let exact = sum.l2_mass();
    ParsevalCheck {
        quadrature,
        exact,
        rel_error: (quadrature.total - exact).abs() / exact,
    }
}

/// The `t` with `(nQ^{−2})^{1/k} <= R^t < (nQ^{−2})^{1/k} R`.
pub fn choose_t(n: u64, q_param: f64, k: u32, r: u64) -> u32 {
    let target = (n as f64 / (q_param * q_param)).powf(1.0 / k as f64);
    let mut t = 1u32;
    while (r as f64).powi(t as i32) < target {
        t += 1;
    }
    t
}

/// `g_k(α) = Σ_x τ_t(x) h(x^k α)` with `h(γ) = Σ_y τ_{r−t}(y) e(y^k γ)`.
pub fn g_factorized(k: u32, r: u64, count: u32, t: u32, alpha: f64) -> Result<Complex64> {
    if t == 0 || t >= count {
        return Err(Error::InvalidParameter {
            name: "t".into(),
            reason: format!("must lie in [1, {})", count),
        });
    }
    let outer = tau_table(r, t)?;
    let inner = WeylSum::from_terms(
        SumKind::PrimeProduct,
        k,
        tau_table(r, count - t)?.iter().map(|(y, c)| (y, c as f64)).collect(),
    )?;
    let mut acc = ComplexSum::new();
    for (x, c) in outer.iter() {
        let xk = power(x, k).ok_or_else(|| Error::Infeasible("x^k overflows".into()))?;
        acc.add(inner.value_direct(phase(alpha, xk)) * c as f64);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// ∫_{1/2}^{1} w, from a 30-digit independent quadrature.
    const WEIGHT_INTEGRAL_GOLDEN: f64 = 1.19404656098713182741602471066e-8;

    #[test]
    fn weight_examples() {
        assert_eq!(eval_weight(0.75), (-16f64).exp());
        assert_eq!(eval_weight(0.5), 0.0);
        assert_eq!(eval_weight(1.2), 0.0);
        assert!((eval_weight(0.7) - eval_weight(0.8)).abs() < 1e-22);
        assert!((weight_integral() - WEIGHT_INTEGRAL_GOLDEN).abs() < 1e-12 * WEIGHT_INTEGRAL_GOLDEN);
    }

    #[test]
    fn weight_finite_differences_bounded() {
        let h = 1e-3;
        for order in 1..=4u32 {
            let mut max = 0.0f64;
            for i in 0..1000 {
                let t = 0.45 + i as f64 * 0.6 / 1000.0;
                let mut d = 0.0;
                for j in 0..=order {
                    let c = (1..=order).product::<u32>() as f64
                        / ((1..=j).product::<u32>() as f64 * (1..=order - j).product::<u32>() as f64);
                    let sign = if (order - j) % 2 == 0 { 1.0 } else { -1.0 };
                    d += sign * c * eval_weight(t + j as f64 * h);
                }
                max = max.max((d / h.powi(order as i32)).abs());
            }
            assert!(max.is_finite() && max < 1.0, "order {order}: {max}");
        }
    }

    #[test]
    fn phase_is_exact_for_dyadics() {
        assert_eq!(phase(0.5, 3), 0.5);
        assert_eq!(phase(0.375, 7), 0.625);
        assert_eq!(phase(-0.25, 1), 0.75);
        let big: u128 = 1 << 100;
        assert_eq!(phase(2f64.powi(-101) * 3.0, big), 0.5);
        let a = 0.1234567;
        assert!((phase(a, 1_000_001) - (a * 1_000_001.0).fract()).abs() < 1e-9);
    }

    #[test]
    fn recurrence_matches_direct() {
        for k in [2u32, 3] {
            let f = WeylSum::weighted(k, 300.0).unwrap();
            assert!(f.contiguous);
            for i in 0..50 {
                let alpha = 0.013 + i as f64 * 0.0197;
                let d = (f.value(alpha) - f.value_direct(alpha)).norm();
                assert!(d <= 1e-12 * f.at_zero(), "k={k} alpha={alpha} diff={d}");
            }
        }
    }

    #[test]
    fn values_at_zero() {
        let p = GlobalParameters::new(1_000_000).unwrap();
        let f = WeylSum::for_kind(SumKind::Weighted, 2, &p).unwrap();
        let direct: f64 = (500..=1000).map(|x| eval_weight(x as f64 / 1000.0)).sum();
        assert!((f.eval(0.0).re - direct).abs() < 1e-12 * direct);
        let s = WeylSum::smooth(3, 30.0, 7).unwrap();
        assert_eq!(s.eval(0.0).re, smooth_sieve(30, 7).unwrap().len() as f64);
        let g = WeylSum::prime_product(5, 30, 2).unwrap();
        assert!((g.eval(0.0).re - 16.0).abs() < 1e-12);
        assert_eq!(WeylSum::prime_product(5, 1, 2).unwrap_err(), Error::NoPrimes(1));
    }

    #[test]
    fn oscillatory_v_examples() {
        let n = 1_000_000f64;
        let x = 1000.0;
        let v0 = oscillatory_v(2, 0.0, x);
        assert!((v0.re - x * WEIGHT_INTEGRAL_GOLDEN).abs() < 1e-9 * x * WEIGHT_INTEGRAL_GOLDEN);
        let v1 = oscillatory_v(2, 1.0 / n, x).value().norm();
        let v10 = oscillatory_v(2, 10.0 / n, x).value().norm();
        let v100 = oscillatory_v(2, 100.0 / n, x).value().norm();
        assert!((v1 - 1.10880468878465e-5).abs() < 1e-9 * v1);
        assert!((v10 - 1.17028625473509e-8).abs() < 1e-6 * v10);
        assert!(v10 < 1e-2 * v1 && v100 < 1e-2 * v10);
    }

    #[test]
    fn oscillatory_v_matches_midpoint_rule() {
        let x = 100.0;
        for beta in [3e-7, 2e-6] {
            let v = oscillatory_v(3, beta, x).value();
            let m = 1_000_000;
            let h = (x / 2.0) / m as f64;
            let mut acc = ComplexSum::new();
            for i in 0..m {
                let t = x / 2.0 + (i as f64 + 0.5) * h;
                acc.add(e(beta * t.powi(3)) * (eval_weight(t / x) * h));
            }
            let mid = acc.value();
            assert!((v - mid).norm() <= 1e-6 * v.norm().max(mid.norm()));
        }
    }

    #[test]
    fn v_star_examples() {
        for count in 1..=3u32 {
            let r = 40u64;
            let v = v_star(5, 0.0, r, count).unwrap();
            let exact = (r as f64 / 2.0).powi(count as i32) / (r as f64).ln().powi(count as i32);
            assert!((v.re - exact).abs() < 1e-9 * exact && v.im.abs() < 1e-9 * exact);
        }
        assert_eq!(v_star(5, 0.0, 40, 4).unwrap_err(), Error::DimensionTooLarge(4));

        let (r, beta, k) = (30u64, 3e-8, 5u32);
        let v = v_star(k, beta, r, 1).unwrap().value() * (r as f64).ln();
        let m = 400_000;
        let h = (r as f64 / 2.0) / m as f64;
        let mut acc = ComplexSum::new();
        for i in 0..m {
            let x = r as f64 / 2.0 + (i as f64 + 0.5) * h;
            acc.add(e(beta * x.powi(k as i32)) * h);
        }
        assert!((v - acc.value()).norm() < 1e-6 * v.norm());
    }

    #[test]
    fn v_tilde_ratio_tends_to_one() {
        let ratios: Vec<f64> = [1_000u64, 10_000, 100_000]
            .iter()
            .map(|&r| v_tilde(5, 0.0, r, 2).unwrap().re / v_star(5, 0.0, r, 2).unwrap().re)
            .collect();
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2] && ratios[2] > 1.0);
    }

    #[test]
    fn major_approx_at_unit_fraction() {
        let p = GlobalParameters::new(1_000_000).unwrap();
        let label = ArcLabel { q: 1, a: 1, beta: 0.0, kind: ArcKind::Major };
        let f = major_approx(ApproxKind::WeightedStar(2), &label, &p).unwrap();
        assert!((f.value() - oscillatory_v(2, 0.0, 1000.0).value()).norm() < 1e-20);
        let minor = ArcLabel { q: 0, a: 0, beta: 0.0, kind: ArcKind::Minor };
        assert_eq!(major_approx(ApproxKind::WeightedStar(2), &minor, &p).unwrap_err(), Error::MinorArc);
        let fs = major_approx(ApproxKind::SmoothStar(4), &label, &p).unwrap();
        assert_eq!(fs.re, smooth_mass(4, &p).unwrap());
    }

    /// `max |Δ₂|/√Q` at n = 10⁶, Q = 100 over Kronecker-sampled major arcs;
    /// independent evaluation with exact residues and fixed Gauss–Legendre.
    const DELTA2_GOLDEN: f64 = 9.421555401726257e-9;
    /// Minor-arc `sup |F₂| / (F₂(0) Q^{−1/2})` at n = 10⁶, Q = 50, grid 10⁵.
    const MINOR_SUP_GOLDEN: f64 = 2.557844316027093;

    #[test]
    fn delta_scan_golden() {
        let p = GlobalParameters::new(1_000_000).unwrap();
        let d = delta_scan(2, &p, 100.0, 100).unwrap();
        assert!((d.ratio - DELTA2_GOLDEN).abs() < 1e-6 * DELTA2_GOLDEN, "{d:?}");
        assert_eq!((d.q, d.a), (98, 83));
    }

    #[test]
    fn minor_scan_golden_and_nested() {
        let p = GlobalParameters::new(1_000_000).unwrap();
        let a = minor_arc_sup_scan(2, 50.0, &p, 100_000).unwrap();
        assert!((a.ratio - MINOR_SUP_GOLDEN).abs() < 1e-6 * MINOR_SUP_GOLDEN, "{a:?}");
        let b = minor_arc_sup_scan(2, 100.0, &p, 100_000).unwrap();
        assert!(b.sup <= a.sup && b.minor_points < a.minor_points);
        assert!(minor_arc_sup_scan(2, 50.0, &p, 10).is_err());
    }

    #[test]
    fn parseval_smooth_and_prime_sums() {
        let f = WeylSum::smooth(3, 30.0, 7).unwrap();
        let arcs = crate::arcs::build_raw(30u64.pow(3), 5.0, false, 1.0).unwrap();
        let check = parseval_check(&f, &arcs);
        assert!(check.rel_error < 1e-8, "{check:?}");
        assert_eq!(check.exact, f.len() as f64);

        let g = WeylSum::prime_product(2, 40, 2).unwrap();
        let arcs = crate::arcs::build_raw(1_600u64.pow(2), 10.0, false, 1.0).unwrap();
        let check = parseval_check(&g, &arcs);
        let tau = tau_table(40, 2).unwrap();
        let exact: f64 = tau.iter().map(|(_, c)| (c * c) as f64).sum();
        assert_eq!(check.exact, exact);
        assert!(check.rel_error < 1e-8, "{check:?}");
    }

    #[test]
    fn g_factorisation_identity() {
        let (k, r, count) = (3u32, 20u64, 3u32);
        let t = choose_t(1_000_000, 10.0, k, r);
        assert!(t >= 1);
        let t = t.min(count - 1);
        let g = WeylSum::prime_product(k, r, count).unwrap();
        for i in 0..100u64 {
            let alpha = kronecker(i + 1).0;
            let d = (g_factorized(k, r, count, t, alpha).unwrap() - g.value(alpha)).norm();
            assert!(d <= 1e-9 * g.at_zero(), "alpha={alpha} diff={d}");
        }
    }

    #[test]
    fn choose_t_brackets() {
        let (n, q, k, r) = (1_000_000u64, 10.0, 3u32, 7u64);
        let t = choose_t(n, q, k, r);
        let target = (n as f64 / (q * q)).powf(1.0 / k as f64);
        let rt = (r as f64).powi(t as i32);
        assert!(target <= rt && rt < target * r as f64);
    }

    proptest! {
        #[test]
        fn symmetry_and_bounds(i in 0u64..1_000_000, k in 2u32..6) {
            let alpha = i as f64 / (1u64 << 20) as f64;
            let sums = [
                WeylSum::weighted(k, 200.0).unwrap(),
                WeylSum::smooth(k, 60.0, 11).unwrap(),
                WeylSum::prime_product(k, 30, 2).unwrap(),
            ];
            for f in &sums {
                let z = f.value(alpha);
                let scale = f.at_zero();
                prop_assert!((f.value(-alpha) - z.conj()).norm() <= 1e-12 * scale);
                prop_assert!((f.value(alpha + 1.0) - z).norm() <= 1e-12 * scale);
                prop_assert!(z.norm() <= scale * (1.0 + 1e-12));
            }
        }
    }
}
