//! Singular series, singular integral, and the main term `𝔖·𝔍` against
//! exact weighted counts.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{euler_phi, gcd, PowerResidues};
use crate::arith::gauss::twiddles;
use crate::counting::weighted_counts;
use crate::error::{Error, Result};
use crate::numeric::{e, ComplexSum, Neumaier};
use crate::params::GlobalParameters;
use crate::quad::GaussLegendre;
use crate::signature::{PowerSignature, VarRange};
use crate::sums::{oscillatory_v, smooth_mass, v_star};

/// Decay exponent used for the tail of the series.
pub const TAIL_EXPONENT: f64 = 3.5;
/// Default truncation of the series.
pub const DEFAULT_SERIES_CUTOFF: u64 = 400;
/// Integrand level, relative to its value at 0, that ends the doubling of `B`.
pub const DECAY_LEVEL: f64 = 1e-6;
const MAX_DOUBLINGS: u32 = 40;
const NODES: usize = 10;

/// Whether the local factor of a range is the complete or the coprime sum.
fn coprime_local(range: VarRange) -> bool {
    matches!(range, VarRange::PrimeProduct { .. })
}

/// The `n`-independent part of `A(q)`: for each reduced `a`, the product of
/// the local sums, normalised by `q` per complete and `φ(q)` per coprime sum.
#[derive(Debug, Clone)]
struct LocalProducts {
    q: u64,
    a: Vec<u64>,
    products: Vec<Complex64>,
}

fn local_products(q: u64, sig: &PowerSignature) -> Result<LocalProducts> {
    let phi = euler_phi(q)? as f64;
    let tw = twiddles(q);
    let a: Vec<u64> = (1..=q).filter(|&a| gcd(a, q) == 1).collect();
    let mut products = vec![Complex64::new(1.0, 0.0); a.len()];
    for term in &sig.terms {
        let coprime = coprime_local(term.range);
        let residues = PowerResidues::new(q, term.k, coprime);
        let norm = if coprime { phi } else { q as f64 };
        for (p, &ai) in products.iter_mut().zip(&a) {
            let s = residues.eval_with(ai % q, &tw) / norm;
            *p *= s.powu(term.count);
        }
    }
    Ok(LocalProducts { q, a, products })
}

impl LocalProducts {
    /// `A(q)` at `n`.
    fn at(&self, n: u64) -> Complex64 {
        let q = self.q;
        let r = n % q;
        let mut acc = ComplexSum::new();
        for (&a, &p) in self.a.iter().zip(&self.products) {
            let idx = (a as u128 * r as u128 % q as u128) as u64;
            acc.add(p * e(-(idx as f64) / q as f64));
        }
        acc.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AqValue {
    pub q: u64,
    pub re: f64,
    pub im: f64,
}

/// Local data for every `q <= cutoff`, reusable across `n`.
#[derive(Debug, Clone)]
pub struct SeriesContext {
    cutoff: u64,
    tables: Vec<LocalProducts>,
}

impl SeriesContext {
    pub fn new(sig: &PowerSignature, cutoff: u64) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidParameter {
                name: "X".into(),
                reason: "series cutoff must be at least 1".into(),
            });
        }
        let tables = (1..=cutoff)
            .into_par_iter()
            .map(|q| local_products(q, sig))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { cutoff, tables })
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn a_of_q(&self, q: u64, n: u64) -> AqValue {
        let z = self.tables[(q - 1) as usize].at(n);
        AqValue { q, re: z.re, im: z.im }
    }

    pub fn series(&self, n: u64) -> SingularSeriesPartial {
        let aq: Vec<AqValue> = (1..=self.cutoff).map(|q| self.a_of_q(q, n)).collect();
        SingularSeriesPartial::from_terms(n, aq)
    }

    /// Largest `|A(q₁q₂) − A(q₁)A(q₂)|` over coprime `q₁, q₂ <= bound` with
    /// `q₁q₂` inside the cutoff.
    pub fn multiplicativity_defect(&self, n: u64, bound: u64) -> f64 {
        let mut worst = 0.0f64;
        for q1 in 2..=bound {
            for q2 in q1 + 1..=bound {
                if q1 * q2 > self.cutoff || gcd(q1, q2) != 1 {
                    continue;
                }
                let a = self.tables[(q1 - 1) as usize].at(n) * self.tables[(q2 - 1) as usize].at(n);
                let b = self.tables[(q1 * q2 - 1) as usize].at(n);
                worst = worst.max((a - b).norm());
            }
        }
        worst
    }
}

pub fn a_of_q(q: u64, n: u64, sig: &PowerSignature) -> Result<AqValue> {
    if q == 0 {
        return Err(Error::InvalidParameter {
            name: "q".into(),
            reason: "must be at least 1".into(),
        });
    }
    let z = local_products(q, sig)?.at(n);
    Ok(AqValue { q, re: z.re, im: z.im })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularSeriesPartial {
    pub n: u64,
    pub aq: Vec<AqValue>,
    /// Running sums `𝔖(n; X)` for `X = 1..=cutoff`.
    pub partial: Vec<f64>,
    /// `max_q |A(q)| q^{7/2}` over the computed range.
    pub tail_constant: f64,
    /// `tail_constant · (2/5) X^{−5/2}`, bounding `Σ_{q>X} C q^{−7/2}`.
    pub tail_estimate: f64,
    /// Largest `|Im A(q)|`.
    pub max_imag: f64,
}

impl SingularSeriesPartial {
    fn from_terms(n: u64, aq: Vec<AqValue>) -> Self {
        let mut acc = Neumaier::new();
        let partial = aq
            .iter()
            .map(|a| {
                acc.add(a.re);
                acc.value()
            })
            .collect();
        let tail_constant = aq
            .iter()
            .map(|a| a.re.hypot(a.im) * (a.q as f64).powf(TAIL_EXPONENT))
            .fold(0.0, f64::max);
        let x = aq.len() as f64;
        Self {
            n,
            max_imag: aq.iter().map(|a| a.im.abs()).fold(0.0, f64::max),
            partial,
            tail_constant,
            tail_estimate: tail_constant * tail_bound(x),
            aq,
        }
    }

    pub fn value(&self) -> f64 {
        *self.partial.last().expect("cutoff >= 1")
    }

    /// `𝔖(n; x)` for `x` within the cutoff.
    pub fn at(&self, x: u64) -> f64 {
        self.partial[(x as usize).clamp(1, self.partial.len()) - 1]
    }

    /// `|𝔖(4X) − 𝔖(2X)| < |𝔖(2X) − 𝔖(X)|` at the given `X`.
    pub fn cauchy_decay(&self, x: u64) -> bool {
        (self.at(4 * x) - self.at(2 * x)).abs() < (self.at(2 * x) - self.at(x)).abs()
    }
}

/// `∫_X^∞ t^{−7/2} dt = (2/5) X^{−5/2}`.
pub fn tail_bound(x: f64) -> f64 {
    0.4 * x.powf(-2.5)
}

pub fn singular_series(n: u64, cutoff: u64, sig: &PowerSignature) -> Result<SingularSeriesPartial> {
    Ok(SeriesContext::new(sig, cutoff)?.series(n))
}

/// `v(β)`: the product of the archimedean factors of the signature.
#[derive(Debug, Clone)]
pub struct Archimedean {
    factors: Vec<(u32, VarRange, u32)>,
    params: GlobalParameters,
    /// `∏ Y_k′` over smooth terms.
    pub smooth_constant: f64,
}

impl Archimedean {
    pub fn new(sig: &PowerSignature, params: &GlobalParameters) -> Result<Self> {
        let mut smooth_constant = 1.0;
        let mut factors = Vec::new();
        for t in &sig.terms {
            match t.range {
                VarRange::Plain => {
                    return Err(Error::InvalidParameter {
                        name: "signature".into(),
                        reason: "plain ranges have no archimedean factor; use w, s or p ranges".into(),
                    })
                }
                VarRange::Smooth => smooth_constant *= smooth_mass(t.k, params)?.powi(t.count as i32),
                VarRange::PrimeProduct { primes } if primes > 3 => {
                    return Err(Error::DimensionTooLarge(primes as usize));
                }
                _ => factors.push((t.k, t.range, t.count)),
            }
        }
        Ok(Self {
            factors,
            params: params.clone(),
            smooth_constant,
        })
    }

    /// `(v(β), all pieces accurate)`.
    pub fn eval(&self, beta: f64) -> (Complex64, bool) {
        let mut z = Complex64::new(self.smooth_constant, 0.0);
        let mut ok = true;
        for &(k, range, count) in &self.factors {
            let v = match range {
                VarRange::Weighted => oscillatory_v(k, beta, self.params.x(k)),
                VarRange::PrimeProduct { primes } => match v_star(k, beta, self.params.r, primes) {
                    Ok(v) => v,
                    Err(_) => return (Complex64::new(f64::NAN, f64::NAN), false),
                },
                _ => unreachable!("filtered in new"),
            };
            ok &= v.accurate;
            z *= v.value().powu(count);
        }
        (z, ok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularIntegral {
    pub n: u64,
    pub b: f64,
    pub value: f64,
    pub imag: f64,
    /// Integrand at `β = 0`.
    pub at_zero: f64,
    /// `|v(±B)| <= 10⁻⁶ v(0)`.
    pub decayed: bool,
    pub accurate: bool,
    pub smooth_constant: f64,
    /// Number of prime factors over all prime-product terms.
    pub prime_factors: u32,
}

/// Quadrature nodes on `[−B, B]` with panels no wider than `1/(2 n_max)`,
/// and `v` evaluated there once.
#[derive(Debug, Clone)]
pub struct IntegralNodes {
    pub b: f64,
    nodes: Vec<(f64, Complex64)>,
    accurate: bool,
    decayed: bool,
    at_zero: f64,
    smooth_constant: f64,
    prime_factors: u32,
}

impl IntegralNodes {
    /// `b = None` picks the smallest `2^j / n_max` with the integrand below
    /// `10⁻⁶` of its peak at both ends.
    pub fn new(sig: &PowerSignature, params: &GlobalParameters, n_max: u64, b: Option<f64>) -> Result<Self> {
        let arch = Archimedean::new(sig, params)?;
        let (v0, _) = arch.eval(0.0);
        let peak = v0.norm();
        let decayed_at = |b: f64| arch.eval(b).0.norm() <= DECAY_LEVEL * peak && arch.eval(-b).0.norm() <= DECAY_LEVEL * peak;
        let (b, decayed) = match b {
            Some(b) if b > 0.0 => (b, decayed_at(b)),
            Some(b) => {
                return Err(Error::InvalidParameter {
                    name: "B".into(),
                    reason: format!("must be positive, got {b}"),
                })
            }
            None => {
                let mut b = 1.0 / n_max as f64;
                let mut doublings = 0;
                while !decayed_at(b) && doublings < MAX_DOUBLINGS {
                    b *= 2.0;
                    doublings += 1;
                }
                (b, decayed_at(b))
            }
        };
        let width = 1.0 / (2.0 * n_max as f64);
        let panels = ((2.0 * b) / width).ceil().max(2.0) as usize;
        let h = 2.0 * b / panels as f64;
        let gl = GaussLegendre::new(NODES);
        let points: Vec<(f64, f64)> = (0..panels)
            .flat_map(|i| {
                let lo = -b + i as f64 * h;
                gl.mapped(lo, lo + h).collect::<Vec<_>>()
            })
            .collect();
        let evaluated: Vec<(f64, Complex64, bool)> = points
            .par_iter()
            .map(|&(beta, w)| {
                let (v, ok) = arch.eval(beta);
                (beta, v * w, ok)
            })
            .collect();
        let prime_factors = sig
            .terms
            .iter()
            .map(|t| match t.range {
                VarRange::PrimeProduct { primes } => primes * t.count,
                _ => 0,
            })
            .sum();
        Ok(Self {
            b,
            accurate: evaluated.iter().all(|x| x.2),
            nodes: evaluated.into_iter().map(|(b, v, _)| (b, v)).collect(),
            decayed,
            at_zero: v0.re,
            smooth_constant: arch.smooth_constant,
            prime_factors,
        })
    }

    /// `∫_{−B}^{B} v(β) e(−nβ) dβ`.
    pub fn integral(&self, n: u64) -> SingularIntegral {
        let mut acc = ComplexSum::new();
        for &(beta, v) in &self.nodes {
            acc.add(v * e(-crate::sums::phase(beta, n as u128)));
        }
        let z = acc.value();
        SingularIntegral {
            n,
            b: self.b,
            value: z.re,
            imag: z.im,
            at_zero: self.at_zero,
            decayed: self.decayed,
            accurate: self.accurate,
            smooth_constant: self.smooth_constant,
            prime_factors: self.prime_factors,
        }
    }
}

pub fn singular_integral(n: u64, b: Option<f64>, sig: &PowerSignature, params: &GlobalParameters) -> Result<SingularIntegral> {
    Ok(IntegralNodes::new(sig, params, n, b)?.integral(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainTermRow {
    pub n: u64,
    pub count: f64,
    pub series: f64,
    pub integral: f64,
    pub main_term: f64,
    /// `count / main_term`, `NaN` when the main term vanishes.
    pub ratio: f64,
    /// No admissible configuration reaches `n`.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MainTermReport {
    pub signature: String,
    pub rows: Vec<MainTermRow>,
    /// Mean of the per-`n` ratios.
    pub mean_ratio: f64,
    /// `Σ count / Σ main_term` over the window.
    pub pooled_ratio: f64,
    pub solutions: usize,
    pub series_cutoff: u64,
    pub b: f64,
    pub decayed: bool,
}

/// Exact weighted counts against `𝔖(n; cutoff)·𝔍(n; B)` for each `n` in
/// `ns`. The variable ranges stay those of `params.n`.
pub fn main_term_vs_count(
    ns: &[u64],
    sig: &PowerSignature,
    params: &GlobalParameters,
    cutoff: u64,
    b: Option<f64>,
) -> Result<MainTermReport> {
    let n_max = ns.iter().copied().max().ok_or_else(|| Error::InvalidParameter {
        name: "window".into(),
        reason: "empty".into(),
    })?;
    let counts = weighted_counts(sig, params, ns)?;
    let ctx = SeriesContext::new(sig, cutoff)?;
    let nodes = IntegralNodes::new(sig, params, n_max, b)?;
    let min_sum: f64 = sig
        .expanded()
        .iter()
        .map(|&(k, range)| match range {
            VarRange::Weighted => (params.x(k) / 2.0).ceil().powi(k as i32),
            _ => 1.0,
        })
        .sum();
    let rows: Vec<MainTermRow> = ns
        .iter()
        .zip(&counts)
        .map(|(&n, &count)| {
            let series = ctx.series(n).value();
            let integral = nodes.integral(n).value;
            let main_term = series * integral;
            MainTermRow {
                n,
                count,
                series,
                integral,
                main_term,
                ratio: if main_term != 0.0 { count / main_term } else { f64::NAN },
                flagged: (n as f64) < min_sum,
            }
        })
        .collect();
    let finite: Vec<f64> = rows.iter().map(|r| r.ratio).filter(|r| r.is_finite()).collect();
    let mean_ratio = crate::numeric::sum(finite.iter().copied()) / finite.len().max(1) as f64;
    let pooled_ratio = crate::numeric::sum(rows.iter().map(|r| r.count)) / crate::numeric::sum(rows.iter().map(|r| r.main_term));
    Ok(MainTermReport {
        signature: sig.to_string(),
        solutions: rows.iter().filter(|r| r.count > 0.0).count(),
        rows,
        mean_ratio,
        pooled_ratio,
        series_cutoff: cutoff,
        b: nodes.b,
        decayed: nodes.decayed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sums::eval_weight;

    fn pair() -> PowerSignature {
        "2w,3w".parse().unwrap()
    }

    #[test]
    fn small_moduli() {
        let p = GlobalParameters::new(1_000_000).unwrap();
        let sig = PowerSignature::unlike_powers_mixed(&p);
        let one = a_of_q(1, 1_000_000, &sig).unwrap();
        assert!((one.re - 1.0).abs() < 1e-15 && one.im == 0.0);
        let two = a_of_q(2, 1_000_000, &sig).unwrap();
        assert!(two.re.abs() < 1e-15 && two.im.abs() < 1e-15);
        let s = singular_series(777, 2, &sig).unwrap();
        assert!((s.at(1) - 1.0).abs() < 1e-15 && (s.at(2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn context_matches_direct() {
        let sig: PowerSignature = "2w,3s,5p2".parse().unwrap();
        let ctx = SeriesContext::new(&sig, 30).unwrap();
        for q in [1u64, 7, 12, 29, 30] {
            for n in [1u64, 1000, 123_457] {
                let a = ctx.a_of_q(q, n);
                let b = a_of_q(q, n, &sig).unwrap();
                assert!((a.re - b.re).abs() < 1e-14 && (a.im - b.im).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn series_for_squares_counts_residues() {
        // One square: A(q) sums e(a(x² − n)/q)/q, so 𝔖(n; X) over q | d
        // reflects solubility of x² ≡ n; at q = 4 the value is 0 for n ≡ 3.
        let sig: PowerSignature = "2w".parse().unwrap();
        let s3 = singular_series(3, 4, &sig).unwrap();
        let s1 = singular_series(1, 4, &sig).unwrap();
        assert!(s3.at(4) < s1.at(4));
    }

    #[test]
    fn integral_matches_density() {
        let p = GlobalParameters::new(1_000_000).unwrap();
        let n = 1_000_000u64;
        let j = singular_integral(n, None, &pair(), &p).unwrap();
        assert!(j.decayed && j.accurate);
        assert!(j.imag.abs() < 1e-9 * j.value.abs());
        // 𝔍(n) = ∫ w(x/X₂) w(y/X₃) / (3y²) dx along x² + y³ = n.
        let (x2, x3) = (p.x(2), p.x(3));
        let gl = GaussLegendre::new(20);
        let density = gl.integrate_panels(
            |x: f64| {
                let y = (n as f64 - x * x).cbrt();
                eval_weight(x / x2) * eval_weight(y / x3) / (3.0 * y * y)
            },
            x2 / 2.0,
            x2,
            1.0,
        );
        assert!((j.value - density).abs() < 1e-6 * density, "{} vs {density}", j.value);
        let wider = singular_integral(n, Some(2.0 * j.b), &pair(), &p).unwrap();
        assert!((wider.value - j.value).abs() < 1e-4 * j.value.abs());
    }

    #[test]
    fn integrand_at_zero_is_product() {
        let p = GlobalParameters::new(1_000_000).unwrap();
        let sig: PowerSignature = "2w,3w,5p2,4s".parse().unwrap();
        let arch = Archimedean::new(&sig, &p).unwrap();
        let (v, ok) = arch.eval(0.0);
        let expect = oscillatory_v(2, 0.0, p.x(2)).re
            * oscillatory_v(3, 0.0, p.x(3)).re
            * v_star(5, 0.0, p.r, 2).unwrap().re
            * smooth_mass(4, &p).unwrap();
        assert!(ok && (v.re - expect).abs() < 1e-12 * expect && v.im == 0.0);
        assert!(Archimedean::new(&"2".parse().unwrap(), &p).is_err());
    }

    #[test]
    fn main_term_rows_and_empty_window() {
        let p = GlobalParameters::new(1_000_000).unwrap();
        let ns: Vec<u64> = (1_000_000..1_000_010).collect();
        let r = main_term_vs_count(&ns, &pair(), &p, 50, None).unwrap();
        assert_eq!(r.rows.len(), 10);
        assert!(r.rows.iter().all(|row| !row.flagged && row.integral > 0.0));
        let low = main_term_vs_count(&[100, 200], &pair(), &p, 50, None).unwrap();
        assert!(low.rows.iter().all(|row| row.flagged && row.count == 0.0 && row.main_term.abs() < 1.0));
    }
}
