//! Farey dissection of `[n^{-1/2}, 1 + n^{-1/2}]` into major arcs around
//! `a/q` with `q <= Q` and the minor-arc remainder.

use serde::Serialize;

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::numeric::Neumaier;
use crate::params::GlobalParameters;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArcKind {
    Major,
    MajorStar,
    Minor,
}

/// Where a point of the unit interval falls. For `Minor` labels `q = a = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcLabel {
    pub q: u64,
    pub a: u64,
    /// `α − a/q`.
    pub beta: f64,
    pub kind: ArcKind,
}

impl ArcLabel {
    pub fn is_major(&self) -> bool {
        self.kind != ArcKind::Minor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub q: u64,
    pub a: u64,
    pub center: f64,
    pub halfwidth: f64,
}

impl Arc {
    pub fn lo(&self) -> f64 {
        self.center - self.halfwidth
    }
    pub fn hi(&self) -> f64 {
        self.center + self.halfwidth
    }
}

/// A closed interval `[lo, hi]`.
pub type Interval = (f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcSystem {
    pub n: u64,
    pub q_param: f64,
    pub star: bool,
    /// `n^{ν−1}` clipping width used when `star` is set.
    pub star_width: f64,
    pub interval: Interval,
    /// Arcs sorted by centre.
    pub arcs: Vec<Arc>,
    /// Set when `Q > √n/2`, where neighbouring arcs may overlap.
    pub overlap_warning: bool,
}

/// Largest denominator considered for a threshold `Q`.
fn max_q(q_param: f64) -> u64 {
    q_param.floor() as u64
}

/// Builds `𝔐(Q)`, or `𝔐*(Q)` when `star` is set.
pub fn build(params: &GlobalParameters, q_param: f64, star: bool) -> Result<ArcSystem> {
    build_raw(params.n, q_param, star, params.star_width())
}

pub fn build_raw(n: u64, q_param: f64, star: bool, star_width: f64) -> Result<ArcSystem> {
    if !(q_param >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "Q".into(),
            reason: format!("must be at least 1, got {q_param}"),
        });
    }
    let nf = n as f64;
    let root = nf.sqrt();
    let mut arcs = Vec::new();
    for q in 1..=max_q(q_param) {
        let mut hw = q_param / (q as f64 * nf);
        if star {
            hw = hw.min(star_width);
        }
        for a in 1..=q {
            if gcd(a, q) == 1 {
                arcs.push(Arc {
                    q,
                    a,
                    center: a as f64 / q as f64,
                    halfwidth: hw,
                });
            }
        }
    }
    arcs.sort_by(|x, y| x.center.total_cmp(&y.center));
    Ok(ArcSystem {
        n,
        q_param,
        star,
        star_width,
        interval: (1.0 / root, 1.0 + 1.0 / root),
        arcs,
        overlap_warning: 2.0 * q_param > root,
    })
}

/// Convergents and semiconvergents `p/q` of `x >= 0` with `q <= q_max`.
pub fn rational_candidates(x: f64, q_max: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (1u64, 0u64, x.floor() as u64, 1u64);
    out.push((p1, q1));
    let mut rem = x - x.floor();
    for _ in 0..64 {
        if rem <= 1e-15 {
            break;
        }
        let inv = 1.0 / rem;
        let a = inv.floor();
        rem = inv - a;
        if a > 1e15 {
            break;
        }
        let a = a as u64;
        for j in 1..=a {
            let Some(q) = j.checked_mul(q1).and_then(|v| v.checked_add(q0)) else { break };
            if q > q_max {
                break;
            }
            out.push((j * p1 + p0, q));
        }
        let q2 = a.checked_mul(q1).and_then(|v| v.checked_add(q0));
        match q2 {
            Some(q2) if q2 <= q_max => {
                (p0, q0, p1, q1) = (p1, q1, a * p1 + p0, q2);
            }
            _ => break,
        }
    }
    out
}

impl ArcSystem {
    pub fn halfwidth(&self, q: u64) -> f64 {
        let hw = self.q_param / (q as f64 * self.n as f64);
        if self.star {
            hw.min(self.star_width)
        } else {
            hw
        }
    }

    /// Maps `α` into the dissected interval by adding 1 when needed.
    pub fn normalise(&self, alpha: f64) -> f64 {
        let mut x = alpha - alpha.floor();
        if x < self.interval.0 {
            x += 1.0;
        }
        x
    }

    fn kind(&self) -> ArcKind {
        if self.star {
            ArcKind::MajorStar
        } else {
            ArcKind::Major
        }
    }

    fn contains_fraction(&self, x: f64, q: u64, a: u64) -> Option<f64> {
        if q == 0 || a == 0 || a > q || q > max_q(self.q_param) || gcd(a, q) != 1 {
            return None;
        }
        let beta = (x * q as f64 - a as f64) / q as f64;
        (beta.abs() <= self.halfwidth(q)).then_some(beta)
    }

    fn best(&self, x: f64, cands: impl Iterator<Item = (u64, u64)>) -> ArcLabel {
        let mut best: Option<(u64, u64, f64)> = None;
        for (a, q) in cands {
            if let Some(beta) = self.contains_fraction(x, q, a) {
                if best.map_or(true, |(bq, ba, _)| (q, a) < (bq, ba)) {
                    best = Some((q, a, beta));
                }
            }
        }
        match best {
            Some((q, a, beta)) => ArcLabel { q, a, beta, kind: self.kind() },
            None => ArcLabel { q: 0, a: 0, beta: 0.0, kind: ArcKind::Minor },
        }
    }

    /// Finds the arc containing `α` from the continued-fraction expansion;
    /// when arcs may overlap the sorted arc list is scanned instead.
    pub fn classify(&self, alpha: f64) -> ArcLabel {
        if self.overlap_warning {
            return self.classify_by_scan(alpha);
        }
        let x = self.normalise(alpha);
        self.best(x, rational_candidates(x, max_q(self.q_param)).into_iter())
    }

    /// Reference classifier: every arc whose closed interval holds `α`.
    pub fn classify_by_scan(&self, alpha: f64) -> ArcLabel {
        let x = self.normalise(alpha);
        let reach = self.q_param / self.n as f64;
        let start = self.arcs.partition_point(|arc| arc.center < x - reach * 1.000001);
        let cands = self.arcs[start..]
            .iter()
            .take_while(|arc| arc.center <= x + reach * 1.000001)
            .map(|arc| (arc.a, arc.q));
        self.best(x, cands)
    }

    /// Number of arcs whose closed interval contains `α`.
    pub fn containing_count(&self, alpha: f64) -> usize {
        let x = self.normalise(alpha);
        let reach = self.q_param / self.n as f64;
        let start = self.arcs.partition_point(|arc| arc.center < x - reach * 1.000001);
        self.arcs[start..]
            .iter()
            .take_while(|arc| arc.center <= x + reach * 1.000001)
            .filter(|arc| self.contains_fraction(x, arc.q, arc.a).is_some())
            .count()
    }

    /// Whether consecutive arcs are pairwise disjoint.
    pub fn pairwise_disjoint(&self) -> bool {
        self.arcs.windows(2).all(|w| w[0].hi() < w[1].lo())
    }

    /// The union of the arcs clipped to the unit interval, as sorted disjoint
    /// intervals.
    pub fn intervals(&self) -> Vec<Interval> {
        merge(self.arcs.iter().map(|a| (a.lo(), a.hi())), self.interval)
    }

    /// Exact length of the union of the arcs.
    pub fn measure(&self) -> f64 {
        let mut acc = Neumaier::new();
        let (lo_clip, hi_clip) = self.interval;
        let mut run: Option<(f64, f64, usize, f64)> = None;
        let close = |run: (f64, f64, usize, f64), acc: &mut Neumaier| {
            let (lo, hi, count, width) = run;
            if count == 1 && lo >= lo_clip && hi <= hi_clip {
                acc.add(width);
            } else {
                acc.add(hi.min(hi_clip) - lo.max(lo_clip));
            }
        };
        for arc in &self.arcs {
            let (lo, hi) = (arc.lo().max(lo_clip), arc.hi().min(hi_clip));
            if lo > hi {
                continue;
            }
            run = match run {
                Some((rlo, rhi, c, w)) if lo <= rhi => Some((rlo, rhi.max(hi), c + 1, w)),
                Some(r) => {
                    close(r, &mut acc);
                    Some((arc.lo(), arc.hi(), 1, 2.0 * arc.halfwidth))
                }
                None => Some((arc.lo(), arc.hi(), 1, 2.0 * arc.halfwidth)),
            };
        }
        if let Some(r) = run {
            close(r, &mut acc);
        }
        acc.value()
    }

    /// `Σ_{q <= Q} φ(q) · 2 · halfwidth(q)`, the measure when arcs are disjoint.
    pub fn closed_form_measure(&self) -> f64 {
        let mut acc = Neumaier::new();
        for q in 1..=max_q(self.q_param) {
            let phi = crate::arith::euler_phi(q).expect("small modulus") as f64;
            acc.add(phi * 2.0 * self.halfwidth(q));
        }
        acc.value()
    }

    /// Whether every arc interval lies inside the union of `other`.
    pub fn is_subset_of(&self, other: &ArcSystem) -> bool {
        is_subset(&self.intervals(), &other.intervals())
    }

    /// Panels covering the unit interval: each major-arc run and each gap.
    pub fn partition(&self) -> Vec<Panel> {
        let (lo, hi) = self.interval;
        let mut out = Vec::new();
        let mut cursor = lo;
        for (a, b) in self.intervals() {
            if a > cursor {
                out.push(Panel { lo: cursor, hi: a, major: false });
            }
            out.push(Panel { lo: a.max(cursor), hi: b, major: true });
            cursor = b;
        }
        if cursor < hi {
            out.push(Panel { lo: cursor, hi, major: false });
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub major: bool,
}

/// Sorts, clips and merges closed intervals.
pub fn merge(items: impl IntoIterator<Item = Interval>, clip: Interval) -> Vec<Interval> {
    let mut v: Vec<Interval> = items
        .into_iter()
        .map(|(a, b)| (a.max(clip.0), b.min(clip.1)))
        .filter(|(a, b)| a <= b)
        .collect();
    v.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<Interval> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// `A ∖ B` for sorted disjoint interval lists.
pub fn difference(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut j = 0;
    for &(mut lo, hi) in a {
        while j < b.len() && b[j].1 < lo {
            j += 1;
        }
        let mut k = j;
        while k < b.len() && b[k].0 <= hi {
            if b[k].0 > lo {
                out.push((lo, b[k].0));
            }
            lo = lo.max(b[k].1);
            k += 1;
        }
        if lo < hi {
            out.push((lo, hi));
        }
    }
    out
}

pub fn total_length(intervals: &[Interval]) -> f64 {
    crate::numeric::sum(intervals.iter().map(|(a, b)| b - a))
}

/// Whether every interval of `a` lies inside some interval of `b`.
pub fn is_subset(a: &[Interval], b: &[Interval]) -> bool {
    a.iter().all(|&(lo, hi)| {
        let i = b.partition_point(|iv| iv.1 < hi);
        i < b.len() && b[i].0 <= lo && hi <= b[i].1
    })
}

/// `𝒢(α) = n / (q (1 + n|β|))` on major arcs.
pub fn pruning_kernel(label: &ArcLabel, n: u64) -> Result<f64> {
    if !label.is_major() {
        return Err(Error::MinorArc);
    }
    let nf = n as f64;
    Ok(nf / (label.q as f64 * (1.0 + nf * label.beta.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sys(n: u64, q: f64, star: bool) -> ArcSystem {
        let p = GlobalParameters::new(n).unwrap();
        build(&p, q, star).unwrap()
    }

    #[test]
    fn small_system_measure() {
        let s = sys(100, 2.0, false);
        assert_eq!(s.arcs.len(), 2);
        assert!((s.measure() - 0.06).abs() < 1e-15);
        let s = sys(1_000_000, 1.0, false);
        assert!((s.measure() - 2.0 / 1e6).abs() < 1e-20);
    }

    #[test]
    fn classify_examples() {
        let s = sys(1_000_000, 100.0, false);
        let l = s.classify(1.0 / 3.0 + 1e-9);
        assert_eq!((l.q, l.a, l.kind), (3, 1, ArcKind::Major));
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let s10 = sys(1_000_000, 10.0, false);
        assert_eq!(s10.classify(golden).kind, ArcKind::Minor);
        for (q, a) in [(7u64, 3u64), (97, 13), (1, 1)] {
            let l = s.classify(a as f64 / q as f64);
            assert_eq!((l.q, l.a), (q, a));
            assert!(l.beta.abs() < 1e-15);
        }
        let near_zero = s.classify(1e-7);
        assert_eq!((near_zero.q, near_zero.a), (1, 1));
    }

    #[test]
    fn arc_centres_classify_into_themselves() {
        let s = sys(1_000_000, 60.0, false);
        for arc in &s.arcs {
            let l = s.classify(arc.center);
            assert_eq!((l.q, l.a), (arc.q, arc.a));
        }
    }

    #[test]
    fn disjoint_and_partition() {
        let s = sys(1_000_000, 400.0, false);
        assert!(!s.overlap_warning && s.pairwise_disjoint());
        assert!((s.measure() - s.closed_form_measure()).abs() < 1e-12);
        let (lo, hi) = s.interval;
        for i in 0..10_000 {
            let x = lo + (hi - lo) * (i as f64 + 0.5) / 10_000.0;
            let c = s.containing_count(x);
            assert!(c <= 1);
            let l = s.classify(x);
            assert_eq!(l.is_major(), c == 1);
            assert_eq!(l, s.classify_by_scan(x));
        }
    }

    #[test]
    fn star_and_monotonicity() {
        let p = GlobalParameters::builder(1_000_000).nu(0.3).build().unwrap();
        let m = build(&p, 400.0, false).unwrap();
        let ms = build(&p, 400.0, true).unwrap();
        assert!(ms.measure() < m.measure());
        assert!(ms.is_subset_of(&m));
        let small = build(&p, 200.0, false).unwrap();
        assert!(small.is_subset_of(&m) && !m.is_subset_of(&small));
    }

    #[test]
    fn shell_measure_matches_difference() {
        let s1 = sys(1_000_000, 200.0, false);
        let s2 = sys(1_000_000, 400.0, false);
        let shell = difference(&s2.intervals(), &s1.intervals());
        assert!((total_length(&shell) - (s2.measure() - s1.measure())).abs() < 1e-13);
    }

    #[test]
    fn overlapping_systems() {
        let s = sys(10_000, 80.0, false);
        assert!(s.overlap_warning);
        assert!(s.measure() < s.closed_form_measure());
        let parts = s.partition();
        let covered: f64 = parts.iter().map(|p| p.hi - p.lo).sum();
        assert!((covered - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_examples() {
        let major = ArcLabel { q: 1, a: 1, beta: 0.0, kind: ArcKind::Major };
        assert_eq!(pruning_kernel(&major, 1000).unwrap(), 1000.0);
        let shifted = ArcLabel { beta: 1e-3, ..major };
        assert!((pruning_kernel(&shifted, 1000).unwrap() - 500.0).abs() < 1e-9);
        let minor = ArcLabel { q: 0, a: 0, beta: 0.0, kind: ArcKind::Minor };
        assert_eq!(pruning_kernel(&minor, 1000), Err(Error::MinorArc));

        let n = 1_000_000u64;
        let q = (n as f64).powf(2.0 / 9.0);
        let s = sys(n, q, false);
        // q(1 + n|β|) <= q + Q <= 2Q on 𝔐(Q), so the sharp floor is n/(2Q).
        let bound = (n as f64).powf(7.0 / 9.0) / 2.0;
        let mut corner = f64::INFINITY;
        for arc in s.arcs.iter().step_by(3) {
            for t in [-1.0, -0.5, 0.0, 0.7, 1.0] {
                let l = s.classify(arc.center + t * arc.halfwidth * 0.999_999);
                let g = pruning_kernel(&l, n).unwrap();
                assert!(g >= bound * (1.0 - 1e-9));
                corner = corner.min(g);
            }
        }
        assert!(corner < 2.0 * bound);
    }

    #[test]
    fn partition_tiles_interval() {
        let s = sys(1_000_000, 50.0, false);
        let parts = s.partition();
        for w in parts.windows(2) {
            assert_eq!(w[0].hi, w[1].lo);
        }
        assert_eq!(parts.first().unwrap().lo, s.interval.0);
        assert_eq!(parts.last().unwrap().hi, s.interval.1);
    }

    proptest! {
        #[test]
        fn convergent_and_scan_agree(x in 0.0f64..1.0, q in 1.0f64..500.0) {
            let s = sys(1_000_000, q, false);
            prop_assert_eq!(s.classify(x), s.classify_by_scan(x));
        }
    }
}
