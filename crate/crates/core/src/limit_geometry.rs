//! Limit geometries `k^θ = lim B ∘ f_{θⁿ}` along backward tails, their affine
//! relations, the transfer-map profile `D log D[k^{θ¹} ∘ (k^{θ⁰})⁻¹]`, and
//! eigenvalue-ratio reports for periodic orbits.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::jet::{compose_jets, Jet2};
use crate::symbolic::{enumerate_words_from, TailWord};
use crate::system::CantorSystem;

/// Points used for recorded C¹ residuals.
pub const RESIDUAL_GRID: usize = 101;

/// `k^θ_n = B ∘ f_{θⁿ}` on `I(θ₀)`, normalized to be an increasing map of
/// `I(θ₀)` onto itself.
#[derive(Debug, Clone)]
pub struct LimitGeometry<'a> {
    system: &'a CantorSystem,
    word: Vec<usize>,
    domain: Interval,
    // divided difference of f_{θⁿ} over the whole domain
    scale: f64,
    residual: f64,
}

impl<'a> LimitGeometry<'a> {
    /// Depth-`depth` truncation along `tail` with its recorded residual
    /// (C¹ distance to the depth `depth − 1` map on a fixed grid).
    pub fn new(system: &'a CantorSystem, tail: &TailWord, depth: usize) -> Result<Self> {
        let mut lg = Self::bare(system, tail, depth)?;
        if depth > 0 {
            let prev = Self::bare(system, tail, depth - 1)?;
            let grid = lg.domain.grid(RESIDUAL_GRID);
            lg.residual = c1_distance(&lg, &prev, &grid);
        }
        Ok(lg)
    }

    /// Same map without computing the recorded residual.
    pub fn bare(system: &'a CantorSystem, tail: &TailWord, depth: usize) -> Result<Self> {
        if depth + 1 > tail.len() {
            return Err(Error::DepthExceedsTail {
                depth,
                available: tail.len() - 1,
            });
        }
        let word = tail.suffix(depth).to_vec();
        let domain = system.base(tail.last());
        let scale = system.word_divided_difference(&word, domain.hi, domain.lo);
        Ok(LimitGeometry {
            system,
            word,
            domain,
            scale,
            residual: 0.0,
        })
    }

    pub fn depth(&self) -> usize {
        self.word.len() - 1
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// The truncation `θⁿ` this map is built from.
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn value(&self, x: f64) -> f64 {
        let lo = self.domain.lo;
        lo + (x - lo) * self.system.word_divided_difference(&self.word, x, lo) / self.scale
    }

    /// `(k(x), k'(x), k''(x))`.
    pub fn jet(&self, x: f64) -> Jet2 {
        let f = self.system.word_jet(&self.word, x);
        Jet2::new(self.value(x), f.d1 / self.scale, f.d2 / self.scale)
    }

    /// Solves `k(y) = x` for `x ∈ I(θ₀)`; returns the jet of `k⁻¹` at `x`.
    pub fn inverse_jet(&self, x: f64) -> Jet2 {
        let (mut lo, mut hi) = (self.domain.lo, self.domain.hi);
        let mut y = x.clamp(lo, hi);
        for _ in 0..200 {
            let j = self.jet(y);
            let g = j.value - x;
            if g < 0.0 {
                lo = y;
            } else {
                hi = y;
            }
            let mut next = y - g / j.d1;
            if !(next >= lo && next <= hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - y).abs();
            y = next;
            if step <= 1e-17 * (1.0 + y.abs()) || g == 0.0 {
                break;
            }
        }
        self.jet(y).inverse_at(y)
    }

    /// `|I^θ(a)| = |k^θ(I(a))|` for a word starting with `θ₀`.
    pub fn interval_length(&self, word: &[usize]) -> f64 {
        debug_assert_eq!(word[0], *self.word.last().expect("nonempty"));
        let mut joined = self.word.clone();
        joined.extend_from_slice(&word[1..]);
        self.domain.len() * self.system.cylinder_length(&joined)
            / self.system.cylinder_length(&self.word)
    }

    /// `k^θ(I(a))`.
    pub fn interval(&self, word: &[usize]) -> Interval {
        let iv = self.system.cylinder_interval(word);
        Interval::new(self.value(iv.lo), self.value(iv.hi))
    }
}

/// `max |k₁ − k₂| + max |k₁' − k₂'|` over a grid.
pub fn c1_distance(a: &LimitGeometry<'_>, b: &LimitGeometry<'_>, grid: &[f64]) -> f64 {
    let (mut d0, mut d1) = (0.0f64, 0.0f64);
    for &x in grid {
        let (ja, jb) = (a.jet(x), b.jet(x));
        d0 = d0.max((ja.value - jb.value).abs());
        d1 = d1.max((ja.d1 - jb.d1).abs());
    }
    d0 + d1
}

/// Residuals `r(n) = dist_{C¹}(k_n, k_{n+step})` for `n` in `depths`.
pub fn convergence_profile(
    system: &CantorSystem,
    tail: &TailWord,
    depths: &[usize],
    step: usize,
    grid_points: usize,
) -> Result<Vec<(usize, f64)>> {
    depths
        .iter()
        .map(|&n| {
            let a = LimitGeometry::new(system, tail, n)?;
            let b = LimitGeometry::new(system, tail, n + step)?;
            Ok((n, c1_distance(&a, &b, &a.domain().grid(grid_points))))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineRelationReport {
    pub n: usize,
    pub depth: usize,
    pub max_residual: f64,
    /// Recorded truncation residuals of `k^θ` and `k^{σ^{−n}θ}`.
    pub truncation_residuals: (f64, f64),
}

impl AffineRelationReport {
    pub fn truncation_sum(&self) -> f64 {
        self.truncation_residuals.0 + self.truncation_residuals.1
    }
}

/// Evaluates both sides of `F_n ∘ k^θ = k^{σ^{−n}θ} ∘ f_{θⁿ}` on `I(θ₀)`,
/// with `k^θ` at `depth` and `k^{σ^{−n}θ}` at `depth − n`.
pub fn check_affine_relation(
    system: &CantorSystem,
    tail: &TailWord,
    n: usize,
    depth: usize,
    grid: &[f64],
) -> Result<AffineRelationReport> {
    if n > depth {
        return Err(Error::DepthExceedsTail {
            depth: n,
            available: depth,
        });
    }
    let k = LimitGeometry::new(system, tail, depth)?;
    let back = tail.backshift(n);
    let kb = LimitGeometry::new(system, &back, depth - n)?;
    let word = tail.suffix(n);
    // F_n: affine from I(θ₀) onto k^{σ^{-n}θ}(I(θⁿ)), orientation of f_{θⁿ}
    let target = kb.interval(word);
    let dom = k.domain();
    let (y0, y1) = if system.orientation(word) > 0.0 {
        (target.lo, target.hi)
    } else {
        (target.hi, target.lo)
    };
    let slope = (y1 - y0) / dom.len();
    let max_residual = grid
        .iter()
        .map(|&x| {
            let lhs = y0 + slope * (k.value(x) - dom.lo);
            let rhs = kb.value(system.word_value(word, x));
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max);
    Ok(AffineRelationReport {
        n,
        depth,
        max_residual,
        truncation_residuals: (k.residual(), kb.residual()),
    })
}

/// Points of an equispaced grid on `I(a)` that lie in some depth-`cover_depth`
/// cylinder starting with `a`.
pub fn audit_grid(system: &CantorSystem, a: usize, points: usize, cover_depth: usize) -> Vec<f64> {
    let cover: Vec<Interval> = enumerate_words_from(system.spec(), a, cover_depth + 1)
        .iter()
        .map(|w| system.cylinder_interval(w.symbols()))
        .collect();
    system
        .base(a)
        .grid(points)
        .into_iter()
        .filter(|&x| cover.iter().any(|iv| iv.contains_approx(x, 1e-15)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HPrimeProfile {
    pub depth: usize,
    /// `(x, T''/T'(x), T(x), T'(x), T''(x))` with `T = k^{θ¹} ∘ (k^{θ⁰})⁻¹`.
    pub rows: Vec<(f64, f64, f64, f64, f64)>,
    pub max_abs: f64,
    pub residuals: (f64, f64),
}

/// `D log D[k^{θ¹} ∘ (k^{θ⁰})⁻¹]` on a grid of `I(θ₀)`.
pub fn h_prime_one_profile(
    system: &CantorSystem,
    tail0: &TailWord,
    tail1: &TailWord,
    depth: usize,
    grid: &[f64],
) -> Result<HPrimeProfile> {
    if tail0.last() != tail1.last() {
        return Err(Error::TailMismatch(tail0.last(), tail1.last()));
    }
    let k0 = LimitGeometry::new(system, tail0, depth)?;
    let k1 = LimitGeometry::new(system, tail1, depth)?;
    let rows: Vec<(f64, f64, f64, f64, f64)> = grid
        .par_iter()
        .map(|&x| {
            let inv = k0.inverse_jet(x);
            let t = compose_jets(k1.jet(inv.value), inv);
            (x, t.d2 / t.d1, t.value, t.d1, t.d2)
        })
        .collect();
    let max_abs = rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    Ok(HPrimeProfile {
        depth,
        rows,
        max_abs,
        residuals: (k0.residual(), k1.residual()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRatio {
    pub first: usize,
    pub second: usize,
    pub eigenvalues: (f64, f64),
    /// `ln|μ_second| / ln|μ_first|`.
    pub ratio: f64,
    /// Continued-fraction convergents `p/q` with `q ≤ 10⁶`.
    pub convergents: Vec<(i64, u64)>,
    /// Smallest convergent denominator approximating the ratio to `1e−12`.
    pub denominator_at_tolerance: Option<u64>,
}

pub const MAX_DENOMINATOR: u64 = 1_000_000;
pub const RATIO_TOL: f64 = 1e-12;

/// Ratios of log-eigenvalues for every pair of periodic words.
pub fn eigenvalue_ratio_report(system: &CantorSystem, words: &[Vec<usize>]) -> Result<Vec<EigenRatio>> {
    let eig: Vec<f64> = words
        .iter()
        .map(|w| system.periodic_point(w).map(|p| p.1))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let ratio = eig[j].abs().ln() / eig[i].abs().ln();
            let (convergents, hit) = convergents(ratio, MAX_DENOMINATOR, RATIO_TOL);
            out.push(EigenRatio {
                first: i,
                second: j,
                eigenvalues: (eig[i], eig[j]),
                ratio,
                convergents,
                denominator_at_tolerance: hit,
            });
        }
    }
    Ok(out)
}

/// Continued-fraction convergents of `x` up to a maximal denominator; also
/// returns the first denominator whose convergent is within `tol` of `x`.
pub fn convergents(x: f64, max_den: u64, tol: f64) -> (Vec<(i64, u64)>, Option<u64>) {
    let mut out = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0u64, x.floor() as i64, 1u64);
    let mut rest = x - x.floor();
    out.push((p1, q1));
    if (x - p1 as f64).abs() <= tol {
        return (out, Some(1));
    }
    while rest > 0.0 {
        let inv = 1.0 / rest;
        let a = inv.floor();
        rest = inv - a;
        let a = a as u64;
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            break;
        }
        let p2 = a as i64 * p1 + p0;
        out.push((p2, q2));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (x - p2 as f64 / q2 as f64).abs() <= tol {
            return (out, Some(q2));
        }
    }
    (out, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{gauss_digits, middle_third, perturbed, two_ratio};

    fn ones(sys: &CantorSystem, a: usize, len: usize) -> TailWord {
        TailWord::constant(sys.spec(), a, len).unwrap()
    }

    #[test]
    fn affine_limit_geometry_is_identity() {
        let t = two_ratio(0.5, 0.25).unwrap();
        let tail = TailWord::new(t.spec(), vec![0, 1, 1, 0, 1, 0, 0, 1]).unwrap();
        for depth in 0..8 {
            let k = LimitGeometry::new(&t, &tail, depth).unwrap();
            assert!(k.residual() < 1e-12);
            for x in k.domain().grid(11) {
                let j = k.jet(x);
                assert!((j.value - x).abs() < 1e-14 && (j.d1 - 1.0).abs() < 1e-12 && j.d2.abs() < 1e-12);
            }
        }
        let p = perturbed(&middle_third(), 0.0).unwrap();
        let k = LimitGeometry::new(&p, &ones(&p, 0, 6), 5).unwrap();
        assert!((k.jet(0.3).value - 0.3).abs() < 1e-14);
    }

    #[test]
    fn depth_beyond_tail_is_rejected() {
        let g = gauss_digits(&[1, 2]).unwrap();
        assert!(matches!(
            LimitGeometry::new(&g, &ones(&g, 0, 3), 3),
            Err(Error::DepthExceedsTail { .. })
        ));
    }

    #[test]
    fn normalization_and_jets_match_finite_differences() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let tail = TailWord::new(g.spec(), vec![1, 0, 0, 1, 0, 1, 1, 0]).unwrap();
        let k = LimitGeometry::new(&g, &tail, 7).unwrap();
        let dom = k.domain();
        assert!((k.value(dom.lo) - dom.lo).abs() < 1e-15);
        assert!((k.value(dom.hi) - dom.hi).abs() < 1e-14);
        let h = 1e-5 * dom.len();
        for x in dom.grid(9).into_iter().skip(1).take(7) {
            let j = k.jet(x);
            let fd1 = (k.value(x + h) - k.value(x - h)) / (2.0 * h);
            let fd2 = (k.jet(x + h).d1 - k.jet(x - h).d1) / (2.0 * h);
            assert!(j.d1 > 0.0);
            assert!((j.d1 - fd1).abs() < 1e-6, "{} vs {}", j.d1, fd1);
            assert!((j.d2 - fd2).abs() < 1e-5, "{} vs {}", j.d2, fd2);
        }
    }

    #[test]
    fn inverse_jet_round_trip() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let k = LimitGeometry::new(&g, &ones(&g, 0, 11), 10).unwrap();
        for x in k.domain().grid(13) {
            let inv = k.inverse_jet(x);
            let back = compose_jets(k.jet(inv.value), inv);
            assert!((back.value - x).abs() < 1e-12);
            assert!((back.d1 - 1.0).abs() < 1e-10 && back.d2.abs() < 1e-10);
        }
    }

    #[test]
    fn gauss_residuals_decay() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let tail = ones(&g, 0, 20);
        let r4 = LimitGeometry::new(&g, &tail, 4).unwrap().residual();
        let r8 = LimitGeometry::new(&g, &tail, 8).unwrap().residual();
        assert!(r8 / r4 < 0.2, "{r4} {r8}");
    }

    #[test]
    fn affine_relation() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let tail = TailWord::new(g.spec(), vec![0, 1, 1, 0, 0, 0, 1, 0, 1, 1, 0, 1]).unwrap();
        let grid = g.base(tail.last()).grid(50);
        let r = check_affine_relation(&g, &tail, 2, 10, &grid).unwrap();
        assert!(r.max_residual < r.truncation_sum(), "{r:?}");
        let r0 = check_affine_relation(&g, &tail, 0, 10, &grid).unwrap();
        assert!(r0.max_residual < 1e-14);
        let c = middle_third();
        let tail = ones(&c, 1, 8);
        let r = check_affine_relation(&c, &tail, 3, 7, &c.base(1).grid(50)).unwrap();
        assert!(r.max_residual < 1e-12);
    }

    #[test]
    fn h_prime_one() {
        let c = middle_third();
        let t0 = ones(&c, 0, 10);
        let t1 = TailWord::new(c.spec(), vec![1, 0, 1, 1, 0, 0, 1, 0, 0, 0]).unwrap();
        let p = h_prime_one_profile(&c, &t0, &t1, 9, &c.base(0).grid(20)).unwrap();
        assert!(p.max_abs < 1e-10);
        let g = gauss_digits(&[1, 2]).unwrap();
        let t0 = ones(&g, 0, 13);
        let same = h_prime_one_profile(&g, &t0, &t0, 12, &g.base(0).grid(20)).unwrap();
        assert!(same.max_abs < 1e-10);
        let mut v = vec![1; 12];
        v.push(0);
        let t1 = TailWord::new(g.spec(), v).unwrap();
        let p = h_prime_one_profile(&g, &t0, &t1, 12, &g.base(0).grid(50)).unwrap();
        assert!(p.max_abs > 0.01, "{}", p.max_abs);
        assert!(matches!(
            h_prime_one_profile(&g, &t0, &ones(&g, 1, 13), 12, &[0.6]),
            Err(Error::TailMismatch(0, 1))
        ));
    }

    #[test]
    fn eigen_ratios() {
        let c = middle_third();
        let r = eigenvalue_ratio_report(&c, &[vec![0], vec![0, 1]]).unwrap();
        assert!((r[0].ratio - 2.0).abs() < 1e-12);
        assert_eq!(r[0].denominator_at_tolerance, Some(1));
        let t = two_ratio(0.5, 1.0 / 3.0).unwrap();
        let r = eigenvalue_ratio_report(&t, &[vec![0], vec![1]]).unwrap();
        assert!((r[0].ratio - 3f64.ln() / 2f64.ln()).abs() < 1e-12);
        assert_eq!(&r[0].convergents[..5], &[(1, 1), (2, 1), (3, 2), (8, 5), (19, 12)]);
        let g = gauss_digits(&[1, 2]).unwrap();
        let r = eigenvalue_ratio_report(&g, &[vec![0], vec![1]]).unwrap();
        let phi2 = ((1.0 + 5f64.sqrt()) / 2.0).powi(2);
        let silver2 = (1.0 + 2f64.sqrt()).powi(2);
        assert!((r[0].ratio - silver2.ln() / phi2.ln()).abs() < 1e-12);
        assert!((r[0].ratio - 1.8316).abs() < 1e-4);
    }
}
