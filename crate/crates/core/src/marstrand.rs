//! δ-rectangles of a product of two embedded Cantor sets, the overlap count
//! `N_δ(s)` under `π_s(x, y) = x − s·y`, exact λ-measures of pairwise overlap,
//! projection measures, and the two interval-union sublemmas.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{union_measure, Interval};
use crate::limit_geometry::LimitGeometry;
use crate::symbolic::Word;
use crate::system::CantorSystem;

/// How cylinders of one factor are placed on the line.
#[derive(Debug, Clone)]
pub enum Embedding<'a> {
    Identity,
    /// `x ↦ k^θ(x) − shift`.
    Limit(LimitGeometry<'a>, f64),
}

impl Embedding<'_> {
    pub fn interval(&self, system: &CantorSystem, word: &[usize]) -> Interval {
        match self {
            Embedding::Identity => system.cylinder_interval(word),
            Embedding::Limit(k, shift) => {
                let iv = k.interval(word);
                Interval::new(iv.lo - shift, iv.hi - shift)
            }
        }
    }

    pub fn length(&self, system: &CantorSystem, word: &[usize]) -> f64 {
        match self {
            Embedding::Identity => system.cylinder_length(word),
            Embedding::Limit(k, _) => k.interval_length(word),
        }
    }
}

/// One factor of the product: a system, the symbol every word starts with,
/// and an embedding of `I(start)`.
#[derive(Debug, Clone)]
pub struct Factor<'a> {
    pub system: &'a CantorSystem,
    pub start: usize,
    pub embedding: Embedding<'a>,
}

impl<'a> Factor<'a> {
    pub fn identity(system: &'a CantorSystem, start: usize) -> Self {
        Factor {
            system,
            start,
            embedding: Embedding::Identity,
        }
    }

    /// Words starting with `start` whose embedded length lies in `[δ/c₀, c₀δ]`.
    pub fn words_at_scale(&self, delta: f64, c0: f64, budget: usize) -> Result<Vec<Word>> {
        crate::symbolic::words_at_scale_by(
            self.system.spec(),
            &[self.start],
            delta,
            c0,
            budget,
            |w| self.embedding.length(self.system, w),
        )
    }

    pub fn interval(&self, word: &[usize]) -> Interval {
        self.embedding.interval(self.system, word)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRectangle {
    pub word: Vec<usize>,
    pub word2: Vec<usize>,
    pub x: Interval,
    pub y: Interval,
}

impl DeltaRectangle {
    pub fn new(x: Interval, y: Interval) -> Self {
        DeltaRectangle {
            word: Vec::new(),
            word2: Vec::new(),
            x,
            y,
        }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x.center(), self.y.center())
    }

    pub fn half_widths(&self) -> (f64, f64) {
        (0.5 * self.x.len(), 0.5 * self.y.len())
    }

    /// `π_s(Q)`, from the rectangle's corners.
    pub fn project(&self, s: f64) -> Interval {
        let (a, b) = (s * self.y.lo, s * self.y.hi);
        Interval {
            lo: self.x.lo - a.max(b),
            hi: self.x.hi - a.min(b),
        }
    }
}

/// All products `Ĩ(c) × Ĩ′(c′)` with `(c, c′) ∈ Σ̃(δ) × Σ̃′(δ)`.
pub fn delta_rectangles(
    f1: &Factor<'_>,
    f2: &Factor<'_>,
    delta: f64,
    c0: f64,
    budget: usize,
) -> Result<Vec<DeltaRectangle>> {
    let w1 = f1.words_at_scale(delta, c0, budget)?;
    let w2 = f2.words_at_scale(delta, c0, budget)?;
    if w1.is_empty() || w2.is_empty() {
        return Err(Error::EmptyScale(delta));
    }
    if w1.len().saturating_mul(w2.len()) > budget {
        return Err(Error::BudgetExceeded {
            what: format!("{} x {} rectangles at scale {delta}", w1.len(), w2.len()),
            budget,
        });
    }
    let i2: Vec<Interval> = w2.iter().map(|w| f2.interval(w.symbols())).collect();
    let mut out = Vec::with_capacity(w1.len() * w2.len());
    for a in &w1 {
        let x = f1.interval(a.symbols());
        for (b, &y) in w2.iter().zip(&i2) {
            out.push(DeltaRectangle {
                word: a.symbols().to_vec(),
                word2: b.symbols().to_vec(),
                x,
                y,
            });
        }
    }
    Ok(out)
}

/// Number of ordered pairs `(i, j)` (diagonal included) of closed intervals
/// that intersect, by sorting: `O(M log M)`.
pub fn count_intersecting_pairs(intervals: &[Interval]) -> u64 {
    let m = intervals.len();
    let mut los: Vec<f64> = intervals.iter().map(|iv| iv.lo).collect();
    los.sort_by(f64::total_cmp);
    let mut by_lo: Vec<Interval> = intervals.to_vec();
    by_lo.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    // pairs i < j in lo order meet iff lo_j <= hi_i
    let mut unordered = 0u64;
    for (i, iv) in by_lo.iter().enumerate() {
        let reach = los.partition_point(|&lo| lo <= iv.hi);
        unordered += (reach - i - 1) as u64;
    }
    m as u64 + 2 * unordered
}

/// `N_δ(s)`: ordered pairs of rectangles with intersecting projections.
pub fn count_overlaps(rects: &[DeltaRectangle], s: f64) -> u64 {
    let proj: Vec<Interval> = rects.iter().map(|q| q.project(s)).collect();
    count_intersecting_pairs(&proj)
}

/// The `O(M²)` reference count.
pub fn count_overlaps_brute(rects: &[DeltaRectangle], s: f64) -> u64 {
    let proj: Vec<Interval> = rects.iter().map(|q| q.project(s)).collect();
    let mut n = 0;
    for a in &proj {
        for b in &proj {
            if a.intersects(b) {
                n += 1;
            }
        }
    }
    n
}

/// Measure of `{λ ∈ [−R, R] : π_λ(Q) ∩ π_λ(Q̃) ≠ ∅}`.
pub fn overlap_lambda_measure(q: &DeltaRectangle, qt: &DeltaRectangle, r: f64) -> f64 {
    let (c1, c2) = (q.center(), qt.center());
    let (h1, h2) = (q.half_widths(), qt.half_widths());
    let dx = c1.0 - c2.0;
    let dy = c1.1 - c2.1;
    let u = h1.0 + h2.0;
    let v = h1.1 + h2.1;
    half_line_measure(dx, dy, u, v, r) + half_line_measure(dx, -dy, u, v, r)
}

/// Measure of `{μ ∈ [0, R] : |dx − μ dy| ≤ u + μ v}`.
fn half_line_measure(dx: f64, dy: f64, u: f64, v: f64, r: f64) -> f64 {
    // dx − u ≤ μ(dy + v)  and  μ(dy − v) ≤ dx + u
    let mut lo = 0.0f64;
    let mut hi = r;
    let mut constrain = |a: f64, b: f64, at_least: bool| {
        // a μ ≥ b (at_least) or a μ ≤ b
        let (a, b) = if at_least { (a, b) } else { (-a, -b) };
        if a > 0.0 {
            lo = lo.max(b / a);
        } else if a < 0.0 {
            hi = hi.min(b / a);
        } else if b > 0.0 {
            hi = -1.0;
        }
    };
    constrain(dy + v, dx - u, true);
    constrain(dy - v, dx + u, false);
    (hi - lo).max(0.0)
}

/// `∫_{−R}^{R} N(λ) dλ` as the exact sum of pairwise λ-measures.
pub fn integral_estimate(rects: &[DeltaRectangle], r: f64) -> f64 {
    let rows: Vec<f64> = (0..rects.len())
        .into_par_iter()
        .map(|i| {
            rects[i + 1..]
                .iter()
                .map(|qt| overlap_lambda_measure(&rects[i], qt, r))
                .sum::<f64>()
        })
        .collect();
    rects.len() as f64 * 2.0 * r + 2.0 * rows.iter().sum::<f64>()
}

/// Trapezoidal quadrature of `N(λ)` on a uniform grid of `[−R, R]`.
pub fn integral_quadrature(rects: &[DeltaRectangle], r: f64, step: f64) -> f64 {
    let n = (2.0 * r / step).round() as usize;
    let h = 2.0 * r / n as f64;
    let vals: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|i| count_overlaps(rects, -r + i as f64 * h) as f64)
        .collect();
    let inner: f64 = vals[1..n].iter().sum();
    h * (inner + 0.5 * (vals[0] + vals[n]))
}

/// `Leb(π_s(⋃ Q))`.
pub fn projection_union_measure(rects: &[DeltaRectangle], s: f64) -> f64 {
    let proj: Vec<Interval> = rects.iter().map(|q| q.project(s)).collect();
    union_measure(&proj)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl InequalityCheck {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }
}

/// Projection bound `Leb(π_s(⋃_{Q∈F} Q)) ≥ c₀⁻¹ c̃⁻¹ b² δ^{1−D} / 4` with
/// `b = #F·δ^D` and `D = d + d′`.
pub fn projection_lower_bound(
    family: &[DeltaRectangle],
    s: f64,
    delta: f64,
    dim_sum: f64,
    c0: f64,
    c_tilde: f64,
) -> InequalityCheck {
    let b = family.len() as f64 * delta.powf(dim_sum);
    InequalityCheck {
        lhs: projection_union_measure(family, s),
        rhs: b * b * delta.powf(1.0 - dim_sum) / (4.0 * c0 * c_tilde),
    }
}

/// Interval-length comparison: `ε < |J_α| < λε`, `ε < |J′_α|`, centers at
/// distance `≤ νε`; then `Leb(⋃J′) ≥ Leb(⋃J) / (λ(4ν + 4))`.
pub fn sublemma_one(
    j: &[Interval],
    jp: &[Interval],
    eps: f64,
    lambda: f64,
    nu: f64,
) -> Result<InequalityCheck> {
    if j.len() != jp.len() {
        return Err(Error::HypothesisViolated("families differ in size".into()));
    }
    if !(eps > 0.0 && lambda > 1.0 && nu > 0.0) {
        return Err(Error::HypothesisViolated(
            "need ε > 0, λ > 1, ν > 0".into(),
        ));
    }
    for (i, (a, b)) in j.iter().zip(jp).enumerate() {
        if !(eps < a.len() && a.len() < lambda * eps) {
            return Err(Error::HypothesisViolated(format!(
                "|J_{i}| = {} outside (ε, λε)",
                a.len()
            )));
        }
        if eps.partial_cmp(&b.len()) != Some(std::cmp::Ordering::Less) {
            return Err(Error::HypothesisViolated(format!("|J'_{i}| = {} ≤ ε", b.len())));
        }
        if (a.center() - b.center()).abs() > nu * eps {
            return Err(Error::HypothesisViolated(format!(
                "centers of J_{i} and J'_{i} are more than νε apart"
            )));
        }
    }
    Ok(InequalityCheck {
        lhs: union_measure(jp),
        rhs: union_measure(j) / (lambda * (4.0 * nu + 4.0)),
    })
}

/// Subsets `K_α ⊆ J_α` (finite unions) with `Leb(K_α) ≥ ν Leb(J_α)`; then
/// `Leb(⋃K) ≥ ν Leb(⋃J) / 2`.
pub fn sublemma_two(j: &[Interval], k: &[Vec<Interval>], nu: f64) -> Result<InequalityCheck> {
    if j.len() != k.len() {
        return Err(Error::HypothesisViolated("families differ in size".into()));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::HypothesisViolated("need 0 < ν ≤ 1".into()));
    }
    for (i, (a, parts)) in j.iter().zip(k).enumerate() {
        if parts.iter().any(|p| !a.contains_interval(p, 0.0)) {
            return Err(Error::HypothesisViolated(format!("K_{i} is not inside J_{i}")));
        }
        if union_measure(parts) < nu * a.len() {
            return Err(Error::HypothesisViolated(format!("Leb(K_{i}) < ν Leb(J_{i})")));
        }
    }
    let all: Vec<Interval> = k.iter().flatten().copied().collect();
    Ok(InequalityCheck {
        lhs: union_measure(&all),
        rhs: 0.5 * nu * union_measure(j),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{middle_alpha, middle_third};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn third_rects(delta: f64) -> Vec<DeltaRectangle> {
        let c = middle_third();
        let f = Factor::identity(&c, 0);
        delta_rectangles(&f, &f, delta, 1.0, 1 << 20).unwrap()
    }

    #[test]
    fn rectangle_counts() {
        assert_eq!(third_rects(1.0 / 3.0).len(), 4);
        assert_eq!(third_rects(1.0 / 9.0).len(), 16);
        let c = middle_third();
        let f = Factor::identity(&c, 0);
        assert_eq!(
            delta_rectangles(&f, &f, 10.0, 1.5, 100),
            Err(Error::EmptyScale(10.0))
        );
    }

    #[test]
    fn overlap_examples() {
        let rects = third_rects(1.0 / 3.0);
        assert_eq!(count_overlaps(&rects, 1.0), 14);
        assert_eq!(count_overlaps_brute(&rects, 1.0), 14);
        let one = vec![DeltaRectangle::new(Interval::new(0.0, 1.0), Interval::new(0.0, 1.0))];
        assert_eq!(count_overlaps(&one, 0.7), 1);
        let two = vec![
            DeltaRectangle::new(Interval::new(0.0, 0.1), Interval::new(0.0, 0.1)),
            DeltaRectangle::new(Interval::new(5.0, 5.1), Interval::new(0.0, 0.1)),
        ];
        assert_eq!(count_overlaps(&two, 1.0), 2);
    }

    #[test]
    fn lambda_measure_examples() {
        let p = |x: f64, y: f64, u: f64, v: f64| {
            DeltaRectangle::new(Interval::centered(x, u), Interval::centered(y, v))
        };
        let q = p(0.3, 0.6, 0.1, 0.05);
        assert!((overlap_lambda_measure(&q, &q, 4.0) - 8.0).abs() < 1e-15);
        assert_eq!(overlap_lambda_measure(&p(0.0, 0.0, 0.0, 0.0), &p(1.0, 1.0, 0.0, 0.0), 4.0), 0.0);
        let m = overlap_lambda_measure(&p(0.0, 0.0, 0.05, 0.0), &p(1.0, 1.0, 0.05, 0.0), 4.0);
        assert!((m - 0.2).abs() < 1e-12);
    }

    #[test]
    fn lambda_measure_matches_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mut rect = || {
                DeltaRectangle::new(
                    Interval::centered(rng.random_range(-1.0..1.0), rng.random_range(0.0..0.2)),
                    Interval::centered(rng.random_range(-1.0..1.0), rng.random_range(0.0..0.2)),
                )
            };
            let (a, b) = (rect(), rect());
            let n = 20_000;
            let h = 8.0 / n as f64;
            let hits = (0..n)
                .filter(|&i| {
                    let l = -4.0 + (i as f64 + 0.5) * h;
                    a.project(l).intersects(&b.project(l))
                })
                .count();
            let m = overlap_lambda_measure(&a, &b, 4.0);
            assert!((m - hits as f64 * h).abs() < 4.0 * h, "{m} vs {}", hits as f64 * h);
        }
    }

    #[test]
    fn integral_examples() {
        let one = vec![DeltaRectangle::new(Interval::new(0.0, 0.1), Interval::new(0.0, 0.1))];
        assert!((integral_estimate(&one, 4.0) - 8.0).abs() < 1e-15);
        let far = vec![
            DeltaRectangle::new(Interval::new(0.0, 0.0), Interval::new(0.0, 0.0)),
            DeltaRectangle::new(Interval::new(100.0, 100.0), Interval::new(0.0, 0.0)),
        ];
        assert!((integral_estimate(&far, 4.0) - 16.0).abs() < 1e-15);
        let rects = third_rects(1.0 / 9.0);
        let exact = integral_estimate(&rects, 4.0);
        let quad = integral_quadrature(&rects, 4.0, 1e-4);
        assert!((exact - quad).abs() < 1e-3 * exact, "{exact} {quad}");
    }

    #[test]
    fn projection_measures() {
        let q = DeltaRectangle::new(Interval::new(0.0, 0.2), Interval::new(0.0, 0.1));
        assert!((projection_union_measure(std::slice::from_ref(&q), -2.0) - 0.4).abs() < 1e-15);
        let far = DeltaRectangle::new(Interval::new(3.0, 3.2), Interval::new(0.0, 0.1));
        assert!((projection_union_measure(&[q.clone(), far], 1.0) - 0.6).abs() < 1e-15);
        let inner = DeltaRectangle::new(Interval::new(0.05, 0.1), Interval::new(0.0, 0.01));
        assert!((projection_union_measure(&[q, inner], 1.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn proposition_two_on_middle_fifths() {
        let c = middle_alpha(0.6).unwrap();
        let d = 2f64.ln() / 5f64.ln();
        let f = Factor::identity(&c, 0);
        let delta = 3f64.powi(-4);
        let rects = delta_rectangles(&f, &f, delta, 2.0, 1 << 20).unwrap();
        let ss: Vec<f64> = (0..10).map(|i| -3.5 + 0.77 * i as f64).collect();
        let c_tilde = ss
            .iter()
            .map(|&s| count_overlaps(&rects, s) as f64 * delta.powf(2.0 * d))
            .fold(0.0, f64::max);
        for &s in &ss {
            let check = projection_lower_bound(&rects, s, delta, 2.0 * d, 2.0, c_tilde);
            assert!(check.holds(), "{check:?}");
        }
    }

    #[test]
    fn sublemma_examples() {
        let j = vec![Interval::new(0.0, 1.5), Interval::new(3.0, 4.2)];
        let c = sublemma_one(&j, &j, 1.0, 2.0, 1.0).unwrap();
        assert!(c.holds() && c.lhs == union_measure(&j));
        let k: Vec<Vec<Interval>> = j.iter().map(|&iv| vec![iv]).collect();
        let c = sublemma_two(&j, &k, 1.0).unwrap();
        assert!(c.holds() && (c.lhs - 2.0 * c.rhs).abs() < 1e-15);
        assert!(matches!(
            sublemma_one(&j, &j, 1.0, 1.2, 1.0),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
