//! Dimension brackets from the discretized pressure equation, box-counting
//! slopes, and the nested-interval (mass distribution) lower-bound check.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::symbolic::enumerate_words_from;
use crate::system::CantorSystem;

/// Root-finding tolerance for the pressure equation.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionBracket {
    pub depth: usize,
    pub d_lower: f64,
    pub d_upper: f64,
}

impl DimensionBracket {
    pub fn width(&self) -> f64 {
        self.d_upper - self.d_lower
    }

    pub fn contains(&self, other: &DimensionBracket, tol: f64) -> bool {
        self.d_lower <= other.d_lower + tol && other.d_upper <= self.d_upper + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Uses `Λ = sup |(gⁿ)'|`: gives `d_lower`.
    Lower,
    /// Uses `λ = inf |(gⁿ)'|`: gives `d_upper`.
    Upper,
}

/// Per-word data of all cylinders at one depth.
#[derive(Debug, Clone)]
pub struct PressureData {
    k: usize,
    depth: usize,
    // (first, last, ln Λ, ln λ)
    words: Vec<(usize, usize, f64, f64)>,
}

impl PressureData {
    pub fn new(system: &CantorSystem, depth: usize, budget: usize) -> Result<Self> {
        let spec = system.spec();
        let k = spec.alphabet_len();
        let count = count_words(system, depth + 1);
        if count > budget as f64 {
            return Err(Error::BudgetExceeded {
                what: format!("pressure at depth {depth} ({count} words)"),
                budget,
            });
        }
        let words: Vec<(usize, usize, f64, f64)> = (0..k)
            .into_par_iter()
            .flat_map_iter(|a| {
                enumerate_words_from(spec, a, depth + 1)
                    .into_iter()
                    .map(|w| {
                        let (lo, hi) = system.derivative_bounds_on_cylinder(w.symbols());
                        (w.first(), w.last(), hi.ln(), lo.ln())
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(PressureData { k, depth, words })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Plain sum `Σ Λ^{−d}` (or `Σ λ^{−d}`) over all words.
    pub fn sum(&self, d: f64, bound: Bound) -> f64 {
        self.words
            .iter()
            .map(|&(_, _, big, small)| (-d * pick(bound, big, small)).exp())
            .sum()
    }

    /// Spectral radius of the transfer matrix
    /// `Z[a][b] = Σ_{words a…b} Λ^{−d}` (resp. `λ^{−d}`).
    pub fn spectral_radius(&self, d: f64, bound: Bound) -> f64 {
        let k = self.k;
        let mut z = vec![0.0; k * k];
        for &(a, b, big, small) in &self.words {
            z[a * k + b] += (-d * pick(bound, big, small)).exp();
        }
        perron_root(&z, k)
    }

    /// Root of `ρ(Z(d)) = 1`, bracketed in `[0, 2]` (widened to `[0, 4]`).
    pub fn root(&self, bound: Bound) -> Result<f64> {
        let f = |d: f64| self.spectral_radius(d, bound) - 1.0;
        if f(0.0) <= 0.0 {
            return Ok(0.0);
        }
        let mut hi = 2.0;
        if f(hi) > 0.0 {
            hi = 4.0;
            if f(hi) > 0.0 {
                return Err(Error::NoRoot(format!(
                    "pressure still positive at d = 4 (depth {})",
                    self.depth
                )));
            }
        }
        Ok(bisect(f, 0.0, hi, ROOT_TOL))
    }
}

fn pick(bound: Bound, big: f64, small: f64) -> f64 {
    match bound {
        Bound::Lower => big,
        Bound::Upper => small,
    }
}

/// Number of admissible words of a given length, as a float (no overflow).
pub fn count_words(system: &CantorSystem, length: usize) -> f64 {
    let spec = system.spec();
    let k = spec.alphabet_len();
    let mut v = vec![1.0f64; k];
    for _ in 1..length {
        let mut next = vec![0.0; k];
        for (a, b) in spec.transitions() {
            next[a] += v[b];
        }
        v = next;
    }
    v.iter().sum()
}

/// Bisection for a decreasing function with `f(lo) > 0 ≥ f(hi)`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Perron root of a nonnegative primitive `k×k` matrix (row-major), by power
/// iteration with Collatz–Wielandt bounds.
pub fn perron_root(z: &[f64], k: usize) -> f64 {
    let mut x = vec![1.0f64; k];
    let mut y = vec![0.0f64; k];
    let mut estimate = 0.0;
    for _ in 0..10_000 {
        for i in 0..k {
            y[i] = (0..k).map(|j| z[i * k + j] * x[j]).sum();
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..k {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        estimate = 0.5 * (lo + hi);
        let norm = y.iter().cloned().fold(0.0, f64::max);
        if norm == 0.0 || !norm.is_finite() {
            return norm;
        }
        for i in 0..k {
            // keep strictly positive so ratios stay defined
            x[i] = (y[i] / norm).max(1e-300);
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    estimate
}

/// Dimension bracket at `depth` (words of length `depth + 1`).
pub fn pressure_dimension(
    system: &CantorSystem,
    depth: usize,
    budget: usize,
) -> Result<DimensionBracket> {
    let data = PressureData::new(system, depth, budget)?;
    Ok(DimensionBracket {
        depth,
        d_lower: data.root(Bound::Lower)?,
        d_upper: data.root(Bound::Upper)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxFit {
    pub slope: f64,
    pub intercept: f64,
    /// Max absolute residual of `ln N` about the fitted line.
    pub residual: f64,
}

/// Least-squares slope of `ln N(δ)` against `ln(1/δ)`. Counts must be ≥ 1.
pub fn box_dimension_estimate(counts: &[(f64, u64)]) -> Result<BoxFit> {
    let mut scales: Vec<f64> = counts.iter().map(|c| c.0).collect();
    scales.sort_by(f64::total_cmp);
    scales.dedup();
    if scales.len() < 3 || counts.iter().any(|c| c.1 == 0 || c.0.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::DegenerateScales);
    }
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .map(|&(d, n)| ((1.0 / d).ln(), (n as f64).ln()))
        .collect();
    let (slope, intercept) = least_squares(&pts);
    let residual = pts
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(BoxFit {
        slope,
        intercept,
        residual,
    })
}

/// Ordinary least squares line `y = a + b x`; returns `(b, a)`.
pub fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let b = sxy / sxx;
    (b, my - b * mx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MassCertificate {
    /// Every parent passed; `min_ratio_sum` is the smallest ratio sum seen and
    /// `max_length_ratio` the largest `|I|/|I'|`.
    Certified {
        d: f64,
        levels: usize,
        min_ratio_sum: f64,
        max_length_ratio: f64,
    },
    /// First parent (level numbered from 1) whose ratio sum is below 1.
    Refused {
        d: f64,
        level: usize,
        index: usize,
        ratio_sum: f64,
    },
}

impl MassCertificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, MassCertificate::Certified { .. })
    }
}

/// Relative slack on `Σ (|I'|/|I|)^d ≥ 1`.
pub const MASS_REL_TOL: f64 = 1e-12;

/// Checks `Σ_{I' ⊂ I} (|I'|/|I|)^d ≥ 1` for every parent of every level but
/// the last. `levels[0]` is level 1.
pub fn mass_distribution_certify(levels: &[Vec<Interval>], d: f64) -> Result<MassCertificate> {
    let mut children: Vec<Vec<Vec<usize>>> = Vec::with_capacity(levels.len());
    for (r, level) in levels.iter().enumerate() {
        let mut order: Vec<usize> = (0..level.len()).collect();
        order.sort_by(|&i, &j| level[i].lo.total_cmp(&level[j].lo));
        for w in order.windows(2) {
            if level[w[0]].hi >= level[w[1]].lo {
                return Err(Error::NestingViolated {
                    level: r + 1,
                    index: w[1],
                });
            }
        }
        if r + 1 < levels.len() {
            let mut kids = vec![Vec::new(); level.len()];
            let sorted: Vec<Interval> = order.iter().map(|&i| level[i]).collect();
            for (j, child) in levels[r + 1].iter().enumerate() {
                // parent candidate: last interval whose lo is <= child.lo
                let pos = sorted.partition_point(|p| p.lo <= child.lo + 1e-15);
                let ok = pos > 0 && {
                    let p = &sorted[pos - 1];
                    p.contains_interval(child, 1e-14 * (1.0 + p.len()))
                };
                if !ok {
                    return Err(Error::NestingViolated {
                        level: r + 2,
                        index: j,
                    });
                }
                kids[order[pos - 1]].push(j);
            }
            children.push(kids);
        }
    }
    let mut min_sum = f64::INFINITY;
    let mut max_ratio = 1.0f64;
    for (r, kids) in children.iter().enumerate() {
        for (i, list) in kids.iter().enumerate() {
            let parent = levels[r][i].len();
            let mut sum = 0.0;
            for &j in list {
                let l = levels[r + 1][j].len();
                sum += (l / parent).powf(d);
                max_ratio = max_ratio.max(parent / l);
            }
            if sum < 1.0 - MASS_REL_TOL {
                return Ok(MassCertificate::Refused {
                    d,
                    level: r + 1,
                    index: i,
                    ratio_sum: sum,
                });
            }
            min_sum = min_sum.min(sum);
        }
    }
    Ok(MassCertificate::Certified {
        d,
        levels: levels.len(),
        min_ratio_sum: min_sum,
        max_length_ratio: max_ratio,
    })
}

/// Nested cylinder families rooted at `I(a)`: level `r` holds the cylinders of
/// words of length `1 + r·step` starting with `a`, for `r = 0..levels`.
pub fn cylinder_tree(
    system: &CantorSystem,
    a: usize,
    step: usize,
    levels: usize,
) -> Vec<Vec<Interval>> {
    (0..levels)
        .map(|r| {
            enumerate_words_from(system.spec(), a, 1 + r * step)
                .iter()
                .map(|w| system.cylinder_interval(w.symbols()))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{gauss_digits, middle_third, two_ratio};

    const BUDGET: usize = 1 << 22;

    #[test]
    fn affine_brackets_are_exact() {
        let log23 = 2f64.ln() / 3f64.ln();
        for depth in 1..=6 {
            let b = pressure_dimension(&middle_third(), depth, BUDGET).unwrap();
            assert!((b.d_lower - log23).abs() < 1e-9, "{b:?}");
            assert!((b.d_upper - log23).abs() < 1e-9, "{b:?}");
        }
        let target = -((5f64.sqrt() - 1.0) / 2.0).log2();
        let t = two_ratio(0.5, 0.25).unwrap();
        for depth in [1, 3, 5] {
            let b = pressure_dimension(&t, depth, BUDGET).unwrap();
            assert!((b.d_lower - target).abs() < 1e-9 && (b.d_upper - target).abs() < 1e-9);
        }
    }

    #[test]
    fn root_residual() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let data = PressureData::new(&g, 5, BUDGET).unwrap();
        for bound in [Bound::Lower, Bound::Upper] {
            let d = data.root(bound).unwrap();
            assert!((data.spectral_radius(d, bound) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn gauss_brackets_nest() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let bs: Vec<_> = [2, 4, 6]
            .iter()
            .map(|&n| pressure_dimension(&g, n, BUDGET).unwrap())
            .collect();
        for w in bs.windows(2) {
            assert!(w[0].contains(&w[1], 1e-9), "{bs:?}");
        }
        // known value HD(C(2)) ≈ 0.5313
        assert!(bs[2].d_lower < 0.5313 && 0.5312 < bs[2].d_upper);
    }

    #[test]
    fn budget_is_enforced() {
        let g = gauss_digits(&[1, 2]).unwrap();
        assert!(matches!(
            pressure_dimension(&g, 12, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn box_fit_examples() {
        let data: Vec<(f64, u64)> = (1..=6).map(|k| (3f64.powi(-k), 1u64 << k)).collect();
        let fit = box_dimension_estimate(&data).unwrap();
        assert!((fit.slope - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let data: Vec<(f64, u64)> = (1..=6).map(|k| (2f64.powi(-k), 1u64 << k)).collect();
        assert!((box_dimension_estimate(&data).unwrap().slope - 1.0).abs() < 1e-12);
        let two = [(0.5, 2), (0.25, 4), (0.5, 2)];
        assert_eq!(box_dimension_estimate(&two), Err(Error::DegenerateScales));
    }

    #[test]
    fn mass_distribution_examples() {
        let c = middle_third();
        let tree = cylinder_tree(&c, 0, 1, 6);
        let d = 2f64.ln() / 3f64.ln();
        assert!(mass_distribution_certify(&tree, d).unwrap().is_certified());
        match mass_distribution_certify(&tree, 0.7).unwrap() {
            MassCertificate::Refused {
                level, ratio_sum, ..
            } => {
                assert_eq!(level, 1);
                assert!((ratio_sum - 2.0 * (1.0f64 / 3.0).powf(0.7)).abs() < 1e-12);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn nesting_violations_are_reported() {
        let levels = vec![
            vec![Interval::new(0.0, 1.0)],
            vec![Interval::new(0.0, 0.4), Interval::new(0.9, 1.2)],
        ];
        assert_eq!(
            mass_distribution_certify(&levels, 0.5),
            Err(Error::NestingViolated { level: 2, index: 1 })
        );
        let overlapping = vec![vec![Interval::new(0.0, 1.0), Interval::new(0.5, 2.0)]];
        assert!(mass_distribution_certify(&overlapping, 0.5).is_err());
    }
}
