//! The relative-scale space `Σ⁻ × Σ′⁻ × ℝ*`: renormalization operators,
//! relative projections, the good-scale conditions and an empirical
//! recurrence report.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::limit_geometry::LimitGeometry;
use crate::marstrand::{count_overlaps, DeltaRectangle};
use crate::symbolic::{TailWord, Word};
use crate::system::CantorSystem;

pub const DEFAULT_R: f64 = 4.0;
pub const DEFAULT_M: usize = 3;
pub const DEFAULT_MAX_TAIL: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeScale {
    pub tail: Vec<usize>,
    pub tail2: Vec<usize>,
    pub s: f64,
}

/// `J_R = [−R, −R⁻¹] ∪ [R⁻¹, R]`.
pub fn in_window(s: f64, r: f64) -> bool {
    let a = s.abs();
    (1.0 / r..=r).contains(&a)
}

/// Clamps `|s|` into `[R⁻¹, R]`, keeping the sign.
pub fn clamp_to_window(s: f64, r: f64) -> f64 {
    s.signum() * s.abs().clamp(1.0 / r, r)
}

/// Points `h(ω(a))` for every symbol, where `ω(a)` is the smallest
/// admissible extension of `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basepoints(pub Vec<f64>);

impl Basepoints {
    pub fn smallest_extension(system: &CantorSystem) -> Self {
        Basepoints(
            (0..system.spec().alphabet_len())
                .map(|a| system.basepoint(a))
                .collect(),
        )
    }
}

/// A pair of Cantor sets with the configured tail depth.
#[derive(Debug, Clone)]
pub struct ScalePair<'a> {
    pub k1: &'a CantorSystem,
    pub k2: &'a CantorSystem,
    pub base1: Basepoints,
    pub base2: Basepoints,
    /// Tails are truncated from the left to this many symbols.
    pub max_tail: usize,
    /// `c₀` for `Σ(ρ)`.
    pub c0: f64,
    pub budget: usize,
}

impl<'a> ScalePair<'a> {
    pub fn new(k1: &'a CantorSystem, k2: &'a CantorSystem) -> Self {
        ScalePair {
            k1,
            k2,
            base1: Basepoints::smallest_extension(k1),
            base2: Basepoints::smallest_extension(k2),
            max_tail: DEFAULT_MAX_TAIL,
            c0: 2.0,
            budget: 1 << 22,
        }
    }

    fn tails(&self, p: &RelativeScale) -> Result<(TailWord, TailWord)> {
        Ok((
            TailWord::new(self.k1.spec(), p.tail.clone())?,
            TailWord::new(self.k2.spec(), p.tail2.clone())?,
        ))
    }

    /// `|I^θ(a)|` with `k^θ` taken at the full depth of the stored tail.
    fn embedded_length(sys: &CantorSystem, tail: &TailWord, word: &[usize]) -> Result<f64> {
        Ok(LimitGeometry::bare(sys, tail, tail.len() - 1)?.interval_length(word))
    }

    fn check_join(sys: &CantorSystem, tail: &[usize], word: &[usize]) -> Result<()> {
        let last = tail[tail.len() - 1];
        if word.is_empty() || word[0] != last {
            return Err(Error::InadmissibleJoin(format!(
                "word {word:?} must start with the tail's last symbol {last}"
            )));
        }
        if !sys.spec().is_admissible(word) {
            return Err(Error::InadmissibleWord(word.to_vec()));
        }
        Ok(())
    }

    /// `T_a(θ, θ′, s) = (θσ(a), θ′, ε s |I(aₙ)| / |I^θ(a)|)`.
    pub fn renormalize(&self, p: &RelativeScale, word: &[usize]) -> Result<RelativeScale> {
        Self::check_join(self.k1, &p.tail, word)?;
        let (t1, _) = self.tails(p)?;
        let len = Self::embedded_length(self.k1, &t1, word)?;
        let eps = self.k1.orientation(word);
        let unit = self.k1.base(word[word.len() - 1]).len();
        Ok(RelativeScale {
            tail: t1.extended(word, self.max_tail).symbols().to_vec(),
            tail2: p.tail2.clone(),
            s: eps * p.s * unit / len,
        })
    }

    /// `T′_{a′}(θ, θ′, s) = (θ, θ′σ(a′), ε′ s |I^{θ′}(a′)| / |I′(a′ₙ)|)`.
    pub fn renormalize_prime(&self, p: &RelativeScale, word: &[usize]) -> Result<RelativeScale> {
        Self::check_join(self.k2, &p.tail2, word)?;
        let (_, t2) = self.tails(p)?;
        let len = Self::embedded_length(self.k2, &t2, word)?;
        let eps = self.k2.orientation(word);
        let unit = self.k2.base(word[word.len() - 1]).len();
        Ok(RelativeScale {
            tail: p.tail.clone(),
            tail2: t2.extended(word, self.max_tail).symbols().to_vec(),
            s: eps * p.s * len / unit,
        })
    }

    /// `t = k^θ(x) − k^θ(h(ω(θ₀))) − s (k′^{θ′}(x′) − k′^{θ′}(h(ω(θ′₀))))`.
    pub fn relative_projection(&self, p: &RelativeScale, x: f64, x2: f64) -> Result<f64> {
        let (e1, e2) = self.embeddings(p)?;
        Ok(e1.apply(x) - p.s * e2.apply(x2))
    }

    fn embeddings(&self, p: &RelativeScale) -> Result<(Placed<'_>, Placed<'_>)> {
        let (t1, t2) = self.tails(p)?;
        let k1 = LimitGeometry::bare(self.k1, &t1, t1.len() - 1)?;
        let k2 = LimitGeometry::bare(self.k2, &t2, t2.len() - 1)?;
        let o1 = k1.value(self.base1.0[t1.last()]);
        let o2 = k2.value(self.base2.0[t2.last()]);
        Ok((Placed { k: k1, origin: o1 }, Placed { k: k2, origin: o2 }))
    }

    /// Rectangles `k^θ(I(a)) × k′^{θ′}(I′(a′))` (shifted to the basepoints)
    /// over words of `Σ(δ) × Σ′(δ)` starting with `(θ₀, θ′₀)`.
    pub fn rectangles(&self, p: &RelativeScale, delta: f64) -> Result<Vec<DeltaRectangle>> {
        let (e1, e2) = self.embeddings(p)?;
        let w1 = self
            .k1
            .words_at_scale_from(&[p.tail[p.tail.len() - 1]], delta, self.c0, self.budget)?;
        let w2 = self
            .k2
            .words_at_scale_from(&[p.tail2[p.tail2.len() - 1]], delta, self.c0, self.budget)?;
        if w1.is_empty() || w2.is_empty() {
            return Err(Error::EmptyScale(delta));
        }
        if w1.len() * w2.len() > self.budget {
            return Err(Error::BudgetExceeded {
                what: format!("rectangles at scale {delta}"),
                budget: self.budget,
            });
        }
        let y: Vec<Interval> = w2.iter().map(|w| e2.interval(self.k2, w)).collect();
        let mut out = Vec::with_capacity(w1.len() * w2.len());
        for a in &w1 {
            let x = e1.interval(self.k1, a);
            for (b, &yb) in w2.iter().zip(&y) {
                out.push(DeltaRectangle {
                    word: a.symbols().to_vec(),
                    word2: b.symbols().to_vec(),
                    x,
                    y: yb,
                });
            }
        }
        Ok(out)
    }

    /// `N_δ(θ, θ′, s)`.
    pub fn overlap_count(&self, p: &RelativeScale, delta: f64) -> Result<u64> {
        Ok(count_overlaps(&self.rectangles(p, delta)?, p.s))
    }

    /// Pairs of `Σ(ρ) × Σ′(ρ)` whose words start with the given symbols.
    pub fn word_pairs(&self, a: usize, a2: usize, rho: f64) -> Result<(Vec<Word>, Vec<Word>)> {
        let w1 = self.k1.words_at_scale_from(&[a], rho, self.c0, self.budget)?;
        let w2 = self.k2.words_at_scale_from(&[a2], rho, self.c0, self.budget)?;
        if w1.is_empty() || w2.is_empty() {
            return Err(Error::EmptyScale(rho));
        }
        if w1.len() * w2.len() > self.budget {
            return Err(Error::BudgetExceeded {
                what: format!("{} x {} word pairs at scale {rho}", w1.len(), w2.len()),
                budget: self.budget,
            });
        }
        Ok((w1, w2))
    }

    /// Evaluates conditions (1) and (2) at one point; `dim_sum = d + d′`.
    pub fn good_scale_indicator(
        &self,
        p: &RelativeScale,
        rho: f64,
        m: usize,
        c5: f64,
        dim_sum: f64,
    ) -> Result<GoodScale> {
        let fine = rho.powf(1.0 / m as f64);
        let n1 = self.overlap_count(p, fine)?;
        let bound1 = c5 * rho.powf(-dim_sum / m as f64);
        let (a, a2) = (p.tail[p.tail.len() - 1], p.tail2[p.tail2.len() - 1]);
        let mut levels = Vec::with_capacity(m.saturating_sub(1));
        for j in 1..m {
            let hat = rho.powf(j as f64 / m as f64);
            let (w1, w2) = self.word_pairs(a, a2, hat)?;
            let mut sum = 0u64;
            for b in &w1 {
                let q = self.renormalize(p, b.symbols())?;
                for b2 in &w2 {
                    let q2 = self.renormalize_prime(&q, b2.symbols())?;
                    sum += self.overlap_count(&q2, fine)?;
                }
            }
            levels.push(LevelSum {
                rho_hat: hat,
                sum,
                bound: c5 * hat.powf(-dim_sum) * rho.powf(-dim_sum / m as f64),
            });
        }
        Ok(GoodScale {
            condition1: n1 as f64 <= bound1,
            condition2: levels.iter().all(|l| l.sum as f64 <= l.bound),
            count1: n1,
            bound1,
            levels,
        })
    }
}

struct Placed<'a> {
    k: LimitGeometry<'a>,
    origin: f64,
}

impl Placed<'_> {
    fn apply(&self, x: f64) -> f64 {
        self.k.value(x) - self.origin
    }

    fn interval(&self, sys: &CantorSystem, w: &Word) -> Interval {
        let iv = sys.cylinder_interval(w.symbols());
        Interval::new(self.apply(iv.lo), self.apply(iv.hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSum {
    pub rho_hat: f64,
    pub sum: u64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodScale {
    pub condition1: bool,
    pub condition2: bool,
    pub count1: u64,
    pub bound1: f64,
    pub levels: Vec<LevelSum>,
}

impl GoodScale {
    pub fn is_good(&self) -> bool {
        self.condition1 && self.condition2
    }

    /// Smallest `c₅` for which both conditions hold at this point.
    /// `c5_used` is the constant the indicator was evaluated with.
    pub fn required_c5(&self, c5_used: f64) -> f64 {
        let mut need = self.count1 as f64 / (self.bound1 / c5_used);
        for l in &self.levels {
            need = need.max(l.sum as f64 / (l.bound / c5_used));
        }
        need
    }
}

/// Calibrates `c₅` as `factor ×` the smallest value making every grid point
/// good, over the given tail pairs.
pub fn calibrate_c5(
    pair: &ScalePair<'_>,
    tails: &[(Vec<usize>, Vec<usize>)],
    s_grid: &[f64],
    rho: f64,
    m: usize,
    dim_sum: f64,
    factor: f64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (t1, t2) in tails {
        let needs: Vec<Result<f64>> = s_grid
            .par_iter()
            .map(|&s| {
                let p = RelativeScale {
                    tail: t1.clone(),
                    tail2: t2.clone(),
                    s,
                };
                let g = pair.good_scale_indicator(&p, rho, m, 1.0, dim_sum)?;
                Ok(g.required_c5(1.0))
            })
            .collect();
        for n in needs {
            worst = worst.max(n?);
        }
    }
    Ok(factor * worst)
}

/// A backward tail of the given length ending in `a`: at every step the
/// smallest admissible predecessor is prepended.
pub fn default_tail(system: &CantorSystem, a: usize, len: usize) -> Vec<usize> {
    let spec = system.spec();
    let mut v = vec![a];
    while v.len() < len {
        let head = v[0];
        let pred = (0..spec.alphabet_len())
            .find(|&b| spec.allows(b, head))
            .expect("every symbol has a predecessor");
        v.insert(0, pred);
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceRow {
    pub last: (usize, usize),
    pub s: f64,
    pub good: bool,
    /// Fraction of `(b, b′)` whose renormalized scale lands back in a good
    /// scale of the target tail pair (0 when `s` itself is not good).
    pub fraction: f64,
    pub pairs: usize,
}

/// Empirical recurrence: for each sampled tail pair (one per pair of last
/// symbols) and each good grid value `s`, the fraction of `(b, b′) ∈
/// Σ(ρ) × Σ′(ρ)` with `T_b T′_{b′}(θ, θ′, s)` within `ρ` (plus half a grid
/// step) of a good grid value of the target's tail pair.
#[allow(clippy::too_many_arguments)]
pub fn empirical_recurrence_map(
    pair: &ScalePair<'_>,
    rho: f64,
    s_grid: &[f64],
    m: usize,
    c5: f64,
    dim_sum: f64,
    r_window: f64,
    tail_len: usize,
) -> Result<Vec<RecurrenceRow>> {
    let k1 = pair.k1.spec().alphabet_len();
    let k2 = pair.k2.spec().alphabet_len();
    let mut good: Vec<Vec<bool>> = Vec::with_capacity(k1 * k2);
    for a in 0..k1 {
        for a2 in 0..k2 {
            let t1 = default_tail(pair.k1, a, tail_len);
            let t2 = default_tail(pair.k2, a2, tail_len);
            let flags: Vec<Result<bool>> = s_grid
                .par_iter()
                .map(|&s| {
                    let p = RelativeScale {
                        tail: t1.clone(),
                        tail2: t2.clone(),
                        s,
                    };
                    Ok(pair.good_scale_indicator(&p, rho, m, c5, dim_sum)?.is_good())
                })
                .collect();
            good.push(flags.into_iter().collect::<Result<_>>()?);
        }
    }
    let mut sorted: Vec<f64> = s_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let spacing = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    let margin = rho + 0.5 * spacing;
    let mut rows = Vec::new();
    for a in 0..k1 {
        for a2 in 0..k2 {
            let t1 = default_tail(pair.k1, a, tail_len);
            let t2 = default_tail(pair.k2, a2, tail_len);
            let (w1, w2) = pair.word_pairs(a, a2, rho)?;
            let flags = &good[a * k2 + a2];
            for (i, &s) in s_grid.iter().enumerate() {
                if !flags[i] {
                    rows.push(RecurrenceRow {
                        last: (a, a2),
                        s,
                        good: false,
                        fraction: 0.0,
                        pairs: w1.len() * w2.len(),
                    });
                    continue;
                }
                let p = RelativeScale {
                    tail: t1.clone(),
                    tail2: t2.clone(),
                    s,
                };
                let mut landed = 0usize;
                for b in &w1 {
                    let q = pair.renormalize(&p, b.symbols())?;
                    for b2 in &w2 {
                        let q2 = pair.renormalize_prime(&q, b2.symbols())?;
                        let target = (b.last(), b2.last());
                        let tflags = &good[target.0 * k2 + target.1];
                        let hit = in_window(q2.s, r_window + margin)
                            && s_grid
                                .iter()
                                .zip(tflags)
                                .any(|(&g, &ok)| ok && (g - q2.s).abs() <= margin);
                        if hit {
                            landed += 1;
                        }
                    }
                }
                let total = w1.len() * w2.len();
                rows.push(RecurrenceRow {
                    last: (a, a2),
                    s,
                    good: true,
                    fraction: landed as f64 / total as f64,
                    pairs: total,
                });
            }
        }
    }
    Ok(rows)
}

/// `n` log-spaced points per sign in `J_R`.
pub fn log_grid(r: f64, per_sign: usize) -> Vec<f64> {
    let lo = (1.0 / r).ln();
    let hi = r.ln();
    let pos: Vec<f64> = (0..per_sign)
        .map(|i| {
            let t = if per_sign == 1 { 0.5 } else { i as f64 / (per_sign - 1) as f64 };
            (lo + t * (hi - lo)).exp()
        })
        .collect();
    let mut out: Vec<f64> = pos.iter().rev().map(|s| -s).collect();
    out.extend(pos);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{gauss_digits, middle_third, two_ratio};

    fn point(t1: Vec<usize>, t2: Vec<usize>, s: f64) -> RelativeScale {
        RelativeScale { tail: t1, tail2: t2, s }
    }

    #[test]
    fn renormalize_middle_third() {
        let c = middle_third();
        let pair = ScalePair::new(&c, &c);
        let p = point(vec![0; 6], vec![0; 6], 1.0);
        let q = pair.renormalize(&p, &[0, 0, 0]).unwrap();
        assert!((q.s - 9.0).abs() < 1e-12);
        assert_eq!(q.tail.len(), 8);
        let back = pair.renormalize_prime(&point(vec![0; 6], vec![0; 6], 9.0), &[0, 0, 0]).unwrap();
        assert!((back.s - 1.0).abs() < 1e-12);
        assert!(matches!(
            pair.renormalize(&p, &[1, 0]),
            Err(Error::InadmissibleJoin(_))
        ));
    }

    #[test]
    fn gauss_orientation_bookkeeping() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let pair = ScalePair::new(&g, &g);
        let p = point(vec![0; 8], vec![0; 8], 0.7);
        let one = pair.renormalize(&p, &[0, 0]).unwrap();
        assert!(one.s < 0.0);
        let two = pair.renormalize(&p, &[0, 0, 0]).unwrap();
        assert!(two.s > 0.0);
    }

    #[test]
    fn cocycle() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let pair = ScalePair::new(&g, &g);
        let p = point(vec![0, 1, 1, 0, 1], vec![1, 0, 0], -1.3);
        let u = [1, 0, 1];
        let v = [1, 1, 0, 0];
        let seq = pair.renormalize(&pair.renormalize(&p, &u).unwrap(), &v).unwrap();
        let joined = pair.renormalize(&p, &[1, 0, 1, 1, 0, 0]).unwrap();
        assert!((seq.s - joined.s).abs() < 1e-12 * joined.s.abs());
        assert_eq!(seq.tail, joined.tail);
    }

    #[test]
    fn projection_examples() {
        let c = middle_third();
        let pair = ScalePair::new(&c, &c);
        let p = point(vec![0; 4], vec![0; 4], 1.0);
        assert!((pair.relative_projection(&p, 1.0, 1.0 / 3.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let b = pair.base1.0[0];
        assert_eq!(pair.relative_projection(&p, b, b).unwrap(), 0.0);
        let t = two_ratio(0.4, 0.3).unwrap();
        let pair = ScalePair::new(&t, &c);
        for s in [-2.0, 0.5, 3.0] {
            let p = point(vec![1, 0], vec![0, 0], s);
            let v = pair.relative_projection(&p, 0.37, 0.81).unwrap();
            assert!((v - (0.37 - s * 0.81)).abs() < 1e-14);
        }
    }

    #[test]
    fn good_scale_conditions() {
        let c = middle_third();
        let pair = ScalePair::new(&c, &c);
        let d = 2.0 * 2f64.ln() / 3f64.ln();
        let rho = 2f64.powi(-6);
        let p = point(vec![0; 8], vec![0; 8], 1.3);
        let big = pair.good_scale_indicator(&p, rho, 3, 1e6, d).unwrap();
        assert!(big.is_good());
        let zero = pair.good_scale_indicator(&p, rho, 3, 0.0, d).unwrap();
        assert!(!zero.condition1 && !zero.condition2);
        let resonant = pair.overlap_count(&point(vec![0; 8], vec![0; 8], 1.0), 3f64.powi(-4)).unwrap();
        let generic = pair
            .overlap_count(&point(vec![0; 8], vec![0; 8], 2f64.sqrt()), 3f64.powi(-4))
            .unwrap();
        assert!(resonant > generic, "{resonant} vs {generic}");
    }

    #[test]
    fn recurrence_report_and_empty_scale() {
        let c = middle_third();
        let pair = ScalePair::new(&c, &c);
        let d = 2.0 * 2f64.ln() / 3f64.ln();
        let grid = log_grid(4.0, 4);
        let rows = empirical_recurrence_map(&pair, 2f64.powi(-5), &grid, 3, 1e6, d, 4.0, 8).unwrap();
        assert_eq!(rows.len(), 4 * grid.len());
        assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.fraction)));
        let none = empirical_recurrence_map(&pair, 2f64.powi(-5), &grid, 3, 0.0, d, 4.0, 8).unwrap();
        assert!(none.iter().all(|r| !r.good && r.fraction == 0.0));
        assert!(matches!(
            pair.word_pairs(0, 0, 10.0),
            Err(Error::EmptyScale(_))
        ));
    }

    #[test]
    fn window_helpers() {
        assert!(in_window(-0.25, 4.0) && in_window(4.0, 4.0) && !in_window(0.2, 4.0));
        let g = log_grid(4.0, 25);
        assert_eq!(g.len(), 50);
        assert!(g.iter().all(|&s| in_window(s, 4.0 + 1e-12)));
    }
}
