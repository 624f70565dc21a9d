//! Regular Cantor sets: a subshift bound to base intervals and inverse branches.
//!
//! For a transition `(a₀, a₁)` the branch `f_{a₀a₁}` maps `I(a₁)` into
//! `I(a₀)`; a word `(a₀, …, aₙ)` has cylinder `I(a) = f_{a₀a₁} ∘ … ∘
//! f_{aₙ₋₁aₙ}(I(aₙ))`, so a word of length `n + 1` involves `n` branches.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::jet::{compose_jets, Branch, Jet2, Primitive};
use crate::symbolic::{enumerate_words, words_at_scale_by, SubshiftSpec, Word};

/// Absolute tolerance for fixed points of periodic words.
pub const FIXED_POINT_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct CantorSystem {
    name: String,
    spec: SubshiftSpec,
    base: Vec<Interval>,
    branches: Vec<Vec<Option<Branch>>>,
}

impl CantorSystem {
    /// Validates base intervals and one branch (a composition of primitives,
    /// outermost first) per transition.
    pub fn new(
        name: impl Into<String>,
        spec: SubshiftSpec,
        base: Vec<Interval>,
        branches: Vec<((usize, usize), Vec<Primitive>)>,
    ) -> Result<Self> {
        let k = spec.alphabet_len();
        if base.len() != k {
            return Err(Error::InvalidSystem(format!(
                "{} base intervals for {k} symbols",
                base.len()
            )));
        }
        let mut table: Vec<Vec<Option<Branch>>> = vec![vec![None; k]; k];
        for ((a0, a1), parts) in branches {
            if !spec.allows(a0, a1) {
                return Err(Error::InvalidSystem(format!(
                    "branch given for non-transition ({}, {})",
                    spec.name(a0.min(k - 1)),
                    spec.name(a1.min(k - 1))
                )));
            }
            if table[a0][a1].is_some() {
                return Err(Error::InvalidSystem(format!(
                    "duplicate branch for ({}, {})",
                    spec.name(a0),
                    spec.name(a1)
                )));
            }
            let branch = Branch::chain(parts, base[a1]).map_err(|e| {
                Error::InvalidSystem(format!("branch ({}, {}): {e}", spec.name(a0), spec.name(a1)))
            })?;
            let img = branch.image(base[a1]);
            let tol = 1e-12 * (1.0 + base[a0].len());
            if !base[a0].contains_interval(&img, tol) {
                return Err(Error::InvalidSystem(format!(
                    "image of branch ({}, {}) is not inside I({})",
                    spec.name(a0),
                    spec.name(a1),
                    spec.name(a0)
                )));
            }
            table[a0][a1] = Some(branch);
        }
        for (a0, a1) in spec.transitions() {
            if table[a0][a1].is_none() {
                return Err(Error::InvalidSystem(format!(
                    "missing branch for transition ({}, {})",
                    spec.name(a0),
                    spec.name(a1)
                )));
            }
        }
        // sibling cylinders must be pairwise disjoint
        for (a0, row) in table.iter().enumerate() {
            let imgs: Vec<(usize, Interval)> = spec
                .successors(a0)
                .map(|a1| (a1, row[a1].as_ref().expect("checked").image(base[a1])))
                .collect();
            for i in 0..imgs.len() {
                for j in i + 1..imgs.len() {
                    if imgs[i].1.intersects(&imgs[j].1) {
                        return Err(Error::InvalidSystem(format!(
                            "cylinders I({0},{1}) and I({0},{2}) overlap",
                            spec.name(a0),
                            spec.name(imgs[i].0),
                            spec.name(imgs[j].0)
                        )));
                    }
                }
            }
        }
        Ok(CantorSystem {
            name: name.into(),
            spec,
            base,
            branches: table,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn spec(&self) -> &SubshiftSpec {
        &self.spec
    }

    pub fn base(&self, a: usize) -> Interval {
        self.base[a]
    }

    pub fn base_intervals(&self) -> &[Interval] {
        &self.base
    }

    pub fn branch(&self, a0: usize, a1: usize) -> &Branch {
        self.branches[a0][a1]
            .as_ref()
            .expect("branch lookup on an admissible transition")
    }

    pub fn word(&self, symbols: Vec<usize>) -> Result<Word> {
        self.spec.word(symbols)
    }

    /// `I(a)`, by folding branch evaluations at the interval endpoints.
    pub fn cylinder_interval(&self, word: &[usize]) -> Interval {
        let n = word.len() - 1;
        let mut iv = self.base[word[n]];
        for i in (0..n).rev() {
            iv = self.branch(word[i], word[i + 1]).image(iv);
        }
        iv
    }

    /// `|I(a)|` as a product of divided differences (no endpoint cancellation).
    pub fn cylinder_length(&self, word: &[usize]) -> f64 {
        let n = word.len() - 1;
        let b = self.base[word[n]];
        let (mut y, mut z) = (b.hi, b.lo);
        let mut len = b.len();
        for i in (0..n).rev() {
            let br = self.branch(word[i], word[i + 1]);
            len *= br.divided_difference(y, z).abs();
            y = br.value(y);
            z = br.value(z);
        }
        len
    }

    /// Divided difference `(f_a(y) − f_a(z)) / (y − z)` of the composed word
    /// map, as a product over branches (the derivative when `y = z`).
    pub fn word_divided_difference(&self, word: &[usize], y: f64, z: f64) -> f64 {
        let n = word.len() - 1;
        let (mut y, mut z) = (y, z);
        let mut dq = 1.0;
        for i in (0..n).rev() {
            let br = self.branch(word[i], word[i + 1]);
            dq *= br.divided_difference(y, z);
            y = br.value(y);
            z = br.value(z);
        }
        dq
    }

    /// `+1` if `f_a` preserves orientation.
    pub fn orientation(&self, word: &[usize]) -> f64 {
        word.windows(2)
            .map(|w| self.branch(w[0], w[1]).orientation())
            .product()
    }

    /// Jet of `f_a` at `x ∈ I(aₙ)`.
    pub fn word_jet(&self, word: &[usize], x: f64) -> Jet2 {
        let n = word.len() - 1;
        let mut jet = Jet2::identity(x);
        for i in (0..n).rev() {
            let br = self.branch(word[i], word[i + 1]);
            jet = compose_jets(br.jet_unchecked(jet.value), jet);
        }
        jet
    }

    pub fn word_value(&self, word: &[usize], x: f64) -> f64 {
        let n = word.len() - 1;
        (0..n)
            .rev()
            .fold(x, |y, i| self.branch(word[i], word[i + 1]).value(y))
    }

    /// Enclosure of `|f_a'|` over `I(aₙ)`.
    pub fn word_derivative_range(&self, word: &[usize]) -> (f64, f64) {
        let n = word.len() - 1;
        let mut iv = self.base[word[n]];
        let (mut lo, mut hi) = (1.0, 1.0);
        for i in (0..n).rev() {
            let br = self.branch(word[i], word[i + 1]);
            let (a, b) = br
                .derivative_range(iv)
                .expect("cylinder images stay inside branch domains");
            lo *= a;
            hi *= b;
            iv = br.image(iv);
        }
        (lo, hi)
    }

    /// `(λ_inf, Λ_sup)`: enclosure of the infimum and supremum of `|(gⁿ)'|`
    /// over the cylinder of a word of length `n + 1`.
    pub fn derivative_bounds_on_cylinder(&self, word: &[usize]) -> (f64, f64) {
        let (lo, hi) = self.word_derivative_range(word);
        (1.0 / hi, 1.0 / lo)
    }

    /// Fixed point of `f_{w₀w₁} ∘ … ∘ f_{w_{p−1}w₀}` and its eigenvalue
    /// `1 / f'(p)` (signed).
    pub fn periodic_point(&self, word: &[usize]) -> Result<(f64, f64)> {
        if word.is_empty()
            || !self.spec.is_admissible(word)
            || !self.spec.allows(word[word.len() - 1], word[0])
        {
            return Err(Error::NotCyclicallyAdmissible(word.to_vec()));
        }
        let mut cycle = word.to_vec();
        cycle.push(word[0]);
        let dom = self.base[word[0]];
        // g(x) = f(x) - x is strictly decreasing; safeguarded Newton
        let (mut lo, mut hi) = (dom.lo, dom.hi);
        let mut x = dom.center();
        for _ in 0..200 {
            let j = self.word_jet(&cycle, x);
            let g = j.value - x;
            if g > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let mut next = x - g / (j.d1 - 1.0);
            if !(next >= lo && next <= hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - x).abs();
            x = next;
            if step < FIXED_POINT_TOL * 1e-2 || g == 0.0 {
                break;
            }
        }
        let j = self.word_jet(&cycle, x);
        Ok((x, 1.0 / j.d1))
    }

    /// Cylinder containing `h(a)` for a prefix of an address `a ∈ Σ⁺`.
    pub fn address_prefix_to_interval(&self, prefix: &[usize]) -> Result<Interval> {
        if !self.spec.is_admissible(prefix) {
            return Err(Error::InadmissibleWord(prefix.to_vec()));
        }
        Ok(self.cylinder_interval(prefix))
    }

    /// `λ₁ = min over transitions of 1 / max |f'|`.
    pub fn expansion_lower_bound(&self) -> f64 {
        self.spec
            .transitions()
            .into_iter()
            .map(|(a0, a1)| {
                let b = self.branch(a0, a1);
                1.0 / b.derivative_range(b.domain()).expect("own domain").1
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Empirical bounded-distortion constant: the minimum of `λ_inf / Λ_sup`
    /// over all cylinders of words of length `depth + 1`. This is a lower
    /// estimate certified only at the audited depth.
    pub fn distortion_estimate(&self, depth: usize) -> f64 {
        enumerate_words(&self.spec, depth + 1)
            .iter()
            .map(|w| {
                let (l, u) = self.derivative_bounds_on_cylinder(w.symbols());
                l / u
            })
            .fold(1.0, f64::min)
    }

    /// `Σ(ρ)`: words with `ρ/c₀ ≤ |I(a)| ≤ c₀ρ`.
    pub fn words_at_scale(&self, rho: f64, c0: f64, budget: usize) -> Result<Vec<Word>> {
        let starts: Vec<usize> = (0..self.spec.alphabet_len()).collect();
        self.words_at_scale_from(&starts, rho, c0, budget)
    }

    pub fn words_at_scale_from(
        &self,
        starts: &[usize],
        rho: f64,
        c0: f64,
        budget: usize,
    ) -> Result<Vec<Word>> {
        words_at_scale_by(&self.spec, starts, rho, c0, budget, |w| self.cylinder_length(w))
    }

    /// Stopping-time cover: words with `|I(a)| ≤ δ < |I(a minus its last symbol)|`
    /// (single symbols qualify when `|I(a)| ≤ δ`). These cylinders partition
    /// the Cantor set.
    pub fn cover_at_scale(&self, starts: &[usize], delta: f64, budget: usize) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        let mut visited = 0usize;
        let mut stack = Vec::new();
        for &a in starts {
            stack.push(a);
            self.cover_dfs(&mut stack, delta, budget, &mut visited, &mut out)?;
            stack.pop();
        }
        Ok(out)
    }

    fn cover_dfs(
        &self,
        stack: &mut Vec<usize>,
        delta: f64,
        budget: usize,
        visited: &mut usize,
        out: &mut Vec<Word>,
    ) -> Result<()> {
        *visited += 1;
        if *visited > budget {
            return Err(Error::BudgetExceeded {
                what: format!("cover at scale {delta}"),
                budget,
            });
        }
        if self.cylinder_length(stack) <= delta {
            out.push(Word::from_vec_unchecked(stack.clone()));
            return Ok(());
        }
        let last = *stack.last().expect("nonempty");
        let succ: Vec<usize> = self.spec.successors(last).collect();
        for b in succ {
            stack.push(b);
            self.cover_dfs(stack, delta, budget, visited, out)?;
            stack.pop();
        }
        Ok(())
    }

    /// `ω(a)`: the lexicographically smallest admissible sequence starting
    /// with `a`, as a (pre-period, period) pair of symbol lists.
    pub fn smallest_extension(&self, a: usize) -> (Vec<usize>, Vec<usize>) {
        let mut seq = vec![a];
        loop {
            let last = *seq.last().expect("nonempty");
            let next = self.spec.successors(last).next().expect("every symbol has a successor");
            if let Some(pos) = seq.iter().position(|&s| s == next) {
                let period = seq[pos..].to_vec();
                seq.truncate(pos);
                return (seq, period);
            }
            seq.push(next);
        }
    }

    /// `h(ω(a))`, the point of `K(a)` addressed by the smallest extension of `a`.
    pub fn basepoint(&self, a: usize) -> f64 {
        let (pre, period) = self.smallest_extension(a);
        let (p, _) = self
            .periodic_point(&period)
            .expect("periodic part of a greedy sequence is cyclically admissible");
        let mut word = pre;
        word.push(period[0]);
        self.word_value(&word, p)
    }
}

/// Middle-α Cantor set: remove the open middle fraction `α` of `[0, 1]`.
pub fn middle_alpha(alpha: f64) -> Result<CantorSystem> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidSystem(format!("middle_alpha needs 0 < α < 1, got {alpha}")));
    }
    let r = (1.0 - alpha) / 2.0;
    two_ratio(r, r).map(|s| s.with_name(format!("middle_alpha({alpha})")))
}

pub fn middle_third() -> CantorSystem {
    middle_alpha(1.0 / 3.0)
        .expect("valid")
        .with_name("middle_third")
}

/// Full 2-shift with affine maps of ratios `r₁` (left) and `r₂` (right) on `[0, 1]`.
pub fn two_ratio(r1: f64, r2: f64) -> Result<CantorSystem> {
    if !(r1 > 0.0 && r2 > 0.0 && r1 + r2 < 1.0) {
        return Err(Error::InvalidSystem(format!(
            "two_ratio needs positive ratios with r1 + r2 < 1, got ({r1}, {r2})"
        )));
    }
    let spec = SubshiftSpec::full_shift(2)?;
    let unit = Interval::new(0.0, 1.0);
    let maps = [Primitive::affine(0.0, r1), Primitive::affine(1.0 - r2, r2)];
    let branches = (0..2)
        .flat_map(|a0| (0..2).map(move |a1| ((a0, a1), vec![maps[a1]])))
        .collect();
    CantorSystem::new(format!("two_ratio({r1},{r2})"), spec, vec![unit, unit], branches)
}

/// Continued-fraction Cantor set with partial quotients restricted to `digits`.
///
/// Base interval `I(a)` is the convex hull of the points whose first partial
/// quotient is `a`; the branch for `(a₀, a₁)` is `y ↦ 1/(a₀ + y)` on `I(a₁)`.
pub fn gauss_digits(digits: &[u32]) -> Result<CantorSystem> {
    let mut ds: Vec<u32> = digits.to_vec();
    ds.sort_unstable();
    ds.dedup();
    if ds.len() < 2 || ds[0] == 0 {
        return Err(Error::InvalidSystem(
            "gauss_digits needs at least two distinct positive digits".into(),
        ));
    }
    let amin = ds[0] as f64;
    let amax = *ds.last().expect("nonempty") as f64;
    // hull [m, M] of the set: m = 1/(amax + M), M = 1/(amin + m)
    let (mut m, mut big_m) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let nm = 1.0 / (amax + big_m);
        let nbig = 1.0 / (amin + nm);
        if (nm - m).abs() < 1e-17 && (nbig - big_m).abs() < 1e-17 {
            m = nm;
            big_m = nbig;
            break;
        }
        m = nm;
        big_m = nbig;
    }
    let names: Vec<String> = ds.iter().map(u32::to_string).collect();
    let k = ds.len();
    let spec = SubshiftSpec::full_shift(k)?;
    let spec = SubshiftSpec::new(names, &spec.transitions())?;
    let base: Vec<Interval> = ds
        .iter()
        .map(|&a| Interval::new(1.0 / (a as f64 + big_m), 1.0 / (a as f64 + m)))
        .collect();
    let branches = (0..k)
        .flat_map(|a0| {
            let a = ds[a0] as f64;
            (0..k).map(move |a1| ((a0, a1), vec![Primitive::moebius(0.0, 1.0, 1.0, a)]))
        })
        .collect();
    let label: Vec<String> = ds.iter().map(u32::to_string).collect();
    CantorSystem::new(format!("gauss_digits({})", label.join(",")), spec, base, branches)
}

/// Replaces every affine branch `p + qx` by `p + qx + εx²(1−x)`.
pub fn perturbed(base: &CantorSystem, eps: f64) -> Result<CantorSystem> {
    let mut branches = Vec::new();
    for (a0, a1) in base.spec.transitions() {
        let parts = base.branch(a0, a1).parts();
        let new_parts: Vec<Primitive> = parts
            .iter()
            .map(|p| match *p {
                Primitive::Affine { p, q } => Ok(Primitive::perturbed(p, q, eps)),
                _ => Err(Error::InvalidSystem(
                    "perturbed() applies to affine branches only".into(),
                )),
            })
            .collect::<Result<_>>()?;
        branches.push(((a0, a1), new_parts));
    }
    CantorSystem::new(
        format!("perturbed({}, {eps})", base.name),
        base.spec.clone(),
        base.base.clone(),
        branches,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn middle_third_cylinders() {
        let c = middle_third();
        let iv = c.cylinder_interval(&[0, 0]);
        assert!((iv.lo - 0.0).abs() < 1e-15 && (iv.hi - 1.0 / 3.0).abs() < 1e-15);
        let iv = c.cylinder_interval(&[0, 0, 0]);
        assert!((iv.hi - 1.0 / 9.0).abs() < 1e-15);
        let iv = c.cylinder_interval(&[0, 0, 1]);
        assert!((iv.lo - 2.0 / 9.0).abs() < 1e-15 && (iv.hi - 3.0 / 9.0).abs() < 1e-15);
        assert_eq!(c.cylinder_interval(&[1]), Interval::new(0.0, 1.0));
    }

    #[test]
    fn gauss_cylinder_matches_continued_fraction_endpoints() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let (s1, s2) = (0usize, 1usize);
        // word (1,2,1): x = 1/(1 + 1/(2 + y)), y ∈ I(1)
        let iv = g.cylinder_interval(&[s1, s2, s1]);
        let base1 = g.base(s1);
        let direct = |y: f64| 1.0 / (1.0 + 1.0 / (2.0 + y));
        let oracle = Interval::new(direct(base1.lo), direct(base1.hi));
        assert!((iv.lo - oracle.lo).abs() < 1e-15 && (iv.hi - oracle.hi).abs() < 1e-15);
        assert!((g.cylinder_length(&[s1, s2, s1]) - oracle.len()).abs() < 1e-15);
        // hull endpoints: (sqrt3 - 1)/2 and sqrt3 - 1
        let s3 = 3f64.sqrt();
        assert!((g.base(s2).lo - (s3 - 1.0) / 2.0).abs() < 1e-15);
        assert!((g.base(s1).hi - (s3 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn derivative_bounds_examples() {
        let c = middle_third();
        let (l, u) = c.derivative_bounds_on_cylinder(&[0, 1, 0]);
        assert!((l - 9.0).abs() < 1e-12 && (u - 9.0).abs() < 1e-12);
        let t = two_ratio(0.5, 0.25).unwrap();
        let (l, u) = t.derivative_bounds_on_cylinder(&[0, 1, 0]);
        assert!((l - 8.0).abs() < 1e-12 && (u - 8.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_derivative_enclosure_contains_samples() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let w = [0, 0, 0];
        let (l, u) = g.derivative_bounds_on_cylinder(&w);
        for y in g.base(0).grid(1001) {
            // |(g^2)'| at f_w(y) equals 1/|f_w'(y)|
            let d = 1.0 / g.word_jet(&w, y).d1.abs();
            assert!(l * (1.0 - 1e-12) <= d && d <= u * (1.0 + 1e-12));
        }
        assert!(l <= u);
    }

    #[test]
    fn periodic_points() {
        let c = middle_third();
        let (p, e) = c.periodic_point(&[0]).unwrap();
        assert!(p.abs() < 1e-14 && (e - 3.0).abs() < 1e-12);
        let (p, e) = c.periodic_point(&[1]).unwrap();
        assert!((p - 1.0).abs() < 1e-14 && (e - 3.0).abs() < 1e-12);
        let g = gauss_digits(&[1, 2]).unwrap();
        let (p, e) = g.periodic_point(&[0]).unwrap();
        assert!((p - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-14);
        assert!((e + PHI * PHI).abs() < 1e-12);
        let (_, e1) = g.periodic_point(&[0, 1]).unwrap();
        let (_, e2) = g.periodic_point(&[0, 1, 0, 1]).unwrap();
        assert!((e2 - e1 * e1).abs() < 1e-10 * e2.abs());
    }

    #[test]
    fn not_cyclically_admissible() {
        let spec = SubshiftSpec::new(vec!["0".into(), "1".into()], &[(0, 0), (0, 1), (1, 0)]).unwrap();
        let unit = Interval::new(0.0, 1.0);
        let sys = CantorSystem::new(
            "golden",
            spec,
            vec![unit, unit],
            vec![
                ((0, 0), vec![Primitive::affine(0.0, 0.3)]),
                ((0, 1), vec![Primitive::affine(0.6, 0.3)]),
                ((1, 0), vec![Primitive::affine(0.0, 0.4)]),
            ],
        )
        .unwrap();
        assert!(matches!(
            sys.periodic_point(&[1]),
            Err(Error::NotCyclicallyAdmissible(_))
        ));
        assert!(sys.periodic_point(&[0, 1]).is_ok());
    }

    #[test]
    fn address_prefixes_shrink_to_points() {
        let c = middle_third();
        // address (1,0,1,0,...) is the point with ternary digits 0,2,0,2,... = 1/4
        let mut prefix = vec![];
        for k in 1..=20 {
            prefix.push(if k % 2 == 1 { 1 } else { 0 });
            let iv = c.address_prefix_to_interval(&prefix).unwrap();
            assert!((iv.len() - 3f64.powi(1 - k)).abs() < 1e-14);
            if k > 1 {
                assert!(iv.contains_approx(0.25, 1e-15));
            }
        }
        assert_eq!(c.address_prefix_to_interval(&[0]).unwrap(), c.base(0));
        let iv = c.address_prefix_to_interval(&[0; 12]).unwrap();
        assert_eq!(iv.lo, 0.0);
    }

    #[test]
    fn validation_rejects_overlaps_and_escapes() {
        let spec = SubshiftSpec::full_shift(2).unwrap();
        let unit = Interval::new(0.0, 1.0);
        let overlapping = vec![
            ((0, 0), vec![Primitive::affine(0.0, 0.6)]),
            ((0, 1), vec![Primitive::affine(0.5, 0.4)]),
            ((1, 0), vec![Primitive::affine(0.0, 0.3)]),
            ((1, 1), vec![Primitive::affine(0.6, 0.3)]),
        ];
        assert!(CantorSystem::new("x", spec.clone(), vec![unit, unit], overlapping).is_err());
        let escaping = vec![
            ((0, 0), vec![Primitive::affine(0.0, 0.3)]),
            ((0, 1), vec![Primitive::affine(0.8, 0.3)]),
            ((1, 0), vec![Primitive::affine(0.0, 0.3)]),
            ((1, 1), vec![Primitive::affine(0.6, 0.3)]),
        ];
        assert!(CantorSystem::new("x", spec, vec![unit, unit], escaping).is_err());
    }

    #[test]
    fn bounded_distortion_stabilizes() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let est: Vec<f64> = (1..=8).map(|n| g.distortion_estimate(n)).collect();
        for w in est.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "estimates must not increase: {est:?}");
        }
        // increments shrink: the estimate converges to a positive constant
        let last_drop = est[6] - est[7];
        let first_drop = est[0] - est[1];
        assert!(last_drop < 0.1 * first_drop.max(1e-12) + 1e-6, "{est:?}");
        assert!(est[7] > 0.5);
        let c = middle_third();
        assert!((c.distortion_estimate(5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expansion_bound() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let l1 = g.expansion_lower_bound();
        assert!(l1 > 1.0);
        for n in 1..6 {
            for w in enumerate_words(g.spec(), n + 1) {
                let (_, big) = g.derivative_bounds_on_cylinder(w.symbols());
                assert!(big >= l1.powi(n as i32) * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn basepoints() {
        let c = middle_third();
        assert_eq!(c.basepoint(0), 0.0);
        let g = gauss_digits(&[1, 2]).unwrap();
        let b = g.basepoint(1);
        assert!(g.base(1).contains(b));
    }
}
