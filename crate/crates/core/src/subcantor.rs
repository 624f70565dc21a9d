//! Extraction of a regular sub-Cantor set with dimension in a prescribed
//! interval, by keeping a greedy subfamily of marker-delimited blocks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::{bisect, pressure_dimension, DimensionBracket, ROOT_TOL};
use crate::error::{Error, Result};
use crate::jet::Primitive;
use crate::symbolic::{enumerate_words, enumerate_words_from, SubshiftSpec};
use crate::system::CantorSystem;

/// Safety factor applied to the measured distortion constant.
pub const C_HAT_FACTOR: f64 = 0.9;
/// Depth at which the block system's bracket is audited.
pub const AUDIT_DEPTH: usize = 2;
/// Largest block length tried.
pub const MAX_BLOCK_LEN: usize = 40;

/// Which interval the result is certified against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifyTarget {
    /// `(a, b)`.
    #[default]
    Full,
    /// `(a, (a+b)/2)`.
    LowerHalf,
}

#[derive(Debug, Clone, Serialize)]
pub struct KeptWord {
    pub symbols: Vec<usize>,
    /// `λ_{n,R}` and `Λ_{n,R}` of the block's cylinder.
    pub lambda: f64,
    pub big_lambda: f64,
}

#[derive(Debug, Clone)]
pub struct SubCantorResult {
    pub n: usize,
    /// `(c̃, d̃)`: kept words start with `c̃` and end with `d̃`.
    pub markers: (usize, usize),
    pub kept: Vec<KeptWord>,
    pub pivot: KeptWord,
    pub c_hat: f64,
    pub d_n: f64,
    /// `∑_kept Λ^{−(a+b)/2}` and the same sum with the pivot restored.
    pub kept_sum: f64,
    pub sum_with_pivot: f64,
    /// `∑_kept Λ^{−a}` (must exceed 1).
    pub lower_sum: f64,
    /// `∑_kept λ^{−(a+b)/2}` (must stay below 1).
    pub upper_sum: f64,
    pub system: CantorSystem,
    pub bracket: DimensionBracket,
}

impl SubCantorResult {
    /// Re-evaluates the greedy stopping inequalities from the stored words.
    pub fn greedy_stop_holds(&self, a: f64, b: f64) -> bool {
        let mid = 0.5 * (a + b);
        let kept: f64 = self.kept.iter().map(|w| w.big_lambda.powf(-mid)).sum();
        let with = kept + self.pivot.big_lambda.powf(-mid);
        kept <= self.c_hat && with > self.c_hat
    }
}

/// `d_n`: root of `∑ Λ_{n,R}^{−d} = 1` over all words with `n` branches.
fn d_n(system: &CantorSystem, n: usize) -> f64 {
    let lambdas: Vec<f64> = enumerate_words(system.spec(), n + 1)
        .par_iter()
        .map(|w| system.derivative_bounds_on_cylinder(w.symbols()).1)
        .collect();
    let f = |d: f64| lambdas.iter().map(|l| l.powf(-d)).sum::<f64>() - 1.0;
    bisect(f, 0.0, 4.0, ROOT_TOL)
}

/// First `(d̃, c̃)` transition in lexicographic order.
fn markers(spec: &SubshiftSpec) -> (usize, usize) {
    let (d, c) = spec.transitions()[0];
    (c, d)
}

fn block_words(system: &CantorSystem, c: usize, d: usize, n: usize) -> Vec<KeptWord> {
    let words: Vec<Vec<usize>> = enumerate_words_from(system.spec(), c, n)
        .into_iter()
        .map(|w| w.into_vec())
        .filter(|w| w[n - 1] == d)
        .collect();
    words
        .into_par_iter()
        .map(|w| {
            let mut ext = w.clone();
            ext.push(c);
            let (lambda, big_lambda) = system.derivative_bounds_on_cylinder(&ext);
            KeptWord {
                symbols: w,
                lambda,
                big_lambda,
            }
        })
        .collect()
}

/// Block system over the kept words: every symbol lives on `I(c̃)` and the
/// branch into symbol `j` is `f_{b₁b₂} ∘ … ∘ f_{bₙc̃}` for the `j`-th kept word.
pub fn block_system(system: &CantorSystem, c: usize, kept: &[KeptWord]) -> Result<CantorSystem> {
    let k = kept.len();
    let spec = SubshiftSpec::full_shift(k)?;
    let base = vec![system.base(c); k];
    let parts: Vec<Vec<Primitive>> = kept
        .iter()
        .map(|w| {
            let mut ext = w.symbols.clone();
            ext.push(c);
            ext.windows(2)
                .flat_map(|p| system.branch(p[0], p[1]).parts().to_vec())
                .collect()
        })
        .collect();
    let branches = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| ((i, j), parts[j].clone()))
        .collect();
    CantorSystem::new(format!("block({}, n={})", system.name(), kept[0].symbols.len()), spec, base, branches)
}

/// Extracts `K̃ ⊆ K` with `a < HD(K̃) < b`; `d_lower` is the audited lower
/// dimension bound of `K`.
pub fn extract_subcantor(
    system: &CantorSystem,
    a: f64,
    b: f64,
    d_lower: f64,
    target: CertifyTarget,
    budget: usize,
) -> Result<SubCantorResult> {
    if !(0.0..b).contains(&a) {
        return Err(Error::Config(format!("need 0 <= a < b, got a = {a}, b = {b}")));
    }
    if b > d_lower {
        return Err(Error::TargetAboveDimension { b, d_lower });
    }
    let eps = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let hi = match target {
        CertifyTarget::Full => b,
        CertifyTarget::LowerHalf => mid,
    };
    let (c, d) = markers(system.spec());
    let lambda1 = system.expansion_lower_bound();
    let mut last_failure = String::from("no block length satisfied the selection rules");
    for n in 2..=MAX_BLOCK_LEN {
        let total = crate::dimension::count_words(system, n + 1);
        if total > budget as f64 {
            return Err(Error::BudgetExceeded {
                what: format!("{total} words of block length {n} ({last_failure})"),
                budget,
            });
        }
        let dn = d_n(system, n);
        let c_hat = C_HAT_FACTOR * system.distortion_estimate(n);
        if dn <= mid + 0.5 * eps || lambda1.powf(n as f64 * eps) <= 2.0 / c_hat {
            continue;
        }
        let mut words = block_words(system, c, d, n);
        // largest Λ first; ties broken by the word itself
        words.sort_by(|x, y| {
            y.big_lambda
                .total_cmp(&x.big_lambda)
                .then_with(|| x.symbols.cmp(&y.symbols))
        });
        let mut sum: f64 = words.iter().map(|w| w.big_lambda.powf(-mid)).sum();
        if sum <= c_hat {
            last_failure = format!("block length {n}: marker sum {sum} <= c_hat {c_hat}");
            continue;
        }
        let mut removed = 0;
        let pivot = loop {
            let w = &words[removed];
            let term = w.big_lambda.powf(-mid);
            removed += 1;
            if sum - term <= c_hat {
                sum -= term;
                break w.clone();
            }
            sum -= term;
        };
        let kept: Vec<KeptWord> = words[removed..].to_vec();
        if kept.is_empty() {
            last_failure = format!("block length {n}: nothing kept");
            continue;
        }
        let kept_sum: f64 = kept.iter().map(|w| w.big_lambda.powf(-mid)).sum();
        let sum_with_pivot = kept_sum + pivot.big_lambda.powf(-mid);
        let lower_sum: f64 = kept.iter().map(|w| w.big_lambda.powf(-a)).sum();
        let upper_sum: f64 = kept.iter().map(|w| w.lambda.powf(-mid)).sum();
        if !(lower_sum > 1.0 && upper_sum < 1.0) {
            last_failure = format!(
                "block length {n}: sum Lambda^-a = {lower_sum}, sum lambda^-(a+b)/2 = {upper_sum}"
            );
            continue;
        }
        let block = block_system(system, c, &kept)?;
        let bracket = pressure_dimension(&block, AUDIT_DEPTH, budget)?;
        if !(bracket.d_lower > a && bracket.d_upper < hi) {
            last_failure = format!(
                "block length {n}: bracket [{}, {}] not inside ({a}, {hi})",
                bracket.d_lower, bracket.d_upper
            );
            continue;
        }
        return Ok(SubCantorResult {
            n,
            markers: (c, d),
            kept,
            pivot,
            c_hat,
            d_n: dn,
            kept_sum,
            sum_with_pivot,
            lower_sum,
            upper_sum,
            system: block,
            bracket,
        });
    }
    Err(Error::DistortionTooWeak(last_failure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{gauss_digits, middle_third, two_ratio};

    const LOG32: f64 = 0.630_929_753_571_457_4;

    #[test]
    fn middle_third_extraction() {
        let c = middle_third();
        let r = extract_subcantor(&c, 0.3, 0.45, LOG32, CertifyTarget::Full, 1 << 22).unwrap();
        assert!(r.bracket.d_lower > 0.3 && r.bracket.d_upper < 0.45, "{:?}", r.bracket);
        assert!(r.greedy_stop_holds(0.3, 0.45));
        assert!(r.lower_sum > 1.0 && r.upper_sum < 1.0);
        for w in &r.kept {
            assert_eq!(w.symbols[0], r.markers.0);
            assert_eq!(*w.symbols.last().unwrap(), r.markers.1);
        }
        assert!(c.spec().allows(r.markers.1, r.markers.0));
        // affine: the exact dimension is log #kept / log 3^n
        let exact = (r.kept.len() as f64).ln() / (r.n as f64 * 3f64.ln());
        assert!((r.bracket.d_lower - exact).abs() < 1e-9);
        assert!(exact < 0.375);
    }

    #[test]
    fn target_above_dimension() {
        let c = middle_third();
        assert!(matches!(
            extract_subcantor(&c, 0.7, 0.8, LOG32, CertifyTarget::Full, 1 << 20),
            Err(Error::TargetAboveDimension { .. })
        ));
    }

    #[test]
    fn zero_lower_target() {
        let t = two_ratio(0.3, 0.2).unwrap();
        let d = pressure_dimension(&t, 8, 1 << 20).unwrap();
        let r = extract_subcantor(&t, 0.0, d.d_lower, d.d_lower, CertifyTarget::Full, 1 << 22).unwrap();
        assert!(!r.kept.is_empty());
        assert_eq!(r.lower_sum, r.kept.len() as f64);
    }

    #[test]
    fn narrower_targets_need_longer_blocks() {
        let c = middle_third();
        let wide = extract_subcantor(&c, 0.3, 0.45, LOG32, CertifyTarget::Full, 1 << 22).unwrap();
        let narrow = extract_subcantor(&c, 0.31, 0.44, LOG32, CertifyTarget::Full, 1 << 22).unwrap();
        assert!(narrow.n >= wide.n);
        let half = extract_subcantor(&c, 0.3, 0.45, LOG32, CertifyTarget::LowerHalf, 1 << 22).unwrap();
        assert!(half.bracket.d_upper < 0.375);
    }

    #[test]
    fn gauss_extraction() {
        let g = gauss_digits(&[1, 2]).unwrap();
        let d = pressure_dimension(&g, 8, 1 << 20).unwrap();
        let r = extract_subcantor(&g, 0.1, 0.3, d.d_lower, CertifyTarget::Full, 1 << 23).unwrap();
        assert!(r.bracket.d_lower > 0.1 && r.bracket.d_upper < 0.3, "{:?}", r.bracket);
        assert!(r.greedy_stop_holds(0.1, 0.3));
    }
}
