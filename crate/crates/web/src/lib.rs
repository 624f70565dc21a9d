//! Browser bindings for a few cantorlab operations.
//!
//! Every exported function takes plain numbers and returns a flat `f64` array,
//! so the page needs no glue beyond what `wasm-bindgen` generates.

use cantorlab::dimension::pressure_dimension;
use cantorlab::scale_space::log_grid;
use cantorlab::sum_image::{dimension_scan, BivariateMap};
use cantorlab::symbolic::enumerate_words;
use cantorlab::system::{perturbed, two_ratio, CantorSystem};
use wasm_bindgen::prelude::*;

const BUDGET: usize = 1 << 20;

fn system(r1: f64, r2: f64, eps: f64) -> cantorlab::Result<CantorSystem> {
    let base = two_ratio(r1, r2)?;
    if eps == 0.0 {
        Ok(base)
    } else {
        perturbed(&base, eps)
    }
}

/// `[d_lower, d_upper]`.
pub fn bracket(r1: f64, r2: f64, eps: f64, depth: usize) -> cantorlab::Result<Vec<f64>> {
    let b = pressure_dimension(&system(r1, r2, eps)?, depth, BUDGET)?;
    Ok(vec![b.d_lower, b.d_upper])
}

/// Cylinder endpoints `[lo0, hi0, lo1, hi1, ...]` for all words of `depth` branches.
pub fn cylinders(r1: f64, r2: f64, eps: f64, depth: usize) -> cantorlab::Result<Vec<f64>> {
    let sys = system(r1, r2, eps)?;
    let words = enumerate_words(sys.spec(), depth + 1);
    if words.len() > BUDGET {
        return Err(cantorlab::Error::BudgetExceeded {
            what: "cylinders".into(),
            budget: BUDGET,
        });
    }
    Ok(words
        .iter()
        .flat_map(|w| {
            let iv = sys.cylinder_interval(w.symbols());
            [iv.lo, iv.hi]
        })
        .collect())
}

/// Box-counting slopes of `K + sK` over a log-spaced grid of `s`: `[s0, slope0, s1, slope1, ...]`.
pub fn sum_scan(r1: f64, r2: f64, eps: f64, per_sign: usize) -> cantorlab::Result<Vec<f64>> {
    let sys = system(r1, r2, eps)?;
    let grid = log_grid(4.0, per_sign.max(1));
    let deltas: Vec<f64> = (5..=12).map(|k| 2f64.powi(-k)).collect();
    let rows = dimension_scan(
        |s| BivariateMap::LinearProjection { s },
        &grid,
        &sys,
        &sys,
        &deltas,
        1.0,
        0.1,
        BUDGET,
    )?;
    Ok(rows.iter().flat_map(|r| [r.s, r.slope]).collect())
}

fn js(r: cantorlab::Result<Vec<f64>>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = dimensionBracket)]
pub fn dimension_bracket_js(r1: f64, r2: f64, eps: f64, depth: usize) -> Result<Vec<f64>, JsError> {
    js(bracket(r1, r2, eps, depth))
}

#[wasm_bindgen(js_name = cylinderIntervals)]
pub fn cylinder_intervals_js(r1: f64, r2: f64, eps: f64, depth: usize) -> Result<Vec<f64>, JsError> {
    js(cylinders(r1, r2, eps, depth))
}

#[wasm_bindgen(js_name = sumScan)]
pub fn sum_scan_js(r1: f64, r2: f64, eps: f64, per_sign: usize) -> Result<Vec<f64>, JsError> {
    js(sum_scan(r1, r2, eps, per_sign))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn middle_third_bracket() {
        let b = bracket(1.0 / 3.0, 1.0 / 3.0, 0.0, 4).unwrap();
        let d = 2f64.ln() / 3f64.ln();
        assert!((b[0] - d).abs() < 1e-9 && (b[1] - d).abs() < 1e-9);
    }

    #[test]
    fn cylinder_count_and_order() {
        let c = cylinders(0.3, 0.2, 0.0, 3).unwrap();
        assert_eq!(c.len(), 2 * 16);
        let total: f64 = c.chunks(2).map(|p| p[1] - p[0]).sum();
        assert!((total - 2.0 * 0.5f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn scan_shape() {
        let r = sum_scan(0.3, 0.3, 0.0, 2).unwrap();
        assert_eq!(r.len(), 8);
        assert!(r.chunks(2).all(|p| p[1] > 0.5 && p[1] <= 1.1));
    }
}
