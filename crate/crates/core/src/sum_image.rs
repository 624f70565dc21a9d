//! Box-counting scans of `f(K × K′)` for linear projections, sums and
//! quadratic maps, and the gradient condition.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::{box_dimension_estimate, BoxFit};
use crate::error::{Error, Result};
use crate::interval::{grid_cells_hit, union, Interval};
use crate::symbolic::Word;
use crate::system::CantorSystem;

/// Both partials must exceed this in absolute value for a witness.
pub const GRADIENT_TOL: f64 = 1e-6;
/// Number of finest scales used by the slope fit.
pub const FIT_SCALES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BivariateMap {
    /// `(x, y) ↦ x − s y`.
    LinearProjection { s: f64 },
    /// `(x, y) ↦ x + s y`.
    Sum { s: f64 },
    /// `c₀ + c₁x + c₂y + c₃x² + c₄xy + c₅y²`.
    Quadratic { coeffs: [f64; 6] },
}

impl BivariateMap {
    pub fn value(&self, x: f64, y: f64) -> f64 {
        match *self {
            BivariateMap::LinearProjection { s } => x - s * y,
            BivariateMap::Sum { s } => x + s * y,
            BivariateMap::Quadratic { coeffs: c } => {
                c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
            }
        }
    }

    /// `(∂f/∂x, ∂f/∂y)`.
    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        match *self {
            BivariateMap::LinearProjection { s } => (1.0, -s),
            BivariateMap::Sum { s } => (1.0, s),
            BivariateMap::Quadratic { coeffs: c } => {
                (c[1] + 2.0 * c[3] * x + c[4] * y, c[2] + c[4] * x + 2.0 * c[5] * y)
            }
        }
    }

    /// Sup norm of the second partials (constant for every family here).
    pub fn second_partials_sup(&self) -> f64 {
        match *self {
            BivariateMap::Quadratic { coeffs: c } => {
                (2.0 * c[3]).abs().max(c[4].abs()).max((2.0 * c[5]).abs())
            }
            _ => 0.0,
        }
    }

    pub fn is_linear(&self) -> bool {
        self.second_partials_sup() == 0.0
    }

    /// An interval containing `f(x × y)`: corner values padded by
    /// `sup|D²f| · diam²`.
    pub fn image(&self, x: Interval, y: Interval) -> Interval {
        let c = [
            self.value(x.lo, y.lo),
            self.value(x.lo, y.hi),
            self.value(x.hi, y.lo),
            self.value(x.hi, y.hi),
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = self.second_partials_sup() * (x.len().powi(2) + y.len().powi(2));
        Interval::new(lo - pad, hi + pad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientWitness {
    pub x: f64,
    pub y: f64,
    pub fx: f64,
    pub fy: f64,
}

fn cover(system: &CantorSystem, delta: f64, budget: usize) -> Result<Vec<Word>> {
    let starts: Vec<usize> = (0..system.spec().alphabet_len()).collect();
    let words = system.cover_at_scale(&starts, delta, budget)?;
    if words.is_empty() {
        return Err(Error::EmptyScale(delta));
    }
    Ok(words)
}

fn cover_intervals(system: &CantorSystem, delta: f64, budget: usize) -> Result<Vec<Interval>> {
    Ok(cover(system, delta, budget)?
        .iter()
        .map(|w| system.cylinder_interval(w.symbols()))
        .collect())
}

/// First center of a `δ`-rectangle where both partials exceed
/// [`GRADIENT_TOL`]; `None` when no such point exists at this scale.
pub fn gradient_condition_check(
    map: &BivariateMap,
    k1: &CantorSystem,
    k2: &CantorSystem,
    delta: f64,
    budget: usize,
) -> Result<Option<GradientWitness>> {
    let xs = cover_intervals(k1, delta, budget)?;
    let ys = cover_intervals(k2, delta, budget)?;
    for x in &xs {
        for y in &ys {
            let (cx, cy) = (x.center(), y.center());
            let (fx, fy) = map.gradient(cx, cy);
            if fx.abs() > GRADIENT_TOL && fy.abs() > GRADIENT_TOL {
                return Ok(Some(GradientWitness { x: cx, y: cy, fx, fy }));
            }
        }
    }
    Ok(None)
}

/// Images `f(I(a) × I′(a′))` over the stopping-time covers at scale `δ`.
pub fn image_intervals(
    map: &BivariateMap,
    k1: &CantorSystem,
    k2: &CantorSystem,
    delta: f64,
    budget: usize,
) -> Result<Vec<Interval>> {
    let xs = cover_intervals(k1, delta, budget)?;
    let ys = cover_intervals(k2, delta, budget)?;
    if xs.len().saturating_mul(ys.len()) > budget {
        return Err(Error::BudgetExceeded {
            what: format!("{} x {} rectangles at scale {delta}", xs.len(), ys.len()),
            budget,
        });
    }
    Ok(xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| map.image(x, y)))
        .collect())
}

/// Merged image of the cover at scale `δ`; gaps up to `tol` are closed.
pub fn image_union(
    map: &BivariateMap,
    k1: &CantorSystem,
    k2: &CantorSystem,
    delta: f64,
    tol: f64,
    budget: usize,
) -> Result<Vec<Interval>> {
    Ok(union(&image_intervals(map, k1, k2, delta, budget)?, tol))
}

/// `(δ, N(δ))` with `N(δ)` the number of `δ`-grid cells met by the cover image.
pub fn image_cover_counts(
    map: &BivariateMap,
    k1: &CantorSystem,
    k2: &CantorSystem,
    deltas: &[f64],
    budget: usize,
) -> Result<Vec<(f64, u64)>> {
    deltas
        .par_iter()
        .map(|&d| Ok((d, grid_cells_hit(&image_intervals(map, k1, k2, d, budget)?, d))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub s: f64,
    pub slope: f64,
    pub residual: f64,
    pub counts: Vec<(f64, u64)>,
    /// `|slope − expected| > tolerance`.
    pub flagged: bool,
}

/// Fits the finest [`FIT_SCALES`] entries of a count table.
pub fn fit_finest(counts: &[(f64, u64)]) -> Result<BoxFit> {
    let mut sorted = counts.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    sorted.truncate(FIT_SCALES);
    box_dimension_estimate(&sorted)
}

/// One row per `s`, with `family(s)` the map scanned.
#[allow(clippy::too_many_arguments)]
pub fn dimension_scan(
    family: impl Fn(f64) -> BivariateMap + Sync,
    s_grid: &[f64],
    k1: &CantorSystem,
    k2: &CantorSystem,
    deltas: &[f64],
    expected: f64,
    tolerance: f64,
    budget: usize,
) -> Result<Vec<ScanRow>> {
    if deltas.len() < 3 {
        return Err(Error::DegenerateScales);
    }
    // the covers do not depend on s
    let covers: Vec<(f64, Vec<Interval>, Vec<Interval>)> = deltas
        .iter()
        .map(|&d| Ok((d, cover_intervals(k1, d, budget)?, cover_intervals(k2, d, budget)?)))
        .collect::<Result<_>>()?;
    s_grid
        .par_iter()
        .map(|&s| {
            let map = family(s);
            let counts: Vec<(f64, u64)> = covers
                .iter()
                .map(|(d, xs, ys)| {
                    let images: Vec<Interval> = xs
                        .iter()
                        .flat_map(|&x| ys.iter().map(move |&y| map.image(x, y)))
                        .collect();
                    (*d, grid_cells_hit(&images, *d))
                })
                .collect();
            let fit = fit_finest(&counts)?;
            Ok(ScanRow {
                s,
                slope: fit.slope,
                residual: fit.residual,
                flagged: (fit.slope - expected).abs() > tolerance,
                counts,
            })
        })
        .collect()
}
