//! Second-order jets and the parametric branch families they are evaluated on.
//!
//! A [`Jet2`] carries `(f(x), f'(x), f''(x))`. Deep compositions of
//! inverse branches are evaluated by folding [`compose_jets`], so
//! derivatives stay exact up to rounding and never go through finite
//! differences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub fn new(value: f64, d1: f64, d2: f64) -> Self {
        Jet2 { value, d1, d2 }
    }

    /// The jet of the identity at `x`.
    pub fn identity(x: f64) -> Self {
        Jet2 {
            value: x,
            d1: 1.0,
            d2: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    /// Jet of the inverse map at `self.value`, given `self` is the jet of an
    /// invertible map at some point `x`: `(x, 1/f', -f''/f'^3)`.
    pub fn inverse_at(&self, x: f64) -> Jet2 {
        let inv = 1.0 / self.d1;
        Jet2 {
            value: x,
            d1: inv,
            d2: -self.d2 * inv * inv * inv,
        }
    }

    /// `f''/f'`, i.e. `D log |Df|`.
    pub fn log_derivative_slope(&self) -> f64 {
        self.d2 / self.d1
    }
}

/// Chain rule to second order; `outer` must be evaluated at `inner.value`.
pub fn compose_jets(outer: Jet2, inner: Jet2) -> Jet2 {
    Jet2 {
        value: outer.value,
        d1: outer.d1 * inner.d1,
        d2: outer.d2 * inner.d1 * inner.d1 + outer.d1 * inner.d2,
    }
}

/// A closed-form map with exact first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Primitive {
    /// `x ↦ p + q x`
    Affine { p: f64, q: f64 },
    /// `x ↦ (a x + b) / (c x + d)`
    Moebius { a: f64, b: f64, c: f64, d: f64 },
    /// `x ↦ p + q x + ε x²(1 − x)`
    PerturbedAffine { p: f64, q: f64, eps: f64 },
}

impl Primitive {
    pub fn affine(p: f64, q: f64) -> Self {
        Primitive::Affine { p, q }
    }

    pub fn moebius(a: f64, b: f64, c: f64, d: f64) -> Self {
        Primitive::Moebius { a, b, c, d }
    }

    pub fn perturbed(p: f64, q: f64, eps: f64) -> Self {
        Primitive::PerturbedAffine { p, q, eps }
    }

    /// Family tag and coefficient list, as written in config files.
    pub fn tag_and_coeffs(&self) -> (&'static str, Vec<f64>) {
        match *self {
            Primitive::Affine { p, q } => ("affine", vec![p, q]),
            Primitive::Moebius { a, b, c, d } => ("moebius", vec![a, b, c, d]),
            Primitive::PerturbedAffine { p, q, eps } => ("perturbed_affine", vec![p, q, eps]),
        }
    }

    pub fn from_tag(tag: &str, coeffs: &[f64]) -> Result<Self> {
        let want = |n: usize| {
            if coeffs.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidBranch(format!(
                    "family `{tag}` takes {n} coefficients, got {}",
                    coeffs.len()
                )))
            }
        };
        match tag {
            "affine" => want(2).map(|_| Primitive::affine(coeffs[0], coeffs[1])),
            "moebius" => {
                want(4).map(|_| Primitive::moebius(coeffs[0], coeffs[1], coeffs[2], coeffs[3]))
            }
            "perturbed_affine" => {
                want(3).map(|_| Primitive::perturbed(coeffs[0], coeffs[1], coeffs[2]))
            }
            other => Err(Error::InvalidBranch(format!("unknown branch family `{other}`"))),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Primitive::Affine { p, q } => p + q * x,
            Primitive::Moebius { a, b, c, d } => (a * x + b) / (c * x + d),
            Primitive::PerturbedAffine { p, q, eps } => p + q * x + eps * x * x * (1.0 - x),
        }
    }

    pub fn jet(&self, x: f64) -> Jet2 {
        match *self {
            Primitive::Affine { p, q } => Jet2::new(p + q * x, q, 0.0),
            Primitive::Moebius { a, b, c, d } => {
                let den = c * x + d;
                let det = a * d - b * c;
                Jet2::new(
                    (a * x + b) / den,
                    det / (den * den),
                    -2.0 * c * det / (den * den * den),
                )
            }
            Primitive::PerturbedAffine { p, q, eps } => Jet2::new(
                p + q * x + eps * x * x * (1.0 - x),
                q + eps * (2.0 * x - 3.0 * x * x),
                eps * (2.0 - 6.0 * x),
            ),
        }
    }

    /// `(f(y) − f(z)) / (y − z)` in a cancellation-free closed form; equals
    /// `f'(y)` when `y == z`.
    pub fn divided_difference(&self, y: f64, z: f64) -> f64 {
        match *self {
            Primitive::Affine { q, .. } => q,
            Primitive::Moebius { a, b, c, d } => (a * d - b * c) / ((c * y + d) * (c * z + d)),
            Primitive::PerturbedAffine { q, eps, .. } => {
                q + eps * ((y + z) - (y * y + y * z + z * z))
            }
        }
    }

    /// Signed range `(min f', max f')` over `iv`.
    pub fn derivative_extremes(&self, iv: Interval) -> (f64, f64) {
        match *self {
            Primitive::Affine { q, .. } => (q, q),
            Primitive::Moebius { .. } => {
                // |f'| = |det|/(cx+d)^2 is monotone away from the pole
                let a = self.jet(iv.lo).d1;
                let b = self.jet(iv.hi).d1;
                (a.min(b), a.max(b))
            }
            Primitive::PerturbedAffine { .. } => {
                // f' is quadratic with its vertex at x = 1/3
                let mut lo = self.jet(iv.lo).d1.min(self.jet(iv.hi).d1);
                let mut hi = self.jet(iv.lo).d1.max(self.jet(iv.hi).d1);
                let vertex = 1.0 / 3.0;
                if iv.contains(vertex) {
                    let v = self.jet(vertex).d1;
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                (lo, hi)
            }
        }
    }

    fn has_pole_in(&self, iv: Interval) -> bool {
        match *self {
            Primitive::Moebius { c, d, .. } => {
                let l = c * iv.lo + d;
                let h = c * iv.hi + d;
                l == 0.0 || h == 0.0 || (l < 0.0) != (h < 0.0)
            }
            _ => false,
        }
    }

    fn as_moebius(&self) -> Option<[f64; 4]> {
        match *self {
            Primitive::Affine { p, q } => Some([q, p, 0.0, 1.0]),
            Primitive::Moebius { a, b, c, d } => Some([a, b, c, d]),
            Primitive::PerturbedAffine { .. } => None,
        }
    }

    /// Closed-form `self ∘ inner` when both lie in the Möbius group.
    pub fn compose(&self, inner: &Primitive) -> Option<Primitive> {
        if let (Primitive::Affine { p: p1, q: q1 }, Primitive::Affine { p: p2, q: q2 }) =
            (self, inner)
        {
            return Some(Primitive::affine(p1 + q1 * p2, q1 * q2));
        }
        let m = self.as_moebius()?;
        let n = inner.as_moebius()?;
        Some(Primitive::moebius(
            m[0] * n[0] + m[1] * n[2],
            m[0] * n[1] + m[1] * n[3],
            m[2] * n[0] + m[3] * n[2],
            m[2] * n[1] + m[3] * n[3],
        ))
    }
}

/// Absolute-value enclosure of a signed derivative range.
fn abs_range((lo, hi): (f64, f64)) -> (f64, f64) {
    if lo > 0.0 {
        (lo, hi)
    } else if hi < 0.0 {
        (-hi, -lo)
    } else {
        (0.0, lo.abs().max(hi.abs()))
    }
}

fn domain_tol(iv: &Interval) -> f64 {
    1e-9 * iv.len() + 1e-14 * (1.0 + iv.lo.abs().max(iv.hi.abs()))
}

/// A strictly monotone contraction on a closed domain: a composition of
/// primitives, `parts[0]` outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    parts: Vec<Primitive>,
    domain: Interval,
    sign: f64,
}

impl Branch {
    pub fn new(primitive: Primitive, domain: Interval) -> Result<Self> {
        Branch::chain(vec![primitive], domain)
    }

    /// Builds `parts[0] ∘ parts[1] ∘ …` on `domain`, merging adjacent
    /// Möbius-family factors, and checks monotonicity and contraction.
    pub fn chain(parts: Vec<Primitive>, domain: Interval) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidBranch("empty composition".into()));
        }
        if !(domain.lo.is_finite() && domain.hi.is_finite() && domain.lo < domain.hi) {
            return Err(Error::InvalidBranch(format!(
                "degenerate domain [{}, {}]",
                domain.lo, domain.hi
            )));
        }
        let mut merged: Vec<Primitive> = Vec::with_capacity(parts.len());
        // fold from the inside out so that merging respects evaluation order
        for p in parts.into_iter().rev() {
            match merged.last().and_then(|inner| p.compose(inner)) {
                Some(c) => {
                    *merged.last_mut().expect("nonempty") = c;
                }
                None => merged.push(p),
            }
        }
        merged.reverse();
        let mut sign = 1.0;
        let mut iv = domain;
        for p in merged.iter().rev() {
            if p.has_pole_in(iv) {
                return Err(Error::InvalidBranch("Möbius pole inside the domain".into()));
            }
            let (lo, hi) = p.derivative_extremes(iv);
            if !(lo.is_finite() && hi.is_finite()) || (lo <= 0.0 && hi >= 0.0) {
                return Err(Error::InvalidBranch(
                    "branch is not strictly monotone on its domain".into(),
                ));
            }
            if hi < 0.0 {
                sign = -sign;
            }
            iv = Interval::new(p.value(iv.lo), p.value(iv.hi));
        }
        let b = Branch {
            parts: merged,
            domain,
            sign,
        };
        let (_, max) = b.derivative_range(domain)?;
        if max >= 1.0 {
            return Err(Error::InvalidBranch(format!(
                "branch is not a contraction on its domain (max |f'| = {max})"
            )));
        }
        Ok(b)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn parts(&self) -> &[Primitive] {
        &self.parts
    }

    /// `+1` if orientation preserving, `-1` otherwise.
    pub fn orientation(&self) -> f64 {
        self.sign
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if self.domain.contains_approx(x, domain_tol(&self.domain)) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                x,
                lo: self.domain.lo,
                hi: self.domain.hi,
            })
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.parts.iter().rev().fold(x, |y, p| p.value(y))
    }

    pub fn eval_jet(&self, x: f64) -> Result<Jet2> {
        self.check_domain(x)?;
        Ok(self.jet_unchecked(x))
    }

    pub(crate) fn jet_unchecked(&self, x: f64) -> Jet2 {
        self.parts
            .iter()
            .rev()
            .fold(Jet2::identity(x), |inner, p| compose_jets(p.jet(inner.value), inner))
    }

    /// Divided difference of the whole composition, as a product of the
    /// factors' closed-form divided differences.
    pub fn divided_difference(&self, y: f64, z: f64) -> f64 {
        let mut dq = 1.0;
        let (mut y, mut z) = (y, z);
        for p in self.parts.iter().rev() {
            dq *= p.divided_difference(y, z);
            y = p.value(y);
            z = p.value(z);
        }
        dq
    }

    pub fn image(&self, iv: Interval) -> Interval {
        Interval::new(self.value(iv.lo), self.value(iv.hi))
    }

    /// Enclosure `(min |f'|, max |f'|)` over a subinterval of the domain.
    ///
    /// Exact for a single Affine or Möbius factor and for PerturbedAffine
    /// (vertex analysis); compositions multiply the per-factor enclosures.
    pub fn derivative_range(&self, sub: Interval) -> Result<(f64, f64)> {
        self.check_domain(sub.lo)?;
        self.check_domain(sub.hi)?;
        let mut lo = 1.0;
        let mut hi = 1.0;
        let mut iv = sub;
        for p in self.parts.iter().rev() {
            let (a, b) = abs_range(p.derivative_extremes(iv));
            lo *= a;
            hi *= b;
            iv = Interval::new(p.value(iv.lo), p.value(iv.hi));
        }
        Ok((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0)
    }

    #[test]
    fn eval_examples() {
        let b = Branch::new(Primitive::affine(0.0, 1.0 / 3.0), unit()).unwrap();
        let j = b.eval_jet(0.6).unwrap();
        assert!((j.value - 0.2).abs() < 1e-15 && (j.d1 - 1.0 / 3.0).abs() < 1e-15 && j.d2 == 0.0);

        let g = Primitive::moebius(0.0, 1.0, 1.0, 2.0).jet(0.0);
        assert!((g.value - 0.5).abs() < 1e-15);
        assert!((g.d1 + 0.25).abs() < 1e-15);
        assert!((g.d2 - 0.25).abs() < 1e-15);

        let pa = Primitive::perturbed(0.0, 1.0 / 3.0, 0.0);
        for x in [0.0, 0.3, 0.77, 1.0] {
            assert_eq!(pa.jet(x), Primitive::affine(0.0, 1.0 / 3.0).jet(x));
        }
    }

    #[test]
    fn out_of_domain() {
        let b = Branch::new(Primitive::affine(0.0, 0.5), unit()).unwrap();
        assert!(matches!(b.eval_jet(1.5), Err(Error::OutOfDomain { .. })));
        assert!(b.derivative_range(Interval::new(-1.0, 0.5)).is_err());
    }

    #[test]
    fn compose_examples() {
        let c = compose_jets(Jet2::new(3.0, 2.0, 0.0), Jet2::new(1.0, 5.0, 0.0));
        assert_eq!((c.d1, c.d2), (10.0, 0.0));
        // outer x^2 at 2, inner 2x at 1
        let c = compose_jets(Jet2::new(4.0, 4.0, 2.0), Jet2::new(2.0, 2.0, 0.0));
        assert_eq!((c.value, c.d1, c.d2), (4.0, 8.0, 8.0));
        let j = Jet2::new(0.3, -0.7, 1.9);
        assert_eq!(compose_jets(j, Jet2::identity(0.3)), j);
    }

    #[test]
    fn derivative_range_examples() {
        let b = Branch::new(Primitive::affine(0.2, 1.0 / 3.0), unit()).unwrap();
        assert_eq!(b.derivative_range(Interval::new(0.1, 0.4)).unwrap(), (1.0 / 3.0, 1.0 / 3.0));
        let g = Branch::new(Primitive::moebius(0.0, 1.0, 1.0, 1.0), Interval::new(0.3, 0.8)).unwrap();
        let (lo, hi) = g.derivative_range(Interval::new(0.3, 0.8)).unwrap();
        assert!((lo - 1.0 / (1.8 * 1.8)).abs() < 1e-15);
        assert!((hi - 1.0 / (1.3 * 1.3)).abs() < 1e-15);
        assert_eq!(g.orientation(), -1.0);
    }

    #[test]
    fn perturbed_range_contains_samples() {
        let b = Branch::new(Primitive::perturbed(0.1, 0.3, 0.25), unit()).unwrap();
        for sub in [unit(), Interval::new(0.2, 0.5), Interval::new(0.6, 0.9)] {
            let (lo, hi) = b.derivative_range(sub).unwrap();
            // dense sampling oracle
            for x in sub.grid(2001) {
                let d = b.eval_jet(x).unwrap().d1.abs();
                assert!(lo - 1e-15 <= d && d <= hi + 1e-15);
            }
            let sampled: Vec<f64> = sub.grid(2001).iter().map(|&x| b.eval_jet(x).unwrap().d1.abs()).collect();
            let smin = sampled.iter().cloned().fold(f64::INFINITY, f64::min);
            let smax = sampled.iter().cloned().fold(0.0, f64::max);
            assert!(smin - lo < 1e-6 && hi - smax < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_branches() {
        assert!(Branch::new(Primitive::affine(0.0, 1.0), unit()).is_err());
        assert!(Branch::new(Primitive::moebius(0.0, 1.0, 1.0, -0.5), unit()).is_err());
        // f' = 0.2 + 0.5(2x - 3x^2) changes sign on [0, 1]
        assert!(Branch::new(Primitive::perturbed(0.0, 0.2, 0.5), unit()).is_err());
        assert!(Primitive::from_tag("affine", &[1.0]).is_err());
        assert!(Primitive::from_tag("spline", &[]).is_err());
    }

    #[test]
    fn moebius_chain_merges_to_matrix_product() {
        let f = Primitive::moebius(0.0, 1.0, 1.0, 1.0);
        let g = Primitive::moebius(0.0, 1.0, 1.0, 2.0);
        let b = Branch::chain(vec![f, g], Interval::new(0.2, 0.9)).unwrap();
        assert_eq!(b.parts().len(), 1);
        let p = Branch::chain(vec![Primitive::perturbed(0.0, 0.3, 0.05), g], Interval::new(0.2, 0.9))
            .unwrap();
        assert_eq!(p.parts().len(), 2);
    }
}
