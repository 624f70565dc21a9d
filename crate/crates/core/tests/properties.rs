use proptest::prelude::*;

use cantorlab::dimension::pressure_dimension;
use cantorlab::interval::{union, union_measure, Interval};
use cantorlab::marstrand::{count_overlaps, count_overlaps_brute, DeltaRectangle};
use cantorlab::report::fmt_num;
use cantorlab::system::{middle_alpha, two_ratio};

fn rect() -> impl Strategy<Value = DeltaRectangle> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..0.2f64, 0.0..0.2f64).prop_map(|(x, y, u, v)| {
        DeltaRectangle::new(Interval::new(x - u, x + u), Interval::new(y - v, y + v))
    })
}

proptest! {
    #[test]
    fn overlap_sweep_matches_brute(rects in prop::collection::vec(rect(), 0..60), s in -5.0..5.0f64) {
        prop_assert_eq!(count_overlaps(&rects, s), count_overlaps_brute(&rects, s));
    }

    #[test]
    fn union_is_disjoint_and_keeps_measure(iv in prop::collection::vec((0.0..10.0f64, 0.0..1.0f64), 1..40)) {
        let ivs: Vec<Interval> = iv.iter().map(|&(a, l)| Interval::new(a, a + l)).collect();
        let u = union(&ivs, 0.0);
        for w in u.windows(2) {
            prop_assert!(w[0].hi < w[1].lo);
        }
        let total: f64 = u.iter().map(Interval::len).sum();
        prop_assert!((total - union_measure(&ivs)).abs() < 1e-9);
        for i in &ivs {
            prop_assert!(u.iter().any(|c| c.contains_interval(i, 1e-12)));
        }
    }

    #[test]
    fn affine_bracket_contains_moran_root(r1 in 0.05..0.45f64, r2 in 0.05..0.45f64) {
        let sys = two_ratio(r1, r2).unwrap();
        let b = pressure_dimension(&sys, 3, 1 << 16).unwrap();
        let moran = |d: f64| r1.powf(d) + r2.powf(d) - 1.0;
        prop_assert!(moran(b.d_lower) >= -1e-9);
        prop_assert!(moran(b.d_upper) <= 1e-9);
    }

    #[test]
    fn cylinders_nest(alpha in 0.1..0.9f64, word in prop::collection::vec(0usize..2, 1..12)) {
        let sys = middle_alpha(alpha).unwrap();
        let outer = sys.cylinder_interval(&word[..word.len().max(2) - 1]);
        let inner = sys.cylinder_interval(&word);
        prop_assert!(outer.contains_interval(&inner, 1e-12));
    }

    #[test]
    fn formatted_numbers_round_trip(x in -1e12..1e12f64) {
        let y: f64 = fmt_num(x).parse().unwrap();
        prop_assert!((x - y).abs() <= 1e-11 * x.abs().max(1e-300));
    }
}
