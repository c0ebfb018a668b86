use outlying::dataset::{Column, Dataset, SelectionView};
use outlying::density::{density_cdf, global_bandwidth, Bandwidth, ParzenModel};
use outlying::outlierness::{areas, omega, outlierness, outlierness_with_curve, score_densities};
use outlying_oracle::{brute_score, naive_density, quadrature_areas};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn one_column(xs: Vec<f64>) -> Dataset {
    Dataset::from_columns(vec![("a".into(), Column::Numeric(xs))]).unwrap()
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0..50.0f64, 2..120)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parzen_matches_direct_sum(xs in sample(), q in -60.0..60.0f64) {
        let m = ParzenModel::fit(&xs).unwrap();
        prop_assert_eq!(m.density(q), naive_density(&xs, m.bandwidth(), q));
        let swept = m.sample_densities();
        for (x, d) in m.sample().iter().zip(&swept) {
            prop_assert_eq!(*d, m.density(*x));
        }
    }

    #[test]
    fn parzen_integrates_to_one(xs in sample()) {
        let m = ParzenModel::fit(&xs).unwrap();
        let h = m.bandwidth();
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min) - h;
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + h;
        let cells = 200_000;
        let dx = (hi - lo) / cells as f64;
        let total: f64 = (0..cells).map(|i| m.density(lo + (i as f64 + 0.5) * dx)).sum::<f64>() * dx;
        prop_assert!((total - 1.0).abs() < 1e-3, "integral {}", total);
    }

    #[test]
    fn score_ignores_row_order(xs in sample(), pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let r = pick.index(xs.len());
        let before = outlierness(&SelectionView::all(&one_column(xs.clone())), 0, r).unwrap();
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let shuffled: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
        let r2 = order.iter().position(|&i| i == r).unwrap();
        let after = outlierness(&SelectionView::all(&one_column(shuffled)), 0, r2).unwrap();
        prop_assert!((before.value - after.value).abs() <= 1e-12);
    }

    #[test]
    fn segment_areas_match_quadrature(d in prop::collection::vec(0.0..20.0f64, 1..80), q in 0.0..25.0f64) {
        let g = density_cdf(&d).unwrap();
        let (a1, a2) = areas(&g, q);
        let (b1, b2) = quadrature_areas(&d, q);
        prop_assert!((a1 - b1).abs() <= 1e-12 && (a2 - b2).abs() <= 1e-12, "{:?} vs {:?}", (a1, a2), (b1, b2));
    }

    #[test]
    fn raw_score_is_mean_minus_query(d in prop::collection::vec(0.0..20.0f64, 1..80), q in 0.0..25.0f64) {
        let s = score_densities(&d, q).unwrap();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        prop_assert!((s.raw - (mean - q)).abs() <= 1e-9 * (1.0 + mean + q));
        prop_assert!((0.0..=1.0).contains(&s.value));
    }

    #[test]
    fn score_matches_brute_force(xs in sample(), pick in any::<prop::sample::Index>()) {
        let r = pick.index(xs.len());
        let db = one_column(xs.clone());
        let fast = outlierness(&SelectionView::all(&db), 0, r).unwrap().value;
        let rows: Vec<usize> = (0..xs.len()).collect();
        prop_assert!((fast - brute_score(&db, &rows, 0, r)).abs() <= 1e-9);
    }

    #[test]
    fn denser_objects_score_lower(xs in sample()) {
        let db = one_column(xs.clone());
        let view = SelectionView::all(&db);
        let m = ParzenModel::fit(&xs).unwrap();
        let mut by_density: Vec<(f64, f64)> = (0..xs.len())
            .map(|r| (m.density(xs[r]), outlierness(&view, 0, r).unwrap().value))
            .collect();
        by_density.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in by_density.windows(2) {
            prop_assert!(w[1].1 <= w[0].1);
        }
    }
}

#[test]
fn omega_shape() {
    assert_eq!(omega(0.0), 0.0);
    assert_eq!(omega(-3.0), 0.0);
    assert!((omega(1.0) - 0.462_117_157).abs() < 1e-9);
    assert!(omega(50.0) > 0.999_999);
}

#[test]
fn constant_sample_is_degenerate() {
    assert_eq!(global_bandwidth(&[4.0; 9]).unwrap(), Bandwidth::Degenerate);
    assert_eq!(global_bandwidth(&[4.0]).unwrap(), Bandwidth::Degenerate);
    let db = one_column(vec![4.0; 9]);
    assert_eq!(outlierness(&SelectionView::all(&db), 0, 3).unwrap().value, 0.0);
}

#[test]
fn gaussian_density_curve() {
    // N(170, 7.5): density values range over [0, 1/(7.5·√(2π))] ≈ [0, 0.0532].
    let normal = Normal::new(170.0, 7.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(170);
    let xs: Vec<f64> = (0..20_000).map(|_| normal.sample(&mut rng)).collect();
    let db = one_column(xs);
    let (_, g) = outlierness_with_curve(&SelectionView::all(&db), 0, 0).unwrap();
    let peak = 1.0 / (7.5 * (2.0 * std::f64::consts::PI).sqrt());
    assert!((g.max_density() - peak).abs() < 0.1 * peak, "max {}", g.max_density());
    assert!(g.cumulative().windows(2).all(|w| w[0] < w[1]));
    assert_eq!(g.eval(g.max_density()), 1.0);
    assert_eq!(g.eval(0.0), 0.0);
    // Exact G at half the peak: 1 - P(|Z| < sqrt(2 ln 2)) ≈ 0.239.
    let half = g.eval(peak / 2.0);
    assert!((half - 0.239).abs() < 0.03, "G(peak/2) = {half}");
}

#[test]
fn categorical_rare_value() {
    let mut labels = vec!["common"; 99];
    labels.push("rare");
    let db = Dataset::from_columns(vec![("c".into(), Column::categorical(&labels))]).unwrap();
    let s = outlierness(&SelectionView::all(&db), 0, 99).unwrap();
    // densities: 99 × 0.99 and 1 × 0.01
    assert!((s.raw - (0.99 * 0.99 + 0.01 * 0.01 - 0.01)).abs() < 1e-12);
    let common = outlierness(&SelectionView::all(&db), 0, 0).unwrap();
    assert_eq!(common.value, 0.0);
}
