//! Kernel estimate against the exact normal density for the same query.

use outlying::dataset::{Column, Dataset, SelectionView};
use outlying::outlierness::outlierness;
use outlying_oracle::{analytic_gaussian_score, OracleConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> outlying::Result<()> {
    let normal = Normal::new(0.0, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sample: Vec<f64> = (0..100_000).map(|_| normal.sample(&mut rng)).collect();

    println!("     v   kde score  exact score   kde raw  exact raw");
    for v in [-1.0, -0.3, -0.2, -0.12, 0.0] {
        let mut xs = sample.clone();
        xs.push(v);
        let db = Dataset::from_columns(vec![("x".into(), Column::Numeric(xs))])?;
        let kde = outlierness(&SelectionView::all(&db), 0, db.len() - 1)?;
        let exact = analytic_gaussian_score(0.0, 0.1, v, &OracleConfig::default());
        println!("{v:>6}   {:>9.4}  {:>11.4}   {:>7.4}  {:>9.4}", kde.value, exact.value, kde.raw, exact.raw);
    }
    Ok(())
}
