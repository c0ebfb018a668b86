//! Cumulative distribution of density values for a normal sample, written as
//! TSV (`density`, `cumulative`) to stdout. Pipe into a plotting tool.

use outlying::dataset::{Column, Dataset, SelectionView};
use outlying::outlierness::outlierness_with_curve;
use outlying::report::write_curve_tsv;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> outlying::Result<()> {
    let normal = Normal::new(170.0, 7.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let xs: Vec<f64> = (0..10_000).map(|_| normal.sample(&mut rng)).collect();
    let db = Dataset::from_columns(vec![("height".into(), Column::Numeric(xs))])?;

    let (score, curve) = outlierness_with_curve(&SelectionView::all(&db), 0, 0)?;
    eprintln!("{} breakpoints, max density {:.4}", curve.breakpoints().len(), curve.max_density());
    eprintln!("row 0: density {:.4}, score {:.3}", score.query_density, score.value);
    write_curve_tsv(std::io::stdout().lock(), &curve)
}
