//! Two uniform clusters with one object planted in the gap between them.

use std::time::Instant;

use outlying::dataset::SelectionView;
use outlying::outlierness::outlierness;
use outlying::synth::Unif2;

fn main() -> outlying::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let start = Instant::now();
    let data = Unif2::generate(seed, 20_000, 1)?;
    let db = data.to_dataset()?;
    let all = SelectionView::all(&db);
    for attribute in 0..db.width() {
        let s = outlierness(&all, attribute, data.outlier_row())?;
        println!(
            "{:>2}: score {:.4}  raw {:.4}  density {:.3e}",
            db.schema()[attribute].name,
            s.value,
            s.raw,
            s.query_density
        );
    }
    println!("{:?}", start.elapsed());
    Ok(())
}
