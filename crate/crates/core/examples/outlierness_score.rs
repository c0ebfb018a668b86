//! Outlierness of every object in a numeric and a categorical column.
//! Numeric scores are in density units, so the column is kept on a unit scale.

use outlying::dataset::{Column, Dataset, SelectionView};
use outlying::outlierness::outlierness;

fn main() -> outlying::Result<()> {
    let load = vec![0.61, 0.635, 0.64, 0.652, 0.66, 0.661, 0.673, 0.68, 0.704, 0.95];
    let blood = ["A", "A", "O", "O", "A", "O", "B", "O", "A", "AB"];
    let db = Dataset::from_columns(vec![
        ("load".into(), Column::Numeric(load)),
        ("blood".into(), Column::categorical(&blood)),
    ])?;
    let all = SelectionView::all(&db);

    println!("row   load  score   blood  score");
    for row in 0..db.len() {
        let w = outlierness(&all, 0, row)?;
        let b = outlierness(&all, 1, row)?;
        println!(
            "{row:>3}  {:>6}  {:.3}   {:>5}  {:.3}",
            db.column(0).value(row),
            w.value,
            db.column(1).value(row),
            b.value
        );
    }
    Ok(())
}
