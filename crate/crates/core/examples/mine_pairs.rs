//! Full mining run on a CSV file (or a built-in table), printing the pairs.
//!
//! cargo run --example mine_pairs -- data.csv 17

use outlying::dataset::{parse_csv, read_csv_file, Dataset};
use outlying::miner::{mine, MiningConfig};

fn builtin() -> (Dataset, usize) {
    // `pay` (in 100k) is ordinary overall but odd for a junior role.
    let mut text = String::from("role,years,pay\n");
    for i in 0..60 {
        text.push_str(&format!("junior,{},{}\n", 1 + i % 3, 0.30 + 0.01 * (i % 7) as f64));
        text.push_str(&format!("senior,{},{}\n", 8 + i % 6, 0.40 + 0.01 * ((i * 13) % 60) as f64));
    }
    text.push_str("junior,2,0.85\n");
    (parse_csv(&text, None).unwrap(), 120)
}

fn main() -> outlying::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (db, outlier) = match args.as_slice() {
        [path, row] => (read_csv_file(path.as_ref(), None)?, row.parse().expect("row index")),
        _ => builtin(),
    };
    let cfg = MiningConfig::new(outlier)
        .with_max_explanation_size(2.min(db.width()))
        .with_outlierness_threshold(0.3);
    let result = mine(&db, &cfg)?;

    println!("natural conditions of row {outlier}:");
    for c in &result.conditions {
        println!("  {}", c.condition.describe(&db));
    }
    println!("{} pairs", result.pairs.len());
    for p in &result.pairs {
        println!(
            "  {:.3}  {:<8} given {}  (support {:.2})",
            p.score.value,
            db.schema()[p.property].name,
            p.explanation.describe(&db),
            p.support
        );
    }
    Ok(())
}
