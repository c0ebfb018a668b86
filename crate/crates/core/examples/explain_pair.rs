//! Checking one hand-written (explanation, property) pair.

use outlying::dataset::{Column, Condition, Dataset, Explanation};
use outlying::miner::{explain_one, MiningConfig};

fn main() -> outlying::Result<()> {
    let mut city = Vec::new();
    let mut temp = Vec::new();
    for i in 0..200 {
        let north = i % 2 == 0;
        city.push(if north { "oslo" } else { "lima" });
        // temperature in tens of degrees
        temp.push(if north { -0.5 + 0.1 * (i % 10) as f64 } else { 1.5 + 0.1 * (i % 12) as f64 });
    }
    city.push("oslo");
    temp.push(2.1);
    let db = Dataset::from_columns(vec![
        ("city".into(), Column::categorical(&city)),
        ("temp".into(), Column::Numeric(temp)),
    ])?;
    let cfg = MiningConfig::new(200).with_max_explanation_size(1).with_outlierness_threshold(0.5);

    for e in [Explanation::empty(), Explanation::new(vec![Condition::equals(0, "oslo")])?] {
        let eval = explain_one(&db, &cfg, &e, 1)?;
        let score = eval.score.map(|s| s.value).unwrap_or(f64::NAN);
        println!("temp given {}: support {:.2}, score {:.3}, {:?}", e.describe(&db), eval.support, score, eval.verdict);
    }
    Ok(())
}
