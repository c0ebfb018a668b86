//! Outlying property detection for a single, known outlier.
//!
//! Given a table and the row index of an object already known to be anomalous,
//! the crate mines the minimal *(explanation, property)* pairs: an explanation is
//! a small set of per-attribute conditions selecting a subpopulation that
//! contains the object, and a property is an attribute on which the object is
//! exceptionally improbable inside that subpopulation.
//!
//! The pieces, bottom-up:
//!
//! * [`dataset`]: typed columns, conditions, explanations, selections, CSV input.
//! * [`density`]: Parzen-window density estimates, categorical frequencies and
//!   the step cdf `G` of per-object density values.
//! * [`outlierness`]: the score, the squashed difference between the area above
//!   `G` to the right of the object's density and the area below `G` to its left.
//! * [`intervals`]: Gaussian mixture EM with weight annihilation, used to find
//!   the "natural" interval around the object on each numeric attribute.
//! * [`miner`]: level-wise search for minimal pairs.
//! * [`report`], [`synth`], [`cli`]: output records, synthetic data, front end.
//!
//! ```
//! use outlying::dataset::parse_csv;
//! use outlying::miner::{mine, MiningConfig};
//!
//! let mut text = String::from("a,b\n");
//! for i in 0..40 {
//!     text.push_str(&format!("1.0,{}\n", i % 7));
//! }
//! text.push_str("0.5,3\n");
//! let db = parse_csv(&text, None).unwrap();
//!
//! let cfg = MiningConfig::new(40)
//!     .with_max_explanation_size(2)
//!     .with_outlierness_threshold(0.5);
//! let result = mine(&db, &cfg).unwrap();
//! assert!(result.pairs.iter().any(|p| p.property == 0 && p.explanation.is_empty()));
//! ```

// `!(x > 0.0)` is used on purpose so NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dataset;
pub mod density;
pub mod error;
pub mod intervals;
pub mod miner;
pub mod outlierness;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
