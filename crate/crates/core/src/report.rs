//! Run reports and curve exports.
//!
//! The report is line-delimited JSON: one `run` record echoing the
//! configuration and the natural conditions, then one `pair` record per
//! result in rank order. Wall times are kept out of the records unless asked
//! for, so two runs with the same inputs write identical bytes.

use std::io::Write;

use serde::Serialize;

use crate::dataset::{Bound, Condition, Dataset};
use crate::density::StepCdf;
use crate::error::Result;
use crate::intervals::{EmConfig, FitSummary};
use crate::miner::{MiningConfig, MiningResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ConditionRecord {
    Interval { attribute: String, lo: f64, hi: f64 },
    Equals { attribute: String, equals: String },
}

impl ConditionRecord {
    pub fn new(db: &Dataset, c: &Condition) -> Self {
        let attribute = db.schema()[c.attribute].name.clone();
        match &c.body {
            Bound::Interval { lo, hi } => ConditionRecord::Interval { attribute, lo: *lo, hi: *hi },
            Bound::Equals(v) => ConditionRecord::Equals { attribute, equals: v.clone() },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AttributeRecord {
    pub name: String,
    pub kind: String,
    pub condition: ConditionRecord,
    pub fit: Option<FitSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub data: Option<String>,
    pub schema: Option<String>,
    pub rows: usize,
    pub attributes: usize,
    pub outlier: usize,
    pub sigma: f64,
    pub omega: f64,
    pub kmax: usize,
    pub seed: u64,
    pub em: EmConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub record: &'static str,
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub conditions: Vec<AttributeRecord>,
    pub pairs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairRecord {
    pub record: &'static str,
    pub rank: usize,
    pub property: String,
    pub score: f64,
    pub raw: f64,
    pub support: f64,
    pub query_density: f64,
    pub area_above: f64,
    pub area_below: f64,
    pub explanation: Vec<ConditionRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimingRecord {
    pub record: &'static str,
    pub condition_building_secs: f64,
    pub outlierness_computation_secs: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub run: RunRecord,
    pub pairs: Vec<PairRecord>,
    pub timings: TimingRecord,
}

impl RunReport {
    pub fn new(
        db: &Dataset,
        cfg: &MiningConfig,
        result: &MiningResult,
        data: Option<String>,
        schema: Option<String>,
    ) -> RunReport {
        let conditions = result
            .conditions
            .iter()
            .map(|nc| {
                let attr = &db.schema()[nc.condition.attribute];
                AttributeRecord {
                    name: attr.name.clone(),
                    kind: attr.kind.to_string(),
                    condition: ConditionRecord::new(db, &nc.condition),
                    fit: nc.fit.clone(),
                }
            })
            .collect();
        let pairs: Vec<PairRecord> = result
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| PairRecord {
                record: "pair",
                rank: i + 1,
                property: db.schema()[p.property].name.clone(),
                score: p.score.value,
                raw: p.score.raw,
                support: p.support,
                query_density: p.score.query_density,
                area_above: p.score.area_above,
                area_below: p.score.area_below,
                explanation: p
                    .explanation
                    .conditions()
                    .iter()
                    .map(|c| ConditionRecord::new(db, c))
                    .collect(),
            })
            .collect();
        RunReport {
            run: RunRecord {
                record: "run",
                schema_version: SCHEMA_VERSION,
                config: ConfigEcho {
                    data,
                    schema,
                    rows: db.len(),
                    attributes: db.width(),
                    outlier: cfg.outlier,
                    sigma: cfg.support_threshold,
                    omega: cfg.outlierness_threshold,
                    kmax: cfg.max_explanation_size,
                    seed: cfg.em.seed,
                    em: cfg.em.clone(),
                },
                conditions,
                pairs: pairs.len(),
            },
            pairs,
            timings: TimingRecord {
                record: "timings",
                condition_building_secs: result.timings.condition_building.as_secs_f64(),
                outlierness_computation_secs: result.timings.outlierness_computation.as_secs_f64(),
            },
        }
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W, include_timings: bool) -> Result<()> {
        serde_json::to_writer(&mut w, &self.run)?;
        writeln!(w)?;
        for p in &self.pairs {
            serde_json::to_writer(&mut w, p)?;
            writeln!(w)?;
        }
        if include_timings {
            serde_json::to_writer(&mut w, &self.timings)?;
            writeln!(w)?;
        }
        Ok(())
    }

    /// One row per pair: rank, score, property, support, explanation.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "rank\tscore\tproperty\tsupport\texplanation")?;
        for p in &self.pairs {
            let expl = if p.explanation.is_empty() {
                "∅".to_string()
            } else {
                p.explanation
                    .iter()
                    .map(|c| match c {
                        ConditionRecord::Interval { attribute, lo, hi } => {
                            format!("{attribute} ∈ [{lo}, {hi}]")
                        }
                        ConditionRecord::Equals { attribute, equals } => {
                            format!("{attribute} = {equals}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("; ")
            };
            writeln!(w, "{}\t{:.3}\t{}\t{}\t{}", p.rank, p.score, p.property, p.support, expl)?;
        }
        Ok(())
    }
}

/// Two-column TSV `density<TAB>cumulative`, one row per breakpoint.
pub fn write_curve_tsv<W: Write>(mut w: W, cdf: &StepCdf) -> Result<()> {
    writeln!(w, "density\tcumulative")?;
    for (d, c) in cdf.breakpoints().iter().zip(cdf.cumulative()) {
        writeln!(w, "{d}\t{c}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::density_cdf;

    #[test]
    fn curve_tsv_layout() {
        let cdf = density_cdf(&[0.5, 0.25, 0.5, 1.0]).unwrap();
        let mut out = Vec::new();
        write_curve_tsv(&mut out, &cdf).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "density\tcumulative\n0.25\t0.25\n0.5\t0.75\n1\t1\n");
    }
}
