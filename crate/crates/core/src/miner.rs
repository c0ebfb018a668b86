//! Level-wise search for minimal explanation/property pairs.
//!
//! For each property `p` the vocabulary is the natural condition of every
//! other attribute. The empty explanation is scored first; then candidates
//! grow one condition at a time, apriori style. A candidate that reaches the
//! outlierness threshold is reported and never extended; one that falls below
//! the support threshold is dropped together with all of its supersets.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{select, Dataset, Explanation, SelectionView};
use crate::density::StepCdf;
use crate::error::{Error, Result};
use crate::intervals::{natural_conditions, EmConfig, NaturalCondition};
use crate::outlierness::{outlierness, outlierness_with_curve, OutliernessScore};

#[derive(Debug, Clone, Serialize)]
pub struct MiningConfig {
    pub support_threshold: f64,
    pub outlierness_threshold: f64,
    pub max_explanation_size: usize,
    pub outlier: usize,
    pub em: EmConfig,
}

impl MiningConfig {
    /// σ = 0.2, Ω = 0.9, k = 3 and default EM settings.
    pub fn new(outlier: usize) -> Self {
        MiningConfig {
            support_threshold: 0.2,
            outlierness_threshold: 0.9,
            max_explanation_size: 3,
            outlier,
            em: EmConfig::default(),
        }
    }

    pub fn with_support_threshold(mut self, sigma: f64) -> Self {
        self.support_threshold = sigma;
        self
    }

    pub fn with_outlierness_threshold(mut self, omega: f64) -> Self {
        self.outlierness_threshold = omega;
        self
    }

    pub fn with_max_explanation_size(mut self, k: usize) -> Self {
        self.max_explanation_size = k;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.em.seed = seed;
        self
    }

    pub fn validate(&self, db: &Dataset) -> Result<()> {
        if self.outlier >= db.len() {
            return Err(Error::Config(format!(
                "outlier row {} out of range (n = {})",
                self.outlier,
                db.len()
            )));
        }
        if !(0.0..=1.0).contains(&self.support_threshold) {
            return Err(Error::Config("support threshold must lie in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.outlierness_threshold) {
            return Err(Error::Config("outlierness threshold must lie in [0, 1]".into()));
        }
        if self.max_explanation_size == 0 || self.max_explanation_size > db.width() {
            return Err(Error::Config(format!(
                "maximum explanation size must lie in [1, {}]",
                db.width()
            )));
        }
        self.em.validate()
    }
}

#[derive(Debug, Clone)]
pub struct ExplanationPropertyPair {
    pub explanation: Explanation,
    pub property: usize,
    pub score: OutliernessScore,
    pub support: f64,
}

impl ExplanationPropertyPair {
    /// The cdf of density values behind this pair's score.
    pub fn g_curve(&self, db: &Dataset, outlier: usize) -> Result<StepCdf> {
        let view = select(db, &self.explanation)?;
        Ok(outlierness_with_curve(&view, self.property, outlier)?.1)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PhaseTimings {
    pub condition_building: Duration,
    pub outlierness_computation: Duration,
}

#[derive(Debug, Clone)]
pub struct MiningResult {
    pub conditions: Vec<NaturalCondition>,
    /// Sorted by score (descending), then property, then explanation size.
    pub pairs: Vec<ExplanationPropertyPair>,
    pub timings: PhaseTimings,
}

/// Builds the natural conditions and runs the search.
pub fn mine(db: &Dataset, cfg: &MiningConfig) -> Result<MiningResult> {
    cfg.validate(db)?;
    let start = Instant::now();
    let conditions = natural_conditions(db, cfg.outlier, &cfg.em)?;
    let condition_building = start.elapsed();
    let start = Instant::now();
    let pairs = search(db, cfg, &conditions)?;
    Ok(MiningResult {
        conditions,
        pairs,
        timings: PhaseTimings { condition_building, outlierness_computation: start.elapsed() },
    })
}

/// The second phase alone, over a given vocabulary (one condition per
/// attribute, in attribute order).
pub fn search(
    db: &Dataset,
    cfg: &MiningConfig,
    conditions: &[NaturalCondition],
) -> Result<Vec<ExplanationPropertyPair>> {
    cfg.validate(db)?;
    if conditions.len() != db.width()
        || conditions.iter().enumerate().any(|(a, c)| c.condition.attribute != a)
    {
        return Err(Error::Precondition("expected one condition per attribute, in order".into()));
    }
    let members: Vec<Vec<usize>> = conditions
        .iter()
        .map(|c| db.matching_rows(&c.condition))
        .collect::<Result<_>>()?;
    if let Some(a) = members.iter().position(|m| m.binary_search(&cfg.outlier).is_err()) {
        return Err(Error::Precondition(format!(
            "natural condition on attribute #{a} excludes the outlier"
        )));
    }
    let ctx = SearchContext { db, cfg, conditions, members: &members };

    let per_property: Vec<Vec<ExplanationPropertyPair>> = (0..db.width())
        .into_par_iter()
        .map(|p| ctx.mine_property(p))
        .collect::<Result<_>>()?;
    let mut pairs: Vec<_> = per_property.into_iter().flatten().collect();
    sort_pairs(&mut pairs);
    Ok(pairs)
}

pub(crate) fn sort_pairs(pairs: &mut [ExplanationPropertyPair]) {
    pairs.sort_by(|a, b| {
        b.score
            .value
            .total_cmp(&a.score.value)
            .then(a.property.cmp(&b.property))
            .then(a.explanation.len().cmp(&b.explanation.len()))
            .then_with(|| {
                a.explanation
                    .attributes()
                    .cmp(b.explanation.attributes())
            })
    });
}

struct SearchContext<'a> {
    db: &'a Dataset,
    cfg: &'a MiningConfig,
    conditions: &'a [NaturalCondition],
    members: &'a [Vec<usize>],
}

/// Outcome of one candidate at one level.
enum Verdict {
    Unsupported,
    Passed(ExplanationPropertyPair),
    Failed,
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl SearchContext<'_> {
    fn explanation(&self, attrs: &[usize]) -> Explanation {
        Explanation::new(attrs.iter().map(|&a| self.conditions[a].condition.clone()).collect())
            .expect("one condition per attribute")
    }

    fn rows(&self, attrs: &[usize]) -> Vec<usize> {
        match attrs {
            [] => (0..self.db.len()).collect(),
            [first, rest @ ..] => rest
                .iter()
                .fold(self.members[*first].clone(), |acc, &a| intersect(&acc, &self.members[a])),
        }
    }

    fn evaluate(&self, attrs: &[usize], property: usize) -> Result<Verdict> {
        let rows = self.rows(attrs);
        let support = rows.len() as f64 / self.db.len() as f64;
        if support < self.cfg.support_threshold {
            return Ok(Verdict::Unsupported);
        }
        let view = SelectionView::from_rows(self.db, rows)?;
        let score = outlierness(&view, property, self.cfg.outlier)?;
        if score.value >= self.cfg.outlierness_threshold {
            Ok(Verdict::Passed(ExplanationPropertyPair {
                explanation: self.explanation(attrs),
                property,
                score,
                support,
            }))
        } else {
            Ok(Verdict::Failed)
        }
    }

    fn mine_property(&self, property: usize) -> Result<Vec<ExplanationPropertyPair>> {
        let mut found = Vec::new();
        match self.evaluate(&[], property)? {
            Verdict::Passed(pair) => return Ok(vec![pair]),
            Verdict::Failed => {}
            Verdict::Unsupported => return Ok(found),
        }

        // Candidates are kept as sorted attribute lists. `level` holds the
        // supported, non-passing sets of the current size; a candidate is only
        // generated when every one-smaller subset is in `level`, which rules
        // out both unsupported subsets and subsets that already passed.
        let mut level: Vec<Vec<usize>> = (0..self.db.width())
            .filter(|&a| a != property)
            .map(|a| vec![a])
            .collect();
        let mut size = 1;
        while size <= self.cfg.max_explanation_size && !level.is_empty() {
            let verdicts: Vec<Verdict> = level
                .par_iter()
                .map(|attrs| self.evaluate(attrs, property))
                .collect::<Result<_>>()?;
            let mut survivors = Vec::new();
            for (attrs, verdict) in level.into_iter().zip(verdicts) {
                match verdict {
                    Verdict::Passed(pair) => found.push(pair),
                    Verdict::Failed => survivors.push(attrs),
                    Verdict::Unsupported => {}
                }
            }
            size += 1;
            level = if size <= self.cfg.max_explanation_size {
                join(&survivors)
            } else {
                Vec::new()
            };
        }
        Ok(found)
    }
}

/// Apriori join: merge two sorted `j`-sets sharing their first `j - 1`
/// elements, keeping the result only if all of its `j`-subsets are present.
fn join(level: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let present: HashSet<&[usize]> = level.iter().map(Vec::as_slice).collect();
    let mut out = Vec::new();
    for (i, a) in level.iter().enumerate() {
        let prefix = &a[..a.len() - 1];
        for b in &level[i + 1..] {
            if &b[..b.len() - 1] != prefix {
                continue;
            }
            let (x, y) = (a[a.len() - 1], b[b.len() - 1]);
            let mut cand = prefix.to_vec();
            cand.push(x.min(y));
            cand.push(x.max(y));
            let closed = (0..cand.len()).all(|skip| {
                let sub: Vec<usize> = cand
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &v)| v)
                    .collect();
                present.contains(sub.as_slice())
            });
            if closed {
                out.push(cand);
            }
        }
    }
    out.sort();
    out
}

/// Evaluation of a user-supplied pair.
#[derive(Debug, Clone)]
pub struct PairEvaluation {
    pub support: f64,
    /// `None` when the support gate rejected the pair before scoring.
    pub score: Option<OutliernessScore>,
    pub verdict: PairVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairVerdict {
    Accepted,
    BelowOutlierness,
    BelowSupport,
}

/// Support and outlierness of `property` for the outlier under `explanation`.
pub fn explain_one(
    db: &Dataset,
    cfg: &MiningConfig,
    explanation: &Explanation,
    property: usize,
) -> Result<PairEvaluation> {
    cfg.validate(db)?;
    if property >= db.width() {
        return Err(Error::Config(format!("unknown property #{property}")));
    }
    if explanation.constrains(property) {
        return Err(Error::Config("the property may not appear in its own explanation".into()));
    }
    let view = select(db, explanation)?;
    if !view.contains(cfg.outlier) {
        return Err(Error::Precondition("the outlier does not satisfy the explanation".into()));
    }
    let support = view.support();
    if support < cfg.support_threshold {
        return Ok(PairEvaluation { support, score: None, verdict: PairVerdict::BelowSupport });
    }
    let score = outlierness(&view, property, cfg.outlier)?;
    let verdict = if score.value >= cfg.outlierness_threshold {
        PairVerdict::Accepted
    } else {
        PairVerdict::BelowOutlierness
    };
    Ok(PairEvaluation { support, score: Some(score), verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{parse_csv, Condition};

    #[test]
    fn join_requires_all_subsets() {
        let level = vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![1, 3]];
        assert_eq!(join(&level), vec![vec![0, 1, 2]]);
        let singles = vec![vec![0], vec![2], vec![5]];
        assert_eq!(join(&singles), vec![vec![0, 2], vec![0, 5], vec![2, 5]]);
    }

    #[test]
    fn intersect_sorted() {
        assert_eq!(intersect(&[1, 3, 5, 7], &[0, 3, 4, 7, 9]), vec![3, 7]);
        assert!(intersect(&[], &[1]).is_empty());
    }

    fn unique_value_db() -> Dataset {
        let mut text = String::from("x,a4\n");
        for i in 0..60 {
            text.push_str(&format!("{},1.0\n", (i * 13 % 29) as f64 / 10.0));
        }
        text.push_str("1.5,0.5\n");
        parse_csv(&text, None).unwrap()
    }

    #[test]
    fn zero_threshold_gives_empty_explanations() {
        let db = unique_value_db();
        let cfg = MiningConfig::new(60).with_outlierness_threshold(0.0).with_max_explanation_size(2);
        let res = mine(&db, &cfg).unwrap();
        assert_eq!(res.pairs.len(), db.width());
        assert!(res.pairs.iter().all(|p| p.explanation.is_empty()));
    }

    #[test]
    fn unique_value_is_top_pair() {
        let db = unique_value_db();
        let cfg = MiningConfig::new(60).with_outlierness_threshold(0.5).with_max_explanation_size(2);
        let res = mine(&db, &cfg).unwrap();
        let top = &res.pairs[0];
        assert_eq!(top.property, 1);
        assert!(top.explanation.is_empty());
    }

    #[test]
    fn config_errors() {
        let db = unique_value_db();
        assert!(matches!(mine(&db, &MiningConfig::new(61)), Err(Error::Config(_))));
        let cfg = MiningConfig::new(0).with_max_explanation_size(3);
        assert!(matches!(mine(&db, &cfg), Err(Error::Config(_))));
        let cfg = MiningConfig::new(0).with_max_explanation_size(1).with_support_threshold(1.5);
        assert!(matches!(mine(&db, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn explain_one_gates() {
        let db = unique_value_db();
        let cfg = MiningConfig::new(60).with_max_explanation_size(1);
        let all = explain_one(&db, &cfg, &Explanation::empty(), 1).unwrap();
        let direct = outlierness(&SelectionView::all(&db), 1, 60).unwrap();
        assert_eq!(all.score.unwrap(), direct);
        assert_eq!(all.support, 1.0);

        let narrow = Explanation::new(vec![Condition::interval(0, 1.5, 1.5).unwrap()]).unwrap();
        let ev = explain_one(&db, &cfg, &narrow, 1).unwrap();
        assert_eq!(ev.verdict, PairVerdict::BelowSupport);
        assert!(ev.score.is_none());

        let own = Explanation::new(vec![Condition::interval(1, 0.0, 2.0).unwrap()]).unwrap();
        assert!(matches!(explain_one(&db, &cfg, &own, 1), Err(Error::Config(_))));

        let excl = Explanation::new(vec![Condition::interval(0, 0.0, 1.0).unwrap()]).unwrap();
        assert!(matches!(explain_one(&db, &cfg, &excl, 1), Err(Error::Precondition(_))));
    }
}
