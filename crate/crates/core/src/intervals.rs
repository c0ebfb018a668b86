//! Natural intervals from a one-dimensional Gaussian mixture.
//!
//! The mixture starts with many components centred on spread-out sample points.
//! Each iteration recomputes weights with an annihilation rule
//! `w_j ∝ max(0, Σ_i γ_ij - t)`, drops components whose weight hits zero,
//! refits location and bandwidth of the survivors from the responsibilities,
//! and recomputes responsibilities. The interval of the outlier is the value
//! range of the sample points sharing its most responsible component.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{Column, Condition, Dataset};
use crate::error::{Error, Result};

/// k-means++ style choice of `k` sample points: each new centre is drawn
/// with probability proportional to its squared distance from the nearest
/// centre already chosen.
fn seed_centres(xs: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = xs.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centres = vec![xs[first]];
    let mut d2: Vec<f64> = xs.iter().map(|x| (x - xs[first]).powi(2)).collect();
    while centres.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 {
                    pick = Some(i);
                    if r < d {
                        break;
                    }
                    r -= d;
                }
            }
            pick.expect("positive total has a positive entry")
        } else {
            // only duplicates of existing centres remain
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centres.push(xs[pick]);
        for (d, x) in d2.iter_mut().zip(xs) {
            *d = d.min((x - xs[pick]).powi(2));
        }
    }
    centres
}

#[derive(Debug, Clone, Serialize)]
pub struct EmConfig {
    /// Starting component count; `None` means `⌊√n⌋`.
    pub initial_components: Option<usize>,
    /// Stop when the relative log-likelihood change drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// `t` in the annihilation rule.
    pub annihilation_threshold: f64,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig {
            initial_components: None,
            tolerance: 1e-6,
            max_iterations: 500,
            seed: 0,
            annihilation_threshold: 1.0,
        }
    }
}

impl EmConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("EM tolerance must be positive".into()));
        }
        if self.initial_components == Some(0) {
            return Err(Error::Config("EM needs at least one initial component".into()));
        }
        if !(self.annihilation_threshold >= 0.0) {
            return Err(Error::Config("annihilation threshold must be non-negative".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("EM needs at least one iteration".into()));
        }
        Ok(())
    }
}

/// Fitted mixture. `responsibilities` is row-major `n × k` over the surviving
/// components.
#[derive(Debug, Clone)]
pub struct MixtureState {
    pub locations: Vec<f64>,
    pub bandwidths: Vec<f64>,
    pub weights: Vec<f64>,
    pub responsibilities: Vec<f64>,
    pub initial_components: usize,
    pub iterations: usize,
    pub log_likelihood: f64,
    pub converged: bool,
    /// Every component was annihilated and a single component was substituted.
    pub fallback: bool,
}

impl MixtureState {
    /// Number of surviving components, `k*`.
    pub fn components(&self) -> usize {
        self.weights.len()
    }

    pub fn responsibility_row(&self, i: usize) -> &[f64] {
        let k = self.components();
        &self.responsibilities[i * k..(i + 1) * k]
    }

    /// Most responsible component of point `i`; lowest index on ties.
    pub fn assignment(&self, i: usize) -> usize {
        argmax(self.responsibility_row(i))
    }

    /// Responsibilities recomputed from the current parameters.
    pub fn recompute_responsibilities(&self, xs: &[f64]) -> Vec<f64> {
        let mut gamma = vec![0.0; xs.len() * self.components()];
        e_step(xs, &self.locations, &self.bandwidths, &self.weights, &mut gamma);
        gamma
    }
}

/// Snapshot handed to an observer after every iteration.
#[derive(Debug)]
pub struct IterationView<'a> {
    pub iteration: usize,
    pub weights: &'a [f64],
    pub responsibilities: &'a [f64],
    pub log_likelihood: f64,
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &g) in row.iter().enumerate() {
        if g > row[best] {
            best = j;
        }
    }
    best
}

/// Responsibilities from parameters, in log space. Returns the observed-data
/// log-likelihood.
fn e_step(xs: &[f64], locations: &[f64], bandwidths: &[f64], weights: &[f64], gamma: &mut [f64]) -> f64 {
    let k = weights.len();
    let consts: Vec<f64> = weights
        .iter()
        .zip(bandwidths)
        .map(|(w, b)| w.ln() - 0.5 * (2.0 * PI * b * b).ln())
        .collect();
    let inv2var: Vec<f64> = bandwidths.iter().map(|b| 0.5 / (b * b)).collect();
    let mut ll = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let row = &mut gamma[i * k..(i + 1) * k];
        let mut max = f64::NEG_INFINITY;
        for j in 0..k {
            let d = x - locations[j];
            row[j] = consts[j] - d * d * inv2var[j];
            max = max.max(row[j]);
        }
        let mut sum = 0.0;
        for g in row.iter_mut() {
            *g = (*g - max).exp();
            sum += *g;
        }
        for g in row.iter_mut() {
            *g /= sum;
        }
        ll += max + sum.ln();
    }
    ll
}

pub fn em_fit(xs: &[f64], cfg: &EmConfig) -> Result<MixtureState> {
    em_fit_observed(xs, cfg, |_| {})
}

/// [`em_fit`] with a callback after every iteration.
pub fn em_fit_observed<F>(xs: &[f64], cfg: &EmConfig, mut observe: F) -> Result<MixtureState>
where
    F: FnMut(&IterationView<'_>),
{
    cfg.validate()?;
    let n = xs.len();
    if n < 2 {
        return Err(Error::DegenerateSample(format!("need at least 2 points, got {n}")));
    }
    let (min, max) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let range = max - min;
    if !(range > 0.0) {
        return Err(Error::DegenerateSample("constant sample".into()));
    }
    let var_floor = 1e-9 * range * range;
    let initial = cfg
        .initial_components
        .unwrap_or_else(|| (n as f64).sqrt().floor() as usize)
        .clamp(1, n);

    // Responsibilities start from components centred on spread-out sample
    // points (D² seeding), all with a tenth of the sample variance.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut k = initial;
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    let centres = seed_centres(xs, k, &mut rng);
    let spread = vec![(var / 10.0).max(var_floor).sqrt(); k];
    let equal = vec![1.0 / k as f64; k];
    let mut gamma = vec![0.0; n * k];
    e_step(xs, &centres, &spread, &equal, &mut gamma);

    let mut locations = Vec::new();
    let mut bandwidths = Vec::new();
    let mut weights = Vec::new();
    let mut prev_ll = f64::NEG_INFINITY;
    let mut ll = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut fallback = false;

    while iterations < cfg.max_iterations {
        iterations += 1;
        let mut mass = vec![0.0; k];
        for row in gamma.chunks(k) {
            for (m, g) in mass.iter_mut().zip(row) {
                *m += g;
            }
        }
        let raw: Vec<f64> = mass
            .iter()
            .map(|m| (m - cfg.annihilation_threshold).max(0.0))
            .collect();
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            log::warn!("all {k} mixture components annihilated; using a single component");
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
            locations = vec![mean];
            bandwidths = vec![var.max(var_floor).sqrt()];
            weights = vec![1.0];
            gamma = vec![1.0; n];
            ll = e_step(xs, &locations, &bandwidths, &weights, &mut gamma);
            fallback = true;
            observe(&IterationView {
                iteration: iterations,
                weights: &weights,
                responsibilities: &gamma,
                log_likelihood: ll,
            });
            break;
        }

        let keep: Vec<usize> = (0..k).filter(|&j| raw[j] > 0.0).collect();
        let annihilated = keep.len() < k;
        if annihilated {
            let mut compact = Vec::with_capacity(n * keep.len());
            for row in gamma.chunks(k) {
                compact.extend(keep.iter().map(|&j| row[j]));
            }
            gamma = compact;
        }
        let new_k = keep.len();
        weights = keep.iter().map(|&j| raw[j] / total).collect();
        let mass: Vec<f64> = keep.iter().map(|&j| mass[j]).collect();

        locations = vec![0.0; new_k];
        for (row, &x) in gamma.chunks(new_k).zip(xs) {
            for (m, g) in locations.iter_mut().zip(row) {
                *m += g * x;
            }
        }
        for (m, s) in locations.iter_mut().zip(&mass) {
            *m /= s;
        }
        let mut spread = vec![0.0; new_k];
        for (row, &x) in gamma.chunks(new_k).zip(xs) {
            for j in 0..new_k {
                let d = x - locations[j];
                spread[j] += row[j] * d * d;
            }
        }
        bandwidths = spread
            .iter()
            .zip(&mass)
            .map(|(s, m)| (s / m).max(var_floor).sqrt())
            .collect();
        k = new_k;

        ll = e_step(xs, &locations, &bandwidths, &weights, &mut gamma);
        observe(&IterationView {
            iteration: iterations,
            weights: &weights,
            responsibilities: &gamma,
            log_likelihood: ll,
        });

        if !annihilated && iterations > 1 && (ll - prev_ll).abs() <= cfg.tolerance * prev_ll.abs() {
            converged = true;
            break;
        }
        prev_ll = ll;
    }

    Ok(MixtureState {
        locations,
        bandwidths,
        weights,
        responsibilities: gamma,
        initial_components: initial,
        iterations,
        log_likelihood: ll,
        converged,
        fallback,
    })
}

/// Closed interval `[lo, hi]` of actual sample values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NaturalInterval {
    pub lo: f64,
    pub hi: f64,
    pub component: usize,
}

/// Range of the points that share `value`'s most responsible component.
pub fn natural_interval(xs: &[f64], value: f64, state: &MixtureState) -> Result<NaturalInterval> {
    if state.responsibilities.len() != xs.len() * state.components() {
        return Err(Error::Precondition("mixture was not fitted on this sample".into()));
    }
    let at = xs
        .iter()
        .position(|&x| x == value)
        .ok_or_else(|| Error::Precondition(format!("value {value} is not in the sample")))?;
    let component = state.assignment(at);
    let (lo, hi) = (0..xs.len())
        .filter(|&i| state.assignment(i) == component)
        .fold((value, value), |(lo, hi), i| (lo.min(xs[i]), hi.max(xs[i])));
    Ok(NaturalInterval { lo, hi, component })
}

/// The equality condition `attribute = value`.
pub fn natural_condition_categorical(attribute: usize, value: &str) -> Condition {
    Condition::equals(attribute, value)
}

/// EM run summary kept for reports.
#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub seed: u64,
    pub initial_components: usize,
    pub components: usize,
    pub iterations: usize,
    pub converged: bool,
    pub log_likelihood: f64,
    pub fallback: bool,
}

#[derive(Debug, Clone)]
pub struct NaturalCondition {
    pub condition: Condition,
    /// `None` for categorical and constant columns.
    pub fit: Option<FitSummary>,
}

/// Seed for the fit of one attribute, derived from the run seed.
pub fn attribute_seed(seed: u64, attribute: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (attribute as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One natural condition per attribute, each containing the object at `row`.
/// Attributes are fitted in parallel.
pub fn natural_conditions(db: &Dataset, row: usize, cfg: &EmConfig) -> Result<Vec<NaturalCondition>> {
    if row >= db.len() {
        return Err(Error::Config(format!("outlier row {row} out of range (n = {})", db.len())));
    }
    cfg.validate()?;
    (0..db.width())
        .into_par_iter()
        .map(|a| match db.column(a) {
            Column::Categorical { levels, codes } => Ok(NaturalCondition {
                condition: natural_condition_categorical(a, &levels[codes[row] as usize]),
                fit: None,
            }),
            Column::Numeric(xs) => {
                let value = xs[row];
                if xs.iter().all(|&x| x == value) {
                    return Ok(NaturalCondition {
                        condition: Condition::interval(a, value, value)?,
                        fit: None,
                    });
                }
                let seed = attribute_seed(cfg.seed, a);
                let attr_cfg = EmConfig { seed, ..cfg.clone() };
                let state = em_fit(xs, &attr_cfg)?;
                let interval = natural_interval(xs, value, &state)?;
                Ok(NaturalCondition {
                    condition: Condition::interval(a, interval.lo, interval.hi)?,
                    fit: Some(FitSummary {
                        seed,
                        initial_components: state.initial_components,
                        components: state.components(),
                        iterations: state.iterations,
                        converged: state.converged,
                        log_likelihood: state.log_likelihood,
                        fallback: state.fallback,
                    }),
                })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_masses() -> Vec<f64> {
        vec![-0.01, 0.0, 0.01, 9.99, 10.0, 10.01]
    }

    #[test]
    fn separated_masses_give_two_components() {
        let xs = two_masses();
        for seed in 0..20 {
            let state = em_fit(&xs, &EmConfig::default().with_seed(seed)).unwrap();
            assert_eq!(state.components(), 2, "seed {seed}");
            let mut locs = state.locations.clone();
            locs.sort_by(f64::total_cmp);
            assert!(locs[0].abs() < 0.05 && (locs[1] - 10.0).abs() < 0.05, "{locs:?}");
            // assignment purity
            let left = state.assignment(0);
            assert!((0..3).all(|i| state.assignment(i) == left));
            assert!((3..6).all(|i| state.assignment(i) != left));

            let iv = natural_interval(&xs, 0.0, &state).unwrap();
            assert_eq!((iv.lo, iv.hi), (-0.01, 0.01));
        }
    }

    #[test]
    fn single_component_interval_spans_sample() {
        let xs = [0.1, 0.2, 0.25, 0.3, 0.4];
        let cfg = EmConfig { initial_components: Some(1), ..EmConfig::default() };
        let state = em_fit(&xs, &cfg).unwrap();
        assert_eq!(state.components(), 1);
        let iv = natural_interval(&xs, 0.25, &state).unwrap();
        assert_eq!((iv.lo, iv.hi), (0.1, 0.4));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(em_fit(&[1.0], &EmConfig::default()), Err(Error::DegenerateSample(_))));
        assert!(matches!(em_fit(&[2.0; 5], &EmConfig::default()), Err(Error::DegenerateSample(_))));
    }

    #[test]
    fn value_must_be_in_sample() {
        let xs = two_masses();
        let state = em_fit(&xs, &EmConfig::default()).unwrap();
        assert!(matches!(natural_interval(&xs, 5.0, &state), Err(Error::Precondition(_))));
    }

    #[test]
    fn fallback_when_everything_annihilates() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let cfg = EmConfig { annihilation_threshold: 10.0, ..EmConfig::default() };
        let state = em_fit(&xs, &cfg).unwrap();
        assert!(state.fallback);
        assert_eq!(state.components(), 1);
        let iv = natural_interval(&xs, 2.0, &state).unwrap();
        assert_eq!((iv.lo, iv.hi), (0.0, 3.0));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let xs: Vec<f64> = (0..200).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let cfg = EmConfig::default().with_seed(42);
        let a = em_fit(&xs, &cfg).unwrap();
        let b = em_fit(&xs, &cfg).unwrap();
        assert_eq!(a.responsibilities, b.responsibilities);
        assert_eq!(a.locations, b.locations);
        assert_eq!(a.log_likelihood.to_bits(), b.log_likelihood.to_bits());
    }

    #[test]
    fn categorical_condition() {
        let c = natural_condition_categorical(2, "cp");
        assert_eq!(c, Condition::equals(2, "cp"));
    }

    #[test]
    fn bad_config_rejected() {
        let xs = two_masses();
        let cfg = EmConfig { tolerance: 0.0, ..EmConfig::default() };
        assert!(matches!(em_fit(&xs, &cfg), Err(Error::Config(_))));
    }
}
