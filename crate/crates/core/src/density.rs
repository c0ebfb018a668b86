//! Per-attribute density models and the cdf of density values.
//!
//! Numeric attributes use a Parzen (box) window of width `h` centred on each
//! sample point, so the estimate at `x` is the number of sample points within
//! `h/2` of `x`, divided by `n·h`. With a sorted sample this is two binary
//! searches per query.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Output of the rule-of-thumb bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Width(f64),
    /// Zero sample variance (including `n = 1`); no window can be formed.
    Degenerate,
}

/// `1.06 · std(xs) · n^(-1/5)` with the `n - 1` sample standard deviation.
pub fn global_bandwidth(xs: &[f64]) -> Result<Bandwidth> {
    let n = xs.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if n == 1 {
        return Ok(Bandwidth::Degenerate);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    let std = var.sqrt();
    let h = 1.06 * std * (n as f64).powf(-0.2);
    if std == 0.0 || !(h > 0.0) {
        return Ok(Bandwidth::Degenerate);
    }
    Ok(Bandwidth::Width(h))
}

/// Parzen-window estimate over a sorted sample.
#[derive(Debug, Clone)]
pub struct ParzenModel {
    sorted: Vec<f64>,
    h: f64,
}

impl ParzenModel {
    /// Fits with the global bandwidth. Fails with `DegenerateDensity` on a
    /// constant sample.
    pub fn fit(xs: &[f64]) -> Result<ParzenModel> {
        match global_bandwidth(xs)? {
            Bandwidth::Width(h) => Ok(Self::with_bandwidth(xs, h)),
            Bandwidth::Degenerate => Err(Error::DegenerateDensity),
        }
    }

    pub fn with_bandwidth(xs: &[f64], h: f64) -> ParzenModel {
        let mut sorted = xs.to_vec();
        sorted.sort_by(f64::total_cmp);
        ParzenModel { sorted, h }
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn sample(&self) -> &[f64] {
        &self.sorted
    }

    /// Number of sample points `x_i` with `|x - x_i| <= h/2`.
    pub fn window_count(&self, x: f64) -> usize {
        let half = self.h / 2.0;
        let lo = self.sorted.partition_point(|&xi| x - xi > half);
        let hi = self.sorted.partition_point(|&xi| xi - x <= half);
        hi.saturating_sub(lo)
    }

    pub fn density(&self, x: f64) -> f64 {
        self.window_count(x) as f64 / (self.sorted.len() as f64 * self.h)
    }

    /// Density at every sample point, in sorted-sample order. Linear sweep.
    pub fn sample_densities(&self) -> Vec<f64> {
        let half = self.h / 2.0;
        let xs = &self.sorted;
        let norm = xs.len() as f64 * self.h;
        let (mut lo, mut hi) = (0usize, 0usize);
        xs.iter()
            .map(|&x| {
                while x - xs[lo] > half {
                    lo += 1;
                }
                while hi < xs.len() && xs[hi] - x <= half {
                    hi += 1;
                }
                (hi - lo) as f64 / norm
            })
            .collect()
    }
}

/// Relative-frequency pmf over category labels.
#[derive(Debug, Clone)]
pub struct CategoricalModel {
    counts: HashMap<String, usize>,
    n: usize,
}

impl CategoricalModel {
    pub fn fit<S: AsRef<str>>(values: &[S]) -> Result<CategoricalModel> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut counts = HashMap::new();
        for v in values {
            *counts.entry(v.as_ref().to_string()).or_insert(0) += 1;
        }
        Ok(CategoricalModel { counts, n: values.len() })
    }

    pub fn pmf(&self, value: &str) -> f64 {
        self.counts.get(value).map_or(0.0, |&c| c as f64 / self.n as f64)
    }

    pub fn levels(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.counts.iter().map(|(k, &c)| (k.as_str(), c as f64 / self.n as f64))
    }
}

/// A fitted model for one attribute over one sample.
#[derive(Debug, Clone)]
pub enum DensityModel {
    Parzen(ParzenModel),
    /// Categorical attributes, and numeric samples with zero variance (every
    /// object then shares one level and one density).
    Categorical(CategoricalModel),
}

impl DensityModel {
    pub fn fit_numeric(xs: &[f64]) -> Result<DensityModel> {
        match global_bandwidth(xs)? {
            Bandwidth::Width(h) => Ok(DensityModel::Parzen(ParzenModel::with_bandwidth(xs, h))),
            Bandwidth::Degenerate => {
                let labels: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                Ok(DensityModel::Categorical(CategoricalModel::fit(&labels)?))
            }
        }
    }

    pub fn fit_categorical<S: AsRef<str>>(values: &[S]) -> Result<DensityModel> {
        Ok(DensityModel::Categorical(CategoricalModel::fit(values)?))
    }

    pub fn is_parzen(&self) -> bool {
        matches!(self, DensityModel::Parzen(_))
    }
}

/// Empirical cdf `G(f) = |{i : f_i <= f}| / n` of a multiset of densities.
///
/// Stored as strictly increasing breakpoints with the cumulative mass reached
/// at each; `G` is right-continuous and zero below the first breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    breakpoints: Vec<f64>,
    cumulative: Vec<f64>,
}

/// Builds the step cdf of per-object density values.
pub fn density_cdf(densities: &[f64]) -> Result<StepCdf> {
    if densities.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(d) = densities.iter().find(|d| !(**d >= 0.0) || !d.is_finite()) {
        return Err(Error::Internal(format!("invalid density value {d}")));
    }
    let mut sorted = densities.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut breakpoints = Vec::new();
    let mut cumulative = Vec::new();
    let mut i = 0;
    while i < n {
        let v = sorted[i];
        while i < n && sorted[i] == v {
            i += 1;
        }
        breakpoints.push(v);
        cumulative.push(i as f64 / n as f64);
    }
    Ok(StepCdf { breakpoints, cumulative })
}

impl StepCdf {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Largest density in the sample; `G` is 1 from here on.
    pub fn max_density(&self) -> f64 {
        *self.breakpoints.last().expect("non-empty cdf")
    }

    pub fn eval(&self, f: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b <= f);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Constant pieces `(start, end, G)` covering `[0, max_density]`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let first = (0.0, self.breakpoints[0], 0.0);
        let rest = self
            .breakpoints
            .windows(2)
            .zip(&self.cumulative)
            .map(|(w, &c)| (w[0], w[1], c));
        std::iter::once(first).chain(rest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandwidth_examples() {
        assert!(matches!(global_bandwidth(&[]), Err(Error::EmptySample)));
        assert_eq!(global_bandwidth(&[3.0]).unwrap(), Bandwidth::Degenerate);
        assert_eq!(global_bandwidth(&[0.0, 0.0, 0.0]).unwrap(), Bandwidth::Degenerate);

        // 32 values with sample std exactly 1: ±c alternating, c = sqrt(31/32).
        let c = (31.0f64 / 32.0).sqrt();
        let xs: Vec<f64> = (0..32).map(|i| if i % 2 == 0 { c } else { -c }).collect();
        let Bandwidth::Width(h) = global_bandwidth(&xs).unwrap() else { panic!() };
        assert!((h - 1.06 * 32f64.powf(-0.2)).abs() < 1e-12);
        assert!((h - 0.530_000).abs() < 1e-3);
    }

    #[test]
    fn parzen_hand_counts() {
        let m = ParzenModel::with_bandwidth(&[0.0, 1.0], 1.0);
        assert_eq!(m.density(0.0), 0.5);
        assert_eq!(m.density(5.0), 0.0);
        // both endpoints of the window are closed
        assert_eq!(m.window_count(0.5), 2);

        let m = ParzenModel::with_bandwidth(&[0.0, 0.2, 0.4], 1.0);
        assert_eq!(m.density(0.2), 1.0);
    }

    #[test]
    fn sweep_matches_point_queries() {
        let xs = [0.3, -1.0, 0.31, 0.3, 2.0, 0.9, 0.0, 0.29];
        let m = ParzenModel::with_bandwidth(&xs, 0.4);
        let swept = m.sample_densities();
        for (x, d) in m.sample().iter().zip(swept) {
            assert_eq!(m.density(*x), d);
        }
    }

    #[test]
    fn degenerate_numeric_is_categorical_like() {
        let m = DensityModel::fit_numeric(&[2.0, 2.0, 2.0]).unwrap();
        assert!(!m.is_parzen());
        assert!(matches!(ParzenModel::fit(&[2.0, 2.0]), Err(Error::DegenerateDensity)));
    }

    #[test]
    fn categorical_pmf() {
        let m = CategoricalModel::fit(&["a", "a", "a", "b"]).unwrap();
        assert_eq!(m.pmf("b"), 0.25);
        assert_eq!(m.pmf("zz"), 0.0);
        let total: f64 = m.levels().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let single = CategoricalModel::fit(&["cp", "cp"]).unwrap();
        assert_eq!(single.pmf("cp"), 1.0);
    }

    #[test]
    fn cdf_examples() {
        let g = density_cdf(&[2.0; 5]).unwrap();
        assert_eq!(g.eval(1.999), 0.0);
        assert_eq!(g.eval(2.0), 1.0);
        assert_eq!(g.eval(9.0), 1.0);

        let g = density_cdf(&[1.0, 3.0, 1.0, 3.0]).unwrap();
        assert_eq!(g.eval(2.0), 0.5);
        assert_eq!(g.breakpoints(), &[1.0, 3.0]);
        assert_eq!(g.eval(g.max_density()), 1.0);
    }

    #[test]
    fn cdf_rejects_negative() {
        assert!(matches!(density_cdf(&[0.1, -0.1]), Err(Error::Internal(_))));
        assert!(matches!(density_cdf(&[]), Err(Error::EmptySample)));
    }

    #[test]
    fn segments_cover_zero_to_max() {
        let g = density_cdf(&[0.5, 1.0, 1.0, 2.0]).unwrap();
        let segs: Vec<_> = g.segments().collect();
        assert_eq!(segs, vec![(0.0, 0.5, 0.0), (0.5, 1.0, 0.25), (1.0, 2.0, 0.75)]);
    }
}
