//! The outlierness score of one attribute value against a population.
//!
//! With `G` the step cdf of the population's density values and `f_o` the
//! density at the object's value, the raw score is
//!
//! ```text
//! raw = ∫_{f_o}^{f_max} (1 - G(f)) df  -  ∫_0^{f_o} G(f) df
//! ```
//!
//! and the reported score is `Ω(raw)`. Both integrals are exact sums over the
//! constant pieces of `G`.

use serde::Serialize;

use crate::dataset::{Column, SelectionView};
use crate::density::{density_cdf, DensityModel, StepCdf};
use crate::error::{Error, Result};

/// `Ω(x) = (1 - e^-x) / (1 + e^-x)` for `x >= 0`, and 0 below.
pub fn omega(x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let e = (-x).exp();
    (1.0 - e) / (1.0 + e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutliernessScore {
    /// `Ω(raw)`, in `[0, 1]`.
    pub value: f64,
    /// `area_above - area_below`.
    pub raw: f64,
    pub query_density: f64,
    pub area_above: f64,
    pub area_below: f64,
}

/// `(area above G right of f_o, area below G left of f_o)`.
pub fn areas(cdf: &StepCdf, query_density: f64) -> (f64, f64) {
    let mut above = 0.0;
    let mut below = 0.0;
    for (start, end, g) in cdf.segments() {
        if end <= query_density {
            below += (end - start) * g;
        } else if start >= query_density {
            above += (end - start) * (1.0 - g);
        } else {
            below += (query_density - start) * g;
            above += (end - query_density) * (1.0 - g);
        }
    }
    // G = 1 beyond the largest density
    below += (query_density - cdf.max_density()).max(0.0);
    (above, below)
}

pub fn score_against(cdf: &StepCdf, query_density: f64) -> OutliernessScore {
    let (above, below) = areas(cdf, query_density);
    let raw = above - below;
    OutliernessScore {
        value: omega(raw),
        raw,
        query_density,
        area_above: above,
        area_below: below,
    }
}

/// Scores `query_density` against the population `densities`, which must
/// include the query object's own density.
pub fn score_densities(densities: &[f64], query_density: f64) -> Result<OutliernessScore> {
    let cdf = density_cdf(densities)?;
    Ok(score_against(&cdf, query_density))
}

/// Density values of a view on one attribute, with the model fitted on the
/// view itself. Returns `(per-member densities in view order, density at
/// row)`.
fn view_densities(view: &SelectionView<'_>, attribute: usize, row: usize) -> Result<(Vec<f64>, f64)> {
    let db = view.base();
    if attribute >= db.width() {
        return Err(Error::Schema(format!("unknown attribute #{attribute}")));
    }
    if view.is_empty() {
        return Err(Error::EmptySample);
    }
    if !view.contains(row) {
        return Err(Error::Precondition(format!("row {row} is not in the selection")));
    }
    match db.column(attribute) {
        Column::Numeric(values) => {
            let xs: Vec<f64> = view.members().iter().map(|&r| values[r]).collect();
            match DensityModel::fit_numeric(&xs)? {
                DensityModel::Parzen(model) => {
                    let query = model.density(values[row]);
                    Ok((model.sample_densities(), query))
                }
                // constant column: every member shares the single level
                DensityModel::Categorical(_) => Ok((vec![1.0; xs.len()], 1.0)),
            }
        }
        Column::Categorical { levels, codes } => {
            let mut counts = vec![0usize; levels.len()];
            for &r in view.members() {
                counts[codes[r] as usize] += 1;
            }
            let n = view.len() as f64;
            let densities = view
                .members()
                .iter()
                .map(|&r| counts[codes[r] as usize] as f64 / n)
                .collect();
            Ok((densities, counts[codes[row] as usize] as f64 / n))
        }
    }
}

/// Outlierness of `attribute` for the object at `row` of the view's base
/// dataset, relative to the view.
pub fn outlierness(view: &SelectionView<'_>, attribute: usize, row: usize) -> Result<OutliernessScore> {
    let (densities, query) = view_densities(view, attribute, row)?;
    score_densities(&densities, query)
}

/// The score together with the cdf it was computed from, for plotting.
pub fn outlierness_with_curve(
    view: &SelectionView<'_>,
    attribute: usize,
    row: usize,
) -> Result<(OutliernessScore, StepCdf)> {
    let (densities, query) = view_densities(view, attribute, row)?;
    let cdf = density_cdf(&densities)?;
    Ok((score_against(&cdf, query), cdf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_csv;

    #[test]
    fn omega_values() {
        assert_eq!(omega(0.0), 0.0);
        assert_eq!(omega(-3.0), 0.0);
        assert!((omega(3.06) - 0.91).abs() < 5e-3);
        assert!((omega(1.17 - 0.10) - 0.49).abs() < 5e-3);
        assert!(omega(800.0) <= 1.0 && omega(800.0) > 0.999);
        assert!(omega(1.0) < omega(1.0 + 1e-9));
    }

    #[test]
    fn constant_column_scores_zero() {
        let db = parse_csv("a\n4\n4\n4\n4\n", None).unwrap();
        let view = SelectionView::all(&db);
        let s = outlierness(&view, 0, 2).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.raw, 0.0);
    }

    #[test]
    fn areas_by_hand() {
        // densities {1, 1, 3, 3}: G = 0 on [0,1), 0.5 on [1,3), 1 from 3.
        let cdf = density_cdf(&[1.0, 1.0, 3.0, 3.0]).unwrap();
        let (above, below) = areas(&cdf, 1.0);
        assert_eq!((above, below), (1.0, 0.0));
        let (above, below) = areas(&cdf, 2.0);
        assert_eq!((above, below), (0.5, 0.5));
        let (above, below) = areas(&cdf, 3.0);
        assert_eq!((above, below), (0.0, 1.0));
        let (above, below) = areas(&cdf, 0.0);
        assert_eq!((above, below), (2.0, 0.0));
    }

    #[test]
    fn raw_equals_mean_minus_query() {
        let d = [0.2, 0.7, 0.7, 1.3, 2.9, 0.05];
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        for q in d {
            let s = score_densities(&d, q).unwrap();
            assert!((s.raw - (mean - q)).abs() < 1e-12);
        }
    }

    #[test]
    fn precondition_and_empty() {
        let db = parse_csv("a\n1\n2\n3\n", None).unwrap();
        let view = SelectionView::from_rows(&db, vec![0, 1]).unwrap();
        assert!(matches!(outlierness(&view, 0, 2), Err(Error::Precondition(_))));
        let empty = SelectionView::from_rows(&db, vec![]).unwrap();
        assert!(matches!(outlierness(&empty, 0, 0), Err(Error::EmptySample)));
    }

    #[test]
    fn categorical_rare_value() {
        let mut text = String::from("c\n");
        for _ in 0..99 {
            text.push_str("x\n");
        }
        text.push_str("y\n");
        let db = parse_csv(&text, None).unwrap();
        let s = outlierness(&SelectionView::all(&db), 0, 99).unwrap();
        // mean pmf = 0.99*0.99 + 0.01*0.01 = 0.9802; minus 0.01
        assert!((s.raw - 0.9702).abs() < 1e-12);
        let common = outlierness(&SelectionView::all(&db), 0, 0).unwrap();
        assert_eq!(common.value, 0.0);
    }
}
