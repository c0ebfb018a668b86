//! Brute-force reference implementations for cross-checking `outlying`.
//!
//! Nothing here reuses the production scoring path: densities are literal
//! kernel sums, areas come from quadrature or from the identity
//! `area_above - area_below = mean(density) - f_o`, and mining enumerates
//! every subset of the condition vocabulary. Only `omega`, the data model and
//! the natural conditions (the vocabulary itself) are shared.

use outlying::dataset::{Bound, Column, Condition, Dataset};
use outlying::intervals::natural_conditions;
use outlying::miner::MiningConfig;
use outlying::outlierness::omega;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("dataset has {rows} rows, oracle limit is {limit}")]
    TooLarge { rows: usize, limit: usize },
    #[error("too many attributes for subset enumeration: {0}")]
    TooWide(usize),
    #[error(transparent)]
    Core(#[from] outlying::Error),
}

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Step of the density-level grid, in density units.
    pub quadrature_step: f64,
    /// Row guard for exhaustive enumeration.
    pub max_rows: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { quadrature_step: 1e-4, max_rows: 500 }
    }
}

/// Parzen box kernel, `1` for `|u| <= 1/2`.
fn parzen_kernel(u: f64) -> f64 {
    if u.abs() <= 0.5 {
        1.0
    } else {
        0.0
    }
}

/// `(1/n) Σ (1/h) K((x - x_i)/h)`, summed term by term.
pub fn naive_density(xs: &[f64], h: f64, x: f64) -> f64 {
    let mut sum = 0.0;
    for &xi in xs {
        sum += parzen_kernel((x - xi) / h);
    }
    sum / (xs.len() as f64 * h)
}

/// Textbook bandwidth; `None` when the sample has zero spread.
pub fn rule_of_thumb_bandwidth(xs: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    let std = (ss / (n - 1.0)).sqrt();
    (std > 0.0).then(|| 1.06 * std * n.powf(-0.2))
}

/// `|{i : d_i <= f}| / n` by scanning.
fn brute_cdf(densities: &[f64], f: f64) -> f64 {
    densities.iter().filter(|&&d| d <= f).count() as f64 / densities.len() as f64
}

/// Areas above and below the empirical cdf of `densities` around `query`,
/// by midpoint quadrature on every interval between consecutive distinct
/// density levels (the cdf is constant inside each).
pub fn quadrature_areas(densities: &[f64], query: f64) -> (f64, f64) {
    let mut knots: Vec<f64> = densities.to_vec();
    knots.push(0.0);
    knots.push(query);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut above = 0.0;
    let mut below = 0.0;
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let g = brute_cdf(densities, 0.5 * (a + b));
        if b <= query {
            below += (b - a) * g;
        } else {
            above += (b - a) * (1.0 - g);
        }
    }
    (above, below)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleScore {
    pub value: f64,
    pub raw: f64,
    pub area_above: f64,
    pub area_below: f64,
}

/// Score of value `v` under an exact `N(mu, sigma²)` population.
///
/// The cdf of density values, `G(t) = P(f(X) <= t)`, is obtained by
/// integrating the pdf numerically over the region where the pdf exceeds `t`
/// (a symmetric band around `mu`), and the two areas are then integrated over
/// a grid of density levels with spacing `cfg.quadrature_step`.
pub fn analytic_gaussian_score(mu: f64, sigma: f64, v: f64, cfg: &OracleConfig) -> OracleScore {
    assert!(sigma > 0.0, "sigma must be positive");
    let pdf = |x: f64| (-(x - mu).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let f_max = pdf(mu);
    let f_o = pdf(v);

    // Cumulative mass of the pdf over [mu - r, mu + r] on a fine radius grid,
    // composite Simpson per cell.
    let r_max = 12.0 * sigma;
    let cells = 200_000;
    let dr = r_max / cells as f64;
    let mut inner = Vec::with_capacity(cells + 1);
    inner.push(0.0);
    let mut acc = 0.0;
    for c in 0..cells {
        let (a, b) = (c as f64 * dr, (c + 1) as f64 * dr);
        let m = 0.5 * (a + b);
        let cell = dr / 6.0 * (pdf(mu + a) + 4.0 * pdf(mu + m) + pdf(mu + b));
        acc += 2.0 * cell;
        inner.push(acc);
    }
    let mass_within = |r: f64| -> f64 {
        if r >= r_max {
            return inner[cells];
        }
        let pos = r / dr;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        inner[i] + frac * (inner[i + 1] - inner[i])
    };
    // f(x) > t  <=>  |x - mu| < sigma * sqrt(2 ln(f_max / t))
    let g = |t: f64| -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= f_max {
            return 1.0;
        }
        let r = sigma * (2.0 * (f_max / t).ln()).sqrt();
        (1.0 - mass_within(r)).clamp(0.0, 1.0)
    };

    let steps = (f_max / cfg.quadrature_step).ceil() as usize;
    let dt = f_max / steps as f64;
    let mut above = 0.0;
    let mut below = 0.0;
    for s in 0..steps {
        let (a, b) = (s as f64 * dt, (s + 1) as f64 * dt);
        // split the cell at f_o if it straddles it
        let pieces: [(f64, f64); 2] = if a < f_o && f_o < b { [(a, f_o), (f_o, b)] } else { [(a, b), (b, b)] };
        for (lo, hi) in pieces {
            if hi <= lo {
                continue;
            }
            let gm = g(0.5 * (lo + hi));
            if hi <= f_o {
                below += (hi - lo) * gm;
            } else {
                above += (hi - lo) * (1.0 - gm);
            }
        }
    }
    let raw = above - below;
    OracleScore { value: omega(raw), raw, area_above: above, area_below: below }
}

/// Score of the object at `row` on `attribute`, relative to `rows`, by direct
/// kernel sums and the mean-minus-query identity.
pub fn brute_score(db: &Dataset, rows: &[usize], attribute: usize, row: usize) -> f64 {
    let densities: Vec<f64>;
    let query: f64;
    match db.column(attribute) {
        Column::Numeric(values) => {
            let xs: Vec<f64> = rows.iter().map(|&r| values[r]).collect();
            match rule_of_thumb_bandwidth(&xs) {
                Some(h) => {
                    densities = xs.iter().map(|&x| naive_density(&xs, h, x)).collect();
                    query = naive_density(&xs, h, values[row]);
                }
                None => return 0.0,
            }
        }
        Column::Categorical { codes, .. } => {
            let freq = |c: u32| rows.iter().filter(|&&r| codes[r] == c).count() as f64 / rows.len() as f64;
            densities = rows.iter().map(|&r| freq(codes[r])).collect();
            query = freq(codes[row]);
        }
    }
    let mean = densities.iter().sum::<f64>() / densities.len() as f64;
    omega(mean - query)
}

fn holds(db: &Dataset, row: usize, c: &Condition) -> bool {
    match (db.column(c.attribute), &c.body) {
        (Column::Numeric(v), Bound::Interval { lo, hi }) => *lo <= v[row] && v[row] <= *hi,
        (Column::Categorical { levels, codes }, Bound::Equals(s)) => &levels[codes[row] as usize] == s,
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OraclePair {
    /// Attributes of the explanation, increasing.
    pub explanation: Vec<usize>,
    pub property: usize,
    pub score: f64,
    pub support: f64,
}

/// Every minimal qualifying pair, by enumerating all subsets of the natural
/// conditions of size at most `k` for every property.
pub fn exhaustive_mine(
    db: &Dataset,
    cfg: &MiningConfig,
    oracle: &OracleConfig,
) -> Result<Vec<OraclePair>, OracleError> {
    if db.len() > oracle.max_rows {
        return Err(OracleError::TooLarge { rows: db.len(), limit: oracle.max_rows });
    }
    let m = db.width();
    if m > 20 {
        return Err(OracleError::TooWide(m));
    }
    cfg.validate(db)?;
    let vocabulary = natural_conditions(db, cfg.outlier, &cfg.em)?;

    let mut out = Vec::new();
    for p in 0..m {
        let mut qualifying: Vec<(u32, f64, f64)> = Vec::new();
        for mask in 0u32..(1 << m) {
            if mask & (1 << p) != 0 || mask.count_ones() as usize > cfg.max_explanation_size {
                continue;
            }
            let rows: Vec<usize> = (0..db.len())
                .filter(|&r| {
                    (0..m).all(|a| mask & (1 << a) == 0 || holds(db, r, &vocabulary[a].condition))
                })
                .collect();
            let support = rows.len() as f64 / db.len() as f64;
            if support < cfg.support_threshold || !rows.contains(&cfg.outlier) {
                continue;
            }
            let score = brute_score(db, &rows, p, cfg.outlier);
            if score >= cfg.outlierness_threshold {
                qualifying.push((mask, score, support));
            }
        }
        for &(mask, score, support) in &qualifying {
            let minimal = !qualifying.iter().any(|&(other, _, _)| other != mask && other & mask == other);
            if minimal {
                out.push(OraclePair {
                    explanation: (0..m).filter(|a| mask & (1 << a) != 0).collect(),
                    property: p,
                    score,
                    support,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use outlying::dataset::parse_csv;

    #[test]
    fn naive_density_examples() {
        assert_eq!(naive_density(&[0.0, 1.0], 1.0, 9.0), 0.0);
        assert_eq!(naive_density(&[0.3], 0.5, 0.3), 2.0);
        assert_eq!(naive_density(&[0.0, 0.2, 0.4], 1.0, 0.2), 1.0);
    }

    #[test]
    fn quadrature_by_hand() {
        let (a, b) = quadrature_areas(&[1.0, 1.0, 3.0, 3.0], 2.0);
        assert!((a - 0.5).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
    }

    #[test]
    fn analytic_mode_is_minimum() {
        let cfg = OracleConfig::default();
        let at_mode = analytic_gaussian_score(0.0, 0.1, 0.0, &cfg);
        let off = analytic_gaussian_score(0.0, 0.1, 0.05, &cfg);
        assert_eq!(at_mode.value, 0.0);
        assert!(at_mode.raw < off.raw);
        // area above the whole curve is E[f(X)] = 1 / (2 sigma sqrt(pi))
        let tail = analytic_gaussian_score(0.0, 0.1, -1.0, &cfg);
        let expected = 1.0 / (2.0 * 0.1 * std::f64::consts::PI.sqrt());
        assert!((tail.raw - expected).abs() < 1e-3, "{} vs {expected}", tail.raw);
    }

    #[test]
    fn quadrature_halving_converges() {
        let coarse = OracleConfig::default();
        let fine = OracleConfig { quadrature_step: coarse.quadrature_step / 2.0, ..coarse };
        for v in [-1.0, -0.12, 0.05] {
            let a = analytic_gaussian_score(0.0, 0.1, v, &coarse).value;
            let b = analytic_gaussian_score(0.0, 0.1, v, &fine).value;
            assert!((a - b).abs() < 1e-4, "v={v}: {a} vs {b}");
        }
    }

    #[test]
    fn size_guard() {
        let mut text = String::from("a,b\n");
        for i in 0..20 {
            text.push_str(&format!("{i},{}\n", i % 3));
        }
        let db = parse_csv(&text, None).unwrap();
        let cfg = MiningConfig::new(0).with_max_explanation_size(1);
        let small = OracleConfig { max_rows: 10, ..OracleConfig::default() };
        assert!(matches!(exhaustive_mine(&db, &cfg, &small), Err(OracleError::TooLarge { .. })));
    }
}
