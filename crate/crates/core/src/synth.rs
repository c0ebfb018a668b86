//! Synthetic datasets with a planted outlier.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Column, Dataset};
use crate::error::{Error, Result};

/// Two equal uniform clusters on attribute `A`, `[-1.1, -0.1]` and
/// `[0.1, 1.1]`, with one object at `A = 0` in the gap.
#[derive(Debug, Clone)]
pub struct Unif2 {
    pub seed: u64,
    /// Columns `A`, `N1`, `N2`, ... row-aligned.
    pub a: Vec<f64>,
    pub noise: Vec<Vec<f64>>,
}

impl Unif2 {
    /// `size / 2 - 1` points in the left cluster, `size / 2` in the right one
    /// and the outlier as the final row. Noise attributes are `Uniform[0, 1)`.
    pub fn generate(seed: u64, size: usize, noise_attributes: usize) -> Result<Unif2> {
        if size < 4 || !size.is_multiple_of(2) {
            return Err(Error::Config(format!("Unif2 size must be even and >= 4, got {size}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = size / 2;
        let mut a = Vec::with_capacity(size);
        a.extend((0..half - 1).map(|_| rng.random_range(-1.1..=-0.1)));
        a.extend((0..half).map(|_| rng.random_range(0.1..=1.1)));
        a.push(0.0);
        let noise = (0..noise_attributes)
            .map(|_| (0..size).map(|_| rng.random::<f64>()).collect())
            .collect();
        Ok(Unif2 { seed, a, noise })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn outlier_row(&self) -> usize {
        self.a.len() - 1
    }

    pub fn to_dataset(&self) -> Result<Dataset> {
        let mut cols = vec![("A".to_string(), Column::Numeric(self.a.clone()))];
        for (i, n) in self.noise.iter().enumerate() {
            cols.push((format!("N{}", i + 1), Column::Numeric(n.clone())));
        }
        Dataset::from_columns(cols)
    }

    /// CSV with a `#` comment header describing the layout.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let half = self.len() / 2;
        writeln!(w, "# Unif2 seed={} size={}", self.seed, self.len())?;
        writeln!(
            w,
            "# rows 0..{}: A ~ U[-1.1,-0.1]; rows {}..{}: A ~ U[0.1,1.1]; row {}: outlier A=0",
            half - 1,
            half - 1,
            2 * half - 1,
            self.outlier_row()
        )?;
        let mut header = vec!["A".to_string()];
        header.extend((1..=self.noise.len()).map(|i| format!("N{i}")));
        writeln!(w, "{}", header.join(","))?;
        for row in 0..self.len() {
            write!(w, "{}", self.a[row])?;
            for n in &self.noise {
                write!(w, ",{}", n[row])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{parse_csv, AttributeKind};

    #[test]
    fn smallest_layout() {
        let u = Unif2::generate(3, 4, 1).unwrap();
        assert_eq!(u.len(), 4);
        assert!((-1.1..=-0.1).contains(&u.a[0]));
        assert!(u.a[1..3].iter().all(|x| (0.1..=1.1).contains(x)));
        assert_eq!(u.a[3], 0.0);
        assert_eq!(u.outlier_row(), 3);
    }

    #[test]
    fn full_size_split() {
        let u = Unif2::generate(1, 20_000, 0).unwrap();
        let left = u.a.iter().filter(|&&x| x < 0.0).count();
        let right = u.a.iter().filter(|&&x| x > 0.0).count();
        assert_eq!((left, right), (9_999, 10_000));
    }

    #[test]
    fn bad_sizes() {
        assert!(Unif2::generate(0, 2, 1).is_err());
        assert!(Unif2::generate(0, 7, 1).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let u = Unif2::generate(9, 50, 2).unwrap();
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let db = parse_csv(std::str::from_utf8(&buf).unwrap(), None).unwrap();
        assert_eq!(db.len(), 50);
        assert_eq!(db.width(), 3);
        assert_eq!(db.schema()[0].kind, AttributeKind::Numeric);
        assert_eq!(db.numeric_column(0).unwrap(), u.a.as_slice());
        assert_eq!(db, u.to_dataset().unwrap());
    }
}
