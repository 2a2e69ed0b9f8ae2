use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Columns whose population standard deviation falls below this are treated
/// as constant and scaled by 1.
pub const CONSTANT_COLUMN_STD: f64 = 1e-12;

/// Per-feature z-score statistics fitted on the training matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub constant: Vec<bool>,
}

impl Scaler {
    /// Identity scaling for `width` features.
    pub fn identity(width: usize) -> Self {
        Self { mean: vec![0.0; width], std: vec![1.0; width], constant: vec![false; width] }
    }

    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(self.mean.iter().zip(&self.std)).map(|(&x, (&m, &s))| (x - m) / s).collect()
    }

    pub fn apply_matrix(&self, m: &Matrix) -> Result<Matrix> {
        if m.cols() != self.width() {
            return Err(Error::invalid(format!(
                "scaler fitted on {} features applied to {} columns",
                self.width(),
                m.cols()
            )));
        }
        let mut out = Matrix::with_cols(m.cols());
        for row in m.iter_rows() {
            out.push_row(&self.apply(row))?;
        }
        Ok(out)
    }
}

/// Per-column mean and population standard deviation.
pub fn standardize_fit(raw: &Matrix) -> Result<Scaler> {
    if raw.rows() < 2 {
        return Err(Error::invalid(format!("standardization needs at least 2 rows, got {}", raw.rows())));
    }
    if let Some(pos) = raw.as_flat().iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!(
            "non-finite feature value at row {}, column {}",
            pos / raw.cols(),
            pos % raw.cols()
        )));
    }
    let n = raw.rows() as f64;
    let mut scaler = Scaler::identity(raw.cols());
    for j in 0..raw.cols() {
        let mean = raw.column(j).sum::<f64>() / n;
        let var = raw.column(j).map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let std = var.sqrt();
        scaler.mean[j] = mean;
        if std < CONSTANT_COLUMN_STD {
            scaler.constant[j] = true;
        } else {
            scaler.std[j] = std;
        }
    }
    Ok(scaler)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn column(values: &[f64]) -> Matrix {
        Matrix::from_rows(&values.iter().map(|&v| vec![v]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn two_point_column() {
        let s = standardize_fit(&column(&[1.0, 3.0])).unwrap();
        assert_eq!((s.mean[0], s.std[0], s.constant[0]), (2.0, 1.0, false));
    }

    #[test]
    fn constant_column_is_flagged() {
        let s = standardize_fit(&column(&[5.0, 5.0, 5.0])).unwrap();
        assert_eq!((s.mean[0], s.std[0], s.constant[0]), (5.0, 1.0, true));
    }

    #[test]
    fn four_point_column() {
        let s = standardize_fit(&column(&[2.0, 4.0, 6.0, 8.0])).unwrap();
        assert_eq!(s.mean[0], 5.0);
        assert!((s.std[0] - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_short_or_non_finite_input() {
        assert!(matches!(standardize_fit(&column(&[1.0])), Err(Error::InvalidInput(_))));
        assert!(matches!(standardize_fit(&column(&[1.0, f64::NAN])), Err(Error::InvalidInput(_))));
    }

    proptest! {
        #[test]
        fn standardized_training_matrix_has_unit_moments(
            rows in prop::collection::vec(prop::collection::vec(-1e3..1e3f64, 3), 2..60)
        ) {
            let m = Matrix::from_rows(&rows).unwrap();
            let s = standardize_fit(&m).unwrap();
            let z = s.apply_matrix(&m).unwrap();
            let n = z.rows() as f64;
            for j in 0..3 {
                if s.constant[j] { continue; }
                let mean = z.column(j).sum::<f64>() / n;
                let std = (z.column(j).map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
                prop_assert!(mean.abs() < 1e-10);
                prop_assert!((std - 1.0).abs() < 1e-10);
            }
        }
    }
}
