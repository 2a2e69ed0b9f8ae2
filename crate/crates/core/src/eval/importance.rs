use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{box_stats, BoxStats};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::MlpModel;
use crate::zig::{link_transform, sigmoid, zig_mean};

/// Predictive mean at a standardized input and its gradient with respect to
/// that input.
pub fn mean_sensitivity(model: &MlpModel, x_std: &[f64]) -> Result<(f64, Vec<f64>)> {
    let raw = model.forward(x_std)?;
    let params = link_transform(raw)?;
    let (p, k, theta) = (params.p(), params.k(), params.theta());
    // ∂ mean / ∂ raw through (1 − p)·k·θ and the link functions
    let d_out = [
        -p * (1.0 - p) * k * theta,
        (1.0 - p) * theta * sigmoid(raw.raw_k),
        (1.0 - p) * k * sigmoid(raw.raw_theta),
    ];
    let (_, grad) = model.input_gradient(x_std, d_out)?;
    Ok((zig_mean(&params), grad))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSensitivity {
    pub feature: String,
    /// 1 for the most influential feature.
    pub rank: usize,
    pub median_abs: f64,
    pub stats: BoxStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub n_rows: usize,
    /// Sorted by rank.
    pub features: Vec<FeatureSensitivity>,
}

/// Per-feature distribution of ∂ mean / ∂ x over the rows of `test_x`
/// (unscaled features; gradients are taken with respect to the
/// standardized inputs). Ranked by median absolute sensitivity; ties keep
/// schema order.
pub fn feature_importance(model: &MlpModel, test_x: &Matrix, feature_names: &[String]) -> Result<FeatureImportance> {
    let width = model.input_width();
    if test_x.cols() != width || feature_names.len() != width {
        return Err(Error::invalid(format!(
            "model expects {width} features, data has {} columns and the schema {} names",
            test_x.cols(),
            feature_names.len()
        )));
    }
    if !model.feature_names().is_empty() && model.feature_names() != feature_names {
        return Err(Error::invalid("feature names differ from those the model was trained with"));
    }
    if test_x.is_empty() {
        return Err(Error::invalid("no rows to compute sensitivities on"));
    }
    let grads: Vec<Vec<f64>> = (0..test_x.rows())
        .into_par_iter()
        .map(|i| mean_sensitivity(model, &model.scaler().apply(test_x.row(i))).map(|(_, g)| g))
        .collect::<Result<_>>()?;

    let mut features: Vec<FeatureSensitivity> = feature_names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let column: Vec<f64> = grads.iter().map(|g| g[j]).collect();
            let mut abs: Vec<f64> = column.iter().map(|v| v.abs()).collect();
            abs.sort_by(f64::total_cmp);
            FeatureSensitivity {
                feature: name.clone(),
                rank: 0,
                median_abs: super::metrics::quantile_type7(&abs, 0.5),
                stats: box_stats(&column).expect("non-empty column"),
            }
        })
        .collect();
    // stable sort keeps schema order among equal medians
    features.sort_by(|a, b| b.median_abs.total_cmp(&a.median_abs));
    for (i, f) in features.iter_mut().enumerate() {
        f.rank = i + 1;
    }
    Ok(FeatureImportance { n_rows: test_x.rows(), features })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, Dense, Scaler};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use zigcast_testkit::{central_difference, relative_error};

    fn random_model(width: usize, seed: u64) -> MlpModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        MlpModel::initialize(width, &[6, 5], 0.0, Scaler::identity(width), &mut rng).unwrap()
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("f{i}")).collect()
    }

    #[test]
    fn matches_finite_differences() {
        let model = random_model(4, 3);
        let x = [0.3, -1.2, 0.8, 0.1];
        let (_, g) = mean_sensitivity(&model, &x).unwrap();
        let mean = |v: &[f64]| mean_sensitivity(&model, v).unwrap().0;
        for (j, gj) in g.iter().enumerate() {
            let fd = central_difference(mean, &x, j, 1e-5);
            assert!(relative_error(*gj, fd, 1e-6) < 1e-4, "feature {j}: {gj} vs {fd}");
        }
    }

    #[test]
    fn single_input_chain_rule() {
        // 1-2-3 net: two ReLU units feeding raw_k only
        let layers = vec![
            Dense { inputs: 1, outputs: 2, weights: vec![1.0, 0.5], bias: vec![0.2, 0.1] },
            Dense { inputs: 2, outputs: 3, weights: vec![0.0, 0.0, 0.7, 0.3, 0.0, 0.0], bias: vec![-1.0, 0.0, 0.4] },
        ];
        let model = MlpModel::from_layers(layers, Activation::Relu, 0.0, Scaler::identity(1)).unwrap();
        let x = [0.6];
        let (_, g) = mean_sensitivity(&model, &x).unwrap();
        let fd = central_difference(|v| mean_sensitivity(&model, v).unwrap().0, &x, 0, 1e-5);
        assert!(relative_error(g[0], fd, 1e-6) < 1e-4);
    }

    #[test]
    fn disconnected_feature_is_exactly_zero() {
        let mut model = random_model(3, 8);
        for o in 0..model.layers()[0].outputs {
            model.tensors_mut()[0][o * 3 + 1] = 0.0;
        }
        let x = Matrix::from_rows(&[[0.1, 2.0, -0.4], [1.0, -3.0, 0.2], [0.0, 0.5, 0.9]]).unwrap();
        let imp = feature_importance(&model, &x, &names(3)).unwrap();
        let f1 = imp.features.iter().find(|f| f.feature == "f1").unwrap();
        assert_eq!(f1.stats.min, 0.0);
        assert_eq!(f1.stats.max, 0.0);
        assert_eq!(f1.rank, 3);
    }

    #[test]
    fn duplicating_rows_keeps_statistics() {
        let model = random_model(3, 2);
        let rows = [[0.1, 2.0, -0.4], [1.0, -3.0, 0.2], [0.0, 0.5, 0.9], [-0.7, 0.2, 0.3]];
        let once = feature_importance(&model, &Matrix::from_rows(&rows).unwrap(), &names(3)).unwrap();
        let doubled: Vec<[f64; 3]> = rows.iter().chain(rows.iter()).copied().collect();
        let twice = feature_importance(&model, &Matrix::from_rows(&doubled).unwrap(), &names(3)).unwrap();
        for (a, b) in once.features.iter().zip(&twice.features) {
            assert_eq!(a.feature, b.feature);
            assert_eq!(a.median_abs, b.median_abs);
            assert_eq!((a.stats.q1, a.stats.median, a.stats.q3), (b.stats.q1, b.stats.median, b.stats.q3));
            assert_eq!(b.stats.n, 2 * a.stats.n);
        }
    }

    #[test]
    fn width_mismatch() {
        let model = random_model(3, 1);
        let x = Matrix::from_rows(&[[0.0, 1.0]]).unwrap();
        assert!(matches!(feature_importance(&model, &x, &names(2)), Err(Error::InvalidInput(_))));
        let x = Matrix::from_rows(&[[0.0, 1.0, 2.0]]).unwrap();
        assert!(feature_importance(&model, &x, &names(2)).is_err());
    }
}
