use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zigcast_testkit::relative_error;

use super::*;
use crate::zig::mean_nll;

fn random_model(input: usize, hidden: &[usize], seed: u64) -> MlpModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = MlpModel::initialize(input, hidden, 0.0, Scaler::identity(input), &mut rng).unwrap();
    // nonzero biases so every code path is exercised
    for l in &mut m.layers {
        l.bias.iter_mut().for_each(|b| *b = rng.random_range(-0.3..0.3));
    }
    m
}

fn random_batch(rows: usize, cols: usize, seed: u64) -> (Matrix, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..rows * cols).map(|_| rng.random_range(-2.0..2.0)).collect();
    let y = (0..rows)
        .map(|i| if i % 3 == 0 { 0.0 } else { rng.random_range(0.05..6.0) })
        .collect();
    (Matrix::from_flat(rows, cols, data).unwrap(), y)
}

#[test]
fn zero_network_outputs_zero() {
    let m = MlpModel::zeros(5, &HIDDEN_WIDTHS);
    let raw = m.forward(&[1.0, -2.0, 3.0, 0.5, 9.0]).unwrap();
    assert_eq!(raw, RawParamTriple::new(0.0, 0.0, 0.0));
}

#[test]
fn no_dropout_means_train_equals_inference() {
    let m = random_model(6, &[8, 5], 3);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = [0.1, -0.4, 1.2, 0.0, 2.0, -1.0];
    assert_eq!(m.forward(&x).unwrap(), m.forward_train(&x, &mut rng).unwrap());
}

#[test]
fn dropout_changes_training_pass_only() {
    let mut m = random_model(6, &[30, 30], 3);
    m.dropout_rate = 0.08;
    let x = [0.1, -0.4, 1.2, 0.0, 2.0, -1.0];
    let inference = m.forward(&x).unwrap();
    assert_eq!(inference, m.forward(&x).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let differs = (0..20).any(|_| m.forward_train(&x, &mut rng).unwrap() != inference);
    assert!(differs);
}

#[test]
fn toy_network_matches_hand_computed_chain() {
    // 4 -> 2 (relu) -> 3
    let l1 = Dense {
        inputs: 4,
        outputs: 2,
        weights: vec![0.5, -1.0, 0.25, 2.0, -0.3, 0.8, 1.5, -0.1],
        bias: vec![0.1, -0.2],
    };
    let l2 = Dense { inputs: 2, outputs: 3, weights: vec![1.0, -2.0, 0.5, 0.5, -1.5, 3.0], bias: vec![0.0, 0.3, -0.7] };
    let m = MlpModel::from_layers(vec![l1, l2], Activation::Relu, 0.0, Scaler::identity(4)).unwrap();
    let x = [1.0, 2.0, -1.0, 0.5];
    // h1 = relu(0.5 - 2 - 0.25 + 1 + 0.1) = relu(-0.65) = 0
    // h2 = relu(-0.3 + 1.6 - 1.5 - 0.05 - 0.2) = relu(-0.45) = 0
    let raw = m.forward(&x).unwrap();
    assert_eq!(raw, RawParamTriple::new(0.0, 0.3, -0.7));
    let x = [2.0, 0.0, 1.0, 1.0];
    // h1 = relu(1 + 0.25 + 2 + 0.1) = 3.35, h2 = relu(-0.6 + 1.5 - 0.1 - 0.2) = 0.6
    let raw = m.forward(&x).unwrap();
    let expect = [3.35 - 1.2, 0.5 * 3.35 + 0.5 * 0.6 + 0.3, -1.5 * 3.35 + 3.0 * 0.6 - 0.7];
    for (got, want) in raw.as_array().iter().zip(expect) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn width_mismatch_is_rejected() {
    let m = MlpModel::zeros(3, &[4]);
    assert!(matches!(m.forward(&[1.0, 2.0]), Err(Error::InvalidInput(_))));
    let (x, y) = random_batch(4, 5, 1);
    assert!(matches!(loss_and_gradients(&m, &x, &y, None), Err(Error::InvalidInput(_))));
}

#[test]
fn malformed_layers_are_rejected() {
    let bad = vec![Dense::zeros(3, 4), Dense::zeros(5, 3)];
    assert!(MlpModel::from_layers(bad, Activation::Relu, 0.0, Scaler::identity(3)).is_err());
    let two_outputs = vec![Dense::zeros(3, 2)];
    assert!(MlpModel::from_layers(two_outputs, Activation::Relu, 0.0, Scaler::identity(3)).is_err());
    let too_much_dropout = vec![Dense::zeros(3, 3)];
    assert!(MlpModel::from_layers(too_much_dropout, Activation::Relu, 0.2, Scaler::identity(3)).is_err());
}

#[test]
fn zero_network_loss_on_zero_observation() {
    let m = MlpModel::zeros(4, &[5]);
    let x = Matrix::from_rows(&[vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
    let (nll, _) = loss_and_gradients(&m, &x, &[0.0], None).unwrap();
    assert!((nll - 0.693_147_180_559_945_3).abs() < 1e-15);
}

#[test]
fn empty_batch_is_rejected() {
    let m = MlpModel::zeros(2, &[3]);
    let x = Matrix::with_cols(2);
    assert!(matches!(loss_and_gradients(&m, &x, &[], None), Err(Error::InvalidInput(_))));
}

#[test]
fn loss_matches_mean_nll_of_outputs() {
    let m = random_model(5, &[7, 6], 11);
    let (x, y) = random_batch(12, 5, 12);
    let raws: Vec<_> = x.iter_rows().map(|r| m.forward(r).unwrap()).collect();
    let (nll, _) = loss_and_gradients(&m, &x, &y, None).unwrap();
    assert!((nll - mean_nll(&y, &raws).unwrap()).abs() < 1e-13);
}

fn param_mut(m: &mut MlpModel, layer: usize, which: usize, i: usize) -> &mut f64 {
    if which == 0 {
        &mut m.layers[layer].weights[i]
    } else {
        &mut m.layers[layer].bias[i]
    }
}

/// Largest relative error between backprop and central differences over
/// every weight and bias.
fn max_gradient_error(m: &MlpModel, x: &Matrix, y: &[f64], seed: Option<u64>) -> f64 {
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let (_, grads) = loss_and_gradients(m, x, y, rng.as_mut().map(|r| r as &mut dyn RngCore)).unwrap();
    let loss_at = |model: &MlpModel| {
        let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
        loss_and_gradients(model, x, y, rng.as_mut().map(|r| r as &mut dyn RngCore)).unwrap().0
    };
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for li in 0..m.layers.len() {
        for which in 0..2 {
            let n = if which == 0 { m.layers[li].weights.len() } else { m.layers[li].bias.len() };
            for i in 0..n {
                let mut probe = m.clone();
                let base = *param_mut(&mut probe, li, which, i);
                *param_mut(&mut probe, li, which, i) = base + h;
                let up = loss_at(&probe);
                *param_mut(&mut probe, li, which, i) = base - h;
                let down = loss_at(&probe);
                let numeric = (up - down) / (2.0 * h);
                let analytic =
                    if which == 0 { grads.layers[li].weights[i] } else { grads.layers[li].bias[i] };
                worst = worst.max(relative_error(analytic, numeric, 1e-6));
            }
        }
    }
    worst
}

#[test]
fn backprop_matches_finite_differences_small_net() {
    let m = random_model(6, &[8], 21);
    let (x, y) = random_batch(16, 6, 22);
    let err = max_gradient_error(&m, &x, &y, None);
    assert!(err <= 1e-4, "max relative error {err}");
}

#[test]
fn backprop_is_exact_under_a_sampled_dropout_mask() {
    let mut m = random_model(5, &[12, 9], 31);
    m.dropout_rate = 0.08;
    let (x, y) = random_batch(10, 5, 32);
    let err = max_gradient_error(&m, &x, &y, Some(77));
    assert!(err <= 1e-4, "max relative error {err}");
}

#[test]
fn duplicated_batch_gives_same_loss_and_gradients() {
    let m = random_model(4, &[6, 5], 41);
    let (x, y) = random_batch(9, 4, 42);
    let (nll, g) = loss_and_gradients(&m, &x, &y, None).unwrap();
    let idx: Vec<usize> = (0..9).chain(0..9).collect();
    let x2 = x.select_rows(&idx);
    let y2: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let (nll2, g2) = loss_and_gradients(&m, &x2, &y2, None).unwrap();
    assert!((nll - nll2).abs() < 1e-13);
    for (a, b) in g.tensors().iter().zip(g2.tensors()) {
        for (u, v) in a.iter().zip(b) {
            assert!((u - v).abs() < 1e-13);
        }
    }
}

#[test]
fn input_gradient_matches_finite_differences() {
    let m = random_model(5, &[9, 7], 51);
    let x = [0.3, -1.2, 0.8, 2.0, -0.4];
    let d_out = [0.7, -1.3, 0.4];
    let (_, g) = m.input_gradient(&x, d_out).unwrap();
    for j in 0..5 {
        let numeric = zigcast_testkit::central_difference(
            |v| {
                let r = m.forward(v).unwrap().as_array();
                r.iter().zip(d_out).map(|(a, b)| a * b).sum()
            },
            &x,
            j,
            1e-5,
        );
        assert!(relative_error(g[j], numeric, 1e-6) < 1e-6);
    }
}

#[test]
fn full_batch_adam_decreases_loss() {
    for seed in 0..10 {
        let mut m = random_model(6, &HIDDEN_WIDTHS, 100 + seed);
        let (x, y) = random_batch(64, 6, 200 + seed);
        let sizes: Vec<usize> = m.tensors_mut().iter().map(|t| t.len()).collect();
        let mut adam = crate::nn::AdamState::new(&sizes, 0.9, 0.999, 1e-8);
        let mut prev = f64::INFINITY;
        let mut decreases = 0;
        for _ in 0..50 {
            let (loss, g) = loss_and_gradients(&m, &x, &y, None).unwrap();
            if loss <= prev {
                decreases += 1;
            }
            prev = loss;
            adam.step(&mut m.tensors_mut(), &g.tensors(), 1e-3);
        }
        let (last, _) = loss_and_gradients(&m, &x, &y, None).unwrap();
        if last <= prev {
            decreases += 1;
        }
        // 51 comparisons including the trivial first one against infinity
        assert!(decreases - 1 >= 48, "seed {seed}: only {} of 50 steps decreased", decreases - 1);
    }
}
