use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::scaler::Scaler;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::zig::{nll_with_gradient, RawParamTriple};

/// Hidden layer widths of the forecasting network.
pub const HIDDEN_WIDTHS: [usize; 4] = [20, 25, 30, 25];
/// The network emits one unconstrained value per ZIG parameter.
pub const OUTPUT_WIDTH: usize = 3;
/// Upper end of the dropout search range.
pub const MAX_DROPOUT: f64 = 0.08;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
        }
    }

    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Fully connected layer; `weights` is `outputs x inputs`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self { inputs, outputs, weights: vec![0.0; inputs * outputs], bias: vec![0.0; outputs] }
    }

    /// Glorot-uniform weights, zero bias.
    pub fn glorot<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let bound = (6.0 / (inputs + outputs) as f64).sqrt();
        let weights = (0..inputs * outputs).map(|_| rng.random_range(-bound..=bound)).collect();
        Self { inputs, outputs, weights, bias: vec![0.0; outputs] }
    }

    fn affine(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for (row, &b) in self.weights.chunks_exact(self.inputs).zip(&self.bias) {
            out.push(row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b);
        }
    }
}

/// Gradient buffers with the same shapes as the model's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Dense>,
}

impl Gradients {
    pub fn zeros_like(model: &MlpModel) -> Self {
        Self { layers: model.layers.iter().map(|l| Dense::zeros(l.inputs, l.outputs)).collect() }
    }

    /// Weight and bias buffers in the order used by [`MlpModel::tensors_mut`].
    pub fn tensors(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()]).collect()
    }

    fn scale(&mut self, factor: f64) {
        for l in &mut self.layers {
            l.weights.iter_mut().chain(l.bias.iter_mut()).for_each(|g| *g *= factor);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|g| g.is_finite()))
    }
}

/// Per-layer values kept from the forward pass for backpropagation.
struct ForwardCache {
    /// Input to each layer (post-activation, post-dropout of the previous one).
    inputs: Vec<Vec<f64>>,
    /// Pre-activations of each hidden layer.
    pre_activations: Vec<Vec<f64>>,
    /// Inverted-dropout multipliers (0 or 1/(1-rate)) per hidden layer, if sampled.
    masks: Vec<Option<Vec<f64>>>,
    output: [f64; 3],
}

/// Multilayer perceptron mapping standardized features to a raw ZIG triple.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub(crate) layers: Vec<Dense>,
    pub(crate) activation: Activation,
    pub(crate) dropout_rate: f64,
    pub(crate) scaler: Scaler,
    pub(crate) feature_names: Vec<String>,
    pub(crate) feature_schema_hash: Option<String>,
}

impl MlpModel {
    /// Network with Glorot-initialized weights for the given hidden widths.
    pub fn initialize<R: Rng + ?Sized>(
        input_width: usize,
        hidden: &[usize],
        dropout_rate: f64,
        scaler: Scaler,
        rng: &mut R,
    ) -> Result<Self> {
        let dims = layer_dims(input_width, hidden);
        let layers = dims.windows(2).map(|w| Dense::glorot(w[0], w[1], rng)).collect();
        Self::from_layers(layers, Activation::Relu, dropout_rate, scaler)
    }

    /// Network with every weight and bias set to zero.
    pub fn zeros(input_width: usize, hidden: &[usize]) -> Self {
        let dims = layer_dims(input_width, hidden);
        let layers = dims.windows(2).map(|w| Dense::zeros(w[0], w[1])).collect();
        Self::from_layers(layers, Activation::Relu, 0.0, Scaler::identity(input_width))
            .expect("zero network is well formed")
    }

    pub fn from_layers(
        layers: Vec<Dense>,
        activation: Activation,
        dropout_rate: f64,
        scaler: Scaler,
    ) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("network needs at least one layer"));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.weights.len() != l.inputs * l.outputs || l.bias.len() != l.outputs {
                return Err(Error::invalid(format!("layer {i} buffers do not match {}x{}", l.outputs, l.inputs)));
            }
            if i > 0 && layers[i - 1].outputs != l.inputs {
                return Err(Error::invalid(format!(
                    "layer {i} expects {} inputs but layer {} emits {}",
                    l.inputs,
                    i - 1,
                    layers[i - 1].outputs
                )));
            }
        }
        if layers.last().map(|l| l.outputs) != Some(OUTPUT_WIDTH) {
            return Err(Error::invalid("output layer must have width 3"));
        }
        if !(0.0..=MAX_DROPOUT).contains(&dropout_rate) {
            return Err(Error::invalid(format!("dropout rate {dropout_rate} outside [0, {MAX_DROPOUT}]")));
        }
        if scaler.width() != layers[0].inputs {
            return Err(Error::invalid("scaler width differs from input width"));
        }
        if scaler.std.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::invalid("scaler standard deviations must be positive"));
        }
        Ok(Self { layers, activation, dropout_rate, scaler, feature_names: Vec::new(), feature_schema_hash: None })
    }

    /// Attach the feature schema the model was trained against.
    pub fn with_feature_schema(mut self, names: Vec<String>, hash: String) -> Self {
        self.feature_names = names;
        self.feature_schema_hash = Some(hash);
        self
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].inputs).chain(self.layers.iter().map(|l| l.outputs)).collect()
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn dropout_rate(&self) -> f64 {
        self.dropout_rate
    }

    pub fn scaler(&self) -> &Scaler {
        &self.scaler
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_schema_hash(&self) -> Option<&str> {
        self.feature_schema_hash.as_deref()
    }

    /// Weight and bias buffers, layer by layer.
    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()])
            .collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    fn check_width(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_width() {
            return Err(Error::invalid(format!(
                "feature vector has {} entries, network expects {}",
                x.len(),
                self.input_width()
            )));
        }
        Ok(())
    }

    /// Inference pass on a standardized feature vector (no dropout).
    pub fn forward(&self, x: &[f64]) -> Result<RawParamTriple> {
        self.check_width(x)?;
        Ok(RawParamTriple::from(self.run(x, None).output))
    }

    /// Training pass: inverted dropout after every hidden layer, masks drawn
    /// from `rng`.
    pub fn forward_train(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<RawParamTriple> {
        self.check_width(x)?;
        Ok(RawParamTriple::from(self.run(x, Some(rng)).output))
    }

    /// Inference on an unscaled feature vector.
    pub fn predict_raw(&self, features: &[f64]) -> Result<RawParamTriple> {
        self.check_width(features)?;
        self.forward(&self.scaler.apply(features))
    }

    fn run(&self, x: &[f64], mut rng: Option<&mut dyn RngCore>) -> ForwardCache {
        let hidden = self.layers.len() - 1;
        let mut cache = ForwardCache {
            inputs: Vec::with_capacity(self.layers.len()),
            pre_activations: Vec::with_capacity(hidden),
            masks: Vec::with_capacity(hidden),
            output: [0.0; 3],
        };
        let mut current = x.to_vec();
        let keep = 1.0 - self.dropout_rate;
        for layer in &self.layers[..hidden] {
            let mut z = Vec::with_capacity(layer.outputs);
            layer.affine(&current, &mut z);
            let mut a: Vec<f64> = z.iter().map(|&v| self.activation.apply(v)).collect();
            let mask = match rng.as_deref_mut() {
                Some(r) if self.dropout_rate > 0.0 => {
                    let m: Vec<f64> =
                        (0..a.len()).map(|_| if r.random::<f64>() < keep { 1.0 / keep } else { 0.0 }).collect();
                    a.iter_mut().zip(&m).for_each(|(v, s)| *v *= s);
                    Some(m)
                }
                _ => None,
            };
            cache.inputs.push(std::mem::replace(&mut current, a));
            cache.pre_activations.push(z);
            cache.masks.push(mask);
        }
        let last = &self.layers[hidden];
        let mut out = Vec::with_capacity(OUTPUT_WIDTH);
        last.affine(&current, &mut out);
        cache.inputs.push(current);
        cache.output = [out[0], out[1], out[2]];
        cache
    }

    /// Reverse pass from d(loss)/d(output). Accumulates parameter gradients
    /// into `grads` when given and returns d(loss)/d(input).
    fn backward(&self, cache: &ForwardCache, d_output: [f64; 3], mut grads: Option<&mut Gradients>) -> Vec<f64> {
        let mut delta = d_output.to_vec();
        for li in (0..self.layers.len()).rev() {
            let layer = &self.layers[li];
            let input = &cache.inputs[li];
            if let Some(g) = grads.as_deref_mut() {
                let gl = &mut g.layers[li];
                for (o, &d) in delta.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    gl.bias[o] += d;
                    let row = &mut gl.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    row.iter_mut().zip(input).for_each(|(w, &v)| *w += d * v);
                }
            }
            let mut d_input = vec![0.0; layer.inputs];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                d_input.iter_mut().zip(row).for_each(|(di, &w)| *di += d * w);
            }
            if li > 0 {
                let h = li - 1;
                if let Some(mask) = &cache.masks[h] {
                    d_input.iter_mut().zip(mask).for_each(|(d, m)| *d *= m);
                }
                d_input
                    .iter_mut()
                    .zip(&cache.pre_activations[h])
                    .for_each(|(d, &z)| *d *= self.activation.derivative(z));
            }
            delta = d_input;
        }
        delta
    }

    /// Gradient of a scalar function of the raw output with respect to the
    /// standardized input, through the inference path.
    pub fn input_gradient(&self, x: &[f64], d_output: [f64; 3]) -> Result<(RawParamTriple, Vec<f64>)> {
        self.check_width(x)?;
        let cache = self.run(x, None);
        let g = self.backward(&cache, d_output, None);
        Ok((RawParamTriple::from(cache.output), g))
    }
}

fn layer_dims(input_width: usize, hidden: &[usize]) -> Vec<usize> {
    std::iter::once(input_width).chain(hidden.iter().copied()).chain(std::iter::once(OUTPUT_WIDTH)).collect()
}

/// Mean ZIG negative log-likelihood of a standardized batch and its exact
/// gradient with respect to every weight and bias. With `rng` set, dropout
/// masks are sampled as in training.
pub fn loss_and_gradients(
    model: &MlpModel,
    batch_x: &Matrix,
    batch_y: &[f64],
    mut rng: Option<&mut dyn RngCore>,
) -> Result<(f64, Gradients)> {
    if batch_y.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    if batch_x.rows() != batch_y.len() {
        return Err(Error::invalid(format!(
            "batch has {} feature rows but {} targets",
            batch_x.rows(),
            batch_y.len()
        )));
    }
    if batch_x.cols() != model.input_width() {
        return Err(Error::invalid(format!(
            "batch width {} differs from network input width {}",
            batch_x.cols(),
            model.input_width()
        )));
    }
    let mut grads = Gradients::zeros_like(model);
    let mut total = 0.0;
    for (x, &y) in batch_x.iter_rows().zip(batch_y) {
        if !(y >= 0.0) {
            return Err(Error::domain(format!("target must be nonnegative, got {y}")));
        }
        let cache = model.run(x, rng.as_mut().map(|r| &mut **r as &mut dyn RngCore));
        let (nll, d_raw) = nll_with_gradient(y, &RawParamTriple::from(cache.output));
        total += nll;
        model.backward(&cache, d_raw, Some(&mut grads));
    }
    let n = batch_y.len() as f64;
    grads.scale(1.0 / n);
    Ok((total / n, grads))
}

#[cfg(test)]
mod tests;
