//! Versioned JSON model documents.

use serde::{Deserialize, Serialize};

use super::model::{Activation, Dense, MlpModel};
use super::scaler::Scaler;
use crate::error::{Error, Result};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    schema_version: u32,
    activation: Activation,
    dropout_rate: f64,
    layer_dims: Vec<usize>,
    layers: Vec<LayerDocument>,
    scaler: Scaler,
    feature_schema_hash: Option<String>,
    feature_names: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerDocument {
    /// One row per output unit.
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

pub fn save_model(model: &MlpModel) -> Result<String> {
    let doc = ModelDocument {
        schema_version: MODEL_SCHEMA_VERSION,
        activation: model.activation(),
        dropout_rate: model.dropout_rate(),
        layer_dims: model.layer_dims(),
        layers: model
            .layers()
            .iter()
            .map(|l| LayerDocument {
                weights: l.weights.chunks_exact(l.inputs).map(<[f64]>::to_vec).collect(),
                bias: l.bias.clone(),
            })
            .collect(),
        scaler: model.scaler().clone(),
        feature_schema_hash: model.feature_schema_hash().map(str::to_owned),
        feature_names: model.feature_names().to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

fn doc_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::ModelDocument { path: path.into(), message: message.into() }
}

pub fn load_model(text: &str) -> Result<MlpModel> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == MODEL_SCHEMA_VERSION as u64 => {}
        Some(v) => {
            return Err(doc_error(
                "schema_version",
                format!("unsupported version {v}, expected {MODEL_SCHEMA_VERSION}"),
            ))
        }
        None => return Err(doc_error("schema_version", "missing or not an integer")),
    }
    let doc: ModelDocument = serde_json::from_value(value).map_err(|e| doc_error("$", e.to_string()))?;

    let dims = &doc.layer_dims;
    if dims.len() != doc.layers.len() + 1 {
        return Err(doc_error(
            "layer_dims",
            format!("{} dims cannot describe {} layers", dims.len(), doc.layers.len()),
        ));
    }
    let mut layers = Vec::with_capacity(doc.layers.len());
    for (i, layer) in doc.layers.into_iter().enumerate() {
        let (inputs, outputs) = (dims[i], dims[i + 1]);
        if layer.weights.len() != outputs {
            return Err(doc_error(
                format!("layers[{i}].weights"),
                format!("expected {outputs} rows, found {}", layer.weights.len()),
            ));
        }
        if let Some((r, row)) = layer.weights.iter().enumerate().find(|(_, row)| row.len() != inputs) {
            return Err(doc_error(
                format!("layers[{i}].weights[{r}]"),
                format!("expected {inputs} columns, found {}", row.len()),
            ));
        }
        if layer.bias.len() != outputs {
            return Err(doc_error(
                format!("layers[{i}].bias"),
                format!("expected {outputs} entries, found {}", layer.bias.len()),
            ));
        }
        layers.push(Dense { inputs, outputs, weights: layer.weights.concat(), bias: layer.bias });
    }
    let width = dims[0];
    for (name, len) in [
        ("scaler.mean", doc.scaler.mean.len()),
        ("scaler.std", doc.scaler.std.len()),
        ("scaler.constant", doc.scaler.constant.len()),
    ] {
        if len != width {
            return Err(doc_error(name, format!("expected {width} entries, found {len}")));
        }
    }
    if !doc.feature_names.is_empty() && doc.feature_names.len() != width {
        return Err(doc_error(
            "feature_names",
            format!("expected {width} names, found {}", doc.feature_names.len()),
        ));
    }
    let mut model = MlpModel::from_layers(layers, doc.activation, doc.dropout_rate, doc.scaler)
        .map_err(|e| doc_error("$", e.to_string()))?;
    model.feature_names = doc.feature_names;
    model.feature_schema_hash = doc.feature_schema_hash;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn toy_model() -> MlpModel {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let scaler = Scaler { mean: vec![1.5, -2.0, 0.1], std: vec![0.3, 1.0, 7.25], constant: vec![false, true, false] };
        MlpModel::initialize(3, &[5, 4], 0.04, scaler, &mut rng)
            .unwrap()
            .with_feature_schema(vec!["a".into(), "b".into(), "c".into()], "abc123".into())
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let text = save_model(&toy_model()).unwrap();
        let again = save_model(&load_model(&text).unwrap()).unwrap();
        assert_eq!(text, again);
        assert_eq!(load_model(&text).unwrap(), toy_model());
    }

    #[test]
    fn round_trip_preserves_forward_outputs() {
        let model = toy_model();
        let loaded = load_model(&save_model(&model).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            assert_eq!(model.predict_raw(&x).unwrap(), loaded.predict_raw(&x).unwrap());
        }
    }

    #[test]
    fn shape_mismatch_names_the_layer() {
        let text = save_model(&toy_model()).unwrap();
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["layers"][1]["weights"][2].as_array_mut().unwrap().pop();
        let err = load_model(&value.to_string()).unwrap_err();
        match err {
            Error::ModelDocument { path, .. } => assert_eq!(path, "layers[1].weights[2]"),
            other => panic!("unexpected error {other}"),
        }
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["layers"][0]["bias"].as_array_mut().unwrap().push(0.0.into());
        let err = load_model(&value.to_string()).unwrap_err().to_string();
        assert!(err.contains("layers[0].bias"), "{err}");
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let text = save_model(&toy_model()).unwrap();
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["schema_version"] = 99.into();
        let err = load_model(&value.to_string()).unwrap_err();
        assert!(matches!(err, Error::ModelDocument { ref path, .. } if path == "schema_version"));
    }

    #[test]
    fn scaler_length_mismatch_is_rejected() {
        let text = save_model(&toy_model()).unwrap();
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["scaler"]["std"].as_array_mut().unwrap().pop();
        let err = load_model(&value.to_string()).unwrap_err().to_string();
        assert!(err.contains("scaler.std"), "{err}");
    }
}
