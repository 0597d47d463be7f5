use std::path::Path;

use serde::{Deserialize, Serialize};

use super::svr::{Hyperparams, Standardizer, SvrModel};
use super::RegressionError;

pub const MODEL_FORMAT: &str = "greed-svr";
pub const MODEL_VERSION: u32 = 1;

/// A trained model together with the feature configuration it was trained
/// on.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub fingerprint: String,
    pub model: SvrModel,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    format: String,
    version: u32,
    fingerprint: String,
    hyperparams: Hyperparams,
    kernel_gamma: f64,
    bias: f64,
    feature_shift: Vec<f64>,
    feature_scale: Vec<f64>,
    dual_coeffs: Vec<f64>,
    support_vectors: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct Header {
    format: Option<String>,
    version: Option<u32>,
}

impl ModelFile {
    pub fn to_json(&self) -> String {
        let m = &self.model;
        let wire = Wire {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            fingerprint: self.fingerprint.clone(),
            hyperparams: m.hyperparams,
            kernel_gamma: m.kernel_gamma(),
            bias: m.bias,
            feature_shift: m.standardizer.shift.clone(),
            feature_scale: m.standardizer.scale.clone(),
            dual_coeffs: m.dual_coeffs.clone(),
            support_vectors: m.support_vectors.clone(),
        };
        let mut s = serde_json::to_string_pretty(&wire).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, RegressionError> {
        let parse_err = |e: serde_json::Error| RegressionError::Parse(e.to_string());
        let header: Header = serde_json::from_str(text).map_err(parse_err)?;
        if header.format.as_deref() != Some(MODEL_FORMAT) {
            return Err(RegressionError::Corrupt(format!("format (expected \"{MODEL_FORMAT}\")")));
        }
        match header.version {
            Some(MODEL_VERSION) => {}
            Some(found) => return Err(RegressionError::Version { found, expected: MODEL_VERSION }),
            None => return Err(RegressionError::Corrupt("version".into())),
        }
        let w: Wire = serde_json::from_str(text).map_err(parse_err)?;
        if w.kernel_gamma != w.hyperparams.gamma {
            return Err(RegressionError::Corrupt("kernel_gamma".into()));
        }
        if w.feature_shift.len() != w.feature_scale.len() {
            return Err(RegressionError::Corrupt("feature_shift".into()));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !w.bias.is_finite() || !finite(&w.feature_shift) || !finite(&w.dual_coeffs) || !w.support_vectors.iter().all(|v| finite(v)) {
            return Err(RegressionError::Corrupt("non-finite value".into()));
        }
        let model = SvrModel {
            support_vectors: w.support_vectors,
            dual_coeffs: w.dual_coeffs,
            bias: w.bias,
            hyperparams: w.hyperparams,
            standardizer: Standardizer { shift: w.feature_shift, scale: w.feature_scale },
        };
        model.check_invariants()?;
        Ok(ModelFile { fingerprint: w.fingerprint, model })
    }
}

pub fn save_model(path: impl AsRef<Path>, file: &ModelFile) -> Result<(), RegressionError> {
    let path = path.as_ref();
    std::fs::write(path, file.to_json()).map_err(|source| RegressionError::Io { path: path.to_path_buf(), source })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile, RegressionError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| RegressionError::Io { path: path.to_path_buf(), source })?;
    ModelFile::from_json(&text)
}
