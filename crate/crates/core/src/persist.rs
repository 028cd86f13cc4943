//! Saved-model file: JSON document carrying a format version, the feature
//! pipeline the model was trained with, the class vocabulary, and the model.
//!
//! ```json
//! { "format_version": 1,
//!   "pipeline": { "scale_x": true, "min_range": 0, ... },
//!   "classes": ["acrylic", ...],
//!   "model": { "kind": "random-forest", "trees": [...], ... } }
//! ```
//!
//! Class `i` of the model is `classes[i]`. Floats are written with
//! round-trip precision, so a reloaded model predicts identically.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{PolymerType, Spectrum};
use crate::error::{Error, Result};
use crate::models::Model;
use crate::preprocess::PipelineConfig;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub format_version: u32,
    /// Applied to spectra before prediction; noise is never applied here.
    pub pipeline: PipelineConfig,
    pub classes: Vec<PolymerType>,
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub polymer: PolymerType,
    /// Vote fraction per class, in class order.
    pub votes: Vec<(PolymerType, f64)>,
}

impl SavedModel {
    pub fn new(pipeline: PipelineConfig, model: Model) -> Self {
        SavedModel {
            format_version: MODEL_FORMAT_VERSION,
            pipeline: PipelineConfig {
                noise: false,
                ..pipeline
            },
            classes: PolymerType::ALL.to_vec(),
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))?;
        let found = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::Serde("model file has no format_version".into()))?;
        if found != u64::from(MODEL_FORMAT_VERSION) {
            return Err(Error::ModelVersion {
                found: found.try_into().unwrap_or(u32::MAX),
                expected: MODEL_FORMAT_VERSION,
            });
        }
        let saved: SavedModel =
            serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))?;
        if saved.classes.len() != saved.model.n_classes() {
            return Err(Error::Serde(format!(
                "model has {} classes but the file lists {}",
                saved.model.n_classes(),
                saved.classes.len()
            )));
        }
        match &saved.model {
            Model::RandomForest(f) => f.validate()?,
            Model::DecisionTree(t) => t.validate()?,
            Model::Knn(_) => {}
        }
        Ok(saved)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        serde_json::to_writer(&mut w, self).map_err(|e| Error::Serde(e.to_string()))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut text = String::new();
        std::io::Read::read_to_string(&mut BufReader::new(f), &mut text)
            .map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Run the stored pipeline on `spectrum` and classify it.
    pub fn predict_spectrum(&self, spectrum: &Spectrum) -> Result<Prediction> {
        let expected = self.model.n_features();
        let features = self.pipeline.featurize(spectrum, 0).map_err(|e| match e {
            Error::InvalidInput(msg) if !self.pipeline.scale_x => Error::invalid(format!(
                "spectrum does not fit the model's unscaled pipeline: {msg}"
            )),
            other => other,
        })?;
        if features.len() != expected {
            return Err(Error::WidthMismatch {
                expected,
                found: features.len(),
            });
        }
        let class = self.model.predict(&features)?;
        let votes = self.model.vote_distribution(&features)?;
        Ok(Prediction {
            polymer: self.classes[class],
            votes: self.classes.iter().copied().zip(votes).collect(),
        })
    }
}
