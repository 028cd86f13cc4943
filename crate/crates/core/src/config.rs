//! Experiment configuration: a versioned TOML document naming the experiment,
//! the dataset roots, and every pipeline, augmentation and model setting.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::augment::{AugmentParams, AugmentTarget};
use crate::dataset::{PolymerType, SynonymTable};
use crate::error::{Error, Result};
use crate::models::{ForestParams, ModelConfig, SplitCriterion};
use crate::preprocess::{PipelineConfig, Transform};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Scaling × rate-of-change ablation, no augmentation.
    Ablation,
    BinSweep,
    NoiseSweep,
    /// Final recipe evaluated on the test library; saves the model.
    Final,
    /// One run of exactly the configured pipeline and model; saves the model.
    Custom,
    /// The configured pipeline under each model in `comparison`.
    ModelComparison,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Ablation => "ablation",
            ExperimentKind::BinSweep => "bin-sweep",
            ExperimentKind::NoiseSweep => "noise-sweep",
            ExperimentKind::Final => "final",
            ExperimentKind::Custom => "custom",
            ExperimentKind::ModelComparison => "model-comparison",
        }
    }
}

/// Library roots. Relative paths resolve against the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub slopp: PathBuf,
    pub sloppe: PathBuf,
    pub mendeley: PathBuf,
    /// Extra raw-label mappings; the value is a canonical polymer name or `"rejected"`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub synonyms: BTreeMap<String, String>,
}

impl DataConfig {
    pub fn synonym_table(&self) -> Result<SynonymTable> {
        let mut table = SynonymTable::default();
        for (raw, target) in &self.synonyms {
            let mapped = if target.trim().eq_ignore_ascii_case("rejected") {
                None
            } else {
                Some(target.parse::<PolymerType>().map_err(|e| {
                    Error::config(format!("data.synonyms.{raw}"), e.to_string())
                })?)
            };
            table.insert(raw, mapped);
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentConfig {
    #[serde(flatten)]
    pub params: AugmentParams,
    /// Empty means no augmentation.
    #[serde(default)]
    pub targets: Vec<AugmentTarget>,
}

fn default_widths() -> Vec<usize> {
    (2..=50).collect()
}
fn default_amplitudes() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 2.0, 5.0, 10.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_widths")]
    pub widths: Vec<usize>,
    #[serde(default = "default_amplitudes")]
    pub amplitudes: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            widths: default_widths(),
            amplitudes: default_amplitudes(),
        }
    }
}

fn default_comparison() -> Vec<ModelConfig> {
    vec![
        ModelConfig::DecisionTree {
            criterion: SplitCriterion::Entropy,
            max_depth: None,
        },
        ModelConfig::Knn { k: 3 },
    ]
}

fn default_seeds() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub version: u32,
    pub experiment: ExperimentKind,
    /// Base seed; required so no run depends on ambient entropy.
    pub seed: u64,
    /// Ensemble size: runs use seeds `seed, seed + 1, …`.
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub data: DataConfig,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default)]
    pub augment: AugmentConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default = "default_comparison")]
    pub comparison: Vec<ModelConfig>,
}

const TOP_LEVEL_KEYS: &[&str] = &[
    "version",
    "experiment",
    "seed",
    "seeds",
    "output_dir",
    "data",
    "pipeline",
    "augment",
    "model",
    "sweep",
    "comparison",
];

fn section<T: DeserializeOwned>(table: &toml::Table, key: &str) -> Result<Option<T>> {
    table
        .get(key)
        .map(|v| {
            v.clone()
                .try_into::<T>()
                .map_err(|e| Error::config(key, e.message().trim().to_string()))
        })
        .transpose()
}

fn required<T: DeserializeOwned>(table: &toml::Table, key: &str) -> Result<T> {
    section(table, key)?.ok_or_else(|| Error::config(key, "missing required field"))
}

impl ExperimentConfig {
    /// Parse and validate. Errors name the offending top-level field.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<document>", e.message().trim().to_string()))?;
        if let Some(unknown) = table.keys().find(|k| !TOP_LEVEL_KEYS.contains(&k.as_str())) {
            return Err(Error::config(unknown.clone(), "unknown field"));
        }
        let cfg = ExperimentConfig {
            version: required(&table, "version")?,
            experiment: required(&table, "experiment")?,
            seed: required(&table, "seed")?,
            seeds: section(&table, "seeds")?.unwrap_or_else(default_seeds),
            output_dir: section(&table, "output_dir")?,
            data: required(&table, "data")?,
            pipeline: section(&table, "pipeline")?.unwrap_or_default(),
            augment: section(&table, "augment")?.unwrap_or_default(),
            model: section(&table, "model")?.unwrap_or_default(),
            sweep: section(&table, "sweep")?.unwrap_or_default(),
            comparison: section(&table, "comparison")?.unwrap_or_else(default_comparison),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a config file and resolve relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.data.slopp);
        fix(&mut self.data.sloppe);
        fix(&mut self.data.mendeley);
        if let Some(out) = self.output_dir.as_mut() {
            fix(out);
        }
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::config(
                "version",
                format!("unsupported version {} (expected {CONFIG_VERSION})", self.version),
            ));
        }
        if self.seeds < 1 {
            return Err(Error::config("seeds", "must be at least 1"));
        }
        self.pipeline.validate()?;
        self.augment.params.validate()?;
        if self.augment.targets.iter().any(|t| t.min_examples < 1) {
            return Err(Error::config("augment.targets", "min_examples must be at least 1"));
        }
        if self.sweep.widths.is_empty() || self.sweep.widths.contains(&0) {
            return Err(Error::config("sweep.widths", "must be a non-empty list of positive widths"));
        }
        if self.sweep.amplitudes.is_empty()
            || self.sweep.amplitudes.iter().any(|a| !(*a >= 0.0) || !a.is_finite())
        {
            return Err(Error::config(
                "sweep.amplitudes",
                "must be a non-empty list of finite, non-negative amplitudes",
            ));
        }
        if self.experiment == ExperimentKind::ModelComparison && self.comparison.is_empty() {
            return Err(Error::config("comparison", "needs at least one model"));
        }
        Ok(())
    }

    /// Seeds of the ensemble, `seed .. seed + seeds`.
    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|i| self.seed.wrapping_add(i)).collect()
    }
}

/// Augmentation applied to every small class in the bin-width sweeps.
pub fn fifteen_sample_recipe() -> Vec<AugmentTarget> {
    use PolymerType::*;
    [CelluloseAcetate, Polyamide, PolymethylMethacrylate, Polyurethane]
        .into_iter()
        .map(|p| AugmentTarget::new(p, 15))
        .collect()
}

/// Augmentation of the final model.
pub fn final_recipe() -> Vec<AugmentTarget> {
    use PolymerType::*;
    vec![
        AugmentTarget::new(CelluloseAcetate, 30),
        AugmentTarget::new(Polyamide, 30),
        AugmentTarget::new(Polyurethane, 30),
        AugmentTarget::new(Polyester, 40),
        AugmentTarget::new(PolymethylMethacrylate, 10),
        AugmentTarget::new(Polystyrene, 20),
    ]
}

/// Names of the bundled experiment presets.
pub const PRESETS: &[&str] = &[
    "ablation",
    "bins-unaugmented",
    "bins-augmented-entropy",
    "bins-augmented-gini",
    "noise",
    "final",
    "model-comparison",
];

/// Bundled experiment definitions, identical to the files under `configs/`.
pub fn preset(name: &str, data: DataConfig, seed: u64, seeds: usize) -> Result<ExperimentConfig> {
    let forest = |criterion| {
        ModelConfig::RandomForest(ForestParams {
            criterion,
            ..Default::default()
        })
    };
    let base = ExperimentConfig {
        version: CONFIG_VERSION,
        experiment: ExperimentKind::Final,
        seed,
        seeds,
        output_dir: None,
        data,
        pipeline: PipelineConfig::default(),
        augment: AugmentConfig::default(),
        model: forest(SplitCriterion::Entropy),
        sweep: SweepConfig::default(),
        comparison: default_comparison(),
    };
    let with_recipe = |targets| AugmentConfig {
        params: AugmentParams::default(),
        targets,
    };
    let cfg = match name {
        "ablation" => ExperimentConfig {
            experiment: ExperimentKind::Ablation,
            pipeline: PipelineConfig {
                bin_width: 1,
                transform: Transform::Roc,
                ..Default::default()
            },
            ..base
        },
        "bins-unaugmented" => ExperimentConfig {
            experiment: ExperimentKind::BinSweep,
            ..base
        },
        "bins-augmented-entropy" => ExperimentConfig {
            experiment: ExperimentKind::BinSweep,
            augment: with_recipe(fifteen_sample_recipe()),
            ..base
        },
        "bins-augmented-gini" => ExperimentConfig {
            experiment: ExperimentKind::BinSweep,
            augment: with_recipe(fifteen_sample_recipe()),
            model: forest(SplitCriterion::Gini),
            ..base
        },
        "noise" => ExperimentConfig {
            experiment: ExperimentKind::NoiseSweep,
            augment: with_recipe(final_recipe()),
            ..base
        },
        "final" => ExperimentConfig {
            experiment: ExperimentKind::Final,
            augment: with_recipe(final_recipe()),
            ..base
        },
        "model-comparison" => ExperimentConfig {
            experiment: ExperimentKind::ModelComparison,
            augment: with_recipe(final_recipe()),
            ..base
        },
        other => {
            return Err(Error::config(
                "experiment",
                format!("unknown preset `{other}` (known: {})", PRESETS.join(", ")),
            ))
        }
    };
    Ok(cfg)
}
