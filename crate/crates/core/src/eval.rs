//! Metrics, confusion matrices and the experiment grid.
//!
//! Every experiment is a list of [`SweepPoint`]s. A point is one pipeline and
//! model setting evaluated once per ensemble seed. Runs are independent and
//! execute in parallel; each draws augmentation, noise and model randomness
//! from streams derived from its own seed, so results do not depend on
//! scheduling.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::generate_augmented;
use crate::config::{final_recipe, AugmentConfig, DataConfig, ExperimentConfig, ExperimentKind};
use crate::dataset::{assemble_train_test, load_library, LabeledDataset, LoadReport, PolymerType, Source};
use crate::error::{Error, Result};
use crate::models::{ForestParams, Model, ModelConfig, SplitCriterion};
use crate::persist::SavedModel;
use crate::preprocess::{build_features, scale_x, PipelineConfig, Transform};
use crate::seed::{derive_seed, stream};

/// Fraction of positions where `preds` equals `actual`.
pub fn accuracy<T: PartialEq>(preds: &[T], actual: &[T]) -> Result<f64> {
    if preds.len() != actual.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} labels",
            preds.len(),
            actual.len()
        )));
    }
    if preds.is_empty() {
        return Err(Error::invalid("accuracy of an empty prediction list"));
    }
    let hits = preds.iter().zip(actual).filter(|(p, a)| p == a).count();
    Ok(hits as f64 / preds.len() as f64)
}

/// Rows are actual classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<PolymerType>,
    pub counts: Vec<Vec<usize>>,
}

pub fn confusion(
    preds: &[PolymerType],
    actual: &[PolymerType],
    classes: &[PolymerType],
) -> Result<ConfusionMatrix> {
    if preds.len() != actual.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} labels",
            preds.len(),
            actual.len()
        )));
    }
    let position = |p: &PolymerType| {
        classes
            .iter()
            .position(|c| c == p)
            .ok_or_else(|| Error::invalid(format!("label `{p}` is not among the matrix classes")))
    };
    let mut counts = vec![vec![0; classes.len()]; classes.len()];
    for (p, a) in preds.iter().zip(actual) {
        counts[position(a)?][position(p)?] += 1;
    }
    Ok(ConfusionMatrix {
        classes: classes.to_vec(),
        counts,
    })
}

impl ConfusionMatrix {
    pub fn trace(&self) -> usize {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| self.trace() as f64 / total as f64)
    }

    /// Actual count of class `i`.
    pub fn support(&self, i: usize) -> usize {
        self.counts[i].iter().sum()
    }

    /// `None` when class `i` has no actual samples.
    pub fn recall(&self, i: usize) -> Option<f64> {
        let support = self.support(i);
        (support > 0).then(|| self.counts[i][i] as f64 / support as f64)
    }

    /// Labeled CSV: header `actual,<predicted classes…>`, one row per actual class.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::Serde(e.to_string());
        let mut header = vec!["actual".to_string()];
        header.extend(self.classes.iter().map(|c| c.name().to_string()));
        w.write_record(&header).map_err(err)?;
        for (class, row) in self.classes.iter().zip(&self.counts) {
            let mut record = vec![class.name().to_string()];
            record.extend(row.iter().map(usize::to_string));
            w.write_record(&record).map_err(err)?;
        }
        w.flush().map_err(|e| Error::Serde(e.to_string()))
    }
}

/// Assembled training and test libraries.
#[derive(Debug, Clone)]
pub struct ExperimentData {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
}

impl ExperimentData {
    pub fn new(train: LabeledDataset, test: LabeledDataset) -> Self {
        ExperimentData { train, test }
    }

    /// Load the three libraries and assemble train/test.
    pub fn load(data: &DataConfig) -> Result<(Self, Vec<LoadReport>)> {
        let synonyms = data.synonym_table()?;
        let (slopp, r1) = load_library(&data.slopp, Source::Slopp, &synonyms)?;
        let (mendeley, r2) = load_library(&data.mendeley, Source::Mendeley, &synonyms)?;
        let (sloppe, r3) = load_library(&data.sloppe, Source::SloppE, &synonyms)?;
        let (train, test) = assemble_train_test(&slopp, &mendeley, &sloppe)?;
        Ok((ExperimentData { train, test }, vec![r1, r2, r3]))
    }

    /// Classes of the confusion matrices: every training or test label.
    pub fn classes(&self) -> Vec<PolymerType> {
        let mut set: BTreeSet<PolymerType> = self.train.vocabulary();
        set.extend(self.test.vocabulary());
        set.into_iter().collect()
    }
}

/// One pipeline, augmentation and model setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub pipeline: PipelineConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augment: Option<AugmentConfig>,
    pub model: ModelConfig,
}

impl RunSpec {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        RunSpec {
            pipeline: cfg.pipeline.clone(),
            augment: (!cfg.augment.targets.is_empty()).then(|| cfg.augment.clone()),
            model: cfg.model.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRecall {
    pub polymer: PolymerType,
    pub support: usize,
    pub correct: usize,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Misclassified {
    pub id: String,
    pub actual: PolymerType,
    pub predicted: PolymerType,
}

/// Outcome of one trained and evaluated model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    /// Settings the run used; with `seed` they reproduce this report.
    pub spec: RunSpec,
    pub train_size: usize,
    pub test_size: usize,
    pub feature_width: usize,
    pub accuracy: f64,
    pub per_class: Vec<ClassRecall>,
    pub confusion: ConfusionMatrix,
    pub misclassified: Vec<Misclassified>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Seconds; kept out of the serialized report.
    #[serde(skip)]
    pub wall_time: f64,
}

/// Train on the (augmented) training set and evaluate on the test set.
///
/// Order: scale → augment (train only) → noise (train only) → shift →
/// transform → bin → fit → predict.
pub fn run_once(data: &ExperimentData, spec: &RunSpec, seed: u64, name: &str) -> Result<(ExperimentReport, Model)> {
    let started = Instant::now();
    let mut pipeline = spec.pipeline.clone();
    pipeline.validate()?;
    let mut notes = Vec::new();

    let mut train = if pipeline.scale_x {
        data.train.try_map_spectra(|s| {
            Ok(scale_x(&s.spectrum, pipeline.min_range, pipeline.max_range)?.to_spectrum())
        })?
    } else {
        if pipeline.raw_length.is_none() {
            let shortest = data
                .train
                .iter()
                .chain(data.test.iter())
                .map(|(_, s)| s.spectrum.len())
                .min()
                .ok_or_else(|| Error::Data("no spectra to evaluate".into()))?;
            pipeline.raw_length = Some(shortest);
            notes.push(format!(
                "unscaled spectra truncated to the shortest common length of {shortest} points"
            ));
        }
        data.train.clone()
    };
    if let Some(aug) = spec.augment.as_ref().filter(|a| !a.targets.is_empty()) {
        train = generate_augmented(&train, &aug.targets, &aug.params, derive_seed(seed, stream::AUGMENT))?;
    }

    let train_cfg = PipelineConfig {
        seed: derive_seed(seed, stream::NOISE),
        ..pipeline.clone()
    };
    let test_cfg = PipelineConfig {
        noise: false,
        ..pipeline.clone()
    };
    let train_x = build_features(&train, &train_cfg)?;
    let test_x = build_features(&data.test, &test_cfg)?;
    if train_x.is_empty() || test_x.is_empty() {
        return Err(Error::Data("training and test sets must both be non-empty".into()));
    }
    if train_x.width() != test_x.width() {
        return Err(Error::WidthMismatch {
            expected: train_x.width(),
            found: test_x.width(),
        });
    }

    let n_classes = PolymerType::ALL.len();
    let model = spec
        .model
        .fit(&train_x.rows, &train_x.class_indices(), n_classes, derive_seed(seed, stream::MODEL))?;
    let preds: Vec<PolymerType> = model
        .predict_all(&test_x.rows)?
        .into_iter()
        .map(|i| PolymerType::from_index(i).expect("model predicts known class indices"))
        .collect();

    let classes = data.classes();
    let matrix = confusion(&preds, &test_x.labels, &classes)?;
    let per_class = classes
        .iter()
        .enumerate()
        .filter_map(|(i, &polymer)| {
            matrix.recall(i).map(|recall| ClassRecall {
                polymer,
                support: matrix.support(i),
                correct: matrix.counts[i][i],
                recall,
            })
        })
        .collect();
    let misclassified = test_x
        .ids
        .iter()
        .zip(test_x.labels.iter().zip(&preds))
        .filter(|(_, (a, p))| a != p)
        .map(|(id, (&actual, &predicted))| Misclassified {
            id: id.clone(),
            actual,
            predicted,
        })
        .collect();

    let report = ExperimentReport {
        name: name.to_string(),
        seed,
        spec: RunSpec {
            pipeline,
            ..spec.clone()
        },
        train_size: train_x.len(),
        test_size: test_x.len(),
        feature_width: train_x.width(),
        accuracy: accuracy(&preds, &test_x.labels)?,
        per_class,
        confusion: matrix,
        misclassified,
        notes,
        wall_time: started.elapsed().as_secs_f64(),
    };
    Ok((report, model))
}

/// One setting evaluated over the seed ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Value of the swept parameter, e.g. `exp1`, `12`, `0.5`, `knn`.
    pub key: String,
    /// Explicit description of the baseline this point represents.
    pub description: String,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub min_accuracy: f64,
    pub max_accuracy: f64,
    /// Per-run reports in seed order.
    pub runs: Vec<ExperimentReport>,
}

impl SweepPoint {
    fn from_runs(key: String, description: String, runs: Vec<ExperimentReport>) -> Self {
        let accs: Vec<f64> = runs.iter().map(|r| r.accuracy).collect();
        let n = accs.len() as f64;
        let mean = accs.iter().sum::<f64>() / n;
        let var = if accs.len() > 1 {
            accs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        SweepPoint {
            key,
            description,
            mean_accuracy: mean,
            std_accuracy: var.sqrt(),
            min_accuracy: accs.iter().copied().fold(f64::INFINITY, f64::min),
            max_accuracy: accs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            runs,
        }
    }

    pub fn accuracies(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.accuracy).collect()
    }
}

struct Job {
    key: String,
    description: String,
    spec: RunSpec,
}

/// Run every job under every seed in parallel. Returns the points in job order
/// and, when `keep_model` is set, the model of the first job's first seed.
fn run_grid(
    data: &ExperimentData,
    jobs: Vec<Job>,
    seeds: &[u64],
    keep_model: bool,
) -> Result<(Vec<SweepPoint>, Option<Model>)> {
    if seeds.is_empty() {
        return Err(Error::invalid("at least one seed is required"));
    }
    let tasks: Vec<(usize, usize)> = (0..jobs.len())
        .flat_map(|j| (0..seeds.len()).map(move |s| (j, s)))
        .collect();
    let results = tasks
        .par_iter()
        .map(|&(j, s)| {
            let job = &jobs[j];
            let name = format!("{}[seed={}]", job.key, seeds[s]);
            let (report, model) = run_once(data, &job.spec, seeds[s], &name)?;
            info!("{name}: accuracy {:.4}", report.accuracy);
            Ok((report, (keep_model && j == 0 && s == 0).then_some(model)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut kept = None;
    let mut per_job: Vec<Vec<ExperimentReport>> = vec![Vec::new(); jobs.len()];
    for ((j, _), (report, model)) in tasks.iter().zip(results) {
        if model.is_some() {
            kept = model;
        }
        per_job[*j].push(report);
    }
    let points = jobs
        .into_iter()
        .zip(per_job)
        .map(|(job, runs)| SweepPoint::from_runs(job.key, job.description, runs))
        .collect();
    Ok((points, kept))
}

/// The four scaling × rate-of-change combinations, without augmentation.
/// `base` supplies the remaining pipeline settings and the model.
pub fn run_ablation(data: &ExperimentData, base: &RunSpec, seeds: &[u64]) -> Result<Vec<SweepPoint>> {
    let combos = [
        ("exp1", true, Transform::Roc),
        ("exp2", true, Transform::None),
        ("exp3", false, Transform::Roc),
        ("exp4", false, Transform::None),
    ];
    let jobs = combos
        .into_iter()
        .map(|(key, scale, transform)| Job {
            key: key.to_string(),
            description: format!(
                "{}, {}, bin width {}, unaugmented",
                if scale { "scaling" } else { "no scaling" },
                if transform == Transform::Roc { "ROC" } else { "no ROC" },
                base.pipeline.bin_width
            ),
            spec: RunSpec {
                pipeline: PipelineConfig {
                    scale_x: scale,
                    transform,
                    ..base.pipeline.clone()
                },
                augment: None,
                model: base.model.clone(),
            },
        })
        .collect();
    Ok(run_grid(data, jobs, seeds, false)?.0)
}

fn describe(spec: &RunSpec) -> String {
    let augment = match &spec.augment {
        Some(a) if !a.targets.is_empty() => {
            let parts: Vec<String> = a.targets.iter().map(|t| format!("{}≥{}", t.polymer, t.min_examples)).collect();
            format!("augmented ({})", parts.join(", "))
        }
        _ => "unaugmented".to_string(),
    };
    let p = &spec.pipeline;
    let criterion = match &spec.model {
        ModelConfig::RandomForest(f) => format!("random forest ({:?})", f.criterion).to_lowercase(),
        ModelConfig::DecisionTree { criterion, .. } => format!("decision tree ({criterion:?})").to_lowercase(),
        ModelConfig::Knn { k } => format!("knn (k={k})"),
    };
    format!(
        "{}, {:?}, bin width {}, {augment}, {criterion}",
        if p.scale_x { "scaling" } else { "no scaling" },
        p.transform,
        p.bin_width
    )
    .replace("Roc", "ROC")
    .replace("Pc", "PC")
    .replace(", None,", ", no transform,")
}

/// One model per bin width.
pub fn sweep_bins(data: &ExperimentData, spec: &RunSpec, widths: &[usize], seeds: &[u64]) -> Result<Vec<SweepPoint>> {
    if widths.is_empty() || widths.contains(&0) {
        return Err(Error::invalid("bin widths must be a non-empty list of positive values"));
    }
    let jobs = widths
        .iter()
        .map(|&w| {
            let spec = RunSpec {
                pipeline: PipelineConfig {
                    bin_width: w,
                    ..spec.pipeline.clone()
                },
                ..spec.clone()
            };
            Job {
                key: w.to_string(),
                description: describe(&spec),
                spec,
            }
        })
        .collect();
    Ok(run_grid(data, jobs, seeds, false)?.0)
}

/// One model per noise amplitude; noise touches training spectra only.
pub fn sweep_noise(data: &ExperimentData, spec: &RunSpec, amplitudes: &[f64], seeds: &[u64]) -> Result<Vec<SweepPoint>> {
    if amplitudes.is_empty() {
        return Err(Error::invalid("no noise amplitudes given"));
    }
    if let Some(a) = amplitudes.iter().find(|a| !(**a >= 0.0) || !a.is_finite()) {
        return Err(Error::invalid(format!("noise amplitude {a} must be finite and non-negative")));
    }
    let jobs = amplitudes
        .iter()
        .map(|&a| {
            let spec = RunSpec {
                pipeline: PipelineConfig {
                    noise: true,
                    noise_amplitude: a,
                    ..spec.pipeline.clone()
                },
                ..spec.clone()
            };
            Job {
                key: a.to_string(),
                description: format!("{}, training noise ±{a}", describe(&spec)),
                spec,
            }
        })
        .collect();
    Ok(run_grid(data, jobs, seeds, false)?.0)
}

/// The configured pipeline under each model.
pub fn compare_models(
    data: &ExperimentData,
    spec: &RunSpec,
    models: &[ModelConfig],
    seeds: &[u64],
) -> Result<Vec<SweepPoint>> {
    let jobs = models
        .iter()
        .map(|m| {
            let spec = RunSpec {
                model: m.clone(),
                ..spec.clone()
            };
            Job {
                key: m.name().to_string(),
                description: describe(&spec),
                spec,
            }
        })
        .collect();
    Ok(run_grid(data, jobs, seeds, false)?.0)
}

/// Settings of the final model: 0–3500 grid, ROC, width 12, final
/// augmentation recipe, entropy random forest.
pub fn final_spec() -> RunSpec {
    RunSpec {
        pipeline: PipelineConfig::default(),
        augment: Some(AugmentConfig {
            params: Default::default(),
            targets: final_recipe(),
        }),
        model: ModelConfig::RandomForest(ForestParams {
            criterion: SplitCriterion::Entropy,
            ..Default::default()
        }),
    }
}

/// Evaluate `spec` over the seeds; returns the point and the first seed's model.
pub fn run_spec(data: &ExperimentData, spec: &RunSpec, key: &str, seeds: &[u64]) -> Result<(SweepPoint, Model)> {
    let job = Job {
        key: key.to_string(),
        description: describe(spec),
        spec: spec.clone(),
    };
    let (mut points, model) = run_grid(data, vec![job], seeds, true)?;
    Ok((points.remove(0), model.expect("first model is kept")))
}

/// The final recipe over the seeds.
pub fn run_final(data: &ExperimentData, seeds: &[u64]) -> Result<(SweepPoint, Model)> {
    run_spec(data, &final_spec(), "final", seeds)
}

/// Everything one `run` of an experiment config produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub experiment: ExperimentKind,
    /// Name of the swept column in the summary table.
    pub parameter: String,
    pub config: ExperimentConfig,
    pub points: Vec<SweepPoint>,
    #[serde(skip)]
    pub model: Option<SavedModel>,
    #[serde(skip)]
    pub wall_time: f64,
}

impl ExperimentOutcome {
    pub fn best(&self) -> Option<&SweepPoint> {
        self.points
            .iter()
            .fold(None, |best: Option<&SweepPoint>, p| match best {
                Some(b) if b.mean_accuracy >= p.mean_accuracy => Some(b),
                _ => Some(p),
            })
    }

    pub fn point(&self, key: &str) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.key == key)
    }
}

/// Execute the experiment named by `cfg` on already-loaded data.
pub fn run_experiment(cfg: &ExperimentConfig, data: &ExperimentData) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    let seeds = cfg.seed_list();
    let spec = RunSpec::from_config(cfg);
    let mut model = None;
    let (parameter, points) = match cfg.experiment {
        ExperimentKind::Ablation => ("experiment", run_ablation(data, &spec, &seeds)?),
        ExperimentKind::BinSweep => ("bin_width", sweep_bins(data, &spec, &cfg.sweep.widths, &seeds)?),
        ExperimentKind::NoiseSweep => ("noise_amplitude", sweep_noise(data, &spec, &cfg.sweep.amplitudes, &seeds)?),
        ExperimentKind::ModelComparison => {
            let mut models = vec![cfg.model.clone()];
            models.extend(cfg.comparison.iter().filter(|m| **m != cfg.model).cloned());
            ("model", compare_models(data, &spec, &models, &seeds)?)
        }
        ExperimentKind::Final | ExperimentKind::Custom => {
            let (point, m) = run_spec(data, &spec, cfg.experiment.name(), &seeds)?;
            model = Some(SavedModel::new(cfg.pipeline.clone(), m));
            ("run", vec![point])
        }
    };
    Ok(ExperimentOutcome {
        experiment: cfg.experiment,
        parameter: parameter.to_string(),
        config: cfg.clone(),
        points,
        model,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

fn summary_file(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Ablation => "ablation.csv",
        ExperimentKind::BinSweep => "bins.csv",
        ExperimentKind::NoiseSweep => "noise.csv",
        ExperimentKind::ModelComparison => "models.csv",
        ExperimentKind::Final => "final.csv",
        ExperimentKind::Custom => "custom.csv",
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn csv_bytes<F>(f: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>,
{
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        f(&mut w).map_err(|e| Error::Serde(e.to_string()))?;
        w.flush().map_err(|e| Error::Serde(e.to_string()))?;
    }
    Ok(buf)
}

/// Write the outcome's artifacts into `dir`:
///
/// - `report.json`: the full outcome (byte-identical across reruns)
/// - summary table (`ablation.csv`, `bins.csv`, `noise.csv`, `models.csv`,
///   `final.csv` or `custom.csv`) and `runs.csv` with one row per seed
/// - `confusion_<key>.csv` per point, except for sweeps
/// - `model.json` for final and custom runs
/// - `config.resolved.toml`, which reruns the experiment as is
/// - `timing.json` with the wall time
pub fn write_outputs(outcome: &ExperimentOutcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let json = serde_json::to_vec_pretty(outcome).map_err(|e| Error::Serde(e.to_string()))?;
    write_file(&dir.join("report.json"), &json)?;

    let summary = csv_bytes(|w| {
        w.write_record([
            outcome.parameter.as_str(),
            "mean_accuracy",
            "std_accuracy",
            "min_accuracy",
            "max_accuracy",
            "seeds",
            "description",
        ])?;
        for p in &outcome.points {
            w.write_record([
                p.key.clone(),
                p.mean_accuracy.to_string(),
                p.std_accuracy.to_string(),
                p.min_accuracy.to_string(),
                p.max_accuracy.to_string(),
                p.runs.len().to_string(),
                p.description.clone(),
            ])?;
        }
        Ok(())
    })?;
    write_file(&dir.join(summary_file(outcome.experiment)), &summary)?;

    let runs = csv_bytes(|w| {
        w.write_record([outcome.parameter.as_str(), "seed", "accuracy", "misclassified"])?;
        for p in &outcome.points {
            for r in &p.runs {
                w.write_record([
                    p.key.clone(),
                    r.seed.to_string(),
                    r.accuracy.to_string(),
                    r.misclassified.len().to_string(),
                ])?;
            }
        }
        Ok(())
    })?;
    write_file(&dir.join("runs.csv"), &runs)?;

    if !matches!(outcome.experiment, ExperimentKind::BinSweep | ExperimentKind::NoiseSweep) {
        for p in &outcome.points {
            let mut buf = Vec::new();
            p.runs[0].confusion.write_csv(&mut buf)?;
            write_file(&dir.join(format!("confusion_{}.csv", p.key)), &buf)?;
        }
    }
    if let Some(model) = &outcome.model {
        model.save(&dir.join("model.json"))?;
    }
    write_file(&dir.join("config.resolved.toml"), outcome.config.to_toml_string()?.as_bytes())?;
    let timing = serde_json::json!({ "wall_time_seconds": outcome.wall_time });
    write_file(&dir.join("timing.json"), timing.to_string().as_bytes())?;
    Ok(())
}
