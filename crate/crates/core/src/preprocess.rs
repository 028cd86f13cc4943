//! Spectrum preprocessing: wavenumber-grid scaling, the positivity shift,
//! rate-of-change and percentage-change transforms, bin-means smoothing,
//! noise injection, and the per-dataset feature builder.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{LabeledDataset, PolymerType, Spectrum};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed};

/// Intensities on the integer wavenumber grid `min_range..=max_range`.
/// `values[i]` belongs to wavenumber `min_range + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSpectrum {
    values: Vec<f64>,
    min_range: i64,
    max_range: i64,
}

impl ScaledSpectrum {
    pub fn new(values: Vec<f64>, min_range: i64, max_range: i64) -> Result<Self> {
        if min_range >= max_range {
            return Err(Error::invalid(format!(
                "min_range {min_range} must be below max_range {max_range}"
            )));
        }
        if values.len() as i64 != max_range - min_range + 1 {
            return Err(Error::invalid(format!(
                "grid {min_range}..={max_range} needs {} values, got {}",
                max_range - min_range + 1,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("scaled spectrum has non-finite values"));
        }
        Ok(ScaledSpectrum {
            values,
            min_range,
            max_range,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_range(&self) -> i64 {
        self.min_range
    }

    pub fn max_range(&self) -> i64 {
        self.max_range
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_spectrum(&self) -> Spectrum {
        Spectrum::from_grid(self.min_range, &self.values)
            .expect("grid spectra are finite and strictly increasing")
    }
}

/// Map a spectrum onto the dense grid `min_range..=max_range`.
///
/// Each point writes its intensity at `floor(x)`. Scanning stops at the first
/// point past `max_range`; points below `min_range` are dropped. Cells before
/// the first written cell take the first written intensity, gaps take the
/// value at their left edge, and the tail repeats the last written value.
pub fn scale_x(spectrum: &Spectrum, min_range: i64, max_range: i64) -> Result<ScaledSpectrum> {
    if min_range >= max_range {
        return Err(Error::invalid(format!(
            "min_range {min_range} must be below max_range {max_range}"
        )));
    }
    let len = (max_range - min_range + 1) as usize;
    let mut values = vec![0.0; len];
    let mut last: Option<usize> = None;
    let mut dropped = 0usize;

    for &(x, y) in spectrum.points() {
        if !y.is_finite() {
            return Err(Error::invalid(format!("non-finite intensity at wavenumber {x}")));
        }
        let cell = x.floor() as i64;
        if cell > max_range {
            break;
        }
        if cell < min_range {
            dropped += 1;
            continue;
        }
        let i = (cell - min_range) as usize;
        match last {
            Some(l) => {
                let fill = values[l];
                values[l + 1..i.max(l + 1)].fill(fill);
            }
            None => values[..i].fill(y),
        }
        values[i] = y;
        last = Some(i);
    }
    if dropped > 0 {
        log::warn!("scale_x: dropped {dropped} points below wavenumber {min_range}");
    }

    let Some(last) = last else {
        return Err(Error::invalid(format!(
            "no spectrum point falls inside {min_range}..={max_range}"
        )));
    };
    let fill = values[last];
    values[last + 1..].fill(fill);
    ScaledSpectrum::new(values, min_range, max_range)
}

/// Shift so the minimum becomes `1` when any value is `<= 0`; identity otherwise.
pub fn shift_positive(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        let offset = min.abs() + 1.0;
        values.iter().map(|v| v + offset).collect()
    } else {
        values.to_vec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    /// Rate of change, `(y[i+1] - y[i]) / (x[i+1] - x[i])`.
    Roc,
    /// Percentage change against the mean of the preceding window.
    Pc,
    /// Intensities passed through unchanged.
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformedSeries {
    values: Vec<f64>,
    transform: Transform,
}

impl TransformedSeries {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

fn roc_values(xs: Option<&[f64]>, ys: &[f64]) -> Result<Vec<f64>> {
    if ys.len() < 2 {
        return Err(Error::invalid(format!(
            "rate of change needs at least 2 values, got {}",
            ys.len()
        )));
    }
    Ok(match xs {
        None => ys.windows(2).map(|w| w[1] - w[0]).collect(),
        Some(xs) => xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect(),
    })
}

/// Rate of change on the unit grid; one value per consecutive pair.
pub fn roc_transform(s: &ScaledSpectrum) -> Result<TransformedSeries> {
    Ok(TransformedSeries {
        values: roc_values(None, s.values())?,
        transform: Transform::Roc,
    })
}

/// Rate of change over a raw spectrum's own wavenumber steps.
pub fn roc_transform_points(s: &Spectrum) -> Result<TransformedSeries> {
    Ok(TransformedSeries {
        values: roc_values(Some(&s.wavenumbers()), &s.intensities())?,
        transform: Transform::Roc,
    })
}

fn pc_values(ys: &[f64], window: usize) -> Result<Vec<f64>> {
    if window < 1 {
        return Err(Error::invalid("percentage-change window must be at least 1"));
    }
    if window >= ys.len() {
        return Err(Error::invalid(format!(
            "percentage-change window {window} must be shorter than the series ({})",
            ys.len()
        )));
    }
    let mut out = Vec::with_capacity(ys.len() - window);
    for i in window..ys.len() {
        let mean = ys[i - window..i].iter().sum::<f64>() / window as f64;
        if mean == 0.0 {
            return Err(Error::invalid(format!("zero window mean before index {i}")));
        }
        out.push(ys[i] / mean);
    }
    Ok(out)
}

/// `y[i] / mean(y[i-1], …, y[i-window])` for `i >= window`. Expects strictly
/// positive input (see [`shift_positive`]).
pub fn pc_transform(s: &ScaledSpectrum, window: usize) -> Result<TransformedSeries> {
    Ok(TransformedSeries {
        values: pc_values(s.values(), window)?,
        transform: Transform::Pc,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub bins: Vec<f64>,
    pub bin_width: usize,
}

/// Equal-width bin means. The last bin may be partial and is averaged over
/// its actual members.
pub fn bin_means(series: &[f64], width: usize) -> Result<FeatureVector> {
    if width < 1 {
        return Err(Error::invalid("bin width must be at least 1"));
    }
    let bins = series
        .chunks(width)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    Ok(FeatureVector {
        bins,
        bin_width: width,
    })
}

fn perturb_uniform<R: Rng + ?Sized>(values: &mut [f64], amplitude: f64, rng: &mut R) -> Result<()> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(Error::invalid(format!(
            "noise amplitude must be finite and non-negative, got {amplitude}"
        )));
    }
    if amplitude == 0.0 {
        return Ok(());
    }
    for v in values {
        *v += rng.gen_range(-amplitude..=amplitude);
    }
    Ok(())
}

/// Add an independent uniform draw from `[-amplitude, amplitude]` to every value.
pub fn add_noise<R: Rng + ?Sized>(
    s: &ScaledSpectrum,
    amplitude: f64,
    rng: &mut R,
) -> Result<ScaledSpectrum> {
    let mut values = s.values.clone();
    perturb_uniform(&mut values, amplitude, rng)?;
    ScaledSpectrum::new(values, s.min_range, s.max_range)
}

fn default_true() -> bool {
    true
}
fn default_min_range() -> i64 {
    0
}
fn default_max_range() -> i64 {
    3500
}
fn default_transform() -> Transform {
    Transform::Roc
}
fn default_pc_window() -> usize {
    5
}
fn default_bin_width() -> usize {
    12
}
fn default_noise_amplitude() -> f64 {
    1.0
}

/// Feature pipeline settings. Defaults are the final recipe: 0–3500 grid,
/// rate of change, bin width 12, no intensity shift, no noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Map spectra onto the integer grid. When off, raw intensities are
    /// truncated to `raw_length` points.
    #[serde(default = "default_true")]
    pub scale_x: bool,
    #[serde(default = "default_min_range")]
    pub min_range: i64,
    #[serde(default = "default_max_range")]
    pub max_range: i64,
    /// Common length for unscaled spectra; `None` uses the shortest spectrum
    /// of the dataset being featurized.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_length: Option<usize>,
    #[serde(default = "default_transform")]
    pub transform: Transform,
    #[serde(default = "default_pc_window")]
    pub pc_window: usize,
    #[serde(default = "default_bin_width")]
    pub bin_width: usize,
    #[serde(default)]
    pub noise: bool,
    #[serde(default = "default_noise_amplitude")]
    pub noise_amplitude: f64,
    #[serde(default)]
    pub shift_positive: bool,
    #[serde(default)]
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            scale_x: true,
            min_range: default_min_range(),
            max_range: default_max_range(),
            raw_length: None,
            transform: Transform::Roc,
            pc_window: default_pc_window(),
            bin_width: default_bin_width(),
            noise: false,
            noise_amplitude: default_noise_amplitude(),
            shift_positive: false,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scale_x && self.min_range >= self.max_range {
            return Err(Error::config("pipeline.min_range", "must be below max_range"));
        }
        if self.bin_width < 1 {
            return Err(Error::config("pipeline.bin_width", "must be at least 1"));
        }
        if self.transform == Transform::Pc && self.pc_window < 1 {
            return Err(Error::config("pipeline.pc_window", "must be at least 1"));
        }
        if !(self.noise_amplitude >= 0.0) || !self.noise_amplitude.is_finite() {
            return Err(Error::config(
                "pipeline.noise_amplitude",
                "must be finite and non-negative",
            ));
        }
        if self.raw_length == Some(0) {
            return Err(Error::config("pipeline.raw_length", "must be positive"));
        }
        Ok(())
    }

    /// Length of the intensity series each sample contributes before the transform.
    fn series_length(&self, raw_length: usize) -> usize {
        if self.scale_x {
            (self.max_range - self.min_range + 1) as usize
        } else {
            raw_length
        }
    }

    /// Feature count produced for every row.
    pub fn feature_width(&self, raw_length: usize) -> usize {
        let n = self.series_length(raw_length);
        let transformed = match self.transform {
            Transform::Roc => n.saturating_sub(1),
            Transform::Pc => n.saturating_sub(self.pc_window),
            Transform::None => n,
        };
        transformed.div_ceil(self.bin_width)
    }

    /// Features for one spectrum. `index` selects the noise stream.
    pub fn featurize(&self, spectrum: &Spectrum, index: usize) -> Result<Vec<f64>> {
        let (xs, mut ys) = if self.scale_x {
            let scaled = scale_x(spectrum, self.min_range, self.max_range)?;
            (None, scaled.values)
        } else {
            let n = self.raw_length.unwrap_or(spectrum.len());
            let s = spectrum.truncated(n)?;
            (Some(s.wavenumbers()), s.intensities())
        };
        if self.noise {
            let mut rng = rng_from_seed(derive_seed(self.seed, index as u64));
            perturb_uniform(&mut ys, self.noise_amplitude, &mut rng)?;
        }
        if self.shift_positive {
            ys = shift_positive(&ys);
        }
        let series = match self.transform {
            Transform::Roc => roc_values(xs.as_deref(), &ys)?,
            Transform::Pc => pc_values(&ys, self.pc_window)?,
            Transform::None => ys,
        };
        Ok(bin_means(&series, self.bin_width)?.bins)
    }
}

/// One row per sample; the label is the row's class.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<PolymerType>,
    pub ids: Vec<String>,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn class_indices(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.index()).collect()
    }

    /// CSV with header `f0,…,f{n-1},label`; label is the last column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::Serde(e.to_string());
        let mut header: Vec<String> = (0..self.width()).map(|i| format!("f{i}")).collect();
        header.push("label".into());
        w.write_record(&header).map_err(err)?;
        for (row, label) in self.rows.iter().zip(&self.labels) {
            let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            record.push(label.name().to_string());
            w.write_record(&record).map_err(err)?;
        }
        w.flush().map_err(|e| Error::Serde(e.to_string()))?;
        Ok(())
    }
}

/// Featurize every sample: scale → noise → shift → transform → bin means.
///
/// Rows follow the dataset's iteration order. With `scale_x` off and no
/// `raw_length`, spectra are truncated to the dataset's shortest spectrum.
pub fn build_features(ds: &LabeledDataset, cfg: &PipelineConfig) -> Result<FeatureMatrix> {
    cfg.validate()?;
    let samples: Vec<_> = ds.iter().collect();
    let mut cfg = cfg.clone();
    if !cfg.scale_x && cfg.raw_length.is_none() {
        cfg.raw_length = samples.iter().map(|(_, s)| s.spectrum.len()).min();
    }
    let rows = samples
        .par_iter()
        .enumerate()
        .map(|(i, (_, s))| cfg.featurize(&s.spectrum, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureMatrix {
        rows,
        labels: samples.iter().map(|(t, _)| *t).collect(),
        ids: samples.iter().map(|(_, s)| s.id.clone()).collect(),
    })
}
