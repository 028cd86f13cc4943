//! Ratio-perturbation augmentation for under-represented classes.
//!
//! A source spectrum is reduced to its consecutive-intensity ratios, each
//! ratio is nudged by a uniform offset, and a new spectrum is rebuilt by
//! chaining the nudged ratios from the first intensity. Every rebuilt value is
//! clamped to `±max_pct_change` percent of the (positivity-shifted) source at
//! the same wavenumber, so peaks stay where they were.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{LabeledDataset, PolymerType, Provenance, Sample};
use crate::error::{Error, Result};
use crate::preprocess::shift_positive;
use crate::seed::{derive_seed, rng_from_seed};

fn default_random_change() -> f64 {
    0.05
}
fn default_max_pct_change() -> f64 {
    99.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentParams {
    /// Half-width of the uniform offset applied to each ratio.
    #[serde(default = "default_random_change")]
    pub random_change: f64,
    /// Added to the first rebuilt intensity.
    #[serde(default)]
    pub shift: f64,
    /// Clamp envelope, percent of the source intensity. Must stay below 100.
    #[serde(default = "default_max_pct_change")]
    pub max_pct_change: f64,
}

impl Default for AugmentParams {
    fn default() -> Self {
        AugmentParams {
            random_change: default_random_change(),
            shift: 0.0,
            max_pct_change: default_max_pct_change(),
        }
    }
}

impl AugmentParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.random_change >= 0.0) || !self.random_change.is_finite() {
            return Err(Error::config("augment.random_change", "must be finite and >= 0"));
        }
        if !self.shift.is_finite() {
            return Err(Error::config("augment.shift", "must be finite"));
        }
        if !(0.0..100.0).contains(&self.max_pct_change) {
            return Err(Error::config("augment.max_pct_change", "must lie in [0, 100)"));
        }
        Ok(())
    }
}

/// Grow `polymer` to at least `min_examples` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentTarget {
    pub polymer: PolymerType,
    pub min_examples: usize,
}

impl AugmentTarget {
    pub fn new(polymer: PolymerType, min_examples: usize) -> Self {
        AugmentTarget {
            polymer,
            min_examples,
        }
    }
}

/// `y'[i+1] / y'[i]` over the positivity-shifted series.
pub fn ratio_series(y: &[f64]) -> Result<Vec<f64>> {
    if y.len() < 2 {
        return Err(Error::invalid(format!(
            "ratio series needs at least 2 values, got {}",
            y.len()
        )));
    }
    let shifted = shift_positive(y);
    Ok(shifted.windows(2).map(|w| w[1] / w[0]).collect())
}

/// Offset each ratio by `U(-random_change, random_change)`; a result `<= 0`
/// falls back to the unperturbed ratio.
pub fn perturb_ratios<R: Rng + ?Sized>(ratios: &[f64], random_change: f64, rng: &mut R) -> Vec<f64> {
    if random_change == 0.0 {
        return ratios.to_vec();
    }
    ratios
        .iter()
        .map(|&r| {
            let candidate = r + rng.gen_range(-random_change..=random_change);
            if candidate <= 0.0 {
                r
            } else {
                candidate
            }
        })
        .collect()
}

/// Chain `ratios` from `init + shift`, clamping each step to the envelope
/// around the shifted `original`. The first value is not clamped.
pub fn reconstruct(
    original: &[f64],
    ratios: &[f64],
    init: f64,
    shift: f64,
    max_pct_change: f64,
) -> Result<Vec<f64>> {
    if original.is_empty() || ratios.len() + 1 != original.len() {
        return Err(Error::invalid(format!(
            "{} ratios cannot rebuild a series of {} values",
            ratios.len(),
            original.len()
        )));
    }
    let reference = shift_positive(original);
    let (lo, hi) = (1.0 - max_pct_change / 100.0, 1.0 + max_pct_change / 100.0);

    let mut out = Vec::with_capacity(original.len());
    let mut previous = init + shift;
    out.push(previous);
    for (i, &r) in ratios.iter().enumerate() {
        previous *= r;
        let upper = reference[i + 1] * hi;
        let lower = reference[i + 1] * lo;
        if previous > upper {
            previous = upper;
        }
        if previous < lower {
            previous = lower;
        }
        out.push(previous);
    }
    Ok(out)
}

/// One augmented copy of `y`.
pub fn augment_series<R: Rng + ?Sized>(y: &[f64], params: &AugmentParams, rng: &mut R) -> Result<Vec<f64>> {
    let ratios = ratio_series(y)?;
    let perturbed = perturb_ratios(&ratios, params.random_change, rng);
    let init = shift_positive(y)[0];
    reconstruct(y, &perturbed, init, params.shift, params.max_pct_change)
}

/// Append augmented copies to each targeted class until it holds
/// `min_examples` samples. Sources cycle round-robin over the class's
/// original samples; originals are kept unchanged. Each class draws from its
/// own stream derived from `seed`.
pub fn generate_augmented(
    train: &LabeledDataset,
    targets: &[AugmentTarget],
    params: &AugmentParams,
    seed: u64,
) -> Result<LabeledDataset> {
    params.validate()?;
    for (i, t) in targets.iter().enumerate() {
        if t.min_examples < 1 {
            return Err(Error::config(
                format!("augment.targets[{i}].min_examples"),
                "must be at least 1",
            ));
        }
        if targets[..i].iter().any(|o| o.polymer == t.polymer) {
            return Err(Error::config(
                format!("augment.targets[{i}].polymer"),
                format!("`{}` listed twice", t.polymer),
            ));
        }
        if train.samples(t.polymer).is_empty() {
            return Err(Error::Data(format!(
                "augmentation target `{}` has no training samples",
                t.polymer
            )));
        }
    }

    let generated: Vec<(PolymerType, Vec<Sample>)> = targets
        .par_iter()
        .map(|t| {
            let sources = train.samples(t.polymer);
            let class_seed = derive_seed(seed, t.polymer.index() as u64);
            let mut rng = rng_from_seed(class_seed);
            let missing = t.min_examples.saturating_sub(sources.len());
            let mut out = Vec::with_capacity(missing);
            for ordinal in 0..missing {
                let src = &sources[ordinal % sources.len()];
                let ys = augment_series(&src.spectrum.intensities(), params, &mut rng)?;
                out.push(Sample {
                    id: format!("{}#aug{ordinal}", src.id),
                    source: src.source,
                    spectrum: src.spectrum.with_intensities(&ys)?,
                    provenance: Provenance::Augmented {
                        source_id: src.id.clone(),
                        seed: class_seed,
                        ordinal,
                    },
                });
            }
            Ok((t.polymer, out))
        })
        .collect::<Result<_>>()?;

    let mut augmented = train.clone();
    for (polymer, samples) in generated {
        for s in samples {
            augmented.insert(polymer, s);
        }
    }
    Ok(augmented)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Source, Spectrum};
    use rand::rngs::mock::StepRng;

    #[test]
    fn ratio_examples() {
        assert_eq!(ratio_series(&[1.0, 2.0, 4.0]).unwrap(), vec![2.0, 2.0]);
        assert_eq!(ratio_series(&[-1.0, 0.0, 1.0]).unwrap(), vec![2.0, 1.5]);
        assert_eq!(ratio_series(&[3.0; 5]).unwrap(), vec![1.0; 4]);
        assert!(ratio_series(&[1.0]).is_err());
    }

    #[test]
    fn perturb_identity_and_bounds() {
        let r = vec![0.5, 1.0, 2.0];
        let mut rng = rng_from_seed(1);
        assert_eq!(perturb_ratios(&r, 0.0, &mut rng), r);
        let p = perturb_ratios(&r, 0.05, &mut rng);
        for (a, b) in p.iter().zip(&r) {
            assert!((a - b).abs() <= 0.05);
        }
    }

    #[test]
    fn perturb_reverts_non_positive() {
        // StepRng(0, 0) yields the lowest sample of the range, i.e. an offset of -0.05.
        let mut rng = StepRng::new(0, 0);
        assert_eq!(perturb_ratios(&[0.01], 0.05, &mut rng), vec![0.01]);
    }

    #[test]
    fn reconstruct_examples() {
        let orig = [3.0, 6.0, 2.0, 8.0];
        let r = ratio_series(&orig).unwrap();
        let out = reconstruct(&orig, &r, 3.0, 0.0, 99.0).unwrap();
        for (a, b) in out.iter().zip(&orig) {
            assert!((a - b).abs() <= 1e-12 * b.abs());
        }
        assert_eq!(reconstruct(&[1.0, 1.0], &[300.0], 1.0, 0.0, 99.0).unwrap(), vec![1.0, 1.99]);
        let low = reconstruct(&[1.0, 1.0], &[0.001], 1.0, 0.0, 99.0).unwrap();
        assert_eq!(low[0], 1.0);
        assert!((low[1] - 0.01).abs() < 1e-15);
        assert!(reconstruct(&[1.0, 1.0], &[1.0, 1.0], 1.0, 0.0, 99.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(AugmentParams::default().validate().is_ok());
        let bad = AugmentParams {
            max_pct_change: 100.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = AugmentParams {
            random_change: -0.1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    fn train_set(n: usize) -> LabeledDataset {
        let mut ds = LabeledDataset::new(Source::Slopp);
        for i in 0..n {
            let ys: Vec<f64> = (0..30).map(|k| ((k * 7 + i * 3) % 11) as f64 - 2.0).collect();
            ds.insert(
                PolymerType::CelluloseAcetate,
                Sample::original(format!("ca{i}"), Source::Slopp, Spectrum::from_grid(0, &ys).unwrap()),
            );
        }
        ds.insert(
            PolymerType::Cotton,
            Sample::original("co", Source::Slopp, Spectrum::from_grid(0, &[1.0; 30]).unwrap()),
        );
        ds
    }

    #[test]
    fn round_robin_fill() {
        let train = train_set(4);
        let targets = [AugmentTarget::new(PolymerType::CelluloseAcetate, 15)];
        let out = generate_augmented(&train, &targets, &AugmentParams::default(), 3).unwrap();
        let ca = out.samples(PolymerType::CelluloseAcetate);
        assert_eq!(ca.len(), 15);
        let sources: Vec<_> = ca[4..]
            .iter()
            .map(|s| match &s.provenance {
                Provenance::Augmented { source_id, .. } => source_id.clone(),
                Provenance::Original => panic!("expected augmented"),
            })
            .collect();
        let expected: Vec<_> = (0..11).map(|k| format!("ca{}", k % 4)).collect();
        assert_eq!(sources, expected);
        assert_eq!(&ca[..4], train.samples(PolymerType::CelluloseAcetate));
        assert_eq!(out.samples(PolymerType::Cotton).len(), 1);
        assert_eq!(out, generate_augmented(&train, &targets, &AugmentParams::default(), 3).unwrap());
    }

    #[test]
    fn target_below_count_is_noop_and_errors() {
        let train = train_set(4);
        let out = generate_augmented(
            &train,
            &[AugmentTarget::new(PolymerType::CelluloseAcetate, 3)],
            &AugmentParams::default(),
            0,
        )
        .unwrap();
        assert_eq!(out, train);
        assert!(generate_augmented(
            &train,
            &[AugmentTarget::new(PolymerType::Polyamide, 5)],
            &AugmentParams::default(),
            0
        )
        .is_err());
        assert!(generate_augmented(
            &train,
            &[AugmentTarget::new(PolymerType::Cotton, 0)],
            &AugmentParams::default(),
            0
        )
        .is_err());
    }
}
