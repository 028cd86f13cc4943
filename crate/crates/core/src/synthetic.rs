//! Synthetic stand-ins for the three public libraries.
//!
//! The generated libraries carry the published per-label sample counts,
//! including labels outside the vocabulary, so loading, assembly and the
//! experiment runners can be exercised end to end without the real data.
//! Each class is a fixed set of Lorentzian peaks. Pristine spectra are clean.
//! Weathered spectra have broadened, attenuated peaks over a fluorescence hump,
//! and the third library adds a wave-like baseline. Accuracies measured on
//! this data say nothing about the real libraries.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::Rng as _;

use crate::dataset::{write_spectrum_csv, Spectrum, MANIFEST_FILE};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed, Rng};

/// Raw label counts of the pristine library.
pub const SLOPP_COUNTS: &[(&str, usize)] = &[
    ("Acrylic", 10),
    ("Acrylonitrile Butadiene Styrene", 10),
    ("Cellulose Acetate", 4),
    ("Cotton", 16),
    ("Polyamide", 7),
    ("Polycarbonate", 7),
    ("Polyester", 10),
    ("Polyethylene", 24),
    ("Polyethylene Terephthalate", 9),
    ("Polyethylene Vinyl Acetate", 5),
    ("Polymethyl Methacrylate", 1),
    ("Polypropylene", 17),
    ("Polystyrene", 11),
    ("Polyurethane", 6),
    ("Polyvinyl Chloride", 11),
];

/// Raw label counts of the weathered library.
pub const SLOPPE_COUNTS: &[(&str, usize)] = &[
    ("Acrylic", 3),
    ("Acrylonitrile Butadiene Styrene", 1),
    ("Cellulose Acetate", 3),
    ("Polyamide", 7),
    ("Polycarbonate", 2),
    ("Polyester", 12),
    ("Polyethylene", 26),
    ("Polyethylene Terephthalate", 1),
    ("Polymethyl Methacrylate", 3),
    ("Polypropylene", 21),
    ("Polystyrene", 9),
    ("Polyurethane", 6),
    ("Polyvinyl Chloride", 3),
    ("Dyed Cellulose", 5),
    ("Polybutylene Terephthalate", 1),
    ("Polyethylene Terephthalate-co-Polycarbonate", 1),
    ("Polyethylene-co-Polypropylene", 3),
    ("Polystyrene-co-Polyvinyl Chloride", 1),
    ("Polysulfone", 1),
    ("Rubber", 4),
];

/// Raw label counts of the Mendeley library.
pub const MENDELEY_COUNTS: &[(&str, usize)] = &[
    ("Not detected", 8),
    ("Acrylonitrile Butadiene Styrene", 1),
    ("Nitrocellulose", 1),
    ("Polyamine (nylon)", 6),
    ("Polycarbonate", 2),
    ("Polyethylene", 74),
    ("Polyester", 16),
    ("Polypropylene", 54),
    ("Polystyrene (maybe)", 2),
    ("Polyvinyl chloride", 9),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Style {
    Pristine,
    Weathered,
    Wavy,
}

#[derive(Debug, Clone, Copy)]
struct Peak {
    centre: f64,
    width: f64,
    height: f64,
}

/// Peak signature shared by every sample of one raw label.
fn signature(seed: u64, label: &str) -> Vec<Peak> {
    let key = label
        .to_lowercase()
        .replace(" (maybe)", "")
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325_u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
    let mut rng = rng_from_seed(derive_seed(seed, key));
    let n = rng.gen_range(5..=9);
    (0..n)
        .map(|_| Peak {
            centre: rng.gen_range(250.0..3250.0),
            width: rng.gen_range(4.0..22.0),
            height: rng.gen_range(0.25..1.0),
        })
        .collect()
}

fn lorentz(x: f64, p: &Peak) -> f64 {
    let d = (x - p.centre) / p.width;
    p.height / (1.0 + d * d)
}

fn sample(peaks: &[Peak], style: Style, rng: &mut Rng) -> Result<Spectrum> {
    let start = rng.gen_range(95.0..205.0);
    let end = rng.gen_range(3300.0..3460.0);
    let step = match style {
        Style::Pristine => rng.gen_range(0.9..1.4),
        Style::Weathered => rng.gen_range(1.6..2.2),
        Style::Wavy => rng.gen_range(1.2..1.9),
    };
    let (broaden, noise, fade) = match style {
        Style::Pristine => (1.0, 0.01, 0.0),
        Style::Weathered => (rng.gen_range(1.5..3.0), 0.08, 0.8),
        Style::Wavy => (rng.gen_range(1.3..2.0), 0.02, 0.2),
    };
    let drift = if style == Style::Weathered { 12.0 } else { 3.0 };
    let shift = rng.gen_range(-drift..drift);
    let peaks: Vec<Peak> = peaks
        .iter()
        .map(|p| Peak {
            centre: p.centre + shift,
            width: p.width * broaden,
            height: p.height * rng.gen_range(0.85..1.15) * (1.0 - rng.gen_range(0.0..=fade)),
        })
        .collect();
    let gain = rng.gen_range(500.0..1500.0);
    let slope = rng.gen_range(-0.05..0.1);
    let hump = if style == Style::Weathered { rng.gen_range(0.3..1.2) } else { 0.0 };
    let (wave_amp, wave_len, wave_phase) = if style == Style::Wavy {
        (rng.gen_range(0.05..0.3), rng.gen_range(300.0..900.0), rng.gen_range(0.0..6.3))
    } else {
        (0.0, 1.0, 0.0)
    };

    let mut points = Vec::new();
    let mut x: f64 = start;
    while x <= end {
        let t = (x - start) / (end - start);
        let signal: f64 = peaks.iter().map(|p| lorentz(x, p)).sum();
        let baseline = slope * t + hump * (-((t - 0.6) / 0.35).powi(2)).exp()
            + wave_amp * (std::f64::consts::TAU * x / wave_len + wave_phase).sin();
        let y = gain * (signal + baseline + rng.gen_range(-noise..=noise));
        points.push((x, y));
        x += step * rng.gen_range(0.9..1.1);
    }
    Spectrum::new(points)
}

/// Generate every spectrum of one library in label order.
fn library(counts: &[(&str, usize)], style: Style, seed: u64) -> Result<Vec<(String, Spectrum)>> {
    let mut rng = rng_from_seed(derive_seed(seed, style as u64 + 1));
    let mut out = Vec::new();
    for (label, n) in counts {
        let peaks = signature(seed, label);
        for _ in 0..*n {
            out.push((label.to_string(), sample(&peaks, style, &mut rng)?));
        }
    }
    Ok(out)
}

fn write_csv_file(path: &Path, spectrum: &Spectrum) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_spectrum_csv(spectrum, BufWriter::new(f)).map_err(|e| Error::io(path, e))
}

fn write_manifest_library(dir: &Path, items: &[(String, Spectrum)]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest = dir.join(MANIFEST_FILE);
    let mut w = csv::Writer::from_path(&manifest).map_err(|e| Error::Serde(e.to_string()))?;
    w.write_record(["file", "label"]).map_err(|e| Error::Serde(e.to_string()))?;
    for (i, (label, spectrum)) in items.iter().enumerate() {
        let file = format!("spectrum_{i:04}.csv");
        write_csv_file(&dir.join(&file), spectrum)?;
        w.write_record([file.as_str(), label.as_str()])
            .map_err(|e| Error::Serde(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(&manifest, e))
}

fn write_directory_library(dir: &Path, items: &[(String, Spectrum)]) -> Result<()> {
    for (i, (label, spectrum)) in items.iter().enumerate() {
        let sub = dir.join(label);
        fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
        write_csv_file(&sub.join(format!("spectrum_{i:04}.csv")), spectrum)?;
    }
    Ok(())
}

/// Roots of a generated library set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticLibraries {
    pub slopp: PathBuf,
    pub sloppe: PathBuf,
    pub mendeley: PathBuf,
}

/// Write the three libraries under `root` (`slopp/`, `sloppe/`, `mendeley/`).
/// The first two use a manifest; `mendeley/` uses one directory per label.
pub fn write_synthetic_libraries(root: &Path, seed: u64) -> Result<SyntheticLibraries> {
    let libs = SyntheticLibraries {
        slopp: root.join("slopp"),
        sloppe: root.join("sloppe"),
        mendeley: root.join("mendeley"),
    };
    write_manifest_library(&libs.slopp, &library(SLOPP_COUNTS, Style::Pristine, seed)?)?;
    write_manifest_library(&libs.sloppe, &library(SLOPPE_COUNTS, Style::Weathered, seed)?)?;
    write_directory_library(&libs.mendeley, &library(MENDELEY_COUNTS, Style::Wavy, seed)?)?;
    Ok(libs)
}
