use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::{
    parse_spectrum_csv, write_spectrum_csv, Label, LabeledDataset, PolymerType, Provenance, Sample,
    Source, SynonymTable,
};
use crate::error::{Error, Result};

/// Per-library manifest mapping sample file → raw label.
pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RejectedFile {
    pub file: String,
    pub raw_label: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LoadReport {
    pub source: Source,
    pub root: PathBuf,
    pub accepted: usize,
    pub counts: BTreeMap<PolymerType, usize>,
    /// Every raw label seen, accepted or not, with its file count.
    pub raw_label_counts: BTreeMap<String, usize>,
    pub rejected: Vec<RejectedFile>,
}

impl LoadReport {
    /// JSON lines: one `summary` object, then one `rejected` object per
    /// rejected or unreadable file. Every line carries the source tag.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let summary = serde_json::json!({
            "kind": "summary",
            "source": self.source,
            "root": self.root,
            "accepted": self.accepted,
            "rejected": self.rejected.len(),
            "counts": self.counts,
            "raw_label_counts": self.raw_label_counts,
        });
        writeln!(w, "{summary}")?;
        for r in &self.rejected {
            let line = serde_json::json!({
                "kind": "rejected",
                "source": self.source,
                "file": r.file,
                "raw_label": r.raw_label,
                "reason": r.reason,
            });
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

fn read_manifest(path: &Path) -> Result<Vec<(String, String)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(BufReader::new(file));
    let headers = rdr.headers().map_err(|e| Error::Format {
        line: 1,
        message: format!("{}: {e}", path.display()),
    })?;
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Format {
                line: 1,
                message: format!("{}: manifest has no `{name}` column", path.display()),
            })
    };
    let (file_col, label_col) = (column("file")?, column("label")?);

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Format {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: format!("{}: {e}", path.display()),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        match (record.get(file_col), record.get(label_col)) {
            (Some(f), Some(l)) if !f.is_empty() => rows.push((f.to_string(), l.to_string())),
            (Some(""), _) if record.iter().all(str::is_empty) => {}
            _ => {
                return Err(Error::Format {
                    line,
                    message: format!("{}: manifest row needs file and label", path.display()),
                })
            }
        }
    }
    Ok(rows)
}

/// Subdirectory-per-label layout: `root/<raw label>/<sample>.csv`.
fn scan_label_dirs(root: &Path) -> Result<Vec<(String, String)>> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| Error::io(root, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();

    let mut rows = Vec::new();
    for dir in dirs {
        let label = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut files: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(|e| Error::io(&dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.is_file()
                    && p.extension()
                        .is_some_and(|ext| ext.eq_ignore_ascii_case("csv"))
            })
            .collect();
        files.sort();
        for f in files {
            let rel = f.strip_prefix(root).unwrap_or(&f);
            rows.push((rel.to_string_lossy().into_owned(), label.clone()));
        }
    }
    Ok(rows)
}

/// Load one spectral library.
///
/// `root` either holds a [`MANIFEST_FILE`] with `file,label` columns (paths
/// relative to `root`) or one subdirectory per raw label. Files whose label is
/// rejected or which fail to parse are listed in the report instead of failing
/// the load.
pub fn load_library(
    root: &Path,
    source: Source,
    synonyms: &SynonymTable,
) -> Result<(LabeledDataset, LoadReport)> {
    if !root.is_dir() {
        return Err(Error::MissingDirectory(root.to_path_buf()));
    }
    let manifest = root.join(MANIFEST_FILE);
    let rows = if manifest.is_file() {
        read_manifest(&manifest)?
    } else {
        scan_label_dirs(root)?
    };

    let parsed: Vec<_> = rows
        .par_iter()
        .map(|(file, raw)| match synonyms.normalize(raw) {
            Label::Rejected => Err("label outside vocabulary".to_string()),
            Label::Accepted(polymer) => {
                let path = root.join(file);
                File::open(&path)
                    .map_err(|e| format!("unreadable: {e}"))
                    .and_then(|f| {
                        parse_spectrum_csv(BufReader::new(f)).map_err(|e| e.to_string())
                    })
                    .map(|s| (polymer, s))
            }
        })
        .collect();

    let mut dataset = LabeledDataset::new(source);
    let mut raw_label_counts = BTreeMap::new();
    let mut rejected = Vec::new();
    for ((file, raw), result) in rows.iter().zip(parsed) {
        *raw_label_counts.entry(raw.clone()).or_insert(0) += 1;
        match result {
            Ok((polymer, spectrum)) => dataset.insert(
                polymer,
                Sample::original(format!("{}/{}", source.tag(), file), source, spectrum),
            ),
            Err(reason) => {
                log::debug!("{}: skipping {file}: {reason}", source);
                rejected.push(RejectedFile {
                    file: file.clone(),
                    raw_label: raw.clone(),
                    reason,
                });
            }
        }
    }

    if !rejected.is_empty() {
        log::warn!("{}: {} of {} files rejected", source, rejected.len(), rows.len());
    }
    if dataset.is_empty() {
        return Err(Error::Data(format!(
            "{}: zero accepted samples in {}",
            source,
            root.display()
        )));
    }
    let report = LoadReport {
        source,
        root: root.to_path_buf(),
        accepted: dataset.len(),
        counts: dataset.counts(),
        raw_label_counts,
        rejected,
    };
    Ok((dataset, report))
}

/// Training set: SLoPP plus the Mendeley samples of SLoPP's types. Test set:
/// SLoPP-E restricted to the same types.
pub fn assemble_train_test(
    slopp: &LabeledDataset,
    mendeley: &LabeledDataset,
    sloppe: &LabeledDataset,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let vocabulary = slopp.vocabulary();
    if vocabulary.is_empty() {
        return Err(Error::Data("training vocabulary is empty".into()));
    }

    let mut train = slopp.restricted_to(&vocabulary, Source::Combined);
    for (polymer, sample) in mendeley.iter() {
        if vocabulary.contains(&polymer) {
            train.insert(polymer, sample.clone());
        }
    }
    let test = sloppe.restricted_to(&vocabulary, sloppe.source());
    if test.is_empty() {
        return Err(Error::Data(
            "no test sample shares a polymer type with the training vocabulary".into(),
        ));
    }

    let mut seen = HashSet::new();
    for (_, s) in train.iter() {
        if !seen.insert(s.id.as_str()) {
            return Err(Error::Data(format!("duplicate sample id `{}` in training set", s.id)));
        }
    }
    if let Some((_, s)) = test.iter().find(|(_, s)| seen.contains(s.id.as_str())) {
        return Err(Error::Data(format!("sample `{}` appears in both train and test", s.id)));
    }
    Ok((train, test))
}

fn file_stem_for(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Write a dataset in the manifest layout read by [`load_library`], with
/// provenance columns for augmented samples.
pub fn write_library(dataset: &LabeledDataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest = File::create(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let mut manifest = csv::Writer::from_writer(BufWriter::new(manifest));
    let csv_err = |e: csv::Error| Error::Serde(e.to_string());
    manifest
        .write_record(["file", "label", "id", "provenance", "source_id", "seed"])
        .map_err(csv_err)?;

    for (i, (polymer, sample)) in dataset.iter().enumerate() {
        let file = format!("{i:05}_{}.csv", file_stem_for(&sample.id));
        let path = dir.join(&file);
        let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(f);
        write_spectrum_csv(&sample.spectrum, &mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))?;
        let (kind, source_id, seed) = match &sample.provenance {
            Provenance::Original => ("original", String::new(), String::new()),
            Provenance::Augmented {
                source_id, seed, ..
            } => ("augmented", source_id.clone(), seed.to_string()),
        };
        manifest
            .write_record([
                file.as_str(),
                polymer.name(),
                sample.id.as_str(),
                kind,
                source_id.as_str(),
                seed.as_str(),
            ])
            .map_err(csv_err)?;
    }
    manifest
        .flush()
        .map_err(|e| Error::io(&manifest_path, e))?;
    Ok(())
}
