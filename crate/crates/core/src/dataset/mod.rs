//! Spectral library ingestion: CSV parsing, label normalization, library
//! loading and the train/test assembly.

mod label;
mod library;
mod spectrum;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use label::{normalize_label, Label, PolymerType, SynonymTable};
pub use library::{
    assemble_train_test, load_library, write_library, LoadReport, RejectedFile, MANIFEST_FILE,
};
pub use spectrum::{parse_spectrum_csv, write_spectrum_csv, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Slopp,
    SloppE,
    Mendeley,
    Combined,
}

impl Source {
    pub fn tag(self) -> &'static str {
        match self {
            Source::Slopp => "slopp",
            Source::SloppE => "slopp-e",
            Source::Mendeley => "mendeley",
            Source::Combined => "combined",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Original,
    /// Synthesized from `source_id`; `ordinal` counts augmented copies within the class.
    Augmented {
        source_id: String,
        seed: u64,
        ordinal: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Unique within a dataset, e.g. `slopp/PE_01.csv`.
    pub id: String,
    pub source: Source,
    pub spectrum: Spectrum,
    pub provenance: Provenance,
}

impl Sample {
    pub fn original(id: impl Into<String>, source: Source, spectrum: Spectrum) -> Self {
        Sample {
            id: id.into(),
            source,
            spectrum,
            provenance: Provenance::Original,
        }
    }

    pub fn is_augmented(&self) -> bool {
        matches!(self.provenance, Provenance::Augmented { .. })
    }
}

/// Polymer type → samples. Iteration order is the class order, then insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    source: Source,
    entries: BTreeMap<PolymerType, Vec<Sample>>,
}

impl LabeledDataset {
    pub fn new(source: Source) -> Self {
        LabeledDataset {
            source,
            entries: BTreeMap::new(),
        }
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn insert(&mut self, polymer: PolymerType, sample: Sample) {
        self.entries.entry(polymer).or_default().push(sample);
    }

    pub fn entries(&self) -> &BTreeMap<PolymerType, Vec<Sample>> {
        &self.entries
    }

    pub fn samples(&self, polymer: PolymerType) -> &[Sample] {
        self.entries.get(&polymer).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Types with at least one sample.
    pub fn vocabulary(&self) -> BTreeSet<PolymerType> {
        self.entries
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, _)| *k)
            .collect()
    }

    pub fn counts(&self) -> BTreeMap<PolymerType, usize> {
        self.entries
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| (*k, v.len()))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PolymerType, &Sample)> {
        self.entries
            .iter()
            .flat_map(|(k, v)| v.iter().map(move |s| (*k, s)))
    }

    /// Copy restricted to `vocabulary`, relabelled with `source`.
    pub fn restricted_to(&self, vocabulary: &BTreeSet<PolymerType>, source: Source) -> Self {
        LabeledDataset {
            source,
            entries: self
                .entries
                .iter()
                .filter(|(k, v)| vocabulary.contains(k) && !v.is_empty())
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Apply `f` to every spectrum, keeping labels, ids and provenance.
    pub fn try_map_spectra<F>(&self, mut f: F) -> crate::Result<Self>
    where
        F: FnMut(&Sample) -> crate::Result<Spectrum>,
    {
        let mut out = LabeledDataset::new(self.source);
        for (polymer, sample) in self.iter() {
            let spectrum = f(sample)?;
            out.insert(
                polymer,
                Sample {
                    spectrum,
                    ..sample.clone()
                },
            );
        }
        Ok(out)
    }
}
