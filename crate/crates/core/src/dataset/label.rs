use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The closed 15-class polymer vocabulary shared by the training libraries.
///
/// Variants are declared in ascending order of their canonical names, so the
/// derived `Ord` is the lexicographic order of [`PolymerType::name`]. Vote
/// tie-breaking relies on this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PolymerType {
    Acrylic,
    AcrylonitrileButadieneStyrene,
    CelluloseAcetate,
    Cotton,
    Polyamide,
    Polycarbonate,
    Polyester,
    Polyethylene,
    PolyethyleneTerephthalate,
    PolyethyleneVinylAcetate,
    PolymethylMethacrylate,
    Polypropylene,
    Polystyrene,
    Polyurethane,
    PolyvinylChloride,
}

impl PolymerType {
    pub const ALL: [PolymerType; 15] = [
        PolymerType::Acrylic,
        PolymerType::AcrylonitrileButadieneStyrene,
        PolymerType::CelluloseAcetate,
        PolymerType::Cotton,
        PolymerType::Polyamide,
        PolymerType::Polycarbonate,
        PolymerType::Polyester,
        PolymerType::Polyethylene,
        PolymerType::PolyethyleneTerephthalate,
        PolymerType::PolyethyleneVinylAcetate,
        PolymerType::PolymethylMethacrylate,
        PolymerType::Polypropylene,
        PolymerType::Polystyrene,
        PolymerType::Polyurethane,
        PolymerType::PolyvinylChloride,
    ];

    /// Canonical lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            PolymerType::Acrylic => "acrylic",
            PolymerType::AcrylonitrileButadieneStyrene => "acrylonitrile butadiene styrene",
            PolymerType::CelluloseAcetate => "cellulose acetate",
            PolymerType::Cotton => "cotton",
            PolymerType::Polyamide => "polyamide",
            PolymerType::Polycarbonate => "polycarbonate",
            PolymerType::Polyester => "polyester",
            PolymerType::Polyethylene => "polyethylene",
            PolymerType::PolyethyleneTerephthalate => "polyethylene terephthalate",
            PolymerType::PolyethyleneVinylAcetate => "polyethylene vinyl acetate",
            PolymerType::PolymethylMethacrylate => "polymethyl methacrylate",
            PolymerType::Polypropylene => "polypropylene",
            PolymerType::Polystyrene => "polystyrene",
            PolymerType::Polyurethane => "polyurethane",
            PolymerType::PolyvinylChloride => "polyvinyl chloride",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<PolymerType> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for PolymerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolymerType {
    type Err = Error;

    /// Strict parse of a canonical name (case and surrounding whitespace are ignored).
    /// Use [`SynonymTable`] for free-form library labels.
    fn from_str(s: &str) -> Result<Self> {
        let key = fold(s);
        PolymerType::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| Error::Data(format!("unknown polymer type `{s}`")))
    }
}

impl Serialize for PolymerType {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for PolymerType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Outcome of label normalization. Rejection is a value, not an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Accepted(PolymerType),
    Rejected,
}

impl Label {
    pub fn accepted(self) -> Option<PolymerType> {
        match self {
            Label::Accepted(t) => Some(t),
            Label::Rejected => None,
        }
    }
}

/// Lowercase, trim, and collapse internal whitespace runs.
fn fold(raw: &str) -> String {
    raw.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Raw library label → polymer type. Keys are folded (lowercase, trimmed,
/// single-spaced). A `None` target is an explicit rejection.
#[derive(Debug, Clone)]
pub struct SynonymTable {
    map: HashMap<String, Option<PolymerType>>,
}

impl Default for SynonymTable {
    fn default() -> Self {
        use PolymerType::*;
        let mut table = SynonymTable {
            map: HashMap::new(),
        };
        for t in PolymerType::ALL {
            table.insert(t.name(), Some(t));
        }
        let seeded: &[(&str, Option<PolymerType>)] = &[
            // Mendeley contributes no polyamide to the training set, so this stays unmapped.
            ("polyamine (nylon)", None),
            ("polystyrene (maybe)", Some(Polystyrene)),
            ("not detected", None),
            ("abs", Some(AcrylonitrileButadieneStyrene)),
            ("acrylonitrile-butadiene-styrene", Some(AcrylonitrileButadieneStyrene)),
            ("ca", Some(CelluloseAcetate)),
            ("pa", Some(Polyamide)),
            ("pc", Some(Polycarbonate)),
            ("pe", Some(Polyethylene)),
            ("pet", Some(PolyethyleneTerephthalate)),
            ("eva", Some(PolyethyleneVinylAcetate)),
            ("ethylene vinyl acetate", Some(PolyethyleneVinylAcetate)),
            ("pmma", Some(PolymethylMethacrylate)),
            ("pp", Some(Polypropylene)),
            ("ps", Some(Polystyrene)),
            ("pu", Some(Polyurethane)),
            ("pur", Some(Polyurethane)),
            ("pvc", Some(PolyvinylChloride)),
            ("polyvinylchloride", Some(PolyvinylChloride)),
        ];
        for (raw, target) in seeded {
            table.insert(raw, *target);
        }
        table
    }
}

impl SynonymTable {
    /// Add or replace a mapping. `None` rejects the label.
    pub fn insert(&mut self, raw: &str, target: Option<PolymerType>) {
        self.map.insert(fold(raw), target);
    }

    pub fn normalize(&self, raw: &str) -> Label {
        match self.map.get(&fold(raw)) {
            Some(Some(t)) => Label::Accepted(*t),
            _ => Label::Rejected,
        }
    }
}

/// Normalize with the default synonym table.
pub fn normalize_label(raw: &str) -> Label {
    SynonymTable::default().normalize(raw)
}
