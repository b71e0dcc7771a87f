use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde_json::Value;

use super::Corpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitName {
    /// Test documents drawn from different surveys than training.
    Diff,
    Rand,
}

impl FromStr for SplitName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "diff" => Ok(SplitName::Diff),
            "rand" => Ok(SplitName::Rand),
            other => Err(Error::invalid(format!("unknown split name `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SplitPart {
    Train,
    Dev,
    TestEn,
    TestDe,
}

impl SplitPart {
    pub const ALL: [SplitPart; 4] = [SplitPart::Train, SplitPart::Dev, SplitPart::TestEn, SplitPart::TestDe];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitPart::Train => "train",
            SplitPart::Dev => "dev",
            SplitPart::TestEn => "test_en",
            SplitPart::TestDe => "test_de",
        }
    }
}

impl fmt::Display for SplitPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitPart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "train" => Ok(SplitPart::Train),
            "dev" | "validation" => Ok(SplitPart::Dev),
            "test_en" => Ok(SplitPart::TestEn),
            "test_de" => Ok(SplitPart::TestDe),
            other => Err(Error::invalid(format!("unknown split part `{other}`"))),
        }
    }
}

/// Document-level partition of a corpus into four disjoint parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    pub name: SplitName,
    pub train: BTreeSet<String>,
    pub dev: BTreeSet<String>,
    pub test_en: BTreeSet<String>,
    pub test_de: BTreeSet<String>,
}

impl SplitSpec {
    pub fn new(
        name: SplitName,
        train: BTreeSet<String>,
        dev: BTreeSet<String>,
        test_en: BTreeSet<String>,
        test_de: BTreeSet<String>,
    ) -> Result<Self> {
        let spec = Self { name, train, dev, test_en, test_de };
        for (i, a) in SplitPart::ALL.iter().enumerate() {
            for b in &SplitPart::ALL[i + 1..] {
                if let Some(id) = spec.part(*a).intersection(spec.part(*b)).next() {
                    return Err(Error::invalid(format!("document `{id}` appears in both `{a}` and `{b}`")));
                }
            }
        }
        Ok(spec)
    }

    pub fn part(&self, part: SplitPart) -> &BTreeSet<String> {
        match part {
            SplitPart::Train => &self.train,
            SplitPart::Dev => &self.dev,
            SplitPart::TestEn => &self.test_en,
            SplitPart::TestDe => &self.test_de,
        }
    }

    pub fn all_ids(&self) -> BTreeSet<String> {
        SplitPart::ALL.iter().flat_map(|p| self.part(*p).iter().cloned()).collect()
    }

    pub fn part_of(&self, doc_id: &str) -> Option<SplitPart> {
        SplitPart::ALL.into_iter().find(|p| self.part(*p).contains(doc_id))
    }

    /// Checks that the split names exactly the corpus documents.
    pub fn check_covers(&self, corpus: &Corpus) -> Result<()> {
        let ids = self.all_ids();
        if let Some(missing) = ids.iter().find(|id| corpus.get(id).is_none()) {
            return Err(Error::Unknown { kind: "doc_id", id: missing.clone() });
        }
        if let Some(doc) = corpus.documents().iter().find(|d| !ids.contains(&d.doc_id)) {
            return Err(Error::invalid(format!("document `{}` is not assigned to any split part", doc.doc_id)));
        }
        Ok(())
    }
}

pub fn load_split(path: impl AsRef<Path>, name: SplitName) -> Result<SplitSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_split(&text, name)
}

/// Parses `{"train": [...], "dev": [...], "test_en": [...], "test_de": [...]}`.
/// Absent parts are empty.
pub fn parse_split(text: &str, name: SplitName) -> Result<SplitSpec> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value.as_object().ok_or_else(|| Error::invalid("split file must hold a JSON object"))?;
    let mut parts: [BTreeSet<String>; 4] = Default::default();
    for (key, ids) in obj {
        let part: SplitPart = key.parse()?;
        let ids = ids.as_array().ok_or_else(|| Error::invalid(format!("split part `{key}` must be an array")))?;
        let slot = &mut parts[part as usize];
        for id in ids {
            let id = id.as_str().ok_or_else(|| Error::invalid(format!("split part `{key}` holds a non-string id")))?;
            if !slot.insert(id.to_string()) {
                return Err(Error::Duplicate { kind: "doc_id", id: id.to_string() });
            }
        }
    }
    let [train, dev, test_en, test_de] = parts;
    SplitSpec::new(name, train, dev, test_en, test_de)
}
