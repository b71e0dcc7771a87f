//! Survey-item knowledge base.
//!
//! Items are keyed by a globally unique id of the form
//! `<survey_id>_Var<suffix>`. Items of one question group share a
//! non-numeric stem and differ in a trailing integer (`qe11_1`, `qe11_2`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemLanguage {
    En,
    De,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyItem {
    pub item_id: String,
    pub survey_id: String,
    pub label: String,
    #[serde(default)]
    pub question: Option<String>,
    #[serde(default)]
    pub sub_question: Option<String>,
    #[serde(default)]
    pub item_category: Option<String>,
    #[serde(default)]
    pub answers: Vec<String>,
    #[serde(default)]
    pub topics: Vec<String>,
    #[serde(default, with = "item_language")]
    pub language: ItemLanguage,
}

mod item_language {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::ItemLanguage;

    pub fn serialize<S: Serializer>(value: &ItemLanguage, s: S) -> Result<S::Ok, S::Error> {
        match value {
            ItemLanguage::Unknown => s.serialize_none(),
            other => other.serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ItemLanguage, D::Error> {
        let raw: Option<String> = Option::deserialize(d)?;
        Ok(match raw.as_deref().map(str::to_ascii_lowercase).as_deref() {
            Some("en") => ItemLanguage::En,
            Some("de") => ItemLanguage::De,
            _ => ItemLanguage::Unknown,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetadataField {
    Label,
    Question,
    SubQuestion,
    ItemCategory,
    Answers,
}

impl FromStr for MetadataField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "label" | "title" => Ok(MetadataField::Label),
            "question" => Ok(MetadataField::Question),
            "subquestion" => Ok(MetadataField::SubQuestion),
            "itemcategory" | "category" => Ok(MetadataField::ItemCategory),
            "answers" => Ok(MetadataField::Answers),
            other => Err(Error::invalid(format!("unknown metadata field `{other}`"))),
        }
    }
}

/// Which metadata fields make up an item's retrievable text, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbalizationSpec {
    fields: Vec<MetadataField>,
    separator: String,
}

impl VerbalizationSpec {
    pub fn new(fields: Vec<MetadataField>, separator: impl Into<String>) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::invalid("verbalization needs at least one field"));
        }
        Ok(Self { fields, separator: separator.into() })
    }

    pub fn all_fields() -> Self {
        Self {
            fields: vec![
                MetadataField::Label,
                MetadataField::Question,
                MetadataField::SubQuestion,
                MetadataField::ItemCategory,
                MetadataField::Answers,
            ],
            separator: " ".into(),
        }
    }

    /// Parses a comma-separated field list such as `label,question`.
    pub fn parse_fields(list: &str, separator: &str) -> Result<Self> {
        let fields = list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<Vec<_>>>()?;
        Self::new(fields, separator)
    }

    pub fn fields(&self) -> &[MetadataField] {
        &self.fields
    }

    pub fn separator(&self) -> &str {
        &self.separator
    }
}

impl Default for VerbalizationSpec {
    /// Label, question, item category and answers joined by a single space.
    fn default() -> Self {
        Self {
            fields: vec![MetadataField::Label, MetadataField::Question, MetadataField::ItemCategory, MetadataField::Answers],
            separator: " ".into(),
        }
    }
}

fn present(value: &Option<String>) -> Option<&str> {
    value.as_deref().filter(|v| !v.trim().is_empty())
}

impl SurveyItem {
    /// Non-empty value of a single-valued field.
    pub fn text_field(&self, field: MetadataField) -> Option<&str> {
        match field {
            MetadataField::Label => Some(self.label.as_str()).filter(|v| !v.trim().is_empty()),
            MetadataField::Question => present(&self.question),
            MetadataField::SubQuestion => present(&self.sub_question),
            MetadataField::ItemCategory => present(&self.item_category),
            MetadataField::Answers => None,
        }
    }
}

/// Joins the selected fields of `item` in the order given, skipping empty ones.
pub fn verbalize(item: &SurveyItem, spec: &VerbalizationSpec) -> Result<String> {
    let mut parts: Vec<&str> = Vec::new();
    for &field in &spec.fields {
        match field {
            MetadataField::Answers => parts.extend(item.answers.iter().map(String::as_str).filter(|a| !a.trim().is_empty())),
            other => parts.extend(item.text_field(other)),
        }
    }
    if parts.is_empty() {
        return Err(Error::invalid(format!("item `{}` has no content in the selected fields", item.item_id)));
    }
    Ok(parts.join(&spec.separator))
}

/// Survey id encoded in an item id: the part before `_Var`, else before the
/// first underscore.
pub fn survey_of_item(item_id: &str) -> &str {
    if let Some(pos) = item_id.find("_Var") {
        &item_id[..pos]
    } else if let Some(pos) = item_id.find('_') {
        &item_id[..pos]
    } else {
        item_id
    }
}

/// Splits an id at its last maximal run of trailing digits.
pub fn split_group_suffix(item_id: &str) -> (&str, Option<u64>) {
    let digits = item_id.bytes().rev().take_while(u8::is_ascii_digit).count();
    if digits == 0 {
        return (item_id, None);
    }
    let cut = item_id.len() - digits;
    match item_id[cut..].parse() {
        Ok(n) => (&item_id[..cut], Some(n)),
        Err(_) => (item_id, None),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    items: BTreeMap<String, SurveyItem>,
    by_survey: BTreeMap<String, BTreeSet<String>>,
}

impl KnowledgeBase {
    pub fn from_items<I: IntoIterator<Item = SurveyItem>>(items: I) -> Result<Self> {
        let mut kb = KnowledgeBase::default();
        for (i, item) in items.into_iter().enumerate() {
            kb.insert(item).map_err(|(field, message)| Error::record("<memory>", i + 1, field, message))?;
        }
        Ok(kb)
    }

    fn insert(&mut self, item: SurveyItem) -> std::result::Result<(), (String, String)> {
        if item.item_id.trim().is_empty() {
            return Err(("item_id".into(), "must be non-empty".into()));
        }
        if item.survey_id.trim().is_empty() {
            return Err(("survey_id".into(), "must be non-empty".into()));
        }
        if item.label.trim().is_empty() {
            return Err(("label".into(), "must be non-empty".into()));
        }
        if !item.item_id.starts_with(&item.survey_id) {
            return Err(("survey_id".into(), format!("`{}` is not a prefix of item id `{}`", item.survey_id, item.item_id)));
        }
        if self.items.contains_key(&item.item_id) {
            return Err(("item_id".into(), format!("duplicate item id `{}`", item.item_id)));
        }
        self.by_survey.entry(item.survey_id.clone()).or_default().insert(item.item_id.clone());
        self.items.insert(item.item_id.clone(), item);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn survey_count(&self) -> usize {
        self.by_survey.len()
    }

    pub fn get(&self, item_id: &str) -> Option<&SurveyItem> {
        self.items.get(item_id)
    }

    pub fn contains(&self, item_id: &str) -> bool {
        self.items.contains_key(item_id)
    }

    /// Items in ascending id order.
    pub fn items(&self) -> impl Iterator<Item = &SurveyItem> + '_ {
        self.items.values()
    }

    pub fn item_ids(&self) -> impl Iterator<Item = &String> + '_ {
        self.items.keys()
    }

    pub fn survey_items(&self, survey_id: &str) -> Option<&BTreeSet<String>> {
        self.by_survey.get(survey_id)
    }

    pub fn surveys(&self) -> impl Iterator<Item = &String> + '_ {
        self.by_survey.keys()
    }

    /// Verbalizes every representable item; items with no content in the
    /// selected fields are left out.
    pub fn verbalize_all(&self, spec: &VerbalizationSpec) -> BTreeMap<String, String> {
        self.items.values().filter_map(|item| verbalize(item, spec).ok().map(|t| (item.item_id.clone(), t))).collect()
    }
}

pub fn load_kb(path: impl AsRef<Path>) -> Result<KnowledgeBase> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_kb(BufReader::new(file), &path.display().to_string())
}

pub fn parse_kb<R: BufRead>(reader: R, origin: &str) -> Result<KnowledgeBase> {
    let mut kb = KnowledgeBase::default();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| Error::record(origin, lineno, "<record>", e.to_string()))?;
        for required in ["item_id", "survey_id", "label"] {
            if !value.get(required).is_some_and(serde_json::Value::is_string) {
                return Err(Error::record(origin, lineno, required, "missing or not a string"));
            }
        }
        let item: SurveyItem = serde_json::from_value(value).map_err(|e| Error::record(origin, lineno, "<record>", e.to_string()))?;
        kb.insert(item).map_err(|(field, message)| Error::record(origin, lineno, field, message))?;
    }
    Ok(kb)
}

pub fn write_kb<W: Write>(kb: &KnowledgeBase, mut out: W) -> Result<()> {
    for item in kb.items() {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

fn dedup_key(item: &SurveyItem) -> String {
    let text = verbalize(item, &VerbalizationSpec::all_fields()).unwrap_or_default();
    text.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

/// Collapses items of the same survey whose full verbalization matches after
/// case folding and whitespace normalization. The smallest id survives.
pub fn dedup_items(kb: &KnowledgeBase) -> KnowledgeBase {
    let mut keep: BTreeSet<&str> = BTreeSet::new();
    for ids in kb.by_survey.values() {
        let mut seen: BTreeSet<String> = BTreeSet::new();
        // ascending id order, so the first occurrence is the smallest id
        for id in ids {
            if seen.insert(dedup_key(&kb.items[id])) {
                keep.insert(id.as_str());
            }
        }
    }
    let mut out = KnowledgeBase::default();
    for id in keep {
        out.insert(kb.items[id].clone()).expect("items already validated");
    }
    out
}

/// Candidate items for a document, with cited surveys missing from the KB.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CandidateSet {
    pub items: BTreeSet<String>,
    pub missing_surveys: Vec<String>,
}

/// Restricts candidates to items of surveys the document cites. With
/// `enabled == false` the whole KB is returned.
pub fn filter_by_citations(kb: &KnowledgeBase, doc: &Document, enabled: bool) -> CandidateSet {
    if !enabled {
        return CandidateSet { items: kb.items.keys().cloned().collect(), missing_surveys: Vec::new() };
    }
    let mut out = CandidateSet::default();
    for survey in &doc.survey_ids {
        match kb.by_survey.get(survey) {
            Some(ids) => out.items.extend(ids.iter().cloned()),
            None => {
                log::warn!("document `{}` cites survey `{survey}` absent from the KB", doc.doc_id);
                out.missing_surveys.push(survey.clone());
            }
        }
    }
    out
}

/// Items of the same question group within `radius` of `item_id`'s trailing
/// number (per side), the item itself included.
pub fn expand_group_neighbors(item_id: &str, radius: u64, kb: &KnowledgeBase) -> Result<BTreeSet<String>> {
    let item = kb.get(item_id).ok_or_else(|| Error::Unknown { kind: "item_id", id: item_id.to_string() })?;
    let mut out = BTreeSet::from([item_id.to_string()]);
    let (stem, Some(number)) = split_group_suffix(item_id) else {
        return Ok(out);
    };
    if radius == 0 {
        return Ok(out);
    }
    let siblings = kb.by_survey.get(&item.survey_id).into_iter().flatten();
    for other in siblings {
        if let (other_stem, Some(n)) = split_group_suffix(other) {
            if other_stem == stem && n.abs_diff(number) <= radius {
                out.insert(other.clone());
            }
        }
    }
    Ok(out)
}

impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} items from {} surveys", self.len(), self.survey_count())
    }
}
