//! Annotated publication corpus: data model, JSONL loading and writing,
//! document-level splits, dataset statistics and annotator agreement.
//!
//! A corpus file holds one document per line. Every sentence carries its
//! binary label together with the survey-item mentions that justify it, so
//! the loader rejects any record where the two disagree.

mod agreement;
mod split;
mod stats;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub use agreement::{cohens_kappa, krippendorff_alpha, SetDistance};
pub use split::{load_split, parse_split, SplitName, SplitPart, SplitSpec};
pub use stats::{corpus_stats, CorpusStats, CrossTab, CrossTabRow, ItemCounts, StatsRow, TableAxis};

/// Reserved item id for mentions that cannot be resolved against the KB.
pub const UNK: &str = "Unk";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    De,
}

impl Language {
    pub fn as_str(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::De => "de",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "en" | "eng" | "english" => Ok(Language::En),
            "de" | "deu" | "ger" | "german" => Ok(Language::De),
            other => Err(Error::invalid(format!("unknown language `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MentionType {
    Explicit,
    Implicit,
    Other,
}

impl MentionType {
    pub const ALL: [MentionType; 3] = [MentionType::Explicit, MentionType::Implicit, MentionType::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            MentionType::Explicit => "explicit",
            MentionType::Implicit => "implicit",
            MentionType::Other => "other",
        }
    }
}

impl FromStr for MentionType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match normalize_tag(s).as_str() {
            "explicit" => Ok(MentionType::Explicit),
            "implicit" => Ok(MentionType::Implicit),
            "other" => Ok(MentionType::Other),
            other => Err(Error::invalid(format!("unknown mention type `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subtype {
    Quotation,
    Paraphrase,
    Citation,
    LexicalInference,
    Unspecified,
    Other,
}

impl Subtype {
    pub const ALL: [Subtype; 6] =
        [Subtype::Quotation, Subtype::Paraphrase, Subtype::Citation, Subtype::LexicalInference, Subtype::Unspecified, Subtype::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Subtype::Quotation => "quotation",
            Subtype::Paraphrase => "paraphrase",
            Subtype::Citation => "citation",
            Subtype::LexicalInference => "lexical_inference",
            Subtype::Unspecified => "unspecified",
            Subtype::Other => "other",
        }
    }
}

impl FromStr for Subtype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match normalize_tag(s).as_str() {
            "quotation" => Ok(Subtype::Quotation),
            "paraphrase" => Ok(Subtype::Paraphrase),
            "citation" => Ok(Subtype::Citation),
            "lexicalinference" => Ok(Subtype::LexicalInference),
            "unspecified" => Ok(Subtype::Unspecified),
            "other" => Ok(Subtype::Other),
            other => Err(Error::invalid(format!("unknown subtype `{other}`"))),
        }
    }
}

/// Lowercase and drop separators so "Lexical Inference", "lexical_inference"
/// and "LexicalInference" all parse alike.
fn normalize_tag(s: &str) -> String {
    s.chars().filter(|c| !matches!(c, ' ' | '_' | '-')).flat_map(char::to_lowercase).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub item_id: String,
    #[serde(rename = "type")]
    pub mention_type: MentionType,
    pub subtype: Subtype,
    pub confidence: u8,
}

impl Mention {
    pub fn is_unk(&self) -> bool {
        self.item_id == UNK
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    ContextualDependence,
    Operationalization,
}

impl FromStr for RelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match normalize_tag(s).as_str() {
            "contextualdependence" | "contextdependence" | "context" => Ok(RelationKind::ContextualDependence),
            "operationalization" | "operationalisation" => Ok(RelationKind::Operationalization),
            other => Err(Error::invalid(format!("unknown relation kind `{other}`"))),
        }
    }
}

/// A link stored on its source sentence. Operationalization links may name a
/// concept as their source instead of the sentence itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub kind: RelationKind,
    pub target_idx: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concept: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub idx: usize,
    pub text: String,
    #[serde(rename = "is_variable", with = "binary_label")]
    pub label: bool,
    pub mentions: Vec<Mention>,
    pub relations: Vec<Relation>,
    pub concepts: Vec<String>,
}

impl Sentence {
    /// Resolvable gold items: mention ids without the `Unk` placeholder.
    pub fn gold_items(&self) -> BTreeSet<String> {
        self.mentions.iter().filter(|m| !m.is_unk()).map(|m| m.item_id.clone()).collect()
    }

    /// Targets of contextual-dependence links, ascending and deduplicated.
    pub fn context_targets(&self) -> Vec<usize> {
        let targets: BTreeSet<usize> = self.relations.iter().filter(|r| r.kind == RelationKind::ContextualDependence).map(|r| r.target_idx).collect();
        targets.into_iter().collect()
    }
}

mod binary_label {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(serde::de::Error::custom(format!("label must be 0 or 1, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub language: Language,
    pub survey_ids: BTreeSet<String>,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn sentence(&self, idx: usize) -> Option<&Sentence> {
        self.sentences.get(idx)
    }

    pub fn key(&self, idx: usize) -> SentenceKey {
        SentenceKey::new(&self.doc_id, idx)
    }

    /// Unique resolvable items mentioned anywhere in the document.
    pub fn gold_items(&self) -> BTreeSet<String> {
        self.sentences.iter().flat_map(|s| s.gold_items()).collect()
    }

    fn validate(&self) -> std::result::Result<(), (String, String)> {
        if self.doc_id.trim().is_empty() {
            return Err(("doc_id".into(), "must be non-empty".into()));
        }
        let n = self.sentences.len();
        for (pos, sentence) in self.sentences.iter().enumerate() {
            let at = |field: &str| format!("sentences[{pos}].{field}");
            if sentence.idx != pos {
                return Err((at("idx"), format!("expected {pos}, found {}", sentence.idx)));
            }
            if sentence.text.trim().is_empty() {
                return Err((at("text"), "must be non-empty after trimming".into()));
            }
            if sentence.label != !sentence.mentions.is_empty() {
                return Err((
                    at("is_variable"),
                    format!("label {} inconsistent with {} mention(s)", u8::from(sentence.label), sentence.mentions.len()),
                ));
            }
            for (m, mention) in sentence.mentions.iter().enumerate() {
                if mention.item_id.trim().is_empty() {
                    return Err((at(&format!("mentions[{m}].item_id")), "must be non-empty".into()));
                }
                if mention.confidence > 4 {
                    return Err((at(&format!("mentions[{m}].confidence")), format!("must be within 0..=4, got {}", mention.confidence)));
                }
            }
            for (r, relation) in sentence.relations.iter().enumerate() {
                if relation.target_idx >= n {
                    return Err((at(&format!("relations[{r}].target_idx")), format!("{} outside document of {n} sentences", relation.target_idx)));
                }
                if relation.kind == RelationKind::ContextualDependence
                    && !sentence.mentions.iter().any(|m| matches!(m.mention_type, MentionType::Implicit | MentionType::Other))
                {
                    return Err((at(&format!("relations[{r}].kind")), "contextual dependence requires an implicit or other mention".into()));
                }
            }
        }
        Ok(())
    }
}

/// Identifies a sentence across the corpus; rendered as `doc_id#sent_idx`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SentenceKey {
    pub doc_id: String,
    pub sent_idx: usize,
}

impl SentenceKey {
    pub fn new(doc_id: &str, sent_idx: usize) -> Self {
        Self { doc_id: doc_id.to_string(), sent_idx }
    }

    /// Splits at the last `#`, so document ids may themselves contain `#`.
    pub fn parse(query_id: &str) -> Result<Self> {
        let (doc, idx) = query_id.rsplit_once('#').ok_or_else(|| Error::invalid(format!("query id `{query_id}` lacks `#`")))?;
        let sent_idx = idx.parse().map_err(|_| Error::invalid(format!("query id `{query_id}` has a non-integer index")))?;
        Ok(Self::new(doc, sent_idx))
    }
}

impl fmt::Display for SentenceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.doc_id, self.sent_idx)
    }
}

/// An ordered, validated collection of documents. Immutable once built.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
    by_id: HashMap<String, usize>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(documents.len());
        for (pos, doc) in documents.iter().enumerate() {
            doc.validate().map_err(|(field, message)| Error::record("<memory>", pos + 1, field, message))?;
            if by_id.insert(doc.doc_id.clone(), pos).is_some() {
                return Err(Error::Duplicate { kind: "doc_id", id: doc.doc_id.clone() });
            }
        }
        Ok(Self { documents, by_id })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.by_id.get(doc_id).map(|&i| &self.documents[i])
    }

    pub fn sentence(&self, key: &SentenceKey) -> Option<&Sentence> {
        self.get(&key.doc_id)?.sentence(key.sent_idx)
    }

    pub fn sentence_count(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }

    pub fn positive_count(&self) -> usize {
        self.sentences().filter(|(_, s)| s.label).count()
    }

    /// All sentences in serialized order.
    pub fn sentences(&self) -> impl Iterator<Item = (&Document, &Sentence)> + '_ {
        self.documents.iter().flat_map(|d| d.sentences.iter().map(move |s| (d, s)))
    }

    /// Documents with the given ids, in corpus order. Unknown ids are an error.
    pub fn subset<'a, I>(&self, ids: I) -> Result<Corpus>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut wanted = BTreeSet::new();
        for id in ids {
            if !self.by_id.contains_key(id) {
                return Err(Error::Unknown { kind: "doc_id", id: id.clone() });
            }
            wanted.insert(id.as_str());
        }
        let docs = self.documents.iter().filter(|d| wanted.contains(d.doc_id.as_str())).cloned().collect();
        Corpus::new(docs)
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(BufReader::new(file), &path.display().to_string())
}

/// Parses JSONL corpus records. `origin` labels error messages.
pub fn parse_corpus<R: BufRead>(reader: R, origin: &str) -> Result<Corpus> {
    let mut documents = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| Error::record(origin, lineno, "<record>", e.to_string()))?;
        let doc = document_from_value(&value).map_err(|(field, message)| Error::record(origin, lineno, field, message))?;
        doc.validate().map_err(|(field, message)| Error::record(origin, lineno, field, message))?;
        if let Some(first) = seen.insert(doc.doc_id.clone(), lineno) {
            return Err(Error::record(origin, lineno, "doc_id", format!("duplicate doc_id `{}` (first seen on line {first})", doc.doc_id)));
        }
        documents.push(doc);
    }
    Corpus::new(documents)
}

pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    for doc in corpus.documents() {
        serde_json::to_writer(&mut out, doc)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

type FieldResult<T> = std::result::Result<T, (String, String)>;

fn field<'a>(obj: &'a Map<String, Value>, name: &str, path: &str) -> FieldResult<&'a Value> {
    obj.get(name).ok_or_else(|| (join(path, name), "missing".to_string()))
}

fn join(path: &str, name: &str) -> String {
    if path.is_empty() {
        name.to_string()
    } else {
        format!("{path}.{name}")
    }
}

fn as_str<'a>(v: &'a Value, path: &str) -> FieldResult<&'a str> {
    v.as_str().ok_or_else(|| (path.to_string(), format!("expected string, found {v}")))
}

fn as_array<'a>(v: &'a Value, path: &str) -> FieldResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| (path.to_string(), format!("expected array, found {v}")))
}

fn as_object<'a>(v: &'a Value, path: &str) -> FieldResult<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| (path.to_string(), "expected object".to_string()))
}

fn as_uint(v: &Value, path: &str) -> FieldResult<u64> {
    v.as_u64().ok_or_else(|| (path.to_string(), format!("expected non-negative integer, found {v}")))
}

fn optional_array<'a>(obj: &'a Map<String, Value>, name: &str, path: &str) -> FieldResult<&'a [Value]> {
    match obj.get(name) {
        None | Some(Value::Null) => Ok(&[]),
        Some(v) => as_array(v, &join(path, name)).map(Vec::as_slice),
    }
}

fn parse_tag<T: FromStr<Err = Error>>(v: &Value, path: &str) -> FieldResult<T> {
    as_str(v, path)?.parse().map_err(|e: Error| (path.to_string(), e.to_string()))
}

fn document_from_value(value: &Value) -> FieldResult<Document> {
    let obj = as_object(value, "<record>")?;
    let doc_id = as_str(field(obj, "doc_id", "")?, "doc_id")?.to_string();
    let language = parse_tag(field(obj, "language", "")?, "language")?;
    let mut survey_ids = BTreeSet::new();
    for (i, s) in optional_array(obj, "survey_ids", "")?.iter().enumerate() {
        survey_ids.insert(as_str(s, &format!("survey_ids[{i}]"))?.to_string());
    }
    let mut sentences = Vec::new();
    for (i, s) in as_array(field(obj, "sentences", "")?, "sentences")?.iter().enumerate() {
        sentences.push(sentence_from_value(s, &format!("sentences[{i}]"))?);
    }
    Ok(Document { doc_id, language, survey_ids, sentences })
}

fn sentence_from_value(value: &Value, path: &str) -> FieldResult<Sentence> {
    let obj = as_object(value, path)?;
    let idx = as_uint(field(obj, "idx", path)?, &join(path, "idx"))? as usize;
    let text = as_str(field(obj, "text", path)?, &join(path, "text"))?.to_string();
    let label = match as_uint(field(obj, "is_variable", path)?, &join(path, "is_variable"))? {
        0 => false,
        1 => true,
        other => return Err((join(path, "is_variable"), format!("must be 0 or 1, got {other}"))),
    };
    let mut mentions = Vec::new();
    for (i, m) in optional_array(obj, "mentions", path)?.iter().enumerate() {
        let mpath = format!("{path}.mentions[{i}]");
        let mobj = as_object(m, &mpath)?;
        let confidence = as_uint(field(mobj, "confidence", &mpath)?, &join(&mpath, "confidence"))?;
        mentions.push(Mention {
            item_id: as_str(field(mobj, "item_id", &mpath)?, &join(&mpath, "item_id"))?.to_string(),
            mention_type: parse_tag(field(mobj, "type", &mpath)?, &join(&mpath, "type"))?,
            subtype: parse_tag(field(mobj, "subtype", &mpath)?, &join(&mpath, "subtype"))?,
            confidence: u8::try_from(confidence).map_err(|_| (join(&mpath, "confidence"), format!("out of range: {confidence}")))?,
        });
    }
    let mut relations = Vec::new();
    for (i, r) in optional_array(obj, "relations", path)?.iter().enumerate() {
        let rpath = format!("{path}.relations[{i}]");
        let robj = as_object(r, &rpath)?;
        let concept = match robj.get("concept") {
            None | Some(Value::Null) => None,
            Some(v) => Some(as_str(v, &join(&rpath, "concept"))?.to_string()),
        };
        relations.push(Relation {
            kind: parse_tag(field(robj, "kind", &rpath)?, &join(&rpath, "kind"))?,
            target_idx: as_uint(field(robj, "target_idx", &rpath)?, &join(&rpath, "target_idx"))? as usize,
            concept,
        });
    }
    let mut concepts = Vec::new();
    for (i, c) in optional_array(obj, "concepts", path)?.iter().enumerate() {
        concepts.push(as_str(c, &format!("{path}.concepts[{i}]"))?.to_string());
    }
    Ok(Sentence { idx, text, label, mentions, relations, concepts })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn doc_line(doc_id: &str, labels: &[bool]) -> String {
        let sentences: Vec<Value> = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let mentions = if l {
                    serde_json::json!([{"item_id": "ZA1_Var1", "type": "explicit", "subtype": "quotation", "confidence": 4}])
                } else {
                    serde_json::json!([])
                };
                serde_json::json!({"idx": i, "text": format!("Sentence {i}."), "is_variable": u8::from(l),
                    "mentions": mentions, "relations": [], "concepts": []})
            })
            .collect();
        serde_json::json!({"doc_id": doc_id, "language": "en", "survey_ids": ["ZA1"], "sentences": sentences}).to_string()
    }

    #[test]
    fn loads_single_document() {
        let line = doc_line("d1", &[false, true, false]);
        let corpus = parse_corpus(line.as_bytes(), "mem").unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(corpus.sentence_count(), 3);
        assert_eq!(corpus.positive_count(), 1);
    }

    #[test]
    fn rejects_label_without_mentions() {
        let line = r#"{"doc_id":"d1","language":"en","survey_ids":[],"sentences":[{"idx":0,"text":"x","is_variable":1,"mentions":[],"relations":[],"concepts":[]}]}"#;
        let text = format!("{}\n{line}\n", doc_line("d0", &[false]));
        let err = parse_corpus(text.as_bytes(), "mem").unwrap_err().to_string();
        assert!(err.contains("mem:2"), "{err}");
        assert!(err.contains("is_variable"), "{err}");
    }

    #[test]
    fn rejects_duplicate_doc_ids() {
        let text = format!("{}\n{}\n", doc_line("d1", &[false]), doc_line("d1", &[true]));
        let err = parse_corpus(text.as_bytes(), "mem").unwrap_err().to_string();
        assert!(err.contains("duplicate doc_id"), "{err}");
    }

    #[test]
    fn malformed_field_is_named() {
        let line = r#"{"doc_id":"d1","language":"fr","survey_ids":[],"sentences":[]}"#;
        let err = parse_corpus(line.as_bytes(), "mem").unwrap_err().to_string();
        assert!(err.contains("mem:1") && err.contains("language"), "{err}");

        let line = r#"{"doc_id":"d1","language":"en","sentences":[{"idx":0,"text":"a","is_variable":1,"mentions":[{"item_id":"x","type":"explicit","subtype":"quotation","confidence":9}]}]}"#;
        let err = parse_corpus(line.as_bytes(), "mem").unwrap_err().to_string();
        assert!(err.contains("sentences[0].mentions[0].confidence"), "{err}");
    }

    #[test]
    fn rejects_non_contiguous_indices_and_blank_text() {
        let line = r#"{"doc_id":"d1","language":"en","sentences":[{"idx":1,"text":"a","is_variable":0}]}"#;
        assert!(parse_corpus(line.as_bytes(), "mem").is_err());
        let line = r#"{"doc_id":"d1","language":"en","sentences":[{"idx":0,"text":"  ","is_variable":0}]}"#;
        assert!(parse_corpus(line.as_bytes(), "mem").is_err());
    }

    #[test]
    fn contextual_dependence_needs_implicit_or_other() {
        let line = r#"{"doc_id":"d1","language":"en","sentences":[
            {"idx":0,"text":"a","is_variable":1,"mentions":[{"item_id":"x","type":"explicit","subtype":"quotation","confidence":1}],
             "relations":[{"kind":"contextual_dependence","target_idx":1}]},
            {"idx":1,"text":"b","is_variable":0}]}"#
            .replace('\n', "");
        assert!(parse_corpus(line.as_bytes(), "mem").is_err());
        let ok = line.replace("\"explicit\"", "\"implicit\"");
        assert!(parse_corpus(ok.as_bytes(), "mem").is_ok());
    }

    #[test]
    fn subtype_spellings() {
        for s in ["lexical_inference", "Lexical Inference", "LexicalInference"] {
            assert_eq!(s.parse::<Subtype>().unwrap(), Subtype::LexicalInference);
        }
    }

    #[test]
    fn sentence_key_round_trip() {
        let key = SentenceKey::new("doc#7", 12);
        assert_eq!(key.to_string(), "doc#7#12");
        assert_eq!(SentenceKey::parse("doc#7#12").unwrap(), key);
        assert!(SentenceKey::parse("nohash").is_err());
    }

    #[test]
    fn write_then_parse_is_equal() {
        let text = format!("{}\n{}\n", doc_line("a", &[true, false]), doc_line("b", &[false]));
        let corpus = parse_corpus(text.as_bytes(), "mem").unwrap();
        let mut buf = Vec::new();
        write_corpus(&corpus, &mut buf).unwrap();
        assert_eq!(parse_corpus(buf.as_slice(), "mem").unwrap(), corpus);
    }
}
