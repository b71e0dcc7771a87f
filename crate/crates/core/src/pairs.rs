//! Pseudo-labeled sentence pairs for training bi-encoders: metadata pairs
//! (an item's label with its question or category) and synthetic pairs (an
//! externally generated sentence with one metadata field of its item).

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::within_distance;
use crate::kb::{KnowledgeBase, SurveyItem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairSource {
    Mp,
    Sp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub left: String,
    pub right: String,
    pub item_id: String,
    pub source: PairSource,
}

/// One externally generated sentence for a KB item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedSentence {
    pub item_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairGenConfig {
    pub seed: u64,
    pub mp_size: usize,
    pub sp_size: usize,
    /// Evaluation sentences that emitted pairs must not resemble.
    pub dedup_corpus: Vec<String>,
    /// Both sides must be at least this edit distance (case-folded) from
    /// every dedup sentence.
    pub min_levenshtein: usize,
    /// Train and validation shares.
    pub split_ratio: (u64, u64),
}

impl Default for PairGenConfig {
    fn default() -> Self {
        Self { seed: 0, mp_size: 200_000, sp_size: 400_000, dedup_corpus: Vec::new(), min_levenshtein: 10, split_ratio: (200, 15) }
    }
}

pub const MIN_WORDS: usize = 3;

pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

fn fold(text: &str) -> Vec<char> {
    text.trim().to_lowercase().chars().collect()
}

/// The pair filters: word counts, distinct sides, distance from the dedup
/// corpus. `dedup` holds case-folded dedup sentences.
struct PairFilter {
    dedup: Vec<Vec<char>>,
    min_levenshtein: usize,
}

impl PairFilter {
    fn new(cfg: &PairGenConfig) -> Self {
        Self { dedup: cfg.dedup_corpus.iter().map(|s| fold(s)).collect(), min_levenshtein: cfg.min_levenshtein }
    }

    fn near_duplicate(&self, text: &str) -> bool {
        if self.min_levenshtein == 0 {
            return false;
        }
        let t = fold(text);
        self.dedup.iter().any(|d| within_distance(&t, d, self.min_levenshtein))
    }

    fn accepts(&self, left: &str, right: &str) -> bool {
        word_count(left) >= MIN_WORDS
            && word_count(right) >= MIN_WORDS
            && left.trim() != right.trim()
            && !self.near_duplicate(left)
            && !self.near_duplicate(right)
    }
}

/// Checks candidates in parallel, chunk by chunk, and keeps the first
/// `limit` accepted ones in candidate order.
fn take_accepted(candidates: Vec<PairRecord>, filter: &PairFilter, limit: usize, what: &str) -> Vec<PairRecord> {
    const CHUNK: usize = 4096;
    let mut out = Vec::with_capacity(limit.min(candidates.len()));
    let mut rest = candidates.into_iter().peekable();
    while out.len() < limit && rest.peek().is_some() {
        let chunk: Vec<PairRecord> = rest.by_ref().take(CHUNK).collect();
        let keep: Vec<bool> = chunk.par_iter().map(|p| filter.accepts(&p.left, &p.right)).collect();
        out.extend(chunk.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).take(limit - out.len()));
    }
    if out.len() < limit {
        log::warn!("{what}: only {} of {limit} requested pairs passed the filters", out.len());
    }
    out
}

fn present(text: &Option<String>) -> Option<&str> {
    text.as_deref().filter(|t| !t.trim().is_empty())
}

/// Metadata pairs: items in seeded random order, label on the left and the
/// question or item category, picked uniformly, on the right.
pub fn generate_mp(kb: &KnowledgeBase, cfg: &PairGenConfig) -> Vec<PairRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut items: Vec<&SurveyItem> = kb.items().collect();
    items.shuffle(&mut rng);
    let candidates = items
        .into_iter()
        .filter_map(|item| {
            let options: Vec<&str> = [present(&item.question), present(&item.item_category)].into_iter().flatten().collect();
            let right = options.choose(&mut rng)?;
            Some(PairRecord { left: item.label.clone(), right: right.to_string(), item_id: item.item_id.clone(), source: PairSource::Mp })
        })
        .collect();
    take_accepted(candidates, &PairFilter::new(cfg), cfg.mp_size, "metadata pairs")
}

/// Synthetic pairs: generated sentences in seeded random order, each with
/// one present metadata field (label, question or item category) of its
/// item. Sentences of unknown items are skipped.
pub fn generate_sp(generated: &[GeneratedSentence], kb: &KnowledgeBase, cfg: &PairGenConfig) -> Vec<PairRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<&GeneratedSentence> = generated.iter().collect();
    order.shuffle(&mut rng);
    let candidates = order
        .into_iter()
        .filter_map(|g| {
            let Some(item) = kb.get(&g.item_id) else {
                log::warn!("generated sentence for unknown item `{}` skipped", g.item_id);
                return None;
            };
            let options: Vec<&str> = [Some(item.label.as_str()), present(&item.question), present(&item.item_category)]
                .into_iter()
                .flatten()
                .filter(|t| !t.trim().is_empty())
                .collect();
            let right = options.choose(&mut rng)?;
            Some(PairRecord { left: g.text.clone(), right: right.to_string(), item_id: item.item_id.clone(), source: PairSource::Sp })
        })
        .collect();
    take_accepted(candidates, &PairFilter::new(cfg), cfg.sp_size, "synthetic pairs")
}

/// Seeded shuffle, then the first `floor(n * train / (train + val))`
/// records form the training part.
pub fn split_pairs(pairs: &[PairRecord], ratio: (u64, u64), seed: u64) -> Result<(Vec<PairRecord>, Vec<PairRecord>)> {
    let (a, b) = ratio;
    if a == 0 || b == 0 {
        return Err(Error::invalid(format!("split ratio {a}:{b} needs positive parts")));
    }
    let mut shuffled = pairs.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (shuffled.len() as u128 * a as u128 / (a as u128 + b as u128)) as usize;
    let validation = shuffled.split_off(n_train);
    Ok((shuffled, validation))
}

pub fn write_pairs<W: Write>(pairs: &[PairRecord], mut out: W) -> Result<()> {
    for p in pairs {
        serde_json::to_writer(&mut out, p)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

pub fn parse_pairs<R: BufRead>(reader: R, origin: &str) -> Result<Vec<PairRecord>> {
    parse_jsonl(reader, origin)
}

pub fn load_generated(path: impl AsRef<Path>) -> Result<Vec<GeneratedSentence>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_generated(BufReader::new(file), &path.display().to_string())
}

pub fn parse_generated<R: BufRead>(reader: R, origin: &str) -> Result<Vec<GeneratedSentence>> {
    parse_jsonl(reader, origin)
}

fn parse_jsonl<T: serde::de::DeserializeOwned, R: BufRead>(reader: R, origin: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::record(origin, i + 1, "<record>", e.to_string()))?);
    }
    Ok(out)
}
