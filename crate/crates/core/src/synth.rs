//! Seeded synthetic corpora and knowledge bases for tests and demos.
//!
//! Item texts are drawn from a small artificial vocabulary; positive
//! sentences reuse words of the mentioned item's question so that lexical
//! retrieval has signal, negative sentences use filler words only.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Document, Language, Mention, MentionType, Relation, RelationKind, Sentence, Subtype, UNK};
use crate::kb::{ItemLanguage, KnowledgeBase, SurveyItem};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub surveys: usize,
    pub groups_per_survey: usize,
    pub items_per_group: usize,
    pub docs: usize,
    pub sentences_per_doc: usize,
    /// Probability that a sentence mentions items.
    pub positive_rate: f64,
    /// Probability that a mention is `Unk`.
    pub unk_rate: f64,
    /// Probability that a mentioned item comes from a survey the document
    /// does not cite.
    pub uncited_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            surveys: 6,
            groups_per_survey: 4,
            items_per_group: 5,
            docs: 12,
            sentences_per_doc: 15,
            positive_rate: 0.2,
            unk_rate: 0.05,
            uncited_rate: 0.1,
        }
    }
}

const TOPIC_WORDS: usize = 400;
const FILLER_WORDS: usize = 120;

fn topic_word(i: usize) -> String {
    format!("t{i}")
}

fn filler_word(i: usize) -> String {
    format!("f{i}")
}

fn phrase(rng: &mut ChaCha8Rng, len: usize, word: fn(usize) -> String, vocab: usize) -> String {
    (0..len).map(|_| word(rng.gen_range(0..vocab))).collect::<Vec<_>>().join(" ")
}

pub fn synth_kb(cfg: &SynthConfig) -> KnowledgeBase {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut items = Vec::new();
    for s in 0..cfg.surveys {
        let survey = format!("ZA{}", 1000 + s);
        for g in 0..cfg.groups_per_survey {
            let group_words = phrase(&mut rng, 2, topic_word, TOPIC_WORDS);
            for n in 1..=cfg.items_per_group {
                let question = format!("{group_words} {}", phrase(&mut rng, 5, topic_word, TOPIC_WORDS));
                items.push(SurveyItem {
                    item_id: format!("{survey}_VarQ{g}_{n}"),
                    survey_id: survey.clone(),
                    label: phrase(&mut rng, 3, topic_word, TOPIC_WORDS),
                    question: Some(question),
                    sub_question: None,
                    item_category: if rng.gen_bool(0.7) { Some(phrase(&mut rng, 3, topic_word, TOPIC_WORDS)) } else { None },
                    answers: vec!["yes".into(), "no".into()],
                    topics: vec![],
                    language: if rng.gen_bool(0.5) { ItemLanguage::En } else { ItemLanguage::De },
                });
            }
        }
    }
    KnowledgeBase::from_items(items).expect("synthetic ids are unique")
}

pub fn synth_corpus(cfg: &SynthConfig, kb: &KnowledgeBase) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let surveys: Vec<&String> = kb.surveys().collect();
    let all_items: Vec<&SurveyItem> = kb.items().collect();
    let mut docs = Vec::with_capacity(cfg.docs);
    for d in 0..cfg.docs {
        let n_cited = rng.gen_range(1..=surveys.len().clamp(1, 3));
        let cited: BTreeSet<String> = surveys.choose_multiple(&mut rng, n_cited).map(|s| s.to_string()).collect();
        let cited_items: Vec<&SurveyItem> = all_items.iter().copied().filter(|i| cited.contains(&i.survey_id)).collect();
        let mut sentences = Vec::with_capacity(cfg.sentences_per_doc);
        for idx in 0..cfg.sentences_per_doc.max(1) {
            let len = rng.gen_range(4..10);
            let mut words = phrase(&mut rng, len, filler_word, FILLER_WORDS);
            let mut mentions = Vec::new();
            if rng.gen_bool(cfg.positive_rate) {
                let n = if rng.gen_bool(0.3) { 2 } else { 1 };
                for _ in 0..n {
                    let item_id = if rng.gen_bool(cfg.unk_rate) {
                        UNK.to_string()
                    } else {
                        let pool = if rng.gen_bool(cfg.uncited_rate) || cited_items.is_empty() { &all_items } else { &cited_items };
                        let item = pool.choose(&mut rng).expect("KB is non-empty");
                        let q: Vec<&str> = item.question.as_deref().unwrap_or(&item.label).split(' ').collect();
                        let take = rng.gen_range(2..=q.len().min(5));
                        words.push(' ');
                        words.push_str(&q.choose_multiple(&mut rng, take).copied().collect::<Vec<_>>().join(" "));
                        item.item_id.clone()
                    };
                    mentions.push(Mention {
                        item_id,
                        mention_type: *MentionType::ALL.choose(&mut rng).expect("non-empty"),
                        subtype: *Subtype::ALL.choose(&mut rng).expect("non-empty"),
                        confidence: rng.gen_range(1..=4),
                    });
                }
            }
            sentences.push(Sentence { idx, text: words, label: !mentions.is_empty(), mentions, relations: vec![], concepts: vec![] });
        }
        let n = sentences.len();
        for s in sentences.iter_mut() {
            let contextual = s.mentions.iter().any(|m| matches!(m.mention_type, MentionType::Implicit | MentionType::Other));
            if contextual && n > 1 && rng.gen_bool(0.5) {
                let target = if s.idx + 1 < n { s.idx + 1 } else { s.idx - 1 };
                s.relations.push(Relation { kind: RelationKind::ContextualDependence, target_idx: target, concept: None });
            }
        }
        docs.push(Document {
            doc_id: format!("doc{d:03}"),
            language: if rng.gen_bool(0.6) { Language::En } else { Language::De },
            survey_ids: cited,
            sentences,
        });
    }
    Corpus::new(docs).expect("synthetic documents are valid")
}

pub fn synth_dataset(cfg: &SynthConfig) -> (Corpus, KnowledgeBase) {
    let kb = synth_kb(cfg);
    let corpus = synth_corpus(cfg, &kb);
    (corpus, kb)
}
