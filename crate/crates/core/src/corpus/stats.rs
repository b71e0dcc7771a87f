use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::Serialize;

use super::{Corpus, Document, MentionType, Sentence, SplitPart, SplitSpec, Subtype};
use crate::error::{Error, Result};
use crate::kb::survey_of_item;

/// Per-part dataset counts. `items` counts mentions of resolvable items;
/// `unique_items` and `surveys` count distinct ids, so the total row is not
/// the sum of the part rows for those two columns.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StatsRow {
    pub part: String,
    pub positive: usize,
    pub negative: usize,
    pub items: usize,
    pub unique_items: usize,
    pub surveys: usize,
    pub papers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableAxis {
    Type,
    Subtype,
}

/// One category row of the type/subtype table. Count arrays are ordered
/// as train+dev, test_en, test_de, total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossTabRow {
    pub category: String,
    pub sentences: [usize; 4],
    pub mentions: [usize; 4],
}

/// Sentence- and mention-level breakdown along one annotation axis.
///
/// A sentence whose mentions all share one category is counted in that row;
/// otherwise it lands in `mixed`. Mentions are counted individually,
/// including `Unk` ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossTab {
    pub axis: TableAxis,
    pub rows: Vec<CrossTabRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    /// train, dev, test_en, test_de, total.
    pub rows: Vec<StatsRow>,
    pub types: CrossTab,
    pub subtypes: CrossTab,
    /// Positive sentences with exactly one mention (`Unk` included) versus
    /// several, per group.
    pub item_counts: ItemCounts,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ItemCounts {
    pub single: [usize; 4],
    pub multi: [usize; 4],
}

pub const GROUPS: [&str; 4] = ["train+dev", "test_en", "test_de", "total"];

pub fn corpus_stats(corpus: &Corpus, split: &SplitSpec) -> Result<CorpusStats> {
    let mut part_docs: Vec<(SplitPart, Vec<&Document>)> = Vec::new();
    for part in SplitPart::ALL {
        let mut docs = Vec::new();
        for id in split.part(part) {
            docs.push(corpus.get(id).ok_or_else(|| Error::Unknown { kind: "doc_id", id: id.clone() })?);
        }
        part_docs.push((part, docs));
    }

    let mut rows: Vec<StatsRow> = part_docs.iter().map(|(part, docs)| stats_row(part.as_str(), docs)).collect();
    let all: Vec<&Document> = part_docs.iter().flat_map(|(_, d)| d.iter().copied()).collect();
    rows.push(stats_row("total", &all));

    let group_of = |part: SplitPart| match part {
        SplitPart::Train | SplitPart::Dev => 0,
        SplitPart::TestEn => 1,
        SplitPart::TestDe => 2,
    };
    let mut grouped: Vec<(usize, &Sentence)> = Vec::new();
    for (part, docs) in &part_docs {
        for doc in docs {
            for s in doc.sentences.iter().filter(|s| s.label) {
                grouped.push((group_of(*part), s));
            }
        }
    }

    let types = cross_tab(TableAxis::Type, MentionType::ALL.iter().map(|t| t.as_str()).collect(), &grouped, |m| m.mention_type.as_str());
    let subtypes = cross_tab(TableAxis::Subtype, Subtype::ALL.iter().map(|t| t.as_str()).collect(), &grouped, |m| m.subtype.as_str());
    let mut item_counts = ItemCounts::default();
    for &(group, s) in &grouped {
        let slot = if s.mentions.len() == 1 { &mut item_counts.single } else { &mut item_counts.multi };
        slot[group] += 1;
        slot[3] += 1;
    }
    Ok(CorpusStats { rows, types, subtypes, item_counts })
}

fn stats_row(name: &str, docs: &[&Document]) -> StatsRow {
    let mut row = StatsRow { part: name.to_string(), papers: docs.len(), ..StatsRow::default() };
    let mut unique = BTreeSet::new();
    for doc in docs {
        for s in &doc.sentences {
            if s.label {
                row.positive += 1;
            } else {
                row.negative += 1;
            }
            for m in s.mentions.iter().filter(|m| !m.is_unk()) {
                row.items += 1;
                unique.insert(m.item_id.as_str());
            }
        }
    }
    let surveys: BTreeSet<&str> = unique.iter().map(|id| survey_of_item(id)).collect();
    row.unique_items = unique.len();
    row.surveys = surveys.len();
    row
}

fn cross_tab<F>(axis: TableAxis, categories: Vec<&str>, sentences: &[(usize, &Sentence)], key: F) -> CrossTab
where
    F: Fn(&super::Mention) -> &'static str,
{
    let mut rows: Vec<CrossTabRow> = categories
        .iter()
        .chain(std::iter::once(&"mixed"))
        .map(|c| CrossTabRow { category: c.to_string(), sentences: [0; 4], mentions: [0; 4] })
        .collect();
    let mixed = rows.len() - 1;
    for &(group, sentence) in sentences {
        let cats: BTreeSet<&str> = sentence.mentions.iter().map(&key).collect();
        let row = if cats.len() == 1 {
            let only = cats.iter().next().copied().unwrap_or_default();
            categories.iter().position(|c| *c == only).unwrap_or(mixed)
        } else {
            mixed
        };
        rows[row].sentences[group] += 1;
        rows[row].sentences[3] += 1;
        for m in &sentence.mentions {
            let r = categories.iter().position(|c| *c == key(m)).unwrap_or(mixed);
            rows[r].mentions[group] += 1;
            rows[r].mentions[3] += 1;
        }
    }
    let mut total = CrossTabRow { category: "total".into(), sentences: [0; 4], mentions: [0; 4] };
    for row in &rows {
        for g in 0..4 {
            total.sentences[g] += row.sentences[g];
            total.mentions[g] += row.mentions[g];
        }
    }
    rows.push(total);
    CrossTab { axis, rows }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}", "part", "sents+", "sents-", "items", "{items}", "surveys", "papers")?;
        for r in &self.rows {
            writeln!(f, "{:<10} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}", r.part, r.positive, r.negative, r.items, r.unique_items, r.surveys, r.papers)?;
        }
        for tab in [&self.types, &self.subtypes] {
            let mut header = format!("\n{:<18}", format!("{:?}", tab.axis).to_lowercase());
            for g in GROUPS {
                let _ = write!(header, " {:>10}", format!("s:{g}"));
            }
            for g in GROUPS {
                let _ = write!(header, " {:>10}", format!("m:{g}"));
            }
            writeln!(f, "{header}")?;
            for row in &tab.rows {
                write!(f, "{:<18}", row.category)?;
                for v in row.sentences.iter().chain(row.mentions.iter()) {
                    write!(f, " {v:>10}")?;
                }
                writeln!(f)?;
            }
        }
        write!(f, "\n{:<18}", "item_count")?;
        for g in GROUPS {
            write!(f, " {g:>10}")?;
        }
        writeln!(f)?;
        for (name, counts) in [("single", &self.item_counts.single), ("multi", &self.item_counts.multi)] {
            write!(f, "{name:<18}")?;
            for v in counts {
                write!(f, " {v:>10}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
