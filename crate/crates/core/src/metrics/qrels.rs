use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::corpus::{Corpus, UNK};
use crate::error::{Error, Result};

/// Binary relevance judgments: query id to relevant item ids.
///
/// A query may map to an empty set (a gold-positive sentence whose mentions
/// are all `Unk`); evaluation skips and counts such queries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeSet<String>>,
}

impl Qrels {
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, BTreeSet<String>)>,
    {
        let mut qrels = Qrels::default();
        for (query, items) in entries {
            qrels.add_query(&query);
            for item in items {
                qrels.insert(&query, &item)?;
            }
        }
        Ok(qrels)
    }

    /// Gold for every positive sentence of the corpus, keyed `doc_id#idx`.
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let judgments = corpus.sentences().filter(|(_, s)| s.label).map(|(d, s)| (d.key(s.idx).to_string(), s.gold_items())).collect();
        Self { judgments }
    }

    pub fn add_query(&mut self, query: &str) {
        self.judgments.entry(query.to_string()).or_default();
    }

    pub fn insert(&mut self, query: &str, item: &str) -> Result<()> {
        if item == UNK {
            return Err(Error::invalid(format!("query `{query}`: `{UNK}` cannot be a relevant item")));
        }
        self.judgments.entry(query.to_string()).or_default().insert(item.to_string());
        Ok(())
    }

    pub fn get(&self, query: &str) -> Option<&BTreeSet<String>> {
        self.judgments.get(query)
    }

    pub fn contains(&self, query: &str) -> bool {
        self.judgments.contains_key(query)
    }

    pub fn len(&self) -> usize {
        self.judgments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BTreeSet<String>)> + '_ {
        self.judgments.iter()
    }

    /// Keeps only queries accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&str) -> bool) -> Qrels {
        Qrels { judgments: self.judgments.iter().filter(|(q, _)| keep(q)).map(|(q, s)| (q.clone(), s.clone())).collect() }
    }
}

/// Writes `query<TAB>item<TAB>1` rows. A query with empty gold gets a single
/// `query<TAB>Unk<TAB>0` row so that it survives a round trip.
pub fn write_qrels<W: Write>(qrels: &Qrels, mut out: W) -> Result<()> {
    for (query, items) in qrels.iter() {
        if items.is_empty() {
            writeln!(out, "{query}\t{UNK}\t0").map_err(|e| Error::io("<output>", e))?;
        }
        for item in items {
            writeln!(out, "{query}\t{item}\t1").map_err(|e| Error::io("<output>", e))?;
        }
    }
    Ok(())
}

pub fn load_qrels(path: impl AsRef<Path>) -> Result<Qrels> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_qrels(BufReader::new(file), &path.display().to_string())
}

/// Reads `query<TAB>item<TAB>relevance`. A row with relevance 0 registers
/// its query without adding a relevant item.
pub fn parse_qrels<R: BufRead>(reader: R, origin: &str) -> Result<Qrels> {
    let mut qrels = Qrels::default();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::record(origin, lineno, "<row>", format!("expected 3 columns, found {}", cols.len())));
        }
        let rel: u32 = cols[2].trim().parse().map_err(|_| Error::record(origin, lineno, "relevance", format!("not an integer: `{}`", cols[2])))?;
        if rel == 0 {
            qrels.add_query(cols[0]);
            continue;
        }
        qrels.insert(cols[0], cols[1]).map_err(|e| Error::record(origin, lineno, "item_id", e.to_string()))?;
    }
    Ok(qrels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_write() {
        let q = parse_qrels("a#0\tx\t1\na#0\ty\t1\nb#2\tz\t0\n".as_bytes(), "q").unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.get("a#0").unwrap().len(), 2);
        assert!(q.get("b#2").unwrap().is_empty());
        let mut buf = Vec::new();
        write_qrels(&q, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "a#0\tx\t1\na#0\ty\t1\nb#2\tUnk\t0\n");
        assert_eq!(parse_qrels(text.as_bytes(), "q").unwrap(), q);
        assert!(parse_qrels("a#0\tUnk\t1\n".as_bytes(), "q").is_err());
        assert!(parse_qrels("a#0\tx\n".as_bytes(), "q").is_err());
    }
}
