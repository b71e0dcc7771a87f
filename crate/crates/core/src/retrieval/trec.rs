//! TREC-style run files: `query_id<TAB>item_id<TAB>rank<TAB>score`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::Ranking;
use crate::error::{Error, Result};

pub fn write_run<'a, W, I>(rankings: I, mut out: W) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Ranking>,
{
    for ranking in rankings {
        for (rank, (item, score)) in ranking.ranked().iter().enumerate() {
            writeln!(out, "{}\t{}\t{}\t{}", ranking.query_id, item, rank + 1, score).map_err(|e| Error::io("<output>", e))?;
        }
    }
    Ok(())
}

pub fn load_run(path: impl AsRef<Path>) -> Result<Vec<Ranking>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_run(BufReader::new(file), &path.display().to_string())
}

/// Reads a run file. Rows of a query may appear in any order; their ranks
/// must form `1..=n`. Queries come back sorted by id.
pub fn parse_run<R: BufRead>(reader: R, origin: &str) -> Result<Vec<Ranking>> {
    let mut rows: BTreeMap<String, Vec<(usize, String, f64)>> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::record(origin, lineno, "<row>", format!("expected 4 columns, found {}", cols.len())));
        }
        let rank: usize = cols[2].parse().map_err(|_| Error::record(origin, lineno, "rank", format!("not an integer: `{}`", cols[2])))?;
        let score: f64 = cols[3].parse().map_err(|_| Error::record(origin, lineno, "score", format!("not a number: `{}`", cols[3])))?;
        rows.entry(cols[0].to_string()).or_default().push((rank, cols[1].to_string(), score));
    }
    let mut out = Vec::with_capacity(rows.len());
    for (query, mut entries) in rows {
        entries.sort_by_key(|e| e.0);
        for (expected, (rank, _, _)) in entries.iter().enumerate() {
            if *rank != expected + 1 {
                return Err(Error::record(
                    origin,
                    0,
                    "rank",
                    format!("query `{query}`: ranks must be 1..=n, found {rank} at position {}", expected + 1),
                ));
            }
        }
        let ranked = entries.into_iter().map(|(_, id, s)| (id, s)).collect();
        out.push(Ranking::new(query, ranked)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let runs = vec![
            Ranking::new("d#0", vec![("x".into(), 0.75), ("y".into(), 0.1)]).unwrap(),
            Ranking::new("d#1", vec![("z".into(), 1.0 / 3.0)]).unwrap(),
        ];
        let mut buf = Vec::new();
        write_run(&runs, &mut buf).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf).lines().next().unwrap(), "d#0\tx\t1\t0.75");
        assert_eq!(parse_run(buf.as_slice(), "run").unwrap(), runs);
    }

    #[test]
    fn rejects_gaps_and_bad_rows() {
        assert!(parse_run("q\ta\t2\t1.0\n".as_bytes(), "run").is_err());
        assert!(parse_run("q\ta\t1\n".as_bytes(), "run").is_err());
        assert!(parse_run("q\ta\tone\t1.0\n".as_bytes(), "run").is_err());
        // scores must not increase with rank
        assert!(parse_run("q\ta\t1\t0.1\nq\tb\t2\t0.9\n".as_bytes(), "run").is_err());
    }
}
