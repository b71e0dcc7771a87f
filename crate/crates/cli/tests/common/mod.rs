#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::json;
use sil_core::corpus::{write_corpus, Language};
use sil_core::kb::write_kb;
use sil_core::synth::{synth_dataset, SynthConfig};

pub fn sil() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sil"));
    cmd.env_remove("SIL_DATA_DIR").env_remove("RUST_LOG");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    sil().args(args).output().expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[track_caller]
pub fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "sil {args:?} failed: {}", stderr(&out));
    out
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Writes corpus.jsonl, kb.jsonl and split.json for a synthetic dataset.
/// Every fourth document is a test document of its language, every fifth
/// of the rest is dev, the others train.
pub fn write_fixture(dir: &Path, seed: u64) -> PathBuf {
    let cfg = SynthConfig { seed, ..SynthConfig::default() };
    let (corpus, kb) = synth_dataset(&cfg);
    let mut buf = Vec::new();
    write_corpus(&corpus, &mut buf).unwrap();
    fs::write(dir.join("corpus.jsonl"), buf).unwrap();
    let mut buf = Vec::new();
    write_kb(&kb, &mut buf).unwrap();
    fs::write(dir.join("kb.jsonl"), buf).unwrap();
    let (mut train, mut dev, mut en, mut de) = (vec![], vec![], vec![], vec![]);
    for (i, d) in corpus.documents().iter().enumerate() {
        match (i % 4, d.language) {
            (0, Language::En) => en.push(d.doc_id.clone()),
            (0, Language::De) => de.push(d.doc_id.clone()),
            _ if i % 5 == 0 => dev.push(d.doc_id.clone()),
            _ => train.push(d.doc_id.clone()),
        }
    }
    let split = json!({ "train": train, "dev": dev, "test_en": en, "test_de": de });
    fs::write(dir.join("split.json"), split.to_string()).unwrap();
    dir.to_path_buf()
}
