use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Provenance record written next to every output file as
/// `<output>.manifest.json`. Holds no timestamps, so identical runs produce
/// identical manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config: Value,
    /// Input path (as given) to hex SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub output: String,
    pub output_sha256: String,
    pub version: String,
    pub seed: u64,
}

impl RunManifest {
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut hasher = Sha256::new();
    io::copy(&mut file, &mut hasher).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(hex::encode(hasher.finalize()))
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Per-invocation state: resolves input paths, records their digests and
/// writes outputs with their manifests.
pub struct Ctx {
    pub seed: u64,
    pub command: String,
    pub argv: Vec<String>,
    data_dir: Option<PathBuf>,
    inputs: RefCell<BTreeMap<String, String>>,
}

impl Ctx {
    pub fn new(command: &str, argv: Vec<String>, seed: u64, data_dir: Option<PathBuf>) -> Self {
        Self { seed, command: command.to_string(), argv, data_dir, inputs: RefCell::default() }
    }

    /// The given path, or `name` under the data directory.
    pub fn resolve(&self, given: Option<&Path>, name: &str, flag: &str) -> Result<PathBuf> {
        match (given, &self.data_dir) {
            (Some(p), _) => Ok(p.to_path_buf()),
            (None, Some(dir)) => Ok(dir.join(name)),
            (None, None) => Err(crate::UsageError(format!("pass {flag} or set SIL_DATA_DIR")).into()),
        }
    }

    /// Records the digest of an input file and returns the path.
    pub fn input<'a>(&self, path: &'a Path) -> Result<&'a Path> {
        let digest = sha256_file(path)?;
        self.inputs.borrow_mut().insert(path.display().to_string(), digest);
        Ok(path)
    }

    pub fn write(&self, path: &Path, bytes: &[u8], config: &Value) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        }
        fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
        let manifest = RunManifest {
            command: self.command.clone(),
            argv: self.argv.clone(),
            config: config.clone(),
            inputs: self.inputs.borrow().clone(),
            output: path.display().to_string(),
            output_sha256: sha256_bytes(bytes),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.seed,
        };
        let mpath = RunManifest::path_for(path);
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&mpath, text).with_context(|| format!("cannot write {}", mpath.display()))?;
        log::info!("wrote {}", path.display());
        Ok(())
    }

    /// Writes to `out` with a manifest, or to standard output.
    pub fn emit(&self, out: Option<&Path>, bytes: &[u8], config: &Value) -> Result<()> {
        match out {
            Some(p) => self.write(p, bytes, config),
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(bytes)?;
                stdout.flush()?;
                Ok(())
            }
        }
    }
}
