use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use toml::Value;

/// Finds `--config <path>` or `--config=<path>` in argv.
pub fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Appends flag defaults from the config table of `command_path` (e.g.
/// `["smp", "run"]`) for every key whose flag is not already in argv.
pub fn apply_defaults(argv: &mut Vec<OsString>, path: &Path, command_path: &[String]) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let root: Value = text.parse().with_context(|| format!("invalid TOML in {}", path.display()))?;
    let mut table = Some(&root);
    for name in command_path {
        table = table.and_then(|t| t.get(name));
    }
    let Some(table) = table.and_then(Value::as_table) else {
        return Ok(());
    };
    for (key, value) in table {
        if value.is_table() {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let given = argv.iter().any(|a| {
            let a = a.to_string_lossy();
            a == flag || a.starts_with(&format!("{flag}="))
        });
        if given {
            continue;
        }
        match value {
            Value::Boolean(true) => argv.push(flag.into()),
            Value::Boolean(false) => {}
            Value::Array(items) => {
                let joined = items.iter().map(scalar).collect::<Result<Vec<_>>>()?.join(",");
                argv.push(flag.into());
                argv.push(joined.into());
            }
            other => {
                argv.push(flag.into());
                argv.push(scalar(other)?.into());
            }
        }
    }
    Ok(())
}

fn scalar(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(f) => Ok(f.to_string()),
        Value::Boolean(b) => Ok(b.to_string()),
        other => Err(anyhow!("unsupported config value `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(xs: &[&str]) -> Vec<OsString> {
        xs.iter().map(OsString::from).collect()
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(&path, "[smp.run]\nk = 5\nno_filter = true\nmetric = [\"recall\", \"ndcg\"]\n[stats]\nformat = \"json\"\n").unwrap();
        let mut argv = args(&["sil", "--config", "c.toml", "smp", "run", "--k", "20"]);
        apply_defaults(&mut argv, &path, &["smp".into(), "run".into()]).unwrap();
        assert_eq!(argv[5..], args(&["--k", "20", "--metric", "recall,ndcg", "--no-filter"])[..]);
        assert_eq!(config_path(&argv), Some(PathBuf::from("c.toml")));
    }
}
