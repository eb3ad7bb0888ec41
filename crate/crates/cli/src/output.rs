//! Output files: a `#`-commented header, CSV rows, an atomic rename into
//! place, and a JSON manifest listing every file with its SHA-256 digest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

pub const SCHEMA_VERSION: u32 = 1;

/// Text of one output file, built in memory and written in one go.
pub struct Document {
    text: String,
}

impl Document {
    pub fn new(command: &str, config: &Value) -> Self {
        let mut doc = Self { text: String::new() };
        doc.comment(&format!("twoaxis {command}"));
        doc.comment(&format!("schema: twoaxis-{command}/{SCHEMA_VERSION}"));
        doc.comment(&format!("version: {}", env!("CARGO_PKG_VERSION")));
        doc.comment(&format!("config: {config}"));
        doc
    }

    pub fn comment(&mut self, line: &str) {
        self.text.push_str("# ");
        self.text.push_str(line);
        self.text.push('\n');
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for field in fields {
            if !first {
                self.text.push(',');
            }
            first = false;
            self.text.push_str(field.as_ref());
        }
        self.text.push('\n');
    }
}

/// Full-precision float formatting that round-trips through `parse`.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Write `bytes` to `path` through a temporary file in the same directory,
/// so a failed run never leaves a partial file behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Files written by one command, plus what the manifest records about it.
pub struct Run {
    command: String,
    config: Value,
    master_seed: Option<u64>,
    started: Instant,
    files: Vec<Value>,
}

impl Run {
    pub fn new(command: &str, config: Value, master_seed: Option<u64>) -> Self {
        Self {
            command: command.into(),
            config,
            master_seed,
            started: Instant::now(),
            files: Vec::new(),
        }
    }

    pub fn document(&self) -> Document {
        Document::new(&self.command, &self.config)
    }

    pub fn write(&mut self, path: &Path, doc: Document) -> Result<()> {
        let bytes = doc.text.into_bytes();
        write_atomic(path, &bytes)?;
        self.files.push(json!({
            "path": path.display().to_string(),
            "bytes": bytes.len(),
            "sha256": sha256_hex(&bytes),
        }));
        log::info!("wrote {}", path.display());
        Ok(())
    }

    /// Write `<out>.manifest.json` next to the primary output.
    pub fn finish(self, out: &Path) -> Result<PathBuf> {
        let manifest = json!({
            "command": self.command,
            "config": self.config,
            "master_seed": self.master_seed,
            "version": env!("CARGO_PKG_VERSION"),
            "schema_version": SCHEMA_VERSION,
            "duration_seconds": self.started.elapsed().as_secs_f64(),
            "files": self.files,
        });
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = PathBuf::from(name);
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 12345.678] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn document_layout() {
        let mut doc = Document::new("demo", &json!({"n": 3}));
        doc.row(["a", "b"]);
        let lines: Vec<&str> = doc.text.lines().collect();
        assert_eq!(lines[1], "# schema: twoaxis-demo/1");
        assert_eq!(lines[3], "# config: {\"n\":3}");
        assert_eq!(lines[4], "a,b");
    }
}
