//! Output-directory management: lockfile, tracked artifacts, manifest and
//! cleanup of partial outputs on failure.

use crate::scenario::{CliError, CliResult};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

pub struct OutputDir {
    root: PathBuf,
    lock: PathBuf,
    written: Vec<PathBuf>,
    /// Set once the run finished; suppresses cleanup.
    committed: bool,
}

impl OutputDir {
    /// Create (if needed) and lock the directory. A held lock means another
    /// run is writing here — a validation error.
    pub fn acquire(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root)
            .map_err(|e| CliError::validation(format!("cannot create {}: {e}", root.display())))?;
        let lock = root.join(".trkal-lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(_) => {}
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                return Err(CliError::validation(format!(
                    "output directory {} is locked by another run (remove {} if stale)",
                    root.display(),
                    lock.display()
                )));
            }
            Err(e) => {
                return Err(CliError::validation(format!(
                    "cannot lock {}: {e}",
                    root.display()
                )))
            }
        }
        Ok(OutputDir {
            root: root.to_path_buf(),
            lock,
            written: Vec::new(),
            committed: false,
        })
    }


    /// Write a file and track it for cleanup-on-failure.
    pub fn write_file(&mut self, name: &str, contents: &[u8]) -> CliResult<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::runtime(format!("writing {}: {e}", path.display())))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::runtime(format!("serialising {name}: {e}")))?;
        text.push('\n');
        self.write_file(name, text.as_bytes())
    }

    pub fn artifact_names(&self) -> Vec<String> {
        self.written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect()
    }

    /// Mark the run successful: outputs are kept and the lock released.
    pub fn commit(&mut self) {
        self.committed = true;
    }
}

impl Drop for OutputDir {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
        let _ = fs::remove_file(&self.lock);
    }
}

/// SHA-256 of the final scenario document, hex-encoded.
pub fn config_hash(document: &Value) -> String {
    let canonical = serde_json::to_string(document).unwrap_or_default();
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn manifest(
    name: &str,
    subcommand: &str,
    document: &Value,
    seed: u64,
    outputs: &[String],
    warnings: &[String],
) -> Value {
    json!({
        "scenario": name,
        "subcommand": subcommand,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "config_sha256": config_hash(document),
        "seed": seed,
        "outputs": outputs,
        "warnings": warnings,
    })
}

/// A gnuplot script plotting the named CSV artifacts (comma-separated with a
/// header row; `#` comment lines are ignored by gnuplot).
pub fn gnuplot_script(title: &str, point_files: &[String], line_files: &[String]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set size ratio -1\n");
    s.push_str(&format!("set title '{title}'\n"));
    s.push_str("set xlabel 'xi'\nset ylabel 'eta'\n");
    let mut clauses = Vec::new();
    for f in line_files {
        clauses.push(format!(
            "'{f}' every ::1 using 2:3 with lines lc rgb 'gray40' notitle"
        ));
    }
    for f in point_files {
        clauses.push(format!(
            "'{f}' every ::1 using 1:2 with points pt 7 ps 1.5 title '{f}'"
        ));
    }
    if clauses.is_empty() {
        clauses.push("1/0 notitle".to_string());
    }
    s.push_str(&format!("plot {}\n", clauses.join(", \\\n     ")));
    s.push_str("pause -1\n");
    s
}
