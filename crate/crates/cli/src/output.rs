//! Output management: every command computes first and writes at the end,
//! so a failed run leaves no partial files. Numbers are written in shortest
//! round-trip form to keep reruns byte-identical.

use anyhow::Context;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub struct OutputDir {
    root: PathBuf,
    files: Vec<(String, String)>,
}

impl OutputDir {
    pub fn new(root: &Path) -> Self {
        Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn stage(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn stage_manifest(&mut self, command: &str, config_hash: u64, config_toml: &str) {
        let manifest = format!(
            "command\t{command}\nconfig_hash\t{config_hash:016x}\nengine_version\t{}\ndriver_version\t{}\n",
            stokes2p_core_version(),
            env!("CARGO_PKG_VERSION"),
        );
        self.stage("manifest.tsv", manifest);
        self.stage("config.effective.toml", config_toml.to_string());
    }

    /// Writes everything staged; called only after the command succeeded.
    pub fn commit(self) -> anyhow::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(&self.root)
            .with_context(|| format!("creating output directory {}", self.root.display()))?;
        let mut written = Vec::new();
        for (name, contents) in self.files {
            let path = self.root.join(&name);
            std::fs::write(&path, contents)
                .with_context(|| format!("writing {}", path.display()))?;
            written.push(path);
        }
        Ok(written)
    }
}

fn stokes2p_core_version() -> &'static str {
    // the workspace pins both crates to one version
    env!("CARGO_PKG_VERSION")
}

/// Tab-separated table builder with a header row.
pub struct Table {
    text: String,
    columns: usize,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "{}", header.join("\t"));
        Self {
            text,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "table row width");
        let _ = writeln!(self.text, "{}", cells.join("\t"));
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}
