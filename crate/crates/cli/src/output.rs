//! Artifact directory handling: file writes are recorded so the closing
//! manifest can list every output of the run.

use crate::config::RunConfig;
use crate::Failure;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

pub struct Sink {
    dir: PathBuf,
    written: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    outputs: Vec<String>,
}

impl Sink {
    pub fn create(dir: &Path) -> Result<Sink, Failure> {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Sink {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        let path = self.dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Failure::Runtime(format!("cannot serialize {name}: {e}")))?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Closes the run: records `manifest.json` with the resolved settings
    /// and the names of everything written before it.
    pub fn finish(
        mut self,
        command: &str,
        config: &RunConfig,
        seed: Option<u64>,
        workers: Option<usize>,
        tolerance: Option<f64>,
    ) -> Result<(), Failure> {
        let mut outputs = self.written.clone();
        outputs.push("manifest.json".to_string());
        let manifest = Manifest {
            command,
            config,
            seed,
            workers,
            tolerance,
            outputs,
        };
        self.write_json("manifest.json", &manifest)
    }
}
