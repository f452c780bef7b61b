use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

/// Single writer for one run's artifacts; every file lands in the manifest.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
    results: serde_json::Map<String, serde_json::Value>,
    started: Instant,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config_echo: &'a RunConfig,
    seed: u64,
    outputs: &'a [String],
    results: &'a serde_json::Map<String, serde_json::Value>,
    runtime_s: f64,
    version: &'static str,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            results: Default::default(),
            started: Instant::now(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(io_err(&path))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        self.write(name, body.as_bytes())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).expect("serializable output");
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Config(format!("csv encoding: {e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
        self.write(name, &bytes)
    }

    /// Headline values echoed into the manifest.
    pub fn result<T: Serialize>(&mut self, key: &str, value: &T) {
        self.results.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable result"),
        );
    }

    pub fn finish(self, command: &str, cfg: &RunConfig) -> Result<PathBuf, CliError> {
        let m = Manifest {
            command,
            config_echo: cfg,
            seed: cfg.seed,
            outputs: &self.files,
            results: &self.results,
            runtime_s: self.started.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION"),
        };
        let path = self.dir.join(MANIFEST);
        let s = serde_json::to_string_pretty(&m).expect("serializable manifest");
        fs::write(&path, s + "\n").map_err(io_err(&path))?;
        Ok(path)
    }
}
