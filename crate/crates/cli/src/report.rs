use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::Config;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// The mathematical claim this check exercises.
    pub paper_anchor: String,
    pub value: Value,
    pub threshold: Value,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub experiment: &'a str,
    pub config_echo: &'a Config,
    pub checks: &'a [Check],
    pub artifacts: &'a [String],
}

/// Collects checks and artifacts for one run.
pub struct Report {
    dir: PathBuf,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn new(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_owned(), checks: Vec::new(), artifacts: Vec::new() })
    }

    pub fn check(&mut self, name: &str, anchor: &str, value: Value, threshold: Value, pass: bool) {
        self.checks.push(Check { name: name.to_owned(), paper_anchor: anchor.to_owned(), value, threshold, pass });
    }

    pub fn csv(&mut self, file: &str, contents: &str) -> std::io::Result<()> {
        std::fs::write(self.dir.join(file), contents)?;
        self.artifacts.push(file.to_owned());
        Ok(())
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn finish(&self, config: &Config) -> std::io::Result<PathBuf> {
        let summary =
            Summary { experiment: &config.experiment, config_echo: config, checks: &self.checks, artifacts: &self.artifacts };
        let path = self.dir.join("summary.json");
        let text = serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }
}

/// A finite float as a JSON number; JSON has no infinities or NaN, so those
/// are written as strings.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}
