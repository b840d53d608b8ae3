use std::fmt::Write as _;

use serde::Serialize;

use crate::{CliError, TOOL_VERSION};

/// One output file. The primary artifact has no suffix; extra artifacts are
/// written next to it as `<stem>.<suffix>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub suffix: Option<&'static str>,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// Set when the artifacts were produced but a dominance precondition
    /// failed; the binary exits with the refusal code.
    pub refusal: Option<String>,
}

impl Outcome {
    pub fn single(bytes: Vec<u8>) -> Self {
        Self {
            artifacts: vec![Artifact { suffix: None, bytes }],
            refusal: None,
        }
    }

    pub fn primary(&self) -> &[u8] {
        &self.artifacts[0].bytes
    }

    pub fn primary_text(&self) -> &str {
        std::str::from_utf8(self.primary()).expect("artifacts are UTF-8")
    }
}

/// CSV text that starts with `#` metadata rows: tool version, experiment
/// name, then the resolved config one TOML line per row.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(experiment: &str, config: &impl Serialize) -> Result<Self, CliError> {
        let toml = toml::to_string(config).map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))?;
        let mut text = format!("# tool: {TOOL_VERSION}\n# experiment: {experiment}\n");
        for line in toml.lines().filter(|l| !l.trim().is_empty()) {
            let _ = writeln!(text, "# config: {line}");
        }
        Ok(Self { text })
    }

    pub fn comment(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "# {key}: {value}");
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: std::fmt::Display,
    {
        let mut first = true;
        for c in cells {
            if !first {
                self.text.push(',');
            }
            first = false;
            let _ = write!(self.text, "{c}");
        }
        self.text.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

/// Empty cell for a missing value.
pub fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Pretty JSON with `tool`, `experiment` and `config` fields first.
pub fn json(experiment: &str, config: &impl Serialize, body: serde_json::Value) -> Result<Vec<u8>, CliError> {
    let config = serde_json::to_value(config).map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))?;
    let mut doc = serde_json::Map::new();
    doc.insert("tool".into(), TOOL_VERSION.into());
    doc.insert("experiment".into(), experiment.into());
    doc.insert("config".into(), config);
    if let serde_json::Value::Object(fields) = body {
        doc.extend(fields);
    }
    let mut bytes = serde_json::to_vec_pretty(&serde_json::Value::Object(doc)).expect("JSON values serialize");
    bytes.push(b'\n');
    Ok(bytes)
}
