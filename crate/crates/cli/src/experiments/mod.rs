use std::collections::BTreeMap;

use crate::{CliError, Options, Outcome};

mod bound;
mod counterexample;
mod coupling;
mod decay;
mod trap;

pub use bound::Bound;
pub use counterexample::FigCounterexample;
pub use coupling::CouplingDemo;
pub use decay::FigDecay;
pub use trap::TrapDemo;

/// A runnable experiment. Implementations parse and validate the whole
/// config before computing anything.
pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    /// File name used when neither `--out` nor `output` is given.
    fn default_output(&self) -> &'static str;
    fn run(&self, config_text: &str, options: Options) -> Result<Outcome, CliError>;
}

pub struct ExperimentRegistry {
    experiments: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl ExperimentRegistry {
    pub fn empty() -> Self {
        Self {
            experiments: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, e: Box<dyn Experiment>) -> &mut Self {
        self.experiments.insert(e.name(), e);
        self
    }

    pub fn get(&self, name: &str) -> Option<&dyn Experiment> {
        self.experiments.get(name).map(|e| e.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.experiments.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Experiment> + '_ {
        self.experiments.values().map(|e| e.as_ref())
    }
}

pub fn registry() -> ExperimentRegistry {
    let mut reg = ExperimentRegistry::empty();
    reg.register(Box::new(FigDecay))
        .register(Box::new(FigCounterexample))
        .register(Box::new(CouplingDemo))
        .register(Box::new(Bound))
        .register(Box::new(TrapDemo));
    reg
}

/// `output` key shared by every config: where to write when `--out` is
/// not given. Not embedded in artifacts.
pub fn output_path(config_text: &str) -> Result<Option<String>, CliError> {
    let table: toml::Table = crate::config::parse(config_text)?;
    match table.get("output") {
        None => Ok(None),
        Some(toml::Value::String(s)) => Ok(Some(s.clone())),
        Some(other) => Err(crate::config::invalid(
            "output",
            format!("expected a string, got {}", other.type_str()),
        )),
    }
}
