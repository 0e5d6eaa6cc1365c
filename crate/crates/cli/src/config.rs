//! Run configuration: command-line flags over a TOML file over defaults.
//!
//! The file is a flat TOML table, for example
//!
//! ```toml
//! mode = "racer"
//! alpha = 0.99
//! beta = 0.01
//! gamma = 0.6                      # unset: compositions use alpha/beta
//! k = 10
//! seed = 1
//! stratified = true
//! max_composition_passes = 10
//! mutation_strategy = "sequential"   # or "best_of_copies"
//! out_dir = "results"
//! format = ["csv", "md"]
//! ```
//!
//! Every key is optional; unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use rumix::{CvConfig, LearnerConfig, Mode, MutationStrategy, WeightProfile};
use serde::Deserialize;

use crate::exit::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Md,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "md" | "markdown" => Ok(OutputFormat::Md),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format {s:?} (expected csv, md or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Md => "md",
            OutputFormat::Json => "json",
        })
    }
}

/// Contents of a config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mode: Option<Mode>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub stratified: Option<bool>,
    pub max_composition_passes: Option<usize>,
    pub mutation_strategy: Option<MutationStrategy>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Vec<OutputFormat>>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::input(format!("invalid config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn parse_strategy(s: &str) -> Result<MutationStrategy, String> {
    match s {
        "sequential" => Ok(MutationStrategy::Sequential),
        "best_of_copies" | "best-of-copies" => Ok(MutationStrategy::BestOfCopies),
        _ => Err(format!("unknown mutation strategy {s:?}")),
    }
}

/// Flags shared by every subcommand that trains.
#[derive(Debug, Clone, Default, Args)]
pub struct LearnerFlags {
    /// TOML config file; flags given on the command line override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// rumc, or racer to skip mutation and primary generalization.
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Accuracy weight of the main fitness profile.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Coverage weight of the main fitness profile.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Coverage weight used when judging compositions; without it they are
    /// judged with alpha/beta.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Seed for composition shuffling and fold assignment.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_composition_passes: Option<usize>,
    /// sequential or best_of_copies.
    #[arg(long, value_parser = parse_strategy)]
    pub mutation_strategy: Option<MutationStrategy>,
}

/// Cross-validation and output flags.
#[derive(Debug, Clone, Default, Args)]
pub struct EvalFlags {
    /// Number of folds.
    #[arg(long)]
    pub k: Option<usize>,
    /// Stratify folds by class.
    #[arg(long)]
    pub stratified: Option<bool>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Output formats, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<OutputFormat>>,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `None` when neither flag nor file chose a mode.
    pub mode: Option<Mode>,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: Option<f64>,
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    pub max_composition_passes: usize,
    pub mutation_strategy: MutationStrategy,
    pub out_dir: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: None,
            alpha: 0.99,
            beta: 0.01,
            gamma: None,
            k: 10,
            seed: 1,
            stratified: true,
            max_composition_passes: 10,
            mutation_strategy: MutationStrategy::Sequential,
            out_dir: None,
            formats: vec![OutputFormat::Csv, OutputFormat::Md],
        }
    }
}

impl RunConfig {
    /// Flag, then file, then default, key by key.
    pub fn resolve(learner: &LearnerFlags, eval: &EvalFlags, file: &FileConfig) -> RunConfig {
        let d = RunConfig::default();
        RunConfig {
            mode: learner.mode.or(file.mode),
            alpha: learner.alpha.or(file.alpha).unwrap_or(d.alpha),
            beta: learner.beta.or(file.beta).unwrap_or(d.beta),
            gamma: learner.gamma.or(file.gamma),
            k: eval.k.or(file.k).unwrap_or(d.k),
            seed: learner.seed.or(file.seed).unwrap_or(d.seed),
            stratified: eval.stratified.or(file.stratified).unwrap_or(d.stratified),
            max_composition_passes: learner
                .max_composition_passes
                .or(file.max_composition_passes)
                .unwrap_or(d.max_composition_passes),
            mutation_strategy: learner.mutation_strategy.or(file.mutation_strategy).unwrap_or(d.mutation_strategy),
            out_dir: eval.out_dir.clone().or_else(|| file.out_dir.clone()),
            formats: eval.format.clone().or_else(|| file.format.clone()).unwrap_or(d.formats),
        }
    }

    pub fn from_flags(learner: &LearnerFlags, eval: &EvalFlags) -> Result<RunConfig, CliError> {
        let file = match &learner.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Ok(Self::resolve(learner, eval, &file))
    }

    pub fn learner(&self) -> Result<LearnerConfig, CliError> {
        let main_profile = WeightProfile::new(self.alpha, self.beta)?;
        let composition_profile = match self.gamma {
            Some(g) => WeightProfile::composition(g)?,
            None => main_profile,
        };
        let cfg = LearnerConfig {
            mode: self.mode.unwrap_or(Mode::Rumc),
            main_profile,
            composition_profile,
            rng_seed: self.seed,
            max_composition_passes: self.max_composition_passes,
            mutation_strategy: self.mutation_strategy,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn cv(&self) -> Result<CvConfig, CliError> {
        Ok(CvConfig { learner: self.learner()?, k: self.k, seed: self.seed, stratified: self.stratified })
    }
}
