use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use serde::Deserialize;

use crate::cli::GlobalArgs;
use crate::failure::usage;

pub const DEFAULT_D: usize = 2;
pub const DEFAULT_DEPTH: u32 = 8;
pub const DEFAULT_N: i64 = 4095;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Parameters read from `--config`. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub d: Option<usize>,
    pub j: Option<usize>,
    pub p: Option<f64>,
    pub depth: Option<u32>,
    pub n: Option<i64>,
    #[serde(rename = "A_list", alias = "a_list")]
    pub a_list: Option<Vec<u64>>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }
}

/// Merged view of flags, config file and defaults.
pub struct Context {
    pub config: RunConfig,
    pub seed: u64,
    pub tolerance: f64,
    pub golden_dir: PathBuf,
    pub compare_golden: bool,
    pub output: Option<PathBuf>,
}

impl Context {
    pub fn new(global: &GlobalArgs) -> Result<Self> {
        let config = match &global.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let tolerance = global.tolerance.or(config.tolerance).unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(usage(format!("tolerance must be a finite nonnegative number, got {tolerance}")));
        }
        Ok(Self {
            seed: global.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
            tolerance,
            golden_dir: global.golden_dir.clone(),
            compare_golden: global.compare_golden,
            output: global.output.clone(),
            config,
        })
    }

    pub fn d(&self, flag: Option<usize>) -> usize {
        flag.or(self.config.d).unwrap_or(DEFAULT_D)
    }

    pub fn j(&self, flag: Option<usize>) -> usize {
        flag.or(self.config.j).unwrap_or(1)
    }

    pub fn p(&self, flag: Option<f64>) -> f64 {
        flag.or(self.config.p).unwrap_or(2.0)
    }

    pub fn depth(&self, flag: Option<u32>) -> u32 {
        flag.or(self.config.depth).unwrap_or(DEFAULT_DEPTH)
    }

    pub fn n(&self, flag: Option<i64>) -> i64 {
        flag.or(self.config.n).unwrap_or(DEFAULT_N)
    }

    pub fn a_list(&self, flag: Option<Vec<u64>>) -> Vec<u64> {
        flag.or_else(|| self.config.a_list.clone())
            .unwrap_or_else(|| (4..=12).map(|e| 1u64 << e).collect())
    }
}
