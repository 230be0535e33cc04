//! Run configuration shared by the generator and the command line tool.

use serde::{Deserialize, Serialize};

use crate::bot::BotConfig;
use crate::oracle::OracleConfig;
use crate::world::WorldConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Text,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    /// Fraction of each category held out by the random split.
    pub holdout_frac: f64,
    /// Seed for the random split, independent of the corpus seed.
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { holdout_frac: 0.15, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub seed: u64,
    pub episodes: usize,
    /// Positive traces wanted per description before targeted resampling stops.
    pub min_per_description: usize,
    /// Extra rollouts that targeted resampling may attempt.
    pub extra_budget: usize,
    /// Worker threads for generation; 0 uses all cores.
    pub workers: usize,
    pub world: WorldConfig,
    pub bot: BotConfig,
    pub oracle: OracleConfig,
    pub split: SplitConfig,
    pub format: Format,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            episodes: 2000,
            min_per_description: 3,
            extra_budget: 0,
            workers: 0,
            world: WorldConfig::default(),
            bot: BotConfig::default(),
            oracle: OracleConfig::default(),
            split: SplitConfig::default(),
            format: Format::Text,
        }
    }
}

impl Config {
    /// Desk-scale defaults.
    pub fn desk() -> Self {
        Config::default()
    }

    /// Full-size corpus: 56837 episodes with at least 50 positive traces
    /// per description.
    pub fn full_scale() -> Self {
        Config { episodes: 56_837, min_per_description: 50, extra_budget: 200_000, ..Config::default() }
    }
}
