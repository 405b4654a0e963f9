use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::distrib::{Binning, Discount, RankWeighting, Smoothing};
use crate::divergence::DivergenceKind;
use crate::enrich::chains::{ChainConfig, DEFAULT_TAU};
use crate::metrics::{ContextPool, MetricConfig};

/// Everything a CLI run needs. Loadable from a TOML `key = value` file; CLI
/// flags override file values.
///
/// A cutoff of `0` stands for @N (the whole list).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub news: Option<PathBuf>,
    pub bodies: Option<PathBuf>,
    /// Output of `enrich`; replaces `news`/`bodies`/`lexicon`/`gazetteer`.
    pub enriched: Option<PathBuf>,
    pub behaviors: Option<PathBuf>,
    /// Impressions whose clicks define popularity; defaults to `behaviors`.
    pub train_behaviors: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
    /// External ranking files, labelled `external:<file stem>`.
    pub recommendations: Vec<PathBuf>,
    /// Built-in baselines to evaluate: `random`, `popular`.
    pub recommenders: Vec<String>,
    pub divergence: DivergenceKind,
    pub weighting: Discount,
    /// Divergences swept by `sensitivity`.
    pub divergences: Vec<DivergenceKind>,
    /// Weightings swept by `sensitivity`.
    pub weightings: Vec<Discount>,
    pub cutoffs: Vec<usize>,
    pub alpha: f64,
    pub bins: usize,
    pub pairs: usize,
    pub seed: u64,
    pub pool: ContextPool,
    pub tau: f64,
    pub window_days: f64,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            news: None,
            bodies: None,
            enriched: None,
            behaviors: None,
            train_behaviors: None,
            lexicon: None,
            gazetteer: None,
            sidecar: None,
            recommendations: Vec::new(),
            recommenders: vec!["random".into(), "popular".into()],
            divergence: DivergenceKind::Js,
            weighting: Discount::Mrr,
            divergences: vec![DivergenceKind::Kl, DivergenceKind::Js],
            weightings: vec![Discount::None, Discount::Mrr],
            cutoffs: vec![0],
            alpha: Smoothing::DEFAULT_ALPHA,
            bins: Binning::DEFAULT_BINS,
            pairs: 5,
            seed: 0,
            pool: ContextPool::Impression,
            tau: DEFAULT_TAU,
            window_days: 3.0,
            output: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Input(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Input(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
            .map_err(|e| HarnessError::Input(format!("{}: {e}", path.display())))
    }

    fn input_paths(&self) -> impl Iterator<Item = &PathBuf> {
        [
            &self.news,
            &self.bodies,
            &self.enriched,
            &self.behaviors,
            &self.train_behaviors,
            &self.lexicon,
            &self.gazetteer,
            &self.sidecar,
        ]
        .into_iter()
        .flatten()
        .chain(&self.recommendations)
    }

    /// Checks that every referenced input exists and that numeric settings
    /// are in range.
    pub fn validate(&self) -> Result<(), HarnessError> {
        for path in self.input_paths() {
            if !path.exists() {
                return Err(HarnessError::Input(format!(
                    "{}: no such file",
                    path.display()
                )));
            }
        }
        if self.cutoffs.is_empty() {
            return Err(HarnessError::Input("cutoffs list must not be empty".into()));
        }
        if self.pairs == 0 {
            return Err(HarnessError::Input("pairs must be >= 1".into()));
        }
        for name in &self.recommenders {
            if name != "random" && name != "popular" {
                return Err(HarnessError::Input(format!(
                    "unknown recommender '{name}' (expected random or popular)"
                )));
            }
        }
        self.smoothing()?;
        self.binnings()?;
        self.chain_config()?;
        Ok(())
    }

    pub fn smoothing(&self) -> Result<Smoothing, HarnessError> {
        Smoothing::new(self.alpha).map_err(|e| HarnessError::Input(e.to_string()))
    }

    fn binnings(&self) -> Result<(Binning, Binning), HarnessError> {
        let complexity =
            Binning::complexity(self.bins).map_err(|e| HarnessError::Input(e.to_string()))?;
        let activation =
            Binning::activation(self.bins).map_err(|e| HarnessError::Input(e.to_string()))?;
        Ok((complexity, activation))
    }

    pub fn chain_config(&self) -> Result<ChainConfig, HarnessError> {
        if !(self.window_days.is_finite() && self.window_days >= 0.0) {
            return Err(HarnessError::Input(format!(
                "window_days must be non-negative, got {}",
                self.window_days
            )));
        }
        let window_secs = (self.window_days * 86_400.0).round() as i64;
        ChainConfig::new(self.tau, window_secs).map_err(|e| HarnessError::Input(e.to_string()))
    }

    /// Metric configuration for one point of the sweep.
    pub fn metric_config(
        &self,
        divergence: DivergenceKind,
        weighting: Discount,
        cutoff: usize,
    ) -> Result<MetricConfig, HarnessError> {
        let (complexity_bins, activation_bins) = self.binnings()?;
        let cutoff = (cutoff > 0).then_some(cutoff);
        Ok(MetricConfig {
            divergence,
            weighting: RankWeighting::new(weighting, cutoff)
                .map_err(|e| HarnessError::Input(e.to_string()))?,
            smoothing: self.smoothing()?,
            complexity_bins,
            activation_bins,
            fragmentation_pairs: self.pairs,
            seed: self.seed,
            pool: self.pool,
        })
    }
}

/// Parses `1,2,5,10,20,0`.
pub fn parse_cutoffs(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| format!("bad cutoff '{s}'")))
        .collect()
}

pub fn cutoff_label(cutoff: usize) -> String {
    if cutoff == 0 {
        "@N".to_owned()
    } else {
        format!("@{cutoff}")
    }
}
