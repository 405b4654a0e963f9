//! The four CLI subcommands as library calls.

use std::collections::HashSet;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};

use super::baselines::{click_counts, recommend_popular, recommend_random};
use super::config::RunConfig;
use super::report::{
    write_report_json, write_samples_csv, write_sensitivity_csv, write_skips_json, EvaluationRun,
    ReportSettings,
};
use super::HarnessError;
use crate::corpus::{
    load_behaviors, load_catalog, load_enriched, load_recommendations, validate_recommendations,
    write_enriched, write_recommendations, Corpus, ImpressionLog, RecommendationList,
    RecommendationSource,
};
use crate::distrib::Discount;
use crate::divergence::DivergenceKind;
use crate::enrich::{enrich_corpus, load_sidecar, Gazetteer, Lexicon, Resources};
use crate::metrics::evaluate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Random,
    Popular,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Popular => "popular",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" => Ok(Strategy::Random),
            "popular" => Ok(Strategy::Popular),
            other => Err(format!(
                "unknown strategy '{other}' (expected random or popular)"
            )),
        }
    }
}

/// Files written and warnings collected by one subcommand.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub runs: Vec<EvaluationRun>,
}

fn required<'a>(path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path, HarnessError> {
    path.as_deref()
        .ok_or_else(|| HarnessError::Input(format!("missing required input: {what}")))
}

fn output_dir(cfg: &RunConfig) -> Result<&Path, HarnessError> {
    fs::create_dir_all(&cfg.output)
        .map_err(|e| HarnessError::Internal(format!("{}: {e}", cfg.output.display())))?;
    Ok(&cfg.output)
}

fn write_with<F>(path: &Path, write: F) -> Result<(), HarnessError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let wrap = |e: std::io::Error| HarnessError::Internal(format!("{}: {e}", path.display()));
    let mut out = BufWriter::new(File::create(path).map_err(wrap)?);
    write(&mut out).map_err(wrap)?;
    out.flush().map_err(wrap)
}

/// Catalog ready for scoring: either a previously enriched file, or the raw
/// catalog enriched in place. Sidecar overrides are applied last.
pub fn load_corpus(
    cfg: &RunConfig,
    impressions: &[ImpressionLog],
) -> Result<(Corpus, Vec<String>), HarnessError> {
    let mut warnings = Vec::new();
    let mut corpus = if let Some(path) = &cfg.enriched {
        load_enriched(path)?
    } else {
        let news = required(&cfg.news, "news catalog (--news or --enriched)")?;
        let (mut corpus, report) = load_catalog(news, cfg.bodies.as_deref())?;
        warnings.extend(report.warnings);
        corpus.assign_first_seen(impressions);
        let resources = Resources {
            lexicon: cfg.lexicon.as_deref().map(Lexicon::load).transpose()?,
            gazetteer: cfg.gazetteer.as_deref().map(Gazetteer::load).transpose()?,
            chaining: cfg.chain_config()?,
        };
        if resources.lexicon.is_none() {
            warnings.push("no lexicon given: activation left empty".into());
        }
        enrich_corpus(&mut corpus, &resources);
        corpus
    };
    if let Some(path) = &cfg.sidecar {
        warnings.extend(load_sidecar(path, &mut corpus)?.warnings());
    }
    Ok((corpus, warnings))
}

/// Corpus plus the evaluation impressions.
pub fn load_inputs(
    cfg: &RunConfig,
) -> Result<(Corpus, Vec<ImpressionLog>, Vec<String>), HarnessError> {
    let impressions = load_behaviors(required(&cfg.behaviors, "behaviors (--behaviors)")?)?;
    let (corpus, mut warnings) = load_corpus(cfg, &impressions)?;
    let unresolved: HashSet<&str> = impressions
        .iter()
        .flat_map(|imp| imp.unresolved(&corpus))
        .collect();
    if !unresolved.is_empty() {
        warnings.push(format!(
            "{} article ids in behaviors are missing from the catalog",
            unresolved.len()
        ));
    }
    Ok((corpus, impressions, warnings))
}

fn popularity_source(
    cfg: &RunConfig,
    impressions: &[ImpressionLog],
) -> Result<Vec<ImpressionLog>, HarnessError> {
    match &cfg.train_behaviors {
        Some(path) => Ok(load_behaviors(path)?),
        None => Ok(impressions.to_vec()),
    }
}

fn baseline(
    strategy: Strategy,
    cfg: &RunConfig,
    impressions: &[ImpressionLog],
) -> Result<Vec<RecommendationList>, HarnessError> {
    Ok(match strategy {
        Strategy::Random => impressions
            .iter()
            .map(|imp| recommend_random(imp, cfg.seed))
            .collect(),
        Strategy::Popular => {
            let counts = click_counts(&popularity_source(cfg, impressions)?);
            impressions
                .iter()
                .map(|imp| recommend_popular(imp, &counts))
                .collect()
        }
    })
}

/// Built-in baselines followed by external ranking files, each with its
/// report label.
pub fn recommendation_sets(
    cfg: &RunConfig,
    impressions: &[ImpressionLog],
) -> Result<Vec<(String, Vec<RecommendationList>)>, HarnessError> {
    let mut sets = Vec::new();
    for name in &cfg.recommenders {
        let strategy: Strategy = name.parse().map_err(HarnessError::Input)?;
        sets.push((strategy.to_string(), baseline(strategy, cfg, impressions)?));
    }
    for path in &cfg.recommendations {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "external".into());
        let source = RecommendationSource::External(stem);
        let label = source.to_string();
        let recs = load_recommendations(path, source)?;
        validate_recommendations(&recs, impressions)?;
        sets.push((label, recs));
    }
    Ok(sets)
}

/// Every recommender under every (divergence, weighting, cutoff) combination.
pub fn sweep(
    cfg: &RunConfig,
    corpus: &Corpus,
    impressions: &[ImpressionLog],
    sets: &[(String, Vec<RecommendationList>)],
    divergences: &[DivergenceKind],
    weightings: &[Discount],
) -> Result<Vec<EvaluationRun>, HarnessError> {
    let mut runs = Vec::new();
    for (label, recs) in sets {
        for &divergence in divergences {
            for &weighting in weightings {
                for &cutoff in &cfg.cutoffs {
                    let metric_cfg = cfg.metric_config(divergence, weighting, cutoff)?;
                    info!("evaluating {label} {divergence}/{weighting}/{cutoff}");
                    runs.push(EvaluationRun {
                        recommender: label.clone(),
                        divergence,
                        weighting,
                        cutoff,
                        reports: evaluate(corpus, impressions, recs, &metric_cfg),
                    });
                }
            }
        }
    }
    Ok(runs)
}

fn settings(cfg: &RunConfig) -> ReportSettings {
    ReportSettings {
        alpha: cfg.alpha,
        bins: cfg.bins,
        pairs: cfg.pairs,
        seed: cfg.seed,
        pool: cfg.pool,
    }
}

fn write_reports(
    cfg: &RunConfig,
    runs: &[EvaluationRun],
    warnings: &[String],
) -> Result<Vec<PathBuf>, HarnessError> {
    let dir = output_dir(cfg)?;
    let report = dir.join("report.json");
    let samples = dir.join("samples.csv");
    let skips = dir.join("skips.json");
    write_report_json(&report, settings(cfg), runs)?;
    write_samples_csv(&samples, runs)?;
    write_skips_json(&skips, runs, warnings)?;
    Ok(vec![report, samples, skips])
}

fn evaluate_grid(
    cfg: &RunConfig,
    divergences: &[DivergenceKind],
    weightings: &[Discount],
) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let (corpus, impressions, warnings) = load_inputs(cfg)?;
    for w in &warnings {
        warn!("{w}");
    }
    let sets = recommendation_sets(cfg, &impressions)?;
    let runs = sweep(cfg, &corpus, &impressions, &sets, divergences, weightings)?;
    let written = write_reports(cfg, &runs, &warnings)?;
    Ok(RunOutcome {
        written,
        warnings,
        runs,
    })
}

/// `report.json`, `samples.csv` and `skips.json` for the configured
/// divergence and weighting at each configured cutoff.
pub fn run_evaluate(cfg: &RunConfig) -> Result<RunOutcome, HarnessError> {
    evaluate_grid(cfg, &[cfg.divergence], &[cfg.weighting])
}

/// The full divergence × weighting × cutoff grid, plus `sensitivity.csv`.
pub fn run_sensitivity(cfg: &RunConfig) -> Result<RunOutcome, HarnessError> {
    if cfg.divergences.is_empty() || cfg.weightings.is_empty() {
        return Err(HarnessError::Input(
            "sensitivity needs at least one divergence and one weighting".into(),
        ));
    }
    let mut outcome = evaluate_grid(cfg, &cfg.divergences, &cfg.weightings)?;
    let path = cfg.output.join("sensitivity.csv");
    write_sensitivity_csv(&path, &outcome.runs, &cfg.cutoffs)?;
    outcome.written.push(path);
    Ok(outcome)
}

/// Writes `enriched.jsonl`. Behaviors, when given, date undated articles by
/// first appearance.
pub fn run_enrich(cfg: &RunConfig) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let impressions = match &cfg.behaviors {
        Some(path) => load_behaviors(path)?,
        None => Vec::new(),
    };
    let (corpus, warnings) = load_corpus(cfg, &impressions)?;
    for w in &warnings {
        warn!("{w}");
    }
    let path = output_dir(cfg)?.join("enriched.jsonl");
    write_with(&path, |out| write_enriched(&corpus, out))?;
    Ok(RunOutcome {
        written: vec![path],
        warnings,
        runs: Vec::new(),
    })
}

/// Writes `recommendations_<strategy>.jsonl` for the behaviors file.
pub fn run_recommend(cfg: &RunConfig, strategy: Strategy) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let impressions = load_behaviors(required(&cfg.behaviors, "behaviors (--behaviors)")?)?;
    let recs = baseline(strategy, cfg, &impressions)?;
    let path = output_dir(cfg)?.join(format!("recommendations_{strategy}.jsonl"));
    write_with(&path, |out| write_recommendations(&recs, out))?;
    Ok(RunOutcome {
        written: vec![path],
        ..RunOutcome::default()
    })
}
