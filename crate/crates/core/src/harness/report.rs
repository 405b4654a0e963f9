//! `report.json`, `samples.csv`, `skips.json` and `sensitivity.csv`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::cutoff_label;
use super::HarnessError;
use crate::distrib::Discount;
use crate::divergence::DivergenceKind;
use crate::metrics::{Metric, MetricReport};

/// Four decimal places, as reported in tables.
pub fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// One point of the sweep: a recommender under one metric configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRun {
    pub recommender: String,
    pub divergence: DivergenceKind,
    pub weighting: Discount,
    /// 0 is @N.
    pub cutoff: usize,
    pub reports: Vec<MetricReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub recommender: String,
    pub metric: Metric,
    pub divergence: DivergenceKind,
    pub weighting: Discount,
    pub cutoff: usize,
    pub cutoff_label: String,
    pub n: usize,
    pub skipped: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub ci95: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSettings {
    pub alpha: f64,
    pub bins: usize,
    pub pairs: usize,
    pub seed: u64,
    pub pool: crate::metrics::ContextPool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub settings: ReportSettings,
    pub rows: Vec<ReportRow>,
}

pub fn report_rows(runs: &[EvaluationRun]) -> Vec<ReportRow> {
    runs.iter()
        .flat_map(|run| {
            run.reports.iter().map(move |r| ReportRow {
                recommender: run.recommender.clone(),
                metric: r.metric,
                divergence: run.divergence,
                weighting: run.weighting,
                cutoff: run.cutoff,
                cutoff_label: cutoff_label(run.cutoff),
                n: r.samples.len(),
                skipped: r.skips.len(),
                mean: r.aggregate.map(|a| round4(a.mean)),
                std: r.aggregate.map(|a| round4(a.std)),
                ci95: r.aggregate.map(|a| round4(a.ci95)),
            })
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| HarnessError::Internal(format!("{}: {e}", path.display())))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> HarnessError + '_ {
    move |e| HarnessError::Internal(format!("{}: {e}", path.display()))
}

pub fn write_report_json(
    path: &Path,
    settings: ReportSettings,
    runs: &[EvaluationRun],
) -> Result<(), HarnessError> {
    let file = ReportFile {
        settings,
        rows: report_rows(runs),
    };
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, &file)
        .map_err(|e| HarnessError::Internal(format!("{}: {e}", path.display())))?;
    out.write_all(b"\n").map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

pub const SAMPLES_HEADER: [&str; 7] = [
    "metric",
    "recommender",
    "divergence",
    "weighting",
    "cutoff",
    "pair_id",
    "sample",
];

/// One row per sample, at full precision.
pub fn write_samples_csv(path: &Path, runs: &[EvaluationRun]) -> Result<(), HarnessError> {
    let csv_err = |e: csv::Error| HarnessError::Internal(format!("{}: {e}", path.display()));
    let mut writer = csv::Writer::from_writer(create(path)?);
    writer.write_record(SAMPLES_HEADER).map_err(csv_err)?;
    for run in runs {
        let cutoff = run.cutoff.to_string();
        for report in &run.reports {
            for sample in &report.samples {
                writer
                    .write_record([
                        report.metric.as_str(),
                        &run.recommender,
                        run.divergence.as_str(),
                        run.weighting.as_str(),
                        &cutoff,
                        &sample.id,
                        &sample.value.to_string(),
                    ])
                    .map_err(csv_err)?;
            }
        }
    }
    writer.flush().map_err(io_err(path))
}

#[derive(Debug, Serialize)]
struct SkipRow<'a> {
    recommender: &'a str,
    metric: Metric,
    divergence: DivergenceKind,
    weighting: Discount,
    cutoff: usize,
    id: &'a str,
    reason: &'a str,
}

#[derive(Debug, Serialize)]
struct SkipsFile<'a> {
    total: usize,
    /// Skip counts by reason.
    by_reason: BTreeMap<&'a str, usize>,
    warnings: &'a [String],
    skips: Vec<SkipRow<'a>>,
}

pub fn write_skips_json(
    path: &Path,
    runs: &[EvaluationRun],
    warnings: &[String],
) -> Result<(), HarnessError> {
    let mut skips = Vec::new();
    let mut by_reason: BTreeMap<&str, usize> = BTreeMap::new();
    for run in runs {
        for report in &run.reports {
            for skip in &report.skips {
                *by_reason.entry(skip.reason.as_str()).or_default() += 1;
                skips.push(SkipRow {
                    recommender: &run.recommender,
                    metric: report.metric,
                    divergence: run.divergence,
                    weighting: run.weighting,
                    cutoff: run.cutoff,
                    id: &skip.id,
                    reason: &skip.reason,
                });
            }
        }
    }
    let file = SkipsFile {
        total: skips.len(),
        by_reason,
        warnings,
        skips,
    };
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, &file)
        .map_err(|e| HarnessError::Internal(format!("{}: {e}", path.display())))?;
    out.write_all(b"\n").map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

/// Mean per metric configuration, one column per cutoff in `cutoffs` order.
pub fn write_sensitivity_csv(
    path: &Path,
    runs: &[EvaluationRun],
    cutoffs: &[usize],
) -> Result<(), HarnessError> {
    let csv_err = |e: csv::Error| HarnessError::Internal(format!("{}: {e}", path.display()));
    type RowKey = (usize, Metric, DivergenceKind, Discount);
    let mut table: BTreeMap<RowKey, BTreeMap<usize, Option<f64>>> = BTreeMap::new();
    let mut recommenders: Vec<&str> = Vec::new();
    for run in runs {
        let rec_idx = match recommenders.iter().position(|r| *r == run.recommender) {
            Some(i) => i,
            None => {
                recommenders.push(&run.recommender);
                recommenders.len() - 1
            }
        };
        for report in &run.reports {
            table
                .entry((rec_idx, report.metric, run.divergence, run.weighting))
                .or_default()
                .insert(run.cutoff, report.aggregate.map(|a| round4(a.mean)));
        }
    }
    let mut writer = csv::Writer::from_writer(create(path)?);
    let mut header = vec![
        "recommender".to_owned(),
        "metric".to_owned(),
        "divergence".to_owned(),
        "weighting".to_owned(),
    ];
    header.extend(cutoffs.iter().map(|&c| cutoff_label(c)));
    writer.write_record(&header).map_err(csv_err)?;
    for ((rec_idx, metric, divergence, weighting), by_cutoff) in &table {
        let mut row = vec![
            recommenders[*rec_idx].to_owned(),
            metric.to_string(),
            divergence.to_string(),
            weighting.to_string(),
        ];
        row.extend(cutoffs.iter().map(|c| match by_cutoff.get(c) {
            Some(Some(mean)) => mean.to_string(),
            _ => String::new(),
        }));
        writer.write_record(&row).map_err(csv_err)?;
    }
    writer.flush().map_err(io_err(path))
}
