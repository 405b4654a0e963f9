use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use news_diversity::distrib::Discount;
use news_diversity::divergence::DivergenceKind;
use news_diversity::harness::{
    run_enrich, run_evaluate, run_recommend, run_sensitivity, HarnessError, RunConfig, RunOutcome,
    Strategy,
};
use news_diversity::metrics::ContextPool;
use news_diversity::synth::{self, SynthConfig};

#[derive(Parser)]
#[command(
    name = "newsdiv",
    version,
    about = "Rank-aware diversity metrics for news recommendations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Annotate the catalog and write enriched.jsonl.
    Enrich(Common),
    /// Rank every impression's candidates with a baseline.
    Recommend {
        #[arg(long)]
        strategy: Strategy,
        #[command(flatten)]
        common: Common,
    },
    /// Score recommenders and write report.json, samples.csv, skips.json.
    Evaluate(Common),
    /// Sweep divergences, weightings and cutoffs; also writes sensitivity.csv.
    Sensitivity(Common),
    /// Write a seeded synthetic catalog, behaviors log, lexicon and gazetteer.
    Synth {
        #[arg(long, default_value = "synth")]
        output: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 600)]
        impressions: usize,
    },
}

#[derive(Args, Default)]
struct Common {
    /// TOML file with `key = value` settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    news: Option<PathBuf>,
    #[arg(long)]
    bodies: Option<PathBuf>,
    #[arg(long)]
    enriched: Option<PathBuf>,
    #[arg(long)]
    behaviors: Option<PathBuf>,
    /// Behaviors used for click popularity (default: --behaviors).
    #[arg(long)]
    train_behaviors: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// External ranking file (JSON lines); repeatable.
    #[arg(long = "recommendations")]
    recommendations: Vec<PathBuf>,
    /// Built-in baselines to score, comma separated.
    #[arg(long, value_delimiter = ',')]
    recommenders: Option<Vec<String>>,
    #[arg(long)]
    divergence: Option<DivergenceKind>,
    #[arg(long)]
    weighting: Option<Discount>,
    /// Comma-separated cutoffs; 0 means the whole list (@N).
    #[arg(long, value_delimiter = ',')]
    cutoffs: Option<Vec<usize>>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    pool: Option<ContextPool>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    window_days: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Common {
    fn into_config(self) -> Result<RunConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set_opt {
            ($($field:ident),*) => {$(
                if self.$field.is_some() { cfg.$field = self.$field; }
            )*};
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { cfg.$field = v; }
            )*};
        }
        set_opt!(
            news,
            bodies,
            enriched,
            behaviors,
            train_behaviors,
            lexicon,
            gazetteer,
            sidecar
        );
        set!(
            recommenders,
            divergence,
            weighting,
            cutoffs,
            alpha,
            bins,
            pairs,
            seed,
            pool,
            tau,
            window_days,
            output
        );
        if !self.recommendations.is_empty() {
            cfg.recommendations = self.recommendations;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<RunOutcome, HarnessError> {
    match cli.command {
        Command::Enrich(common) => run_enrich(&common.into_config()?),
        Command::Recommend { strategy, common } => run_recommend(&common.into_config()?, strategy),
        Command::Evaluate(common) => run_evaluate(&common.into_config()?),
        Command::Sensitivity(common) => run_sensitivity(&common.into_config()?),
        Command::Synth {
            output,
            seed,
            impressions,
        } => {
            let cfg = SynthConfig {
                seed,
                impressions,
                ..SynthConfig::default()
            };
            let paths = synth::generate(&cfg)
                .write_to(&output)
                .map_err(|e| HarnessError::Internal(format!("{}: {e}", output.display())))?;
            Ok(RunOutcome {
                written: vec![
                    paths.news,
                    paths.bodies,
                    paths.behaviors,
                    paths.lexicon,
                    paths.gazetteer,
                ],
                ..RunOutcome::default()
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(outcome) => {
            for path in &outcome.written {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("newsdiv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
