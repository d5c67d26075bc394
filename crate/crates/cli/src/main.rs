use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use barrier_core::corpus::Category;
use barrier_core::features::FeatureMode;
use barrier_core::labeler::BarrierKind;
use barrier_core::models::ModelKind;
use barrier_core::pipeline::{ExternalRequest, Overrides, Run, RunConfig, Stage};
use barrier_core::synth::FixtureKind;
use barrier_core::Result;

/// News-spreading barrier annotation and classification pipeline.
#[derive(Parser)]
#[command(name = "barriers", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Run configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated barrier names.
    #[arg(long, global = true, value_delimiter = ',')]
    barrier: Vec<BarrierKind>,
    /// Comma-separated category names.
    #[arg(long, global = true, value_delimiter = ',')]
    category: Vec<Category>,
    /// plain or augmented.
    #[arg(long, global = true)]
    mode: Option<FeatureMode>,
    /// Comma-separated model kinds.
    #[arg(long, global = true, value_delimiter = ',')]
    model: Vec<ModelKind>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Load articles, group events, report rejected lines.
    Ingest,
    /// Label events per barrier.
    Annotate,
    /// Score headlines and summarize per class.
    Sentiment,
    /// Relation statistics and class intersections.
    Inferences,
    /// Build and split feature matrices.
    Featurize,
    /// Train one model per dataset and model kind.
    Train,
    /// Score trained models; optionally score an external prediction file.
    Evaluate {
        /// File of `article_id<TAB>label` lines for the single configured dataset.
        #[arg(long)]
        external: Option<PathBuf>,
    },
    /// Tabular figure and table equivalents.
    Report,
    /// All stages in order.
    Pipeline,
    /// Write a synthetic fixture and its config.toml.
    Synth {
        /// directional or small.
        kind: FixtureKind,
        #[arg(long, default_value_t = 7)]
        fixture_seed: u64,
        /// Target directory.
        dir: PathBuf,
    },
}

fn load_config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::load(path)?,
        None => {
            let mut cfg = RunConfig::default();
            cfg.apply(&Overrides::default());
            cfg
        }
    };
    cfg.apply(&Overrides {
        seed: g.seed,
        barriers: list(&g.barrier),
        categories: list(&g.category),
        mode: g.mode,
        models: list(&g.model),
        output: g.out.clone(),
    });
    Ok(cfg)
}

fn list<T: Clone>(v: &[T]) -> Option<Vec<T>> {
    (!v.is_empty()).then(|| v.to_vec())
}

fn execute(cli: Cli) -> Result<()> {
    let stage = match cli.command {
        Command::Synth {
            kind,
            fixture_seed,
            dir,
        } => {
            let path = kind.write(fixture_seed, &dir)?;
            println!("{}", path.display());
            return Ok(());
        }
        Command::Pipeline => {
            let run = Run::new(load_config(&cli.global)?)?;
            run.pipeline()?;
            println!("{}", run.out().join("manifest.tsv").display());
            return Ok(());
        }
        Command::Evaluate { external } => {
            let run = Run::new(load_config(&cli.global)?)?;
            let req = external.map(|predictions| ExternalRequest { predictions });
            return run.run_stage(Stage::Evaluate, req.as_ref());
        }
        Command::Ingest => Stage::Ingest,
        Command::Annotate => Stage::Annotate,
        Command::Sentiment => Stage::Sentiment,
        Command::Inferences => Stage::Inferences,
        Command::Featurize => Stage::Featurize,
        Command::Train => Stage::Train,
        Command::Report => Stage::Report,
    };
    Run::new(load_config(&cli.global)?)?.run_stage(stage, None)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
