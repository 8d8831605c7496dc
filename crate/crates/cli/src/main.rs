use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use discatt_cli::{commands, CliError, Overrides, RunConfig};

/// Discriminative attribute pipeline: relation-model training, feature
/// extraction, classifier training, prediction, evaluation and ablation.
///
/// All state lives in the config file and command-line flags; no environment
/// variables are read (except RUST_LOG for log verbosity).
#[derive(Debug, Parser)]
#[command(name = "discatt", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Run configuration (JSON).
    #[arg(long, global = true, default_value = "config.json")]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    embeddings: Option<PathBuf>,
    #[arg(long, global = true)]
    leads: Option<PathBuf>,
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    #[arg(long, global = true)]
    unigrams: Option<PathBuf>,
    #[arg(long, global = true)]
    bigrams: Option<PathBuf>,
    #[arg(long, global = true)]
    kg_edges: Option<PathBuf>,
    #[arg(long, global = true)]
    schema: Option<PathBuf>,
    #[arg(long, global = true)]
    train: Option<PathBuf>,
    #[arg(long, global = true)]
    validation: Option<PathBuf>,
    #[arg(long, global = true)]
    test: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train the relation model on the knowledge graph.
    TrainSme,
    /// Write the 15-column feature matrix of a split.
    ExtractFeatures {
        /// `train`, `validation`, `test`, or a CSV path.
        split: String,
    },
    /// Train the clipped linear SVM on the training split.
    Train,
    /// Predict a split with the trained classifier.
    Predict {
        /// `train`, `validation`, `test`, or a CSV path.
        split: String,
    },
    /// Score a predictions file against gold labels.
    Evaluate {
        predictions: PathBuf,
        /// `train`, `validation`, `test`, or a CSV path.
        gold: String,
    },
    /// Train and evaluate on all 31 non-empty feature-source subsets.
    Ablate,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = cli.global;
    let overrides = Overrides {
        seed: g.seed,
        out_dir: g.out,
        embeddings: g.embeddings,
        leads: g.leads,
        lexicon: g.lexicon,
        unigrams: g.unigrams,
        bigrams: g.bigrams,
        kg_edges: g.kg_edges,
        schema: g.schema,
        train: g.train,
        validation: g.validation,
        test: g.test,
    };
    let cfg = RunConfig::load(&g.config, &overrides)?;
    let written = match cli.command {
        Command::TrainSme => vec![commands::train_sme(&cfg)?],
        Command::ExtractFeatures { split } => vec![commands::extract_features(&cfg, &split)?],
        Command::Train => {
            let out = commands::train(&cfg)?;
            vec![out.classifier, out.report]
        }
        Command::Predict { split } => vec![commands::predict(&cfg, &split)?],
        Command::Evaluate { predictions, gold } => {
            vec![commands::evaluate_predictions(&cfg, &predictions, &gold)?]
        }
        Command::Ablate => {
            let out = commands::run_ablation(&cfg)?;
            vec![out.csv, out.points]
        }
    };
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
