use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "gradient",
    version,
    about = "Emotion-gradient paraphrasing toolkit",
    long_about = "Prepare emotion-labeled paraphrase corpora, inspect the emotion transition \
                  graph, run paraphrase backends, score outputs and serve the HTTP API.",
    after_help = "Examples:\n  \
      gradient graph suggest anger\n  \
      gradient corpus ingest --format paws --input train.tsv --out paws.jsonl\n  \
      gradient corpus filter --input labeled.jsonl --pwi-threshold 0.825 --out kept.jsonl\n  \
      gradient paraphrase --text \"you never listen\" --source anger --target annoyance\n  \
      gradient evaluate --dataset test.jsonl --model-name t5 --generator remote --out report/\n\n\
      Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error."
)]
pub struct Cli {
    /// Random seed for splits (default 42)
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// More logging; repeat for debug output
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,

    /// TOML file with default settings
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Corpus preparation
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Transition graph queries
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Paraphrase one text toward a target emotion
    Paraphrase(ParaphraseArgs),
    /// Evaluation metrics
    #[command(subcommand)]
    Metrics(MetricsCommand),
    /// Run the evaluation harness and write report.csv, report.json, report.txt
    Evaluate(EvaluateArgs),
    /// Serve the HTTP JSON API
    Serve(ServeArgs),
}

/// Where records go. Without `--out` they are written to standard output.
#[derive(Args, Debug, Clone)]
pub struct OutArg {
    /// Output JSONL file (default: standard output)
    #[arg(long, short, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct InputArg {
    /// Input JSONL file of pair records
    #[arg(long, short, value_name = "FILE")]
    pub input: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum CorpusCommand {
    /// Convert a raw paraphrase corpus to JSONL pair records
    Ingest {
        /// paws, mrpc, qqp, qqp-csv, twitter-url or generic
        #[arg(long)]
        format: String,
        /// Raw corpus file
        #[arg(long, short, value_name = "FILE")]
        input: PathBuf,
        /// Split tag for every record: train, test or unsplit
        #[arg(long, default_value = "unsplit")]
        split: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Label source and target emotions with a classifier
    Label {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        backends: ClassifierArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Apply the drop rules and report per-rule counts
    Filter {
        #[command(flatten)]
        input: InputArg,
        /// Drop pairs with a PWI score below this value
        #[arg(long)]
        pwi_threshold: Option<f64>,
        /// Keep pairs without a strict rater majority
        #[arg(long)]
        no_majority: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Split into train and test sets
    Split {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_enum, default_value_t = SplitKind::Random)]
        policy: SplitKind,
        /// Train fraction for the random policy
        #[arg(long, default_value_t = 0.8)]
        ratio: f64,
        /// Exchange train and test (limited-data configuration)
        #[arg(long)]
        swap: bool,
        #[arg(long, value_name = "FILE")]
        train_out: PathBuf,
        #[arg(long, value_name = "FILE")]
        test_out: PathBuf,
    },
    /// Keep only pairs whose transition is a graph edge
    Restrict {
        #[command(flatten)]
        input: InputArg,
        /// Graph config JSON (default: built-in graph)
        #[arg(long, value_name = "FILE")]
        graph: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Print corpus statistics as JSON
    Stats {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_name = "FILE")]
        graph: Option<PathBuf>,
    },
    /// Concatenate record files, dropping repeated ids
    Merge {
        /// Input JSONL files, in priority order
        #[arg(long, short, value_name = "FILE", required = true)]
        input: Vec<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    Presplit,
    Random,
}

#[derive(Subcommand, Debug)]
pub enum GraphCommand {
    /// Print the graph config document
    Export {
        #[arg(long, value_name = "FILE")]
        graph: Option<PathBuf>,
        #[arg(long, short, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Check a graph config file against the graph invariants
    Validate {
        #[arg(value_name = "FILE")]
        file: PathBuf,
    },
    /// List recommended target emotions, closest first
    Suggest {
        /// Emotion name or id
        emotion: String,
        #[arg(long, value_name = "FILE")]
        graph: Option<PathBuf>,
        /// Print JSON instead of a table
        #[arg(long)]
        json: bool,
    },
}

/// Classifier selection.
#[derive(Args, Debug, Clone, Default)]
pub struct ClassifierArgs {
    /// lexicon, lexicon:FILE, fixed:FILE, remote or remote:URL
    #[arg(long, value_name = "SPEC")]
    pub classifier: Option<String>,
    /// Dominant-emotion threshold, strictly between 0 and 1
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub remote: RemoteArgs,
}

#[derive(Args, Debug, Clone, Default)]
pub struct RemoteArgs {
    /// Request timeout for remote backends, in seconds
    #[arg(long, value_name = "SECS")]
    pub timeout: Option<u64>,
    /// Items per remote request
    #[arg(long)]
    pub batch_size: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GeneratorArg {
    /// echo, oracle, oracle:FILE, remote or remote:URL
    #[arg(long, value_name = "SPEC")]
    pub generator: Option<String>,
    /// Maximum output length passed to the generator
    #[arg(long)]
    pub max_length: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ParaphraseArgs {
    #[arg(long)]
    pub text: String,
    /// Source emotion; classified when omitted
    #[arg(long)]
    pub source: Option<String>,
    /// Target emotion
    #[arg(long)]
    pub target: String,
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    #[command(flatten)]
    pub generator: GeneratorArg,
}

#[derive(Subcommand, Debug)]
pub enum MetricsCommand {
    /// Score hypotheses against references
    Score {
        /// JSONL with id, hypothesis and optionally reference, pred_emotion, target_emotion
        #[arg(long, value_name = "FILE")]
        pred: PathBuf,
        /// JSONL with id, reference and optionally target_emotion, joined on id
        #[arg(long = "ref", value_name = "FILE")]
        reference: Option<PathBuf>,
        /// Also compute exact_match from the emotion fields
        #[arg(long)]
        emotions: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceArg {
    Target,
    Input,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Labeled JSONL pair records
    #[arg(long, value_name = "FILE")]
    pub dataset: PathBuf,
    #[arg(long)]
    pub model_name: String,
    /// twit0.825, mix, combined or any custom name
    #[arg(long, default_value = "custom")]
    pub dataset_name: String,
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Evaluate only graph-valid pairs
    #[arg(long)]
    pub restricted: bool,
    /// Text the paraphrase metrics compare against
    #[arg(long, value_enum, default_value_t = ReferenceArg::Target)]
    pub reference: ReferenceArg,
    /// Report directory; runs already reported there are kept
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Per-pair cache file (default: DIR/cache.jsonl)
    #[arg(long, value_name = "FILE")]
    pub cache: Option<PathBuf>,
    #[arg(long, conflicts_with = "cache")]
    pub no_cache: bool,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    #[command(flatten)]
    pub generator: GeneratorArg,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long)]
    pub host: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Allowed CORS origin; repeatable (default: any)
    #[arg(long = "cors-origin", value_name = "ORIGIN")]
    pub cors_origins: Vec<String>,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    #[command(flatten)]
    pub generator: GeneratorArg,
}
