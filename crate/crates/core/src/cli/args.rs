use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::ClassifierKind;
use crate::discovery::AlgorithmSpec;
use crate::io::TrackSelect;
use crate::polling::{AlgorithmWeights, Objective};
use crate::time::Time;

#[derive(Debug, Parser)]
#[command(name = "ppoll", version, about = "Repeated-pattern discovery, pattern polling and evaluation for symbolic music")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Seed for every randomized step (synth draws one from entropy when omitted).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Suppress summary lines on standard output.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// JSON file of default flag values; flags on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a discovery algorithm on a piece and write the pattern JSON.
    Discover(DiscoverArgs),
    /// Build the polling curve of several pattern files and extract boundaries.
    Poll(PollArgs),
    /// Grid-search polling parameters by cross-validation over annotated pieces.
    TrainPp(TrainArgs),
    /// Score predicted boundaries against annotated pattern boundaries.
    EvalBoundaries(EvalArgs),
    /// Generate a synthetic piece with planted patterns.
    Synth(SynthArgs),
    /// Compute the feature table of pattern occurrences.
    Features(FeaturesArgs),
    /// Cross-validate classifiers on a feature table.
    Classify(ClassifyArgs),
    /// Shadow-feature importance on a feature table.
    Importance(ImportanceArgs),
}

pub(crate) fn parse_track(s: &str) -> Result<TrackSelect, String> {
    match s {
        "densest" => Ok(TrackSelect::Densest),
        "all" => Ok(TrackSelect::All),
        n => n.parse().map(TrackSelect::Index).map_err(|_| format!("expected densest, all or a track index, got '{n}'")),
    }
}

#[derive(Debug, Default, Args)]
pub struct InputArgs {
    /// MIDI track to read: densest, all, or an index.
    #[arg(long, default_value = "densest", value_parser = parse_track)]
    pub track: TrackSelect,

    /// Reject pieces with overlapping notes.
    #[arg(long)]
    pub monophonic: bool,
}

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    /// Piece to analyze (.csv, .mid).
    #[arg(long = "in")]
    pub input: PathBuf,

    /// sia | siatec | cosiatec | siatec-compress:<cr|comp|cov> | siar:<r> | siarct:<a>,<b>[,<r>]
    #[arg(long)]
    pub alg: String,

    /// Output file; defaults to <out-dir>/<piece>.<alg>.json.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub input_opts: InputArgs,
}

impl DiscoverArgs {
    pub fn spec(&self) -> Result<AlgorithmSpec, String> {
        self.alg.parse::<AlgorithmSpec>().map_err(|e| e.to_string())
    }
}

#[derive(Debug, Args, Clone)]
pub struct PpArgs {
    /// File holding polling parameters or a train-pp result.
    #[arg(long)]
    pub params: Option<PathBuf>,

    #[arg(long)]
    pub window: Option<usize>,

    #[arg(long)]
    pub order: Option<usize>,

    /// Minimum steepness of a kept zero-crossing.
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Ignore first-derivative crossings.
    #[arg(long)]
    pub no_first: bool,

    /// Ignore second-derivative crossings.
    #[arg(long)]
    pub no_second: bool,
}

#[derive(Debug, Args)]
pub struct PollArgs {
    /// Pattern JSON files, all for the same piece.
    #[arg(long, num_args = 1.., required = true)]
    pub patterns: Vec<PathBuf>,

    /// Annotated patterns to score against.
    #[arg(long)]
    pub truth: Option<PathBuf>,

    /// The piece itself, to extend the curve over its whole length.
    #[arg(long)]
    pub piece: Option<PathBuf>,

    /// Per-algorithm weights, e.g. `cosiatec=2,sia=1/2`; unlisted algorithms weigh 1.
    #[arg(long, default_value = "")]
    pub weights: AlgorithmWeights,

    /// Grid step in crotchets.
    #[arg(long, default_value = "1")]
    pub resolution: Time,

    /// Matching tolerance for scoring, in crotchets.
    #[arg(long, default_value = "1")]
    pub tolerance: Time,

    /// Divide the curve by the total weight of the contributing algorithms.
    #[arg(long)]
    pub normalize: bool,

    /// Prefix of the output file names.
    #[arg(long, default_value = "poll")]
    pub name: String,

    #[command(flatten)]
    pub pp: PpArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DerivativeSet {
    Both,
    First,
    Second,
}

impl DerivativeSet {
    pub fn flags(self) -> (bool, bool) {
        match self {
            DerivativeSet::Both => (true, true),
            DerivativeSet::First => (true, false),
            DerivativeSet::Second => (false, true),
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Discovered pattern files; grouped into pieces by their piece id.
    #[arg(long, num_args = 1.., required = true)]
    pub patterns: Vec<PathBuf>,

    /// One annotation file per piece.
    #[arg(long, num_args = 1.., required = true)]
    pub truth: Vec<PathBuf>,

    #[arg(long, default_value = "")]
    pub weights: AlgorithmWeights,

    #[arg(long, default_value = "1")]
    pub resolution: Time,

    #[arg(long, default_value = "1")]
    pub tolerance: Time,

    #[arg(long, default_value = "f1")]
    pub objective: Objective,

    #[arg(long, default_value_t = 3)]
    pub folds: usize,

    #[arg(long, value_delimiter = ',', default_value = "3,5,7,9,11")]
    pub windows: Vec<usize>,

    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub orders: Vec<usize>,

    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.25,0.5,1,2")]
    pub lambdas: Vec<f64>,

    /// Derivative sets to try.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "both,first,second")]
    pub flags: Vec<DerivativeSet>,

    /// Output file name inside the output directory.
    #[arg(long, default_value = "trained_params.json")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Boundary JSON files written by `poll`.
    #[arg(long, num_args = 1.., required = true)]
    pub predicted: Vec<PathBuf>,

    /// Annotation files, matched to predictions by piece id.
    #[arg(long, num_args = 1.., required = true)]
    pub truth: Vec<PathBuf>,

    #[arg(long, default_value = "1")]
    pub tolerance: Time,

    #[arg(long, default_value = "eval.csv")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Synthesis configuration JSON (templates, counts, probabilities).
    #[arg(long)]
    pub synth_config: Option<PathBuf>,

    /// Placements per template.
    #[arg(long)]
    pub occurrences: Option<usize>,

    #[arg(long)]
    pub rest_probability: Option<f64>,

    /// Random material must stay below this fraction of the piece.
    #[arg(long)]
    pub cap: Option<f64>,

    /// Base name of the three output files.
    #[arg(long, default_value = "synth")]
    pub name: String,

    /// Also write the piece as a MIDI file.
    #[arg(long)]
    pub midi: bool,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    /// Pattern JSON files; each occurrence becomes one row.
    #[arg(long, num_args = 1.., required = true)]
    pub patterns: Vec<PathBuf>,

    /// Row label: the file's algorithm name, or a fixed label.
    #[arg(long)]
    pub label: Option<String>,

    /// Pieces for the random-excerpt baseline, matched to pattern files by piece id.
    #[arg(long, num_args = 1..)]
    pub pieces: Vec<PathBuf>,

    /// Random excerpts drawn per annotated occurrence (0 disables the baseline).
    #[arg(long, default_value_t = 0)]
    pub baseline_repeats: usize,

    #[arg(long, default_value = "features.csv")]
    pub name: String,

    #[command(flatten)]
    pub input_opts: InputArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Feature table with a `group` column.
    #[arg(long)]
    pub features: PathBuf,

    #[arg(long, default_value_t = 10)]
    pub folds: usize,

    #[arg(long, default_value_t = 3)]
    pub repeats: usize,

    /// Keep class sizes as they are instead of downsampling to the smallest.
    #[arg(long)]
    pub no_balance: bool,

    #[arg(long, value_delimiter = ',', default_value = "rf,nb,lda")]
    pub classifiers: Vec<ClassifierKind>,

    #[arg(long, default_value_t = 200)]
    pub trees: usize,

    /// Features tried per split (default floor(sqrt(dim))).
    #[arg(long)]
    pub mtry: Option<usize>,

    /// Preprocessing: none, scale, all, a component count, or a variance fraction below 1.
    #[arg(long, default_value = "0.95")]
    pub pca: String,

    #[arg(long, default_value = "cv_report.json")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[arg(long)]
    pub features: PathBuf,

    #[arg(long, default_value_t = 20)]
    pub runs: usize,

    #[arg(long, default_value_t = 200)]
    pub trees: usize,

    #[arg(long, default_value = "importance.json")]
    pub name: String,
}
