use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spanchance::corpus::{OutputFormat, ParseOptions, TagScheme, DEFAULT_PARTITION_THRESHOLD};
use spanchance::{
    Arithmetic, ChanceOptions, DifficultyReading, DistributionOptions, Model, DEFAULT_ALPHA, DEFAULT_EXACT_LIMIT,
};

#[derive(Debug, Parser)]
#[command(name = "spanchance", version, about = "Chance-corrected agreement for span annotation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Placement distribution of one segment (or every segment) of a profile.
    Distribution(DistributionArgs),
    /// Observed, chance and corrected agreement between two annotations or corpora.
    Agree(AgreeArgs),
    /// Difficulty of a task from one or more profiles, or from a gold corpus.
    Difficulty(DifficultyArgs),
    /// Split gold sentences by chance level.
    Partition(PartitionArgs),
    /// Compare analytic, enumerated and Monte Carlo expected F1.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Overlap,
    Nooverlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    Iob1,
    Iob2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadingArg {
    Symmetric,
    FixedGold,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Random annotation model.
    #[arg(long, value_enum, default_value = "nooverlap")]
    pub model: ModelArg,

    /// Uniform approximation threshold, strictly between 0 and 1.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,

    /// Never substitute the uniform approximation.
    #[arg(long)]
    pub no_approx: bool,

    /// Force exact integer arithmetic.
    #[arg(long, conflicts_with = "log")]
    pub exact: bool,

    /// Force log-space arithmetic.
    #[arg(long)]
    pub log: bool,

    /// Automatic mode switches to log space when n - a + k exceeds this.
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    pub exact_limit: usize,

    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,

    /// Seed for Monte Carlo sampling.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Worker threads (defaults to available cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl Common {
    pub fn model(&self) -> Model {
        match self.model {
            ModelArg::Overlap => Model::Overlapping,
            ModelArg::Nooverlap => Model::NonOverlapping,
        }
    }

    pub fn arithmetic(&self) -> Arithmetic {
        if self.exact {
            Arithmetic::Exact
        } else if self.log {
            Arithmetic::Log
        } else {
            Arithmetic::Auto {
                exact_limit: self.exact_limit,
            }
        }
    }

    pub fn distribution_options(&self) -> DistributionOptions {
        DistributionOptions {
            arithmetic: self.arithmetic(),
            approx_alpha: (!self.no_approx).then_some(self.alpha),
        }
    }

    pub fn chance_options(&self) -> ChanceOptions {
        ChanceOptions {
            model: self.model(),
            distribution: self.distribution_options(),
        }
    }

    pub fn format(&self) -> OutputFormat {
        match self.format {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }

    pub fn jobs(&self) -> usize {
        self.jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
    }
}

/// Parsing flags for CoNLL inputs.
#[derive(Debug, Clone, Args)]
pub struct ConllFlags {
    /// Tagging scheme of the inputs.
    #[arg(long, value_enum, default_value = "iob2")]
    pub scheme: SchemeArg,

    /// Reject entities that open with I- instead of repairing them.
    #[arg(long)]
    pub strict: bool,
}

impl ConllFlags {
    pub fn options(&self, tag_column: Option<usize>) -> ParseOptions {
        ParseOptions {
            scheme: match self.scheme {
                SchemeArg::Iob1 => TagScheme::Iob1,
                SchemeArg::Iob2 => TagScheme::Iob2,
            },
            strict: self.strict,
            tag_column,
        }
    }
}

#[derive(Debug, Args)]
pub struct DistributionArgs {
    /// Sequence length.
    #[arg(short = 'n', long = "tokens")]
    pub n: usize,

    /// Comma-separated segment lengths.
    #[arg(short = 'l', long = "lengths", value_delimiter = ',', required = true)]
    pub lengths: Vec<usize>,

    /// 1-based segment index; all segments when omitted.
    #[arg(short = 'i', long = "index")]
    pub index: Option<usize>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct AgreeArgs {
    /// Sequence length for inline spans.
    #[arg(short = 'n', long = "tokens", requires = "spans1")]
    pub n: Option<usize>,

    /// First annotation as start:length pairs, e.g. 4:2,9:3 (1-based starts).
    #[arg(long, requires_all = ["n", "spans2"], conflicts_with = "gold")]
    pub spans1: Option<String>,

    /// Second annotation as start:length pairs.
    #[arg(long, requires = "spans1")]
    pub spans2: Option<String>,

    /// Gold CoNLL file ("-" for standard input).
    #[arg(long)]
    pub gold: Option<PathBuf>,

    /// System CoNLL file; defaults to the gold file when --system-column is given.
    #[arg(long, requires = "gold")]
    pub system: Option<PathBuf>,

    /// 0-based tag column in the gold file (default: last column).
    #[arg(long)]
    pub gold_column: Option<usize>,

    /// 0-based tag column in the system file (default: last column).
    #[arg(long)]
    pub system_column: Option<usize>,

    /// Reading of the single-gold difficulty for inline spans.
    #[arg(long, value_enum, default_value = "symmetric")]
    pub difficulty_reading: ReadingArg,

    #[command(flatten)]
    pub conll: ConllFlags,

    #[command(flatten)]
    pub common: Common,
}

impl AgreeArgs {
    pub fn reading(&self) -> DifficultyReading {
        match self.difficulty_reading {
            ReadingArg::Symmetric => DifficultyReading::Symmetric,
            ReadingArg::FixedGold => DifficultyReading::FixedGold,
        }
    }
}

#[derive(Debug, Args)]
pub struct DifficultyArgs {
    /// Sequence length.
    #[arg(short = 'n', long = "tokens", requires = "lengths")]
    pub n: Option<usize>,

    /// Comma-separated lengths of one annotator's profile; repeat per annotator.
    #[arg(short = 'l', long = "lengths", conflicts_with = "gold")]
    pub lengths: Vec<String>,

    /// Gold CoNLL file; reports pooled corpus difficulty.
    #[arg(long)]
    pub gold: Option<PathBuf>,

    #[command(flatten)]
    pub conll: ConllFlags,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Gold CoNLL file ("-" for standard input).
    #[arg(long)]
    pub gold: PathBuf,

    /// Chance level above which a sentence goes to subset1.
    #[arg(long, default_value_t = DEFAULT_PARTITION_THRESHOLD)]
    pub threshold: f64,

    /// 0-based tag column (default: last column).
    #[arg(long)]
    pub gold_column: Option<usize>,

    #[command(flatten)]
    pub conll: ConllFlags,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Sequence length.
    #[arg(short = 'n', long = "tokens")]
    pub n: usize,

    /// First profile, comma-separated lengths (may be empty).
    #[arg(long, value_delimiter = ',', num_args = 0.., allow_hyphen_values = false)]
    pub l1: Vec<usize>,

    /// Second profile, comma-separated lengths (may be empty).
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub l2: Vec<usize>,

    /// Monte Carlo samples.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,

    /// Maximum number of configuration pairs to enumerate.
    #[arg(long, default_value_t = spanchance::DEFAULT_BUDGET)]
    pub budget: u64,

    #[command(flatten)]
    pub common: Common,
}

/// Effective settings echoed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub model: Model,
    pub alpha: f64,
    pub approximation: bool,
    pub arithmetic: Arithmetic,
    pub samples: Option<u64>,
    pub seed: u64,
    pub format: FormatArg,
    pub jobs: usize,
}

impl RunConfig {
    pub fn new(command: &'static str, common: &Common, samples: Option<u64>) -> Self {
        RunConfig {
            command,
            model: common.model(),
            alpha: common.alpha,
            approximation: !common.no_approx,
            arithmetic: common.arithmetic(),
            samples,
            seed: common.seed,
            format: common.format,
            jobs: common.jobs(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
