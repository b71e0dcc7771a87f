use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sil_core::corpus::{SetDistance, SplitName, SplitPart};
use sil_core::detection::{ContextMode, DetectorKind, KnnMetric, KnnWeighting};
use sil_core::features::Tokenizer;
use sil_core::metrics::{ApVariant, Metric, ReportFormat};
use sil_core::pipeline::{EdBackend, Fusion, MdSource, SliceAxis};

#[derive(Debug, Parser)]
#[command(name = "sil", version, about = "Survey item linking: mention detection, retrieval and evaluation")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for batch work (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Default location of corpus.jsonl, split.json and kb.jsonl.
    #[arg(long, global = true, env = "SIL_DATA_DIR")]
    pub data_dir: Option<PathBuf>,

    /// TOML file with per-command flag defaults, e.g. `[smp.run] k = 10`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Corpus statistics per split part.
    Stats(StatsArgs),
    /// Inter-annotator agreement.
    #[command(subcommand)]
    Agreement(AgreementCommand),
    /// Knowledge-base utilities.
    #[command(subcommand)]
    Kb(KbCommand),
    /// Mention detection.
    #[command(subcommand)]
    Detect(DetectCommand),
    /// Entity disambiguation by retrieval.
    #[command(subcommand)]
    Retrieve(RetrieveCommand),
    /// Mention detection followed by retrieval.
    #[command(subcommand)]
    Smp(SmpCommand),
    /// Document-level aggregation and recall curve.
    Aggregate(AggregateArgs),
    /// Pseudo-labeled sentence pairs.
    #[command(subcommand)]
    Pairs(PairsCommand),
    /// Render or merge evaluation reports.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Stats(_) => "stats",
            Command::Agreement(AgreementCommand::Kappa(_)) => "agreement kappa",
            Command::Agreement(AgreementCommand::Alpha(_)) => "agreement alpha",
            Command::Kb(KbCommand::Index(_)) => "kb index",
            Command::Kb(KbCommand::Dedup(_)) => "kb dedup",
            Command::Detect(DetectCommand::Train(_)) => "detect train",
            Command::Detect(DetectCommand::Predict(_)) => "detect predict",
            Command::Detect(DetectCommand::Eval(_)) => "detect eval",
            Command::Retrieve(RetrieveCommand::Index(_)) => "retrieve index",
            Command::Retrieve(RetrieveCommand::Query(_)) => "retrieve query",
            Command::Retrieve(RetrieveCommand::Eval(_)) => "retrieve eval",
            Command::Smp(SmpCommand::Run(_)) => "smp run",
            Command::Aggregate(_) => "aggregate",
            Command::Pairs(PairsCommand::Mp(_)) => "pairs mp",
            Command::Pairs(PairsCommand::Sp(_)) => "pairs sp",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    /// Corpus JSONL (default: $SIL_DATA_DIR/corpus.jsonl).
    #[arg(long)]
    pub corpus: Option<PathBuf>,

    /// Split JSON (default: $SIL_DATA_DIR/split.json when parts are selected).
    #[arg(long)]
    pub split: Option<PathBuf>,

    #[arg(long, default_value = "diff")]
    pub split_name: SplitName,

    /// Restrict to these split parts (comma-separated); all documents if absent.
    #[arg(long, value_delimiter = ',')]
    pub part: Vec<SplitPart>,
}

#[derive(Debug, Clone, Args)]
pub struct KbArgs {
    /// Knowledge base JSONL (default: $SIL_DATA_DIR/kb.jsonl).
    #[arg(long)]
    pub kb: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// Metadata fields forming an item's text.
    #[arg(long, default_value = "label,question,item_category,answers")]
    pub fields: String,

    #[arg(long, default_value = " ")]
    pub separator: String,
}

#[derive(Debug, Clone, Args)]
pub struct MetricArgs {
    #[arg(long, default_value_t = 10)]
    pub k: usize,

    /// Metrics to report (default: recall, map, ndcg).
    #[arg(long, value_delimiter = ',')]
    pub metric: Vec<Metric>,

    #[arg(long, default_value = "standard")]
    pub ap_variant: ApVariant,

    /// Also report rows crediting same-group neighbors within this radius.
    #[arg(long, default_value_t = 0)]
    pub relaxed_radius: u64,
}

#[derive(Debug, Clone, Args)]
pub struct DenseArgs {
    /// Item vectors (`id<TAB>values`); hashed bag-of-words when absent.
    #[arg(long)]
    pub item_embeddings: Option<PathBuf>,

    /// Query vectors keyed `doc_id#idx`; hashed when absent.
    #[arg(long)]
    pub query_embeddings: Option<PathBuf>,

    #[arg(long, default_value_t = 256)]
    pub hash_dim: usize,

    /// Tokenizer for hashed vectors.
    #[arg(long, default_value = "word")]
    pub hash_tokenizer: Tokenizer,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    #[arg(long, default_value = "table")]
    pub format: StatsFormat,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum StatsFormat {
    Table,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum AgreementCommand {
    /// Cohen's kappa over two binary columns (`0|1<TAB>0|1` per line).
    Kappa(KappaArgs),
    /// Krippendorff's alpha over set-valued annotations (one JSON array per annotator line).
    Alpha(AlphaArgs),
}

#[derive(Debug, Clone, Args)]
pub struct KappaArgs {
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AlphaArgs {
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long, default_value = "jaccard")]
    pub distance: SetDistance,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum KbCommand {
    /// Write each item's verbalized text as `item_id<TAB>text`.
    Index(KbIndexArgs),
    /// Collapse same-survey items with identical text.
    Dedup(KbDedupArgs),
}

#[derive(Debug, Clone, Args)]
pub struct KbIndexArgs {
    #[command(flatten)]
    pub kb: KbArgs,

    #[command(flatten)]
    pub fields: FieldArgs,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct KbDedupArgs {
    #[command(flatten)]
    pub kb: KbArgs,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum DetectCommand {
    Train(DetectTrainArgs),
    Predict(DetectPredictArgs),
    Eval(DetectEvalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DetectTrainArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    #[arg(long, default_value = "logreg")]
    pub kind: DetectorKind,

    #[arg(long, default_value = "word")]
    pub tokenizer: Tokenizer,

    #[arg(long, default_value = "none")]
    pub context: ContextMode,

    /// Neighbor window for `--context neighbor`.
    #[arg(long, default_value_t = 1)]
    pub window: usize,

    #[arg(long, default_value_t = 200)]
    pub epochs: usize,

    #[arg(long, default_value_t = 1.0)]
    pub learning_rate: f64,

    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,

    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,

    #[arg(long, default_value_t = 5)]
    pub knn_k: usize,

    #[arg(long, default_value = "cosine")]
    pub knn_metric: KnnMetric,

    #[arg(long, default_value = "uniform")]
    pub knn_weighting: KnnWeighting,

    /// k-NN references: KB items as positives plus training negatives.
    #[arg(long)]
    pub kb_references: bool,

    #[command(flatten)]
    pub kb: KbArgs,

    #[command(flatten)]
    pub fields: FieldArgs,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DetectPredictArgs {
    #[arg(long)]
    pub model: PathBuf,

    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Second prediction file whose scores are fused with the model's.
    #[arg(long)]
    pub fuse: Option<PathBuf>,

    /// Weight of the model score in the fusion.
    #[arg(long, default_value_t = 0.5)]
    pub fuse_weight: f64,

    #[arg(long, default_value_t = 0.5)]
    pub fuse_threshold: f64,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DetectEvalArgs {
    #[arg(long)]
    pub predictions: PathBuf,

    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Extra slice axes: type, subtype, item_count.
    #[arg(long, value_delimiter = ',')]
    pub slices: Vec<SliceAxis>,

    #[arg(long)]
    pub format: Option<ReportFormat>,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum RetrieveCommand {
    /// Build a BM25 index over verbalized KB items.
    Index(RetrieveIndexArgs),
    /// Rank candidates for corpus sentences and write a run file.
    Query(RetrieveQueryArgs),
    /// Score a run file against qrels.
    Eval(RetrieveEvalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RetrieveIndexArgs {
    #[command(flatten)]
    pub kb: KbArgs,

    #[command(flatten)]
    pub fields: FieldArgs,

    #[arg(long, default_value = "word")]
    pub tokenizer: Tokenizer,

    #[arg(long, default_value_t = 1.2)]
    pub k1: f64,

    #[arg(long, default_value_t = 0.75)]
    pub b: f64,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    #[arg(long, default_value = "bm25")]
    pub backend: EdBackend,

    /// Prebuilt BM25 index; built from the KB when absent.
    #[arg(long)]
    pub index: Option<PathBuf>,

    #[command(flatten)]
    pub fields: FieldArgs,

    #[arg(long, default_value = "word")]
    pub tokenizer: Tokenizer,

    #[command(flatten)]
    pub dense: DenseArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RetrieveQueryArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    #[command(flatten)]
    pub kb: KbArgs,

    #[command(flatten)]
    pub engine: EngineArgs,

    #[arg(long, default_value_t = 10)]
    pub k: usize,

    /// Rank against the whole KB instead of the cited surveys' items.
    #[arg(long)]
    pub no_filter: bool,

    #[arg(long, default_value = "none")]
    pub context: ContextMode,

    /// Query the sentences predicted positive in this file instead of the gold positives.
    #[arg(long)]
    pub predictions: Option<PathBuf>,

    #[arg(long)]
    pub out: PathBuf,

    /// Also write the gold qrels of the selected corpus.
    #[arg(long)]
    pub qrels_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RetrieveEvalArgs {
    #[arg(long)]
    pub run: PathBuf,

    #[arg(long)]
    pub qrels: PathBuf,

    /// Needed for `--relaxed-radius`.
    #[arg(long)]
    pub kb: Option<PathBuf>,

    #[command(flatten)]
    pub metrics: MetricArgs,

    /// Slice axes; requires `--corpus`.
    #[arg(long, value_delimiter = ',')]
    pub slices: Vec<SliceAxis>,

    #[arg(long)]
    pub corpus: Option<PathBuf>,

    /// Output format; a single metric without a format prints the bare value.
    #[arg(long)]
    pub format: Option<ReportFormat>,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SmpCommand {
    Run(SmpRunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SmpRunArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    #[command(flatten)]
    pub kb: KbArgs,

    #[arg(long, default_value = "oracle")]
    pub md: MdSource,

    /// Detector for `--md model`.
    #[arg(long)]
    pub model: Option<PathBuf>,

    /// Prediction file for `--md file`.
    #[arg(long)]
    pub predictions: Option<PathBuf>,

    #[arg(long, default_value = "bm25")]
    pub ed: EdBackend,

    /// Prebuilt BM25 index; built from the KB when absent.
    #[arg(long)]
    pub index: Option<PathBuf>,

    #[command(flatten)]
    pub fields: FieldArgs,

    #[arg(long, default_value = "word")]
    pub tokenizer: Tokenizer,

    #[command(flatten)]
    pub dense: DenseArgs,

    #[command(flatten)]
    pub metrics: MetricArgs,

    #[arg(long)]
    pub no_filter: bool,

    #[arg(long, default_value = "none")]
    pub context: ContextMode,

    /// Directory for run.tsv, qrels.tsv, report.json and diagnostics.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct AggregateArgs {
    #[arg(long)]
    pub run: PathBuf,

    #[command(flatten)]
    pub corpus: CorpusArgs,

    #[arg(long, default_value_t = 50)]
    pub max_cutoff: usize,

    #[arg(long, default_value = "max")]
    pub fusion: Fusion,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum PairsCommand {
    /// Metadata pairs from the KB.
    Mp(PairsArgs),
    /// Synthetic pairs from generated sentences.
    Sp(PairsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PairsArgs {
    #[command(flatten)]
    pub kb: KbArgs,

    /// Generated sentences (`{"item_id", "text"}` per line); `sp` only.
    #[arg(long)]
    pub generated: Option<PathBuf>,

    /// Corpus whose sentences emitted pairs must not resemble.
    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Compare against every corpus sentence rather than the selected parts.
    #[arg(long)]
    pub dedup_all: bool,

    /// Number of pairs to keep (default: 200000 for mp, 400000 for sp).
    #[arg(long)]
    pub size: Option<usize>,

    #[arg(long, default_value_t = 10)]
    pub min_levenshtein: usize,

    /// Train:validation ratio.
    #[arg(long, default_value = "200:15")]
    pub split_ratio: String,

    #[arg(long)]
    pub out_train: PathBuf,

    #[arg(long)]
    pub out_val: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Report JSON files; entries are concatenated in order.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,

    #[arg(long, default_value = "table")]
    pub format: ReportFormat,

    /// Keep only these metric names.
    #[arg(long, value_delimiter = ',')]
    pub metric: Vec<String>,

    #[arg(long)]
    pub out: Option<PathBuf>,
}
