use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "fxp", version, about = "Formal explanations for tree models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one abductive explanation by deletion, with its trace.
    Axp(OrderedArgs),
    /// Compute one contrastive explanation by deletion, with its trace.
    Cxp(OrderedArgs),
    /// Enumerate all AXps and CXps.
    Enumerate(EnumerateArgs),
    /// Relevant, irrelevant and necessary features (requires exhaustion).
    Relevancy(EnumerateArgs),
    /// Exact SHAP scores with an efficiency check.
    Shap(ShapArgs),
    /// SHAP scores set against feature relevancy.
    Audit(AuditArgs),
    /// Widen an AXp to value-set literals and print the rule.
    Inflate(InflateArgs),
    /// Search a constrained adversarial example.
    Robust(RobustArgs),
    /// Check a model file (and optionally an instance) against every invariant.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    #[value(alias = "structured")]
    Json,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Model file (JSON).
    #[arg(long)]
    pub model: PathBuf,
    /// Instance file (JSON).
    #[arg(long)]
    pub instance: PathBuf,
    /// Similarity threshold p/q (regression models only; default 0).
    #[arg(long, value_name = "P/Q")]
    pub delta: Option<String>,
    /// Use |Δ| < δ instead of |Δ| <= δ.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct OrderedArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Feature order for the deletion pass, 1-based (default ascending).
    #[arg(long, value_delimiter = ',', value_name = "I,J,...")]
    pub order: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Stop after this many explanations (AXps plus CXps).
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ShapArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Dump every (feature, subset) contribution.
    #[arg(long)]
    pub ledger: bool,
    /// Refuse models with more features than this.
    #[arg(long, default_value_t = fxp_core::attribution::DEFAULT_MAX_FEATURES)]
    pub max_features: usize,
    /// Recompute every characteristic value by brute force (bounded by FXP_BRUTE_CAP).
    #[arg(long)]
    pub cross_check: bool,
    /// Skip the relevancy join.
    #[arg(long)]
    pub no_audit: bool,
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = fxp_core::attribution::DEFAULT_MAX_FEATURES)]
    pub max_features: usize,
    #[arg(long)]
    pub limit: Option<usize>,
    /// Threshold for the relevancy side (needs --allow-similarity-mismatch).
    #[arg(long, value_name = "P/Q")]
    pub relevancy_delta: Option<String>,
    /// Strict comparison on the relevancy side (needs --allow-similarity-mismatch).
    #[arg(long)]
    pub relevancy_strict: bool,
    #[arg(long)]
    pub allow_similarity_mismatch: bool,
}

#[derive(Debug, Args)]
pub struct InflateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_delimiter = ',', value_name = "I,J,...")]
    pub order: Option<Vec<usize>>,
    /// Inflate this WAXp (1-based ids) instead of computing an AXp.
    #[arg(long, value_delimiter = ',', value_name = "I,J,...")]
    pub features: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct RobustArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value = "inf", value_name = "0|1|inf")]
    pub norm: String,
    #[arg(long, default_value = "unbounded", value_name = "P/Q|unbounded")]
    pub eps: String,
    /// Features held at the sample's values (1-based ids).
    #[arg(long, value_delimiter = ',', value_name = "I,J,...")]
    pub fix: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}
