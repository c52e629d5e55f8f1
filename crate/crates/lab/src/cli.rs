//! Argument definitions for `dalab`. Every verb parses into these types,
//! whether it comes from the shell or from a campaign step.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Default enumeration budget: evaluations a single step may spend.
pub const DEFAULT_BUDGET: u128 = 1 << 40;

#[derive(Parser, Debug, Clone)]
#[command(name = "dalab", version, about = "GF(2) condensers, extractors and exhaustive verification")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Seed every random choice flows from.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Largest enumeration a step may run.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    /// Print the JSON report instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Dimension expanders and somewhere condensers.
    #[command(subcommand)]
    Condense(CondenseCmd),
    /// The directional affine extractor pipeline.
    #[command(subcommand)]
    Daext(DaextCmd),
    /// Seeded non-malleable extractor checks.
    #[command(subcommand)]
    Snmext(SnmextCmd),
    /// Advice correlation breaker parameters and evaluation.
    #[command(subcommand)]
    Cbreak(CbreakCmd),
    /// Linear branching programs.
    #[command(subcommand)]
    Lbp(LbpCmd),
    /// Sumset linear injectors and structured functions.
    #[command(subcommand)]
    Injector(InjectorCmd),
    /// Exhaustive or sampled property measurements.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Runs a campaign file and writes its report tree.
    Campaign(CampaignArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Affine,
    General,
}

#[derive(Subcommand, Debug, Clone)]
pub enum CondenseCmd {
    /// Searches and certifies a dimension expander.
    Expander(ExpanderArgs),
    /// Builds a somewhere condenser from expanders.
    Build(BuildArgs),
    /// Verifies a condenser on affine or flat sources.
    Verify(CondenseVerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ExpanderArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Smallest acceptable certified alpha.
    #[arg(long, default_value = "0")]
    pub alpha: String,
    /// Certify by sampling this many subspaces per dimension.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub max_tries: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = Kind::Affine)]
    pub kind: Kind,
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of halving steps; derived from `--delta` when absent.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Entropy rate to condense from.
    #[arg(long)]
    pub delta: Option<String>,
    /// Expander files, one per halved width; missing widths are searched.
    #[arg(long)]
    pub expander: Vec<PathBuf>,
    /// Degree of searched expanders.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
}

#[derive(Args, Debug, Clone)]
pub struct BuildArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct CondenseVerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// A condenser file; replaces the family flags.
    #[arg(long)]
    pub condenser: Option<PathBuf>,
    /// Source dimension (affine) or log of the flat support size (general).
    #[arg(long)]
    pub k: usize,
    /// Target rate of the best row; defaults to `δ·Π(1 + α/(4d))` with `δ = k/n`.
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long, conflicts_with = "samples")]
    pub exhaustive: bool,
    /// Random subspaces to check instead of all of them.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Closeness parameter `L` of the general-source check.
    #[arg(long, default_value_t = 4)]
    pub l: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PipeMode {
    Structural,
    Statistical,
}

#[derive(Args, Debug, Clone)]
pub struct PipelineArgs {
    /// A params file written by `daext params`; replaces the other flags.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "1/2")]
    pub delta: String,
    #[arg(long, value_enum, default_value_t = PipeMode::Structural)]
    pub mode: PipeMode,
}

#[derive(Subcommand, Debug, Clone)]
pub enum DaextCmd {
    /// Emits a validated parameter record with every inequality's status.
    Params {
        #[command(flatten)]
        pipe: PipelineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the pipeline on one input.
    Run {
        #[command(flatten)]
        pipe: PipelineArgs,
        /// Input as `len:hex` or bare hex.
        #[arg(long)]
        input: String,
        /// Writes every intermediate as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum SnmextCmd {
    /// Exact non-malleability distance against the tamper `y ↦ y ⊕ shift`.
    Verify {
        #[arg(long)]
        n: usize,
        /// Source dimension; `n` is the uniform source.
        #[arg(long)]
        ksrc: usize,
        /// Seed shift as hex.
        #[arg(long)]
        shift: String,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Exact strong-extractor distance over a uniform seed.
    Seeded {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ksrc: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Checks linearity in the source for every seed.
    Linearity {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Writes the field modulus table.
    Moduli {
        #[arg(long, default_value_t = 2)]
        from: usize,
        #[arg(long, default_value_t = 32)]
        to: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct CbSource {
    /// A config file written by `cbreak params`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub a: usize,
}

#[derive(Subcommand, Debug, Clone)]
pub enum CbreakCmd {
    /// Writes a toy config record.
    Params {
        #[command(flatten)]
        src: CbSource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prints every constraint with its status.
    Validate {
        #[command(flatten)]
        src: CbSource,
    },
    /// Evaluates the breaker on one `(x, y, id)`.
    Eval {
        #[command(flatten)]
        src: CbSource,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        id: String,
    },
    /// Degree ledger, optionally checked against measured ANF degrees.
    Degree {
        #[command(flatten)]
        src: CbSource,
        /// Advice string; absent means the bound for every advice.
        #[arg(long)]
        id: Option<String>,
        /// Measure the ANF degree of every output bit (n + d ≤ 20).
        #[arg(long)]
        measure: bool,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum LbpCmd {
    Eval {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        input: String,
    },
    /// Read-once checks and size.
    Validate {
        #[arg(long)]
        program: PathBuf,
    },
    /// Agreement probability with a builtin function.
    Correlate {
        #[arg(long)]
        program: PathBuf,
        /// `builtin:NAME`.
        #[arg(long)]
        f: String,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Cut events after `n − d` reads with exact probabilities.
    Cut {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        d: usize,
    },
    /// Indicator program of a random subspace, checked on the whole cube.
    SeparationDemo {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        dim: usize,
    },
    /// Writes a catalog program.
    Catalog {
        #[arg(long, value_enum)]
        name: CatalogName,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        width: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CatalogName {
    Parity,
    And,
    Tribes,
}

#[derive(Args, Debug, Clone)]
pub struct InjectorShape {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k1: usize,
    #[arg(long)]
    pub k2: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub m: usize,
}

#[derive(Subcommand, Debug, Clone)]
pub enum InjectorCmd {
    /// Samples a random family and certifies it.
    Sample {
        #[command(flatten)]
        shape: InjectorShape,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certifies an injector file, optionally with the distinctness check.
    Verify {
        #[arg(long)]
        injector: PathBuf,
        #[arg(long)]
        distinctness: bool,
    },
    /// Searches structured functions for the smallest directional bias.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "0")]
        eps: String,
        #[arg(long, default_value_t = 8)]
        candidates: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Exhaustive,
    Sampled,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Def {
    Joint,
    Xor,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// `builtin:NAME`, `file:PATH` or `pipeline:PATH`.
    #[arg(long)]
    pub f: String,
    /// Input bits; required for builtins, checked otherwise.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Measure::Exhaustive)]
    pub mode: Measure,
    #[arg(long, value_enum, default_value_t = Def::Both)]
    pub definition: Def,
    /// Sampled mode: random (subspace, shift, direction) triples.
    #[arg(long, default_value_t = 64)]
    pub triples: u64,
    /// Sampled mode: points per triple.
    #[arg(long, default_value_t = 256)]
    pub points: u64,
    /// Output bit of a pipeline to measure.
    #[arg(long, default_value_t = 0)]
    pub bit: usize,
}

#[derive(Subcommand, Debug, Clone)]
pub enum VerifyCmd {
    Directional(VerifyArgs),
    Affine(VerifyArgs),
    Disperser(VerifyArgs),
    Epsbias(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CampaignArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}
