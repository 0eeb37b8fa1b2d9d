use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "semrd",
    version,
    about = "Entropy, lossless coding and rate-distortion limits of Bayesian-network sources"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Blahut-Arimoto stopping gap, in nats.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Accepted |E d - D| when solving for a distortion target.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub target_tol: f64,

    /// Iteration cap per Blahut-Arimoto solve.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_iters: usize,

    /// Largest joint table (entries) to build; overrides SEMRD_SIZE_GUARD.
    #[arg(long, global = true)]
    pub size_guard: Option<u64>,

    /// Run every kernel on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a network and cross-check entropies and the conditional-independence partition.
    Verify { net: PathBuf },

    /// Per-node conditional entropies, joint entropy and redundancy gap.
    Entropy {
        net: PathBuf,
        #[arg(long)]
        csv: bool,
    },

    /// Encode a samples file with the factorized Huffman codebooks.
    Encode {
        net: PathBuf,
        samples: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },

    /// Decode a stream back into a samples file.
    Decode {
        net: PathBuf,
        stream: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Codebook sizes and expected lengths, factorized vs joint.
    CodecReport {
        net: PathBuf,
        #[arg(long)]
        csv: bool,
        /// Include build times (not reproducible between runs).
        #[arg(long)]
        timings: bool,
    },

    /// Rate-distortion points of a set of variables.
    Rd(RdArgs),

    /// Conditional rate-distortion points given side information.
    RdCond(RdArgs),

    /// Closed-form conditional rate-distortion functions.
    RdClosedForm {
        #[command(subcommand)]
        source: ClosedForm,
    },

    /// Sandwich bounds on the joint rate-distortion function.
    Bounds {
        net: PathBuf,
        /// Comma-separated targets, one per variable; repeat for more points.
        /// Defaults to a 9-point grid up to the zero-rate distortions.
        #[arg(long, allow_hyphen_values = true)]
        targets: Vec<String>,
        #[arg(long, value_enum, default_value_t = DistortionArg::Hamming)]
        distortion: DistortionArg,
        #[arg(long)]
        csv: bool,
    },

    /// Conditional RD given side information vs the sum over independent blocks.
    Lemma2 {
        net: PathBuf,
        /// Comma-separated side-information variables (names or ids).
        #[arg(long, required = true)]
        side: String,
        /// Comma-separated targets, one per non-side variable; repeat for more points.
        #[arg(long, required = true, allow_hyphen_values = true)]
        targets: Vec<String>,
        #[arg(long, value_enum, default_value_t = DistortionArg::Hamming)]
        distortion: DistortionArg,
        #[arg(long)]
        csv: bool,
    },

    /// Draw state vectors by ancestral sampling.
    Sample {
        net: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RdArgs {
    pub net: PathBuf,
    /// Comma-separated source variables (names or ids); defaults to every
    /// variable not in the side set.
    #[arg(long)]
    pub vars: Option<String>,
    /// Comma-separated side-information variables.
    #[arg(long)]
    pub side: Option<String>,
    #[arg(long, value_enum, default_value_t = DistortionArg::Hamming)]
    pub distortion: DistortionArg,
    /// Comma-separated distortion targets, one per source variable; repeat for
    /// more points.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "slopes")]
    pub targets: Vec<String>,
    /// Comma-separated slopes (<= 0, bits per unit distortion), one per source
    /// variable; repeat for more points.
    #[arg(long, allow_hyphen_values = true)]
    pub slopes: Vec<String>,
    /// Without targets or slopes: number of points of a common-slope sweep.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Steepest slope of the default sweep.
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub min_slope: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ClosedForm {
    /// Doubly symmetric binary pair under Hamming distortion.
    Binary {
        #[arg(long)]
        p: f64,
        #[arg(long = "D")]
        d: f64,
    },
    /// Jointly Gaussian pair under squared error.
    Gaussian {
        #[arg(long)]
        sigma: f64,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long = "D")]
        d: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistortionArg {
    Hamming,
    Squared,
}
