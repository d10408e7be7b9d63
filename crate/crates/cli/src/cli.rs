use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "dyadic-riesz",
    version,
    about = "Dyadic Riesz vector, periodic Riesz transforms and the sign-toss coding between them",
    propagate_version = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every randomised step [default: 1]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Tolerance for golden comparison [default: 1e-6]
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// TOML file with default parameters; explicit flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory holding golden files
    #[arg(
        long,
        global = true,
        env = "DYADIC_RIESZ_GOLDEN_DIR",
        default_value = "golden",
        value_name = "DIR"
    )]
    pub golden_dir: PathBuf,

    /// Compare the result against the golden file and exit with status 3 on mismatch
    #[arg(long, global = true)]
    pub compare_golden: bool,

    /// Write the result here instead of standard output (atomic replace)
    #[arg(short, long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Haar system on [0, 1): coefficients h_I = (χ_left - χ_right) / sqrt|I|
    #[command(subcommand)]
    Haar(HaarCommand),
    /// Dyadic shift S0 and sliced shifts Sj acting on Haar coefficients
    #[command(subcommand)]
    Shift(ShiftCommand),
    /// Trigonometric polynomials on products of tori
    #[command(subcommand)]
    Torus(TorusCommand),
    /// Sign-toss coding: martingale blocks, the spaces E_k and A-modulation
    #[command(subcommand)]
    Code(CodeCommand),
    /// Projection identity π R̃_j φ = c0 S_j φ for square waves
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Modulation decay and the duality pairing chain
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Lower bounds for L^p operator norms
    #[command(subcommand)]
    Norm(NormCommand),
}

#[derive(Debug, Subcommand)]
pub enum HaarCommand {
    /// Haar analysis: CSV of finest-grid averages (one row per cell) to coefficient JSON
    Analyze {
        /// CSV file, one row per cell and one column per value component; `-` reads stdin
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Haar synthesis: coefficient JSON to CSV of finest-grid averages
    Synthesize {
        /// Coefficient JSON; `-` reads stdin
        #[arg(short, long)]
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShiftOp {
    S0,
    Sj,
}

#[derive(Debug, Args)]
pub struct ShiftSelect {
    /// S0 (all depths) or Sj (depths ≡ j - 1 mod d)
    #[arg(long, value_enum, default_value = "s0")]
    pub op: ShiftOp,
    /// Slice index of Sj, 1 <= j <= d
    #[arg(long)]
    pub j: Option<u32>,
    /// Number of slices [default: 2]
    #[arg(long)]
    pub d: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum ShiftCommand {
    /// Apply the dyadic shift S0 or a sliced shift Sj to Haar coefficients
    Apply {
        #[command(flatten)]
        select: ShiftSelect,
        /// Coefficient JSON; `-` reads stdin
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Dense integer matrix of S0 or Sj on the basis (h¹, h_I0, depth 1, ..., depth L)
    Matrix {
        #[command(flatten)]
        select: ShiftSelect,
        /// Deepest Haar level L [default: 8]
        #[arg(long)]
        depth: Option<u32>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WaveKind {
    Sqcos,
    Sqsin,
}

#[derive(Debug, Subcommand)]
pub enum TorusCommand {
    /// Periodic Riesz transform R̃_j, the multiplier -i n_j / |n|
    Riesz {
        /// Variable index, 1-based
        #[arg(long)]
        j: Option<usize>,
        /// Polynomial JSON; `-` reads stdin
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Directional Hilbert transform H_j, the multiplier -i sign(n_j)
    Hilbert {
        /// Variable index, 1-based
        #[arg(long)]
        j: Option<usize>,
        /// Polynomial JSON; `-` reads stdin
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Quarter-arc projection π_j: averages variable j over the quarter arc containing it
    Project {
        /// Variable index, 1-based
        #[arg(long)]
        j: Option<usize>,
        /// Polynomial JSON; `-` reads stdin
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Truncated square wave sqcos = sign∘cos or sqsin = sign∘sin
    Squarewave {
        #[arg(long, value_enum, default_value = "sqcos")]
        kind: WaveKind,
        /// Largest odd frequency kept [default: 4095]
        #[arg(long)]
        n: Option<i64>,
        /// Embed into T^d [default: 1]
        #[arg(long)]
        d: Option<usize>,
        /// Variable the wave depends on, 1-based
        #[arg(long, default_value_t = 1)]
        var: usize,
    },
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// JSON family of E_k elements; a seeded random spectrum when absent
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Torus dimension of the random spectrum [default: 2]
    #[arg(long)]
    pub d: Option<usize>,
    /// Smallest cluster index k of the random spectrum
    #[arg(long, default_value_t = 0)]
    pub k_min: usize,
    /// Largest cluster index k of the random spectrum
    #[arg(long, default_value_t = 2)]
    pub k_max: usize,
    /// Number of random terms
    #[arg(long, default_value_t = 30)]
    pub terms: usize,
    /// Largest absolute frequency entry
    #[arg(long, default_value_t = 3)]
    pub max_freq: i64,
    /// Dimension of the coefficient values
    #[arg(long, default_value_t = 2)]
    pub value_dim: usize,
    /// Only axis frequencies l e_m
    #[arg(long)]
    pub axis_only: bool,
}

#[derive(Debug, Subcommand)]
pub enum CodeCommand {
    /// Martingale block decomposition of a Haar expansion along sign tosses
    Decompose {
        /// Coefficient JSON; `-` reads stdin
        #[arg(short, long)]
        input: PathBuf,
        /// Torus dimension [default: 2]
        #[arg(long)]
        d: Option<usize>,
        /// Last cluster index K; the smallest sufficient one when absent
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Membership test for the spaces E_k (leading frequency entry nonzero, later ones zero)
    CheckEk {
        /// JSON family of E_k elements; `-` reads stdin
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Seeded random spectrum in E_kmin ⊕ ... ⊕ E_kmax
    RandomEk {
        #[command(flatten)]
        spectrum: SpectrumArgs,
    },
    /// A-modulation of E_k elements: frequencies stacked into one integer vector
    Modulate {
        /// Modulus A
        #[arg(long = "A", visible_alias = "a")]
        a: u64,
        #[command(flatten)]
        spectrum: SpectrumArgs,
    },
    /// Modulation error of the sliced multipliers against R̃_j as A grows
    DecaySweep {
        /// Increasing powers of two [default: 16,32,...,4096]
        #[arg(long = "A-list", visible_alias = "a-list", value_delimiter = ',')]
        a_list: Option<Vec<u64>>,
        #[command(flatten)]
        spectrum: SpectrumArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignChoice {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseChoice {
    Zero,
    One,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Projection identity π R̃_j φ_i^± = c0 S_j φ_i^± with c0 fitted over the quarter arcs
    Hvs {
        /// Torus dimension [default: 2]
        #[arg(long)]
        d: Option<usize>,
        /// Riesz direction, 1 <= j <= d [default: 1]
        #[arg(long)]
        j: Option<usize>,
        /// Wave index; the index matching j under each convention when absent
        #[arg(long)]
        i: Option<usize>,
        /// φ^+ = sqcos, φ^- = sqsin
        #[arg(long, value_enum, default_value = "both")]
        sign: SignChoice,
        /// Convention for the wave index
        #[arg(long, value_enum, default_value = "both")]
        index_base: BaseChoice,
        /// Projected variable, 1-based; the wave variable when absent
        #[arg(long)]
        projection: Option<usize>,
        /// Square-wave truncation [default: 4095]
        #[arg(long)]
        n: Option<i64>,
        /// Residual accepted by the report
        #[arg(long, default_value_t = 5e-3)]
        residual_tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Decay of the A-modulation error, emitted as (A, aggregate_error) rows with a log-log slope
    Modulation {
        /// Increasing powers of two [default: 16,32,...,4096]
        #[arg(long = "A-list", visible_alias = "a-list", value_delimiter = ',')]
        a_list: Option<Vec<u64>>,
        #[command(flatten)]
        spectrum: SpectrumArgs,
        /// Also write the fitted table as JSON
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Duality pairing Σ_j <S_j f, G_j> in dyadic, projected and Fourier form, and its norm bound
    Duality {
        /// Torus dimension [default: 2]
        #[arg(long)]
        d: Option<usize>,
        /// Exponent p of f; G is measured in L^q [default: 2]
        #[arg(long)]
        p: Option<f64>,
        /// Deepest Haar level of f and G [default: 8]
        #[arg(long)]
        depth: Option<u32>,
        /// Square-wave truncation [default: 4095]
        #[arg(long)]
        n: Option<i64>,
        /// Number of seeded runs, seeds seed, seed + 1, ...
        #[arg(long, default_value_t = 1)]
        runs: u64,
        /// Dimension of the coefficient values
        #[arg(long, default_value_t = 2)]
        value_dim: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormOp {
    /// Truncated Hilbert multiplier on T
    Hilbert,
    /// Dyadic shift S0
    S0,
    /// Dyadic Riesz vector (S_1, ..., S_d)
    Riesz,
    Identity,
}

#[derive(Debug, Subcommand)]
pub enum NormCommand {
    /// Power-type lower bound for the L^p norm of an operator on a truncated system
    Estimate {
        #[arg(long, value_enum, default_value = "hilbert")]
        op: NormOp,
        /// Exponent, 1 < p < ∞ [default: 2]
        #[arg(long)]
        p: Option<f64>,
        /// Frequency cutoff of the Hilbert multiplier [default: 4095]
        #[arg(long)]
        n: Option<i64>,
        /// Deepest Haar level for the shifts [default: 8]
        #[arg(long)]
        depth: Option<u32>,
        /// Number of slices of the Riesz vector [default: 2]
        #[arg(long)]
        d: Option<usize>,
        /// Restrict shifts to functions with zero mean and root coefficient
        #[arg(long)]
        restricted: bool,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        /// Include the extremal test vector in the output
        #[arg(long)]
        with_vector: bool,
    },
    /// L² norm of the dyadic Riesz vector for several d, on mean-zero root-zero functions
    DimensionSweep {
        /// Values of d [default: 1,2,3,4,5,6]
        #[arg(long, value_delimiter = ',')]
        d_list: Option<Vec<u32>>,
        /// Deepest Haar level [default: 8]
        #[arg(long)]
        depth: Option<u32>,
    },
}
