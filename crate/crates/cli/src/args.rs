use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "horoshade", version, about = "Horoball packings, shadows and certified avoiding geodesics")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Tolerance used by every certificate
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Exact rational predicates; inputs must carry rational forms
    #[arg(long, global = true)]
    pub exact: bool,
    /// Seed for random generators
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON output for commands that print text by default
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a family document
    Pack {
        #[command(subcommand)]
        kind: PackKind,
        /// Write the document here instead of stdout
        #[arg(short, long, global = true)]
        out: Option<PathBuf>,
    },
    /// Boundary shadows of the tangent members
    Shadow {
        /// Family document (stdin when omitted or `-`)
        family: Option<PathBuf>,
        /// Curvature parameter `a` in (0, 1] of the band `[-1, -a^2]`
        #[arg(long, default_value_t = 1.0)]
        curvature: f64,
        /// Emit the inner shadows as a Euclidean ball document
        #[arg(long)]
        balls: bool,
    },
    /// Find boundary points avoiding every scaled member
    Uncloud(UncloudArgs),
    /// Geodesic ray from a point avoiding every shrunk horoball
    Ray {
        #[arg(long)]
        family: Option<PathBuf>,
        /// `b1,..,bk;h` in the half-space, or a vertex index for trees
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long = "t")]
        t: f64,
    },
    /// Bi-infinite geodesic avoiding every shrunk horoball
    Line {
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long = "t")]
        t: f64,
    },
    /// Run certificate checks
    Verify {
        #[command(subcommand)]
        what: VerifyKind,
    },
    /// Reduced fractions with `|xi - p/q| < e^{-t} / (2 q^2)`
    Dioph {
        /// A number, `p/q`, or `golden`
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long = "t")]
        t: f64,
        #[arg(long, default_value_t = 1000)]
        qmax: u64,
    },
    /// Draw a planar family and geodesics as SVG
    Render {
        #[arg(long)]
        family: Option<PathBuf>,
        /// Geodesic JSON, inline or as a file; may repeat
        #[arg(long)]
        geodesic: Vec<String>,
        #[arg(long)]
        svg: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum PackKind {
    /// Ford horoballs at `p/q`, `q <= qmax`
    Farey {
        #[arg(long)]
        qmax: u32,
        /// Integer range `lo..hi` of the base points
        #[arg(long, default_value = "0..1", allow_hyphen_values = true)]
        range: String,
        /// Add the horoball above height 1
        #[arg(long)]
        infinity: bool,
    },
    /// Tangent chain with radii `16^n`
    Geometric {
        #[arg(long, default_value = "-8..8", allow_hyphen_values = true)]
        range: String,
    },
    /// Binary tree of nested shadows
    Extremal {
        #[arg(long, default_value_t = 8)]
        generations: u32,
        /// Shrink factor of the construction (default `4 sqrt 2 - 5`)
        #[arg(long)]
        shrink_s: Option<f64>,
    },
    /// Seeded random disjoint tangent horoballs
    Random {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Truncated tree with horoballs: the covering configuration of a
    /// regular tree, or a seeded random instance
    Tree {
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 1.0)]
        edge: f64,
        #[arg(long)]
        random: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMode {
    Generic,
    Dim2,
    Hnr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    #[value(name = "L", alias = "left")]
    Left,
    #[value(name = "R", alias = "right")]
    Right,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("shrink").required(true).args(["shrink_s", "shrink_t"])))]
pub struct UncloudArgs {
    /// Family document (stdin when omitted or `-`)
    pub family: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: SolveMode,
    /// Scale factor of the avoided balls
    #[arg(long)]
    pub shrink_s: Option<f64>,
    /// Shrink depth; the scale factor is `e^{-t}`
    #[arg(long)]
    pub shrink_t: Option<f64>,
    #[arg(long)]
    pub start: Option<usize>,
    #[arg(long, value_enum, default_value = "R")]
    pub side: SideArg,
    /// Solve twice: both sides, opposite directions, or antipodal seeds
    #[arg(long)]
    pub two: bool,
    /// Direction for `hnr`, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Option<String>,
    /// Packing constant `D` for `generic` (default from the document, else 1/4)
    #[arg(long)]
    pub packing_constant: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum VerifyKind {
    /// Recompute the sharp constants
    Constants,
    /// Pairwise disjointness of a family
    Packing {
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Depth of a geodesic into every shrunk member
    Avoidance {
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        geodesic: String,
        #[arg(long = "t")]
        t: f64,
    },
}
