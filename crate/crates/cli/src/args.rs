use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "conelab",
    version,
    about = "Harmonic functions near conical tips"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Harmonic exponent of an eigenvalue on an N-cone.
    Alpha {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        lambda: f64,
    },
    /// Cross-section spectrum with cone exponents and admissibility.
    Spectrum {
        #[command(flatten)]
        base: BaseArgs,
        /// Number of eigenvalues, counted with multiplicity.
        #[arg(long, default_value_t = 9)]
        count: usize,
    },
    /// Ball energy of a single cone mode.
    Energy {
        #[command(flatten)]
        base: BaseArgs,
        /// Eigenvalue position in the spectrum (overrides --mode).
        #[arg(long)]
        index: Option<usize>,
        /// Angular frequency on a circle base (position 2k−1).
        #[arg(long, default_value_t = 1)]
        mode: u32,
        #[arg(long, default_value_t = 1.0)]
        coefficient: f64,
        #[arg(long = "radius", default_values_t = [1.0])]
        radii: Vec<f64>,
    },
    /// Mean-energy decay over dyadic radii.
    Decay {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1)]
        mode: u32,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        r_max: f64,
        /// Smoothing scale; the exact cone when absent.
        #[arg(long)]
        eps: Option<f64>,
        /// Last smoothing scale of a geometric grid starting at --eps.
        #[arg(long)]
        eps_stop: Option<f64>,
        #[arg(long)]
        eps_count: Option<usize>,
        /// Fail unless the tip is sharp.
        #[arg(long)]
        sharp_only: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Dyadic energy iteration with polynomial forcing.
    Iterate {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1)]
        mode: u32,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        forcing: Option<f64>,
        #[arg(long)]
        e0: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        kmax: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Solves one mode h(r) cos kθ and tabulates it on the solver grid.
    SolveMode {
        #[arg(long)]
        beta: f64,
        /// Smoothing scale; the exact cone when absent.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 1.0)]
        r_max: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Runs an experiment from a JSON config or a previous manifest.
    Sweep {
        #[arg(
            long,
            conflicts_with = "manifest",
            required_unless_present = "manifest"
        )]
        config: Option<PathBuf>,
        /// Re-runs the config recorded in a manifest.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Worker threads; 0 uses every available core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Cross-section selection shared by `spectrum` and `energy`.
#[derive(Debug, Args)]
pub struct BaseArgs {
    /// Circle of circumference 2πβ.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Unit round sphere S^m.
    #[arg(long)]
    pub sphere: Option<u32>,
    /// JSON spectrum document.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// Cone dimension; defaults to the base dimension plus one.
    #[arg(long)]
    pub n: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, env = "CONELAB_OUT", default_value = "conelab-out")]
    pub out: PathBuf,
}

/// Flags that replace the matching config keys.
#[derive(Debug, Args, Default)]
pub struct Overrides {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub holder_depth: Option<u32>,
    #[arg(long)]
    pub ode_tol: Option<f64>,
    #[arg(long)]
    pub quadrature_tol: Option<f64>,
}
