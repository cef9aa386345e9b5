use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use smolbgk::jumps::Convention;

#[derive(Debug, Parser)]
#[command(name = "smolbgk", version, about = "Temperature jump and weak evaporation for the half-space BGK problem")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// JSON file with optional "quad" and "oracle" sections.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Absolute and relative tolerance for the adaptive quadrature.
    #[arg(long, global = true, value_name = "TOL")]
    pub quad_tol: Option<f64>,

    /// How X(μ₁) enters the pole conditions.
    #[arg(long, global = true, value_enum, default_value_t = ConventionArg::Published)]
    pub convention: ConventionArg,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Published,
    Magnitude,
    BoundaryValue,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Published => Convention::Published,
            ConventionArg::Magnitude => Convention::Magnitude,
            ConventionArg::BoundaryValue => Convention::BoundaryValue,
        }
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Drivers {
    /// Far-field temperature gradient g_T.
    #[arg(long = "g-t", default_value_t = 0.0, allow_negative_numbers = true)]
    pub g_t: f64,

    /// Evaporation velocity U.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub u: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// θ-moments, x̂(±μ₁) and the jump coefficients.
    Coeffs,

    /// ε_T, ε_n and the pole-condition residuals for one pair of drivers.
    Jumps(Drivers),

    /// Density, velocity and temperature on a geometric grid.
    Profile {
        #[command(flatten)]
        drivers: Drivers,

        #[arg(long, default_value_t = 20.0)]
        x_max: f64,

        #[arg(long, default_value_t = 64)]
        points: usize,

        /// Output file; stdout when absent.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },

    /// h(x, μ) on a uniform velocity grid at fixed x.
    Distribution {
        #[command(flatten)]
        drivers: Drivers,

        #[arg(long, default_value_t = 0.0)]
        x: f64,

        #[arg(long, default_value_t = 4.0)]
        mu_max: f64,

        #[arg(long, default_value_t = 64)]
        points: usize,
    },

    /// Run every identity and regression check and print the report.
    Verify {
        /// Replace every check tolerance with this value.
        #[arg(long)]
        tol: Option<f64>,
    },

    /// Compare the analytic jumps with the discrete-ordinates solver.
    Oracle {
        #[command(flatten)]
        drivers: Drivers,

        #[arg(long)]
        n_mu: Option<usize>,

        #[arg(long)]
        n_x: Option<usize>,

        #[arg(long)]
        x_max: Option<f64>,
    },
}
