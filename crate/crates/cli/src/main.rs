//! Command-line surface: grid and report emission, figure and table
//! regeneration, and the invariant-suite runner.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical
//! conditioning failure, 3 invariant-suite failure.

mod commands;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dsqs_core::entropy::ScanSettings;
use dsqs_core::{Result, SqueezeParam};

#[derive(Parser)]
#[command(
    name = "dsqs",
    version,
    about = "Squeezed-state toolkit on odd N x N phase-space lattices: \
             kernels, quasiprobability grids, entropy functionals, and a \
             scattering-circuit simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Args, Clone, Copy)]
pub struct DimArgs {
    /// Lattice dimension N (odd and at least 3).
    #[arg(long = "n-dim", value_name = "N")]
    pub n_dim: u64,
}

/// Basis width, given directly or through its square either way round.
#[derive(Args, Clone, Copy)]
pub struct WidthArgs {
    /// Coherent-family width s.
    #[arg(long, group = "width", value_name = "S")]
    pub squeeze: Option<f64>,
    /// Width given as s squared.
    #[arg(long, group = "width", value_name = "S2")]
    pub squeeze_sq: Option<f64>,
    /// Width given as inverse s squared.
    #[arg(long, group = "width", value_name = "INV_S2")]
    pub squeeze_invsq: Option<f64>,
}

impl WidthArgs {
    pub fn resolve(&self) -> Result<SqueezeParam> {
        match (self.squeeze, self.squeeze_sq, self.squeeze_invsq) {
            (Some(s), None, None) => SqueezeParam::new(s),
            (None, Some(sq), None) => SqueezeParam::from_squared(sq),
            (None, None, Some(inv)) => SqueezeParam::from_inverse_squared(inv),
            (None, None, None) => Ok(SqueezeParam::unit()),
            _ => unreachable!("width flags are mutually exclusive"),
        }
    }
}

#[derive(Args, Clone)]
pub struct StateArgs {
    /// State description: inline JSON or a path to a JSON file.
    #[arg(long, value_name = "SPEC")]
    pub state: String,
}

#[derive(Args, Clone)]
pub struct CacheArgs {
    /// Kernel-table cache file; loaded if present, refreshed on success.
    #[arg(long, env = "DSQS_CACHE", value_name = "PATH")]
    pub cache: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    /// Destination file (written atomically); stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Serialization format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every state-to-grid command.
#[derive(Args, Clone)]
pub struct GridArgs {
    #[command(flatten)]
    pub dim: DimArgs,
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub width: WidthArgs,
    #[command(flatten)]
    pub cache: CacheArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum KernelKindArg {
    Vacuum,
    Squeezed,
    Number,
    Ratio,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum MinRefArg {
    /// Minimum over widths for the given state.
    #[value(name = "A", alias = "a")]
    A,
    /// Caller-supplied constant, passed with --min-const.
    #[value(name = "B", alias = "b")]
    B,
    /// Minimum over widths for the vacuum at the same dimension.
    #[value(name = "C", alias = "c")]
    C,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Char,
    Wigner,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum TargetArg {
    Fig1,
    Fig3,
    EntropyTable,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum LevelArg {
    Fast,
    Full,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Number-state wavefunction over the position lattice.
    Wavefunction {
        #[command(flatten)]
        dim: DimArgs,
        /// Ladder level n.
        #[arg(long)]
        level: usize,
        #[command(flatten)]
        width: WidthArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Self-overlap kernel table over the displacement window.
    Kernel {
        #[command(flatten)]
        dim: DimArgs,
        /// Kernel family to tabulate.
        #[arg(long, value_enum, default_value_t = KernelKindArg::Vacuum)]
        kind: KernelKindArg,
        /// Ladder level, required for the number kernel.
        #[arg(long)]
        level: Option<usize>,
        #[command(flatten)]
        width: WidthArgs,
        #[command(flatten)]
        cache: CacheArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Symmetric-order quasiprobability grid of a state.
    Wigner(GridArgs),
    /// Antinormal-order distribution grid of a state.
    Husimi(GridArgs),
    /// Normal-order quasiprobability grid of a state.
    Pfunction(GridArgs),
    /// Central characteristic-function grid of a state.
    Charfunc(GridArgs),
    /// Level population over the width-s displaced family.
    Overlap {
        #[command(flatten)]
        dim: DimArgs,
        /// Ladder level n.
        #[arg(long)]
        level: usize,
        #[command(flatten)]
        width: WidthArgs,
        #[command(flatten)]
        cache: CacheArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Entropy functionals of a state: one report, or rows over a scan.
    Entropy {
        #[command(flatten)]
        dim: DimArgs,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        width: WidthArgs,
        /// Width scan as smin:smax:points; emits rows instead of a report.
        #[arg(long, value_parser = parse_scan, value_name = "SMIN:SMAX:POINTS")]
        scan: Option<ScanSettings>,
        /// Reference-minimum mode for the correlation functional.
        #[arg(long = "min-ref", value_enum, default_value_t = MinRefArg::A)]
        min_ref: MinRefArg,
        /// Constant reference minimum, for --min-ref B.
        #[arg(long = "min-const", value_name = "E")]
        min_const: Option<f64>,
        #[command(flatten)]
        cache: CacheArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulated scattering-circuit sweep of a phase-space function.
    Circuit {
        #[command(flatten)]
        dim: DimArgs,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        width: WidthArgs,
        /// Which grid the sweep assembles.
        #[arg(long, value_enum, default_value_t = ModeArg::Char)]
        mode: ModeArg,
        /// Sample every readout with this many shots instead of exactly.
        #[arg(long, value_name = "K")]
        shots: Option<u64>,
        /// Seed for shot sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        cache: CacheArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Regenerate the reference figures and tables as data files.
    Reproduce {
        /// Artifact to regenerate.
        #[arg(value_enum)]
        target: TargetArg,
        /// Directory receiving the data files.
        #[arg(long, default_value = ".", value_name = "DIR")]
        output: PathBuf,
    },
    /// Run the invariant suite and report hard and monitored checks.
    Validate {
        /// Suite size.
        #[arg(value_enum)]
        level: LevelArg,
        /// Destination for the JSON report; stdout when omitted.
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

fn parse_scan(text: &str) -> std::result::Result<ScanSettings, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err("expected smin:smax:points".into());
    }
    let s_min: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad lower bound {:?}", parts[0]))?;
    let s_max: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad upper bound {:?}", parts[1]))?;
    let points: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad point count {:?}", parts[2]))?;
    let settings = ScanSettings {
        s_min,
        s_max,
        points,
    };
    settings.widths().map_err(|e| e.to_string())?;
    Ok(settings)
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
