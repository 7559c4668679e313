//! `silpose` — silhouette-based 6D pose experiment harness.
//!
//! Four subcommands cover the full workflow: `gen-bank` renders viewpoint
//! template banks, `gen-scenes` builds a deterministic synthetic dataset,
//! `eval` runs the template-matching estimator over it, and `report`
//! formats the resulting CSVs.
//!
//! Exit codes: 0 success, 1 command-line usage error, 2 data error
//! (missing or malformed files, invalid parameter values).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use silpose_core::error::Error;
use silpose_core::eval::{RoiMode, SilhouetteMode};
use silpose_core::exec;

use config::HarnessConfig;

#[derive(Parser)]
#[command(name = "silpose", version, about = "Silhouette-based 6D pose toolkit")]
struct Cli {
    /// JSON config replacing the built-in camera and class table.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a viewpoint template bank for one class.
    GenBank(GenBankArgs),
    /// Generate a synthetic scene dataset (with per-class banks).
    GenScenes(GenScenesArgs),
    /// Run the estimator over a dataset; write records and CSV reports.
    Eval(EvalArgs),
    /// Format a summary CSV as an aligned table; optionally re-emit files.
    Report(ReportArgs),
}

#[derive(clap::Args)]
pub struct GenBankArgs {
    /// Class id; resolves the mesh via the config table.
    #[arg(long)]
    pub class: String,

    /// OBJ file overriding the class's configured mesh.
    #[arg(long, value_name = "FILE")]
    pub mesh: Option<PathBuf>,

    /// Azimuth step in degrees; must divide 360.
    #[arg(long, default_value_t = 60.0)]
    pub step: f64,

    /// Elevation angles in degrees.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
          default_values_t = [-30.0, 30.0])]
    pub elevations: Vec<f64>,

    /// Use the dense icosphere grid at this subdivision level instead of
    /// the azimuth/elevation sweep.
    #[arg(long, value_name = "LEVEL")]
    pub icosphere_level: Option<usize>,

    /// In-plane spins per icosphere direction.
    #[arg(long, default_value_t = 24)]
    pub spins: usize,

    /// Mask resolution in pixels (default from config).
    #[arg(long)]
    pub resolution: Option<usize>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(clap::Args)]
pub struct GenScenesArgs {
    /// Number of scenes to generate.
    #[arg(long, default_value_t = 20)]
    pub scenes: usize,

    /// Target occluded fraction in (0, 1]; 0 disables occluders.
    #[arg(long, default_value_t = 0.0)]
    pub occlusion: f64,

    /// Master seed; everything downstream derives from it.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Gaussian corner noise for the jittered ROI, in pixels.
    #[arg(long, default_value_t = 5.0)]
    pub jitter: f64,

    /// Mask resolution in pixels (default from config).
    #[arg(long)]
    pub resolution: Option<usize>,

    /// Icosphere subdivision level for the per-class banks.
    #[arg(long, default_value_t = 2)]
    pub bank_level: usize,

    /// In-plane spins per bank direction.
    #[arg(long, default_value_t = 24)]
    pub bank_spins: usize,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Ground-truth unoccluded silhouettes.
    GtSil,
    /// Ground-truth silhouettes with a fraction of pixels flipped.
    NoisySil,
}

impl From<ModeArg> for SilhouetteMode {
    fn from(m: ModeArg) -> SilhouetteMode {
        match m {
            ModeArg::GtSil => SilhouetteMode::GtSil,
            ModeArg::NoisySil => SilhouetteMode::NoisySil,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoiArg {
    /// Tight ground-truth boxes.
    Gt,
    /// Jittered boxes emulating detector output.
    Pred,
}

impl From<RoiArg> for RoiMode {
    fn from(r: RoiArg) -> RoiMode {
        match r {
            RoiArg::Gt => RoiMode::Gt,
            RoiArg::Pred => RoiMode::Pred,
        }
    }
}

#[derive(clap::Args)]
pub struct EvalArgs {
    /// Dataset manifest written by gen-scenes.
    #[arg(long, value_name = "FILE")]
    pub manifest: PathBuf,

    /// Which silhouette feeds the estimator.
    #[arg(long, value_enum, default_value_t = ModeArg::GtSil)]
    pub mode: ModeArg,

    /// Which ROI anchors the translation decode.
    #[arg(long, value_enum, default_value_t = RoiArg::Gt)]
    pub roi: RoiArg,

    /// Skip hill-climb refinement after template matching.
    #[arg(long)]
    pub no_refine: bool,

    /// Seed for the noisy-silhouette pixel flips.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Pixel flip probability in noisy-sil mode.
    #[arg(long, default_value_t = 0.10)]
    pub flip_fraction: f64,

    /// Record wall-clock per frame (makes records nondeterministic).
    #[arg(long)]
    pub timing: bool,

    /// Accuracy-curve threshold cap in meters.
    #[arg(long, default_value_t = 0.10)]
    pub max_threshold: f64,

    /// Number of thresholds on the accuracy curve.
    #[arg(long, default_value_t = 100)]
    pub curve_steps: usize,

    /// Output directory for records.json, summary.csv and curves.csv.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(clap::Args)]
pub struct ReportArgs {
    /// Summary CSV produced by eval.
    #[arg(long, value_name = "FILE")]
    pub summary: PathBuf,

    /// Curve CSV to echo plotting points from.
    #[arg(long, value_name = "FILE")]
    pub curves: Option<PathBuf>,

    /// Re-emit normalized copies of the parsed files into this directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

fn run(cli: &Cli) -> Result<(), Error> {
    if let Err(msg) = exec::configure_threads(cli.jobs) {
        return Err(Error::Scene(format!("worker pool: {msg}")));
    }
    match &cli.command {
        Command::GenBank(args) => {
            let cfg = HarnessConfig::load(cli.config.as_deref())?;
            commands::gen_bank(&cfg, args)
        }
        Command::GenScenes(args) => {
            let cfg = HarnessConfig::load(cli.config.as_deref())?;
            commands::gen_scenes(&cfg, args)
        }
        Command::Eval(args) => commands::eval(args),
        Command::Report(args) => commands::report(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
