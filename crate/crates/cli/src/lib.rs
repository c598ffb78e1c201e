//! `splinemask` command-line front end: `refine`, `metrics` and `synth`.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub mod document;
pub mod io;
pub mod metrics;
pub mod refine;
pub mod synth;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// An error in the arguments rather than in the data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub(crate) fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Debug, Parser)]
#[command(name = "splinemask", version, about = "Smooth segmentation-mask boundaries with two-round B-spline fitting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Refine masks against their source image.
    Refine(RefineArgs),
    /// Curvature and Fréchet metrics for two contours or masks, as JSON.
    Metrics(MetricsArgs),
    /// Write a synthetic image with clean and jittered masks.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    /// Source image (PNG or PNM).
    #[arg(long)]
    pub image: PathBuf,
    /// Mask file; repeat for several masks.
    #[arg(long = "mask", required_unless_present = "mask_dir", conflicts_with = "mask_dir")]
    pub masks: Vec<PathBuf>,
    /// Directory whose .png/.pgm files are all masks.
    #[arg(long)]
    pub mask_dir: Option<PathBuf>,
    /// Directory for refined masks, contours.json and overlay.png.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Also write overlay.png with the refined contours drawn on the image.
    #[arg(long)]
    pub overlay: bool,
    /// Worker threads for batch refinement.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// JSON file with configuration fields; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: ConfigFlags,
}

/// Overrides for individual configuration fields.
#[derive(Debug, Default, Args)]
pub struct ConfigFlags {
    /// Degree of the coarse fit [default: 3].
    #[arg(long)]
    pub coarse_degree: Option<usize>,
    /// Degree of the fine fit [default: 2].
    #[arg(long)]
    pub fine_degree: Option<usize>,
    /// Data points per control point [default: 5].
    #[arg(long)]
    pub control_point_ratio: Option<f64>,
    /// [default: 8]
    #[arg(long)]
    pub min_control_points: Option<usize>,
    /// [default: 128]
    #[arg(long)]
    pub max_control_points: Option<usize>,
    /// Band half-width around the coarse curve in pixels [default: 3].
    #[arg(long)]
    pub dilation_radius: Option<f64>,
    /// Canny Gaussian standard deviation [default: 2].
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Canny low threshold as a fraction of the largest gradient [default: 0.1].
    #[arg(long)]
    pub low_ratio: Option<f64>,
    /// Canny high threshold as a fraction of the largest gradient [default: 0.2].
    #[arg(long)]
    pub high_ratio: Option<f64>,
    /// Uniform samples of the coarse curve [default: half the contour perimeter, at least 64].
    #[arg(long)]
    pub sample_count: Option<usize>,
    /// Curvature threshold for high-curvature samples [default: 0.05].
    #[arg(long)]
    pub curvature_theta: Option<f64>,
    /// Neighbour search radius [default: the dilation radius].
    #[arg(long)]
    pub kd_radius: Option<f64>,
    /// Smaller contours pass through unchanged [default: 12].
    #[arg(long)]
    pub min_contour_points: Option<usize>,
    /// Curve samples used to rasterize each fit [default: 512].
    #[arg(long)]
    pub raster_samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Mask image or contour JSON.
    pub a: PathBuf,
    /// Mask image or contour JSON.
    pub b: PathBuf,
    /// Minimize the Fréchet distance over starting points of `b`.
    #[arg(long)]
    pub cyclic: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// pentagram, disk or square.
    #[arg(long, value_parser = parse_shape)]
    pub shape: splinemask_core::synth::Shape,
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    /// Boundary displacement amplitude in pixels.
    #[arg(long, default_value_t = 2.0)]
    pub jitter: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for <shape>_image.png, <shape>_clean.png and <shape>_jittered.png.
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn parse_shape(s: &str) -> Result<splinemask_core::synth::Shape, String> {
    s.parse().map_err(|e: splinemask_core::Error| e.to_string())
}

/// Runs the command and returns its exit code.
pub fn execute(cli: Cli) -> u8 {
    let result = match cli.command {
        Command::Refine(args) => refine::run(&args),
        Command::Metrics(args) => metrics::run(&args),
        Command::Synth(args) => synth::run(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_FAILURE
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => ExitCode::from(execute(cli)),
        Err(e) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK })
        }
    }
}
