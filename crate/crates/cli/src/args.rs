use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdunkl::frqdt::TransformSpec;
use qdunkl::quat::UnitAxis;

#[derive(Parser, Debug)]
#[command(name = "qdunkl", version)]
#[command(about = "Fractional quaternionic Dunkl transforms and their verification suites")]
pub struct Cli {
    /// Worker threads (0 = one per core)
    #[arg(long, global = true, env = "QDUNKL_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the fractional kernel at points
    Kernel(KernelArgs),
    /// One-dimensional fractional Dunkl transform of a generated signal
    Transform1d(Transform1dArgs),
    /// Two-sided 2-D transform of a field
    Transform2d(Transform2dArgs),
    /// Fractional Hankel transform of a radial profile
    Hankel(HankelArgs),
    /// Run verification suites and emit a JSON report array
    Verify(VerifyArgs),
    /// Heisenberg-type moment products
    Moments(MomentsArgs),
}

/// Parses `0.7`, `pi`, `-pi/3`, `2pi/5`, `2*pi/5`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, b.parse::<f64>().map_err(|e| format!("'{s}': {e}"))?),
        None => (t.as_str(), 1.0),
    };
    let coef = match num.strip_suffix("pi") {
        Some(c) => {
            let c = c.strip_suffix('*').unwrap_or(c);
            match c {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|e| format!("'{s}': {e}"))?,
            }
        }
        None => return Err(format!("'{s}' is not an angle")),
    };
    Ok(coef * std::f64::consts::PI / den)
}

fn parse_axis(s: &str) -> Result<UnitAxis, String> {
    s.parse::<UnitAxis>().map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    #[arg(long, default_value_t = 0.0)]
    pub chi1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub chi2: f64,
    #[arg(long, default_value = "pi/2", value_parser = parse_angle)]
    pub theta1: f64,
    #[arg(long, default_value = "pi/2", value_parser = parse_angle)]
    pub theta2: f64,
    /// Left axis: i, j, k, -i, ... or a component triple "x,y,z"
    #[arg(long = "axis-a", default_value = "i", value_parser = parse_axis)]
    pub axis_a: UnitAxis,
    /// Right axis
    #[arg(long = "axis-b", default_value = "j", value_parser = parse_axis)]
    pub axis_b: UnitAxis,
    /// Gauss rule size per coordinate
    #[arg(long, default_value_t = 48)]
    pub n: usize,
}

impl SpecArgs {
    pub fn spec(&self) -> TransformSpec {
        TransformSpec::new(self.chi1, self.chi2, self.theta1, self.theta2)
            .with_axes(self.axis_a, self.axis_b)
    }
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 0.0)]
    pub chi: f64,
    #[arg(long, default_value = "pi/2", value_parser = parse_angle)]
    pub theta: f64,
    #[arg(long, default_value = "i", value_parser = parse_axis)]
    pub axis: UnitAxis,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<f64>,
    /// CSV with header `x,y`; one output row per input row
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathArg {
    Quadrature,
    Spectral,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct Transform1dArgs {
    #[arg(long, default_value_t = 0.0)]
    pub chi: f64,
    #[arg(long, default_value = "pi/2", value_parser = parse_angle)]
    pub theta: f64,
    #[arg(long, default_value = "i", value_parser = parse_axis)]
    pub axis: UnitAxis,
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    pub side: SideArg,
    #[arg(long, default_value_t = 48)]
    pub n: usize,
    /// gaussian(alpha) or hermite(n)
    #[arg(long, default_value = "hermite(1)")]
    pub signal: String,
    #[arg(long, value_enum, default_value_t = PathArg::Quadrature)]
    pub path: PathArg,
    #[arg(long, default_value_t = 16)]
    pub nmax: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Transform2dArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Field file (`.csv` with header x1,x2,w,x,y,z or `.json`) on the grid given by the flags
    #[arg(long, conflicts_with = "signal")]
    pub input: Option<PathBuf>,
    /// gaussian(alpha), hermite(n,m) or example_eigen(t1,r1,t2,r2)
    #[arg(long)]
    pub signal: Option<String>,
    #[arg(long, value_enum, default_value_t = PathArg::Quadrature)]
    pub path: PathArg,
    /// Also run the other path and report the relative residual on stderr
    #[arg(long)]
    pub compare: bool,
    #[arg(long, default_value_t = 16)]
    pub nmax: usize,
    #[arg(long, default_value_t = 16)]
    pub mmax: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HankelArgs {
    #[arg(long, default_value_t = 0.0)]
    pub nu: f64,
    #[arg(long, default_value = "pi/2", value_parser = parse_angle)]
    pub theta: f64,
    #[arg(long, default_value = "i", value_parser = parse_axis)]
    pub axis: UnitAxis,
    #[arg(long, default_value_t = 48)]
    pub n: usize,
    /// gaussian(alpha) or laguerre(n); laguerre is `x^{nu+1/2} e^{-x^2/2} L_n^nu(x^2)` when unweighted
    #[arg(long, default_value = "gaussian(0.5)")]
    pub signal: String,
    /// Use the `L^2(dx)` normalization instead of the weighted one
    #[arg(long)]
    pub unweighted: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Comma-separated suites; all when omitted
    #[arg(long, value_delimiter = ',')]
    pub suite: Vec<String>,
    #[arg(long, default_value_t = 16)]
    pub nmax: usize,
    #[arg(long, default_value_t = 16)]
    pub mmax: usize,
    #[arg(long, default_value_t = 0.8)]
    pub alpha: f64,
    #[arg(long, default_value = "pi/4", value_parser = parse_angle)]
    pub beta1: f64,
    #[arg(long, default_value = "pi/6", value_parser = parse_angle)]
    pub beta2: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 50)]
    pub moment_samples: usize,
    /// Overrides every suite's tolerance
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "gaussian(0.5)")]
    pub signal: String,
    /// Moment orders, comma-separated
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub p: Vec<f64>,
    /// Emit CSV rows `p,chi1,chi2,theta1,theta2,ratio,pass` instead of JSON
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
