use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pinch_core::{PinchParameter, PsiVariant};

pub const DIMENSION_LIMITS: RangeInclusive<usize> = 5..=64;
pub const TOL_LIMITS: RangeInclusive<f64> = 1e-10..=1e-2;

#[derive(Debug, Parser)]
#[command(
    name = "pinch",
    version,
    about = "Pinching threshold δ(n) for the volume-comparison integral I(n, δ)",
    long_about = "Computes the threshold δ(n) below which the integral I(n, δ) of the pinching kernel \
                  stays nonnegative, samples the kernel for plotting, and runs the validation suites.\n\n\
                  Only the full-diameter case R = π is implemented; δ(n, R) for R < π is not."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute δ(n) for a range of dimensions and compare with the published table
    Table1(Table1Args),
    /// Sample Φ_δ, v_δ and Φ_δ·v_δ on a uniform ρ grid plus the breakpoints
    Curve(CurveArgs),
    /// Evaluate I(n, δ) for fixed δ
    Integral(IntegralArgs),
    /// Run the validation suites and print a pass/fail matrix
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantChoice {
    Listing,
    Proposition,
    Both,
}

impl VariantChoice {
    pub fn variants(self) -> Vec<PsiVariant> {
        match self {
            Self::Listing => vec![PsiVariant::Listing],
            Self::Proposition => vec![PsiVariant::Proposition],
            Self::Both => PsiVariant::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format; inferred from the --out extension when omitted, CSV otherwise
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    pub fn format(&self) -> Format {
        self.format
            .unwrap_or_else(|| match self.out.as_deref().and_then(Path::extension) {
                Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
                _ => Format::Csv,
            })
    }
}

/// Inclusive dimension range, written `5..20`, `5..=20` or `7`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimensions(pub RangeInclusive<usize>);

impl Dimensions {
    pub fn to_vec(&self) -> Vec<usize> {
        self.0.clone().collect()
    }
}

pub fn parse_dimensions(s: &str) -> Result<Dimensions, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("`{t}` is not a dimension"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    for n in [lo, hi] {
        if !DIMENSION_LIMITS.contains(&n) {
            return Err(format!(
                "dimension {n} outside [{}, {}]",
                DIMENSION_LIMITS.start(),
                DIMENSION_LIMITS.end()
            ));
        }
    }
    Ok(Dimensions(lo..=hi))
}

pub fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !TOL_LIMITS.contains(&t) {
        return Err(format!(
            "tolerance {t} outside [{:e}, {:e}]",
            TOL_LIMITS.start(),
            TOL_LIMITS.end()
        ));
    }
    Ok(t)
}

pub fn parse_delta(s: &str) -> Result<PinchParameter, String> {
    let d: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    PinchParameter::new(d).map_err(|e| e.to_string())
}

pub fn parse_scan_step(s: &str) -> Result<f64, String> {
    let step: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(step > 0.0 && step <= 0.01) {
        return Err(format!("scan step {step} outside (0, 0.01]"));
    }
    Ok(step)
}

#[derive(Debug, Clone, Args)]
pub struct Table1Args {
    #[arg(long, value_parser = parse_dimensions, default_value = "5..20")]
    pub n: Dimensions,
    #[arg(long, value_enum, default_value_t = VariantChoice::Both)]
    pub variant: VariantChoice,
    /// Bisection bracket width for δ(n)
    #[arg(long, value_parser = parse_tol, default_value = "1e-6")]
    pub tol: f64,
    /// Spacing of the δ scan grid
    #[arg(long, value_parser = parse_scan_step, default_value = "1e-3")]
    pub scan_step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[arg(long, value_parser = parse_dimensions, default_value = "5")]
    pub n: Dimensions,
    #[arg(long, value_parser = parse_delta)]
    pub delta: PinchParameter,
    #[arg(long, value_enum, default_value_t = VariantChoice::Listing)]
    pub variant: VariantChoice,
    /// Number of uniform samples ρ_k = πk/(samples + 1)
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..=10_000_000))]
    pub samples: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IntegralArgs {
    #[arg(long, value_parser = parse_dimensions, default_value = "5..20")]
    pub n: Dimensions,
    #[arg(long, value_parser = parse_delta)]
    pub delta: PinchParameter,
    #[arg(long, value_enum, default_value_t = VariantChoice::Listing)]
    pub variant: VariantChoice,
    /// Absolute quadrature tolerance
    #[arg(long, value_parser = parse_tol, default_value = "1e-10")]
    pub tol: f64,
    /// Also report |S^{n−1}|·I(n, δ)
    #[arg(long)]
    pub include_sphere_factor: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long, value_parser = parse_dimensions, default_value = "5..20")]
    pub n: Dimensions,
    /// Replaces the tolerance of the tolerance-parameterized suites
    #[arg(long, value_parser = parse_tol)]
    pub tol: Option<f64>,
    #[arg(long, value_parser = parse_scan_step, default_value = "1e-3")]
    pub scan_step: f64,
    /// Added to the Ψ coefficient of one side of the dual-path comparison
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub inject_psi_perturbation: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}
