use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dcrates::bounds::parse_ext;
use dcrates::worstcase::SearchFamily;
use dcrates::{Curvatures, SubgradientPolicy};

#[derive(Debug, Parser)]
#[command(name = "dc-rates", version, about = "Rates, certificates and worst-case search for DCA and PGD")]
pub struct Cli {
    /// Output format; `sweep` defaults to csv, every other command to json.
    #[arg(long, global = true, value_enum)]
    pub out: Option<Format>,

    #[arg(long, global = true, env = "DC_RATES_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Slack tolerance, relative to the size of the function values.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regime, coefficient and sublinear bound of a curvature quadruple.
    Classify(RateArgs),
    /// Sharpest available bound, flagged when only conjectured.
    Rate(RateArgs),
    /// Run DCA (or PGD for composite instances) from an instance file.
    Run(RunArgs),
    /// Check a descent-lemma certificate, symbolically or on a recorded run.
    VerifyCertificate(VerifyArgs),
    /// Multistart search for the instance closest to the bound.
    SearchWorstcase(SearchArgs),
    /// Regime map with searched tightness, one row per cell.
    Sweep(SweepArgs),
    /// Curvature shifts of a PGD stepsize schedule.
    Schedule(ScheduleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CurvatureArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_ext)]
    pub mu1: f64,
    #[arg(long = "L1", allow_hyphen_values = true, value_parser = parse_ext)]
    pub l1: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_ext)]
    pub mu2: f64,
    #[arg(long = "L2", allow_hyphen_values = true, value_parser = parse_ext)]
    pub l2: f64,
}

impl CurvatureArgs {
    pub fn curvatures(&self) -> Curvatures {
        Curvatures::new(self.mu1, self.l1, self.mu2, self.l2)
    }
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub curvatures: CurvatureArgs,
    /// The run has `N + 1` steps.
    #[arg(long = "N", default_value_t = 1)]
    pub n: usize,
    /// Initial gap `F(x^0) - F(x^{N+1})` or an upper bound of it.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Canonical,
    Left,
    Right,
}

impl From<Policy> for SubgradientPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Canonical => SubgradientPolicy::Canonical,
            Policy::Left => SubgradientPolicy::Left,
            Policy::Right => SubgradientPolicy::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProgressMetric {
    /// Smallest squared step `|x^k - x^{k+1}|^2`.
    Mapping,
    /// Smallest subgradient gap `|g1^k - g2^k|`.
    Residual,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON file with `{"f1", "f2"}` or `{"phi", "h", "gamma"}`.
    #[arg(long)]
    pub instance: PathBuf,
    /// Starting point, comma separated.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub x0: Vec<f64>,
    /// `N`: the run takes `N + 1` steps.
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    #[arg(long, value_enum, default_value_t = Policy::Canonical)]
    pub policy: Policy,
    #[arg(long, value_enum, default_value_t = ProgressMetric::Mapping)]
    pub metric: ProgressMetric,
}

#[derive(Debug, Args)]
pub struct OptionalCurvatures {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_ext)]
    pub mu1: Option<f64>,
    #[arg(long = "L1", allow_hyphen_values = true, value_parser = parse_ext)]
    pub l1: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_ext)]
    pub mu2: Option<f64>,
    #[arg(long = "L2", allow_hyphen_values = true, value_parser = parse_ext)]
    pub l2: Option<f64>,
}

impl OptionalCurvatures {
    pub fn curvatures(&self) -> Option<Curvatures> {
        Some(Curvatures::new(self.mu1?, self.l1?, self.mu2?, self.l2?))
    }

    pub fn any(&self) -> bool {
        self.mu1.is_some() || self.l1.is_some() || self.mu2.is_some() || self.l2.is_some()
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// One of p1..p6, thm31, thm32; defaults to the regime lemma of a trajectory.
    #[arg(long)]
    pub lemma: Option<String>,
    #[command(flatten)]
    pub curvatures: OptionalCurvatures,
    /// Step index of the theorem weights.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Trajectory JSON, or the output of `run --out json`.
    #[arg(long)]
    pub from_trajectory: Option<PathBuf>,
    /// Verify in rational arithmetic.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub curvatures: CurvatureArgs,
    #[arg(long = "N", default_value_t = 1)]
    pub n: usize,
    /// Maximum number of multistart trials.
    #[arg(long, default_value_t = 256)]
    pub budget: usize,
    /// interp[:dim], quadratic-1d, pw-quadratic-1d[:pieces] or quadratic-2d.
    #[arg(long, default_value = "interp:3")]
    pub family: SearchFamily,
    /// Stop once a batch reaches this ratio.
    #[arg(long)]
    pub stop_at: Option<f64>,
    /// Cost evaluations per trial.
    #[arg(long)]
    pub evals: Option<usize>,
    /// Leave the witness trajectory out of the report.
    #[arg(long)]
    pub no_witness: bool,
}

/// `lo:hi:count` or a comma separated list.
#[derive(Debug, Clone)]
pub struct Axis(pub Vec<f64>);

impl std::str::FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("invalid number {t:?}: {e}"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [lo, hi, count] => {
                let count = count.trim().parse::<usize>().map_err(|e| format!("invalid count {count:?}: {e}"))?;
                Ok(Axis(dcrates::worstcase::grid(num(lo)?, num(hi)?, count)))
            }
            [_] => s.split(',').map(num).collect::<Result<_, _>>().map(Axis),
            _ => Err(format!("expected lo:hi:count or a list, got {s:?}")),
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, allow_hyphen_values = true, default_value = "-0.9:2.5:8")]
    pub mu2_ratios: Axis,
    #[arg(long = "L2-ratios", allow_hyphen_values = true, default_value = "-0.8:4:8")]
    pub l2_ratios: Axis,
    #[arg(long = "L1-ratio", default_value_t = 2.0, value_parser = parse_ext)]
    pub l1_ratio: f64,
    #[arg(long = "N", default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value = "interp:3")]
    pub family: SearchFamily,
    /// Trials per cell.
    #[arg(long, default_value_t = 32)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mu1: f64,
    #[arg(long = "L2", allow_hyphen_values = true)]
    pub l2: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub mu2: f64,
    /// Stepsizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub gammas: Vec<f64>,
}
