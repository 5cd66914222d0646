use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use curvature::certify::Notion;
use curvature::fw::StepRule;
use curvature::online::NoisePattern;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "curvature", version, about = "Curvature certificates, curved bodies, online learning and Frank-Wolfe runs")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// Base seed for every random stream [default: 0, or the preset config's seed]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory [default: out, or the preset config's directory]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Format of tabular artifacts
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify a curvature modulus of a body by sampling
    Certify(CertifyArgs),
    /// Build the curved body K_t and report gauges, the sandwich check and weak optimization
    Curve(CurveArgs),
    /// Play Follow the Leader against a scripted adversary
    Olo(OloArgs),
    /// Frank-Wolfe on a quadratic over a body or its curved version
    Fw(FwArgs),
    /// Run a named experiment preset
    Preset(PresetArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotionArg {
    TwoConvex,
    TwoSmooth,
    SetStrongConvex,
    FnStrongConvex,
    SphereLipschitz,
    Nonmidpoint,
}

impl From<NotionArg> for Notion {
    fn from(n: NotionArg) -> Self {
        match n {
            NotionArg::TwoConvex => Notion::TwoConvex,
            NotionArg::TwoSmooth => Notion::TwoSmooth,
            NotionArg::SetStrongConvex => Notion::SetStrongConvex,
            NotionArg::FnStrongConvex => Notion::FnStrongConvex,
            NotionArg::SphereLipschitz => Notion::SphereLipschitz,
            NotionArg::Nonmidpoint => Notion::NonMidpoint,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyArgs {
    /// Body spec (JSON)
    #[arg(long)]
    pub body: PathBuf,
    #[arg(long, value_enum)]
    pub notion: NotionArg,
    /// Claimed modulus
    #[arg(long)]
    pub modulus: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Reference body C for the set notions [default: the body itself]
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Largest perturbation gauge for two-smooth
    #[arg(long, default_value_t = 2.0)]
    pub y_radius: f64,
    /// Certify the curved body K_t (inscribed radius) instead of the body
    #[arg(long)]
    pub t: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct CurveArgs {
    #[arg(long)]
    pub body: PathBuf,
    /// Curving parameter; alternatively give --eps
    #[arg(long, conflicts_with = "eps")]
    pub t: Option<f64>,
    /// Target approximation factor; t is chosen so that K ⊆ (1 + ε)·K_t
    #[arg(long)]
    pub eps: Option<f64>,
    /// Inner radius [default: inscribed radius of the body]
    #[arg(long)]
    pub r: Option<f64>,
    /// Outer radius used with --eps [default: circumradius of the body]
    #[arg(long = "big-r")]
    pub big_r: Option<f64>,
    /// Random points for the gauge samples and the sandwich check
    #[arg(long, default_value_t = 1_000)]
    pub samples: usize,
    /// Objective for weak optimization as comma-separated coordinates; repeatable
    #[arg(long = "direction")]
    pub directions: Vec<String>,
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryArg {
    Growth,
    Nonneg,
    Alternating,
    Hinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternArg {
    Uniform,
    Alternating,
}

impl From<PatternArg> for NoisePattern {
    fn from(p: PatternArg) -> Self {
        match p {
            PatternArg::Uniform => NoisePattern::Uniform,
            PatternArg::Alternating => NoisePattern::Alternating,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct OloArgs {
    /// Playing set [default: the Euclidean unit ball, or [-1,1]² for the alternating adversary]
    #[arg(long)]
    pub body: Option<PathBuf>,
    /// Dimension of the default ball
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = AdversaryArg::Growth)]
    pub adversary: AdversaryArg,
    /// Growth constant G
    #[arg(long, default_value_t = 0.5)]
    pub g: f64,
    /// Bound M on the gain norms
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// Hint quality α
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = PatternArg::Uniform)]
    pub pattern: PatternArg,
    #[arg(long, default_value_t = 1_000)]
    pub horizon: usize,
    /// Strong convexity modulus of the playing set [default: 1/8 for the default ball]
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleArg {
    Fixed,
    Classic,
    LineSearch,
}

#[derive(Debug, Args, Serialize)]
pub struct FwArgs {
    /// Feasible set [default: [-1,1]²]
    #[arg(long)]
    pub body: Option<PathBuf>,
    /// Target z of f(x) = ‖x - z‖², comma-separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub target: Vec<f64>,
    /// Feasible start, comma-separated [default: origin]
    #[arg(long, value_delimiter = ',')]
    pub x0: Option<Vec<f64>>,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = RuleArg::LineSearch)]
    pub rule: RuleArg,
    /// Step size for --rule fixed
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    /// Optimize over the curved body K_t instead
    #[arg(long)]
    pub t: Option<f64>,
    /// Precision of the curved linear oracle
    #[arg(long, default_value_t = 1e-9)]
    pub delta: f64,
    /// Stop once the certified gap is at most this
    #[arg(long, default_value_t = 0.0)]
    pub tolerance: f64,
}

impl FwArgs {
    pub fn step_rule(&self) -> StepRule {
        match self.rule {
            RuleArg::Fixed => StepRule::Fixed { eta: self.eta },
            RuleArg::Classic => StepRule::Classic,
            RuleArg::LineSearch => StepRule::LineSearch,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    FtlGrowth,
    FtlNonneg,
    FtlBad,
    CurveSandwich,
    CurveDecomp,
    HintsReduction,
    CertifyBall,
    FwDemo,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::FtlGrowth => "ftl-growth",
            Preset::FtlNonneg => "ftl-nonneg",
            Preset::FtlBad => "ftl-bad",
            Preset::CurveSandwich => "curve-sandwich",
            Preset::CurveDecomp => "curve-decomp",
            Preset::HintsReduction => "hints-reduction",
            Preset::CertifyBall => "certify-ball",
            Preset::FwDemo => "fw-demo",
        }
    }
}

/// Tunable preset parameters; unset values take the preset's defaults.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Horizon T (or Frank-Wolfe steps)
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Curving parameter
    #[arg(long)]
    pub t: Option<f64>,
    /// Approximation targets ε, comma-separated
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Curvature modulus λ (or the claimed modulus for certify-ball)
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Number of seeds swept
    #[arg(long)]
    pub seeds: Option<u64>,
    /// Sample count
    #[arg(long)]
    pub samples: Option<usize>,
}

impl Params {
    /// Fields set in `other` win.
    pub fn merged(self, other: Params) -> Params {
        Params {
            horizon: other.horizon.or(self.horizon),
            t: other.t.or(self.t),
            eps: other.eps.or(self.eps),
            lambda: other.lambda.or(self.lambda),
            seeds: other.seeds.or(self.seeds),
            samples: other.samples.or(self.samples),
        }
    }
}

#[derive(Debug, Args)]
pub struct PresetArgs {
    /// Preset to run; may instead come from --config
    #[arg(value_enum)]
    pub name: Option<Preset>,
    /// Experiment config (TOML)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Body spec (JSON) replacing the preset's default body
    #[arg(long)]
    pub body: Option<PathBuf>,
    #[command(flatten)]
    pub params: Params,
}
