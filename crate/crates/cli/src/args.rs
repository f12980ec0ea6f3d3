//! Command-line surface. Every subcommand's arguments double as the
//! `config` block of the run manifest, so they derive serde as well.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "fracpade",
    version,
    about = "Fractional powers of surface FEM operators by Padé-product rational approximation"
)]
pub struct Cli {
    /// Output directory (created if missing). Defaults to `.`, or to the
    /// manifest's directory with `--from-manifest`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Re-run the configuration recorded in a manifest.
    #[arg(long, value_name = "FILE")]
    pub from_manifest: Option<PathBuf>,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "config", rename_all = "kebab-case")]
pub enum Command {
    /// Padé remainder against its a-priori bound on t in [0, 1].
    PadeTable(PadeTableArgs),
    /// Scalar error |μ(λ) - λ^{-α}| of the full scheme over a log-spaced λ grid.
    ScalarError(ScalarErrorArgs),
    /// L² convergence on refined icospheres against the exact series solution.
    SphereConvergence(SphereConvergenceArgs),
    /// Apply L^{-α} to a source on a mesh and write the per-vertex solution.
    Solve(SolveArgs),
    /// Scheme error against dense eigendecomposition on a small mesh.
    CompareOracle(CompareOracleArgs),
    /// Evaluate the sphere series solution on a grid in x₃.
    SphereSeries(SphereSeriesArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PadeTable(_) => "pade-table",
            Command::ScalarError(_) => "scalar-error",
            Command::SphereConvergence(_) => "sphere-convergence",
            Command::Solve(_) => "solve",
            Command::CompareOracle(_) => "compare-oracle",
            Command::SphereSeries(_) => "sphere-series",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PadeTableArgs {
    #[arg(long = "m", value_delimiter = ',', default_values_t = vec![1, 2, 3, 4, 5, 6, 7, 8])]
    pub m: Vec<usize>,
    #[arg(long = "alpha", value_delimiter = ',', default_values_t = vec![0.1, 0.3, 0.5, 0.7, 0.9])]
    pub alpha: Vec<f64>,
    /// Spacing of the t grid.
    #[arg(long, default_value_t = 0.01)]
    pub t_step: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScalarErrorArgs {
    #[arg(long = "m", default_value_t = 10)]
    pub m: usize,
    #[arg(long = "alpha", value_delimiter = ',', default_values_t = vec![0.1, 0.5, 0.9])]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_hat: f64,
    /// Upper end of the spectrum; the default is 2^50.
    #[arg(long, default_value_t = 1125899906842624.0)]
    pub lambda_max: f64,
    /// Number of log-spaced λ values in [max(2, λ̂), Λ].
    #[arg(long, default_value_t = 200)]
    pub points: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SphereConvergenceArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4, 5])]
    pub levels: Vec<usize>,
    #[arg(long = "alpha", value_delimiter = ',', default_values_t = vec![0.01, 0.3, 0.5, 0.7, 0.99])]
    pub alpha: Vec<f64>,
    #[arg(long = "m", default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_hat: f64,
    #[arg(long, default_value = "auto")]
    pub lambda_max: LambdaMaxArg,
    #[arg(long, default_value_t = 1e-12)]
    pub cg_tol: f64,
    #[arg(long, value_enum, default_value_t = RhsArg::Project)]
    pub rhs: RhsArg,
    /// Terms of the reference series.
    #[arg(long, default_value_t = 10_000)]
    pub series_terms: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MeshArgs {
    /// Gmsh `.msh` file (ASCII 2.2 or 4.1).
    #[arg(long, conflicts_with = "builtin")]
    pub mesh: Option<PathBuf>,
    /// `sphere:L`, `torus:R,r,n1,n2` or `square:N0,p`.
    #[arg(long)]
    pub builtin: Option<Builtin>,
    /// Overrides the problem class implied by the mesh.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Constant diffusion coefficient a.
    #[arg(long, default_value_t = 1.0)]
    pub diffusion: f64,
    /// Constant reaction coefficient b; defaults to 1 for positive-reaction
    /// problems and 0 otherwise.
    #[arg(long)]
    pub reaction: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mesh: MeshArgs,
    #[arg(long = "alpha", value_delimiter = ',', default_values_t = vec![0.5])]
    pub alpha: Vec<f64>,
    #[arg(long = "m", default_value_t = 3)]
    pub m: usize,
    /// Spectral shift; defaults to 0.95 times an inverse-power estimate of
    /// the smallest eigenvalue.
    #[arg(long)]
    pub lambda_hat: Option<f64>,
    #[arg(long, default_value = "auto")]
    pub lambda_max: LambdaMaxArg,
    #[arg(long, default_value_t = 1e-12)]
    pub cg_tol: f64,
    /// Defaults to `interpolate` for the torus source and `project` otherwise.
    #[arg(long, value_enum)]
    pub rhs: Option<RhsArg>,
    /// `sign-z`, `checkerboard`, `torus:R,r`, `constant:C` or `zero`;
    /// defaults follow the builtin mesh.
    #[arg(long)]
    pub source: Option<Source>,
    /// Also write the mesh as `mesh.off`.
    #[arg(long)]
    #[serde(default)]
    pub write_mesh: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CompareOracleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mesh: MeshArgs,
    #[arg(long = "alpha", value_delimiter = ',', default_values_t = vec![0.01, 0.5, 0.99])]
    pub alpha: Vec<f64>,
    #[arg(long = "m", value_delimiter = ',', default_values_t = vec![1, 2, 3, 4, 5, 6])]
    pub m: Vec<usize>,
    /// Defaults to the smallest eigenvalue of the dense problem.
    #[arg(long)]
    pub lambda_hat: Option<f64>,
    #[arg(long, default_value = "auto")]
    pub lambda_max: LambdaMaxArg,
    #[arg(long, default_value_t = 1e-13)]
    pub cg_tol: f64,
    #[arg(long, value_enum)]
    pub rhs: Option<RhsArg>,
    #[arg(long)]
    pub source: Option<Source>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SphereSeriesArgs {
    #[arg(long = "alpha", value_delimiter = ',', default_values_t = vec![0.01, 0.5, 0.99])]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub terms: usize,
    /// Number of equispaced x₃ values in [-1, 1].
    #[arg(long, default_value_t = 201)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsArg {
    Interpolate,
    Project,
}

impl From<RhsArg> for fracpade::RhsMethod {
    fn from(r: RhsArg) -> Self {
        match r {
            RhsArg::Interpolate => fracpade::RhsMethod::Interpolate,
            RhsArg::Project => fracpade::RhsMethod::L2Project,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Dirichlet,
    PositiveReaction,
    ZeroMean,
}

impl From<ModeArg> for fracpade::ProblemMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Dirichlet => fracpade::ProblemMode::Dirichlet,
            ModeArg::PositiveReaction => fracpade::ProblemMode::PositiveReaction,
            ModeArg::ZeroMean => fracpade::ProblemMode::ZeroMean,
        }
    }
}

fn parse_list<T: FromStr>(s: &str, n: usize, what: &str) -> Result<Vec<T>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("{what} expects {n} comma-separated values, got `{s}`"));
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| format!("cannot parse `{p}` in {what}")))
        .collect()
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    Sphere {
        level: usize,
    },
    Torus {
        major: f64,
        minor: f64,
        n1: usize,
        n2: usize,
    },
    Square {
        n0: usize,
        p: usize,
    },
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("builtin mesh `{s}` needs the form kind:params"))?;
        match kind {
            "sphere" => Ok(Builtin::Sphere {
                level: parse_list(rest, 1, "sphere:L")?[0],
            }),
            "torus" => {
                let v: Vec<String> = parse_list(rest, 4, "torus:R,r,n1,n2")?;
                let real = |p: &str| {
                    p.parse::<f64>()
                        .map_err(|_| format!("cannot parse `{p}` in torus:R,r,n1,n2"))
                };
                let int = |p: &str| {
                    p.parse::<usize>()
                        .map_err(|_| format!("cannot parse `{p}` in torus:R,r,n1,n2"))
                };
                Ok(Builtin::Torus {
                    major: real(&v[0])?,
                    minor: real(&v[1])?,
                    n1: int(&v[2])?,
                    n2: int(&v[3])?,
                })
            }
            "square" => {
                let v: Vec<usize> = parse_list(rest, 2, "square:N0,p")?;
                Ok(Builtin::Square { n0: v[0], p: v[1] })
            }
            other => Err(format!(
                "unknown builtin mesh `{other}` (expected sphere, torus or square)"
            )),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Sphere { level } => write!(f, "sphere:{level}"),
            Builtin::Torus { major, minor, n1, n2 } => write!(f, "torus:{major},{minor},{n1},{n2}"),
            Builtin::Square { n0, p } => write!(f, "square:{n0},{p}"),
        }
    }
}

string_serde!(Builtin);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    /// `sign(x₃)`
    SignZ,
    /// `1` where `x₁x₂ >= 0`, `-1` elsewhere.
    Checkerboard,
    /// Mean curvature times `cos φ₂` on the torus with radii `(R, r)`.
    Torus {
        major: f64,
        minor: f64,
    },
    Constant(f64),
    Zero,
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None => match s {
                "sign-z" => Ok(Source::SignZ),
                "checkerboard" => Ok(Source::Checkerboard),
                "zero" => Ok(Source::Zero),
                other => Err(format!("unknown source `{other}`")),
            },
            Some(("torus", rest)) => {
                let r: Vec<f64> = parse_list(rest, 2, "torus:R,r")?;
                Ok(Source::Torus {
                    major: r[0],
                    minor: r[1],
                })
            }
            Some(("constant", rest)) => Ok(Source::Constant(parse_list(rest, 1, "constant:C")?[0])),
            Some((other, _)) => Err(format!("unknown source `{other}`")),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::SignZ => write!(f, "sign-z"),
            Source::Checkerboard => write!(f, "checkerboard"),
            Source::Torus { major, minor } => write!(f, "torus:{major},{minor}"),
            Source::Constant(c) => write!(f, "constant:{c}"),
            Source::Zero => write!(f, "zero"),
        }
    }
}

string_serde!(Source);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMaxArg {
    Auto,
    Value(f64),
}

impl FromStr for LambdaMaxArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(LambdaMaxArg::Auto);
        }
        s.parse()
            .map(LambdaMaxArg::Value)
            .map_err(|_| format!("lambda-max must be `auto` or a number, got `{s}`"))
    }
}

impl fmt::Display for LambdaMaxArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaMaxArg::Auto => write!(f, "auto"),
            LambdaMaxArg::Value(v) => write!(f, "{v:e}"),
        }
    }
}

string_serde!(LambdaMaxArg);
