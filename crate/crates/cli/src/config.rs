//! Parsed command lines. Everything here round-trips through serde.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[command(
    name = "mml",
    version,
    about = "Numerical checks for matrix means, their Ando–Hiai properties and log-majorizations"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Run a verification suite and write its reports.
    Verify {
        suite: Suite,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run one check over a parameter grid and tabulate worst margins.
    Sweep {
        check: SweepCheck,
        /// Grid axis `name=v1,v2,...` or `name=start:stop:step` (repeatable).
        #[arg(long = "grid", required = true)]
        grid: Vec<GridAxis>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run a counterexample campaign described by a JSON file.
    Search {
        file: PathBuf,
        /// Result path; overrides the campaign's outputPath.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Prop22,
    Riccati,
    Similarity,
    Ah,
    TwoVarAh,
    GrandFuruta,
    EqSee,
    LogMaj,
    LieTrotter,
    Norms,
    Alternative,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepCheck {
    Ah,
    TwoVarAh,
    EqSee,
    Alternative,
    /// Sign map of `h_{x,y}(L)` over `(x, y)`.
    HValue,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanKind {
    Geom,
    Natural,
    Tilde,
    Fkt,
    Fktl,
    Wasserstein,
    AltPower,
    AltAffine,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `A_{x,y}` with `B = diag(1, 0)` at the point `(--x, --y)`.
    #[value(name = "2x2")]
    #[serde(rename = "2x2")]
    Point,
    /// Scan `x = 1`, `y` from 1e-1 down to 1e-6 for a witness.
    #[value(name = "2x2-scan")]
    #[serde(rename = "2x2-scan")]
    Scan,
}

/// `--q auto` or a positive number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum QArg {
    Auto,
    Value(f64),
}

impl FromStr for QArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(QArg::Auto);
        }
        s.parse::<f64>().map(QArg::Value).map_err(|_| format!("expected `auto` or a number, got `{s}`"))
    }
}

impl TryFrom<String> for QArg {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<QArg> for String {
    fn from(q: QArg) -> String {
        q.to_string()
    }
}

impl fmt::Display for QArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QArg::Auto => f.write_str("auto"),
            QArg::Value(v) => write!(f, "{v}"),
        }
    }
}

/// One sweep axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<f64>,
    source: String,
}

impl GridAxis {
    pub const NAMES: [&'static str; 9] = ["k", "t", "l", "q", "r", "s", "x", "y", "p"];
}

impl FromStr for GridAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, spec) = s.split_once('=').ok_or_else(|| format!("grid axis `{s}` must look like name=values"))?;
        let name = name.trim();
        if !Self::NAMES.contains(&name) {
            return Err(format!("unknown grid parameter `{name}`; expected one of {}", Self::NAMES.join(", ")));
        }
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number"));
        let values = if spec.trim().is_empty() {
            Vec::new()
        } else if spec.contains(':') {
            let parts: Vec<&str> = spec.split(':').collect();
            let [start, stop, step] = parts[..] else {
                return Err(format!("range `{spec}` must be start:stop:step"));
            };
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
                return Err(format!("range `{spec}` needs finite ends and a positive step"));
            }
            let count = ((stop - start) / step + 1e-9).floor();
            if count < 0.0 {
                Vec::new()
            } else if count > 1e4 {
                return Err(format!("range `{spec}` has more than 10^4 points"));
            } else {
                // rounding keeps 0.1 + 2 * 0.05 from printing as 0.20000000000000004
                (0..=count as usize).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect()
            }
        } else {
            spec.split(',').map(num).collect::<Result<Vec<_>, _>>()?
        };
        Ok(GridAxis { name: name.to_string(), values, source: s.to_string() })
    }
}

impl TryFrom<String> for GridAxis {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<GridAxis> for String {
    fn from(g: GridAxis) -> String {
        g.source
    }
}

/// Flags shared by `verify` and `sweep`.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Flags {
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub l: Option<f64>,
    /// Exponent, or `auto` for the proven threshold.
    #[arg(long)]
    pub q: Option<QArg>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, value_enum)]
    pub mean: Option<MeanKind>,
    /// Matrix dimension; defaults cycle over 2..=6.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, env = "MML_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output format; `verify` defaults to json, `sweep` to csv.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker cap; never changes the output.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub a_file: Option<PathBuf>,
    #[arg(long)]
    pub b_file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Log-majorization theorem: lmF, ah, kah, lgF, lmiF-chain, GT36-refinement, tilde-chain.
    #[arg(long)]
    pub theorem: Option<String>,
}

impl Flags {
    /// Sets a sweep axis value.
    pub fn set(&mut self, name: &str, v: f64) {
        match name {
            "k" => self.k = Some(v),
            "t" => self.t = Some(v),
            "l" => self.l = Some(v),
            "q" => self.q = Some(QArg::Value(v)),
            "r" => self.r = Some(v),
            "s" => self.s = Some(v),
            "x" => self.x = Some(v),
            "y" => self.y = Some(v),
            "p" => self.p = Some(v),
            _ => unreachable!("axis names are validated at parse time"),
        }
    }
}
