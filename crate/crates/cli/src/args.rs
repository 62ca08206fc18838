use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qphase::optimizer::{DEFAULT_RNG_SEED, DEFAULT_SHIFT_POINTS};
use qphase::CostFunction;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "qphase", version, about = "Optimal strategies for discrete quantum phase estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Average cost of the covariant, half-shifted and optimized strategies over a range of N.
    CostSweep(CommonArgs),
    /// Optimize a single instance and report the strategy.
    Optimize(CommonArgs),
    /// Mutual information of covariant and best-shifted readouts over a range of N.
    MutualInfo(CommonArgs),
    /// Continuous-limit step-cost state (discrete prolate spheroidal sequence).
    Dpss(CommonArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostName {
    Standard,
    Step,
    Fourier,
}

impl fmt::Display for CostName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostName::Standard => "standard",
            CostName::Step => "step",
            CostName::Fourier => "fourier",
        })
    }
}

/// Inclusive range of grid sizes, written `A..B` or `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NRange {
    pub start: usize,
    pub end: usize,
}

impl NRange {
    pub fn values(&self) -> RangeInclusive<usize> {
        self.start..=self.end
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad N '{t}': {e}"));
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if start == 0 || end < start {
            return Err(format!("N range '{s}' must satisfy 1 ≤ A ≤ B"));
        }
        Ok(Self { start, end })
    }
}

impl fmt::Display for NRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("bad seed '{s}': {e}"))
}

#[derive(Clone, Debug, Default, Args)]
pub struct CommonArgs {
    /// Probe dimension D.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Grid sizes, `A..B` (inclusive) or a single `A`.
    #[arg(long = "n", value_name = "A..B")]
    pub n: Option<NRange>,
    /// Cost function (default standard).
    #[arg(long, value_enum)]
    pub cost: Option<CostName>,
    /// Step-cost window width in radians.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Cosine-series coefficients α₀,α₁,… of the Fourier cost.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alphas: Option<Vec<f64>>,
    /// Largest number of seed elements tried by the optimizer.
    #[arg(long)]
    pub seeds_max: Option<usize>,
    /// Bin-integrated readout with K outcomes instead of N sampled outcomes.
    #[arg(long, value_name = "K")]
    pub bins: Option<usize>,
    /// Number of shifts sampled in [0, θ).
    #[arg(long, value_name = "P")]
    pub xi_grid: Option<usize>,
    /// Output file (default stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write an SVG chart next to the output file.
    #[arg(long)]
    pub svg: bool,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// RNG seed, decimal or 0x-prefixed hex (default 0x5EED).
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// TOML file with defaults for any of these flags.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Append a wall-clock seconds column (output is then no longer reproducible).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Clone, Debug, Default, Args)]
pub struct VerifyArgs {
    /// Run only checks whose name contains this text (`all` includes slow checks).
    #[arg(long)]
    pub filter: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum SeedValue {
    Int(u64),
    Text(String),
}

/// Contents of a `--config` file. Keys mirror the long flag names.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    dim: Option<usize>,
    n: Option<String>,
    cost: Option<CostName>,
    sigma: Option<f64>,
    alphas: Option<Vec<f64>>,
    seeds_max: Option<usize>,
    bins: Option<usize>,
    xi_grid: Option<usize>,
    out: Option<PathBuf>,
    svg: Option<bool>,
    jobs: Option<usize>,
    seed: Option<SeedValue>,
    timings: Option<bool>,
    filter: Option<String>,
    /// Overrides of verification tolerances, keyed by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::InvalidArgs(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved options: flags, then the config file, then defaults.
#[derive(Clone, Debug)]
pub struct Settings {
    pub dim: usize,
    pub n: NRange,
    pub cost: CostName,
    pub sigma: f64,
    pub alphas: Option<Vec<f64>>,
    pub seeds_max: usize,
    pub bins: Option<usize>,
    pub xi_grid: usize,
    pub out: Option<PathBuf>,
    pub svg: bool,
    pub jobs: Option<usize>,
    pub seed: u64,
    pub timings: bool,
    pub filter: Option<String>,
    pub tolerances: BTreeMap<String, f64>,
}

pub const DEFAULT_DIM: usize = 10;
pub const DEFAULT_SEEDS_MAX: usize = 4;
pub const DEFAULT_N: NRange = NRange { start: 2, end: 30 };

impl Settings {
    pub fn resolve(args: &CommonArgs, filter: Option<&str>) -> CliResult<Self> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let n = match (&args.n, &file.n) {
            (Some(n), _) => *n,
            (None, Some(text)) => text.parse().map_err(CliError::InvalidArgs)?,
            (None, None) => DEFAULT_N,
        };
        let seed = match (args.seed, &file.seed) {
            (Some(s), _) => s,
            (None, Some(SeedValue::Int(s))) => *s,
            (None, Some(SeedValue::Text(t))) => parse_seed(t).map_err(CliError::InvalidArgs)?,
            (None, None) => DEFAULT_RNG_SEED,
        };
        let settings = Self {
            dim: args.dim.or(file.dim).unwrap_or(DEFAULT_DIM),
            n,
            cost: args.cost.or(file.cost).unwrap_or(CostName::Standard),
            sigma: args.sigma.or(file.sigma).unwrap_or(std::f64::consts::PI / 10.0),
            alphas: args.alphas.clone().or(file.alphas),
            seeds_max: args.seeds_max.or(file.seeds_max).unwrap_or(DEFAULT_SEEDS_MAX),
            bins: args.bins.or(file.bins),
            xi_grid: args.xi_grid.or(file.xi_grid).unwrap_or(DEFAULT_SHIFT_POINTS),
            out: args.out.clone().or(file.out),
            svg: args.svg || file.svg.unwrap_or(false),
            jobs: args.jobs.or(file.jobs),
            seed,
            timings: args.timings || file.timings.unwrap_or(false),
            filter: filter.map(str::to_owned).or(file.filter),
            tolerances: file.tolerances,
        };
        settings.validate()?;
        Ok(settings)
    }

    fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::InvalidArgs(m));
        if self.dim == 0 {
            return bad("--dim must be at least 1".into());
        }
        if self.seeds_max == 0 {
            return bad("--seeds-max must be at least 1".into());
        }
        if self.xi_grid == 0 {
            return bad("--xi-grid must be at least 1".into());
        }
        if self.jobs == Some(0) {
            return bad("--jobs must be at least 1".into());
        }
        if self.svg && self.out.is_none() {
            return bad("--svg needs --out".into());
        }
        self.cost_function()?;
        Ok(())
    }

    pub fn cost_function(&self) -> CliResult<CostFunction> {
        let f = match self.cost {
            CostName::Standard => CostFunction::standard(),
            CostName::Step => CostFunction::step(self.sigma).map_err(|e| CliError::InvalidArgs(e.to_string()))?,
            CostName::Fourier => {
                let alphas =
                    self.alphas.clone().ok_or_else(|| CliError::InvalidArgs("--cost fourier needs --alphas".into()))?;
                CostFunction::fourier(alphas).map_err(|e| CliError::InvalidArgs(e.to_string()))?
            }
        };
        Ok(f)
    }

    /// Cost parameters as they appear in output headers.
    pub fn cost_label(&self) -> String {
        match self.cost {
            CostName::Standard => "standard".into(),
            CostName::Step => format!("step sigma={:.16e}", self.sigma),
            CostName::Fourier => {
                let alphas: Vec<String> = self.alphas.iter().flatten().map(|a| format!("{a:.16e}")).collect();
                format!("fourier alphas={}", alphas.join(","))
            }
        }
    }

    pub fn pool(&self) -> CliResult<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            builder = builder.num_threads(j);
        }
        builder.build().map_err(|e| CliError::InvalidArgs(format!("worker pool: {e}")))
    }
}
