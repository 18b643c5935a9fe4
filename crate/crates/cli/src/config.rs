//! Run configuration: an optional JSON file, overridden by flags.

use clap::Args;
use quermass::sphere::{SphereDim, SphericalFunction};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const OUT_ENV: &str = "QUERMASS_OUT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: {message}")]
    Config { path: String, message: String },
    #[error("{0}")]
    Core(#[from] quermass::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Core(quermass::Error::Argument(_)) => 2,
            _ => 1,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

/// One entry of a coefficient list.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficient {
    pub degree: usize,
    pub order: i64,
    pub value: f64,
}

/// Keys accepted in a config file. All optional.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub n: Option<usize>,
    pub max_degree: Option<usize>,
    pub resolution: Option<usize>,
    pub k: Option<usize>,
    pub m: Option<i64>,
    pub epsilons: Option<Vec<f64>>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub coefficients: Option<Vec<Coefficient>>,
    pub coefficients_file: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

/// Flags shared by every command; each overrides the config file.
#[derive(Clone, Debug, Default, Args)]
pub struct Overrides {
    /// Sphere dimension (1: curves in the plane, 2: surfaces in space).
    #[arg(long)]
    pub n: Option<usize>,
    /// Highest spherical-harmonic degree.
    #[arg(long = "max-degree", short = 'L')]
    pub max_degree: Option<usize>,
    /// Quadrature resolution (Gauss–Legendre rows on S², nodes on S¹).
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Matched functional; −1 is volume.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i64>,
    /// Target W^{2,∞} norms, comma separated.
    #[arg(long = "epsilon", value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON file with an array of {degree, order, value}.
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = OUT_ENV)]
    pub out: Option<PathBuf>,
}

/// Fully resolved settings.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub n: usize,
    pub max_degree: usize,
    pub resolution: Option<usize>,
    pub k: usize,
    pub m: i64,
    pub epsilons: Vec<f64>,
    pub count: usize,
    pub seed: u64,
    pub coefficients: Option<Vec<Coefficient>>,
    pub output_dir: PathBuf,
}

fn load_coefficients(path: &Path) -> Result<Vec<Coefficient>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

impl RunConfig {
    pub fn resolve(command: &str, file: FileConfig, flags: Overrides) -> Result<Self, CliError> {
        if let Some(c) = &file.command {
            if c != command {
                return Err(CliError::Usage(format!(
                    "config file is for command `{c}` but `{command}` was requested"
                )));
            }
        }
        let n = flags.n.or(file.n).unwrap_or(2);
        let coefficients = match (flags.coefficients, file.coefficients, file.coefficients_file) {
            (Some(p), _, _) => Some(load_coefficients(&p)?),
            (None, Some(c), None) => Some(c),
            (None, None, Some(p)) => Some(load_coefficients(&p)?),
            (None, Some(_), Some(_)) => {
                return Err(CliError::Usage("give either `coefficients` or `coefficients_file`, not both".into()))
            }
            (None, None, None) => None,
        };
        let coeff_degree = coefficients.as_ref().and_then(|c| c.iter().map(|t| t.degree).max()).unwrap_or(0);
        let config = RunConfig {
            command: command.to_string(),
            n,
            max_degree: flags.max_degree.or(file.max_degree).unwrap_or(6).max(coeff_degree),
            resolution: flags.resolution.or(file.resolution),
            k: flags.k.or(file.k).unwrap_or(n.saturating_sub(1)),
            m: flags.m.or(file.m).unwrap_or(-1),
            epsilons: flags.epsilons.or(file.epsilons).unwrap_or_else(|| vec![0.04, 0.02, 0.01]),
            count: flags.count.or(file.count).unwrap_or(50),
            seed: flags.seed.or(file.seed).unwrap_or(1),
            coefficients,
            output_dir: flags.out.or(file.output_dir).unwrap_or_else(|| PathBuf::from(".")),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if !(1..=2).contains(&self.n) {
            return usage(format!("n must be 1 or 2, got {}", self.n));
        }
        if self.max_degree < 2 || self.max_degree > 40 {
            return usage(format!("max degree must lie in 2..=40, got {}", self.max_degree));
        }
        if self.k > self.n {
            return usage(format!("k = {} exceeds n = {}", self.k, self.n));
        }
        if self.m < -1 || self.m >= self.k as i64 {
            return usage(format!("need −1 ≤ m < k, got k = {}, m = {}", self.k, self.m));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(*e > 0.0 && *e <= quermass::verify::MAX_EPSILON)) {
            return usage(format!("epsilons must lie in (0, {}]", quermass::verify::MAX_EPSILON));
        }
        if self.count == 0 {
            return usage("count must be positive".into());
        }
        if let Some(r) = self.resolution {
            if r < 4 {
                return usage(format!("resolution must be at least 4, got {r}"));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> SphereDim {
        SphereDim::from_n(self.n).expect("validated")
    }

    /// The radial function given by the coefficient list; zero if none.
    pub fn function(&self) -> Result<SphericalFunction, CliError> {
        let terms: Vec<(usize, i64, f64)> = self
            .coefficients
            .iter()
            .flatten()
            .map(|c| (c.degree, c.order, c.value))
            .collect();
        Ok(SphericalFunction::from_terms(self.dim(), self.max_degree, &terms)?)
    }
}
