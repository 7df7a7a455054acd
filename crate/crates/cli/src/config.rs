//! Run configuration: command-line flags layered over a flat JSON file.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable consulted for the seed when neither the command
/// line nor the config file sets one.
pub const SEED_ENV: &str = "TFACTOR_SEED";

/// Every setting is optional here so a config file can fill the gaps.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigArgs {
    /// Flat JSON object with any of the settings below; flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Vertex count of a generated host graph.
    #[arg(long)]
    pub n: Option<usize>,
    /// Tree order.
    #[arg(long)]
    pub t: Option<usize>,
    /// Quotient size for the bootstrap pipeline.
    #[arg(long)]
    pub tau: Option<usize>,
    /// Edge probability (also the density certified against).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Multiplier on the layout count.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Exact layout count, replacing the formula.
    #[arg(long)]
    pub r_override: Option<usize>,
    /// Layout count for the quotient packing (defaults to --r-override).
    #[arg(long)]
    pub outer_r: Option<usize>,
    /// Ratio at which a side condition is reported as met.
    #[arg(long)]
    pub slack: Option<f64>,
    /// Host edge list; a G(n, p) graph is generated when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Tree file; overrides --tree-shape.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    /// Built-in tree of order t.
    #[arg(long, value_enum)]
    pub tree_shape: Option<TreeShape>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Factor text file to write (pack) or read (verify).
    #[arg(long)]
    pub factors: Option<PathBuf>,
    /// Appearance-count histogram CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Comma-separated layout counts to sweep.
    #[arg(long, value_delimiter = ',')]
    pub sweep_r: Option<Vec<usize>>,
    /// Coverage-versus-r CSV for --sweep-r.
    #[arg(long)]
    pub sweep_csv: Option<PathBuf>,
    /// Certify a random blow-up of the host as well.
    #[arg(long)]
    #[serde(default)]
    pub blowup: bool,
    /// Chernoff mean.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Permutation-bound Lipschitz constant.
    #[arg(long)]
    pub lipschitz: Option<f64>,
    /// Permutation-bound deviation.
    #[arg(long)]
    pub deviation: Option<f64>,
    /// Use n - 1 in the permutation-bound denominator.
    #[arg(long)]
    #[serde(default)]
    pub n_minus_one: bool,
    /// Pair side size for the random-pair matching loss.
    #[arg(long)]
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeShape {
    Path,
    Star,
}

macro_rules! layer {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f; } )*
    };
}

impl ConfigArgs {
    /// Fills every unset flag from the config file, then the seed from the
    /// environment.
    pub fn layered(mut self) -> Result<ConfigArgs, CliError> {
        if let Some(path) = self.config.clone() {
            let file = read_config(&path)?;
            layer!(
                self, file, n, t, tau, p, epsilon, seed, scale, r_override, outer_r, slack, input,
                tree, tree_shape, output, factors, csv, sweep_r, sweep_csv, mu, lipschitz,
                deviation, nu
            );
            self.blowup |= file.blowup;
            self.n_minus_one |= file.n_minus_one;
        }
        if self.seed.is_none() {
            if let Ok(s) = std::env::var(SEED_ENV) {
                let seed = s.trim().parse().map_err(|_| {
                    CliError::Config(format!("{SEED_ENV}={s:?} is not an unsigned integer"))
                })?;
                self.seed = Some(seed);
            }
        }
        Ok(self)
    }

    pub fn require<T: Copy>(v: Option<T>, name: &str) -> Result<T, CliError> {
        v.ok_or_else(|| CliError::Config(format!("--{name} is required")))
    }

    pub fn epsilon(&self) -> Result<f64, CliError> {
        let e = self.epsilon.unwrap_or(0.5);
        if !(e > 0.0 && e < 1.0) {
            return Err(CliError::Config(format!(
                "epsilon must lie in (0, 1), got {e}"
            )));
        }
        Ok(e)
    }

    pub fn p(&self) -> Result<Option<f64>, CliError> {
        match self.p {
            Some(p) if !(0.0..=1.0).contains(&p) => {
                Err(CliError::Config(format!("p must lie in [0, 1], got {p}")))
            }
            p => Ok(p),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn slack(&self) -> Result<f64, CliError> {
        let s = self.slack.unwrap_or(1.0);
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::Config(format!("slack must be positive, got {s}")));
        }
        Ok(s)
    }

    pub fn scale(&self) -> Result<f64, CliError> {
        let s = self.scale.unwrap_or(1.0);
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::Config(format!("scale must be positive, got {s}")));
        }
        Ok(s)
    }
}

fn read_config(path: &Path) -> Result<ConfigArgs, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// The settings a run actually used, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_override: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<String>,
}

impl ResolvedConfig {
    pub fn new(mode: &'static str, seed: u64) -> Self {
        ResolvedConfig {
            mode,
            n: None,
            t: None,
            tau: None,
            p: None,
            epsilon: None,
            seed,
            scale: None,
            r_override: None,
            outer_r: None,
            slack: None,
            input: None,
            tree: None,
        }
    }
}
