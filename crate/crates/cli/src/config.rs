//! Run configuration: an optional TOML file with command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Settings shared by the subcommands. Every field may come from the config
/// file; flags given on the command line replace file values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub classes: Vec<String>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    /// Model-cost budget in bits; unlimited when absent.
    pub budget: Option<f64>,
    /// Sufficiency tolerance `c` in bits.
    pub c: Option<f64>,
    pub threshold_data: Option<f64>,
    pub threshold_prior: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub n: Option<usize>,
    pub horizon: Option<usize>,
    pub kmax: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
        let mut cfg: Self = toml::from_str(&text)?;
        // Relative paths in the file are relative to the file itself.
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.input, &mut cfg.output, &mut cfg.csv].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Fields set in `flags` win over `self`.
    pub fn overridden_by(self, flags: RunConfig) -> Self {
        Self {
            classes: if flags.classes.is_empty() { self.classes } else { flags.classes },
            input: flags.input.or(self.input),
            output: flags.output.or(self.output),
            csv: flags.csv.or(self.csv),
            budget: flags.budget.or(self.budget),
            c: flags.c.or(self.c),
            threshold_data: flags.threshold_data.or(self.threshold_data),
            threshold_prior: flags.threshold_prior.or(self.threshold_prior),
            seed: flags.seed.or(self.seed),
            trials: flags.trials.or(self.trials),
            n: flags.n.or(self.n),
            horizon: flags.horizon.or(self.horizon),
            kmax: flags.kmax.or(self.kmax),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let tolerances = [("budget", self.budget), ("c", self.c), ("threshold_data", self.threshold_data), ("threshold_prior", self.threshold_prior)];
        for (name, value) in tolerances {
            if let Some(v) = value {
                if v.is_nan() || v < 0.0 {
                    return Err(CliError::Usage(format!("{name} must be >= 0, got {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn input(&self) -> CliResult<&Path> {
        self.input.as_deref().ok_or_else(|| CliError::Usage("missing --in".into()))
    }

    pub fn budget(&self) -> f64 {
        self.budget.unwrap_or(f64::INFINITY)
    }

    /// Stochastic commands refuse to pick a seed on their own.
    pub fn seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| CliError::Usage("--seed is required".into()))
    }
}
