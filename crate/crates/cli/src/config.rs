//! Pipeline configuration: defaults, overridden by a TOML file, overridden
//! by command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use wirefield_core::pipeline::{LineSource, PipelineConfig};

use crate::error::{Error, Result};
use crate::fsutil::read_to_string;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LineSourceKind {
    Render,
    Synthesize,
}

/// Optional values for every configuration field. The same record is read
/// from the config file (snake_case keys) and from flags (kebab-case).
#[derive(Debug, Clone, Default, PartialEq, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    #[arg(long)]
    pub tau_ray: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub n_junctions: Option<usize>,
    #[arg(long)]
    pub dbscan_eps: Option<f64>,
    #[arg(long)]
    pub dbscan_min_samples: Option<usize>,
    #[arg(long)]
    pub theta_max: Option<f64>,
    #[arg(long)]
    pub d_max: Option<f64>,
    #[arg(long)]
    pub ang_max: Option<f64>,
    #[arg(long)]
    pub perp_max: Option<f64>,
    #[arg(long)]
    pub overlap_min: Option<f64>,
    #[arg(long)]
    pub vis_threshold: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub line_source: Option<LineSourceKind>,
    /// Only with `--line-source synthesize` (default 5).
    #[arg(long)]
    pub duplicates_per_view: Option<usize>,
    /// Only with `--line-source synthesize` (default 0).
    #[arg(long)]
    pub noise_sigma_3d: Option<f64>,
    #[arg(long)]
    pub min_support: Option<usize>,
    #[arg(long)]
    pub refine_steps: Option<usize>,
    #[arg(long)]
    pub fit_max_iters: Option<usize>,
    #[arg(long)]
    pub lsq_max_iters: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub eval_thresholds: Option<Vec<f64>>,
    #[arg(long)]
    pub baseline_tau_px: Option<f64>,
}

const DEFAULT_DUPLICATES: usize = 5;

macro_rules! apply_fields {
    ($src:expr, $dst:expr, $($f:ident),*) => {
        $(if let Some(v) = $src.$f.clone() { $dst.$f = v; })*
    };
}

impl ConfigOverrides {
    /// Sets every field present in `self` on `config`.
    pub fn apply(&self, config: &mut PipelineConfig) {
        apply_fields!(
            self, config, tau_ray, beta, n_samples, n_junctions, dbscan_eps, dbscan_min_samples, theta_max, d_max,
            ang_max, perp_max, overlap_min, vis_threshold, lambda, seed, min_support, refine_steps, fit_max_iters,
            lsq_max_iters, eval_thresholds, baseline_tau_px
        );
        let (dups, sigma) = match config.line_source {
            LineSource::Synthesize {
                duplicates_per_view,
                noise_sigma_3d,
            } => (duplicates_per_view, noise_sigma_3d),
            LineSource::Render => (DEFAULT_DUPLICATES, 0.0),
        };
        let synthesize = LineSource::Synthesize {
            duplicates_per_view: self.duplicates_per_view.unwrap_or(dups),
            noise_sigma_3d: self.noise_sigma_3d.unwrap_or(sigma),
        };
        match self.line_source {
            Some(LineSourceKind::Render) => config.line_source = LineSource::Render,
            Some(LineSourceKind::Synthesize) => config.line_source = synthesize,
            None if matches!(config.line_source, LineSource::Synthesize { .. }) => config.line_source = synthesize,
            None => {}
        }
    }

    pub fn from_toml(path: &Path, text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|span| {
                    let before = &text[..span.start.min(text.len())];
                    let line = before.matches('\n').count() + 1;
                    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                    (line, column)
                })
                .unwrap_or((0, 0));
            Error::Parse {
                path: path.to_path_buf(),
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_toml(path, &read_to_string(path)?)
    }
}

/// Config flags shared by every pipeline subcommand.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ConfigArgs {
    /// TOML file with configuration values; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: ConfigOverrides,
}

impl ConfigArgs {
    /// Defaults, then the config file, then flags; validated.
    pub fn resolve(&self) -> Result<PipelineConfig> {
        let mut config = PipelineConfig::default();
        if let Some(path) = &self.config {
            ConfigOverrides::read(path)?.apply(&mut config);
        }
        self.overrides.apply(&mut config);
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_override_defaults() {
        let file = ConfigOverrides::from_toml(
            Path::new("c.toml"),
            "tau_ray = 3.0\nvis_threshold = 2\nline_source = \"synthesize\"\nnoise_sigma_3d = 0.01\n",
        )
        .unwrap();
        let flags = ConfigOverrides {
            vis_threshold: Some(4),
            ..ConfigOverrides::default()
        };
        let mut c = PipelineConfig::default();
        file.apply(&mut c);
        flags.apply(&mut c);
        assert_eq!(c.tau_ray, 3.0);
        assert_eq!(c.vis_threshold, 4);
        assert_eq!(c.beta, 1e-3);
        assert_eq!(
            c.line_source,
            LineSource::Synthesize {
                duplicates_per_view: 5,
                noise_sigma_3d: 0.01
            }
        );
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = ConfigOverrides::from_toml(Path::new("c.toml"), "beta = 1e-3\ntau = 5.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }
}
