//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rigged_core::{ModelSpec, OscillatorSpec, SwansonPath, SwansonSpec, Tolerances, VerifyConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ho,
    Swanson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Analytic,
    Exact,
}

impl From<PathKind> for SwansonPath {
    fn from(p: PathKind) -> Self {
        match p {
            PathKind::Analytic => SwansonPath::AnalyticTruncated,
            PathKind::Exact => SwansonPath::SimilarityExact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsFile {
    pub omega: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub z: Option<f64>,
    pub mass: Option<f64>,
    pub hbar: Option<f64>,
    pub ell: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TolerancesFile {
    pub sym: Option<f64>,
    pub pd: Option<f64>,
    pub expansion: Option<f64>,
}

/// On-disk configuration; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<ModelKind>,
    pub params: ParamsFile,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub path: Option<PathKind>,
    pub tolerances: TolerancesFile,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub operand: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Flags shared by every subcommand. Anything set here overrides the
/// config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Truncation dimension.
    #[arg(long = "N", value_name = "N")]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub z: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Reference length; derived from hbar, mass and omega when omitted.
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long, value_enum)]
    pub path: Option<PathKind>,
    #[arg(long = "tol-sym")]
    pub tol_sym: Option<f64>,
    #[arg(long = "tol-pd")]
    pub tol_pd: Option<f64>,
    #[arg(long = "tol-exp")]
    pub tol_exp: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Omit wall-clock timings so reports are byte-reproducible.
    #[arg(long = "no-timings")]
    pub no_timings: bool,
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub n: usize,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub z: f64,
    pub mass: f64,
    pub hbar: f64,
    pub ell: Option<f64>,
    pub path: PathKind,
    pub tolerances: Tolerances,
    pub tol_exp: f64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub timings: bool,
    pub operand: Option<String>,
}

impl RunConfig {
    pub fn resolve(args: &RunArgs, operand: Option<String>) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let p = &file.params;
        let defaults = Tolerances::default();
        let cfg = RunConfig {
            model: args.model.or(file.model).unwrap_or(ModelKind::Ho),
            n: args.n.or(file.n).unwrap_or(8),
            omega: args.omega.or(p.omega).unwrap_or(1.0),
            alpha: args.alpha.or(p.alpha).unwrap_or(0.0),
            beta: args.beta.or(p.beta).unwrap_or(0.0),
            z: args.z.or(p.z).unwrap_or(0.0),
            mass: args.mass.or(p.mass).unwrap_or(1.0),
            hbar: args.hbar.or(p.hbar).unwrap_or(1.0),
            ell: args.ell.or(p.ell),
            path: args.path.or(file.path).unwrap_or(PathKind::Exact),
            tolerances: Tolerances {
                sym: args.tol_sym.or(file.tolerances.sym).unwrap_or(defaults.sym),
                pd: args.tol_pd.or(file.tolerances.pd).unwrap_or(defaults.pd),
            },
            tol_exp: args.tol_exp.or(file.tolerances.expansion).unwrap_or(1e-10),
            seed: args.seed.or(file.seed).unwrap_or(0),
            output: args.output.clone().or(file.output),
            format: args.format.or(file.format).unwrap_or(Format::Json),
            timings: !args.no_timings,
            operand: operand.or(file.operand),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.n < 2 {
            return Err(CliError::Usage(format!("N must be >= 2, got {}", self.n)));
        }
        for (name, v) in [
            ("tol-sym", self.tolerances.sym),
            ("tol-pd", self.tolerances.pd),
            ("tol-exp", self.tol_exp),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        if self.model == ModelKind::Ho {
            for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("z", self.z)] {
                if v != 0.0 {
                    return Err(CliError::Usage(format!(
                        "{name} applies to the swanson model only"
                    )));
                }
            }
            if self.ell.is_some() {
                return Err(CliError::Usage(
                    "ell applies to the swanson model only".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn model_spec(&self) -> ModelSpec {
        match self.model {
            ModelKind::Ho => ModelSpec::Oscillator(OscillatorSpec {
                omega: self.omega,
                mass: self.mass,
                hbar: self.hbar,
                dim: self.n,
            }),
            ModelKind::Swanson => ModelSpec::Swanson(SwansonSpec {
                omega: self.omega,
                alpha: self.alpha,
                beta: self.beta,
                z: self.z,
                mass: self.mass,
                hbar: self.hbar,
                ell: self.ell,
                dim: self.n,
                path: self.path.into(),
            }),
        }
    }

    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            tolerances: self.tolerances,
            expansion: self.tol_exp,
            seed: self.seed,
            ..VerifyConfig::default()
        }
    }
}
