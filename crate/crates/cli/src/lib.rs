//! `rigged`: verification suites, Liouville spectra, operator expansions
//! and matrix export for the oscillator and Swanson models.
//!
//! Exit codes: 0 on success, 1 when a check or residual fails (failing
//! names go to stderr), 2 on usage or configuration errors, including
//! parameter guards such as a non-real Swanson regime.

pub mod config;
pub mod report;

use std::collections::BTreeMap;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rigged_core::spectral::{
    compare_spacing, general_spectrum, multiplicity_histogram, pair_differences,
};
use rigged_core::{
    build_liouville_spectrum, expand_operator, run_checks, solve_quasi_hermitian, swanson_scalars,
    Error, ModelInstance, ModelSpec, OperatorMatrix, SeededRng, C64,
};

use config::{ModelKind, PathKind, RunArgs, RunConfig};
use report::{
    export_matrix, ExpansionSection, Report, Scalars, SpectrumRow, SpectrumSection, Timing,
};

/// Relative tolerance for deciding which level spacing the spectrum follows.
pub const SPACING_TOL: f64 = 1e-4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error("failing checks: {}", .0.join(", "))]
    Checks(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Compute(_) | Self::Checks(_) => 1,
        }
    }
}

/// Parameter and operand problems are configuration errors; anything the
/// numerics refuse afterwards is a run failure.
fn classify(e: Error) -> CliError {
    match e {
        Error::NonRealRegime { .. }
        | Error::EtaPole
        | Error::InvalidMass(_)
        | Error::InvalidParameter(_)
        | Error::DimensionMismatch { .. }
        | Error::NonSquareLength(_)
        | Error::NonFinite => CliError::Usage(e.to_string()),
        _ => CliError::Compute(e.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rigged",
    version,
    about = "Liouville-space checks and spectra for quasi-Hermitian oscillators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the named identity checks; exit 1 if any fails.
    Verify(RunArgs),
    /// Liouville eigenvalue table, multiplicities and spacing comparison.
    Spectrum(RunArgs),
    /// Expand an operand in the Liouville eigenbasis.
    Expand {
        #[command(flatten)]
        args: RunArgs,
        /// `E:m,n`, `random`, or a JSON row-major array of `[re, im]` rows.
        #[arg(long)]
        operand: Option<String>,
    },
    /// Hamiltonian, metric and related matrices as row-major `[re, im]`.
    Export(RunArgs),
}

/// A finished run: the rendered report plus an optional failure to signal
/// after it has been written.
pub struct Outcome {
    pub report: Report,
    pub failure: Option<CliError>,
}

struct Stopwatch {
    enabled: bool,
    last: Instant,
    stages: Vec<Timing>,
}

impl Stopwatch {
    fn new(enabled: bool) -> Self {
        Self {
            enabled,
            last: Instant::now(),
            stages: Vec::new(),
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.stages.push(Timing {
            stage: stage.to_owned(),
            seconds: (now - self.last).as_secs_f64(),
        });
        self.last = now;
    }

    fn finish(self) -> Option<Vec<Timing>> {
        self.enabled.then_some(self.stages)
    }
}

fn build_model(cfg: &RunConfig) -> Result<(ModelSpec, ModelInstance), CliError> {
    let spec = cfg.model_spec();
    spec.validate().map_err(classify)?;
    let inst = spec.instance(&cfg.tolerances).map_err(classify)?;
    Ok((spec, inst))
}

fn scalars(spec: &ModelSpec, inst: &ModelInstance) -> Result<Scalars, CliError> {
    let cond_eta = inst.metric.condition_number();
    Ok(match spec {
        ModelSpec::Oscillator(s) => Scalars {
            omega_big: s.omega,
            c: 0.0,
            inverse_mass: 1.0 / s.mass,
            ell: (s.hbar / (s.mass * s.omega)).sqrt(),
            cond_eta,
        },
        ModelSpec::Swanson(s) => {
            let sc = swanson_scalars(s).map_err(classify)?;
            Scalars {
                omega_big: sc.big_omega,
                c: sc.metric_exponent,
                inverse_mass: sc.inverse_mass,
                ell: s.length(),
                cond_eta,
            }
        }
    })
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut clock = Stopwatch::new(cfg.timings);
    let (spec, inst) = build_model(cfg)?;
    clock.lap("build");
    let mut report = Report::new("verify", cfg, scalars(&spec, &inst)?);
    let checks = run_checks(&inst, &cfg.verify_config());
    for c in &checks {
        clock.stages.push(Timing {
            stage: c.name.clone(),
            seconds: c.seconds,
        });
    }
    clock.lap("checks");
    let failing: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.clone())
        .collect();
    report.pass = Some(failing.is_empty());
    report.checks = Some(checks);
    report.timings = clock.finish();
    Ok(Outcome {
        report,
        failure: (!failing.is_empty()).then_some(CliError::Checks(failing)),
    })
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut clock = Stopwatch::new(cfg.timings);
    let (spec, inst) = build_model(cfg)?;
    clock.lap("build");
    let mut report = Report::new("spectrum", cfg, scalars(&spec, &inst)?);

    // The analytic-truncated metric is only approximately intertwining, so
    // that path is solved directly from the truncated Hamiltonian.
    let direct = cfg.model == ModelKind::Swanson && cfg.path == PathKind::Analytic;
    let (method, levels, max_imaginary, table) = if direct {
        let g = general_spectrum(&inst.hamiltonian).map_err(classify)?;
        let table = pair_differences(&g.values);
        ("general", g.values, g.max_imaginary, table)
    } else {
        let sys = solve_quasi_hermitian(&inst.hamiltonian, &inst.metric, &cfg.tolerances)
            .map_err(classify)?;
        let ls = build_liouville_spectrum(&sys).map_err(classify)?;
        (
            "biorthogonal",
            sys.eigenvalues().to_vec(),
            0.0,
            ls.eigenvalue_table(),
        )
    };
    clock.lap("solve");

    let mut table: Vec<SpectrumRow> = table
        .into_iter()
        .map(|(m, n, eigenvalue)| SpectrumRow { m, n, eigenvalue })
        .collect();
    table.sort_by(|a, b| {
        a.eigenvalue
            .total_cmp(&b.eigenvalue)
            .then((a.m, a.n).cmp(&(b.m, b.n)))
    });
    let scale = levels.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    let values: Vec<f64> = table.iter().map(|r| r.eigenvalue).collect();
    let multiplicities = multiplicity_histogram(&values, 1e-8 * scale);
    let spacing = match &spec {
        ModelSpec::Swanson(s) => Some(compare_spacing(
            &levels,
            (s.dim / 4).max(1),
            s.hbar * s.omega,
            s.hbar * report.scalars.omega_big,
            SPACING_TOL,
        )),
        ModelSpec::Oscillator(_) => None,
    };
    report.spectrum = Some(SpectrumSection {
        method,
        levels,
        max_imaginary,
        table,
        multiplicities,
        spacing,
    });
    report.timings = clock.finish();
    Ok(Outcome {
        report,
        failure: None,
    })
}

/// Parses `E:m,n`, `random`, or a JSON array of rows of `[re, im]`.
pub fn parse_operand(text: &str, dim: usize, seed: u64) -> Result<OperatorMatrix, CliError> {
    let text = text.trim();
    if text == "random" {
        return Ok(SeededRng::new(seed).matrix(dim));
    }
    if let Some(idx) = text.strip_prefix("E:") {
        let parts: Vec<&str> = idx.split(',').map(str::trim).collect();
        let parsed: Result<Vec<usize>, _> = parts.iter().map(|p| p.parse::<usize>()).collect();
        return match parsed.as_deref() {
            Ok([m, n]) if *m < dim && *n < dim => Ok(OperatorMatrix::unit(dim, *m, *n)),
            Ok([_, _]) => Err(CliError::Usage(format!(
                "operand {text} is outside N = {dim}"
            ))),
            _ => Err(CliError::Usage(format!(
                "operand {text} is not of the form E:m,n"
            ))),
        };
    }
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(text)
        .map_err(|e| CliError::Usage(format!("operand is not E:m,n, random or a matrix: {e}")))?;
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::Usage(format!(
            "operand dimension does not match N = {dim}"
        )));
    }
    let entries: Vec<C64> = rows
        .iter()
        .flatten()
        .map(|z| C64::new(z[0], z[1]))
        .collect();
    OperatorMatrix::from_row_major(dim, &entries).map_err(classify)
}

pub fn expand(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut clock = Stopwatch::new(cfg.timings);
    let label = cfg.operand.clone().unwrap_or_else(|| "random".to_owned());
    let operand = parse_operand(&label, cfg.n, cfg.seed)?;
    let (spec, inst) = build_model(cfg)?;
    clock.lap("build");
    let mut report = Report::new("expand", cfg, scalars(&spec, &inst)?);
    let sys = solve_quasi_hermitian(&inst.hamiltonian, &inst.metric, &cfg.tolerances)
        .map_err(classify)?;
    let ls = build_liouville_spectrum(&sys).map_err(classify)?;
    clock.lap("solve");
    let rep = expand_operator(&ls, &operand).map_err(classify)?;
    clock.lap("expand");
    let pass = rep.reconstruction_residual <= cfg.tol_exp
        && rep.action_residual <= cfg.tol_exp
        && rep.completeness_residual <= cfg.tol_exp;
    report.expansion = Some(ExpansionSection {
        operand: label,
        coefficients: rep.coefficients,
        reconstruction_residual: rep.reconstruction_residual,
        action_residual: rep.action_residual,
        completeness_residual: rep.completeness_residual,
        condition_flag: rep.condition_flag,
        pass,
    });
    report.pass = Some(pass);
    report.timings = clock.finish();
    let failure = (!pass).then(|| CliError::Checks(vec!["expansion_residuals".to_owned()]));
    Ok(Outcome { report, failure })
}

pub fn export(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut clock = Stopwatch::new(cfg.timings);
    let (spec, inst) = build_model(cfg)?;
    clock.lap("build");
    let mut report = Report::new("export", cfg, scalars(&spec, &inst)?);
    let mut matrices = BTreeMap::new();
    matrices.insert("hamiltonian".to_owned(), export_matrix(&inst.hamiltonian));
    matrices.insert("eta".to_owned(), export_matrix(inst.metric.eta()));
    matrices.insert("rho".to_owned(), export_matrix(inst.metric.rho()));
    matrices.insert(
        "eta_inverse".to_owned(),
        export_matrix(inst.metric.eta_inv()),
    );
    if let Some(h) = &inst.hermitian_partner {
        matrices.insert("hermitian_partner".to_owned(), export_matrix(h));
    }
    report.matrices = Some(matrices);
    report.timings = clock.finish();
    Ok(Outcome {
        report,
        failure: None,
    })
}

type Handler = fn(&RunConfig) -> Result<Outcome, CliError>;

/// Runs one parsed command, writes its report and returns the exit code.
pub fn run(cli: Cli) -> u8 {
    let (cfg, command): (Result<RunConfig, CliError>, Handler) = match cli.command {
        Command::Verify(a) => (RunConfig::resolve(&a, None), verify),
        Command::Spectrum(a) => (RunConfig::resolve(&a, None), spectrum),
        Command::Expand { args, operand } => (RunConfig::resolve(&args, operand), expand),
        Command::Export(a) => (RunConfig::resolve(&a, None), export),
    };
    let result = cfg.and_then(|cfg| {
        let outcome = command(&cfg)?;
        let bytes = outcome.report.render(cfg.format)?;
        match &cfg.output {
            Some(path) => report::write_atomically(path, &bytes)?,
            None => {
                use std::io::Write;
                std::io::stdout()
                    .write_all(&bytes)
                    .map_err(|e| CliError::Compute(format!("cannot write report: {e}")))?;
            }
        }
        outcome.failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
