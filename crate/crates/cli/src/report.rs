//! Report layout and its JSON and CSV renderings.
//!
//! JSON field names `model`, `N`, `omega`, `alpha`, `beta`, `z`, `path`,
//! `checks[].name`, `checks[].value` and `checks[].pass` are frozen. CSV
//! is a flat projection of the tables (checks, scalars, spectrum,
//! multiplicities, coefficients, matrices) into one record type.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rigged_core::spectral::{Coefficient, Multiplicity, SpacingComparison};
use rigged_core::{CheckResult, OperatorMatrix};
use serde::Serialize;

use crate::config::{Format, ModelKind, PathKind, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct TolerancesEcho {
    pub sym: f64,
    pub pd: f64,
    pub expansion: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Scalars {
    #[serde(rename = "Omega")]
    pub omega_big: f64,
    /// Exponent in `η = exp(c x²/ℓ²)`.
    pub c: f64,
    pub inverse_mass: f64,
    pub ell: f64,
    pub cond_eta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub m: usize,
    pub n: usize,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSection {
    /// `biorthogonal` (through the metric) or `general` (direct
    /// eigensolve of the truncated Hamiltonian).
    pub method: &'static str,
    pub levels: Vec<f64>,
    pub max_imaginary: f64,
    pub table: Vec<SpectrumRow>,
    pub multiplicities: Vec<Multiplicity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<SpacingComparison>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionSection {
    pub operand: String,
    pub coefficients: Vec<Coefficient>,
    pub reconstruction_residual: f64,
    pub action_residual: f64,
    pub completeness_residual: f64,
    pub condition_flag: bool,
    pub pass: bool,
}

/// Row-major `[re, im]` pairs.
pub type MatrixExport = Vec<Vec<[f64; 2]>>;

pub fn export_matrix(m: &OperatorMatrix) -> MatrixExport {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| [m.get(i, j).re, m.get(i, j).im])
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub model: ModelKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub z: f64,
    /// `null` for the oscillator.
    pub path: Option<PathKind>,
    pub mass: f64,
    pub hbar: f64,
    pub seed: u64,
    pub tolerances: TolerancesEcho,
    pub scalars: Scalars,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<CheckResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion: Option<ExpansionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<BTreeMap<String, MatrixExport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl Report {
    pub fn new(command: &'static str, cfg: &RunConfig, scalars: Scalars) -> Self {
        Self {
            command,
            model: cfg.model,
            n: cfg.n,
            omega: cfg.omega,
            alpha: cfg.alpha,
            beta: cfg.beta,
            z: cfg.z,
            path: (cfg.model == ModelKind::Swanson).then_some(cfg.path),
            mass: cfg.mass,
            hbar: cfg.hbar,
            seed: cfg.seed,
            tolerances: TolerancesEcho {
                sym: cfg.tolerances.sym,
                pd: cfg.tolerances.pd,
                expansion: cfg.tol_exp,
            },
            scalars,
            pass: None,
            checks: None,
            spectrum: None,
            expansion: None,
            matrices: None,
            timings: None,
        }
    }

    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let mut out =
            serde_json::to_vec_pretty(self).map_err(|e| CliError::Compute(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut put = |row: CsvRow| {
            w.serialize(row)
                .map_err(|e| CliError::Compute(e.to_string()))
        };
        let s = &self.scalars;
        for (name, v) in [
            ("Omega", s.omega_big),
            ("c", s.c),
            ("inverse_mass", s.inverse_mass),
            ("ell", s.ell),
            ("cond_eta", s.cond_eta),
        ] {
            put(CsvRow::new("scalar", name).value(v))?;
        }
        for c in self.checks.iter().flatten() {
            let mut row = CsvRow::new("check", &c.name);
            row.value = c.value;
            row.pass = Some(c.pass);
            put(row)?;
        }
        if let Some(sp) = &self.spectrum {
            for r in &sp.table {
                put(CsvRow::new("spectrum", "")
                    .pair(r.m, r.n)
                    .value(r.eigenvalue))?;
            }
            for m in &sp.multiplicities {
                let mut row = CsvRow::new("multiplicity", "").value(m.eigenvalue);
                row.count = Some(m.count);
                put(row)?;
            }
        }
        if let Some(ex) = &self.expansion {
            for c in &ex.coefficients {
                let mut row = CsvRow::new("coefficient", "").pair(c.m, c.n).value(c.re);
                row.imag = Some(c.im);
                put(row)?;
            }
            for (name, v) in [
                ("reconstruction_residual", ex.reconstruction_residual),
                ("action_residual", ex.action_residual),
                ("completeness_residual", ex.completeness_residual),
            ] {
                let mut row = CsvRow::new("residual", name).value(v);
                row.pass = Some(v <= self.tolerances.expansion);
                put(row)?;
            }
        }
        for (name, m) in self.matrices.iter().flatten() {
            for (i, row) in m.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    let mut r = CsvRow::new("matrix", name).pair(i, j).value(z[0]);
                    r.imag = Some(z[1]);
                    put(r)?;
                }
            }
        }
        for t in self.timings.iter().flatten() {
            put(CsvRow::new("timing", &t.stage).value(t.seconds))?;
        }
        w.into_inner().map_err(|e| CliError::Compute(e.to_string()))
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

#[derive(Debug, Serialize)]
struct CsvRow {
    section: &'static str,
    name: String,
    m: Option<usize>,
    n: Option<usize>,
    value: Option<f64>,
    imag: Option<f64>,
    count: Option<usize>,
    pass: Option<bool>,
}

impl CsvRow {
    fn new(section: &'static str, name: &str) -> Self {
        Self {
            section,
            name: name.to_owned(),
            m: None,
            n: None,
            value: None,
            imag: None,
            count: None,
            pass: None,
        }
    }

    fn pair(mut self, m: usize, n: usize) -> Self {
        self.m = Some(m);
        self.n = Some(n);
        self
    }

    fn value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }
}

/// Writes to `path` through a sibling temporary file, so a reader never
/// sees a partial report.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Usage(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
