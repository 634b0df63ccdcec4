//! Batch experiments driven by scenario files: parse, run, emit a CSV table
//! and a JSON report.

mod config;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

pub use config::{
    parse_config, parse_matrix, Experiment, FitSettings, InitialState, ScenarioConfig, TimeGrid,
};

use crate::models::{
    apply, asymptotic_map, az_evolve, decoherence_function, spin_bloch_at, ModelError,
};
use crate::operators::OperatorError;
use crate::quadrature::QuadratureOptions;
use crate::random::{haar_unitary, random_density_matrix, seeded};
use crate::states::{
    alternate_decomposition, bloch_to_density, spectral_decomposition, trace_distance, BlochVector,
    DensityOperator, StateError,
};
use crate::superselection::{
    fit_power_law_decay, off_diagonal_norms, sector_probabilities, DecayFit, SectorError,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{key}: {msg}")]
    Validation { key: String, msg: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Sector(#[from] SectorError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("non-finite value in column `{column}` at row {row}")]
    NonFinite { column: String, row: usize },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl ScenarioError {
    /// 1 for malformed or invalid scenarios, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Parse { .. } | ScenarioError::Validation { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

impl Cell {
    pub fn value(self) -> f64 {
        match self {
            Cell::Int(k) => k as f64,
            Cell::Real(x) => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push_reals(&mut self, row: impl IntoIterator<Item = f64>) {
        self.rows.push(row.into_iter().map(Cell::Real).collect());
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k].value()).collect())
    }

    /// Comma-separated, header first, LF line endings, reals with 17
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(k) => k.to_string(),
                    Cell::Real(x) => format!("{x:.16e}"),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn check_finite(&self) -> Result<(), ScenarioError> {
        for (r, row) in self.rows.iter().enumerate() {
            if let Some(k) = row.iter().position(|c| !c.value().is_finite()) {
                return Err(ScenarioError::NonFinite {
                    column: self.columns[k].clone(),
                    row: r,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnSummary {
    pub name: String,
    pub min: f64,
    pub max: f64,
    #[serde(rename = "final")]
    pub last: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub experiment: String,
    pub scenario: BTreeMap<String, String>,
    pub rows: usize,
    pub columns: Vec<ColumnSummary>,
    /// Column the decay fit was run on.
    pub fit_column: Option<String>,
    pub fit: Option<DecayFit>,
    pub fit_error: Option<String>,
    pub wall_time_s: f64,
    pub version: String,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub table: Table,
    pub report: RunReport,
}

/// Runs the experiment. Nothing is written to disk.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput, ScenarioError> {
    let started = Instant::now();
    let (table, fit_column, default_delta) = match cfg.experiment {
        Experiment::ArakiZurek => run_araki_zurek(cfg)?,
        Experiment::Spin => (run_spin(cfg)?, Some("trace_dist"), 1.0),
        Experiment::SpinAsymptotics => (run_spin_asymptotics(cfg)?, Some("trace_dist"), 1.0),
        Experiment::ChiScan => (run_chi_scan(cfg)?, Some("chi_abs"), 1.0),
        Experiment::DecomposeDemo => (run_decompose_demo(cfg)?, None, 1.0),
    };
    table.check_finite()?;

    let mut fit = None;
    let mut fit_error = None;
    if let Some(name) = fit_column {
        let t = table.column("t").expect("time series have a t column");
        let v = table.column(name).expect("fit column exists");
        let samples: Vec<(f64, f64)> = t.into_iter().zip(v).collect();
        match fit_power_law_decay(
            &samples,
            cfg.fit.delta.unwrap_or(default_delta),
            cfg.fit.window,
        ) {
            Ok(f) => fit = Some(f),
            Err(e) => fit_error = Some(e.to_string()),
        }
    }

    let columns = table
        .columns
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let mut values = table.rows.iter().map(|r| r[k].value());
            ColumnSummary {
                name: name.clone(),
                min: values.clone().fold(f64::INFINITY, f64::min),
                max: values.clone().fold(f64::NEG_INFINITY, f64::max),
                last: values.next_back().unwrap_or(f64::NAN),
            }
        })
        .collect();

    let report = RunReport {
        experiment: cfg.experiment.name().to_string(),
        scenario: cfg.entries.clone(),
        rows: table.rows.len(),
        columns,
        fit_column: fit_column.map(str::to_string),
        fit,
        fit_error,
        wall_time_s: started.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok(ScenarioOutput { table, report })
}

fn run_araki_zurek(
    cfg: &ScenarioConfig,
) -> Result<(Table, Option<&'static str>, f64), ScenarioError> {
    let model = cfg.araki_zurek_model()?;
    let rho0 = cfg.initial_state(model.dim())?;
    let k = model.sectors().len();
    let mut names = vec!["t".to_string(), "offdiag_hs".into(), "offdiag_tr".into()];
    names.extend((0..k).map(|m| format!("prob_{m}")));
    if k > 1 {
        names.extend(["chi_re".to_string(), "chi_im".into()]);
    }
    let mut table = Table {
        columns: names,
        rows: Vec::new(),
    };
    for t in cfg.t_grid.points() {
        let rho = az_evolve(&model, &rho0, t)?;
        let norms = off_diagonal_norms(&rho, model.sectors())?;
        let mut row = vec![t, norms.hs, norms.trace];
        row.extend(sector_probabilities(&rho, model.sectors())?);
        if k > 1 {
            let l = model.lambdas();
            let chi = decoherence_function(model.env(), (l[0] - l[1]) * t)?;
            row.extend([chi.re, chi.im]);
        }
        table.push_reals(row);
    }
    let delta = if model.delta().is_finite() {
        model.delta()
    } else {
        1.0
    };
    Ok((table, (k > 1).then_some("offdiag_hs"), delta))
}

fn run_spin(cfg: &ScenarioConfig) -> Result<Table, ScenarioError> {
    let model = cfg.spin_model()?;
    let p = cfg.bloch_state()?;
    let limit = bloch_to_density(&BlochVector::new(apply(
        &asymptotic_map(&model)?,
        p.components(),
    ))?);
    let opts = QuadratureOptions::default();
    let mut table = Table::new(&["t", "px", "py", "pz", "trace_dist"]);
    for t in cfg.t_grid.points() {
        let q = spin_bloch_at(&model, &p, t, &opts)?;
        let d = trace_distance(&bloch_to_density(&BlochVector::new(q)?), &limit)?;
        table.push_reals([t, q[0], q[1], q[2], d]);
    }
    Ok(table)
}

fn run_spin_asymptotics(cfg: &ScenarioConfig) -> Result<Table, ScenarioError> {
    let model = cfg.spin_model()?;
    let p = cfg.bloch_state()?;
    let series = crate::models::spin_asymptotics(&model, &p, &cfg.t_grid.points())?;
    let mut table = Table::new(&["t", "trace_dist"]);
    for (t, d) in series {
        table.push_reals([t, d]);
    }
    Ok(table)
}

fn run_chi_scan(cfg: &ScenarioConfig) -> Result<Table, ScenarioError> {
    let env = cfg.spectral_density()?;
    let mut table = Table::new(&["t", "chi_re", "chi_im", "chi_abs"]);
    for t in cfg.t_grid.points() {
        let chi = decoherence_function(&env, t)?;
        table.push_reals([t, chi.re, chi.im, chi.norm()]);
    }
    Ok(table)
}

/// Decomposition 0 is the spectral one; the others come from seeded Haar
/// unitaries.
fn run_decompose_demo(cfg: &ScenarioConfig) -> Result<Table, ScenarioError> {
    let seed = cfg.seed.expect("validated: seed present");
    let mut rng = seeded(seed);
    let w = match &cfg.state {
        Some(_) => cfg.initial_state(cfg.demo_state_dim())?,
        None => DensityOperator::new(random_density_matrix(&mut rng, cfg.demo_dim))?,
    };
    let spectral = spectral_decomposition(&w);
    let mut table = Table::new(&[
        "decomposition",
        "term",
        "weight",
        "min_spectral_distance",
        "reconstruction_hs",
    ]);
    let mut decompositions = vec![spectral.clone()];
    for _ in 0..cfg.demo_unitaries {
        let u = haar_unitary(&mut rng, w.dim());
        decompositions.push(alternate_decomposition(&w, &u)?);
    }
    for (d, dec) in decompositions.iter().enumerate() {
        let err = dec.reconstruction_error(&w);
        for (term, (weight, dist)) in dec
            .weights
            .iter()
            .zip(dec.distances_to(&spectral))
            .enumerate()
        {
            table.rows.push(vec![
                Cell::Int(d as u64),
                Cell::Int(term as u64),
                Cell::Real(*weight),
                Cell::Real(dist),
                Cell::Real(err),
            ]);
        }
    }
    Ok(table)
}

/// Writes `contents` next to `path` under a temporary name, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), ScenarioError> {
    let io_err = |source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(io_err)?;
    let name = path.file_name().ok_or_else(|| {
        io_err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "not a file path",
        ))
    })?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err)
}

/// Output locations, with `out_dir` replacing the directory part of both.
pub fn output_paths(cfg: &ScenarioConfig, out_dir: Option<&Path>) -> (PathBuf, PathBuf) {
    let relocate = |p: &Path| match out_dir {
        Some(dir) => dir.join(p.file_name().unwrap_or(p.as_os_str())),
        None => p.to_path_buf(),
    };
    (relocate(&cfg.output_csv), relocate(&cfg.output_report))
}

/// Writes the CSV and the pretty-printed JSON report.
pub fn write_outputs(
    output: &ScenarioOutput,
    csv: &Path,
    report: &Path,
) -> Result<(), ScenarioError> {
    write_atomic(csv, output.table.to_csv().as_bytes())?;
    let mut json = serde_json::to_string_pretty(&output.report).expect("report serializes");
    json.push('\n');
    write_atomic(report, json.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> ScenarioOutput {
        run_scenario(&parse_config(text.as_bytes()).unwrap()).unwrap()
    }

    #[test]
    fn araki_zurek_columns() {
        let out = run("experiment = araki_zurek\nt_grid.stop = 3\nt_grid.count = 31\n");
        assert_eq!(
            out.table.columns,
            [
                "t",
                "offdiag_hs",
                "offdiag_tr",
                "prob_0",
                "prob_1",
                "chi_re",
                "chi_im"
            ]
        );
        assert_eq!(out.table.rows.len(), 31);
        let p0 = out.table.column("prob_0").unwrap();
        assert!(p0.iter().all(|p| (p - 0.5).abs() < 1e-12));
    }

    #[test]
    fn spin_asymptotics_report_carries_fit() {
        let out = run("experiment = spin_asymptotics\nt_grid.start = 5\nt_grid.stop = 40\nt_grid.count = 351\n");
        assert_eq!(out.table.columns, ["t", "trace_dist"]);
        let fit = out.report.fit.expect("fit succeeds");
        assert!(fit.gamma > 0.0);
    }

    #[test]
    fn csv_round_trips_doubles() {
        let out = run("experiment = chi_scan\nenv.kind = uniform\nt_grid.count = 7\n");
        let csv = out.table.to_csv();
        assert!(csv.starts_with("t,chi_re,chi_im,chi_abs\n"));
        assert!(!csv.contains('\r'));
        for (line, row) in csv.lines().skip(1).zip(&out.table.rows) {
            let parsed: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            let expected: Vec<f64> = row.iter().map(|c| c.value()).collect();
            assert_eq!(parsed, expected);
        }
        let last = out
            .report
            .columns
            .iter()
            .find(|c| c.name == "chi_abs")
            .unwrap()
            .last;
        assert_eq!(last, *out.table.column("chi_abs").unwrap().last().unwrap());
    }

    #[test]
    fn decompositions_reconstruct_the_state() {
        let out = run("experiment = decompose_demo\nseed = 7\ndemo.dim = 3\ndemo.unitaries = 4\n");
        let errs = out.table.column("reconstruction_hs").unwrap();
        assert!(errs.iter().all(|e| *e < 1e-12));
        let d = out.table.column("decomposition").unwrap();
        assert_eq!(*d.last().unwrap(), 4.0);
    }

    #[test]
    fn exit_codes() {
        let e = parse_config(b"experiment = nope").unwrap_err();
        assert_eq!(e.exit_code(), 1);
        let e = ScenarioError::Model(ModelError::NotDiscrete);
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn atomic_write_replaces_existing_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("out.csv");
        write_atomic(&path, b"first\n").unwrap();
        write_atomic(&path, b"second\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "second\n");
        assert_eq!(fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
