//! Scenario files: one `key = value` pair per line, `#` starts a comment.
//!
//! ```text
//! experiment = araki_zurek
//! t_grid.start = 0
//! t_grid.stop = 5
//! t_grid.count = 101
//! env.kind = gaussian
//! env.s = 1
//! model.sectors = 1, 1
//! model.lambdas = 1, -1
//! state.matrix = 0.5, 0.5; 0.5, 0.5
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use super::ScenarioError;
use crate::models::{ArakiZurekModel, DensityKind, SpectralDensity, SpinModel};
use crate::operators::{diag, ComplexMatrix, MAX_DIM};
use crate::states::{bloch_to_density, BlochVector, DensityOperator};
use crate::superselection::SectorStructure;

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "seed",
    "t_grid.start",
    "t_grid.stop",
    "t_grid.count",
    "output.csv",
    "output.report",
    "env.kind",
    "env.s",
    "env.a",
    "env.b",
    "env.k",
    "env.points",
    "env.spacing",
    "env.count",
    "model.sectors",
    "model.lambdas",
    "model.h_s",
    "model.h_s.diag",
    "model.a",
    "model.b",
    "model.lambda",
    "state.bloch",
    "state.matrix",
    "fit.delta",
    "fit.window.start",
    "fit.window.stop",
    "demo.dim",
    "demo.unitaries",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    ArakiZurek,
    Spin,
    SpinAsymptotics,
    ChiScan,
    DecomposeDemo,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::ArakiZurek,
        Experiment::Spin,
        Experiment::SpinAsymptotics,
        Experiment::ChiScan,
        Experiment::DecomposeDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ArakiZurek => "araki_zurek",
            Experiment::Spin => "spin",
            Experiment::SpinAsymptotics => "spin_asymptotics",
            Experiment::ChiScan => "chi_scan",
            Experiment::DecomposeDemo => "decompose_demo",
        }
    }

    fn uses_time_grid(self) -> bool {
        self != Experiment::DecomposeDemo
    }
}

impl FromStr for Experiment {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.stop
                } else {
                    self.start + span * k as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Bloch([f64; 3]),
    Matrix(ComplexMatrix),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitSettings {
    pub delta: Option<f64>,
    pub window: Option<(f64, f64)>,
}

/// A validated scenario with defaults filled in.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub experiment: Experiment,
    pub t_grid: TimeGrid,
    pub seed: Option<u64>,
    pub output_csv: PathBuf,
    pub output_report: PathBuf,
    pub env: DensityKind,
    pub sectors: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub h_s: Option<ComplexMatrix>,
    pub a: [f64; 3],
    pub b: f64,
    pub lambda: f64,
    pub state: Option<InitialState>,
    pub fit: FitSettings,
    pub demo_dim: usize,
    pub demo_unitaries: usize,
    /// Keys exactly as written in the file.
    pub entries: BTreeMap<String, String>,
}

impl ScenarioConfig {
    pub fn spectral_density(&self) -> Result<SpectralDensity, ScenarioError> {
        SpectralDensity::from_kind(self.env.clone()).map_err(|e| invalid("env.kind", e))
    }

    pub fn araki_zurek_model(&self) -> Result<ArakiZurekModel, ScenarioError> {
        let sectors = SectorStructure::from_block_sizes(&self.sectors)
            .map_err(|e| invalid("model.sectors", e))?;
        let dim = sectors.dim();
        let h_s = self
            .h_s
            .clone()
            .unwrap_or_else(|| ComplexMatrix::zeros(dim, dim));
        let key = if self.entries.contains_key("model.h_s.diag") {
            "model.h_s.diag"
        } else {
            "model.h_s"
        };
        if h_s.nrows() != dim {
            return Err(invalid(key, format!("expected a {dim}×{dim} matrix")));
        }
        if self.lambdas.len() != sectors.len() {
            return Err(invalid(
                "model.lambdas",
                format!(
                    "{} values for {} sectors",
                    self.lambdas.len(),
                    sectors.len()
                ),
            ));
        }
        for (i, l) in self.lambdas.iter().enumerate() {
            if self.lambdas[..i].contains(l) {
                return Err(invalid("model.lambdas", "values must be distinct"));
            }
        }
        ArakiZurekModel::new(sectors, self.lambdas.clone(), h_s, self.spectral_density()?)
            .map_err(|e| invalid(key, e))
    }

    pub fn spin_model(&self) -> Result<SpinModel, ScenarioError> {
        SpinModel::new(self.a, self.b, self.lambda, self.spectral_density()?)
            .map_err(|e| invalid("model.b", e))
    }

    /// Initial state for a system of dimension `dim`. Without `state.*` keys
    /// this is the uniform superposition `|ψ⟩ = n^{-1/2} Σ|k⟩`, or `p = e₁`
    /// for the spin.
    pub fn initial_state(&self, dim: usize) -> Result<DensityOperator, ScenarioError> {
        match &self.state {
            Some(InitialState::Bloch(p)) => {
                if dim != 2 {
                    return Err(invalid(
                        "state.bloch",
                        format!("Bloch vectors need a qubit, system has dimension {dim}"),
                    ));
                }
                let p = BlochVector::new(*p).map_err(|e| invalid("state.bloch", e))?;
                Ok(bloch_to_density(&p))
            }
            Some(InitialState::Matrix(m)) => {
                if m.nrows() != dim {
                    return Err(invalid(
                        "state.matrix",
                        format!("expected a {dim}×{dim} matrix"),
                    ));
                }
                DensityOperator::new(m.clone()).map_err(|e| invalid("state.matrix", e))
            }
            None if self.experiment == Experiment::Spin
                || self.experiment == Experiment::SpinAsymptotics =>
            {
                Ok(bloch_to_density(
                    &BlochVector::new([1.0, 0.0, 0.0]).expect("unit vector"),
                ))
            }
            None => Ok(DensityOperator::new(ComplexMatrix::from_element(
                dim,
                dim,
                C64::new(1.0 / dim as f64, 0.0),
            ))
            .expect("uniform superposition")),
        }
    }

    /// Dimension of the state decomposed by `decompose_demo`.
    pub fn demo_state_dim(&self) -> usize {
        match &self.state {
            Some(InitialState::Matrix(m)) => m.nrows(),
            Some(InitialState::Bloch(_)) => 2,
            None => self.demo_dim,
        }
    }

    pub fn bloch_state(&self) -> Result<BlochVector, ScenarioError> {
        let rho = self.initial_state(2)?;
        crate::states::density_to_bloch(&rho).map_err(|e| invalid("state.matrix", e))
    }
}

fn invalid(key: &str, err: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Validation {
        key: key.to_string(),
        msg: err.to_string(),
    }
}

/// Parses and validates a scenario file.
pub fn parse_config(text: &[u8]) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::str::from_utf8(text).map_err(|e| ScenarioError::Parse {
        line: 0,
        msg: format!("not valid UTF-8: {e}"),
    })?;
    let mut entries = BTreeMap::new();
    let mut lines = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ScenarioError::Parse {
                line,
                msg: format!("expected `key = value`, found `{content}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(ScenarioError::Parse {
                line,
                msg: "empty key".into(),
            });
        }
        if !KNOWN_KEYS.contains(&key) {
            return Err(invalid(key, format!("unknown key on line {line}")));
        }
        if let Some(first) = lines.insert(key.to_string(), line) {
            return Err(ScenarioError::Parse {
                line,
                msg: format!("`{key}` already set on line {first}"),
            });
        }
        entries.insert(key.to_string(), value.to_string());
    }
    let cfg = Reader { entries: &entries }.build()?;
    validate(&cfg)?;
    Ok(cfg)
}

struct Reader<'a> {
    entries: &'a BTreeMap<String, String>,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn real(&self, key: &str, default: f64) -> Result<f64, ScenarioError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_real(v).map_err(|m| invalid(key, m)),
        }
    }

    fn opt_real(&self, key: &str) -> Result<Option<f64>, ScenarioError> {
        self.raw(key)
            .map(|v| parse_real(v).map_err(|m| invalid(key, m)))
            .transpose()
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, ScenarioError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| invalid(key, format!("`{v}` is not a non-negative integer"))),
        }
    }

    fn reals(&self, key: &str) -> Result<Option<Vec<f64>>, ScenarioError> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|x| parse_real(x.trim()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()
            .map_err(|m| invalid(key, m))
    }

    fn triple(&self, key: &str, default: [f64; 3]) -> Result<[f64; 3], ScenarioError> {
        match self.reals(key)? {
            None => Ok(default),
            Some(v) => <[f64; 3]>::try_from(v)
                .map_err(|v| invalid(key, format!("expected 3 components, found {}", v.len()))),
        }
    }

    fn matrix(&self, key: &str) -> Result<Option<ComplexMatrix>, ScenarioError> {
        self.raw(key)
            .map(|v| parse_matrix(v).map_err(|m| invalid(key, m)))
            .transpose()
    }

    fn env(&self) -> Result<DensityKind, ScenarioError> {
        let kind = self.raw("env.kind").unwrap_or("gaussian");
        Ok(match kind {
            "gaussian" => DensityKind::Gaussian {
                s: self.real("env.s", 1.0)?,
            },
            "uniform" => DensityKind::Uniform {
                a: self.real("env.a", -1.0)?,
                b: self.real("env.b", 1.0)?,
            },
            "bump" => DensityKind::Bump {
                a: self.real("env.a", -1.0)?,
                b: self.real("env.b", 1.0)?,
                k: self.real("env.k", 1.0)?,
            },
            "discrete" => {
                let raw = self
                    .raw("env.points")
                    .ok_or_else(|| invalid("env.points", "required for a discrete environment"))?;
                DensityKind::Discrete {
                    points: parse_points(raw).map_err(|m| invalid("env.points", m))?,
                }
            }
            "lattice" => {
                let spacing = self.real("env.spacing", 0.1)?;
                let n = self.count("env.count", 64)?;
                if n == 0 {
                    return Err(invalid("env.count", "lattice needs at least one point"));
                }
                let mid = 0.5 * (n - 1) as f64;
                DensityKind::Discrete {
                    points: (0..n)
                        .map(|j| ((j as f64 - mid) * spacing, 1.0 / n as f64))
                        .collect(),
                }
            }
            other => {
                return Err(invalid(
                    "env.kind",
                    format!("unknown environment `{other}`"),
                ))
            }
        })
    }

    fn build(&self) -> Result<ScenarioConfig, ScenarioError> {
        let experiment = match self.raw("experiment") {
            None => return Err(invalid("experiment", "missing")),
            Some(name) => name
                .parse::<Experiment>()
                .map_err(|_| invalid("experiment", format!("unknown experiment `{name}`")))?,
        };
        let t_grid = TimeGrid {
            start: self.real("t_grid.start", 0.0)?,
            stop: self.real("t_grid.stop", 10.0)?,
            count: self.count("t_grid.count", 101)?,
        };
        let seed = match self.raw("seed") {
            None => None,
            Some(v) => Some(
                v.parse::<u64>()
                    .map_err(|_| invalid("seed", format!("`{v}` is not a non-negative integer")))?,
            ),
        };
        let name = experiment.name();
        let output_csv = PathBuf::from(
            self.raw("output.csv")
                .map_or_else(|| format!("{name}.csv"), str::to_string),
        );
        let output_report = PathBuf::from(
            self.raw("output.report")
                .map_or_else(|| format!("{name}.report.json"), str::to_string),
        );

        let sectors = match self.raw("model.sectors") {
            None => vec![1, 1],
            Some(v) => v
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| invalid("model.sectors", "expected block sizes such as `1, 2`"))?,
        };
        let lambdas = match self.reals("model.lambdas")? {
            Some(l) => l,
            None => (0..sectors.len()).map(|k| 1.0 - 2.0 * k as f64).collect(),
        };
        let h_s = match (self.matrix("model.h_s")?, self.reals("model.h_s.diag")?) {
            (Some(_), Some(_)) => {
                return Err(invalid("model.h_s.diag", "conflicts with model.h_s"))
            }
            (Some(m), None) => Some(m),
            (None, Some(d)) => Some(diag(&d)),
            (None, None) => None,
        };
        let state = match (
            self.triple("state.bloch", [0.0; 3]),
            self.matrix("state.matrix")?,
        ) {
            (_, Some(_)) if self.raw("state.bloch").is_some() => {
                return Err(invalid("state.matrix", "conflicts with state.bloch"))
            }
            (_, Some(m)) => Some(InitialState::Matrix(m)),
            (Ok(p), None) if self.raw("state.bloch").is_some() => Some(InitialState::Bloch(p)),
            (Err(e), None) => return Err(e),
            (Ok(_), None) => None,
        };
        let window = match (
            self.opt_real("fit.window.start")?,
            self.opt_real("fit.window.stop")?,
        ) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            (Some(_), None) => {
                return Err(invalid("fit.window.stop", "required with fit.window.start"))
            }
            (None, Some(_)) => {
                return Err(invalid("fit.window.start", "required with fit.window.stop"))
            }
        };

        Ok(ScenarioConfig {
            experiment,
            t_grid,
            seed,
            output_csv,
            output_report,
            env: self.env()?,
            sectors,
            lambdas,
            h_s,
            a: self.triple("model.a", [1.0, 0.0, 2.0])?,
            b: self.real("model.b", 0.3)?,
            lambda: self.real("model.lambda", 1.0)?,
            state,
            fit: FitSettings {
                delta: self.opt_real("fit.delta")?,
                window,
            },
            demo_dim: self.count("demo.dim", 2)?,
            demo_unitaries: self.count("demo.unitaries", 3)?,
            entries: self.entries.clone(),
        })
    }
}

fn validate(cfg: &ScenarioConfig) -> Result<(), ScenarioError> {
    let g = cfg.t_grid;
    if cfg.experiment.uses_time_grid() {
        if g.count < 2 {
            return Err(invalid(
                "t_grid.count",
                format!("need at least 2 time points, got {}", g.count),
            ));
        }
        if g.start < 0.0 {
            return Err(invalid("t_grid.start", "must be non-negative"));
        }
        if g.stop <= g.start {
            return Err(invalid("t_grid.stop", "must exceed t_grid.start"));
        }
    }
    if let Some(d) = cfg.fit.delta {
        if d <= 0.0 {
            return Err(invalid("fit.delta", "must be positive"));
        }
    }
    if let Some((a, b)) = cfg.fit.window {
        if b <= a {
            return Err(invalid("fit.window.stop", "must exceed fit.window.start"));
        }
    }
    cfg.spectral_density()?;
    match cfg.experiment {
        Experiment::ArakiZurek => {
            let model = cfg.araki_zurek_model()?;
            cfg.initial_state(model.dim())?;
        }
        Experiment::ChiScan => {}
        Experiment::Spin | Experiment::SpinAsymptotics => {
            cfg.spin_model()?;
            cfg.bloch_state()?;
        }
        Experiment::DecomposeDemo => {
            if cfg.seed.is_none() {
                return Err(invalid("seed", "required for randomized experiments"));
            }
            let dim = cfg.demo_state_dim();
            if dim == 0 || dim > MAX_DIM {
                return Err(invalid(
                    "demo.dim",
                    format!("dimension must lie in 1..={MAX_DIM}"),
                ));
            }
            cfg.initial_state(dim)?;
        }
    }
    Ok(())
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let z: C64 = compact
        .parse()
        .map_err(|_| format!("`{s}` is not a complex number"))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(z)
}

/// Rows separated by `;`, entries by `,`; entries like `0.5`, `0.1-0.2i`.
pub fn parse_matrix(s: &str) -> Result<ComplexMatrix, String> {
    let rows: Vec<Vec<C64>> = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(parse_complex)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(format!("expected a square matrix with {n} entries per row"));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// `v:w` pairs separated by `,`.
fn parse_points(s: &str) -> Result<Vec<(f64, f64)>, String> {
    s.split(',')
        .map(|pair| {
            let (v, w) = pair
                .split_once(':')
                .ok_or_else(|| format!("expected `v:w`, found `{}`", pair.trim()))?;
            Ok((parse_real(v.trim())?, parse_real(w.trim())?))
        })
        .collect()
}
