//! Solvable decoherence models: the decoherence function, the Araki–Zurek
//! dephasing model, the spin-½ model and a brute-force joint-evolution
//! oracle for both.

mod araki_zurek;
mod oracle;
mod spectral;
mod spin;

use thiserror::Error;

use crate::operators::OperatorError;
use crate::quadrature::QuadratureError;
use crate::states::StateError;
use crate::superselection::SectorError;

pub use araki_zurek::{az_evolve, az_evolve_correlated, ArakiZurekModel, CorrelatedInitialState};
pub use oracle::{full_simulation_oracle, JointSimulation, OracleModel};
pub use spectral::{
    decoherence_function, decoherence_function_with, recurrence_window, DensityKind,
    SpectralDensity, GAUSSIAN_CUTOFF,
};
pub use spin::{
    apply, asymptotic_map, asymptotic_map_with, rotate, rotation_axis, spin_asymptotics,
    spin_asymptotics_with, spin_bloch_at, spin_evolve, spin_evolve_with, Matrix3, RotationAxis,
    SpinModel,
};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid spectral density: {0}")]
    InvalidDensity(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("operation requires a discrete spectral density")]
    NotDiscrete,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("joint dimension {0} exceeds the supported maximum")]
    DimensionTooLarge(usize),
    #[error("result is not a density operator: {0}")]
    NotAState(StateError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Sector(#[from] SectorError),
}
