//! Reference dynamics by brute force: build the joint Hamiltonian on
//! `H_S ⊗ ℂⁿ` with a discretized environment, conjugate `ρ₀ ⊗ ω` by its
//! exponential and trace the environment out. No closed forms are used.

use super::spectral::{DensityKind, SpectralDensity};
use super::{ArakiZurekModel, ModelError, SpinModel};
use crate::operators::{
    diag, partial_trace_env, pauli, tensor_product, ComplexMatrix, Propagator, StateOrbit, MAX_DIM,
};
use crate::states::DensityOperator;

#[derive(Debug, Clone, Copy)]
pub enum OracleModel<'a> {
    Spin(&'a SpinModel),
    ArakiZurek(&'a ArakiZurekModel),
}

impl<'a> From<&'a SpinModel> for OracleModel<'a> {
    fn from(m: &'a SpinModel) -> Self {
        OracleModel::Spin(m)
    }
}

impl<'a> From<&'a ArakiZurekModel> for OracleModel<'a> {
    fn from(m: &'a ArakiZurekModel) -> Self {
        OracleModel::ArakiZurek(m)
    }
}

/// Joint state prepared once, then evaluated at any number of times.
#[derive(Debug, Clone)]
pub struct JointSimulation {
    orbit: StateOrbit,
    dim_s: usize,
    dim_e: usize,
    grid: SpectralDensity,
}

impl JointSimulation {
    pub fn new<'a>(
        model: impl Into<OracleModel<'a>>,
        rho0: &DensityOperator,
        n_grid: usize,
    ) -> Result<Self, ModelError> {
        let model = model.into();
        if n_grid < 2 {
            return Err(ModelError::InvalidModel(format!(
                "oracle grid needs at least 2 points, got {n_grid}"
            )));
        }
        let (dim_s, env) = match model {
            OracleModel::Spin(m) => (2, m.env()),
            OracleModel::ArakiZurek(m) => (m.dim(), m.env()),
        };
        if rho0.dim() != dim_s {
            return Err(ModelError::DimensionMismatch {
                expected: dim_s,
                found: rho0.dim(),
            });
        }
        let grid = env.discretize(n_grid)?;
        let DensityKind::Discrete { points } = grid.kind() else {
            unreachable!("discretize returns a point spectrum");
        };
        let dim_e = points.len();
        if dim_s * dim_e > MAX_DIM {
            return Err(ModelError::DimensionTooLarge(dim_s * dim_e));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ws: Vec<f64> = points.iter().map(|p| p.1).collect();
        let id_s = ComplexMatrix::identity(dim_s, dim_s);
        let id_e = ComplexMatrix::identity(dim_e, dim_e);
        let v_e = diag(&xs);

        let h = match model {
            OracleModel::Spin(m) => {
                let s = pauli();
                let a = m.a();
                let h_s = s[0].scale(a[0]) + s[1].scale(a[1]) + s[2].scale(a[2]);
                let h_e = diag(&xs.iter().map(|x| m.b() * x * x).collect::<Vec<_>>());
                tensor_product(&h_s, &id_e)
                    + tensor_product(&id_s, &h_e)
                    + tensor_product(&s[2].scale(m.lambda()), &v_e)
            }
            OracleModel::ArakiZurek(m) => {
                tensor_product(m.h_s(), &id_e) + tensor_product(&m.v_s(), &v_e)
            }
        };
        let w0 = tensor_product(rho0.matrix(), &diag(&ws));
        let orbit = Propagator::new(&h)?.orbit(&w0)?;
        Ok(Self {
            orbit,
            dim_s,
            dim_e,
            grid,
        })
    }

    /// Environment point spectrum the simulation runs on.
    pub fn grid(&self) -> &SpectralDensity {
        &self.grid
    }

    pub fn reduced_state(&self, t: f64) -> Result<DensityOperator, ModelError> {
        let w = self.orbit.at(t);
        let rho = partial_trace_env(&w, self.dim_s, self.dim_e)?;
        DensityOperator::new(rho).map_err(ModelError::NotAState)
    }
}

/// One-shot form of [`JointSimulation`].
pub fn full_simulation_oracle<'a>(
    model: impl Into<OracleModel<'a>>,
    rho0: &DensityOperator,
    t: f64,
    n_grid: usize,
) -> Result<DensityOperator, ModelError> {
    JointSimulation::new(model, rho0, n_grid)?.reduced_state(t)
}
