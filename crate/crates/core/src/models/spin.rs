//! Spin-½ coupled to a particle on the line:
//! `H = a·σ ⊗ I + I ⊗ b x² + λ σ₃ ⊗ x`.
//!
//! For each environment position `x` the spin precesses about the axis of the
//! local field `h(x) = (a₁, a₂, a₃ + λx)`; the reduced state averages the
//! rotated Bloch vectors over the position density `ω(x, x)`.

use super::spectral::SpectralDensity;
use super::ModelError;
use crate::quadrature::QuadratureOptions;
use crate::states::{bloch_to_density, norm3, trace_distance, BlochVector, DensityOperator};

#[derive(Debug, Clone)]
pub struct SpinModel {
    a: [f64; 3],
    b: f64,
    lambda: f64,
    env: SpectralDensity,
}

impl SpinModel {
    pub fn new(a: [f64; 3], b: f64, lambda: f64, env: SpectralDensity) -> Result<Self, ModelError> {
        if a.iter().any(|x| !x.is_finite()) || !lambda.is_finite() {
            return Err(ModelError::InvalidModel(
                "field and coupling must be finite".into(),
            ));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(ModelError::InvalidModel(format!(
                "environment frequency b must be positive, got {b}"
            )));
        }
        Ok(Self { a, b, lambda, env })
    }

    pub fn a(&self) -> [f64; 3] {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn env(&self) -> &SpectralDensity {
        &self.env
    }

    pub fn with_env(&self, env: SpectralDensity) -> Self {
        Self {
            env,
            ..self.clone()
        }
    }

    /// Largest rate of change of the precession angle per unit time and
    /// unit `x`.
    fn angular_rate(&self) -> f64 {
        2.0 * self.lambda.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationAxis {
    pub n: [f64; 3],
    /// Angular velocity of the Bloch vector, twice the field strength.
    pub omega: f64,
}

/// Axis and angular velocity of the Bloch rotation generated by
/// `exp(−i h(x) t)`. A vanishing field gives `omega = 0` about `e₃`.
pub fn rotation_axis(model: &SpinModel, x: f64) -> RotationAxis {
    let field = [model.a[0], model.a[1], model.a[2] + model.lambda * x];
    let strength = norm3(&field);
    let scale = norm3(&model.a) + (model.lambda * x).abs();
    if strength <= f64::EPSILON * scale || strength == 0.0 {
        return RotationAxis {
            n: [0.0, 0.0, 1.0],
            omega: 0.0,
        };
    }
    RotationAxis {
        n: field.map(|f| f / strength),
        omega: 2.0 * strength,
    }
}

/// Rodrigues rotation of `p` by `angle` about the unit vector `n`.
pub fn rotate(p: [f64; 3], n: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let dot = n[0] * p[0] + n[1] * p[1] + n[2] * p[2];
    let cross = [
        n[1] * p[2] - n[2] * p[1],
        n[2] * p[0] - n[0] * p[2],
        n[0] * p[1] - n[1] * p[0],
    ];
    std::array::from_fn(|k| p[k] * c + cross[k] * s + n[k] * dot * (1.0 - c))
}

/// Bloch vector of the reduced state at time `t`.
pub fn spin_bloch_at(
    model: &SpinModel,
    p: &BlochVector,
    t: f64,
    opts: &QuadratureOptions,
) -> Result<[f64; 3], ModelError> {
    let p = p.components();
    if t == 0.0 {
        return Ok(p);
    }
    model.env.expectation(
        |x| {
            let axis = rotation_axis(model, x);
            rotate(p, axis.n, axis.omega * t)
        },
        model.angular_rate() * t.abs(),
        opts,
    )
}

/// Reduced spin state at time `t` for the initial state `ρ̂(p) ⊗ ω`.
pub fn spin_evolve(
    model: &SpinModel,
    p: &BlochVector,
    t: f64,
) -> Result<DensityOperator, ModelError> {
    spin_evolve_with(model, p, t, &QuadratureOptions::default())
}

pub fn spin_evolve_with(
    model: &SpinModel,
    p: &BlochVector,
    t: f64,
    opts: &QuadratureOptions,
) -> Result<DensityOperator, ModelError> {
    let q = spin_bloch_at(model, p, t, opts)?;
    let q = BlochVector::new(q).map_err(ModelError::NotAState)?;
    Ok(bloch_to_density(&q))
}

/// Symmetric 3×3 matrix acting on Bloch vectors.
pub type Matrix3 = [[f64; 3]; 3];

pub fn apply(m: &Matrix3, p: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| (0..3).map(|j| m[i][j] * p[j]).sum())
}

/// `M = ∫ dx ω(x,x) n(x) n(x)ᵀ`, the long-time average of the rotation
/// about `n(x)`.
pub fn asymptotic_map(model: &SpinModel) -> Result<Matrix3, ModelError> {
    asymptotic_map_with(model, &QuadratureOptions::default())
}

pub fn asymptotic_map_with(
    model: &SpinModel,
    opts: &QuadratureOptions,
) -> Result<Matrix3, ModelError> {
    let [xx, xy, xz, yy, yz, zz] = model.env.expectation(
        |x| {
            let n = rotation_axis(model, x).n;
            [
                n[0] * n[0],
                n[0] * n[1],
                n[0] * n[2],
                n[1] * n[1],
                n[1] * n[2],
                n[2] * n[2],
            ]
        },
        0.0,
        opts,
    )?;
    Ok([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])
}

/// `(t, ‖ρ(t) − ρ̂(Mp)‖₁)` over the grid.
pub fn spin_asymptotics(
    model: &SpinModel,
    p: &BlochVector,
    t_grid: &[f64],
) -> Result<Vec<(f64, f64)>, ModelError> {
    spin_asymptotics_with(model, p, t_grid, &QuadratureOptions::default())
}

pub fn spin_asymptotics_with(
    model: &SpinModel,
    p: &BlochVector,
    t_grid: &[f64],
    opts: &QuadratureOptions,
) -> Result<Vec<(f64, f64)>, ModelError> {
    let m = asymptotic_map_with(model, opts)?;
    let q = BlochVector::new(apply(&m, p.components())).map_err(ModelError::NotAState)?;
    let limit = bloch_to_density(&q);
    t_grid
        .iter()
        .map(|&t| {
            let rho = spin_evolve_with(model, p, t, opts)?;
            let d = trace_distance(&rho, &limit).map_err(ModelError::NotAState)?;
            Ok((t, d))
        })
        .collect()
}
