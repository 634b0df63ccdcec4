//! System coupled to the environment through `V_S ⊗ V_E` with `V_S = Σ λₘPₘ`
//! and `[H_S, V_S] = 0`. For a factorizing initial state the reduced
//! dynamics is
//!
//! ```text
//! ρ(t) = e^{−iH_S t} Σ_{m,n} PₘρPₙ e^{iH_S t} χ((λₘ − λₙ) t)
//! ```

use num_complex::Complex64 as C64;

use super::spectral::{decoherence_function, SpectralDensity};
use super::ModelError;
use crate::operators::{self, hs_norm, symmetrize, ComplexMatrix, Propagator};
use crate::states::DensityOperator;
use crate::superselection::SectorStructure;

const COMMUTATOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ArakiZurekModel {
    sectors: SectorStructure,
    lambdas: Vec<f64>,
    h_s: ComplexMatrix,
    env: SpectralDensity,
    delta: f64,
    free: Propagator,
}

impl ArakiZurekModel {
    pub fn new(
        sectors: SectorStructure,
        lambdas: Vec<f64>,
        h_s: ComplexMatrix,
        env: SpectralDensity,
    ) -> Result<Self, ModelError> {
        if lambdas.len() != sectors.len() {
            return Err(ModelError::InvalidModel(format!(
                "{} coupling eigenvalues for {} sectors",
                lambdas.len(),
                sectors.len()
            )));
        }
        if lambdas.iter().any(|l| !l.is_finite()) {
            return Err(ModelError::InvalidModel(
                "coupling eigenvalues must be finite".into(),
            ));
        }
        let h_s = symmetrize(&h_s)?;
        if h_s.nrows() != sectors.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: sectors.dim(),
                found: h_s.nrows(),
            });
        }
        let scale = hs_norm(&h_s).max(1.0);
        for (m, p) in sectors.projectors().iter().enumerate() {
            let defect = hs_norm(&(&h_s * p - p * &h_s));
            if defect > COMMUTATOR_TOL * scale {
                return Err(ModelError::InvalidModel(format!(
                    "H_S does not commute with sector projector {m} (‖[H_S, P]‖₂ = {defect:.3e})"
                )));
            }
        }
        let mut delta = f64::INFINITY;
        for m in 0..lambdas.len() {
            for n in (m + 1)..lambdas.len() {
                delta = delta.min((lambdas[m] - lambdas[n]).abs());
            }
        }
        if delta <= 0.0 {
            return Err(ModelError::InvalidModel(
                "coupling eigenvalues must be distinct".into(),
            ));
        }
        let free = Propagator::new(&h_s)?;
        Ok(Self {
            sectors,
            lambdas,
            h_s,
            env,
            delta,
            free,
        })
    }

    pub fn sectors(&self) -> &SectorStructure {
        &self.sectors
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn h_s(&self) -> &ComplexMatrix {
        &self.h_s
    }

    pub fn env(&self) -> &SpectralDensity {
        &self.env
    }

    /// Smallest eigenvalue gap `min |λₘ − λₙ|`; infinite for one sector.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.sectors.dim()
    }

    /// `V_S = Σ λₘPₘ`.
    pub fn v_s(&self) -> ComplexMatrix {
        let n = self.dim();
        self.sectors
            .projectors()
            .iter()
            .zip(&self.lambdas)
            .fold(ComplexMatrix::zeros(n, n), |acc, (p, l)| acc + p.scale(*l))
    }

    /// Same system, different environment state.
    pub fn with_env(&self, env: SpectralDensity) -> Self {
        Self {
            env,
            ..self.clone()
        }
    }

    /// `χ_{m,n}(t)` for all sector pairs.
    pub fn chi_matrix(&self, env: &SpectralDensity, t: f64) -> Result<Vec<Vec<C64>>, ModelError> {
        let k = self.lambdas.len();
        let mut chi = vec![vec![C64::new(1.0, 0.0); k]; k];
        for m in 0..k {
            for n in (m + 1)..k {
                let z = decoherence_function(env, (self.lambdas[m] - self.lambdas[n]) * t)?;
                chi[m][n] = z;
                chi[n][m] = z.conj();
            }
        }
        Ok(chi)
    }

    /// `Σ_{m,n} PₘAPₙ χ_{m,n}` before the free rotation.
    fn dephase(&self, a: &ComplexMatrix, chi: &[Vec<C64>]) -> ComplexMatrix {
        let n = self.dim();
        let ps = self.sectors.projectors();
        let mut out = ComplexMatrix::zeros(n, n);
        for (m, pm) in ps.iter().enumerate() {
            let left = pm * a;
            for (k, pk) in ps.iter().enumerate() {
                out += (&left * pk) * chi[m][k];
            }
        }
        out
    }

    fn rotate(&self, a: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let u = self.free.at(t);
        &u * a * u.adjoint()
    }

    fn check_dim(&self, found: usize) -> Result<(), ModelError> {
        if found != self.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// Reduced state at time `t` for the initial product state `ρ₀ ⊗ ω`.
pub fn az_evolve(
    model: &ArakiZurekModel,
    rho0: &DensityOperator,
    t: f64,
) -> Result<DensityOperator, ModelError> {
    model.check_dim(rho0.dim())?;
    let chi = model.chi_matrix(&model.env, t)?;
    let out = model.rotate(&model.dephase(rho0.matrix(), &chi), t);
    DensityOperator::new(out).map_err(ModelError::NotAState)
}

/// Initial state `W = Σ_μ ρ_μ ⊗ ω_μ`. The `ρ_μ` are Hermitian but need not be
/// positive; their sum must be a density operator.
#[derive(Debug, Clone)]
pub struct CorrelatedInitialState {
    terms: Vec<(ComplexMatrix, SpectralDensity)>,
}

impl CorrelatedInitialState {
    pub fn new(terms: Vec<(ComplexMatrix, SpectralDensity)>) -> Result<Self, ModelError> {
        let Some(first) = terms.first() else {
            return Err(ModelError::InvalidModel(
                "correlated state has no terms".into(),
            ));
        };
        let dim = operators::check_square(&first.0)?;
        let mut checked = Vec::with_capacity(terms.len());
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (rho, env) in terms {
            let rho = symmetrize(&rho)?;
            if rho.nrows() != dim {
                return Err(ModelError::DimensionMismatch {
                    expected: dim,
                    found: rho.nrows(),
                });
            }
            sum += &rho;
            checked.push((rho, env));
        }
        DensityOperator::new(sum).map_err(ModelError::NotAState)?;
        Ok(Self { terms: checked })
    }

    pub fn terms(&self) -> &[(ComplexMatrix, SpectralDensity)] {
        &self.terms
    }

    /// `ρ = Σ_μ ρ_μ`.
    pub fn reduced(&self) -> DensityOperator {
        let n = self.terms[0].0.nrows();
        let sum = self
            .terms
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, (r, _)| acc + r);
        DensityOperator::new(sum).expect("validated on construction")
    }
}

/// Termwise evolution of a correlated initial state, each `ρ_μ` dephased by
/// its own `χ^{(μ)}`.
pub fn az_evolve_correlated(
    model: &ArakiZurekModel,
    w0: &CorrelatedInitialState,
    t: f64,
) -> Result<DensityOperator, ModelError> {
    model.check_dim(w0.terms[0].0.nrows())?;
    let n = model.dim();
    let mut dephased = ComplexMatrix::zeros(n, n);
    for (rho, env) in &w0.terms {
        let chi = model.chi_matrix(env, t)?;
        dephased += model.dephase(rho, &chi);
    }
    DensityOperator::new(model.rotate(&dephased, t)).map_err(ModelError::NotAState)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{diag, real};
    use crate::random::{random_density_matrix, seeded};
    use crate::superselection::{off_diagonal_norms, sector_probabilities};

    fn dephasing_qubit(h3: f64) -> ArakiZurekModel {
        ArakiZurekModel::new(
            SectorStructure::from_block_sizes(&[1, 1]).unwrap(),
            vec![1.0, -1.0],
            diag(&[h3, -h3]),
            SpectralDensity::gaussian(1.0).unwrap(),
        )
        .unwrap()
    }

    fn three_level() -> ArakiZurekModel {
        let mut h = diag(&[0.3, -0.2, 0.5]);
        h[(1, 2)] = operators::c(0.1, 0.2);
        h[(2, 1)] = operators::c(0.1, -0.2);
        ArakiZurekModel::new(
            SectorStructure::from_block_sizes(&[1, 2]).unwrap(),
            vec![0.5, -0.7],
            h,
            SpectralDensity::uniform(-1.0, 2.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn time_zero_is_identity() {
        let mut rng = seeded(40);
        let model = three_level();
        let rho = DensityOperator::new(random_density_matrix(&mut rng, 3)).unwrap();
        let out = az_evolve(&model, &rho, 0.0).unwrap();
        assert!(hs_norm(&(out.matrix() - rho.matrix())) < 1e-14);
    }

    #[test]
    fn block_diagonal_states_are_stationary() {
        let model = dephasing_qubit(0.8);
        let rho = DensityOperator::new(diag(&[0.3, 0.7])).unwrap();
        for t in [0.5, 3.0, 40.0] {
            let out = az_evolve(&model, &rho, t).unwrap();
            assert!(hs_norm(&(out.matrix() - rho.matrix())) < 1e-14);
        }
    }

    #[test]
    fn gaussian_dephasing_closed_form() {
        let model = dephasing_qubit(0.0);
        let h = real(0.5);
        let rho = DensityOperator::new(ComplexMatrix::from_row_slice(2, 2, &[h, h, h, h])).unwrap();
        for t in [0.25, 0.5, 1.0, 1.7] {
            let out = az_evolve(&model, &rho, t).unwrap();
            let expected = 0.5 * (-2.0 * t * t).exp();
            assert!((out.matrix()[(0, 1)] - real(expected)).norm() < 1e-10);
        }
    }

    #[test]
    fn probabilities_are_conserved_and_coherences_factorize() {
        let mut rng = seeded(41);
        let model = dephasing_qubit(0.6);
        let rho = DensityOperator::new(random_density_matrix(&mut rng, 2)).unwrap();
        let p0 = sector_probabilities(&rho, model.sectors()).unwrap();
        let off0 = off_diagonal_norms(&rho, model.sectors()).unwrap().hs;
        for t in [0.2, 0.9, 2.5] {
            let out = az_evolve(&model, &rho, t).unwrap();
            let p = sector_probabilities(&out, model.sectors()).unwrap();
            for (a, b) in p.iter().zip(&p0) {
                assert!((a - b).abs() < 1e-10);
            }
            let chi = decoherence_function(model.env(), 2.0 * t).unwrap().norm();
            let off = off_diagonal_norms(&out, model.sectors()).unwrap().hs;
            assert!((off - chi * off0).abs() < 1e-10);
        }
    }

    #[test]
    fn model_validation() {
        let sectors = SectorStructure::from_block_sizes(&[1, 1]).unwrap();
        let env = SpectralDensity::gaussian(1.0).unwrap();
        let err = ArakiZurekModel::new(
            sectors.clone(),
            vec![1.0, 1.0],
            diag(&[0.0, 0.0]),
            env.clone(),
        );
        assert!(matches!(err, Err(ModelError::InvalidModel(_))));
        let sx = operators::pauli()[0].clone();
        let err = ArakiZurekModel::new(sectors.clone(), vec![1.0, -1.0], sx, env.clone());
        assert!(matches!(err, Err(ModelError::InvalidModel(_))));
        let err = ArakiZurekModel::new(sectors, vec![1.0], diag(&[0.0, 0.0]), env);
        assert!(matches!(err, Err(ModelError::InvalidModel(_))));
        let model = dephasing_qubit(0.0);
        assert_eq!(model.v_s(), diag(&[1.0, -1.0]));
        assert_eq!(model.delta(), 2.0);
        let rho = DensityOperator::maximally_mixed(3);
        assert!(matches!(
            az_evolve(&model, &rho, 1.0),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_term_correlated_state_reduces_to_product_evolution() {
        let mut rng = seeded(42);
        let model = three_level();
        let rho = random_density_matrix(&mut rng, 3);
        let w0 = CorrelatedInitialState::new(vec![(rho.clone(), model.env().clone())]).unwrap();
        let rho = DensityOperator::new(rho).unwrap();
        for t in [0.0, 0.7, 3.1] {
            let a = az_evolve_correlated(&model, &w0, t).unwrap();
            let b = az_evolve(&model, &rho, t).unwrap();
            assert!(hs_norm(&(a.matrix() - b.matrix())) < 1e-13);
        }
    }

    #[test]
    fn correlated_state_starts_at_its_marginal() {
        let model = dephasing_qubit(0.0);
        let x = ComplexMatrix::from_row_slice(2, 2, &[real(0.0), real(0.1), real(0.1), real(0.0)]);
        let half = diag(&[0.3, 0.2]);
        let w0 = CorrelatedInitialState::new(vec![
            (&half + &x, SpectralDensity::gaussian(1.0).unwrap()),
            (
                &half - &x * real(2.0),
                SpectralDensity::gaussian(0.4).unwrap(),
            ),
        ])
        .unwrap();
        let at_zero = az_evolve_correlated(&model, &w0, 0.0).unwrap();
        assert!(hs_norm(&(at_zero.matrix() - w0.reduced().matrix())) < 1e-15);

        let bad = CorrelatedInitialState::new(vec![(
            diag(&[0.5, 0.6]),
            SpectralDensity::gaussian(1.0).unwrap(),
        )]);
        assert!(matches!(bad, Err(ModelError::NotAState(_))));
    }
}
