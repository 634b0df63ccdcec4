//! The quantum state space: density operators, the Bloch-ball chart of the
//! qubit, pure-state decompositions and the classical simplex they are
//! contrasted with.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::{
    self, hermitian_eig, hs_norm, pauli, real, symmetrize, trace, unitarity_defect, ComplexMatrix,
    OperatorError,
};

/// Positivity tolerance: smallest admissible eigenvalue is `-PSD_TOL`.
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Slack on the Bloch-ball radius.
pub const BALL_TOL: f64 = 1e-12;
/// Eigenvalues at or below this are dropped from decompositions.
pub const DROP_TOL: f64 = 1e-12;
pub const RANK_ONE_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("operator is not positive: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace {trace} differs from 1")]
    BadTrace { trace: C64 },
    #[error("Bloch vector of length {norm} lies outside the unit ball")]
    OutsideBall { norm: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not unitary: ‖U†U − I‖₂ = {defect:.3e}")]
    NotUnitary { defect: f64 },
    #[error("invalid weights: {0}")]
    BadWeights(String),
    #[error("invalid probability distribution: {0}")]
    BadDistribution(String),
}

/// A statistical operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, StateError> {
        let matrix = symmetrize(&matrix)?;
        let tr = trace(&matrix);
        if (tr - real(1.0)).norm() > TRACE_TOL {
            return Err(StateError::BadTrace { trace: tr });
        }
        let eig = hermitian_eig(&matrix)?;
        let min_eigenvalue = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min_eigenvalue < -PSD_TOL {
            return Err(StateError::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`, positive by construction.
    pub fn from_pure_vector(psi: &DVector<C64>) -> Self {
        let psi = psi.unscale(psi.norm());
        let m = &psi * psi.adjoint();
        Self {
            matrix: (&m + m.adjoint()).scale(0.5),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix)
            .map(|e| e.eigenvalues)
            .expect("density operators are Hermitian")
    }

    pub fn purity(&self) -> f64 {
        trace(&(&self.matrix * &self.matrix)).re
    }

    pub fn is_rank_one(&self) -> bool {
        self.spectrum().get(1).is_none_or(|&l| l < RANK_ONE_TOL)
    }
}

/// Polarization vector in the closed unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(p: [f64; 3]) -> Result<Self, StateError> {
        let norm = norm3(&p);
        if !norm.is_finite() || norm > 1.0 + BALL_TOL {
            return Err(StateError::OutsideBall { norm });
        }
        Ok(Self(p))
    }

    pub fn origin() -> Self {
        Self([0.0; 3])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm3(&self.0)
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        norm3(&[
            self.0[0] - other.0[0],
            self.0[1] - other.0[1],
            self.0[2] - other.0[2],
        ])
    }
}

pub(crate) fn norm3(p: &[f64; 3]) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

/// `½(1 + σ·p)`.
pub fn bloch_to_density(p: &BlochVector) -> DensityOperator {
    let sigma = pauli();
    let mut m = ComplexMatrix::identity(2, 2);
    for (s, &pk) in sigma.iter().zip(p.0.iter()) {
        m += s.scale(pk);
    }
    DensityOperator {
        matrix: m.scale(0.5),
    }
}

/// `pₖ = tr(ρ σₖ)`.
pub fn density_to_bloch(rho: &DensityOperator) -> Result<BlochVector, StateError> {
    if rho.dim() != 2 {
        return Err(StateError::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let sigma = pauli();
    let p = std::array::from_fn(|k| trace(&(rho.matrix() * &sigma[k])).re);
    BlochVector::new(p)
}

/// Trace norm of the difference `‖ρ₁ − ρ₂‖₁`.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64, StateError> {
    if a.dim() != b.dim() {
        return Err(StateError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(operators::trace_norm(&(a.matrix() - b.matrix()))?)
}

/// A convex combination of rank-one projectors.
#[derive(Debug, Clone)]
pub struct PureStateDecomposition {
    pub weights: Vec<f64>,
    pub projectors: Vec<DensityOperator>,
}

impl PureStateDecomposition {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.projectors.first().map_or(0, |p| p.dim());
        self.weights
            .iter()
            .zip(&self.projectors)
            .fold(ComplexMatrix::zeros(n, n), |acc, (w, p)| {
                acc + p.matrix().scale(*w)
            })
    }

    /// `‖Σ wᵢPᵢ − W‖₂`.
    pub fn reconstruction_error(&self, w: &DensityOperator) -> f64 {
        hs_norm(&(self.reconstruct() - w.matrix()))
    }

    /// For each projector, the trace distance to the nearest projector of
    /// `other`.
    pub fn distances_to(&self, other: &PureStateDecomposition) -> Vec<f64> {
        self.projectors
            .iter()
            .map(|p| {
                other
                    .projectors
                    .iter()
                    .map(|q| trace_distance(p, q).expect("same dimension"))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }
}

struct SpectralData {
    weights: Vec<f64>,
    vectors: Vec<DVector<C64>>,
}

fn spectral_data(w: &DensityOperator) -> SpectralData {
    let eig = hermitian_eig(w.matrix()).expect("density operators are Hermitian");
    let mut weights = Vec::new();
    let mut vectors = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > DROP_TOL {
            weights.push(lambda);
            vectors.push(eig.eigenvectors.column(k).into_owned());
        }
    }
    SpectralData { weights, vectors }
}

/// Eigenvalues (descending) with their eigenprojectors.
pub fn spectral_decomposition(w: &DensityOperator) -> PureStateDecomposition {
    let data = spectral_data(w);
    PureStateDecomposition {
        projectors: data
            .vectors
            .iter()
            .map(DensityOperator::from_pure_vector)
            .collect(),
        weights: data.weights,
    }
}

/// Decomposition built from `ψ̃ᵢ = Σⱼ Uᵢⱼ √λⱼ φⱼ` over the spectral data
/// `(λⱼ, φⱼ)` of `W`. Only the first `rank(W)` columns of `U` enter; every
/// unitary yields a valid decomposition.
pub fn alternate_decomposition(
    w: &DensityOperator,
    u: &ComplexMatrix,
) -> Result<PureStateDecomposition, StateError> {
    operators::check_square(u)?;
    let defect = unitarity_defect(u);
    if defect > UNITARY_TOL {
        return Err(StateError::NotUnitary { defect });
    }
    let data = spectral_data(w);
    let rank = data.weights.len();
    if u.nrows() < rank {
        return Err(StateError::DimensionMismatch {
            expected: rank,
            found: u.nrows(),
        });
    }
    let mut weights = Vec::new();
    let mut projectors = Vec::new();
    for i in 0..u.nrows() {
        let mut psi = DVector::<C64>::zeros(w.dim());
        for (j, (lambda, phi)) in data.weights.iter().zip(&data.vectors).enumerate() {
            psi.axpy(u[(i, j)] * lambda.sqrt(), phi, real(1.0));
        }
        let weight = psi.norm_squared();
        if weight > DROP_TOL {
            weights.push(weight);
            projectors.push(DensityOperator::from_pure_vector(&psi));
        }
    }
    Ok(PureStateDecomposition {
        weights,
        projectors,
    })
}

/// Convex combination `Σ λᵢ ρᵢ`.
pub fn mix(states: &[DensityOperator], weights: &[f64]) -> Result<DensityOperator, StateError> {
    if states.len() != weights.len() || states.is_empty() {
        return Err(StateError::BadWeights(format!(
            "{} states but {} weights",
            states.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(StateError::BadWeights(format!("weight {w} is negative")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > TRACE_TOL {
        return Err(StateError::BadWeights(format!("weights sum to {total}")));
    }
    let dim = states[0].dim();
    if let Some(s) = states.iter().find(|s| s.dim() != dim) {
        return Err(StateError::DimensionMismatch {
            expected: dim,
            found: s.dim(),
        });
    }
    let m = states
        .iter()
        .zip(weights)
        .fold(ComplexMatrix::zeros(dim, dim), |acc, (s, w)| {
            acc + s.matrix().scale(*w)
        });
    DensityOperator::new(m)
}

/// A probability vector on a finite sample space: a point of the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalDistribution(Vec<f64>);

impl ClassicalDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self, StateError> {
        if probabilities.is_empty() {
            return Err(StateError::BadDistribution("empty".into()));
        }
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(StateError::BadDistribution("negative entry".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(StateError::BadDistribution(format!("sums to {total}")));
        }
        Ok(Self(probabilities))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }
}

/// Barycentric coordinates with respect to the simplex vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexDecomposition {
    pub weights: Vec<f64>,
    pub vertices: Vec<usize>,
}

impl VertexDecomposition {
    pub fn recompose(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for (&w, &v) in self.weights.iter().zip(&self.vertices) {
            out[v] += w;
        }
        out
    }
}

/// The unique decomposition of a classical distribution into point masses.
pub fn classical_decompose(d: &ClassicalDistribution) -> VertexDecomposition {
    let (vertices, weights) =
        d.0.iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(k, p)| (k, *p))
            .unzip();
    VertexDecomposition { weights, vertices }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::diag;
    use crate::random::{haar_unitary, random_ball_point, random_density_matrix, seeded};

    fn bloch(p: [f64; 3]) -> DensityOperator {
        bloch_to_density(&BlochVector::new(p).unwrap())
    }

    #[test]
    fn bloch_chart_examples() {
        assert_eq!(bloch([0.0; 3]).matrix(), &diag(&[0.5, 0.5]));
        assert_eq!(bloch([0.0, 0.0, 1.0]).matrix(), &diag(&[1.0, 0.0]));
        let h = real(0.5);
        assert_eq!(
            bloch([1.0, 0.0, 0.0]).matrix(),
            &ComplexMatrix::from_row_slice(2, 2, &[h, h, h, h])
        );
        assert!(bloch([0.0, 1.0, 0.0]).is_rank_one());
        assert!(!bloch([0.0, 0.5, 0.0]).is_rank_one());
    }

    #[test]
    fn outside_ball_is_rejected() {
        assert!(matches!(
            BlochVector::new([1.0, 0.1, 0.0]),
            Err(StateError::OutsideBall { .. })
        ));
        assert!(BlochVector::new([1.0 + 1e-13, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn density_to_bloch_readout() {
        let p = density_to_bloch(&DensityOperator::maximally_mixed(2)).unwrap();
        assert_eq!(p.components(), [0.0; 3]);
        let rho = DensityOperator::new(diag(&[0.75, 0.25])).unwrap();
        assert_eq!(
            density_to_bloch(&rho).unwrap().components(),
            [0.0, 0.0, 0.5]
        );
        let big = DensityOperator::maximally_mixed(3);
        assert!(matches!(
            density_to_bloch(&big),
            Err(StateError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityOperator::new(diag(&[0.6, 0.6])),
            Err(StateError::BadTrace { .. })
        ));
        assert!(matches!(
            DensityOperator::new(diag(&[1.2, -0.2])),
            Err(StateError::NotPositive { .. })
        ));
        let mut m = diag(&[0.5, 0.5]);
        m[(0, 1)] = real(0.1);
        assert!(matches!(
            DensityOperator::new(m),
            Err(StateError::Operator(OperatorError::NotHermitian { .. }))
        ));
    }

    #[test]
    fn antipodal_states_are_at_distance_two() {
        let d = trace_distance(&bloch([0.0, 0.0, 1.0]), &bloch([0.0, 0.0, -1.0])).unwrap();
        assert!((d - 2.0).abs() < 1e-14);
        let r = bloch([0.1, 0.2, 0.3]);
        assert!(trace_distance(&r, &r).unwrap() < 1e-15);
    }

    #[test]
    fn spectral_decomposition_examples() {
        let w = DensityOperator::new(diag(&[0.3, 0.7])).unwrap();
        let d = spectral_decomposition(&w);
        assert_eq!(d.weights, vec![0.7, 0.3]);
        assert_eq!(d.projectors[0].matrix(), &diag(&[0.0, 1.0]));
        assert_eq!(d.projectors[1].matrix(), &diag(&[1.0, 0.0]));

        let pure = bloch([0.6, 0.0, 0.8]);
        let d = spectral_decomposition(&pure);
        assert_eq!(d.len(), 1);
        assert!((d.weights[0] - 1.0).abs() < 1e-14);

        let mut rng = seeded(9);
        let w = DensityOperator::new(random_density_matrix(&mut rng, 4)).unwrap();
        let d = spectral_decomposition(&w);
        assert!(d.reconstruction_error(&w) < 1e-12);
        assert!(d.projectors.iter().all(DensityOperator::is_rank_one));
    }

    #[test]
    fn identity_unitary_reproduces_spectral_decomposition() {
        let mut rng = seeded(10);
        let w = DensityOperator::new(random_density_matrix(&mut rng, 3)).unwrap();
        let s = spectral_decomposition(&w);
        let a = alternate_decomposition(&w, &ComplexMatrix::identity(3, 3)).unwrap();
        assert_eq!(a.len(), s.len());
        for (x, y) in a.weights.iter().zip(&s.weights) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(a.distances_to(&s).iter().all(|d| *d < 1e-12));
    }

    #[test]
    fn hadamard_splits_maximally_mixed_along_x() {
        let s = real(0.5f64.sqrt());
        let hadamard = ComplexMatrix::from_row_slice(2, 2, &[s, s, s, -s]);
        let d = alternate_decomposition(&DensityOperator::maximally_mixed(2), &hadamard).unwrap();
        assert_eq!(d.len(), 2);
        let plus = bloch([1.0, 0.0, 0.0]);
        let minus = bloch([-1.0, 0.0, 0.0]);
        assert!((d.weights[0] - 0.5).abs() < 1e-15 && (d.weights[1] - 0.5).abs() < 1e-15);
        assert!(trace_distance(&d.projectors[0], &plus).unwrap() < 1e-15);
        assert!(trace_distance(&d.projectors[1], &minus).unwrap() < 1e-15);
    }

    #[test]
    fn random_unitaries_give_new_valid_decompositions() {
        let mut rng = seeded(12);
        let w = DensityOperator::new(random_density_matrix(&mut rng, 4)).unwrap();
        let spectral = spectral_decomposition(&w);
        let u = haar_unitary(&mut rng, 4);
        let d = alternate_decomposition(&w, &u).unwrap();
        assert!(d.reconstruction_error(&w) < 1e-12);
        assert!((d.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(d.projectors.iter().all(DensityOperator::is_rank_one));
        let farthest = d.distances_to(&spectral).into_iter().fold(0.0, f64::max);
        assert!(farthest > 0.1);
    }

    #[test]
    fn alternate_decomposition_errors() {
        let w = DensityOperator::maximally_mixed(2);
        let not_unitary = diag(&[1.0, 0.5]);
        assert!(matches!(
            alternate_decomposition(&w, &not_unitary),
            Err(StateError::NotUnitary { .. })
        ));
        let too_small = ComplexMatrix::identity(1, 1);
        assert!(matches!(
            alternate_decomposition(&w, &too_small),
            Err(StateError::DimensionMismatch { .. })
        ));
        // A larger unitary is fine: the extra rows produce extra terms.
        let mut rng = seeded(1);
        let d = alternate_decomposition(&w, &haar_unitary(&mut rng, 5)).unwrap();
        assert!(d.reconstruction_error(&w) < 1e-12);
    }

    #[test]
    fn mixing() {
        let r = bloch([0.2, -0.3, 0.1]);
        assert!(
            hs_norm(&(mix(std::slice::from_ref(&r), &[1.0]).unwrap().matrix() - r.matrix()))
                < 1e-15
        );
        let up = bloch([0.0, 0.0, 1.0]);
        let down = bloch([0.0, 0.0, -1.0]);
        assert_eq!(
            mix(&[up.clone(), down], &[0.5, 0.5]).unwrap().matrix(),
            &diag(&[0.5, 0.5])
        );
        assert!(matches!(
            mix(std::slice::from_ref(&up), &[0.9]),
            Err(StateError::BadWeights(_))
        ));
        assert!(matches!(
            mix(&[up.clone(), up.clone()], &[1.5, -0.5]),
            Err(StateError::BadWeights(_))
        ));
        assert!(matches!(
            mix(&[up, DensityOperator::maximally_mixed(3)], &[0.5, 0.5]),
            Err(StateError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mixing_is_linear_in_bloch_coordinates() {
        let mut rng = seeded(13);
        for _ in 0..100 {
            let p1 = random_ball_point(&mut rng);
            let p2 = random_ball_point(&mut rng);
            let l = 0.37;
            let mixed = mix(&[bloch(p1), bloch(p2)], &[l, 1.0 - l]).unwrap();
            let direct = bloch(std::array::from_fn(|k| l * p1[k] + (1.0 - l) * p2[k]));
            assert!(hs_norm(&(mixed.matrix() - direct.matrix())) < 1e-13);
        }
    }

    #[test]
    fn classical_decomposition_is_the_identity() {
        let d = ClassicalDistribution::new(vec![1.0, 0.0, 0.0]).unwrap();
        let v = classical_decompose(&d);
        assert_eq!(v.weights, vec![1.0]);
        assert_eq!(v.vertices, vec![0]);
        let d = ClassicalDistribution::new(vec![0.5, 0.5]).unwrap();
        let v = classical_decompose(&d);
        assert_eq!(
            (v.weights.clone(), v.vertices.clone()),
            (vec![0.5, 0.5], vec![0, 1])
        );
        let mut rng = seeded(14);
        let probs = crate::random::random_distribution(&mut rng, 7);
        let d = ClassicalDistribution::new(probs.clone()).unwrap();
        assert_eq!(classical_decompose(&d).recompose(7), probs);
        assert!(ClassicalDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(ClassicalDistribution::new(vec![1.5, -0.5]).is_err());
    }
}
