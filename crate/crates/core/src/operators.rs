//! Dense complex operator substrate: Hermitian eigendecomposition, unitary
//! propagators, Schatten norms, Kronecker products and the partial trace over
//! the environment factor.
//!
//! All composite spaces use the `system ⊗ environment` ordering, i.e. the
//! joint basis index is `i_s * dim_e + i_e`.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Square dense complex matrix. Every operator in the crate is square.
pub type ComplexMatrix = DMatrix<C64>;

/// Largest matrix dimension the dense routines accept.
pub const MAX_DIM: usize = 1024;

/// Relative Hermiticity tolerance, measured in Hilbert–Schmidt norm.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative gap below which adjacent eigenvalues are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("matrix is not Hermitian: ‖M − M†‖₂ = {defect:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { defect: f64, tolerance: f64 },
    #[error("eigensolver did not converge")]
    ConvergenceFailure,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} exceeds the supported maximum of {MAX_DIM}")]
    DimensionTooLarge(usize),
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Pauli matrices σ₁, σ₂, σ₃.
pub fn pauli() -> [ComplexMatrix; 3] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        ComplexMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        ComplexMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        ComplexMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// Builds a square matrix from real diagonal entries.
pub fn diag(entries: &[f64]) -> ComplexMatrix {
    let n = entries.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (k, &x) in entries.iter().enumerate() {
        m[(k, k)] = real(x);
    }
    m
}

/// Hilbert–Schmidt (Frobenius) norm.
pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.norm()
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diagonal().iter().sum()
}

pub(crate) fn check_square(a: &ComplexMatrix) -> Result<usize, OperatorError> {
    if a.nrows() != a.ncols() {
        return Err(OperatorError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(OperatorError::NonFinite);
    }
    Ok(a.nrows())
}

/// Returns the Hermitian part `(M + M†)/2` when `M` is Hermitian within the
/// relative tolerance.
pub fn symmetrize(m: &ComplexMatrix) -> Result<ComplexMatrix, OperatorError> {
    check_square(m)?;
    let scale = hs_norm(m);
    let defect = hs_norm(&(m - m.adjoint()));
    let tolerance = HERMITIAN_TOL * scale;
    if defect > tolerance {
        return Err(OperatorError::NotHermitian { defect, tolerance });
    }
    Ok((m + m.adjoint()).scale(0.5))
}

pub fn is_hermitian(m: &ComplexMatrix) -> bool {
    symmetrize(m).is_ok()
}

/// Spectral data of a Hermitian matrix.
///
/// Eigenvalues are sorted in descending order and `eigenvectors` holds the
/// matching orthonormal eigenvectors as columns. Every eigenvector is phase
/// fixed so that its first non-negligible component is real and positive;
/// inside a degenerate group vectors are ordered by the index of that
/// component, then by its magnitude (descending).
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(f(λ)) U†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let z = f(lambda);
            scaled.column_mut(k).scale_mut_complex(z);
        }
        scaled * u.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(real)
    }
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, z: C64);
}

impl<S> ScaleComplex for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, z: C64) {
        for x in self.iter_mut() {
            *x *= z;
        }
    }
}

fn leading_component(v: nalgebra::DVectorView<'_, C64>) -> (usize, C64) {
    let cutoff = 1e-12 * v.norm();
    v.iter()
        .enumerate()
        .find(|(_, z)| z.norm() > cutoff)
        .map(|(k, z)| (k, *z))
        .unwrap_or((0, C64::new(0.0, 0.0)))
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig, OperatorError> {
    let n = check_square(m)?;
    if n > MAX_DIM {
        return Err(OperatorError::DimensionTooLarge(n));
    }
    let h = symmetrize(m)?;
    let raw = SymmetricEigen::try_new(h, EIG_EPS, EIG_MAX_ITER)
        .ok_or(OperatorError::ConvergenceFailure)?;

    // Phase fix each eigenvector.
    let mut vectors = raw.eigenvectors;
    let mut leads = Vec::with_capacity(n);
    for k in 0..n {
        let (idx, z) = leading_component(vectors.column(k));
        if z.norm() > 0.0 {
            let phase = z.conj() / z.norm();
            vectors.column_mut(k).scale_mut_complex(phase);
        }
        leads.push((idx, z.norm()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw.eigenvalues[b].total_cmp(&raw.eigenvalues[a]));

    // Reorder within degenerate groups.
    let scale = raw.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let gap = DEGENERACY_TOL * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && raw.eigenvalues[order[end - 1]] - raw.eigenvalues[order[end]] < gap {
            end += 1;
        }
        order[start..end].sort_by(|&a, &b| {
            leads[a]
                .0
                .cmp(&leads[b].0)
                .then(leads[b].1.total_cmp(&leads[a].1))
        });
        start = end;
    }

    let eigenvalues = order.iter().map(|&k| raw.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Time evolution generated by a fixed Hermitian Hamiltonian.
///
/// The eigendecomposition is computed once; `exp(−iHt)` is then assembled
/// for any `t` without repeating it.
#[derive(Debug, Clone)]
pub struct Propagator {
    eig: HermitianEig,
}

impl Propagator {
    pub fn new(hamiltonian: &ComplexMatrix) -> Result<Self, OperatorError> {
        Ok(Self {
            eig: hermitian_eig(hamiltonian)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn spectrum(&self) -> &HermitianEig {
        &self.eig
    }

    /// `exp(−iHt)`.
    pub fn at(&self, t: f64) -> ComplexMatrix {
        self.eig
            .apply_fn(|lambda| C64::from_polar(1.0, -lambda * t))
    }

    /// Prepares `W` for repeated conjugation `U(t) W U(t)†`.
    pub fn orbit(&self, w: &ComplexMatrix) -> Result<StateOrbit, OperatorError> {
        let n = check_square(w)?;
        if n != self.dim() {
            return Err(OperatorError::DimensionMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        let v = &self.eig.eigenvectors;
        Ok(StateOrbit {
            eig: self.eig.clone(),
            rotated: v.adjoint() * w * v,
        })
    }
}

/// The orbit `t ↦ U(t) W U(t)†` of a fixed operator, evaluated in the
/// Hamiltonian eigenbasis.
#[derive(Debug, Clone)]
pub struct StateOrbit {
    eig: HermitianEig,
    rotated: ComplexMatrix,
}

impl StateOrbit {
    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        let lambdas = &self.eig.eigenvalues;
        let phases: Vec<C64> = lambdas
            .iter()
            .map(|&l| C64::from_polar(1.0, -l * t))
            .collect();
        let evolved = ComplexMatrix::from_fn(self.rotated.nrows(), self.rotated.ncols(), |a, b| {
            self.rotated[(a, b)] * phases[a] * phases[b].conj()
        });
        let v = &self.eig.eigenvectors;
        v * evolved * v.adjoint()
    }
}

/// `exp(−iHt)` for Hermitian `H`.
pub fn propagator(hamiltonian: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, OperatorError> {
    Ok(Propagator::new(hamiltonian)?.at(t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchattenNorms {
    /// Largest singular value.
    pub op: f64,
    /// Hilbert–Schmidt norm, `sqrt(Σ sᵢ²)`.
    pub hs: f64,
    /// Trace norm, `Σ sᵢ`.
    pub trace: f64,
}

pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>, OperatorError> {
    check_square(a)?;
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let svd = SVD::try_new(a.clone(), false, false, EIG_EPS, EIG_MAX_ITER)
        .ok_or(OperatorError::ConvergenceFailure)?;
    Ok(svd.singular_values.iter().copied().collect())
}

pub fn schatten_norms(a: &ComplexMatrix) -> Result<SchattenNorms, OperatorError> {
    let s = singular_values(a)?;
    Ok(SchattenNorms {
        op: s.iter().fold(0.0, |m: f64, &x| m.max(x)),
        hs: s.iter().map(|x| x * x).sum::<f64>().sqrt(),
        trace: s.iter().sum(),
    })
}

pub fn trace_norm(a: &ComplexMatrix) -> Result<f64, OperatorError> {
    Ok(schatten_norms(a)?.trace)
}

/// Kronecker product `A ⊗ B` (system factor first).
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `tr_E W` for `W` acting on `C^dim_s ⊗ C^dim_e`.
pub fn partial_trace_env(
    w: &ComplexMatrix,
    dim_s: usize,
    dim_e: usize,
) -> Result<ComplexMatrix, OperatorError> {
    let n = check_square(w)?;
    if n != dim_s * dim_e {
        return Err(OperatorError::DimensionMismatch {
            expected: dim_s * dim_e,
            found: n,
        });
    }
    Ok(ComplexMatrix::from_fn(dim_s, dim_s, |i, j| {
        (0..dim_e).map(|k| w[(i * dim_e + k, j * dim_e + k)]).sum()
    }))
}

/// `‖U†U − I‖₂`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    hs_norm(&(u.adjoint() * u - ComplexMatrix::identity(n, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, seeded};
    use std::f64::consts::PI;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        hs_norm(&(a - b)) < tol
    }

    #[test]
    fn eig_of_diagonal_is_sorted_descending() {
        let e = hermitian_eig(&diag(&[1.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0, 1.0]);
        let swap =
            ComplexMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        assert!(close(&e.eigenvectors, &swap, 1e-15));
    }

    #[test]
    fn eig_of_pauli_x() {
        let e = hermitian_eig(&pauli()[0]).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-15);
        // Phase convention: leading component real positive.
        for k in 0..2 {
            let z = e.eigenvectors[(0, k)];
            assert!(z.im.abs() < 1e-15 && z.re > 0.0);
        }
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = seeded(11);
        for &n in &[1, 2, 8, 33, 64] {
            let m = random_hermitian(&mut rng, n);
            let e = hermitian_eig(&m).unwrap();
            assert!(hs_norm(&(e.reconstruct() - &m)) < 1e-12 * hs_norm(&m));
            assert!(unitarity_defect(&e.eigenvectors) < 1e-12);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn degenerate_groups_are_ordered_deterministically() {
        let e = hermitian_eig(&diag(&[0.5, 0.5, 0.5])).unwrap();
        assert!(close(
            &e.eigenvectors,
            &ComplexMatrix::identity(3, 3),
            1e-15
        ));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(0.0), real(0.0)]);
        assert!(matches!(
            hermitian_eig(&m),
            Err(OperatorError::NotHermitian { .. })
        ));
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eig(&m),
            Err(OperatorError::NotSquare { .. })
        ));
        let mut m = diag(&[1.0, 1.0]);
        m[(0, 0)] = real(f64::NAN);
        assert_eq!(hermitian_eig(&m).unwrap_err(), OperatorError::NonFinite);
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let mut rng = seeded(3);
        let h = random_hermitian(&mut rng, 5);
        assert!(close(
            &propagator(&h, 0.0).unwrap(),
            &ComplexMatrix::identity(5, 5),
            1e-14
        ));
    }

    #[test]
    fn propagator_of_sigma_z() {
        let u = propagator(&pauli()[2], PI / 2.0).unwrap();
        let expected =
            ComplexMatrix::from_row_slice(2, 2, &[c(0.0, -1.0), real(0.0), real(0.0), c(0.0, 1.0)]);
        assert!(close(&u, &expected, 1e-15));
    }

    #[test]
    fn propagator_is_unitary_and_a_group() {
        let mut rng = seeded(5);
        let h = random_hermitian(&mut rng, 12);
        let p = Propagator::new(&h).unwrap();
        assert!(unitarity_defect(&p.at(1.3)) < 1e-12);
        assert!(close(&(p.at(0.7) * p.at(-1.9)), &p.at(-1.2), 1e-11));
    }

    #[test]
    fn orbit_matches_direct_conjugation() {
        let mut rng = seeded(8);
        let h = random_hermitian(&mut rng, 6);
        let w = random_hermitian(&mut rng, 6);
        let p = Propagator::new(&h).unwrap();
        let u = p.at(2.1);
        let direct = &u * &w * u.adjoint();
        assert!(close(&p.orbit(&w).unwrap().at(2.1), &direct, 1e-12));
    }

    #[test]
    fn schatten_norms_of_simple_cases() {
        let n = schatten_norms(&diag(&[3.0, -4.0])).unwrap();
        assert!((n.op - 4.0).abs() < 1e-14);
        assert!((n.hs - 5.0).abs() < 1e-14);
        assert!((n.trace - 7.0).abs() < 1e-14);
        let half = real(0.5);
        let proj = ComplexMatrix::from_row_slice(2, 2, &[half, half, half, half]);
        let n = schatten_norms(&proj).unwrap();
        for x in [n.op, n.hs, n.trace] {
            assert!((x - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn tensor_product_conventions() {
        let i2 = ComplexMatrix::identity(2, 2);
        let i3 = ComplexMatrix::identity(3, 3);
        assert_eq!(tensor_product(&i2, &i3), ComplexMatrix::identity(6, 6));
        let k = tensor_product(&pauli()[2], &diag(&[2.0, 5.0]));
        assert_eq!(k, diag(&[2.0, 5.0, -2.0, -5.0]));
    }

    #[test]
    fn tensor_mixed_product_identity() {
        let mut rng = seeded(21);
        for _ in 0..10 {
            let [a, b, cc, d] =
                std::array::from_fn(|_| crate::random::random_complex_matrix(&mut rng, 2));
            let lhs = tensor_product(&a, &b) * tensor_product(&cc, &d);
            let rhs = tensor_product(&(&a * &cc), &(&b * &d));
            assert!(close(&lhs, &rhs, 1e-13));
        }
    }

    #[test]
    fn partial_trace_of_product_and_bell_state() {
        let mut rng = seeded(2);
        let rho = crate::random::random_density_matrix(&mut rng, 3);
        let omega = crate::random::random_density_matrix(&mut rng, 4);
        let reduced = partial_trace_env(&tensor_product(&rho, &omega), 3, 4).unwrap();
        assert!(close(&reduced, &rho, 1e-14));

        let s = 0.5f64.sqrt();
        let psi = nalgebra::DVector::from_vec(vec![real(s), real(0.0), real(0.0), real(s)]);
        let w = &psi * psi.adjoint();
        let reduced = partial_trace_env(&w, 2, 2).unwrap();
        assert!(close(&reduced, &diag(&[0.5, 0.5]), 1e-15));
    }

    #[test]
    fn partial_trace_defining_property() {
        let mut rng = seeded(4);
        let w = crate::random::random_complex_matrix(&mut rng, 12);
        let rho = partial_trace_env(&w, 3, 4).unwrap();
        for _ in 0..10 {
            let a = random_hermitian(&mut rng, 3);
            let lhs = trace(&(&rho * &a));
            let rhs = trace(&(&w * tensor_product(&a, &ComplexMatrix::identity(4, 4))));
            assert!((lhs - rhs).norm() < 1e-12);
        }
        assert!((trace(&rho) - trace(&w)).norm() < 1e-12);
        assert!(matches!(
            partial_trace_env(&w, 5, 2),
            Err(OperatorError::DimensionMismatch { .. })
        ));
    }
}
