//! Superselection sectors: complete families of orthogonal projectors, the
//! projection channel `W ↦ Σₘ PₘWPₘ`, the size of the coherences it removes,
//! and the sector probabilities `tr WPₘ`.

mod fit;

pub use fit::{
    fit_power_law_decay, DecayFit, FitError, MIN_ENVELOPE_POINTS, SUPER_POLYNOMIAL_GAMMA,
};

use thiserror::Error;

use crate::operators::{self, hs_norm, trace, ComplexMatrix, OperatorError};
use crate::states::{DensityOperator, StateError};

pub const SECTOR_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SectorError {
    #[error("no projectors given")]
    Empty,
    #[error("{projectors} projectors but {labels} labels")]
    LabelCount { projectors: usize, labels: usize },
    #[error("projector {index} has dimension {found}, expected {expected}")]
    ProjectorDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("projector {index} is not Hermitian")]
    NotHermitian { index: usize },
    #[error("projector {index} is not idempotent: ‖P² − P‖₂ = {defect:.3e}")]
    NotIdempotent { index: usize, defect: f64 },
    #[error("projectors {first} and {second} are not orthogonal: ‖PₘPₙ‖₂ = {defect:.3e}")]
    NotOrthogonal {
        first: usize,
        second: usize,
        defect: f64,
    },
    #[error("projectors are not complete: ‖ΣPₘ − I‖₂ = {defect:.3e}")]
    NotComplete { defect: f64 },
    #[error("state dimension {found} does not match sector dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// A validated, complete family of mutually orthogonal projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorStructure {
    projectors: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

/// Checks idempotence, mutual orthogonality and completeness, in that order.
pub fn validate_sectors(
    projectors: Vec<ComplexMatrix>,
    labels: Vec<String>,
) -> Result<SectorStructure, SectorError> {
    if projectors.is_empty() {
        return Err(SectorError::Empty);
    }
    if projectors.len() != labels.len() {
        return Err(SectorError::LabelCount {
            projectors: projectors.len(),
            labels: labels.len(),
        });
    }
    let dim = operators::check_square(&projectors[0])?;
    for (index, p) in projectors.iter().enumerate() {
        let found = operators::check_square(p)?;
        if found != dim {
            return Err(SectorError::ProjectorDimension {
                index,
                expected: dim,
                found,
            });
        }
        if hs_norm(&(p - p.adjoint())) > SECTOR_TOL {
            return Err(SectorError::NotHermitian { index });
        }
        let defect = hs_norm(&(p * p - p));
        if defect > SECTOR_TOL {
            return Err(SectorError::NotIdempotent { index, defect });
        }
    }
    for m in 0..projectors.len() {
        for n in (m + 1)..projectors.len() {
            let defect = hs_norm(&(&projectors[m] * &projectors[n]));
            if defect > SECTOR_TOL {
                return Err(SectorError::NotOrthogonal {
                    first: m,
                    second: n,
                    defect,
                });
            }
        }
    }
    let sum = projectors
        .iter()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, p| acc + p);
    let defect = hs_norm(&(sum - ComplexMatrix::identity(dim, dim)));
    if defect > SECTOR_TOL {
        return Err(SectorError::NotComplete { defect });
    }
    Ok(SectorStructure { projectors, labels })
}

impl SectorStructure {
    /// Sectors spanned by consecutive computational basis vectors.
    pub fn from_block_sizes(sizes: &[usize]) -> Result<Self, SectorError> {
        let dim: usize = sizes.iter().sum();
        let mut projectors = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &size in sizes {
            let mut p = ComplexMatrix::zeros(dim, dim);
            for k in start..start + size {
                p[(k, k)] = operators::real(1.0);
            }
            projectors.push(p);
            start += size;
        }
        let labels = (0..sizes.len()).map(|k| k.to_string()).collect();
        validate_sectors(projectors, labels)
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    fn check_dim(&self, found: usize) -> Result<(), SectorError> {
        if found != self.dim() {
            return Err(SectorError::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    /// `Σₘ PₘAPₘ` for an arbitrary operator `A`.
    pub fn block_diagonal_part(&self, a: &ComplexMatrix) -> Result<ComplexMatrix, SectorError> {
        self.check_dim(operators::check_square(a)?)?;
        let n = self.dim();
        Ok(self
            .projectors
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, p| acc + p * a * p))
    }

    /// `A − Σₘ PₘAPₘ = Σ_{m≠n} PₘAPₙ`.
    pub fn off_diagonal_part(&self, a: &ComplexMatrix) -> Result<ComplexMatrix, SectorError> {
        Ok(a - self.block_diagonal_part(a)?)
    }
}

/// The projection channel `W ↦ Σₘ PₘWPₘ`.
pub fn sector_project(
    w: &DensityOperator,
    sectors: &SectorStructure,
) -> Result<DensityOperator, SectorError> {
    Ok(DensityOperator::new(
        sectors.block_diagonal_part(w.matrix())?,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffDiagonalNorms {
    pub hs: f64,
    pub trace: f64,
}

/// Hilbert–Schmidt and trace norms of `W − Σₘ PₘWPₘ`.
pub fn off_diagonal_norms(
    w: &DensityOperator,
    sectors: &SectorStructure,
) -> Result<OffDiagonalNorms, SectorError> {
    let off = sectors.off_diagonal_part(w.matrix())?;
    let norms = operators::schatten_norms(&off)?;
    Ok(OffDiagonalNorms {
        hs: norms.hs,
        trace: norms.trace,
    })
}

/// `(tr WPₘ)ₘ`.
pub fn sector_probabilities(
    w: &DensityOperator,
    sectors: &SectorStructure,
) -> Result<Vec<f64>, SectorError> {
    sectors.check_dim(w.dim())?;
    Ok(sectors
        .projectors
        .iter()
        .map(|p| trace(&(w.matrix() * p)).re)
        .collect())
}
