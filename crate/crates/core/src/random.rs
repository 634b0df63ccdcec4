//! Seeded generators for random operators, states and Bloch vectors.
//!
//! Everything here draws from a caller-owned generator so runs are
//! reproducible from a single integer seed.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::operators::{trace, ComplexMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Complex Ginibre matrix with independent standard normal parts.
pub fn random_complex_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(gaussian(rng), gaussian(rng)))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_complex_matrix(rng, n);
    (&g + g.adjoint()).scale(0.5)
}

/// Full-rank density matrix `G G† / tr(G G†)` (Hilbert–Schmidt measure).
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_complex_matrix(rng, n);
    let w = &g * g.adjoint();
    let tr = trace(&w).re;
    let w = w.unscale(tr);
    (&w + w.adjoint()).scale(0.5)
}

/// Density matrix of rank `rank` drawn from the induced measure.
pub fn random_density_matrix_of_rank<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    rank: usize,
) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, rank, |_, _| C64::new(gaussian(rng), gaussian(rng)));
    let w = &g * g.adjoint();
    let tr = trace(&w).re;
    let w = w.unscale(tr);
    (&w + w.adjoint()).scale(0.5)
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let v = DVector::from_fn(n, |_, _| C64::new(gaussian(rng), gaussian(rng)));
    let v = v.unscale(v.norm());
    &v * v.adjoint()
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of the
/// diagonal of `R` divided out.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let z = random_complex_matrix(rng, n);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Uniform point in the closed unit ball of R³.
pub fn random_ball_point<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let p: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return p;
        }
    }
}

/// Uniform point on the unit sphere S².
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let p: [f64; 3] = std::array::from_fn(|_| gaussian(rng));
        let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            return p.map(|x| x / n);
        }
    }
}

/// Random probability vector (normalized exponential variates).
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// Random complete family of projectors: a Haar-rotated split of `C^n` into
/// consecutive blocks of the given sizes.
pub fn random_sector_projectors<R: Rng + ?Sized>(
    rng: &mut R,
    block_sizes: &[usize],
) -> Vec<ComplexMatrix> {
    let n: usize = block_sizes.iter().sum();
    let u = haar_unitary(rng, n);
    let mut out = Vec::with_capacity(block_sizes.len());
    let mut start = 0;
    for &size in block_sizes {
        let cols = u.columns(start, size).into_owned();
        let p = &cols * cols.adjoint();
        out.push((&p + p.adjoint()).scale(0.5));
        start += size;
    }
    out
}
