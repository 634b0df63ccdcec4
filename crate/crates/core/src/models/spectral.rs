//! Spectral densities of the environment coupling `V_E` and the decoherence
//! function `χ(t) = tr(e^{−iV_E t} ω) = ∫ g(v) e^{−ivt} dv`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::quadrature::{gauss_legendre, integrate, QuadratureOptions};

/// Gaussian densities are integrated over `±GAUSSIAN_CUTOFF · s`.
pub const GAUSSIAN_CUTOFF: f64 = 10.0;
const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityKind {
    /// Centred normal density with standard deviation `s`.
    Gaussian { s: f64 },
    /// Constant density on `[a, b]`.
    Uniform { a: f64, b: f64 },
    /// `exp(−k / (1 − u²))` on `[a, b]`, `u` the affine image of `v` in
    /// `[−1, 1]`: smooth, with every derivative vanishing at the edges.
    Bump { a: f64, b: f64, k: f64 },
    /// Point spectrum `(v, w)`, sorted by `v`.
    Discrete { points: Vec<(f64, f64)> },
}

/// A normalized, nonnegative weight over the spectrum of `V_E`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDensity {
    kind: DensityKind,
    /// Normalization of the bump profile on `[−1, 1]`; 1 for other kinds.
    #[serde(skip)]
    bump_norm: f64,
}

impl SpectralDensity {
    pub fn gaussian(s: f64) -> Result<Self, ModelError> {
        if !(s.is_finite() && s > 0.0) {
            return Err(ModelError::InvalidDensity(format!(
                "gaussian width must be positive, got {s}"
            )));
        }
        Ok(Self {
            kind: DensityKind::Gaussian { s },
            bump_norm: 1.0,
        })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self, ModelError> {
        check_support(a, b)?;
        Ok(Self {
            kind: DensityKind::Uniform { a, b },
            bump_norm: 1.0,
        })
    }

    pub fn bump(a: f64, b: f64, k: f64) -> Result<Self, ModelError> {
        check_support(a, b)?;
        if !(k.is_finite() && k > 0.0) {
            return Err(ModelError::InvalidDensity(format!(
                "bump steepness must be positive, got {k}"
            )));
        }
        let opts = QuadratureOptions {
            abs_tol: 1e-15,
            ..Default::default()
        };
        let [norm] = integrate(|u| [bump_profile(u, k)], -1.0, 1.0, 0.0, &opts)?;
        Ok(Self {
            kind: DensityKind::Bump { a, b, k },
            bump_norm: norm,
        })
    }

    pub fn discrete(points: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        if points.is_empty() {
            return Err(ModelError::InvalidDensity(
                "discrete spectrum has no points".into(),
            ));
        }
        if points
            .iter()
            .any(|(v, w)| !v.is_finite() || !w.is_finite() || *w < 0.0)
        {
            return Err(ModelError::InvalidDensity(
                "discrete weights must be finite and nonnegative".into(),
            ));
        }
        if points.windows(2).any(|p| p[1].0 <= p[0].0) {
            return Err(ModelError::InvalidDensity(
                "discrete points must be sorted and distinct".into(),
            ));
        }
        let total: f64 = points.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(ModelError::InvalidDensity(format!(
                "discrete weights sum to {total}"
            )));
        }
        Ok(Self {
            kind: DensityKind::Discrete { points },
            bump_norm: 1.0,
        })
    }

    pub fn from_kind(kind: DensityKind) -> Result<Self, ModelError> {
        match kind {
            DensityKind::Gaussian { s } => Self::gaussian(s),
            DensityKind::Uniform { a, b } => Self::uniform(a, b),
            DensityKind::Bump { a, b, k } => Self::bump(a, b, k),
            DensityKind::Discrete { points } => Self::discrete(points),
        }
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, DensityKind::Discrete { .. })
    }

    /// Interval carrying the (numerically) entire weight.
    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            DensityKind::Gaussian { s } => (-GAUSSIAN_CUTOFF * s, GAUSSIAN_CUTOFF * s),
            DensityKind::Uniform { a, b } | DensityKind::Bump { a, b, .. } => (*a, *b),
            DensityKind::Discrete { points } => (points[0].0, points[points.len() - 1].0),
        }
    }

    /// Density value at `v`; zero for discrete spectra.
    pub fn density(&self, v: f64) -> f64 {
        match &self.kind {
            DensityKind::Gaussian { s } => (-0.5 * (v / s).powi(2)).exp() / (s * (2.0 * PI).sqrt()),
            DensityKind::Uniform { a, b } => {
                if v >= *a && v <= *b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            DensityKind::Bump { a, b, k } => {
                let half = 0.5 * (b - a);
                let u = (v - 0.5 * (a + b)) / half;
                bump_profile(u, *k) / (self.bump_norm * half)
            }
            DensityKind::Discrete { .. } => 0.0,
        }
    }

    /// `∫ g(v) f(v) dv`, or `Σ wⱼ f(vⱼ)` for a point spectrum.
    ///
    /// `rate` bounds the angular frequency of `f` in `v` (see
    /// [`integrate`]).
    pub fn expectation<const N: usize>(
        &self,
        f: impl Fn(f64) -> [f64; N],
        rate: f64,
        opts: &QuadratureOptions,
    ) -> Result<[f64; N], ModelError> {
        if let DensityKind::Discrete { points } = &self.kind {
            let mut acc = [0.0; N];
            for &(v, w) in points {
                let y = f(v);
                for k in 0..N {
                    acc[k] += w * y[k];
                }
            }
            return Ok(acc);
        }
        let (lo, hi) = self.support();
        Ok(integrate(
            |v| {
                let g = self.density(v);
                let y = f(v);
                y.map(|x| g * x)
            },
            lo,
            hi,
            rate,
            opts,
        )?)
    }

    /// Point spectrum at the `n` Gauss–Legendre nodes of the support with
    /// weights `g(vⱼ) wⱼ`, renormalized to sum to one. A point spectrum is
    /// returned unchanged.
    pub fn discretize(&self, n: usize) -> Result<SpectralDensity, ModelError> {
        if self.is_discrete() {
            return Ok(self.clone());
        }
        if n == 0 {
            return Err(ModelError::InvalidDensity(
                "cannot discretize onto zero points".into(),
            ));
        }
        let (lo, hi) = self.support();
        let (nodes, weights) = gauss_legendre(n);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut points: Vec<(f64, f64)> = nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| {
                let v = mid + half * x;
                (v, self.density(v) * w * half)
            })
            .collect();
        let total: f64 = points.iter().map(|(_, w)| w).sum();
        for p in &mut points {
            p.1 /= total;
        }
        Self::discrete(points)
    }
}

fn check_support(a: f64, b: f64) -> Result<(), ModelError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(ModelError::InvalidDensity(format!(
            "support [{a}, {b}] is empty"
        )));
    }
    Ok(())
}

fn bump_profile(u: f64, k: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-k / (1.0 - u * u)).exp()
    }
}

/// `χ(t) = ∫ g(v) e^{−ivt} dv`.
pub fn decoherence_function(env: &SpectralDensity, t: f64) -> Result<C64, ModelError> {
    decoherence_function_with(env, t, &QuadratureOptions::default())
}

pub fn decoherence_function_with(
    env: &SpectralDensity,
    t: f64,
    opts: &QuadratureOptions,
) -> Result<C64, ModelError> {
    if t == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    if let DensityKind::Discrete { points } = &env.kind {
        return Ok(points
            .iter()
            .map(|&(v, w)| C64::from_polar(w, -v * t))
            .sum());
    }
    let [re, im] = env.expectation(|v| [(v * t).cos(), -(v * t).sin()], t.abs(), opts)?;
    Ok(C64::new(re, im))
}

/// Length `T = 2π / Δ` of the interval on which a point spectrum behaves
/// like a continuum, `Δ` the largest spacing between adjacent points. For an
/// equally spaced lattice this is the exact revival time.
pub fn recurrence_window(env: &SpectralDensity) -> Result<f64, ModelError> {
    let DensityKind::Discrete { points } = &env.kind else {
        return Err(ModelError::NotDiscrete);
    };
    let spacing = points
        .windows(2)
        .map(|p| p[1].0 - p[0].0)
        .fold(0.0_f64, f64::max);
    if spacing == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * PI / spacing)
}
