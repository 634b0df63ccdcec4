//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export returns a flat `Float64Array` so the page can plot it without
//! any glue beyond the generated bindings.

use wasm_bindgen::prelude::*;

use declab::models::{
    apply, asymptotic_map, az_evolve, decoherence_function, spin_bloch_at, ArakiZurekModel,
    DensityKind, SpectralDensity, SpinModel,
};
use declab::operators::{c, ComplexMatrix};
use declab::quadrature::QuadratureOptions;
use declab::states::{BlochVector, DensityOperator};
use declab::superselection::{off_diagonal_norms, SectorStructure};

const MAX_POINTS: usize = 4000;

fn env_from(kind: &str, p1: f64, p2: f64, p3: f64) -> Result<SpectralDensity, String> {
    let kind = match kind {
        "gaussian" => DensityKind::Gaussian { s: p1 },
        "uniform" => DensityKind::Uniform { a: p1, b: p2 },
        "bump" => DensityKind::Bump {
            a: p1,
            b: p2,
            k: p3,
        },
        other => return Err(format!("unknown environment `{other}`")),
    };
    SpectralDensity::from_kind(kind).map_err(|e| e.to_string())
}

fn grid(t_max: f64, count: usize) -> Result<Vec<f64>, String> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err("t_max must be positive".into());
    }
    if !(2..=MAX_POINTS).contains(&count) {
        return Err(format!("count must lie in 2..={MAX_POINTS}"));
    }
    Ok((0..count)
        .map(|k| t_max * k as f64 / (count - 1) as f64)
        .collect())
}

/// `[t₀, |χ(t₀)|, t₁, |χ(t₁)|, …]` for a gaussian (`p1 = s`), uniform
/// (`[p1, p2]`) or bump (`[p1, p2]`, steepness `p3`) density.
#[wasm_bindgen]
pub fn chi_curve(
    kind: &str,
    p1: f64,
    p2: f64,
    p3: f64,
    t_max: f64,
    count: usize,
) -> Result<Vec<f64>, String> {
    let env = env_from(kind, p1, p2, p3)?;
    let mut out = Vec::with_capacity(2 * count);
    for t in grid(t_max, count)? {
        let chi = decoherence_function(&env, t).map_err(|e| e.to_string())?;
        out.extend([t, chi.norm()]);
    }
    Ok(out)
}

/// Two sectors with `λ = ±coupling`, `H_S = ω σ₃/2`, starting from
/// `|+⟩⟨+|`: `[t, ‖offdiag‖₂, ‖offdiag‖₁, …]`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn az_decay(
    kind: &str,
    p1: f64,
    p2: f64,
    p3: f64,
    coupling: f64,
    omega: f64,
    t_max: f64,
    count: usize,
) -> Result<Vec<f64>, String> {
    let env = env_from(kind, p1, p2, p3)?;
    let sectors = SectorStructure::from_block_sizes(&[1, 1]).map_err(|e| e.to_string())?;
    let h_s = declab::operators::diag(&[0.5 * omega, -0.5 * omega]);
    let model = ArakiZurekModel::new(sectors, vec![coupling, -coupling], h_s, env)
        .map_err(|e| e.to_string())?;
    let plus = DensityOperator::new(ComplexMatrix::from_element(2, 2, c(0.5, 0.0)))
        .map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * count);
    for t in grid(t_max, count)? {
        let rho = az_evolve(&model, &plus, t).map_err(|e| e.to_string())?;
        let n = off_diagonal_norms(&rho, model.sectors()).map_err(|e| e.to_string())?;
        out.extend([t, n.hs, n.trace]);
    }
    Ok(out)
}

/// Spin in the field `a·σ + λxσ₃` with a Gaussian position density of
/// width `s`. Returns `[Mp₁, Mp₂, Mp₃]` followed by `[t, p₁, p₂, p₃]` per
/// time point.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn spin_trajectory(
    a1: f64,
    a2: f64,
    a3: f64,
    lambda: f64,
    s: f64,
    px: f64,
    py: f64,
    pz: f64,
    t_max: f64,
    count: usize,
) -> Result<Vec<f64>, String> {
    let env = SpectralDensity::gaussian(s).map_err(|e| e.to_string())?;
    let model = SpinModel::new([a1, a2, a3], 1.0, lambda, env).map_err(|e| e.to_string())?;
    let p = BlochVector::new([px, py, pz]).map_err(|e| e.to_string())?;
    let m = asymptotic_map(&model).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 + 4 * count);
    out.extend(apply(&m, p.components()));
    let opts = QuadratureOptions::default();
    for t in grid(t_max, count)? {
        let q = spin_bloch_at(&model, &p, t, &opts).map_err(|e| e.to_string())?;
        out.push(t);
        out.extend(q);
    }
    Ok(out)
}
