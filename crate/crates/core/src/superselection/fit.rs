//! Power-law envelope bounds `C (1 + δt)^(−γ)` for decaying, possibly
//! oscillating time series.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_ENVELOPE_POINTS: usize = 8;

/// Fitted exponents above this mark decay faster than any power law.
pub const SUPER_POLYNOMIAL_GAMMA: f64 = 20.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("only {found} envelope points in the fit window, need at least {required}")]
    InsufficientData { found: usize, required: usize },
    #[error("envelope does not decay (log-log slope {slope:.3e})")]
    NonDecaying { slope: f64 },
    #[error("invalid samples: {0}")]
    BadSamples(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    #[serde(rename = "C")]
    pub c: f64,
    pub delta: f64,
    pub gamma: f64,
    pub window: (f64, f64),
    /// RMS of the log-space residuals over the envelope points.
    pub residual: f64,
    pub envelope_points: usize,
    /// Set when `gamma` exceeds [`SUPER_POLYNOMIAL_GAMMA`]; the power law is
    /// then a bound only, not a tight description.
    pub super_polynomial: bool,
}

impl DecayFit {
    pub fn bound(&self, t: f64) -> f64 {
        self.c * (1.0 + self.delta * t.abs()).powf(-self.gamma)
    }
}

/// Fits `C (1 + δt)^(−γ)` to the upper envelope of `|value|`.
///
/// Envelope points are the local maxima of `|value|` inside the window
/// (neighbours may lie outside it). A window without oscillation, i.e. a
/// non-increasing run, is its own envelope. `γ` and `C` come from a
/// least-squares line through `(ln(1+δt), ln|value|)` on the envelope; `C`
/// is then raised to the smallest value for which the bound dominates every
/// sample in the window (plus a few ulps so the comparison survives
/// rounding). The default window is the second half of the
/// sampled time range.
pub fn fit_power_law_decay(
    samples: &[(f64, f64)],
    delta: f64,
    window: Option<(f64, f64)>,
) -> Result<DecayFit, FitError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(FitError::BadSamples(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if samples
        .iter()
        .any(|(t, v)| !t.is_finite() || !v.is_finite() || *t < 0.0)
    {
        return Err(FitError::BadSamples(
            "times must be finite and non-negative".into(),
        ));
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(FitError::BadSamples(
            "times must be strictly increasing".into(),
        ));
    }
    let insufficient = |found| FitError::InsufficientData {
        found,
        required: MIN_ENVELOPE_POINTS,
    };
    let (Some(first), Some(last)) = (samples.first(), samples.last()) else {
        return Err(insufficient(0));
    };
    let window = window.unwrap_or((0.5 * (first.0 + last.0), last.0));

    let values: Vec<f64> = samples.iter().map(|(_, v)| v.abs()).collect();
    let inside: Vec<usize> = (0..samples.len())
        .filter(|&i| samples[i].0 >= window.0 && samples[i].0 <= window.1)
        .collect();

    let mut envelope: Vec<usize> = inside
        .iter()
        .copied()
        .filter(|&i| {
            i > 0
                && i + 1 < values.len()
                && values[i] >= values[i - 1]
                && values[i] >= values[i + 1]
                && (values[i] > values[i - 1] || values[i] > values[i + 1])
        })
        .collect();
    if envelope.len() < MIN_ENVELOPE_POINTS {
        let monotone = inside.windows(2).all(|w| values[w[1]] <= values[w[0]]);
        if monotone {
            envelope = inside.clone();
        }
    }
    envelope.retain(|&i| values[i] > 0.0);
    if envelope.len() < MIN_ENVELOPE_POINTS {
        return Err(insufficient(envelope.len()));
    }

    let xs: Vec<f64> = envelope
        .iter()
        .map(|&i| (1.0 + delta * samples[i].0).ln())
        .collect();
    let ys: Vec<f64> = envelope.iter().map(|&i| values[i].ln()).collect();
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    if sxx <= 0.0 {
        return Err(insufficient(1));
    }
    let slope = sxy / sxx;
    if slope >= -1e-12 {
        return Err(FitError::NonDecaying { slope });
    }
    let gamma = -slope;
    let intercept = mean_y - slope * mean_x;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();

    let c = inside
        .iter()
        .map(|&i| values[i] * (1.0 + delta * samples[i].0).powf(gamma))
        .fold(intercept.exp(), f64::max)
        * (1.0 + 8.0 * f64::EPSILON);

    Ok(DecayFit {
        c,
        delta,
        gamma,
        window,
        residual,
        envelope_points: envelope.len(),
        super_polynomial: gamma > SUPER_POLYNOMIAL_GAMMA,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
        (0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect()
    }

    #[test]
    fn recovers_an_exact_power_law() {
        let samples: Vec<_> = grid(0.0, 50.0, 201)
            .into_iter()
            .map(|t| (t, (1.0 + t).powi(-3)))
            .collect();
        let fit = fit_power_law_decay(&samples, 1.0, None).unwrap();
        assert!((fit.gamma - 3.0).abs() < 0.05);
        assert!((fit.c - 1.0).abs() < 0.05);
        assert!(!fit.super_polynomial);
    }

    #[test]
    fn sinc_envelope_decays_like_one_over_t() {
        let samples: Vec<_> = grid(0.01, 200.0, 20_000)
            .into_iter()
            .map(|t| (t, (t.sin() / t).abs()))
            .collect();
        let fit = fit_power_law_decay(&samples, 1.0, None).unwrap();
        assert!((fit.gamma - 1.0).abs() < 0.1, "gamma = {}", fit.gamma);
        for (t, v) in samples.iter().filter(|(t, _)| *t >= fit.window.0) {
            assert!(fit.bound(*t) >= *v);
        }
    }

    #[test]
    fn constant_samples_do_not_decay() {
        let samples: Vec<_> = grid(0.0, 10.0, 50).into_iter().map(|t| (t, 0.3)).collect();
        assert!(matches!(
            fit_power_law_decay(&samples, 1.0, None),
            Err(FitError::NonDecaying { .. })
        ));
    }

    #[test]
    fn too_few_points() {
        let samples: Vec<_> = grid(0.0, 10.0, 10)
            .into_iter()
            .map(|t| (t, 1.0 / (1.0 + t)))
            .collect();
        assert!(matches!(
            fit_power_law_decay(&samples, 1.0, None),
            Err(FitError::InsufficientData { .. })
        ));
        assert!(matches!(
            fit_power_law_decay(&[(1.0, 1.0), (0.5, 1.0)], 1.0, None),
            Err(FitError::BadSamples(_))
        ));
        assert!(matches!(
            fit_power_law_decay(&[], 1.0, None),
            Err(FitError::InsufficientData { .. })
        ));
    }

    #[test]
    fn gaussian_decay_is_flagged_super_polynomial() {
        let samples: Vec<_> = grid(0.0, 8.0, 400)
            .into_iter()
            .map(|t| (t, (-t * t / 2.0).exp()))
            .collect();
        let fit = fit_power_law_decay(&samples, 1.0, None).unwrap();
        assert!(fit.super_polynomial);
    }
}
