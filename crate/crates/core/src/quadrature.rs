//! Gauss–Legendre rules and adaptive panel quadrature for smooth, possibly
//! oscillatory integrands with vector values.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error(
        "adaptive quadrature exceeded {panels} panels (estimated error {estimated_error:.3e})"
    )]
    Failure { panels: usize, estimated_error: f64 },
    #[error("invalid integration interval [{0}, {1}]")]
    BadInterval(f64, f64),
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton on P_n starting from the Tricomi estimate.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Absolute error target for the whole interval (max over components).
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Multiplier on the initial panel count.
    pub resolution: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            max_panels: 1 << 14,
            resolution: 1,
        }
    }
}

impl QuadratureOptions {
    /// Twice the panel density at half the error target.
    pub fn doubled(self) -> Self {
        Self {
            abs_tol: self.abs_tol / 2.0,
            resolution: self.resolution * 2,
            ..self
        }
    }
}

const HIGH_ORDER: usize = 16;
const LOW_ORDER: usize = 8;
const MIN_PANELS: usize = 4;

struct Rules {
    high: (Vec<f64>, Vec<f64>),
    low: (Vec<f64>, Vec<f64>),
}

impl Rules {
    fn new() -> Self {
        Self {
            high: gauss_legendre(HIGH_ORDER),
            low: gauss_legendre(LOW_ORDER),
        }
    }
}

fn apply_rule<const N: usize>(
    rule: &(Vec<f64>, Vec<f64>),
    f: &impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
) -> [f64; N] {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = [0.0; N];
    for (x, w) in rule.0.iter().zip(&rule.1) {
        let y = f(mid + half * x);
        for k in 0..N {
            acc[k] += w * y[k];
        }
    }
    acc.map(|v| v * half)
}

/// Adaptive Gauss–Legendre quadrature of a vector-valued integrand.
///
/// `rate` is the largest angular frequency of the integrand's oscillation in
/// the integration variable (0 for non-oscillatory integrands); the initial
/// panels are no wider than `π / (4 rate)`. Panels are bisected until the
/// difference between the 16- and 8-point rules on each panel is below its
/// share of `abs_tol`. The summation order depends only on the inputs.
pub fn integrate<const N: usize>(
    f: impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    rate: f64,
    opts: &QuadratureOptions,
) -> Result<[f64; N], QuadratureError> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(QuadratureError::BadInterval(a, b));
    }
    if b == a {
        return Ok([0.0; N]);
    }
    let rules = Rules::new();
    let width = b - a;
    let by_rate = if rate > 0.0 {
        (width * rate * 4.0 / PI).ceil() as usize
    } else {
        0
    };
    let initial = by_rate.max(MIN_PANELS) * opts.resolution.max(1);
    if initial > opts.max_panels {
        return Err(QuadratureError::Failure {
            panels: initial,
            estimated_error: f64::INFINITY,
        });
    }

    let step = width / initial as f64;
    // Stack of pending panels in reverse order so they pop left to right.
    let mut pending: Vec<(f64, f64)> = (0..initial)
        .rev()
        .map(|k| {
            let lo = a + step * k as f64;
            let hi = if k + 1 == initial {
                b
            } else {
                a + step * (k + 1) as f64
            };
            (lo, hi)
        })
        .collect();
    let mut panels = initial;
    let mut total = [0.0; N];
    let mut error = 0.0;

    while let Some((lo, hi)) = pending.pop() {
        let high = apply_rule(&rules.high, &f, lo, hi);
        let low = apply_rule(&rules.low, &f, lo, hi);
        let est = high
            .iter()
            .zip(&low)
            .fold(0.0_f64, |m, (h, l)| m.max((h - l).abs()));
        let share = opts.abs_tol * (hi - lo) / width;
        if est <= share || hi - lo <= width * f64::EPSILON * 16.0 {
            for k in 0..N {
                total[k] += high[k];
            }
            error += est;
        } else {
            panels += 1;
            if panels > opts.max_panels {
                return Err(QuadratureError::Failure {
                    panels,
                    estimated_error: error + est,
                });
            }
            let mid = 0.5 * (lo + hi);
            pending.push((mid, hi));
            pending.push((lo, mid));
        }
    }
    Ok(total)
}
