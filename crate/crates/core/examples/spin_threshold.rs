//! Reference run for the spin asymptotics acceptance check: the generic
//! Gaussian model on the acceptance time grid at doubled quadrature
//! resolution.
//!
//! cargo run --release -p declab --example spin_threshold

use declab::models::{spin_asymptotics_with, SpectralDensity, SpinModel};
use declab::quadrature::QuadratureOptions;
use declab::states::BlochVector;

fn main() {
    let model = SpinModel::new(
        [1.0, 0.0, 2.0],
        0.3,
        1.0,
        SpectralDensity::gaussian(1.0).unwrap(),
    )
    .unwrap();
    let p = BlochVector::new([1.0, 0.0, 0.0]).unwrap();
    let grid: Vec<f64> = (0..=900).map(|k| 5.0 + 45.0 * k as f64 / 900.0).collect();
    let opts = QuadratureOptions::default().doubled();
    let series = spin_asymptotics_with(&model, &p, &grid, &opts).unwrap();
    let maxima: Vec<(f64, f64)> = series
        .windows(3)
        .filter(|w| w[1].1 >= w[0].1 && w[1].1 >= w[2].1)
        .map(|w| w[1])
        .collect();
    for (t, d) in &maxima {
        println!("envelope t = {t:.4}  distance = {d:.6e}");
    }
    let (t, d) = maxima.last().expect("oscillating series");
    println!("final envelope point t = {t}  distance = {d:.15e}");
    let (t, d) = series.last().unwrap();
    println!("final sample t = {t}  distance = {d:.15e}");
}
