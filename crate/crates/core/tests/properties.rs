use proptest::prelude::*;

use declab::models::{
    asymptotic_map, az_evolve, decoherence_function, spin_evolve, ArakiZurekModel, SpectralDensity,
    SpinModel,
};
use declab::operators::{hermitian_eig, hs_norm, schatten_norms};
use declab::random::{
    haar_unitary, random_density_matrix, random_hermitian, random_sector_projectors, seeded,
};
use declab::states::{
    alternate_decomposition, bloch_to_density, density_to_bloch, trace_distance, BlochVector,
    DensityOperator,
};
use declab::superselection::{
    off_diagonal_norms, sector_probabilities, sector_project, validate_sectors, SectorStructure,
};

fn ball_point() -> impl Strategy<Value = [f64; 3]> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.0..1.0f64).prop_map(|(x, y, z, r)| {
        let n = (x * x + y * y + z * z).sqrt().max(1e-9);
        [x / n * r, y / n * r, z / n * r]
    })
}

fn density() -> impl Strategy<Value = SpectralDensity> {
    prop_oneof![
        (0.1..3.0f64).prop_map(|s| SpectralDensity::gaussian(s).unwrap()),
        (-2.0..0.0f64, 0.1..2.0f64).prop_map(|(a, w)| SpectralDensity::uniform(a, a + w).unwrap()),
        (-2.0..0.0f64, 0.1..2.0f64, 0.1..3.0f64).prop_map(|(a, w, k)| SpectralDensity::bump(
            a,
            a + w,
            k
        )
        .unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = seeded(seed);
        let h = random_hermitian(&mut rng, n);
        let eig = hermitian_eig(&h).unwrap();
        prop_assert!(hs_norm(&(eig.reconstruct() - &h)) < 1e-10 * hs_norm(&h).max(1.0));
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn norm_chain_holds(seed in any::<u64>(), n in 1usize..10) {
        let mut rng = seeded(seed);
        let s = schatten_norms(&random_hermitian(&mut rng, n)).unwrap();
        prop_assert!(s.op <= s.hs + 1e-12 && s.hs <= s.trace + 1e-12);
    }

    #[test]
    fn bloch_chart_round_trips(p in ball_point()) {
        let q = density_to_bloch(&bloch_to_density(&BlochVector::new(p).unwrap())).unwrap();
        for k in 0..3 {
            prop_assert!((q.components()[k] - p[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_distance_is_a_metric(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = seeded(seed);
        let a = DensityOperator::new(random_density_matrix(&mut rng, n)).unwrap();
        let b = DensityOperator::new(random_density_matrix(&mut rng, n)).unwrap();
        let m = DensityOperator::new(random_density_matrix(&mut rng, n)).unwrap();
        let ab = trace_distance(&a, &b).unwrap();
        prop_assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(ab <= 2.0 + 1e-12);
        prop_assert!(ab <= trace_distance(&a, &m).unwrap() + trace_distance(&m, &b).unwrap() + 1e-12);
    }

    #[test]
    fn every_unitary_decomposes(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = seeded(seed);
        let w = DensityOperator::new(random_density_matrix(&mut rng, n)).unwrap();
        let dec = alternate_decomposition(&w, &haar_unitary(&mut rng, n)).unwrap();
        prop_assert!(dec.reconstruction_error(&w) < 1e-12);
        prop_assert!((dec.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(dec.projectors.iter().all(|p| p.is_rank_one()));
    }

    #[test]
    fn projection_only_removes_coherence(seed in any::<u64>(), a in 1usize..4, b in 1usize..4) {
        let mut rng = seeded(seed);
        let sectors = validate_sectors(random_sector_projectors(&mut rng, &[a, b]), vec!["a".into(), "b".into()]).unwrap();
        let w = DensityOperator::new(random_density_matrix(&mut rng, a + b)).unwrap();
        let p = sector_project(&w, &sectors).unwrap();
        prop_assert!(off_diagonal_norms(&p, &sectors).unwrap().hs < 1e-12);
        let before = sector_probabilities(&w, &sectors).unwrap();
        let after = sector_probabilities(&p, &sectors).unwrap();
        prop_assert!(before.iter().zip(&after).all(|(x, y)| (x - y).abs() < 1e-12));
        // The channel contracts trace distances.
        let v = DensityOperator::new(random_density_matrix(&mut rng, a + b)).unwrap();
        let pv = sector_project(&v, &sectors).unwrap();
        prop_assert!(trace_distance(&p, &pv).unwrap() <= trace_distance(&w, &v).unwrap() + 1e-12);
    }

    #[test]
    fn chi_is_bounded_and_hermitian(env in density(), t in 0.0..40.0f64) {
        let z = decoherence_function(&env, t).unwrap();
        prop_assert!(z.norm() <= 1.0 + 1e-9);
        let w = decoherence_function(&env, -t).unwrap();
        prop_assert!((z.conj() - w).norm() < 1e-9);
    }

    #[test]
    fn dephasing_preserves_probabilities(seed in any::<u64>(), env in density(), t in 0.0..10.0f64) {
        let mut rng = seeded(seed);
        let sectors = SectorStructure::from_block_sizes(&[1, 2]).unwrap();
        let model = ArakiZurekModel::new(sectors.clone(), vec![0.7, -0.4], declab::operators::diag(&[0.2, -0.3, 0.9]), env).unwrap();
        let rho0 = DensityOperator::new(random_density_matrix(&mut rng, 3)).unwrap();
        let rho = az_evolve(&model, &rho0, t).unwrap();
        let before = sector_probabilities(&rho0, &sectors).unwrap();
        let after = sector_probabilities(&rho, &sectors).unwrap();
        prop_assert!(before.iter().zip(&after).all(|(x, y)| (x - y).abs() < 1e-10));
        let chi = decoherence_function(model.env(), 1.1 * t).unwrap().norm();
        let ratio = off_diagonal_norms(&rho, &sectors).unwrap().hs;
        let initial = off_diagonal_norms(&rho0, &sectors).unwrap().hs;
        prop_assert!((ratio - chi * initial).abs() < 1e-9);
    }

    #[test]
    fn spin_dynamics_stays_in_the_ball(a in ball_point(), lambda in -2.0..2.0f64, p in ball_point(), t in 0.0..15.0f64) {
        let model = SpinModel::new(a, 0.5, lambda, SpectralDensity::gaussian(1.0).unwrap()).unwrap();
        let rho = spin_evolve(&model, &BlochVector::new(p).unwrap(), t).unwrap();
        let q = density_to_bloch(&rho).unwrap();
        prop_assert!(q.norm() <= BlochVector::new(p).unwrap().norm() + 1e-9);
        let m = asymptotic_map(&model).unwrap();
        let tr = m[0][0] + m[1][1] + m[2][2];
        prop_assert!((tr - 1.0).abs() < 1e-9);
    }
}
