mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qwalk::optimize::random_probe;
use qwalk::walk::{
    coin_density_matrix, entanglement_entropy, initial_state, position_distribution, step, DerivativePair,
};
use qwalk::{Axis, CoinFamily, ProbeSpec};

fn catalogue() -> Vec<(CoinFamily, usize, f64)> {
    let mut v = Vec::new();
    for dim in 2..=5 {
        for axis in Axis::ALL {
            v.push((CoinFamily::rotation(axis), dim, 0.9));
        }
    }
    v.push((CoinFamily::EmbeddedRotationZ, 4, 1.3));
    v.push((CoinFamily::EmbeddedU2 { xi: 0.2, zeta: -0.7 }, 3, 0.5));
    v.push((CoinFamily::Grover, 2, 0.6));
    v.push((CoinFamily::Grover, 3, 0.45));
    v
}

fn evolve(family: &CoinFamily, dim: usize, theta: f64, probe: &ProbeSpec, t: usize) -> DerivativePair {
    let coin = family.build(dim, theta).unwrap();
    DerivativePair::new(probe, t).unwrap().evolve_steps(&coin, t).unwrap()
}

#[test]
fn shifts_reference() {
    assert_eq!(shifts(2), vec![-1, 1]);
    assert_eq!(shifts(3), vec![-1, 0, 1]);
    assert_eq!(shifts(4), vec![-2, -1, 1, 2]);
    for dim in 2..=7 {
        assert_eq!(qwalk::index::CoinIndexSet::new(dim).unwrap().shifts(), shifts(dim).as_slice());
    }
}

#[test]
fn engine_matches_reference_walk() {
    let mut r = rng(1);
    for (family, dim, theta) in catalogue() {
        let coin = family.build(dim, theta).unwrap();
        for t in [1, 4, 9] {
            let probe = random_probe(dim, &mut r);
            let chi = probe.amplitudes();
            let reference = RefWalk::run(&chi, &coin.matrix, t);
            let mut state = initial_state(&probe, t).unwrap();
            for _ in 0..t {
                state = step(&state, &coin).unwrap();
            }
            let diff = state
                .as_slice()
                .iter()
                .zip(reference.flat())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-13, "{family} D={dim} t={t}: {diff}");
        }
    }
}

#[test]
fn recurrence_matches_finite_difference() {
    // R_y at θ = 0.9, t = 4, δ = 1e-4
    let probe = ProbeSpec::new(vec![1.1, 0.5], vec![0.3, 4.0]).unwrap();
    let chi = probe.amplitudes();
    let pair = evolve(&CoinFamily::rotation(Axis::Y), 3, 0.9, &probe, 4);
    let fd = central_diff(|th| RefWalk::run(&chi, &rotation(3, Axis::Y, th), 4).flat(), 0.9, 1e-4);
    let diff = pair
        .dstate
        .as_slice()
        .iter()
        .zip(&fd)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-6, "{diff}");
}

#[test]
fn recurrence_matches_sum_over_insertions() {
    // ∂ψ(t) = Σ_m U^{t-1-m} (∂U) U^m ψ(0)
    let mut r = rng(2);
    for (family, dim, theta) in catalogue() {
        let coin = family.build(dim, theta).unwrap();
        for t in 1..=5 {
            let chi = random_probe(dim, &mut r).amplitudes();
            let mut total = vec![Complex64::new(0.0, 0.0); RefWalk::start(&chi, t).flat().len()];
            for m in 0..t {
                let mut w = RefWalk::start(&chi, t);
                for _ in 0..m {
                    w = w.step(&coin.matrix);
                }
                w = w.step(&coin.derivative);
                for _ in m + 1..t {
                    w = w.step(&coin.matrix);
                }
                for (acc, v) in total.iter_mut().zip(w.flat()) {
                    *acc += v;
                }
            }
            let probe = ProbeSpec::from_amplitudes(&chi).unwrap();
            let pair = evolve(&family, dim, theta, &probe, t);
            let diff = pair
                .dstate
                .as_slice()
                .iter()
                .zip(&total)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "{family} D={dim} t={t}: {diff}");
        }
    }
}

#[test]
fn step_beyond_horizon_is_rejected() {
    let coin = CoinFamily::rotation(Axis::X).build(2, 0.3).unwrap();
    let mut s = initial_state(&ProbeSpec::lowest(2).unwrap(), 2).unwrap();
    s = step(&s, &coin).unwrap();
    s = step(&s, &coin).unwrap();
    assert!(step(&s, &coin).is_err());
    let wrong_dim = CoinFamily::rotation(Axis::X).build(3, 0.3).unwrap();
    assert!(step(&initial_state(&ProbeSpec::lowest(2).unwrap(), 2).unwrap(), &wrong_dim).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_and_light_cone(idx in 0usize..100, t in 1usize..=12, seed in any::<u64>()) {
        let all = catalogue();
        let (family, dim, theta) = &all[idx % all.len()];
        let probe = random_probe(*dim, &mut rng(seed));
        let pair = evolve(family, *dim, *theta, &probe, t);
        prop_assert!((pair.state.norm_sqr() - 1.0).abs() < 1e-12);
        let m = (*dim / 2 * t) as i64;
        for (x, p) in pair.state.positions().zip(position_distribution(&pair.state)) {
            if x.abs() > m {
                prop_assert_eq!(p, 0.0);
            }
        }
        prop_assert!(pair.state.support_radius().unwrap_or(0) <= m);
        prop_assert!((position_distribution(&pair.state).iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_with_derivative_is_imaginary(idx in 0usize..100, t in 1usize..=8, seed in any::<u64>()) {
        let all = catalogue();
        let (family, dim, theta) = &all[idx % all.len()];
        let probe = random_probe(*dim, &mut rng(seed));
        let pair = evolve(family, *dim, *theta, &probe, t);
        prop_assert!(pair.overlap().re.abs() < 1e-11);
    }

    #[test]
    fn real_walks_are_orthogonal(idx in 0usize..3, t in 1usize..=8, angles in prop::collection::vec(0.0f64..std::f64::consts::PI, 2)) {
        let (family, dim, theta) = [
            (CoinFamily::rotation(Axis::Y), 3, 0.9),
            (CoinFamily::Grover, 3, 0.45),
            (CoinFamily::Grover, 2, 0.7),
        ][idx];
        let probe = ProbeSpec::new(angles[..dim - 1].to_vec(), vec![0.0; dim - 1]).unwrap();
        let pair = evolve(&family, dim, theta, &probe, t);
        prop_assert!(pair.overlap().norm() < 1e-10);
    }

    #[test]
    fn entropy_bounds(idx in 0usize..100, t in 1usize..=8, seed in any::<u64>()) {
        let all = catalogue();
        let (family, dim, theta) = &all[idx % all.len()];
        let probe = random_probe(*dim, &mut rng(seed));
        let pair = evolve(family, *dim, *theta, &probe, t);
        let e = entanglement_entropy(&pair.state);
        prop_assert!(e >= -1e-12 && e <= (*dim as f64).ln() + 1e-12);
        let rho = coin_density_matrix(&pair.state);
        let tr: Complex64 = (0..*dim).map(|k| rho[(k, k)]).sum();
        prop_assert!((tr - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
