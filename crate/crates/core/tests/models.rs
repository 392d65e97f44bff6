mod common;

use binmrf::elimination::eliminate_exact_sum;
use binmrf::models::{
    build_2x2_rotinv, build_autologistic, build_higher_order, build_independence, build_ising,
    ModelFamily,
};
use binmrf::LatticeSpec;
use common::{brute_log_partition, direct_energy, random_model_of, rng, state};
use proptest::prelude::*;
use rand::Rng;

const MODEL_1: [f64; 10] = [0.5, 0.0, 0.0, -1.0, 0.0, -1.5, 0.0, 0.0, -0.5, -0.5];
const FAMILIES: [ModelFamily; 5] = [
    ModelFamily::Ising,
    ModelFamily::Independence,
    ModelFamily::Autologistic,
    ModelFamily::HigherOrder,
    ModelFamily::RotInv2x2,
];

fn lat(r: usize, c: usize) -> LatticeSpec {
    LatticeSpec::new(r, c).unwrap()
}

#[test]
fn interactions_sit_on_cliques() {
    let mut r = rng(1);
    for family in FAMILIES {
        for rows in 1..=4 {
            for cols in 1..=4 {
                let m = random_model_of(&mut r, family, rows, cols);
                assert!(m.graph.is_symmetric());
                assert_eq!(m.non_clique_interaction(), None, "{family:?} {rows}x{cols}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn polynomial_matches_clique_sums(seed in any::<u64>(), f in 0usize..5, rows in 1usize..6, cols in 1usize..6) {
        let mut r = rng(seed);
        let family = FAMILIES[f];
        let m = random_model_of(&mut r, family, rows, cols);
        let n = rows * cols;
        for _ in 0..100 {
            let x: Vec<u8> = (0..n).map(|_| r.gen_range(0..2)).collect();
            let direct = direct_energy(family, lat(rows, cols), &m.params, &x);
            prop_assert!((m.energy_at(&x).unwrap() - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn colour_inversion_symmetry(seed in any::<u64>(), rows in 1usize..4, cols in 1usize..5) {
        let mut r = rng(seed);
        let n = rows * cols;
        let ising = random_model_of(&mut r, ModelFamily::Ising, rows, cols);
        let higher = random_model_of(&mut r, ModelFamily::HigherOrder, rows, cols);
        for mask in 0..1usize << n {
            let x = state(mask, n);
            let y: Vec<u8> = x.iter().map(|v| 1 - v).collect();
            for m in [&ising, &higher] {
                prop_assert!((m.energy_at(&x).unwrap() - m.energy_at(&y).unwrap()).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn first_order_pair_counts() {
    for rows in 1..7 {
        for cols in 1..7 {
            let pairs = lat(rows, cols).first_order_pairs().len();
            assert_eq!(pairs, rows * (cols - 1) + cols * (rows - 1));
        }
    }
}

#[test]
fn independence_constant_is_analytic() {
    let m = build_independence(lat(1, 3), 1.0);
    let expected = 3.0 * (1.0 + 1f64.exp()).ln();
    assert!((brute_log_partition(&m.energy) - expected).abs() < 1e-12);
    let zero = build_independence(lat(3, 3), 0.0);
    assert!((brute_log_partition(&zero.energy) - 9.0 * 2f64.ln()).abs() < 1e-12);
    let m = build_independence(lat(3, 3), 1.0);
    let exact = eliminate_exact_sum(&m).unwrap().log_value;
    assert!((exact - 9.0 * (1.0 + 1f64.exp()).ln()).abs() < 1e-10);
}

#[test]
fn autologistic_two_sites() {
    let (t0, t1) = (0.7, -1.3);
    let m = build_autologistic(lat(1, 2), t0, t1);
    let c = 1.0 + 2.0 * t0.exp() + t1.exp();
    assert!((brute_log_partition(&m.energy) - c.ln()).abs() < 1e-12);
    let flat = build_autologistic(lat(2, 3), 0.0, 0.0);
    assert!((brute_log_partition(&flat.energy) - 6.0 * 2f64.ln()).abs() < 1e-12);
}

#[test]
fn single_block_energies_are_class_potentials() {
    let pot = [0.3, -0.2, 0.9, 1.7, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let m = build_higher_order(lat(2, 2), &pot).unwrap();
    for mask in 0..16 {
        let x = state(mask, 4);
        let expected = direct_energy(ModelFamily::HigherOrder, lat(2, 2), &pot, &x);
        assert!((m.energy_at(&x).unwrap() - expected).abs() < 1e-12);
    }
    // Corner-only and diagonal configurations.
    assert!((m.energy_at(&[1, 0, 0, 0]).unwrap() + 0.2).abs() < 1e-12);
    assert!((m.energy_at(&[1, 0, 0, 1]).unwrap() - 1.7).abs() < 1e-12);
    assert!((m.energy_at(&[0, 1, 1, 0]).unwrap() - 1.7).abs() < 1e-12);
    assert!((m.energy_at(&[1, 1, 0, 0]).unwrap() - 0.9).abs() < 1e-12);
}

#[test]
fn rotation_only_block_multiplicities() {
    let theta = [1.0, 2.0, 3.0, 4.0, 5.0];
    let m = build_2x2_rotinv(lat(2, 2), &theta).unwrap();
    let mut counts = [0usize; 6];
    for mask in 0..16 {
        let e = m.energy_at(&state(mask, 4)).unwrap();
        counts[e.round() as usize] += 1;
    }
    assert_eq!(counts, [1, 4, 4, 2, 4, 1]);
    let zero = build_2x2_rotinv(lat(3, 3), &[0.0; 5]).unwrap();
    assert_eq!(zero.energy.len(), 1);
}

#[test]
fn model_one_on_four_by_four() {
    let m = build_higher_order(lat(4, 4), &MODEL_1).unwrap();
    let exact = eliminate_exact_sum(&m).unwrap().log_value;
    assert!((exact - brute_log_partition(&m.energy)).abs() < 1e-9);
}

#[test]
fn random_families_match_brute_force_on_three_by_three() {
    let mut r = rng(7);
    for family in [ModelFamily::Autologistic, ModelFamily::RotInv2x2, ModelFamily::Ising] {
        let m = random_model_of(&mut r, family, 3, 3);
        let exact = eliminate_exact_sum(&m).unwrap().log_value;
        assert!((exact - brute_log_partition(&m.energy)).abs() < 1e-9, "{family:?}");
    }
    let ising = build_ising(lat(4, 4), 0.8);
    let exact = eliminate_exact_sum(&ising).unwrap().log_value;
    assert!((exact - brute_log_partition(&ising.energy)).abs() < 1e-9);
}
