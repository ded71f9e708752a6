use std::f64::consts::{FRAC_1_SQRT_2, PI};

use molwalk_core::linalg::{cis, unitarity_residual, CMat, C64, ZERO};
use molwalk_core::qca::{
    beyond_free_reach, bose_collision_step, doubly_occupied, from_single_particle, hadamard_pair_block,
    pair_equivalence, pair_from_walk, qca_evolve, qca_step, single_particle, single_particle_amplitudes,
    up_up_at_origin, CellCoin, GasState, PairPicture,
};
use molwalk_core::step::evolve_single_ring;
use molwalk_core::symbol::coin_walk;
use molwalk_core::{build_free_step, evolve, hadamard_walk, Lattice, TwoParticleState, UnitaryCoin};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_cell(rng: &mut ChaCha8Rng) -> CellCoin {
    CellCoin::new(UnitaryCoin::haar_random(2, rng), cis(rng.random_range(-PI..PI))).unwrap()
}

fn random_amp(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random occupation string with `n` of the `2 cells` modes filled.
fn random_key(cells: usize, n: usize, rng: &mut ChaCha8Rng) -> u64 {
    let mut key = 0u64;
    while key.count_ones() < n as u32 {
        key |= 1 << rng.random_range(0..2 * cells);
    }
    key
}

/// Normalized superposition over several random strings in each listed sector.
fn random_gas(cells: usize, sectors: &[usize], rng: &mut ChaCha8Rng) -> GasState {
    let mut s = GasState::empty(cells).unwrap();
    for &n in sectors {
        for _ in 0..6 {
            s.add(random_key(cells, n, rng), random_amp(rng)).unwrap();
        }
    }
    normalized(s)
}

fn normalized(s: GasState) -> GasState {
    let norm = s.norm_sqr().sqrt();
    let mut out = GasState::empty(s.cells()).unwrap();
    for (k, a) in s.entries() {
        out.add(k, a / norm).unwrap();
    }
    out
}

/// The step as a dense `4^M × 4^M` matrix, one basis string per column.
fn dense_step(cells: usize, coin: &CellCoin) -> CMat {
    let dim = 1usize << (2 * cells);
    let mut m = CMat::zeros(dim, dim);
    for k in 0..dim {
        let col = qca_step(&GasState::basis(cells, k as u64).unwrap(), coin).to_dense().unwrap();
        m.set_column(k, &col);
    }
    m
}

#[test]
fn step_matrix_is_unitary_and_number_conserving() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for cells in [1, 2, 3, 4] {
        let coin = random_cell(&mut rng);
        let m = dense_step(cells, &coin);
        assert!(unitarity_residual(&m) < 1e-12, "cells {cells}");
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if (i as u64).count_ones() != (j as u64).count_ones() {
                    assert_eq!(m[(i, j)], ZERO);
                }
            }
        }
    }
}

#[test]
fn vacuum_and_full_ring_are_invariant() {
    let coin = random_cell(&mut ChaCha8Rng::seed_from_u64(2));
    let vac = GasState::vacuum(9).unwrap();
    assert_eq!(qca_evolve(&vac, &coin, 7), vac);
    let full = GasState::basis(5, (1 << 10) - 1).unwrap();
    let out = qca_step(&full, &coin);
    assert_eq!(out.len(), 1);
    assert!((out.amplitude((1 << 10) - 1) - coin.gamma().powi(5)).norm() < 1e-14);
}

#[test]
fn sector_weights_conserved_over_fifty_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let coin = random_cell(&mut rng);
    let mut s = random_gas(10, &[0, 1, 2, 3, 5], &mut rng);
    let w0 = s.sector_weights();
    for _ in 0..50 {
        s = qca_step(&s, &coin);
        let w = s.sector_weights();
        assert_eq!(w.keys().collect::<Vec<_>>(), w0.keys().collect::<Vec<_>>());
        for (n, x) in &w0 {
            assert!((w[n] - x).abs() < 1e-12, "sector {n}");
        }
        for (k, _) in s.entries() {
            assert!(w0.contains_key(&k.count_ones()));
        }
    }
}

#[test]
fn sector_projection_examples() {
    let vac = GasState::vacuum(4).unwrap();
    assert_eq!(vac.sector_projection(0), vac);
    let pair = doubly_occupied(6, 2).unwrap();
    assert!(pair.sector_projection(1).is_empty());
    assert_eq!(pair.sector_projection(2), pair);
}

#[test]
fn sector_projection_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let s = random_gas(8, &[0, 1, 2, 4], &mut rng);
        for n in 0..=16 {
            let p = s.sector_projection(n);
            assert!(p.sector_projection(n).max_diff(&p) < 1e-14);
            assert!(p.norm_sqr() <= 1.0 + 1e-14);
        }
        let total: f64 = (0..=16).map(|n| s.sector_projection(n).norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn single_particle_matches_hadamard_walk() {
    let coin = CellCoin::new(UnitaryCoin::hadamard(), cis(0.7)).unwrap();
    for coin_index in 0..2 {
        let out = qca_evolve(&single_particle(8, 0, coin_index).unwrap(), &coin, 3);
        let mut psi = vec![ZERO; 16];
        psi[coin_index] = C64::new(1.0, 0.0);
        let walk = evolve_single_ring(&hadamard_walk(), 8, &psi, 3).unwrap();
        let gas = single_particle_amplitudes(&out);
        for c in 0..8 {
            for a in 0..2 {
                assert!((gas[c][a] - walk[2 * c + a]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn single_particle_matches_walk_for_random_coins() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let coin = random_cell(&mut rng);
        let cells = rng.random_range(3..12);
        let amps: Vec<[C64; 2]> = (0..cells).map(|_| [random_amp(&mut rng), random_amp(&mut rng)]).collect();
        let start = from_single_particle(&amps).unwrap();
        let psi: Vec<C64> = amps.iter().flat_map(|a| a.iter().copied()).collect();
        let t = rng.random_range(1..15);
        let walk = evolve_single_ring(&coin_walk(coin.block()).unwrap(), cells, &psi, t).unwrap();
        let gas = single_particle_amplitudes(&qca_evolve(&start, &coin, t));
        for c in 0..cells {
            for a in 0..2 {
                assert!((gas[c][a] - walk[2 * c + a]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn singlet_collision_pair_sector() {
    let coin = CellCoin::new(UnitaryCoin::hadamard(), C64::new(-1.0, 0.0)).unwrap();
    let bose = pair_equivalence(&coin, &doubly_occupied(12, 6).unwrap(), PairPicture::Bose, 4).unwrap();
    assert!(bose.max_deviation() < 1e-12);
    let fermi = pair_equivalence(&coin, &doubly_occupied(26, 13).unwrap(), PairPicture::Fermi, 4).unwrap();
    assert!(fermi.max_deviation() < 1e-12);
    assert!((fermi.phase - C64::new(1.0, 0.0)).norm() < 1e-12);
}

/// Random pair state on the cells `centre ± spread`; `parity` fixes the cell
/// separation mod 2 when given.
fn random_pair(cells: usize, centre: usize, spread: usize, parity: Option<usize>, rng: &mut ChaCha8Rng) -> GasState {
    let mut s = GasState::empty(cells).unwrap();
    while s.len() < 8 {
        let lo = 2 * (centre - spread);
        let hi = 2 * (centre + spread + 1);
        let (a, b) = (rng.random_range(lo..hi), rng.random_range(lo..hi));
        let separation = (a / 2).abs_diff(b / 2);
        if a != b && parity.is_none_or(|p| separation % 2 == p) {
            s.add((1 << a) | (1 << b), random_amp(rng)).unwrap();
        }
    }
    normalized(s)
}

#[test]
fn pair_sector_matches_walk_for_random_coins() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let coin = random_cell(&mut rng);
        let bose = pair_equivalence(&coin, &random_pair(9, 4, 2, None, &mut rng), PairPicture::Bose, 12).unwrap();
        assert!(bose.max_deviation() < 1e-12, "{:?}", bose.deviations);
        let fermi = pair_equivalence(&coin, &random_pair(24, 12, 2, Some(0), &mut rng), PairPicture::Fermi, 8).unwrap();
        assert!(fermi.max_deviation() < 1e-12, "{:?}", fermi.deviations);
    }
}

#[test]
fn fermi_picture_fails_for_pairs_that_cross_without_meeting() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let coin = random_cell(&mut rng);
    let odd = pair_equivalence(&coin, &random_pair(24, 12, 2, Some(1), &mut rng), PairPicture::Fermi, 8).unwrap();
    assert!(odd.max_deviation() > 1e-3);
    let bose = pair_equivalence(&coin, &random_pair(24, 12, 2, Some(1), &mut rng), PairPicture::Bose, 8).unwrap();
    assert!(bose.max_deviation() < 1e-12);
}

#[test]
fn fermi_picture_breaks_once_pairs_wrap() {
    let coin = CellCoin::new(UnitaryCoin::hadamard(), cis(1.1)).unwrap();
    let bose = pair_equivalence(&coin, &doubly_occupied(6, 3).unwrap(), PairPicture::Bose, 12).unwrap();
    assert!(bose.max_deviation() < 1e-12);
    let fermi = pair_equivalence(&coin, &doubly_occupied(6, 3).unwrap(), PairPicture::Fermi, 12).unwrap();
    assert!(fermi.max_deviation() > 1e-3);
}

#[test]
fn pair_picture_round_trip_from_walk() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let lat = Lattice::ring(7);
    let amps = (0..49 * 4).map(|_| random_amp(&mut rng)).collect();
    let psi = TwoParticleState::from_amplitudes(lat, 2, amps).unwrap();
    let mut fermi = psi.fermi_projection();
    fermi.normalize().unwrap();
    let gas = pair_from_walk(&fermi, PairPicture::Fermi).unwrap();
    assert!((gas.norm_sqr() - 1.0).abs() < 1e-12);
    assert_eq!(gas.sector_weights().keys().copied().collect::<Vec<_>>(), vec![2]);
}

#[test]
fn identity_symmetric_block_is_free_walk() {
    let lat = Lattice::window(30);
    let interacting = bose_collision_step(&hadamard_walk(), &CMat::identity(3, 3), lat).unwrap();
    let free = build_free_step(&hadamard_walk(), lat).unwrap();
    let start = up_up_at_origin(lat);
    let a = evolve(&start, &interacting, 25).unwrap();
    let b = evolve(&start, &free, 25).unwrap();
    assert!(a.max_diff(&b).unwrap() < 1e-14);
}

#[test]
fn hadamard_pair_block_moves_ballistically() {
    let lat = Lattice::window(22);
    let step = bose_collision_step(&hadamard_walk(), &hadamard_pair_block(), lat).unwrap();
    let mut psi = up_up_at_origin(lat);
    let mut direction = 0;
    for t in 1..=20i64 {
        psi = step.apply(&psi).unwrap();
        let dist = psi.joint_distribution();
        let sites = dist.sites();
        let occupied: Vec<(i64, i64, f64)> = (0..sites * sites)
            .map(|k| (k / sites, k % sites))
            .filter(|&(i, j)| dist.at(i, j) > 1e-14)
            .map(|(i, j)| (dist.coords[i], dist.coords[j], dist.at(i, j)))
            .collect();
        assert_eq!(occupied.len(), 1, "t = {t}");
        let (x1, x2, p) = occupied[0];
        if t == 1 {
            direction = x1.signum();
        }
        assert_ne!(direction, 0);
        assert_eq!((x1, x2), (direction * t, direction * t));
        assert!((p - 1.0).abs() < 1e-12);
    }
}

#[test]
fn some_random_symmetric_blocks_outrun_the_free_walk() {
    let t = 50;
    let lat = Lattice::window(t + 2);
    let free = evolve(&up_up_at_origin(lat), &build_free_step(&hadamard_walk(), lat).unwrap(), t).unwrap();
    let free_mass = beyond_free_reach(&free.joint_distribution(), t, 4, 2.0);
    assert!(free_mass < 0.01, "free walk {free_mass}");
    let masses: Vec<f64> = (0..100)
        .map(|seed| {
            let u = UnitaryCoin::haar_random(3, &mut ChaCha8Rng::seed_from_u64(seed));
            let step = bose_collision_step(&hadamard_walk(), u.matrix(), lat).unwrap();
            let out = evolve(&up_up_at_origin(lat), &step, t).unwrap();
            beyond_free_reach(&out.joint_distribution(), t, 4, 2.0)
        })
        .collect();
    let hits = masses.iter().filter(|&&m| m > 0.01).count();
    assert!(hits > 0, "no seed beyond t/sqrt2");
    assert_eq!(hits, 16);
    assert!(masses.iter().cloned().fold(0.0, f64::max) > FRAC_1_SQRT_2 / 2.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn step_preserves_norm(seed in any::<u64>(), cells in 2usize..10, n in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coin = random_cell(&mut rng);
        let s = random_gas(cells, &[n.min(2 * cells)], &mut rng);
        let out = qca_step(&s, &coin);
        prop_assert!((out.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
        let sectors = |g: &GasState| g.sector_weights().into_keys().collect::<Vec<_>>();
        prop_assert_eq!(sectors(&out), sectors(&s));
    }

    #[test]
    fn step_is_linear_and_preserves_inner_products(seed in any::<u64>(), cells in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coin = random_cell(&mut rng);
        let a = random_gas(cells, &[1, 2], &mut rng);
        let b = random_gas(cells, &[1, 2], &mut rng);
        let before = a.inner(&b);
        let after = qca_step(&a, &coin).inner(&qca_step(&b, &coin));
        prop_assert!((before - after).norm() < 1e-12);
    }

    #[test]
    fn occupations_sum_to_particle_number(seed in any::<u64>(), cells in 2usize..10, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coin = random_cell(&mut rng);
        let s = qca_evolve(&random_gas(cells, &[n], &mut rng), &coin, 5);
        let total: f64 = s.occupations().iter().map(|(l, r)| l + r).sum();
        prop_assert!((total - n as f64).abs() < 1e-12);
    }
}
