mod common;

use blockade_core::dynamics::{evolve_expectation, initial_block_states, initial_weights, EvolveOptions, InitialSpec};
use blockade_core::hamiltonian::{build_block, build_observable, DriveParams, Observable};
use blockade_core::irrep::{
    blockaded_dimension, build_basis, collective_operators, enumerate_partitions, multiplicity, su3_dimension,
};
use blockade_core::linalg::HermitianEigen;
use blockade_core::oracle::{build_full_hamiltonian, TensorBasis};
use blockade_core::spin_model::{build_sm0, build_sm_pm, envelope, SpinModelConfig};
use blockade_core::state_prep::{
    apply_schedule, physical_schedule, synthesize_sequence, ScheduleKind, SymmetricTarget, SynthesisOptions,
};
use num_bigint::BigUint;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{commutator_violation, norm, random_drive, random_partition, random_unit_vector};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn blockaded_dimension_accounting() {
    for n in 1..=8usize {
        let total: BigUint = enumerate_partitions(n, true)
            .unwrap()
            .iter()
            .map(|l| multiplicity(l) * blockaded_dimension(l))
            .sum();
        assert_eq!(total, BigUint::from((1usize << n) + n * (1usize << (n - 1))), "n = {n}");
    }
}

#[test]
fn full_su3_accounting() {
    for n in 1..=6usize {
        let total: BigUint =
            enumerate_partitions(n, false).unwrap().iter().map(|l| multiplicity(l) * su3_dimension(l.p(), l.q())).sum();
        assert_eq!(total, BigUint::from(3usize.pow(n as u32)), "n = {n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn commutators_hold_on_top_row(seed in any::<u64>()) {
        let lambda = random_partition(&mut rng(seed), 40, false);
        let (name, dev) = commutator_violation(&lambda);
        prop_assert!(dev <= 1e-12, "{lambda}: {name} violated by {dev:e}");
    }

    #[test]
    fn ladder_pairs_and_diagonals(seed in any::<u64>()) {
        let lambda = random_partition(&mut rng(seed), 60, true);
        let basis = build_basis(&lambda).unwrap();
        let ops = collective_operators(&basis);
        prop_assert_eq!(ops.t_minus.to_dense(), ops.t_plus.to_dense().t().to_owned());
        prop_assert_eq!(ops.u_minus.to_dense(), ops.u_plus.to_dense().t().to_owned());
        prop_assert_eq!(ops.v_minus.to_dense(), ops.v_plus.to_dense().t().to_owned());
        for i in 0..basis.dim() {
            prop_assert_eq!(ops.t_z[i] + ops.u_z[i] - ops.v_z[i], 0.0);
        }
        for &(r, c, _) in ops.t_plus.entries() {
            prop_assert_eq!(basis.states()[r].row, basis.states()[c].row);
        }
        for &(r, c, _) in ops.u_plus.entries().iter().chain(ops.v_plus.entries()) {
            prop_assert_eq!((basis.states()[r].row, basis.states()[c].row), (0, 1));
        }
        prop_assert_eq!(basis.dim(), blockaded_dimension(&lambda));
    }

    #[test]
    fn blocks_are_hermitian(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lambda = random_partition(&mut r, 80, true);
        let h = build_block(&lambda, &random_drive(&mut r)).unwrap();
        let scale = h.matrix.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        prop_assert!(h.hermiticity_defect() <= 1e-12 * scale);
    }

    #[test]
    fn detuning_only_block_is_diagonal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lambda = random_partition(&mut r, 30, true);
        let (d1, d2) = (r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let h = build_block(&lambda, &DriveParams::real(0.0, 0.0, d1, d2)).unwrap();
        let basis = build_basis(&lambda).unwrap();
        for (i, s) in basis.states().iter().enumerate() {
            for j in 0..basis.dim() {
                let expect = if i == j { -d1 * s.n1 as f64 - (d1 + d2) * s.nr as f64 } else { 0.0 };
                prop_assert!((h.matrix[[i, j]] - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn occupations_add_up(seed in any::<u64>()) {
        let lambda = random_partition(&mut rng(seed), 50, true);
        let total = [Observable::N0, Observable::N1, Observable::Nr]
            .iter()
            .map(|&o| build_observable(&lambda, o).unwrap().matrix)
            .reduce(|a, b| a + b)
            .unwrap();
        for i in 0..total.nrows() {
            prop_assert_eq!(total[[i, i]], C64::new(lambda.n() as f64, 0.0));
        }
    }

    #[test]
    fn evolution_conserves_norm(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lambda = random_partition(&mut r, 60, true);
        let h = build_block(&lambda, &random_drive(&mut r)).unwrap();
        let psi = random_unit_vector(&mut r, h.dim());
        let eig = HermitianEigen::new(&h.matrix).unwrap();
        for t in [0.3, 7.0, r.random_range(0.0..500.0)] {
            prop_assert!((norm(&eig.evolve(&psi, t)) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn weights_sum_to_one(n0 in 0usize..200, n1 in 0usize..200) {
        prop_assume!(n0 + n1 > 0);
        let spec = InitialSpec::new(n0, n1).unwrap();
        let weights = initial_weights(&spec);
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for (lambda, w) in &weights {
            prop_assert!(*w > 0.0);
            prop_assert!(lambda.p() >= n0.abs_diff(n1));
        }
        for s in initial_block_states(&spec).unwrap() {
            prop_assert!((norm(&s.amplitudes) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn expectations_stay_physical(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=40);
        let n0 = r.random_range(0..=n);
        let spec = InitialSpec::new(n0, n - n0).unwrap();
        let drive = random_drive(&mut r);
        let times: Vec<f64> = (0..40).map(|i| 0.5 * i as f64).collect();
        let opts = EvolveOptions::default();
        let series: Vec<Vec<f64>> = [Observable::N0, Observable::N1, Observable::Nr]
            .iter()
            .map(|&o| evolve_expectation(&spec, &drive, o, &times, &opts).unwrap().values)
            .collect();
        for i in 0..times.len() {
            prop_assert!((series[0][i] + series[1][i] + series[2][i] - n as f64).abs() < 1e-10);
            prop_assert!(series[2][i] > -1e-12 && series[2][i] < 1.0 + 1e-12);
        }
        prop_assert!(series[2][0].abs() < 1e-14);
    }

    #[test]
    fn oracle_hamiltonian_is_permutation_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=6);
        let basis = TensorBasis::new(n).unwrap();
        let h = build_full_hamiltonian(&basis, &random_drive(&mut r)).unwrap();
        let i = r.random_range(0..n);
        let j = (i + r.random_range(1..n)) % n;
        prop_assert!(h.permutation_defect(&basis.transposition(i, j)) < 1e-14);
    }
}

fn random_target(r: &mut ChaCha8Rng, n: usize) -> SymmetricTarget {
    SymmetricTarget::new(random_unit_vector(r, n + 1)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn synthesized_schedules_reach_their_target(seed in any::<u64>(), shorten in any::<bool>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=30);
        let target = random_target(&mut r, n);
        let schedule = synthesize_sequence(&target, &SynthesisOptions { shorten }).unwrap();
        prop_assert!(schedule.len() <= 2 * n);
        prop_assert_eq!(schedule.kind, ScheduleKind::Effective);
        let outcome = apply_schedule(&schedule, n).unwrap();
        prop_assert!(target.fidelity(&outcome.amplitudes) >= 1.0 - 1e-9);

        let physical = physical_schedule(&schedule);
        prop_assert!(physical.len() <= 4 * n);
        prop_assert_eq!(physical.kind, ScheduleKind::Physical);
        let outcome = apply_schedule(&physical, n).unwrap();
        prop_assert!(target.fidelity(&outcome.amplitudes) >= 1.0 - 1e-9);
        prop_assert!(!outcome.leakage_warning());
    }

    #[test]
    fn spin_models_conserve_norm(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=60);
        let drive = DriveParams::real(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), 0.0);
        let cfg = SpinModelConfig { n, drive, times: vec![0.0] };
        let t = r.random_range(0.0..100.0);
        let (plus, minus) = build_sm_pm(&cfg).unwrap();
        for h in [plus, minus, build_sm0(&cfg).unwrap()] {
            let eig = HermitianEigen::new(&h.mapv(|x| C64::new(x, 0.0))).unwrap();
            let psi = random_unit_vector(&mut r, h.nrows());
            prop_assert!((norm(&eig.evolve(&psi, t)) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn envelope_ignores_rydberg_drive_sign(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=40);
        let (o1, o2, d1) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let times: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let a = envelope(&SpinModelConfig { n, drive: DriveParams::real(o1, o2, d1, 0.0), times: times.clone() }).unwrap();
        let b = envelope(&SpinModelConfig { n, drive: DriveParams::real(o1, -o2, d1, 0.0), times }).unwrap();
        for (x, y) in a.overlap_abs.iter().zip(&b.overlap_abs) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        for i in 0..a.times.len() {
            prop_assert!(a.lower[i] <= a.rydberg[i] + 1e-12 && a.rydberg[i] <= a.upper[i] + 1e-12);
        }
    }
}
