use fockpart_core::fock::{inner_product, n_component, occupation_state, superpose, Occupation};
use fockpart_core::testkit::{gaussian, max_entry_diff, random_state, random_tensor};
use fockpart_core::tensor::otimes;
use fockpart_core::{FockError, FockState, NTensor, SinglePartVec, Statistics, Symmetry, C64};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const STATS: [Statistics; 3] = [Statistics::Distinguishable, Statistics::Boson, Statistics::Fermion];

fn occupation(counts: &[usize]) -> Occupation {
    Occupation::new(counts.to_vec()).unwrap()
}

fn occupations(dim: usize, max_total: usize, fermion: bool) -> Vec<Occupation> {
    let cap = if fermion { 1 } else { max_total };
    let mut out = Vec::new();
    let mut counts = vec![0usize; dim];
    loop {
        if counts.iter().sum::<usize>() <= max_total {
            out.push(occupation(&counts));
        }
        let mut k = 0;
        loop {
            if k == dim {
                return out;
            }
            counts[k] += 1;
            if counts[k] <= cap {
                break;
            }
            counts[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn occupation_basis_is_orthonormal() {
    for stats in [Statistics::Boson, Statistics::Fermion] {
        let occs = occupations(3, 3, stats == Statistics::Fermion);
        let states: Vec<FockState> = occs.iter().map(|o| occupation_state(o, stats).unwrap()).collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let ip = inner_product(a, b).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - C64::new(want, 0.0)).norm() < 1e-12, "{stats} {} {}", occs[i], occs[j]);
            }
        }
    }
}

#[test]
fn distinguishable_occupation_states_are_unit_vectors() {
    for o in occupations(3, 4, false) {
        let s = occupation_state(&o, Statistics::Distinguishable).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn grading_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for stats in STATS {
        for _ in 0..20 {
            let a = random_state(3, stats, 3, &mut rng);
            let b = random_state(3, stats, 3, &mut rng);
            let (c1, c2) = (gaussian(&mut rng), gaussian(&mut rng));
            let s = superpose(&[(c1, a.clone()), (c2, b.clone())]).unwrap();
            for n in 0..=3 {
                let want = n_component(&a, n).scaled(c1).axpy(c2, &n_component(&b, n)).unwrap();
                assert!(max_entry_diff(&n_component(&s, n), &want) < 1e-12);
            }
        }
    }
}

#[test]
fn boson_states_reject_unsymmetric_tensors() {
    let e = |j| NTensor::from_vec(&SinglePartVec::basis(2, j).unwrap());
    let t = otimes(&e(0), &e(1)).unwrap();
    assert!(matches!(FockState::from_tensor(t.clone(), Statistics::Boson), Err(FockError::SymmetryViolation(_))));
    assert!(matches!(FockState::from_tensor(t, Statistics::Fermion), Err(FockError::SymmetryViolation(_))));
}

#[test]
fn stored_tensors_are_permutation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for stats in [Statistics::Boson, Statistics::Fermion] {
        let s = random_state(4, stats, 4, &mut rng);
        let mut checked = 0;
        for (n, t) in s.components() {
            if n < 2 {
                continue;
            }
            let mut perm: Vec<usize> = (0..n).collect();
            for _ in 0..100 {
                perm.shuffle(&mut rng);
                let sign = if stats == Statistics::Fermion { parity(&perm) } else { 1.0 };
                let p = t.permute_slots(&perm).unwrap();
                assert!(max_entry_diff(&p, &t.scaled(C64::new(sign, 0.0))) < 1e-12);
                checked += 1;
            }
        }
        assert!(checked > 0 || s.max_particles() < Some(2));
    }
}

fn parity(perm: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 { 1.0 } else { -1.0 }
}

#[test]
fn fermion_components_vanish_above_dim() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for d in 1..=3 {
        let t = random_tensor(d + 1, d, Statistics::Fermion, &mut rng);
        assert!(t.is_zero());
        let s = random_state(d, Statistics::Fermion, 5, &mut rng);
        assert!(s.max_particles().unwrap() <= d);
    }
}

#[test]
fn pauli_violations_are_rejected() {
    let err = occupation_state(&occupation(&[0, 2]), Statistics::Fermion).unwrap_err();
    assert_eq!(err, FockError::PauliViolation { mode: 1, count: 2 });
}

#[test]
fn symmetric_tag_requires_complete_orbits() {
    let half = NTensor::from_entries(2, 2, Symmetry::Symmetric, [(vec![0, 1], C64::new(1.0, 0.0))]);
    assert!(matches!(half, Err(FockError::SymmetryViolation(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn occupation_views_round_trip(counts in prop::collection::vec(0usize..3, 1..4), stats_ix in 0usize..2) {
        let stats = [Statistics::Boson, Statistics::Fermion][stats_ix];
        let counts: Vec<usize> = if stats == Statistics::Fermion { counts.iter().map(|c| c % 2).collect() } else { counts };
        let o = occupation(&counts);
        let s = occupation_state(&o, stats).unwrap();
        let amps = s.occupation_amplitudes().unwrap();
        prop_assert_eq!(amps.len(), 1);
        prop_assert!((amps[&o] - C64::new(1.0, 0.0)).norm() < 1e-12);
        let back = FockState::from_occupations(o.dim(), stats, amps, None).unwrap();
        prop_assert!(max_entry_diff(&back.component(o.total()), &s.component(o.total())) < 1e-12);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(seed in any::<u64>(), stats_ix in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let stats = STATS[stats_ix];
        let a = random_state(3, stats, 3, &mut rng);
        let b = random_state(3, stats, 3, &mut rng);
        let ab = inner_product(&a, &b).unwrap();
        let ba = inner_product(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-10 * (1.0 + ab.norm()));
    }
}
