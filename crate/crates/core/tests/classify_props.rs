use fockpart_core::classify::{classify_with, ClassifyConfig, Slot, Status};
use fockpart_core::testkit::{invariance_violations, oracle_verdicts, random_pair_state, random_state};
use fockpart_core::Statistics;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STATS: [Statistics; 3] = [Statistics::Distinguishable, Statistics::Boson, Statistics::Fermion];

#[test]
fn verdicts_survive_scaling_phases_and_unitaries() {
    let cfg = ClassifyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for stats in STATS {
        let mut seen = [0usize; 2];
        for _ in 0..50 {
            // Two or three fermions in at most three modes always form a
            // single determinant, so fermions get a fourth mode.
            let d = if stats == Statistics::Fermion { 4 } else { rng.gen_range(2..=3) };
            let psi = random_state(d, stats, 3, &mut rng);
            let bad = invariance_violations(&psi, &cfg, &mut rng);
            assert!(bad.is_empty(), "{stats}: {bad:?}");
            let r = classify_with(&psi, &cfg).unwrap();
            let slot = Slot::ALL.into_iter().find(|s| *s != Slot::Field && s.applies_to(stats)).unwrap();
            match r.status(slot) {
                Status::Factorizable => seen[0] += 1,
                Status::Entangled => seen[1] += 1,
                _ => {}
            }
        }
        assert!(seen[0] > 0 && seen[1] > 0, "{stats}: the sample should contain both verdicts, got {seen:?}");
    }
}

#[test]
fn identical_factorizable_implies_indistinguishable_factorizable() {
    let cfg = ClassifyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..60 {
        let psi = random_state(3, Statistics::Boson, 3, &mut rng);
        let r = classify_with(&psi, &cfg).unwrap();
        if r.status(Slot::ParticleIdenticalBoson) == Status::Factorizable {
            assert_eq!(r.status(Slot::ParticleIndistBoson), Status::Factorizable);
        }
        if r.status(Slot::ParticleIndistBoson) == Status::Entangled {
            assert_eq!(r.status(Slot::ParticleIdenticalBoson), Status::Entangled);
        }
    }
}

#[test]
fn rank_verdicts_agree_with_brute_force_oracle() {
    let cfg = ClassifyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for stats in STATS {
        for _ in 0..50 {
            let d = rng.gen_range(2..=3);
            let psi = random_pair_state(d, stats, &mut rng);
            let r = classify_with(&psi, &cfg).unwrap();
            for (slot, want) in oracle_verdicts(&psi.component(2), stats, &mut rng) {
                assert_eq!(r.status(slot), want, "{stats} d={d} {}", slot.as_str());
            }
        }
    }
}
