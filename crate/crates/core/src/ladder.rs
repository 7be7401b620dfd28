//! Creation and annihilation operators on Fock states.
//!
//! Scale conventions, per statistics, for the n → n+1 step:
//!
//! | statistics      | `create(φ)` on ψ⁽ⁿ⁾                               | `annihilate(φ)` on ψ⁽ᵐ⁾         |
//! |-----------------|---------------------------------------------------|---------------------------------|
//! | distinguishable | φ⊗ψ                                               | ⟨φ| on slot 0                   |
//! | boson           | (n+1)⁻¹ Σ_p insert φ at slot p  (= P_sym(φ⊗ψ))    | ⟨φ| on slot 0                   |
//! | fermion         | (n+1)^{-1/2} Σ_p (−1)^p insert φ at slot p        | √m · ⟨φ| on slot 0              |
//!
//! The bosonic creator has no √(n+1) factor: repeated application along one
//! mode gives the normalized power, `(a_φ†)ⁿ|vac⟩ = φ^{⊗n}`. The fermionic
//! creator is the standard one, so occupation states of orthonormal modes are
//! unit vectors. Each annihilator is the exact adjoint of its creator.

use std::collections::BTreeMap;

use crate::error::{FockError, Result};
use crate::fock::{FockState, NTensor, Occupation, SinglePartVec, Statistics, Symmetry, C64, DEFAULT_NMAX, ONE, ZERO};

fn check_dim(phi: &SinglePartVec, psi: &FockState) -> Result<()> {
    if phi.dim() != psi.dim() {
        return Err(FockError::IncompatibleStates(format!(
            "{}-mode vector acting on a {}-mode state",
            phi.dim(),
            psi.dim()
        )));
    }
    Ok(())
}

fn raise(phi: &SinglePartVec, t: &NTensor, statistics: Statistics) -> NTensor {
    let n = t.n();
    let (positions, scale) = match statistics {
        Statistics::Distinguishable => (1, 1.0),
        Statistics::Boson => (n + 1, 1.0 / (n + 1) as f64),
        Statistics::Fermion => (n + 1, 1.0 / ((n + 1) as f64).sqrt()),
    };
    let mut map: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
    for (key, v) in t.entries() {
        for p in 0..positions {
            let sign = if statistics == Statistics::Fermion && p % 2 == 1 { -scale } else { scale };
            for (j, a) in phi.amps().iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                let mut k = Vec::with_capacity(n + 1);
                k.extend_from_slice(&key[..p]);
                k.push(j);
                k.extend_from_slice(&key[p..]);
                *map.entry(k).or_insert(ZERO) += a * v * sign;
            }
        }
    }
    let symmetry = if n < 1 { Symmetry::None } else { statistics.symmetry() };
    NTensor::from_map(n + 1, t.dim(), symmetry, map)
}

/// a_φ† Ψ. Fails with `TruncationExceeded` if a component would exceed the
/// state's `nmax`.
pub fn create(phi: &SinglePartVec, psi: &FockState) -> Result<FockState> {
    check_dim(phi, psi)?;
    if let Some(top) = psi.max_particles() {
        if top + 1 > psi.nmax() {
            return Err(FockError::TruncationExceeded { needed: top + 1, nmax: psi.nmax() });
        }
    }
    let comps: Vec<NTensor> = psi.components().map(|(_, t)| raise(phi, t, psi.statistics())).collect();
    FockState::from_components(psi.dim(), psi.statistics(), comps, Some(psi.nmax()))
}

/// a_φ Ψ, the adjoint of [`create`].
pub fn annihilate(phi: &SinglePartVec, psi: &FockState) -> Result<FockState> {
    check_dim(phi, psi)?;
    let mut comps = Vec::new();
    for (m, t) in psi.components() {
        if m == 0 {
            continue;
        }
        let lowered = t.contract_first(phi)?;
        comps.push(match psi.statistics() {
            Statistics::Fermion => lowered.scaled(C64::new((m as f64).sqrt(), 0.0)),
            _ => lowered,
        });
    }
    FockState::from_components(psi.dim(), psi.statistics(), comps, Some(psi.nmax()))
}

/// `a₀†^{n₀} a₁†^{n₁} ⋯ |vac⟩`, normalized. The highest mode acts first, so
/// for distinguishable particles the result is |0⟩^{⊗n₀}⊗|1⟩^{⊗n₁}⊗⋯.
pub fn mode_monomial(occ: &Occupation, statistics: Statistics) -> Result<FockState> {
    if statistics == Statistics::Fermion {
        occ.check_pauli()?;
    }
    let dim = occ.dim();
    let mut psi = FockState::vacuum(dim, statistics)?.with_nmax(occ.total().max(DEFAULT_NMAX))?;
    for (j, &count) in occ.counts().iter().enumerate().rev() {
        let mode = SinglePartVec::basis(dim, j)?;
        for _ in 0..count {
            psi = create(&mode, &psi)?;
        }
    }
    psi.normalized()
}

/// Σ_{n ≤ nmax} coeffs[n]·φ^{⊗n}, i.e. Σ coeffs[n]·(a_φ†)ⁿ|vac⟩ for
/// distinguishable particles and bosons. Missing coefficients count as zero.
pub fn mode_series(phi: &SinglePartVec, coeffs: &[C64], nmax: usize) -> Result<FockState> {
    mode_series_with(phi, coeffs, nmax, Statistics::Boson)
}

/// [`mode_series`] with explicit statistics. A fermionic mode holds at most
/// one particle, so fermionic series need `nmax ≤ 1`.
pub fn mode_series_with(phi: &SinglePartVec, coeffs: &[C64], nmax: usize, statistics: Statistics) -> Result<FockState> {
    if phi.norm() == 0.0 {
        return Err(FockError::ZeroState);
    }
    if statistics == Statistics::Fermion && nmax > 1 {
        let mode = phi
            .amps()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(j, _)| j)
            .unwrap_or(0);
        return Err(FockError::PauliViolation { mode, count: nmax });
    }
    let dim = phi.dim();
    let single = NTensor::from_vec(phi);
    let mut power = NTensor::scalar(ONE, dim);
    let mut comps = Vec::new();
    for n in 0..=nmax {
        if n > 0 {
            power = crate::tensor::otimes(&power, &single)?;
        }
        let c = coeffs.get(n).copied().unwrap_or(ZERO);
        if c != ZERO {
            comps.push(power.scaled(c));
        }
    }
    FockState::from_components(dim, statistics, comps, Some(nmax))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{equal_up_to_phase, occupation_state};
    use approx::assert_abs_diff_eq;

    fn occ(c: &[usize]) -> Occupation {
        Occupation::new(c.to_vec()).unwrap()
    }

    fn basis(d: usize, j: usize) -> SinglePartVec {
        SinglePartVec::basis(d, j).unwrap()
    }

    const ALL: [Statistics; 3] = [Statistics::Distinguishable, Statistics::Boson, Statistics::Fermion];

    #[test]
    fn create_on_vacuum_gives_single_excitation() {
        for stats in ALL {
            let vac = FockState::vacuum(3, stats).unwrap();
            let s = create(&basis(3, 0), &vac).unwrap();
            let o = occupation_state(&occ(&[1, 0, 0]), stats).unwrap();
            assert_eq!(s.component(1), o.component(1));
        }
    }

    #[test]
    fn fermion_double_creation_vanishes() {
        let vac = FockState::vacuum(2, Statistics::Fermion).unwrap();
        let s = create(&basis(2, 0), &create(&basis(2, 0), &vac).unwrap()).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn boson_pair_is_vee() {
        let vac = FockState::vacuum(2, Statistics::Boson).unwrap();
        let s = create(&basis(2, 1), &create(&basis(2, 0), &vac).unwrap()).unwrap();
        let o = occupation_state(&occ(&[1, 1]), Statistics::Boson).unwrap();
        assert!(equal_up_to_phase(&s, &o, 1e-12).unwrap());
        let t = s.component(2);
        assert_eq!(t.get(&[0, 1]), t.get(&[1, 0]));
    }

    #[test]
    fn boson_single_mode_powers_are_normalized() {
        let mut s = FockState::vacuum(2, Statistics::Boson).unwrap();
        for _ in 0..5 {
            s = create(&basis(2, 1), &s).unwrap();
            assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn annihilation_examples() {
        for stats in ALL {
            let vac = FockState::vacuum(2, stats).unwrap();
            assert!(annihilate(&basis(2, 0), &vac).unwrap().is_zero());
            let one = occupation_state(&occ(&[1, 0]), stats).unwrap();
            let down = annihilate(&basis(2, 0), &one).unwrap();
            assert_abs_diff_eq!((down.inner(&vac).unwrap() - ONE).norm(), 0.0, epsilon = 1e-14);
            assert!(annihilate(&basis(2, 1), &one).unwrap().is_zero());
        }
    }

    #[test]
    fn truncation_is_enforced() {
        let s = FockState::vacuum(2, Statistics::Boson).unwrap().with_nmax(1).unwrap();
        let s = create(&basis(2, 0), &s).unwrap();
        assert_eq!(create(&basis(2, 0), &s), Err(FockError::TruncationExceeded { needed: 2, nmax: 1 }));
    }

    #[test]
    fn monomials_match_occupation_states() {
        for (stats, counts) in [
            (Statistics::Boson, vec![2, 1]),
            (Statistics::Fermion, vec![1, 1, 1, 1]),
            (Statistics::Boson, vec![0, 3]),
            (Statistics::Distinguishable, vec![1, 2, 1]),
        ] {
            let o = occ(&counts);
            let m = mode_monomial(&o, stats).unwrap();
            let s = occupation_state(&o, stats).unwrap();
            assert!(equal_up_to_phase(&m, &s, 1e-12).unwrap(), "{stats} {counts:?}");
        }
        let filled = mode_monomial(&occ(&[1, 1, 1, 1]), Statistics::Fermion).unwrap();
        assert_eq!(filled.component(4).nnz(), 24);
        let err = mode_monomial(&occ(&[2]), Statistics::Fermion).unwrap_err();
        assert_eq!(err, FockError::PauliViolation { mode: 0, count: 2 });
    }

    #[test]
    fn series_examples() {
        let phi = basis(1, 0);
        let coeffs: Vec<C64> = (0..=4).map(|n| C64::new(0.5f64.powi(n), 0.0)).collect();
        let s = mode_series(&phi, &coeffs, 4).unwrap();
        let amps = s.occupation_amplitudes().unwrap();
        for n in 0..=4 {
            assert_abs_diff_eq!(amps[&occ(&[n])].re, 0.5f64.powi(n as i32), epsilon = 1e-15);
        }
        let vac = mode_series(&basis(2, 1), &[ONE], 4).unwrap();
        assert_eq!(vac.max_particles(), Some(0));
        let single = mode_series(&basis(2, 1), &[ZERO, ONE], 4).unwrap();
        assert_eq!(single.component(1).get(&[1]), ONE);
        assert!(matches!(
            mode_series_with(&basis(2, 1), &coeffs, 2, Statistics::Fermion),
            Err(FockError::PauliViolation { .. })
        ));
    }
}
