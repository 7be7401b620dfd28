//! Tensor products of n-particle tensors, (anti)symmetrization and matrix
//! flattenings.
//!
//! Products use the plain permutation-sum convention: `symmetrize` adds up all
//! n! slot permutations without averaging. The binary `vee` and `wedge`
//! divide by `n_A!·n_B!` so that iterating them is associative and agrees
//! with the single permutation sum over all factors:
//! `(a ∨ b) ∨ c = a ∨ (b ∨ c) = Σ_π (a⊗b⊗c)∘π`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;

use crate::combin::{all_permutations, factorial};
use crate::error::{FockError, Result};
use crate::fock::{flat_index, NTensor, Symmetry, C64, DENSE_LIMIT, ZERO};

fn check_dims(a: &NTensor, b: &NTensor) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(FockError::IncompatibleStates(format!(
            "tensor product of {}-mode and {}-mode tensors",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// T[i⧺j] = A[i]·B[j].
pub fn otimes(a: &NTensor, b: &NTensor) -> Result<NTensor> {
    check_dims(a, b)?;
    for t in [a, b] {
        if t.n() > 1 && t.symmetry() != Symmetry::None {
            return Err(FockError::SymmetryViolation(
                "⊗ takes untagged tensors; use ∨ or ∧ for (anti)symmetric factors".into(),
            ));
        }
    }
    Ok(raw_product(a, b))
}

fn raw_product(a: &NTensor, b: &NTensor) -> NTensor {
    let mut map = BTreeMap::new();
    for (ka, va) in a.entries() {
        for (kb, vb) in b.entries() {
            let mut k = ka.clone();
            k.extend_from_slice(kb);
            map.insert(k, va * vb);
        }
    }
    NTensor::from_map(a.n() + b.n(), a.dim(), Symmetry::None, map)
}

fn require_symmetry(t: &NTensor, symmetry: Symmetry) -> Result<()> {
    if t.n() <= 1 || t.symmetry() == symmetry {
        return Ok(());
    }
    t.clone().with_symmetry(symmetry).map(|_| ())
}

/// Symmetric product, normalized so that `ψ ∨ ψ = 2·ψ⊗ψ` and
/// `|0⟩ ∨ |1⟩ = |0⟩⊗|1⟩ + |1⟩⊗|0⟩`.
pub fn vee(a: &NTensor, b: &NTensor) -> Result<NTensor> {
    check_dims(a, b)?;
    require_symmetry(a, Symmetry::Symmetric)?;
    require_symmetry(b, Symmetry::Symmetric)?;
    let s = symmetrize(&raw_product(a, b));
    Ok(s.scaled(C64::new(1.0 / (factorial(a.n()) * factorial(b.n())), 0.0)))
}

/// Antisymmetric product, normalized so that `|0⟩ ∧ |1⟩ = |0⟩⊗|1⟩ − |1⟩⊗|0⟩`.
pub fn wedge(a: &NTensor, b: &NTensor) -> Result<NTensor> {
    check_dims(a, b)?;
    require_symmetry(a, Symmetry::Antisymmetric)?;
    require_symmetry(b, Symmetry::Antisymmetric)?;
    let s = antisymmetrize(&raw_product(a, b));
    Ok(s.scaled(C64::new(1.0 / (factorial(a.n()) * factorial(b.n())), 0.0)))
}

/// Σ_π T∘π.
pub fn symmetrize(t: &NTensor) -> NTensor {
    permutation_sum(t, false)
}

/// Σ_π sign(π)·T∘π.
pub fn antisymmetrize(t: &NTensor) -> NTensor {
    permutation_sum(t, true)
}

fn permutation_sum(t: &NTensor, signed: bool) -> NTensor {
    let perms = all_permutations(t.n());
    let mut map: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
    for (key, v) in t.entries() {
        for (perm, sign) in &perms {
            let k: Vec<usize> = perm.iter().map(|&p| key[p]).collect();
            let w = if signed { v * sign } else { *v };
            *map.entry(k).or_insert(ZERO) += w;
        }
    }
    let symmetry = match (t.n(), signed) {
        (0 | 1, _) => Symmetry::None,
        (_, false) => Symmetry::Symmetric,
        (_, true) => Symmetry::Antisymmetric,
    };
    NTensor::from_map(t.n(), t.dim(), symmetry, map)
}

/// A tensor reshaped into a matrix: `rows` lists the particle slots (0-based,
/// ascending) whose indices form the row, the remaining slots form the
/// column. Both are row-major with the lowest slot most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct Flattening {
    pub rows: Vec<usize>,
    pub matrix: DMatrix<C64>,
}

fn split_slots(n: usize, rows: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut r = rows.to_vec();
    r.sort_unstable();
    r.dedup();
    if r.len() != rows.len() || r.iter().any(|&s| s >= n) {
        return Err(FockError::InvalidCut(format!("{rows:?} is not a set of slots of an {n}-particle tensor")));
    }
    if r.is_empty() || r.len() == n {
        return Err(FockError::InvalidCut(format!("{rows:?} must be a nonempty proper subset of {n} slots")));
    }
    let cols = (0..n).filter(|s| !r.contains(s)).collect();
    Ok((r, cols))
}

pub fn flatten(t: &NTensor, rows: &[usize]) -> Result<Flattening> {
    let (rows, cols) = split_slots(t.n(), rows)?;
    let d = t.dim() as f64;
    let (nr, nc) = (d.powi(rows.len() as i32), d.powi(cols.len() as i32));
    if nr * nc > DENSE_LIMIT as f64 {
        return Err(FockError::TooLarge(format!("{nr}×{nc} flattening")));
    }
    let mut m = DMatrix::from_element(nr as usize, nc as usize, ZERO);
    for (key, v) in t.entries() {
        let rk: Vec<usize> = rows.iter().map(|&s| key[s]).collect();
        let ck: Vec<usize> = cols.iter().map(|&s| key[s]).collect();
        m[(flat_index(&rk, t.dim()), flat_index(&ck, t.dim()))] = *v;
    }
    Ok(Flattening { rows, matrix: m })
}

/// Inverse of [`flatten`] for an `n`-slot tensor over `dim` modes.
/// The result is untagged.
pub fn unflatten(f: &Flattening, n: usize, dim: usize) -> Result<NTensor> {
    let (rows, cols) = split_slots(n, &f.rows)?;
    let (nr, nc) = (dim.pow(rows.len() as u32), dim.pow(cols.len() as u32));
    if f.matrix.nrows() != nr || f.matrix.ncols() != nc {
        return Err(FockError::InvalidDimension(format!(
            "{}×{} matrix does not match an {n}-slot flattening over {dim} modes",
            f.matrix.nrows(),
            f.matrix.ncols()
        )));
    }
    let mut map = BTreeMap::new();
    for r in 0..nr {
        for c in 0..nc {
            let v = f.matrix[(r, c)];
            if v == ZERO {
                continue;
            }
            let mut key = vec![0; n];
            for (slot, idx) in rows.iter().zip(digits(r, dim, rows.len())) {
                key[*slot] = idx;
            }
            for (slot, idx) in cols.iter().zip(digits(c, dim, cols.len())) {
                key[*slot] = idx;
            }
            map.insert(key, v);
        }
    }
    Ok(NTensor::from_map(n, dim, Symmetry::None, map))
}

fn digits(mut x: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in (0..len).rev() {
        out[slot] = x % base;
        x /= base;
    }
    out
}

/// Builds the matrix of (row key, column key, value) triples keeping only
/// the rows and columns that actually occur. Ranks and singular values equal
/// those of the full flattening; row and column order follow first
/// appearance in key order.
pub(crate) fn compact_matrix<I>(triples: I) -> DMatrix<C64>
where
    I: IntoIterator<Item = (Vec<usize>, Vec<usize>, C64)>,
{
    let mut rows: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut cols: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut cells = Vec::new();
    for (r, c, v) in triples {
        let nr = rows.len();
        let ri = *rows.entry(r).or_insert(nr);
        let nc = cols.len();
        let ci = *cols.entry(c).or_insert(nc);
        cells.push((ri, ci, v));
    }
    let mut m = DMatrix::from_element(rows.len().max(1), cols.len().max(1), ZERO);
    for (r, c, v) in cells {
        m[(r, c)] += v;
    }
    m
}

/// Compact version of `flatten(t, [slot])`.
pub(crate) fn compact_slot_flattening(t: &NTensor, slot: usize) -> DMatrix<C64> {
    compact_matrix(t.entries().iter().map(|(k, v)| {
        let mut rest = k.clone();
        let row = rest.remove(slot);
        (vec![row], rest, *v)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{SinglePartVec, ONE};
    use approx::assert_abs_diff_eq;

    fn ket(d: usize, j: usize) -> NTensor {
        NTensor::from_vec(&SinglePartVec::basis(d, j).unwrap())
    }

    fn vec_t(a: &[f64]) -> NTensor {
        NTensor::from_vec(&SinglePartVec::from_real(a).unwrap())
    }

    #[test]
    fn otimes_examples() {
        let t = otimes(&ket(2, 0), &ket(2, 1)).unwrap();
        assert_eq!(t.entries().len(), 1);
        assert_eq!(t.get(&[0, 1]), ONE);

        let s = NTensor::scalar(ONE, 2);
        let u = otimes(&s, &t).unwrap();
        assert_eq!(u.entries(), t.entries());

        let p = vec_t(&[1.0, 1.0]);
        let pp = otimes(&p, &p).unwrap();
        for k in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            assert_eq!(pp.get(&k), ONE);
        }
        assert!(matches!(otimes(&ket(2, 0), &ket(3, 0)), Err(FockError::IncompatibleStates(_))));
    }

    #[test]
    fn vee_examples() {
        let t = vee(&ket(3, 0), &ket(3, 1)).unwrap();
        assert_eq!(t.get(&[0, 1]), ONE);
        assert_eq!(t.get(&[1, 0]), ONE);
        assert_eq!(t.entries().len(), 2);

        let psi = NTensor::from_vec(&SinglePartVec::new(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.7)]).unwrap());
        let vv = vee(&psi, &psi).unwrap();
        let oo = otimes(&psi, &psi).unwrap().scaled(C64::new(2.0, 0.0));
        for (k, v) in oo.entries() {
            assert_abs_diff_eq!((vv.get(k) - v).norm(), 0.0, epsilon = 1e-15);
        }

        let three = vee(&t, &ket(3, 2)).unwrap();
        assert_eq!(three.entries().len(), 6);
        for v in three.entries().values() {
            assert_abs_diff_eq!((v - ONE).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn wedge_examples() {
        let t = wedge(&ket(3, 0), &ket(3, 1)).unwrap();
        assert_eq!(t.get(&[0, 1]), ONE);
        assert_eq!(t.get(&[1, 0]), -ONE);

        let psi = vec_t(&[0.4, -1.3, 0.2]);
        assert!(wedge(&psi, &psi).unwrap().is_zero());

        let three = wedge(&t, &ket(3, 2)).unwrap();
        assert_eq!(three.entries().len(), 6);
        for (k, v) in three.entries() {
            let sign = crate::combin::parity_sign(k);
            assert_abs_diff_eq!((v - C64::new(sign, 0.0)).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn wedge_rejects_symmetric_factor() {
        let s = vee(&ket(2, 0), &ket(2, 1)).unwrap();
        assert!(matches!(wedge(&s, &ket(2, 0)), Err(FockError::SymmetryViolation(_))));
    }

    #[test]
    fn symmetrize_examples() {
        let t = otimes(&ket(2, 0), &ket(2, 1)).unwrap();
        let s = symmetrize(&t);
        assert_eq!(s, vee(&ket(2, 0), &ket(2, 1)).unwrap());
        assert!(antisymmetrize(&otimes(&ket(2, 0), &ket(2, 0)).unwrap()).is_zero());
        let ss = symmetrize(&s);
        for (k, v) in ss.entries() {
            assert_abs_diff_eq!((v - s.get(k) * 2.0).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn flatten_examples() {
        let f = flatten(&otimes(&ket(2, 0), &ket(2, 1)).unwrap(), &[0]).unwrap();
        assert_eq!(f.matrix, DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]));
        let f = flatten(&vee(&ket(2, 0), &ket(2, 1)).unwrap(), &[0]).unwrap();
        assert_eq!(f.matrix, DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]));
        let f = flatten(&wedge(&ket(2, 0), &ket(2, 1)).unwrap(), &[0]).unwrap();
        assert_eq!(f.matrix, DMatrix::from_row_slice(2, 2, &[ZERO, ONE, -ONE, ZERO]));
    }

    #[test]
    fn flatten_rejects_bad_cuts() {
        let t = otimes(&ket(2, 0), &ket(2, 1)).unwrap();
        assert!(matches!(flatten(&t, &[]), Err(FockError::InvalidCut(_))));
        assert!(matches!(flatten(&t, &[0, 1]), Err(FockError::InvalidCut(_))));
        assert!(matches!(flatten(&t, &[2]), Err(FockError::InvalidCut(_))));
    }

    #[test]
    fn flatten_round_trip_middle_slot() {
        let t = otimes(&otimes(&vec_t(&[1.0, 2.0, 0.0]), &vec_t(&[0.0, -1.0, 3.0])).unwrap(), &vec_t(&[5.0, 0.0, 1.0]))
            .unwrap();
        let f = flatten(&t, &[1]).unwrap();
        assert_eq!((f.matrix.nrows(), f.matrix.ncols()), (3, 9));
        assert_eq!(f.matrix[(2, 3)], C64::new(2.0 * 3.0 * 5.0, 0.0));
        assert_eq!(unflatten(&f, 3, 3).unwrap().entries(), t.entries());
    }
}
