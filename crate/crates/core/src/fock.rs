//! Core state representations: single-particle vectors, n-particle tensors and
//! graded Fock states.
//!
//! Storage convention: the occupation-number basis is orthonormal. A bosonic
//! occupation state |n₀,n₁,…⟩ is stored as the symmetric tensor whose every
//! distinct arrangement of the key 0^{n₀}1^{n₁}⋯ carries the amplitude
//! 1/√(N!/∏nⱼ!); a fermionic one stores ±1/√N! on every ordering of its
//! occupied modes, with + on the ascending order; a distinguishable one is the
//! single product |0⟩^{⊗n₀}⊗|1⟩^{⊗n₁}⊗⋯. Every conversion between the
//! occupation view and the first-quantized view is therefore an isometry.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::combin::{arrangement_count, distinct_permutations, factorial, has_repeats, parity_sign};
use crate::error::{FockError, Result};

/// Amplitudes with modulus below this are dropped after arithmetic.
pub const PRUNE_TOL: f64 = 1e-14;

/// Default truncation bound on particle number and on infinite series.
pub const DEFAULT_NMAX: usize = 8;

/// Relative tolerance used when checking exchange symmetry of stored tensors.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Largest dense expansion (number of tensor entries) any routine will build.
pub(crate) const DENSE_LIMIT: usize = 1 << 22;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistics {
    Distinguishable,
    Boson,
    Fermion,
}

impl Statistics {
    /// Exchange symmetry every n-particle component must carry.
    pub fn symmetry(self) -> Symmetry {
        match self {
            Statistics::Distinguishable => Symmetry::None,
            Statistics::Boson => Symmetry::Symmetric,
            Statistics::Fermion => Symmetry::Antisymmetric,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Statistics::Distinguishable => "distinguishable",
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Statistics {
    type Err = FockError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "distinguishable" | "dist" => Ok(Statistics::Distinguishable),
            "boson" | "bosons" | "bosonic" => Ok(Statistics::Boson),
            "fermion" | "fermions" | "fermionic" => Ok(Statistics::Fermion),
            other => Err(FockError::InvalidParameter(format!("unknown statistics `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    None,
    Symmetric,
    Antisymmetric,
}

/// A vector in the one-particle space over the computational basis {|j⟩}.
/// No normalization is ever applied implicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct SinglePartVec {
    amps: Vec<C64>,
}

impl SinglePartVec {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(FockError::InvalidDimension("single-particle vector needs at least one mode".into()));
        }
        Ok(Self { amps })
    }

    /// The basis vector |j⟩ in `dim` modes.
    pub fn basis(dim: usize, j: usize) -> Result<Self> {
        if j >= dim {
            return Err(FockError::InvalidDimension(format!("mode {j} outside {dim} modes")));
        }
        let mut amps = vec![ZERO; dim];
        amps[j] = ONE;
        Ok(Self { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &SinglePartVec) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(FockError::IncompatibleStates(format!(
                "vector dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(FockError::ZeroState);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self { amps: self.amps.iter().map(|a| a * c).collect() }
    }

    pub fn add(&self, other: &SinglePartVec) -> Result<Self> {
        let dim = self.dim().max(other.dim());
        let a = self.padded(dim)?;
        let b = other.padded(dim)?;
        Ok(Self { amps: a.amps.iter().zip(&b.amps).map(|(x, y)| x + y).collect() })
    }

    /// Embeds the vector into a larger mode space with zero amplitudes.
    pub fn padded(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(FockError::InvalidDimension(format!("cannot shrink {} modes to {dim}", self.dim())));
        }
        let mut amps = self.amps.clone();
        amps.resize(dim, ZERO);
        Ok(Self { amps })
    }
}

/// Builds a single-particle vector from explicit amplitudes.
pub fn single_part(amps: &[C64]) -> Result<SinglePartVec> {
    SinglePartVec::new(amps.to_vec())
}

/// An n-index complex tensor over `dim` modes, stored sparsely.
///
/// Symmetric and antisymmetric tensors store every index permutation
/// explicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct NTensor {
    n: usize,
    dim: usize,
    symmetry: Symmetry,
    entries: BTreeMap<Vec<usize>, C64>,
}

impl NTensor {
    pub fn zero(n: usize, dim: usize, symmetry: Symmetry) -> Self {
        Self { n, dim, symmetry, entries: BTreeMap::new() }
    }

    /// The grade-0 tensor, i.e. a complex number.
    pub fn scalar(value: C64, dim: usize) -> Self {
        let mut t = Self::zero(0, dim, Symmetry::None);
        if value.norm() >= PRUNE_TOL {
            t.entries.insert(Vec::new(), value);
        }
        t
    }

    pub fn from_vec(v: &SinglePartVec) -> Self {
        let entries = v
            .amps()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() >= PRUNE_TOL)
            .map(|(j, &a)| (vec![j], a))
            .collect();
        Self { n: 1, dim: v.dim(), symmetry: Symmetry::None, entries }
    }

    /// Builds a tensor from (key, amplitude) pairs. Repeated keys accumulate.
    /// Keys are validated, tiny amplitudes pruned, and the claimed symmetry
    /// checked against the stored entries.
    pub fn from_entries<I>(n: usize, dim: usize, symmetry: Symmetry, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, C64)>,
    {
        if dim == 0 {
            return Err(FockError::InvalidDimension("tensor needs at least one mode".into()));
        }
        let mut map: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
        for (key, v) in entries {
            if key.len() != n {
                return Err(FockError::InvalidDimension(format!("key {key:?} has length {}, expected {n}", key.len())));
            }
            if let Some(&bad) = key.iter().find(|&&i| i >= dim) {
                return Err(FockError::InvalidDimension(format!("index {bad} outside {dim} modes")));
            }
            *map.entry(key).or_insert(ZERO) += v;
        }
        let t = Self::from_map(n, dim, symmetry, map);
        t.verify_symmetry()?;
        Ok(t)
    }

    /// Prunes and wraps an already-validated map.
    pub(crate) fn from_map(n: usize, dim: usize, symmetry: Symmetry, mut map: BTreeMap<Vec<usize>, C64>) -> Self {
        map.retain(|_, v| v.norm() >= PRUNE_TOL);
        Self { n, dim, symmetry, entries: map }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, C64> {
        &self.entries
    }

    pub fn get(&self, key: &[usize]) -> C64 {
        self.entries.get(key).copied().unwrap_or(ZERO)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.values().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn check_shape(&self, other: &NTensor) -> Result<()> {
        if self.n != other.n || self.dim != other.dim {
            return Err(FockError::IncompatibleStates(format!(
                "tensor shapes (n={}, d={}) and (n={}, d={})",
                self.n, self.dim, other.n, other.dim
            )));
        }
        Ok(())
    }

    /// Full tensor-space inner product ⟨self|other⟩.
    pub fn inner(&self, other: &NTensor) -> Result<C64> {
        self.check_shape(other)?;
        let (small, large, flip) =
            if self.nnz() <= other.nnz() { (self, other, false) } else { (other, self, true) };
        let mut acc = ZERO;
        for (k, v) in &small.entries {
            if let Some(w) = large.entries.get(k) {
                acc += if flip { w.conj() * v } else { v.conj() * w };
            }
        }
        Ok(acc)
    }

    pub fn scaled(&self, c: C64) -> Self {
        let mut out = self.clone();
        if c.norm() == 0.0 {
            out.entries.clear();
        } else {
            out.entries.values_mut().for_each(|v| *v *= c);
        }
        out
    }

    /// self + c·other. The result keeps the symmetry tag only if both agree.
    pub fn axpy(&self, c: C64, other: &NTensor) -> Result<Self> {
        self.check_shape(other)?;
        let mut map = self.entries.clone();
        for (k, v) in &other.entries {
            *map.entry(k.clone()).or_insert(ZERO) += c * v;
        }
        let sym = if self.symmetry == other.symmetry { self.symmetry } else { Symmetry::None };
        Ok(Self::from_map(self.n, self.dim, sym, map))
    }

    /// Checks the stored entries against the symmetry tag, grouping keys by
    /// their sorted form so every class is visited once.
    pub fn verify_symmetry(&self) -> Result<()> {
        if self.n <= 1 || self.symmetry == Symmetry::None {
            return Ok(());
        }
        let scale = self.entries.values().map(|v| v.norm()).fold(0.0, f64::max);
        let tol = SYMMETRY_TOL * scale.max(1e-300) + PRUNE_TOL;
        let antisym = self.symmetry == Symmetry::Antisymmetric;
        let mut classes: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for (key, v) in &self.entries {
            let mut sorted = key.clone();
            sorted.sort_unstable();
            if antisym && has_repeats(&sorted) {
                return Err(FockError::SymmetryViolation(format!("antisymmetric tensor has repeated-index key {key:?}")));
            }
            let reference = self.get(&sorted);
            let expected = if antisym { reference * parity_sign(key) } else { reference };
            if (v - expected).norm() > tol {
                return Err(FockError::SymmetryViolation(format!(
                    "entry {key:?} = {v} disagrees with {sorted:?} = {reference}"
                )));
            }
            *classes.entry(sorted).or_insert(0) += 1;
        }
        for (sorted, present) in classes {
            let full = arrangement_count(&sorted);
            if (present as f64) < full && self.get(&sorted).norm() > tol {
                return Err(FockError::SymmetryViolation(format!(
                    "class {sorted:?} stores {present} of {full} permutations"
                )));
            }
        }
        Ok(())
    }

    /// Re-tags the tensor after checking that the entries carry `symmetry`.
    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Result<Self> {
        self.symmetry = symmetry;
        self.verify_symmetry()?;
        Ok(self)
    }

    /// Relabels slots: the entry at `key` moves to `key'` with
    /// `key'[s] = key[perm[s]]`. The result is untagged.
    pub fn permute_slots(&self, perm: &[usize]) -> Result<Self> {
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..self.n).collect::<Vec<_>>() {
            return Err(FockError::InvalidCut(format!("{perm:?} is not a permutation of {} slots", self.n)));
        }
        let map = self
            .entries
            .iter()
            .map(|(k, v)| (perm.iter().map(|&p| k[p]).collect(), *v))
            .collect();
        Ok(Self { n: self.n, dim: self.dim, symmetry: Symmetry::None, entries: map })
    }

    /// Applies the one-particle matrix `u` (dim × dim) to every slot.
    pub fn apply_single_particle(&self, u: &DMatrix<C64>) -> Result<Self> {
        if u.nrows() != self.dim || u.ncols() != self.dim {
            return Err(FockError::IncompatibleStates(format!(
                "{}×{} matrix on {} modes",
                u.nrows(),
                u.ncols(),
                self.dim
            )));
        }
        if (self.dim as f64).powi(self.n as i32) > DENSE_LIMIT as f64 {
            return Err(FockError::TooLarge(format!("{}^{} entries", self.dim, self.n)));
        }
        let mut cur = self.entries.clone();
        for slot in 0..self.n {
            let mut next: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
            for (key, v) in &cur {
                for i in 0..self.dim {
                    let coeff = u[(i, key[slot])];
                    if coeff.norm() == 0.0 {
                        continue;
                    }
                    let mut k = key.clone();
                    k[slot] = i;
                    *next.entry(k).or_insert(ZERO) += coeff * v;
                }
            }
            cur = next;
        }
        Ok(Self::from_map(self.n, self.dim, self.symmetry, cur))
    }

    /// Contracts the first slot against ⟨φ|: T'[rest] = Σᵢ φᵢ* T[i, rest].
    pub fn contract_first(&self, phi: &SinglePartVec) -> Result<Self> {
        if phi.dim() != self.dim {
            return Err(FockError::IncompatibleStates(format!("vector in {} modes, tensor in {}", phi.dim(), self.dim)));
        }
        if self.n == 0 {
            return Err(FockError::InvalidCut("cannot contract a scalar".into()));
        }
        let mut map: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
        for (key, v) in &self.entries {
            let c = phi.amps()[key[0]].conj();
            if c.norm() == 0.0 {
                continue;
            }
            *map.entry(key[1..].to_vec()).or_insert(ZERO) += c * v;
        }
        Ok(Self::from_map(self.n - 1, self.dim, self.symmetry, map))
    }

    /// Dense row-major copy (slot 0 most significant).
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        let size = (self.dim as f64).powi(self.n as i32);
        if size > DENSE_LIMIT as f64 {
            return Err(FockError::TooLarge(format!("{}^{} entries", self.dim, self.n)));
        }
        let mut out = vec![ZERO; size as usize];
        for (key, v) in &self.entries {
            out[flat_index(key, self.dim)] = *v;
        }
        Ok(out)
    }

    /// The d × d coefficient matrix of a two-particle tensor.
    pub fn matrix(&self) -> Result<DMatrix<C64>> {
        if self.n != 2 {
            return Err(FockError::InvalidCut(format!("matrix view needs n = 2, got {}", self.n)));
        }
        let mut m = DMatrix::from_element(self.dim, self.dim, ZERO);
        for (key, v) in &self.entries {
            m[(key[0], key[1])] = *v;
        }
        Ok(m)
    }
}

pub(crate) fn flat_index(key: &[usize], dim: usize) -> usize {
    key.iter().fold(0, |acc, &i| acc * dim + i)
}

/// Per-mode occupation numbers (n₀, n₁, …, n_{d−1}).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation(Vec<usize>);

impl Occupation {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(FockError::InvalidDimension("occupation needs at least one mode".into()));
        }
        Ok(Self(counts))
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// The mode-ordered key 0^{n₀} 1^{n₁} ⋯.
    pub fn canonical_key(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(j, &c)| std::iter::repeat_n(j, c)).collect()
    }

    pub fn from_key(key: &[usize], dim: usize) -> Self {
        let mut counts = vec![0; dim];
        for &k in key {
            counts[k] += 1;
        }
        Self(counts)
    }

    pub fn check_pauli(&self) -> Result<()> {
        match self.0.iter().enumerate().find(|(_, &c)| c > 1) {
            Some((mode, &count)) => Err(FockError::PauliViolation { mode, count }),
            None => Ok(()),
        }
    }

    fn concat(&self, other: &Occupation) -> Occupation {
        Occupation(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "|{}⟩", parts.join(","))
    }
}

/// A graded Fock-space vector ⊕ₙ |ψ⁽ⁿ⁾⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    dim: usize,
    statistics: Statistics,
    components: BTreeMap<usize, NTensor>,
    nmax: usize,
}

impl FockState {
    pub fn zero(dim: usize, statistics: Statistics) -> Result<Self> {
        if dim == 0 {
            return Err(FockError::InvalidDimension("a state needs at least one mode".into()));
        }
        Ok(Self { dim, statistics, components: BTreeMap::new(), nmax: DEFAULT_NMAX })
    }

    pub fn vacuum(dim: usize, statistics: Statistics) -> Result<Self> {
        let mut s = Self::zero(dim, statistics)?;
        s.components.insert(0, NTensor::scalar(ONE, dim));
        Ok(s)
    }

    /// Assembles a state from n-particle tensors. Tensors with equal particle
    /// number are summed; symmetric/antisymmetric structure is enforced for
    /// bosons/fermions. `nmax` defaults to [`DEFAULT_NMAX`] and is raised to
    /// cover every nonzero component.
    pub fn from_components<I>(dim: usize, statistics: Statistics, comps: I, nmax: Option<usize>) -> Result<Self>
    where
        I: IntoIterator<Item = NTensor>,
    {
        let mut s = Self::zero(dim, statistics)?;
        let sym = statistics.symmetry();
        for t in comps {
            if t.dim() != dim {
                return Err(FockError::IncompatibleStates(format!("component in {} modes, state in {dim}", t.dim())));
            }
            let t = NTensor { symmetry: if t.n() <= 1 { Symmetry::None } else { sym }, ..t };
            t.verify_symmetry()?;
            s.add_component(t)?;
        }
        s.components.retain(|_, t| !t.is_zero());
        let top = s.components.keys().next_back().copied().unwrap_or(0);
        s.nmax = nmax.unwrap_or(DEFAULT_NMAX).max(top);
        Ok(s)
    }

    /// Convenience: the state whose only component is `t`.
    pub fn from_tensor(t: NTensor, statistics: Statistics) -> Result<Self> {
        let dim = t.dim();
        Self::from_components(dim, statistics, [t], None)
    }

    fn add_component(&mut self, t: NTensor) -> Result<()> {
        let n = t.n();
        let merged = match self.components.remove(&n) {
            Some(old) => old.axpy(ONE, &t)?,
            None => t,
        };
        let merged = NTensor { symmetry: if n <= 1 { Symmetry::None } else { self.statistics.symmetry() }, ..merged };
        if !merged.is_zero() {
            self.components.insert(n, merged);
        }
        Ok(())
    }

    /// Builds Σ c(occ)·|occ⟩ in the orthonormal occupation basis.
    pub fn from_occupations<I>(dim: usize, statistics: Statistics, amps: I, nmax: Option<usize>) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, C64)>,
    {
        let mut per_n: BTreeMap<usize, BTreeMap<Vec<usize>, C64>> = BTreeMap::new();
        for (occ, c) in amps {
            if occ.dim() != dim {
                return Err(FockError::IncompatibleStates(format!("occupation over {} modes, state has {dim}", occ.dim())));
            }
            if statistics == Statistics::Fermion {
                occ.check_pauli()?;
            }
            let key = occ.canonical_key();
            let map = per_n.entry(key.len()).or_default();
            for (k, v) in occupation_entries(&key, statistics, c) {
                *map.entry(k).or_insert(ZERO) += v;
            }
        }
        let sym = statistics.symmetry();
        let comps = per_n
            .into_iter()
            .map(|(n, map)| NTensor::from_map(n, dim, if n <= 1 { Symmetry::None } else { sym }, map));
        Self::from_components(dim, statistics, comps, nmax)
    }

    /// The amplitudes ⟨occ|Ψ⟩ in the occupation basis. For distinguishable
    /// statistics this is defined only on the mode-ordered subspace.
    pub fn occupation_amplitudes(&self) -> Result<BTreeMap<Occupation, C64>> {
        let mut out = BTreeMap::new();
        for (&n, t) in &self.components {
            for (key, v) in t.entries() {
                let sorted = key.windows(2).all(|w| w[0] <= w[1]);
                match self.statistics {
                    Statistics::Distinguishable => {
                        if !sorted {
                            return Err(FockError::NotModeOrdered(key.clone()));
                        }
                        out.insert(Occupation::from_key(key, self.dim), *v);
                    }
                    Statistics::Boson => {
                        if sorted {
                            out.insert(Occupation::from_key(key, self.dim), v * arrangement_count(key).sqrt());
                        }
                    }
                    Statistics::Fermion => {
                        if sorted {
                            out.insert(Occupation::from_key(key, self.dim), v * factorial(n).sqrt());
                        }
                    }
                }
            }
        }
        out.retain(|_, v| v.norm() >= PRUNE_TOL);
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    /// Truncation bound: no component above this particle number may appear.
    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn with_nmax(mut self, nmax: usize) -> Result<Self> {
        if let Some(top) = self.max_particles() {
            if top > nmax {
                return Err(FockError::TruncationExceeded { needed: top, nmax });
            }
        }
        self.nmax = nmax;
        Ok(self)
    }

    /// Nonzero components in increasing particle number.
    pub fn components(&self) -> impl Iterator<Item = (usize, &NTensor)> {
        self.components.iter().map(|(&n, t)| (n, t))
    }

    /// The n-particle component, or the zero tensor.
    pub fn component(&self, n: usize) -> NTensor {
        self.components.get(&n).cloned().unwrap_or_else(|| {
            NTensor::zero(n, self.dim, if n <= 1 { Symmetry::None } else { self.statistics.symmetry() })
        })
    }

    pub fn max_particles(&self) -> Option<usize> {
        self.components.keys().next_back().copied()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.values().map(NTensor::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn scaled(&self, c: C64) -> Self {
        let mut out = self.clone();
        if c.norm() == 0.0 {
            out.components.clear();
        } else {
            for t in out.components.values_mut() {
                *t = t.scaled(c);
            }
        }
        out
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(FockError::ZeroState);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn inner(&self, other: &FockState) -> Result<C64> {
        self.check_compatible(other)?;
        let mut acc = ZERO;
        for (n, t) in &self.components {
            if let Some(u) = other.components.get(n) {
                acc += t.inner(u)?;
            }
        }
        Ok(acc)
    }

    pub(crate) fn check_compatible(&self, other: &FockState) -> Result<()> {
        if self.dim != other.dim || self.statistics != other.statistics {
            return Err(FockError::IncompatibleStates(format!(
                "{} modes/{} vs {} modes/{}",
                self.dim, self.statistics, other.dim, other.statistics
            )));
        }
        Ok(())
    }

    /// The field tensor product ⊛: mode lists are concatenated and occupation
    /// amplitudes multiply.
    pub fn field_product(&self, other: &FockState) -> Result<Self> {
        if self.statistics != other.statistics {
            return Err(FockError::IncompatibleStates(format!(
                "field product of {} and {} states",
                self.statistics, other.statistics
            )));
        }
        let a = self.occupation_amplitudes()?;
        let b = other.occupation_amplitudes()?;
        let mut terms = Vec::with_capacity(a.len() * b.len());
        for (oa, ca) in &a {
            for (ob, cb) in &b {
                terms.push((oa.concat(ob), ca * cb));
            }
        }
        Self::from_occupations(self.dim + other.dim, self.statistics, terms, Some(self.nmax + other.nmax))
    }

    /// k-fold field product of the state with itself.
    pub fn field_power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(FockError::InvalidParameter("field power needs k ≥ 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.field_product(self)?;
        }
        Ok(acc)
    }

    /// Embeds the state into `dim ≥ self.dim()` modes; extra modes are empty.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        if dim < self.dim {
            return Err(FockError::InvalidDimension(format!("cannot shrink {} modes to {dim}", self.dim)));
        }
        let comps = self.components.values().map(|t| NTensor { dim, ..t.clone() });
        Self::from_components(dim, self.statistics, comps, Some(self.nmax))
    }

    /// Applies the same one-particle matrix to every slot of every component.
    pub fn apply_single_particle(&self, u: &DMatrix<C64>) -> Result<Self> {
        let comps = self
            .components
            .values()
            .map(|t| t.apply_single_particle(u))
            .collect::<Result<Vec<_>>>()?;
        Self::from_components(self.dim, self.statistics, comps, Some(self.nmax))
    }
}

/// First-quantized entries of the unit-norm occupation state with mode-ordered
/// key `key`, scaled by `c`.
fn occupation_entries(key: &[usize], statistics: Statistics, c: C64) -> Vec<(Vec<usize>, C64)> {
    match statistics {
        Statistics::Distinguishable => vec![(key.to_vec(), c)],
        Statistics::Boson => {
            let perms = distinct_permutations(key);
            let amp = c / (perms.len() as f64).sqrt();
            perms.into_iter().map(|p| (p, amp)).collect()
        }
        Statistics::Fermion => {
            let amp = c / factorial(key.len()).sqrt();
            distinct_permutations(key)
                .into_iter()
                .map(|p| {
                    let s = parity_sign(&p);
                    (p, amp * s)
                })
                .collect()
        }
    }
}

/// The unit-norm occupation-basis state |n₀, n₁, …⟩.
pub fn occupation_state(occ: &Occupation, statistics: Statistics) -> Result<FockState> {
    FockState::from_occupations(occ.dim(), statistics, [(occ.clone(), ONE)], None)
}

/// Componentwise linear combination Σ cₖ Ψₖ.
pub fn superpose(terms: &[(C64, FockState)]) -> Result<FockState> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| FockError::IncompatibleStates("superposition of no states".into()))?;
    let mut comps: BTreeMap<usize, NTensor> = BTreeMap::new();
    let mut nmax = 0;
    for (c, s) in terms {
        first.check_compatible(s)?;
        nmax = nmax.max(s.nmax);
        for (&n, t) in &s.components {
            let acc = match comps.remove(&n) {
                Some(old) => old.axpy(*c, t)?,
                None => t.scaled(*c),
            };
            comps.insert(n, acc);
        }
    }
    FockState::from_components(first.dim, first.statistics, comps.into_values(), Some(nmax))
}

pub fn n_component(psi: &FockState, n: usize) -> NTensor {
    psi.component(n)
}

pub fn inner_product(a: &FockState, b: &FockState) -> Result<C64> {
    a.inner(b)
}

/// True iff |⟨a|b⟩| ≥ (1 − tol)·‖a‖·‖b‖.
pub fn equal_up_to_phase(a: &FockState, b: &FockState, tol: f64) -> Result<bool> {
    if tol <= 0.0 {
        return Err(FockError::InvalidParameter("tolerance must be positive".into()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(FockError::ZeroState);
    }
    Ok(a.inner(b)?.norm() >= (1.0 - tol) * na * nb)
}
