//! Matrix decompositions with rank certificates, rank-one tensor fitting and
//! one-particle reduced density matrices.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg;
use crate::combin::{arrangement_count, canonical_keys, factorial};
use crate::error::{FockError, Result};
use crate::fock::{NTensor, SinglePartVec, Symmetry, C64, DENSE_LIMIT, ONE, ZERO};
use crate::tensor::compact_slot_flattening;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionKind {
    Schmidt,
    Takagi,
    Slater,
}

/// Thresholds turning singular values into a numerical rank.
///
/// A value counts towards the rank if it is at least
/// `max(tol_rel·values[0], abs_floor)`. Values within a factor of ten of that
/// cutoff are *marginal*.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankPolicy {
    pub tol_rel: f64,
    pub abs_floor: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self { tol_rel: 1e-8, abs_floor: 1e-12 }
    }
}

impl RankPolicy {
    pub fn with_tol(tol_rel: f64) -> Self {
        Self { tol_rel, ..Self::default() }
    }

    pub fn cutoff(&self, values: &[f64]) -> f64 {
        let top = values.first().copied().unwrap_or(0.0);
        (self.tol_rel * top).max(self.abs_floor)
    }

    pub fn rank(&self, values: &[f64]) -> usize {
        let cut = self.cutoff(values);
        values.iter().take_while(|&&v| v >= cut).count()
    }

    /// Whether `values[k]` lies within a factor of ten of the cutoff. This is
    /// the value that decides the question "is the rank at most k?".
    pub fn is_marginal_at(&self, values: &[f64], k: usize) -> bool {
        let cut = self.cutoff(values);
        values.get(k).is_some_and(|&v| v > cut / 10.0 && v < cut * 10.0)
    }

    pub fn any_marginal(&self, values: &[f64]) -> bool {
        (0..values.len()).any(|k| self.is_marginal_at(values, k))
    }

    /// First discarded value over last kept value; 0 when nothing is
    /// discarded or nothing is kept.
    pub fn margin(values: &[f64], rank: usize) -> f64 {
        if rank == 0 || rank >= values.len() {
            return 0.0;
        }
        values[rank] / values[rank - 1]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub kind: DecompositionKind,
    /// Nonincreasing, nonnegative. Slater values are listed once per member
    /// of each pair, so they come in equal neighbours.
    pub values: Vec<f64>,
    /// Left singular vectors (Schmidt) or the unitary U (Takagi, Slater).
    pub left: DMatrix<C64>,
    /// Right singular vectors V with M = U·Σ·V† (Schmidt); a copy of U for
    /// Takagi and Slater.
    pub right: DMatrix<C64>,
    pub rank: usize,
    pub margin: f64,
    pub marginal: bool,
}

impl Decomposition {
    fn new(kind: DecompositionKind, values: Vec<f64>, left: DMatrix<C64>, right: DMatrix<C64>, policy: &RankPolicy) -> Self {
        let rank = policy.rank(&values);
        Self {
            kind,
            rank,
            margin: RankPolicy::margin(&values, rank),
            marginal: policy.any_marginal(&values),
            values,
            left,
            right,
        }
    }

    /// Number of 2×2 blocks above the cutoff (meaningful for Slater).
    pub fn slater_rank(&self) -> usize {
        self.rank / 2
    }

    /// U·Σ·V† (Schmidt), U·diag(σ)·Uᵀ (Takagi) or U·Σ_block·Uᵀ (Slater).
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let u = &self.left;
        let mut m = DMatrix::from_element(u.nrows(), self.right.nrows(), ZERO);
        match self.kind {
            DecompositionKind::Schmidt => {
                for (k, &s) in self.values.iter().enumerate() {
                    m += u.column(k) * self.right.column(k).adjoint() * C64::new(s, 0.0);
                }
            }
            DecompositionKind::Takagi => {
                for (k, &s) in self.values.iter().enumerate() {
                    m += u.column(k) * u.column(k).transpose() * C64::new(s, 0.0);
                }
            }
            DecompositionKind::Slater => {
                for k in (0..self.values.len() / 2).map(|p| 2 * p) {
                    let s = C64::new(self.values[k], 0.0);
                    let (a, b) = (u.column(k), u.column(k + 1));
                    m += (a * b.transpose() - b * a.transpose()) * s;
                }
            }
        }
        m
    }

    /// For a Takagi decomposition of rank ≤ 2, the two vectors with
    /// S = ψ₁ψ₂ᵀ + ψ₂ψ₁ᵀ, namely ψ₁,₂ = (√σ₁u₁ ± i√σ₂u₂)/√2.
    pub fn boson_pair_factors(&self) -> Option<(SinglePartVec, SinglePartVec)> {
        if self.kind != DecompositionKind::Takagi || self.rank > 2 {
            return None;
        }
        let d = self.left.nrows();
        let sigma = |k: usize| if k < self.rank { self.values[k].sqrt() } else { 0.0 };
        let col = |k: usize| -> Vec<C64> {
            if k < self.left.ncols() { self.left.column(k).iter().copied().collect() } else { vec![ZERO; d] }
        };
        let (a, b) = (col(0), col(1));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let i = C64::new(0.0, 1.0);
        let mk = |sign: f64| -> Vec<C64> {
            (0..d).map(|j| (a[j] * sigma(0) + i * sign * b[j] * sigma(1)) * h).collect()
        };
        Some((SinglePartVec::new(mk(1.0)).ok()?, SinglePartVec::new(mk(-1.0)).ok()?))
    }
}

fn sorted_svd(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>, DMatrix<C64>) {
    linalg::svd(m)
}

/// Singular values only, nonincreasing.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    linalg::singular_values(m)
}

pub fn schmidt(m: &DMatrix<C64>) -> Result<Decomposition> {
    schmidt_with(m, &RankPolicy::default())
}

pub fn schmidt_with(m: &DMatrix<C64>, policy: &RankPolicy) -> Result<Decomposition> {
    if m.is_empty() {
        return Err(FockError::InvalidDimension("empty matrix".into()));
    }
    let (values, u, v) = sorted_svd(m);
    Ok(Decomposition::new(DecompositionKind::Schmidt, values, u, v, policy))
}

fn check_square(m: &DMatrix<C64>) -> Result<()> {
    if m.is_empty() || !m.is_square() {
        return Err(FockError::InvalidDimension(format!("expected a nonempty square matrix, got {}×{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

/// Appends orthonormal columns to `cols` until they span ℂ^d.
fn complete_unitary(mut cols: Vec<Vec<C64>>, d: usize) -> DMatrix<C64> {
    let mut j = 0;
    while cols.len() < d && j < d {
        let mut v = vec![ZERO; d];
        v[j] = ONE;
        for _ in 0..2 {
            for c in &cols {
                let p: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= p * y);
            }
        }
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
        j += 1;
    }
    DMatrix::from_fn(d, d, |r, c| cols[c][r])
}

fn normalized(v: &[C64]) -> Option<Vec<C64>> {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
}

/// Takagi factorization S = U·diag(σ)·Uᵀ of a complex symmetric matrix.
///
/// Computed by greedy deflation: for the top singular triple S v = σ u of a
/// symmetric matrix, both u + v̄ and i(u − v̄) satisfy S t̄ = σ t, and at least
/// one of them has norm ≥ √2. Subtracting σ t tᵀ removes exactly that value.
pub fn takagi(s: &DMatrix<C64>) -> Result<Decomposition> {
    takagi_with(s, &RankPolicy::default())
}

pub fn takagi_with(s: &DMatrix<C64>, policy: &RankPolicy) -> Result<Decomposition> {
    check_square(s)?;
    let scale = s.norm();
    if (s - s.transpose()).norm() > 1e-12 * scale {
        return Err(FockError::SymmetryViolation("matrix is not complex symmetric".into()));
    }
    let d = s.nrows();
    let mut rest = (s + s.transpose()) * C64::new(0.5, 0.0);
    let mut values = Vec::with_capacity(d);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while values.len() < d {
        let (sv, u, v) = sorted_svd(&rest);
        let sigma = sv[0];
        if sigma <= 1e-15 * scale || scale == 0.0 {
            values.extend(sv.iter().copied().take(d - values.len()));
            break;
        }
        let uu: Vec<C64> = u.column(0).iter().copied().collect();
        let vb: Vec<C64> = v.column(0).iter().map(|x| x.conj()).collect();
        let plus: Vec<C64> = uu.iter().zip(&vb).map(|(a, b)| a + b).collect();
        let t = if plus.iter().map(|x| x.norm_sqr()).sum::<f64>() >= 2.0 {
            normalized(&plus)
        } else {
            normalized(&uu.iter().zip(&vb).map(|(a, b)| C64::new(0.0, 1.0) * (a - b)).collect::<Vec<_>>())
        }
        .expect("one candidate has norm at least sqrt 2");
        let tv = DMatrix::from_column_slice(d, 1, &t);
        rest -= &tv * tv.transpose() * C64::new(sigma, 0.0);
        values.push(sigma);
        cols.push(t);
    }
    values.resize(d, 0.0);
    let u = complete_unitary(cols, d);
    Ok(Decomposition::new(DecompositionKind::Takagi, values, u.clone(), u, policy))
}

/// Slater decomposition A = U·Σ_block·Uᵀ of a complex antisymmetric matrix,
/// with 2×2 blocks [[0, σ], [−σ, 0]].
///
/// For the top singular triple A v = σ u of an antisymmetric matrix, u and v̄
/// are orthonormal and σ(u v̄ᵀ − v̄ uᵀ) carries the whole σ pair, so it can be
/// subtracted and the process repeated.
pub fn slater(a: &DMatrix<C64>) -> Result<Decomposition> {
    slater_with(a, &RankPolicy::default())
}

pub fn slater_with(a: &DMatrix<C64>, policy: &RankPolicy) -> Result<Decomposition> {
    check_square(a)?;
    let scale = a.norm();
    if (a + a.transpose()).norm() > 1e-12 * scale {
        return Err(FockError::SymmetryViolation("matrix is not complex antisymmetric".into()));
    }
    let d = a.nrows();
    let mut rest = (a - a.transpose()) * C64::new(0.5, 0.0);
    let mut values = Vec::with_capacity(d);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while values.len() + 1 < d {
        let (sv, u, v) = sorted_svd(&rest);
        let sigma = sv[0];
        if sigma <= 1e-15 * scale || scale == 0.0 {
            break;
        }
        let u1: Vec<C64> = u.column(0).iter().copied().collect();
        let u2: Vec<C64> = v.column(0).iter().map(|x| x.conj()).collect();
        let c1 = DMatrix::from_column_slice(d, 1, &u1);
        let c2 = DMatrix::from_column_slice(d, 1, &u2);
        rest -= (&c1 * c2.transpose() - &c2 * c1.transpose()) * C64::new(sigma, 0.0);
        values.extend([sigma, sigma]);
        cols.extend([u1, u2]);
    }
    if values.len() + 1 < d {
        // Remaining pairs are below numerical resolution; record them from
        // the residual so they still show up against the cutoff.
        let sv = singular_values(&rest);
        let mut k = 0;
        while values.len() + 1 < d {
            let s = sv.get(k).copied().unwrap_or(0.0);
            values.extend([s, s]);
            k += 2;
        }
    }
    values.resize(d, 0.0);
    let u = complete_unitary(cols, d);
    Ok(Decomposition::new(DecompositionKind::Slater, values, u.clone(), u, policy))
}

/// Pfaffian of a 4×4 antisymmetric matrix: a₀₁a₂₃ − a₀₂a₁₃ + a₀₃a₁₂.
pub fn pfaffian4(a: &DMatrix<C64>) -> Result<C64> {
    if a.nrows() != 4 || a.ncols() != 4 {
        return Err(FockError::InvalidDimension(format!("Pfaffian needs 4×4, got {}×{}", a.nrows(), a.ncols())));
    }
    Ok(a[(0, 1)] * a[(2, 3)] - a[(0, 2)] * a[(1, 3)] + a[(0, 3)] * a[(1, 2)])
}

/// The d×d one-particle reduced density matrix of slot 0, normalized to unit
/// trace: ρᵢⱼ = Σ T[i, r]·T[j, r]* / ‖T‖².
pub fn one_particle_rdm(t: &NTensor) -> Result<DMatrix<C64>> {
    if t.n() == 0 {
        return Err(FockError::InvalidCut("a scalar has no particle slot".into()));
    }
    let norm2 = t.norm_sqr();
    if norm2 == 0.0 {
        return Err(FockError::ZeroState);
    }
    let mut by_rest: BTreeMap<&[usize], Vec<(usize, C64)>> = BTreeMap::new();
    for (k, v) in t.entries() {
        by_rest.entry(&k[1..]).or_default().push((k[0], *v));
    }
    let mut rho = DMatrix::from_element(t.dim(), t.dim(), ZERO);
    for group in by_rest.values() {
        for &(i, a) in group {
            for &(j, b) in group {
                rho[(i, j)] += a * b.conj();
            }
        }
    }
    Ok(rho / C64::new(norm2, 0.0))
}

/// Orthonormal pair built from two normalized, non-parallel, non-orthogonal
/// vectors: γ = ⟨ψ₁|ψ₂⟩ and e± = (ψ₁ ± (γ*/|γ|)ψ₂)/√(2(1 ± |γ|)).
#[derive(Clone, Debug, PartialEq)]
pub struct PairBasis {
    pub gamma: C64,
    pub e_plus: SinglePartVec,
    pub e_minus: SinglePartVec,
}

pub fn pair_basis(psi1: &SinglePartVec, psi2: &SinglePartVec) -> Result<PairBasis> {
    for p in [psi1, psi2] {
        if (p.norm() - 1.0).abs() > 1e-12 {
            return Err(FockError::InvalidParameter("pair basis needs normalized vectors".into()));
        }
    }
    let gamma = psi1.inner(psi2)?;
    let g = gamma.norm();
    if !(1e-12..=1.0 - 1e-12).contains(&g) {
        return Err(FockError::InvalidParameter("vectors must be neither orthogonal nor parallel".into()));
    }
    let phase = gamma.conj() / g;
    let e = |sign: f64| -> Result<SinglePartVec> {
        let amps = psi1
            .amps()
            .iter()
            .zip(psi2.amps())
            .map(|(a, b)| (a + phase * b * sign) / (2.0 * (1.0 + sign * g)).sqrt())
            .collect();
        SinglePartVec::new(amps)
    };
    Ok(PairBasis { gamma, e_plus: e(1.0)?, e_minus: e(-1.0)? })
}

fn outer(a: &SinglePartVec, b: &SinglePartVec) -> NTensor {
    let d = a.dim();
    let entries = (0..d).flat_map(|i| (0..d).map(move |j| (i, j)));
    let map = entries.map(|(i, j)| (vec![i, j], a.amps()[i] * b.amps()[j])).collect();
    NTensor::from_map(2, d, Symmetry::None, map)
}

impl PairBasis {
    /// (γ/|γ|)·[(1+|γ|)·e₊⊗e₊ − (1−|γ|)·e₋⊗e₋] / √(2(1+|γ|²)), which equals
    /// the normalized ψ₁ ∨ ψ₂.
    pub fn boson_expansion(&self) -> Result<NTensor> {
        let g = self.gamma.norm();
        let phase = self.gamma / g;
        let den = (2.0 * (1.0 + g * g)).sqrt();
        let pp = outer(&self.e_plus, &self.e_plus).scaled(phase * ((1.0 + g) / den));
        let mm = outer(&self.e_minus, &self.e_minus);
        pp.axpy(-phase * ((1.0 - g) / den), &mm)
    }

    /// (γ/(√2|γ|))·(e₋⊗e₊ − e₊⊗e₋), which equals the normalized ψ₁ ∧ ψ₂.
    pub fn fermion_expansion(&self) -> Result<NTensor> {
        let c = self.gamma / (self.gamma.norm() * 2f64.sqrt());
        let mp = outer(&self.e_minus, &self.e_plus).scaled(c);
        mp.axpy(-c, &outer(&self.e_plus, &self.e_minus))
    }
}

/// Settings for [`rank_one_fit`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// A restart stops once a sweep improves the relative residual by less
    /// than this.
    pub tol: f64,
    /// Largest number of canonical keys (symmetric fits) accepted.
    pub max_keys: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { restarts: 16, max_sweeps: 500, tol: 1e-12, max_keys: 50_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankOneFit {
    /// Unit-norm factors ψ₁, …, ψₙ.
    pub factors: Vec<SinglePartVec>,
    /// c in T ≈ c·ψ₁⊗⋯⊗ψₙ, or c·Σ_π (±)ψ_π(1)⊗⋯⊗ψ_π(n) for tagged tensors.
    pub coefficient: C64,
    /// ‖T − fit‖/‖T‖.
    pub residual: f64,
    /// Sweeps used by the restart that produced the fit.
    pub sweeps: usize,
}

fn random_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    (0..d).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
}

/// Best-effort rank-one fit by alternating least squares with random
/// restarts. Untagged tensors are fitted with c·ψ₁⊗⋯⊗ψₙ; symmetric and
/// antisymmetric tensors with the symmetrized (antisymmetrized) product of
/// n possibly distinct factors.
///
/// This is a semidecision: a small residual proves the tensor is (close to)
/// a product, a large one is only evidence that it is not.
pub fn rank_one_fit<R: Rng + ?Sized>(t: &NTensor, opts: &FitOptions, rng: &mut R) -> Result<RankOneFit> {
    if t.n() == 0 {
        return Err(FockError::InvalidParameter("rank-one fit needs at least one slot".into()));
    }
    if t.is_zero() {
        return Err(FockError::ZeroState);
    }
    match t.symmetry() {
        Symmetry::None => Ok(product_fit(t, opts, rng)),
        Symmetry::Symmetric => symmetric_fit(t, false, opts, rng),
        Symmetry::Antisymmetric => symmetric_fit(t, true, opts, rng),
    }
}

fn product_fit<R: Rng + ?Sized>(t: &NTensor, opts: &FitOptions, rng: &mut R) -> RankOneFit {
    let (n, d) = (t.n(), t.dim());
    let tnorm = t.norm();
    let dominant = t
        .entries()
        .iter()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(k, _)| k.clone())
        .expect("nonzero tensor");
    let overlap = |x: &[Vec<C64>]| -> C64 {
        t.entries()
            .iter()
            .map(|(k, v)| k.iter().enumerate().fold(*v, |acc, (s, &i)| acc * x[s][i].conj()))
            .sum()
    };
    let mut best: Option<(f64, Vec<Vec<C64>>, C64, usize)> = None;
    for r in 0..opts.restarts.max(1) {
        let mut x: Vec<Vec<C64>> = if r == 0 {
            dominant
                .iter()
                .map(|&i| {
                    let mut v = vec![ZERO; d];
                    v[i] = ONE;
                    v
                })
                .collect()
        } else {
            (0..n).map(|_| normalized(&random_vec(d, rng)).expect("gaussian vector")).collect()
        };
        let mut prev = f64::INFINITY;
        let mut sweeps = 0;
        let mut res = 1.0;
        for _ in 0..opts.max_sweeps {
            sweeps += 1;
            for slot in 0..n {
                let mut y = vec![ZERO; d];
                for (k, v) in t.entries() {
                    let w = k.iter().enumerate().filter(|&(s, _)| s != slot).fold(*v, |acc, (s, &i)| acc * x[s][i].conj());
                    y[k[slot]] += w;
                }
                if let Some(y) = normalized(&y) {
                    x[slot] = y;
                }
            }
            let c = overlap(&x);
            res = ((tnorm * tnorm - c.norm_sqr()).max(0.0)).sqrt() / tnorm;
            if prev - res < opts.tol || res < 1e-14 {
                break;
            }
            prev = res;
        }
        if best.as_ref().is_none_or(|b| res < b.0) {
            let c = overlap(&x);
            best = Some((res, x, c, sweeps));
        }
        if res < 1e-14 {
            break;
        }
    }
    let (estimate, x, c, sweeps) = best.expect("at least one restart");
    let residual = exact_product_residual(t, &x, c).unwrap_or(estimate);
    RankOneFit {
        factors: x.into_iter().map(|v| SinglePartVec::new(v).expect("nonempty")).collect(),
        coefficient: c,
        residual,
        sweeps,
    }
}

/// ‖T − c·x₁⊗⋯⊗xₙ‖/‖T‖ summed entry by entry, avoiding the cancellation in
/// ‖T‖² − |c|². `None` if the dense tensor is too large to enumerate.
fn exact_product_residual(t: &NTensor, x: &[Vec<C64>], c: C64) -> Option<f64> {
    let (n, d) = (t.n(), t.dim());
    if (d as f64).powi(n as i32) > (DENSE_LIMIT / 4) as f64 {
        return None;
    }
    let mut key = vec![0usize; n];
    let mut acc = 0.0;
    loop {
        let p = key.iter().enumerate().fold(c, |a, (s, &i)| a * x[s][i]);
        acc += (t.get(&key) - p).norm_sqr();
        let mut s = n;
        loop {
            if s == 0 {
                return Some(acc.sqrt() / t.norm());
            }
            s -= 1;
            key[s] += 1;
            if key[s] < d {
                break;
            }
            key[s] = 0;
        }
    }
}

pub(crate) fn permanent(m: &[C64], n: usize) -> C64 {
    if n == 0 {
        return ONE;
    }
    let mut total = ZERO;
    let mut row_sums = vec![ZERO; n];
    // Ryser's formula over column subsets in Gray-code order.
    let mut subset = 0usize;
    for g in 1..(1usize << n) {
        let bit = g.trailing_zeros() as usize;
        let adding = subset & (1 << bit) == 0;
        subset ^= 1 << bit;
        for (i, rs) in row_sums.iter_mut().enumerate() {
            if adding {
                *rs += m[i * n + bit];
            } else {
                *rs -= m[i * n + bit];
            }
        }
        let prod = row_sums.iter().fold(ONE, |a, b| a * b);
        if subset.count_ones() % 2 == n as u32 % 2 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

pub(crate) fn determinant(m: &[C64], n: usize) -> C64 {
    let mut a = m.to_vec();
    let mut det = ONE;
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm())).expect("rows");
        if a[pivot * n + col] == ZERO {
            return ZERO;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != ZERO {
                for k in col..n {
                    let v = a[col * n + k];
                    a[r * n + k] -= f * v;
                }
            }
        }
    }
    det
}

fn minor(m: &[C64], n: usize, row: usize, col: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity((n - 1) * (n - 1));
    for r in (0..n).filter(|&r| r != row) {
        for c in (0..n).filter(|&c| c != col) {
            out.push(m[r * n + c]);
        }
    }
    out
}

/// Weighted least squares over canonical keys: each stored class s of the
/// (anti)symmetric tensor appears w_s times in the full tensor, so
/// ‖T − P‖² = Σ_s w_s |T_s − P_s|² where P_s is the permanent (determinant)
/// of M_s[a][b] = ψ_a[s_b]. P_s is linear in each ψ_a through the cofactor
/// expansion along row a, which gives one linear least-squares problem per
/// factor.
fn symmetric_fit<R: Rng + ?Sized>(t: &NTensor, anti: bool, opts: &FitOptions, rng: &mut R) -> Result<RankOneFit> {
    let (n, d) = (t.n(), t.dim());
    let count = crate::combin::binomial(if anti { d } else { d + n - 1 }, n);
    if count > opts.max_keys as f64 {
        return Err(FockError::TooLarge(format!("{count} canonical keys for a rank-one fit")));
    }
    let keys = canonical_keys(n, d, anti);
    let weights: Vec<f64> = keys.iter().map(|k| if anti { factorial(n) } else { arrangement_count(k) }).collect();
    let target: Vec<C64> = keys.iter().map(|k| t.get(k)).collect();
    let tnorm = weights.iter().zip(&target).map(|(w, v)| w * v.norm_sqr()).sum::<f64>().sqrt();
    let combine = |m: &[C64], k: usize| if anti { determinant(m, k) } else { permanent(m, k) };
    let model = |psi: &[Vec<C64>], key: &[usize]| -> C64 {
        let m: Vec<C64> = (0..n).flat_map(|a| key.iter().map(move |&i| psi[a][i])).collect();
        combine(&m, n)
    };
    let residual = |psi: &[Vec<C64>]| -> f64 {
        keys.iter()
            .zip(&weights)
            .zip(&target)
            .map(|((k, w), v)| w * (v - model(psi, k)).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / tnorm
    };

    let rdm = one_particle_rdm(t)?;
    let (eig_values, eig_vectors) = linalg::hermitian_eigen(&rdm);
    let span: Vec<Vec<C64>> = (0..d)
        .filter(|&k| eig_values[k] > 1e-12)
        .map(|k| eig_vectors.column(k).iter().copied().collect())
        .collect();

    let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let rhs = DMatrix::from_fn(keys.len(), 1, |row, _| target[row] * sqrt_w[row]);
    // Weighted derivative of every model entry with respect to factor a.
    let design = |psi: &[Vec<C64>], a: usize| -> DMatrix<C64> {
        let mut m = DMatrix::from_element(keys.len(), d, ZERO);
        for (row, key) in keys.iter().enumerate() {
            let entries: Vec<C64> = (0..n).flat_map(|x| key.iter().map(move |&i| psi[x][i])).collect();
            for (b, &i) in key.iter().enumerate() {
                let sign = if anti && (a + b) % 2 == 1 { -1.0 } else { 1.0 };
                m[(row, i)] += combine(&minor(&entries, n, a, b), n - 1) * sign * sqrt_w[row];
            }
        }
        m
    };
    let mut best: Option<(f64, Vec<Vec<C64>>, usize)> = None;
    for r in 0..opts.restarts.max(1) {
        let mut psi: Vec<Vec<C64>> = (0..n)
            .map(|_| {
                if r % 2 == 0 && !span.is_empty() {
                    let g = random_vec(span.len(), rng);
                    (0..d).map(|i| span.iter().zip(&g).map(|(s, c)| s[i] * c).sum()).collect()
                } else {
                    random_vec(d, rng)
                }
            })
            .collect();
        let mut prev = f64::INFINITY;
        let mut res = residual(&psi);
        let mut sweeps = 0;
        for _ in 0..opts.max_sweeps {
            sweeps += 1;
            for a in 0..n {
                let sol = linalg::lstsq(&design(&psi, a), &rhs, 1e-12);
                psi[a] = sol.iter().copied().collect();
            }
            balance(&mut psi);
            res = residual(&psi);
            if prev - res < opts.tol || res < 1e-14 {
                break;
            }
            prev = res;
        }
        // ALS can crawl through swamps; the model is a polynomial in the
        // factor entries, so a coupled Gauss-Newton step finishes the job.
        for _ in 0..POLISH_STEPS {
            if res < 1e-14 {
                break;
            }
            let mut jac = DMatrix::from_element(keys.len(), n * d, ZERO);
            for a in 0..n {
                jac.columns_mut(a * d, d).copy_from(&design(&psi, a));
            }
            let err = DMatrix::from_fn(keys.len(), 1, |row, _| (target[row] - model(&psi, &keys[row])) * sqrt_w[row]);
            let step = linalg::lstsq(&jac, &err, 1e-10);
            let mut scale = 1.0;
            let mut improved = false;
            for _ in 0..8 {
                let trial: Vec<Vec<C64>> = (0..n)
                    .map(|a| (0..d).map(|i| psi[a][i] + step[(a * d + i, 0)] * scale).collect())
                    .collect();
                let r = residual(&trial);
                if r < res {
                    psi = trial;
                    res = r;
                    improved = true;
                    break;
                }
                scale *= 0.5;
            }
            if !improved {
                break;
            }
            balance(&mut psi);
        }
        if best.as_ref().is_none_or(|b| res < b.0) {
            best = Some((res, psi, sweeps));
        }
        if res < 1e-14 {
            break;
        }
    }
    let (residual, psi, sweeps) = best.expect("at least one restart");
    let mut coefficient = ONE;
    let mut factors = Vec::with_capacity(n);
    for v in psi {
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            coefficient = ZERO;
            factors.push(SinglePartVec::new(v).expect("nonempty"));
        } else {
            coefficient *= norm;
            factors.push(SinglePartVec::new(v.iter().map(|x| x / norm).collect()).expect("nonempty"));
        }
    }
    Ok(RankOneFit { factors, coefficient, residual, sweeps })
}

const POLISH_STEPS: usize = 30;

/// Rescales the factors to a common norm without changing their product.
fn balance(psi: &mut [Vec<C64>]) {
    let norms: Vec<f64> = psi.iter().map(|v| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).collect();
    if norms.iter().any(|&x| x == 0.0 || !x.is_finite()) {
        return;
    }
    let mean = norms.iter().map(|x| x.ln()).sum::<f64>() / norms.len() as f64;
    for (v, n) in psi.iter_mut().zip(norms) {
        let f = mean.exp() / n;
        v.iter_mut().for_each(|x| *x *= f);
    }
}

/// Singular values of the single-slot flattening at `slot`, nonincreasing.
pub fn slot_spectrum(t: &NTensor, slot: usize) -> Result<Vec<f64>> {
    if slot >= t.n() || t.n() < 2 {
        return Err(FockError::InvalidCut(format!("slot {slot} of an {}-particle tensor", t.n())));
    }
    Ok(singular_values(&compact_slot_flattening(t, slot)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{otimes, vee, wedge};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn real(rows: usize, data: &[f64]) -> DMatrix<C64> {
        DMatrix::from_row_slice(rows, data.len() / rows, &data.iter().map(|&x| c(x)).collect::<Vec<_>>())
    }

    fn ket(d: usize, j: usize) -> NTensor {
        NTensor::from_vec(&SinglePartVec::basis(d, j).unwrap())
    }

    fn vec_t(a: &[f64]) -> NTensor {
        NTensor::from_vec(&SinglePartVec::from_real(a).unwrap())
    }

    #[test]
    fn schmidt_identity() {
        let d = schmidt(&real(2, &[1.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(d.rank, 2);
        assert_abs_diff_eq!(d.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.values[1], 1.0, epsilon = 1e-14);
        assert_eq!(d.margin, 0.0);
    }

    #[test]
    fn schmidt_of_diagonal_geometric_series() {
        let m = real(4, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.25, 0.0, 0.0, 0.0, 0.0, 0.125]);
        let d = schmidt(&m).unwrap();
        assert_eq!(d.rank, 4);
        for (k, v) in d.values.iter().enumerate() {
            assert_abs_diff_eq!(*v, 0.5f64.powi(k as i32), epsilon = 1e-14);
        }
        assert!((&d.reconstruct() - &m).norm() < 1e-12);
    }

    #[test]
    fn rank_policy_margins() {
        let p = RankPolicy::default();
        assert_eq!(p.rank(&[1.0, 1e-3, 1e-10]), 2);
        assert_abs_diff_eq!(RankPolicy::margin(&[1.0, 1e-3, 1e-10], 2), 1e-7, epsilon = 1e-20);
        assert!(!p.any_marginal(&[1.0, 1e-3, 1e-14]));
        assert!(p.is_marginal_at(&[1.0, 2e-8], 1));
        assert!(p.is_marginal_at(&[1.0, 5e-9], 1));
        assert!(!p.is_marginal_at(&[1.0, 5e-10], 1));
        assert_eq!(p.rank(&[0.0, 0.0]), 0);
        assert_eq!(p.rank(&[1e-13]), 0);
    }

    #[test]
    fn takagi_examples() {
        let d = takagi(&real(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_eq!(d.rank, 2);
        assert_abs_diff_eq!(d.values[1], 1.0, epsilon = 1e-14);

        let chi = real(3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let d = takagi(&chi).unwrap();
        assert_eq!(d.rank, 3);
        assert!((&d.reconstruct() - &chi).norm() < 1e-12);

        let two = otimes(&ket(3, 2), &ket(3, 2)).unwrap().matrix().unwrap();
        let d = takagi(&two).unwrap();
        assert_eq!(d.values, vec![1.0, 0.0, 0.0]);
        assert_eq!(d.rank, 1);

        let err = takagi(&real(2, &[0.0, 1.0, 0.0, 0.0])).unwrap_err();
        assert!(matches!(err, FockError::SymmetryViolation(_)));
    }

    #[test]
    fn takagi_pair_factors_reconstruct() {
        let s = vee(&vec_t(&[1.0, 2.0, 0.0]), &vec_t(&[0.0, -1.0, 3.0])).unwrap().matrix().unwrap();
        let d = takagi(&s).unwrap();
        assert_eq!(d.rank, 2);
        let (p, q) = d.boson_pair_factors().unwrap();
        let rebuilt = vee(&NTensor::from_vec(&p), &NTensor::from_vec(&q)).unwrap().matrix().unwrap();
        assert!((&rebuilt - &s).norm() < 1e-12 * s.norm());
    }

    #[test]
    fn slater_examples() {
        let a = wedge(&ket(2, 0), &ket(2, 1)).unwrap().matrix().unwrap();
        let d = slater(&a).unwrap();
        assert_eq!(d.slater_rank(), 1);
        assert!((&d.reconstruct() - &a).norm() < 1e-12);

        let upper = DMatrix::from_fn(4, 4, |i, j| if i < j { ONE } else if i > j { -ONE } else { ZERO });
        let d = slater(&upper).unwrap();
        assert_eq!(d.slater_rank(), 2);
        assert_abs_diff_eq!(d.values[0], d.values[1], epsilon = 1e-15);
        assert!((&d.reconstruct() - &upper).norm() < 1e-12);

        let z = DMatrix::from_element(3, 3, ZERO);
        assert_eq!(slater(&z).unwrap().rank, 0);
    }

    #[test]
    fn pfaffian_of_upper_ones() {
        let upper = DMatrix::from_fn(4, 4, |i, j| if i < j { ONE } else if i > j { -ONE } else { ZERO });
        assert_eq!(pfaffian4(&upper).unwrap(), ONE);
        assert_abs_diff_eq!((upper.determinant() - ONE).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn permanent_and_determinant() {
        let m = [c(1.0), c(2.0), c(3.0), c(4.0)];
        assert_eq!(permanent(&m, 2), c(10.0));
        assert_abs_diff_eq!((determinant(&m, 2) - c(-2.0)).norm(), 0.0, epsilon = 1e-14);
        let m3: Vec<C64> = (1..=9).map(|x| c(x as f64)).collect();
        assert_eq!(permanent(&m3, 3), c(450.0));
        assert_abs_diff_eq!(determinant(&m3, 3).norm(), 0.0, epsilon = 1e-12);
        assert_eq!(permanent(&[], 0), ONE);
    }

    #[test]
    fn rdm_examples() {
        let w = wedge(&ket(3, 0), &ket(3, 1)).unwrap();
        let rho = one_particle_rdm(&w).unwrap();
        assert_abs_diff_eq!(rho[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_eq!(rho[(2, 2)], ZERO);

        let rho = one_particle_rdm(&otimes(&ket(2, 0), &ket(2, 0)).unwrap()).unwrap();
        assert_eq!(rho[(0, 0)], ONE);

        let w3 = wedge(&w, &ket(3, 2)).unwrap();
        let rho = one_particle_rdm(&w3).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(rho[(k, k)].re, 1.0 / 3.0, epsilon = 1e-15);
        }
        assert_eq!(one_particle_rdm(&NTensor::zero(2, 2, Symmetry::None)), Err(FockError::ZeroState));
    }

    #[test]
    fn fit_exact_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = otimes(&otimes(&ket(2, 0), &ket(2, 1)).unwrap(), &ket(2, 0)).unwrap();
        let f = rank_one_fit(&t, &FitOptions::default(), &mut rng).unwrap();
        assert!(f.residual < 1e-10);
    }

    #[test]
    fn fit_bell_like_misses_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = otimes(&ket(2, 0), &ket(2, 0)).unwrap().axpy(ONE, &otimes(&ket(2, 1), &ket(2, 1)).unwrap()).unwrap();
        let f = rank_one_fit(&t, &FitOptions::default(), &mut rng).unwrap();
        assert!(f.residual >= 0.5);
        assert_abs_diff_eq!(f.residual, 0.5f64.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn fit_symmetric_vee_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = vee(&vec_t(&[1.0, 1.0, 0.0, 0.0]), &vec_t(&[0.0, 1.0, 1.0, 1.0])).unwrap();
        let f = rank_one_fit(&t, &FitOptions::default(), &mut rng).unwrap();
        assert!(f.residual < 1e-8, "{}", f.residual);

        let three = vee(&vee(&ket(3, 0), &ket(3, 1)).unwrap(), &ket(3, 2)).unwrap();
        let f = rank_one_fit(&three, &FitOptions::default(), &mut rng).unwrap();
        assert!(f.residual < 1e-8, "{}", f.residual);
    }

    #[test]
    fn fit_antisymmetric_wedge_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = wedge(&wedge(&vec_t(&[1.0, 2.0, 0.0, 1.0]), &vec_t(&[0.0, 1.0, -1.0, 0.0])).unwrap(), &ket(4, 3)).unwrap();
        let f = rank_one_fit(&t, &FitOptions::default(), &mut rng).unwrap();
        assert!(f.residual < 1e-8, "{}", f.residual);
        let ghz = wedge(&ket(4, 0), &ket(4, 1)).unwrap().axpy(ONE, &wedge(&ket(4, 2), &ket(4, 3)).unwrap()).unwrap();
        let f = rank_one_fit(&ghz, &FitOptions::default(), &mut rng).unwrap();
        assert!(f.residual > 0.5, "{}", f.residual);
    }

    #[test]
    fn fit_rejects_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = NTensor::zero(2, 2, Symmetry::None);
        assert_eq!(rank_one_fit(&z, &FitOptions::default(), &mut rng), Err(FockError::ZeroState));
    }

    #[test]
    fn pair_identities_hold() {
        let p1 = SinglePartVec::from_real(&[0.6, 0.8, 0.0]).unwrap();
        let p2 = SinglePartVec::new(vec![C64::new(0.0, 0.6), c(0.0), c(0.8)]).unwrap();
        let basis = pair_basis(&p1, &p2).unwrap();
        assert_abs_diff_eq!(basis.e_plus.inner(&basis.e_minus).unwrap().norm(), 0.0, epsilon = 1e-15);
        let v = vee(&NTensor::from_vec(&p1), &NTensor::from_vec(&p2)).unwrap();
        let v = v.scaled(c(1.0 / v.norm()));
        let e = basis.boson_expansion().unwrap();
        for (k, x) in v.entries() {
            assert_abs_diff_eq!((e.get(k) - x).norm(), 0.0, epsilon = 1e-14);
        }
        let w = wedge(&NTensor::from_vec(&p1), &NTensor::from_vec(&p2)).unwrap();
        let w = w.scaled(c(1.0 / w.norm()));
        let e = basis.fermion_expansion().unwrap();
        for (k, x) in w.entries() {
            assert_abs_diff_eq!((e.get(k) - x).norm(), 0.0, epsilon = 1e-14);
        }
    }
}
