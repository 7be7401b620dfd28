//! Random inputs and independent oracles for tests. Enabled by the `testkit`
//! feature.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::classify::{classify_with, rotate_mode_phases, ClassifyConfig, Slot, Status};
use crate::fock::{FockState, NTensor, SinglePartVec, Statistics, Symmetry, C64, ZERO};
use crate::tensor::{antisymmetrize, otimes, symmetrize, vee, wedge};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> SinglePartVec {
    SinglePartVec::new((0..d).map(|_| gaussian(rng)).collect()).expect("d > 0")
}

pub fn random_unit_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> SinglePartVec {
    random_vec(d, rng).normalized().expect("gaussian vectors are nonzero")
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of R's
/// diagonal moved into Q.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let qr = random_matrix(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let p = r[(j, j)];
        let phase = if p.norm() > 0.0 { p / p.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Dense Gaussian n-tensor, (anti)symmetrized to match `statistics`.
pub fn random_tensor<R: Rng + ?Sized>(n: usize, d: usize, statistics: Statistics, rng: &mut R) -> NTensor {
    let mut entries = Vec::new();
    let mut key = vec![0usize; n];
    loop {
        entries.push((key.clone(), gaussian(rng)));
        let mut s = n;
        loop {
            if s == 0 {
                let t = NTensor::from_entries(n, d, Symmetry::None, entries).expect("valid keys");
                return match statistics {
                    Statistics::Distinguishable => t,
                    Statistics::Boson => symmetrize(&t),
                    Statistics::Fermion => antisymmetrize(&t),
                };
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

/// Product of n random vectors under the statistics' product (⊗, ∨ or ∧).
pub fn random_product<R: Rng + ?Sized>(n: usize, d: usize, statistics: Statistics, rng: &mut R) -> NTensor {
    let mut t = NTensor::scalar(C64::new(1.0, 0.0), d);
    for _ in 0..n {
        let v = NTensor::from_vec(&random_vec(d, rng));
        t = match statistics {
            Statistics::Distinguishable => otimes(&t, &v),
            Statistics::Boson => vee(&t, &v),
            Statistics::Fermion => wedge(&t, &v),
        }
        .expect("matching dims");
    }
    t
}

/// ψ^{⊗n} for a random ψ.
pub fn random_power<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> NTensor {
    let v = NTensor::from_vec(&random_vec(d, rng));
    let mut t = NTensor::scalar(C64::new(1.0, 0.0), d);
    for _ in 0..n {
        t = otimes(&t, &v).expect("matching dims");
    }
    t
}

/// A random n-particle tensor drawn from a mix of exact products, identical
/// powers (bosons) and generic tensors, so both verdicts occur often.
pub fn random_component<R: Rng + ?Sized>(n: usize, d: usize, statistics: Statistics, rng: &mut R) -> NTensor {
    let choice = rng.gen_range(0..3);
    let t = match (choice, statistics) {
        (0, _) => random_product(n, d, statistics, rng),
        (1, Statistics::Boson) => random_power(n, d, rng),
        _ => random_tensor(n, d, statistics, rng),
    };
    if t.is_zero() { random_tensor(n, d, statistics, rng) } else { t }
}

/// A random state with components in 0..=max_n (fermions are capped at d).
pub fn random_state<R: Rng + ?Sized>(d: usize, statistics: Statistics, max_n: usize, rng: &mut R) -> FockState {
    let top = if statistics == Statistics::Fermion { max_n.min(d) } else { max_n };
    loop {
        let mut comps = Vec::new();
        for n in 0..=top {
            if rng.gen_bool(0.6) {
                let t = random_component(n, d, statistics, rng);
                if !t.is_zero() {
                    comps.push(t);
                }
            }
        }
        let s = FockState::from_components(d, statistics, comps, None).expect("consistent components");
        if !s.is_zero() {
            return s;
        }
    }
}

/// Product ansätze searched by [`product_ansatz_infidelity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ansatz {
    /// x ⊗ y
    Tensor,
    /// x ∨ y
    Symmetric,
    /// x ⊗ x
    Identical,
    /// x ∧ y
    Antisymmetric,
}

fn infidelity(target: &[C64], target_norm2: f64, d: usize, ansatz: Ansatz, p: &[f64]) -> f64 {
    let x = |i: usize| C64::new(p[2 * i], p[2 * i + 1]);
    let y = |i: usize| match ansatz {
        Ansatz::Identical => x(i),
        _ => C64::new(p[2 * d + 2 * i], p[2 * d + 2 * i + 1]),
    };
    let mut overlap = ZERO;
    let mut norm2 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let a = match ansatz {
                Ansatz::Tensor | Ansatz::Identical => x(i) * y(j),
                Ansatz::Symmetric => x(i) * y(j) + y(i) * x(j),
                Ansatz::Antisymmetric => x(i) * y(j) - y(i) * x(j),
            };
            overlap += a.conj() * target[i * d + j];
            norm2 += a.norm_sqr();
        }
    }
    if norm2 < 1e-300 {
        return 1.0;
    }
    1.0 - overlap.norm_sqr() / (norm2 * target_norm2)
}

/// Brute-force search for the best two-particle product approximation:
/// minimizes 1 − |⟨A, T⟩|²/(‖A‖²‖T‖²) over the ansatz family by dense random
/// sampling followed by restarted Nelder–Mead refinement of the best samples.
/// Uses no matrix decomposition, so it is independent of the rank-based
/// verdicts.
pub fn product_ansatz_infidelity<R: Rng + ?Sized>(t: &NTensor, ansatz: Ansatz, rng: &mut R) -> f64 {
    assert_eq!(t.n(), 2, "the oracle handles two-particle tensors");
    let d = t.dim();
    let target: Vec<C64> = (0..d * d).map(|k| t.get(&[k / d, k % d])).collect();
    let target_norm2 = t.norm_sqr();
    let dims = if ansatz == Ansatz::Identical { 2 * d } else { 4 * d };
    let f = |p: &[f64]| infidelity(&target, target_norm2, d, ansatz, p);
    let mut samples: Vec<(f64, Vec<f64>)> = (0..2000)
        .map(|_| {
            let p: Vec<f64> = (0..dims).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            (f(&p), p)
        })
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = f64::INFINITY;
    for (start_value, start) in samples.iter().take(4) {
        let mut p = start.clone();
        let mut current = *start_value;
        let mut step = 0.5;
        for _ in 0..10 {
            let (v, q) = nelder_mead(&f, &p, step, 4000);
            let stalled = current - v <= 1e-12 * current;
            p = q;
            current = v;
            step *= 0.3;
            if v < 1e-14 || stalled {
                break;
            }
        }
        best = best.min(current);
        if best < 1e-14 {
            break;
        }
    }
    best.max(0.0)
}

/// Plain Nelder–Mead minimizer; returns the best value and point.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], step: f64, max_iter: usize) -> (f64, Vec<f64>) {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if values[n] - values[0] <= 1e-13 * values[0].abs() + 1e-17 {
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|k| simplex[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + t * (simplex[n][k] - centroid[k])).collect() };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let contracted = if fr < values[n] { along(-0.5) } else { along(0.5) };
            let fc = f(&contracted);
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = (0..n).map(|k| best[k] + 0.5 * (simplex[i][k] - best[k])).collect();
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let (i, v) = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, v)| (i, *v)).expect("simplex");
    (v, simplex[i].clone())
}

/// Below this best-ansatz infidelity the oracle calls a tensor a product.
/// Infidelity is quadratic in the discarded singular values, so this sits
/// as low as the simplex search reliably reaches on exact products.
pub const ORACLE_ACCEPT: f64 = 1e-11;

/// Particle verdicts for a two-particle tensor according to the brute-force
/// ansatz search alone.
pub fn oracle_verdicts<R: Rng + ?Sized>(t: &NTensor, statistics: Statistics, rng: &mut R) -> Vec<(Slot, Status)> {
    let checks: &[(Slot, Ansatz)] = match statistics {
        Statistics::Distinguishable => &[(Slot::ParticleDist, Ansatz::Tensor)],
        Statistics::Boson => &[(Slot::ParticleIndistBoson, Ansatz::Symmetric), (Slot::ParticleIdenticalBoson, Ansatz::Identical)],
        Statistics::Fermion => &[(Slot::ParticleFermion, Ansatz::Antisymmetric)],
    };
    checks
        .iter()
        .map(|&(slot, ansatz)| {
            let f = product_ansatz_infidelity(t, ansatz, rng);
            (slot, if f < ORACLE_ACCEPT { Status::Factorizable } else { Status::Entangled })
        })
        .collect()
}

/// A state holding one random two-particle component.
pub fn random_pair_state<R: Rng + ?Sized>(d: usize, statistics: Statistics, rng: &mut R) -> FockState {
    loop {
        let t = random_component(2, d, statistics, rng);
        if !t.is_zero() {
            return FockState::from_tensor(t, statistics).expect("component matches statistics");
        }
    }
}

/// Classifies `psi` and three transformed copies (random complex rescaling,
/// random per-mode phases, a random global single-particle unitary) and
/// lists every status that changed. Field statuses are compared for the
/// first two, particle statuses for all three.
pub fn invariance_violations<R: Rng + ?Sized>(psi: &FockState, cfg: &ClassifyConfig, rng: &mut R) -> Vec<String> {
    let base = classify_with(psi, cfg).expect("valid state");
    let particle = [Slot::ParticleDist, Slot::ParticleIndistBoson, Slot::ParticleIdenticalBoson, Slot::ParticleFermion];
    let mut c = gaussian(rng);
    while c.norm() < 1e-3 {
        c = gaussian(rng);
    }
    let thetas: Vec<f64> = (0..psi.dim()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    let u = random_unitary(psi.dim(), rng);
    let variants = [
        ("scale", psi.scaled(c), true),
        ("mode phases", rotate_mode_phases(psi, &thetas).expect("matching dims"), true),
        ("unitary", psi.apply_single_particle(&u).expect("matching dims"), false),
    ];
    let mut out = Vec::new();
    for (label, state, with_field) in variants {
        let report = classify_with(&state, cfg).expect("valid state");
        let slots: Vec<Slot> = if with_field { Slot::ALL.to_vec() } else { particle.to_vec() };
        for slot in slots {
            if report.status(slot) != base.status(slot) {
                out.push(format!("{label}: {} {} -> {}", slot.as_str(), base.status(slot).as_str(), report.status(slot).as_str()));
            }
        }
    }
    out
}

/// Largest entrywise difference between two tensors of the same shape.
pub fn max_entry_diff(a: &NTensor, b: &NTensor) -> f64 {
    let mut m = 0.0f64;
    for (k, v) in a.entries() {
        m = m.max((v - b.get(k)).norm());
    }
    for (k, v) in b.entries() {
        if !a.entries().contains_key(k) {
            m = m.max(v.norm());
        }
    }
    m
}

/// ‖M‖ for the zero-safe relative residuals used in tests.
pub fn rel_residual(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let scale = a.norm();
    if scale == 0.0 {
        return b.norm();
    }
    (a - b).norm() / scale
}

pub fn zero_matrix(d: usize) -> DMatrix<C64> {
    DMatrix::from_element(d, d, ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_unitary(4, &mut rng);
        let id = DMatrix::<C64>::identity(4, 4);
        assert!((u.adjoint() * &u - id).norm() < 1e-12);
    }

    #[test]
    fn oracle_separates_product_from_bell() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = random_product(2, 3, Statistics::Distinguishable, &mut rng);
        assert!(product_ansatz_infidelity(&p, Ansatz::Tensor, &mut rng) < 1e-9);
        let e0 = NTensor::from_vec(&SinglePartVec::basis(2, 0).unwrap());
        let e1 = NTensor::from_vec(&SinglePartVec::basis(2, 1).unwrap());
        let bell = otimes(&e0, &e0).unwrap().axpy(C64::new(1.0, 0.0), &otimes(&e1, &e1).unwrap()).unwrap();
        let v = product_ansatz_infidelity(&bell, Ansatz::Tensor, &mut rng);
        assert!((v - 0.5).abs() < 1e-9, "{v}");
    }
}
