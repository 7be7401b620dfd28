//! Field and particle factorizability verdicts.
//!
//! Every verdict is aggregated over components (or cuts): one Entangled part
//! makes the whole state Entangled, otherwise one Indeterminate part makes it
//! Indeterminate, otherwise it is Factorizable. A part is Indeterminate only
//! when the singular value that decides its rank question sits within a
//! factor of ten of the cutoff, or when a rank-one fit lands between the
//! accept and reject thresholds.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decomp::{
    one_particle_rdm, rank_one_fit, singular_values, slater_with, takagi_with, FitOptions, RankPolicy,
};
use crate::error::{FockError, Result};
use crate::fock::{FockState, NTensor, Statistics, C64};
use crate::tensor::{compact_matrix, compact_slot_flattening};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Factorizable,
    Entangled,
    Indeterminate,
    NotApplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Factorizable => "factorizable",
            Status::Entangled => "entangled",
            Status::Indeterminate => "indeterminate",
            Status::NotApplicable => "not_applicable",
        }
    }

    fn combine(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Entangled, _) | (_, Entangled) => Entangled,
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (NotApplicable, x) | (x, NotApplicable) => x,
            _ => Factorizable,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The five verdict slots of a [`Report`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Field,
    ParticleDist,
    ParticleIndistBoson,
    ParticleIdenticalBoson,
    ParticleFermion,
}

impl Slot {
    pub const ALL: [Slot; 5] = [
        Slot::Field,
        Slot::ParticleDist,
        Slot::ParticleIndistBoson,
        Slot::ParticleIdenticalBoson,
        Slot::ParticleFermion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Slot::Field => "field",
            Slot::ParticleDist => "particle_dist",
            Slot::ParticleIndistBoson => "particle_indist_boson",
            Slot::ParticleIdenticalBoson => "particle_identical_boson",
            Slot::ParticleFermion => "particle_fermion",
        }
    }

    /// Whether the slot is populated for states of the given statistics.
    pub fn applies_to(self, statistics: Statistics) -> bool {
        match self {
            Slot::Field => true,
            Slot::ParticleDist => statistics == Statistics::Distinguishable,
            Slot::ParticleIndistBoson | Slot::ParticleIdenticalBoson => statistics == Statistics::Boson,
            Slot::ParticleFermion => statistics == Statistics::Fermion,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankCertificate {
    /// Human-readable cut label, e.g. `mode 1` or `n=3 slot 0`.
    pub cut: String,
    pub rank: usize,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitCertificate {
    pub n: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Witness {
    pub ranks: Vec<RankCertificate>,
    pub residuals: Vec<FitCertificate>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub witness: Witness,
    pub marginal: bool,
}

impl Verdict {
    fn not_applicable(note: impl Into<String>) -> Self {
        Self {
            status: Status::NotApplicable,
            witness: Witness { note: Some(note.into()), ..Witness::default() },
            marginal: false,
        }
    }

    fn empty() -> Self {
        Self { status: Status::Factorizable, witness: Witness::default(), marginal: false }
    }

    fn absorb(&mut self, part: Part) {
        self.status = self.status.combine(part.status);
        self.marginal |= part.marginal;
        self.witness.ranks.extend(part.ranks);
        self.witness.residuals.extend(part.residual);
        if let Some(note) = part.note {
            self.witness.note.get_or_insert(note);
        }
    }
}

/// Numerical evidence gathered for one n-particle component.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentReport {
    pub n: usize,
    /// ‖ψ⁽ⁿ⁾‖² of the normalized state.
    pub weight: f64,
    /// Schmidt ranks of the single-slot flattenings (all slots for
    /// distinguishable particles, slot 0 otherwise).
    pub slot_ranks: Vec<usize>,
    pub takagi_rank: Option<usize>,
    pub slater_rank: Option<usize>,
    pub fit_residual: Option<f64>,
    /// Eigenvalues of the one-particle reduced density matrix (fermions).
    pub rdm_spectrum: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyConfig {
    pub rank: RankPolicy,
    /// Fit residuals below this accept ∨-factorizability.
    pub fit_accept: f64,
    /// Fit residuals at or above this reject it.
    pub fit_reject: f64,
    pub fit: FitOptions,
    pub seed: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { rank: RankPolicy::default(), fit_accept: 1e-8, fit_reject: 1e-3, fit: FitOptions::default(), seed: 42 }
    }
}

impl ClassifyConfig {
    pub fn with_tol(mut self, tol_rel: f64) -> Self {
        self.rank.tol_rel = tol_rel;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub statistics: Statistics,
    pub dim: usize,
    pub nmax: usize,
    pub field: Verdict,
    pub particle_dist: Verdict,
    pub particle_indist_boson: Verdict,
    pub particle_identical_boson: Verdict,
    pub particle_fermion: Verdict,
    pub per_component: Vec<ComponentReport>,
    pub config: ClassifyConfig,
}

impl Report {
    pub fn verdict(&self, slot: Slot) -> &Verdict {
        match slot {
            Slot::Field => &self.field,
            Slot::ParticleDist => &self.particle_dist,
            Slot::ParticleIndistBoson => &self.particle_indist_boson,
            Slot::ParticleIdenticalBoson => &self.particle_identical_boson,
            Slot::ParticleFermion => &self.particle_fermion,
        }
    }

    pub fn status(&self, slot: Slot) -> Status {
        self.verdict(slot).status
    }

    pub fn component(&self, n: usize) -> Option<&ComponentReport> {
        self.per_component.iter().find(|c| c.n == n)
    }

    pub fn any_indeterminate(&self) -> bool {
        Slot::ALL.iter().any(|&s| self.status(s) == Status::Indeterminate)
    }
}

/// Verdict contribution of one cut or component.
struct Part {
    status: Status,
    marginal: bool,
    ranks: Vec<RankCertificate>,
    residual: Option<FitCertificate>,
    note: Option<String>,
}

impl Part {
    fn factorizable() -> Self {
        Part { status: Status::Factorizable, marginal: false, ranks: Vec::new(), residual: None, note: None }
    }
}

/// Decides "rank ≤ k" for a nonincreasing spectrum.
struct RankQuestion {
    rank: usize,
    margin: f64,
    marginal: bool,
    decision_marginal: bool,
}

fn ask(policy: &RankPolicy, values: &[f64], k: usize) -> RankQuestion {
    let rank = policy.rank(values);
    RankQuestion {
        rank,
        margin: RankPolicy::margin(values, rank),
        marginal: policy.any_marginal(values),
        decision_marginal: policy.is_marginal_at(values, k),
    }
}

fn rank_part(q: &RankQuestion, k: usize, cut: String) -> Part {
    let status = if q.decision_marginal {
        Status::Indeterminate
    } else if q.rank <= k {
        Status::Factorizable
    } else {
        Status::Entangled
    };
    Part {
        status,
        marginal: q.marginal,
        ranks: vec![RankCertificate { cut, rank: q.rank, margin: q.margin }],
        residual: None,
        note: None,
    }
}

fn prepare(psi: &FockState) -> Result<FockState> {
    if psi.is_zero() {
        return Err(FockError::ZeroState);
    }
    psi.normalized()
}

fn field_verdict(psi: &FockState, cfg: &ClassifyConfig) -> Result<Verdict> {
    let amps = psi.occupation_amplitudes()?;
    let mut verdict = Verdict::empty();
    for mode in 0..psi.dim() {
        let m = compact_matrix(amps.iter().map(|(occ, &v)| {
            let mut rest = occ.counts().to_vec();
            let row = rest.remove(mode);
            (vec![row], rest, v)
        }));
        let values = singular_values(&m);
        let q = ask(&cfg.rank, &values, 1);
        verdict.absorb(rank_part(&q, 1, format!("mode {mode}")));
    }
    Ok(verdict)
}

/// Field factorizability: every single-mode cut of the occupation amplitudes
/// has Schmidt rank one.
pub fn field_factorizable(psi: &FockState, cfg: &ClassifyConfig) -> Result<Verdict> {
    field_verdict(&prepare(psi)?, cfg)
}

fn component_rng(cfg: &ClassifyConfig, n: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Per-component analysis shared by the particle verdicts.
struct Analysis {
    report: ComponentReport,
    parts: Vec<(Slot, Part)>,
}

fn analyze(t: &NTensor, statistics: Statistics, cfg: &ClassifyConfig) -> Result<Analysis> {
    let n = t.n();
    let mut report = ComponentReport {
        n,
        weight: t.norm_sqr(),
        slot_ranks: Vec::new(),
        takagi_rank: None,
        slater_rank: None,
        fit_residual: None,
        rdm_spectrum: None,
    };
    let mut parts = Vec::new();
    if n <= 1 {
        for slot in Slot::ALL.into_iter().skip(1).filter(|s| s.applies_to(statistics)) {
            parts.push((slot, Part::factorizable()));
        }
        return Ok(Analysis { report, parts });
    }
    match statistics {
        Statistics::Distinguishable => {
            let mut part = Part::factorizable();
            for slot in 0..n {
                let values = singular_values(&compact_slot_flattening(t, slot));
                let q = ask(&cfg.rank, &values, 1);
                report.slot_ranks.push(q.rank);
                let p = rank_part(&q, 1, format!("n={n} slot {slot}"));
                part.status = part.status.combine(p.status);
                part.marginal |= p.marginal;
                part.ranks.extend(p.ranks);
            }
            parts.push((Slot::ParticleDist, part));
        }
        Statistics::Boson => {
            let slot_values = singular_values(&compact_slot_flattening(t, 0));
            let slot_q = ask(&cfg.rank, &slot_values, 1);
            report.slot_ranks.push(slot_q.rank);
            if n == 2 {
                let d = takagi_with(&t.matrix()?, &cfg.rank)?;
                report.takagi_rank = Some(d.rank);
                let ident = rank_part(&ask(&cfg.rank, &d.values, 1), 1, format!("n={n} takagi"));
                let indist = rank_part(&ask(&cfg.rank, &d.values, 2), 2, format!("n={n} takagi"));
                parts.push((Slot::ParticleIndistBoson, indist));
                parts.push((Slot::ParticleIdenticalBoson, ident));
            } else {
                let ident = rank_part(&slot_q, 1, format!("n={n} slot 0"));
                let wide = ask(&cfg.rank, &slot_values, n);
                let indist = if ident.status == Status::Factorizable {
                    rank_part(&slot_q, 1, format!("n={n} slot 0"))
                } else if !wide.decision_marginal && wide.rank > n {
                    rank_part(&wide, n, format!("n={n} slot 0"))
                } else {
                    let mut p = rank_part(&slot_q, n, format!("n={n} slot 0"));
                    p.status = Status::Indeterminate;
                    match rank_one_fit(t, &cfg.fit, &mut component_rng(cfg, n)) {
                        Ok(fit) => {
                            report.fit_residual = Some(fit.residual);
                            p.residual = Some(FitCertificate { n, residual: fit.residual });
                            if fit.residual < cfg.fit_accept {
                                p.status = Status::Factorizable;
                            } else if fit.residual >= cfg.fit_reject {
                                p.status = Status::Entangled;
                            }
                        }
                        Err(FockError::TooLarge(msg)) => p.note = Some(format!("n={n}: fit skipped, {msg}")),
                        Err(e) => return Err(e),
                    }
                    p
                };
                parts.push((Slot::ParticleIndistBoson, indist));
                parts.push((Slot::ParticleIdenticalBoson, ident));
            }
        }
        Statistics::Fermion => {
            if n == 2 {
                let d = slater_with(&t.matrix()?, &cfg.rank)?;
                report.slater_rank = Some(d.slater_rank());
                let q = ask(&cfg.rank, &d.values, 2);
                let mut p = rank_part(&q, 2, format!("n={n} slater"));
                p.ranks[0].rank = d.slater_rank();
                parts.push((Slot::ParticleFermion, p));
            } else {
                let values = singular_values(&compact_slot_flattening(t, 0));
                let q = ask(&cfg.rank, &values, n);
                report.slot_ranks.push(q.rank);
                let rdm = one_particle_rdm(t)?;
                let spectrum: Vec<f64> = crate::linalg::hermitian_eigen(&rdm).0.iter().map(|x| x.max(0.0)).collect();
                report.rdm_spectrum = Some(spectrum);
                parts.push((Slot::ParticleFermion, rank_part(&q, n, format!("n={n} slot 0"))));
            }
        }
    }
    Ok(Analysis { report, parts })
}

fn particle_verdict(psi: &FockState, slot: Slot, cfg: &ClassifyConfig) -> Result<Verdict> {
    if !slot.applies_to(psi.statistics()) {
        return Ok(Verdict::not_applicable(format!("{} statistics", psi.statistics())));
    }
    let psi = prepare(psi)?;
    let mut verdict = Verdict::empty();
    for (_, t) in psi.components() {
        for (s, part) in analyze(t, psi.statistics(), cfg)?.parts {
            if s == slot {
                verdict.absorb(part);
            }
        }
    }
    Ok(verdict)
}

/// Every component is a ⊗-product of single-particle states.
pub fn particle_factorizable_dist(psi: &FockState, cfg: &ClassifyConfig) -> Result<Verdict> {
    particle_verdict(psi, Slot::ParticleDist, cfg)
}

/// Every component is a ∨-product of possibly different single-particle
/// states. Exact for n ≤ 2 (Takagi rank ≤ 2); a fit-based semidecision for
/// larger n unless a slot rank settles it.
pub fn boson_factorizable_indist(psi: &FockState, cfg: &ClassifyConfig) -> Result<Verdict> {
    particle_verdict(psi, Slot::ParticleIndistBoson, cfg)
}

/// Every component is a power ψ^{∨n} of a single state.
pub fn boson_factorizable_identical(psi: &FockState, cfg: &ClassifyConfig) -> Result<Verdict> {
    particle_verdict(psi, Slot::ParticleIdenticalBoson, cfg)
}

/// Every component is a single ∧-product (Slater determinant).
pub fn fermion_factorizable(psi: &FockState, cfg: &ClassifyConfig) -> Result<Verdict> {
    particle_verdict(psi, Slot::ParticleFermion, cfg)
}

pub fn classify(psi: &FockState) -> Result<Report> {
    classify_with(psi, &ClassifyConfig::default())
}

pub fn classify_with(psi: &FockState, cfg: &ClassifyConfig) -> Result<Report> {
    let stats = psi.statistics();
    let normed = prepare(psi)?;
    let field = match field_verdict(&normed, cfg) {
        Ok(v) => v,
        Err(FockError::NotModeOrdered(key)) => Verdict::not_applicable(format!(
            "key {key:?} lies outside the mode-ordered subspace; field factorizability is undefined there"
        )),
        Err(e) => return Err(e),
    };
    let mut slots: Vec<(Slot, Verdict)> = Slot::ALL[1..]
        .iter()
        .map(|&s| {
            let v = if s.applies_to(stats) { Verdict::empty() } else { Verdict::not_applicable(format!("{stats} statistics")) };
            (s, v)
        })
        .collect();
    let mut per_component = Vec::new();
    for (_, t) in normed.components() {
        let analysis = analyze(t, stats, cfg)?;
        for (slot, part) in analysis.parts {
            if let Some((_, v)) = slots.iter_mut().find(|(s, _)| *s == slot) {
                v.absorb(part);
            }
        }
        per_component.push(analysis.report);
    }
    let take = |slot: Slot| slots.iter().find(|(s, _)| *s == slot).map(|(_, v)| v.clone()).expect("slot");
    let mut indist = take(Slot::ParticleIndistBoson);
    let identical = take(Slot::ParticleIdenticalBoson);
    if identical.status == Status::Factorizable && indist.status != Status::Factorizable {
        indist.status = Status::Factorizable;
        indist.witness.note = Some("implied by identical-boson factorizability".into());
    }
    Ok(Report {
        statistics: stats,
        dim: psi.dim(),
        nmax: psi.nmax(),
        field,
        particle_dist: take(Slot::ParticleDist),
        particle_indist_boson: indist,
        particle_identical_boson: identical,
        particle_fermion: take(Slot::ParticleFermion),
        per_component,
        config: *cfg,
    })
}

/// Applies the phase e^{iθⱼnⱼ} to every occupation amplitude.
pub fn rotate_mode_phases(psi: &FockState, thetas: &[f64]) -> Result<FockState> {
    if thetas.len() != psi.dim() {
        return Err(FockError::InvalidDimension(format!("{} phases for {} modes", thetas.len(), psi.dim())));
    }
    let u = nalgebra::DMatrix::from_fn(psi.dim(), psi.dim(), |i, j| {
        if i == j { C64::from_polar(1.0, thetas[i]) } else { C64::new(0.0, 0.0) }
    });
    psi.apply_single_particle(&u)
}
