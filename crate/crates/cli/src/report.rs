//! Report documents: JSON (`report_v1`) and a plain-text table.
//!
//! JSON numbers are written with 17 significant digits; non-finite values
//! become `null`. Optional fields are omitted when absent.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use fockpart_core::classify::{Report, Slot, Verdict};
use fockpart_core::gallery::{GallerySpec, ParamValue};
use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter};

pub const VERSION: &str = "report_v1";

#[derive(Clone, Debug, Serialize)]
pub struct ReportDoc {
    pub version: &'static str,
    pub name: String,
    pub statistics: String,
    pub dim: usize,
    pub config: ConfigDoc,
    pub verdicts: VerdictsDoc,
    pub per_component: Vec<ComponentDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gallery: Option<GalleryDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigDoc {
    pub stats: String,
    pub nmax: usize,
    pub tol_rel: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictsDoc {
    pub field: VerdictDoc,
    pub particle_dist: VerdictDoc,
    pub particle_indist_boson: VerdictDoc,
    pub particle_identical_boson: VerdictDoc,
    pub particle_fermion: VerdictDoc,
}

impl VerdictsDoc {
    pub fn get(&self, slot: Slot) -> &VerdictDoc {
        match slot {
            Slot::Field => &self.field,
            Slot::ParticleDist => &self.particle_dist,
            Slot::ParticleIndistBoson => &self.particle_indist_boson,
            Slot::ParticleIdenticalBoson => &self.particle_identical_boson,
            Slot::ParticleFermion => &self.particle_fermion,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictDoc {
    pub status: &'static str,
    pub marginal: bool,
    pub witness: WitnessDoc,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessDoc {
    pub ranks: Vec<RankDoc>,
    pub residuals: Vec<ResidualDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankDoc {
    pub cut: String,
    pub rank: usize,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualDoc {
    pub n: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentDoc {
    pub n: usize,
    pub weight: f64,
    pub slot_ranks: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub takagi_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slater_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rdm_spectrum: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GalleryDoc {
    pub name: String,
    pub label: String,
    pub params: BTreeMap<String, serde_json::Value>,
    /// Expected status per slot; slots without a claim are absent.
    pub expected: BTreeMap<&'static str, &'static str>,
}

fn verdict_doc(v: &Verdict) -> VerdictDoc {
    VerdictDoc {
        status: v.status.as_str(),
        marginal: v.marginal,
        witness: WitnessDoc {
            ranks: v.witness.ranks.iter().map(|r| RankDoc { cut: r.cut.clone(), rank: r.rank, margin: r.margin }).collect(),
            residuals: v.witness.residuals.iter().map(|r| ResidualDoc { n: r.n, residual: r.residual }).collect(),
            note: v.witness.note.clone(),
        },
    }
}

fn param_json(v: &ParamValue) -> serde_json::Value {
    match v {
        ParamValue::Int(i) => (*i).into(),
        ParamValue::Real(x) => (*x).into(),
        ParamValue::Complex(_) | ParamValue::Name(_) => v.to_string().into(),
    }
}

pub fn gallery_doc(spec: &GallerySpec) -> GalleryDoc {
    GalleryDoc {
        name: spec.name.clone(),
        label: spec.label(),
        params: spec.params.iter().map(|(k, v)| (k.clone(), param_json(v))).collect(),
        expected: spec.expected.iter().map(|(s, st)| (s.as_str(), st.as_str())).collect(),
    }
}

pub fn report_doc(name: &str, r: &Report, gallery: Option<&GallerySpec>) -> ReportDoc {
    ReportDoc {
        version: VERSION,
        name: name.to_string(),
        statistics: r.statistics.as_str().to_string(),
        dim: r.dim,
        config: ConfigDoc {
            stats: r.statistics.as_str().to_string(),
            nmax: r.nmax,
            tol_rel: r.config.rank.tol_rel,
            seed: r.config.seed,
        },
        verdicts: VerdictsDoc {
            field: verdict_doc(&r.field),
            particle_dist: verdict_doc(&r.particle_dist),
            particle_indist_boson: verdict_doc(&r.particle_indist_boson),
            particle_identical_boson: verdict_doc(&r.particle_identical_boson),
            particle_fermion: verdict_doc(&r.particle_fermion),
        },
        per_component: r
            .per_component
            .iter()
            .map(|c| ComponentDoc {
                n: c.n,
                weight: c.weight,
                slot_ranks: c.slot_ranks.clone(),
                takagi_rank: c.takagi_rank,
                slater_rank: c.slater_rank,
                fit_residual: c.fit_residual,
                rdm_spectrum: c.rdm_spectrum.clone(),
            })
            .collect(),
        gallery: gallery.map(gallery_doc),
    }
}

/// Compact JSON with every float as `d.dddddddddddddddde±x`.
struct SciFormatter(CompactFormatter);

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(CompactFormatter));
    value.serialize(&mut ser).expect("report documents serialize");
    let mut s = String::from_utf8(buf).expect("serde_json writes UTF-8");
    s.push('\n');
    s
}

/// One block per report: a header line, then one row per slot.
pub fn to_table(docs: &[ReportDoc]) -> String {
    let mut out = String::new();
    for (k, d) in docs.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{}  [{}, {} modes, nmax {}, tol {:e}, seed {}]",
            d.name, d.statistics, d.dim, d.config.nmax, d.config.tol_rel, d.config.seed
        );
        let _ = writeln!(out, "  {:<26}{:<16}{:<10}witness", "slot", "status", "expected");
        for slot in Slot::ALL {
            let v = d.verdicts.get(slot);
            let status = if v.marginal { format!("{}*", v.status) } else { v.status.to_string() };
            let expected = d.gallery.as_ref().and_then(|g| g.expected.get(slot.as_str())).map_or("-", |s| short(s));
            let _ = writeln!(out, "  {:<26}{:<16}{:<10}{}", slot.as_str(), status, expected, witness_summary(&v.witness));
        }
    }
    out
}

fn short(status: &str) -> &'static str {
    match status {
        "factorizable" => "F",
        "entangled" => "E",
        "indeterminate" => "I",
        _ => "-",
    }
}

fn witness_summary(w: &WitnessDoc) -> String {
    let mut parts = Vec::new();
    if !w.ranks.is_empty() {
        let max = w.ranks.iter().map(|r| r.rank).max().unwrap_or(0);
        let cuts = if w.ranks.len() == 1 { "cut" } else { "cuts" };
        parts.push(format!("max rank {max} over {} {cuts}", w.ranks.len()));
    }
    if let Some(worst) = w.residuals.iter().map(|r| r.residual).reduce(f64::max) {
        parts.push(format!("fit residual {worst:.2e}"));
    }
    if let Some(note) = &w.note {
        parts.push(note.clone());
    }
    parts.join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_get_seventeen_digits_and_nan_is_null() {
        #[derive(Serialize)]
        struct T {
            a: f64,
            b: f64,
            c: usize,
        }
        assert_eq!(to_json(&T { a: 0.1, b: f64::NAN, c: 3 }), "{\"a\":1.0000000000000001e-1,\"b\":null,\"c\":3}\n");
    }
}
