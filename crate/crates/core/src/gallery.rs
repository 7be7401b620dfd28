//! Named example states with their expected classification.
//!
//! | name                   | parameters (defaults)                    | modes   |
//! |------------------------|------------------------------------------|---------|
//! | `fock_basis`           | `n0=1`, `n1=1`, `stats=distinguishable`  | 2       |
//! | `tmsv`                 | `lambda=0.5`, `nmax=8`                   | 2       |
//! | `phi_product`          | `lambda=0.5`, `nmax=5`                   | 2       |
//! | `noon_ghz`             | `lambda=0.5`, `nmax=5`                   | 2       |
//! | `boson_psi_prime`      |                                          | 2       |
//! | `boson_psi`            |                                          | 2       |
//! | `boson_plus_cubed`     |                                          | 3       |
//! | `chi_two_boson`        |                                          | 3       |
//! | `x_state`              |                                          | 3       |
//! | `fermion_ghz_w`        | `L=2`, `M=2`                             | L·M     |
//! | `fermion_bell_product` |                                          | 4       |
//! | `fermion_plus_fourth`  |                                          | 4       |
//!
//! Infinite series are cut at `nmax` with amplitudes exactly λⁿ and then
//! normalized. `phi_product` truncates each factor, so it stays an exact
//! field product; its components above `nmax` particles are truncation
//! artifacts (the top one is a plain product).

use std::collections::BTreeMap;
use std::fmt;

use crate::classify::{Slot, Status};
use crate::error::{FockError, Result};
use crate::fock::{superpose, FockState, NTensor, Occupation, SinglePartVec, Statistics, C64, ONE};
use crate::ladder::{create, mode_series_with};
use crate::tensor::{otimes, wedge};

#[derive(Clone, Debug, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Complex(C64),
    Name(String),
}

impl ParamValue {
    /// Parses `3`, `0.5`, `0.3+0.4i`, `-2i` or a bare word.
    pub fn parse(text: &str) -> ParamValue {
        let t = text.trim();
        if let Ok(i) = t.parse::<i64>() {
            return ParamValue::Int(i);
        }
        if let Ok(x) = t.parse::<f64>() {
            return ParamValue::Real(x);
        }
        if let Some(c) = parse_complex(t) {
            return ParamValue::Complex(c);
        }
        ParamValue::Name(t.to_string())
    }

    fn as_complex(&self) -> Option<C64> {
        match *self {
            ParamValue::Int(i) => Some(C64::new(i as f64, 0.0)),
            ParamValue::Real(x) => Some(C64::new(x, 0.0)),
            ParamValue::Complex(c) => Some(c),
            ParamValue::Name(_) => None,
        }
    }
}

fn parse_complex(t: &str) -> Option<C64> {
    let body = t.strip_suffix('i')?;
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(k, ch)| (ch == '+' || ch == '-') && !body[..k].ends_with(['e', 'E']))
        .map(|(k, _)| k)
        .last();
    let (re, im) = match split {
        Some(k) => (body[..k].parse().ok()?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse().ok()?,
    };
    Some(C64::new(re, im))
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Real(x) => write!(f, "{x}"),
            ParamValue::Complex(c) if c.im >= 0.0 => write!(f, "{}+{}i", c.re, c.im),
            ParamValue::Complex(c) => write!(f, "{}{}i", c.re, c.im),
            ParamValue::Name(s) => f.write_str(s),
        }
    }
}

pub type Params = BTreeMap<String, ParamValue>;

/// A catalog entry with its resolved parameters and the verdicts the state
/// is known to have. Slots absent from `expected` carry no claim.
#[derive(Clone, Debug, PartialEq)]
pub struct GallerySpec {
    pub name: String,
    pub params: Params,
    pub expected: Vec<(Slot, Status)>,
}

impl GallerySpec {
    /// `name(k=v,…)`, or just `name` for parameterless entries.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            return self.name.clone();
        }
        let args: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}({})", self.name, args.join(","))
    }

    pub fn expected(&self, slot: Slot) -> Option<Status> {
        self.expected.iter().find(|(s, _)| *s == slot).map(|(_, st)| *st)
    }
}

pub const CATALOG: [&str; 12] = [
    "fock_basis",
    "tmsv",
    "phi_product",
    "noon_ghz",
    "boson_psi_prime",
    "boson_psi",
    "boson_plus_cubed",
    "chi_two_boson",
    "x_state",
    "fermion_ghz_w",
    "fermion_bell_product",
    "fermion_plus_fourth",
];

/// The fixed list behind `--gallery all`, in output order.
pub fn standard_entries() -> Vec<(&'static str, Params)> {
    let fock = |n0: i64, n1: i64, stats: &str| {
        Params::from([
            ("n0".to_string(), ParamValue::Int(n0)),
            ("n1".to_string(), ParamValue::Int(n1)),
            ("stats".to_string(), ParamValue::Name(stats.to_string())),
        ])
    };
    vec![
        ("fock_basis", fock(2, 1, "distinguishable")),
        ("tmsv", Params::new()),
        ("phi_product", Params::new()),
        ("noon_ghz", Params::new()),
        ("fock_basis", fock(2, 0, "boson")),
        ("fock_basis", fock(1, 1, "boson")),
        ("boson_psi_prime", Params::new()),
        ("boson_psi", Params::new()),
        ("boson_plus_cubed", Params::new()),
        ("chi_two_boson", Params::new()),
        ("x_state", Params::new()),
        ("fermion_bell_product", Params::new()),
        ("fermion_plus_fourth", Params::new()),
        ("fermion_ghz_w", Params::new()),
        ("fock_basis", fock(1, 1, "fermion")),
    ]
}

/// The parameters a catalog entry accepts.
pub fn parameter_names(name: &str) -> Result<&'static [&'static str]> {
    match name {
        "fock_basis" => Ok(&["n0", "n1", "stats"]),
        "tmsv" | "phi_product" | "noon_ghz" => Ok(&["lambda", "nmax"]),
        "fermion_ghz_w" => Ok(&["L", "M"]),
        other if CATALOG.contains(&other) => Ok(&[]),
        other => Err(FockError::UnknownGalleryState(other.to_string())),
    }
}

/// Reads parameters against their defaults, rejecting unknown names.
struct Reader {
    given: Params,
    resolved: Params,
}

impl Reader {
    fn new(name: &str, given: &Params) -> Result<Self> {
        let allowed = parameter_names(name)?;
        if let Some(k) = given.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(FockError::InvalidParameter(format!("`{name}` has no parameter `{k}`")));
        }
        Ok(Self { given: given.clone(), resolved: Params::new() })
    }

    fn int(&mut self, key: &str, default: i64, min: i64) -> Result<usize> {
        let v = match self.given.get(key) {
            None => default,
            Some(ParamValue::Int(i)) => *i,
            Some(other) => return Err(FockError::InvalidParameter(format!("`{key}` must be an integer, got {other}"))),
        };
        if v < min {
            return Err(FockError::InvalidParameter(format!("`{key}` must be at least {min}, got {v}")));
        }
        self.resolved.insert(key.to_string(), ParamValue::Int(v));
        Ok(v as usize)
    }

    fn lambda(&mut self) -> Result<C64> {
        let value = self.given.get("lambda").cloned().unwrap_or(ParamValue::Real(0.5));
        let c = value
            .as_complex()
            .ok_or_else(|| FockError::InvalidParameter(format!("`lambda` must be a number, got {value}")))?;
        if !(c.norm() > 0.0 && c.norm() < 1.0) {
            return Err(FockError::InvalidParameter(format!("need 0 < |lambda| < 1, got {value}")));
        }
        self.resolved.insert("lambda".to_string(), value);
        Ok(c)
    }

    fn stats(&mut self) -> Result<Statistics> {
        let s = match self.given.get("stats") {
            None => Statistics::Distinguishable,
            Some(ParamValue::Name(n)) => n.parse()?,
            Some(other) => return Err(FockError::InvalidParameter(format!("`stats` must be a name, got {other}"))),
        };
        self.resolved.insert("stats".to_string(), ParamValue::Name(s.as_str().to_string()));
        Ok(s)
    }
}

fn occupations(dim: usize, stats: Statistics, terms: &[(&[usize], f64)]) -> Result<FockState> {
    let amps = terms
        .iter()
        .map(|(c, a)| Ok((Occupation::new(c.to_vec())?, C64::new(*a, 0.0))))
        .collect::<Result<Vec<_>>>()?;
    FockState::from_occupations(dim, stats, amps, None)?.normalized()
}

/// Σ_{n ≤ nmax} λⁿ|n⟩ on a single mode, unnormalized.
fn phi_mode(lambda: C64, nmax: usize, stats: Statistics) -> Result<FockState> {
    let coeffs: Vec<C64> = (0..=nmax).map(|n| lambda.powu(n as u32)).collect();
    mode_series_with(&SinglePartVec::basis(1, 0)?, &coeffs, nmax, stats)
}

/// |0⟩_F + |1⟩_F on a single mode.
fn plus_mode(stats: Statistics) -> Result<FockState> {
    let vac = FockState::vacuum(1, stats)?;
    let one = create(&SinglePartVec::basis(1, 0)?, &vac)?;
    superpose(&[(ONE, vac), (ONE, one)])
}

fn vec_tensor(amps: &[f64]) -> Result<NTensor> {
    Ok(NTensor::from_vec(&SinglePartVec::from_real(amps)?))
}

/// Builds a catalog state and its expectations. Parameters not given take
/// their defaults; the returned spec lists every resolved parameter.
pub fn gallery_state(name: &str, params: &Params) -> Result<(FockState, GallerySpec)> {
    use Slot::*;
    use Status::{Entangled as E, Factorizable as F};
    let (state, expected, r) = match name {
        "fock_basis" => {
            let mut r = Reader::new(name, params)?;
            let n0 = r.int("n0", 1, 0)?;
            let n1 = r.int("n1", 1, 0)?;
            let stats = r.stats()?;
            let state = crate::fock::occupation_state(&Occupation::new(vec![n0, n1])?, stats)?;
            let expected = match stats {
                Statistics::Distinguishable => vec![(Field, F), (ParticleDist, F)],
                Statistics::Boson => {
                    let identical = if n0 == 0 || n1 == 0 { F } else { E };
                    vec![(Field, F), (ParticleIndistBoson, F), (ParticleIdenticalBoson, identical)]
                }
                Statistics::Fermion => vec![(Field, F), (ParticleFermion, F)],
            };
            (state, expected, r)
        }
        "tmsv" => {
            let mut r = Reader::new(name, params)?;
            let lambda = r.lambda()?;
            let nmax = r.int("nmax", 8, 1)?;
            let amps = (0..=nmax)
                .map(|n| Ok((Occupation::new(vec![n, n])?, lambda.powu(n as u32))))
                .collect::<Result<Vec<_>>>()?;
            let state = FockState::from_occupations(2, Statistics::Distinguishable, amps, None)?.normalized()?;
            (state, vec![(Field, E), (ParticleDist, F)], r)
        }
        "phi_product" => {
            let mut r = Reader::new(name, params)?;
            let lambda = r.lambda()?;
            let nmax = r.int("nmax", 5, 2)?;
            let phi = phi_mode(lambda, nmax, Statistics::Distinguishable)?;
            let state = phi.field_product(&phi)?.normalized()?;
            (state, vec![(Field, F), (ParticleDist, E)], r)
        }
        "noon_ghz" => {
            let mut r = Reader::new(name, params)?;
            let lambda = r.lambda()?;
            let nmax = r.int("nmax", 5, 2)?;
            let phi = phi_mode(lambda, nmax, Statistics::Distinguishable)?;
            let vac = FockState::vacuum(1, Statistics::Distinguishable)?;
            let state = superpose(&[(ONE, phi.field_product(&vac)?), (ONE, vac.field_product(&phi)?)])?.normalized()?;
            (state, vec![(Field, E), (ParticleDist, E)], r)
        }
        "boson_psi_prime" => {
            let state = occupations(2, Statistics::Boson, &[(&[2, 0], 1.0), (&[0, 3], 3.0)])?;
            let r = Reader::new(name, params)?;
            (state, vec![(Field, E), (ParticleIndistBoson, F), (ParticleIdenticalBoson, F)], r)
        }
        "boson_psi" => {
            let state = occupations(2, Statistics::Boson, &[(&[1, 1], 1.0), (&[0, 3], 3.0 * 2f64.sqrt())])?;
            let r = Reader::new(name, params)?;
            (state, vec![(Field, E), (ParticleIndistBoson, F), (ParticleIdenticalBoson, E)], r)
        }
        "boson_plus_cubed" => {
            let state = plus_mode(Statistics::Boson)?.field_power(3)?.normalized()?;
            let r = Reader::new(name, params)?;
            (state, vec![(Field, F), (ParticleIndistBoson, E), (ParticleIdenticalBoson, E)], r)
        }
        "chi_two_boson" => {
            let e = |j| Ok::<_, FockError>(NTensor::from_vec(&SinglePartVec::basis(3, j)?));
            let t = otimes(&e(0)?, &e(1)?)?.axpy(ONE, &otimes(&e(1)?, &e(0)?)?)?.axpy(ONE, &otimes(&e(2)?, &e(2)?)?)?;
            let state = FockState::from_tensor(t, Statistics::Boson)?.normalized()?;
            let r = Reader::new(name, params)?;
            (state, vec![(ParticleIndistBoson, E), (ParticleIdenticalBoson, E)], r)
        }
        "x_state" => {
            let state = occupations(3, Statistics::Boson, &[(&[1, 1, 0], 2f64.sqrt()), (&[0, 0, 2], 1.0)])?;
            let r = Reader::new(name, params)?;
            (state, vec![(Field, E), (ParticleIndistBoson, E), (ParticleIdenticalBoson, E)], r)
        }
        "fermion_ghz_w" => {
            let mut r = Reader::new(name, params)?;
            let l = r.int("L", 2, 1)?;
            let m = r.int("M", 2, 1)?;
            let dim = l * m;
            let amps = (0..l)
                .map(|block| {
                    let counts = (0..dim).map(|j| usize::from(j / m == block)).collect();
                    Ok((Occupation::new(counts)?, ONE))
                })
                .collect::<Result<Vec<_>>>()?;
            let state = FockState::from_occupations(dim, Statistics::Fermion, amps, None)?.normalized()?;
            let field = if l >= 2 { E } else { F };
            let particle = if l >= 2 && m >= 2 { E } else { F };
            (state, vec![(Field, field), (ParticleFermion, particle)], r)
        }
        "fermion_bell_product" => {
            let t = wedge(&vec_tensor(&[1.0, 1.0, 0.0, 0.0])?, &vec_tensor(&[0.0, 0.0, 1.0, 1.0])?)?;
            let state = FockState::from_tensor(t, Statistics::Fermion)?.normalized()?;
            let r = Reader::new(name, params)?;
            (state, vec![(Field, E), (ParticleFermion, F)], r)
        }
        "fermion_plus_fourth" => {
            let state = plus_mode(Statistics::Fermion)?.field_power(4)?.normalized()?;
            let r = Reader::new(name, params)?;
            (state, vec![(Field, F), (ParticleFermion, E)], r)
        }
        other => return Err(FockError::UnknownGalleryState(other.to_string())),
    };
    Ok((state, GallerySpec { name: name.to_string(), params: r.resolved, expected }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;
    use crate::fock::equal_up_to_phase;

    fn p(pairs: &[(&str, ParamValue)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn every_catalog_entry_matches_its_expectations() {
        for name in CATALOG {
            let (state, spec) = gallery_state(name, &Params::new()).unwrap();
            let report = classify(&state).unwrap();
            for (slot, status) in &spec.expected {
                assert_eq!(report.status(*slot), *status, "{} {slot}", spec.label());
            }
        }
    }

    #[test]
    fn standard_entries_match() {
        for (name, params) in standard_entries() {
            let (state, spec) = gallery_state(name, &params).unwrap();
            let report = classify(&state).unwrap();
            for (slot, status) in &spec.expected {
                assert_eq!(report.status(*slot), *status, "{} {slot}", spec.label());
            }
        }
    }

    #[test]
    fn chi_and_x_coincide() {
        let (chi, _) = gallery_state("chi_two_boson", &Params::new()).unwrap();
        let (x, _) = gallery_state("x_state", &Params::new()).unwrap();
        assert!(equal_up_to_phase(&chi, &x, 1e-12).unwrap());
    }

    #[test]
    fn tmsv_has_nmax_plus_one_field_rank() {
        let (s, _) = gallery_state("tmsv", &Params::new()).unwrap();
        let r = classify(&s).unwrap();
        assert!(r.field.witness.ranks.iter().all(|c| c.rank == 9));
        assert!(s.component(3).is_zero());
    }

    #[test]
    fn parameter_errors() {
        assert_eq!(
            gallery_state("nope", &Params::new()).unwrap_err(),
            FockError::UnknownGalleryState("nope".into())
        );
        for bad in [ParamValue::Real(1.0), ParamValue::Real(0.0), ParamValue::Complex(C64::new(0.8, 0.8))] {
            let err = gallery_state("tmsv", &p(&[("lambda", bad)])).unwrap_err();
            assert!(matches!(err, FockError::InvalidParameter(_)));
        }
        assert!(matches!(
            gallery_state("fermion_ghz_w", &p(&[("L", ParamValue::Int(0))])),
            Err(FockError::InvalidParameter(_))
        ));
        assert!(matches!(
            gallery_state("x_state", &p(&[("lambda", ParamValue::Real(0.5))])),
            Err(FockError::InvalidParameter(_))
        ));
        assert!(matches!(
            gallery_state("fock_basis", &p(&[("n0", ParamValue::Int(2)), ("stats", ParamValue::Name("fermion".into()))])),
            Err(FockError::PauliViolation { .. })
        ));
    }

    #[test]
    fn complex_lambda_is_accepted() {
        let (s, spec) = gallery_state("tmsv", &p(&[("lambda", ParamValue::Complex(C64::new(0.3, 0.4)))])).unwrap();
        assert_eq!(spec.label(), "tmsv(lambda=0.3+0.4i,nmax=8)");
        assert_eq!(classify(&s).unwrap().field.status, Status::Entangled);
    }

    #[test]
    fn param_value_parsing() {
        assert_eq!(ParamValue::parse("3"), ParamValue::Int(3));
        assert_eq!(ParamValue::parse("0.25"), ParamValue::Real(0.25));
        assert_eq!(ParamValue::parse("0.3+0.4i"), ParamValue::Complex(C64::new(0.3, 0.4)));
        assert_eq!(ParamValue::parse("-0.5i"), ParamValue::Complex(C64::new(0.0, -0.5)));
        assert_eq!(ParamValue::parse("1e-1-2e-1i"), ParamValue::Complex(C64::new(0.1, -0.2)));
        assert_eq!(ParamValue::parse("boson"), ParamValue::Name("boson".into()));
    }
}
