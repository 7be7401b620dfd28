//! Evaluation of parsed programs.
//!
//! `let` bindings are evaluated lazily, at each `classify` that uses them,
//! under that directive's statistics. Values are scalars, single-particle
//! vectors, first-quantized tensors or Fock states; operands with different
//! mode counts are embedded into the larger one. A scalar used as a state is
//! a multiple of the vacuum.
//!
//! Every state built from `|vac>`, `fock(..)` or a tensor is capped at
//! `nmax` particles, and `adag` fails rather than exceed the cap of the
//! state it acts on. Field products add the caps of their factors.

use std::collections::HashMap;

use fockpart_core::classify::{classify_with, ClassifyConfig, Report};
use fockpart_core::fock::{occupation_state, superpose};
use fockpart_core::gallery::{gallery_state, GallerySpec, ParamValue, Params};
use fockpart_core::ladder::create;
use fockpart_core::tensor::{otimes, vee, wedge};
use fockpart_core::{FockError, FockState, NTensor, Occupation, SinglePartVec, Statistics, Symmetry, C64};

use crate::ast::{Expr, Exponent, GalleryArg, OptValue, ProductKind, Program, StmtKind};
use crate::error::{EvalError, LangError};
use crate::printer::print_expr;

/// Defaults for every `classify` directive; directive options override them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalConfig {
    pub stats: Statistics,
    pub nmax: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { stats: Statistics::Boson, nmax: 8, tol: 1e-8, seed: 42 }
    }
}

/// The state a directive classifies, with the settings in effect.
#[derive(Clone, Debug)]
pub struct Built {
    pub name: String,
    /// 1-based index of the `classify` statement.
    pub stmt: usize,
    pub state: FockState,
    pub settings: EvalConfig,
    /// Set when the target is a gallery reference, directly or through names.
    pub gallery: Option<GallerySpec>,
}

#[derive(Clone, Debug)]
pub struct Classified {
    pub built: Built,
    pub report: Report,
}

pub fn evaluate(program: &Program, cfg: &EvalConfig) -> Result<Vec<Classified>, LangError> {
    build(program, cfg)?
        .into_iter()
        .map(|built| {
            let ccfg = ClassifyConfig::default().with_tol(built.settings.tol).with_seed(built.settings.seed);
            let line = program.statements[built.stmt - 1].line;
            let report = classify_with(&built.state, &ccfg)
                .map_err(|e| LangError::Eval { stmt: built.stmt, line, error: e.into() })?;
            Ok(Classified { built, report })
        })
        .collect()
}

/// Evaluates every `classify` target without classifying it.
pub fn build(program: &Program, cfg: &EvalConfig) -> Result<Vec<Built>, LangError> {
    let mut lets: HashMap<&str, Binding> = HashMap::new();
    let mut out = Vec::new();
    for (k, stmt) in program.statements.iter().enumerate() {
        let index = k + 1;
        match &stmt.kind {
            StmtKind::Let { name, expr } => {
                lets.insert(name, Binding { stmt: index, line: stmt.line, expr });
            }
            StmtKind::Classify { target, options } => {
                let at = |error: EvalError| LangError::Eval { stmt: index, line: stmt.line, error };
                let mut settings = *cfg;
                let mut stats_given = false;
                let mut modes = None;
                for (key, value) in options {
                    match (key.as_str(), value) {
                        ("stats", OptValue::Name(s)) => {
                            settings.stats = s.parse().map_err(|e: FockError| at(e.into()))?;
                            stats_given = true;
                        }
                        ("nmax", OptValue::Number(x)) => settings.nmax = *x as usize,
                        ("tol", OptValue::Number(x)) => settings.tol = *x,
                        ("seed", OptValue::Number(x)) => settings.seed = *x as u64,
                        ("modes", OptValue::Number(x)) => modes = Some(*x as usize),
                        (key, _) => return Err(at(EvalError::TypeMismatch(format!("bad value for option `{key}`")))),
                    }
                }
                let gallery = gallery_spec(target, &lets);
                if !stats_given {
                    if let Some(spec) = &gallery {
                        if let Some(s) = spec_statistics(spec) {
                            settings.stats = s;
                        }
                    }
                }
                let mut ev = Evaluator { stats: settings.stats, nmax: settings.nmax, lets: &lets, vars: HashMap::new() };
                let located = |(loc, error): Located| match loc {
                    Some((stmt, line)) => LangError::Eval { stmt, line, error },
                    None => at(error),
                };
                let value = ev.eval(target).map_err(located)?;
                let mut state = ev.to_state(value).map_err(&at)?;
                if let Some(m) = modes {
                    state = state.embed(m).map_err(|e| at(e.into()))?;
                }
                if state.is_zero() {
                    // Attribute the zero to the binding that produced it.
                    let (stmt, line) = match target {
                        Expr::Var(v) => lets.get(v.as_str()).map(|b| (b.stmt, b.line)).unwrap_or((index, stmt.line)),
                        _ => (index, stmt.line),
                    };
                    return Err(LangError::Eval { stmt, line, error: FockError::ZeroState.into() });
                }
                let name = match (target, &gallery) {
                    (Expr::Var(v), _) => v.clone(),
                    (Expr::Gallery { .. }, Some(spec)) => spec.label(),
                    _ => print_expr(target),
                };
                out.push(Built { name, stmt: index, state, settings, gallery });
            }
        }
    }
    Ok(out)
}

/// Statistics fixed by a gallery entry, as read from its resolved parameters
/// or from the name.
fn spec_statistics(spec: &GallerySpec) -> Option<Statistics> {
    gallery_state(&spec.name, &spec.params).ok().map(|(s, _)| s.statistics())
}

/// The gallery entry behind `target`, following `let` names, when its
/// parameters are literal.
fn gallery_spec(target: &Expr, lets: &HashMap<&str, Binding>) -> Option<GallerySpec> {
    let mut e = target;
    for _ in 0..=lets.len() {
        match e {
            Expr::Var(v) => e = lets.get(v.as_str())?.expr,
            Expr::Gallery { name, params } => {
                let mut p = Params::new();
                for (k, arg) in params {
                    let v = match arg {
                        GalleryArg::Int(i) => ParamValue::Int(*i),
                        GalleryArg::Name(s) => ParamValue::Name(s.clone()),
                        GalleryArg::Expr(Expr::Num(x)) => ParamValue::Real(*x),
                        GalleryArg::Expr(_) => return None,
                    };
                    p.insert(k.clone(), v);
                }
                return gallery_state(name, &p).ok().map(|(_, spec)| spec);
            }
            _ => return None,
        }
    }
    None
}

struct Binding<'a> {
    stmt: usize,
    line: usize,
    expr: &'a Expr,
}

#[derive(Clone, Debug)]
enum Value {
    Scalar(C64),
    Vector(SinglePartVec),
    Tensor(NTensor),
    State(FockState),
}

impl Value {
    fn dim(&self) -> usize {
        match self {
            Value::Scalar(_) => 0,
            Value::Vector(v) => v.dim(),
            Value::Tensor(t) => t.dim(),
            Value::State(s) => s.dim(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "a number",
            Value::Vector(_) => "a single-particle vector",
            Value::Tensor(_) => "a tensor",
            Value::State(_) => "a Fock state",
        }
    }
}

/// An error with the binding it arose in, if any.
type Located = (Option<(usize, usize)>, EvalError);

type EResult<T> = Result<T, Located>;

fn here(e: impl Into<EvalError>) -> Located {
    (None, e.into())
}

fn mismatch(msg: impl Into<String>) -> Located {
    (None, EvalError::TypeMismatch(msg.into()))
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn redim(t: &NTensor, dim: usize) -> Result<NTensor, FockError> {
    if t.dim() == dim {
        return Ok(t.clone());
    }
    NTensor::from_entries(t.n(), dim, t.symmetry(), t.entries().iter().map(|(k, v)| (k.clone(), *v)))
}

fn untagged(t: NTensor) -> Result<NTensor, FockError> {
    t.with_symmetry(Symmetry::None)
}

struct Evaluator<'a> {
    stats: Statistics,
    nmax: usize,
    lets: &'a HashMap<&'a str, Binding<'a>>,
    vars: HashMap<String, usize>,
}

impl Evaluator<'_> {
    fn capped(&self, s: FockState) -> Result<FockState, FockError> {
        let nmax = self.nmax.max(s.nmax());
        if s.nmax() == nmax {
            return Ok(s);
        }
        s.with_nmax(nmax)
    }

    fn fresh(&self, s: FockState) -> Result<FockState, FockError> {
        s.with_nmax(self.nmax)
    }

    fn to_state(&self, v: Value) -> Result<FockState, EvalError> {
        let s = match v {
            Value::Scalar(c) => self.fresh(FockState::vacuum(1, self.stats)?.scaled(c))?,
            Value::Vector(v) => FockState::from_tensor(NTensor::from_vec(&v), self.stats)?,
            Value::Tensor(t) => {
                let n = t.n();
                let s = FockState::from_tensor(t, self.stats).map_err(|e| match e {
                    FockError::SymmetryViolation(_) => EvalError::TypeMismatch(format!(
                        "this {n}-particle tensor is not a valid {} wavefunction",
                        self.stats
                    )),
                    e => e.into(),
                })?;
                self.fresh(s)?
            }
            Value::State(s) => {
                if s.statistics() != self.stats {
                    return Err(EvalError::TypeMismatch(format!(
                        "a {} state in a {} context",
                        s.statistics(),
                        self.stats
                    )));
                }
                s
            }
        };
        Ok(s)
    }

    fn state(&self, v: Value) -> EResult<FockState> {
        self.to_state(v).map_err(|e| (None, e))
    }

    fn exponent(&self, k: &Exponent) -> usize {
        match k {
            Exponent::Lit(n) => *n,
            Exponent::Var(v) => self.vars[v],
        }
    }

    fn eval(&mut self, e: &Expr) -> EResult<Value> {
        Ok(match e {
            Expr::Num(x) => Value::Scalar(real(*x)),
            Expr::I => Value::Scalar(C64::new(0.0, 1.0)),
            Expr::Var(v) => {
                if let Some(&n) = self.vars.get(v) {
                    return Ok(Value::Scalar(real(n as f64)));
                }
                let b = &self.lets[v.as_str()];
                let loc = (b.stmt, b.line);
                // Sum variables do not leak into bindings.
                let saved = std::mem::take(&mut self.vars);
                let out = self.eval(b.expr).map_err(|(l, err)| (l.or(Some(loc)), err));
                self.vars = saved;
                return out;
            }
            Expr::Sqrt(inner) => match self.eval(inner)? {
                Value::Scalar(c) => Value::Scalar(c.sqrt()),
                other => return Err(mismatch(format!("sqrt of {}", other.kind()))),
            },
            Expr::Ket(j) => Value::Vector(SinglePartVec::basis(j + 1, *j).map_err(here)?),
            Expr::Fock(counts) => {
                let occ = Occupation::new(counts.clone()).map_err(here)?;
                Value::State(self.fresh(occupation_state(&occ, self.stats).map_err(here)?).map_err(here)?)
            }
            Expr::Vac => Value::State(self.fresh(FockState::vacuum(1, self.stats).map_err(here)?).map_err(here)?),
            Expr::Adag { phi, power, target } => {
                let phi = match self.eval(phi)? {
                    Value::Vector(v) => v,
                    other => return Err(mismatch(format!("adag needs a single-particle vector, got {}", other.kind()))),
                };
                let target = match target {
                    Some(t) => {
                        let v = self.eval(t)?;
                        self.state(v)?
                    }
                    None => self.fresh(FockState::vacuum(1, self.stats).map_err(here)?).map_err(here)?,
                };
                let dim = phi.dim().max(target.dim());
                let phi = phi.padded(dim).map_err(here)?;
                let mut psi = target.embed(dim).map_err(here)?;
                let k = power.as_ref().map_or(1, |p| self.exponent(p));
                for _ in 0..k {
                    psi = create(&phi, &psi).map_err(here)?;
                    if psi.is_zero() {
                        return Err(here(FockError::ZeroState));
                    }
                }
                Value::State(psi)
            }
            Expr::Sum { var, lo, hi, body } => {
                if lo > hi {
                    return Err(here(FockError::InvalidParameter(format!("empty range {lo}..{hi}"))));
                }
                let mut acc: Option<Value> = None;
                for n in *lo..=*hi {
                    self.vars.insert(var.clone(), n);
                    let term = self.eval(body);
                    self.vars.remove(var);
                    let term = term?;
                    acc = Some(match acc {
                        None => term,
                        Some(a) => self.add(a, term, 1.0)?,
                    });
                }
                acc.expect("nonempty range")
            }
            Expr::Neg(inner) => {
                let v = self.eval(inner)?;
                self.scale(v, real(-1.0))
            }
            Expr::Add(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                self.add(a, b, 1.0)?
            }
            Expr::Sub(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                self.add(a, b, -1.0)?
            }
            Expr::Mul(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Value::Scalar(c), v) | (v, Value::Scalar(c)) => self.scale(v, c),
                (a, b) => {
                    return Err(mismatch(format!(
                        "cannot multiply {} by {}; use otimes, vee, wedge or fprod",
                        a.kind(),
                        b.kind()
                    )))
                }
            },
            Expr::Power(base, k) => {
                let k = self.exponent(k);
                match self.eval(base)? {
                    Value::Scalar(c) => Value::Scalar(c.powu(k as u32)),
                    Value::State(s) => {
                        if k == 0 {
                            return Err(here(FockError::InvalidParameter("a state to the power 0".into())));
                        }
                        Value::State(s.field_power(k).map_err(here)?)
                    }
                    Value::Vector(_) | Value::Tensor(_) if k == 0 => Value::Scalar(real(1.0)),
                    v => {
                        let t = self.tensor(v)?;
                        let mut acc = t.clone();
                        for _ in 1..k {
                            acc = otimes(&acc, &t).map_err(here)?;
                        }
                        Value::Tensor(acc)
                    }
                }
            }
            Expr::Product(kind, items) => {
                let values = items.iter().map(|i| self.eval(i)).collect::<EResult<Vec<_>>>()?;
                let dim = values.iter().map(Value::dim).max().unwrap_or(1);
                if *kind == ProductKind::Field {
                    let mut states = Vec::with_capacity(values.len());
                    for v in values {
                        states.push(self.state(v)?);
                    }
                    let mut acc = states[0].clone();
                    for s in &states[1..] {
                        acc = acc.field_product(s).map_err(here)?;
                    }
                    return Ok(Value::State(acc));
                }
                match (kind, self.stats) {
                    (ProductKind::Vee, Statistics::Fermion) | (ProductKind::Wedge, Statistics::Boson) => {
                        return Err(mismatch(format!("`{}` in a {} context", kind.keyword(), self.stats)))
                    }
                    _ => {}
                }
                let mut tensors = Vec::with_capacity(values.len());
                for v in values {
                    let t = self.tensor(v)?;
                    tensors.push(redim(&t, dim).map_err(here)?);
                }
                let op = match kind {
                    ProductKind::Otimes => otimes,
                    ProductKind::Vee => vee,
                    _ => wedge,
                };
                let mut acc = tensors[0].clone();
                for t in &tensors[1..] {
                    acc = op(&acc, t).map_err(|e| match e {
                        FockError::SymmetryViolation(m) => mismatch(m),
                        e => here(e),
                    })?;
                }
                Value::Tensor(acc)
            }
            Expr::Gallery { name, params } => {
                let mut p = Params::new();
                for (k, arg) in params {
                    let v = match arg {
                        GalleryArg::Int(i) => ParamValue::Int(*i),
                        GalleryArg::Name(s) => ParamValue::Name(s.clone()),
                        GalleryArg::Expr(e) => match self.eval(e)? {
                            Value::Scalar(c) if c.im == 0.0 => ParamValue::Real(c.re),
                            Value::Scalar(c) => ParamValue::Complex(c),
                            other => return Err(mismatch(format!("gallery parameter `{k}` is {}", other.kind()))),
                        },
                    };
                    p.insert(k.clone(), v);
                }
                let (state, _) = gallery_state(name, &p).map_err(here)?;
                let state = self.capped(state).map_err(here)?;
                Value::State(self.state(Value::State(state))?)
            }
        })
    }

    /// Untagged first-quantized form of a vector or tensor.
    fn tensor(&self, v: Value) -> EResult<NTensor> {
        match v {
            Value::Vector(v) => Ok(NTensor::from_vec(&v)),
            Value::Tensor(t) => untagged(t).map_err(here),
            other => Err(mismatch(format!("particle products take vectors or tensors, got {}", other.kind()))),
        }
    }

    fn scale(&self, v: Value, c: C64) -> Value {
        match v {
            Value::Scalar(x) => Value::Scalar(x * c),
            Value::Vector(v) => Value::Vector(v.scaled(c)),
            Value::Tensor(t) => Value::Tensor(t.scaled(c)),
            Value::State(s) => Value::State(s.scaled(c)),
        }
    }

    fn add(&self, a: Value, b: Value, sign: f64) -> EResult<Value> {
        let dim = a.dim().max(b.dim());
        let s = real(sign);
        Ok(match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(x + s * y),
            (Value::Vector(x), Value::Vector(y)) => {
                let (x, y) = (x.padded(dim).map_err(here)?, y.padded(dim).map_err(here)?);
                Value::Vector(x.add(&y.scaled(s)).map_err(here)?)
            }
            (Value::Tensor(x), Value::Tensor(y)) if x.n() == y.n() => {
                let (mut x, mut y) = (redim(&x, dim).map_err(here)?, redim(&y, dim).map_err(here)?);
                if x.symmetry() != y.symmetry() {
                    x = untagged(x).map_err(here)?;
                    y = untagged(y).map_err(here)?;
                }
                Value::Tensor(x.axpy(s, &y).map_err(here)?)
            }
            (a, b) => {
                let (a, b) = (self.state(a)?, self.state(b)?);
                let dim = a.dim().max(b.dim());
                let (a, b) = (a.embed(dim).map_err(here)?, b.embed(dim).map_err(here)?);
                Value::State(superpose(&[(real(1.0), a), (s, b)]).map_err(here)?)
            }
        })
    }
}
