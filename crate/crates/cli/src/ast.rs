//! Abstract syntax of state programs.
//!
//! Parentheses leave no trace in the tree, so printing and re-parsing gives
//! back an equal value.

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub statements: Vec<Stmt>,
}

#[derive(Clone, Debug)]
pub struct Stmt {
    pub kind: StmtKind,
    /// 1-based source line of the statement keyword; ignored by `==`.
    pub line: usize,
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Let { name: String, expr: Expr },
    Classify { target: Expr, options: Vec<(String, OptValue)> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum OptValue {
    Name(String),
    Number(f64),
}

/// An exponent: a literal or a `sum` variable.
#[derive(Clone, Debug, PartialEq)]
pub enum Exponent {
    Lit(usize),
    Var(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// The imaginary unit `i`.
    I,
    Var(String),
    Sqrt(Box<Expr>),
    /// `ket(j)`: the j-th single-particle basis vector.
    Ket(usize),
    /// `fock(n0, n1, …)`: a normalized occupation state.
    Fock(Vec<usize>),
    Vac,
    /// `adag(phi)^k target`; the target defaults to `|vac>`.
    Adag { phi: Box<Expr>, power: Option<Exponent>, target: Option<Box<Expr>> },
    Sum { var: String, lo: usize, hi: usize, body: Box<Expr> },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Power(Box<Expr>, Exponent),
    Product(ProductKind, Vec<Expr>),
    Gallery { name: String, params: Vec<(String, GalleryArg)> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductKind {
    Otimes,
    Vee,
    Wedge,
    /// Field product ⊛ of states: mode lists are concatenated.
    Field,
}

impl ProductKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ProductKind::Otimes => "otimes",
            ProductKind::Vee => "vee",
            ProductKind::Wedge => "wedge",
            ProductKind::Field => "fprod",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "otimes" => Some(ProductKind::Otimes),
            "vee" => Some(ProductKind::Vee),
            "wedge" => Some(ProductKind::Wedge),
            "fprod" => Some(ProductKind::Field),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GalleryArg {
    Int(i64),
    Name(String),
    Expr(Expr),
}

pub const KEYWORDS: [&str; 13] =
    ["let", "classify", "sum", "ket", "fock", "adag", "gallery", "sqrt", "i", "otimes", "vee", "wedge", "fprod"];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

impl Expr {
    /// Calls `f` on this node and every node below it.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Num(_) | Expr::I | Expr::Var(_) | Expr::Ket(_) | Expr::Fock(_) | Expr::Vac => {}
            Expr::Sqrt(e) | Expr::Neg(e) | Expr::Power(e, _) => e.walk(f),
            Expr::Sum { body, .. } => body.walk(f),
            Expr::Adag { phi, target, .. } => {
                phi.walk(f);
                if let Some(t) = target {
                    t.walk(f);
                }
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Expr::Product(_, items) => items.iter().for_each(|e| e.walk(f)),
            Expr::Gallery { params, .. } => {
                for (_, arg) in params {
                    if let GalleryArg::Expr(e) = arg {
                        e.walk(f);
                    }
                }
            }
        }
    }
}
