//! Pretty-printer whose output parses back to the same tree.

use std::fmt::Write;

use crate::ast::{Expr, Exponent, GalleryArg, OptValue, Program, StmtKind};

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for stmt in &p.statements {
        match &stmt.kind {
            StmtKind::Let { name, expr } => {
                let _ = writeln!(out, "let {name} = {};", print_expr(expr));
            }
            StmtKind::Classify { target, options } => {
                out.push_str("classify ");
                out.push_str(&print_expr(target));
                for (k, v) in options {
                    let _ = match v {
                        OptValue::Name(s) => write!(out, " {k}={s}"),
                        OptValue::Number(x) => write!(out, " {k}={}", number(*x)),
                    };
                }
                out.push_str(";\n");
            }
        }
    }
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

// Binding strength: 0 sum, 1 additive, 2 product, 3 unary, 4 postfix, 5 atom.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Sum { .. } => 0,
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Power(..) | Expr::Adag { .. } => 4,
        _ => 5,
    }
}

fn number(x: f64) -> String {
    format!("{x}")
}

fn exponent(k: &Exponent) -> String {
    match k {
        Exponent::Lit(n) => n.to_string(),
        Exponent::Var(v) => v.clone(),
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    if level(e) < min {
        out.push('(');
        write_expr(out, e, 0);
        out.push(')');
        return;
    }
    match e {
        Expr::Num(x) => out.push_str(&number(*x)),
        Expr::I => out.push('i'),
        Expr::Var(v) => out.push_str(v),
        Expr::Vac => out.push_str("|vac>"),
        Expr::Ket(j) => {
            let _ = write!(out, "ket({j})");
        }
        Expr::Fock(counts) => {
            let c: Vec<String> = counts.iter().map(|n| n.to_string()).collect();
            let _ = write!(out, "fock({})", c.join(", "));
        }
        Expr::Sqrt(inner) => {
            out.push_str("sqrt(");
            write_expr(out, inner, 0);
            out.push(')');
        }
        Expr::Adag { phi, power, target } => {
            out.push_str("adag(");
            write_expr(out, phi, 0);
            out.push(')');
            if let Some(k) = power {
                out.push('^');
                out.push_str(&exponent(k));
            }
            if let Some(t) = target {
                out.push(' ');
                // Numbers and names followed by `=` would not be read back
                // as a target; the parentheses keep them attached.
                let bare = matches!(t.as_ref(), Expr::Vac | Expr::Adag { .. } | Expr::Ket(_) | Expr::Fock(_) | Expr::Var(_));
                write_expr(out, t, if bare { 4 } else { 6 });
            }
        }
        Expr::Sum { var, lo, hi, body } => {
            let _ = write!(out, "sum {var}={lo}..{hi}: ");
            write_expr(out, body, 0);
        }
        Expr::Neg(inner) => {
            out.push('-');
            write_expr(out, inner, 3);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            write_expr(out, a, 1);
            out.push_str(if matches!(e, Expr::Add(..)) { " + " } else { " - " });
            write_expr(out, b, 2);
        }
        Expr::Mul(a, b) => {
            write_expr(out, a, 2);
            out.push_str(" * ");
            write_expr(out, b, 3);
        }
        Expr::Power(base, k) => {
            write_expr(out, base, 5);
            out.push('^');
            out.push_str(&exponent(k));
        }
        Expr::Product(kind, items) => {
            out.push_str(kind.keyword());
            out.push('(');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_expr(out, item, 0);
            }
            out.push(')');
        }
        Expr::Gallery { name, params } => {
            out.push_str("gallery(");
            out.push_str(name);
            for (k, arg) in params {
                let _ = write!(out, ", {k}=");
                match arg {
                    GalleryArg::Int(i) => {
                        let _ = write!(out, "{i}");
                    }
                    GalleryArg::Name(s) => out.push_str(s),
                    // A lone integral number would read back as `Int`.
                    GalleryArg::Expr(Expr::Num(x)) if x.fract() == 0.0 => {
                        let _ = write!(out, "({})", number(*x));
                    }
                    GalleryArg::Expr(Expr::Var(v)) => {
                        let _ = write!(out, "({v})");
                    }
                    GalleryArg::Expr(e) => write_expr(out, e, 0),
                }
            }
            out.push(')');
        }
    }
}
