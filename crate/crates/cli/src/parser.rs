//! Recursive-descent parser with name resolution.
//!
//! ```text
//! program := stmt+
//! stmt    := "let" IDENT "=" expr ";" | "classify" expr option* ";"
//! option  := IDENT "=" (IDENT | NUMBER)
//! expr    := term (("+" | "-") term)*
//! term    := unary ("*" unary)*
//! unary   := "-" unary | postfix
//! postfix := primary ("^" exp)?
//! exp     := INT | IDENT
//! primary := NUMBER | "i" | IDENT | "|vac>" | "(" expr ")"
//!          | "sqrt" "(" expr ")" | "ket" "(" INT ")" | "fock" "(" INT ("," INT)* ")"
//!          | "adag" "(" expr ")" ("^" exp)? postfix?
//!          | "sum" IDENT "=" INT ".." INT ":" expr
//!          | ("otimes" | "vee" | "wedge" | "fprod") "(" expr ("," expr)* ")"
//!          | "gallery" "(" IDENT ("," IDENT "=" arg)* ")"
//! ```
//!
//! `sum` bodies extend as far to the right as possible. An `adag` target is
//! any postfix expression that follows directly, except a number or a
//! classify option (`IDENT "="`).

use std::collections::{HashMap, HashSet};

use crate::ast::{is_keyword, Expr, Exponent, GalleryArg, OptValue, ProductKind, Program, Stmt, StmtKind};
use crate::error::LangError;
use crate::lexer::{tokenize, Tok, Token};

pub const OPTIONS: [&str; 5] = ["stats", "nmax", "tol", "seed", "modes"];

pub fn parse(text: &str) -> Result<Program, LangError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, lets: HashMap::new(), sum_vars: Vec::new() };
    let mut statements = Vec::new();
    loop {
        if p.peek() == &Tok::Eof && !statements.is_empty() {
            break;
        }
        statements.push(p.statement()?);
    }
    Ok(Program { statements })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    lets: HashMap<String, Expr>,
    sum_vars: Vec<String>,
}

type PResult<T> = Result<T, LangError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.tokens[(self.pos + k).min(self.tokens.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.tokens[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        let (line, col) = self.here();
        Err(LangError::Syntax { line, col, expected: expected.iter().map(|s| s.to_string()).collect() })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&tok.to_string()])
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    /// A non-keyword identifier.
    fn name(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail(&["an identifier"]),
        }
    }

    fn int(&mut self) -> PResult<usize> {
        match *self.peek() {
            Tok::Number { value, int: true } if value <= u32::MAX as f64 => {
                self.bump();
                Ok(value as usize)
            }
            _ => self.fail(&["an integer"]),
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let (line, _) = self.here();
        if self.is_word("let") {
            self.bump();
            let (nl, nc) = self.here();
            let name = self.name()?;
            if self.lets.contains_key(&name) {
                return Err(LangError::Rebinding { name, line: nl, col: nc });
            }
            self.expect(Tok::Eq)?;
            let expr = self.expr()?;
            self.expect(Tok::Semi)?;
            self.lets.insert(name.clone(), expr.clone());
            return Ok(Stmt { kind: StmtKind::Let { name, expr }, line });
        }
        if self.is_word("classify") {
            self.bump();
            let (tl, tc) = self.here();
            let target = self.expr()?;
            let mut options = Vec::new();
            while let Tok::Ident(_) = self.peek() {
                let (ol, oc) = self.here();
                let key = self.name()?;
                if !OPTIONS.contains(&key.as_str()) {
                    return Err(LangError::Syntax {
                        line: ol,
                        col: oc,
                        expected: OPTIONS.iter().map(|o| format!("`{o}`")).collect(),
                    });
                }
                self.expect(Tok::Eq)?;
                let (vl, vc) = self.here();
                let value = match self.bump() {
                    Tok::Ident(s) => OptValue::Name(s),
                    Tok::Number { value, .. } => OptValue::Number(value),
                    _ => {
                        return Err(LangError::Syntax { line: vl, col: vc, expected: vec!["an option value".into()] })
                    }
                };
                check_option(&key, &value).map_err(|message| LangError::TypeMismatch { message, line: vl, col: vc })?;
                options.push((key, value));
            }
            if *self.peek() != Tok::Semi {
                return self.fail(&["an option", "`;`"]);
            }
            self.bump();
            self.check_statistics(&target, &options, tl, tc)?;
            return Ok(Stmt { kind: StmtKind::Classify { target, options }, line });
        }
        self.fail(&["`let`", "`classify`"])
    }

    /// Rejects ∧ under boson statistics and ∨ under fermion statistics when
    /// the directive fixes them.
    fn check_statistics(&self, target: &Expr, options: &[(String, OptValue)], line: usize, col: usize) -> PResult<()> {
        let Some((_, OptValue::Name(stats))) = options.iter().find(|(k, _)| k == "stats") else {
            return Ok(());
        };
        let banned = match stats.as_str() {
            "boson" => ProductKind::Wedge,
            "fermion" => ProductKind::Vee,
            _ => return Ok(()),
        };
        let mut seen = HashSet::new();
        let mut stack = vec![target];
        while let Some(e) = stack.pop() {
            let mut found = false;
            e.walk(&mut |node| match node {
                Expr::Product(kind, _) if *kind == banned => found = true,
                Expr::Var(v) => {
                    if let Some(bound) = self.lets.get(v) {
                        if seen.insert(v.clone()) {
                            stack.push(bound);
                        }
                    }
                }
                _ => {}
            });
            if found {
                return Err(LangError::TypeMismatch {
                    message: format!("`{}` in a {stats} context", banned.keyword()),
                    line,
                    col,
                });
            }
        }
        Ok(())
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            return Ok(Expr::Power(Box::new(base), self.exponent()?));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> PResult<Exponent> {
        let (line, col) = self.here();
        match self.peek().clone() {
            Tok::Number { int: true, .. } => Ok(Exponent::Lit(self.int()?)),
            Tok::Ident(name) if !is_keyword(&name) => {
                self.bump();
                if self.sum_vars.contains(&name) {
                    Ok(Exponent::Var(name))
                } else if self.lets.contains_key(&name) {
                    Err(LangError::TypeMismatch {
                        message: format!("exponent `{name}` must be an integer or a sum variable"),
                        line,
                        col,
                    })
                } else {
                    Err(LangError::UnboundName { name, line, col })
                }
            }
            _ => self.fail(&["an integer", "a sum variable"]),
        }
    }

    /// Whether the next tokens begin an `adag` target.
    fn starts_target(&self) -> bool {
        match self.peek() {
            Tok::Vac | Tok::LParen => true,
            Tok::Ident(w) => w != "let" && w != "classify" && *self.peek_at(1) != Tok::Eq,
            _ => false,
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(Tok::LParen)?;
        let mut items = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            items.push(self.expr()?);
        }
        self.expect(Tok::RParen)?;
        Ok(items)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let (line, col) = self.here();
        let word = match self.peek().clone() {
            Tok::Number { value, .. } => {
                self.bump();
                return Ok(Expr::Num(value));
            }
            Tok::Vac => {
                self.bump();
                return Ok(Expr::Vac);
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(e);
            }
            Tok::Ident(w) => w,
            _ => return self.fail(&["an expression"]),
        };
        self.bump();
        match word.as_str() {
            "i" => Ok(Expr::I),
            "sqrt" => {
                self.expect(Tok::LParen)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Sqrt(Box::new(e)))
            }
            "ket" => {
                self.expect(Tok::LParen)?;
                let j = self.int()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Ket(j))
            }
            "fock" => {
                self.expect(Tok::LParen)?;
                let mut counts = vec![self.int()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    counts.push(self.int()?);
                }
                self.expect(Tok::RParen)?;
                Ok(Expr::Fock(counts))
            }
            "adag" => {
                self.expect(Tok::LParen)?;
                let phi = self.expr()?;
                self.expect(Tok::RParen)?;
                let power = if *self.peek() == Tok::Caret {
                    self.bump();
                    Some(self.exponent()?)
                } else {
                    None
                };
                let target = if self.starts_target() { Some(Box::new(self.postfix()?)) } else { None };
                Ok(Expr::Adag { phi: Box::new(phi), power, target })
            }
            "sum" => {
                let (vl, vc) = self.here();
                let var = self.name()?;
                if self.lets.contains_key(&var) || self.sum_vars.contains(&var) {
                    return Err(LangError::Rebinding { name: var, line: vl, col: vc });
                }
                self.expect(Tok::Eq)?;
                let lo = self.int()?;
                self.expect(Tok::DotDot)?;
                let hi = self.int()?;
                self.expect(Tok::Colon)?;
                self.sum_vars.push(var.clone());
                let body = self.expr();
                self.sum_vars.pop();
                Ok(Expr::Sum { var, lo, hi, body: Box::new(body?) })
            }
            "gallery" => {
                self.expect(Tok::LParen)?;
                let name = self.name()?;
                let mut params = Vec::new();
                while *self.peek() == Tok::Comma {
                    self.bump();
                    let key = self.name()?;
                    self.expect(Tok::Eq)?;
                    params.push((key, self.gallery_arg()?));
                }
                self.expect(Tok::RParen)?;
                Ok(Expr::Gallery { name, params })
            }
            "let" | "classify" => Err(LangError::Syntax { line, col, expected: vec!["an expression".into()] }),
            w => {
                if let Some(kind) = ProductKind::from_keyword(w) {
                    return Ok(Expr::Product(kind, self.args()?));
                }
                if self.lets.contains_key(w) || self.sum_vars.iter().any(|v| v == w) {
                    Ok(Expr::Var(word))
                } else {
                    Err(LangError::UnboundName { name: word, line, col })
                }
            }
        }
    }

    /// A bare integer or name stands for itself; anything else is evaluated
    /// as a number.
    fn gallery_arg(&mut self) -> PResult<GalleryArg> {
        let ends = matches!(self.peek_at(1), Tok::Comma | Tok::RParen);
        match self.peek().clone() {
            Tok::Number { value, int: true } if ends && value <= i64::MAX as f64 => {
                self.bump();
                Ok(GalleryArg::Int(value as i64))
            }
            Tok::Ident(s) if ends && !is_keyword(&s) && !self.sum_vars.contains(&s) && !self.lets.contains_key(&s) => {
                self.bump();
                Ok(GalleryArg::Name(s))
            }
            _ => Ok(GalleryArg::Expr(self.expr()?)),
        }
    }
}

fn check_option(key: &str, value: &OptValue) -> Result<(), String> {
    let whole = |v: &OptValue| matches!(v, OptValue::Number(x) if *x >= 0.0 && x.fract() == 0.0);
    let ok = match key {
        "stats" => matches!(value, OptValue::Name(s) if ["boson", "fermion", "distinguishable"].contains(&s.as_str())),
        "tol" => matches!(value, OptValue::Number(x) if *x > 0.0 && *x < 1.0),
        "modes" => whole(value) && !matches!(value, OptValue::Number(x) if *x == 0.0),
        _ => whole(value),
    };
    if ok {
        Ok(())
    } else {
        let want = match key {
            "stats" => "boson, fermion or distinguishable",
            "tol" => "a number in (0, 1)",
            "modes" => "a positive integer",
            _ => "a non-negative integer",
        };
        Err(format!("option `{key}` needs {want}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_body_is_greedy_and_adag_takes_a_target() {
        let p = parse("let phi = sum n=0..4: (0.5^n) * adag(ket(0))^n |vac>; classify phi stats=boson;").unwrap();
        assert_eq!(p.statements.len(), 2);
        let StmtKind::Let { expr: Expr::Sum { body, lo: 0, hi: 4, .. }, .. } = &p.statements[0].kind else {
            panic!("{:?}", p.statements[0]);
        };
        let Expr::Mul(_, rhs) = body.as_ref() else { panic!() };
        assert!(matches!(rhs.as_ref(), Expr::Adag { target: Some(t), power: Some(Exponent::Var(_)), .. } if **t == Expr::Vac));
    }

    #[test]
    fn resolution_errors() {
        assert!(matches!(parse("classify undefined_name;"), Err(LangError::UnboundName { .. })));
        assert!(matches!(parse("let a = ket(0); let a = ket(1);"), Err(LangError::Rebinding { .. })));
        assert!(matches!(
            parse("let w = wedge(ket(0), ket(1)); classify w stats=boson;"),
            Err(LangError::TypeMismatch { .. })
        ));
        assert!(matches!(parse("classify vee(ket(0), ket(1)) stats=fermion;"), Err(LangError::TypeMismatch { .. })));
        assert!(matches!(parse("classify ket(0) stats=anyon;"), Err(LangError::TypeMismatch { .. })));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let Err(LangError::Syntax { line, col, expected }) = parse("let a = ket(0)\nclassify a;") else { panic!() };
        assert_eq!((line, col), (2, 1));
        assert!(expected.iter().any(|e| e.contains(';')));
        assert!(matches!(parse(""), Err(LangError::Syntax { .. })));
        assert!(matches!(parse("classify ket(0) colour=red;"), Err(LangError::Syntax { line: 1, col: 17, .. })));
    }
}
