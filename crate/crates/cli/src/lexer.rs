//! Tokenizer for the state language. `#` starts a comment that runs to the
//! end of the line.

use std::fmt;

use crate::error::LangError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Numeric literal; `int` is set when the text has no fraction or
    /// exponent.
    Number { value: f64, int: bool },
    Vac,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Eq,
    Plus,
    Minus,
    Star,
    Caret,
    DotDot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number { value, .. } => write!(f, "number {value}"),
            Tok::Vac => f.write_str("`|vac>`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::DotDot => f.write_str("`..`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LangError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, what: &str| LangError::Syntax { line, col, expected: vec![what.to_string()] };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            '=' => Some(Tok::Eq),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, line: tl, col: tc });
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '.' {
            if chars.get(i + 1) == Some(&'.') {
                out.push(Token { tok: Tok::DotDot, line: tl, col: tc });
                advance(2, &mut i, &mut col);
                continue;
            }
            return Err(err(tl, tc, "`..`"));
        }
        if c == '|' {
            let word: String = chars[i..].iter().take(5).collect();
            if word == "|vac>" {
                out.push(Token { tok: Tok::Vac, line: tl, col: tc });
                advance(5, &mut i, &mut col);
                continue;
            }
            return Err(err(tl, tc, "`|vac>`"));
        }
        if c.is_ascii_digit() {
            let start = i;
            let mut int = true;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            // `0..4` is a range, not the float `0.`
            if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit()) {
                int = false;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if matches!(chars.get(i), Some('e' | 'E')) {
                let mut j = i + 1;
                if matches!(chars.get(j), Some('+' | '-')) {
                    j += 1;
                }
                if chars.get(j).is_some_and(|c| c.is_ascii_digit()) {
                    int = false;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text.parse().map_err(|_| err(tl, tc, "a number"))?;
            col += i - start;
            out.push(Token { tok: Tok::Number { value, int }, line: tl, col: tc });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: tl, col: tc });
            continue;
        }
        return Err(LangError::Syntax { line: tl, col: tc, expected: vec!["a token".to_string()] });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn ranges_and_floats() {
        assert_eq!(
            toks("0..4 0.5 1e-8 2"),
            vec![
                Tok::Number { value: 0.0, int: true },
                Tok::DotDot,
                Tok::Number { value: 4.0, int: true },
                Tok::Number { value: 0.5, int: false },
                Tok::Number { value: 1e-8, int: false },
                Tok::Number { value: 2.0, int: true },
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_and_comments() {
        let t = tokenize("let a = |vac>; # note\n  classify a;").unwrap();
        assert_eq!(t[3].tok, Tok::Vac);
        assert_eq!((t[5].line, t[5].col), (2, 3));
        assert!(matches!(tokenize("a & b"), Err(LangError::Syntax { line: 1, col: 3, .. })));
    }
}
