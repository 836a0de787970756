//! Tiny polynomial-expression parser for family specs.
//!
//! Grammar: `+ - * ^` with parentheses over the variables `t` and `x` (alias
//! `y` for frequency-direction slices) and decimal constants. Exponents are
//! nonnegative integers. `/` is allowed for division by a numeric literal.
//! Everything parses to an exact [`Poly2`].

use crate::error::Error;
use crate::poly::Poly2;
use crate::Result;

pub fn parse_poly2(src: &str) -> Result<Poly2> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let poly = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Config(format!(
            "trailing input in expression `{src}` at token {}",
            p.pos
        )));
    }
    Ok(poly)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    T,
    Y,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' | '−' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            't' => {
                out.push(Tok::T);
                i += 1;
            }
            'x' | 'y' => {
                out.push(Tok::Y);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == '.'
                        || (matches!(bytes[i], 'e' | 'E')
                            && i + 1 < bytes.len()
                            && (bytes[i + 1].is_ascii_digit()
                                || bytes[i + 1] == '-'
                                || bytes[i + 1] == '+'))
                        || (matches!(bytes[i], '-' | '+')
                            && i > start
                            && matches!(bytes[i - 1], 'e' | 'E')))
                {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| Error::Config(format!("bad number `{text}`")))?;
                out.push(Tok::Num(v));
            }
            _ => {
                return Err(Error::Config(format!(
                    "unexpected character `{c}` in expression"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Poly2> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly2> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    if rhs.coeffs.len() == 1 && rhs.coeffs[0].len() == 1 {
                        let d = rhs.coeffs[0][0];
                        if d == 0.0 {
                            return Err(Error::Config("division by zero".into()));
                        }
                        acc = acc.scale(1.0 / d);
                    } else {
                        return Err(Error::Config(
                            "division is only supported by numeric constants".into(),
                        ));
                    }
                }
                // implicit multiplication: `2t`, `t x`, `3(t+1)`
                Some(Tok::T) | Some(Tok::Y) | Some(Tok::Num(_)) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly2> {
        let base = match self.next() {
            Some(Tok::Num(v)) => Poly2::constant(v),
            Some(Tok::T) => Poly2::t(),
            Some(Tok::Y) => Poly2::y(),
            Some(Tok::Minus) => return Ok(self.factor()?.scale(-1.0)),
            Some(Tok::Plus) => return self.factor(),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => inner,
                    _ => return Err(Error::Config("missing `)`".into())),
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unexpected token {other:?} in expression"
                )))
            }
        };
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 => Ok(base.pow(v as u32)),
                other => Err(Error::Config(format!(
                    "exponent must be a nonnegative integer, got {other:?}"
                ))),
            }
        } else {
            Ok(base)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_linear_and_quadratic() {
        let p = parse_poly2("t - x").unwrap();
        assert!((p.eval(0.7, 0.2) - 0.5).abs() < 1e-15);
        let q = parse_poly2("t^2 + x^2").unwrap();
        assert!((q.eval(0.3, 0.4) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn negation_products_and_division() {
        let p = parse_poly2("-t").unwrap();
        assert_eq!(p.eval(2.0, 0.0), -2.0);
        let q = parse_poly2("2(t - x)^2 / 4").unwrap();
        assert!((q.eval(1.0, 0.5) - 0.125).abs() < 1e-15);
        let r = parse_poly2("0.5 t x").unwrap();
        assert!((r.eval(3.0, 2.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly2("t +").is_err());
        assert!(parse_poly2("u^2").is_err());
        assert!(parse_poly2("t^0.5").is_err());
    }
}
