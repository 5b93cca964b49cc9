//! Hand-rolled recursive-descent parser for the formula grammar:
//!
//! ```text
//! formula := quant | impl
//! quant   := ("forall"|"exists") IDENT "in" IDENT "." formula
//! impl    := or ("->" impl)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "(" formula ")" | atom
//! atom    := term ("="|"<="|"in") term | IDENT "(" term ("," term)* ")"
//! term    := IDENT | RATIONAL          (RATIONAL := INT ("/" POSINT)?)
//! ```
//!
//! Closedness and domain-name resolution are validated during the parse:
//! an identifier term must be a bound variable or a declared constant.

use super::{Formula, SymbolScope, Term};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;

pub fn parse(text: &str, scope: &SymbolScope) -> Result<Formula> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        scope,
        bound: Vec::new(),
        text_len: text.len(),
    };
    let formula = parser.formula()?;
    parser.expect_end()?;
    Ok(formula)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Leq,
    Arrow,
    Or,
    And,
    Not,
    Slash,
}

const KEYWORDS: [&str; 3] = ["forall", "exists", "in"];

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            b',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            b'.' => {
                toks.push((i, Tok::Dot));
                i += 1;
            }
            b'=' => {
                toks.push((i, Tok::Eq));
                i += 1;
            }
            b'|' => {
                toks.push((i, Tok::Or));
                i += 1;
            }
            b'&' => {
                toks.push((i, Tok::And));
                i += 1;
            }
            b'~' => {
                toks.push((i, Tok::Not));
                i += 1;
            }
            b'/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((i, Tok::Leq));
                    i += 2;
                } else {
                    return Err(Error::Parse {
                        pos: i,
                        msg: "expected `<=`".into(),
                    });
                }
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((i, Tok::Arrow));
                    i += 2;
                } else if bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
                    let (len, value) = scan_int(&text[i..], i)?;
                    toks.push((i, Tok::Int(value)));
                    i += len;
                } else {
                    return Err(Error::Parse {
                        pos: i,
                        msg: "expected `->` or a negative integer".into(),
                    });
                }
            }
            b'0'..=b'9' => {
                let (len, value) = scan_int(&text[i..], i)?;
                toks.push((i, Tok::Int(value)));
                i += len;
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            other => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{}`", other as char),
                });
            }
        }
    }
    Ok(toks)
}

fn scan_int(s: &str, abs_pos: usize) -> Result<(usize, i64)> {
    let bytes = s.as_bytes();
    let mut len = 0;
    if bytes[0] == b'-' {
        len = 1;
    }
    while len < bytes.len() && bytes[len].is_ascii_digit() {
        len += 1;
    }
    let value = s[..len].parse::<i64>().map_err(|_| Error::Parse {
        pos: abs_pos,
        msg: format!("integer literal `{}` out of range", &s[..len]),
    })?;
    Ok((len, value))
}

struct Parser<'a> {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    scope: &'a SymbolScope,
    bound: Vec<String>,
    text_len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.tokens.get(self.pos + 1).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.text_len)
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.here(),
            msg: msg.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn expect_end(&self) -> Result<()> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.err("expected end of input"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(usize, String)> {
        let pos = self.here();
        match self.advance() {
            Some(Tok::Ident(name)) if !KEYWORDS.contains(&name.as_str()) => Ok((pos, name)),
            _ => Err(Error::Parse {
                pos,
                msg: format!("expected {what}"),
            }),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Ident(kw)) if kw == "forall" || kw == "exists" => self.quantifier(),
            _ => self.implication(),
        }
    }

    fn quantifier(&mut self) -> Result<Formula> {
        let kw = match self.advance() {
            Some(Tok::Ident(kw)) => kw,
            _ => unreachable!(),
        };
        let (_, var) = self.ident("a variable name")?;
        match self.advance() {
            Some(Tok::Ident(k)) if k == "in" => {}
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.err("expected `in`"));
            }
        }
        let (dpos, domain) = self.ident("a domain name")?;
        if !self.scope.domains.contains(&domain) {
            return Err(Error::UnknownDomainName {
                name: domain,
                pos: dpos,
            });
        }
        self.expect(Tok::Dot, "`.`")?;
        self.bound.push(var.clone());
        let body = self.formula()?;
        self.bound.pop();
        Ok(if kw == "forall" {
            Formula::Forall(var, domain, Box::new(body))
        } else {
            Formula::Exists(var, domain, Box::new(body))
        })
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.conjunction()?;
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.unary()?;
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        // Relation application: IDENT "(" ... ")".
        if let (Some(Tok::Ident(name)), Some(Tok::LParen)) = (self.peek(), self.peek2()) {
            if !KEYWORDS.contains(&name.as_str()) {
                let name = name.clone();
                self.pos += 2;
                let mut args = vec![self.term()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    args.push(self.term()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Formula::Relation(name, args));
            }
        }
        let lhs = self.term()?;
        match self.advance() {
            Some(Tok::Eq) => Ok(Formula::Equals(lhs, self.term()?)),
            Some(Tok::Leq) => Ok(Formula::Leq(lhs, self.term()?)),
            Some(Tok::Ident(k)) if k == "in" => Ok(Formula::In(lhs, self.term()?)),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err("expected `=`, `<=`, or `in`"))
            }
        }
    }

    fn term(&mut self) -> Result<Term> {
        let pos = self.here();
        match self.advance() {
            Some(Tok::Ident(name)) if !KEYWORDS.contains(&name.as_str()) => {
                if self.bound.iter().rev().any(|v| v == &name) {
                    Ok(Term::Var(name))
                } else if self.scope.constants.contains(&name) {
                    Ok(Term::Const(name))
                } else {
                    Err(Error::UnboundVariable { name, pos })
                }
            }
            Some(Tok::Int(numer)) => {
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    let dpos = self.here();
                    match self.advance() {
                        Some(Tok::Int(denom)) if denom > 0 => Ok(Term::Rational(
                            BigRational::new(BigInt::from(numer), BigInt::from(denom)),
                        )),
                        _ => Err(Error::Parse {
                            pos: dpos,
                            msg: "expected a positive denominator".into(),
                        }),
                    }
                } else {
                    Ok(Term::Rational(BigRational::from(BigInt::from(numer))))
                }
            }
            _ => Err(Error::Parse {
                pos,
                msg: "expected a term".into(),
            }),
        }
    }
}
