//! Lattice expressions such as `U(2)+A2+2*E8` or `-A1+<6>+3A1`.
//!
//! ```text
//! expr := term ('+' term)*
//! term := [int ['*']] atom
//! atom := ['-'] name ['(' int ')'] | ['-'] '<' int '>'
//! name := 'U' | 'A' int | 'D' int | 'E' int
//! ```
//!
//! Unicode `⟨6⟩`, `−` and subscript digits (`A₂`) are accepted as well.
//! Whitespace is ignored.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::{BlockKind, Lattice};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub negated: bool,
    pub kind: BlockKind,
    pub scale: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub mult: u32,
    pub atom: Atom,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeExpr {
    pub terms: Vec<Term>,
}

impl LatticeExpr {
    pub fn to_lattice(&self) -> Result<Lattice> {
        let mut parts = Vec::new();
        for t in &self.terms {
            for _ in 0..t.mult {
                parts.push(Lattice::block(t.atom.kind.clone(), t.atom.scale, t.atom.negated)?);
            }
        }
        Ok(Lattice::direct_sum(&parts)?.with_name(self.to_string()))
    }

    /// Appends `other`'s terms.
    pub fn plus(&self, other: &LatticeExpr) -> LatticeExpr {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        LatticeExpr { terms }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-")?;
        }
        write!(f, "{}", self.kind)?;
        if self.scale != 1 {
            write!(f, "({})", self.scale)?;
        }
        Ok(())
    }
}

impl fmt::Display for LatticeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if t.mult != 1 {
                write!(f, "{}", t.mult)?;
            }
            write!(f, "{}", t.atom)?;
        }
        Ok(())
    }
}

impl FromStr for LatticeExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_lattice_expr(s)
    }
}

fn normalize(c: char) -> char {
    match c {
        '₀'..='₉' => char::from_digit(c as u32 - '₀' as u32, 10).unwrap(),
        '⟨' | '〈' => '<',
        '⟩' | '〉' => '>',
        '−' | '–' => '-',
        '×' | '·' => '*',
        other => other,
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn at(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(i, _)| i)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.at(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<Option<u64>> {
        let start = self.pos;
        let mut v: u64 = 0;
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            v = match v.checked_mul(10).and_then(|v| v.checked_add(c as u64 - '0' as u64)) {
                Some(v) => v,
                None => return self.err("number too large"),
            };
            self.pos += 1;
        }
        Ok(if self.pos == start { None } else { Some(v) })
    }

    fn small(&self, v: u64, what: &str) -> Result<u32> {
        if v == 0 || v > 10_000 {
            return self.err(format!("{what} must be between 1 and 10000"));
        }
        Ok(v as u32)
    }

    fn term(&mut self) -> Result<Term> {
        let mult = match self.number()? {
            Some(m) => {
                let m = self.small(m, "multiplier")?;
                self.eat('*');
                m
            }
            None => 1,
        };
        let negated = self.eat('-');
        let start = self.at();
        let kind = match self.peek() {
            Some('<') => {
                self.pos += 1;
                let neg = self.eat('-');
                let Some(k) = self.number()? else { return self.err("expected an integer after '<'") };
                if !self.eat('>') {
                    return self.err("expected '>'");
                }
                let k = i64::try_from(k).map_err(|_| Error::Parse { pos: start, msg: "too large".into() })?;
                let k = if neg { -k } else { k };
                if k % 2 != 0 {
                    return Err(Error::OddDiagonal(k));
                }
                if k == 0 {
                    return Err(Error::Parse { pos: start, msg: "<0> is degenerate".into() });
                }
                BlockKind::Diag(k)
            }
            Some('U') => {
                self.pos += 1;
                BlockKind::U
            }
            Some(c @ ('A' | 'D' | 'E')) => {
                self.pos += 1;
                let Some(n) = self.number()? else { return self.err(format!("expected rank after '{c}'")) };
                let n = self.small(n, "rank")?;
                let k = match c {
                    'A' => BlockKind::A(n),
                    'D' if n >= 3 => BlockKind::D(n),
                    'E' if (6..=8).contains(&n) => BlockKind::E(n),
                    _ => return Err(Error::UnknownBlock(format!("{c}{n}"))),
                };
                k
            }
            Some(c) if c.is_alphabetic() => {
                let mut name = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_alphanumeric()) {
                    name.push(c);
                    self.pos += 1;
                }
                return Err(Error::UnknownBlock(name));
            }
            Some(c) => return self.err(format!("unexpected character '{c}'")),
            None => return self.err("unexpected end of expression"),
        };
        let mut scale = 1;
        if self.eat('(') {
            let Some(s) = self.number()? else { return self.err("expected scale") };
            scale = self.small(s, "scale")?;
            if !self.eat(')') {
                return self.err("expected ')'");
            }
        }
        Ok(Term { mult, atom: Atom { negated, kind, scale } })
    }
}

pub fn parse_lattice_expr(text: &str) -> Result<LatticeExpr> {
    let chars: Vec<(usize, char)> = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(i, c)| (i, normalize(c)))
        .collect();
    let mut p = Parser { chars, pos: 0, len: text.len() };
    let mut terms = vec![p.term()?];
    while p.peek().is_some() {
        if !p.eat('+') {
            return p.err("expected '+'");
        }
        terms.push(p.term()?);
    }
    Ok(LatticeExpr { terms })
}
