//! Parser for polynomial strings in `s`, such as `"1 - s^3"` or `"(2 + s)(1 - 3*s^2)"`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly;
use crate::error::{Error, Result};

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

fn err(src: &str, msg: &str) -> Error {
    Error::Io(format!("cannot parse polynomial {src:?}: {msg}"))
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Vec<BigInt>> {
        let mut acc = if self.peek() == Some('-') {
            self.pos += 1;
            negate(self.term()?)
        } else {
            if self.peek() == Some('+') {
                self.pos += 1;
            }
            self.term()?
        };
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = add(&acc, &self.term()?);
                }
                '-' => {
                    self.pos += 1;
                    acc = add(&acc, &negate(self.term()?));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Vec<BigInt>> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = poly::mul(&acc, &self.factor()?);
                }
                Some(c) if c == 's' || c == '(' || c.is_ascii_digit() => {
                    acc = poly::mul(&acc, &self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Vec<BigInt>> {
        let base = match self.peek() {
            Some('s') => {
                self.pos += 1;
                vec![BigInt::zero(), BigInt::one()]
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(err(self.src, "missing ')'"));
                }
                self.pos += 1;
                e
            }
            Some(c) if c.is_ascii_digit() => vec![self.integer()?],
            Some(c) => return Err(err(self.src, &format!("unexpected {c:?}"))),
            None => return Err(err(self.src, "unexpected end of input")),
        };
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| err(self.src, "exponent out of range"))?;
            let mut acc = vec![BigInt::one()];
            for _ in 0..e {
                acc = poly::mul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(err(self.src, "expected an integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| err(self.src, "bad integer"))
    }
}

fn negate(a: Vec<BigInt>) -> Vec<BigInt> {
    a.into_iter().map(|c| -c).collect()
}

fn add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

/// Parse into coefficients (lowest degree first); whitespace is ignored.
pub fn parse_polynomial(src: &str) -> Result<Vec<BigInt>> {
    let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(err(src, "empty input"));
    }
    let mut p = Parser { chars, pos: 0, src };
    let out = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(err(src, &format!("trailing input at position {}", p.pos)));
    }
    Ok(out)
}
