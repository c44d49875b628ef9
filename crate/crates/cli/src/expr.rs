//! Polynomial strings.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' int)?
//! atom   := int ('/' int)? | 'i' | 'x' int | 'rho' int | '(' expr ')'
//! ```
//!
//! `x1..xm` are the chart coordinates, `rho<k>` the partition-of-unity
//! symbol of chart `k`, and `i` the imaginary unit.

use algebroid_core::{Poly, Scalar, Var};
use num_traits::One;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

pub fn parse_poly(s: &str) -> Result<Poly, ParseError> {
    let mut p = Parser { s: s.as_bytes(), pos: 0 };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

/// A constant polynomial string.
pub fn parse_scalar(s: &str) -> Result<Scalar, ParseError> {
    let p = parse_poly(s)?;
    p.as_constant().ok_or(ParseError { column: 1, message: format!("`{s}` is not a constant") })
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> ParseError {
        ParseError { column: self.pos + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii")
            .parse()
            .map_err(|_| ParseError { column: start + 1, message: "integer too large".into() })
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        if self.eat(b'-') {
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.int()?;
            let e = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
            let mut out = Poly::one();
            for _ in 0..e {
                out = &out * &base;
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.int()?;
                let den = if self.eat(b'/') { self.int()? } else { 1 };
                if den == 0 {
                    return Err(self.err("zero denominator"));
                }
                let (num, den) = (i64::try_from(num), i64::try_from(den));
                match (num, den) {
                    (Ok(n), Ok(d)) => Ok(Poly::constant(Scalar::frac(n, d))),
                    _ => Err(self.err("literal too large")),
                }
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(Poly::constant(Scalar::i()))
            }
            Some(b'x') => {
                self.pos += 1;
                let k = self.int()?;
                if k == 0 || k > 32 {
                    return Err(self.err("coordinates are x1..x32"));
                }
                Ok(Poly::var(Var::X((k - 1) as u8)))
            }
            Some(b'r') => {
                if !self.s[self.pos..].starts_with(b"rho") {
                    return Err(self.err("expected `rho`"));
                }
                self.pos += 3;
                let k = self.int()?;
                let k = u8::try_from(k).map_err(|_| self.err("chart index too large"))?;
                Ok(Poly::var(Var::Rho(k)))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
