//! Parser for the shared polynomial text grammar.
//!
//! Variables are `s1..s<n>`, exponents are integers after `^` (negative
//! allowed), `*` joins factors, coefficients are rationals `p/q`.
//! Whitespace is insignificant. Example: `s1*s2^-1 - 3/2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::ParseError;

use super::poly::{ExpVec, LaurentPoly};

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Int(BigInt),
    Var(usize),
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek_byte(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn next_tok(&mut self) -> Result<Tok, ParseError> {
        self.skip_ws();
        let Some(&b) = self.src.get(self.pos) else {
            return Ok(Tok::End);
        };
        match b {
            b'+' => {
                self.pos += 1;
                Ok(Tok::Plus)
            }
            b'-' => {
                self.pos += 1;
                Ok(Tok::Minus)
            }
            b'*' => {
                self.pos += 1;
                Ok(Tok::Star)
            }
            b'^' => {
                self.pos += 1;
                Ok(Tok::Caret)
            }
            b'/' => {
                self.pos += 1;
                Ok(Tok::Slash)
            }
            b'0'..=b'9' => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Tok::Int(text.parse().unwrap()))
            }
            b's' | b'S' => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.err("expected variable index after 's'"));
                }
                let idx: usize = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| self.err("variable index out of range"))?;
                if idx == 0 {
                    return Err(self.err("variable indices start at 1"));
                }
                Ok(Tok::Var(idx - 1))
            }
            other => Err(self.err(format!("unexpected character '{}'", other as char))),
        }
    }
}

/// Parse one polynomial in `nvars` variables from `src`.
pub fn parse_poly(nvars: usize, src: &str) -> Result<LaurentPoly, ParseError> {
    let mut lx = Lexer::new(src);
    let mut acc = LaurentPoly::zero(nvars);
    let mut first = true;
    loop {
        lx.skip_ws();
        if lx.pos >= lx.src.len() {
            if first {
                return Err(lx.err("empty polynomial"));
            }
            break;
        }
        // sign prefix
        let mut sign = BigRational::one();
        loop {
            match lx.peek_byte() {
                Some(b'+') => {
                    lx.pos += 1;
                }
                Some(b'-') => {
                    sign = -sign;
                    lx.pos += 1;
                }
                _ => break,
            }
        }
        let term = parse_product(&mut lx, nvars)?;
        acc = acc.add(&term.scale(&sign));
        first = false;
        lx.skip_ws();
        match lx.peek_byte() {
            None => break,
            Some(b'+') | Some(b'-') => continue,
            Some(c) => return Err(lx.err(format!("expected '+' or '-', found '{}'", c as char))),
        }
    }
    Ok(acc)
}

fn parse_product(lx: &mut Lexer, nvars: usize) -> Result<LaurentPoly, ParseError> {
    let mut acc = LaurentPoly::one(nvars);
    loop {
        let factor = parse_factor(lx, nvars)?;
        acc = acc.mul(&factor);
        lx.skip_ws();
        if lx.peek_byte() == Some(b'*') {
            lx.pos += 1;
        } else {
            break;
        }
    }
    Ok(acc)
}

fn parse_factor(lx: &mut Lexer, nvars: usize) -> Result<LaurentPoly, ParseError> {
    let tok = lx.next_tok()?;
    match tok {
        Tok::Int(n) => {
            // optional /q
            lx.skip_ws();
            if lx.peek_byte() == Some(b'/') {
                lx.pos += 1;
                let d = match lx.next_tok()? {
                    Tok::Int(d) => d,
                    _ => return Err(lx.err("expected denominator after '/'")),
                };
                if d == BigInt::from(0) {
                    return Err(lx.err("zero denominator"));
                }
                Ok(LaurentPoly::constant(nvars, BigRational::new(n, d)))
            } else {
                Ok(LaurentPoly::constant(nvars, BigRational::from_integer(n)))
            }
        }
        Tok::Var(idx) => {
            if idx >= nvars {
                return Err(lx.err(format!(
                    "variable s{} exceeds declared count {}",
                    idx + 1,
                    nvars
                )));
            }
            lx.skip_ws();
            let mut exp: i64 = 1;
            if lx.peek_byte() == Some(b'^') {
                lx.pos += 1;
                lx.skip_ws();
                let mut neg = false;
                if lx.peek_byte() == Some(b'-') {
                    neg = true;
                    lx.pos += 1;
                } else if lx.peek_byte() == Some(b'+') {
                    lx.pos += 1;
                }
                match lx.next_tok()? {
                    Tok::Int(n) => {
                        let v: i64 = n.try_into().map_err(|_| lx.err("exponent out of range"))?;
                        exp = if neg { -v } else { v };
                    }
                    _ => return Err(lx.err("expected integer exponent after '^'")),
                }
            }
            let mut e = ExpVec::zeros(nvars);
            e.0[idx] = exp;
            Ok(LaurentPoly::monomial(nvars, e, BigRational::one()))
        }
        other => Err(lx.err(format!("unexpected token {:?} in factor", other))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        let f = parse_poly(2, "s1*s2^-1 - 3/2").unwrap();
        assert_eq!(f.num_terms(), 2);
        let g = parse_poly(2, "  s1 * s2 ^ -1-3/ 2 ").unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn reports_column() {
        let e = parse_poly(2, "s1 + @").unwrap_err();
        assert_eq!(e.column, 6);
        assert!(parse_poly(1, "s2").is_err());
        assert!(parse_poly(1, "1/0").is_err());
    }

    #[test]
    fn signs_and_coefficients() {
        let f = parse_poly(1, "-s1 + 2*s1 - 1/2*s1").unwrap();
        assert_eq!(f, parse_poly(1, "1/2*s1").unwrap());
        let g = parse_poly(1, "--1").unwrap();
        assert_eq!(g, LaurentPoly::one(1));
    }
}
