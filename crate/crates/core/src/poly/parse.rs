//! Text format for polynomial tuples.
//!
//! A tuple is a `;`-separated list of expanded polynomials in the variables
//! `x0 … x{n-1}`, e.g. `x0^2 + x1^2 - 1; 2*x0*x1 - 0.5`. Terms are products
//! of numbers and powers joined by `*`; parentheses are not accepted.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::PolyTuple;
use crate::scalar::Scalar;

struct Term {
    coef: f64,
    exps: BTreeMap<usize, u32>,
    pos: usize,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<R>(&self, pos: usize, message: impl Into<String>) -> Result<R> {
        Err(Error::Syntax {
            pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let int_digits = self.digits();
        let mut frac_digits = 0;
        if self.peek() == Some(b'.') {
            self.pos += 1;
            frac_digits = self.digits();
        }
        if int_digits + frac_digits == 0 {
            return self.err(start, "expected a number");
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .or_else(|_| self.err(start, format!("malformed number '{text}'")))
    }

    fn integer(&mut self) -> Result<u32> {
        let start = self.pos;
        if self.digits() == 0 {
            return self.err(start, "expected a nonnegative integer exponent");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<u32>()
            .or_else(|_| self.err(start, format!("exponent '{text}' out of range")))
    }

    fn factor(&mut self, term: &mut Term) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(b'x' | b'X') => {
                let at = self.pos;
                self.pos += 1;
                let start = self.pos;
                if self.digits() == 0 {
                    return self.err(at, "expected a variable index after 'x'");
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let k: usize = text
                    .parse()
                    .or_else(|_| self.err(start, "variable index out of range"))?;
                self.skip_ws();
                let mut e = 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    e = self.integer()?;
                }
                *term.exps.entry(k).or_insert(0) += e;
                Ok(())
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let v = self.number()?;
                term.coef *= v;
                Ok(())
            }
            Some(c) => self.err(self.pos, format!("unexpected character '{}'", c as char)),
            None => self.err(self.pos, "unexpected end of input"),
        }
    }

    /// Parses one polynomial up to `;` or end of input.
    fn polynomial(&mut self) -> Result<Vec<Term>> {
        let mut terms = Vec::new();
        self.skip_ws();
        let mut first = true;
        loop {
            self.skip_ws();
            let pos = self.pos;
            let mut sign = 1.0;
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                _ if !first => {
                    return match self.peek() {
                        None | Some(b';') => Ok(terms),
                        Some(c) => self.err(pos, format!("expected '+' or '-', found '{}'", c as char)),
                    };
                }
                _ => {}
            }
            if first && matches!(self.peek(), None | Some(b';')) && sign == 1.0 && pos == self.pos {
                return self.err(pos, "empty polynomial");
            }
            let mut term = Term {
                coef: sign,
                exps: BTreeMap::new(),
                pos,
            };
            self.factor(&mut term)?;
            loop {
                self.skip_ws();
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    self.factor(&mut term)?;
                } else {
                    break;
                }
            }
            terms.push(term);
            first = false;
            self.skip_ws();
            if matches!(self.peek(), None | Some(b';')) {
                return Ok(terms);
            }
        }
    }

    fn tuple(&mut self) -> Result<Vec<Vec<Term>>> {
        let mut polys = vec![self.polynomial()?];
        while self.peek() == Some(b';') {
            self.pos += 1;
            self.skip_ws();
            if self.peek().is_none() {
                // trailing separator
                break;
            }
            polys.push(self.polynomial()?);
        }
        if self.pos != self.src.len() {
            return self.err(self.pos, "trailing input");
        }
        Ok(polys)
    }
}

fn parse_terms(src: &str) -> Result<Vec<Vec<Term>>> {
    Parser {
        src: src.as_bytes(),
        pos: 0,
    }
    .tuple()
}

fn build<T: Scalar>(polys: Vec<Vec<Term>>, n: usize, degrees: Vec<u32>) -> Result<PolyTuple<T>> {
    if polys.len() != degrees.len() {
        return Err(Error::InvalidInput(format!(
            "{} polynomials in the text but {} degrees declared",
            polys.len(),
            degrees.len()
        )));
    }
    let mut out = Vec::with_capacity(polys.len());
    for (i, terms) in polys.into_iter().enumerate() {
        let mut row = Vec::with_capacity(terms.len());
        for t in terms {
            let mut exps = vec![0u32; n];
            for (&k, &e) in &t.exps {
                if k >= n {
                    return Err(Error::Syntax {
                        pos: t.pos,
                        message: format!("variable x{k} outside dimension n = {n}"),
                    });
                }
                exps[k] = e;
            }
            let deg: u32 = exps.iter().sum();
            if deg > degrees[i] {
                return Err(Error::DegreeOverflow {
                    poly: i,
                    degree: deg,
                    max: degrees[i],
                });
            }
            row.push((exps, T::lit(t.coef)));
        }
        out.push(row);
    }
    PolyTuple::new(n, degrees, out)
}

/// Parses `src` as a tuple in `n` variables with the declared degree vector.
pub fn parse_poly_text<T: Scalar>(src: &str, n: usize, degrees: &[u32]) -> Result<PolyTuple<T>> {
    build(parse_terms(src)?, n, degrees.to_vec())
}

/// Parses `src`, inferring `n` from the largest variable index and each
/// degree from the polynomial itself (at least 1).
pub fn parse_poly_text_infer<T: Scalar>(src: &str) -> Result<PolyTuple<T>> {
    let polys = parse_terms(src)?;
    let n = polys
        .iter()
        .flatten()
        .flat_map(|t| t.exps.keys().copied())
        .max()
        .map_or(1, |k| k + 1);
    let degrees = polys
        .iter()
        .map(|p| {
            p.iter()
                .map(|t| t.exps.values().sum::<u32>())
                .max()
                .unwrap_or(0)
                .max(1)
        })
        .collect();
    build(polys, n, degrees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiIndex;

    fn coef(f: &PolyTuple<f64>, i: usize, e: &[u32]) -> f64 {
        f.poly(i).coefficient(&MultiIndex::new(e.to_vec()))
    }

    #[test]
    fn parses_circle() {
        let f: PolyTuple<f64> = parse_poly_text("x0^2 + x1^2 - 1", 2, &[2]).unwrap();
        assert_eq!(f.poly(0).len(), 3);
        assert_eq!(coef(&f, 0, &[2, 0]), 1.0);
        assert_eq!(coef(&f, 0, &[0, 2]), 1.0);
        assert_eq!(coef(&f, 0, &[0, 0]), -1.0);
    }

    #[test]
    fn parses_parabola() {
        let f: PolyTuple<f64> = parse_poly_text("x1 - x0^2", 2, &[2]).unwrap();
        assert_eq!(f.poly(0).len(), 2);
        assert_eq!(coef(&f, 0, &[0, 1]), 1.0);
        assert_eq!(coef(&f, 0, &[2, 0]), -1.0);
    }

    #[test]
    fn degree_overflow() {
        let err = parse_poly_text::<f64>("x0^3", 1, &[2]).unwrap_err();
        assert!(matches!(err, Error::DegreeOverflow { degree: 3, max: 2, .. }));
    }

    #[test]
    fn products_decimals_and_tuples() {
        let f: PolyTuple<f64> =
            parse_poly_text("-2.5*x0*x1 + x0 * 3 - .5; x1^2 - x0*x0", 2, &[2, 2]).unwrap();
        assert_eq!(coef(&f, 0, &[1, 1]), -2.5);
        assert_eq!(coef(&f, 0, &[1, 0]), 3.0);
        assert_eq!(coef(&f, 0, &[0, 0]), -0.5);
        assert_eq!(coef(&f, 1, &[2, 0]), -1.0);
        assert_eq!(f.q(), 2);
    }

    #[test]
    fn like_terms_combine() {
        let f: PolyTuple<f64> = parse_poly_text("x0 + 2*x0 + 1e-1", 1, &[1]).unwrap();
        assert_eq!(coef(&f, 0, &[1]), 3.0);
        assert_eq!(coef(&f, 0, &[0]), 0.1);
    }

    #[test]
    fn error_positions() {
        let cases: &[(&str, usize)] = &[
            ("x0^2 + ", 7),
            ("x0 ^ ", 5),
            ("x0 + (x1)", 5),
            ("x0 x1", 3),
            ("x0 + y", 5),
            ("x", 0),
            ("", 0),
            ("x0 + x1 ; x0 + $", 15),
        ];
        for &(src, pos) in cases {
            match parse_poly_text::<f64>(src, 2, &[2, 2]) {
                Err(Error::Syntax { pos: p, .. }) => assert_eq!(p, pos, "source {src:?}"),
                other => panic!("expected syntax error for {src:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn out_of_range_variable_reports_term_position() {
        match parse_poly_text::<f64>("x0 + x3", 2, &[1]) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn count_mismatch() {
        assert!(matches!(
            parse_poly_text::<f64>("x0; x1", 2, &[1]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn infers_shape() {
        let f: PolyTuple<f64> = parse_poly_text_infer("x0^2 + x1^2 - 1").unwrap();
        assert_eq!((f.n(), f.q(), f.degrees()), (2, 1, &[2u32][..]));
        let g: PolyTuple<f64> = parse_poly_text_infer("x0^2").unwrap();
        assert_eq!((g.n(), g.degrees()), (1, &[2u32][..]));
        let c: PolyTuple<f64> = parse_poly_text_infer("1").unwrap();
        assert_eq!((c.n(), c.degrees()), (1, &[1u32][..]));
    }
}
