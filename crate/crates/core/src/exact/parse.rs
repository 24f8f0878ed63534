//! Text form of scalars.
//!
//! Input accepts arithmetic expressions (`+ - * / ^`, parentheses, decimal or fraction
//! literals), the symbol `a` for the adjoined generator of an extension, `x`, `y`, `z` or
//! `x1..xm` for function-field variables, and coefficient lists `[c0, c1, ...]` read as a
//! polynomial in the field's primary generator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::field::{Field, Scalar};
use crate::error::{Error, Result};

pub fn parse_scalar(field: &Field, s: &str) -> Result<Scalar> {
    let mut p = Parser { s: s.as_bytes(), pos: 0 };
    let v = p.expr(field)?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.pos, String::from_utf8_lossy(self.s)))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
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

    fn expr(&mut self, f: &Field) -> Result<Scalar> {
        let mut acc = self.term(f)?;
        loop {
            if self.eat(b'+') {
                let t = self.term(f)?;
                acc = f.add(&acc, &t);
            } else if self.eat(b'-') {
                let t = self.term(f)?;
                acc = f.sub(&acc, &t);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, f: &Field) -> Result<Scalar> {
        let mut acc = self.unary(f)?;
        loop {
            if self.eat(b'*') {
                let t = self.unary(f)?;
                acc = f.mul(&acc, &t);
            } else if self.eat(b'/') {
                let t = self.unary(f)?;
                acc = f.div(&acc, &t).map_err(|_| self.err("division by zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self, f: &Field) -> Result<Scalar> {
        if self.eat(b'-') {
            let v = self.unary(f)?;
            return Ok(f.neg(&v));
        }
        if self.eat(b'+') {
            return self.unary(f);
        }
        let base = self.atom(f)?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let e = self.integer()?;
            let e: u64 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            let v = f.pow(&base, e);
            return if neg { f.inv(&v).ok_or_else(|| self.err("zero to a negative power")) } else { Ok(v) };
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(txt.parse().unwrap())
    }

    fn atom(&mut self, f: &Field) -> Result<Scalar> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr(f)?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(v)
            }
            Some(b'[') => {
                self.pos += 1;
                self.list(f)
            }
            Some(c) if c.is_ascii_digit() => {
                let int = self.integer()?;
                if self.s.get(self.pos) == Some(&b'.') {
                    self.pos += 1;
                    let start = self.pos;
                    let frac = if self.s.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                        self.integer()?
                    } else {
                        BigInt::zero()
                    };
                    let digits = (self.pos - start) as u32;
                    let den = BigInt::from(10u32).pow(digits);
                    let q = BigRational::new(int * &den + frac, den);
                    return f.from_rational(&q).map_err(|_| self.err("literal not defined in this characteristic"));
                }
                Ok(f.from_bigint(&int))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap().to_string();
                self.symbol(f, &name)
            }
            _ => Err(self.err("unexpected token")),
        }
    }

    fn symbol(&self, f: &Field, name: &str) -> Result<Scalar> {
        let var_index = match name {
            "x" => Some(1),
            "y" => Some(2),
            "z" => Some(3),
            _ => name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()),
        };
        match (f, name) {
            (Field::Extension(_), "a" | "alpha" | "t") => f.generator(1),
            (Field::RatFunc(r), _) => {
                if let Some(i) = var_index {
                    return f.generator(i).map_err(|_| self.err(&format!("variable {name} out of range")));
                }
                let b = self.symbol(&r.base, name)?;
                Ok(f.lift_base(&b))
            }
            _ => Err(self.err(&format!("unknown symbol {name}"))),
        }
    }

    /// `[c0, c1, ...]` as a polynomial in the primary generator; entries live in the base.
    fn list(&mut self, f: &Field) -> Result<Scalar> {
        let (base, gen) = match f {
            Field::Extension(e) => (e.base.clone(), f.generator(1)?),
            Field::RatFunc(r) => (r.base.clone(), f.generator(1)?),
            _ => return Err(self.err("coefficient list in a field without a generator")),
        };
        let mut coeffs = Vec::new();
        if !self.eat(b']') {
            loop {
                coeffs.push(self.expr(&base)?);
                if self.eat(b']') {
                    break;
                }
                if !self.eat(b',') {
                    return Err(self.err("expected ',' or ']'"));
                }
            }
        }
        let mut acc = f.zero();
        for c in coeffs.iter().rev() {
            acc = f.add(&f.mul(&acc, &gen), &f.lift_base(c));
        }
        Ok(acc)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text that [`parse_scalar`] reads back to the same element.
pub fn format_scalar(field: &Field, a: &Scalar) -> String {
    match (field, a) {
        (Field::Extension(e), Scalar::Ext(c)) if !matches!(e.base, Field::Extension(_)) => {
            format!("[{}]", c.iter().map(|x| format_scalar(&e.base, x)).collect::<Vec<_>>().join(","))
        }
        _ => format_expr(field, a),
    }
}

/// Expression form, safe to embed as a factor.
fn format_expr(field: &Field, a: &Scalar) -> String {
    match (field, a) {
        (_, Scalar::Rat(r)) => fmt_rational(r),
        (_, Scalar::Fp(x)) => x.to_string(),
        (Field::Extension(e), Scalar::Ext(c)) => {
            let mut terms = Vec::new();
            for (i, x) in c.iter().enumerate() {
                if e.base.is_zero(x) {
                    continue;
                }
                let cx = format_expr(&e.base, x);
                terms.push(match i {
                    0 => cx,
                    1 => format!("{cx}*a"),
                    _ => format!("{cx}*a^{i}"),
                });
            }
            if terms.is_empty() {
                "0".into()
            } else {
                format!("({})", terms.join(" + "))
            }
        }
        (Field::RatFunc(r), Scalar::Frac(_)) => {
            let names: Vec<String> =
                if r.nvars == 1 { vec!["x".into()] } else { (1..=r.nvars).map(|i| format!("x{i}")).collect() };
            let show = |p: &super::mpoly::MPoly| -> String {
                let terms = p.terms(r.nvars);
                if terms.is_empty() {
                    return "0".into();
                }
                let parts: Vec<String> = terms
                    .iter()
                    .map(|(exps, c)| {
                        let mut fac = vec![format_expr(&r.base, c)];
                        for (v, &e) in names.iter().zip(exps) {
                            match e {
                                0 => {}
                                1 => fac.push(v.clone()),
                                _ => fac.push(format!("{v}^{e}")),
                            }
                        }
                        if fac.len() > 1 && fac[0] == "1" {
                            fac.remove(0);
                        }
                        fac.join("*")
                    })
                    .collect();
                format!("({})", parts.join(" + "))
            };
            let (num, den) = r.parts(a);
            if den.is_one(&r.base, r.nvars) {
                show(num)
            } else {
                format!("{}/{}", show(num), show(den))
            }
        }
        _ => panic!("scalar/field mismatch in format"),
    }
}

/// Parses a plain rational literal such as `-3/4` or `1.5`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    match parse_scalar(&Field::Rational, s)? {
        Scalar::Rat(r) => Ok(r),
        _ => unreachable!(),
    }
}

/// `true` if `r` is a nonnegative integer; helper for integer-only contexts.
pub fn is_natural(r: &BigRational) -> bool {
    r.is_integer() && !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::Poly;

    #[test]
    fn rationals_and_decimals() {
        let f = Field::Rational;
        assert_eq!(parse_scalar(&f, "3/4").unwrap(), Scalar::rat(3, 4));
        assert_eq!(parse_scalar(&f, " -6/8 ").unwrap(), Scalar::rat(-3, 4));
        assert_eq!(parse_scalar(&f, "1.25").unwrap(), Scalar::rat(5, 4));
        assert_eq!(parse_scalar(&f, "2^-2 + 1").unwrap(), Scalar::rat(5, 4));
        assert!(parse_scalar(&f, "1/0").is_err());
        assert!(parse_scalar(&f, "x").is_err());
    }

    #[test]
    fn number_field_lists() {
        let f = Field::number_field(Poly::from_ints(&[1, 0, 1])).unwrap();
        let i = f.generator(1).unwrap();
        assert_eq!(parse_scalar(&f, "[0,1]").unwrap(), i);
        assert_eq!(parse_scalar(&f, "a^2").unwrap(), f.from_int(-1));
        let z = parse_scalar(&f, "[1/2,-3]").unwrap();
        assert_eq!(parse_scalar(&f, &format_scalar(&f, &z)).unwrap(), z);
    }

    #[test]
    fn function_field_round_trip() {
        let f9 = {
            let f3 = Field::Prime(3);
            Field::extension(f3.clone(), Poly::from_ints_in(&[1, 0, 1], &f3), "a").unwrap()
        };
        for f in [
            Field::rational_functions(Field::Rational, 1).unwrap(),
            Field::rational_functions(Field::Rational, 2).unwrap(),
            Field::rational_functions(Field::Prime(3), 1).unwrap(),
            Field::rational_functions(f9, 1).unwrap(),
        ] {
            let src = if let Field::RatFunc(r) = &f {
                if r.nvars == 2 {
                    "(x1^2 - 1/3*x2)/(x1*x2 + 2)"
                } else if matches!(r.base, Field::Extension(_)) {
                    "(a*x + 1)/(x^2 + a)"
                } else {
                    "[1,2,0,1]/(x+1)"
                }
            } else {
                unreachable!()
            };
            let v = parse_scalar(&f, src).unwrap();
            let txt = format_scalar(&f, &v);
            assert_eq!(parse_scalar(&f, &txt).unwrap(), v, "{txt}");
        }
    }
}
