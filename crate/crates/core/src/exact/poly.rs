//! Univariate polynomials over a [`Field`], with the factorization toolkit used to build
//! congruence maps for number fields.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{Field, Scalar};
use crate::error::{Error, Result};

/// Coefficients from the constant term up; never ends in a zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    c: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut c: Vec<Scalar>, f: &Field) -> Poly {
        while c.last().is_some_and(|x| f.is_zero(x)) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn one(f: &Field) -> Poly {
        Poly { c: vec![f.one()] }
    }

    pub fn constant(a: Scalar, f: &Field) -> Poly {
        Poly::new(vec![a], f)
    }

    /// The monomial `x`.
    pub fn x(f: &Field) -> Poly {
        Poly { c: vec![f.zero(), f.one()] }
    }

    /// Integer coefficients over `Q`, constant term first.
    pub fn from_ints(c: &[i64]) -> Poly {
        Poly::from_ints_in(c, &Field::Rational)
    }

    pub fn from_ints_in(c: &[i64], f: &Field) -> Poly {
        Poly::new(c.iter().map(|&x| f.from_int(x)).collect(), f)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lc(&self) -> Option<&Scalar> {
        self.c.last()
    }

    pub fn coeff(&self, i: usize, f: &Field) -> Scalar {
        self.c.get(i).cloned().unwrap_or_else(|| f.zero())
    }

    pub fn add(&self, o: &Poly, f: &Field) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| f.add(&self.coeff(i, f), &o.coeff(i, f))).collect(), f)
    }

    pub fn neg(&self, f: &Field) -> Poly {
        Poly { c: self.c.iter().map(|x| f.neg(x)).collect() }
    }

    pub fn sub(&self, o: &Poly, f: &Field) -> Poly {
        self.add(&o.neg(f), f)
    }

    pub fn scale(&self, a: &Scalar, f: &Field) -> Poly {
        Poly::new(self.c.iter().map(|x| f.mul(x, a)).collect(), f)
    }

    pub fn mul(&self, o: &Poly, f: &Field) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![f.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Poly::new(out, f)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, o: &Poly, f: &Field) -> (Poly, Poly) {
        let db = o.degree().expect("polynomial division by zero");
        let inv = f.inv(o.lc().unwrap()).expect("nonzero leading coefficient");
        let mut r = self.c.clone();
        if r.len() <= db {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![f.zero(); r.len() - db];
        for i in (db..r.len()).rev() {
            if f.is_zero(&r[i]) {
                continue;
            }
            let t = f.mul(&r[i], &inv);
            for (j, b) in o.c.iter().enumerate() {
                let k = i - db + j;
                r[k] = f.sub(&r[k], &f.mul(&t, b));
            }
            q[i - db] = t;
        }
        r.truncate(db);
        (Poly::new(q, f), Poly::new(r, f))
    }

    pub fn rem(&self, o: &Poly, f: &Field) -> Poly {
        if self.degree() < o.degree() {
            return self.clone();
        }
        self.divrem(o, f).1
    }

    pub fn div(&self, o: &Poly, f: &Field) -> Poly {
        self.divrem(o, f).0
    }

    pub fn monic(&self, f: &Field) -> Poly {
        match self.lc() {
            None => Poly::zero(),
            Some(l) if f.is_one(l) => self.clone(),
            Some(l) => self.scale(&f.inv(l).unwrap(), f),
        }
    }

    /// Monic gcd (`gcd(0, 0) = 0`).
    pub fn gcd(&self, o: &Poly, f: &Field) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// `(g, s, t)` with `s·self + t·o = g`, `g` not normalized.
    pub fn ext_gcd(&self, o: &Poly, f: &Field) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1, f);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1, f), f);
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1, f), f);
            t0 = std::mem::replace(&mut t1, t);
        }
        (r0, s0, t0)
    }

    pub fn derivative(&self, f: &Field) -> Poly {
        Poly::new(
            self.c.iter().enumerate().skip(1).map(|(i, a)| f.mul(a, &f.from_int(i as i64))).collect(),
            f,
        )
    }

    pub fn eval(&self, x: &Scalar, f: &Field) -> Scalar {
        self.c.iter().rev().fold(f.zero(), |acc, a| f.add(&f.mul(&acc, x), a))
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, e: &BigUint, m: &Poly, f: &Field) -> Poly {
        let mut acc = Poly::one(f).rem(m, f);
        let base = self.rem(m, f);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc, f).rem(m, f);
            if e.bit(i) {
                acc = acc.mul(&base, f).rem(m, f);
            }
        }
        acc
    }

    /// `f / gcd(f, f')`, monic. Characteristic zero.
    pub fn squarefree_part(&self, f: &Field) -> Result<Poly> {
        if self.is_zero() {
            return Err(Error::InvalidInput("squarefree part of the zero polynomial".into()));
        }
        if f.characteristic() != 0 {
            return Err(Error::Unsupported("squarefree_part needs characteristic zero".into()));
        }
        let g = self.gcd(&self.derivative(f), f);
        Ok(self.div(&g, f).monic(f))
    }

    /// Applies `m` to every coefficient.
    pub fn map(&self, to: &Field, m: impl Fn(&Scalar) -> Scalar) -> Poly {
        Poly::new(self.c.iter().map(m).collect(), to)
    }

    pub fn display(&self, f: &Field, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if f.is_zero(a) {
                continue;
            }
            let coef = f.fmt_scalar(a);
            let coef = if coef.contains(['+', ' ']) || (coef[1..].contains('-')) { format!("({coef})") } else { coef };
            parts.push(match i {
                0 => coef,
                _ => {
                    let mono = if i == 1 { var.to_string() } else { format!("{var}^{i}") };
                    if f.is_one(a) {
                        mono
                    } else {
                        format!("{coef}*{mono}")
                    }
                }
            });
        }
        parts.join(" + ")
    }
}

/// Resultant over a field via the Sylvester matrix.
pub fn resultant(a: &Poly, b: &Poly, f: &Field) -> Scalar {
    let (m, n) = match (a.degree(), b.degree()) {
        (Some(m), Some(n)) => (m, n),
        _ => return f.zero(),
    };
    let size = m + n;
    if size == 0 {
        return f.one();
    }
    let mut rows = vec![vec![f.zero(); size]; size];
    for i in 0..n {
        for (j, c) in a.coeffs().iter().rev().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in b.coeffs().iter().rev().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    super::linalg::determinant(rows, f)
}

/// Discriminant of a polynomial over `Q`.
pub fn discriminant(p: &Poly) -> Result<BigRational> {
    let f = Field::Rational;
    let n = p.degree().filter(|&d| d >= 1).ok_or_else(|| Error::InvalidInput("discriminant needs degree >= 1".into()))?;
    let res = resultant(p, &p.derivative(&f), &f);
    let r = res.as_rational().expect("rational").clone();
    let lc = p.lc().unwrap().as_rational().unwrap().clone();
    let sign = if (n * (n - 1) / 2) % 2 == 0 { BigRational::one() } else { -BigRational::one() };
    Ok(sign * r / lc)
}

fn cmp_factors(a: &Poly, b: &Poly, f: &Field) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| {
        let ka: Vec<u64> = a.coeffs().iter().map(|x| f.element_index(x)).collect();
        let kb: Vec<u64> = b.coeffs().iter().map(|x| f.element_index(x)).collect();
        ka.cmp(&kb)
    })
}

/// Factorization of a nonzero polynomial over `F_p` into monic irreducibles with
/// multiplicities, sorted by degree, then by coefficients from the constant term up.
/// The equal-degree split is Cantor–Zassenhaus driven by a seeded generator.
pub fn factor_mod_p(poly: &Poly, p: u64) -> Result<Vec<(Poly, u32)>> {
    let f = Field::prime(p)?;
    if poly.is_zero() {
        return Err(Error::InvalidInput("cannot factor the zero polynomial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ p);
    let mut out: Vec<(Poly, u32)> = Vec::new();
    for (sq, mult) in squarefree_factorization(&poly.monic(&f), &f) {
        for (g, d) in distinct_degree(&sq, &f) {
            for h in equal_degree(&g, d, &f, &mut rng) {
                out.push((h, mult));
            }
        }
    }
    out.sort_by(|a, b| cmp_factors(&a.0, &b.0, &f));
    // equal factors may arise from different squarefree layers only in theory; merge anyway
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (h, m) in out {
        match merged.last_mut() {
            Some((last, lm)) if *last == h => *lm += m,
            _ => merged.push((h, m)),
        }
    }
    Ok(merged)
}

/// Musser's squarefree factorization over `F_p` (input monic).
fn squarefree_factorization(poly: &Poly, f: &Field) -> Vec<(Poly, u32)> {
    let p = f.characteristic() as usize;
    let mut out = Vec::new();
    if poly.degree() == Some(0) {
        return out;
    }
    let mut c = poly.gcd(&poly.derivative(f), f);
    let mut w = poly.div(&c, f);
    let mut i = 1u32;
    while w.degree() != Some(0) {
        let y = w.gcd(&c, f);
        let z = w.div(&y, f);
        if z.degree() != Some(0) {
            out.push((z.monic(f), i));
        }
        i += 1;
        w = y;
        c = c.div(&w, f);
    }
    if c.degree() != Some(0) {
        // c is a polynomial in x^p; over a prime field the p-th root just compresses exponents
        let root = Poly::new(c.coeffs().iter().step_by(p).cloned().collect(), f);
        for (g, m) in squarefree_factorization(&root.monic(f), f) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of equal degree.
fn distinct_degree(poly: &Poly, f: &Field) -> Vec<(Poly, usize)> {
    let p = BigUint::from(f.characteristic());
    let x = Poly::x(f);
    let mut out = Vec::new();
    let mut rest = poly.clone();
    let mut h = x.rem(&rest, f);
    let mut d = 1;
    while rest.degree().unwrap_or(0) >= 2 * d {
        h = h.pow_mod(&p, &rest, f);
        let g = h.sub(&x, f).gcd(&rest, f);
        if g.degree() != Some(0) {
            rest = rest.div(&g, f);
            h = h.rem(&rest, f);
            out.push((g, d));
        }
        d += 1;
    }
    if rest.degree().unwrap_or(0) > 0 {
        let deg = rest.degree().unwrap();
        out.push((rest, deg));
    }
    out
}

fn equal_degree(poly: &Poly, d: usize, f: &Field, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = poly.degree().unwrap();
    if n == d {
        return vec![poly.clone()];
    }
    let p = f.characteristic();
    loop {
        let a = Poly::new((0..n).map(|_| Scalar::Fp(rng.gen_range(0..p))).collect(), f);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(poly, f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t, f).rem(poly, f);
                acc = acc.add(&t, f);
            }
            acc
        } else {
            let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
            a.pow_mod(&e, poly, f).sub(&Poly::one(f), f)
        };
        let g = b.gcd(poly, f);
        let dg = g.degree().unwrap_or(0);
        if dg > 0 && dg < n {
            let mut out = equal_degree(&g, d, f, rng);
            out.extend(equal_degree(&poly.div(&g, f), d, f, rng));
            return out;
        }
    }
}

/// Irreducibility over a finite field (Rabin-style distinct-degree test).
pub fn is_irreducible_finite(poly: &Poly, f: &Field) -> bool {
    let Some(n) = poly.degree() else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let q = BigUint::from(f.size().expect("finite field"));
    let m = poly.monic(f);
    let x = Poly::x(f);
    let mut h = x.clone();
    for _ in 1..=n / 2 {
        h = h.pow_mod(&q, &m, f);
        if h.sub(&x, f).gcd(&m, f).degree() != Some(0) {
            return false;
        }
    }
    true
}

/// First monic irreducible polynomial of degree `k` over a finite field, in the order
/// of coefficient indices read as a base-`q` number (constant term least significant).
pub fn first_irreducible(f: &Field, k: usize) -> Poly {
    let q = f.size().expect("finite field") as u64;
    let total = q.checked_pow(k as u32).expect("search space fits u64");
    for idx in 0..total {
        let mut c = Vec::with_capacity(k + 1);
        let mut i = idx;
        for _ in 0..k {
            c.push(f.element_from_index(i % q));
            i /= q;
        }
        c.push(f.one());
        let cand = Poly::new(c, f);
        if is_irreducible_finite(&cand, f) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn fp(c: &[i64], p: u64) -> Poly {
        Poly::from_ints_in(c, &Field::Prime(p))
    }

    #[test]
    fn squarefree_examples() {
        let f = Field::Rational;
        assert_eq!(Poly::from_ints(&[1, -2, 1]).squarefree_part(&f).unwrap(), Poly::from_ints(&[-1, 1]));
        assert_eq!(Poly::from_ints(&[1, 0, 1]).squarefree_part(&f).unwrap(), Poly::from_ints(&[1, 0, 1]));
        assert_eq!(Poly::from_ints(&[0, 0, -1, 1]).squarefree_part(&f).unwrap(), Poly::from_ints(&[0, -1, 1]));
        assert!(Poly::zero().squarefree_part(&f).is_err());
    }

    #[test]
    fn factor_examples() {
        // roots of x^2+1 mod 5 are 2 and 3, found by direct evaluation
        let roots: Vec<u64> = (0..5).filter(|r| (r * r + 1) % 5 == 0).collect();
        assert_eq!(roots, vec![2, 3]);
        let fs = factor_mod_p(&fp(&[1, 0, 1], 5), 5).unwrap();
        assert_eq!(fs, vec![(fp(&[2, 1], 5), 1), (fp(&[3, 1], 5), 1)]);
        assert!((0..3).all(|r| (r * r + 1) % 3 != 0));
        assert_eq!(factor_mod_p(&fp(&[1, 0, 1], 3), 3).unwrap(), vec![(fp(&[1, 0, 1], 3), 1)]);
        assert_eq!(factor_mod_p(&fp(&[0, 1], 7), 7).unwrap(), vec![(fp(&[0, 1], 7), 1)]);
        assert!(factor_mod_p(&fp(&[0, 1], 7), 8).is_err());
    }

    #[test]
    fn factor_with_multiplicity_and_pth_powers() {
        // (x+1)^3 (x^2+x+1) over F_3 and x^4 + 1 = (x+1)^4 over F_2
        let f3 = Field::Prime(3);
        let a = fp(&[1, 1], 3);
        let b = fp(&[1, 1, 1], 3);
        let prod = a.mul(&a, &f3).mul(&a, &f3).mul(&b, &f3);
        let fs = factor_mod_p(&prod, 3).unwrap();
        // x^2+x+1 = (x-1)^2 over F_3
        assert_eq!(fs, vec![(fp(&[1, 1], 3), 3), (fp(&[2, 1], 3), 2)]);
        assert_eq!(factor_mod_p(&fp(&[1, 0, 0, 0, 1], 2), 2).unwrap(), vec![(fp(&[1, 1], 2), 4)]);
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&Poly::from_ints(&[1, 0, 1])).unwrap(), BigRational::from_integer((-4).into()));
        assert_eq!(discriminant(&Poly::from_ints(&[0, -1, 1])).unwrap(), BigRational::one());
        assert!(discriminant(&Poly::from_ints(&[1, -2, 1])).unwrap().is_zero());
        // x^3 - 2: -27 * 4 = -108
        assert_eq!(discriminant(&Poly::from_ints(&[-2, 0, 0, 1])).unwrap(), BigRational::from_integer((-108).into()));
    }

    #[test]
    fn irreducible_search() {
        let f2 = Field::Prime(2);
        assert_eq!(first_irreducible(&f2, 2), fp(&[1, 1, 1], 2));
        assert_eq!(first_irreducible(&f2, 3), fp(&[1, 1, 0, 1], 2));
        assert_eq!(first_irreducible(&Field::Prime(3), 2), fp(&[1, 0, 1], 3));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]
        #[test]
        fn factorization_remultiplies(pi in 0usize..8, coeffs in prop::collection::vec(0i64..97, 1..13)) {
            let p = [2u64, 3, 5, 7, 11, 13, 31, 97][pi];
            let f = Field::Prime(p);
            let mut c = coeffs.clone();
            c.push(1);
            let poly = fp(&c, p);
            let fs = factor_mod_p(&poly, p).unwrap();
            let mut prod = Poly::one(&f);
            for (g, m) in &fs {
                prop_assert!(is_irreducible_finite(g, &f));
                for _ in 0..*m {
                    prod = prod.mul(g, &f);
                }
            }
            prop_assert_eq!(prod, poly.monic(&f));
        }
    }
}
