//! Small finite rings with `u32` elements: `F_p`, `Z_m` and `F_q` via log tables.

use crate::error::{Error, Result};
use crate::exact::field::{Field, Scalar};
use crate::exact::int;

/// Largest field handled through log/exp tables.
const MAX_TABLE_FIELD: u64 = 1 << 20;

#[derive(Clone, Debug)]
pub struct GfTables {
    p: u32,
    q: u32,
    log: Vec<u32>,
    exp: Vec<u32>,
}

/// A finite commutative ring. Elements are indices in `0..size`, `0` is zero and `1` is one.
#[derive(Clone, Debug)]
pub enum FiniteRing {
    Prime(u32),
    Zm(u32),
    Gf(Box<GfTables>),
}

impl PartialEq for FiniteRing {
    fn eq(&self, o: &Self) -> bool {
        match (self, o) {
            (FiniteRing::Prime(a), FiniteRing::Prime(b)) | (FiniteRing::Zm(a), FiniteRing::Zm(b)) => a == b,
            (FiniteRing::Gf(a), FiniteRing::Gf(b)) => a.q == b.q && a.exp == b.exp,
            _ => false,
        }
    }
}

impl FiniteRing {
    /// Residues modulo `m >= 2`; primes get the field variant.
    pub fn residues(m: u64) -> Result<FiniteRing> {
        if m < 2 || m >= 1 << 31 {
            return Err(Error::InvalidInput(format!("modulus {m} out of range")));
        }
        Ok(if int::is_prime(m) { FiniteRing::Prime(m as u32) } else { FiniteRing::Zm(m as u32) })
    }

    /// Table representation of a finite [`Field`]; indices follow `Field::element_index`.
    pub fn from_field(f: &Field) -> Result<FiniteRing> {
        let q = f.size().ok_or_else(|| Error::InvalidInput("field is not finite".into()))?;
        let p = f.characteristic();
        if q == p as u128 {
            return FiniteRing::residues(p);
        }
        if q > MAX_TABLE_FIELD as u128 {
            return Err(Error::Unsupported(format!("finite field of size {q} is too large")));
        }
        let q = q as u32;
        let one = f.one();
        for cand in 2..q {
            let g = f.element_from_index(cand as u64);
            let mut exp = Vec::with_capacity(2 * q as usize);
            let mut x = one.clone();
            let mut full = true;
            for i in 0..q - 1 {
                if i > 0 && f.is_one(&x) {
                    full = false;
                    break;
                }
                exp.push(f.element_index(&x) as u32);
                x = f.mul(&x, &g);
            }
            if !full {
                continue;
            }
            let mut log = vec![0u32; q as usize];
            for (i, &e) in exp.iter().enumerate() {
                log[e as usize] = i as u32;
            }
            let again = exp.clone();
            exp.extend(again);
            return Ok(FiniteRing::Gf(Box::new(GfTables { p: p as u32, q, log, exp })));
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }

    pub fn size(&self) -> u32 {
        match self {
            FiniteRing::Prime(p) | FiniteRing::Zm(p) => *p,
            FiniteRing::Gf(t) => t.q,
        }
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            FiniteRing::Prime(p) | FiniteRing::Zm(p) => *p,
            FiniteRing::Gf(t) => t.p,
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, FiniteRing::Zm(_))
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match self {
            FiniteRing::Prime(m) | FiniteRing::Zm(m) => {
                let s = a as u64 + b as u64;
                (if s >= *m as u64 { s - *m as u64 } else { s }) as u32
            }
            FiniteRing::Gf(t) => {
                if t.p == 2 {
                    return a ^ b;
                }
                let (mut a, mut b, mut r, mut w) = (a, b, 0u32, 1u32);
                while a > 0 || b > 0 {
                    r += ((a % t.p + b % t.p) % t.p) * w;
                    a /= t.p;
                    b /= t.p;
                    w *= t.p;
                }
                r
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        match self {
            FiniteRing::Prime(m) | FiniteRing::Zm(m) => {
                if a == 0 {
                    0
                } else {
                    m - a
                }
            }
            FiniteRing::Gf(t) => {
                if t.p == 2 {
                    return a;
                }
                let (mut a, mut r, mut w) = (a, 0u32, 1u32);
                while a > 0 {
                    r += ((t.p - a % t.p) % t.p) * w;
                    a /= t.p;
                    w *= t.p;
                }
                r
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match self {
            FiniteRing::Prime(m) | FiniteRing::Zm(m) => ((a as u64 * b as u64) % *m as u64) as u32,
            FiniteRing::Gf(t) => {
                if a == 0 || b == 0 {
                    0
                } else {
                    t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
                }
            }
        }
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        match self {
            FiniteRing::Prime(m) | FiniteRing::Zm(m) => int::inv_mod(a as u64, *m as u64).map(|x| x as u32),
            FiniteRing::Gf(t) => {
                if a == 0 {
                    None
                } else {
                    Some(t.exp[((t.q - 1 - t.log[a as usize]) % (t.q - 1)) as usize])
                }
            }
        }
    }

    pub fn is_unit(&self, a: u32) -> bool {
        self.inv(a).is_some()
    }

    /// Image of an integer; prime-subfield elements have index equal to their value.
    pub fn from_i64(&self, x: i64) -> u32 {
        x.rem_euclid(self.characteristic() as i64) as u32
    }

    /// Element index of a scalar of the matching [`Field`].
    pub fn from_scalar(&self, f: &Field, s: &Scalar) -> u32 {
        f.element_index(s) as u32
    }

    pub fn describe(&self) -> String {
        match self {
            FiniteRing::Prime(p) => format!("F{p}"),
            FiniteRing::Zm(m) => format!("Z{m}"),
            FiniteRing::Gf(t) => format!("F{}", t.q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::first_irreducible;

    #[test]
    fn table_field_agrees_with_exact_field() {
        for (p, k) in [(2u64, 3usize), (3, 2), (5, 2), (2, 4)] {
            let fp = Field::Prime(p);
            let f = Field::extension(fp.clone(), first_irreducible(&fp, k), "a").unwrap();
            let r = FiniteRing::from_field(&f).unwrap();
            let q = r.size();
            for a in 0..q {
                let sa = f.element_from_index(a as u64);
                for b in 0..q {
                    let sb = f.element_from_index(b as u64);
                    assert_eq!(r.add(a, b) as u64, f.element_index(&f.add(&sa, &sb)));
                    assert_eq!(r.mul(a, b) as u64, f.element_index(&f.mul(&sa, &sb)));
                }
                if a != 0 {
                    assert_eq!(r.mul(a, r.inv(a).unwrap()), 1);
                }
                assert_eq!(r.add(a, r.neg(a)), 0);
            }
        }
    }

    #[test]
    fn residues() {
        let z = FiniteRing::residues(12).unwrap();
        assert!(!z.is_field());
        assert_eq!(z.inv(5), Some(5));
        assert_eq!(z.inv(4), None);
        assert_eq!(z.from_i64(-1), 11);
    }
}
