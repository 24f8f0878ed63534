//! Congruence homomorphisms onto finite fields.
//!
//! Supported sources are `Q`, number fields `Q(a)`, and rational function fields over
//! `Q` or `F_q`. Maps are enumerated in a fixed order (smallest prime first, smallest
//! substitution point first) so a choice can be named by its position in that order.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::field::{Field, Scalar};
use crate::exact::int;
use crate::exact::mpoly::MPoly;
use crate::exact::poly::{self, Poly};
use crate::exact::{GeneratedGroup, Matrix};

/// Which property a map is selected for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    /// Selberg–Wehrfritz: torsion in the kernel has order a power of the characteristic.
    Sw,
    /// Wehrfritz: the kernel of a solvable-by-finite group is unipotent-by-abelian.
    W,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Phi1p,
    Phi2p,
    Phi3a,
    Phi3ap,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MapKind::Phi1p => "phi1p",
            MapKind::Phi2p => "phi2p",
            MapKind::Phi3a => "phi3a",
            MapKind::Phi3ap => "phi3ap",
        };
        write!(f, "{s}")
    }
}

/// What the generators' entries need inverted: `mu` for integer denominators and
/// `mu_poly` (function fields) for denominator polynomials. Inverses of generators are
/// included so that every congruence image consists of invertible matrices.
#[derive(Clone, Debug)]
pub struct RingOfDefinition {
    pub field: Field,
    pub n: usize,
    pub mu: BigInt,
    pub mu_poly: Option<MPoly>,
    pub minpoly: Option<Poly>,
    pub disc: Option<BigRational>,
    entries: Vec<Matrix>,
}

fn rational_denominator(s: &Scalar) -> BigInt {
    match s {
        Scalar::Rat(r) => r.denom().clone(),
        Scalar::Ext(c) => c.iter().fold(BigInt::one(), |acc, x| acc.lcm(&rational_denominator(x))),
        _ => BigInt::one(),
    }
}

pub fn ring_of_definition(g: &GeneratedGroup) -> Result<RingOfDefinition> {
    let field = g.field().clone();
    let entries = g.gens_and_inverses();
    let mut mu = BigInt::one();
    let mut mu_poly = None;
    let mut minpoly = None;
    let mut disc = None;
    match &field {
        Field::Rational => {
            for m in &entries {
                for x in m.entries() {
                    mu = mu.lcm(&rational_denominator(x));
                }
            }
        }
        Field::Extension(e) if e.base == Field::Rational => {
            for m in &entries {
                for x in m.entries() {
                    mu = mu.lcm(&rational_denominator(x));
                }
            }
            disc = Some(poly::discriminant(&e.modulus)?);
            minpoly = Some(e.modulus.clone());
        }
        Field::RatFunc(r) => {
            let supported = match &r.base {
                Field::Rational | Field::Prime(_) => true,
                Field::Extension(e) => matches!(e.base, Field::Prime(_)),
                Field::RatFunc(_) => false,
            };
            if !supported {
                return Err(Error::Unsupported(format!("function fields over {}", r.base)));
            }
            let k = r.nvars;
            let mut acc = MPoly::one(&r.base, k);
            for m in &entries {
                for x in m.entries() {
                    let (_, den) = r.parts(x);
                    let g = acc.gcd(den, &r.base, k);
                    acc = acc.mul(&den.div_exact(&g, &r.base, k).expect("gcd divides"), &r.base, k);
                }
            }
            mu_poly = Some(acc.monic(&r.base, k));
        }
        _ => return Err(Error::Unsupported(format!("congruence maps over {field}"))),
    }
    Ok(RingOfDefinition { field, n: g.degree(), mu, mu_poly, minpoly, disc, entries })
}

/// Serializable description of a map, enough to rebuild it exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapRecord {
    pub kind: MapKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub alpha: Vec<String>,
    /// Degree `c` of the substitution field `F_{q^c}` over `F_q` (char p substitution).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ext_degree: Option<usize>,
    /// The irreducible factor of the reduced minimal polynomial (number fields).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub factor: Option<Vec<u64>>,
    pub target: String,
    pub is_sw: bool,
    pub is_w: bool,
}

#[derive(Clone, Debug)]
pub struct CongruenceMap {
    pub kind: MapKind,
    pub p: Option<u64>,
    /// Substitution point: rationals in characteristic 0, elements of `target` in char p.
    pub alpha: Vec<Scalar>,
    pub ext_degree: Option<usize>,
    pub factor: Option<Poly>,
    pub source: Field,
    pub target: Field,
    pub is_sw: bool,
    pub is_w: bool,
}

impl CongruenceMap {
    pub fn characteristic(&self) -> u64 {
        self.target.characteristic()
    }

    pub fn reduce_scalar(&self, a: &Scalar) -> Result<Scalar> {
        let bad = || Error::NotInvertible(format!("entry not defined under {}", self.describe()));
        match (&self.source, self.kind) {
            (Field::Rational, MapKind::Phi1p) => {
                let r = a.as_rational().ok_or_else(bad)?;
                self.target.from_rational(r).map_err(|_| bad())
            }
            (Field::Extension(e), MapKind::Phi2p) => {
                let abar = match &self.target {
                    Field::Prime(_) => {
                        let f = self.factor.as_ref().unwrap();
                        self.target.neg(&f.coeffs()[0])
                    }
                    t => t.generator(1)?,
                };
                let fp = Field::Prime(self.p.unwrap());
                let coeffs = match a {
                    Scalar::Ext(c) => c,
                    _ => return Err(bad()),
                };
                let mut acc = self.target.zero();
                for c in coeffs.iter().rev() {
                    let r = c.as_rational().ok_or_else(bad)?;
                    let cbar = fp.from_rational(r).map_err(|_| bad())?;
                    acc = self.target.add(&self.target.mul(&acc, &abar), &self.target.lift_base(&cbar));
                }
                let _ = e;
                Ok(acc)
            }
            (Field::RatFunc(r), MapKind::Phi3ap) => {
                let (num, den) = r.parts(a);
                let id = |s: &Scalar| s.clone();
                let q = Field::Rational;
                let nv = num.eval_into(r.nvars, &q, &id, &self.alpha);
                let dv = den.eval_into(r.nvars, &q, &id, &self.alpha);
                let v = q.div(&nv, &dv).map_err(|_| bad())?;
                self.target.from_rational(v.as_rational().unwrap()).map_err(|_| bad())
            }
            (Field::RatFunc(r), MapKind::Phi3a) => {
                let (num, den) = r.parts(a);
                let t = &self.target;
                let lift = |s: &Scalar| if *t == r.base { s.clone() } else { t.lift_base(s) };
                let nv = num.eval_into(r.nvars, t, &lift, &self.alpha);
                let dv = den.eval_into(r.nvars, t, &lift, &self.alpha);
                t.div(&nv, &dv).map_err(|_| bad())
            }
            _ => Err(Error::InvalidInput("map does not apply to this field".into())),
        }
    }

    pub fn reduce(&self, x: &Matrix) -> Result<Matrix> {
        x.try_map(|a| self.reduce_scalar(a))
    }

    pub fn describe(&self) -> String {
        let mut s = self.kind.to_string();
        if let Some(p) = self.p {
            s += &format!(" p={p}");
        }
        if !self.alpha.is_empty() {
            let src = if self.kind == MapKind::Phi3ap { Field::Rational } else { self.target.clone() };
            let pts: Vec<String> = self.alpha.iter().map(|a| src.fmt_scalar(a)).collect();
            s += &format!(" alpha=({})", pts.join(", "));
        }
        if let Some(f) = &self.factor {
            s += &format!(" factor={}", f.display(&Field::Prime(self.p.unwrap()), "t"));
        }
        s + &format!(" target={}", self.target)
    }

    pub fn record(&self) -> MapRecord {
        let src = if self.kind == MapKind::Phi3ap { Field::Rational } else { self.target.clone() };
        MapRecord {
            kind: self.kind,
            p: self.p,
            alpha: self.alpha.iter().map(|a| src.fmt_scalar(a)).collect(),
            ext_degree: self.ext_degree,
            factor: self
                .factor
                .as_ref()
                .map(|f| f.coeffs().iter().map(|c| Field::Prime(self.p.unwrap()).element_index(c)).collect()),
            target: self.target.to_string(),
            is_sw: self.is_sw,
            is_w: self.is_w,
        }
    }

    /// Rebuilds a recorded map and re-checks that it applies to `r`.
    pub fn from_record(r: &RingOfDefinition, rec: &MapRecord) -> Result<CongruenceMap> {
        let source = r.field.clone();
        let map = match rec.kind {
            MapKind::Phi1p => {
                let p = rec.p.ok_or_else(|| Error::Parse("missing prime".into()))?;
                prime_map(r, p)?
            }
            MapKind::Phi2p => {
                let p = rec.p.ok_or_else(|| Error::Parse("missing prime".into()))?;
                let fp = Field::prime(p)?;
                let fac = rec.factor.as_ref().ok_or_else(|| Error::Parse("missing factor".into()))?;
                let factor = Poly::new(fac.iter().map(|&c| Scalar::Fp(c % p)).collect(), &fp);
                let target = if factor.degree() == Some(1) {
                    fp
                } else {
                    Field::extension(fp, factor.clone(), "b")?
                };
                CongruenceMap {
                    kind: MapKind::Phi2p,
                    p: Some(p),
                    alpha: vec![],
                    ext_degree: None,
                    factor: Some(factor),
                    source,
                    target,
                    is_sw: false,
                    is_w: false,
                }
            }
            MapKind::Phi3ap => {
                let p = rec.p.ok_or_else(|| Error::Parse("missing prime".into()))?;
                let alpha = rec
                    .alpha
                    .iter()
                    .map(|s| Field::Rational.parse_scalar(s))
                    .collect::<Result<Vec<_>>>()?;
                CongruenceMap {
                    kind: MapKind::Phi3ap,
                    p: Some(p),
                    alpha,
                    ext_degree: None,
                    factor: None,
                    source,
                    target: Field::prime(p)?,
                    is_sw: false,
                    is_w: false,
                }
            }
            MapKind::Phi3a => {
                let Field::RatFunc(rf) = &source else {
                    return Err(Error::InvalidInput("substitution map needs a function field".into()));
                };
                let c = rec.ext_degree.unwrap_or(1);
                let target = substitution_field(&rf.base, c)?;
                let alpha = rec.alpha.iter().map(|s| target.parse_scalar(s)).collect::<Result<Vec<_>>>()?;
                CongruenceMap {
                    kind: MapKind::Phi3a,
                    p: None,
                    alpha,
                    ext_degree: Some(c),
                    factor: None,
                    source,
                    target,
                    is_sw: false,
                    is_w: false,
                }
            }
        };
        let mut map = map;
        map.is_sw = certify(r, &map, Purpose::Sw)?;
        map.is_w = certify(r, &map, Purpose::W)?;
        // the recorded map must still be a ring map on every generator
        for m in &r.entries {
            map.reduce(m)?;
        }
        Ok(map)
    }
}

/// `F_{q^c}` as an extension of the function field's base (or the base itself for `c = 1`).
fn substitution_field(base: &Field, c: usize) -> Result<Field> {
    if c == 1 {
        return Ok(base.clone());
    }
    let h = poly::first_irreducible(base, c);
    Field::extension(base.clone(), h, "b")
}

fn prime_map(r: &RingOfDefinition, p: u64) -> Result<CongruenceMap> {
    Ok(CongruenceMap {
        kind: MapKind::Phi1p,
        p: Some(p),
        alpha: vec![],
        ext_degree: None,
        factor: None,
        source: r.field.clone(),
        target: Field::prime(p)?,
        is_sw: false,
        is_w: false,
    })
}

fn number_field_map(r: &RingOfDefinition, p: u64) -> Result<CongruenceMap> {
    let fp = Field::prime(p)?;
    let f = r.minpoly.as_ref().unwrap();
    let fbar = f.map(&fp, |c| fp.from_rational(c.as_rational().unwrap()).expect("integral minimal polynomial"));
    let factors = poly::factor_mod_p(&fbar, p)?;
    let factor = factors[0].0.clone();
    let target = if factor.degree() == Some(1) { fp } else { Field::extension(fp, factor.clone(), "b")? };
    Ok(CongruenceMap {
        kind: MapKind::Phi2p,
        p: Some(p),
        alpha: vec![],
        ext_degree: None,
        factor: Some(factor),
        source: r.field.clone(),
        target,
        is_sw: false,
        is_w: false,
    })
}

/// Checks the sufficient admissibility conditions for `purpose`.
fn certify(r: &RingOfDefinition, m: &CongruenceMap, purpose: Purpose) -> Result<bool> {
    let n = r.n as u64;
    let odd_coprime = |p: u64| p % 2 == 1 && !(&r.mu % BigInt::from(p)).is_zero();
    Ok(match m.kind {
        MapKind::Phi1p => odd_coprime(m.p.unwrap()),
        MapKind::Phi2p => {
            let p = m.p.unwrap();
            let k = r.minpoly.as_ref().unwrap().degree().unwrap() as u64;
            let disc = r.disc.as_ref().unwrap();
            let coprime_disc = !(disc.numer() % BigInt::from(p)).is_zero();
            let bound = match purpose {
                Purpose::Sw => n * k + 1,
                Purpose::W => n,
            };
            odd_coprime(p) && (p > bound || coprime_disc)
        }
        MapKind::Phi3ap => {
            let p = m.p.unwrap();
            let subst_mu = substituted_mu(r, &m.alpha)?;
            let ok = p % 2 == 1 && subst_mu.is_some_and(|mu| !(mu % BigInt::from(p)).is_zero());
            match purpose {
                Purpose::Sw => ok,
                // prime characteristic above n makes the kernel condition unconditional
                Purpose::W => ok && p > n,
            }
        }
        MapKind::Phi3a => {
            let defined = mu_nonzero_at(r, &m.target, &m.alpha);
            match purpose {
                Purpose::Sw => defined,
                Purpose::W => defined && m.characteristic() > n,
            }
        }
    })
}

/// Integer `mu` of the generators after substituting the rational point (`None` if the
/// point is a root of a denominator).
fn substituted_mu(r: &RingOfDefinition, alpha: &[Scalar]) -> Result<Option<BigInt>> {
    let Field::RatFunc(rf) = &r.field else { unreachable!() };
    let q = Field::Rational;
    let id = |s: &Scalar| s.clone();
    let mut mu = BigInt::one();
    for m in &r.entries {
        for x in m.entries() {
            let (num, den) = rf.parts(x);
            let dv = den.eval_into(rf.nvars, &q, &id, alpha);
            if q.is_zero(&dv) {
                return Ok(None);
            }
            let nv = num.eval_into(rf.nvars, &q, &id, alpha);
            let v = q.div(&nv, &dv)?;
            mu = mu.lcm(v.as_rational().unwrap().denom());
        }
    }
    Ok(Some(mu))
}

fn mu_nonzero_at(r: &RingOfDefinition, target: &Field, alpha: &[Scalar]) -> bool {
    let Field::RatFunc(rf) = &r.field else { return false };
    let mu = r.mu_poly.as_ref().unwrap();
    let lift = |s: &Scalar| if *target == rf.base { s.clone() } else { target.lift_base(s) };
    !target.is_zero(&mu.eval_into(rf.nvars, target, &lift, alpha))
}

/// Nonnegative integer tuples of length `m`, by increasing sum then lexicographically.
fn integer_points(m: usize) -> impl Iterator<Item = Vec<i64>> {
    (0i64..).flat_map(move |s| {
        let mut out = Vec::new();
        compositions(s, m, &mut Vec::new(), &mut out);
        out
    })
}

fn compositions(s: i64, m: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if m == 1 {
        cur.push(s);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for first in 0..=s {
        cur.push(first);
        compositions(s - first, m - 1, cur, out);
        cur.pop();
    }
}

const MAX_CANDIDATES: usize = 100_000;

/// The admissible maps for `purpose` in selection order.
pub fn admissible_maps(r: &RingOfDefinition, purpose: Purpose) -> Result<Box<dyn Iterator<Item = CongruenceMap> + '_>> {
    match &r.field {
        Field::Rational => Ok(Box::new(odd_primes().filter_map(move |p| {
            let mut m = prime_map(r, p).ok()?;
            m.is_sw = certify(r, &m, Purpose::Sw).ok()?;
            m.is_w = certify(r, &m, Purpose::W).ok()?;
            (if purpose == Purpose::Sw { m.is_sw } else { m.is_w }).then_some(m)
        }))),
        Field::Extension(_) => Ok(Box::new(odd_primes().filter_map(move |p| {
            if (&r.mu % BigInt::from(p)).is_zero() {
                return None;
            }
            let mut m = number_field_map(r, p).ok()?;
            m.is_sw = certify(r, &m, Purpose::Sw).ok()?;
            m.is_w = certify(r, &m, Purpose::W).ok()?;
            (if purpose == Purpose::Sw { m.is_sw } else { m.is_w }).then_some(m)
        }))),
        Field::RatFunc(rf) if rf.base.characteristic() == 0 => {
            if rf.base != Field::Rational {
                return Err(Error::Unsupported("function fields over number fields".into()));
            }
            let nvars = rf.nvars;
            let point = integer_points(nvars)
                .take(MAX_CANDIDATES)
                .map(|v| v.into_iter().map(Scalar::int).collect::<Vec<_>>())
                .find(|a| matches!(substituted_mu(r, a), Ok(Some(_))))
                .ok_or_else(|| Error::NoAdmissibleMap("no integer point avoids the denominators".into()))?;
            Ok(Box::new(odd_primes().filter_map(move |p| {
                let mut m = CongruenceMap {
                    kind: MapKind::Phi3ap,
                    p: Some(p),
                    alpha: point.clone(),
                    ext_degree: None,
                    factor: None,
                    source: r.field.clone(),
                    target: Field::prime(p).ok()?,
                    is_sw: false,
                    is_w: false,
                };
                m.is_sw = certify(r, &m, Purpose::Sw).ok()?;
                m.is_w = certify(r, &m, Purpose::W).ok()?;
                (if purpose == Purpose::Sw { m.is_sw } else { m.is_w }).then_some(m)
            })))
        }
        Field::RatFunc(rf) => {
            let p = rf.base.characteristic();
            if purpose == Purpose::W && p <= r.n as u64 {
                return Err(Error::NoAdmissibleMap(format!(
                    "characteristic {p} does not exceed the degree {} and there is no reduction from characteristic 0",
                    r.n
                )));
            }
            let nvars = rf.nvars;
            let base = rf.base.clone();
            let iter = (1usize..=8).flat_map(move |c| {
                let target = substitution_field(&base, c).expect("finite extension");
                let q = target.size().unwrap();
                let count = q.checked_pow(nvars as u32).unwrap_or(u128::MAX).min(MAX_CANDIDATES as u128) as u64;
                (0..count).map(move |idx| {
                    let mut i = idx;
                    let mut pt = Vec::with_capacity(nvars);
                    for _ in 0..nvars {
                        pt.push(target.element_from_index((i as u128 % q) as u64));
                        i = (i as u128 / q) as u64;
                    }
                    (c, target.clone(), pt)
                })
            });
            Ok(Box::new(iter.filter_map(move |(c, target, alpha)| {
                // a point already available in a smaller field is not new
                if c > 1 && alpha.iter().all(|a| in_base(&target, a)) {
                    return None;
                }
                let mut m = CongruenceMap {
                    kind: MapKind::Phi3a,
                    p: None,
                    alpha,
                    ext_degree: Some(c),
                    factor: None,
                    source: r.field.clone(),
                    target,
                    is_sw: false,
                    is_w: false,
                };
                m.is_sw = certify(r, &m, Purpose::Sw).ok()?;
                m.is_w = certify(r, &m, Purpose::W).ok()?;
                (if purpose == Purpose::Sw { m.is_sw } else { m.is_w }).then_some(m)
            })))
        }
        _ => Err(Error::Unsupported(format!("congruence maps over {}", r.field))),
    }
}

fn in_base(target: &Field, a: &Scalar) -> bool {
    match (target, a) {
        (Field::Extension(e), Scalar::Ext(c)) => c[1..].iter().all(|x| e.base.is_zero(x)),
        _ => true,
    }
}

fn odd_primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|&p| int::is_prime(p))
}

fn select(r: &RingOfDefinition, purpose: Purpose, avoid: &[u64], skip: usize) -> Result<CongruenceMap> {
    admissible_maps(r, purpose)?
        .filter(|m| m.p.map_or(true, |p| !avoid.contains(&p)))
        .nth(skip)
        .ok_or_else(|| Error::NoAdmissibleMap("candidate search exhausted".into()))
}

/// Smallest admissible SW map whose prime is not in `avoid`.
pub fn select_sw_map(r: &RingOfDefinition, avoid: &[u64]) -> Result<CongruenceMap> {
    select(r, Purpose::Sw, avoid, 0)
}

pub fn select_w_map(r: &RingOfDefinition, avoid: &[u64]) -> Result<CongruenceMap> {
    select(r, Purpose::W, avoid, 0)
}

/// The `skip`-th admissible map (0 = the default choice).
pub fn nth_map(r: &RingOfDefinition, purpose: Purpose, skip: usize) -> Result<CongruenceMap> {
    select(r, purpose, &[], skip)
}

/// Image of every generator (and its inverse) under `m`.
pub fn reduce_generators(g: &GeneratedGroup, m: &CongruenceMap) -> Result<Vec<Matrix>> {
    g.gens().iter().map(|x| m.reduce(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::Poly;

    fn qgroup(gens: &[Vec<Vec<&str>>]) -> GeneratedGroup {
        let f = Field::Rational;
        let ms = gens
            .iter()
            .map(|g| {
                Matrix::from_rows(g.iter().map(|r| r.iter().map(|s| f.parse_scalar(s).unwrap()).collect()).collect())
                    .unwrap()
            })
            .collect();
        GeneratedGroup::new(f, gens[0].len(), ms).unwrap()
    }

    #[test]
    fn mu_examples() {
        let g = qgroup(&[vec![vec!["1/2", "0"], vec!["0", "2"]]]);
        assert_eq!(ring_of_definition(&g).unwrap().mu, BigInt::from(2));
        let g = qgroup(&[vec![vec!["1", "1"], vec!["0", "1"]]]);
        assert_eq!(ring_of_definition(&g).unwrap().mu, BigInt::from(1));
        let g = qgroup(&[vec![vec!["1/6", "1"], vec!["0", "6"]], vec![vec!["1/4", "0"], vec!["0", "4"]]]);
        assert_eq!(ring_of_definition(&g).unwrap().mu, BigInt::from(12));
    }

    #[test]
    fn prime_selection() {
        let g = qgroup(&[vec![vec!["1/6", "0"], vec!["0", "6"]]]);
        let r = ring_of_definition(&g).unwrap();
        assert_eq!(select_sw_map(&r, &[]).unwrap().p, Some(5));
        let g = qgroup(&[vec![vec!["1", "1"], vec!["0", "1"]]]);
        let r = ring_of_definition(&g).unwrap();
        assert_eq!(select_sw_map(&r, &[]).unwrap().p, Some(3));
        assert_eq!(select_sw_map(&r, &[3]).unwrap().p, Some(5));
        assert_eq!(select_w_map(&r, &[]).unwrap().p, Some(3));
    }

    #[test]
    fn gaussian_integers() {
        let k = Field::number_field(Poly::from_ints(&[1, 0, 1])).unwrap();
        let i = k.generator(1).unwrap();
        let g = GeneratedGroup::new(
            k.clone(),
            2,
            vec![Matrix::diagonal(&[i.clone(), k.neg(&i)], &k)],
        )
        .unwrap();
        let r = ring_of_definition(&g).unwrap();
        let m = select_sw_map(&r, &[]).unwrap();
        assert_eq!(m.p, Some(3));
        assert_eq!(m.target.size(), Some(9));
        let g4 = GeneratedGroup::new(k.clone(), 4, vec![Matrix::identity(4, &k)]).unwrap();
        let m = select_w_map(&ring_of_definition(&g4).unwrap(), &[]).unwrap();
        assert_eq!(m.p, Some(3));
        // mod 5 the factor x+2 comes first, so i maps to 3
        let m5 = select_sw_map(&r, &[3]).unwrap();
        assert_eq!(m5.p, Some(5));
        assert_eq!(m5.reduce_scalar(&i).unwrap(), Scalar::Fp(3));
    }

    #[test]
    fn reduction_examples() {
        let g = qgroup(&[vec![vec!["1/2", "0"], vec!["0", "2"]]]);
        let r = ring_of_definition(&g).unwrap();
        let m = select_sw_map(&r, &[3]).unwrap();
        assert_eq!(m.p, Some(5));
        let img = m.reduce(&g.gens()[0]).unwrap();
        assert_eq!(img, Matrix::from_flat(2, vec![Scalar::Fp(3), Scalar::Fp(0), Scalar::Fp(0), Scalar::Fp(2)]));
        let bad = qgroup(&[vec![vec!["1/5", "0"], vec!["0", "5"]]]);
        assert!(m.reduce(&bad.gens()[0]).is_err());
    }

    #[test]
    fn substitution_over_q() {
        let f = Field::rational_functions(Field::Rational, 1).unwrap();
        let x = f.generator(1).unwrap();
        let t = Matrix::from_flat(2, vec![f.one(), x.clone(), f.zero(), f.one()]);
        let g = GeneratedGroup::new(f.clone(), 2, vec![t.clone()]).unwrap();
        let r = ring_of_definition(&g).unwrap();
        let m = select_sw_map(&r, &[]).unwrap();
        assert_eq!(m.kind, MapKind::Phi3ap);
        assert_eq!(m.alpha, vec![Scalar::int(0)]);
        // with x in a denominator the point 0 is skipped
        let d = Matrix::diagonal(&[x.clone(), f.one()], &f);
        let g = GeneratedGroup::new(f.clone(), 2, vec![d]).unwrap();
        let m = select_sw_map(&ring_of_definition(&g).unwrap(), &[]).unwrap();
        assert_eq!(m.alpha, vec![Scalar::int(1)]);
    }

    #[test]
    fn function_fields_positive_characteristic() {
        let f2x = Field::rational_functions(Field::Prime(2), 1).unwrap();
        let x = f2x.generator(1).unwrap();
        let g = GeneratedGroup::new(
            f2x.clone(),
            2,
            vec![Matrix::diagonal(&[f2x.one(), x.clone()], &f2x), Matrix::transvection(2, 0, 1, &f2x.one(), &f2x)],
        )
        .unwrap();
        let r = ring_of_definition(&g).unwrap();
        let m = select_sw_map(&r, &[]).unwrap();
        assert_eq!(m.kind, MapKind::Phi3a);
        assert_eq!(m.alpha, vec![Scalar::Fp(1)]);
        assert!(matches!(select_w_map(&r, &[]), Err(Error::NoAdmissibleMap(_))));
        // x(x+1) has every element of F_2 as a root, so the point moves to F_4
        let y = f2x.add(&x, &f2x.one());
        let g = GeneratedGroup::new(f2x.clone(), 1, vec![Matrix::diagonal(&[f2x.mul(&x, &y)], &f2x)]).unwrap();
        let m = select_sw_map(&ring_of_definition(&g).unwrap(), &[]).unwrap();
        assert_eq!(m.ext_degree, Some(2));
        assert_eq!(m.target.size(), Some(4));
    }

    #[test]
    fn record_round_trip() {
        let k = Field::number_field(Poly::from_ints(&[1, 0, 1])).unwrap();
        let g = GeneratedGroup::new(k.clone(), 2, vec![Matrix::identity(2, &k)]).unwrap();
        let r = ring_of_definition(&g).unwrap();
        for skip in 0..3 {
            let m = nth_map(&r, Purpose::Sw, skip).unwrap();
            let back = CongruenceMap::from_record(&r, &m.record()).unwrap();
            assert_eq!(back.record(), m.record());
        }
    }
}
