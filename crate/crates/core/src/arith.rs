//! Subgroups of `Γ_n = SL(n, Z)` or `Sp(n, Z)` for `n > 2`: elementary generators,
//! congruence levels, the `(level, image mod level)` description of arithmetic groups,
//! density, and the orbit problem for integer vectors.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use crate::algebra::spin;
use crate::error::{Error, Result};
use crate::exact::linalg::{nullspace, solve};
use crate::exact::{int, Field, GeneratedGroup, Matrix, Scalar};
use crate::finite::chain::{Chain, ChainOpts};
use crate::finite::image::{normal_closure, normalizer};
use crate::finite::{FMat, FiniteRing};
use crate::structure::{is_finite, Config};

/// Default bound on the product of orbit sizes for chains over `Z_m`.
pub const DEFAULT_LATTICE_CAP: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Sl,
    Sp,
}

/// `SL(n, Z)` or `Sp(n, Z)`; the symplectic form is `J = ((0, 1_s), (-1_s, 0))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeFamily {
    pub kind: FamilyKind,
    pub n: usize,
}

fn q() -> Field {
    Field::Rational
}

fn zint(x: &BigInt) -> Scalar {
    Scalar::Rat(BigRational::from(x.clone()))
}

fn as_int(s: &Scalar) -> Option<BigInt> {
    s.as_rational().filter(|r| r.is_integer()).map(|r| r.to_integer())
}

fn to_scalars(u: &[BigInt]) -> Vec<Scalar> {
    u.iter().map(zint).collect()
}

fn from_scalars(v: &[Scalar]) -> Vec<BigInt> {
    v.iter().map(|s| as_int(s).expect("integral vector")).collect()
}

/// `x · u` for an integral matrix `x`.
pub fn apply(x: &Matrix, u: &[BigInt]) -> Vec<BigInt> {
    from_scalars(&x.mul_vec(&to_scalars(u), &q()))
}

fn t(n: usize, i: usize, j: usize, c: &BigInt) -> Matrix {
    Matrix::transvection(n, i, j, &zint(c), &q())
}

/// Integer matrix from rows.
pub fn int_matrix(rows: &[Vec<i64>]) -> Matrix {
    Matrix::from_ints(rows, &q())
}

impl LatticeFamily {
    pub fn sl(n: usize) -> Result<LatticeFamily> {
        if n <= 2 {
            return Err(Error::InvalidInput(format!("SL({n}, Z) needs n > 2")));
        }
        Ok(LatticeFamily { kind: FamilyKind::Sl, n })
    }

    pub fn sp(n: usize) -> Result<LatticeFamily> {
        if n <= 2 || n % 2 == 1 {
            return Err(Error::InvalidInput(format!("Sp({n}, Z) needs even n > 2")));
        }
        Ok(LatticeFamily { kind: FamilyKind::Sp, n })
    }

    pub fn parse(name: &str, n: usize) -> Result<LatticeFamily> {
        match name.to_ascii_lowercase().as_str() {
            "sl" => LatticeFamily::sl(n),
            "sp" => LatticeFamily::sp(n),
            _ => Err(Error::InvalidInput(format!("unknown family {name:?} (expected SL or Sp)"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Sl => "SL",
            FamilyKind::Sp => "Sp",
        }
    }

    pub fn form(&self) -> Matrix {
        let s = self.n / 2;
        let mut j = Matrix::zero(self.n, &q());
        for i in 0..s {
            j.set(i, s + i, Scalar::int(1));
            j.set(s + i, i, Scalar::int(-1));
        }
        j
    }

    /// Checks `x ∈ Γ_n`.
    pub fn check(&self, x: &Matrix) -> Result<()> {
        let f = q();
        if x.n() != self.n {
            return Err(Error::InvalidInput(format!("expected a {0}x{0} matrix", self.n)));
        }
        if x.entries().iter().any(|e| as_int(e).is_none()) {
            return Err(Error::InvalidInput("matrix entries must be integers".into()));
        }
        if !f.is_one(&x.det(&f)) {
            return Err(Error::InvalidInput("matrix does not have determinant 1".into()));
        }
        if self.kind == FamilyKind::Sp {
            let j = self.form();
            if x.mul(&j, &f).mul(&x.transpose(), &f) != j {
                return Err(Error::InvalidInput("matrix does not preserve the symplectic form".into()));
            }
        }
        Ok(())
    }

    /// Basis of the Lie algebra: trace-zero matrices, or `X` with `XJ + JXᵀ = 0`.
    pub fn lie_algebra_basis(&self) -> Vec<Matrix> {
        let f = q();
        let n = self.n;
        let unit = |i: usize, j: usize| {
            let mut m = Matrix::zero(n, &f);
            m.set(i, j, f.one());
            m
        };
        match self.kind {
            FamilyKind::Sl => {
                let mut out = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            out.push(unit(i, j));
                        }
                    }
                }
                for i in 0..n - 1 {
                    out.push(unit(i, i).sub(&unit(n - 1, n - 1), &f));
                }
                out
            }
            FamilyKind::Sp => {
                let j = self.form();
                let mut rows = Vec::with_capacity(n * n);
                for r in 0..n {
                    for c in 0..n {
                        let mut row = vec![f.zero(); n * n];
                        for b in 0..n {
                            row[r * n + b] = f.add(&row[r * n + b], j.get(b, c));
                            row[c * n + b] = f.add(&row[c * n + b], j.get(r, b));
                        }
                        rows.push(row);
                    }
                }
                nullspace(&rows, n * n, &f).into_iter().map(|v| Matrix::from_flat(n, v)).collect()
            }
        }
    }
}

/// `E_{n,m}`: `t_ij(m)` for SL; for Sp with `n = 2s` the products
/// `t_{i,s+j}(m) t_{j,s+i}(m)`, `t_{s+i,j}(m) t_{s+j,i}(m)` (`i < j`) and the
/// `t_{i,s+i}(m)`, `t_{s+i,i}(m)`.
pub fn elementary_generators(f: &LatticeFamily, m: u64) -> Vec<Matrix> {
    let n = f.n;
    let qf = q();
    let m = BigInt::from(m);
    let mut out = Vec::new();
    match f.kind {
        FamilyKind::Sl => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        out.push(t(n, i, j, &m));
                    }
                }
            }
        }
        FamilyKind::Sp => {
            let s = n / 2;
            for i in 0..s {
                for j in i + 1..s {
                    out.push(t(n, i, s + j, &m).mul(&t(n, j, s + i, &m), &qf));
                    out.push(t(n, s + i, j, &m).mul(&t(n, s + j, i, &m), &qf));
                }
            }
            for i in 0..s {
                out.push(t(n, i, s + i, &m));
                out.push(t(n, s + i, i, &m));
            }
        }
    }
    out
}

/// `E_{n,1}`, a generating set of `Γ_n`.
pub fn gamma_generators(f: &LatticeFamily) -> Vec<Matrix> {
    elementary_generators(f, 1)
}

/// `ℓ(S)`: gcd of the off-diagonal entries and diagonal differences (0 iff all scalar).
pub fn el_level(s: &[Matrix]) -> Result<u64> {
    let mut g = BigInt::zero();
    for x in s {
        let n = x.n();
        for i in 0..n {
            for j in 0..n {
                let e = if i == j {
                    as_int(x.get(i, i)).zip(as_int(x.get(0, 0))).map(|(a, b)| a - b)
                } else {
                    as_int(x.get(i, j))
                };
                g = g.gcd(&e.ok_or_else(|| Error::InvalidInput("matrix entries must be integers".into()))?);
            }
        }
    }
    g.to_u64().ok_or_else(|| Error::Unsupported("level does not fit in 64 bits".into()))
}

/// `|Γ_n mod m|` from the closed formulas.
pub fn lattice_order_mod(f: &LatticeFamily, m: u64) -> BigUint {
    if m == 1 {
        return BigUint::one();
    }
    let (dim, ks): (usize, Vec<u32>) = match f.kind {
        FamilyKind::Sl => (f.n * f.n - 1, (2..=f.n as u32).collect()),
        FamilyKind::Sp => {
            let s = f.n / 2;
            (s * (2 * s + 1), (1..=s as u32).map(|k| 2 * k).collect())
        }
    };
    let mut num = BigUint::from(m).pow(dim as u32);
    let mut den = BigUint::one();
    for (p, _) in int::factorize(m) {
        for &k in &ks {
            let pk = BigUint::from(p).pow(k);
            num *= &pk - 1u32;
            den *= pk;
        }
    }
    num / den
}

/// Entrywise reduction of an integral matrix modulo `m`.
pub fn reduce_mod(x: &Matrix, m: u64) -> FMat {
    let d = x.entries().iter().map(|e| int::big_mod(&as_int(e).expect("integral matrix"), m) as u32).collect();
    FMat { n: x.n(), d }
}

fn chain_mod(n: usize, gens: &[FMat], m: u64, cap: Option<u64>, known: Option<BigUint>) -> Result<Chain> {
    let ring = FiniteRing::residues(m)?;
    Chain::new(ring, n, gens, &ChainOpts { cap, known_order: known })
}

/// Stabilizer chain of `⟨S⟩ mod m` (`m >= 2`).
pub fn image_mod(f: &LatticeFamily, s: &[Matrix], m: u64, cap: Option<u64>) -> Result<Chain> {
    let gens: Vec<FMat> = s.iter().map(|x| reduce_mod(x, m)).collect();
    chain_mod(f.n, &gens, m, cap, Some(lattice_order_mod(f, m)))
}

/// `δ_H(m) = |φ_m(Γ_n) : φ_m(H)|`.
pub fn delta(f: &LatticeFamily, s: &[Matrix], m: u64, cap: Option<u64>) -> Result<BigUint> {
    if m == 1 {
        return Ok(BigUint::one());
    }
    let full = lattice_order_mod(f, m);
    let img = image_mod(f, s, m, cap)?.order();
    let (d, r) = full.div_rem(&img);
    if !r.is_zero() {
        return Err(Error::InvalidInput(format!("the generators do not lie in {}({}, Z)", f.name(), f.n)));
    }
    Ok(d)
}

/// Per-prime δ values met while computing a level.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LevelTrace {
    pub level: u64,
    pub deltas: Vec<(u64, BigUint)>,
}

/// Highest exponent tried per prime before giving up.
pub const MAX_LEVEL_EXPONENT: u32 = 40;

/// Level of the maximal principal congruence subgroup of the congruence closure of
/// `⟨S⟩`. For each prime the exponent is raised until `δ(p^a) = δ(p^{a+1})`; the
/// stabilized prime powers are multiplied.
pub fn level_max_pcs(f: &LatticeFamily, s: &[Matrix], primes: &[u64], cap: Option<u64>) -> Result<LevelTrace> {
    let mut ps = primes.to_vec();
    ps.sort_unstable();
    ps.dedup();
    let mut tr = LevelTrace { level: 1, deltas: Vec::new() };
    for p in ps {
        if !int::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let mut a = 1;
        let mut pa = p;
        let mut prev = delta(f, s, pa, cap)?;
        tr.deltas.push((pa, prev.clone()));
        loop {
            if a >= MAX_LEVEL_EXPONENT {
                return Err(Error::cap("prime power exponent", MAX_LEVEL_EXPONENT as u64));
            }
            let next_pa = pa.checked_mul(p).ok_or_else(|| Error::Unsupported("modulus overflow".into()))?;
            let next = delta(f, s, next_pa, cap)?;
            tr.deltas.push((next_pa, next.clone()));
            if next == prev {
                break;
            }
            prev = next;
            pa = next_pa;
            a += 1;
        }
        if !(a == 1 && prev.is_one()) {
            tr.level = tr.level.checked_mul(pa).ok_or_else(|| Error::Unsupported("level overflow".into()))?;
        }
    }
    Ok(tr)
}

/// Whether `⟨S⟩ mod p` is all of `Γ_n mod p`.
pub fn surjective_mod(f: &LatticeFamily, s: &[Matrix], p: u64, cap: Option<u64>) -> Result<bool> {
    Ok(delta(f, s, p, cap)?.is_one())
}

/// Primes `p <= bound` with `⟨S⟩ mod p` proper. Complete only up to `bound`.
pub fn primes_for_dense(f: &LatticeFamily, s: &[Matrix], bound: u64, cap: Option<u64>) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for p in int::primes_up_to(bound) {
        if !surjective_mod(f, s, p, cap)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// Burnside: the adjoint module is absolutely irreducible iff the matrices `Ad(h)`
/// span the full matrix algebra.
pub fn adjoint_absolutely_irreducible(f: &LatticeFamily, s: &[Matrix]) -> Result<bool> {
    let qf = q();
    let basis = f.lie_algebra_basis();
    let d = basis.len();
    let nn = f.n * f.n;
    let rows: Vec<Vec<Scalar>> = (0..nn).map(|e| basis.iter().map(|b| b.entries()[e].clone()).collect()).collect();
    let mut ads = Vec::with_capacity(s.len());
    for h in s {
        let hi = h.inverse(&qf).ok_or_else(|| Error::NotInvertible("generator".into()))?;
        let mut ad = Matrix::zero(d, &qf);
        for (k, x) in basis.iter().enumerate() {
            let y = h.mul(x, &qf).mul(&hi, &qf);
            let c = solve(&rows, y.entries(), &qf)
                .ok_or_else(|| Error::InvalidInput("generator does not normalize the Lie algebra".into()))?;
            for (r, v) in c.into_iter().enumerate() {
                ad.set(r, k, v);
            }
        }
        ads.push(ad);
    }
    Ok(spin(&qf, d, &ads, &[], true).dim() == d * d)
}

/// How density was decided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DensityMethod {
    ModPrime(u64),
    Adjoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Density {
    pub dense: bool,
    pub method: DensityMethod,
}

/// Smallest prime above 3: surjectivity there already forces density.
pub const FAST_PATH_PRIME: u64 = 5;

/// Deterministic density test: infinite with absolutely irreducible adjoint module.
pub fn is_dense_adjoint(f: &LatticeFamily, s: &[Matrix], cfg: &Config) -> Result<bool> {
    for x in s {
        f.check(x)?;
    }
    if !adjoint_absolutely_irreducible(f, s)? {
        return Ok(false);
    }
    let g = GeneratedGroup::new(q(), f.n, s.to_vec())?;
    Ok(!is_finite(&g, cfg)?.value)
}

/// Zariski density in `Γ_n`: surjectivity mod 5, otherwise the adjoint test.
pub fn is_dense(f: &LatticeFamily, s: &[Matrix], cfg: &Config, cap: Option<u64>) -> Result<Density> {
    for x in s {
        f.check(x)?;
    }
    if surjective_mod(f, s, FAST_PATH_PRIME, cap)? {
        return Ok(Density { dense: true, method: DensityMethod::ModPrime(FAST_PATH_PRIME) });
    }
    Ok(Density { dense: is_dense_adjoint(f, s, cfg)?, method: DensityMethod::Adjoint })
}

/// An arithmetic group `H ≥ Γ_{n,M}` given by its level `M` and its image mod `M`.
#[derive(Debug)]
pub struct ArithGroupDesc {
    pub family: LatticeFamily,
    pub level: u64,
    gens: Vec<FMat>,
    chain: Option<Chain>,
}

impl ArithGroupDesc {
    /// The group generated by `Γ_{n,m}` and the residues `gens`.
    pub fn new(family: LatticeFamily, level: u64, gens: Vec<FMat>, cap: Option<u64>) -> Result<ArithGroupDesc> {
        if level == 0 {
            return Err(Error::InvalidInput("level must be positive".into()));
        }
        let chain = if level == 1 {
            None
        } else {
            Some(chain_mod(family.n, &gens, level, cap, Some(lattice_order_mod(&family, level)))?)
        };
        Ok(ArithGroupDesc { family, level, gens, chain })
    }

    pub fn from_matrices(family: LatticeFamily, level: u64, s: &[Matrix], cap: Option<u64>) -> Result<ArithGroupDesc> {
        for x in s {
            family.check(x)?;
        }
        let gens = if level == 1 { Vec::new() } else { s.iter().map(|x| reduce_mod(x, level)).collect() };
        ArithGroupDesc::new(family, level, gens, cap)
    }

    pub fn gamma(family: LatticeFamily) -> ArithGroupDesc {
        ArithGroupDesc { family, level: 1, gens: Vec::new(), chain: None }
    }

    pub fn image_gens(&self) -> &[FMat] {
        &self.gens
    }

    pub fn image_order(&self) -> BigUint {
        self.chain.as_ref().map_or_else(BigUint::one, |c| c.order())
    }

    pub fn contains_residue(&self, x: &FMat) -> bool {
        self.chain.as_ref().map_or(true, |c| c.contains(x))
    }

    /// Lines `family`, `n`, `level`, then one `gen` line of residues per generator.
    pub fn to_text(&self) -> String {
        let mut s = format!("family {}\nn {}\nlevel {}\n", self.family.name(), self.family.n, self.level);
        for g in &self.gens {
            s.push_str("gen");
            for x in &g.d {
                let _ = write!(s, " {x}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str, cap: Option<u64>) -> Result<ArithGroupDesc> {
        let mut family = None;
        let mut n = None;
        let mut level = None;
        let mut gens = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let mut it = line.split_whitespace();
            let key = it.next().unwrap_or_default();
            let bad = || Error::Parse(format!("bad description line {line:?}"));
            match key {
                "family" => family = Some(it.next().ok_or_else(bad)?.to_string()),
                "n" => n = Some(it.next().ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?),
                "level" => level = Some(it.next().ok_or_else(bad)?.parse::<u64>().map_err(|_| bad())?),
                "gen" => {
                    let d = it.map(|x| x.parse::<u32>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
                    gens.push(d);
                }
                _ => return Err(bad()),
            }
        }
        let missing = |k: &str| Error::Parse(format!("description lacks a {k} line"));
        let n = n.ok_or_else(|| missing("n"))?;
        let family = LatticeFamily::parse(&family.ok_or_else(|| missing("family"))?, n)?;
        let level = level.ok_or_else(|| missing("level"))?;
        let mut fm = Vec::with_capacity(gens.len());
        for d in gens {
            if d.len() != n * n || d.iter().any(|&x| x as u64 >= level) {
                return Err(Error::Parse("generator residues do not match n and level".into()));
            }
            fm.push(FMat { n, d });
        }
        ArithGroupDesc::new(family, level, fm, cap)
    }
}

/// Options for the lattice procedures.
#[derive(Clone, Debug)]
pub struct LatticeOpts {
    pub cap: Option<u64>,
    /// Primes up to this bound are searched for non-surjectivity.
    pub bound: u64,
    /// Largest exponent `e` tried in `M | ℓ^e`; `None` means `n²`.
    pub subnormal_exponent: Option<u32>,
}

impl Default for LatticeOpts {
    fn default() -> LatticeOpts {
        LatticeOpts { cap: Some(DEFAULT_LATTICE_CAP), bound: 50, subnormal_exponent: None }
    }
}

/// Primes examined by [`describe`]: the non-surjective primes up to the bound, plus 2
/// for `SL(3)` and `SL(4)`, where surjectivity mod 2 does not imply it mod 4.
pub fn level_primes(f: &LatticeFamily, s: &[Matrix], opts: &LatticeOpts) -> Result<Vec<u64>> {
    let mut ps = primes_for_dense(f, s, opts.bound, opts.cap)?;
    if f.kind == FamilyKind::Sl && (f.n == 3 || f.n == 4) && !ps.contains(&2) {
        ps.insert(0, 2);
    }
    Ok(ps)
}

/// `(M, ⟨S⟩ mod M)` for a dense `⟨S⟩`: a description of its congruence closure.
pub fn describe(f: &LatticeFamily, s: &[Matrix], opts: &LatticeOpts) -> Result<(ArithGroupDesc, LevelTrace)> {
    for x in s {
        f.check(x)?;
    }
    let ps = level_primes(f, s, opts)?;
    let tr = level_max_pcs(f, s, &ps, opts.cap)?;
    Ok((ArithGroupDesc::from_matrices(*f, tr.level, s, opts.cap)?, tr))
}

/// `x ∈ H` iff `x mod M ∈ H mod M`. Errors when `x ∉ Γ_n`.
pub fn membership(d: &ArithGroupDesc, x: &Matrix) -> Result<bool> {
    d.family.check(x)?;
    if d.level == 1 {
        return Ok(true);
    }
    Ok(d.contains_residue(&reduce_mod(x, d.level)))
}

pub fn is_subgroup(d: &ArithGroupDesc, xs: &[Matrix]) -> Result<bool> {
    for x in xs {
        if !membership(d, x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `|Γ_n : H|`.
pub fn index_in_gamma(d: &ArithGroupDesc) -> BigUint {
    lattice_order_mod(&d.family, d.level) / d.image_order()
}

/// `⟨H, Γ_{n,ℓ}⟩^{Γ_n}` with `ℓ = ℓ(S)`, given by the normal closure of `S mod ℓ`.
pub fn normal_closure_desc(f: &LatticeFamily, s: &[Matrix], cap: Option<u64>) -> Result<ArithGroupDesc> {
    for x in s {
        f.check(x)?;
    }
    let l = el_level(s)?;
    if l == 0 {
        return Err(Error::Unsupported("scalar generators: the normal closure is central, not arithmetic".into()));
    }
    if l == 1 {
        return Ok(ArithGroupDesc::gamma(*f));
    }
    let ring = FiniteRing::residues(l)?;
    let xs: Vec<FMat> = s.iter().map(|x| reduce_mod(x, l)).collect();
    let amb: Vec<FMat> = gamma_generators(f).iter().map(|x| reduce_mod(x, l)).collect();
    let k = normal_closure(&ring, f.n, &xs, &amb, cap)?;
    ArithGroupDesc::new(*f, l, k.generators(), cap)
}

/// `M | ℓ(S)^e` for some `e <= bound` (default `n²`).
pub fn is_subnormal(d: &ArithGroupDesc, s: &[Matrix], bound: Option<u32>) -> Result<bool> {
    let l = el_level(s)?;
    let m = d.level;
    if m == 1 || l == 0 {
        return Ok(true);
    }
    let bound = bound.unwrap_or((d.family.n * d.family.n) as u32);
    let mut acc = 1u128;
    for _ in 0..bound {
        acc = acc * (l as u128 % m as u128) % m as u128;
        if acc == 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Subnormal, with image normalized by `Γ_n mod M`.
pub fn is_normal(d: &ArithGroupDesc, s: &[Matrix], bound: Option<u32>) -> Result<bool> {
    if !is_subnormal(d, s, bound)? {
        return Ok(false);
    }
    if d.level == 1 {
        return Ok(true);
    }
    let ring = FiniteRing::residues(d.level)?;
    for g in gamma_generators(&d.family) {
        let gm = reduce_mod(&g, d.level);
        let gi = gm.inverse(&ring).expect("unimodular");
        if !d.gens.iter().all(|h| d.contains_residue(&gm.mul(h, &ring).mul(&gi, &ring))) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Full preimage of the normalizer of `H mod M` in `Γ_n mod M`; `cap` bounds the
/// number of elements enumerated.
pub fn normalizer_desc(d: &ArithGroupDesc, cap: u64) -> Result<ArithGroupDesc> {
    let Some(h) = &d.chain else {
        return Ok(ArithGroupDesc::gamma(d.family));
    };
    let amb: Vec<FMat> = gamma_generators(&d.family).iter().map(|x| reduce_mod(x, d.level)).collect();
    let ambient = chain_mod(d.family.n, &amb, d.level, None, Some(lattice_order_mod(&d.family, d.level)))?;
    let nz = normalizer(h, &ambient, cap)?;
    ArithGroupDesc::new(d.family, d.level, nz.generators(), None)
}

/// Row operations recorded as left factors.
#[derive(Clone, Debug)]
enum RowOp {
    /// `row_i += c · row_j`.
    Add(usize, usize, BigInt),
    /// Negate rows `i` and `j`.
    Neg(usize, usize),
}

impl RowOp {
    fn matrix(&self, n: usize, inverse: bool) -> Matrix {
        match self {
            RowOp::Add(i, j, c) => t(n, *i, *j, &if inverse { -c } else { c.clone() }),
            RowOp::Neg(i, j) => {
                let f = q();
                let mut m = Matrix::identity(n, &f);
                m.set(*i, *i, Scalar::int(-1));
                m.set(*j, *j, Scalar::int(-1));
                m
            }
        }
    }
}

/// `A ∈ SL(n, Z)` with `A e_1 = w` for primitive `w`, by integer Euclid on `w`.
pub fn completion(w: &[BigInt]) -> Result<Matrix> {
    let n = w.len();
    let mut w = w.to_vec();
    let mut ops = Vec::new();
    loop {
        let nz: Vec<usize> = (0..n).filter(|&i| !w[i].is_zero()).collect();
        let Some(&piv) = nz.iter().min_by_key(|&&i| w[i].abs()) else {
            return Err(Error::InvalidInput("zero vector".into()));
        };
        if nz.len() == 1 {
            break;
        }
        for &i in &nz {
            if i != piv {
                let qt = w[i].div_floor(&w[piv]);
                let step = &qt * &w[piv];
                w[i] -= step;
                ops.push(RowOp::Add(i, piv, -qt));
            }
        }
    }
    let piv = (0..n).find(|&i| !w[i].is_zero()).expect("nonzero");
    if !w[piv].abs().is_one() {
        return Err(Error::InvalidInput("vector is not primitive".into()));
    }
    if piv != 0 {
        ops.push(RowOp::Add(0, piv, BigInt::one()));
        ops.push(RowOp::Add(piv, 0, -BigInt::one()));
        w[0] = w[piv].clone();
    }
    if w[0].is_negative() {
        ops.push(RowOp::Neg(0, if piv != 0 { piv } else { 1 }));
    }
    // U w = e_1 with U = op_k ... op_1, so A = op_1^-1 ... op_k^-1.
    let f = q();
    let mut a = Matrix::identity(n, &f);
    for op in &ops {
        a = a.mul(&op.matrix(n, true), &f);
    }
    Ok(a)
}

fn mod_inv(a: i64, m: i64) -> Option<i64> {
    int::inv_mod(a.rem_euclid(m) as u64, m as u64).map(|x| x as i64)
}

/// A matrix in `SL(k, Z)` reducing to `x ∈ SL(k, Z_m)`, from a factorization of `x`
/// into elementary matrices over `Z_m`.
pub fn lift_sl(x: &FMat, m: u64) -> Result<Matrix> {
    let k = x.n;
    let f = q();
    if m == 1 {
        return Ok(Matrix::identity(k, &f));
    }
    let mi = m as i64;
    let mut a: Vec<Vec<i64>> = (0..k).map(|r| (0..k).map(|c| x.get(r, c) as i64).collect()).collect();
    let mut ops: Vec<(usize, usize, i64)> = Vec::new();
    let mut add = |a: &mut Vec<Vec<i64>>, i: usize, j: usize, c: i64| {
        let c = c.rem_euclid(mi);
        if c == 0 {
            return;
        }
        for col in 0..k {
            a[i][col] = (a[i][col] + c * a[j][col]).rem_euclid(mi);
        }
        ops.push((i, j, c));
    };
    let singular = || Error::NotInvertible("matrix over Z_m is not in SL".into());
    for j in 0..k {
        loop {
            let nz: Vec<usize> = (j..k).filter(|&r| a[r][j] != 0).collect();
            let piv = *nz.iter().min_by_key(|&&r| a[r][j]).ok_or_else(singular)?;
            if nz.len() == 1 {
                if piv != j {
                    add(&mut a, j, piv, 1);
                    add(&mut a, piv, j, -1);
                }
                break;
            }
            for &r in &nz {
                if r != piv {
                    let qt = a[r][j] / a[piv][j];
                    add(&mut a, r, piv, -qt);
                }
            }
        }
        let gi = mod_inv(a[j][j], mi).ok_or_else(singular)?;
        for r in 0..k {
            if r != j && a[r][j] != 0 {
                let c = a[r][j] * gi % mi;
                add(&mut a, r, j, -c);
            }
        }
    }
    // diag(u_1, ..., u_k) with product 1: push each unit into the next slot using
    // diag(v, v^-1) = t12(v) t21(-v^-1) t12(v) t12(-1) t21(1) t12(-1), v = u^-1.
    for i in 0..k.saturating_sub(1) {
        let u = a[i][i];
        if u == 1 {
            continue;
        }
        let v = mod_inv(u, mi).ok_or_else(singular)?;
        let vi = u;
        for (r, c, s) in [(i, i + 1, -1), (i + 1, i, 1), (i, i + 1, -1), (i, i + 1, v), (i + 1, i, -vi), (i, i + 1, v)] {
            add(&mut a, r, c, s);
        }
    }
    if a[k - 1][k - 1] != 1 {
        return Err(singular());
    }
    let mut out = Matrix::identity(k, &f);
    for &(i, j, c) in &ops {
        out = out.mul(&t(k, i, j, &BigInt::from(-c)), &f);
    }
    Ok(out)
}

/// `h ∈ Γ_{n,m}` with `h e_1 = x`, for primitive `x ≡ e_1 mod m`.
fn gamma_m_from_e1(x: &[BigInt], m: u64) -> Result<Matrix> {
    let f = q();
    let n = x.len();
    let a = completion(x)?;
    if m == 1 {
        return Ok(a);
    }
    let am = reduce_mod(&a, m);
    let mut b = FMat { n: n - 1, d: Vec::with_capacity((n - 1) * (n - 1)) };
    for r in 1..n {
        for c in 1..n {
            b.d.push(am.get(r, c));
        }
    }
    let bl = lift_sl(&b, m)?;
    let mut c = Matrix::identity(n, &f);
    for col in 1..n {
        c.set(0, col, a.get(0, col).clone());
    }
    for r in 1..n {
        for col in 1..n {
            c.set(r, col, bl.get(r - 1, col - 1).clone());
        }
    }
    Ok(a.mul(&c.inverse(&f).expect("unimodular"), &f))
}

/// Answer to an orbit question.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitWitness {
    pub found: bool,
    /// `g` with `g u = v`, in the acting group.
    pub g: Option<Matrix>,
    /// Generator of the ideal spanned by the entries of `u`.
    pub a: BigInt,
    /// `g` as a product `factors[0] · factors[1] ⋯`.
    pub factors: Vec<Matrix>,
}

fn content(u: &[BigInt]) -> BigInt {
    u.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

fn is_identity_mod(x: &Matrix, m: u64) -> bool {
    m == 1 || reduce_mod(x, m).is_identity()
}

/// Is there `g ∈ Γ_{n,m}` with `g u = v`? Exactly when the entries of `u` and `v`
/// generate the same ideal `aZ` and `u ≡ v mod am`.
pub fn orbit_gamma(f: &LatticeFamily, u: &[BigInt], v: &[BigInt], m: u64) -> Result<OrbitWitness> {
    if f.kind != FamilyKind::Sl {
        return Err(Error::Unsupported("the orbit problem is implemented for SL only".into()));
    }
    if u.len() != f.n || v.len() != f.n {
        return Err(Error::InvalidInput(format!("vectors must have length {}", f.n)));
    }
    if m == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    let a = content(u);
    if a.is_zero() || content(v).is_zero() {
        return Err(Error::InvalidInput("zero vector".into()));
    }
    let no = OrbitWitness { found: false, g: None, a: a.clone(), factors: Vec::new() };
    let am = &a * BigInt::from(m);
    if content(v) != a || u.iter().zip(v).any(|(x, y)| !(x - y).mod_floor(&am).is_zero()) {
        return Ok(no);
    }
    let qf = q();
    let up: Vec<BigInt> = u.iter().map(|x| x / &a).collect();
    let vp: Vec<BigInt> = v.iter().map(|x| x / &a).collect();
    let s = completion(&up)?;
    let si = s.inverse(&qf).expect("unimodular");
    let h = gamma_m_from_e1(&apply(&si, &vp), m)?;
    let g = s.mul(&h, &qf).mul(&si, &qf);
    if apply(&g, u) != v || !is_identity_mod(&g, m) || !qf.is_one(&g.det(&qf)) {
        return Err(Error::Internal("orbit witness failed verification".into()));
    }
    Ok(OrbitWitness { found: true, g: Some(g.clone()), a, factors: vec![g] })
}

/// Orbit problem in an arithmetic group `H ≥ Γ_{n,M}`: move `u mod M` to `v mod M`
/// inside the finite image, lift, then finish in `Γ_{n,M}`.
pub fn orbit_subgroup(d: &ArithGroupDesc, u: &[BigInt], v: &[BigInt]) -> Result<OrbitWitness> {
    let f = d.family;
    let m = d.level;
    if m == 1 {
        return orbit_gamma(&f, u, v, 1);
    }
    if u.len() != f.n || v.len() != f.n {
        return Err(Error::InvalidInput(format!("vectors must have length {}", f.n)));
    }
    let a = content(u);
    if a.is_zero() || content(v).is_zero() {
        return Err(Error::InvalidInput("zero vector".into()));
    }
    let no = OrbitWitness { found: false, g: None, a: a.clone(), factors: Vec::new() };
    if content(v) != a {
        return Ok(no);
    }
    let ring = FiniteRing::residues(m)?;
    let size = ring.size();
    let red = |w: &[BigInt]| -> Vec<u32> { w.iter().map(|x| int::big_mod(&(x / &a), m) as u32).collect() };
    let (start, goal) = (FMat::pack(&red(u), size), FMat::pack(&red(v), size));
    let mut parent: FxHashMap<u128, Option<(u128, usize)>> = FxHashMap::default();
    parent.insert(start, None);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(k) = queue.pop_front() {
        if k == goal {
            break;
        }
        let w = FMat::unpack(k, f.n, size);
        for (i, g) in d.gens.iter().enumerate() {
            let nk = FMat::pack(&g.apply(&w, &ring), size);
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(nk) {
                e.insert(Some((k, i)));
                queue.push_back(nk);
            }
        }
    }
    if !parent.contains_key(&goal) {
        return Ok(no);
    }
    let mut hbar = FMat::identity(f.n);
    let mut k = goal;
    while let Some(Some((prev, i))) = parent.get(&k) {
        hbar = hbar.mul(&d.gens[*i], &ring);
        k = *prev;
    }
    let qf = q();
    let h = lift_sl(&hbar, m)?;
    let gw = orbit_gamma(&f, &apply(&h, u), v, m)?;
    let gamma = gw.g.ok_or_else(|| Error::Internal("congruence step failed".into()))?;
    let g = gamma.mul(&h, &qf);
    if apply(&g, u) != v || !membership(d, &g)? {
        return Err(Error::Internal("orbit witness failed verification".into()));
    }
    Ok(OrbitWitness { found: true, g: Some(g), a, factors: vec![gamma, h] })
}

/// Generators of `Stab_{Γ_n}(u)`: `σ`-conjugates of the stabilizer of `e_1`, where
/// `σ e_1 = u / a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizer {
    pub sigma: Matrix,
    pub gens: Vec<Matrix>,
}

pub fn stabilizer_gamma(f: &LatticeFamily, u: &[BigInt]) -> Result<Stabilizer> {
    if f.kind != FamilyKind::Sl {
        return Err(Error::Unsupported("stabilizers are implemented for SL only".into()));
    }
    if u.len() != f.n {
        return Err(Error::InvalidInput(format!("vector must have length {}", f.n)));
    }
    let a = content(u);
    if a.is_zero() {
        return Err(Error::InvalidInput("zero vector".into()));
    }
    let n = f.n;
    let qf = q();
    let up: Vec<BigInt> = u.iter().map(|x| x / &a).collect();
    let sigma = completion(&up)?;
    let si = sigma.inverse(&qf).expect("unimodular");
    let mut base: Vec<Matrix> = (1..n).map(|j| t(n, 0, j, &BigInt::one())).collect();
    let small = if n - 1 == 2 {
        vec![int_matrix(&[vec![0, -1], vec![1, 0]]), int_matrix(&[vec![1, 1], vec![0, 1]])]
    } else {
        gamma_generators(&LatticeFamily::sl(n - 1)?)
    };
    for y in small {
        let mut x = Matrix::identity(n, &qf);
        for r in 0..n - 1 {
            for c in 0..n - 1 {
                x.set(r + 1, c + 1, y.get(r, c).clone());
            }
        }
        base.push(x);
    }
    let gens = base.iter().map(|x| sigma.mul(x, &qf).mul(&si, &qf)).collect();
    Ok(Stabilizer { sigma, gens })
}

/// `u ↦ (a, u mod a·m)`: the invariants deciding `Γ_{n,m}`-orbits.
pub fn orbit_invariant(u: &[BigInt], m: u64) -> (BigInt, Vec<BigInt>) {
    let a = content(u);
    let am = &a * BigInt::from(m);
    let r = if am.is_zero() { u.to_vec() } else { u.iter().map(|x| x.mod_floor(&am)).collect() };
    (a, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn sl3() -> LatticeFamily {
        LatticeFamily::sl(3).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Group closure by BFS, for small orders.
    fn bfs_order(gens: &[FMat], r: &FiniteRing) -> usize {
        let id = FMat::identity(gens[0].n);
        let mut seen = HashSet::from([id.clone()]);
        let mut todo = vec![id];
        while let Some(x) = todo.pop() {
            for g in gens {
                let y = x.mul(g, r);
                if seen.insert(y.clone()) {
                    todo.push(y);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn generators() {
        assert_eq!(gamma_generators(&sl3()).len(), 6);
        let sp4 = LatticeFamily::sp(4).unwrap();
        let g = gamma_generators(&sp4);
        assert_eq!(g.len(), 6);
        let j = sp4.form();
        for h in &g {
            sp4.check(h).unwrap();
            assert_eq!(h.mul(&j, &q()).mul(&h.transpose(), &q()), j);
        }
        for x in elementary_generators(&sl3(), 6) {
            for i in 0..3 {
                for k in 0..3 {
                    if i != k {
                        let e = as_int(x.get(i, k)).unwrap();
                        assert!(e == BigInt::zero() || e == BigInt::from(6));
                    }
                }
            }
        }
        assert_eq!(sp4.lie_algebra_basis().len(), 10);
        assert_eq!(sl3().lie_algebra_basis().len(), 8);
        assert!(LatticeFamily::sl(2).is_err());
        assert!(LatticeFamily::sp(5).is_err());
    }

    #[test]
    fn levels() {
        assert_eq!(el_level(&[t(3, 0, 1, &BigInt::from(2))]).unwrap(), 2);
        assert_eq!(el_level(&[t(3, 0, 1, &BigInt::from(7))]).unwrap(), 7);
        assert_eq!(el_level(&[Matrix::identity(3, &q()).neg(&q())]).unwrap(), 0);
    }

    #[test]
    fn orders_match_enumeration() {
        let r2 = FiniteRing::residues(2).unwrap();
        let g: Vec<FMat> = gamma_generators(&sl3()).iter().map(|x| reduce_mod(x, 2)).collect();
        assert_eq!(bfs_order(&g, &r2), 168);
        assert_eq!(lattice_order_mod(&sl3(), 2), BigUint::from(168u32));
        let sp4 = LatticeFamily::sp(4).unwrap();
        let g: Vec<FMat> = gamma_generators(&sp4).iter().map(|x| reduce_mod(x, 2)).collect();
        assert_eq!(bfs_order(&g, &r2), 720);
        assert_eq!(lattice_order_mod(&sp4, 2), BigUint::from(720u32));
        assert_eq!(lattice_order_mod(&sl3(), 4), BigUint::from(43008u32));
        assert_eq!(image_mod(&sl3(), &gamma_generators(&sl3()), 4, None).unwrap().order(), BigUint::from(43008u32));
    }

    #[test]
    fn deltas() {
        let e32 = elementary_generators(&sl3(), 2);
        assert_eq!(delta(&sl3(), &e32, 2, None).unwrap(), BigUint::from(168u32));
        assert_eq!(delta(&sl3(), &e32, 3, None).unwrap(), BigUint::one());
        assert_eq!(delta(&sl3(), &gamma_generators(&sl3()), 6, None).unwrap(), BigUint::one());
    }

    #[test]
    fn lifting() {
        let r = FiniteRing::residues(6).unwrap();
        let x = FMat::from_rows(&[vec![5, 0, 0], vec![0, 5, 0], vec![0, 0, 1]], &r);
        let l = lift_sl(&x, 6).unwrap();
        assert_eq!(reduce_mod(&l, 6), x);
        assert!(q().is_one(&l.det(&q())));
        let y = FMat::from_rows(&[vec![2, 1], vec![3, 2]], &FiniteRing::residues(9).unwrap());
        let ly = lift_sl(&y, 9).unwrap();
        assert_eq!(reduce_mod(&ly, 9), y);
    }

    #[test]
    fn completions() {
        for w in [vec![1, 0, 0], vec![1, 1, 0], vec![3, -5, 7], vec![0, 0, -1], vec![6, 10, 15]] {
            let a = completion(&big(&w)).unwrap();
            assert_eq!(apply(&a, &big(&[1, 0, 0])), big(&w));
            assert!(q().is_one(&a.det(&q())));
        }
        assert!(completion(&big(&[2, 4, 0])).is_err());
    }

    #[test]
    fn orbit_examples() {
        let f = sl3();
        let w = orbit_gamma(&f, &big(&[1, 0, 0]), &big(&[1, 2, 0]), 2).unwrap();
        assert!(w.found);
        assert!(!orbit_gamma(&f, &big(&[1, 0, 0]), &big(&[2, 0, 0]), 1).unwrap().found);
        assert!(!orbit_gamma(&f, &big(&[1, 0, 0]), &big(&[1, 1, 0]), 2).unwrap().found);
        let w = orbit_gamma(&f, &big(&[3, 0, 0]), &big(&[-3, 0, 0]), 2).unwrap();
        assert!(w.found);
        let w = orbit_gamma(&f, &big(&[4, 6, 2]), &big(&[-2, 12, 8]), 3).unwrap();
        assert!(w.found);
        assert!(reduce_mod(&w.g.unwrap(), 3).is_identity());
    }

    #[test]
    fn stabilizers() {
        let f = sl3();
        let s = stabilizer_gamma(&f, &big(&[1, 0, 0])).unwrap();
        assert!(s.sigma.is_identity(&q()));
        assert_eq!(s.gens.len(), 4);
        assert_eq!(stabilizer_gamma(&f, &big(&[2, 0, 0])).unwrap(), s);
        let s = stabilizer_gamma(&f, &big(&[1, 1, 0])).unwrap();
        assert_eq!(s.sigma, t(3, 1, 0, &BigInt::one()));
        for g in &s.gens {
            assert_eq!(apply(g, &big(&[1, 1, 0])), big(&[1, 1, 0]));
        }
    }

    #[test]
    fn descriptions() {
        let f = sl3();
        let opts = LatticeOpts::default();
        let (d, tr) = describe(&f, &gamma_generators(&f), &opts).unwrap();
        assert_eq!(d.level, 1);
        assert_eq!(tr.level, 1);
        assert_eq!(index_in_gamma(&d), BigUint::one());
        let g32 = ArithGroupDesc::from_matrices(f, 2, &elementary_generators(&f, 2), None).unwrap();
        assert!(membership(&g32, &t(3, 0, 1, &BigInt::from(2))).unwrap());
        assert!(!membership(&g32, &t(3, 0, 1, &BigInt::one())).unwrap());
        assert_eq!(index_in_gamma(&g32), BigUint::from(168u32));
        assert!(membership(&g32, &int_matrix(&[vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])).is_err());
        let text = g32.to_text();
        let back = ArithGroupDesc::from_text(&text, None).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.image_order(), BigUint::one());
    }

    #[test]
    fn closures_and_normality() {
        let f = sl3();
        let nc = normal_closure_desc(&f, &[t(3, 0, 1, &BigInt::from(2))], None).unwrap();
        assert_eq!(nc.level, 2);
        assert_eq!(nc.image_order(), BigUint::one());
        let nc4 = normal_closure_desc(&f, &[t(3, 0, 1, &BigInt::from(4))], None).unwrap();
        assert_eq!(nc4.level, 4);
        assert_eq!(nc4.image_order(), BigUint::one());
        assert!(normal_closure_desc(&f, &[Matrix::identity(3, &q())], None).is_err());
        let g32 = ArithGroupDesc::from_matrices(f, 2, &elementary_generators(&f, 2), None).unwrap();
        let s = elementary_generators(&f, 2);
        assert!(is_subnormal(&g32, &s, None).unwrap());
        assert!(is_normal(&g32, &s, None).unwrap());
        let synth = ArithGroupDesc::from_matrices(f, 6, &elementary_generators(&f, 6), None).unwrap();
        assert!(!is_subnormal(&synth, &s, None).unwrap());
        let n = normalizer_desc(&g32, 1000).unwrap();
        assert_eq!(index_in_gamma(&n), BigUint::one());
        let ut: Vec<Matrix> = vec![t(3, 0, 1, &BigInt::one()), t(3, 1, 2, &BigInt::one())];
        let syl = ArithGroupDesc::from_matrices(f, 2, &ut, None).unwrap();
        assert_eq!(syl.image_order(), BigUint::from(8u32));
        let n = normalizer_desc(&syl, 1000).unwrap();
        assert_eq!(index_in_gamma(&n), BigUint::from(21u32));
    }

    #[test]
    fn subgroup_orbits() {
        let f = sl3();
        let g32 = ArithGroupDesc::from_matrices(f, 2, &elementary_generators(&f, 2), None).unwrap();
        let w = orbit_subgroup(&g32, &big(&[1, 0, 0]), &big(&[1, 2, 0])).unwrap();
        assert!(w.found);
        assert!(!orbit_subgroup(&g32, &big(&[1, 0, 0]), &big(&[0, 1, 0])).unwrap().found);
        let g = ArithGroupDesc::gamma(f);
        assert!(orbit_subgroup(&g, &big(&[1, 0, 0]), &big(&[0, 1, 0])).unwrap().found);
        let ut = vec![t(3, 0, 1, &BigInt::one()), t(3, 1, 2, &BigInt::one())];
        let syl = ArithGroupDesc::from_matrices(f, 2, &ut, None).unwrap();
        let w = orbit_subgroup(&syl, &big(&[0, 0, 1]), &big(&[1, 1, 1])).unwrap();
        assert!(w.found);
        assert!(membership(&syl, w.g.as_ref().unwrap()).unwrap());
        assert!(!orbit_subgroup(&syl, &big(&[1, 0, 0]), &big(&[0, 0, 1])).unwrap().found);
    }

    #[test]
    fn density() {
        let f = sl3();
        let cfg = Config::default();
        let d = is_dense(&f, &gamma_generators(&f), &cfg, None).unwrap();
        assert!(d.dense);
        assert_eq!(d.method, DensityMethod::ModPrime(5));
        assert!(is_dense_adjoint(&f, &gamma_generators(&f), &cfg).unwrap());
        let ut = vec![t(3, 0, 1, &BigInt::one()), t(3, 0, 2, &BigInt::one()), t(3, 1, 2, &BigInt::one())];
        let d = is_dense(&f, &ut, &cfg, None).unwrap();
        assert!(!d.dense);
        assert_eq!(d.method, DensityMethod::Adjoint);
    }
}
