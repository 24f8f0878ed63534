//! Structural decisions for finitely generated linear groups over infinite fields:
//! finiteness, virtual solvability and its refinements, Jordan decomposition and
//! complete reducibility.
//!
//! Every decision goes through a congruence image: the relators of the image lift to
//! normal generators `N` of the kernel `G_ϱ`, and the question is then settled by
//! matrix algebra on the normal closure `⟨N⟩^G`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    add_unipotent, algebra_is_uba, closure_spinner, radical, spin, unipotent_spinner, AlgebraBasis,
};
use crate::congruence::{admissible_maps, ring_of_definition, CongruenceMap, MapRecord, Purpose};
use crate::error::{Error, Result};
use crate::exact::linalg::{nullspace, solve, Echelon};
use crate::exact::{int, Field, GenWord, GeneratedGroup, Matrix, Poly, Scalar};
use crate::finite::image::{build_image, is_nilpotent as image_is_nilpotent, is_solvable as image_is_solvable};
use crate::finite::present::{normal_generators_of, DEFAULT_PRESENTATION_CAP};
use crate::finite::image::DEFAULT_ORDER_CAP;
use crate::finite::FiniteImage;

/// Limits and choices shared by all decisions.
#[derive(Clone, Debug)]
pub struct Config {
    pub order_cap: u64,
    pub pres_cap: u64,
    pub seed: u64,
    /// Random words tried by the infinite-order pre-check in [`is_finite`] (0 disables it).
    pub random_words: usize,
    pub word_len: usize,
    /// Use the admissible map at this position of the selection order.
    pub map_skip: usize,
    /// Only consider maps reducing modulo this prime.
    pub prime: Option<u64>,
    /// Use exactly this map (replay).
    pub map: Option<MapRecord>,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            order_cap: DEFAULT_ORDER_CAP,
            pres_cap: DEFAULT_PRESENTATION_CAP,
            seed: 0,
            random_words: 20,
            word_len: 40,
            map_skip: 0,
            prime: None,
            map: None,
        }
    }
}

/// What a decision looked at; enough to rerun it with the same map.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub map: Option<MapRecord>,
    pub image_order: Option<String>,
    pub normal_generators: usize,
    pub dims: Vec<(String, usize)>,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub value: bool,
    pub cert: Certificate,
}

fn require_char0(g: &GeneratedGroup, what: &str) -> Result<()> {
    if g.field().characteristic() != 0 {
        return Err(Error::Unsupported(format!("{what} needs characteristic 0")));
    }
    Ok(())
}

/// `Q` or a number field: the Dedekind setting of the nilpotent/abelian-by-finite tests.
fn require_dedekind(g: &GeneratedGroup, what: &str) -> Result<()> {
    match g.field() {
        Field::Rational => Ok(()),
        Field::Extension(e) if e.base == Field::Rational => Ok(()),
        f => Err(Error::Unsupported(format!("{what} needs Q or a number field, not {f}"))),
    }
}

/// The map a decision uses: the recorded one, or the `map_skip`-th admissible one.
/// With `unramified`, number-field primes dividing the discriminant are passed over.
pub fn choose_map(g: &GeneratedGroup, purpose: Purpose, cfg: &Config, unramified: bool) -> Result<CongruenceMap> {
    let r = ring_of_definition(g)?;
    if let Some(rec) = &cfg.map {
        let m = CongruenceMap::from_record(&r, rec)?;
        let ok = match purpose {
            Purpose::Sw => m.is_sw,
            Purpose::W => m.is_w,
        };
        if !ok {
            return Err(Error::InvalidInput(format!("recorded map {} is not admissible here", m.describe())));
        }
        return Ok(m);
    }
    if cfg.prime.is_some() && g.field().characteristic() != 0 {
        return Err(Error::Unsupported("choosing the prime applies to characteristic 0 only".into()));
    }
    let disc = r.disc.clone();
    let found = admissible_maps(&r, purpose)?
        .take_while(|m| match (cfg.prime, m.p) {
            (Some(q), Some(p)) => p <= q,
            _ => true,
        })
        .filter(|m| cfg.prime.is_none() || m.p == cfg.prime)
        .filter(|m| match (unramified, &disc, m.p) {
            (true, Some(d), Some(p)) => !(d.numer() % BigInt::from(p)).is_zero(),
            _ => true,
        })
        .nth(cfg.map_skip);
    found.ok_or_else(|| Error::NoAdmissibleMap("candidate search exhausted".into()))
}

struct Kernel {
    map: CongruenceMap,
    image: FiniteImage,
}

impl Kernel {
    fn new(g: &GeneratedGroup, purpose: Purpose, cfg: &Config, unramified: bool) -> Result<Kernel> {
        let map = choose_map(g, purpose, cfg, unramified)?;
        let image = build_image(g, &map, cfg.order_cap)?;
        Ok(Kernel { map, image })
    }

    fn cert(&self) -> Certificate {
        Certificate {
            map: Some(self.map.record()),
            image_order: Some(self.image.order().to_string()),
            ..Certificate::default()
        }
    }
}

/// Necessary conditions for finite order over `Q`: the characteristic polynomial is
/// integral, self-reciprocal up to sign, with `|c_k| <= C(n, k)`.
fn may_have_finite_order(x: &Matrix, f: &Field) -> bool {
    let cp = x.charpoly(f);
    let n = x.n();
    let mut cs = Vec::with_capacity(n + 1);
    for c in cp.coeffs() {
        let r = c.as_rational().expect("rational entries");
        if !r.is_integer() {
            return false;
        }
        cs.push(r.to_integer());
    }
    let c0 = cs[0].clone();
    if c0.abs() != BigInt::one() {
        return false;
    }
    let mut binom = BigInt::one();
    for k in 0..=n {
        if cs[k].abs() > binom {
            return false;
        }
        // x^n p(1/x) = c0 p(x)
        if cs[n - k] != &c0 * &cs[k] {
            return false;
        }
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    true
}

fn random_infinite_witness(g: &GeneratedGroup, cfg: &Config) -> Result<Option<GenWord>> {
    if cfg.random_words == 0 || *g.field() != Field::Rational || g.rank() == 0 {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..cfg.random_words {
        let len = 1 + (i * cfg.word_len) / cfg.random_words.max(1);
        let w = g.random_word(&mut rng, len.min(cfg.word_len.max(1)));
        if !may_have_finite_order(&g.evaluate_word(&w)?, g.field()) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Whether `G` is finite.
///
/// In characteristic 0 the kernel of an SW map is torsion-free, so `G` is finite iff every
/// lifted relator is trivial. In characteristic `p` the kernel is finite iff `⟨N⟩^G` is
/// unipotent.
pub fn is_finite(g: &GeneratedGroup, cfg: &Config) -> Result<Verdict> {
    let char0 = g.field().characteristic() == 0;
    if char0 && cfg.map.is_none() {
        if let Some(w) = random_infinite_witness(g, cfg)? {
            let cert = Certificate { witness: Some(format!("infinite order: {w}")), ..Certificate::default() };
            return Ok(Verdict { value: false, cert });
        }
    }
    let k = Kernel::new(g, Purpose::Sw, cfg, false)?;
    let mut cert = k.cert();
    let mut ng = normal_generators_of(g, &k.image, cfg.pres_cap)?;
    if char0 {
        if let Some((_, w)) = ng.next() {
            cert.normal_generators = 1;
            cert.witness = Some(format!("nontrivial kernel element: {w}"));
            return Ok(Verdict { value: false, cert });
        }
        return Ok(Verdict { value: true, cert });
    }
    let mut s = unipotent_spinner(g);
    for (x, _) in ng.by_ref() {
        cert.normal_generators += 1;
        add_unipotent(&mut s, &x, g.field());
    }
    let a = s.finish();
    cert.dims.push(("unipotent closure algebra".into(), a.dim()));
    Ok(Verdict { value: a.is_nilpotent(), cert })
}

/// `|G|` for a finite group in characteristic 0 (the SW image is isomorphic to `G`).
pub fn order_of_finite(g: &GeneratedGroup, cfg: &Config) -> Result<(BigUint, Certificate)> {
    require_char0(g, "order computation")?;
    let v = is_finite(g, cfg)?;
    if !v.value {
        return Err(Error::InvalidInput("the group is infinite".into()));
    }
    let order = v.cert.image_order.as_deref().unwrap_or("1").parse::<BigUint>().expect("decimal order");
    Ok((order, v.cert))
}

fn closure_algebra(g: &GeneratedGroup, k: &Kernel, cfg: &Config, cert: &mut Certificate) -> Result<Vec<Matrix>> {
    let ns: Vec<Matrix> = normal_generators_of(g, &k.image, cfg.pres_cap)?.map(|(x, _)| x).collect();
    cert.normal_generators = ns.len();
    Ok(ns)
}

/// Tits alternative: `true` iff `G` is solvable-by-finite; otherwise `G` contains a
/// non-abelian free subgroup.
pub fn is_solvable_by_finite(g: &GeneratedGroup, cfg: &Config) -> Result<Verdict> {
    let k = Kernel::new(g, Purpose::W, cfg, false)?;
    let mut cert = k.cert();
    let ns = closure_algebra(g, &k, cfg, &mut cert)?;
    let mut s = closure_spinner(g);
    for x in &ns {
        s.add(x);
    }
    let a = s.finish();
    cert.dims.push(("closure algebra".into(), a.dim()));
    Ok(Verdict { value: algebra_is_uba(&a), cert })
}

pub fn is_solvable(g: &GeneratedGroup, cfg: &Config) -> Result<Verdict> {
    let mut v = is_solvable_by_finite(g, cfg)?;
    if !v.value {
        return Ok(v);
    }
    let k = Kernel::new(g, Purpose::W, cfg, false)?;
    let img = &k.image;
    v.value = image_is_solvable(img.ring(), img.degree(), img.gens(), Some(cfg.order_cap))?;
    Ok(v)
}

/// Diagonalizable and unipotent parts: `g = d·u = u·d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanPair {
    pub d: Matrix,
    pub u: Matrix,
}

/// Jordan decomposition by Newton iteration on the squarefree part of the
/// characteristic polynomial.
pub fn jordan(x: &Matrix, f: &Field) -> Result<JordanPair> {
    if f.characteristic() != 0 {
        return Err(Error::Unsupported("Jordan decomposition needs characteristic 0".into()));
    }
    let p = x.charpoly(f).squarefree_part(f)?;
    let dp = p.derivative(f);
    let mut d = x.clone();
    for _ in 0..=x.n() + 1 {
        let pd = d.eval_poly(&p, f);
        if pd.is_zero(f) {
            let di = d.inverse(f).ok_or_else(|| Error::NotInvertible("matrix in jordan".into()))?;
            return Ok(JordanPair { u: di.mul(x, f), d });
        }
        let step = d.eval_poly(&dp, f).inverse(f).expect("p' is a unit modulo p");
        d = d.sub(&pd.mul(&step, f), f);
    }
    unreachable!("Newton iteration converges within log2(n) + 1 steps")
}

fn split_jordan(ns: &[Matrix], f: &Field) -> Result<(Vec<Matrix>, Vec<Matrix>)> {
    let mut ds = Vec::new();
    let mut us = Vec::new();
    for x in ns {
        let j = jordan(x, f)?;
        ds.push(j.d);
        us.push(j.u);
    }
    Ok((ds, us))
}

fn algebras_commute(a: &AlgebraBasis, b: &AlgebraBasis, f: &Field) -> bool {
    a.basis().iter().all(|x| b.basis().iter().all(|y| x.commutes(y, f)))
}

/// `true` iff `G` has a nilpotent subgroup of finite index.
pub fn is_nilpotent_by_finite(g: &GeneratedGroup, cfg: &Config) -> Result<Verdict> {
    require_dedekind(g, "nilpotent-by-finite testing")?;
    let f = g.field().clone();
    let k = Kernel::new(g, Purpose::W, cfg, true)?;
    let mut cert = k.cert();
    let ns = closure_algebra(g, &k, cfg, &mut cert)?;
    // nilpotent-by-finite implies solvable-by-finite, and this test is far cheaper
    // than the Jordan parts of large normal generators
    let mut s = closure_spinner(g);
    for x in &ns {
        s.add(x);
    }
    if !algebra_is_uba(&s.finish()) {
        return Ok(Verdict { value: false, cert });
    }
    let (nd, nu) = split_jordan(&ns, &f)?;
    let mut sd = closure_spinner(g);
    for x in &nd {
        sd.add(x);
    }
    let mut su = unipotent_spinner(g);
    for x in &nu {
        add_unipotent(&mut su, x, &f);
    }
    let (ad, au) = (sd.finish(), su.finish());
    cert.dims.push(("semisimple closure algebra".into(), ad.dim()));
    cert.dims.push(("unipotent closure algebra".into(), au.dim()));
    let value = ad.is_commutative() && au.is_nilpotent() && algebras_commute(&ad, &au, &f);
    Ok(Verdict { value, cert })
}

/// `true` iff `G` has an abelian subgroup of finite index.
pub fn is_abelian_by_finite(g: &GeneratedGroup, cfg: &Config) -> Result<Verdict> {
    require_dedekind(g, "abelian-by-finite testing")?;
    let k = Kernel::new(g, Purpose::W, cfg, true)?;
    let mut cert = k.cert();
    let ns = closure_algebra(g, &k, cfg, &mut cert)?;
    let mut s = closure_spinner(g);
    for x in &ns {
        s.add(x);
    }
    let a = s.finish();
    cert.dims.push(("closure algebra".into(), a.dim()));
    Ok(Verdict { value: a.is_commutative(), cert })
}

/// `true` iff the centre of `G` has finite index: `S` centralizes the normal generators.
pub fn is_central_by_finite(g: &GeneratedGroup, cfg: &Config) -> Result<Verdict> {
    require_char0(g, "central-by-finite testing")?;
    let f = g.field().clone();
    let k = Kernel::new(g, Purpose::Sw, cfg, false)?;
    let mut cert = k.cert();
    for (x, w) in normal_generators_of(g, &k.image, cfg.pres_cap)? {
        cert.normal_generators += 1;
        if let Some(i) = g.gens().iter().position(|s| !s.commutes(&x, &f)) {
            cert.witness = Some(format!("g{} does not commute with {w}", i + 1));
            return Ok(Verdict { value: false, cert });
        }
    }
    Ok(Verdict { value: true, cert })
}

/// Nilpotency in characteristic 0 through the Jordan parts of the generators.
pub fn is_nilpotent(g: &GeneratedGroup, cfg: &Config) -> Result<Verdict> {
    require_char0(g, "nilpotency testing")?;
    let f = g.field().clone();
    let n = g.degree();
    let (sd, su) = split_jordan(g.gens(), &f)?;
    let mut cert = Certificate::default();
    let one = Matrix::identity(n, &f);
    let shifted: Vec<Matrix> = su.iter().map(|u| u.sub(&one, &f)).collect();
    let k_alg = spin(&f, n, &shifted, &[], false);
    cert.dims.push(("unipotent part algebra".into(), k_alg.dim()));
    if !k_alg.is_nilpotent() {
        cert.witness = Some("<S_u> is not unipotent".into());
        return Ok(Verdict { value: false, cert });
    }
    if !sd.iter().all(|x| su.iter().all(|y| x.commutes(y, &f))) {
        cert.witness = Some("[<S_d>, <S_u>] is not trivial".into());
        return Ok(Verdict { value: false, cert });
    }
    let k = Kernel::new(g, Purpose::Sw, cfg, false)?;
    let img = &k.image;
    cert.map = Some(k.map.record());
    cert.image_order = Some(img.order().to_string());
    if !image_is_nilpotent(img.ring(), n, img.gens(), Some(cfg.order_cap))? {
        cert.witness = Some("the congruence image is not nilpotent".into());
        return Ok(Verdict { value: false, cert });
    }
    let h = GeneratedGroup::new(f.clone(), n, sd.clone())?;
    let hcfg = Config { map: None, ..cfg.clone() };
    let hk = Kernel::new(&h, Purpose::Sw, &hcfg, false)?;
    for (x, w) in normal_generators_of(&h, &hk.image, cfg.pres_cap)? {
        cert.normal_generators += 1;
        if !sd.iter().all(|s| s.commutes(&x, &f)) {
            cert.witness = Some(format!("H_ϱ is not central in H: {w}"));
            return Ok(Verdict { value: false, cert });
        }
    }
    Ok(Verdict { value: true, cert })
}

fn is_squarefree(p: &Poly, f: &Field) -> Result<bool> {
    Ok(p.squarefree_part(f)?.degree() == p.degree())
}

/// `true` iff the natural module of `G` is a direct sum of irreducible modules:
/// `⟨N⟩^G` is abelian and consists of diagonalizable matrices.
pub fn is_completely_reducible(g: &GeneratedGroup, cfg: &Config) -> Result<Verdict> {
    require_char0(g, "complete reducibility testing")?;
    let f = g.field().clone();
    let k = Kernel::new(g, Purpose::W, cfg, false)?;
    let mut cert = k.cert();
    let ns = closure_algebra(g, &k, cfg, &mut cert)?;
    let mut s = closure_spinner(g);
    for x in &ns {
        s.add(x);
    }
    let a = s.finish();
    cert.dims.push(("closure algebra".into(), a.dim()));
    let mut value = a.is_commutative();
    if value {
        for b in a.basis() {
            if !is_squarefree(&b.minpoly(&f), &f)? {
                value = false;
                break;
            }
        }
    }
    Ok(Verdict { value, cert })
}

/// Block upper triangular form with completely reducible diagonal part.
#[derive(Clone, Debug)]
pub struct CrDecomposition {
    /// Columns are the new basis: `change^-1 · g · change` is block upper triangular.
    pub change: Matrix,
    pub blocks: Vec<usize>,
    pub conjugated: Vec<Matrix>,
    /// Generators of the diagonal part `π(G)`.
    pub pi_gens: Vec<Matrix>,
    /// `U(G) = 1`, i.e. the enveloping algebra is semisimple.
    pub completely_reducible: bool,
}

fn span_of(vs: impl IntoIterator<Item = Vec<Scalar>>, f: &Field, n: usize) -> Vec<Vec<Scalar>> {
    let mut e = Echelon::new(f.clone(), n);
    vs.into_iter().filter_map(|v| e.insert_reduced(v)).collect()
}

/// Rational roots of a polynomial over `Q`, or `None` when the coefficients are too large
/// for the divisor search.
fn rational_roots(p: &Poly) -> Option<Vec<BigRational>> {
    let f = Field::Rational;
    let mut p = p.clone();
    let mut roots = Vec::new();
    if p.degree()? == 0 {
        return Some(roots);
    }
    if f.is_zero(&p.coeffs()[0]) {
        roots.push(BigRational::zero());
        while f.is_zero(&p.coeffs()[0]) {
            p = Poly::new(p.coeffs()[1..].to_vec(), &f);
        }
    }
    let den = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.as_rational().unwrap().denom()));
    let ints: Vec<BigInt> = p.coeffs().iter().map(|c| (c.as_rational().unwrap() * BigRational::from(den.clone())).to_integer()).collect();
    let a0 = ints[0].abs().to_u64().filter(|&x| x < 1 << 40)?;
    let an = ints.last().unwrap().abs().to_u64().filter(|&x| x < 1 << 40)?;
    let divisors = |m: u64| -> Vec<u64> {
        let mut ds = vec![1u64];
        for (q, e) in int::factorize(m) {
            let cur = ds.clone();
            let mut pw = 1;
            for _ in 0..e {
                pw *= q;
                ds.extend(cur.iter().map(|d| d * pw));
            }
        }
        ds
    };
    let mut cands: Vec<BigRational> = Vec::new();
    for a in divisors(a0) {
        for b in divisors(an) {
            for s in [1i64, -1] {
                let r = BigRational::new(BigInt::from(s) * BigInt::from(a), BigInt::from(b));
                if !cands.contains(&r) {
                    cands.push(r);
                }
            }
        }
    }
    for r in cands {
        if f.is_zero(&p.eval(&Scalar::Rat(r.clone()), &f)) && !roots.contains(&r) {
            roots.push(r);
        }
    }
    roots.sort();
    Some(roots)
}

/// Matrix of `z` restricted to the `z`-invariant subspace with basis `b`.
fn restrict(z: &Matrix, b: &[Vec<Scalar>], f: &Field) -> Matrix {
    let n = z.n();
    let d = b.len();
    let rows: Vec<Vec<Scalar>> = (0..n).map(|r| (0..d).map(|i| b[i][r].clone()).collect()).collect();
    let mut out = Matrix::zero(d, f);
    for (i, bi) in b.iter().enumerate() {
        let c = solve(&rows, &z.mul_vec(bi, f), f).expect("subspace is invariant");
        for (j, x) in c.into_iter().enumerate() {
            out.set(j, i, x);
        }
    }
    out
}

fn kernel_in(m: &Matrix, b: &[Vec<Scalar>], f: &Field) -> Vec<Vec<Scalar>> {
    let n = b.first().map_or(0, |v| v.len());
    let coords = nullspace(&m.rows(), m.n(), f);
    coords
        .into_iter()
        .map(|c| {
            let mut v = vec![f.zero(); n];
            for (ci, bi) in c.iter().zip(b) {
                for (x, y) in v.iter_mut().zip(bi) {
                    *x = f.add(x, &f.mul(ci, y));
                }
            }
            v
        })
        .collect()
}

/// Splits `V` into generalized eigenspaces of central elements of `a` with rational
/// eigenvalues. Each piece is a submodule.
fn split_by_centre(a: &AlgebraBasis, n: usize, f: &Field) -> Vec<Vec<Vec<Scalar>>> {
    let unit = |i: usize| -> Vec<Scalar> { (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect() };
    let mut parts: Vec<Vec<Vec<Scalar>>> = vec![(0..n).map(unit).collect()];
    if *f != Field::Rational {
        return parts;
    }
    let d = a.dim();
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for bj in a.basis() {
        let brs: Vec<Matrix> = a.basis().iter().map(|bi| bi.bracket(bj, f)).collect();
        for e in 0..n * n {
            rows.push(brs.iter().map(|m| m.entries()[e].clone()).collect());
        }
    }
    for c in nullspace(&rows, d, f) {
        let mut z = Matrix::zero(n, f);
        for (ci, b) in c.iter().zip(a.basis()) {
            z = z.add(&b.scale(ci, f), f);
        }
        let mp = z.minpoly(f);
        let Some(roots) = rational_roots(&mp) else { continue };
        let mut next = Vec::new();
        for part in &parts {
            let dim = part.len();
            let zr = restrict(&z, part, f);
            let id = Matrix::identity(dim, f);
            let mut rest = zr.minpoly(f);
            let mut covered = 0;
            for r in &roots {
                let lam = Scalar::Rat(r.clone());
                let shifted = zr.sub(&id.scale(&lam, f), f);
                let Some(pw) = shifted.pow(dim as i64, f) else { continue };
                let ker = kernel_in(&pw, part, f);
                if ker.is_empty() {
                    continue;
                }
                covered += ker.len();
                next.push(ker);
                let lin = Poly::new(vec![f.neg(&lam), f.one()], f);
                while rest.rem(&lin, f).is_zero() {
                    rest = rest.div(&lin, f);
                }
            }
            if covered < dim {
                let rz = zr.eval_poly(&rest, f).pow(dim as i64, f).unwrap_or_else(|| Matrix::zero(dim, f));
                next.push(kernel_in(&rz, part, f));
            }
        }
        parts = next;
    }
    parts
}

/// Sort key: positions of the lowest nonzero coordinates of a reduced basis.
fn bottom_key(part: &[Vec<Scalar>], f: &Field, n: usize) -> Vec<usize> {
    let rev: Vec<Vec<Scalar>> = part.iter().map(|v| v.iter().rev().cloned().collect()).collect();
    let mut e = Echelon::new(f.clone(), n);
    for v in rev {
        e.insert(v);
    }
    let mut k: Vec<usize> = e.pivots().iter().map(|&p| n - 1 - p).collect();
    k.sort();
    k
}

/// Basis change to block upper triangular form whose diagonal part is completely
/// reducible, from the flag `V ⊇ JV ⊇ J²V ⊇ …` (`J` the radical of the enveloping
/// algebra) inside each generalized eigenspace of the centre.
pub fn cr_part(g: &GeneratedGroup) -> Result<CrDecomposition> {
    require_char0(g, "CR part")?;
    let f = g.field().clone();
    let n = g.degree();
    let a = spin(&f, n, g.gens(), &[], true);
    let j = radical(&a)?;
    let mut parts = split_by_centre(&a, n, &f);
    parts.sort_by_key(|p| bottom_key(p, &f, n));
    let mut basis: Vec<Vec<Scalar>> = Vec::new();
    let mut blocks = Vec::new();
    for part in parts {
        let mut levels = vec![part];
        loop {
            let last = levels.last().unwrap();
            let images: Vec<Vec<Scalar>> =
                j.basis().iter().flat_map(|x| last.iter().map(|v| x.mul_vec(v, &f))).collect();
            let next = span_of(images, &f, n);
            if next.is_empty() {
                break;
            }
            levels.push(next);
        }
        let mut e = Echelon::new(f.clone(), n);
        for lvl in levels.iter().rev() {
            let before = basis.len();
            for v in lvl {
                if e.insert(v.clone()) {
                    basis.push(v.clone());
                }
            }
            if basis.len() > before {
                blocks.push(basis.len() - before);
            }
        }
    }
    let mut change = Matrix::zero(n, &f);
    for (c, v) in basis.iter().enumerate() {
        for (r, x) in v.iter().enumerate() {
            change.set(r, c, x.clone());
        }
    }
    let inv = change.inverse(&f).expect("flag basis spans V");
    let mut owner = Vec::with_capacity(n);
    for (b, &s) in blocks.iter().enumerate() {
        owner.extend(std::iter::repeat(b).take(s));
    }
    let conjugated: Vec<Matrix> = g.gens().iter().map(|x| inv.mul(x, &f).mul(&change, &f)).collect();
    let pi_gens = conjugated
        .iter()
        .map(|x| {
            let mut y = x.clone();
            for r in 0..n {
                for c in 0..n {
                    if owner[r] != owner[c] {
                        y.set(r, c, f.zero());
                    }
                }
            }
            y
        })
        .collect();
    Ok(CrDecomposition { change, blocks, conjugated, pi_gens, completely_reducible: j.dim() == 0 })
}

/// For solvable-by-finite `G ≤ GL(n, Q)`: `true` iff `G` is conjugate into `GL(n, Z)`.
pub fn is_integral_sf(g: &GeneratedGroup, cfg: &Config) -> Result<Verdict> {
    if *g.field() != Field::Rational {
        return Err(Error::Unsupported("integrality testing is over Q only".into()));
    }
    let f = Field::Rational;
    let k = Kernel::new(g, Purpose::W, cfg, false)?;
    let mut cert = k.cert();
    for (x, w) in normal_generators_of(g, &k.image, cfg.pres_cap)? {
        cert.normal_generators += 1;
        let cp = x.charpoly(&f);
        let integral = cp.coeffs().iter().all(|c| c.as_rational().unwrap().is_integer());
        let det = x.det(&f);
        let unit = det == Scalar::int(1) || det == Scalar::int(-1);
        if !integral || !unit {
            cert.witness = Some(format!("kernel element {w} is not integral"));
            return Ok(Verdict { value: false, cert });
        }
    }
    Ok(Verdict { value: true, cert })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    fn qg(gens: &[&[&[&str]]]) -> GeneratedGroup {
        let f = q();
        let ms: Vec<Matrix> = gens
            .iter()
            .map(|g| Matrix::from_rows(g.iter().map(|r| r.iter().map(|s| f.parse_scalar(s).unwrap()).collect()).collect()).unwrap())
            .collect();
        GeneratedGroup::new(f, ms[0].n(), ms).unwrap()
    }

    fn cfg() -> Config {
        Config::default()
    }

    fn no_fast() -> Config {
        Config { random_words: 0, ..Config::default() }
    }

    #[test]
    fn finiteness_examples() {
        let rot = qg(&[&[&["0", "-1"], &["1", "0"]]]);
        assert!(is_finite(&rot, &cfg()).unwrap().value);
        assert_eq!(order_of_finite(&rot, &cfg()).unwrap().0, BigUint::from(4u32));
        let t = qg(&[&[&["1", "1"], &["0", "1"]]]);
        assert!(!is_finite(&t, &cfg()).unwrap().value);
        assert!(!is_finite(&t, &no_fast()).unwrap().value);
        let v4 = qg(&[&[&["-1", "0"], &["0", "1"]], &[&["1", "0"], &["0", "-1"]]]);
        assert_eq!(order_of_finite(&v4, &cfg()).unwrap().0, BigUint::from(4u32));
        let inf = qg(&[&[&["0", "-1"], &["1", "0"]], &[&["0", "-1"], &["1", "-1"]]]);
        assert!(!is_finite(&inf, &no_fast()).unwrap().value);
        assert!(order_of_finite(&inf, &cfg()).is_err());
    }

    #[test]
    fn char_p_finiteness() {
        let f2x = Field::rational_functions(Field::Prime(2), 1).unwrap();
        let x = f2x.generator(1).unwrap();
        let d = Matrix::diagonal(&[f2x.one(), x.clone()], &f2x);
        let t = Matrix::transvection(2, 0, 1, &f2x.one(), &f2x);
        let g = GeneratedGroup::new(f2x.clone(), 2, vec![d, t.clone()]).unwrap();
        assert!(!is_finite(&g, &cfg()).unwrap().value);
        // a finite unipotent group over F_2(x): <t12(1), t12(x)> = C2 x C2
        let tx = Matrix::transvection(2, 0, 1, &x, &f2x);
        let h = GeneratedGroup::new(f2x, 2, vec![t, tx]).unwrap();
        assert!(is_finite(&h, &cfg()).unwrap().value);
    }

    #[test]
    fn tits_examples() {
        let h2 = qg(&[&[&["1", "2"], &["0", "1"]], &[&["1", "0"], &["2", "1"]]]);
        assert!(!is_solvable_by_finite(&h2, &cfg()).unwrap().value);
        let tri = qg(&[&[&["2", "1"], &["0", "1/2"]]]);
        assert!(is_solvable_by_finite(&tri, &cfg()).unwrap().value);
        assert!(is_solvable(&tri, &cfg()).unwrap().value);
        let f3x = Field::rational_functions(Field::Prime(3), 1).unwrap();
        let x = f3x.generator(1).unwrap();
        let g = GeneratedGroup::new(
            f3x.clone(),
            2,
            vec![Matrix::diagonal(&[f3x.one(), x], &f3x), Matrix::transvection(2, 0, 1, &f3x.one(), &f3x)],
        )
        .unwrap();
        assert!(is_solvable_by_finite(&g, &cfg()).unwrap().value);
        let f2x = Field::rational_functions(Field::Prime(2), 1).unwrap();
        let x2 = f2x.generator(1).unwrap();
        let g2 = GeneratedGroup::new(
            f2x.clone(),
            2,
            vec![Matrix::diagonal(&[f2x.one(), x2], &f2x), Matrix::transvection(2, 0, 1, &f2x.one(), &f2x)],
        )
        .unwrap();
        assert!(matches!(is_solvable_by_finite(&g2, &cfg()), Err(Error::NoAdmissibleMap(_))));
        let sl2 = qg(&[&[&["0", "-1"], &["1", "0"]], &[&["1", "1"], &["0", "1"]]]);
        assert!(!is_solvable(&sl2, &cfg()).unwrap().value);
        let rot = qg(&[&[&["0", "-1"], &["1", "0"]]]);
        assert!(is_solvable(&rot, &cfg()).unwrap().value);
    }

    #[test]
    fn jordan_examples() {
        let f = q();
        let j = jordan(&Matrix::from_ints(&[vec![2, 1], vec![0, 2]], &f), &f).unwrap();
        assert_eq!(j.d, Matrix::from_ints(&[vec![2, 0], vec![0, 2]], &f));
        assert_eq!(j.u, Matrix::from_rows(vec![vec![Scalar::int(1), Scalar::rat(1, 2)], vec![Scalar::int(0), Scalar::int(1)]]).unwrap());
        let r = Matrix::from_ints(&[vec![0, -1], vec![1, 0]], &f);
        assert!(jordan(&r, &f).unwrap().u.is_identity(&f));
        let t = Matrix::from_ints(&[vec![1, 1], vec![0, 1]], &f);
        assert!(jordan(&t, &f).unwrap().d.is_identity(&f));
    }

    #[test]
    fn refinements() {
        let heis = qg(&[
            &[&["1", "1", "0"], &["0", "1", "0"], &["0", "0", "1"]],
            &[&["1", "0", "1"], &["0", "1", "0"], &["0", "0", "1"]],
            &[&["1", "0", "0"], &["0", "1", "1"], &["0", "0", "1"]],
        ]);
        assert!(is_nilpotent_by_finite(&heis, &cfg()).unwrap().value);
        assert!(!is_abelian_by_finite(&heis, &cfg()).unwrap().value);
        assert!(is_nilpotent(&heis, &cfg()).unwrap().value);
        let bs = qg(&[&[&["2", "0"], &["0", "1"]], &[&["1", "1"], &["0", "1"]]]);
        assert!(!is_nilpotent_by_finite(&bs, &cfg()).unwrap().value);
        assert!(!is_nilpotent(&bs, &cfg()).unwrap().value);
        let rot = qg(&[&[&["0", "-1"], &["1", "0"]]]);
        assert!(is_nilpotent_by_finite(&rot, &cfg()).unwrap().value);
        assert!(is_central_by_finite(&rot, &cfg()).unwrap().value);
        let diag = qg(&[&[&["2", "0"], &["0", "3"]], &[&["5", "0"], &["0", "7"]]]);
        assert!(is_abelian_by_finite(&diag, &cfg()).unwrap().value);
        let h2 = qg(&[&[&["1", "2"], &["0", "1"]], &[&["1", "0"], &["2", "1"]]]);
        assert!(!is_abelian_by_finite(&h2, &cfg()).unwrap().value);
        let cbf = qg(&[&[&["-1", "0"], &["0", "-1"]], &[&["1", "1"], &["0", "1"]]]);
        assert!(is_central_by_finite(&cbf, &cfg()).unwrap().value);
        let sl2 = qg(&[&[&["0", "-1"], &["1", "0"]], &[&["1", "1"], &["0", "1"]]]);
        assert!(!is_central_by_finite(&sl2, &cfg()).unwrap().value);
        let d23 = qg(&[&[&["2", "0"], &["0", "3"]]]);
        assert!(is_nilpotent(&d23, &cfg()).unwrap().value);
    }

    #[test]
    fn complete_reducibility() {
        let d23 = qg(&[&[&["2", "0"], &["0", "3"]]]);
        assert!(is_completely_reducible(&d23, &cfg()).unwrap().value);
        let t = qg(&[&[&["1", "1"], &["0", "1"]]]);
        assert!(!is_completely_reducible(&t, &cfg()).unwrap().value);
        let rot = qg(&[&[&["0", "-1"], &["1", "0"]]]);
        assert!(is_completely_reducible(&rot, &cfg()).unwrap().value);
    }

    #[test]
    fn cr_part_examples() {
        let f = q();
        let tri = qg(&[&[&["2", "1"], &["0", "1/2"]]]);
        let c = cr_part(&tri).unwrap();
        assert_eq!(c.blocks, vec![1, 1]);
        assert_eq!(c.pi_gens, vec![Matrix::diagonal(&[Scalar::int(2), Scalar::rat(1, 2)], &f)]);
        let heis = qg(&[
            &[&["1", "1", "0"], &["0", "1", "0"], &["0", "0", "1"]],
            &[&["1", "0", "0"], &["0", "1", "1"], &["0", "0", "1"]],
        ]);
        let c = cr_part(&heis).unwrap();
        assert_eq!(c.blocks, vec![1, 1, 1]);
        assert!(c.pi_gens.iter().all(|x| x.is_identity(&f)));
        assert!(!c.completely_reducible);
        let d = qg(&[&[&["2", "0"], &["0", "3"]]]);
        let c = cr_part(&d).unwrap();
        assert!(c.change.is_identity(&f));
        assert_eq!(c.pi_gens, d.gens().to_vec());
    }

    #[test]
    fn integrality() {
        let rot = qg(&[&[&["0", "-1"], &["1", "0"]]]);
        let v = is_integral_sf(&rot, &cfg()).unwrap();
        assert!(v.value);
        assert_eq!(v.cert.normal_generators, 0);
        let t = qg(&[&[&["1", "1"], &["0", "1"]]]);
        assert!(is_integral_sf(&t, &cfg()).unwrap().value);
        let d = qg(&[&[&["1/2", "0"], &["0", "2"]]]);
        assert!(!is_integral_sf(&d, &cfg()).unwrap().value);
    }

    #[test]
    fn number_field_group() {
        let k = Field::number_field(Poly::from_ints(&[1, 0, 1])).unwrap();
        let i = k.generator(1).unwrap();
        let g = GeneratedGroup::new(k.clone(), 2, vec![Matrix::diagonal(&[i.clone(), k.neg(&i)], &k)]).unwrap();
        assert!(is_finite(&g, &cfg()).unwrap().value);
        assert_eq!(order_of_finite(&g, &cfg()).unwrap().0, BigUint::from(4u32));
    }
}
