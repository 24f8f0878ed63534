//! Congruence images of generated groups, and subgroup computations inside them.

use num_bigint::BigUint;
use num_traits::One;

use super::chain::{Chain, ChainOpts};
use super::mat::FMat;
use super::ring::FiniteRing;
use crate::congruence::{reduce_generators, CongruenceMap};
use crate::error::{Error, Result};
use crate::exact::field::Field;
use crate::exact::{GenWord, GeneratedGroup, Matrix};

/// Default cap on image orders.
pub const DEFAULT_ORDER_CAP: u64 = 10_000_000;

/// The image `φ(G)` with a stabilizer chain over the image generators.
#[derive(Clone, Debug)]
pub struct FiniteImage {
    n: usize,
    ring: FiniteRing,
    gens: Vec<FMat>,
    words: Vec<GenWord>,
    chain: Chain,
}

/// Reduces a matrix over a finite field to table indices.
pub fn to_fmat(m: &Matrix, target: &Field, ring: &FiniteRing) -> FMat {
    FMat { n: m.n(), d: m.entries().iter().map(|s| ring.from_scalar(target, s)).collect() }
}

/// Builds `φ_m(G)` for a congruence map onto a finite field.
pub fn build_image(g: &GeneratedGroup, m: &CongruenceMap, cap: u64) -> Result<FiniteImage> {
    let ring = FiniteRing::from_field(&m.target)?;
    let gens: Vec<FMat> = reduce_generators(g, m)?.iter().map(|x| to_fmat(x, &m.target, &ring)).collect();
    FiniteImage::new(ring, g.degree(), gens, &ChainOpts { cap: Some(cap), known_order: None })
}

impl FiniteImage {
    /// Image generated by `gens`; generator `i` is paired with the word `g_{i+1}`.
    pub fn new(ring: FiniteRing, n: usize, gens: Vec<FMat>, opts: &ChainOpts) -> Result<FiniteImage> {
        let chain = Chain::new(ring.clone(), n, &gens, opts)?;
        let words = (0..gens.len()).map(|i| GenWord::letter(i, 1)).collect();
        Ok(FiniteImage { n, ring, gens, words, chain })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn gens(&self) -> &[FMat] {
        &self.gens
    }

    /// Source words of the image generators.
    pub fn gen_words(&self) -> &[GenWord] {
        &self.words
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn order(&self) -> BigUint {
        self.chain.order()
    }

    pub fn contains(&self, x: &FMat) -> bool {
        self.chain.contains(x)
    }

    /// Evaluates a word over the image generators.
    pub fn evaluate(&self, w: &GenWord) -> Result<FMat> {
        let mut acc = FMat::identity(self.n);
        for &(i, e) in w.letters() {
            let g = self
                .gens
                .get(i as usize)
                .ok_or_else(|| Error::InvalidInput(format!("word uses generator {}", i + 1)))?;
            let m = if e > 0 { g.clone() } else { g.inverse(&self.ring).expect("image generators are invertible") };
            acc = acc.mul(&m, &self.ring);
        }
        Ok(acc)
    }
}

/// A word over the image generators for `x`, or `None` if `x` is not in the image.
pub fn image_membership(f: &FiniteImage, x: &FMat) -> Result<Option<GenWord>> {
    f.chain.word(x)
}

/// `x y x^-1 y^-1`.
pub fn commutator(x: &FMat, y: &FMat, r: &FiniteRing) -> FMat {
    let xi = x.inverse(r).expect("group element");
    let yi = y.inverse(r).expect("group element");
    x.mul(y, r).mul(&xi, r).mul(&yi, r)
}

/// Normal closure of `xs` in `⟨ambient⟩`.
pub fn normal_closure(r: &FiniteRing, n: usize, xs: &[FMat], ambient: &[FMat], cap: Option<u64>) -> Result<Chain> {
    let opts = ChainOpts { cap, known_order: None };
    let mut k = Chain::new(r.clone(), n, xs, &opts)?;
    let mut todo: Vec<FMat> = xs.iter().filter(|x| !x.is_identity()).cloned().collect();
    let amb: Vec<(FMat, FMat)> =
        ambient.iter().map(|y| (y.clone(), y.inverse(r).expect("group element"))).collect();
    while let Some(x) = todo.pop() {
        for (y, yi) in &amb {
            let c = y.mul(&x, r).mul(yi, r);
            if k.extend(&c)? {
                todo.push(c);
            }
        }
    }
    Ok(k)
}

/// Derived subgroup of `⟨gens⟩`.
pub fn derived_subgroup(r: &FiniteRing, n: usize, gens: &[FMat], cap: Option<u64>) -> Result<Chain> {
    let mut comms = Vec::new();
    for (i, x) in gens.iter().enumerate() {
        for y in &gens[i + 1..] {
            comms.push(commutator(x, y, r));
        }
    }
    normal_closure(r, n, &comms, gens, cap)
}

/// Whether `⟨gens⟩` is solvable, via the derived series.
pub fn is_solvable(r: &FiniteRing, n: usize, gens: &[FMat], cap: Option<u64>) -> Result<bool> {
    let mut cur = gens.to_vec();
    let mut order = Chain::new(r.clone(), n, &cur, &ChainOpts { cap, known_order: None })?.order();
    loop {
        if order.is_one() {
            return Ok(true);
        }
        let d = derived_subgroup(r, n, &cur, cap)?;
        let o = d.order();
        if o == order {
            return Ok(false);
        }
        order = o;
        cur = d.generators();
    }
}

/// Whether `⟨gens⟩` is nilpotent, via the lower central series.
pub fn is_nilpotent(r: &FiniteRing, n: usize, gens: &[FMat], cap: Option<u64>) -> Result<bool> {
    let mut cur = gens.to_vec();
    let mut order = Chain::new(r.clone(), n, &cur, &ChainOpts { cap, known_order: None })?.order();
    loop {
        if order.is_one() {
            return Ok(true);
        }
        let mut comms = Vec::new();
        for x in &cur {
            for y in gens {
                comms.push(commutator(x, y, r));
            }
        }
        let next = normal_closure(r, n, &comms, gens, cap)?;
        let o = next.order();
        if o == order {
            return Ok(false);
        }
        order = o;
        cur = next.generators();
    }
}

/// Whether `⟨gens⟩` is abelian.
pub fn is_abelian(r: &FiniteRing, gens: &[FMat]) -> bool {
    gens.iter().enumerate().all(|(i, x)| gens[i + 1..].iter().all(|y| x.mul(y, r) == y.mul(x, r)))
}

/// Normalizer of `h` inside `ambient`, by running over every element of `ambient`.
pub fn normalizer(h: &Chain, ambient: &Chain, cap: u64) -> Result<Chain> {
    if ambient.order() > BigUint::from(cap) {
        return Err(Error::cap("normalizer enumeration", cap));
    }
    let r = ambient.ring();
    let hg = h.generators();
    let mut out = Chain::new(r.clone(), h.degree(), &hg, &ChainOpts::default())?;
    for x in ambient.elements() {
        if out.contains(&x) {
            continue;
        }
        let xi = x.inverse(r).expect("group element");
        if hg.iter().all(|y| h.contains(&x.mul(y, r).mul(&xi, r))) {
            out.extend(&x)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::{ring_of_definition, select_sw_map};
    use crate::exact::field::Field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qgroup(gens: &[Vec<Vec<i64>>]) -> GeneratedGroup {
        let f = Field::Rational;
        GeneratedGroup::new(f.clone(), gens[0].len(), gens.iter().map(|g| Matrix::from_ints(g, &f)).collect())
            .unwrap()
    }

    fn image_mod(g: &GeneratedGroup, p: u64) -> FiniteImage {
        let r = ring_of_definition(g).unwrap();
        let avoid: Vec<u64> = crate::exact::int::primes_up_to(p - 1);
        let m = select_sw_map(&r, &avoid).unwrap();
        assert_eq!(m.p, Some(p));
        build_image(g, &m, DEFAULT_ORDER_CAP).unwrap()
    }

    #[test]
    fn small_image_orders() {
        let rot = qgroup(&[vec![vec![0, -1], vec![1, 0]]]);
        assert_eq!(image_mod(&rot, 5).order(), BigUint::from(4u32));
        let sl2 = qgroup(&[vec![vec![0, -1], vec![1, 0]], vec![vec![1, 1], vec![0, 1]]]);
        assert_eq!(image_mod(&sl2, 3).order(), BigUint::from(24u32));
        let r = FiniteRing::residues(2).unwrap();
        let mut gens = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let mut m = vec![vec![0i64; 3]; 3];
                    for (k, row) in m.iter_mut().enumerate() {
                        row[k] = 1;
                    }
                    m[i][j] = 2;
                    gens.push(FMat::from_rows(&m, &r));
                }
            }
        }
        let img = FiniteImage::new(r, 3, gens, &ChainOpts::default()).unwrap();
        assert!(img.order().is_one());
    }

    #[test]
    fn membership_examples_and_random_words() {
        let sl2 = qgroup(&[vec![vec![0, -1], vec![1, 0]], vec![vec![1, 1], vec![0, 1]]]);
        let img = image_mod(&sl2, 5);
        let r = img.ring().clone();
        assert_eq!(image_membership(&img, &FMat::identity(2)).unwrap().unwrap(), GenWord::empty());
        for (i, g) in img.gens().iter().enumerate() {
            assert_eq!(image_membership(&img, g).unwrap().unwrap(), GenWord::letter(i, 1));
        }
        let bad = FMat::from_rows(&[vec![2, 0], vec![0, 1]], &r);
        assert!(image_membership(&img, &bad).unwrap().is_none());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let w = sl2.random_word(&mut rng, 30);
            let x = img.evaluate(&w).unwrap();
            let v = image_membership(&img, &x).unwrap().unwrap();
            assert_eq!(img.evaluate(&v).unwrap(), x);
        }
    }

    #[test]
    fn solvable_and_nilpotent() {
        let r = FiniteRing::residues(5).unwrap();
        let sl2 = vec![FMat::from_rows(&[vec![0, -1], vec![1, 0]], &r), FMat::from_rows(&[vec![1, 1], vec![0, 1]], &r)];
        assert!(!is_solvable(&r, 2, &sl2, None).unwrap());
        let r3 = FiniteRing::residues(3).unwrap();
        let sl23 =
            vec![FMat::from_rows(&[vec![0, -1], vec![1, 0]], &r3), FMat::from_rows(&[vec![1, 1], vec![0, 1]], &r3)];
        assert!(is_solvable(&r3, 2, &sl23, None).unwrap());
        assert!(!is_nilpotent(&r3, 2, &sl23, None).unwrap());
        let b = vec![FMat::from_rows(&[vec![2, 0], vec![0, 3]], &r), FMat::from_rows(&[vec![1, 1], vec![0, 1]], &r)];
        assert!(is_solvable(&r, 2, &b, None).unwrap());
        assert!(!is_nilpotent(&r, 2, &b, None).unwrap());
        let q8 = vec![FMat::from_rows(&[vec![0, -1], vec![1, 0]], &r3), FMat::from_rows(&[vec![1, 1], vec![1, -1]], &r3)];
        assert_eq!(Chain::new(r3.clone(), 2, &q8, &ChainOpts::default()).unwrap().order(), BigUint::from(8u32));
        assert!(is_nilpotent(&r3, 2, &q8, None).unwrap());
        assert!(!is_abelian(&r3, &q8));
    }

    #[test]
    fn normalizer_of_sylow_in_sl3_mod_2() {
        let r = FiniteRing::residues(2).unwrap();
        let t = |i: usize, j: usize| {
            let mut m = FMat::identity(3);
            m.d[i * 3 + j] = 1;
            m
        };
        let g = Chain::new(r.clone(), 3, &[t(0, 1), t(1, 2), t(2, 0)], &ChainOpts::default()).unwrap();
        let up = Chain::new(r.clone(), 3, &[t(0, 1), t(1, 2)], &ChainOpts::default()).unwrap();
        assert_eq!(up.order(), BigUint::from(8u32));
        // brute force: count x with x U x^-1 = U
        let ug: Vec<FMat> = up.generators();
        let count = g
            .elements()
            .filter(|x| {
                let xi = x.inverse(&r).unwrap();
                ug.iter().all(|y| up.contains(&x.mul(y, &r).mul(&xi, &r)))
            })
            .count();
        let nz = normalizer(&up, &g, 1000).unwrap();
        assert_eq!(nz.order(), BigUint::from(count));
        assert_eq!(count, 8);
        let nc = normal_closure(&r, 3, &[t(0, 1)], &g.generators(), None).unwrap();
        assert_eq!(nc.order(), BigUint::from(168u32));
    }
}
