//! Presentations of finite images from a spanning tree of the Cayley graph, and the
//! lifting of their relators to normal generators of the congruence kernel.

use num_bigint::BigUint;
use rustc_hash::{FxHashMap, FxHashSet};

use super::image::{build_image, FiniteImage};
use super::mat::FMat;
use super::ring::FiniteRing;
use crate::congruence::CongruenceMap;
use crate::error::{Error, Result};
use crate::exact::{GenWord, GeneratedGroup, Matrix};

/// Default cap on image orders for presentations.
pub const DEFAULT_PRESENTATION_CAP: u64 = 100_000;

/// An edge of the Cayley graph `u -> u·g`.
struct Edge {
    from: usize,
    gen: usize,
    to: usize,
    tree: bool,
}

/// Breadth-first walk of the right Cayley graph, one edge at a time.
struct CayleyBfs {
    ring: FiniteRing,
    gens: Vec<FMat>,
    index: FxHashMap<FMat, usize>,
    nodes: Vec<FMat>,
    parent: Vec<Option<(usize, usize)>>,
    cur: usize,
    next_gen: usize,
}

impl CayleyBfs {
    fn new(ring: FiniteRing, n: usize, gens: Vec<FMat>) -> CayleyBfs {
        let id = FMat::identity(n);
        let mut index = FxHashMap::default();
        index.insert(id.clone(), 0);
        CayleyBfs { ring, gens, index, nodes: vec![id], parent: vec![None], cur: 0, next_gen: 0 }
    }

    fn next_edge(&mut self) -> Option<Edge> {
        if self.gens.is_empty() {
            return None;
        }
        if self.next_gen == self.gens.len() {
            self.next_gen = 0;
            self.cur += 1;
        }
        if self.cur >= self.nodes.len() {
            return None;
        }
        let (u, g) = (self.cur, self.next_gen);
        self.next_gen += 1;
        let x = self.nodes[u].mul(&self.gens[g], &self.ring);
        if let Some(&v) = self.index.get(&x) {
            return Some(Edge { from: u, gen: g, to: v, tree: false });
        }
        let v = self.nodes.len();
        self.index.insert(x.clone(), v);
        self.nodes.push(x);
        self.parent.push(Some((u, g)));
        Some(Edge { from: u, gen: g, to: v, tree: true })
    }

    fn tree_word(&self, mut v: usize) -> GenWord {
        let mut letters = Vec::new();
        while let Some((u, g)) = self.parent[v] {
            letters.push((g as u32, 1i8));
            v = u;
        }
        letters.reverse();
        GenWord(letters)
    }
}

/// Lazily produced relators of the presentation of a finite image on its generators.
///
/// Each non-tree edge `u -> v` labelled `g` gives `word(u)·g·word(v)^-1`; once the walk
/// is exhausted the emitted words are a complete set of defining relators.
pub struct CayleyRelators {
    bfs: CayleyBfs,
    emitted: usize,
    exhausted: bool,
}

impl CayleyRelators {
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn emitted(&self) -> usize {
        self.emitted
    }
}

impl Iterator for CayleyRelators {
    type Item = GenWord;

    fn next(&mut self) -> Option<GenWord> {
        loop {
            let Some(e) = self.bfs.next_edge() else {
                self.exhausted = true;
                return None;
            };
            if e.tree {
                continue;
            }
            let w = self.bfs.tree_word(e.from).concat(&GenWord::letter(e.gen, 1)).concat(&self.bfs.tree_word(e.to).inverse());
            self.emitted += 1;
            return Some(w);
        }
    }
}

fn check_cap(f: &FiniteImage, cap: u64) -> Result<()> {
    if f.order() > BigUint::from(cap) {
        return Err(Error::cap("image order for a presentation", cap));
    }
    Ok(())
}

/// Relator stream of `f`; fails if `|f|` exceeds `cap`.
pub fn cayley_relators(f: &FiniteImage, cap: u64) -> Result<CayleyRelators> {
    check_cap(f, cap)?;
    Ok(CayleyRelators {
        bfs: CayleyBfs::new(f.ring().clone(), f.degree(), f.gens().to_vec()),
        emitted: 0,
        exhausted: false,
    })
}

/// Stream of lifted relators: elements of `G ∩ ker φ` whose normal closure in `G` is the
/// whole kernel. Identity lifts and repeats are skipped.
pub struct NormalGenerators<'a> {
    g: &'a GeneratedGroup,
    bfs: CayleyBfs,
    lift: Vec<Matrix>,
    lift_inv: Vec<Matrix>,
    seen: FxHashSet<Matrix>,
    exhausted: bool,
}

impl NormalGenerators<'_> {
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }
}

impl Iterator for NormalGenerators<'_> {
    type Item = (Matrix, GenWord);

    fn next(&mut self) -> Option<(Matrix, GenWord)> {
        let f = self.g.field().clone();
        loop {
            let Some(e) = self.bfs.next_edge() else {
                self.exhausted = true;
                return None;
            };
            let s = &self.g.gens()[e.gen];
            if e.tree {
                let l = self.lift[e.from].mul(s, &f);
                let li = self.g.invs()[e.gen].mul(&self.lift_inv[e.from], &f);
                self.lift.push(l);
                self.lift_inv.push(li);
                continue;
            }
            let x = self.lift[e.from].mul(s, &f).mul(&self.lift_inv[e.to], &f);
            if x.is_identity(&f) || !self.seen.insert(x.clone()) {
                continue;
            }
            let w = self.bfs.tree_word(e.from).concat(&GenWord::letter(e.gen, 1)).concat(&self.bfs.tree_word(e.to).inverse());
            return Some((x, w));
        }
    }
}

/// Normal generators of `G_ϱ = G ∩ ker φ_m` from the image presentation.
pub fn normal_generators<'a>(
    g: &'a GeneratedGroup,
    m: &CongruenceMap,
    order_cap: u64,
    pres_cap: u64,
) -> Result<NormalGenerators<'a>> {
    let img = build_image(g, m, order_cap)?;
    normal_generators_of(g, &img, pres_cap)
}

/// As [`normal_generators`] for an image that is already built.
pub fn normal_generators_of<'a>(g: &'a GeneratedGroup, img: &FiniteImage, pres_cap: u64) -> Result<NormalGenerators<'a>> {
    check_cap(img, pres_cap)?;
    let id = g.identity();
    Ok(NormalGenerators {
        g,
        bfs: CayleyBfs::new(img.ring().clone(), img.degree(), img.gens().to_vec()),
        lift: vec![id.clone()],
        lift_inv: vec![id],
        seen: FxHashSet::default(),
        exhausted: false,
    })
}
