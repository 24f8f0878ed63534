//! Deterministic Schreier–Sims for matrix groups over a [`FiniteRing`].
//!
//! The group acts on column vectors; base points are the standard basis vectors, so a
//! matrix fixing every base point is the identity. Every stored element remembers a
//! straight-line program over the input generators, which is expanded into a word on
//! demand.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::One;
use rustc_hash::FxHashMap;

use super::mat::FMat;
use super::ring::FiniteRing;
use crate::error::{Error, Result};
use crate::exact::word::GenWord;

/// Longest word [`Chain::word`] will expand.
pub const MAX_WORD_LEN: usize = 1 << 20;

#[derive(Clone, Debug)]
enum Slp {
    Id,
    Gen(u32),
    Inv(usize),
    Mul(usize, usize),
}

#[derive(Clone, Debug)]
struct Elt {
    m: FMat,
    inv: FMat,
    w: usize,
}

#[derive(Clone, Debug)]
struct Level {
    base: usize,
    gens: Vec<usize>,
    orbit: FxHashMap<u128, usize>,
    pts: Vec<u128>,
    trans: Vec<usize>,
    pending: VecDeque<(usize, usize)>,
}

/// Limits for chain construction.
#[derive(Clone, Debug, Default)]
pub struct ChainOpts {
    /// Abort once the group is known to be larger than this.
    pub cap: Option<u64>,
    /// An upper bound for the order; reaching it ends the computation early.
    pub known_order: Option<BigUint>,
}

#[derive(Clone, Debug)]
pub struct Chain {
    ring: FiniteRing,
    n: usize,
    elts: Vec<Elt>,
    slp: Vec<Slp>,
    levels: Vec<Level>,
    gen_ids: Vec<usize>,
    cap: Option<u64>,
}

fn check_domain(ring: &FiniteRing, n: usize) -> Result<()> {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc
            .checked_mul(ring.size() as u128)
            .filter(|&a| a < 1 << 127)
            .ok_or_else(|| Error::Unsupported(format!("vector domain {}^{n} is too large", ring.describe())))?;
    }
    Ok(())
}

impl Chain {
    pub fn new(ring: FiniteRing, n: usize, gens: &[FMat], opts: &ChainOpts) -> Result<Chain> {
        check_domain(&ring, n)?;
        let id = FMat::identity(n);
        let mut c = Chain {
            ring,
            n,
            elts: vec![Elt { m: id.clone(), inv: id, w: 0 }],
            slp: vec![Slp::Id],
            levels: Vec::new(),
            gen_ids: Vec::new(),
            cap: opts.cap,
        };
        let mut ids = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if g.n != n {
                return Err(Error::InvalidInput(format!("generator {} has the wrong degree", i + 1)));
            }
            let inv = g
                .inverse(&c.ring)
                .ok_or_else(|| Error::NotInvertible(format!("generator {} of the image", i + 1)))?;
            c.slp.push(Slp::Gen(i as u32));
            c.elts.push(Elt { m: g.clone(), inv, w: c.slp.len() - 1 });
            ids.push(c.elts.len() - 1);
        }
        c.gen_ids = ids.clone();
        let first = c.best_first_base(&ids);
        let mut order: Vec<usize> = vec![first];
        order.extend((0..n).filter(|&i| i != first));
        for b in order {
            let key = FMat::pack(&unit(n, b), c.ring.size());
            let mut orbit = FxHashMap::default();
            orbit.insert(key, 0);
            c.levels.push(Level {
                base: b,
                gens: Vec::new(),
                orbit,
                pts: vec![key],
                trans: vec![0],
                pending: VecDeque::new(),
            });
        }
        for &e in &ids {
            if !c.elts[e].m.is_identity() {
                c.add_gen(0, e)?;
            }
        }
        c.run(opts.known_order.as_ref())?;
        Ok(c)
    }

    /// Basis vector with the largest orbit (capped), ties to the smallest index.
    fn best_first_base(&self, ids: &[usize]) -> usize {
        let limit = self.cap.unwrap_or(u64::MAX).min(1 << 22) as usize;
        let mut best = (0usize, 0usize);
        for b in 0..self.n {
            let start = FMat::pack(&unit(self.n, b), self.ring.size());
            let mut seen = rustc_hash::FxHashSet::default();
            seen.insert(start);
            let mut q = vec![start];
            let mut i = 0;
            while i < q.len() && seen.len() < limit {
                let v = FMat::unpack(q[i], self.n, self.ring.size());
                for &e in ids {
                    let k = FMat::pack(&self.elts[e].m.apply(&v, &self.ring), self.ring.size());
                    if seen.insert(k) {
                        q.push(k);
                    }
                }
                i += 1;
            }
            if seen.len() > best.1 {
                best = (b, seen.len());
            }
        }
        best.0
    }

    fn image_key(&self, e: usize, key: u128) -> u128 {
        let v = FMat::unpack(key, self.n, self.ring.size());
        FMat::pack(&self.elts[e].m.apply(&v, &self.ring), self.ring.size())
    }

    fn push_elt(&mut self, m: FMat, inv: FMat, w: Slp) -> usize {
        self.slp.push(w);
        self.elts.push(Elt { m, inv, w: self.slp.len() - 1 });
        self.elts.len() - 1
    }

    fn add_gen(&mut self, l: usize, e: usize) -> Result<()> {
        let old = self.levels[l].pts.len();
        self.levels[l].gens.push(e);
        for pi in 0..old {
            self.levels[l].pending.push_back((pi, e));
        }
        for pi in 0..old {
            self.try_extend(l, pi, e);
        }
        let mut q = old;
        while q < self.levels[l].pts.len() {
            for gi in 0..self.levels[l].gens.len() {
                let g = self.levels[l].gens[gi];
                self.try_extend(l, q, g);
            }
            q += 1;
            if let Some(cap) = self.cap {
                if self.levels[l].pts.len() as u64 > cap {
                    return Err(Error::cap("image order", cap));
                }
            }
        }
        Ok(())
    }

    fn try_extend(&mut self, l: usize, pi: usize, g: usize) {
        let img = self.image_key(g, self.levels[l].pts[pi]);
        if self.levels[l].orbit.contains_key(&img) {
            return;
        }
        let u = self.levels[l].trans[pi];
        let m = self.elts[g].m.mul(&self.elts[u].m, &self.ring);
        let inv = self.elts[u].inv.mul(&self.elts[g].inv, &self.ring);
        let w = Slp::Mul(self.elts[g].w, self.elts[u].w);
        let ne = self.push_elt(m, inv, w);
        let lv = &mut self.levels[l];
        let idx = lv.pts.len();
        lv.orbit.insert(img, idx);
        lv.pts.push(img);
        lv.trans.push(ne);
        for &gg in &lv.gens {
            lv.pending.push_back((idx, gg));
        }
    }

    fn partial_order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::one(), |acc, l| acc * BigUint::from(l.pts.len()))
    }

    fn run(&mut self, known: Option<&BigUint>) -> Result<()> {
        loop {
            if let Some(k) = known {
                if &self.partial_order() == k {
                    return Ok(());
                }
            }
            if let Some(cap) = self.cap {
                if self.partial_order() > BigUint::from(cap) {
                    return Err(Error::cap("image order", cap));
                }
            }
            let Some(l) = (0..self.levels.len()).rev().find(|&l| !self.levels[l].pending.is_empty()) else {
                return Ok(());
            };
            let (pi, s) = self.levels[l].pending.pop_front().unwrap();
            let pt = self.levels[l].pts[pi];
            let u = self.levels[l].trans[pi];
            let img = self.image_key(s, pt);
            let u2 = self.levels[l].trans[self.levels[l].orbit[&img]];
            let r = &self.ring;
            let mut h = self.elts[u2].inv.mul(&self.elts[s].m, r).mul(&self.elts[u].m, r);
            let mut hinv = self.elts[u].inv.mul(&self.elts[s].inv, r).mul(&self.elts[u2].m, r);
            let mut used = Vec::new();
            let mut fail = None;
            for j in l + 1..self.levels.len() {
                let key = FMat::pack(&column(&h, self.levels[j].base), r.size());
                match self.levels[j].orbit.get(&key) {
                    None => {
                        fail = Some(j);
                        break;
                    }
                    Some(&idx) => {
                        let t = self.levels[j].trans[idx];
                        if idx != 0 {
                            h = self.elts[t].inv.mul(&h, r);
                            hinv = hinv.mul(&self.elts[t].m, r);
                            used.push(t);
                        }
                    }
                }
            }
            let Some(j) = fail else {
                debug_assert!(h.is_identity());
                continue;
            };
            // residue h = u_k^-1 ... u_1^-1 u2^-1 s u
            self.slp.push(Slp::Inv(self.elts[u2].w));
            let mut w = self.slp.len() - 1;
            self.slp.push(Slp::Mul(w, self.elts[s].w));
            w = self.slp.len() - 1;
            self.slp.push(Slp::Mul(w, self.elts[u].w));
            w = self.slp.len() - 1;
            for t in used {
                self.slp.push(Slp::Inv(self.elts[t].w));
                let iw = self.slp.len() - 1;
                self.slp.push(Slp::Mul(iw, w));
                w = self.slp.len() - 1;
            }
            self.elts.push(Elt { m: h, inv: hinv, w });
            let e = self.elts.len() - 1;
            for k in l + 1..=j {
                self.add_gen(k, e)?;
            }
        }
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> BigUint {
        self.partial_order()
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.iter().all(|l| l.pts.len() == 1)
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.pts.len()).collect()
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// The generators (input ones first, then those added by [`Chain::extend`]).
    pub fn generators(&self) -> Vec<FMat> {
        self.gen_ids.iter().map(|&e| self.elts[e].m.clone()).collect()
    }

    /// Transversal indices `t` with `x = u_{0,t0} · u_{1,t1} · …`, or `None` for non-members.
    fn sift(&self, x: &FMat) -> Option<Vec<usize>> {
        if x.n != self.n {
            return None;
        }
        let r = &self.ring;
        let mut h = x.clone();
        let mut out = Vec::with_capacity(self.n);
        for lv in &self.levels {
            let key = FMat::pack(&column(&h, lv.base), r.size());
            let idx = *lv.orbit.get(&key)?;
            let t = lv.trans[idx];
            if idx != 0 {
                h = self.elts[t].inv.mul(&h, r);
            }
            out.push(t);
        }
        h.is_identity().then_some(out)
    }

    pub fn contains(&self, x: &FMat) -> bool {
        self.sift(x).is_some()
    }

    /// A word over the input generators evaluating to `x`, or `None` if `x` is not a member.
    pub fn word(&self, x: &FMat) -> Result<Option<GenWord>> {
        let Some(ts) = self.sift(x) else {
            return Ok(None);
        };
        let mut memo = FxHashMap::default();
        let mut w = GenWord::empty();
        for t in ts {
            w = w.concat(&self.expand(self.elts[t].w, &mut memo)?);
            if w.len() > MAX_WORD_LEN {
                return Err(Error::cap("membership word length", MAX_WORD_LEN as u64));
            }
        }
        Ok(Some(w))
    }

    fn expand(&self, id: usize, memo: &mut FxHashMap<usize, GenWord>) -> Result<GenWord> {
        if let Some(w) = memo.get(&id) {
            return Ok(w.clone());
        }
        let w = match self.slp[id] {
            Slp::Id => GenWord::empty(),
            Slp::Gen(i) => GenWord::letter(i as usize, 1),
            Slp::Inv(a) => self.expand(a, memo)?.inverse(),
            Slp::Mul(a, b) => {
                let wa = self.expand(a, memo)?;
                let wb = self.expand(b, memo)?;
                if wa.len() + wb.len() > MAX_WORD_LEN {
                    return Err(Error::cap("membership word length", MAX_WORD_LEN as u64));
                }
                wa.concat(&wb)
            }
        };
        memo.insert(id, w.clone());
        Ok(w)
    }

    /// Adds `x` as the next generator; returns `false` (and adds nothing) if it was
    /// already a member.
    pub fn extend(&mut self, x: &FMat) -> Result<bool> {
        if self.contains(x) {
            return Ok(false);
        }
        let inv = x.inverse(&self.ring).ok_or_else(|| Error::NotInvertible("chain extension".into()))?;
        let e = self.push_elt(x.clone(), inv, Slp::Gen(self.gen_ids.len() as u32));
        self.gen_ids.push(e);
        self.add_gen(0, e)?;
        self.run(None)?;
        Ok(true)
    }

    /// All elements, as products of transversal elements (mixed radix order).
    pub fn elements(&self) -> impl Iterator<Item = FMat> + '_ {
        let sizes: Vec<usize> = self.levels.iter().map(|l| l.pts.len()).collect();
        let mut idx = vec![0usize; sizes.len()];
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let mut m = FMat::identity(self.n);
            for (l, &i) in idx.iter().enumerate().rev() {
                if i != 0 {
                    m = self.elts[self.levels[l].trans[i]].m.mul(&m, &self.ring);
                }
            }
            // advance
            let mut k = 0;
            loop {
                if k == idx.len() {
                    done = true;
                    break;
                }
                idx[k] += 1;
                if idx[k] < sizes[k] {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            Some(m)
        })
    }

    /// Debugging dump: base, orbit sizes and number of strong generators per level.
    pub fn dump(&self) -> String {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, l)| format!("level {i}: base e{} orbit {} gens {}", l.base + 1, l.pts.len(), l.gens.len()))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn column(m: &FMat, j: usize) -> Vec<u32> {
    (0..m.n).map(|i| m.get(i, j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rustc_hash::FxHashSet;

    fn bfs_order(r: &FiniteRing, gens: &[FMat]) -> usize {
        let n = gens[0].n;
        let mut seen = FxHashSet::default();
        seen.insert(FMat::identity(n));
        let mut q = vec![FMat::identity(n)];
        let mut i = 0;
        while i < q.len() {
            for g in gens {
                let x = q[i].mul(g, r);
                if seen.insert(x.clone()) {
                    q.push(x);
                }
            }
            i += 1;
        }
        q.len()
    }

    fn sl2(r: &FiniteRing) -> Vec<FMat> {
        vec![FMat::from_rows(&[vec![0, -1], vec![1, 0]], r), FMat::from_rows(&[vec![1, 1], vec![0, 1]], r)]
    }

    #[test]
    fn orders_match_enumeration() {
        for m in [2u64, 3, 4, 5, 6, 7, 8, 9, 12] {
            let r = FiniteRing::residues(m).unwrap();
            let g = sl2(&r);
            let c = Chain::new(r.clone(), 2, &g, &ChainOpts::default()).unwrap();
            assert_eq!(c.order(), BigUint::from(bfs_order(&r, &g)), "m = {m}");
        }
        let r = FiniteRing::residues(2).unwrap();
        let t = |i: usize, j: usize| {
            let mut m = FMat::identity(3);
            m.d[i * 3 + j] = 1;
            m
        };
        let g = vec![t(0, 1), t(1, 2), t(2, 0)];
        let c = Chain::new(r.clone(), 3, &g, &ChainOpts::default()).unwrap();
        assert_eq!(c.order(), BigUint::from(168u32));
        assert_eq!(c.elements().count(), 168);
        let all: FxHashSet<FMat> = c.elements().collect();
        assert_eq!(all.len(), 168);
    }

    #[test]
    fn membership_words() {
        let r = FiniteRing::residues(5).unwrap();
        let g = sl2(&r);
        let c = Chain::new(r.clone(), 2, &g, &ChainOpts::default()).unwrap();
        for x in c.elements() {
            let w = c.word(&x).unwrap().unwrap();
            let mut acc = FMat::identity(2);
            for &(i, e) in w.letters() {
                let m = if e > 0 { g[i as usize].clone() } else { g[i as usize].inverse(&r).unwrap() };
                acc = acc.mul(&m, &r);
            }
            assert_eq!(acc, x);
        }
        let d = FMat::from_rows(&[vec![2, 0], vec![0, 1]], &r);
        assert!(c.word(&d).unwrap().is_none());
    }

    #[test]
    fn caps_and_known_order() {
        let r = FiniteRing::residues(7).unwrap();
        let g = sl2(&r);
        let opts = ChainOpts { cap: Some(100), known_order: None };
        assert!(matches!(Chain::new(r.clone(), 2, &g, &opts), Err(Error::CapExceeded { .. })));
        let opts = ChainOpts { cap: None, known_order: Some(BigUint::from(336u32)) };
        let c = Chain::new(r.clone(), 2, &g, &opts).unwrap();
        assert_eq!(c.order(), BigUint::from(336u32));
        assert!(c.contains(&FMat::from_rows(&[vec![3, 0], vec![0, 5]], &r)));
    }

    #[test]
    fn extension_and_trivial() {
        let r = FiniteRing::residues(3).unwrap();
        let mut c = Chain::new(r.clone(), 2, &[FMat::identity(2)], &ChainOpts::default()).unwrap();
        assert!(c.is_trivial());
        assert!(c.extend(&FMat::from_rows(&[vec![1, 1], vec![0, 1]], &r)).unwrap());
        assert_eq!(c.order(), BigUint::from(3u32));
        assert!(c.extend(&FMat::from_rows(&[vec![1, 0], vec![1, 1]], &r)).unwrap());
        assert_eq!(c.order(), BigUint::from(24u32));
    }
}
