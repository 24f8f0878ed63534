//! Matrix algebras spun from generators: enveloping algebras of normal closures,
//! nilpotency and commutativity tests, and the radical via the trace form.

use crate::error::{Error, Result};
use crate::exact::linalg::{nullspace, Echelon};
use crate::exact::{Field, GeneratedGroup, Matrix};

/// A linearly independent list of matrices spanning a subspace of `Mat(n, F)`.
#[derive(Clone, Debug)]
pub struct AlgebraBasis {
    n: usize,
    field: Field,
    basis: Vec<Matrix>,
    ech: Echelon,
    unital: bool,
    conjugators: usize,
}

impl AlgebraBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    /// Number of matrices the span was closed under conjugation by.
    pub fn conjugators(&self) -> usize {
        self.conjugators
    }

    pub fn contains(&self, x: &Matrix) -> bool {
        self.ech.contains(x.entries())
    }

    pub fn is_commutative(&self) -> bool {
        let f = &self.field;
        self.basis.iter().enumerate().all(|(i, a)| self.basis[i + 1..].iter().all(|b| a.commutes(b, f)))
    }

    /// `A^n = 0`, computed by `n` span multiplications.
    pub fn is_nilpotent(&self) -> bool {
        let f = &self.field;
        let mut power = self.basis.clone();
        for _ in 1..self.n {
            if power.is_empty() {
                return true;
            }
            let mut ech = Echelon::new(f.clone(), self.n * self.n);
            let mut next = Vec::new();
            for p in &power {
                for a in &self.basis {
                    if let Some(v) = ech.insert_reduced(p.mul(a, f).into_entries()) {
                        next.push(Matrix::from_flat(self.n, v));
                    }
                }
            }
            power = next;
        }
        power.is_empty()
    }
}

/// Incremental spinning: the smallest span containing everything added so far that is
/// closed under conjugation by the conjugators and, if `mult`, under multiplication.
#[derive(Clone, Debug)]
pub struct Spinner {
    a: AlgebraBasis,
    conj: Vec<(Matrix, Matrix)>,
    mult: bool,
}

impl Spinner {
    pub fn new(field: &Field, n: usize, conjugators: &[Matrix], unital: bool, mult: bool) -> Spinner {
        let conj = conjugators
            .iter()
            .map(|g| (g.clone(), g.inverse(field).expect("conjugators must be invertible")))
            .collect();
        let a = AlgebraBasis {
            n,
            field: field.clone(),
            basis: Vec::new(),
            ech: Echelon::new(field.clone(), n * n),
            unital,
            conjugators: conjugators.len(),
        };
        let mut s = Spinner { a, conj, mult };
        if unital {
            s.add(&Matrix::identity(n, field));
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Adds `x` and closes up; returns `true` if the span grew.
    pub fn add(&mut self, x: &Matrix) -> bool {
        let f = self.a.field.clone();
        let n = self.a.n;
        let Some(v) = self.a.ech.insert_reduced(x.entries().to_vec()) else {
            return false;
        };
        let mut queue = vec![self.a.basis.len()];
        self.a.basis.push(Matrix::from_flat(n, v));
        while let Some(i) = queue.pop() {
            let b = self.a.basis[i].clone();
            let mut cands = Vec::new();
            for (g, gi) in &self.conj {
                cands.push(g.mul(&b, &f).mul(gi, &f));
            }
            if self.mult {
                for j in 0..self.a.basis.len() {
                    let c = &self.a.basis[j];
                    cands.push(b.mul(c, &f));
                    if j != i {
                        cands.push(c.mul(&b, &f));
                    }
                }
            }
            for c in cands {
                if let Some(v) = self.a.ech.insert_reduced(c.into_entries()) {
                    queue.push(self.a.basis.len());
                    self.a.basis.push(Matrix::from_flat(n, v));
                }
            }
        }
        true
    }

    pub fn basis(&self) -> &AlgebraBasis {
        &self.a
    }

    pub fn finish(self) -> AlgebraBasis {
        self.a
    }
}

/// Smallest span containing `seed` (and `1` if `unital`) closed under multiplication and
/// under conjugation by every conjugator.
pub fn spin(field: &Field, n: usize, seed: &[Matrix], conjugators: &[Matrix], unital: bool) -> AlgebraBasis {
    let mut s = Spinner::new(field, n, conjugators, unital, true);
    for x in seed {
        s.add(x);
    }
    s.finish()
}

/// Two-sided ideal of the algebra `a` generated by `seed` (elements of `a`).
pub fn ideal(a: &AlgebraBasis, seed: &[Matrix]) -> AlgebraBasis {
    let f = &a.field;
    let mut out = AlgebraBasis {
        n: a.n,
        field: f.clone(),
        basis: Vec::new(),
        ech: Echelon::new(f.clone(), a.n * a.n),
        unital: false,
        conjugators: 0,
    };
    let mut queue = Vec::new();
    for x in seed {
        if let Some(v) = out.ech.insert_reduced(x.entries().to_vec()) {
            queue.push(out.basis.len());
            out.basis.push(Matrix::from_flat(a.n, v));
        }
    }
    while let Some(i) = queue.pop() {
        let b = out.basis[i].clone();
        for c in &a.basis {
            for p in [b.mul(c, f), c.mul(&b, f)] {
                if let Some(v) = out.ech.insert_reduced(p.into_entries()) {
                    queue.push(out.basis.len());
                    out.basis.push(Matrix::from_flat(a.n, v));
                }
            }
        }
    }
    out
}

/// Tracker for `⟨N⟩^G` unipotent: the non-unital algebra spun from `t - 1`.
pub fn unipotent_spinner(g: &GeneratedGroup) -> Spinner {
    Spinner::new(g.field(), g.degree(), g.gens(), false, true)
}

/// Tracker for the enveloping algebra of `⟨N⟩^G`.
pub fn closure_spinner(g: &GeneratedGroup) -> Spinner {
    Spinner::new(g.field(), g.degree(), g.gens(), true, true)
}

/// Feeds `t - 1` into a [`unipotent_spinner`].
pub fn add_unipotent(s: &mut Spinner, t: &Matrix, f: &Field) -> bool {
    let one = Matrix::identity(t.n(), f);
    s.add(&t.sub(&one, f))
}

/// Whether `⟨N⟩^G` is unipotent.
pub fn is_unipotent_closure(ns: &[Matrix], g: &GeneratedGroup) -> bool {
    let mut s = unipotent_spinner(g);
    for t in ns {
        add_unipotent(&mut s, t, g.field());
    }
    s.finish().is_nilpotent()
}

/// Whether `⟨N⟩^G` is abelian.
pub fn is_abelian_closure(ns: &[Matrix], g: &GeneratedGroup) -> bool {
    let mut s = closure_spinner(g);
    for t in ns {
        s.add(t);
    }
    s.finish().is_commutative()
}

/// Ideal generated by the ring commutators of basis elements of `a`.
pub fn commutator_ideal(a: &AlgebraBasis) -> AlgebraBasis {
    let f = &a.field;
    let mut comms = Vec::new();
    for (i, x) in a.basis.iter().enumerate() {
        for y in &a.basis[i + 1..] {
            let c = x.bracket(y, f);
            if !c.is_zero(f) {
                comms.push(c);
            }
        }
    }
    ideal(a, &comms)
}

/// Whether the group with enveloping algebra `a` is unipotent-by-abelian.
pub fn algebra_is_uba(a: &AlgebraBasis) -> bool {
    commutator_ideal(a).is_nilpotent()
}

/// Whether `⟨N⟩^G` is unipotent-by-abelian.
pub fn is_uba_closure(ns: &[Matrix], g: &GeneratedGroup) -> bool {
    let mut s = closure_spinner(g);
    for t in ns {
        s.add(t);
    }
    algebra_is_uba(&s.finish())
}

/// Jacobson radical of a unital algebra over a field of characteristic 0: the null space
/// of the trace form `(x, y) -> tr(xy)`.
pub fn radical(a: &AlgebraBasis) -> Result<AlgebraBasis> {
    let f = &a.field;
    if f.characteristic() != 0 {
        return Err(Error::Unsupported("radical via the trace form needs characteristic 0".into()));
    }
    let d = a.dim();
    let gram: Vec<Vec<_>> =
        (0..d).map(|i| (0..d).map(|j| a.basis[i].mul(&a.basis[j], f).trace(f)).collect()).collect();
    let mut out = AlgebraBasis {
        n: a.n,
        field: f.clone(),
        basis: Vec::new(),
        ech: Echelon::new(f.clone(), a.n * a.n),
        unital: false,
        conjugators: 0,
    };
    for c in nullspace(&gram, d, f) {
        let mut x = Matrix::zero(a.n, f);
        for (ci, b) in c.iter().zip(&a.basis) {
            if !f.is_zero(ci) {
                x = x.add(&b.scale(ci, f), f);
            }
        }
        if let Some(v) = out.ech.insert_reduced(x.into_entries()) {
            out.basis.push(Matrix::from_flat(a.n, v));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Scalar;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> Field {
        Field::Rational
    }

    fn m(rows: &[Vec<i64>]) -> Matrix {
        Matrix::from_ints(rows, &q())
    }

    fn e(n: usize, i: usize, j: usize) -> Matrix {
        let mut x = Matrix::zero(n, &q());
        x.set(i, j, Scalar::int(1));
        x
    }

    fn grp(gens: Vec<Matrix>) -> GeneratedGroup {
        let n = gens[0].n();
        GeneratedGroup::new(q(), n, gens).unwrap()
    }

    fn t(n: usize, i: usize, j: usize, k: i64) -> Matrix {
        Matrix::transvection(n, i, j, &Scalar::int(k), &q())
    }

    #[test]
    fn spin_examples() {
        assert_eq!(spin(&q(), 2, &[e(2, 0, 1)], &[], false).dim(), 1);
        assert_eq!(spin(&q(), 2, &[e(2, 0, 1), e(2, 1, 0)], &[], false).dim(), 4);
        assert_eq!(spin(&q(), 2, &[Matrix::identity(2, &q())], &[], true).dim(), 1);
    }

    #[test]
    fn unipotent_closure_examples() {
        assert!(is_unipotent_closure(&[t(2, 0, 1, 3)], &grp(vec![t(2, 0, 1, 1)])));
        let d = Matrix::diagonal(&[Scalar::int(4), Scalar::rat(1, 4)], &q());
        assert!(!is_unipotent_closure(&[d.clone()], &grp(vec![d])));
        let ns = vec![t(2, 0, 1, 2), t(2, 1, 0, 2)];
        assert!(!is_unipotent_closure(&ns, &grp(ns.clone())));
    }

    #[test]
    fn abelian_closure_examples() {
        let d = Matrix::diagonal(&[Scalar::int(2), Scalar::int(3)], &q());
        assert!(is_abelian_closure(&[d.clone()], &grp(vec![d])));
        let sl2 = grp(vec![m(&[vec![0, -1], vec![1, 0]]), m(&[vec![1, 1], vec![0, 1]])]);
        assert!(!is_abelian_closure(&[t(2, 0, 1, 2)], &sl2));
        assert!(is_abelian_closure(&[], &sl2));
    }

    #[test]
    fn uba_examples() {
        let d = Matrix::diagonal(&[Scalar::int(2), Scalar::rat(1, 2)], &q());
        let ns = vec![d, t(2, 0, 1, 1)];
        assert!(is_uba_closure(&ns, &grp(ns.clone())));
        let sl2 = vec![m(&[vec![0, -1], vec![1, 0]]), m(&[vec![1, 1], vec![0, 1]])];
        assert!(!is_uba_closure(&sl2, &grp(sl2.clone())));
        assert!(is_uba_closure(&[], &grp(sl2)));
    }

    #[test]
    fn radical_examples() {
        let f = q();
        let one = Matrix::identity(2, &f);
        let a = spin(&f, 2, &[one.clone(), e(2, 0, 1)], &[], true);
        let r = radical(&a).unwrap();
        assert_eq!(r.dim(), 1);
        assert!(r.contains(&e(2, 0, 1)));
        let full = spin(&f, 2, &[e(2, 0, 1), e(2, 1, 0)], &[], true);
        assert_eq!(radical(&full).unwrap().dim(), 0);
        assert_eq!(radical(&spin(&f, 2, &[], &[], true)).unwrap().dim(), 0);
        assert!(radical(&spin(&Field::Prime(3), 2, &[], &[], true)).is_err());
    }

    #[test]
    fn radical_is_nilpotent_ideal() {
        let f = q();
        // upper triangular 3x3 with a repeated diagonal pattern
        let seed = vec![m(&[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 2]]), m(&[vec![2, 0, 1], vec![0, 2, 0], vec![0, 0, 1]])];
        let a = spin(&f, 3, &seed, &[], true);
        let r = radical(&a).unwrap();
        assert!(r.is_nilpotent());
        for x in r.basis() {
            for y in a.basis() {
                assert!(r.contains(&x.mul(y, &f)));
                assert!(r.contains(&y.mul(x, &f)));
            }
        }
    }

    #[test]
    fn unipotent_certificate_on_conjugates() {
        let f = q();
        let heis = grp(vec![t(3, 0, 1, 1), t(3, 1, 2, 1), t(3, 0, 2, 1)]);
        let ns = vec![t(3, 0, 2, 5), t(3, 0, 1, 3)];
        assert!(is_unipotent_closure(&ns, &heis));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let target = crate::exact::Poly::from_ints(&[-1, 3, -3, 1]);
        for _ in 0..20 {
            let w = heis.evaluate_word(&heis.random_word(&mut rng, 6)).unwrap();
            let wi = w.inverse(&f).unwrap();
            for x in &ns {
                assert_eq!(w.mul(x, &f).mul(&wi, &f).charpoly(&f), target);
            }
        }
    }

    #[test]
    fn nilpotency_matches_strict_upper_forms() {
        let f = q();
        let a = spin(&f, 3, &[e(3, 0, 1), e(3, 1, 2)], &[], false);
        assert_eq!(a.dim(), 3);
        assert!(a.is_nilpotent());
        let b = spin(&f, 3, &[e(3, 0, 1), e(3, 1, 0)], &[], false);
        assert!(!b.is_nilpotent());
    }
}
