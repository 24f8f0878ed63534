//! Dense recursive multivariate polynomials `K[x_1, ..., x_k]`.
//!
//! A polynomial of level `k` is a list of level `k-1` coefficients in `x_k`; level 0 is a
//! scalar of the base field. The level and the base field are passed in by the caller.

use super::field::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MPoly {
    C(Scalar),
    V(Vec<MPoly>),
}

impl MPoly {
    /// Zero at level `k >= 1`.
    pub fn zero(k: usize) -> MPoly {
        assert!(k >= 1, "level-0 zero needs a base field");
        MPoly::V(Vec::new())
    }

    pub fn zero_in(base: &Field, k: usize) -> MPoly {
        if k == 0 {
            MPoly::C(base.zero())
        } else {
            MPoly::V(Vec::new())
        }
    }

    pub fn constant(c: Scalar, k: usize) -> MPoly {
        if k == 0 {
            return MPoly::C(c);
        }
        // constant zero has to be the empty list
        if is_zero_scalar(&c) {
            return MPoly::V(Vec::new());
        }
        MPoly::V(vec![MPoly::constant(c, k - 1)])
    }

    pub fn one(base: &Field, k: usize) -> MPoly {
        MPoly::constant(base.one(), k)
    }

    /// The variable `x_i`, `1 <= i <= k`.
    pub fn var(i: usize, k: usize, base: &Field) -> MPoly {
        assert!(i >= 1 && i <= k);
        if i == k {
            MPoly::V(vec![MPoly::zero_in(base, k - 1), MPoly::one(base, k - 1)])
        } else {
            MPoly::V(vec![MPoly::var(i, k - 1, base)])
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            MPoly::C(s) => is_zero_scalar(s),
            MPoly::V(c) => c.is_empty(),
        }
    }

    pub fn is_one(&self, base: &Field, k: usize) -> bool {
        *self == MPoly::one(base, k)
    }

    fn coeffs(&self) -> &[MPoly] {
        match self {
            MPoly::V(c) => c,
            MPoly::C(_) => panic!("level mismatch"),
        }
    }

    fn scalar(&self) -> &Scalar {
        match self {
            MPoly::C(s) => s,
            MPoly::V(_) => panic!("level mismatch"),
        }
    }

    /// Degree in the main variable (`None` for zero).
    pub fn degree(&self) -> Option<usize> {
        match self {
            MPoly::C(s) => (!is_zero_scalar(s)).then_some(0),
            MPoly::V(c) => c.len().checked_sub(1),
        }
    }

    /// Total degree (`None` for zero).
    pub fn total_degree(&self) -> Option<usize> {
        match self {
            MPoly::C(s) => (!is_zero_scalar(s)).then_some(0),
            MPoly::V(c) => c
                .iter()
                .enumerate()
                .filter_map(|(i, x)| x.total_degree().map(|d| d + i))
                .max(),
        }
    }

    /// Leading scalar in the recursive (lexicographic) order.
    pub fn base_lc(&self, k: usize) -> &Scalar {
        match self {
            MPoly::C(s) => s,
            MPoly::V(c) => c.last().expect("base_lc of zero").base_lc(k - 1),
        }
    }

    /// Constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self {
            MPoly::C(s) => Some(s.clone()),
            MPoly::V(c) => match c.len() {
                0 => None,
                1 => c[0].as_constant(),
                _ => None,
            },
        }
    }

    fn trimmed(mut c: Vec<MPoly>) -> MPoly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        MPoly::V(c)
    }

    pub fn add(&self, o: &MPoly, base: &Field, k: usize) -> MPoly {
        if k == 0 {
            return MPoly::C(base.add(self.scalar(), o.scalar()));
        }
        let (a, b) = (self.coeffs(), o.coeffs());
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) => x.add(y, base, k - 1),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            });
        }
        MPoly::trimmed(out)
    }

    pub fn neg(&self, base: &Field, k: usize) -> MPoly {
        if k == 0 {
            return MPoly::C(base.neg(self.scalar()));
        }
        MPoly::V(self.coeffs().iter().map(|x| x.neg(base, k - 1)).collect())
    }

    pub fn sub(&self, o: &MPoly, base: &Field, k: usize) -> MPoly {
        self.add(&o.neg(base, k), base, k)
    }

    pub fn scale(&self, c: &Scalar, base: &Field, k: usize) -> MPoly {
        if k == 0 {
            return MPoly::C(base.mul(self.scalar(), c));
        }
        if base.is_zero(c) {
            return MPoly::zero(k);
        }
        MPoly::trimmed(self.coeffs().iter().map(|x| x.scale(c, base, k - 1)).collect())
    }

    pub fn mul(&self, o: &MPoly, base: &Field, k: usize) -> MPoly {
        if k == 0 {
            return MPoly::C(base.mul(self.scalar(), o.scalar()));
        }
        let (a, b) = (self.coeffs(), o.coeffs());
        if a.is_empty() || b.is_empty() {
            return MPoly::zero(k);
        }
        let mut out = vec![MPoly::zero_in(base, k - 1); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&x.mul(y, base, k - 1), base, k - 1);
            }
        }
        MPoly::trimmed(out)
    }

    /// Multiply by `x_k^e` (main variable).
    fn shift(&self, e: usize, base: &Field, k: usize) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![MPoly::zero_in(base, k - 1); e];
        c.extend(self.coeffs().iter().cloned());
        MPoly::V(c)
    }

    /// Exact quotient, or `None` if `o` does not divide `self`.
    pub fn div_exact(&self, o: &MPoly, base: &Field, k: usize) -> Option<MPoly> {
        if o.is_zero() {
            return None;
        }
        if k == 0 {
            return base.div(self.scalar(), o.scalar()).ok().map(MPoly::C);
        }
        let db = o.degree().unwrap();
        let lb = &o.coeffs()[db];
        let mut r = self.clone();
        let mut q: Vec<MPoly> = Vec::new();
        while let Some(dr) = r.degree() {
            if dr < db {
                return None;
            }
            let c = r.coeffs()[dr].div_exact(lb, base, k - 1)?;
            let shift = dr - db;
            if q.len() <= shift {
                q.resize(shift + 1, MPoly::zero_in(base, k - 1));
            }
            q[shift] = c.clone();
            let term = o.mul(&MPoly::constant_poly(c, k), base, k).shift(shift, base, k);
            r = r.sub(&term, base, k);
            if r.degree() == Some(dr) {
                // leading term failed to cancel; cannot happen for exact division in a domain
                return None;
            }
        }
        Some(MPoly::trimmed(q))
    }

    /// Embed a level `k-1` polynomial as a constant in `x_k`.
    fn constant_poly(c: MPoly, _k: usize) -> MPoly {
        if c.is_zero() {
            MPoly::V(Vec::new())
        } else {
            MPoly::V(vec![c])
        }
    }

    /// Pseudo-remainder of `self` by `o` in the main variable.
    fn prem(&self, o: &MPoly, base: &Field, k: usize) -> MPoly {
        let db = o.degree().expect("prem by zero");
        let lb = MPoly::constant_poly(o.coeffs()[db].clone(), k);
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = MPoly::constant_poly(r.coeffs()[dr].clone(), k);
            let t = o.mul(&lr, base, k).shift(dr - db, base, k);
            r = r.mul(&lb, base, k).sub(&t, base, k);
        }
        r
    }

    /// Gcd of the coefficients in the main variable (a level `k-1` polynomial).
    fn content(&self, base: &Field, k: usize) -> MPoly {
        let mut g = MPoly::zero_in(base, k - 1);
        for c in self.coeffs() {
            g = g.gcd(c, base, k - 1);
            if g.is_one(base, k - 1) {
                break;
            }
        }
        g
    }

    fn primitive_part(&self, base: &Field, k: usize) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content(base, k);
        if c.is_one(base, k - 1) {
            return self.clone();
        }
        MPoly::V(self.coeffs().iter().map(|x| x.div_exact(&c, base, k - 1).expect("content divides")).collect())
    }

    /// Gcd normalized to have leading base coefficient one (`gcd(0, 0) = 0`).
    pub fn gcd(&self, o: &MPoly, base: &Field, k: usize) -> MPoly {
        if self.is_zero() {
            return o.monic(base, k);
        }
        if o.is_zero() {
            return self.monic(base, k);
        }
        if k == 0 {
            return MPoly::one(base, 0);
        }
        let cg = self.content(base, k).gcd(&o.content(base, k), base, k - 1);
        let (mut a, mut b) = (self.primitive_part(base, k), o.primitive_part(base, k));
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.degree() == Some(0) {
                a = MPoly::one(base, k);
                break;
            }
            let r = a.prem(&b, base, k);
            a = b;
            b = r.primitive_part(base, k);
        }
        let g = a.primitive_part(base, k).mul(&MPoly::constant_poly(cg, k), base, k);
        g.monic(base, k)
    }

    pub fn monic(&self, base: &Field, k: usize) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.base_lc(k);
        if base.is_one(lc) {
            return self.clone();
        }
        let inv = base.inv(lc).expect("nonzero leading coefficient");
        self.scale(&inv, base, k)
    }

    /// Evaluate with coefficients mapped by `coef` into `target` and `x_i := point[i-1]`.
    pub fn eval_into(
        &self,
        k: usize,
        target: &Field,
        coef: &dyn Fn(&Scalar) -> Scalar,
        point: &[Scalar],
    ) -> Scalar {
        match self {
            MPoly::C(s) => coef(s),
            MPoly::V(c) => {
                let x = &point[k - 1];
                let mut acc = target.zero();
                for ci in c.iter().rev() {
                    acc = target.mul(&acc, x);
                    acc = target.add(&acc, &ci.eval_into(k - 1, target, coef, point));
                }
                acc
            }
        }
    }

    /// Nonzero terms as `(exponents x_1..x_k, coefficient)`, highest `x_k` degree first.
    pub fn terms(&self, k: usize) -> Vec<(Vec<u32>, Scalar)> {
        let mut out = Vec::new();
        self.collect_terms(k, &mut vec![0; k], &mut out);
        out
    }

    fn collect_terms(&self, k: usize, exps: &mut Vec<u32>, out: &mut Vec<(Vec<u32>, Scalar)>) {
        match self {
            MPoly::C(s) => {
                if !is_zero_scalar(s) {
                    out.push((exps.clone(), s.clone()));
                }
            }
            MPoly::V(c) => {
                for (i, ci) in c.iter().enumerate().rev() {
                    exps[k - 1] = i as u32;
                    ci.collect_terms(k - 1, exps, out);
                }
                exps[k - 1] = 0;
            }
        }
    }

    /// Map every coefficient through `f` (keeping the variables), into base field `to`.
    pub fn map_coeffs(&self, k: usize, to: &Field, f: &dyn Fn(&Scalar) -> Scalar) -> MPoly {
        match self {
            MPoly::C(s) => MPoly::C(f(s)),
            MPoly::V(c) => {
                let _ = to;
                MPoly::trimmed(c.iter().map(|x| x.map_coeffs(k - 1, to, f)).collect())
            }
        }
    }
}

fn is_zero_scalar(s: &Scalar) -> bool {
    match s {
        Scalar::Rat(r) => num_traits::Zero::is_zero(r),
        Scalar::Fp(x) => *x == 0,
        Scalar::Ext(c) => c.iter().all(is_zero_scalar),
        Scalar::Frac(f) => f.0.is_zero(),
    }
}
