//! Square matrices over a [`Field`].

use super::field::{Field, Scalar};
use super::linalg;
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    e: Vec<Scalar>,
}

impl Matrix {
    pub fn identity(n: usize, f: &Field) -> Matrix {
        let mut m = Matrix::zero(n, f);
        for i in 0..n {
            m.e[i * n + i] = f.one();
        }
        m
    }

    pub fn zero(n: usize, f: &Field) -> Matrix {
        Matrix { n, e: vec![f.zero(); n * n] }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Matrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix is not square".into()));
        }
        Ok(Matrix { n, e: rows.into_iter().flatten().collect() })
    }

    pub fn from_ints(rows: &[Vec<i64>], f: &Field) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| f.from_int(x)).collect()).collect())
            .expect("square integer matrix")
    }

    /// Flat row-major entries (`n*n` of them).
    pub fn from_flat(n: usize, e: Vec<Scalar>) -> Matrix {
        assert_eq!(e.len(), n * n);
        Matrix { n, e }
    }

    /// Identity plus `m` at position `(i, j)` (0-based).
    pub fn transvection(n: usize, i: usize, j: usize, m: &Scalar, f: &Field) -> Matrix {
        let mut t = Matrix::identity(n, f);
        t.e[i * n + j] = f.add(&t.e[i * n + j], m);
        t
    }

    pub fn diagonal(d: &[Scalar], f: &Field) -> Matrix {
        let mut m = Matrix::zero(d.len(), f);
        for (i, x) in d.iter().enumerate() {
            m.e[i * d.len() + i] = x.clone();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.e[i * self.n + j] = x;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.e
    }

    pub fn into_entries(self) -> Vec<Scalar> {
        self.e
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.e.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn add(&self, o: &Matrix, f: &Field) -> Matrix {
        Matrix { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| f.add(a, b)).collect() }
    }

    pub fn sub(&self, o: &Matrix, f: &Field) -> Matrix {
        Matrix { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| f.sub(a, b)).collect() }
    }

    pub fn neg(&self, f: &Field) -> Matrix {
        Matrix { n: self.n, e: self.e.iter().map(|a| f.neg(a)).collect() }
    }

    pub fn scale(&self, c: &Scalar, f: &Field) -> Matrix {
        Matrix { n: self.n, e: self.e.iter().map(|a| f.mul(a, c)).collect() }
    }

    pub fn mul(&self, o: &Matrix, f: &Field) -> Matrix {
        let n = self.n;
        assert_eq!(n, o.n, "degree mismatch");
        let mut e = vec![f.zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.e[i * n + k];
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..n {
                    let b = &o.e[k * n + j];
                    if !f.is_zero(b) {
                        e[i * n + j] = f.add(&e[i * n + j], &f.mul(a, b));
                    }
                }
            }
        }
        Matrix { n, e }
    }

    pub fn mul_vec(&self, v: &[Scalar], f: &Field) -> Vec<Scalar> {
        (0..self.n)
            .map(|i| (0..self.n).fold(f.zero(), |acc, j| f.add(&acc, &f.mul(self.get(i, j), &v[j]))))
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut e = self.e.clone();
        for i in 0..n {
            for j in 0..n {
                e[j * n + i] = self.e[i * n + j].clone();
            }
        }
        Matrix { n, e }
    }

    pub fn trace(&self, f: &Field) -> Scalar {
        (0..self.n).fold(f.zero(), |acc, i| f.add(&acc, self.get(i, i)))
    }

    pub fn det(&self, f: &Field) -> Scalar {
        linalg::determinant(self.rows(), f)
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self, f: &Field) -> Option<Matrix> {
        let n = self.n;
        let mut a = self.rows();
        let mut b = Matrix::identity(n, f).rows();
        for col in 0..n {
            let piv = (col..n).find(|&r| !f.is_zero(&a[r][col]))?;
            a.swap(piv, col);
            b.swap(piv, col);
            let inv = f.inv(&a[col][col]).unwrap();
            for x in a[col].iter_mut() {
                *x = f.mul(x, &inv);
            }
            for x in b[col].iter_mut() {
                *x = f.mul(x, &inv);
            }
            for r in 0..n {
                if r == col || f.is_zero(&a[r][col]) {
                    continue;
                }
                let c = a[r][col].clone();
                for k in 0..n {
                    let t = f.mul(&c, &a[col][k]);
                    a[r][k] = f.sub(&a[r][k], &t);
                    let t = f.mul(&c, &b[col][k]);
                    b[r][k] = f.sub(&b[r][k], &t);
                }
            }
        }
        Some(Matrix::from_rows(b).unwrap())
    }

    /// Integer power; negative exponents need an invertible matrix.
    pub fn pow(&self, e: i64, f: &Field) -> Option<Matrix> {
        let base = if e < 0 { self.inverse(f)? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Matrix::identity(self.n, f);
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b, f);
            }
            b = b.mul(&b, f);
            k >>= 1;
        }
        Some(acc)
    }

    pub fn is_identity(&self, f: &Field) -> bool {
        *self == Matrix::identity(self.n, f)
    }

    pub fn is_zero(&self, f: &Field) -> bool {
        self.e.iter().all(|x| f.is_zero(x))
    }

    /// Scalar multiple of the identity.
    pub fn is_scalar(&self, f: &Field) -> bool {
        let d = self.get(0, 0);
        (0..self.n).all(|i| (0..self.n).all(|j| if i == j { self.get(i, j) == d } else { f.is_zero(self.get(i, j)) }))
    }

    /// Ring commutator `ab - ba`.
    pub fn bracket(&self, o: &Matrix, f: &Field) -> Matrix {
        self.mul(o, f).sub(&o.mul(self, f), f)
    }

    pub fn commutes(&self, o: &Matrix, f: &Field) -> bool {
        self.mul(o, f) == o.mul(self, f)
    }

    /// Characteristic polynomial `det(x - A)` via reduction to Hessenberg form.
    pub fn charpoly(&self, f: &Field) -> Poly {
        let n = self.n;
        let mut h = self.rows();
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| !f.is_zero(&h[i][m - 1])) else { continue };
            if i != m {
                h.swap(i, m);
                for row in h.iter_mut() {
                    row.swap(i, m);
                }
            }
            let t = f.inv(&h[m][m - 1]).unwrap();
            for j in m + 1..n {
                if f.is_zero(&h[j][m - 1]) {
                    continue;
                }
                let u = f.mul(&h[j][m - 1], &t);
                for k in 0..n {
                    let s = f.mul(&u, &h[m][k]);
                    h[j][k] = f.sub(&h[j][k], &s);
                }
                for row in h.iter_mut() {
                    let s = f.mul(&u, &row[j]);
                    row[m] = f.add(&row[m], &s);
                }
            }
        }
        let x = Poly::x(f);
        let mut p: Vec<Poly> = vec![Poly::one(f)];
        for m in 1..=n {
            let lin = x.sub(&Poly::constant(h[m - 1][m - 1].clone(), f), f);
            let mut pm = lin.mul(&p[m - 1], f);
            let mut t = f.one();
            for i in 1..m {
                t = f.mul(&t, &h[m - i][m - i - 1]);
                let c = f.mul(&t, &h[m - i - 1][m - 1]);
                pm = pm.sub(&p[m - i - 1].scale(&c, f), f);
            }
            p.push(pm);
        }
        p.pop().unwrap()
    }

    /// Monic minimal polynomial by finding the first linear dependency among powers.
    pub fn minpoly(&self, f: &Field) -> Poly {
        let n = self.n;
        let mut powers = vec![Matrix::identity(n, f)];
        loop {
            let next = powers.last().unwrap().mul(self, f);
            let k = powers.len();
            let rows: Vec<Vec<Scalar>> =
                (0..n * n).map(|idx| powers.iter().map(|p| p.e[idx].clone()).collect()).collect();
            if let Some(c) = linalg::solve(&rows, &next.e, f) {
                let mut coeffs: Vec<Scalar> = c.iter().map(|x| f.neg(x)).collect();
                coeffs.push(f.one());
                return Poly::new(coeffs, f);
            }
            powers.push(next);
            assert!(k <= n, "minimal polynomial degree exceeds n");
        }
    }

    /// `p(A)` by Horner's rule.
    pub fn eval_poly(&self, p: &Poly, f: &Field) -> Matrix {
        let id = Matrix::identity(self.n, f);
        let mut acc = Matrix::zero(self.n, f);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self, f).add(&id.scale(c, f), f);
        }
        acc
    }

    /// Entrywise map into another field.
    pub fn map(&self, m: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix { n: self.n, e: self.e.iter().map(m).collect() }
    }

    /// Entrywise map that may fail.
    pub fn try_map(&self, m: impl Fn(&Scalar) -> Result<Scalar>) -> Result<Matrix> {
        Ok(Matrix { n: self.n, e: self.e.iter().map(m).collect::<Result<_>>()? })
    }

    pub fn display(&self, f: &Field) -> String {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| f.fmt_scalar(x)).collect::<Vec<_>>().join(", ")))
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(rows: &[Vec<i64>]) -> Matrix {
        Matrix::from_ints(rows, &Field::Rational)
    }

    #[test]
    fn charpoly_matches_cofactor_expansion() {
        let f = Field::Rational;
        let a = q(&[vec![2, 1, 0], vec![0, 3, 4], vec![5, 0, 1]]);
        let cp = a.charpoly(&f);
        // det(x - A) = x^3 - 6x^2 + 11x - 26, by hand via the first row
        assert_eq!(cp, Poly::from_ints(&[-26, 11, -6, 1]));
        assert!(a.eval_poly(&cp, &f).is_zero(&f));
    }

    #[test]
    fn minpoly_of_scalar_and_jordan() {
        let f = Field::Rational;
        assert_eq!(q(&[vec![3, 0], vec![0, 3]]).minpoly(&f), Poly::from_ints(&[-3, 1]));
        assert_eq!(q(&[vec![3, 1], vec![0, 3]]).minpoly(&f), Poly::from_ints(&[9, -6, 1]));
    }

    #[test]
    fn inverse_and_power() {
        let f = Field::Rational;
        let a = q(&[vec![2, 1], vec![1, 1]]);
        let ai = a.inverse(&f).unwrap();
        assert!(a.mul(&ai, &f).is_identity(&f));
        let t = Matrix::transvection(2, 0, 1, &Scalar::int(1), &f);
        assert_eq!(t.pow(3, &f).unwrap(), Matrix::transvection(2, 0, 1, &Scalar::int(3), &f));
        assert_eq!(t.pow(-2, &f).unwrap(), Matrix::transvection(2, 0, 1, &Scalar::int(-2), &f));
        assert!(q(&[vec![1, 2], vec![2, 4]]).inverse(&f).is_none());
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = Matrix> {
        prop::collection::vec(-5i64..6, n * n).prop_map(move |v| {
            Matrix::from_ints(&v.chunks(n).map(|c| c.to_vec()).collect::<Vec<_>>(), &Field::Rational)
        })
    }

    proptest! {
        #[test]
        fn multiplication_associative(a in small_matrix(3), b in small_matrix(3), c in small_matrix(3)) {
            let f = Field::Rational;
            prop_assert_eq!(a.mul(&b, &f).mul(&c, &f), a.mul(&b.mul(&c, &f), &f));
            prop_assert_eq!(a.mul(&Matrix::identity(3, &f), &f), a.clone());
        }

        #[test]
        fn cayley_hamilton(a in small_matrix(4)) {
            let f = Field::Rational;
            prop_assert!(a.eval_poly(&a.charpoly(&f), &f).is_zero(&f));
            let det = a.det(&f);
            let c0 = a.charpoly(&f).coeff(0, &f);
            // det(-A) = c0, so det(A) = c0 for even n
            prop_assert_eq!(det, c0);
        }
    }
}
