//! Exact Gaussian elimination helpers over a [`Field`].

use super::field::{Field, Scalar};

/// Determinant of a square array by elimination.
pub fn determinant(mut rows: Vec<Vec<Scalar>>, f: &Field) -> Scalar {
    let n = rows.len();
    let mut det = f.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !f.is_zero(&rows[r][col])) else {
            return f.zero();
        };
        if piv != col {
            rows.swap(piv, col);
            det = f.neg(&det);
        }
        let p = rows[col][col].clone();
        det = f.mul(&det, &p);
        let pinv = f.inv(&p).unwrap();
        for r in col + 1..n {
            if f.is_zero(&rows[r][col]) {
                continue;
            }
            let factor = f.mul(&rows[r][col], &pinv);
            for c in col..n {
                let t = f.mul(&factor, &rows[col][c]);
                rows[r][c] = f.sub(&rows[r][c], &t);
            }
        }
    }
    det
}

/// Incrementally maintained reduced row echelon form.
///
/// Pivots are the first nonzero coordinate of each new vector, so the resulting basis
/// only depends on the insertion order.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    dim: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(field: Field, dim: usize) -> Echelon {
        Echelon { field, dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after eliminating all pivot coordinates.
    pub fn reduce(&self, mut v: Vec<Scalar>) -> Vec<Scalar> {
        let f = &self.field;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if f.is_zero(&v[pc]) {
                continue;
            }
            let c = v[pc].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !f.is_zero(r) {
                    *x = f.sub(x, &f.mul(&c, r));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let r = self.reduce(v.to_vec());
        r.iter().all(|x| self.field.is_zero(x))
    }

    /// Adds `v`; returns `true` if the span grew.
    pub fn insert(&mut self, v: Vec<Scalar>) -> bool {
        self.insert_reduced(v).is_some()
    }

    /// Adds `v`; if the span grew, returns the new independent vector (`v` reduced
    /// against the earlier rows and scaled to a unit pivot).
    pub fn insert_reduced(&mut self, v: Vec<Scalar>) -> Option<Vec<Scalar>> {
        let f = self.field.clone();
        let mut r = self.reduce(v);
        let pc = r.iter().position(|x| !f.is_zero(x))?;
        let inv = f.inv(&r[pc]).unwrap();
        for x in r.iter_mut() {
            *x = f.mul(x, &inv);
        }
        for row in self.rows.iter_mut() {
            if f.is_zero(&row[pc]) {
                continue;
            }
            let c = row[pc].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                if !f.is_zero(y) {
                    *x = f.sub(x, &f.mul(&c, y));
                }
            }
        }
        self.rows.push(r.clone());
        self.pivots.push(pc);
        Some(r)
    }
}

/// Basis of the null space `{x : A x = 0}` of a matrix given by rows with `ncols` columns.
pub fn nullspace(rows: &[Vec<Scalar>], ncols: usize, f: &Field) -> Vec<Vec<Scalar>> {
    let mut ech = Echelon::new(f.clone(), ncols);
    for r in rows {
        ech.insert(r.clone());
        if ech.rank() == ncols {
            return Vec::new();
        }
    }
    let pivots = ech.pivots().to_vec();
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![f.zero(); ncols];
        x[free] = f.one();
        for (row, &pc) in ech.rows().iter().zip(&pivots) {
            x[pc] = f.neg(&row[free]);
        }
        out.push(x);
    }
    out
}

/// Solves `A x = b` (rows of `A`); returns one solution if consistent.
pub fn solve(rows: &[Vec<Scalar>], b: &[Scalar], f: &Field) -> Option<Vec<Scalar>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<Scalar>> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut v = r.clone();
            v.push(bi.clone());
            v
        })
        .collect();
    let mut ech = Echelon::new(f.clone(), ncols + 1);
    for r in aug {
        ech.insert(r);
    }
    let mut x = vec![f.zero(); ncols];
    for (row, &pc) in ech.rows().iter().zip(ech.pivots()) {
        if pc == ncols {
            return None;
        }
        x[pc] = row[ncols].clone();
    }
    Some(x)
}
