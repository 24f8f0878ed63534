//! Dense square matrices over a [`FiniteRing`].

use super::ring::FiniteRing;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FMat {
    pub n: usize,
    pub d: Vec<u32>,
}

impl FMat {
    pub fn identity(n: usize) -> FMat {
        let mut d = vec![0; n * n];
        for i in 0..n {
            d[i * n + i] = 1;
        }
        FMat { n, d }
    }

    pub fn from_rows(rows: &[Vec<i64>], r: &FiniteRing) -> FMat {
        let n = rows.len();
        FMat { n, d: rows.iter().flat_map(|row| row.iter().map(|&x| r.from_i64(x))).collect() }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.d[i * self.n + j]
    }

    pub fn is_identity(&self) -> bool {
        let n = self.n;
        self.d.iter().enumerate().all(|(k, &x)| x == u32::from(k / n == k % n))
    }

    pub fn mul(&self, o: &FMat, r: &FiniteRing) -> FMat {
        let n = self.n;
        let mut d = vec![0u32; n * n];
        match r {
            FiniteRing::Prime(m) | FiniteRing::Zm(m) => {
                let m = *m as u64;
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = 0u64;
                        for k in 0..n {
                            acc += self.d[i * n + k] as u64 * o.d[k * n + j] as u64;
                            if acc >= 1 << 62 {
                                acc %= m;
                            }
                        }
                        d[i * n + j] = (acc % m) as u32;
                    }
                }
            }
            _ => {
                for i in 0..n {
                    for k in 0..n {
                        let a = self.d[i * n + k];
                        if a == 0 {
                            continue;
                        }
                        for j in 0..n {
                            let t = r.mul(a, o.d[k * n + j]);
                            d[i * n + j] = r.add(d[i * n + j], t);
                        }
                    }
                }
            }
        }
        FMat { n, d }
    }

    /// `self · v` for a column vector.
    pub fn apply(&self, v: &[u32], r: &FiniteRing) -> Vec<u32> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).fold(0u32, |acc, j| r.add(acc, r.mul(self.d[i * n + j], v[j]))))
            .collect()
    }

    pub fn sub(&self, o: &FMat, r: &FiniteRing) -> FMat {
        FMat { n: self.n, d: self.d.iter().zip(&o.d).map(|(&a, &b)| r.sub(a, b)).collect() }
    }

    pub fn det(&self, r: &FiniteRing) -> u32 {
        // Laplace-free: elimination over Z_m needs Euclid; use the same routine as inverse
        let (det, _) = self.eliminate(r, false);
        det
    }

    /// Inverse over a field or `Z_m` (Euclidean row reduction), if the matrix is invertible.
    pub fn inverse(&self, r: &FiniteRing) -> Option<FMat> {
        let (det, inv) = self.eliminate(r, true);
        if !r.is_unit(det) {
            return None;
        }
        inv
    }

    /// Row reduction to upper triangular form by Euclidean steps; returns the
    /// determinant and (optionally, when it is a unit) the inverse.
    fn eliminate(&self, r: &FiniteRing, want_inverse: bool) -> (u32, Option<FMat>) {
        let n = self.n;
        let mut a: Vec<Vec<u32>> = self.d.chunks(n).map(|c| c.to_vec()).collect();
        let mut b: Vec<Vec<u32>> = FMat::identity(n).d.chunks(n).map(|c| c.to_vec()).collect();
        let mut det = 1u32;
        let size = r.size();
        let lift = |x: u32| -> u64 { x as u64 };
        for col in 0..n {
            // Euclid on the column below the diagonal until a single nonzero remains
            loop {
                let nz: Vec<usize> = (col..n).filter(|&i| a[i][col] != 0).collect();
                if nz.is_empty() {
                    return (0, None);
                }
                // pick the row whose entry has the smallest "size" (value for residues)
                let piv = if r.is_field() {
                    nz[0]
                } else {
                    *nz.iter().min_by_key(|&&i| gcd_rep(a[i][col], size)).unwrap()
                };
                if piv != col {
                    a.swap(piv, col);
                    b.swap(piv, col);
                    det = r.neg(det);
                }
                let pv = a[col][col];
                if let Some(pinv) = r.inv(pv) {
                    for i in col + 1..n {
                        if a[i][col] == 0 {
                            continue;
                        }
                        let f = r.mul(a[i][col], pinv);
                        for k in 0..n {
                            let t = r.mul(f, a[col][k]);
                            a[i][k] = r.sub(a[i][k], t);
                            let t = r.mul(f, b[col][k]);
                            b[i][k] = r.sub(b[i][k], t);
                        }
                    }
                    break;
                }
                // non-unit pivot over Z_m: subtract integer multiples to shrink entries
                let mut progressed = false;
                for i in col + 1..n {
                    if a[i][col] == 0 {
                        continue;
                    }
                    let qt = (lift(a[i][col]) / lift(pv)) as u32;
                    let qt = r.from_i64(qt as i64);
                    for k in 0..n {
                        let t = r.mul(qt, a[col][k]);
                        a[i][k] = r.sub(a[i][k], t);
                        let t = r.mul(qt, b[col][k]);
                        b[i][k] = r.sub(b[i][k], t);
                    }
                    progressed = true;
                }
                if !progressed {
                    break;
                }
            }
            det = r.mul(det, a[col][col]);
        }
        if !want_inverse || !r.is_unit(det) {
            return (det, None);
        }
        // back substitution: every diagonal entry is a unit now
        for col in (0..n).rev() {
            let pinv = r.inv(a[col][col]).unwrap();
            for k in 0..n {
                a[col][k] = r.mul(a[col][k], pinv);
                b[col][k] = r.mul(b[col][k], pinv);
            }
            for i in 0..col {
                let f = a[i][col];
                if f == 0 {
                    continue;
                }
                for k in 0..n {
                    let t = r.mul(f, a[col][k]);
                    a[i][k] = r.sub(a[i][k], t);
                    let t = r.mul(f, b[col][k]);
                    b[i][k] = r.sub(b[i][k], t);
                }
            }
        }
        (det, Some(FMat { n, d: b.into_iter().flatten().collect() }))
    }

    /// Packs a vector of ring elements into one key (base `size`).
    pub fn pack(v: &[u32], size: u32) -> u128 {
        v.iter().rev().fold(0u128, |acc, &x| acc * size as u128 + x as u128)
    }

    pub fn unpack(mut key: u128, n: usize, size: u32) -> Vec<u32> {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            v.push((key % size as u128) as u32);
            key /= size as u128;
        }
        v
    }
}

/// Representative used to order residues by divisibility: `gcd(x, m)` then `x`.
fn gcd_rep(x: u32, m: u32) -> (u32, u32) {
    let (mut a, mut b) = (x, m);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    (a, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_mod_composite() {
        let r = FiniteRing::residues(12).unwrap();
        let a = FMat::from_rows(&[vec![5, 2], vec![3, 7]], &r); // det 29 = 5 mod 12
        let ai = a.inverse(&r).unwrap();
        assert!(a.mul(&ai, &r).is_identity());
        assert_eq!(a.det(&r), 5);
        let s = FMat::from_rows(&[vec![2, 0], vec![0, 1]], &r);
        assert!(s.inverse(&r).is_none());
        // entries that need Euclid: [[4, 3], [3, 4]] has det 7 mod 12
        let e = FMat::from_rows(&[vec![4, 3], vec![3, 4]], &r);
        assert_eq!(e.det(&r), 7);
        assert!(e.mul(&e.inverse(&r).unwrap(), &r).is_identity());
    }

    #[test]
    fn exhaustive_inverses_mod_4() {
        let r = FiniteRing::residues(4).unwrap();
        for code in 0..256u32 {
            let d: Vec<u32> = (0..4).map(|i| (code >> (2 * i)) & 3).collect();
            let a = FMat { n: 2, d: d.clone() };
            let det = (d[0] * d[3] + 16 - (d[1] * d[2]) % 4) % 4;
            assert_eq!(a.det(&r), det, "{d:?}");
            match a.inverse(&r) {
                Some(ai) => assert!(a.mul(&ai, &r).is_identity()),
                None => assert!(det % 2 == 0),
            }
        }
    }
}
