use std::fmt;

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};

use super::rational::{fmt_rat, to_f64, Rat};

/// Dense square matrix of exact rationals (row-major).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    n: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(n: usize) -> Self {
        RatMatrix {
            n,
            data: vec![Rat::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Rat::from_integer(1.into()));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend(r);
        }
        RatMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.n + j] = v;
    }

    /// Sets `(i,j)` and `(j,i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.n + j] = v.clone();
        self.data[j * self.n + i] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &Rat) {
        self.data[i * self.n + j] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// First `(i,j)` with `a_ij ≠ a_ji`.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in 0..i {
                if self.get(i, j) != self.get(j, i) {
                    return Some((j, i));
                }
            }
        }
        None
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn scale(&self, c: &Rat) -> RatMatrix {
        RatMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &RatMatrix, c: &Rat) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += b * c;
            }
        }
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        let mut out = self.clone();
        out.add_scaled(other, &Rat::from_integer(1.into()));
        out
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        let mut out = self.clone();
        out.add_scaled(other, &Rat::from_integer((-1).into()));
        out
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| to_f64(self.get(i, j)))
    }

    pub fn max_abs(&self) -> Rat {
        self.data
            .iter()
            .map(|v| v.abs())
            .fold(Rat::zero(), |a, b| if b > a { b } else { a })
    }

    /// Exact positive-semidefiniteness test by symmetric Gaussian elimination
    /// with diagonal pivoting.
    pub fn is_psd(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let n = self.n;
        let mut a = self.clone();
        let mut active: Vec<usize> = (0..n).collect();
        while !active.is_empty() {
            if active.iter().any(|&i| a.get(i, i).is_negative()) {
                return false;
            }
            let pivot = active
                .iter()
                .copied()
                .filter(|&i| !a.get(i, i).is_zero())
                .max_by(|&i, &j| a.get(i, i).cmp(a.get(j, j)));
            let Some(k) = pivot else {
                // all remaining diagonal entries are zero: PSD iff the rest is zero
                return active
                    .iter()
                    .all(|&i| active.iter().all(|&j| a.get(i, j).is_zero()));
            };
            active.retain(|&i| i != k);
            let d = a.get(k, k).clone();
            for &i in &active {
                let f = a.get(i, k) / &d;
                if f.is_zero() {
                    continue;
                }
                for &j in &active {
                    let v = a.get(k, j) * &f;
                    if !v.is_zero() {
                        a.data[i * n + j] -= v;
                    }
                }
            }
        }
        true
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| fmt_rat(self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rational::rat;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect())
    }

    #[test]
    fn psd_exact() {
        assert!(m(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]]).is_psd());
        assert!(m(&[&[1, 1], &[1, 1]]).is_psd());
        assert!(!m(&[&[0, 1], &[1, 0]]).is_psd());
        assert!(!m(&[&[1, 2], &[2, 1]]).is_psd());
        assert!(m(&[&[0, 0], &[0, 0]]).is_psd());
        assert!(!m(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]).is_psd());
        assert!(!m(&[&[1, 0], &[1, 1]]).is_psd());
    }

    #[test]
    fn symmetry_report() {
        assert_eq!(m(&[&[1, 0], &[2, 1]]).asymmetry(), Some((0, 1)));
        assert!(m(&[&[1, 3], &[3, 1]]).is_symmetric());
    }
}
