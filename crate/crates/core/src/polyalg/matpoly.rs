use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::exponent::Exponent;
use super::matrix::RatMatrix;
use super::poly::Poly;
use super::rational::Rat;
use crate::error::Error;

/// Symmetric `m×m` matrix polynomial `G(x) = Σ_α G_α x^α` with exact
/// rational coefficient matrices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatPoly {
    m: usize,
    nvars: usize,
    terms: BTreeMap<Exponent, RatMatrix>,
}

impl MatPoly {
    pub fn zero(m: usize, nvars: usize) -> Self {
        MatPoly {
            m,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(m: usize, nvars: usize) -> Self {
        let mut g = MatPoly::zero(m, nvars);
        g.terms.insert(Exponent::zero(nvars), RatMatrix::identity(m));
        g
    }

    /// Builds from coefficient matrices; every matrix must be symmetric.
    pub fn from_terms(
        m: usize,
        nvars: usize,
        terms: impl IntoIterator<Item = (Exponent, RatMatrix)>,
    ) -> Result<Self, Error> {
        let mut g = MatPoly::zero(m, nvars);
        for (e, mat) in terms {
            if e.nvars() != nvars {
                return Err(Error::Dimension(format!(
                    "exponent {e} has {} entries, expected {nvars}",
                    e.nvars()
                )));
            }
            if mat.dim() != m {
                return Err(Error::Dimension(format!(
                    "coefficient of {e} is {}×{}, expected {m}×{m}",
                    mat.dim(),
                    mat.dim()
                )));
            }
            if let Some((i, j)) = mat.asymmetry() {
                return Err(Error::NotSymmetric(format!(
                    "coefficient of {e} differs at ({i},{j})"
                )));
            }
            g.add_term(e, &mat);
        }
        Ok(g)
    }

    /// Builds from an entry grid; `entries[i][j]` must equal `entries[j][i]`.
    pub fn from_entries(entries: &[Vec<Poly>]) -> Result<Self, Error> {
        let m = entries.len();
        let nvars = entries
            .first()
            .and_then(|r| r.first())
            .map(|p| p.nvars())
            .unwrap_or(0);
        let mut g = MatPoly::zero(m, nvars);
        for (i, row) in entries.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Dimension(format!("row {i} has {} entries", row.len())));
            }
            for (j, p) in row.iter().enumerate() {
                if p.nvars() != nvars {
                    return Err(Error::Dimension(format!("entry ({i},{j}) has wrong nvars")));
                }
                if j < i && entries[j][i] != *p {
                    return Err(Error::NotSymmetric(format!("entry ({j},{i})")));
                }
            }
        }
        for i in 0..m {
            for j in i..m {
                for (e, c) in entries[i][j].terms() {
                    let mat = g
                        .terms
                        .entry(e.clone())
                        .or_insert_with(|| RatMatrix::zeros(m));
                    mat.set_sym(i, j, c.clone());
                }
            }
        }
        Ok(g)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, RatMatrix> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exponent) -> Option<&RatMatrix> {
        self.terms.get(e)
    }

    fn add_term(&mut self, e: Exponent, mat: &RatMatrix) {
        if mat.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(e.clone())
            .or_insert_with(|| RatMatrix::zeros(mat.dim()));
        slot.add_scaled(mat, &Rat::one());
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    pub fn deg(&self) -> u32 {
        self.degree().unwrap_or(0)
    }

    /// `⌈deg(G)/2⌉`.
    pub fn half_degree(&self) -> u32 {
        self.deg().div_ceil(2)
    }

    pub fn entry(&self, i: usize, j: usize) -> Poly {
        Poly::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, mat)| (e.clone(), mat.get(i, j).clone())),
        )
    }

    pub fn entries(&self) -> Vec<Vec<Poly>> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn eval(&self, x: &[Rat]) -> Result<RatMatrix, Error> {
        if x.len() != self.nvars {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.nvars
            )));
        }
        let mut out = RatMatrix::zeros(self.m);
        for (e, mat) in &self.terms {
            let mono = Poly::monomial(e.clone(), Rat::one()).eval(x);
            out.add_scaled(mat, &mono);
        }
        Ok(out)
    }

    pub fn eval_f64(&self, x: &[f64]) -> nalgebra::DMatrix<f64> {
        let mut out = nalgebra::DMatrix::zeros(self.m, self.m);
        for (e, mat) in &self.terms {
            let mono = e.eval_f64(x);
            out += mat.to_f64() * mono;
        }
        out
    }

    pub fn add(&self, other: &MatPoly) -> Result<MatPoly, Error> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, mat) in &other.terms {
            out.add_term(e.clone(), mat);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MatPoly) -> Result<MatPoly, Error> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, mat) in &other.terms {
            out.add_term(e.clone(), &mat.scale(&-Rat::one()));
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> MatPoly {
        if c.is_zero() {
            return MatPoly::zero(self.m, self.nvars);
        }
        MatPoly {
            m: self.m,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, mat)| (e.clone(), mat.scale(c)))
                .collect(),
        }
    }

    /// Scalar polynomial times matrix polynomial.
    pub fn mul_poly(&self, p: &Poly) -> Result<MatPoly, Error> {
        if p.nvars() != self.nvars {
            return Err(Error::Dimension("nvars mismatch in Poly × MatPoly".into()));
        }
        let mut out = MatPoly::zero(self.m, self.nvars);
        for (ep, cp) in p.terms() {
            for (e, mat) in &self.terms {
                out.add_term(ep.add(e), &mat.scale(cp));
            }
        }
        Ok(out)
    }

    /// Re-indexes into `total` variables placing ours at `offset`.
    pub fn embed(&self, total: usize, offset: usize) -> MatPoly {
        MatPoly {
            m: self.m,
            nvars: total,
            terms: self
                .terms
                .iter()
                .map(|(e, mat)| (e.embed(total, offset), mat.clone()))
                .collect(),
        }
    }

    /// `ξᵀ G(x) ξ` as a polynomial in `(x, ξ)` (`nvars + m` variables).
    pub fn quadratic_form(&self) -> Poly {
        let total = self.nvars + self.m;
        let mut out = Poly::zero(total);
        for (e, mat) in &self.terms {
            let ex = e.embed(total, 0);
            for i in 0..self.m {
                for j in 0..self.m {
                    let c = mat.get(i, j);
                    if c.is_zero() {
                        continue;
                    }
                    let mut v = ex.entries().to_vec();
                    v[self.nvars + i] += 1;
                    v[self.nvars + j] += 1;
                    out.add_term(Exponent::new(v), c.clone());
                }
            }
        }
        out
    }

    fn check_compatible(&self, other: &MatPoly) -> Result<(), Error> {
        if self.m != other.m || self.nvars != other.nvars {
            return Err(Error::Dimension(format!(
                "MatPoly shapes differ: {}×{} in {} vars vs {}×{} in {} vars",
                self.m, self.m, self.nvars, other.m, other.m, other.nvars
            )));
        }
        Ok(())
    }
}

/// `n×n` matrix whose entries are polynomials in the joint variables
/// `(x, ξ)`, each a quadratic form in `ξ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BiFormMatPoly {
    nx: usize,
    nxi: usize,
    entries: Vec<Vec<Poly>>,
}

impl BiFormMatPoly {
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nxi(&self) -> usize {
        self.nxi
    }

    pub fn entry(&self, k: usize, l: usize) -> &Poly {
        &self.entries[k][l]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|p| p.is_zero())
    }

    /// Fixes `ξ`, leaving an `n×n` matrix polynomial in `x`.
    pub fn contract(&self, xi: &[Rat]) -> MatPoly {
        assert_eq!(xi.len(), self.nxi);
        let mut values: Vec<Option<Rat>> = vec![None; self.nx];
        values.extend(xi.iter().cloned().map(Some));
        let rows: Vec<Vec<Poly>> = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| {
                        let q = p.partial_eval(&values);
                        q.map_exponents(self.nx, |e| e.project(0..self.nx))
                    })
                    .collect()
            })
            .collect();
        MatPoly::from_entries(&rows).expect("contraction of a symmetric biform is symmetric")
    }

    /// The same matrix viewed as an `n×n` matrix polynomial over `(x, ξ)`.
    pub fn as_matpoly(&self) -> MatPoly {
        MatPoly::from_entries(&self.entries).expect("biform entries are symmetric")
    }

    pub fn eval_f64(&self, x: &[f64], xi: &[f64]) -> nalgebra::DMatrix<f64> {
        let mut pt = x.to_vec();
        pt.extend_from_slice(xi);
        nalgebra::DMatrix::from_fn(self.nx, self.nx, |k, l| self.entries[k][l].eval_f64(&pt))
    }
}

/// `H_kl(x,ξ) = −∂²(ξᵀG(x)ξ)/∂x_k∂x_l`, computed symbolically.
pub fn hessian_biform(g: &MatPoly) -> BiFormMatPoly {
    let n = g.nvars();
    let form = g.quadratic_form();
    let grad: Vec<Poly> = (0..n).map(|k| form.derivative(k)).collect();
    let mut entries = vec![vec![Poly::zero(n + g.m()); n]; n];
    for k in 0..n {
        for l in k..n {
            let h = -grad[k].derivative(l);
            entries[k][l] = h.clone();
            entries[l][k] = h;
        }
    }
    BiFormMatPoly {
        nx: n,
        nxi: g.m(),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rational::rat;

    fn xv(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn c(n: usize, v: i64) -> Poly {
        Poly::constant(n, rat(v))
    }

    /// The 3×3 quadratic example with a Choi-type Hessian.
    fn choi_g() -> MatPoly {
        let n = 3;
        let (x1, x2, x3) = (xv(n, 0), xv(n, 1), xv(n, 2));
        let sq = |p: &Poly| p * p;
        let g11 = c(n, 2) - sq(&x1) - sq(&x3).scale(&rat(2));
        let g12 = c(n, 1) + &x1 * &x2;
        let g13 = &x1 * &x3;
        let g22 = c(n, 2) - sq(&x2) - sq(&x1).scale(&rat(2));
        let g23 = c(n, 1) + &x2 * &x3;
        let g33 = c(n, 2) - sq(&x3) - sq(&x2).scale(&rat(2));
        MatPoly::from_entries(&[
            vec![g11, g12.clone(), g13.clone()],
            vec![g12, g22, g23.clone()],
            vec![g13, g23, g33],
        ])
        .unwrap()
    }

    #[test]
    fn eval_at_origin_and_unit() {
        let g = choi_g();
        let at0 = g.eval(&[rat(0), rat(0), rat(0)]).unwrap();
        let want0 = RatMatrix::from_rows(vec![
            vec![rat(2), rat(1), rat(0)],
            vec![rat(1), rat(2), rat(1)],
            vec![rat(0), rat(1), rat(2)],
        ]);
        assert_eq!(at0, want0);
        let at1 = g.eval(&[rat(1), rat(0), rat(0)]).unwrap();
        let want1 = RatMatrix::from_rows(vec![
            vec![rat(1), rat(1), rat(0)],
            vec![rat(1), rat(0), rat(1)],
            vec![rat(0), rat(1), rat(2)],
        ]);
        assert_eq!(at1, want1);
        assert!(MatPoly::zero(2, 3).eval(&[rat(4), rat(5), rat(6)]).unwrap().is_zero());
        assert!(g.eval(&[rat(0)]).is_err());
    }

    #[test]
    fn choi_hessian_is_twice_the_choi_biquadratic() {
        let h = hessian_biform(&choi_g());
        let t = 6;
        let k = |i: usize| Poly::var(t, 3 + i);
        let sq = |p: Poly| &p * &p;
        let two = rat(2);
        let want = [
            [sq(k(0)) + sq(k(1)).scale(&two), -(k(0) * k(1)), -(k(0) * k(2))],
            [-(k(0) * k(1)), sq(k(1)) + sq(k(2)).scale(&two), -(k(1) * k(2))],
            [-(k(0) * k(2)), -(k(1) * k(2)), sq(k(2)) + sq(k(0)).scale(&two)],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h.entry(i, j), &want[i][j].scale(&two), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn affine_hessian_is_zero() {
        let n = 2;
        let g = MatPoly::from_entries(&[
            vec![c(n, 1) + xv(n, 0), xv(n, 1)],
            vec![xv(n, 1), c(n, 3)],
        ])
        .unwrap();
        assert!(hessian_biform(&g).is_zero());
    }

    #[test]
    fn nonsymmetric_rejected() {
        let n = 1;
        let r = MatPoly::from_entries(&[vec![c(n, 1), c(n, 2)], vec![c(n, 3), c(n, 1)]]);
        assert!(matches!(r, Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn mul_poly_and_scale() {
        let n = 2;
        let g = MatPoly::identity(2, n);
        let p = xv(n, 0) * xv(n, 1);
        let h = g.mul_poly(&p).unwrap();
        assert_eq!(h.entry(0, 0), p);
        assert!(h.entry(0, 1).is_zero());
        assert!(h.sub(&h).unwrap().is_zero());
        assert_eq!(h.scale(&rat(2)).entry(1, 1), p.scale(&rat(2)));
    }
}
