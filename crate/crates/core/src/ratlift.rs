//! Lifted LMIs for rational matrix functions `G = F(x) / den(x)`, where both
//! monomials `y_α = x^α` and rational moments `z_β = x^β / p(x)` are lifted.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::momlift::{LiftedLMI, LinearPencil, VarKey};
use crate::polyalg::{basis_exponents, exact_divide, lex_lead, lex_reduce, Exponent, MatPoly, Poly};

/// `G(x) = numerator(x) / denominator(x)` plus the `(p, q)` pair used by the
/// q-module construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatFn {
    pub numerator: MatPoly,
    pub denominator: Poly,
    pub p: Poly,
    pub q: Option<Poly>,
}

impl RationalMatFn {
    /// `p` defaults to the denominator, `q` to the denominator squared.
    pub fn new(numerator: MatPoly, denominator: Poly) -> Result<Self, Error> {
        if denominator.is_zero() {
            return Err(Error::ZeroPolynomial("denominator".into()));
        }
        if denominator.nvars() != numerator.nvars() {
            return Err(Error::Dimension("denominator nvars differs from numerator".into()));
        }
        Ok(RationalMatFn {
            numerator,
            p: denominator.clone(),
            denominator,
            q: None,
        })
    }

    pub fn polynomial(g: MatPoly) -> Self {
        let n = g.nvars();
        RationalMatFn {
            numerator: g,
            denominator: Poly::one(n),
            p: Poly::one(n),
            q: None,
        }
    }

    pub fn with_p(mut self, p: Poly) -> Result<Self, Error> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial("p".into()));
        }
        self.p = p;
        Ok(self)
    }

    pub fn with_q(mut self, q: Poly) -> Self {
        self.q = Some(q);
        self
    }

    pub fn nvars(&self) -> usize {
        self.numerator.nvars()
    }

    pub fn m(&self) -> usize {
        self.numerator.m()
    }

    /// `q`, or `den²` when none was given.
    pub fn q_or_default(&self) -> Poly {
        self.q
            .clone()
            .unwrap_or_else(|| &self.denominator * &self.denominator)
    }

    /// Numerator rescaled so that `G = numerator_over_p / p`.
    pub fn numerator_over_p(&self) -> Result<MatPoly, Error> {
        let factor = exact_divide(&self.p, &self.denominator)?.ok_or_else(|| {
            Error::InvalidArgument("p must be a polynomial multiple of the denominator".into())
        })?;
        self.numerator.mul_poly(&factor)
    }

    /// Half the degree of `G`, rounded up; the degree of a rational function
    /// is taken as the larger of its numerator and denominator degrees.
    pub fn half_degree(&self) -> u32 {
        self.numerator.deg().max(self.denominator.deg()).div_ceil(2)
    }

    pub fn eval_f64(&self, x: &[f64]) -> Option<nalgebra::DMatrix<f64>> {
        let den = self.denominator.eval_f64(x);
        if den == 0.0 {
            return None;
        }
        Some(self.numerator.eval_f64(x) / den)
    }
}

/// Index sets `(y_index, z_index)` for `p` and half-degree `d`.
///
/// `y` covers `|α| + |LE(p)| ≤ 2d` and always contains `0` and the unit
/// exponents; `z` covers `|β| ≤ 2d` with `β` not divisible by `LE(p)`.
pub fn qmod_indices(p: &Poly, d: u32) -> Result<(Vec<Exponent>, Vec<Exponent>), Error> {
    let n = p.nvars();
    let lead = lex_lead(p)?;
    let all = basis_exponents(n, 2 * d);
    let ydeg = (2 * d).saturating_sub(lead.degree());
    let mut y: Vec<Exponent> = all.iter().filter(|e| e.degree() <= ydeg).cloned().collect();
    for e in std::iter::once(Exponent::zero(n)).chain((0..n).map(|i| Exponent::unit(n, i))) {
        if let Err(pos) = y.binary_search(&e) {
            y.insert(pos, e);
        }
    }
    let z = all.into_iter().filter(|e| !e.dominates(&lead)).collect();
    Ok((y, z))
}

/// Splits each entry `f` as `quotient + remainder / p` into a pencil over
/// `y` and `z`, checking containment in the index sets.
fn split_entry(
    pencil: &mut LinearPencil,
    i: usize,
    j: usize,
    f: &Poly,
    p: &Poly,
    y: &[Exponent],
    z: &[Exponent],
) -> Result<(), Error> {
    let (quot, rem) = lex_reduce(f, p)?;
    for (e, c) in quot.terms() {
        if y.binary_search(e).is_err() {
            return Err(Error::IndexEscape(format!(
                "quotient monomial y{} of entry ({i},{j}) outside y_index; raise d",
                e.label()
            )));
        }
        pencil.add_sym(VarKey::Y(e.clone()), i, j, c);
    }
    for (e, c) in rem.terms() {
        if z.binary_search(e).is_err() {
            return Err(Error::IndexEscape(format!(
                "remainder monomial z{} of entry ({i},{j}) outside z_index; raise d",
                e.label()
            )));
        }
        pencil.add_sym(VarKey::Z(e.clone()), i, j, c);
    }
    Ok(())
}

/// `Q_i(y,z)`: the pencil for `(g_i / p) [x]_{d-d_i} [x]_{d-d_i}ᵀ`.
pub fn build_qp(g: &Poly, p: &Poly, d: u32, di: u32) -> Result<LinearPencil, Error> {
    if di > d {
        return Err(Error::OrderTooSmall(format!("d = {d} below d_i = {di}")));
    }
    let (y, z) = qmod_indices(p, d)?;
    let n = p.nvars();
    let basis = basis_exponents(n, d - di);
    let mut pencil = LinearPencil::new(basis.len());
    for a in 0..basis.len() {
        for b in a..basis.len() {
            let f = g.mul_monomial(&basis[a].add(&basis[b]), &num_traits::One::one());
            split_entry(&mut pencil, a, b, &f, p, &y, &z)?;
        }
    }
    Ok(pencil)
}

/// `F(y,z)`: the pencil for `G` itself.
pub fn decompose_g(gr: &RationalMatFn, d: u32) -> Result<LinearPencil, Error> {
    let (y, z) = qmod_indices(&gr.p, d)?;
    let num = gr.numerator_over_p()?;
    let m = num.m();
    let mut pencil = LinearPencil::new(m);
    for i in 0..m {
        for j in i..m {
            split_entry(&mut pencil, i, j, &num.entry(i, j), &gr.p, &y, &z)?;
        }
    }
    Ok(pencil)
}

/// The lifted LMI `L_qmod` for `G` with domain constraints `gs`.
pub fn assemble_lqmod(gr: &RationalMatFn, gs: &[Poly], d: u32) -> Result<LiftedLMI, Error> {
    let n = gr.nvars();
    if d == 0 {
        return Err(Error::OrderTooSmall("d must be at least 1".into()));
    }
    if let Some(k) = gs.iter().position(|g| g.nvars() != n) {
        return Err(Error::Dimension(format!("constraint g{} has wrong nvars", k + 1)));
    }
    let (y, z) = qmod_indices(&gr.p, d)?;
    let mut pencils = vec![("F(y,z)".to_string(), decompose_g(gr, d)?)];
    pencils.push(("Q0(y,z)".to_string(), build_qp(&Poly::one(n), &gr.p, d, 0)?));
    for (k, g) in gs.iter().enumerate() {
        let di = g.deg().div_ceil(2);
        pencils.push((format!("Q{}(y,z)", k + 1), build_qp(g, &gr.p, d, di)?));
    }
    let lmi = LiftedLMI::with_pins(n, y, z, pencils);
    lmi.validate()?;
    Ok(lmi)
}

/// Decomposition of `G` as separate `y`/`z` coefficient maps.
pub fn decompose_g_parts(
    gr: &RationalMatFn,
    d: u32,
) -> Result<(BTreeMap<Exponent, crate::polyalg::RatMatrix>, BTreeMap<Exponent, crate::polyalg::RatMatrix>), Error> {
    let pencil = decompose_g(gr, d)?;
    let mut f1 = BTreeMap::new();
    let mut f2 = BTreeMap::new();
    for (k, mat) in pencil.coeffs {
        match k {
            VarKey::Y(e) => f1.insert(e, mat),
            VarKey::Z(e) => f2.insert(e, mat),
        };
    }
    Ok((f1, f2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::momlift::assemble_ln;
    use crate::polyalg::rational::rat;

    fn x(i: usize) -> Poly {
        Poly::var(2, i)
    }

    fn labels(v: &[Exponent]) -> Vec<String> {
        v.iter().map(|e| e.label()).collect()
    }

    #[test]
    fn orthant_and_plane_index_sets() {
        let (y, z) = qmod_indices(&(x(0) * x(1)), 2).unwrap();
        assert_eq!(labels(&y), ["00", "10", "01", "20", "11", "02"]);
        assert_eq!(labels(&z), ["00", "10", "01", "20", "02", "30", "03", "40", "04"]);
        let (_, z) = qmod_indices(&(x(0) * x(0) + x(1) * x(1)), 2).unwrap();
        assert_eq!(labels(&z), ["00", "10", "01", "11", "02", "12", "03", "13", "04"]);
        let (y, z) = qmod_indices(&Poly::one(2), 2).unwrap();
        assert!(z.is_empty());
        assert_eq!(y.len(), 15);
    }

    #[test]
    fn degree_one_localizer_on_orthant() {
        let q = build_qp(&x(0), &(x(0) * x(1)), 2, 1).unwrap();
        let want = LinearPencil::from_printed(
            &[
                &["z10", "z20", "1"],
                &["z20", "z30", "x1"],
                &["1", "x1", "x2"],
            ],
            2,
        )
        .unwrap();
        assert_eq!(q, want);
    }

    #[test]
    fn plane_reduction_entry() {
        let q = build_qp(&Poly::one(2), &(x(0) * x(0) + x(1) * x(1)), 2, 0).unwrap();
        let entry = q.entry(3, 3);
        let y = |a, b| Some(VarKey::Y(Exponent::new(vec![a, b])));
        assert_eq!(entry[&y(2, 0)], rat(1));
        assert_eq!(entry[&y(0, 2)], rat(-1));
        assert_eq!(entry[&Some(VarKey::Z(Exponent::new(vec![0, 4])))], rat(1));
    }

    #[test]
    fn polynomial_case_degenerates() {
        let g = MatPoly::from_entries(&[vec![Poly::one(2) - x(0) * x(0) - x(1) * x(1)]]).unwrap();
        let gs = vec![x(0), Poly::one(2) - x(1)];
        let a = assemble_lqmod(&RationalMatFn::polynomial(g.clone()), &gs, 2).unwrap();
        let b = assemble_ln(&g, &gs, 2).unwrap();
        assert_eq!(a.pencils, b.pencils);
        assert_eq!(a.y_index, b.y_index);
        assert!(a.z_index.is_empty());
    }

    #[test]
    fn index_escape_is_reported() {
        let g = MatPoly::from_entries(&[vec![x(0).pow(6)]]).unwrap();
        let gr = RationalMatFn::new(g, x(0) * x(1)).unwrap();
        assert!(matches!(decompose_g(&gr, 2), Err(Error::IndexEscape(_))));
    }

    #[test]
    fn p_must_be_multiple_of_denominator() {
        let g = MatPoly::identity(1, 2);
        let gr = RationalMatFn::new(g, x(0)).unwrap().with_p(x(1)).unwrap();
        assert!(matches!(decompose_g(&gr, 1), Err(Error::InvalidArgument(_))));
    }
}
