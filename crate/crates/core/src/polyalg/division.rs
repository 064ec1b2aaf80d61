//! Single-divisor reduction under pure lexicographic order `x1 > x2 > … > xn`.

use num_traits::Zero;

use super::exponent::Exponent;
use super::poly::Poly;
use super::rational::Rat;
use crate::error::Error;

/// Exponent of the lexicographically largest monomial of `p`.
pub fn lex_lead(p: &Poly) -> Result<Exponent, Error> {
    p.terms()
        .keys()
        .max_by(|a, b| a.lex_cmp(b))
        .cloned()
        .ok_or_else(|| Error::ZeroPolynomial("leading exponent of the zero polynomial".into()))
}

fn lex_lead_term(p: &Poly) -> Option<(Exponent, Rat)> {
    p.terms()
        .iter()
        .max_by(|a, b| a.0.lex_cmp(b.0))
        .map(|(e, c)| (e.clone(), c.clone()))
}

/// Divides `f` by `p`: returns `(q, r)` with `f = q·p + r` and no monomial of
/// `r` divisible by the leading monomial of `p`.
///
/// Each step removes the current lex-leading term of the working polynomial,
/// so the loop terminates.
pub fn lex_reduce(f: &Poly, p: &Poly) -> Result<(Poly, Poly), Error> {
    if f.nvars() != p.nvars() {
        return Err(Error::Dimension("lex_reduce: nvars mismatch".into()));
    }
    let (lead_e, lead_c) = lex_lead_term(p)
        .ok_or_else(|| Error::ZeroPolynomial("division by the zero polynomial".into()))?;
    let n = f.nvars();
    let mut work = f.clone();
    let mut q = Poly::zero(n);
    let mut r = Poly::zero(n);
    while let Some((e, c)) = lex_lead_term(&work) {
        match e.checked_sub(&lead_e) {
            Some(shift) => {
                let factor = &c / &lead_c;
                q.add_term(shift.clone(), factor.clone());
                let sub = p.mul_monomial(&shift, &factor);
                work = &work - &sub;
                debug_assert!(work.coeff(&e).is_zero());
            }
            None => {
                r.add_term(e.clone(), c.clone());
                work.add_term(e, -c);
            }
        }
    }
    Ok((q, r))
}

/// Exact quotient `f / p`, or `None` when `p` does not divide `f`.
///
/// A single polynomial is a Gröbner basis of its ideal, so a zero remainder
/// is equivalent to divisibility.
pub fn exact_divide(f: &Poly, p: &Poly) -> Result<Option<Poly>, Error> {
    let (q, r) = lex_reduce(f, p)?;
    Ok(if r.is_zero() { Some(q) } else { None })
}
