use std::cmp::Ordering;
use std::fmt;

/// Multi-index `α ∈ ℕⁿ` of the monomial `x^α`.
///
/// The `Ord` impl is the graded order used for every index set in the crate:
/// total degree ascending, ties broken lexicographically *descending*, so that
/// `1, x1, x2, x1², x1x2, x2², …` comes out in that order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(entries: Vec<u32>) -> Self {
        Exponent(entries)
    }

    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    /// `e_i` (zero-based `i`).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Exponent(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Index `i` when this is the unit exponent `e_i`.
    pub fn unit_index(&self) -> Option<usize> {
        if self.degree() != 1 {
            return None;
        }
        self.0.iter().position(|&a| a == 1)
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.nvars(), other.nvars());
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other`, defined only when `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        if !self.dominates(other) {
            return None;
        }
        Some(Exponent(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Componentwise `other ≤ self`, i.e. `x^other` divides `x^self`.
    pub fn dominates(&self, other: &Exponent) -> bool {
        self.nvars() == other.nvars() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// Pure lexicographic comparison with `x1 > x2 > … > xn`.
    pub fn lex_cmp(&self, other: &Exponent) -> Ordering {
        self.0.cmp(&other.0)
    }

    /// Degree in the variables `range` only.
    pub fn partial_degree(&self, range: std::ops::Range<usize>) -> u32 {
        self.0[range].iter().sum()
    }

    /// Places this exponent at `offset` inside an exponent of `total` variables.
    pub fn embed(&self, total: usize, offset: usize) -> Exponent {
        let mut e = vec![0; total];
        e[offset..offset + self.nvars()].copy_from_slice(&self.0);
        Exponent(e)
    }

    /// Sub-exponent over `range`.
    pub fn project(&self, range: std::ops::Range<usize>) -> Exponent {
        Exponent(self.0[range].to_vec())
    }

    /// Compact label such as `"201"` used in the printed form `y_{201}`; falls
    /// back to comma separation when some exponent exceeds 9.
    pub fn label(&self) -> String {
        if self.0.iter().all(|&a| a < 10) {
            self.0.iter().map(|a| a.to_string()).collect()
        } else {
            self.0
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    /// `x^α` in floating point.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// All exponents of `n` variables with total degree `≤ d`, in graded order.
/// This is the index list of the monomial vector `[x]_d`; its length is
/// `C(n+d, d)`.
pub fn basis_exponents(n: usize, d: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    for deg in 0..=d {
        let mut cur = vec![0u32; n];
        homogeneous(n, 0, deg, &mut cur, &mut out);
    }
    out
}

/// Exponents of degree exactly `deg`, emitted lexicographically descending.
fn homogeneous(n: usize, pos: usize, rest: u32, cur: &mut Vec<u32>, out: &mut Vec<Exponent>) {
    if n == 0 {
        if rest == 0 {
            out.push(Exponent(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = rest;
        out.push(Exponent(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for a in (0..=rest).rev() {
        cur[pos] = a;
        homogeneous(n, pos + 1, rest - a, cur, out);
    }
    cur[pos] = 0;
}

/// Exponents `x^α u^β` over `nx + nu` variables with `|α| ≤ dx`, `|β| ≤ du`,
/// sorted in graded order.
pub fn bidegree_exponents(nx: usize, dx: u32, nu: usize, du: u32) -> Vec<Exponent> {
    let xs = basis_exponents(nx, dx);
    let us = basis_exponents(nu, du);
    let mut out = Vec::with_capacity(xs.len() * us.len());
    for a in &xs {
        for b in &us {
            let mut e = a.0.clone();
            e.extend_from_slice(&b.0);
            out.push(Exponent(e));
        }
    }
    out.sort();
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v.to_vec())
    }

    #[test]
    fn basis_two_vars_degree_two() {
        let b = basis_exponents(2, 2);
        assert_eq!(
            b,
            vec![e(&[0, 0]), e(&[1, 0]), e(&[0, 1]), e(&[2, 0]), e(&[1, 1]), e(&[0, 2])]
        );
    }

    #[test]
    fn basis_small_cases() {
        assert_eq!(basis_exponents(3, 0), vec![e(&[0, 0, 0])]);
        assert_eq!(
            basis_exponents(3, 1),
            vec![e(&[0, 0, 0]), e(&[1, 0, 0]), e(&[0, 1, 0]), e(&[0, 0, 1])]
        );
    }

    #[test]
    fn basis_length_and_order() {
        for n in 1..=4usize {
            for d in 0..=4u32 {
                let b = basis_exponents(n, d);
                assert_eq!(b.len() as u64, binomial((n as u64) + d as u64, d as u64));
                assert!(b.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn dominance_and_lex() {
        assert!(e(&[2, 1]).dominates(&e(&[1, 1])));
        assert!(!e(&[2, 0]).dominates(&e(&[1, 1])));
        assert_eq!(e(&[2, 0]).lex_cmp(&e(&[1, 1])), Ordering::Greater);
        assert_eq!(e(&[2, 1]).checked_sub(&e(&[1, 1])), Some(e(&[1, 0])));
        assert_eq!(e(&[0, 1]).checked_sub(&e(&[1, 0])), None);
    }

    #[test]
    fn labels() {
        assert_eq!(e(&[2, 0, 1]).label(), "201");
        assert_eq!(e(&[12, 0]).label(), "12,0");
    }
}
