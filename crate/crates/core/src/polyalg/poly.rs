use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::exponent::Exponent;
use super::rational::{fmt_rat, to_f64, Rat};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, so the zero polynomial has an empty
/// term map and two polynomials are equal iff their term maps are.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Poly::monomial(Exponent::zero(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rat::one())
    }

    /// The coordinate `x_i` (zero-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        Poly::monomial(Exponent::unit(nvars, i), Rat::one())
    }

    pub fn monomial(exp: Exponent, c: Rat) -> Self {
        let nvars = exp.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, Rat)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.nvars(), nvars, "exponent length mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Rat> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Exponent, Rat> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exponent) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    /// Adds `c·x^e` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, e: Exponent, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    /// Total degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> u32 {
        self.degree().unwrap_or(0)
    }

    /// Degree in the variables of `range`.
    pub fn partial_degree(&self, range: std::ops::Range<usize>) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| e.partial_degree(range.clone()))
            .max()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_zero())
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, e: &Exponent, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.add(e), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `∂/∂x_i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let a = e.entries()[i];
            if a == 0 {
                continue;
            }
            let mut v = e.entries().to_vec();
            v[i] -= 1;
            out.add_term(Exponent::new(v), c * Rat::from_integer(a.into()));
        }
        out
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.nvars, "point dimension mismatch");
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &a) in x.iter().zip(e.entries()) {
                for _ in 0..a {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| to_f64(c) * e.eval_f64(x))
            .sum()
    }

    /// Substitutes `x_i ↦ values[i]` for the variables listed in `values`
    /// (those with `Some`) and keeps the rest symbolic.
    pub fn partial_eval(&self, values: &[Option<Rat>]) -> Poly {
        assert_eq!(values.len(), self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = e.entries().to_vec();
            for (i, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    for _ in 0..rest[i] {
                        coef *= v;
                    }
                    rest[i] = 0;
                }
            }
            out.add_term(Exponent::new(rest), coef);
        }
        out
    }

    /// Re-indexes into a ring of `total` variables, placing ours at `offset`.
    pub fn embed(&self, total: usize, offset: usize) -> Poly {
        Poly {
            nvars: total,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.embed(total, offset), c.clone()))
                .collect(),
        }
    }

    /// Applies `map` to every exponent (must be injective on the support or
    /// colliding terms are summed).
    pub fn map_exponents(&self, nvars: usize, map: impl Fn(&Exponent) -> Exponent) -> Poly {
        Poly::from_terms(
            nvars,
            self.terms.iter().map(|(e, c)| (map(e), c.clone())),
        )
    }

    pub fn max_abs_coeff(&self) -> Rat {
        self.terms
            .values()
            .map(|c| c.abs())
            .fold(Rat::zero(), |a, b| if b > a { b } else { a })
    }

    /// Human-readable form with variable names `names[i]`.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .entries()
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| {
                    if a == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{}", names[i], a)
                    }
                })
                .collect();
            if mono.is_empty() {
                s.push_str(&fmt_rat(&abs));
            } else {
                if !abs.is_one() {
                    s.push_str(&fmt_rat(&abs));
                    s.push('*');
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(&default_names(self.nvars)))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut acc: BTreeMap<Exponent, Rat> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.add(eb);
                let c = ca * cb;
                *acc.entry(e).or_insert_with(Rat::zero) += c;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly {
            nvars: self.nvars,
            terms: acc,
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rat::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &'a Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
