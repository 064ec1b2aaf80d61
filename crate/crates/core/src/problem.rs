//! Problem files: JSON descriptions of `G = numerator / denominator` with
//! optional `p`, `q` and domain polynomials.
//!
//! ```json
//! {
//!  "n": 2, "m": 2,
//!  "numerator": [{"exp": [1, 1], "mat": [[7, 5], [5, 11]]}, ...],
//!  "denominator": [{"exp": [1, 1], "coef": 1}],
//!  "q": [{"exp": [2, 2], "coef": "1"}],
//!  "domain": [[{"exp": [1, 0], "coef": 1}]],
//!  "metadata": {"name": "ex4_4"}
//! }
//! ```
//!
//! Rationals may be JSON integers, decimal strings (`"0.25"`) or `"p/q"`.

use std::path::Path;

use serde_json::Value;

use crate::error::Error;
use crate::polyalg::rational::{fmt_rat, parse_rat};
use crate::polyalg::{Exponent, MatPoly, Poly, Rat, RatMatrix};
use crate::ratlift::RationalMatFn;

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub g: RationalMatFn,
    pub domain: Vec<Poly>,
    pub metadata: Value,
}

impl Problem {
    pub fn name(&self) -> String {
        self.metadata
            .get("name")
            .and_then(|v| v.as_str())
            .unwrap_or("problem")
            .to_string()
    }

    pub fn nvars(&self) -> usize {
        self.g.nvars()
    }

    pub fn is_polynomial(&self) -> bool {
        self.g.denominator.is_constant()
    }

    /// `G` as a matrix polynomial; errors for a non-constant denominator.
    pub fn matpoly(&self) -> Result<MatPoly, Error> {
        if !self.is_polynomial() {
            return Err(Error::InvalidArgument("G has a non-constant denominator".into()));
        }
        let c = self.g.denominator.coeff(&Exponent::zero(self.nvars()));
        Ok(self.g.numerator.scale(&(Rat::from_integer(1.into()) / c)))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Problem, Error> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Problem::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Problem, Error> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        parse_problem(&v)
    }

    pub fn to_json(&self) -> String {
        let n = self.nvars();
        let num: Vec<Value> = self
            .g
            .numerator
            .terms()
            .iter()
            .map(|(e, m)| {
                serde_json::json!({
                    "exp": e.entries(),
                    "mat": m.rows().iter().map(|r| r.iter().map(rat_value).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert("n".into(), n.into());
        obj.insert("m".into(), self.g.m().into());
        obj.insert("numerator".into(), Value::Array(num));
        obj.insert("denominator".into(), poly_value(&self.g.denominator));
        obj.insert("p".into(), poly_value(&self.g.p));
        if let Some(q) = &self.g.q {
            obj.insert("q".into(), poly_value(q));
        }
        obj.insert(
            "domain".into(),
            Value::Array(self.domain.iter().map(poly_value).collect()),
        );
        obj.insert("metadata".into(), self.metadata.clone());
        serde_json::to_string_pretty(&Value::Object(obj)).expect("json values serialize")
    }
}

pub(crate) fn rat_value(r: &Rat) -> Value {
    if r.is_integer() {
        if let Ok(i) = r.to_integer().to_string().parse::<i64>() {
            return Value::from(i);
        }
    }
    Value::String(fmt_rat(r))
}

pub(crate) fn poly_value(p: &Poly) -> Value {
    Value::Array(
        p.terms()
            .iter()
            .map(|(e, c)| serde_json::json!({"exp": e.entries(), "coef": rat_value(c)}))
            .collect(),
    )
}

pub(crate) fn parse_rat_value(v: &Value, path: &str) -> Result<Rat, Error> {
    match v {
        Value::Number(n) => parse_rat(&n.to_string()),
        Value::String(s) => parse_rat(s),
        _ => Err(Error::Parse(format!("{path}: expected a rational"))),
    }
    .map_err(|e| Error::Parse(format!("{path}: {e}")))
}

fn usize_field(v: &Value, key: &str) -> Result<usize, Error> {
    v.get(key)
        .and_then(|x| x.as_u64())
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("{key}: expected a nonnegative integer")))
}

pub(crate) fn parse_exp(v: Option<&Value>, n: usize, path: &str) -> Result<Exponent, Error> {
    let arr = v
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Parse(format!("{path}: expected an exponent array")))?;
    if arr.len() != n {
        return Err(Error::Parse(format!("{path}: exponent has {} entries, expected {n}", arr.len())));
    }
    let e: Option<Vec<u32>> = arr.iter().map(|x| x.as_u64().map(|k| k as u32)).collect();
    e.map(Exponent::new)
        .ok_or_else(|| Error::Parse(format!("{path}: exponents must be nonnegative integers")))
}

pub(crate) fn parse_poly(v: &Value, n: usize, path: &str) -> Result<Poly, Error> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{path}: expected a list of terms")))?;
    let mut p = Poly::zero(n);
    for (k, t) in arr.iter().enumerate() {
        let tp = format!("{path}[{k}]");
        let e = parse_exp(t.get("exp"), n, &format!("{tp}.exp"))?;
        let c = t
            .get("coef")
            .ok_or_else(|| Error::Parse(format!("{tp}.coef: missing")))?;
        p.add_term(e, parse_rat_value(c, &format!("{tp}.coef"))?);
    }
    Ok(p)
}

fn parse_problem(v: &Value) -> Result<Problem, Error> {
    let n = usize_field(v, "n")?;
    let m = usize_field(v, "m")?;
    if n == 0 || m == 0 {
        return Err(Error::Parse("n and m must be positive".into()));
    }
    let num = v
        .get("numerator")
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Parse("numerator: expected a list of terms".into()))?;
    let mut terms = Vec::new();
    for (k, t) in num.iter().enumerate() {
        let tp = format!("numerator[{k}]");
        let e = parse_exp(t.get("exp"), n, &format!("{tp}.exp"))?;
        let rows = t
            .get("mat")
            .and_then(|x| x.as_array())
            .filter(|r| r.len() == m)
            .ok_or_else(|| Error::Parse(format!("{tp}.mat: expected {m} rows")))?;
        let mut mat = RatMatrix::zeros(m);
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .filter(|r| r.len() == m)
                .ok_or_else(|| Error::Parse(format!("{tp}.mat[{i}]: expected {m} entries")))?;
            for (j, x) in row.iter().enumerate() {
                mat.set(i, j, parse_rat_value(x, &format!("{tp}.mat[{i}][{j}]"))?);
            }
        }
        if let Some((i, j)) = mat.asymmetry() {
            return Err(Error::Parse(format!(
                "{tp}.mat[{i}][{j}]: matrix not symmetric ({} vs {})",
                fmt_rat(mat.get(i, j)),
                fmt_rat(mat.get(j, i))
            )));
        }
        terms.push((e, mat));
    }
    let mut numerator = MatPoly::zero(m, n);
    for (e, mat) in terms {
        numerator = numerator.add(&MatPoly::from_terms(m, n, [(e, mat)])?)?;
    }
    let opt_poly = |key: &str| -> Result<Option<Poly>, Error> {
        match v.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(x) => parse_poly(x, n, key).map(Some),
        }
    };
    let den = opt_poly("denominator")?.unwrap_or_else(|| Poly::one(n));
    if den.is_zero() {
        return Err(Error::Parse("denominator: zero polynomial".into()));
    }
    let mut g = RationalMatFn::new(numerator, den).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(p) = opt_poly("p")? {
        g = g.with_p(p).map_err(|e| Error::Parse(format!("p: {e}")))?;
    }
    if let Some(q) = opt_poly("q")? {
        g = g.with_q(q);
    }
    let mut domain = Vec::new();
    if let Some(d) = v.get("domain") {
        let arr = d
            .as_array()
            .ok_or_else(|| Error::Parse("domain: expected a list of polynomials".into()))?;
        for (k, g) in arr.iter().enumerate() {
            domain.push(parse_poly(g, n, &format!("domain[{k}]"))?);
        }
    }
    Ok(Problem {
        g,
        domain,
        metadata: v.get("metadata").cloned().unwrap_or(Value::Null),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        let text = r#"{"n": 1, "m": 1,
            "numerator": [{"exp": [0], "mat": [["1/2"]]}, {"exp": [1], "mat": [["0.25"]]}, {"exp": [2], "mat": [[-3]]}],
            "domain": [[{"exp": [1], "coef": 1}]]}"#;
        let p = Problem::from_json(text).unwrap();
        assert!(p.is_polynomial());
        assert_eq!(p.matpoly().unwrap().entry(0, 0).to_string(), "1/2 + 1/4*x1 - 3*x1^2");
        assert_eq!(p.domain.len(), 1);
        let again = Problem::from_json(&p.to_json()).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn reports_entry_paths() {
        let bad = r#"{"n": 1, "m": 2, "numerator": [{"exp": [0], "mat": [[1, 2], [3, 1]]}]}"#;
        let err = Problem::from_json(bad).unwrap_err().to_string();
        assert!(err.contains("numerator[0].mat[0][1]"), "{err}");
        let bad = r#"{"n": 1, "m": 1, "numerator": [{"exp": [0], "mat": [["1/0"]]}]}"#;
        assert!(Problem::from_json(bad).unwrap_err().to_string().contains("mat[0][0]"));
        let bad = r#"{"n": 2, "m": 1, "numerator": [{"exp": [0], "mat": [[1]]}]}"#;
        assert!(Problem::from_json(bad).unwrap_err().to_string().contains("numerator[0].exp"));
    }
}
