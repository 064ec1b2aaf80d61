//! Moment-based lifted LMIs: the sets `L` (matrix sos-concave case) and
//! `L_N` (Putinar-type relaxation with localizing matrices).

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::polyalg::rational::{fmt_rat, parse_rat};
use crate::polyalg::{basis_exponents, Exponent, MatPoly, Poly, Rat, RatMatrix};

/// Name of a lifted variable: a moment `y_α` or a rational moment `z_β`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum VarKey {
    Y(Exponent),
    Z(Exponent),
}

impl VarKey {
    pub fn exponent(&self) -> &Exponent {
        match self {
            VarKey::Y(e) | VarKey::Z(e) => e,
        }
    }

    /// Parses `y201` / `z04` style labels (one digit per coordinate).
    pub fn parse(s: &str, nvars: usize) -> Result<VarKey, Error> {
        let s = s.trim();
        let (head, digits) = s.split_at(1.min(s.len()));
        let entries: Option<Vec<u32>> = digits.chars().map(|c| c.to_digit(10)).collect();
        let entries = entries
            .filter(|e| e.len() == nvars)
            .ok_or_else(|| Error::Parse(format!("bad variable label {s:?}")))?;
        let e = Exponent::new(entries);
        match head {
            "y" => Ok(VarKey::Y(e)),
            "z" => Ok(VarKey::Z(e)),
            _ => Err(Error::Parse(format!("bad variable label {s:?}"))),
        }
    }
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKey::Y(e) => write!(f, "y{}", e.label()),
            VarKey::Z(e) => write!(f, "z{}", e.label()),
        }
    }
}

/// Affine symmetric matrix pencil `C + Σ_k v_k M_k` over lifted variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearPencil {
    pub size: usize,
    pub constant: RatMatrix,
    pub coeffs: BTreeMap<VarKey, RatMatrix>,
}

impl LinearPencil {
    pub fn new(size: usize) -> Self {
        LinearPencil {
            size,
            constant: RatMatrix::zeros(size),
            coeffs: BTreeMap::new(),
        }
    }

    /// Adds `c` to entry `(i,j)` and its mirror of the coefficient of `key`.
    pub fn add_sym(&mut self, key: VarKey, i: usize, j: usize, c: &Rat) {
        if c.is_zero() {
            return;
        }
        let n = self.size;
        let mat = self.coeffs.entry(key.clone()).or_insert_with(|| RatMatrix::zeros(n));
        mat.add_at(i, j, c);
        if i != j {
            mat.add_at(j, i, c);
        }
        if mat.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn add_matrix(&mut self, key: VarKey, m: &RatMatrix) {
        if m.is_zero() {
            return;
        }
        let n = self.size;
        let slot = self.coeffs.entry(key.clone()).or_insert_with(|| RatMatrix::zeros(n));
        slot.add_scaled(m, &Rat::one());
        if slot.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.constant.is_symmetric() && self.coeffs.values().all(|m| m.is_symmetric())
    }

    pub fn variables(&self) -> impl Iterator<Item = &VarKey> {
        self.coeffs.keys()
    }

    /// Linear-form view of entry `(i,j)`; `None` stands for the constant.
    pub fn entry(&self, i: usize, j: usize) -> BTreeMap<Option<VarKey>, Rat> {
        let mut out = BTreeMap::new();
        if !self.constant.get(i, j).is_zero() {
            out.insert(None, self.constant.get(i, j).clone());
        }
        for (k, m) in &self.coeffs {
            if !m.get(i, j).is_zero() {
                out.insert(Some(k.clone()), m.get(i, j).clone());
            }
        }
        out
    }

    /// Exact evaluation; unassigned variables count as zero.
    pub fn eval_rat(&self, values: &BTreeMap<VarKey, Rat>) -> RatMatrix {
        let mut out = self.constant.clone();
        for (k, m) in &self.coeffs {
            if let Some(v) = values.get(k) {
                out.add_scaled(m, v);
            }
        }
        out
    }

    pub fn eval_f64(&self, values: &BTreeMap<VarKey, f64>) -> DMatrix<f64> {
        let mut out = self.constant.to_f64();
        for (k, m) in &self.coeffs {
            if let Some(v) = values.get(k) {
                if *v != 0.0 {
                    out += m.to_f64() * *v;
                }
            }
        }
        out
    }

    /// Moves the given variables into the constant term.
    pub fn substitute(&self, fixed: &BTreeMap<VarKey, Rat>) -> LinearPencil {
        let mut out = LinearPencil {
            size: self.size,
            constant: self.constant.clone(),
            coeffs: BTreeMap::new(),
        };
        for (k, m) in &self.coeffs {
            match fixed.get(k) {
                Some(v) => out.constant.add_scaled(m, v),
                None => {
                    out.coeffs.insert(k.clone(), m.clone());
                }
            }
        }
        out
    }

    /// Principal submatrix on the given rows and columns.
    pub fn principal(&self, idx: &[usize]) -> LinearPencil {
        let sub = |m: &RatMatrix| {
            RatMatrix::from_rows(
                idx.iter()
                    .map(|&i| idx.iter().map(|&j| m.get(i, j).clone()).collect())
                    .collect(),
            )
        };
        let mut out = LinearPencil {
            size: idx.len(),
            constant: sub(&self.constant),
            coeffs: BTreeMap::new(),
        };
        for (k, m) in &self.coeffs {
            let s = sub(m);
            if !s.is_zero() {
                out.coeffs.insert(k.clone(), s);
            }
        }
        out
    }

    /// Builds a pencil from printed entries such as `"2-y200-2y002"`,
    /// `"z10+z03"`, `"x1"` or `"1"`.
    ///
    /// Bare numbers multiply `y_0`, and `x_i` stands for `y_{e_i}`, so the
    /// result is the unpinned form produced by the assemblers.
    pub fn from_printed(rows: &[&[&str]], nvars: usize) -> Result<LinearPencil, Error> {
        let size = rows.len();
        let mut p = LinearPencil::new(size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::Dimension(format!("printed row {i} has {} entries", row.len())));
            }
            for (j, s) in row.iter().enumerate() {
                let n = p.size;
                for (key, c) in parse_linear(s, nvars)? {
                    let mat = p.coeffs.entry(key).or_insert_with(|| RatMatrix::zeros(n));
                    mat.add_at(i, j, &c);
                }
            }
        }
        p.coeffs.retain(|_, m| !m.is_zero());
        Ok(p)
    }

    /// Renders entry `(i,j)` using `x_i`/`1` for pinned moments.
    pub fn render_entry(&self, i: usize, j: usize) -> String {
        let mut parts: Vec<(Rat, String)> = Vec::new();
        if !self.constant.get(i, j).is_zero() {
            parts.push((self.constant.get(i, j).clone(), String::new()));
        }
        for (k, m) in &self.coeffs {
            let c = m.get(i, j);
            if c.is_zero() {
                continue;
            }
            let e = k.exponent();
            let name = match k {
                VarKey::Y(_) if e.is_zero() => String::new(),
                VarKey::Y(_) if e.unit_index().is_some() => {
                    format!("x{}", e.unit_index().unwrap() + 1)
                }
                _ => k.to_string(),
            };
            parts.push((c.clone(), name));
        }
        // constants first
        parts.sort_by_key(|(_, name)| !name.is_empty());
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (c, name)) in parts.iter().enumerate() {
            let neg = c < &Rat::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            match (a.is_one(), name.is_empty()) {
                (_, true) => out.push_str(&fmt_rat(&a)),
                (true, false) => out.push_str(name),
                (false, false) => {
                    out.push_str(&fmt_rat(&a));
                    out.push_str(name);
                }
            }
        }
        out
    }
}

fn parse_linear(s: &str, nvars: usize) -> Result<Vec<(VarKey, Rat)>, Error> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = compact.as_bytes();
    for k in 1..=bytes.len() {
        if k == bytes.len() || ((bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'e') {
            terms.push(&compact[start..k]);
            start = k;
        }
    }
    let mut out = Vec::new();
    for t in terms {
        let (sign, body) = match t.as_bytes().first() {
            Some(b'-') => (-Rat::one(), &t[1..]),
            Some(b'+') => (Rat::one(), &t[1..]),
            _ => (Rat::one(), t),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("empty term in {s:?}")));
        }
        let split = body.find(|c: char| c.is_ascii_alphabetic()).unwrap_or(body.len());
        let (num, var) = body.split_at(split);
        let num = num.trim_end_matches('*');
        let c = if num.is_empty() { Rat::one() } else { parse_rat(num)? } * &sign;
        let key = if var.is_empty() {
            VarKey::Y(Exponent::zero(nvars))
        } else if let Some(ix) = var.strip_prefix('x') {
            let i: usize = ix
                .parse()
                .map_err(|_| Error::Parse(format!("bad coordinate {var:?}")))?;
            if i == 0 || i > nvars {
                return Err(Error::Parse(format!("coordinate {var:?} out of range")));
            }
            VarKey::Y(Exponent::unit(nvars, i - 1))
        } else {
            VarKey::parse(var, nvars)?
        };
        if c.is_zero() {
            continue;
        }
        out.push((key, c));
    }
    Ok(out)
}

/// What a pinned lifted variable is fixed to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Pin {
    One,
    Coord(usize),
}

/// A lifted LMI `{x : ∃ y, z with pins, every pencil ⪰ 0}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LiftedLMI {
    pub nvars: usize,
    pub y_index: Vec<Exponent>,
    pub z_index: Vec<Exponent>,
    pub pins: Vec<(Exponent, Pin)>,
    pub pencils: Vec<LinearPencil>,
    pub labels: Vec<String>,
}

impl LiftedLMI {
    pub(crate) fn with_pins(
        nvars: usize,
        y_index: Vec<Exponent>,
        z_index: Vec<Exponent>,
        pencils: Vec<(String, LinearPencil)>,
    ) -> Self {
        let mut pins = vec![(Exponent::zero(nvars), Pin::One)];
        pins.extend((0..nvars).map(|i| (Exponent::unit(nvars, i), Pin::Coord(i))));
        let (labels, pencils) = pencils.into_iter().unzip();
        LiftedLMI {
            nvars,
            y_index,
            z_index,
            pins,
            pencils,
            labels,
        }
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), Error> {
        for (e, _) in &self.pins {
            if !self.y_index.contains(e) {
                return Err(Error::IndexEscape(format!("pinned y{} not in y_index", e.label())));
            }
        }
        for (k, p) in self.pencils.iter().enumerate() {
            if !p.is_symmetric() {
                return Err(Error::NotSymmetric(format!("pencil {k}")));
            }
            for v in p.variables() {
                let ok = match v {
                    VarKey::Y(e) => self.y_index.binary_search(e).is_ok(),
                    VarKey::Z(e) => self.z_index.binary_search(e).is_ok(),
                };
                if !ok {
                    return Err(Error::IndexEscape(format!("{v} in pencil {k}")));
                }
            }
        }
        Ok(())
    }

    pub fn pinned_values(&self, x: &[Rat]) -> BTreeMap<VarKey, Rat> {
        self.pins
            .iter()
            .map(|(e, pin)| {
                let v = match pin {
                    Pin::One => Rat::one(),
                    Pin::Coord(i) => x[*i].clone(),
                };
                (VarKey::Y(e.clone()), v)
            })
            .collect()
    }

    fn is_pinned(&self, e: &Exponent) -> bool {
        self.pins.iter().any(|(p, _)| p == e)
    }

    /// Lifting variables left free once `x` is fixed.
    pub fn free_variables(&self) -> Vec<VarKey> {
        self.y_index
            .iter()
            .filter(|e| !self.is_pinned(e))
            .map(|e| VarKey::Y(e.clone()))
            .chain(self.z_index.iter().map(|e| VarKey::Z(e.clone())))
            .collect()
    }

    /// The pencils with `y_0 = 1`, `y_{e_i} = x_i` substituted.
    pub fn pin(&self, x: &[Rat]) -> Result<Vec<LinearPencil>, Error> {
        if x.len() != self.nvars {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.nvars
            )));
        }
        let fixed = self.pinned_values(x);
        Ok(self.pencils.iter().map(|p| p.substitute(&fixed)).collect())
    }

    /// Pencils with only `y_0 = 1` fixed; `x` stays as the variables `y_{e_i}`.
    pub fn pin_constant(&self) -> Vec<LinearPencil> {
        let mut fixed = BTreeMap::new();
        fixed.insert(VarKey::Y(Exponent::zero(self.nvars)), Rat::one());
        self.pencils.iter().map(|p| p.substitute(&fixed)).collect()
    }

    /// `y_α = x^α` and, when `p` is given, `z_β = x^β / p(x)`.
    pub fn canonical_lifting(&self, x: &[Rat], p: Option<&Poly>) -> Result<BTreeMap<VarKey, Rat>, Error> {
        let mono = |e: &Exponent| Poly::monomial(e.clone(), Rat::one()).eval(x);
        let mut out: BTreeMap<VarKey, Rat> =
            self.y_index.iter().map(|e| (VarKey::Y(e.clone()), mono(e))).collect();
        if !self.z_index.is_empty() {
            let p = p.ok_or_else(|| Error::InvalidArgument("z-lifting needs p".into()))?;
            let px = p.eval(x);
            if px.is_zero() {
                return Err(Error::InvalidArgument("p vanishes at the point".into()));
            }
            for e in &self.z_index {
                out.insert(VarKey::Z(e.clone()), mono(e) / &px);
            }
        }
        Ok(out)
    }

    /// One line summary, e.g. `2 pencils (3×3, 4×4), 6 free lifting variables`.
    pub fn summary(&self) -> String {
        let sizes: Vec<String> = self
            .pencils
            .iter()
            .map(|p| format!("{0}×{0}", p.size))
            .collect();
        format!(
            "{} pencils ({}), {} free lifting variables",
            self.pencils.len(),
            sizes.join(", "),
            self.free_variables().len()
        )
    }
}

const FORMAT_TAG: &str = "lifted-lmi/1";

fn exp_json(e: &Exponent) -> serde_json::Value {
    serde_json::json!(e.entries())
}

fn key_json(k: &VarKey) -> serde_json::Value {
    match k {
        VarKey::Y(e) => serde_json::json!({"y": e.entries()}),
        VarKey::Z(e) => serde_json::json!({"z": e.entries()}),
    }
}

fn matrix_json(m: &RatMatrix) -> serde_json::Value {
    let mut out = Vec::new();
    for i in 0..m.dim() {
        for j in i..m.dim() {
            if !m.get(i, j).is_zero() {
                out.push(serde_json::json!([i, j, crate::problem::rat_value(m.get(i, j))]));
            }
        }
    }
    serde_json::Value::Array(out)
}

fn matrix_from_json(v: &serde_json::Value, size: usize, path: &str) -> Result<RatMatrix, Error> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{path}: expected a list of [i, j, value]")))?;
    let mut m = RatMatrix::zeros(size);
    for (k, t) in arr.iter().enumerate() {
        let tp = format!("{path}[{k}]");
        let t = t
            .as_array()
            .filter(|t| t.len() == 3)
            .ok_or_else(|| Error::Parse(format!("{tp}: expected [i, j, value]")))?;
        let idx = |x: &serde_json::Value| x.as_u64().map(|v| v as usize).filter(|&v| v < size);
        let (i, j) = match (idx(&t[0]), idx(&t[1])) {
            (Some(i), Some(j)) => (i, j),
            _ => return Err(Error::Parse(format!("{tp}: index out of range"))),
        };
        m.set_sym(i, j, crate::problem::parse_rat_value(&t[2], &tp)?);
    }
    Ok(m)
}

fn exps_from_json(v: Option<&serde_json::Value>, n: usize, path: &str) -> Result<Vec<Exponent>, Error> {
    let arr = v
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Parse(format!("{path}: expected a list of exponents")))?;
    arr.iter()
        .enumerate()
        .map(|(k, e)| crate::problem::parse_exp(Some(e), n, &format!("{path}[{k}]")))
        .collect()
}

impl LiftedLMI {
    /// JSON text with exact rational coefficients; maps have sorted keys
    /// and index sets keep their graded order, so equal liftings serialize
    /// to identical bytes.
    pub fn to_json(&self) -> String {
        let pins: Vec<serde_json::Value> = self
            .pins
            .iter()
            .map(|(e, pin)| match pin {
                Pin::One => serde_json::json!({"y": e.entries(), "value": "1"}),
                Pin::Coord(i) => serde_json::json!({"y": e.entries(), "value": format!("x{}", i + 1)}),
            })
            .collect();
        let pencils: Vec<serde_json::Value> = self
            .pencils
            .iter()
            .zip(&self.labels)
            .map(|(p, label)| {
                let coeffs: Vec<serde_json::Value> = p
                    .coeffs
                    .iter()
                    .map(|(k, m)| serde_json::json!({"var": key_json(k), "matrix": matrix_json(m)}))
                    .collect();
                serde_json::json!({
                    "label": label,
                    "size": p.size,
                    "constant": matrix_json(&p.constant),
                    "coeffs": coeffs,
                })
            })
            .collect();
        let v = serde_json::json!({
            "format": FORMAT_TAG,
            "n": self.nvars,
            "y_index": self.y_index.iter().map(exp_json).collect::<Vec<_>>(),
            "z_index": self.z_index.iter().map(exp_json).collect::<Vec<_>>(),
            "pins": pins,
            "pencils": pencils,
        });
        serde_json::to_string_pretty(&v).expect("json values serialize")
    }

    pub fn from_json(text: &str) -> Result<LiftedLMI, Error> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if v.get("format").and_then(|f| f.as_str()) != Some(FORMAT_TAG) {
            return Err(Error::Parse(format!("format: expected {FORMAT_TAG:?}")));
        }
        let n = v
            .get("n")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Parse("n: expected a nonnegative integer".into()))? as usize;
        let y_index = exps_from_json(v.get("y_index"), n, "y_index")?;
        let z_index = exps_from_json(v.get("z_index"), n, "z_index")?;
        let mut pins = Vec::new();
        for (k, p) in v.get("pins").and_then(|x| x.as_array()).into_iter().flatten().enumerate() {
            let path = format!("pins[{k}]");
            let e = crate::problem::parse_exp(p.get("y"), n, &format!("{path}.y"))?;
            let pin = match p.get("value").and_then(|x| x.as_str()) {
                Some("1") => Pin::One,
                Some(s) => match s.strip_prefix('x').and_then(|i| i.parse::<usize>().ok()) {
                    Some(i) if (1..=n).contains(&i) => Pin::Coord(i - 1),
                    _ => return Err(Error::Parse(format!("{path}.value: expected \"1\" or x1..x{n}"))),
                },
                None => return Err(Error::Parse(format!("{path}.value: missing"))),
            };
            pins.push((e, pin));
        }
        let mut pencils = Vec::new();
        let mut labels = Vec::new();
        let list = v
            .get("pencils")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Parse("pencils: expected a list".into()))?;
        for (k, p) in list.iter().enumerate() {
            let path = format!("pencils[{k}]");
            let size = p
                .get("size")
                .and_then(|x| x.as_u64())
                .ok_or_else(|| Error::Parse(format!("{path}.size: expected an integer")))? as usize;
            let mut pencil = LinearPencil::new(size);
            pencil.constant = matrix_from_json(p.get("constant").unwrap_or(&serde_json::Value::Null), size, &format!("{path}.constant"))?;
            for (c, t) in p.get("coeffs").and_then(|x| x.as_array()).into_iter().flatten().enumerate() {
                let cp = format!("{path}.coeffs[{c}]");
                let var = t.get("var").ok_or_else(|| Error::Parse(format!("{cp}.var: missing")))?;
                let key = match (var.get("y"), var.get("z")) {
                    (Some(e), None) => VarKey::Y(crate::problem::parse_exp(Some(e), n, &format!("{cp}.var.y"))?),
                    (None, Some(e)) => VarKey::Z(crate::problem::parse_exp(Some(e), n, &format!("{cp}.var.z"))?),
                    _ => return Err(Error::Parse(format!("{cp}.var: expected {{\"y\": ..}} or {{\"z\": ..}}"))),
                };
                let m = matrix_from_json(t.get("matrix").unwrap_or(&serde_json::Value::Null), size, &format!("{cp}.matrix"))?;
                pencil.coeffs.insert(key, m);
            }
            labels.push(p.get("label").and_then(|x| x.as_str()).unwrap_or("").to_string());
            pencils.push(pencil);
        }
        let lmi = LiftedLMI {
            nvars: n,
            y_index,
            z_index,
            pins,
            pencils,
            labels,
        };
        lmi.validate()?;
        Ok(lmi)
    }
}

impl fmt::Display for LiftedLMI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary())?;
        for (p, label) in self.pencils.iter().zip(&self.labels) {
            writeln!(f, "{label}:")?;
            let cells: Vec<Vec<String>> = (0..p.size)
                .map(|i| (0..p.size).map(|j| p.render_entry(i, j)).collect())
                .collect();
            let width = cells.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
            for row in cells {
                let padded: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
                writeln!(f, "  [ {} ]", padded.join("  "))?;
            }
        }
        Ok(())
    }
}

/// `A_α^{(d)}` with `Σ_α x^α A_α = [x]_d [x]_dᵀ`.
pub fn build_a(n: usize, d: u32) -> BTreeMap<Exponent, RatMatrix> {
    build_localizer_unchecked(&Poly::one(n), d)
}

fn build_localizer_unchecked(g: &Poly, half: u32) -> BTreeMap<Exponent, RatMatrix> {
    let basis = basis_exponents(g.nvars(), half);
    let s = basis.len();
    let mut out: BTreeMap<Exponent, RatMatrix> = BTreeMap::new();
    for i in 0..s {
        for j in i..s {
            let bij = basis[i].add(&basis[j]);
            for (e, c) in g.terms() {
                let mat = out.entry(bij.add(e)).or_insert_with(|| RatMatrix::zeros(s));
                mat.add_at(i, j, c);
                if i != j {
                    mat.add_at(j, i, c);
                }
            }
        }
    }
    out.retain(|_, m| !m.is_zero());
    out
}

/// `B_β^{(N)}` with `Σ_β x^β B_β = g(x) [x]_{N-d_k} [x]_{N-d_k}ᵀ`.
pub fn build_localizer(g: &Poly, order: u32, dk: u32) -> Result<BTreeMap<Exponent, RatMatrix>, Error> {
    if order < dk {
        return Err(Error::OrderTooSmall(format!(
            "order {order} below localizer half-degree {dk}"
        )));
    }
    if g.deg() > 2 * dk {
        return Err(Error::InvalidArgument(format!(
            "half-degree {dk} too small for a degree-{} polynomial",
            g.deg()
        )));
    }
    Ok(build_localizer_unchecked(g, order - dk))
}

fn pencil_from_terms(size: usize, terms: &BTreeMap<Exponent, RatMatrix>) -> LinearPencil {
    let mut p = LinearPencil::new(size);
    for (e, m) in terms {
        p.add_matrix(VarKey::Y(e.clone()), m);
    }
    p
}

fn matpoly_pencil(g: &MatPoly) -> LinearPencil {
    pencil_from_terms(g.m(), g.terms())
}

/// Relaxation half-degree used for `L`: `max(1, ⌈deg G / 2⌉)`.
pub fn lift_half_degree(g: &MatPoly) -> u32 {
    g.half_degree().max(1)
}

/// The lifted LMI `L` built from `G` and the moment matrix `A_d(y)`.
pub fn assemble_l(g: &MatPoly) -> Result<LiftedLMI, Error> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial("G is identically zero".into()));
    }
    let n = g.nvars();
    let d = lift_half_degree(g);
    let moments = build_a(n, d);
    let size = basis_exponents(n, d).len();
    Ok(LiftedLMI::with_pins(
        n,
        basis_exponents(n, 2 * d),
        Vec::new(),
        vec![
            ("G(y)".into(), matpoly_pencil(g)),
            (format!("A_{d}(y)"), pencil_from_terms(size, &moments)),
        ],
    ))
}

/// Smallest admissible order for `assemble_ln`.
pub fn min_order(g: &MatPoly, gs: &[Poly]) -> u32 {
    gs.iter()
        .map(|p| p.deg().div_ceil(2))
        .chain([g.half_degree(), 1])
        .max()
        .unwrap_or(1)
}

/// The order-`N` relaxation `L_N` with localizers for `g_1, …, g_m`.
pub fn assemble_ln(g: &MatPoly, gs: &[Poly], order: u32) -> Result<LiftedLMI, Error> {
    let n = g.nvars();
    if let Some(k) = gs.iter().position(|p| p.nvars() != n) {
        return Err(Error::Dimension(format!("constraint g{} has wrong nvars", k + 1)));
    }
    let dmin = min_order(g, gs);
    if order < dmin {
        return Err(Error::OrderTooSmall(format!("order {order} below minimum {dmin}")));
    }
    let mut pencils = vec![("G(y)".to_string(), matpoly_pencil(g))];
    let size = basis_exponents(n, order).len();
    pencils.push(("B0(y)".to_string(), pencil_from_terms(size, &build_a(n, order))));
    for (k, gk) in gs.iter().enumerate() {
        let dk = gk.deg().div_ceil(2);
        let terms = build_localizer(gk, order, dk)?;
        let size = basis_exponents(n, order - dk).len();
        pencils.push((format!("B{}(y)", k + 1), pencil_from_terms(size, &terms)));
    }
    Ok(LiftedLMI::with_pins(
        n,
        basis_exponents(n, 2 * order),
        Vec::new(),
        pencils,
    ))
}

/// Floating-point smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rational::rat;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v.to_vec())
    }

    #[test]
    fn univariate_moment_matrices() {
        let a = build_a(1, 1);
        assert_eq!(a.len(), 3);
        let m = |rows: &[&[i64]]| {
            RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect())
        };
        assert_eq!(a[&e(&[0])], m(&[&[1, 0], &[0, 0]]));
        assert_eq!(a[&e(&[1])], m(&[&[0, 1], &[1, 0]]));
        assert_eq!(a[&e(&[2])], m(&[&[0, 0], &[0, 1]]));
    }

    #[test]
    fn moment_matrix_pattern() {
        let a = build_a(3, 1);
        assert_eq!(a[&e(&[0, 0, 0])].get(0, 0), &rat(1));
        let a1 = &a[&e(&[1, 0, 0])];
        for i in 0..4 {
            for j in 0..4 {
                let want = (i, j) == (0, 1) || (i, j) == (1, 0);
                assert_eq!(a1.get(i, j) == &rat(1), want);
            }
        }
        let a22 = &build_a(2, 2)[&e(&[2, 2])];
        let basis = basis_exponents(2, 2);
        let mut ones = 0;
        for i in 0..6 {
            for j in 0..6 {
                if a22.get(i, j).is_one() {
                    ones += 1;
                    assert_eq!(basis[i].add(&basis[j]), e(&[2, 2]));
                }
            }
        }
        assert_eq!(ones, 3);
    }

    #[test]
    fn localizer_examples() {
        let b = build_localizer(&x(2, 0), 1, 1).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[&e(&[1, 0])].get(0, 0), &rat(1));
        assert!(build_localizer(&x(2, 0), 0, 1).is_err());

        let g = Poly::one(2) - x(2, 0) * x(2, 0) - x(2, 1) * x(2, 1);
        let b = build_localizer(&g, 2, 1).unwrap();
        assert_eq!(b[&e(&[0, 0])].get(0, 0), &rat(1));
        let b20 = &b[&e(&[2, 0])];
        assert_eq!(b20.get(0, 0), &rat(-1));
        assert_eq!(b20.get(1, 1), &rat(1));
        assert_eq!(build_localizer(&Poly::one(3), 2, 0).unwrap(), build_a(3, 2));
    }

    #[test]
    fn printed_entries_parse() {
        let p = LinearPencil::from_printed(&[&["2-y200-2y002", "1+y110"], &["1+y110", "x1"]], 3)
            .unwrap();
        let c = p.entry(0, 0);
        assert_eq!(c[&Some(VarKey::Y(e(&[0, 0, 0])))], rat(2));
        assert_eq!(c[&Some(VarKey::Y(e(&[0, 0, 2])))], rat(-2));
        assert_eq!(p.entry(1, 1)[&Some(VarKey::Y(e(&[1, 0, 0])))], rat(1));
        assert_eq!(p.render_entry(0, 0), "2 - y200 - 2y002");
        assert_eq!(p.render_entry(1, 1), "x1");
    }

    #[test]
    fn constant_identity_lifts_to_moment_matrix_only() {
        let l = assemble_l(&MatPoly::identity(2, 2)).unwrap();
        l.validate().unwrap();
        assert_eq!(l.pencils[0].variables().count(), 1);
        assert_eq!(l.free_variables().len(), 3);
        assert_eq!(l.summary(), "2 pencils (2×2, 3×3), 3 free lifting variables");
    }

    #[test]
    fn ln_with_no_constraints_matches_l() {
        let n = 2;
        let g = MatPoly::from_entries(&[vec![Poly::one(n) - x(n, 0) * x(n, 0) - x(n, 1) * x(n, 1)]])
            .unwrap();
        let l = assemble_l(&g).unwrap();
        let ln = assemble_ln(&g, &[], 1).unwrap();
        assert_eq!(l.pencils, ln.pencils);
        assert_eq!(l.y_index, ln.y_index);
        assert!(matches!(assemble_ln(&g, &[x(n, 0).pow(4)], 1), Err(Error::OrderTooSmall(_))));
    }

    #[test]
    fn substitute_and_pin() {
        let g = MatPoly::identity(1, 1);
        let l = assemble_l(&g).unwrap();
        let pinned = l.pin(&[rat(3)]).unwrap();
        assert_eq!(pinned[1].constant.get(0, 1), &rat(3));
        assert_eq!(pinned[1].variables().count(), 1);
        assert!(l.pin(&[rat(1), rat(2)]).is_err());
    }
}
