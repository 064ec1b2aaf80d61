//! Sum-of-squares certificates for matrix concavity.
//!
//! Every search reduces to one scalar problem: find PSD Gram matrices `W_b`
//! with `target = Σ_b w_b · m_bᵀ W_b m_b`, matched coefficient by coefficient.
//! Matrix conditions `H(x) = F(x)ᵀF(x)` are scalarized with auxiliary
//! variables `η` as `ηᵀH(x)η`, so the Gram basis `η_i x^α` indexes the same
//! `W` as `(I_m ⊗ [x]_k)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::Range;

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::momlift::min_eigenvalue;
use crate::polyalg::rational::{approximate, fmt_rat, to_f64};
use crate::polyalg::{basis_exponents, exact_divide, hessian_biform, Exponent, MatPoly, Poly, Rat, RatMatrix};
use crate::ratlift::RationalMatFn;
use crate::sdpcore::{solve_standard, Options, SparseSym, StandardSdp, StdStatus};

/// Reconstruction tolerance per coefficient, relative to `1 + |target|`.
pub const RECONSTRUCTION_TOL: f64 = 1e-6;
/// Smallest Gram eigenvalue accepted for a floating certificate.
pub const GRAM_EIG_TOL: f64 = -1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertKind {
    MatrixSos,
    UniformMatrixSos,
    QModule,
}

impl CertKind {
    pub fn name(&self) -> &'static str {
        match self {
            CertKind::MatrixSos => "matrix-sos",
            CertKind::UniformMatrixSos => "uniform-matrix-sos",
            CertKind::QModule => "qmodule",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertStatus {
    Feasible,
    Infeasible,
    /// The degree cap cannot reach the degree of the target.
    InfeasibleByDegree,
    Unverified,
}

impl CertStatus {
    pub fn name(&self) -> &'static str {
        match self {
            CertStatus::Feasible => "feasible",
            CertStatus::Infeasible => "infeasible",
            CertStatus::InfeasibleByDegree => "infeasible-by-degree",
            CertStatus::Unverified => "unverified",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GramBlock {
    pub label: String,
    pub multiplier: Poly,
    pub basis: Vec<Exponent>,
    pub gram: DMatrix<f64>,
    /// Rounded Gram matrix, present once exact verification succeeded.
    pub exact: Option<RatMatrix>,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub kind: CertKind,
    pub status: CertStatus,
    pub names: Vec<String>,
    pub target: Poly,
    pub blocks: Vec<GramBlock>,
    /// Largest `|reconstructed − target| / (1 + |target|)` over all monomials.
    pub residual: f64,
    /// Largest exact coefficient mismatch of the Gram matrices rounded to
    /// rationals; zero once the projected matrices were verified PSD.
    pub exact_residual: Option<Rat>,
    /// Dual functional on target monomials proving infeasibility.
    pub separating: Vec<(Exponent, f64)>,
    /// Lifting order implied by a q-module certificate.
    pub d: Option<u32>,
    pub iterations: usize,
    pub message: String,
}

impl Certificate {
    fn empty(kind: CertKind, status: CertStatus, names: Vec<String>, target: Poly, message: impl Into<String>) -> Self {
        Certificate {
            kind,
            status,
            names,
            target,
            blocks: Vec::new(),
            residual: 0.0,
            exact_residual: None,
            separating: Vec::new(),
            d: None,
            iterations: 0,
            message: message.into(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == CertStatus::Feasible
    }

    /// Exact rational Gram matrices reproduce the target with zero residual.
    pub fn is_exact(&self) -> bool {
        self.exact_residual.as_ref().is_some_and(|r| r.is_zero())
            && self.blocks.iter().all(|b| b.exact.is_some())
    }

    pub fn min_gram_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .filter(|b| !b.basis.is_empty())
            .map(|b| min_eigenvalue(&b.gram))
            .fold(f64::INFINITY, f64::min)
    }

    /// `Σ_b w_b m_bᵀ W_b m_b` with the exact Gram matrices.
    pub fn reconstruct_exact(&self) -> Option<Poly> {
        let mut out = Poly::zero(self.target.nvars());
        for b in &self.blocks {
            out = out + gram_expand(&b.multiplier, &b.basis, b.exact.as_ref()?);
        }
        Some(out)
    }

    pub fn status_line(&self) -> String {
        let mut s = format!("{}: {}", self.kind.name(), self.status.name());
        if self.is_feasible() {
            let _ = write!(s, " (residual {:.2e}{})", self.residual, if self.is_exact() { ", exact" } else { "" });
        }
        if let Some(d) = self.d {
            let _ = write!(s, ", d = {d}");
        }
        if !self.message.is_empty() {
            let _ = write!(s, "; {}", self.message);
        }
        s
    }

    /// Plain-text dump: header lines, then one section per Gram block with
    /// its basis and upper-triangular entries.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind: {}", self.kind.name());
        let _ = writeln!(s, "status: {}", self.status.name());
        let _ = writeln!(s, "variables: {}", self.names.join(" "));
        let _ = writeln!(s, "target: {}", self.target.to_string_with(&self.names));
        let _ = writeln!(s, "residual: {:e}", self.residual);
        if let Some(r) = &self.exact_residual {
            let _ = writeln!(s, "exact-residual: {}", fmt_rat(r));
        }
        if let Some(d) = self.d {
            let _ = writeln!(s, "d: {d}");
        }
        if !self.message.is_empty() {
            let _ = writeln!(s, "message: {}", self.message);
        }
        for b in &self.blocks {
            let _ = writeln!(s, "\nblock {}", b.label);
            let _ = writeln!(s, "multiplier: {}", b.multiplier.to_string_with(&self.names));
            let basis: Vec<String> = b
                .basis
                .iter()
                .map(|e| Poly::monomial(e.clone(), Rat::one()).to_string_with(&self.names))
                .collect();
            let _ = writeln!(s, "basis: {}", basis.join(", "));
            for i in 0..b.basis.len() {
                for j in i..b.basis.len() {
                    match &b.exact {
                        Some(w) if !w.get(i, j).is_zero() => {
                            let _ = writeln!(s, "{i} {j} {}", fmt_rat(w.get(i, j)));
                        }
                        None if b.gram[(i, j)] != 0.0 => {
                            let _ = writeln!(s, "{i} {j} {:e}", b.gram[(i, j)]);
                        }
                        _ => {}
                    }
                }
            }
        }
        if !self.separating.is_empty() {
            let _ = writeln!(s, "\nseparating functional");
            for (e, v) in &self.separating {
                let m = Poly::monomial(e.clone(), Rat::one()).to_string_with(&self.names);
                let _ = writeln!(s, "{m} {v:e}");
            }
        }
        s
    }
}

fn gram_expand(mult: &Poly, basis: &[Exponent], w: &RatMatrix) -> Poly {
    let mut core = Poly::zero(mult.nvars());
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let c = w.get(i, j);
            if c.is_zero() {
                continue;
            }
            let c = if i == j { c.clone() } else { c * Rat::from_integer(2.into()) };
            core.add_term(basis[i].add(&basis[j]), c);
        }
    }
    mult * &core
}

/// A scalar Gram-matching problem.
#[derive(Clone, Debug)]
pub struct SosProgram {
    pub names: Vec<String>,
    pub target: Poly,
    /// `(label, multiplier, candidate basis)`.
    pub blocks: Vec<(String, Poly, Vec<Exponent>)>,
    /// Variable groups whose degrees are used for pruning.
    pub groups: Vec<Range<usize>>,
}

fn positive_monomial(p: &Poly) -> Option<(Exponent, Rat)> {
    let mut it = p.terms().iter();
    match (it.next(), it.next()) {
        (Some((e, c)), None) if c.is_positive() => Some((e.clone(), c.clone())),
        _ => None,
    }
}

fn weight_dot(w: &[i64], e: &Exponent) -> i64 {
    w.iter().zip(e.entries()).map(|(a, b)| a * *b as i64).sum()
}

/// Removes basis elements that cannot carry a nonzero diagonal. Valid only
/// when every multiplier is a monomial with positive coefficient: then the
/// extreme terms of the sum in any weighted degree are sums of squares and
/// cannot cancel.
fn prune(prog: &mut SosProgram, mults: &[Exponent]) {
    let nv = prog.target.nvars();
    let mut weights: Vec<Vec<i64>> = Vec::new();
    for k in 0..nv {
        let mut w = vec![0; nv];
        w[k] = 1;
        weights.push(w);
    }
    for g in &prog.groups {
        weights.push((0..nv).map(|k| g.contains(&k) as i64).collect());
    }
    weights.push(vec![1; nv]);
    let bounds: Vec<(i64, i64)> = weights
        .iter()
        .map(|w| {
            let vals = prog.target.terms().keys().map(|e| weight_dot(w, e));
            let lo = vals.clone().min().unwrap_or(0);
            let hi = vals.max().unwrap_or(0);
            (lo, hi)
        })
        .collect();
    for (b, (_, _, basis)) in prog.blocks.iter_mut().enumerate() {
        basis.retain(|e| {
            let sq = mults[b].add(e).add(e);
            weights
                .iter()
                .zip(&bounds)
                .all(|(w, (lo, hi))| (*lo..=*hi).contains(&weight_dot(w, &sq)))
        });
    }
    // Diagonal consistency: a monomial absent from the target that only
    // arises from diagonal entries forces those entries to zero.
    loop {
        let mut diag: BTreeMap<Exponent, Vec<(usize, Exponent)>> = BTreeMap::new();
        let mut off: BTreeSet<Exponent> = BTreeSet::new();
        for (b, (_, _, basis)) in prog.blocks.iter().enumerate() {
            for i in 0..basis.len() {
                diag.entry(mults[b].add(&basis[i]).add(&basis[i]))
                    .or_default()
                    .push((b, basis[i].clone()));
                for j in i + 1..basis.len() {
                    off.insert(mults[b].add(&basis[i]).add(&basis[j]));
                }
            }
        }
        let mut drop: BTreeSet<(usize, Exponent)> = BTreeSet::new();
        for (g, owners) in diag {
            if !off.contains(&g) && !prog.target.coeff(&g).is_positive() {
                drop.extend(owners);
            }
        }
        if drop.is_empty() {
            break;
        }
        for (b, (_, _, basis)) in prog.blocks.iter_mut().enumerate() {
            basis.retain(|e| !drop.contains(&(b, e.clone())));
        }
    }
}

struct Entry {
    block: usize,
    i: usize,
    j: usize,
    coef: Rat,
}

/// Solves the Gram-matching SDP and verifies the result.
pub fn solve_sos(mut prog: SosProgram, kind: CertKind, opts: &Options) -> Certificate {
    let nv = prog.target.nvars();
    let names = prog.names.clone();
    let target = prog.target.clone();
    let mono: Option<Vec<(Exponent, Rat)>> = prog.blocks.iter().map(|(_, m, _)| positive_monomial(m)).collect();
    if let Some(m) = &mono {
        let exps: Vec<Exponent> = m.iter().map(|(e, _)| e.clone()).collect();
        prune(&mut prog, &exps);
    }
    let zero_blocks = |prog: &SosProgram| -> Vec<GramBlock> {
        prog.blocks
            .iter()
            .map(|(l, m, b)| GramBlock {
                label: l.clone(),
                multiplier: m.clone(),
                basis: b.clone(),
                gram: DMatrix::zeros(b.len(), b.len()),
                exact: Some(RatMatrix::zeros(b.len())),
            })
            .collect()
    };
    if target.is_zero() {
        let mut c = Certificate::empty(kind, CertStatus::Feasible, names, target, "");
        c.blocks = zero_blocks(&prog);
        c.exact_residual = Some(Rat::zero());
        return c;
    }

    let mut rows: BTreeMap<Exponent, Vec<Entry>> = BTreeMap::new();
    for (b, (_, mult, basis)) in prog.blocks.iter().enumerate() {
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let base = basis[i].add(&basis[j]);
                for (e, c) in mult.terms() {
                    rows.entry(e.add(&base)).or_default().push(Entry {
                        block: b,
                        i,
                        j,
                        coef: c.clone(),
                    });
                }
            }
        }
    }
    if let Some(e) = target.terms().keys().find(|e| !rows.contains_key(*e)) {
        let m = Poly::monomial(e.clone(), Rat::one()).to_string_with(&names);
        return Certificate::empty(kind, CertStatus::Infeasible, names, target, format!("monomial {m} is unreachable from the basis"));
    }

    let sizes: Vec<usize> = prog.blocks.iter().map(|(_, _, b)| b.len()).collect();
    let active: Vec<usize> = (0..sizes.len()).filter(|&b| sizes[b] > 0).collect();
    let slot: BTreeMap<usize, usize> = active.iter().enumerate().map(|(k, &b)| (b, k)).collect();
    let monos: Vec<Exponent> = rows.keys().cloned().collect();
    let mut a = Vec::with_capacity(rows.len());
    let mut bvec = Vec::with_capacity(rows.len());
    for (g, entries) in &rows {
        let mut per: BTreeMap<usize, SparseSym> = BTreeMap::new();
        for en in entries {
            per.entry(slot[&en.block])
                .or_default()
                .push(en.i, en.j, to_f64(&en.coef));
        }
        a.push(per.into_iter().collect());
        bvec.push(to_f64(&target.coeff(g)));
    }
    let sdp = StandardSdp {
        blocks: active.iter().map(|&b| sizes[b]).collect(),
        c: active.iter().map(|_| SparseSym::new()).collect(),
        a,
        b: bvec,
    };
    let sol = solve_standard(&sdp, opts);
    let mut cert = Certificate::empty(kind, CertStatus::Unverified, names, target.clone(), "");
    cert.iterations = sol.iterations;
    match sol.status {
        StdStatus::Optimal => {}
        StdStatus::PrimalInfeasible => {
            let scale = sol.y.amax().max(f64::MIN_POSITIVE);
            cert.status = CertStatus::Infeasible;
            cert.separating = monos.iter().cloned().zip(sol.y.iter().map(|v| v / scale)).collect();
            return cert;
        }
        other => {
            cert.message = format!("solver stopped with {other:?}");
            return cert;
        }
    }

    let mut blocks = zero_blocks(&prog);
    for (k, &b) in active.iter().enumerate() {
        blocks[b].gram = sol.x[k].clone();
        blocks[b].exact = None;
    }
    let mut worst = 0.0f64;
    for (g, entries) in &rows {
        let t = to_f64(&target.coeff(g));
        let got: f64 = entries
            .iter()
            .map(|en| to_f64(&en.coef) * blocks[en.block].gram[(en.i, en.j)] * if en.i == en.j { 1.0 } else { 2.0 })
            .sum();
        worst = worst.max((got - t).abs() / (1.0 + t.abs()));
    }
    cert.residual = worst;
    cert.blocks = blocks;
    let min_eig = cert.min_gram_eigenvalue();
    if worst > RECONSTRUCTION_TOL || min_eig < GRAM_EIG_TOL {
        cert.message = format!("reconstruction residual {worst:.2e}, min Gram eigenvalue {min_eig:.2e}");
        return cert;
    }
    cert.status = CertStatus::Feasible;
    let rounded: Vec<RatMatrix> = cert.blocks.iter().map(|b| round_gram(&b.gram, 1 << 30)).collect();
    let mut rebuilt = Poly::zero(nv);
    for (b, w) in cert.blocks.iter().zip(&rounded) {
        rebuilt = rebuilt + gram_expand(&b.multiplier, &b.basis, w);
    }
    cert.exact_residual = Some((&target - &rebuilt).max_abs_coeff());
    if mono.is_some() {
        if let Some(exact) = round_and_project(&cert.blocks, &rows, &target) {
            for (b, w) in cert.blocks.iter_mut().zip(exact) {
                b.exact = Some(w);
            }
            let rebuilt = cert.reconstruct_exact().expect("all blocks exact");
            cert.exact_residual = Some((&target - &rebuilt).max_abs_coeff());
        }
    }
    cert
}

fn round_gram(g: &DMatrix<f64>, max_den: u64) -> RatMatrix {
    let n = g.nrows();
    let mut w = RatMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            w.set_sym(i, j, approximate(0.5 * (g[(i, j)] + g[(j, i)]), max_den));
        }
    }
    w
}

/// Rounds the floating Gram matrices to rationals and projects them
/// orthogonally onto the affine matching space, for growing denominators,
/// until the projected matrices are exactly PSD.
fn round_and_project(blocks: &[GramBlock], rows: &BTreeMap<Exponent, Vec<Entry>>, target: &Poly) -> Option<Vec<RatMatrix>> {
    for max_den in [1u64 << 8, 1 << 14, 1 << 20, 1 << 26, 1 << 32] {
        let mut ws: Vec<RatMatrix> = blocks.iter().map(|b| round_gram(&b.gram, max_den)).collect();
        let two = Rat::from_integer(2.into());
        for (g, entries) in rows {
            let mut r = target.coeff(g);
            let mut norm = Rat::zero();
            for en in entries {
                let x = ws[en.block].get(en.i, en.j);
                if en.i == en.j {
                    r -= &en.coef * x;
                    norm += &en.coef * &en.coef;
                } else {
                    r -= &en.coef * x * &two;
                    norm += &en.coef * &en.coef * &two;
                }
            }
            if r.is_zero() {
                continue;
            }
            let step = r / norm;
            for en in entries {
                let v = ws[en.block].get(en.i, en.j) + &en.coef * &step;
                ws[en.block].set_sym(en.i, en.j, v);
            }
        }
        // exact elimination is costly; skip candidates that are clearly indefinite
        let clear = ws.iter().all(|w| w.dim() == 0 || min_eigenvalue(&w.to_f64()) > -1e-12 * (1.0 + w.to_f64().amax()));
        if clear && ws.iter().all(|w| w.is_psd()) {
            return Some(ws);
        }
    }
    None
}

fn names_for(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Builds `Σ_ij η_i η_j H_ij` over `vars + m` variables and the basis
/// `η_i · mono` for each `mono`.
fn scalarize(entries: &[Vec<Poly>], nvars: usize, monos: &[Exponent]) -> (Poly, Vec<Exponent>) {
    let m = entries.len();
    let total = nvars + m;
    let mut target = Poly::zero(total);
    for i in 0..m {
        for j in 0..m {
            for (e, c) in entries[i][j].terms() {
                let mut v = e.entries().to_vec();
                v.resize(total, 0);
                v[nvars + i] += 1;
                v[nvars + j] += 1;
                target.add_term(Exponent::new(v), c.clone());
            }
        }
    }
    let mut basis = Vec::new();
    for i in 0..m {
        for mono in monos {
            let mut v = mono.entries().to_vec();
            v.resize(total, 0);
            v[nvars + i] = 1;
            basis.push(Exponent::new(v));
        }
    }
    (target, basis)
}

/// Searches `W ⪰ 0` with `H(x) = (I_m ⊗ [x]_k)ᵀ W (I_m ⊗ [x]_k)`.
pub fn matrix_sos_check(h: &MatPoly, opts: &Options) -> Result<Certificate, Error> {
    let n = h.nvars();
    let m = h.m();
    let mut names = names_for("x", n);
    names.extend(names_for("eta", m));
    let entries = h.entries();
    let deg = h.deg();
    let (target, _) = scalarize(&entries, n, &[]);
    if target.is_zero() {
        let prog = SosProgram {
            names,
            target,
            blocks: Vec::new(),
            groups: Vec::new(),
        };
        return Ok(solve_sos(prog, CertKind::MatrixSos, opts));
    }
    if deg % 2 == 1 {
        return Ok(Certificate::empty(
            CertKind::MatrixSos,
            CertStatus::Infeasible,
            names,
            target,
            format!("odd degree {deg}"),
        ));
    }
    let monos = basis_exponents(n, deg / 2);
    let (target, basis) = scalarize(&entries, n, &monos);
    let prog = SosProgram {
        names,
        target,
        blocks: vec![("W".into(), Poly::one(n + m), basis)],
        groups: vec![0..n, n..n + m],
    };
    Ok(solve_sos(prog, CertKind::MatrixSos, opts))
}

/// Searches `−∇_xx(ξᵀGξ) = F(ξ,x)ᵀF(ξ,x)` with `F` linear in `ξ` and of
/// degree at most `d − 1` in `x`, where `d = ⌈deg G / 2⌉`.
pub fn uniform_sos_concavity(g: &MatPoly, opts: &Options) -> Result<Certificate, Error> {
    let n = g.nvars();
    let m = g.m();
    let h = hessian_biform(g);
    let entries: Vec<Vec<Poly>> = (0..n).map(|k| (0..n).map(|l| h.entry(k, l).clone()).collect()).collect();
    let d = g.deg().div_ceil(2).max(1);
    let mut monos = Vec::new();
    for i in 0..m {
        for a in basis_exponents(n, d - 1) {
            let mut v = a.entries().to_vec();
            v.resize(n + m, 0);
            v[n + i] = 1;
            monos.push(Exponent::new(v));
        }
    }
    let (target, basis) = scalarize(&entries, n + m, &monos);
    let mut names = names_for("x", n);
    names.extend(names_for("xi", m));
    names.extend(names_for("eta", n));
    let prog = SosProgram {
        names,
        target,
        blocks: vec![("W".into(), Poly::one(n + m + n), basis)],
        groups: vec![0..n, n..n + m, n + m..n + m + n],
    };
    Ok(solve_sos(prog, CertKind::UniformMatrixSos, opts))
}

/// Matrix SOS check of `−∇_xx(ξᵀG(x)ξ)` at a fixed `ξ`.
pub fn pointwise_sos_concavity(g: &MatPoly, xi: &[Rat], opts: &Options) -> Result<Certificate, Error> {
    if xi.len() != g.m() {
        return Err(Error::Dimension(format!("ξ has {} entries, G is {}×{}", xi.len(), g.m(), g.m())));
    }
    if xi.iter().all(|v| v.is_zero()) {
        return Err(Error::InvalidArgument("ξ must be nonzero".into()));
    }
    let h = hessian_biform(g).contract(xi);
    matrix_sos_check(&h, opts)
}

fn remap(p: &Poly, n: usize, m: usize, offset: usize) -> Poly {
    let total = 2 * n + m;
    p.map_exponents(total, |e| {
        let mut v = vec![0; total];
        for (k, &a) in e.entries().iter().enumerate() {
            if k < n {
                v[offset + k] = a;
            } else {
                v[2 * n + (k - n)] = a;
            }
        }
        Exponent::new(v)
    })
}

/// `p(x)q(u)(ξᵀG(u)ξ + ∇_x(ξᵀG(x)ξ)|_{x=u}ᵀ(x−u) − ξᵀG(x)ξ)` as a
/// polynomial in `(x, u, ξ)`; errors when `q(u)` does not clear `p(u)²`.
pub fn qmod_lhs(gr: &RationalMatFn) -> Result<Poly, Error> {
    let n = gr.nvars();
    let m = gr.m();
    let f = gr.numerator_over_p()?.quadratic_form();
    let p = gr.p.embed(n + m, 0);
    let at_x = |q: &Poly| remap(q, n, m, 0);
    let at_u = |q: &Poly| remap(q, n, m, n);
    let (fx, fu, px, pu) = (at_x(&f), at_u(&f), at_x(&p), at_u(&p));
    let total = 2 * n + m;
    let mut t = &(&fu * &pu) * &px - &(&fx * &(&pu * &pu));
    for k in 0..n {
        let dk = &(&at_u(&f.derivative(k)) * &pu) - &(&fu * &at_u(&p.derivative(k)));
        let step = Poly::var(total, k) - Poly::var(total, n + k);
        t = t + &(&dk * &step) * &px;
    }
    let q = at_u(&gr.q_or_default().embed(n + m, 0));
    exact_divide(&(&q * &t), &(&pu * &pu))?
        .ok_or_else(|| Error::InvalidArgument("q(u) must be divisible by p(u)²".into()))
}

/// Searches `LHS = Σ_i g_i(x) Σ_j g_j(u) σ_ij(x,u,ξ)` with `g_0 = 1`, each
/// `σ_ij` SOS of degree at most `2t` in `x` and in `u` and exactly 2 in `ξ`.
pub fn qmod_certificate_search(gr: &RationalMatFn, gs: &[Poly], t: u32, opts: &Options) -> Result<Certificate, Error> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    let n = gr.nvars();
    let m = gr.m();
    let total = 2 * n + m;
    if let Some(k) = gs.iter().position(|g| g.nvars() != n) {
        return Err(Error::Dimension(format!("constraint g{} has wrong nvars", k + 1)));
    }
    let lhs = qmod_lhs(gr)?;
    let mut names = names_for("x", n);
    names.extend(names_for("u", n));
    names.extend(names_for("xi", m));
    let dx = lhs.partial_degree(0..n).unwrap_or(0);
    let du = lhs.partial_degree(n..2 * n).unwrap_or(0);

    let mut mults: Vec<Poly> = vec![Poly::one(n)];
    mults.extend(gs.iter().cloned());
    let mut blocks = Vec::new();
    let mut xdeg_g = Vec::new();
    let (mut reach_x, mut reach_u) = (0u32, 0u32);
    for (i, gi) in mults.iter().enumerate() {
        for (j, gj) in mults.iter().enumerate() {
            let (di, dj) = (gi.deg(), gj.deg());
            if di > dx || dj > du {
                continue;
            }
            let ax = (2 * t).min(dx - di) / 2;
            let au = (2 * t).min(du - dj) / 2;
            reach_x = reach_x.max(di + 2 * ax);
            reach_u = reach_u.max(dj + 2 * au);
            let mult = &remap(&gi.embed(n + m, 0), n, m, 0) * &remap(&gj.embed(n + m, 0), n, m, n);
            let mut basis = Vec::new();
            for k in 0..m {
                for a in basis_exponents(n, ax) {
                    for b in basis_exponents(n, au) {
                        let mut v = vec![0; total];
                        v[..n].copy_from_slice(a.entries());
                        v[n..2 * n].copy_from_slice(b.entries());
                        v[2 * n + k] = 1;
                        basis.push(Exponent::new(v));
                    }
                }
            }
            blocks.push((format!("({i},{j})"), mult, basis));
            xdeg_g.push(di);
        }
    }
    if !lhs.is_zero() && (dx > reach_x || du > reach_u) {
        return Ok(Certificate::empty(
            CertKind::QModule,
            CertStatus::InfeasibleByDegree,
            names,
            lhs,
            format!("degree ({dx},{du}) in (x,u) exceeds reachable ({reach_x},{reach_u}) at t = {t}"),
        ));
    }
    let prog = SosProgram {
        names,
        target: lhs,
        blocks,
        groups: vec![0..n, n..2 * n, 2 * n..total],
    };
    let mut cert = solve_sos(prog, CertKind::QModule, opts);
    if cert.is_feasible() {
        let scale = cert
            .blocks
            .iter()
            .flat_map(|b| b.gram.diagonal().iter().copied().collect::<Vec<_>>())
            .fold(1.0f64, f64::max);
        let mut d = gr.half_degree().max(1);
        for (b, dg) in cert.blocks.iter().zip(&xdeg_g) {
            let top = (0..b.basis.len())
                .filter(|&k| b.gram[(k, k)] > 1e-7 * scale)
                .map(|k| b.basis[k].partial_degree(0..n))
                .max();
            if let Some(a) = top {
                d = d.max((dg + 2 * a).div_ceil(2));
            }
        }
        cert.d = Some(d);
    }
    Ok(cert)
}

/// An SOS multiplier given either as weighted squares or as a Gram matrix.
#[derive(Clone, Debug)]
pub enum Sigma {
    Squares(Vec<(Rat, Poly)>),
    Gram { basis: Vec<Poly>, gram: RatMatrix },
}

impl Sigma {
    pub fn expand(&self, nvars: usize) -> Poly {
        let mut out = Poly::zero(nvars);
        match self {
            Sigma::Squares(sq) => {
                for (w, f) in sq {
                    out = out + (f * f).scale(w);
                }
            }
            Sigma::Gram { basis, gram } => {
                for i in 0..basis.len() {
                    for j in 0..basis.len() {
                        let c = gram.get(i, j);
                        if !c.is_zero() {
                            out = out + (&basis[i] * &basis[j]).scale(c);
                        }
                    }
                }
            }
        }
        out
    }
}

/// `g_i(x) · g_j(u) · σ_ij`, all over the same variables.
#[derive(Clone, Debug)]
pub struct IdentityTerm {
    pub gx: Poly,
    pub gu: Poly,
    pub sigma: Sigma,
}

/// `lhs − Σ g_i g_j σ_ij` in exact arithmetic; zero iff the identity holds.
pub fn verify_identity(lhs: &Poly, terms: &[IdentityTerm]) -> Poly {
    let nv = lhs.nvars();
    let mut rest = lhs.clone();
    for t in terms {
        rest = rest - &(&t.gx * &t.gu) * &t.sigma.expand(nv);
    }
    rest
}

/// Entrywise `lhs − Σ parts`.
pub fn verify_matrix_identity(lhs: &[Vec<Poly>], parts: &[Vec<Vec<Poly>>]) -> Vec<Vec<Poly>> {
    let mut out = lhs.to_vec();
    for part in parts {
        for (row, prow) in out.iter_mut().zip(part) {
            for (e, p) in row.iter_mut().zip(prow) {
                *e = &*e - p;
            }
        }
    }
    out
}

fn unit_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if r > 1e-3 && r <= 1.0 {
            return v.iter().map(|a| a / r).collect();
        }
    }
}

/// At `count` random `(x, ξ)` in `[−box, box]ⁿ × S^{m−1}`: the smallest
/// eigenvalue of `−∇_xx(ξᵀGξ)` and the largest entrywise gap between it and
/// the matrix rebuilt from a uniform certificate.
pub fn sample_uniform_certificate(g: &MatPoly, cert: &Certificate, count: usize, half_width: f64, seed: u64) -> (f64, f64) {
    let n = g.nvars();
    let m = g.m();
    let h = hessian_biform(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_eig = f64::INFINITY;
    let mut gap = 0.0f64;
    for _ in 0..count {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-half_width..half_width)).collect();
        let xi = unit_vector(&mut rng, m);
        let actual = h.eval_f64(&x, &xi);
        min_eig = min_eig.min(min_eigenvalue(&actual));
        let mut point = x.clone();
        point.extend_from_slice(&xi);
        point.extend(std::iter::repeat_n(1.0, n));
        let mut rebuilt = DMatrix::zeros(n, n);
        for b in &cert.blocks {
            let w = b.multiplier.eval_f64(&point);
            let vals: Vec<(usize, f64)> = b
                .basis
                .iter()
                .map(|e| {
                    let r = (n + m..n + m + n).find(|&k| e.entries()[k] > 0).map_or(0, |k| k - n - m);
                    (r, e.eval_f64(&point))
                })
                .collect();
            for (i, (ri, vi)) in vals.iter().enumerate() {
                for (j, (rj, vj)) in vals.iter().enumerate() {
                    rebuilt[(*ri, *rj)] += w * b.gram[(i, j)] * vi * vj;
                }
            }
        }
        gap = gap.max((rebuilt - actual).amax());
    }
    (min_eig, gap)
}

/// Smallest value of `ξᵀG(u)ξ + ∇(ξᵀGξ)|_uᵀ(x−u) − ξᵀG(x)ξ` over `count`
/// random points of the box with `g_i(x), g_i(u) ≥ 0` and denominators
/// bounded away from zero.
pub fn sample_linearization_gap(gr: &RationalMatFn, gs: &[Poly], count: usize, lo: f64, hi: f64, seed: u64) -> f64 {
    let n = gr.nvars();
    let m = gr.m();
    let f = gr.numerator.quadratic_form();
    let den = gr.denominator.embed(n + m, 0);
    let df: Vec<Poly> = (0..n).map(|k| f.derivative(k)).collect();
    let dden: Vec<Poly> = (0..n).map(|k| den.derivative(k)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut accepted = 0;
    let mut tries = 0;
    while accepted < count && tries < 1000 * count {
        tries += 1;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
        if gs.iter().any(|g| g.eval_f64(&x) < 0.0 || g.eval_f64(&u) < 0.0) {
            continue;
        }
        let xi = unit_vector(&mut rng, m);
        let mut px = x.clone();
        px.extend_from_slice(&xi);
        let mut pu = u.clone();
        pu.extend_from_slice(&xi);
        let (dx, du) = (den.eval_f64(&px), den.eval_f64(&pu));
        if dx.abs() < 1e-3 || du.abs() < 1e-3 {
            continue;
        }
        accepted += 1;
        let fu = f.eval_f64(&pu);
        let mut v = fu / du - f.eval_f64(&px) / dx;
        for k in 0..n {
            let grad = (df[k].eval_f64(&pu) * du - fu * dden[k].eval_f64(&pu)) / (du * du);
            v += grad * (x[k] - u[k]);
        }
        worst = worst.min(v);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rational::rat;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn rank_one_matrix_sos() {
        let (a, b) = (x(2, 0), x(2, 1));
        let h = MatPoly::from_entries(&[vec![&a * &a, &a * &b], vec![&a * &b, &b * &b]]).unwrap();
        let c = matrix_sos_check(&h, &Options::default()).unwrap();
        assert!(c.is_feasible(), "{}", c.status_line());
        assert!(c.is_exact());
        assert_eq!(c.reconstruct_exact().unwrap(), c.target);
    }

    #[test]
    fn indefinite_constant_is_infeasible() {
        let k = |v| Poly::constant(2, rat(v));
        let h = MatPoly::from_entries(&[vec![Poly::zero(2), k(-1)], vec![k(-1), Poly::zero(2)]]).unwrap();
        let c = matrix_sos_check(&h, &Options::default()).unwrap();
        assert_eq!(c.status, CertStatus::Infeasible);
        assert!(c.message.contains("unreachable"));

        let h = MatPoly::from_entries(&[vec![k(1), k(2)], vec![k(2), k(1)]]).unwrap();
        let c = matrix_sos_check(&h, &Options::default()).unwrap();
        assert_eq!(c.status, CertStatus::Infeasible);
        // the functional is nonnegative on Gram-representable targets, negative on this one
        let val: f64 = c.separating.iter().map(|(e, y)| y * to_f64(&c.target.coeff(e))).sum();
        assert!(val.abs() > 1e-6, "{:?}", c.separating);
    }

    #[test]
    fn odd_degree_is_infeasible() {
        let h = MatPoly::from_entries(&[vec![x(1, 0)]]).unwrap();
        let c = matrix_sos_check(&h, &Options::default()).unwrap();
        assert_eq!(c.status, CertStatus::Infeasible);
    }

    #[test]
    fn affine_g_has_zero_certificate() {
        let g = MatPoly::from_entries(&[vec![Poly::one(2) + x(2, 0), x(2, 1)], vec![x(2, 1), Poly::one(2)]]).unwrap();
        let c = pointwise_sos_concavity(&g, &[rat(1), rat(2)], &Options::default()).unwrap();
        assert!(c.is_feasible() && c.is_exact());
        let gr = RationalMatFn::polynomial(g);
        let c = qmod_certificate_search(&gr, &[], 1, &Options::default()).unwrap();
        assert!(c.is_feasible() && c.target.is_zero());
    }

    #[test]
    fn scalar_concave_quadratic_qmod() {
        // 1 − x² has gap (x − u)², certified by one square
        let g = MatPoly::from_entries(&[vec![Poly::one(1) - &x(1, 0) * &x(1, 0)]]).unwrap();
        let lhs = qmod_lhs(&RationalMatFn::polynomial(g.clone())).unwrap();
        let xu = x(3, 0) - x(3, 1);
        let xi = x(3, 2);
        assert_eq!(lhs, &(&xu * &xu) * &(&xi * &xi));
        let c = qmod_certificate_search(&RationalMatFn::polynomial(g), &[], 1, &Options::default()).unwrap();
        assert!(c.is_feasible() && c.is_exact(), "{}", c.status_line());
        assert_eq!(c.d, Some(1));
    }
}
