//! Dense block SDP solver and its use on lifted LMIs: membership by
//! maximizing the smallest pencil eigenvalue, and linear optimization.

mod ipm;
pub mod planted;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_traits::Zero;

pub use ipm::{solve_standard, Options, SparseSym, StandardSdp, StdSolution, StdStatus};

use crate::error::Error;
use crate::momlift::{min_eigenvalue, LiftedLMI, LinearPencil, VarKey};
use crate::polyalg::rational::to_f64;
use crate::polyalg::{Exponent, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
    Numerical,
}

/// One PSD constraint `F_0 + Σ_i v_i F_i ⪰ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LmiBlock {
    pub size: usize,
    pub constant: SparseSym,
    pub coeffs: Vec<(usize, SparseSym)>,
}

impl LmiBlock {
    pub fn new(size: usize) -> Self {
        LmiBlock {
            size,
            constant: SparseSym::new(),
            coeffs: Vec::new(),
        }
    }

    pub fn eval(&self, v: &[f64]) -> DMatrix<f64> {
        let mut m = self.constant.to_dense(self.size);
        for (i, f) in &self.coeffs {
            f.add_to(&mut m, v[*i]);
        }
        m
    }
}

/// `minimize objective·v  subject to  F_b(v) ⪰ 0` for every block, plus
/// optional box bounds.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConicProgram {
    pub nvars: usize,
    pub objective: Vec<f64>,
    pub blocks: Vec<LmiBlock>,
    pub bounds: Vec<(Option<f64>, Option<f64>)>,
}

impl ConicProgram {
    pub fn new(nvars: usize) -> Self {
        ConicProgram {
            nvars,
            objective: vec![0.0; nvars],
            blocks: Vec::new(),
            bounds: vec![(None, None); nvars],
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.objective.len() != self.nvars || self.bounds.len() != self.nvars {
            return Err(Error::Dimension("objective/bounds length differs from nvars".into()));
        }
        for (b, blk) in self.blocks.iter().enumerate() {
            let ok = |s: &SparseSym| s.entries.iter().all(|&(i, j, _)| i < blk.size && j < blk.size);
            if !ok(&blk.constant) || !blk.coeffs.iter().all(|(v, s)| *v < self.nvars && ok(s)) {
                return Err(Error::Dimension(format!("block {b} has an out-of-range entry")));
            }
        }
        Ok(())
    }

    /// All blocks, bounds included as `1×1` blocks.
    fn all_blocks(&self) -> Vec<LmiBlock> {
        let mut out = self.blocks.clone();
        for (i, (lo, hi)) in self.bounds.iter().enumerate() {
            if let Some(lo) = lo {
                let mut b = LmiBlock::new(1);
                b.constant.push(0, 0, -lo);
                let mut f = SparseSym::new();
                f.push(0, 0, 1.0);
                b.coeffs.push((i, f));
                out.push(b);
            }
            if let Some(hi) = hi {
                let mut b = LmiBlock::new(1);
                b.constant.push(0, 0, *hi);
                let mut f = SparseSym::new();
                f.push(0, 0, -1.0);
                b.coeffs.push((i, f));
                out.push(b);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub status: Status,
    pub primal: Vec<f64>,
    /// Multiplier `Λ_b ⪰ 0` for each block of `ConicProgram::blocks`.
    pub dual: Vec<DMatrix<f64>>,
    /// Multipliers of the `(lower, upper)` bounds.
    pub bound_dual: Vec<(f64, f64)>,
    pub objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
}

/// Solves an LMI-form program through the standard-form dual.
pub fn solve(prog: &ConicProgram, opts: &Options) -> Result<Solution, Error> {
    prog.validate()?;
    let blocks = prog.all_blocks();
    let mut used = vec![false; prog.nvars];
    for b in &blocks {
        for (i, _) in &b.coeffs {
            used[*i] = true;
        }
    }
    let empty = |status| Solution {
        status,
        primal: vec![0.0; prog.nvars],
        dual: prog.blocks.iter().map(|b| DMatrix::zeros(b.size, b.size)).collect(),
        bound_dual: vec![(0.0, 0.0); prog.nvars],
        objective: 0.0,
        residuals: Residuals {
            primal: 0.0,
            dual: 0.0,
            gap: 0.0,
        },
        iterations: 0,
    };
    if (0..prog.nvars).any(|i| !used[i] && prog.objective[i] != 0.0) {
        return Ok(empty(Status::Unbounded));
    }
    let cols: Vec<usize> = (0..prog.nvars).filter(|&i| used[i]).collect();
    let mut col_of = vec![usize::MAX; prog.nvars];
    for (k, &i) in cols.iter().enumerate() {
        col_of[i] = k;
    }
    let mut std = StandardSdp {
        blocks: blocks.iter().map(|b| b.size).collect(),
        c: blocks.iter().map(|b| b.constant.clone()).collect(),
        a: vec![Vec::new(); cols.len()],
        b: cols.iter().map(|&i| -prog.objective[i]).collect(),
    };
    for (bi, blk) in blocks.iter().enumerate() {
        for (i, f) in &blk.coeffs {
            let neg = SparseSym {
                entries: f.entries.iter().map(|&(r, c, v)| (r, c, -v)).collect(),
            };
            std.a[col_of[*i]].push((bi, neg));
        }
    }
    let sol = solve_standard(&std, opts);
    let mut primal = vec![0.0; prog.nvars];
    for (k, &i) in cols.iter().enumerate() {
        primal[i] = sol.y[k];
    }
    let status = match sol.status {
        StdStatus::Optimal => Status::Optimal,
        StdStatus::PrimalInfeasible => Status::Unbounded,
        StdStatus::DualInfeasible => Status::Infeasible,
        StdStatus::MaxIter => Status::MaxIter,
        StdStatus::Numerical => Status::Numerical,
    };
    let objective = prog.objective.iter().zip(&primal).map(|(c, v)| c * v).sum();
    let mut rest = sol.x.into_iter();
    let dual: Vec<DMatrix<f64>> = rest.by_ref().take(prog.blocks.len()).collect();
    let mut bound_dual = vec![(0.0, 0.0); prog.nvars];
    for (i, (lo, hi)) in prog.bounds.iter().enumerate() {
        if lo.is_some() {
            bound_dual[i].0 = rest.next().map(|m| m[(0, 0)]).unwrap_or(0.0);
        }
        if hi.is_some() {
            bound_dual[i].1 = rest.next().map(|m| m[(0, 0)]).unwrap_or(0.0);
        }
    }
    Ok(Solution {
        status,
        primal,
        dual,
        bound_dual,
        objective,
        residuals: Residuals {
            primal: sol.dual_res,
            dual: sol.primal_res,
            gap: sol.rel_gap,
        },
        iterations: sol.iterations,
    })
}

/// KKT residuals recomputed from a returned solution:
/// `(primal infeasibility, stationarity, relative complementarity gap,
/// smallest dual eigenvalue)`.
pub fn kkt_check(prog: &ConicProgram, sol: &Solution) -> (f64, f64, f64, f64) {
    let v = &sol.primal;
    let mut pinf: f64 = 0.0;
    let mut dmin = f64::INFINITY;
    let mut grad = prog.objective.clone();
    let mut compl = 0.0;
    let mut dual_obj = 0.0;
    let mut data: f64 = 1.0;
    for (blk, lam) in prog.blocks.iter().zip(&sol.dual) {
        let f = blk.eval(v);
        pinf = pinf.max(-min_eigenvalue(&f));
        dmin = dmin.min(min_eigenvalue(lam));
        for (i, fi) in &blk.coeffs {
            grad[*i] -= fi.dot(lam);
            data = data.max(fi.entries.iter().map(|e| e.2.abs()).fold(0.0, f64::max));
        }
        compl += f.dot(lam);
        dual_obj -= blk.constant.dot(lam);
    }
    for (i, (lo, hi)) in prog.bounds.iter().enumerate() {
        let (ml, mh) = sol.bound_dual[i];
        if let Some(lo) = lo {
            pinf = pinf.max(lo - v[i]);
            grad[i] -= ml;
            compl += (v[i] - lo) * ml;
            dual_obj += lo * ml;
            dmin = dmin.min(ml);
        }
        if let Some(hi) = hi {
            pinf = pinf.max(v[i] - hi);
            grad[i] += mh;
            compl += (hi - v[i]) * mh;
            dual_obj -= hi * mh;
            dmin = dmin.min(mh);
        }
    }
    let primal_obj: f64 = prog.objective.iter().zip(v).map(|(c, x)| c * x).sum();
    let stat = grad.iter().map(|g| g.abs()).fold(0.0, f64::max) / data;
    let gap = compl.abs() / (1.0 + primal_obj.abs() + dual_obj.abs());
    (pinf, stat, gap, dmin)
}

/// Membership verdict for a lifted set.
#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    In(f64),
    Out(f64),
    Indeterminate(f64, String),
}

impl Feasibility {
    pub fn margin(&self) -> f64 {
        match self {
            Feasibility::In(t) | Feasibility::Out(t) | Feasibility::Indeterminate(t, _) => *t,
        }
    }
}

pub const EPS_FEAS: f64 = 1e-7;
pub const EPS_STRICT: f64 = 1e-5;

/// Columns for the variables of a set of pinned pencils.
fn columns(pencils: &[LinearPencil]) -> BTreeMap<VarKey, usize> {
    let mut cols = BTreeMap::new();
    for p in pencils {
        for k in p.variables() {
            let next = cols.len();
            cols.entry(k.clone()).or_insert(next);
        }
    }
    cols
}

fn rat_sparse(m: &crate::polyalg::RatMatrix) -> SparseSym {
    let mut s = SparseSym::new();
    for j in 0..m.dim() {
        for i in 0..=j {
            let v = m.get(i, j);
            if !v.is_zero() {
                s.push(i, j, to_f64(v));
            }
        }
    }
    s
}

fn pencil_block(p: &LinearPencil, cols: &BTreeMap<VarKey, usize>) -> LmiBlock {
    LmiBlock {
        size: p.size,
        constant: rat_sparse(&p.constant),
        coeffs: p
            .coeffs
            .iter()
            .map(|(k, m)| (cols[k], rat_sparse(m)))
            .collect(),
    }
}

/// Decides `x ∈ proj L` by maximizing `t` with every pencil `− tI ⪰ 0`
/// and `t ≤ 1`.
pub fn feasibility(lmi: &LiftedLMI, x: &[Rat], opts: &Options) -> Result<Feasibility, Error> {
    let pencils = lmi.pin(x)?;
    if pencils.is_empty() {
        return Ok(Feasibility::In(1.0));
    }
    let cols = columns(&pencils);
    let t = cols.len();
    let mut prog = ConicProgram::new(t + 1);
    prog.objective[t] = -1.0;
    prog.bounds[t].1 = Some(1.0);
    for p in &pencils {
        let mut blk = pencil_block(p, &cols);
        let mut ti = SparseSym::new();
        for i in 0..p.size {
            ti.push(i, i, -1.0);
        }
        blk.coeffs.push((t, ti));
        prog.blocks.push(blk);
    }
    let sol = solve(&prog, opts)?;
    let tstar = sol.primal[t];
    Ok(match sol.status {
        Status::Optimal => classify(tstar),
        // the t ≤ 1 cap makes the program bounded and t → −∞ always feasible
        other => {
            let margin = pinned_margin(&pencils, &cols, &sol.primal);
            if margin >= EPS_FEAS {
                Feasibility::In(margin)
            } else {
                Feasibility::Indeterminate(tstar, format!("solver stopped with {other:?}"))
            }
        }
    })
}

fn pinned_margin(pencils: &[LinearPencil], cols: &BTreeMap<VarKey, usize>, v: &[f64]) -> f64 {
    let values: BTreeMap<VarKey, f64> = cols.iter().map(|(k, &i)| (k.clone(), v[i])).collect();
    pencils
        .iter()
        .map(|p| min_eigenvalue(&p.eval_f64(&values)))
        .fold(1.0, f64::min)
}

fn classify(t: f64) -> Feasibility {
    if t >= -EPS_FEAS {
        Feasibility::In(t)
    } else if t < -EPS_STRICT {
        Feasibility::Out(t)
    } else {
        Feasibility::Indeterminate(t, "margin inside the dead zone".into())
    }
}

/// Result of `optimize_linear`.
#[derive(Clone, Debug)]
pub struct LinearOpt {
    pub status: Status,
    pub value: f64,
    pub x: Vec<f64>,
    pub dual: Vec<DMatrix<f64>>,
    pub solution: Solution,
}

/// Minimizes `c·x` over the lifted set (`y_0 = 1` pinned, `x = y_{e_i}` free).
pub fn optimize_linear(lmi: &LiftedLMI, c: &[f64], opts: &Options) -> Result<LinearOpt, Error> {
    if c.len() != lmi.nvars {
        return Err(Error::Dimension("direction length differs from n".into()));
    }
    if c.iter().all(|v| *v == 0.0) {
        return Err(Error::InvalidArgument("direction must be nonzero".into()));
    }
    let pencils = lmi.pin_constant();
    let n = lmi.nvars;
    let mut cols: BTreeMap<VarKey, usize> = (0..n)
        .map(|i| (VarKey::Y(Exponent::unit(n, i)), i))
        .collect();
    for p in &pencils {
        for k in p.variables() {
            let next = cols.len();
            cols.entry(k.clone()).or_insert(next);
        }
    }
    let mut prog = ConicProgram::new(cols.len());
    prog.objective[..n].copy_from_slice(c);
    for p in &pencils {
        prog.blocks.push(pencil_block(p, &cols));
    }
    let sol = solve(&prog, opts)?;
    Ok(LinearOpt {
        status: sol.status,
        value: sol.objective,
        x: sol.primal[..n].to_vec(),
        dual: sol.dual.clone(),
        solution: sol,
    })
}

/// Exact check that a rational lifting makes every pencil PSD.
pub fn lifting_is_feasible(lmi: &LiftedLMI, values: &BTreeMap<VarKey, Rat>) -> bool {
    lmi.pencils.iter().all(|p| p.eval_rat(values).is_psd())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(v: f64) -> SparseSym {
        let mut s = SparseSym::new();
        s.push(0, 0, v);
        s
    }

    #[test]
    fn two_by_two_eigen_bound() {
        // min t s.t. [[t,1],[1,t]] ⪰ 0
        let mut prog = ConicProgram::new(1);
        prog.objective[0] = 1.0;
        let mut c = SparseSym::new();
        c.push(0, 1, 1.0);
        let mut f = SparseSym::new();
        f.push(0, 0, 1.0);
        f.push(1, 1, 1.0);
        prog.blocks.push(LmiBlock {
            size: 2,
            constant: c,
            coeffs: vec![(0, f)],
        });
        let sol = solve(&prog, &Options::default()).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-7, "{}", sol.objective);
        let (pinf, stat, gap, dmin) = kkt_check(&prog, &sol);
        assert!(pinf < 1e-7 && stat < 1e-7 && gap < 1e-6 && dmin > -1e-8);
    }

    #[test]
    fn scalar_lower_bound() {
        let mut prog = ConicProgram::new(1);
        prog.objective[0] = 1.0;
        prog.blocks.push(LmiBlock {
            size: 1,
            constant: one(-1.0),
            coeffs: vec![(0, one(1.0))],
        });
        let sol = solve(&prog, &Options::default()).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-7);
        prog.objective[0] = -1.0;
        assert_eq!(solve(&prog, &Options::default()).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn empty_feasible_set() {
        // v ≥ 1 and v ≤ 0
        let mut prog = ConicProgram::new(1);
        prog.objective[0] = 1.0;
        prog.blocks.push(LmiBlock {
            size: 1,
            constant: one(-1.0),
            coeffs: vec![(0, one(1.0))],
        });
        prog.blocks.push(LmiBlock {
            size: 1,
            constant: one(0.0),
            coeffs: vec![(0, one(-1.0))],
        });
        assert_eq!(solve(&prog, &Options::default()).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn unused_variable_with_cost_is_unbounded() {
        let mut prog = ConicProgram::new(2);
        prog.objective[1] = 1.0;
        prog.blocks.push(LmiBlock {
            size: 1,
            constant: one(1.0),
            coeffs: vec![(0, one(1.0))],
        });
        assert_eq!(solve(&prog, &Options::default()).unwrap().status, Status::Unbounded);
    }
}
