//! Primal-dual interior-point method for block SDPs in standard form
//!
//! ```text
//!   min <C,X>  s.t. <A_k,X> = b_k, X ⪰ 0
//!   max b·y    s.t. C − Σ y_k A_k = S ⪰ 0
//! ```
//!
//! solved through the homogeneous self-dual embedding with Nesterov–Todd
//! scaling and a Mehrotra predictor-corrector.

use nalgebra::{DMatrix, DVector};

/// Sparse symmetric matrix stored as its upper triangle (`i ≤ j`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseSym {
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn new() -> Self {
        SparseSym::default()
    }

    /// Adds `v` at `(i,j)` (and implicitly `(j,i)`).
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.entries.push((i, j, v));
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut s = SparseSym::new();
        for j in 0..m.ncols() {
            for i in 0..=j {
                if m[(i, j)] != 0.0 {
                    s.entries.push((i, j, m[(i, j)]));
                }
            }
        }
        s
    }

    pub fn to_dense(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        self.add_to(&mut m, 1.0);
        m
    }

    pub fn add_to(&self, m: &mut DMatrix<f64>, scale: f64) {
        for &(i, j, v) in &self.entries {
            m[(i, j)] += scale * v;
            if i != j {
                m[(j, i)] += scale * v;
            }
        }
    }

    /// `<self, X>` for symmetric `X`.
    pub fn dot(&self, x: &DMatrix<f64>) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| if i == j { v * x[(i, j)] } else { 2.0 * v * x[(i, j)] })
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v })
            .sum()
    }
}

/// Standard-form block SDP.
#[derive(Clone, Debug, Default)]
pub struct StandardSdp {
    pub blocks: Vec<usize>,
    pub c: Vec<SparseSym>,
    /// Constraint `k` as a list of `(block, matrix)` parts.
    pub a: Vec<Vec<(usize, SparseSym)>>,
    pub b: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Options {
    pub max_iter: usize,
    pub tol_gap: f64,
    pub tol_feas: f64,
    pub tol_infeas: f64,
    pub verbose: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_iter: 200,
            tol_gap: 1e-8,
            tol_feas: 1e-8,
            tol_infeas: 1e-8,
            verbose: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StdStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIter,
    Numerical,
}

#[derive(Clone, Debug)]
pub struct StdSolution {
    pub status: StdStatus,
    pub x: Vec<DMatrix<f64>>,
    pub y: DVector<f64>,
    pub s: Vec<DMatrix<f64>>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub primal_res: f64,
    pub dual_res: f64,
    pub rel_gap: f64,
    pub iterations: usize,
}

/// NT scaling data for one block.
struct Scaling {
    r: DMatrix<f64>,
    rinv: DMatrix<f64>,
    w: DMatrix<f64>,
    lam: DVector<f64>,
}

fn scaling(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Option<Scaling> {
    let n = x.nrows();
    let l = x.clone().cholesky()?.l();
    let t = l.transpose() * s * &l;
    let t = (&t + t.transpose()) * 0.5;
    let eig = t.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return None;
    }
    let q = eig.eigenvectors;
    let quarter: DVector<f64> = eig.eigenvalues.map(|v| v.powf(-0.25));
    let mut r = &l * &q;
    for j in 0..n {
        let f = quarter[j];
        r.column_mut(j).scale_mut(f);
    }
    let linv = l.solve_lower_triangular(&DMatrix::identity(n, n))?;
    let mut rinv = q.transpose() * linv;
    for i in 0..n {
        let f = 1.0 / quarter[i];
        rinv.row_mut(i).scale_mut(f);
    }
    let w = &r * r.transpose();
    let lam = eig.eigenvalues.map(|v| v.sqrt());
    Some(Scaling { r, rinv, w, lam })
}

fn dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Largest `α ≤ cap` with `D + α dD ⪰ 0` for diagonal `D = diag(lam)`.
fn block_step(lam: &DVector<f64>, d: &DMatrix<f64>) -> f64 {
    let n = lam.len();
    let mut m = d.clone();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] /= (lam[i] * lam[j]).sqrt();
        }
    }
    let m = sym(m);
    let emin = m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if emin < 0.0 {
        -1.0 / emin
    } else {
        f64::INFINITY
    }
}

struct Problem<'a> {
    p: &'a StandardSdp,
    /// per block, the constraints touching it
    by_block: Vec<Vec<(usize, &'a SparseSym)>>,
    m: usize,
}

impl<'a> Problem<'a> {
    fn new(p: &'a StandardSdp) -> Self {
        let mut by_block = vec![Vec::new(); p.blocks.len()];
        for (k, parts) in p.a.iter().enumerate() {
            for (b, mat) in parts {
                by_block[*b].push((k, mat));
            }
        }
        Problem {
            p,
            by_block,
            m: p.b.len(),
        }
    }

    fn a_op(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for (b, list) in self.by_block.iter().enumerate() {
            for (k, mat) in list {
                out[*k] += mat.dot(&x[b]);
            }
        }
        out
    }

    fn at_op(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> =
            self.p.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (b, list) in self.by_block.iter().enumerate() {
            for (k, mat) in list {
                if y[*k] != 0.0 {
                    mat.add_to(&mut out[b], y[*k]);
                }
            }
        }
        out
    }

    fn c_dense(&self) -> Vec<DMatrix<f64>> {
        self.p
            .blocks
            .iter()
            .zip(&self.p.c)
            .map(|(&n, c)| c.to_dense(n))
            .collect()
    }

    fn schur(&self, sc: &[Scaling]) -> DMatrix<f64> {
        let m = self.m;
        let mut big = DMatrix::zeros(m, m);
        for (b, list) in self.by_block.iter().enumerate() {
            let w = &sc[b].w;
            let n = w.nrows();
            for (l, al) in list {
                // W A_l W
                let mut waw = DMatrix::zeros(n, n);
                if al.entries.len() * 2 >= n * n / 4 {
                    let dense = al.to_dense(n);
                    waw = w * dense * w;
                } else {
                    for &(p, q, v) in &al.entries {
                        let wp = w.column(p);
                        let wq = w.column(q);
                        waw.ger(v, &wp, &wq, 1.0);
                        if p != q {
                            waw.ger(v, &wq, &wp, 1.0);
                        }
                    }
                }
                for (k, ak) in list {
                    if k < l {
                        continue;
                    }
                    let v = ak.dot(&waw);
                    big[(*k, *l)] += v;
                }
            }
        }
        for k in 0..m {
            for l in 0..k {
                big[(l, k)] = big[(k, l)];
            }
        }
        big
    }
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    dy: DVector<f64>,
    ds: Vec<DMatrix<f64>>,
    dtau: f64,
    dkappa: f64,
}

struct State {
    x: Vec<DMatrix<f64>>,
    y: DVector<f64>,
    s: Vec<DMatrix<f64>>,
    tau: f64,
    kappa: f64,
}

struct Factor {
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl Factor {
    fn new(m: DMatrix<f64>) -> Option<Factor> {
        if m.nrows() == 0 {
            return Some(Factor {
                chol: DMatrix::<f64>::identity(0, 0).cholesky()?,
            });
        }
        if let Some(chol) = m.clone().cholesky() {
            return Some(Factor { chol });
        }
        let scale = (0..m.nrows()).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1.0);
        for e in [1e-14, 1e-12, 1e-10] {
            let mut reg = m.clone();
            for i in 0..m.nrows() {
                reg[(i, i)] += e * scale;
            }
            if let Some(chol) = reg.cholesky() {
                return Some(Factor { chol });
            }
        }
        None
    }

    fn solve(&self, r: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(r)
    }
}

#[allow(clippy::too_many_arguments)]
fn direction(
    pr: &Problem,
    st: &State,
    sc: &[Scaling],
    fac: &Factor,
    cmat: &[DMatrix<f64>],
    dy2: &DVector<f64>,
    dx2: &[DMatrix<f64>],
    res: (&DVector<f64>, &[DMatrix<f64>], f64),
    sigma_mu: f64,
    eta: f64,
    corr: Option<(&[DMatrix<f64>], f64)>,
) -> Direction {
    let (rp, rd, rg) = res;
    let nb = sc.len();
    let mut rx = Vec::with_capacity(nb);
    for b in 0..nb {
        let lam = &sc[b].lam;
        let n = lam.len();
        let mut v = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut rc = if i == j { sigma_mu - lam[i] * lam[i] } else { 0.0 };
                if let Some((c, _)) = corr {
                    rc -= c[b][(i, j)];
                }
                v[(i, j)] = 2.0 * rc / (lam[i] + lam[j]);
            }
        }
        rx.push(&sc[b].r * v * sc[b].r.transpose());
    }
    // dy1 = M⁻¹(−η rp − A(R_X) − η A(W Rd W))
    let wrdw: Vec<DMatrix<f64>> = (0..nb).map(|b| &sc[b].w * &rd[b] * &sc[b].w).collect();
    let rhs = -rp * eta - pr.a_op(&rx) - pr.a_op(&wrdw) * eta;
    let dy1 = fac.solve(&rhs);
    let aty1 = pr.at_op(&dy1);
    let dx1: Vec<DMatrix<f64>> = (0..nb)
        .map(|b| &rx[b] + &sc[b].w * (&rd[b] * eta + &aty1[b]) * &sc[b].w)
        .collect();
    let rtau = sigma_mu - st.tau * st.kappa - corr.map(|c| c.1).unwrap_or(0.0);
    let b = DVector::from_column_slice(&pr.p.b);
    let c_dx1: f64 = (0..nb).map(|k| dot(&cmat[k], &dx1[k])).sum();
    let c_dx2: f64 = (0..nb).map(|k| dot(&cmat[k], &dx2[k])).sum();
    let num = -eta * rg - c_dx1 + b.dot(&dy1) - rtau / st.tau;
    let den = c_dx2 - b.dot(dy2) - st.kappa / st.tau;
    let dtau = num / den;
    let dkappa = (rtau - st.kappa * dtau) / st.tau;
    let dy = &dy1 + dy2 * dtau;
    let dx: Vec<DMatrix<f64>> = (0..nb).map(|k| sym(&dx1[k] + &dx2[k] * dtau)).collect();
    let aty = pr.at_op(&dy);
    let ds: Vec<DMatrix<f64>> = (0..nb)
        .map(|k| sym(-&rd[k] * eta - &aty[k] + &cmat[k] * dtau))
        .collect();
    Direction {
        dx,
        dy,
        ds,
        dtau,
        dkappa,
    }
}

fn max_step(st: &State, sc: &[Scaling], d: &Direction) -> f64 {
    let mut alpha = f64::INFINITY;
    for (b, s) in sc.iter().enumerate() {
        let dxt = &s.rinv * &d.dx[b] * s.rinv.transpose();
        let dst = s.r.transpose() * &d.ds[b] * &s.r;
        alpha = alpha.min(block_step(&s.lam, &dxt));
        alpha = alpha.min(block_step(&s.lam, &dst));
    }
    if d.dtau < 0.0 {
        alpha = alpha.min(-st.tau / d.dtau);
    }
    if d.dkappa < 0.0 {
        alpha = alpha.min(-st.kappa / d.dkappa);
    }
    alpha
}

/// Solves a standard-form SDP.
pub fn solve_standard(p: &StandardSdp, opts: &Options) -> StdSolution {
    let pr = Problem::new(p);
    let nb = p.blocks.len();
    let ntot: usize = p.blocks.iter().sum();
    let cmat = pr.c_dense();
    let b = DVector::from_column_slice(&p.b);
    let normb = 1.0 + b.norm();
    let normc = 1.0 + cmat.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt();

    let mut st = State {
        x: p.blocks.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        y: DVector::zeros(pr.m),
        s: p.blocks.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        tau: 1.0,
        kappa: 1.0,
    };

    let mut status = StdStatus::MaxIter;
    let mut iterations = 0;
    let mut report = (0.0, 0.0, 0.0, 0.0, 0.0);
    for iter in 0..=opts.max_iter {
        iterations = iter;
        let ax = pr.a_op(&st.x);
        let aty = pr.at_op(&st.y);
        let rp = &ax - &b * st.tau;
        let rd: Vec<DMatrix<f64>> = (0..nb)
            .map(|k| &aty[k] + &st.s[k] - &cmat[k] * st.tau)
            .collect();
        let cx: f64 = (0..nb).map(|k| dot(&cmat[k], &st.x[k])).sum();
        let by = b.dot(&st.y);
        let rg = cx - by + st.kappa;
        let xs: f64 = (0..nb).map(|k| dot(&st.x[k], &st.s[k])).sum();
        let mu = (xs + st.tau * st.kappa) / (ntot as f64 + 1.0);

        let pobj = cx / st.tau;
        let dobj = by / st.tau;
        let pres = (&ax / st.tau - &b).norm() / normb;
        let dres = (0..nb)
            .map(|k| (&aty[k] + &st.s[k]) / st.tau - &cmat[k])
            .map(|m| m.norm_squared())
            .sum::<f64>()
            .sqrt()
            / normc;
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        report = (pobj, dobj, pres, dres, gap);
        if opts.verbose {
            eprintln!(
                "{iter:3} pobj {pobj:+.8e} dobj {dobj:+.8e} pres {pres:.2e} dres {dres:.2e} gap {gap:.2e} tau {:.2e} kappa {:.2e} mu {mu:.2e}",
                st.tau, st.kappa
            );
        }
        if pres <= opts.tol_feas && dres <= opts.tol_feas && gap <= opts.tol_gap {
            status = StdStatus::Optimal;
            break;
        }
        // infeasibility certificates
        if by > 0.0 && st.tau < st.kappa {
            let ray = (0..nb)
                .map(|k| (&aty[k] + &st.s[k]).norm_squared())
                .sum::<f64>()
                .sqrt();
            if ray / by <= opts.tol_infeas * normc {
                status = StdStatus::PrimalInfeasible;
                break;
            }
        }
        if cx < 0.0 && st.tau < st.kappa && (ax.norm() / -cx) <= opts.tol_infeas * normb {
            status = StdStatus::DualInfeasible;
            break;
        }
        if iter == opts.max_iter {
            break;
        }
        if !mu.is_finite() || mu <= 0.0 {
            status = StdStatus::Numerical;
            break;
        }

        let Some(sc) = (0..nb).map(|k| scaling(&st.x[k], &st.s[k])).collect::<Option<Vec<_>>>()
        else {
            status = StdStatus::Numerical;
            break;
        };
        let Some(fac) = Factor::new(pr.schur(&sc)) else {
            status = StdStatus::Numerical;
            break;
        };
        let wcw: Vec<DMatrix<f64>> = (0..nb).map(|k| &sc[k].w * &cmat[k] * &sc[k].w).collect();
        let dy2 = fac.solve(&(pr.a_op(&wcw) + &b));
        let aty2 = pr.at_op(&dy2);
        let dx2: Vec<DMatrix<f64>> = (0..nb)
            .map(|k| &sc[k].w * (&aty2[k] - &cmat[k]) * &sc[k].w)
            .collect();
        let res = (&rp, rd.as_slice(), rg);

        // predictor
        let aff = direction(&pr, &st, &sc, &fac, &cmat, &dy2, &dx2, res, 0.0, 1.0, None);
        let alpha_aff = max_step(&st, &sc, &aff).min(1.0);
        let mut xs_aff = 0.0;
        for k in 0..nb {
            let xa = &st.x[k] + &aff.dx[k] * alpha_aff;
            let sa = &st.s[k] + &aff.ds[k] * alpha_aff;
            xs_aff += dot(&xa, &sa);
        }
        let mu_aff = (xs_aff
            + (st.tau + alpha_aff * aff.dtau) * (st.kappa + alpha_aff * aff.dkappa))
            / (ntot as f64 + 1.0);
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let corr: Vec<DMatrix<f64>> = (0..nb)
            .map(|k| {
                let dxt = &sc[k].rinv * &aff.dx[k] * sc[k].rinv.transpose();
                let dst = sc[k].r.transpose() * &aff.ds[k] * &sc[k].r;
                sym(dxt * dst)
            })
            .collect();
        let dir = direction(
            &pr,
            &st,
            &sc,
            &fac,
            &cmat,
            &dy2,
            &dx2,
            res,
            sigma * mu,
            1.0 - sigma,
            Some((&corr, aff.dtau * aff.dkappa)),
        );
        let alpha = (0.99 * max_step(&st, &sc, &dir)).min(1.0);
        if !alpha.is_finite() || alpha <= 0.0 {
            status = StdStatus::Numerical;
            break;
        }
        for k in 0..nb {
            st.x[k] = sym(&st.x[k] + &dir.dx[k] * alpha);
            st.s[k] = sym(&st.s[k] + &dir.ds[k] * alpha);
        }
        st.y += &dir.dy * alpha;
        st.tau += alpha * dir.dtau;
        st.kappa += alpha * dir.dkappa;
        // keep the embedding normalised
        let scale = st.tau + st.kappa;
        if !(1e-8..=1e8).contains(&scale) {
            let f = 1.0 / scale;
            for k in 0..nb {
                st.x[k] *= f;
                st.s[k] *= f;
            }
            st.y *= f;
            st.tau *= f;
            st.kappa *= f;
        }
    }

    let (pobj, dobj, pres, dres, gap) = report;
    let (x, y, s) = match status {
        StdStatus::PrimalInfeasible | StdStatus::DualInfeasible => (st.x, st.y, st.s),
        _ => {
            let f = 1.0 / st.tau;
            (
                st.x.into_iter().map(|m| m * f).collect(),
                st.y * f,
                st.s.into_iter().map(|m| m * f).collect(),
            )
        }
    };
    StdSolution {
        status,
        x,
        y,
        s,
        primal_obj: pobj,
        dual_obj: dobj,
        primal_res: pres,
        dual_res: dres,
        rel_gap: gap,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_lp() {
        // min x1 + 2 x2  s.t. x1 + x2 = 1, x ≥ 0  → 1
        let mut one = SparseSym::new();
        one.push(0, 0, 1.0);
        let mut two = SparseSym::new();
        two.push(0, 0, 2.0);
        let p = StandardSdp {
            blocks: vec![1, 1],
            c: vec![one.clone(), two],
            a: vec![vec![(0, one.clone()), (1, one)]],
            b: vec![1.0],
        };
        let sol = solve_standard(&p, &Options::default());
        assert_eq!(sol.status, StdStatus::Optimal);
        assert!((sol.primal_obj - 1.0).abs() < 1e-7);
    }

    #[test]
    fn infeasible_lp() {
        // x = -1, x ≥ 0
        let mut one = SparseSym::new();
        one.push(0, 0, 1.0);
        let p = StandardSdp {
            blocks: vec![1],
            c: vec![one.clone()],
            a: vec![vec![(0, one)]],
            b: vec![-1.0],
        };
        let sol = solve_standard(&p, &Options::default());
        assert_eq!(sol.status, StdStatus::PrimalInfeasible);
    }
}
