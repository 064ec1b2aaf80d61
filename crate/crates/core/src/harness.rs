//! Empirical checks that a lifted LMI represents `S = {x ∈ D : G(x) ⪰ 0}`:
//! sampled membership comparison, support-function probes and boundary
//! point clouds.

use std::fmt::{self, Write as _};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::momlift::{min_eigenvalue, LiftedLMI};
use crate::polyalg::rational::{from_f64, to_f64};
use crate::polyalg::{Poly, RatMatrix};
use crate::ratlift::RationalMatFn;
use crate::sdpcore::{feasibility, optimize_linear, Feasibility, Options, Status};

/// Eigenvalue dead zone of the direct oracle.
pub const DIRECT_EPS: f64 = 1e-6;
/// Denominators below this are treated as poles by `member_direct`.
pub const POLE_EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Direct {
    In(f64),
    Out(f64),
    Boundary(f64),
    DomainViolation(f64),
    PoleNear(f64),
}

impl Direct {
    pub fn name(&self) -> &'static str {
        match self {
            Direct::In(_) => "In",
            Direct::Out(_) => "Out",
            Direct::Boundary(_) => "Boundary",
            Direct::DomainViolation(_) => "DomainViolation",
            Direct::PoleNear(_) => "PoleNear",
        }
    }

    pub fn margin(&self) -> f64 {
        match *self {
            Direct::In(v) | Direct::Out(v) | Direct::Boundary(v) | Direct::DomainViolation(v) | Direct::PoleNear(v) => v,
        }
    }

    pub fn is_in(&self) -> bool {
        matches!(self, Direct::In(_))
    }

    /// Definitely outside `S`.
    pub fn is_out(&self) -> bool {
        matches!(self, Direct::Out(_) | Direct::DomainViolation(_))
    }
}

impl fmt::Display for Direct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (margin {:.2e})", self.name(), self.margin())
    }
}

fn lifted_name(v: &Feasibility) -> &'static str {
    match v {
        Feasibility::In(_) => "In",
        Feasibility::Out(_) => "Out",
        Feasibility::Indeterminate(..) => "Indeterminate",
    }
}

#[derive(Clone, Debug)]
struct FloatPoly(Vec<(Vec<i32>, f64)>);

impl FloatPoly {
    fn new(p: &Poly) -> Self {
        FloatPoly(
            p.terms()
                .iter()
                .map(|(e, c)| (e.entries().iter().map(|&k| k as i32).collect(), to_f64(c)))
                .collect(),
        )
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, v)| v.powi(k)).product::<f64>())
            .sum()
    }
}

/// `G`, its denominator and the domain polynomials with `f64` coefficients.
#[derive(Clone, Debug)]
pub struct DirectOracle {
    m: usize,
    numerator: Vec<(Vec<i32>, DMatrix<f64>)>,
    denominator: FloatPoly,
    domain: Vec<FloatPoly>,
    rational: bool,
}

impl DirectOracle {
    pub fn new(g: &RationalMatFn, gs: &[Poly]) -> Self {
        DirectOracle {
            m: g.m(),
            numerator: g
                .numerator
                .terms()
                .iter()
                .map(|(e, c)| (e.entries().iter().map(|&k| k as i32).collect(), RatMatrix::to_f64(c)))
                .collect(),
            denominator: FloatPoly::new(&g.denominator),
            domain: gs.iter().map(FloatPoly::new).collect(),
            rational: !g.denominator.is_constant(),
        }
    }

    pub fn denominator(&self, x: &[f64]) -> f64 {
        self.denominator.eval(x)
    }

    pub fn is_rational(&self) -> bool {
        self.rational
    }

    pub fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.m, self.m);
        for (e, c) in &self.numerator {
            let w: f64 = e.iter().zip(x).map(|(&k, v)| v.powi(k)).product();
            out += c * w;
        }
        out / self.denominator.eval(x)
    }

    pub fn min_eigenvalue(&self, x: &[f64]) -> f64 {
        let g = self.eval(x);
        if self.m == 2 {
            let (a, b, d) = (g[(0, 0)], g[(0, 1)], g[(1, 1)]);
            return 0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt();
        }
        min_eigenvalue(&g)
    }

    pub fn classify(&self, x: &[f64], eps: f64) -> Direct {
        if let Some(v) = self.domain.iter().map(|g| g.eval(x)).find(|v| *v < -eps) {
            return Direct::DomainViolation(v);
        }
        if self.rational {
            let den = self.denominator.eval(x);
            if den.abs() < POLE_EPS {
                return Direct::PoleNear(den);
            }
        }
        let lam = self.min_eigenvalue(x);
        if lam >= eps {
            Direct::In(lam)
        } else if lam <= -eps {
            Direct::Out(lam)
        } else {
            Direct::Boundary(lam)
        }
    }
}

/// Classifies `x` against `S` by evaluating `G(x)` directly.
pub fn member_direct(g: &RationalMatFn, gs: &[Poly], x: &[f64], eps: f64) -> Direct {
    DirectOracle::new(g, gs).classify(x, eps)
}

/// How an Out-by-direct, In-by-lifted point is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// The lifting is claimed exact: every disagreement is hard.
    Exact,
    /// The lifting is a relaxation: Out/In points are slack.
    Relaxation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DisagreementKind {
    Hard,
    Slack,
}

#[derive(Clone, Debug)]
pub struct Record {
    pub x: Vec<f64>,
    pub direct: Direct,
    pub lifted: Feasibility,
}

#[derive(Clone, Debug)]
pub struct Disagreement {
    pub record: Record,
    pub kind: DisagreementKind,
}

#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub samples: usize,
    pub agree: usize,
    pub disagreements: Vec<Disagreement>,
    pub indeterminate: usize,
    /// Direct-In points whose lifted verdict is not In, dead zone included.
    pub soundness_violations: Vec<Record>,
    pub seed: u64,
    pub records: Vec<Record>,
}

impl MembershipReport {
    pub fn hard(&self) -> usize {
        self.disagreements.iter().filter(|d| d.kind == DisagreementKind::Hard).count()
    }

    pub fn slack(&self) -> usize {
        self.disagreements.iter().filter(|d| d.kind == DisagreementKind::Slack).count()
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{} sampled, {} disagreements", self.samples, self.hard());
        let _ = write!(
            s,
            " ({} agree, {} indeterminate, {} relaxation slack, {} soundness violations; seed {})",
            self.agree,
            self.indeterminate,
            self.slack(),
            self.soundness_violations.len(),
            self.seed
        );
        s
    }

    /// One row per sample.
    pub fn to_csv(&self) -> String {
        let n = self.records.first().map_or(0, |r| r.x.len());
        let mut s: String = (1..=n).map(|i| format!("x{i},")).collect();
        s.push_str("direct,direct_margin,lifted,lifted_margin\n");
        for r in &self.records {
            for v in &r.x {
                let _ = write!(s, "{v},");
            }
            let _ = writeln!(
                s,
                "{},{:e},{},{:e}",
                r.direct.name(),
                r.direct.margin(),
                lifted_name(&r.lifted),
                r.lifted.margin()
            );
        }
        s
    }
}

/// Axis-aligned sampling box. Coordinates are drawn as `hi − (hi − lo)·u`
/// with `u ∈ [0, 1)`, so each axis is the half-open `(lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn cube(n: usize, lo: f64, hi: f64) -> Self {
        SampleBox {
            lo: vec![lo; n],
            hi: vec![hi; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn scale(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a).abs().max(a.abs()).max(b.abs()))
            .fold(0.0, f64::max)
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(lo, hi)| hi - (hi - lo) * rng.gen::<f64>())
            .collect()
    }

    /// Parses `lo:hi` or `lo:hi,lo:hi,...`; a single range applies to all axes.
    pub fn parse(s: &str, n: usize) -> Result<Self, Error> {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for part in s.split(',') {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("box range {part:?}: expected lo:hi")))?;
            let a: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("box bound {a:?}")))?;
            let b: f64 = b.trim().parse().map_err(|_| Error::Parse(format!("box bound {b:?}")))?;
            if !(a <= b) {
                return Err(Error::Parse(format!("box range {part:?}: lo exceeds hi")));
            }
            lo.push(a);
            hi.push(b);
        }
        if lo.len() == 1 {
            return Ok(SampleBox::cube(n, lo[0], hi[0]));
        }
        if lo.len() != n {
            return Err(Error::Parse(format!("box has {} ranges, expected {n}", lo.len())));
        }
        Ok(SampleBox { lo, hi })
    }
}

fn sample_point(bx: &SampleBox, oracle: &DirectOracle, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let guard = 1e-4 * bx.scale();
    loop {
        let x = bx.draw(&mut rng);
        if !oracle.is_rational() || oracle.denominator(&x).abs() >= guard {
            return x;
        }
    }
}

/// Compares direct and lifted membership on `count` seeded samples.
pub fn compare_membership(
    g: &RationalMatFn,
    gs: &[Poly],
    lmi: &LiftedLMI,
    bx: &SampleBox,
    count: usize,
    seed: u64,
    mode: Mode,
    opts: &Options,
) -> Result<MembershipReport, Error> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    if bx.dim() != g.nvars() || lmi.nvars != g.nvars() {
        return Err(Error::Dimension("box, problem and lifting dimensions differ".into()));
    }
    let oracle = DirectOracle::new(g, gs);
    let records: Vec<Record> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let x = sample_point(bx, &oracle, seed, i);
            let direct = oracle.classify(&x, DIRECT_EPS);
            let xr: Vec<_> = x.iter().map(|v| from_f64(*v)).collect();
            let lifted = feasibility(lmi, &xr, opts)?;
            Ok(Record { x, direct, lifted })
        })
        .collect::<Result<_, Error>>()?;
    let mut report = MembershipReport {
        samples: count,
        agree: 0,
        disagreements: Vec::new(),
        indeterminate: 0,
        soundness_violations: Vec::new(),
        seed,
        records: Vec::new(),
    };
    for r in &records {
        if r.direct.is_in() && !matches!(r.lifted, Feasibility::In(_)) {
            report.soundness_violations.push(r.clone());
        }
        match (&r.direct, &r.lifted) {
            (Direct::In(_), Feasibility::In(_)) => report.agree += 1,
            (d, Feasibility::Out(_)) if d.is_out() => report.agree += 1,
            (Direct::In(_), Feasibility::Out(_)) => report.disagreements.push(Disagreement {
                record: r.clone(),
                kind: DisagreementKind::Hard,
            }),
            (d, Feasibility::In(_)) if d.is_out() => report.disagreements.push(Disagreement {
                record: r.clone(),
                kind: match mode {
                    Mode::Exact => DisagreementKind::Hard,
                    Mode::Relaxation => DisagreementKind::Slack,
                },
            }),
            _ => report.indeterminate += 1,
        }
    }
    report.records = records;
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct SupportRow {
    pub direction: Vec<f64>,
    pub status: Status,
    pub lifted: f64,
    pub grid: f64,
    /// `lifted − grid`.
    pub gap: f64,
    pub lifted_x: Vec<f64>,
    pub grid_x: Vec<f64>,
}

/// In-mask of a 2-D grid, kept as the extreme In columns of each row.
struct RowExtremes {
    bx: SampleBox,
    step: f64,
    rows: Vec<Option<(usize, usize)>>,
}

impl RowExtremes {
    fn build(oracle: &DirectOracle, bx: &SampleBox, step: f64) -> Self {
        let nx = ((bx.hi[0] - bx.lo[0]) / step).round() as usize + 1;
        let ny = ((bx.hi[1] - bx.lo[1]) / step).round() as usize + 1;
        let rows = (0..ny)
            .into_par_iter()
            .map(|j| {
                let y = bx.lo[1] + j as f64 * step;
                let is_in = |i: usize| oracle.classify(&[bx.lo[0] + i as f64 * step, y], 0.0).is_in();
                let first = (0..nx).find(|&i| is_in(i))?;
                let last = (0..nx).rev().find(|&i| is_in(i))?;
                Some((first, last))
            })
            .collect();
        RowExtremes {
            bx: bx.clone(),
            step,
            rows,
        }
    }

    /// The row midpoint with the largest eigenvalue margin; row midpoints
    /// lie in `S` when `S` is convex, barring poles.
    fn center(&self, oracle: &DirectOracle) -> Option<Vec<f64>> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(j, r)| {
                let (a, b) = (*r)?;
                let p = vec![
                    self.bx.lo[0] + 0.5 * (a + b) as f64 * self.step,
                    self.bx.lo[1] + j as f64 * self.step,
                ];
                match oracle.classify(&p, 0.0) {
                    Direct::In(m) => Some((m, p)),
                    _ => None,
                }
            })
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, p)| p)
    }

    fn minimize(&self, c: &[f64]) -> Option<(f64, Vec<f64>)> {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for (j, r) in self.rows.iter().enumerate() {
            let Some((a, b)) = r else { continue };
            let y = self.bx.lo[1] + j as f64 * self.step;
            for i in [*a, *b] {
                let p = vec![self.bx.lo[0] + i as f64 * self.step, y];
                let v = c[0] * p[0] + c[1] * p[1];
                if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                    best = Some((v, p));
                }
            }
        }
        best
    }
}

/// Last In point on the ray `center + r·dir`, `0 ≤ r ≤ rmax`, by bisection.
fn ray_boundary(oracle: &DirectOracle, center: &[f64], dir: &[f64], rmax: f64) -> Vec<f64> {
    let at = |r: f64| -> Vec<f64> { center.iter().zip(dir).map(|(c, d)| c + r * d).collect() };
    if oracle.classify(&at(rmax), 0.0).is_in() {
        return at(rmax);
    }
    let (mut lo, mut hi) = (0.0, rmax);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if oracle.classify(&at(mid), 0.0).is_in() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo)
}

/// Refines a grid minimizer of `c·x` along the boundary, parametrized by
/// the angle around an interior `center`, with step halving.
fn polish(oracle: &DirectOracle, c: &[f64], center: &[f64], start: &[f64], step: f64, rmax: f64, iters: usize) -> (f64, Vec<f64>) {
    let eval = |theta: f64| {
        let p = ray_boundary(oracle, center, &[theta.cos(), theta.sin()], rmax);
        (c[0] * p[0] + c[1] * p[1], p)
    };
    let (dx, dy) = (start[0] - center[0], start[1] - center[1]);
    let mut theta = dy.atan2(dx);
    let mut best = eval(theta);
    let start_val = c[0] * start[0] + c[1] * start[1];
    if start_val < best.0 {
        best = (start_val, start.to_vec());
    }
    let mut h = step / dx.hypot(dy).max(step);
    for _ in 0..iters {
        let mut moved = true;
        while moved {
            moved = false;
            for t in [theta - h, theta + h] {
                let cand = eval(t);
                if cand.0 < best.0 {
                    best = cand;
                    theta = t;
                    moved = true;
                }
            }
        }
        h *= 0.5;
    }
    best
}

/// Lifted versus grid minima of `c·x` for each direction (`n = 2`).
pub fn support_compare(
    g: &RationalMatFn,
    gs: &[Poly],
    lmi: &LiftedLMI,
    directions: &[Vec<f64>],
    bx: &SampleBox,
    step: f64,
    opts: &Options,
) -> Result<Vec<SupportRow>, Error> {
    if g.nvars() != 2 || bx.dim() != 2 {
        return Err(Error::Dimension("support_compare grids two-dimensional sets".into()));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("grid step must be positive".into()));
    }
    let oracle = DirectOracle::new(g, gs);
    let mask = RowExtremes::build(&oracle, bx, step);
    let center = mask.center(&oracle);
    let rmax = (bx.hi[0] - bx.lo[0]).hypot(bx.hi[1] - bx.lo[1]);
    directions
        .par_iter()
        .map(|c| {
            let opt = optimize_linear(lmi, c, opts)?;
            let (grid, grid_x) = match (mask.minimize(c), &center) {
                (Some((_, p)), Some(o)) => polish(&oracle, c, o, &p, step, rmax, 40),
                (Some(best), _) => best,
                _ => (f64::INFINITY, Vec::new()),
            };
            Ok(SupportRow {
                direction: c.clone(),
                status: opt.status,
                lifted: opt.value,
                grid,
                gap: opt.value - grid,
                lifted_x: opt.x,
                grid_x,
            })
        })
        .collect()
}

/// `count` unit directions from a seeded stream.
pub fn unit_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if r > 1e-3 && r <= 1.0 {
            out.push(v.iter().map(|a| a / r).collect());
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceClass {
    In,
    Boundary,
}

#[derive(Clone, Debug)]
pub struct TracePoint {
    pub x: Vec<f64>,
    pub class: TraceClass,
    pub margin: f64,
}

pub const BISECTION_STEPS: usize = 10;

/// In grid points plus boundary points bisected along every grid edge
/// between an In point and a definitely-out point (`n ∈ {2, 3}`).
pub fn boundary_trace(g: &RationalMatFn, gs: &[Poly], bx: &SampleBox, points: &[usize]) -> Result<Vec<TracePoint>, Error> {
    let n = g.nvars();
    if !(2..=3).contains(&n) {
        return Err(Error::Dimension(format!("boundary_trace needs n in {{2, 3}}, got {n}")));
    }
    if bx.dim() != n || points.len() != n || points.iter().any(|&k| k < 2) {
        return Err(Error::InvalidArgument("grid needs at least 2 points per axis of the box".into()));
    }
    let oracle = DirectOracle::new(g, gs);
    let steps: Vec<f64> = (0..n).map(|k| (bx.hi[k] - bx.lo[k]) / (points[k] - 1) as f64).collect();
    let total: usize = points.iter().product();
    let coord = |mut flat: usize| -> Vec<usize> {
        let mut idx = vec![0; n];
        for k in 0..n {
            idx[k] = flat % points[k];
            flat /= points[k];
        }
        idx
    };
    let at = |idx: &[usize]| -> Vec<f64> { (0..n).map(|k| bx.lo[k] + idx[k] as f64 * steps[k]).collect() };
    let verdicts: Vec<Direct> = (0..total)
        .into_par_iter()
        .map(|f| oracle.classify(&at(&coord(f)), DIRECT_EPS))
        .collect();
    let out: Vec<Vec<TracePoint>> = (0..total)
        .into_par_iter()
        .map(|f| {
            let idx = coord(f);
            let mut pts = Vec::new();
            if let Direct::In(m) = verdicts[f] {
                pts.push(TracePoint {
                    x: at(&idx),
                    class: TraceClass::In,
                    margin: m,
                });
            }
            let mut stride = 1;
            for k in 0..n {
                if idx[k] + 1 < points[k] {
                    let (a, b) = (&verdicts[f], &verdicts[f + stride]);
                    let crossing = (a.is_in() && b.is_out()) || (a.is_out() && b.is_in());
                    if crossing {
                        let mut lo = at(&idx);
                        let mut hi = lo.clone();
                        hi[k] += steps[k];
                        if !a.is_in() {
                            std::mem::swap(&mut lo, &mut hi);
                        }
                        for _ in 0..BISECTION_STEPS {
                            let mid: Vec<f64> = lo.iter().zip(&hi).map(|(p, q)| 0.5 * (p + q)).collect();
                            if oracle.classify(&mid, 0.0).is_in() {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        let x: Vec<f64> = lo.iter().zip(&hi).map(|(p, q)| 0.5 * (p + q)).collect();
                        let margin = oracle.min_eigenvalue(&x);
                        pts.push(TracePoint {
                            x,
                            class: TraceClass::Boundary,
                            margin,
                        });
                    }
                }
                stride *= points[k];
            }
            pts
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

pub fn trace_csv(points: &[TracePoint], n: usize) -> String {
    let mut s: String = (1..=n).map(|i| format!("x{i},")).collect();
    s.push_str("class,margin\n");
    for p in points {
        for v in &p.x {
            let _ = write!(s, "{v},");
        }
        let class = match p.class {
            TraceClass::In => "in",
            TraceClass::Boundary => "boundary",
        };
        let _ = writeln!(s, "{class},{:e}", p.margin);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::momlift::assemble_l;
    use crate::polyalg::{MatPoly, Poly};

    fn disc() -> RationalMatFn {
        let x = |i| Poly::var(2, i);
        let g = MatPoly::from_entries(&[vec![Poly::one(2) - &x(0) * &x(0) - &x(1) * &x(1)]]).unwrap();
        RationalMatFn::polynomial(g)
    }

    #[test]
    fn pole_and_domain_verdicts() {
        let x = |i| Poly::var(2, i);
        let g = RationalMatFn::new(MatPoly::identity(1, 2), &x(0) * &x(1)).unwrap();
        assert!(matches!(member_direct(&g, &[], &[0.0, 1.0], 1e-9), Direct::PoleNear(_)));
        assert!(matches!(member_direct(&g, &[x(0)], &[-1.0, 1.0], 1e-9), Direct::DomainViolation(_)));
        assert!(matches!(member_direct(&g, &[x(0)], &[1.0, 1.0], 1e-9), Direct::In(_)));
    }

    #[test]
    fn disc_membership_and_support() {
        let g = disc();
        let lmi = assemble_l(&g.numerator).unwrap();
        let bx = SampleBox::cube(2, -1.5, 1.5);
        let opts = Options::default();
        let r = compare_membership(&g, &[], &lmi, &bx, 60, 7, Mode::Exact, &opts).unwrap();
        assert_eq!(r.agree + r.disagreements.len() + r.indeterminate, r.samples);
        assert_eq!(r.hard(), 0, "{}", r.summary());
        assert!(r.soundness_violations.is_empty());
        let again = compare_membership(&g, &[], &lmi, &bx, 60, 7, Mode::Exact, &opts).unwrap();
        assert_eq!(again.to_csv(), r.to_csv());

        let rows = support_compare(&g, &[], &lmi, &unit_directions(2, 3, 1), &bx, 1e-2, &opts).unwrap();
        for row in rows {
            assert!((row.lifted + 1.0).abs() < 1e-6 && row.gap.abs() < 1e-3, "{row:?}");
        }
    }

    #[test]
    fn trace_of_disc_and_empty_set() {
        let g = disc();
        let bx = SampleBox::cube(2, -1.5, 1.5);
        let pts = boundary_trace(&g, &[], &bx, &[31, 31]).unwrap();
        let bnd: Vec<_> = pts.iter().filter(|p| p.class == TraceClass::Boundary).collect();
        assert!(!bnd.is_empty());
        for p in bnd {
            let r = (p.x[0] * p.x[0] + p.x[1] * p.x[1]).sqrt();
            assert!((r - 1.0).abs() < 0.1 / 1024.0 * 2.0, "{r}");
        }
        let empty = RationalMatFn::polynomial(MatPoly::identity(1, 2).scale(&crate::polyalg::rational::rat(-1)));
        assert!(boundary_trace(&empty, &[], &bx, &[11, 11]).unwrap().is_empty());
    }
}
