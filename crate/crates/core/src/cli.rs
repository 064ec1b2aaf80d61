//! Command-line front end. `run_from` parses arguments, dispatches the
//! subcommand and returns the process exit code.
//!
//! Exit codes: 0 ok, 1 infeasible, 2 parse error, 3 construction error,
//! 4 numerical trouble, 5 verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certify::{pointwise_sos_concavity, qmod_certificate_search, uniform_sos_concavity, CertStatus, Certificate};
use crate::error::Error;
use crate::harness::{
    boundary_trace, compare_membership, member_direct, support_compare, trace_csv, Direct, Mode, SampleBox,
    DIRECT_EPS,
};
use crate::momlift::{assemble_l, assemble_ln, min_order, LiftedLMI};
use crate::polyalg::rational::parse_rat;
use crate::polyalg::Rat;
use crate::problem::Problem;
use crate::ratlift::assemble_lqmod;
use crate::sdpcore::{feasibility, optimize_linear, Feasibility, Options, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONSTRUCTION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

/// Largest accepted |lifted − grid| in `optimize --check`.
pub const SUPPORT_TOL: f64 = 2e-3;

#[derive(Parser, Debug)]
#[command(name = "pmilift", version, about = "Lifted LMIs for sets defined by polynomial matrix inequalities")]
struct Cli {
    /// Relative duality gap tolerance of the SDP solver.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_gap: f64,
    /// Primal/dual feasibility tolerance of the SDP solver.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_feas: f64,
    #[arg(long, global = true, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Output file for the lifting, certificate, report or point cloud.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the lifted LMI of a problem file.
    Lift {
        file: PathBuf,
        #[command(flatten)]
        lift: LiftArgs,
    },
    /// Search a concavity certificate.
    Certify {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: CertKindArg,
        /// Fixed ξ for `pointwise`, comma separated.
        #[arg(long)]
        xi: Option<String>,
        /// Half-degree cap of the multipliers for `qmod`.
        #[arg(long, default_value_t = 2)]
        t: u32,
    },
    /// Direct and lifted membership of one point.
    Member {
        file: PathBuf,
        /// Point, comma separated rationals or decimals.
        x: String,
        #[command(flatten)]
        lift: LiftArgs,
    },
    /// Sampled direct-versus-lifted membership comparison.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        lift: LiftArgs,
        /// `lo:hi` for every axis or `lo:hi,lo:hi,...`; defaults to the file's metadata.
        #[arg(long = "box")]
        bounds: Option<String>,
        #[arg(long, default_value_t = 2000)]
        count: usize,
    },
    /// Minimize a linear function over the lifted set.
    Optimize {
        file: PathBuf,
        #[command(flatten)]
        lift: LiftArgs,
        /// Cost vector, comma separated.
        #[arg(long)]
        c: String,
        /// Compare with a polished grid search of this step (two variables only).
        #[arg(long)]
        check: Option<f64>,
        #[arg(long = "box")]
        bounds: Option<String>,
    },
    /// Grid classification and boundary points as CSV.
    Trace {
        file: PathBuf,
        /// Points per axis, `200` or `200x150`.
        #[arg(long, default_value = "200")]
        grid: String,
        #[arg(long = "box")]
        bounds: Option<String>,
    },
}

#[derive(Args, Debug, Clone)]
struct LiftArgs {
    /// Construction; defaults to the file's metadata, else sos / putinar / qmod by problem type.
    #[arg(long, value_enum)]
    mode: Option<LiftMode>,
    /// Relaxation order for `putinar`.
    #[arg(long)]
    order: Option<u32>,
    /// Half degree for `qmod`.
    #[arg(long)]
    d: Option<u32>,
    /// Certificate file whose `d:` line sets the qmod half degree.
    #[arg(long)]
    cert: Option<PathBuf>,
    /// Use a lifting written by `lift` instead of building one.
    #[arg(long)]
    lifted: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum LiftMode {
    Sos,
    Putinar,
    Qmod,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CertKindArg {
    UniformSosConcave,
    Pointwise,
    Qmod,
}

struct Ctx {
    opts: Options,
    seed: u64,
    out: Option<PathBuf>,
}

/// Failure carrying its exit code.
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Io(_) => EXIT_PARSE,
            Error::Solver(_) => EXIT_NUMERICAL,
            _ => EXIT_CONSTRUCTION,
        };
        Fail(code, e.to_string())
    }
}

fn parse_fail(msg: impl Into<String>) -> Fail {
    Fail(EXIT_PARSE, msg.into())
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let ctx = Ctx {
        opts: Options {
            max_iter: cli.max_iter,
            tol_gap: cli.tol_gap,
            tol_feas: cli.tol_feas,
            ..Options::default()
        },
        seed: cli.seed,
        out: cli.out,
    };
    match dispatch(cli.command, &ctx) {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Command, ctx: &Ctx) -> Result<i32, Fail> {
    match cmd {
        Command::Lift { file, lift } => cmd_lift(&file, &lift, ctx),
        Command::Certify { file, kind, xi, t } => cmd_certify(&file, kind, xi.as_deref(), t, ctx),
        Command::Member { file, x, lift } => cmd_member(&file, &x, &lift, ctx),
        Command::Verify { file, lift, bounds, count } => cmd_verify(&file, &lift, bounds.as_deref(), count, ctx),
        Command::Optimize { file, lift, c, check, bounds } => cmd_optimize(&file, &lift, &c, check, bounds.as_deref(), ctx),
        Command::Trace { file, grid, bounds } => cmd_trace(&file, &grid, bounds.as_deref(), ctx),
    }
}

fn write_out(ctx: &Ctx, text: &str) -> Result<(), Fail> {
    match &ctx.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", p.display()))),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn parse_point(s: &str) -> Result<Vec<Rat>, Fail> {
    s.split(',')
        .map(|t| parse_rat(t.trim()).map_err(|e| parse_fail(format!("point {s:?}: {e}"))))
        .collect()
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>, Fail> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| parse_fail(format!("{what} {s:?}: bad number {t:?}"))))
        .collect()
}

fn load(file: &Path) -> Result<Problem, Fail> {
    Problem::from_path(file).map_err(|e| {
        let Fail(code, msg) = Fail::from(e);
        Fail(code, format!("{}: {msg}", file.display()))
    })
}

fn metadata_str<'a>(p: &'a Problem, key: &str) -> Option<&'a str> {
    p.metadata.get(key).and_then(|v| v.as_str())
}

fn sample_box(p: &Problem, bounds: Option<&str>) -> Result<SampleBox, Fail> {
    let range = bounds
        .or_else(|| metadata_str(p, "box"))
        .ok_or_else(|| parse_fail("no --box given and the problem metadata has none"))?;
    Ok(SampleBox::parse(range, p.nvars())?)
}

fn cert_d(path: &Path) -> Result<u32, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    text.lines()
        .find_map(|l| l.strip_prefix("d:").and_then(|v| v.trim().parse().ok()))
        .ok_or_else(|| parse_fail(format!("{}: no `d:` line", path.display())))
}

/// The lifting and whether it is a relaxation.
fn build_lifting(p: &Problem, args: &LiftArgs) -> Result<(LiftedLMI, Mode), Fail> {
    if let Some(path) = &args.lifted {
        let text = std::fs::read_to_string(path).map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
        let lmi = LiftedLMI::from_json(&text)?;
        if lmi.nvars != p.nvars() {
            return Err(Fail(EXIT_CONSTRUCTION, "lifting and problem dimensions differ".into()));
        }
        let mode = if lmi.labels.iter().any(|l| l.starts_with('B')) { Mode::Relaxation } else { Mode::Exact };
        return Ok((lmi, mode));
    }
    let (meta_mode, meta_param) = match metadata_str(p, "lift").map(|s| s.split_whitespace().collect::<Vec<_>>()) {
        Some(parts) if !parts.is_empty() => {
            let mode = LiftMode::from_str(parts[0], true).map_err(|_| parse_fail(format!("metadata lift mode {:?}", parts[0])))?;
            (Some(mode), parts.get(1).and_then(|v| v.parse::<u32>().ok()))
        }
        _ => (None, None),
    };
    let mode = args.mode.or(meta_mode).unwrap_or(match (p.is_polynomial(), p.domain.is_empty()) {
        (false, _) => LiftMode::Qmod,
        (true, true) => LiftMode::Sos,
        (true, false) => LiftMode::Putinar,
    });
    let from_meta = if args.mode.is_none() || args.mode == meta_mode { meta_param } else { None };
    match mode {
        LiftMode::Sos => {
            if !p.domain.is_empty() {
                return Err(Fail(EXIT_CONSTRUCTION, "mode sos takes no domain; use putinar".into()));
            }
            Ok((assemble_l(&p.matpoly()?)?, Mode::Exact))
        }
        LiftMode::Putinar => {
            let g = p.matpoly()?;
            let order = args.order.or(from_meta).unwrap_or_else(|| min_order(&g, &p.domain));
            Ok((assemble_ln(&g, &p.domain, order)?, Mode::Relaxation))
        }
        LiftMode::Qmod => {
            let d = match (args.d, &args.cert) {
                (Some(d), _) => d,
                (None, Some(c)) => cert_d(c)?,
                (None, None) => from_meta.ok_or_else(|| parse_fail("mode qmod needs --d or --cert"))?,
            };
            Ok((assemble_lqmod(&p.g, &p.domain, d)?, Mode::Exact))
        }
    }
}

fn cmd_lift(file: &Path, args: &LiftArgs, ctx: &Ctx) -> Result<i32, Fail> {
    let p = load(file)?;
    let (lmi, _) = build_lifting(&p, args)?;
    if ctx.out.is_some() {
        write_out(ctx, &(lmi.to_json() + "\n"))?;
        println!("{}", lmi.summary());
    } else {
        eprintln!("{}", lmi.summary());
        println!("{}", lmi.to_json());
    }
    Ok(EXIT_OK)
}

fn cert_exit(c: &Certificate) -> i32 {
    match c.status {
        CertStatus::Feasible => EXIT_OK,
        CertStatus::Infeasible | CertStatus::InfeasibleByDegree => EXIT_INFEASIBLE,
        CertStatus::Unverified => EXIT_NUMERICAL,
    }
}

fn cmd_certify(file: &Path, kind: CertKindArg, xi: Option<&str>, t: u32, ctx: &Ctx) -> Result<i32, Fail> {
    let p = load(file)?;
    let cert = match kind {
        CertKindArg::UniformSosConcave => uniform_sos_concavity(&p.matpoly()?, &ctx.opts)?,
        CertKindArg::Pointwise => {
            let xi = parse_point(xi.ok_or_else(|| parse_fail("pointwise needs --xi"))?)?;
            pointwise_sos_concavity(&p.matpoly()?, &xi, &ctx.opts)?
        }
        CertKindArg::Qmod => qmod_certificate_search(&p.g, &p.domain, t, &ctx.opts)?,
    };
    println!("{}", cert.status_line());
    if let Some(path) = &ctx.out {
        std::fs::write(path, cert.to_text()).map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    }
    Ok(cert_exit(&cert))
}

fn lifted_text(v: &Feasibility) -> String {
    match v {
        Feasibility::In(t) => format!("In (margin {t:.2e})"),
        Feasibility::Out(t) => format!("Out (margin {t:.2e})"),
        Feasibility::Indeterminate(t, why) => format!("Indeterminate (margin {t:.2e}; {why})"),
    }
}

fn cmd_member(file: &Path, x: &str, args: &LiftArgs, ctx: &Ctx) -> Result<i32, Fail> {
    let p = load(file)?;
    let xr = parse_point(x)?;
    if xr.len() != p.nvars() {
        return Err(parse_fail(format!("point has {} coordinates, expected {}", xr.len(), p.nvars())));
    }
    let (lmi, mode) = build_lifting(&p, args)?;
    let xf: Vec<f64> = xr.iter().map(crate::polyalg::rational::to_f64).collect();
    let direct = member_direct(&p.g, &p.domain, &xf, DIRECT_EPS);
    let lifted = feasibility(&lmi, &xr, &ctx.opts)?;
    println!("direct: {direct} lifted: {}", lifted_text(&lifted));
    let hard = match (&direct, &lifted) {
        (Direct::In(_), Feasibility::Out(_)) => true,
        (d, Feasibility::In(_)) if d.is_out() => mode == Mode::Exact,
        _ => false,
    };
    Ok(if hard { EXIT_VERIFY } else { EXIT_OK })
}

fn cmd_verify(file: &Path, args: &LiftArgs, bounds: Option<&str>, count: usize, ctx: &Ctx) -> Result<i32, Fail> {
    let p = load(file)?;
    let bx = sample_box(&p, bounds)?;
    let (lmi, mode) = build_lifting(&p, args)?;
    let report = compare_membership(&p.g, &p.domain, &lmi, &bx, count, ctx.seed, mode, &ctx.opts)?;
    println!("{}", report.summary());
    if let Some(path) = &ctx.out {
        std::fs::write(path, report.to_csv()).map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    }
    Ok(if report.hard() > 0 || !report.soundness_violations.is_empty() { EXIT_VERIFY } else { EXIT_OK })
}

fn cmd_optimize(file: &Path, args: &LiftArgs, c: &str, check: Option<f64>, bounds: Option<&str>, ctx: &Ctx) -> Result<i32, Fail> {
    let p = load(file)?;
    let c = parse_floats(c, "cost vector")?;
    if c.len() != p.nvars() {
        return Err(parse_fail(format!("cost vector has {} entries, expected {}", c.len(), p.nvars())));
    }
    let (lmi, _) = build_lifting(&p, args)?;
    let opt = optimize_linear(&lmi, &c, &ctx.opts)?;
    match opt.status {
        Status::Optimal => {
            let xs: Vec<String> = opt.x.iter().map(|v| format!("{v:.6}")).collect();
            println!("value {:.9} at x = ({})", opt.value, xs.join(", "));
        }
        Status::Unbounded => {
            println!("unbounded");
            return Ok(EXIT_OK);
        }
        Status::Infeasible => {
            println!("infeasible");
            return Ok(EXIT_INFEASIBLE);
        }
        other => {
            println!("solver stopped with {other:?}");
            return Ok(EXIT_NUMERICAL);
        }
    }
    if let Some(step) = check {
        let bx = sample_box(&p, bounds)?;
        let rows = support_compare(&p.g, &p.domain, &lmi, &[c], &bx, step, &ctx.opts)?;
        let row = &rows[0];
        println!("grid {:.9}, gap {:.2e}", row.grid, row.gap);
        if !(row.gap.abs() <= SUPPORT_TOL) {
            return Ok(EXIT_VERIFY);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_trace(file: &Path, grid: &str, bounds: Option<&str>, ctx: &Ctx) -> Result<i32, Fail> {
    let p = load(file)?;
    let n = p.nvars();
    let counts: Vec<usize> = grid
        .split('x')
        .map(|t| t.trim().parse().map_err(|_| parse_fail(format!("grid {grid:?}"))))
        .collect::<Result<_, _>>()?;
    let counts = if counts.len() == 1 { vec![counts[0]; n] } else { counts };
    let bx = sample_box(&p, bounds)?;
    let pts = boundary_trace(&p.g, &p.domain, &bx, &counts)?;
    eprintln!("{} points", pts.len());
    write_out(ctx, &trace_csv(&pts, n))?;
    Ok(EXIT_OK)
}
