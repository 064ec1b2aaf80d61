//! Grid classification of a set and bisection onto its boundary; writes a
//! CSV point cloud.
//!
//! `cargo run --release --example trace [fixture] [grid] [out.csv]`

use pmilift::harness::{boundary_trace, trace_csv, SampleBox, TraceClass};
use pmilift::problem::Problem;

fn main() -> Result<(), pmilift::Error> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "ex4_5".into());
    let grid: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let out = args.next();
    let p = Problem::from_path(format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR")))?;
    let range = p.metadata.get("box").and_then(|v| v.as_str()).unwrap_or("-2:2").to_string();
    let bx = SampleBox::parse(&range, p.nvars())?;

    let pts = boundary_trace(&p.g, &p.domain, &bx, &vec![grid; p.nvars()])?;
    let boundary = pts.iter().filter(|q| q.class == TraceClass::Boundary).count();
    println!("{name} on {range}: {} interior, {boundary} boundary points", pts.len() - boundary);
    let csv = trace_csv(&pts, p.nvars());
    match out {
        Some(path) => std::fs::write(&path, csv)?,
        None => print!("{}", csv.lines().take(6).map(|l| format!("{l}\n")).collect::<String>()),
    }
    Ok(())
}
