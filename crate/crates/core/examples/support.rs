//! Support-function probes: linear minimization over the lifted set versus
//! a polished grid search over the original set.
//!
//! `cargo run --release --example support [directions] [step]`

use std::time::Instant;

use pmilift::harness::{support_compare, unit_directions, SampleBox};
use pmilift::momlift::assemble_l;
use pmilift::problem::Problem;
use pmilift::ratlift::assemble_lqmod;
use pmilift::sdpcore::Options;

fn main() -> Result<(), pmilift::Error> {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let step: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1e-3);
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let opts = Options::default();
    let dirs = unit_directions(2, count, 2024);
    for name in ["ex2_5", "ex4_5"] {
        let p = Problem::from_path(format!("{dir}/{name}.json"))?;
        let lmi = if p.is_polynomial() {
            assemble_l(&p.matpoly()?)?
        } else {
            assemble_lqmod(&p.g, &p.domain, 2)?
        };
        let start = Instant::now();
        let rows = support_compare(&p.g, &p.domain, &lmi, &dirs, &SampleBox::cube(2, -1.5, 1.5), step, &opts)?;
        let worst = rows.iter().map(|r| r.gap.abs()).fold(0.0, f64::max);
        println!("{name}: {} directions, max |gap| {worst:.2e}  [{:.2?}]", rows.len(), start.elapsed());
        println!("  {:>8} {:>8} {:>12} {:>12} {:>10}", "c1", "c2", "lifted", "grid", "gap");
        for r in &rows {
            println!(
                "  {:>8.4} {:>8.4} {:>12.6} {:>12.6} {:>10.2e}",
                r.direction[0], r.direction[1], r.lifted, r.grid, r.gap
            );
        }
    }
    Ok(())
}
