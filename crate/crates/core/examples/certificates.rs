//! Certificate searches on the bundled fixtures.
//!
//! `cargo run --release --example certificates [fixture-dir]`

use std::time::Instant;

use pmilift::certify::{qmod_certificate_search, uniform_sos_concavity};
use pmilift::problem::Problem;
use pmilift::sdpcore::Options;

fn main() -> Result<(), pmilift::Error> {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures").to_string());
    let load = |name: &str| Problem::from_path(format!("{dir}/{name}.json"));
    let opts = Options::default();
    for name in ["ex2_3", "ex2_5", "q_conclusion"] {
        let p = load(name)?;
        let t = Instant::now();
        let c = uniform_sos_concavity(&p.matpoly()?, &opts)?;
        println!("{name:<14} {}  [{:.2?}]", c.status_line(), t.elapsed());
    }
    for (name, t) in [("ex4_4", 2), ("ex4_5", 2), ("ex4_5", 3)] {
        let p = load(name)?;
        let start = Instant::now();
        let c = qmod_certificate_search(&p.g, &p.domain, t, &opts)?;
        let sizes: Vec<usize> = c.blocks.iter().map(|b| b.basis.len()).filter(|&k| k > 0).collect();
        println!(
            "{name:<14} t = {t}: {}  blocks {sizes:?}, {} iterations [{:.2?}]",
            c.status_line(),
            c.iterations,
            start.elapsed()
        );
    }
    Ok(())
}
