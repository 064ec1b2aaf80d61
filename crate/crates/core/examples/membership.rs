//! Sampled direct-versus-lifted membership on the bundled examples, plus
//! the relaxation slack of a non-concave description.
//!
//! `cargo run --release --example membership [samples] [seed]`

use std::time::Instant;

use pmilift::harness::{compare_membership, Mode, SampleBox};
use pmilift::momlift::{assemble_l, assemble_ln};
use pmilift::problem::Problem;
use pmilift::ratlift::assemble_lqmod;
use pmilift::sdpcore::Options;

fn main() -> Result<(), pmilift::Error> {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let opts = Options::default();
    let cases = [
        ("ex2_3", -2.0, 2.0),
        ("ex2_5", -1.5, 1.5),
        ("ex4_4", 0.0, 20.0),
        ("ex4_5", -1.5, 1.5),
        ("q_conclusion", 0.0, 3.0),
    ];
    for (name, lo, hi) in cases {
        let p = Problem::from_path(format!("{dir}/{name}.json"))?;
        let (lmi, mode) = match name {
            "ex4_4" | "ex4_5" => (assemble_lqmod(&p.g, &p.domain, 2)?, Mode::Exact),
            "q_conclusion" => (assemble_ln(&p.matpoly()?, &p.domain, 1)?, Mode::Relaxation),
            _ => (assemble_l(&p.matpoly()?)?, Mode::Exact),
        };
        let bx = SampleBox::cube(p.nvars(), lo, hi);
        let start = Instant::now();
        let r = compare_membership(&p.g, &p.domain, &lmi, &bx, count, seed, mode, &opts)?;
        println!("{name:<13} {}  [{:.2?}]", r.summary(), start.elapsed());
        for d in r.disagreements.iter().take(3) {
            println!("    {:?} at {:?}: direct {} lifted {:?}", d.kind, d.record.x, d.record.direct, d.record.lifted);
        }
        for s in r.soundness_violations.iter().take(3) {
            println!("    soundness: {:?} direct {} lifted {:?}", s.x, s.direct, s.lifted);
        }
    }
    Ok(())
}
