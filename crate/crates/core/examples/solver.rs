//! Solves randomly generated SDPs with a planted optimum and reports
//! accuracy and timing.
//!
//! ```text
//! cargo run --release --example solver -- [instances] [seed]
//! ```

use std::time::Instant;

use pmilift::sdpcore::planted::planted_instance;
use pmilift::sdpcore::{kkt_check, solve, Options};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let count: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    println!("{:>4} {:>16} {:>6} {:>10} {:>9} {:>9} {:>9} {:>8}", "#", "blocks", "vars", "err", "pinf", "stat", "gap", "ms");
    for k in 0..count {
        let nb = rng.gen_range(1..=4);
        let blocks: Vec<usize> = (0..nb).map(|_| rng.gen_range(1..=20)).collect();
        let nvars = rng.gen_range(1..=100);
        let inst = planted_instance(&blocks, nvars, rng.gen());
        let t0 = Instant::now();
        let sol = solve(&inst.program, &Options::default()).expect("well-formed program");
        let ms = t0.elapsed().as_secs_f64() * 1e3;
        let (p, d, g, _) = kkt_check(&inst.program, &sol);
        println!(
            "{k:>4} {:>16} {nvars:>6} {:>10.2e} {p:>9.1e} {d:>9.1e} {g:>9.1e} {ms:>8.1}  {:?} it={}",
            format!("{blocks:?}"),
            (sol.objective - inst.optimum).abs(),
            sol.status,
            sol.iterations
        );
    }
}
