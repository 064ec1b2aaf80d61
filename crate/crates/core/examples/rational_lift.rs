//! Quadratic-module lifting of a rational matrix inequality `G = N/p`:
//! the `z` index set, the decomposition of `G` into polynomial and
//! `x^β/p` parts, and a certificate search choosing the half degree.
//!
//! `cargo run --release --example rational_lift [fixture] [t]`

use pmilift::certify::qmod_certificate_search;
use pmilift::problem::Problem;
use pmilift::ratlift::{assemble_lqmod, qmod_indices};
use pmilift::sdpcore::Options;

fn main() -> Result<(), pmilift::Error> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "ex4_4".into());
    let t: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let p = Problem::from_path(format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR")))?;

    let cert = qmod_certificate_search(&p.g, &p.domain, t, &Options::default())?;
    println!("{}", cert.status_line());
    let d = cert.d.unwrap_or(2);

    let (y, z) = qmod_indices(&p.g.denominator, d)?;
    let labels = |v: &[pmilift::polyalg::Exponent]| v.iter().map(|e| e.label()).collect::<Vec<_>>().join(" ");
    println!("d = {d}\ny: {}\nz: {}", labels(&y), labels(&z));

    let l = assemble_lqmod(&p.g, &p.domain, d)?;
    println!("{l}");
    Ok(())
}
