//! Lifted LMIs of polynomial matrix inequalities: the plain moment lifting
//! `L` and the localized relaxation `L_N` on a domain.
//!
//! `cargo run --example lift [order]`

use pmilift::momlift::{assemble_l, assemble_ln, LiftedLMI};
use pmilift::polyalg::rational::rat;
use pmilift::polyalg::{MatPoly, Poly};
use pmilift::problem::Problem;

fn main() -> Result<(), pmilift::Error> {
    let order: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

    let g = Problem::from_path(format!("{dir}/ex2_3.json"))?.matpoly()?;
    let l = assemble_l(&g)?;
    println!("{l}");

    // same G restricted to the ball ‖x‖² ≤ 9
    let n = g.nvars();
    let ball = (0..n).fold(Poly::constant(n, rat(9)), |acc, i| acc - Poly::var(n, i).pow(2));
    let ln = assemble_ln(&g, &[ball], order.max(1))?;
    println!("ex2_3 on the ball, order {}: {}", order.max(1), ln.summary());
    let last = ln.pencils.last().unwrap();
    println!("localizer (0,0): {}\n", last.render_entry(0, 0));

    // a disc 1 − x1² − x2² ⪰ 0 written as a 1×1 matrix
    let x = |i| Poly::var(2, i);
    let disc = MatPoly::from_entries(&[vec![Poly::one(2) - &x(0) * &x(0) - &x(1) * &x(1)]])?;
    let l = assemble_l(&disc)?;
    println!("{l}");
    let json = l.to_json();
    println!("serialized: {} bytes, round trip {}", json.len(), LiftedLMI::from_json(&json)? == l);
    Ok(())
}
