mod common;

use common::*;
use pmilift::certify::{qmod_certificate_search, uniform_sos_concavity, CertStatus};
use pmilift::polyalg::Poly;
use pmilift::sdpcore::Options;

fn run(name: &str) -> pmilift::certify::Certificate {
    let p = fixture(name);
    uniform_sos_concavity(&p.matpoly().unwrap(), &Options::default()).unwrap()
}

#[test]
fn uniform_outcomes() {
    let c = run("ex2_5");
    println!("{}", c.status_line());
    assert!(c.is_feasible());
    assert!(c.residual <= 1e-6);
    assert_eq!(run("ex2_3").status, CertStatus::Infeasible);
    assert_eq!(run("q_conclusion").status, CertStatus::Infeasible);
}

#[test]
fn qmod_outcomes() {
    let p = fixture("ex4_4");
    let c = qmod_certificate_search(&p.g, &p.domain, 2, &Options::default()).unwrap();
    println!("{}", c.status_line());
    assert!(c.is_feasible());
    assert_eq!(c.d, Some(2));

    let p = fixture("ex4_5");
    let c = qmod_certificate_search(&p.g, &p.domain, 3, &Options::default()).unwrap();
    println!("{}", c.status_line());
    assert!(c.is_feasible());
    assert_eq!(c.d, Some(2));
    let c = qmod_certificate_search(&p.g, &p.domain, 2, &Options::default()).unwrap();
    assert_eq!(c.status, CertStatus::InfeasibleByDegree);
}

#[test]
fn orthant_identity_closes() {
    let (lhs, terms) = ex4_4_terms();
    assert!(pmilift::certify::verify_identity(&lhs, &terms).is_zero());
}

#[test]
fn plane_identity_closes_with_corrected_tail() {
    let (lhs, terms) = ex4_5_terms(true);
    assert!(pmilift::certify::verify_identity(&lhs, &terms).is_zero());
    let (lhs, terms) = ex4_5_terms(false);
    assert!(!pmilift::certify::verify_identity(&lhs, &terms).is_zero());
}

#[test]
fn quartic_hessian_decomposition() {
    let g = fixture("ex2_5").matpoly().unwrap();
    let rest = pmilift::certify::verify_matrix_identity(&biform_rows(&g), &ex2_5_parts());
    assert!(rest.iter().flatten().all(|p| p.is_zero()));

    // coefficient 4 on x1²x2² in G22 leaves a residual
    let mut entries = g.entries();
    let x = |i| Poly::var(2, i);
    entries[1][1] = &entries[1][1] - &(&(&x(0) * &x(0)) * &(&x(1) * &x(1)));
    let four = pmilift::polyalg::MatPoly::from_entries(&entries).unwrap();
    let rest = pmilift::certify::verify_matrix_identity(&biform_rows(&four), &ex2_5_parts());
    assert!(!rest[1][1].is_zero());
}
