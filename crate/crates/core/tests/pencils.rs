mod common;

use common::*;
use pmilift::momlift::{assemble_l, assemble_ln};
use pmilift::polyalg::{Exponent, Poly};
use pmilift::ratlift::assemble_lqmod;

fn labels(v: &[Exponent]) -> Vec<String> {
    v.iter().map(|e| e.label()).collect()
}

#[test]
fn choi_type_lifting() {
    let g = fixture("ex2_3").matpoly().unwrap();
    let l = assemble_l(&g).unwrap();
    assert_eq!(l.pencils, vec![ex2_3_g(), ex2_3_moment()]);
    assert_eq!(l.free_variables().len(), 6);
    assert_eq!(l.summary(), "2 pencils (3×3, 4×4), 6 free lifting variables");
}

#[test]
fn quartic_lifting() {
    let g = fixture("ex2_5").matpoly().unwrap();
    let l = assemble_l(&g).unwrap();
    assert_eq!(l.pencils, vec![ex2_5_g(), ex2_5_moment()]);
    assert_eq!(l.free_variables().len(), 12);
}

#[test]
fn orthant_rational_lifting() {
    let p = fixture("ex4_4");
    let l = assemble_lqmod(&p.g, &p.domain, 2).unwrap();
    assert_eq!(labels(&l.z_index), ["00", "10", "01", "20", "02", "30", "03", "40", "04"]);
    let want = ex4_4_pencils();
    for (k, (got, want)) in l.pencils.iter().zip(&want).enumerate() {
        assert_eq!(got, want, "pencil {k}");
    }
    assert_eq!(l.pencils.len(), 4);
    assert!(l.summary().starts_with("4 pencils (2×2, 6×6, 3×3, 3×3)"));
}

#[test]
fn plane_rational_lifting() {
    let p = fixture("ex4_5");
    let l = assemble_lqmod(&p.g, &p.domain, 2).unwrap();
    assert_eq!(labels(&l.z_index), ["00", "10", "01", "11", "02", "12", "03", "13", "04"]);
    assert_eq!(l.pencils, ex4_5_pencils());
}

#[test]
fn ball_localizer_for_choi_type() {
    let g = fixture("ex2_3").matpoly().unwrap();
    let n = 3;
    let ball = Poly::constant(n, pmilift::polyalg::rational::rat(9))
        - (0..n).map(|i| Poly::var(n, i).pow(2)).fold(Poly::zero(n), |a, b| a + b);
    let l = assemble_ln(&g, &[ball], 1).unwrap();
    assert_eq!(l.pencils.len(), 3);
    assert_eq!(l.pencils[2].size, 1);
    assert_eq!(l.pencils[2].render_entry(0, 0), "9 - y200 - y020 - y002");
}
