#![allow(dead_code)]

use std::path::PathBuf;

use pmilift::certify::{qmod_lhs, IdentityTerm, Sigma};
use pmilift::momlift::LinearPencil;
use pmilift::polyalg::Poly;
use pmilift::problem::Problem;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> Problem {
    Problem::from_path(fixture_path(name)).expect("fixture parses")
}

pub fn expected(name: &str) -> serde_json::Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.expected.json"));
    serde_json::from_str(&std::fs::read_to_string(path).expect("sidecar exists")).expect("sidecar parses")
}

fn pencil(rows: &[&[&str]], n: usize) -> LinearPencil {
    LinearPencil::from_printed(rows, n).expect("printed pencil parses")
}

pub fn ex2_3_g() -> LinearPencil {
    pencil(
        &[
            &["2-y200-2y002", "1+y110", "y101"],
            &["1+y110", "2-y020-2y200", "1+y011"],
            &["y101", "1+y011", "2-y002-2y020"],
        ],
        3,
    )
}

pub fn ex2_3_moment() -> LinearPencil {
    pencil(
        &[
            &["1", "x1", "x2", "x3"],
            &["x1", "y200", "y110", "y101"],
            &["x2", "y110", "y020", "y011"],
            &["x3", "y101", "y011", "y002"],
        ],
        3,
    )
}

pub fn ex2_5_g() -> LinearPencil {
    pencil(
        &[
            &["2-2y40-4y22-2y04", "3-y31-y13"],
            &["3-y31-y13", "5-y40-3y22-y04"],
        ],
        2,
    )
}

pub fn ex2_5_moment() -> LinearPencil {
    pencil(
        &[
            &["1", "x1", "x2", "y20", "y11", "y02"],
            &["x1", "y20", "y11", "y30", "y21", "y12"],
            &["x2", "y11", "y02", "y21", "y12", "y03"],
            &["y20", "y30", "y21", "y40", "y31", "y22"],
            &["y11", "y21", "y12", "y31", "y22", "y13"],
            &["y02", "y12", "y03", "y22", "y13", "y04"],
        ],
        2,
    )
}

pub fn ex4_4_pencils() -> Vec<LinearPencil> {
    vec![
        pencil(
            &[&["7-x1+2x2-z10-z03", "5-z02"], &["5-z02", "11-x2-z01"]],
            2,
        ),
        pencil(
            &[
                &["z00", "z10", "z01", "z20", "1", "z02"],
                &["z10", "z20", "1", "z30", "x1", "x2"],
                &["z01", "1", "z02", "x1", "x2", "z03"],
                &["z20", "z30", "x1", "z40", "y20", "y11"],
                &["1", "x1", "x2", "y20", "y11", "y02"],
                &["z02", "x2", "z03", "y11", "y02", "z04"],
            ],
            2,
        ),
        pencil(
            &[&["z10", "z20", "1"], &["z20", "z30", "x1"], &["1", "x1", "x2"]],
            2,
        ),
        pencil(
            &[&["z01", "1", "z02"], &["1", "x1", "x2"], &["z02", "x2", "z03"]],
            2,
        ),
    ]
}

pub fn ex4_5_pencils() -> Vec<LinearPencil> {
    vec![
        pencil(
            &[
                &["1-2y20-2y11-y02-z04", "y20+z04"],
                &["y20+z04", "1-y20-z04"],
            ],
            2,
        ),
        pencil(
            &[
                &["z00", "z10", "z01", "1-z02", "z11", "z02"],
                &["z10", "1-z02", "z11", "x1-z12", "x2-z03", "z12"],
                &["z01", "z11", "z02", "x2-z03", "z12", "z03"],
                &["1-z02", "x1-z12", "x2-z03", "y20-y02+z04", "y11-z13", "y02-z04"],
                &["z11", "x2-z03", "z12", "y11-z13", "y02-z04", "z13"],
                &["z02", "z12", "z03", "y02-z04", "z13", "z04"],
            ],
            2,
        ),
    ]
}

pub fn ex4_4_terms() -> (Poly, Vec<IdentityTerm>) {
    let p = fixture("ex4_4");
    let lhs = qmod_lhs(&p.g).unwrap();
    let v = |i| Poly::var(6, i);
    let (x1, x2, u1, u2, k1, k2) = (v(0), v(1), v(2), v(3), v(4), v(5));
    let one = Poly::one(6);
    let inner = &(&u1 * &k2) - &(&x1 * &k2) + &(&(&u1 * &x2) * &k1) - &(&(&u2 * &x1) * &k1);
    let terms = vec![
        IdentityTerm { gx: x2.clone(), gu: one.clone(), sigma: Sigma::Squares(vec![(pmilift::polyalg::rational::rat(1), &u2 * &inner)]) },
        IdentityTerm { gx: x1.clone(), gu: one, sigma: Sigma::Squares(vec![(pmilift::polyalg::rational::rat(1), &(&u1 * &k1) * &(&u2 - &x2))]) },
    ];
    (lhs, terms)
}

pub fn ex4_5_terms(corrected: bool) -> (Poly, Vec<IdentityTerm>) {
    use pmilift::polyalg::rational::{rat, ratio};
    let p = fixture("ex4_5");
    let lhs = qmod_lhs(&p.g).unwrap();
    let v = |i| Poly::var(6, i);
    let (x1, x2, u1, u2, k1, k2) = (v(0), v(1), v(2), v(3), v(4), v(5));
    let m = |ps: &[&Poly]| ps.iter().fold(Poly::one(6), |a, b| &a * *b);
    let f = [
        m(&[&u1, &u2, &x2, &x2]).scale(&rat(-1)) - m(&[&u1, &u2, &x1, &x1]) + m(&[&u1, &u2, &u2, &x2]) + m(&[&u1, &u1, &u2, &x1]),
        m(&[&u1, &u2, &x2, &x2]).scale(&rat(-1)) + m(&[&u1, &u2, &x1, &x1]) + m(&[&u1, &u2, &u2, &x2]) - m(&[&u1, &u1, &u2, &x1]),
        m(&[&u2, &u2, &x1, &x2]).scale(&rat(-1)) + m(&[&u2, &u2, &u2, &x1]) - m(&[&u1, &u1, &x1, &x2]) + m(&[&u1, &u1, &u1, &x2]),
        m(&[&u2, &u2, &x1, &x2]) - m(&[&u2, &u2, &u2, &x1]) - m(&[&u1, &u1, &x1, &x2]) + m(&[&u1, &u1, &u1, &x2]),
        m(&[&u2, &u2, &x2, &x2]) - m(&[&u2, &u2, &u2, &x2]) - m(&[&u1, &u1, &x1, &x1]) + m(&[&u1, &u1, &u1, &x1]),
        m(&[&u2, &u2, &x2, &x2]).scale(&rat(-1)) + m(&[&u2, &u2, &u2, &x2]) - m(&[&u1, &u1, &x1, &x1]) + m(&[&u1, &u1, &u1, &x1]),
        m(&[&u1, &u2, &x1, &x2]).scale(&rat(-2)) + m(&[&u1, &u2, &u2, &x1]) + m(&[&u1, &u1, &u2, &x2]),
        m(&[&u2, &u2, &x1, &x1]) - m(&[&u1, &u1, &x2, &x2]),
        m(&[&u1, &u2, &u2, &x1]).scale(&rat(-1)) + m(&[&u1, &u1, &u2, &x2]),
    ];
    // f3..f6 carry a factor 1/√2
    let squares = f
        .iter()
        .enumerate()
        .map(|(i, fi)| (if (2..6).contains(&i) { ratio(1, 2) } else { rat(1) }, fi * &(&k1 - &k2)))
        .collect();
    let nx = &(&x1 * &x1) + &(&x2 * &x2);
    let nu = &(&u1 * &u1) + &(&u2 * &u2);
    let tail = if corrected {
        Sigma::Squares(vec![(rat(1), &(&(&x1 + &x2) - &(&u1 + &u2)) * &k1)])
    } else {
        let (a, b) = (&x1 - &u1, &x2 - &u2);
        Sigma::Squares(vec![(ratio(1, 2), &a * &k1), (ratio(1, 2), &b * &k1)])
    };
    let terms = vec![
        IdentityTerm { gx: Poly::one(6), gu: Poly::one(6), sigma: Sigma::Squares(squares) },
        IdentityTerm { gx: nx, gu: &nu * &nu, sigma: tail },
    ];
    (lhs, terms)
}

pub fn ex2_5_parts() -> Vec<Vec<Vec<Poly>>> {
    use pmilift::polyalg::rational::rat;
    let v = |i| Poly::var(4, i);
    let (x1, x2, k1, k2) = (v(0), v(1), v(2), v(3));
    let outer = |cols: &[Vec<Poly>], w: i64| -> Vec<Vec<Poly>> {
        (0..2)
            .map(|r| {
                (0..2)
                    .map(|c| cols.iter().fold(Poly::zero(4), |a, col| a + &col[r] * &col[c]).scale(&rat(w)))
                    .collect()
            })
            .collect()
    };
    let h1 = outer(
        &[vec![&(&k1 * &x1).scale(&rat(2)) + &(&k2 * &x2), &(&k1 * &x2).scale(&rat(2)) + &(&k2 * &x1)]],
        2,
    );
    let s = &(&k1 * &k1) + &(&k2 * &k2);
    let h2 = outer(&[vec![x1.clone(), x2.clone()]], 8)
        .into_iter()
        .map(|row| row.into_iter().map(|e| &e * &s).collect())
        .collect();
    let h3 = outer(
        &[
            vec![&k1 * &x1, &k2 * &x1],
            vec![&k2 * &x2, &k1 * &x2],
            vec![&k2 * &x1, &k2 * &x2],
        ],
        2,
    );
    let xi_x = &(&k1 * &x1) + &(&k2 * &x2);
    let common = &(&xi_x * &xi_x) + &(&(&k2 * &k2) * &(&x1 * &x1));
    let sq1 = &k1 * &k1;
    let d1 = &(&x1 * &x1).scale(&rat(2)) + &(&x2 * &x2).scale(&rat(4));
    let d2 = (&(&x1 * &x1) + &(&x2 * &x2)).scale(&rat(3));
    let h4 = vec![
        vec![(&common + &(&sq1 * &d1)).scale(&rat(2)), Poly::zero(4)],
        vec![Poly::zero(4), (&common + &(&sq1 * &d2)).scale(&rat(2))],
    ];
    vec![h1, h2, h3, h4]
}

pub fn biform_rows(g: &pmilift::polyalg::MatPoly) -> Vec<Vec<Poly>> {
    let h = pmilift::polyalg::hessian_biform(g);
    (0..2).map(|k| (0..2).map(|l| h.entry(k, l).clone()).collect()).collect()
}
