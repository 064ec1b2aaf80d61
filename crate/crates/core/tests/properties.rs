use pmilift::polyalg::rational::{rat, ratio, to_f64};
use pmilift::polyalg::{basis_exponents, binomial, hessian_biform, lex_lead, lex_reduce, Exponent, MatPoly, Poly, Rat};
use proptest::prelude::*;

fn poly(n: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_deg, n), -9i64..=9, 1i64..=4),
        0..=max_terms,
    )
    .prop_map(move |terms| {
        let mut p = Poly::zero(n);
        for (mut e, num, den) in terms {
            // cap total degree
            while e.iter().sum::<u32>() > max_deg {
                let i = e.iter().position(|&v| v > 0).unwrap();
                e[i] -= 1;
            }
            p.add_term(Exponent::new(e), ratio(num, den));
        }
        p
    })
}

fn nonzero_poly(n: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    poly(n, max_deg, max_terms).prop_filter("nonzero divisor", |p| !p.is_zero())
}

fn matpoly(n: usize, m: usize, max_deg: u32) -> impl Strategy<Value = MatPoly> {
    prop::collection::vec(poly(n, max_deg, 3), m * (m + 1) / 2).prop_map(move |upper| {
        let mut rows = vec![vec![Poly::zero(n); m]; m];
        let mut it = upper.into_iter();
        for i in 0..m {
            for j in i..m {
                let p = it.next().unwrap();
                rows[i][j] = p.clone();
                rows[j][i] = p;
            }
        }
        MatPoly::from_entries(&rows).unwrap()
    })
}

fn rats(len: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec((-12i64..=12, 1i64..=4).prop_map(|(a, b)| ratio(a, b)), len)
}

fn setup() -> impl Strategy<Value = (MatPoly, Vec<Rat>, Vec<Rat>)> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(n, m)| (matpoly(n, m, 4), rats(n), rats(m)))
}

/// `ξᵀ G(x) ξ` as a polynomial in `x`.
fn scalar_form(g: &MatPoly, xi: &[Rat]) -> Poly {
    let mut s = Poly::zero(g.nvars());
    for i in 0..g.m() {
        for j in 0..g.m() {
            s = s + g.entry(i, j).scale(&(&xi[i] * &xi[j]));
        }
    }
    s
}

proptest! {
    #[test]
    fn basis_is_graded_and_complete(n in 1usize..=4, d in 0u32..=5) {
        let b = basis_exponents(n, d);
        prop_assert_eq!(b.len() as u64, binomial((n as u64) + u64::from(d), u64::from(d)));
        for w in b.windows(2) {
            let (a, c) = (&w[0], &w[1]);
            let ordered = a.degree() < c.degree()
                || (a.degree() == c.degree() && a.lex_cmp(c) == std::cmp::Ordering::Greater);
            prop_assert!(ordered, "{} before {}", a, c);
        }
    }

    #[test]
    fn lex_reduce_round_trip((f, p) in (1usize..=3).prop_flat_map(|n| (poly(n, 6, 8), nonzero_poly(n, 6, 4)))) {
        let (q, r) = lex_reduce(&f, &p).unwrap();
        prop_assert!((&(&(&q * &p) + &r) - &f).is_zero());
        let lead = lex_lead(&p).unwrap();
        prop_assert!(r.terms().keys().all(|e| !e.dominates(&lead)));
    }

    #[test]
    fn contracted_hessian_matches_symbolic((g, _x, xi) in setup()) {
        let h = hessian_biform(&g).contract(&xi);
        let s = scalar_form(&g, &xi);
        for k in 0..g.nvars() {
            for l in 0..g.nvars() {
                let want = -s.derivative(k).derivative(l);
                prop_assert_eq!(h.entry(k, l), want);
            }
        }
    }

    #[test]
    fn evaluation_is_symmetric((g, x, _xi) in setup()) {
        prop_assert!(g.eval(&x).unwrap().is_symmetric());
    }

    #[test]
    fn finite_differences_match_hessian((g, x, xi) in setup()) {
        let h = ratio(1, 1 << 20);
        let s = scalar_form(&g, &xi);
        let at = |dk: (usize, i64), dl: (usize, i64)| {
            let mut p = x.clone();
            p[dk.0] += &h * rat(dk.1);
            p[dl.0] += &h * rat(dl.1);
            s.eval(&p)
        };
        let hess = hessian_biform(&g);
        let mut pt: Vec<f64> = x.iter().map(to_f64).collect();
        pt.extend(xi.iter().map(to_f64));
        for k in 0..g.nvars() {
            for l in 0..g.nvars() {
                let fd = (at((k, 1), (l, 1)) - at((k, 1), (l, -1)) - at((k, -1), (l, 1)) + at((k, -1), (l, -1)))
                    / (rat(4) * &h * &h);
                let fd = to_f64(&fd);
                let neg_h = -hess.entry(k, l).eval_f64(&pt);
                prop_assert!((fd - neg_h).abs() <= 1e-6 * neg_h.abs().max(1.0), "({k},{l}): {fd} vs {neg_h}");
            }
        }
    }
}
