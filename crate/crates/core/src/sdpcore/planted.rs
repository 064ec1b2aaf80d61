//! Random SDP instances with a known optimal primal-dual pair.
//!
//! A complementary pair `X* = Q diag(x, 0) Qᵀ`, `S* = Q diag(0, s) Qᵀ` is
//! drawn per block; with random `A_k` and `y*`, setting `C = S* + Σ y*_k A_k`
//! and `b_k = <A_k, X*>` makes `(X*, y*, S*)` optimal with value `b·y*`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ConicProgram, LmiBlock, SparseSym};

#[derive(Clone, Debug)]
pub struct Planted {
    pub program: ConicProgram,
    /// Optimal value of the LMI-form program.
    pub optimum: f64,
    pub y: Vec<f64>,
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    m.qr().q()
}

fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    (&m + m.transpose()) * 0.5
}

/// LMI-form instance with `nvars` variables and the given block sizes.
pub fn planted_instance(block_sizes: &[usize], nvars: usize, seed: u64) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<f64> = (0..nvars).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut b = vec![0.0; nvars];
    let mut program = ConicProgram::new(nvars);
    for &n in block_sizes {
        let q = random_orthogonal(n, &mut rng);
        let rank = rng.gen_range(1..=n.max(2) - 1).min(n);
        let mut dx = DMatrix::zeros(n, n);
        let mut ds = DMatrix::zeros(n, n);
        for i in 0..n {
            if i < rank {
                dx[(i, i)] = rng.gen_range(0.5..2.0);
            } else {
                ds[(i, i)] = rng.gen_range(0.5..2.0);
            }
        }
        let xs = &q * dx * q.transpose();
        let mut c = &q * ds * q.transpose();
        let mut block = LmiBlock::new(n);
        for k in 0..nvars {
            let a = random_sym(n, &mut rng);
            c += &a * y[k];
            b[k] += a.dot(&xs);
            // LMI form: F_k = −A_k
            block.coeffs.push((k, SparseSym::from_dense(&(-a))));
        }
        block.constant = SparseSym::from_dense(&c);
        program.blocks.push(block);
    }
    for k in 0..nvars {
        program.objective[k] = -b[k];
    }
    let optimum = -b.iter().zip(&y).map(|(u, v)| u * v).sum::<f64>();
    Planted { program, optimum, y }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdpcore::{kkt_check, solve, Options, Status};

    #[test]
    fn recovers_planted_optimum() {
        for seed in 0..5 {
            let inst = planted_instance(&[4, 3, 1], 6, seed);
            let sol = solve(&inst.program, &Options::default()).unwrap();
            assert_eq!(sol.status, Status::Optimal, "seed {seed}");
            assert!((sol.objective - inst.optimum).abs() < 1e-6, "seed {seed}: {} vs {}", sol.objective, inst.optimum);
            let (p, d, g, m) = kkt_check(&inst.program, &sol);
            assert!(p < 1e-7 && d < 1e-7 && g < 1e-6 && m > -1e-8, "{p} {d} {g} {m}");
        }
    }
}
