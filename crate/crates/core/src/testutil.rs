//! Random inputs and comparison helpers for unit tests. Deliberately independent of
//! the public random-state constructors.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qmat::{c64, CMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_7e57)
}

pub fn rng_usize(rng: &mut ChaCha8Rng, n: usize) -> usize {
    rng.random_range(0..n)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| gaussian(rng))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    random_matrix(rng, n, n).hermitian_part()
}

pub fn random_ket(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    v.into_iter().map(|z| z / norm).collect()
}

pub fn random_density_rank(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> CMatrix {
    let g = random_matrix(rng, n, rank);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    m.scale_re(1.0 / tr).hermitian_part()
}

pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    random_density_rank(rng, n, n)
}

#[track_caller]
pub fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64) {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()), "shape mismatch");
    let err = (a - b).max_abs();
    assert!(
        err <= tol,
        "max entry deviation {err:e} > {tol:e}\n{a:?}\n{b:?}"
    );
}
