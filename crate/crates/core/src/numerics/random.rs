//! Seeded random matrices for generators, tests and the CLI.
//!
//! Every stream comes from ChaCha8 seeded through `seed_from_u64`, which is
//! platform independent, so a seed always reproduces the same numbers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{inner, norm, ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian with `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn unit_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..len).map(|_| complex_gaussian(rng)).collect();
    let nv = norm(&v);
    v.into_iter().map(|z| z / nv).collect()
}

/// Orthonormalizes columns by modified Gram-Schmidt with a second pass.
fn orthonormalize_columns(m: &mut ComplexMatrix) {
    let mut done: Vec<Vec<C64>> = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let mut v = m.column(j);
        for _ in 0..2 {
            for u in &done {
                let c = inner(u, &v);
                for (x, &y) in v.iter_mut().zip(u) {
                    *x -= c * y;
                }
            }
        }
        let nv = norm(&v);
        for x in v.iter_mut() {
            *x /= nv;
        }
        m.set_column(j, &v);
        done.push(v);
    }
}

/// Haar-distributed unitary (Gram-Schmidt of a Ginibre matrix).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut g = ginibre(n, n, rng);
    orthonormalize_columns(&mut g);
    g
}

/// `rows x cols` matrix with orthonormal columns, `rows >= cols`.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let mut g = ginibre(rows, cols, rng);
    orthonormalize_columns(&mut g);
    g
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, n, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

pub fn random_diagonal_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let d: Vec<C64> = (0..n).map(|_| unit_phase(rng)).collect();
    ComplexMatrix::from_diag(&d)
}

/// Uniform random permutation `pi`; the matrix form has `P[(i, pi[i])] = 1`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn permutation_matrix(pi: &[usize]) -> ComplexMatrix {
    let n = pi.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, &j) in pi.iter().enumerate() {
        m[(i, j)] = C64::new(1.0, 0.0);
    }
    m
}

/// Random positive semidefinite matrix of the given rank with unit trace.
pub fn random_density_of_rank<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, rank, rng);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    let mut out = m.scale_real(1.0 / tr);
    for i in 0..n {
        out[(i, i)].im = 0.0;
    }
    out
}

/// Random probability vector with entries bounded away from zero.
pub fn random_probabilities<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

pub fn random_real_diagonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    ComplexMatrix::from_real_diag(&d)
}

pub fn random_complex_diagonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let d: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::from_diag(&d)
}

/// `Q1 diag(s) Q2` for Haar `Q1`, `Q2`; its singular values are exactly `s`.
pub fn with_singular_values<R: Rng + ?Sized>(s: &[f64], rng: &mut R) -> ComplexMatrix {
    let n = s.len();
    let q1 = random_unitary(n, rng);
    let q2 = random_unitary(n, rng);
    &(&q1 * &ComplexMatrix::from_real_diag(s)) * &q2
}
