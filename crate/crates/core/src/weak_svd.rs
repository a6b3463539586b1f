//! Simultaneous diagonalization of matrix families in weak SVD.
//!
//! A family `{A_k}` is diagonalized in weak SVD when one pair of unitaries
//! `(U, V)` makes every `U A_k Vᵗ` diagonal, with complex diagonal entries
//! allowed. The classical (strong) version additionally demands those
//! entries be real and nonnegative.

use crate::error::{Error, Result};
use crate::numerics::random::{complex_gaussian, rng_from_seed};
use crate::numerics::{clusters, joint_diag_hermitian, normality_defect, svd, ComplexMatrix, Tolerance, C64};

/// Weight draws before [`diagonalize`] gives up.
pub const MAX_ATTEMPTS: usize = 8;

/// Accepted off-diagonal mass of `U A_k Vᵗ`, relative to `max(1, ‖A_k‖_F)`.
pub const ACCEPT_EPS: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct WeakSvdResult {
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    /// `diagonals[k][j]` is `α_{j,k}`, the `j`-th diagonal entry of `U A_k Vᵗ`.
    pub diagonals: Vec<Vec<C64>>,
}

impl WeakSvdResult {
    /// `n x K` table with entry `(j, k)` equal to `α_{j,k}`.
    pub fn alpha_table(&self) -> ComplexMatrix {
        let n = self.u.rows();
        ComplexMatrix::from_fn(n, self.diagonals.len(), |j, k| self.diagonals[k][j])
    }

    pub fn transform(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &(&self.u * a) * &self.v.transpose()
    }
}

fn family_order(mats: &[ComplexMatrix]) -> Result<usize> {
    let first = mats
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty matrix family".into()))?;
    let n = first.require_square()?;
    for m in mats {
        let k = m.require_square()?;
        if k != n {
            return Err(Error::DimensionMismatch(format!("family mixes orders {n} and {k}")));
        }
    }
    Ok(n)
}

/// Wiegmann's test for classical simultaneous SVD:
/// `A_i A_j† = A_j A_i†` and `A_i† A_j = A_j† A_i` for all pairs.
pub fn check_strong(mats: &[ComplexMatrix], tol: &Tolerance) -> Result<bool> {
    family_order(mats)?;
    let norms: Vec<f64> = mats.iter().map(ComplexMatrix::frobenius_norm).collect();
    let adj: Vec<ComplexMatrix> = mats.iter().map(ComplexMatrix::adjoint).collect();
    for i in 0..mats.len() {
        for j in (i + 1)..mats.len() {
            let scale = norms[i] * norms[j];
            let left = (&(&mats[i] * &adj[j]) - &(&mats[j] * &adj[i])).frobenius_norm();
            let right = (&(&adj[i] * &mats[j]) - &(&adj[j] * &mats[i])).frobenius_norm();
            if !tol.accepts(left, scale) || !tol.accepts(right, scale) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Triple-product criterion `A_j A_k† A_l = A_l A_k† A_j` over all triples.
pub fn check_weak(mats: &[ComplexMatrix], tol: &Tolerance) -> Result<bool> {
    family_order(mats)?;
    let k_len = mats.len();
    let norms: Vec<f64> = mats.iter().map(ComplexMatrix::frobenius_norm).collect();
    // gram[k][l] = A_k† A_l
    let gram: Vec<Vec<ComplexMatrix>> = mats
        .iter()
        .map(|a| {
            let ah = a.adjoint();
            mats.iter().map(|b| &ah * b).collect()
        })
        .collect();
    for k in 0..k_len {
        for j in 0..k_len {
            // (j, k, l) and (l, k, j) are the same identity
            for l in (j + 1)..k_len {
                let lhs = &mats[j] * &gram[k][l];
                let rhs = &mats[l] * &gram[k][j];
                let dev = (&lhs - &rhs).frobenius_norm();
                if !tol.accepts(dev, norms[j] * norms[k] * norms[l]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Largest relative violation of the triple-product identity, each
/// deviation divided by `max(1, ‖A_j‖‖A_k‖‖A_l‖)`. Unlike [`check_weak`]
/// this scans every triple, so it doubles as a reportable residual.
pub fn weak_defect(mats: &[ComplexMatrix]) -> Result<f64> {
    family_order(mats)?;
    let norms: Vec<f64> = mats.iter().map(ComplexMatrix::frobenius_norm).collect();
    let adj: Vec<ComplexMatrix> = mats.iter().map(ComplexMatrix::adjoint).collect();
    let mut worst: f64 = 0.0;
    for k in 0..mats.len() {
        for j in 0..mats.len() {
            let left = &mats[j] * &adj[k];
            for l in (j + 1)..mats.len() {
                let right = &mats[l] * &adj[k];
                let dev = (&(&left * &mats[l]) - &(&right * &mats[j])).frobenius_norm();
                worst = worst.max(dev / (norms[j] * norms[k] * norms[l]).max(1.0));
            }
        }
    }
    Ok(worst)
}

/// Alternative criterion: every `A_k† A_l` is normal and
/// `A_j A_k† A_k A_l† = A_k A_l† A_j A_k†` over all triples.
pub fn check_weak_alt(mats: &[ComplexMatrix], tol: &Tolerance) -> Result<bool> {
    family_order(mats)?;
    let k_len = mats.len();
    let norms: Vec<f64> = mats.iter().map(ComplexMatrix::frobenius_norm).collect();
    let adj: Vec<ComplexMatrix> = mats.iter().map(ComplexMatrix::adjoint).collect();
    for k in 0..k_len {
        for l in 0..k_len {
            let g = &adj[k] * &mats[l];
            let scale = (norms[k] * norms[l]).powi(2);
            if !tol.accepts(normality_defect(&g), scale) {
                return Ok(false);
            }
        }
    }
    // outer[a][b] = A_a A_b†
    let outer: Vec<Vec<ComplexMatrix>> = mats
        .iter()
        .map(|a| adj.iter().map(|bh| a * bh).collect())
        .collect();
    for j in 0..k_len {
        for k in 0..k_len {
            for l in 0..k_len {
                let lhs = &outer[j][k] * &outer[k][l];
                let rhs = &outer[k][l] * &outer[j][k];
                let dev = (&lhs - &rhs).frobenius_norm();
                if !tol.accepts(dev, norms[j] * norms[k] * norms[k] * norms[l]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Largest off-diagonal Frobenius mass of `U A_k Vᵗ` over the family.
pub fn residual(mats: &[ComplexMatrix], result: &WeakSvdResult) -> Result<f64> {
    let n = family_order(mats)?;
    if result.u.rows() != n || result.v.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "result is of order {}, family of order {n}",
            result.u.rows()
        )));
    }
    Ok(mats
        .iter()
        .map(|a| result.transform(a).off_diagonal_norm())
        .fold(0.0, f64::max))
}

fn scaled_residual(mats: &[ComplexMatrix], u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    let vt = v.transpose();
    mats.iter()
        .map(|a| (&(u * a) * &vt).off_diagonal_norm() / a.frobenius_norm().max(1.0))
        .fold(0.0, f64::max)
}

/// Constructs `(U, V)` diagonalizing the whole family.
///
/// A random complex combination `M = Σ w_k A_k` is decomposed by SVD. For
/// generic weights its singular subspaces already split the family; inside
/// a degenerate cluster of `M` the family restricted to the cluster is a
/// commuting normal family, which is resolved by joint diagonalization of
/// its Hermitian and anti-Hermitian parts.
pub fn diagonalize(mats: &[ComplexMatrix], tol: &Tolerance, seed: u64) -> Result<WeakSvdResult> {
    if !check_weak(mats, tol)? {
        return Err(Error::NotSimultaneouslyDiagonalizable);
    }
    let n = family_order(mats)?;
    let mut rng = rng_from_seed(seed);
    let mut best = f64::INFINITY;
    for _ in 0..MAX_ATTEMPTS {
        let weights: Vec<C64> = mats.iter().map(|_| complex_gaussian(&mut rng)).collect();
        let mut m = ComplexMatrix::zeros(n, n);
        for (w, a) in weights.iter().zip(mats) {
            m = &m + &a.scale(*w);
        }
        let d = svd(&m, tol)?;
        let (mut u, mut v) = (d.u, d.v);
        if scaled_residual(mats, &u, &v) > ACCEPT_EPS {
            let s_max = d.s.first().copied().unwrap_or(0.0);
            // clusters() expects ascending order
            let ascending: Vec<f64> = d.s.iter().rev().copied().collect();
            for run in clusters(&ascending, crate::numerics::CLUSTER_EPS * s_max.max(1.0)) {
                if run.len() < 2 {
                    continue;
                }
                let idx: Vec<usize> = run.iter().map(|&i| n - 1 - i).collect();
                if d.s[idx[0]] <= 1e-12 * s_max.max(1.0) {
                    continue;
                }
                if refine_cluster(mats, &mut u, &mut v, &idx).is_err() {
                    break;
                }
            }
        }
        let r = scaled_residual(mats, &u, &v);
        if r <= ACCEPT_EPS {
            let vt = v.transpose();
            let diagonals = mats.iter().map(|a| (&(&u * a) * &vt).diagonal()).collect();
            return Ok(WeakSvdResult { u, v, diagonals });
        }
        best = best.min(r);
    }
    Err(Error::ConstructionFailure { attempts: MAX_ATTEMPTS, residual: best })
}

/// Rotates rows `idx` of `u` and `v` so every block `U_b A_k V_bᵗ` becomes diagonal.
fn refine_cluster(
    mats: &[ComplexMatrix],
    u: &mut ComplexMatrix,
    v: &mut ComplexMatrix,
    idx: &[usize],
) -> Result<()> {
    let c = idx.len();
    let n = u.cols();
    let ub = ComplexMatrix::from_fn(c, n, |i, j| u[(idx[i], j)]);
    let vb = ComplexMatrix::from_fn(c, n, |i, j| v[(idx[i], j)]);
    let vbt = vb.transpose();
    let half_i = C64::new(0.0, -0.5);
    let mut family = Vec::with_capacity(2 * mats.len());
    for a in mats {
        let b = &(&ub * a) * &vbt;
        let bh = b.adjoint();
        family.push((&b + &bh).scale_real(0.5));
        family.push((&b - &bh).scale(half_i));
    }
    let q = joint_diag_hermitian(&family, &Tolerance::new(1e-6)?)?;
    let ub = &q.adjoint() * &ub;
    let vb = &q.transpose() * &vb;
    for (i, &row) in idx.iter().enumerate() {
        for j in 0..n {
            u[(row, j)] = ub[(i, j)];
            v[(row, j)] = vb[(i, j)];
        }
    }
    Ok(())
}
