//! Singular value decomposition in the `U A Vᵗ = diag(s)` convention.
//!
//! Computed by one-sided (Hestenes) Jacobi: columns of `A W` are rotated
//! pairwise until mutually orthogonal, which is the same Jacobi kernel as
//! [`eigh`](super::eigh) applied implicitly to `A†A`. The left vectors are
//! the normalized columns, so degenerate clusters need no separate
//! alignment pass and the diagonal comes out real and nonnegative.

use super::matrix::{inner, norm, ComplexMatrix, C64, ZERO};
use super::tolerance::Tolerance;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;
const ORTHO_EPS: f64 = 1e-15;

#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    /// Singular values, descending.
    pub s: Vec<f64>,
}

impl Svd {
    /// `U A Vᵗ`, which should be `diag(s)`.
    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &(&self.u * a) * &self.v.transpose()
    }

    /// Off-diagonal mass of `U A Vᵗ` plus the deviation of its diagonal from `s`.
    pub fn residual(&self, a: &ComplexMatrix) -> f64 {
        let d = self.apply(a);
        let diag_err: f64 = d
            .diagonal()
            .iter()
            .zip(&self.s)
            .map(|(z, &s)| (z - C64::new(s, 0.0)).norm_sqr())
            .sum();
        (d.off_diagonal_norm().powi(2) + diag_err).sqrt()
    }
}

pub fn svd(a: &ComplexMatrix, _tol: &Tolerance) -> Result<Svd> {
    let n = a.require_square()?;
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut b = a.clone();
    let mut w = ComplexMatrix::identity(n);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut worst: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                worst = worst.max(orthogonalize_pair(&mut b, &mut w, p, q));
            }
        }
        if worst <= ORTHO_EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        let worst = max_column_cosine(&b);
        if worst > 1e-12 {
            return Err(Error::ConvergenceFailure("svd"));
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| norm(&b.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut left: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        let nj = norms[j];
        s.push(nj);
        if nj > f64::MIN_POSITIVE {
            left.push(b.column(j).into_iter().map(|z| z / nj).collect());
        } else {
            left.push(vec![ZERO; n]);
            missing.push(slot);
        }
    }
    complete_basis(&mut left, &missing);

    let x = ComplexMatrix::from_columns(&left);
    let w_sorted = w.select_columns(&order);
    Ok(Svd { u: x.adjoint(), v: w_sorted.transpose(), s })
}

/// Rotates columns `p`, `q` of `b` (and `w`) to be orthogonal. Returns the
/// cosine between them before the rotation.
fn orthogonalize_pair(b: &mut ComplexMatrix, w: &mut ComplexMatrix, p: usize, q: usize) -> f64 {
    let n = b.rows();
    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
    for k in 0..n {
        let bp = b[(k, p)];
        let bq = b[(k, q)];
        alpha += bp.norm_sqr();
        beta += bq.norm_sqr();
        gamma += bp.conj() * bq;
    }
    let denom = (alpha * beta).sqrt();
    if denom < f64::MIN_POSITIVE {
        return 0.0;
    }
    let g = gamma.norm();
    let cosine = g / denom;
    if cosine <= ORTHO_EPS {
        return cosine;
    }
    let phase = gamma / g;
    let theta = (beta - alpha) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;
    for m in [&mut *b, &mut *w] {
        for k in 0..n {
            let xp = m[(k, p)];
            let xq = m[(k, q)];
            m[(k, p)] = xp * g_pp + xq * g_qp;
            m[(k, q)] = xp * g_pq + xq * g_qq;
        }
    }
    cosine
}

fn max_column_cosine(b: &ComplexMatrix) -> f64 {
    let n = b.cols();
    let cols: Vec<Vec<C64>> = (0..n).map(|j| b.column(j)).collect();
    let mut worst: f64 = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            let d = norm(&cols[p]) * norm(&cols[q]);
            if d > f64::MIN_POSITIVE {
                worst = worst.max(inner(&cols[p], &cols[q]).norm() / d);
            }
        }
    }
    worst
}

/// Fills the `missing` slots of `vectors` with unit vectors orthogonal to
/// every other slot, drawn from the Gram-Schmidt residuals of the standard basis.
pub(crate) fn complete_basis(vectors: &mut [Vec<C64>], missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let n = vectors.len();
    let mut filled: Vec<bool> = vec![true; n];
    for &m in missing {
        filled[m] = false;
    }
    for &slot in missing {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for e in 0..n {
            let mut v = vec![ZERO; n];
            v[e] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for (k, u) in vectors.iter().enumerate() {
                    if filled[k] {
                        let c = inner(u, &v);
                        for (x, &y) in v.iter_mut().zip(u) {
                            *x -= c * y;
                        }
                    }
                }
            }
            let nv = norm(&v);
            if best.as_ref().is_none_or(|(b, _)| nv > *b) {
                best = Some((nv, v));
            }
        }
        let (nv, v) = best.expect("n > 0");
        vectors[slot] = v.into_iter().map(|z| z / nv).collect();
        filled[slot] = true;
    }
}
