//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use super::matrix::{ComplexMatrix, C64, ZERO};
use super::tolerance::Tolerance;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order and the unitary whose columns are the
/// matching eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigh {
    /// `Q diag(values) Q†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_real_diag(&self.values);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }
}

pub fn eigh(h: &ComplexMatrix, tol: &Tolerance) -> Result<Eigh> {
    let n = h.require_square()?;
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let deviation = h.hermitian_deviation();
    if !tol.accepts(deviation, h.frobenius_norm()) {
        return Err(Error::NotHermitian { deviation });
    }
    let mut a = (h + &h.adjoint()).scale_real(0.5);
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut q = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        let mut converged = false;
        let mut last_off = f64::INFINITY;
        for _ in 0..MAX_SWEEPS {
            let off = a.off_diagonal_norm();
            if off <= f64::EPSILON * scale || (off >= last_off && off <= 1e-13 * scale) {
                converged = true;
                break;
            }
            last_off = off;
            for p in 0..n {
                for r in (p + 1)..n {
                    rotate(&mut a, &mut q, p, r, scale);
                }
            }
        }
        if !converged && a.off_diagonal_norm() > 1e-13 * scale {
            return Err(Error::ConvergenceFailure("eigh"));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = q.select_columns(&order);
    Ok(Eigh { values, vectors })
}

/// One Jacobi rotation annihilating `a[(p, r)]`, accumulated into `q`.
fn rotate(a: &mut ComplexMatrix, q: &mut ComplexMatrix, p: usize, r: usize, scale: f64) {
    let apr = a[(p, r)];
    let g = apr.norm();
    if g <= 1e-20 * scale {
        return;
    }
    let n = a.rows();
    let phase = apr / g;
    let app = a[(p, p)].re;
    let arr = a[(r, r)].re;
    let theta = (arr - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
    let g_pp = C64::new(c, 0.0);
    let g_pr = C64::new(s, 0.0);
    let g_rp = -phase.conj() * s;
    let g_rr = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akr = a[(k, r)];
        a[(k, p)] = akp * g_pp + akr * g_rp;
        a[(k, r)] = akp * g_pr + akr * g_rr;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let ark = a[(r, k)];
        a[(p, k)] = g_pp.conj() * apk + g_rp.conj() * ark;
        a[(r, k)] = g_pr.conj() * apk + g_rr.conj() * ark;
    }
    a[(p, r)] = ZERO;
    a[(r, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(r, r)].im = 0.0;

    for k in 0..n {
        let qkp = q[(k, p)];
        let qkr = q[(k, r)];
        q[(k, p)] = qkp * g_pp + qkr * g_rp;
        q[(k, r)] = qkp * g_pr + qkr * g_rr;
    }
}
