use super::matrix::ComplexMatrix;
use super::tolerance::Tolerance;
use crate::error::Result;

/// `M†M = I` within tolerance.
pub fn is_unitary(m: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    let n = m.require_square()?;
    let dev = (&(&m.adjoint() * m) - &ComplexMatrix::identity(n)).frobenius_norm();
    Ok(tol.accepts(dev, m.frobenius_norm()))
}

pub fn is_diagonal(m: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    m.require_square()?;
    Ok(tol.accepts(m.off_diagonal_norm(), m.frobenius_norm()))
}

/// Tests `‖MM† − M†M‖_F` against the tolerance scaled by `‖M‖_F²`.
pub fn is_normal(m: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    m.require_square()?;
    Ok(tol.accepts(normality_defect(m), m.frobenius_norm().powi(2)))
}

pub fn normality_defect(m: &ComplexMatrix) -> f64 {
    let ad = m.adjoint();
    (&(m * &ad) - &(&ad * m)).frobenius_norm()
}
