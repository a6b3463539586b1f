use super::eigh::eigh;
use super::matrix::ComplexMatrix;
use super::tolerance::Tolerance;
use crate::error::{Error, Result};

/// Relative gap below which eigenvalues of a family member count as degenerate.
pub const CLUSTER_EPS: f64 = 1e-6;

/// Common eigenbasis of a family of pairwise commuting Hermitian matrices.
///
/// Diagonalizes the first member, then recurses on the remaining members
/// restricted to each degenerate eigenspace.
pub fn joint_diag_hermitian(family: &[ComplexMatrix], tol: &Tolerance) -> Result<ComplexMatrix> {
    let first = family
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty matrix family".into()))?;
    let n = first.require_square()?;
    for m in family {
        if m.require_square()? != n {
            return Err(Error::DimensionMismatch(format!("family mixes orders {n} and {}", m.rows())));
        }
        let deviation = m.hermitian_deviation();
        if !tol.accepts(deviation, m.frobenius_norm()) {
            return Err(Error::NotHermitian { deviation });
        }
    }
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            let deviation = (&(a * b) - &(b * a)).frobenius_norm();
            if !tol.accepts(deviation, a.frobenius_norm() * b.frobenius_norm()) {
                return Err(Error::NotCommuting { deviation });
            }
        }
    }
    refine(family, tol)
}

fn refine(family: &[ComplexMatrix], tol: &Tolerance) -> Result<ComplexMatrix> {
    let n = family[0].rows();
    if n <= 1 {
        return Ok(ComplexMatrix::identity(n));
    }
    let e = eigh(&family[0], tol)?;
    let rest = &family[1..];
    if rest.is_empty() {
        return Ok(e.vectors);
    }
    let spectral_norm = e.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = CLUSTER_EPS * spectral_norm.max(1.0);

    let mut q = e.vectors.clone();
    for cluster in clusters(&e.values, gap) {
        if cluster.len() < 2 {
            continue;
        }
        let basis = e.vectors.select_columns(&cluster);
        let basis_h = basis.adjoint();
        let projected: Vec<ComplexMatrix> =
            rest.iter().map(|m| &(&basis_h * m) * &basis).collect();
        let inner = refine(&projected, tol)?;
        let rotated = &basis * &inner;
        for (slot, &col) in cluster.iter().enumerate() {
            q.set_column(col, &rotated.column(slot));
        }
    }
    Ok(q)
}

/// Groups indices of ascending `values` into runs whose consecutive gaps are `<= gap`.
pub(crate) fn clusters(values: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(run) if (v - values[*run.last().unwrap()]).abs() <= gap => run.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}
