//! Complex Hadamard matrices: constructors, verification, dephasing and
//! equivalence testing for small orders.
//!
//! `H` is a complex Hadamard matrix when every `|H_{jk}| = 1` and
//! `H H† = n I`. Two of them are equivalent when `H1 = D1 P1 H2 P2 D2`
//! for diagonal unitaries `D1`, `D2` and permutations `P1`, `P2`.
//!
//! The cube root of unity in `F_3` is `ω = e^{2πi/3} = -1/2 + i√3/2`.
//! With `1/2 + i√3/2` instead, `1 + ω + ω² ≠ 0` and the matrix is not
//! Hadamard.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::random::{permutation_matrix, random_diagonal_unitary, random_permutation};
use crate::numerics::{ComplexMatrix, Tolerance, C64};

/// Exhaustive equivalence search runs up to this order.
pub const MAX_EXHAUSTIVE_ORDER: usize = 6;

const ENTRY_EPS: f64 = 1e-7;
const WITNESS_EPS: f64 = 1e-8;

/// Square matrix proposed as a complex Hadamard matrix; nothing is
/// guaranteed until [`is_hadamard`] says so.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardCandidate {
    matrix: ComplexMatrix,
}

impl HadamardCandidate {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.require_square()?;
        Ok(Self { matrix })
    }

    pub fn order(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn is_hadamard(&self, tol: &Tolerance) -> bool {
        is_hadamard(&self.matrix, tol).unwrap_or(false)
    }

    /// Entry phases in `(-π, π]`.
    pub fn angles(&self) -> Vec<Vec<f64>> {
        self.matrix.to_rows().iter().map(|r| r.iter().map(|z| z.arg()).collect()).collect()
    }

    pub fn from_angles(theta: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> =
            theta.iter().map(|r| r.iter().map(|&t| C64::from_polar(1.0, t)).collect()).collect();
        Self::new(ComplexMatrix::from_rows(&rows)?)
    }
}

/// `|H_{jk}| = 1` within `tol.eps` and `‖H H† − n I‖_F ≤ tol.eps · n`.
pub fn is_hadamard(h: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    let n = h.require_square()?;
    if h.as_slice().iter().any(|z| (z.norm() - 1.0).abs() > tol.eps) {
        return Ok(false);
    }
    let gram = h * &h.adjoint();
    let dev = (&gram - &ComplexMatrix::identity(n).scale_real(n as f64)).frobenius_norm();
    Ok(dev <= tol.eps * n as f64)
}

/// `F_n` with entries `e^{2πi (j-1)(k-1) / n}`.
pub fn fourier(n: usize) -> HadamardCandidate {
    assert!(n >= 1, "Fourier matrix needs n >= 1");
    let matrix = ComplexMatrix::from_fn(n, n, |j, k| {
        // reduce the exponent to (-n/2, n/2] so conjugate entries come out exactly conjugate
        let e = (j * k) % n;
        let e = if 2 * e > n { e as f64 - n as f64 } else { e as f64 };
        C64::from_polar(1.0, std::f64::consts::TAU * e / n as f64)
    });
    HadamardCandidate { matrix }
}

/// One-parameter order-4 family with rows
/// `(1,1,1,1), (1, i e^{ia}, -1, -i e^{ia}), (1,-1,1,-1), (1, -i e^{ia}, -1, i e^{ia})`.
pub fn family_n4(a: f64) -> HadamardCandidate {
    let one = C64::new(1.0, 0.0);
    let x = C64::new(0.0, 1.0) * C64::from_polar(1.0, a);
    let rows = [
        [one, one, one, one],
        [one, x, -one, -x],
        [one, -one, one, -one],
        [one, -x, -one, x],
    ];
    let matrix = ComplexMatrix::from_fn(4, 4, |j, k| rows[j][k]);
    HadamardCandidate { matrix }
}

/// `H1 = D1 P1 H2 P2 D2` with `P1[(i, row_perm[i])] = 1` and
/// `P2[(col_perm[j], j)] = 1`, so `(P1 H2 P2)_{ij} = H2_{row_perm[i], col_perm[j]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceWitness {
    pub d1: Vec<C64>,
    pub d2: Vec<C64>,
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
}

impl EquivalenceWitness {
    pub fn identity(n: usize) -> Self {
        let one = C64::new(1.0, 0.0);
        Self { d1: vec![one; n], d2: vec![one; n], row_perm: (0..n).collect(), col_perm: (0..n).collect() }
    }

    pub fn d1_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_diag(&self.d1)
    }

    pub fn d2_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_diag(&self.d2)
    }

    pub fn p1_matrix(&self) -> ComplexMatrix {
        permutation_matrix(&self.row_perm)
    }

    pub fn p2_matrix(&self) -> ComplexMatrix {
        permutation_matrix(&self.col_perm).transpose()
    }

    /// `D1 P1 H2 P2 D2`.
    pub fn apply(&self, h2: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(h2.rows(), h2.cols(), |i, j| {
            self.d1[i] * h2[(self.row_perm[i], self.col_perm[j])] * self.d2[j]
        })
    }

    /// `‖H1 − D1 P1 H2 P2 D2‖_F`.
    pub fn residual(&self, h1: &ComplexMatrix, h2: &ComplexMatrix) -> f64 {
        (h1 - &self.apply(h2)).frobenius_norm()
    }

    /// Witness for the reverse direction `H2 = D1' P1' H1 P2' D2'`.
    pub fn inverse(&self) -> Self {
        let n = self.row_perm.len();
        let mut row_perm = vec![0; n];
        let mut col_perm = vec![0; n];
        let mut d1 = vec![C64::new(0.0, 0.0); n];
        let mut d2 = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            row_perm[self.row_perm[i]] = i;
            col_perm[self.col_perm[i]] = i;
        }
        for r in 0..n {
            d1[r] = self.d1[row_perm[r]].inv();
            d2[r] = self.d2[col_perm[r]].inv();
        }
        Self { d1, d2, row_perm, col_perm }
    }

    /// Witness for `H1 = w.apply(other.apply(H3))`, i.e. the composition.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.row_perm.len();
        let row_perm = (0..n).map(|i| other.row_perm[self.row_perm[i]]).collect();
        let col_perm = (0..n).map(|j| other.col_perm[self.col_perm[j]]).collect();
        let d1 = (0..n).map(|i| self.d1[i] * other.d1[self.row_perm[i]]).collect();
        let d2 = (0..n).map(|j| other.d2[self.col_perm[j]] * self.d2[j]).collect();
        Self { d1, d2, row_perm, col_perm }
    }
}

/// Normalizes the first row and column to ones: row `j` is divided by
/// `H_{j1}`, then column `k` by the new first-row entry. Returns the
/// dephased matrix and the witness mapping the input onto it.
pub fn dephase(h: &HadamardCandidate, tol: &Tolerance) -> Result<(HadamardCandidate, EquivalenceWitness)> {
    if !is_hadamard(&h.matrix, tol)? {
        return Err(Error::NotHadamard);
    }
    let (m, w) = dephase_at(&h.matrix, 0, 0);
    Ok((HadamardCandidate { matrix: m }, w))
}

/// Dephasing that makes row `a` and column `b` all ones, then moves them
/// to the front. Entries are `H_{ij} H_{ab} / (H_{ib} H_{aj})`.
fn dephase_at(h: &ComplexMatrix, a: usize, b: usize) -> (ComplexMatrix, EquivalenceWitness) {
    let n = h.rows();
    let mut row_perm: Vec<usize> = vec![a];
    row_perm.extend((0..n).filter(|&r| r != a));
    let mut col_perm: Vec<usize> = vec![b];
    col_perm.extend((0..n).filter(|&c| c != b));
    let hab = h[(a, b)];
    let d1: Vec<C64> = row_perm.iter().map(|&r| h[(r, b)].inv()).collect();
    let d2: Vec<C64> = col_perm.iter().map(|&c| hab / h[(a, c)]).collect();
    let w = EquivalenceWitness { d1, d2, row_perm, col_perm };
    (w.apply(h), w)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Equivalence {
    Yes(EquivalenceWitness),
    No,
    Unknown,
}

/// Decides `H1 ~ H2`. Exhaustive for orders up to [`MAX_EXHAUSTIVE_ORDER`];
/// above that only a direct match of the dephased forms is attempted and
/// anything else is `Unknown`.
pub fn equivalent(h1: &HadamardCandidate, h2: &HadamardCandidate, tol: &Tolerance) -> Result<Equivalence> {
    if h1.order() != h2.order() {
        return Err(Error::OrderMismatch { expected: h1.order(), found: h2.order() });
    }
    if !is_hadamard(&h1.matrix, tol)? || !is_hadamard(&h2.matrix, tol)? {
        return Err(Error::NotHadamard);
    }
    let n = h1.order();
    let (k1, w1) = dephase_at(&h1.matrix, 0, 0);
    let pivots: Vec<(usize, usize)> = if n > MAX_EXHAUSTIVE_ORDER {
        vec![(0, 0)]
    } else {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    };
    for (a, b) in pivots {
        let (k2, w2) = dephase_at(&h2.matrix, a, b);
        let search = if n > MAX_EXHAUSTIVE_ORDER {
            identity_match(&k1, &k2)
        } else {
            match_dephased(&k1, &k2)
        };
        if let Some((rows, cols)) = search {
            // K1 = Π K2 Σ  =>  H1 = w1⁻¹ · Π · w2 · H2
            let perm = EquivalenceWitness {
                d1: vec![C64::new(1.0, 0.0); n],
                d2: vec![C64::new(1.0, 0.0); n],
                row_perm: rows,
                col_perm: cols,
            };
            let raw = w1.inverse().compose(&perm).compose(&w2);
            if let Some(w) = fit_phases(&h1.matrix, &h2.matrix, &raw.row_perm, &raw.col_perm) {
                return Ok(Equivalence::Yes(w));
            }
        }
    }
    Ok(if n > MAX_EXHAUSTIVE_ORDER { Equivalence::Unknown } else { Equivalence::No })
}

/// Recomputes diagonal phases for fixed permutations and verifies the witness.
fn fit_phases(h1: &ComplexMatrix, h2: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> Option<EquivalenceWitness> {
    let n = h1.rows();
    let x = ComplexMatrix::from_fn(n, n, |i, j| h2[(rows[i], cols[j])]);
    let d2: Vec<C64> = (0..n).map(|j| h1[(0, j)] / x[(0, j)]).collect();
    let d1: Vec<C64> = (0..n).map(|i| h1[(i, 0)] / (x[(i, 0)] * d2[0])).collect();
    let w = EquivalenceWitness { d1, d2, row_perm: rows.to_vec(), col_perm: cols.to_vec() };
    (w.residual(h1, h2) <= WITNESS_EPS).then_some(w)
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= ENTRY_EPS
}

fn same_multiset(a: &[C64], b: &[C64]) -> bool {
    let mut used = vec![false; b.len()];
    a.iter().all(|&x| {
        match (0..b.len()).find(|&k| !used[k] && close(x, b[k])) {
            Some(k) => {
                used[k] = true;
                true
            }
            None => false,
        }
    })
}

fn identity_match(k1: &ComplexMatrix, k2: &ComplexMatrix) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = k1.rows();
    let all = (0..n).all(|i| (0..n).all(|j| close(k1[(i, j)], k2[(i, j)])));
    all.then(|| ((0..n).collect(), (0..n).collect()))
}

/// Finds permutations fixing index 0 with `K1_{ij} = K2_{rows[i], cols[j]}`.
fn match_dephased(k1: &ComplexMatrix, k2: &ComplexMatrix) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = k1.rows();
    let mut rows = vec![0usize];
    let mut used = vec![false; n];
    used[0] = true;
    search_rows(k1, k2, &mut rows, &mut used)
}

fn search_rows(
    k1: &ComplexMatrix,
    k2: &ComplexMatrix,
    rows: &mut Vec<usize>,
    used: &mut [bool],
) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = k1.rows();
    let i = rows.len();
    if i == n {
        return match_columns(k1, k2, rows).map(|cols| (rows.clone(), cols));
    }
    for r in 0..n {
        if used[r] || !same_multiset(k1.row(i), k2.row(r)) {
            continue;
        }
        rows.push(r);
        used[r] = true;
        if partial_columns_feasible(k1, k2, rows) {
            if let Some(found) = search_rows(k1, k2, rows, used) {
                return Some(found);
            }
        }
        rows.pop();
        used[r] = false;
    }
    None
}

/// Every column of `K1` restricted to the assigned rows must appear in `K2`.
fn partial_columns_feasible(k1: &ComplexMatrix, k2: &ComplexMatrix, rows: &[usize]) -> bool {
    let n = k1.rows();
    (0..n).all(|j| (0..n).any(|c| rows.iter().enumerate().all(|(i, &r)| close(k1[(i, j)], k2[(r, c)]))))
}

fn match_columns(k1: &ComplexMatrix, k2: &ComplexMatrix, rows: &[usize]) -> Option<Vec<usize>> {
    let n = k1.rows();
    let mut used = vec![false; n];
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let c = (0..n).find(|&c| !used[c] && (0..n).all(|i| close(k1[(i, j)], k2[(rows[i], c)])))?;
        used[c] = true;
        cols.push(c);
    }
    Some(cols)
}

/// `D1 P1 H P2 D2` with random phases and permutations, plus the witness
/// for `result = witness.apply(H)`.
pub fn random_dressing<R: Rng + ?Sized>(h: &HadamardCandidate, rng: &mut R) -> (HadamardCandidate, EquivalenceWitness) {
    let n = h.order();
    let w = EquivalenceWitness {
        d1: random_diagonal_unitary(n, rng).diagonal(),
        d2: random_diagonal_unitary(n, rng).diagonal(),
        row_perm: random_permutation(n, rng),
        col_perm: random_permutation(n, rng),
    };
    (HadamardCandidate { matrix: w.apply(&h.matrix) }, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::rng_from_seed;

    fn t() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn small_fourier_matrices() {
        let f2 = fourier(2);
        let want = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]);
        assert!((f2.matrix() - &want).frobenius_norm() < 1e-15);
        let f3 = fourier(3);
        let w = C64::new(-0.5, 3f64.sqrt() / 2.0);
        assert!((f3.matrix()[(1, 1)] - w).norm() < 1e-15);
        assert!((f3.matrix()[(1, 2)] - w * w).norm() < 1e-15);
        assert!((f3.matrix()[(2, 1)] - w * w).norm() < 1e-15);
        assert!(f3.is_hadamard(&t()));
        assert!(fourier(5).is_hadamard(&t()));
        assert!(fourier(1).is_hadamard(&t()));
    }

    #[test]
    fn printed_omega_is_not_a_cube_root_of_unity() {
        let bad = C64::new(0.5, 3f64.sqrt() / 2.0);
        let sum = C64::new(1.0, 0.0) + bad + bad * bad;
        assert!(sum.norm() > 0.5);
        let m = ComplexMatrix::from_fn(3, 3, |j, k| bad.powu((j * k) as u32));
        assert!(!is_hadamard(&m, &t()).unwrap());
    }

    #[test]
    fn all_ones_is_not_hadamard() {
        let ones = ComplexMatrix::from_fn(3, 3, |_, _| C64::new(1.0, 0.0));
        assert!(!is_hadamard(&ones, &t()).unwrap());
        assert!(matches!(is_hadamard(&ComplexMatrix::zeros(2, 3), &t()), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn order_four_family() {
        for a in [0.0, 0.7, std::f64::consts::FRAC_PI_2, 1.234] {
            assert!(family_n4(a).is_hadamard(&t()));
        }
        let h = family_n4(1.234);
        let gram = h.matrix() * &h.matrix().adjoint();
        assert!((&gram - &ComplexMatrix::identity(4).scale_real(4.0)).frobenius_norm() <= 1e-12);
        // a = 0 is literally F4
        assert!((family_n4(0.0).matrix() - fourier(4).matrix()).frobenius_norm() < 1e-15);
    }

    #[test]
    fn dephasing() {
        let (d, w) = dephase(&fourier(4), &t()).unwrap();
        assert!((d.matrix() - fourier(4).matrix()).frobenius_norm() < 1e-15);
        assert!(w.residual(d.matrix(), fourier(4).matrix()) < 1e-15);

        let mut scaled = fourier(3).into_matrix();
        let omega = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        for k in 0..3 {
            scaled[(1, k)] *= omega;
        }
        let (d, _) = dephase(&HadamardCandidate::new(scaled).unwrap(), &t()).unwrap();
        assert!((d.matrix() - fourier(3).matrix()).frobenius_norm() < 1e-14);

        let mut rng = rng_from_seed(2);
        let phases = EquivalenceWitness {
            d1: random_diagonal_unitary(4, &mut rng).diagonal(),
            d2: random_diagonal_unitary(4, &mut rng).diagonal(),
            row_perm: (0..4).collect(),
            col_perm: (0..4).collect(),
        };
        let scrambled = HadamardCandidate::new(phases.apply(fourier(4).matrix())).unwrap();
        let (d, w) = dephase(&scrambled, &t()).unwrap();
        for i in 0..4 {
            assert!((d.matrix()[(0, i)] - C64::new(1.0, 0.0)).norm() < 1e-14);
            assert!((d.matrix()[(i, 0)] - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
        assert!(w.residual(d.matrix(), scrambled.matrix()) < 1e-13);
        let (again, _) = dephase(&d, &t()).unwrap();
        assert!((again.matrix() - d.matrix()).frobenius_norm() < 1e-14);

        let ones = HadamardCandidate::new(ComplexMatrix::identity(2)).unwrap();
        assert!(matches!(dephase(&ones, &t()), Err(Error::NotHadamard)));
    }

    #[test]
    fn witness_algebra() {
        let mut rng = rng_from_seed(17);
        let f = fourier(5);
        let (g, w) = random_dressing(&f, &mut rng);
        assert!(w.residual(g.matrix(), f.matrix()) < 1e-13);
        assert!(w.inverse().residual(f.matrix(), g.matrix()) < 1e-13);
        let (h, w2) = random_dressing(&g, &mut rng);
        assert!(w2.compose(&w).residual(h.matrix(), f.matrix()) < 1e-13);
        let dense = &(&(&w.d1_matrix() * &w.p1_matrix()) * f.matrix()) * &(&w.p2_matrix() * &w.d2_matrix());
        assert!((&dense - g.matrix()).frobenius_norm() < 1e-13);
    }

    #[test]
    fn dressed_fourier_is_equivalent() {
        let mut rng = rng_from_seed(5);
        for n in [3, 4, 5, 6] {
            let f = fourier(n);
            let (g, _) = random_dressing(&f, &mut rng);
            match equivalent(&g, &f, &t()).unwrap() {
                Equivalence::Yes(w) => assert!(w.residual(g.matrix(), f.matrix()) <= 1e-8),
                other => panic!("order {n}: {other:?}"),
            }
        }
    }

    #[test]
    fn order_four_family_members_are_inequivalent() {
        assert_eq!(equivalent(&family_n4(0.3), &family_n4(0.9), &t()).unwrap(), Equivalence::No);
        assert!(matches!(equivalent(&family_n4(0.0), &fourier(4), &t()).unwrap(), Equivalence::Yes(_)));
    }

    #[test]
    fn large_orders_are_unknown_unless_directly_matched() {
        let mut rng = rng_from_seed(1);
        let f = fourier(7);
        assert!(matches!(equivalent(&f, &f, &t()).unwrap(), Equivalence::Yes(_)));
        let (g, _) = random_dressing(&f, &mut rng);
        assert_eq!(equivalent(&g, &f, &t()).unwrap(), Equivalence::Unknown);
    }

    #[test]
    fn equivalence_errors() {
        assert!(matches!(equivalent(&fourier(3), &fourier(4), &t()), Err(Error::OrderMismatch { .. })));
        let not = HadamardCandidate::new(ComplexMatrix::identity(3)).unwrap();
        assert!(matches!(equivalent(&not, &fourier(3), &t()), Err(Error::NotHadamard)));
    }

    #[test]
    fn angle_round_trip() {
        let f = family_n4(0.4);
        let back = HadamardCandidate::from_angles(&f.angles()).unwrap();
        assert!((back.matrix() - f.matrix()).frobenius_norm() < 1e-14);
    }
}
