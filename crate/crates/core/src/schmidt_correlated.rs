//! Schmidt-correlated (maximally correlated) states
//! `ρ = Σ_{jl} C_{jl} |e_j f_j⟩⟨e_l f_l|`: detection, separability
//! criteria with NPPT witnesses, the phase-matrix test, and generators.

use crate::error::{Error, Result};
use crate::hadamard::is_hadamard;
use crate::numerics::random::{
    random_density_of_rank, random_probabilities, random_isometry, random_unitary, rng_from_seed,
};
use crate::numerics::{inner, kron_vec, ComplexMatrix, Tolerance, C64};
use crate::states::{
    matrix_rep, mixture_transform, partial_transpose_b_matrix, spectral_ensemble, DensityMatrix,
    Ensemble, PureState,
};
use crate::weak_svd::{check_weak, diagonalize};

/// Reconstruction slack accepted for a detected form, relative to `max(1, ‖ρ‖_F)`.
pub const RECONSTRUCTION_EPS: f64 = 1e-7;

/// Off-diagonal mass below which a rotated state counts as diagonal.
pub const DIAGONAL_EPS: f64 = 1e-7;

/// Allowed deviation of each `p_k` from `1/n` for the phase test.
pub const UNIFORM_PROB_EPS: f64 = 1e-9;

/// Allowed spread `max_k |α_{jk}| - min_k |α_{jk}|` for the phase test.
pub const MODULUS_SPREAD_EPS: f64 = 1e-7;

/// Seed used for the weak SVD inside [`detect`].
const DETECT_SEED: u64 = 0;

/// `ρ = Σ_{jl} C_{jl} |e_j f_j⟩⟨e_l f_l|` where `|e_j⟩` is column `j` of `U†`
/// and `|f_j⟩` is the conjugate of row `j` of `V`, so that `U A Vᵗ` is
/// diagonal for every ensemble member `A`.
#[derive(Debug, Clone)]
pub struct SchmidtCorrelatedForm {
    pub dim: usize,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub c: ComplexMatrix,
}

impl SchmidtCorrelatedForm {
    /// Column `j` is `|e_j⟩`.
    pub fn basis_a(&self) -> ComplexMatrix {
        self.u.adjoint()
    }

    /// Column `j` is `|f_j⟩`.
    pub fn basis_b(&self) -> ComplexMatrix {
        self.v.adjoint()
    }

    /// `|e_j⟩ ⊗ |f_l⟩`, 0-based.
    pub fn product_vector(&self, j: usize, l: usize) -> Vec<C64> {
        kron_vec(&self.basis_a().column(j), &self.basis_b().column(l))
    }

    /// `n² x n` matrix whose column `j` is `|e_j f_j⟩`.
    fn correlated_columns(&self) -> ComplexMatrix {
        let (a, b) = (self.basis_a(), self.basis_b());
        let cols: Vec<Vec<C64>> = (0..self.dim).map(|j| kron_vec(&a.column(j), &b.column(j))).collect();
        ComplexMatrix::from_columns(&cols)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let w = self.correlated_columns();
        &(&w * &self.c) * &w.adjoint()
    }

    /// `‖ρ − Σ C_{jl} |e_j f_j⟩⟨e_l f_l|‖_F`.
    pub fn residual(&self, rho: &DensityMatrix) -> f64 {
        (rho.matrix() - &self.reconstruct()).frobenius_norm()
    }

    /// Total weight `ρ` assigns to `|e_j f_l⟩` with `j ≠ l`. Zero for a
    /// genuine form: local measurements in the witness bases always agree.
    pub fn uncorrelated_mass(&self, rho: &DensityMatrix) -> f64 {
        let mut mass = 0.0;
        for j in 0..self.dim {
            for l in 0..self.dim {
                if j != l {
                    mass += rho.expectation(&self.product_vector(j, l)).re;
                }
            }
        }
        mass
    }

    /// `C` with indices sorted by descending diagonal and phases fixed so
    /// that each column's first significant entry above the diagonal is
    /// real positive. Equal diagonals keep their relative order.
    pub fn canonical_c(&self) -> ComplexMatrix {
        canonical_gauge(&self.c)
    }
}

/// See [`SchmidtCorrelatedForm::canonical_c`].
pub fn canonical_gauge(c: &ComplexMatrix) -> ComplexMatrix {
    let n = c.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| c[(b, b)].re.total_cmp(&c[(a, a)].re));
    let p = ComplexMatrix::from_fn(n, n, |i, j| c[(order[i], order[j])]);
    let mut d = vec![C64::new(1.0, 0.0); n];
    for l in 1..n {
        if let Some(m) = (0..l).find(|&m| p[(m, l)].norm() > 1e-9) {
            d[l] = d[m] * p[(m, l)] / p[(m, l)].norm();
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| d[i] * p[(i, j)] * d[j].conj())
}

/// Decides whether `ρ` is Schmidt-correlated by testing the spectral
/// ensemble for weak-SVD diagonalizability. Any ensemble would do, since
/// either all of them pass or none does.
pub fn detect(rho: &DensityMatrix, tol: &Tolerance) -> Result<Option<SchmidtCorrelatedForm>> {
    let ens = spectral_ensemble(rho, tol)?;
    let mats = ens.matrix_reps();
    if !check_weak(&mats, tol)? {
        return Ok(None);
    }
    let w = diagonalize(&mats, tol, DETECT_SEED)?;
    let n = rho.dim();
    let alpha = w.alpha_table();
    let c = coherence_matrix(&alpha, ens.probs());
    let form = SchmidtCorrelatedForm { dim: n, u: w.u, v: w.v, c };
    let residual = form.residual(rho);
    if residual > RECONSTRUCTION_EPS * rho.matrix().frobenius_norm().max(1.0) {
        return Err(Error::ConstructionFailure { attempts: 1, residual });
    }
    Ok(Some(form))
}

/// `C_{jl} = Σ_k p_k α_{jk} α*_{lk}` from an `n x K` table.
fn coherence_matrix(alpha: &ComplexMatrix, probs: &[f64]) -> ComplexMatrix {
    let n = alpha.rows();
    let c = ComplexMatrix::from_fn(n, n, |j, l| {
        probs.iter().enumerate().map(|(k, &p)| alpha[(j, k)] * alpha[(l, k)].conj() * p).sum()
    });
    // exact Hermitian symmetry up to rounding
    ComplexMatrix::from_fn(n, n, |j, l| (c[(j, l)] + c[(l, j)].conj()) * 0.5)
}

/// Empirical check that every ensemble of a Schmidt-correlated `ρ` is
/// weak-SVD diagonalizable: `trials` ensembles are drawn through random
/// isometries with `S ∈ [K, K+3]` rows. Each must pass [`check_weak`] and
/// also be diagonal in the witness basis found from the spectral ensemble.
pub fn all_ensembles_property_check(rho: &DensityMatrix, trials: usize, seed: u64, tol: &Tolerance) -> Result<bool> {
    let form = detect(rho, tol)?
        .ok_or_else(|| Error::InvalidArgument("state is not Schmidt-correlated".into()))?;
    let spectral = spectral_ensemble(rho, tol)?;
    let k = spectral.len();
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let s = k + rand::Rng::random_range(&mut rng, 0..=3);
        let w = random_isometry(s, k, &mut rng);
        let ens = mixture_transform(&spectral, &w, tol)?;
        if !check_weak(&ens.matrix_reps(), tol)? {
            return Ok(false);
        }
        if DiagonalEnsemble::extract(&ens, &form.u, &form.v).is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Evidence that a form is entangled: the largest off-diagonal coherence
/// and the 2x2 principal minor of `ρ^{T_B}` on the vectors
/// `|e_j⟩ ⊗ |f̄_l⟩` and `|e_l⟩ ⊗ |f̄_j⟩`, which equals `-|C_{jl}|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpptWitness {
    /// 0-based index pair with `j < l`.
    pub j: usize,
    pub l: usize,
    pub coherence: f64,
    pub minor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparabilityVerdict {
    pub separable: bool,
    pub witness: Option<NpptWitness>,
    /// Largest `|C_{jl}|` with `j ≠ l`.
    pub max_coherence: f64,
}

/// A Schmidt-correlated state is separable iff `C` is diagonal.
pub fn is_separable_sc(form: &SchmidtCorrelatedForm, tol: &Tolerance) -> SeparabilityVerdict {
    let n = form.dim;
    let mut best: Option<(usize, usize, f64)> = None;
    for j in 0..n {
        for l in (j + 1)..n {
            let m = form.c[(j, l)].norm();
            if best.is_none_or(|(_, _, b)| m > b) {
                best = Some((j, l, m));
            }
        }
    }
    let max_coherence = best.map_or(0.0, |b| b.2);
    if max_coherence <= tol.eps {
        return SeparabilityVerdict { separable: true, witness: None, max_coherence };
    }
    let (j, l, coherence) = best.expect("n >= 2 when coherence is positive");
    let pt = partial_transpose_b_matrix(&form.reconstruct(), n);
    let a = form.basis_a();
    let b = form.basis_b().conj();
    let x = kron_vec(&a.column(j), &b.column(l));
    let y = kron_vec(&a.column(l), &b.column(j));
    let px = pt.apply(&x);
    let py = pt.apply(&y);
    let minor = inner(&x, &px).re * inner(&y, &py).re - inner(&x, &py).norm_sqr();
    SeparabilityVerdict { separable: false, witness: Some(NpptWitness { j, l, coherence, minor }), max_coherence }
}

/// Ensemble whose members are all diagonal in one product basis:
/// `U A_k Vᵗ = diag(α_{·k})`.
#[derive(Debug, Clone)]
pub struct DiagonalEnsemble {
    pub probs: Vec<f64>,
    /// `n x K`, entry `(j, k)` is `α_{jk}`.
    pub alpha: ComplexMatrix,
}

impl DiagonalEnsemble {
    /// Rotates each member into the basis `(U, V)`; fails if any member
    /// keeps off-diagonal mass above [`DIAGONAL_EPS`].
    pub fn extract(ens: &Ensemble, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Self> {
        let n = ens.dim();
        if u.rows() != n || v.rows() != n || !u.is_square() || !v.is_square() {
            return Err(Error::DimensionMismatch(format!("basis does not act on dimension {n}")));
        }
        let vt = v.transpose();
        let mut alpha = ComplexMatrix::zeros(n, ens.len());
        for (k, psi) in ens.states().iter().enumerate() {
            let d = &(u * &matrix_rep(psi)) * &vt;
            let mass = d.off_diagonal_norm();
            if mass > DIAGONAL_EPS {
                return Err(Error::NotDiagonalInBasis { index: k, mass });
            }
            for j in 0..n {
                alpha[(j, k)] = d[(j, j)];
            }
        }
        Ok(Self { probs: ens.probs().to_vec(), alpha })
    }

    pub fn dim(&self) -> usize {
        self.alpha.rows()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `C_{jl} = Σ_k p_k α_{jk} α*_{lk}`.
    pub fn coherence(&self) -> ComplexMatrix {
        coherence_matrix(&self.alpha, &self.probs)
    }

    /// `Σ_k p_k α_{jk} α*_{lk} = 0` for all `j ≠ l`.
    pub fn is_orthogonal(&self, tol: &Tolerance) -> bool {
        let c = self.coherence();
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|l| j == l || c[(j, l)].norm() <= tol.eps))
    }
}

/// Orthogonality criterion on an ensemble that is diagonal in `(U, V)`.
pub fn orthogonality_check(ens: &Ensemble, u: &ComplexMatrix, v: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(DiagonalEnsemble::extract(ens, u, v)?.is_orthogonal(tol))
}

/// `α_{jk} = a_j Θ_{jk}` with `Σ a_j² = 1` and unimodular `Θ`.
#[derive(Debug, Clone)]
pub struct PhaseDecomposition {
    pub moduli: Vec<f64>,
    pub phases: ComplexMatrix,
    pub probs: Vec<f64>,
}

impl PhaseDecomposition {
    pub fn alpha(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.phases.rows(), self.phases.cols(), |j, k| self.phases[(j, k)] * self.moduli[j])
    }
}

#[derive(Debug, Clone)]
pub struct PhaseVerdict {
    /// Whether `K = n`, `p_k = 1/n` and `|α_{jk}| = a_j ≠ 0` all hold.
    pub applicable: bool,
    /// Separable iff the phase matrix is complex Hadamard; `None` when not applicable.
    pub separable: Option<bool>,
    pub decomposition: Option<PhaseDecomposition>,
    /// First violated condition when not applicable.
    pub reason: Option<String>,
}

impl PhaseVerdict {
    fn inapplicable(reason: String) -> Self {
        Self { applicable: false, separable: None, decomposition: None, reason: Some(reason) }
    }
}

/// Uniform ensembles of `n` diagonal states with row-constant moduli are
/// separable exactly when their phase matrix is complex Hadamard.
pub fn phase_separability(ens: &DiagonalEnsemble, tol: &Tolerance) -> PhaseVerdict {
    let n = ens.dim();
    let k = ens.len();
    if k != n {
        return PhaseVerdict::inapplicable(format!("{k} states for dimension {n}"));
    }
    let uniform = 1.0 / n as f64;
    if let Some(p) = ens.probs.iter().find(|p| (*p - uniform).abs() > UNIFORM_PROB_EPS) {
        return PhaseVerdict::inapplicable(format!("probability {p} is not 1/{n}"));
    }
    let mut moduli = Vec::with_capacity(n);
    for j in 0..n {
        let row: Vec<f64> = (0..k).map(|c| ens.alpha[(j, c)].norm()).collect();
        let hi = row.iter().cloned().fold(f64::MIN, f64::max);
        let lo = row.iter().cloned().fold(f64::MAX, f64::min);
        if hi - lo > MODULUS_SPREAD_EPS {
            return PhaseVerdict::inapplicable(format!("row {j} moduli spread {:e}", hi - lo));
        }
        if lo <= tol.eps {
            return PhaseVerdict::inapplicable(format!("row {j} has zero modulus"));
        }
        moduli.push((row.iter().map(|x| x * x).sum::<f64>() / k as f64).sqrt());
    }
    let phases = ComplexMatrix::from_fn(n, k, |j, c| {
        let z = ens.alpha[(j, c)];
        z / z.norm()
    });
    let separable = is_hadamard(&phases, tol).expect("phase matrix is square");
    PhaseVerdict {
        applicable: true,
        separable: Some(separable),
        decomposition: Some(PhaseDecomposition { moduli, phases, probs: ens.probs.clone() }),
        reason: None,
    }
}

/// Uniform ensemble `|ψ_k⟩ = Σ_j a_j Θ_{jk} |e_j f_j⟩` in the basis `(U, V)`
/// (conventions of [`SchmidtCorrelatedForm`]). `a` is rescaled to unit norm.
pub fn phase_ensemble(a: &[f64], theta: &ComplexMatrix, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Ensemble> {
    let n = a.len();
    if theta.rows() != n || u.rows() != n || v.rows() != n {
        return Err(Error::DimensionMismatch(format!("{n} moduli for a {}-row phase matrix", theta.rows())));
    }
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale <= 0.0 {
        return Err(Error::InvalidArgument("moduli are all zero".into()));
    }
    let ua = u.adjoint();
    let vb = v.conj();
    let states = (0..theta.cols())
        .map(|k| {
            let d = ComplexMatrix::from_diag(&(0..n).map(|j| theta[(j, k)] * (a[j] / scale)).collect::<Vec<_>>());
            PureState::from_matrix(&(&(&ua * &d) * &vb))
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::uniform(states)
}

/// Random `C` of the given rank, random local bases.
pub fn random_schmidt_correlated(n: usize, rank: usize, seed: u64) -> Result<(DensityMatrix, SchmidtCorrelatedForm)> {
    check_rank(n, rank)?;
    let mut rng = rng_from_seed(seed);
    let c = random_density_of_rank(n, rank, &mut rng);
    assemble(n, c, &mut rng)
}

/// Same as [`random_schmidt_correlated`] but with diagonal `C`, hence separable.
pub fn random_separable_schmidt_correlated(
    n: usize,
    rank: usize,
    seed: u64,
) -> Result<(DensityMatrix, SchmidtCorrelatedForm)> {
    check_rank(n, rank)?;
    let mut rng = rng_from_seed(seed);
    let mut d = random_probabilities(rank, &mut rng);
    d.resize(n, 0.0);
    assemble(n, ComplexMatrix::from_real_diag(&d), &mut rng)
}

fn check_rank(n: usize, rank: usize) -> Result<()> {
    if n == 0 || rank == 0 || rank > n {
        return Err(Error::InvalidArgument(format!("rank {rank} outside 1..={n}")));
    }
    Ok(())
}

fn assemble<R: rand::Rng + ?Sized>(n: usize, c: ComplexMatrix, rng: &mut R) -> Result<(DensityMatrix, SchmidtCorrelatedForm)> {
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let form = SchmidtCorrelatedForm { dim: n, u, v, c };
    let rho = DensityMatrix::new(n, form.reconstruct(), &Tolerance::default())?;
    Ok((rho, form))
}
