//! Bipartite pure and mixed states on `ℂⁿ ⊗ ℂⁿ`.

use crate::error::{Error, Result};
use crate::numerics::{
    canonical_phase, eigh, kron_vec, norm, svd, ComplexMatrix, Tolerance, C64, ZERO,
};

/// Normalization slack accepted when validating states and ensembles.
pub const NORM_EPS: f64 = 1e-8;

/// Eigenvalues at or below this are treated as zero by [`spectral_ensemble`].
pub const SPECTRAL_CUTOFF: f64 = 1e-12;

/// Unit vector in `ℂⁿ ⊗ ℂⁿ`; amplitude of `|j l⟩` at `(j-1)·n + (l-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(dim: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("local dimension must be positive".into()));
        }
        if amplitudes.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for local dimension {dim}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let nrm = norm(&amplitudes);
        if (nrm - 1.0).abs() > NORM_EPS {
            return Err(Error::NotNormalized { norm: nrm });
        }
        Ok(Self { dim, amplitudes })
    }

    /// Like [`PureState::new`] but rescales a nonzero vector to unit norm.
    pub fn normalized(dim: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let nrm = norm(&amplitudes);
        if !(nrm.is_finite() && nrm > 0.0) {
            return Err(Error::NotNormalized { norm: nrm });
        }
        Self::new(dim, amplitudes.into_iter().map(|z| z / nrm).collect())
    }

    /// State whose matrix representation is `a` (rescaled to unit norm).
    pub fn from_matrix(a: &ComplexMatrix) -> Result<Self> {
        let n = a.require_square()?;
        Self::normalized(n, a.as_slice().to_vec())
    }

    /// `|j l⟩` with 0-based labels.
    pub fn basis(dim: usize, j: usize, l: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim * dim];
        amplitudes[j * dim + l] = C64::new(1.0, 0.0);
        Self { dim, amplitudes }
    }

    pub fn product(a: &[C64], b: &[C64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch("factors of unequal dimension".into()));
        }
        Self::normalized(a.len(), kron_vec(a, b))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Representative with the largest-magnitude amplitude real positive.
    pub fn canonical(&self) -> Self {
        Self { dim: self.dim, amplitudes: canonical_phase(&self.amplitudes) }
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// `(U ⊗ V) |ψ⟩`.
    pub fn apply_local(&self, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Self> {
        check_local(self.dim, u, v)?;
        let a = matrix_rep(self);
        Self::from_matrix(&(&(u * &a) * &v.transpose()))
    }
}

/// Schmidt coefficients with the local bases as matrix columns.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    /// `λ_j`, descending, summing to one.
    pub coefficients: Vec<f64>,
    /// Column `m` is `|e_m⟩`.
    pub basis_a: ComplexMatrix,
    /// Column `m` is `|f_m⟩`.
    pub basis_b: ComplexMatrix,
}

impl SchmidtForm {
    /// `Σ_m √λ_m |e_m⟩ ⊗ |f_m⟩`.
    pub fn reconstruct(&self) -> Vec<C64> {
        let n = self.coefficients.len();
        let mut out = vec![ZERO; n * n];
        for (m, &lambda) in self.coefficients.iter().enumerate() {
            let term = kron_vec(&self.basis_a.column(m), &self.basis_b.column(m));
            let w = lambda.max(0.0).sqrt();
            for (o, t) in out.iter_mut().zip(term) {
                *o += t * w;
            }
        }
        out
    }

    pub fn rank(&self, cutoff: f64) -> usize {
        self.coefficients.iter().filter(|&&l| l > cutoff).count()
    }
}

/// Weighted collection of pure states.
#[derive(Debug, Clone)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<PureState>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if probs.is_empty() || probs.len() != states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        if probs.iter().any(|&p| !(p.is_finite() && p > 0.0)) {
            return Err(Error::InvalidEnsemble("probabilities must be positive".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_EPS {
            return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
        }
        let dim = states[0].dim;
        if states.iter().any(|s| s.dim != dim) {
            return Err(Error::DimensionMismatch("ensemble mixes local dimensions".into()));
        }
        Ok(Self { probs, states })
    }

    pub fn uniform(states: Vec<PureState>) -> Result<Self> {
        let k = states.len();
        Self::new(vec![1.0 / k as f64; k], states)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim
    }

    pub fn matrix_reps(&self) -> Vec<ComplexMatrix> {
        self.states.iter().map(matrix_rep).collect()
    }
}

/// Positive semidefinite unit-trace operator on `ℂⁿ ⊗ ℂⁿ`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity against `tol`.
    pub fn new(dim: usize, matrix: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if dim == 0 || matrix.rows() != dim * dim || matrix.cols() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for local dimension {dim}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let deviation = matrix.hermitian_deviation();
        if !tol.accepts(deviation, 1.0) {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {deviation:e})")));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > NORM_EPS.max(tol.eps) {
            return Err(Error::InvalidDensity(format!("trace is {tr}")));
        }
        let hermitian = (&matrix + &matrix.adjoint()).scale_real(0.5);
        let min = eigh(&hermitian, tol)?.values.first().copied().unwrap_or(0.0);
        if min < -tol.threshold(1.0) {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { dim, matrix: hermitian })
    }

    pub(crate) fn from_parts_unchecked(dim: usize, matrix: ComplexMatrix) -> Self {
        Self { dim, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn pure(psi: &PureState) -> Self {
        Self { dim: psi.dim, matrix: psi.projector() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let d = dim * dim;
        Self { dim, matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64) }
    }

    /// `(U ⊗ V) ρ (U ⊗ V)†`.
    pub fn conjugate_local(&self, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Self> {
        check_local(self.dim, u, v)?;
        let w = u.kron(v);
        let m = &(&w * &self.matrix) * &w.adjoint();
        let m = (&m + &m.adjoint()).scale_real(0.5);
        Ok(Self { dim: self.dim, matrix: m })
    }

    /// `⟨ψ|ρ|ψ⟩` for a vector of matching length.
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        crate::numerics::inner(psi, &self.matrix.apply(psi))
    }
}

fn check_local(dim: usize, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<()> {
    for m in [u, v] {
        if m.rows() != dim || m.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "local operator is {}x{}, expected {dim}x{dim}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(())
}

/// Matrix `A` with `A[(j, l)]` the amplitude of `|j l⟩`.
pub fn matrix_rep(psi: &PureState) -> ComplexMatrix {
    ComplexMatrix::from_fn(psi.dim, psi.dim, |j, l| psi.amplitudes[j * psi.dim + l])
}

/// Schmidt decomposition from the SVD `U A Vᵗ = diag(s)`: `λ = s²`,
/// `|e_m⟩` is column `m` of `U†` and `|f_m⟩` is the conjugate of row `m` of `V`.
pub fn schmidt_decompose(psi: &PureState, tol: &Tolerance) -> Result<SchmidtForm> {
    let a = matrix_rep(psi);
    let d = svd(&a, tol)?;
    let coefficients = d.s.iter().map(|s| s * s).collect();
    Ok(SchmidtForm { coefficients, basis_a: d.u.adjoint(), basis_b: d.v.adjoint() })
}

/// `Σ_k p_k |ψ_k⟩⟨ψ_k|`.
pub fn mix(ens: &Ensemble) -> DensityMatrix {
    let d = ens.dim() * ens.dim();
    let mut m = ComplexMatrix::zeros(d, d);
    for (p, s) in ens.probs.iter().zip(&ens.states) {
        let a = &s.amplitudes;
        for i in 0..d {
            let ai = a[i] * *p;
            if ai == ZERO {
                continue;
            }
            for j in 0..d {
                m[(i, j)] += ai * a[j].conj();
            }
        }
    }
    DensityMatrix::from_parts_unchecked(ens.dim(), m)
}

/// Eigen-ensemble of `ρ`: eigenvalues above [`SPECTRAL_CUTOFF`] with their
/// eigenvectors, in ascending eigenvalue order. Degenerate eigenspaces come
/// back in whatever basis the eigensolver produced.
pub fn spectral_ensemble(rho: &DensityMatrix, tol: &Tolerance) -> Result<Ensemble> {
    let e = eigh(&rho.matrix, tol)?;
    let mut probs = Vec::new();
    let mut states = Vec::new();
    for (k, &lambda) in e.values.iter().enumerate() {
        if lambda > SPECTRAL_CUTOFF {
            probs.push(lambda);
            states.push(PureState::normalized(rho.dim, e.vectors.column(k))?);
        }
    }
    if states.is_empty() {
        return Err(Error::InvalidDensity("no eigenvalue above cutoff".into()));
    }
    Ensemble::new(probs, states)
}

/// Re-mixes an ensemble through an isometry `W` (`S x K`, `W†W = I`):
/// `|φ_s⟩ ∝ Σ_k W[(s, k)] √p_k |ψ_k⟩` with weight `q_s` the squared norm.
/// Rows whose weight is at most `tol.eps` are dropped.
pub fn mixture_transform(ens: &Ensemble, w: &ComplexMatrix, tol: &Tolerance) -> Result<Ensemble> {
    let k = ens.len();
    if w.cols() != k {
        return Err(Error::DimensionMismatch(format!(
            "isometry has {} columns for {k} ensemble members",
            w.cols()
        )));
    }
    let deviation = (&(&w.adjoint() * w) - &ComplexMatrix::identity(k)).frobenius_norm();
    if !tol.accepts(deviation, (k as f64).sqrt()) {
        return Err(Error::NotIsometry { deviation });
    }
    let len = ens.dim() * ens.dim();
    let roots: Vec<f64> = ens.probs.iter().map(|p| p.sqrt()).collect();
    let mut probs = Vec::new();
    let mut states = Vec::new();
    for s in 0..w.rows() {
        let mut v = vec![ZERO; len];
        for (kk, st) in ens.states.iter().enumerate() {
            let c = w[(s, kk)] * roots[kk];
            for (x, &a) in v.iter_mut().zip(&st.amplitudes) {
                *x += c * a;
            }
        }
        let q = norm(&v).powi(2);
        if q > tol.eps {
            probs.push(q);
            states.push(PureState::normalized(ens.dim(), v)?);
        }
    }
    let total: f64 = probs.iter().sum();
    // dropped rows carry at most S * eps of weight; fold it back in
    let probs = probs.into_iter().map(|p| p / total).collect();
    Ensemble::new(probs, states)
}

/// Partial transpose on the second factor of an `n² x n²` matrix:
/// entry `((i,j),(k,l))` of the result is entry `((i,l),(k,j))` of the input.
pub fn partial_transpose_b_matrix(m: &ComplexMatrix, n: usize) -> ComplexMatrix {
    assert_eq!(m.rows(), n * n, "partial transpose shape");
    ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        let (i, j) = (r / n, r % n);
        let (k, l) = (c / n, c % n);
        m[(i * n + l, k * n + j)]
    })
}

pub fn partial_transpose_b(rho: &DensityMatrix) -> ComplexMatrix {
    partial_transpose_b_matrix(&rho.matrix, rho.dim)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptVerdict {
    pub ppt: bool,
    pub min_eigenvalue: f64,
}

/// PPT test: the smallest eigenvalue of `ρ^{T_B}` is at least `-tol.eps`.
pub fn is_ppt(rho: &DensityMatrix, tol: &Tolerance) -> Result<PptVerdict> {
    let pt = partial_transpose_b(rho);
    let min_eigenvalue = eigh(&pt, tol)?.values[0];
    Ok(PptVerdict { ppt: min_eigenvalue >= -tol.eps, min_eigenvalue })
}

/// `Tr_A |ψ⟩⟨ψ| = Aᵗ Ā`.
pub fn reduced_density_b(psi: &PureState) -> ComplexMatrix {
    let a = matrix_rep(psi);
    &a.transpose() * &a.conj()
}

/// `Tr_B |ψ⟩⟨ψ| = A A†`.
pub fn reduced_density_a(psi: &PureState) -> ComplexMatrix {
    let a = matrix_rep(psi);
    &a * &a.adjoint()
}
