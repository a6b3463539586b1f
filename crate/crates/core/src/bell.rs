//! Generalized Bell bases built from `n` complex Hadamard matrices, one
//! per cyclic shift.
//!
//! With 0-based labels, shift `s` and column `l` give
//! `|ψ_l^s⟩ = n^{-1/2} Σ_j Φ^s_{j,l} |j, (j+s) mod n⟩`. States are stored
//! with `s` outer and `l` inner, so `|ψ_l^s⟩` sits at index `s·n + l`.

use crate::error::{Error, Result};
use crate::hadamard::{fourier, is_hadamard, HadamardCandidate};
use crate::numerics::{inner, ComplexMatrix, Tolerance, C64, ZERO};
use crate::states::{reduced_density_a, reduced_density_b, DensityMatrix, PureState, NORM_EPS};

#[derive(Debug, Clone)]
pub struct BellBasis {
    n: usize,
    hadamards: Vec<HadamardCandidate>,
    states: Vec<PureState>,
}

impl BellBasis {
    /// Builds the basis from one Hadamard matrix per shift.
    pub fn new(hadamards: Vec<HadamardCandidate>, tol: &Tolerance) -> Result<Self> {
        let n = hadamards
            .first()
            .ok_or_else(|| Error::InvalidArgument("no Hadamard matrices given".into()))?
            .order();
        if let Some(h) = hadamards.iter().find(|h| h.order() != n) {
            return Err(Error::OrderMismatch { expected: n, found: h.order() });
        }
        if hadamards.len() != n {
            return Err(Error::WrongCount { expected: n, found: hadamards.len() });
        }
        for h in &hadamards {
            if !is_hadamard(h.matrix(), tol)? {
                return Err(Error::NotHadamard);
            }
        }
        let scale = 1.0 / (n as f64).sqrt();
        let mut states = Vec::with_capacity(n * n);
        for (s, h) in hadamards.iter().enumerate() {
            for l in 0..n {
                let mut amp = vec![ZERO; n * n];
                for j in 0..n {
                    amp[j * n + (j + s) % n] = h.matrix()[(j, l)] * scale;
                }
                states.push(PureState::normalized(n, amp)?);
            }
        }
        Ok(Self { n, hadamards, states })
    }

    /// Same Hadamard matrix in every shift slot.
    pub fn replicated(h: HadamardCandidate, tol: &Tolerance) -> Result<Self> {
        let n = h.order();
        Self::new(vec![h; n], tol)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn hadamards(&self) -> &[HadamardCandidate] {
        &self.hadamards
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    /// `|ψ_l^s⟩`, 0-based.
    pub fn state(&self, s: usize, l: usize) -> &PureState {
        &self.states[s * self.n + l]
    }

    /// `max |⟨ψ_a|ψ_b⟩ − δ_ab|` over all pairs.
    pub fn gram_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, x) in self.states.iter().enumerate() {
            for (b, y) in self.states.iter().enumerate() {
                let target = if a == b { C64::new(1.0, 0.0) } else { ZERO };
                worst = worst.max((inner(x.amplitudes(), y.amplitudes()) - target).norm());
            }
        }
        worst
    }
}

/// Bell basis with `F_n` in every slot: `|ψ_l^s⟩ = (I ⊗ X^s Z^l)|Φ⁺⟩`.
pub fn weyl_basis(n: usize) -> BellBasis {
    BellBasis::replicated(fourier(n), &Tolerance::default()).expect("Fourier matrices are Hadamard")
}

/// Largest Frobenius deviation of the two reduced states from `I/n`.
pub fn max_entanglement_residual(psi: &PureState) -> f64 {
    let n = psi.dim();
    let target = ComplexMatrix::identity(n).scale_real(1.0 / n as f64);
    let ra = (&reduced_density_a(psi) - &target).frobenius_norm();
    let rb = (&reduced_density_b(psi) - &target).frobenius_norm();
    ra.max(rb)
}

pub fn verify_max_entangled(psi: &PureState, tol: &Tolerance) -> bool {
    max_entanglement_residual(psi) <= tol.eps
}

/// Coefficients `⟨ψ_a|ρ|ψ_b⟩` with state indices ordered as in [`BellBasis`].
#[derive(Debug, Clone)]
pub struct BellDecomposition {
    n: usize,
    coefficients: ComplexMatrix,
}

/// One entry of the flat coefficient table, all labels 0-based:
/// `value = ⟨ψ_l^k|ρ|ψ_m^j⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellCoefficient {
    pub l: usize,
    pub k: usize,
    pub m: usize,
    pub j: usize,
    pub value: C64,
}

impl BellDecomposition {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.coefficients
    }

    /// `ρ_{lk,mj} = ⟨ψ_l^k|ρ|ψ_m^j⟩`.
    pub fn coefficient(&self, l: usize, k: usize, m: usize, j: usize) -> C64 {
        self.coefficients[(k * self.n + l, j * self.n + m)]
    }

    /// Entries with `|value| > cutoff`, row-major in `(k, l)` then `(j, m)`.
    pub fn table(&self, cutoff: f64) -> Vec<BellCoefficient> {
        let n = self.n;
        let d = n * n;
        let mut out = Vec::new();
        for a in 0..d {
            for b in 0..d {
                let value = self.coefficients[(a, b)];
                if value.norm() > cutoff {
                    out.push(BellCoefficient { l: a % n, k: a / n, m: b % n, j: b / n, value });
                }
            }
        }
        out
    }

    /// `Σ ρ_{lk,mj} |ψ_l^k⟩⟨ψ_m^j|`.
    pub fn reconstruct(&self, basis: &BellBasis) -> ComplexMatrix {
        let w = basis_columns(basis);
        &(&w * &self.coefficients) * &w.adjoint()
    }
}

fn basis_columns(basis: &BellBasis) -> ComplexMatrix {
    let cols: Vec<Vec<C64>> = basis.states.iter().map(|s| s.amplitudes().to_vec()).collect();
    ComplexMatrix::from_columns(&cols)
}

pub fn decompose(rho: &DensityMatrix, basis: &BellBasis) -> Result<BellDecomposition> {
    if rho.dim() != basis.n {
        return Err(Error::DimensionMismatch(format!(
            "state of local dimension {} against a basis of order {}",
            rho.dim(),
            basis.n
        )));
    }
    let w = basis_columns(basis);
    let coefficients = &(&w.adjoint() * rho.matrix()) * &w;
    Ok(BellDecomposition { n: basis.n, coefficients })
}

/// `Σ_l p_l |ψ_l^s⟩⟨ψ_l^s|` for a fixed 0-based shift `s`. Zero weights are allowed.
pub fn fixed_shift_mixture(basis: &BellBasis, s: usize, probs: &[f64]) -> Result<DensityMatrix> {
    let n = basis.n;
    if s >= n {
        return Err(Error::InvalidArgument(format!("shift {s} outside 0..{n}")));
    }
    if probs.len() != n {
        return Err(Error::DimensionMismatch(format!("{} weights for {n} states", probs.len())));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidEnsemble("weights must be nonnegative".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > NORM_EPS {
        return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
    }
    let d = n * n;
    let mut m = ComplexMatrix::zeros(d, d);
    for (l, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            let proj = basis.state(s, l).projector().scale_real(p);
            m = &m + &proj;
        }
    }
    DensityMatrix::new(n, m, &Tolerance::default())
}
