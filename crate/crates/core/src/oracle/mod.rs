//! Brute-force master-equation verifier.
//!
//! Everything in [`crate::rates`] is perturbative. This module builds the
//! full tripartite Hamiltonian and its Lindblad dissipators on a truncated
//! Fock space and evolves the density matrix
//!
//!   dρ/dt = −i[H, ρ] + 2κ D[a]ρ + γ D[σ₋]ρ
//!           + γ_th(m_th+1) D[b]ρ + γ_th m_th D[b†]ρ,
//!
//! with D[c]ρ = cρc† − ½{c†c, ρ}, so that steady-state observables and the
//! exponential phonon relaxation rate can be extracted with no perturbative
//! input and compared against the closed forms.
//!
//! The slow mechanical rates (Γ scales as Ω²χ²) make brute-force fixed-step
//! integration to the stationary state hopeless at realistic operating
//! points, so three complementary drivers are provided: a fixed-step RK4
//! integrator for short horizons ([`evolve`]), exact propagation through the
//! eigendecomposition of the vectorized generator for arbitrarily long
//! horizons ([`evolve_spectral`]), and a direct linear solve for the kernel
//! of the generator ([`steady_state_linsolve`]).

mod fit;
mod master;
mod operators;
mod propagate;

pub use fit::{fit_cooling_rate, FitResult};
pub use master::{build_hamiltonian, lindblad_rhs, liouvillian_matrix, MasterOperator};
pub use operators::OperatorSet;
pub use propagate::{
    evolve, evolve_spectral, steady_state, steady_state_evolution, steady_state_linsolve,
    EvolveOptions, EvolveOutput, ObservableSeries, SpectralRun, SteadyStateOptions,
};

use ndarray::Array2;
use ndarray_linalg::EigValsh;
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Dense complex matrix on the truncated tripartite Hilbert space.
pub type CMat = Array2<C64>;

/// Default cap on the total Hilbert-space dimension 2(n_cav+1)(n_mech+1).
pub const DEFAULT_DIM_LIMIT: usize = 512;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("Hilbert-space dimension {dim} exceeds the configured limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },
    #[error("truncation must keep at least one excited level per bosonic mode")]
    BadTruncation,
    #[error("basis label (atom {atom}, cav {cav}, mech {mech}) out of range")]
    BadBasisState { atom: usize, cav: usize, mech: usize },
    #[error("trace drifted by {drift:.3e} at t = {t:.3e} even after {halvings} step halvings")]
    TraceDrift { drift: f64, t: f64, halvings: u32 },
    #[error("no steady state within t = {max_time:.3e}; rhs norm {residual:.3e}")]
    NonConvergence { max_time: f64, residual: f64 },
    #[error("eigen-expansion ill-conditioned: residual {residual:.3e}")]
    IllConditioned { residual: f64 },
    #[error("state failed a physicality check: {0}")]
    Nonphysical(String),
    #[error("linear-algebra backend: {0}")]
    Backend(String),
}

impl From<ndarray_linalg::error::LinalgError> for OracleError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        OracleError::Backend(e.to_string())
    }
}

/// Fock-space truncation: cavity levels 0..=n_cav_max, mechanical levels
/// 0..=n_mech_max, atom always two-level. Tensor ordering is fixed as
/// atom ⊗ cavity ⊗ mechanics with the atom index slowest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    n_cav_max: usize,
    n_mech_max: usize,
    dim_limit: usize,
}

impl Truncation {
    pub fn new(n_cav_max: usize, n_mech_max: usize) -> Result<Self, OracleError> {
        Self::with_limit(n_cav_max, n_mech_max, DEFAULT_DIM_LIMIT)
    }

    pub fn with_limit(
        n_cav_max: usize,
        n_mech_max: usize,
        dim_limit: usize,
    ) -> Result<Self, OracleError> {
        if n_cav_max < 1 || n_mech_max < 1 {
            return Err(OracleError::BadTruncation);
        }
        let trunc = Self { n_cav_max, n_mech_max, dim_limit };
        if trunc.dim() > dim_limit {
            return Err(OracleError::DimensionLimit { dim: trunc.dim(), limit: dim_limit });
        }
        Ok(trunc)
    }

    pub fn n_cav_max(&self) -> usize {
        self.n_cav_max
    }

    pub fn n_mech_max(&self) -> usize {
        self.n_mech_max
    }

    /// Total dimension 2(n_cav_max+1)(n_mech_max+1).
    pub fn dim(&self) -> usize {
        2 * (self.n_cav_max + 1) * (self.n_mech_max + 1)
    }

    /// Flat index of |atom, cav, mech⟩; atom ∈ {0 = g, 1 = e}.
    pub fn index(&self, atom: usize, cav: usize, mech: usize) -> usize {
        (atom * (self.n_cav_max + 1) + cav) * (self.n_mech_max + 1) + mech
    }
}

/// A density matrix tagged with its truncation.
#[derive(Clone, Debug)]
pub struct QuantumState {
    rho: CMat,
    trunc: Truncation,
}

impl QuantumState {
    /// |g, 0, 0⟩⟨g, 0, 0|.
    pub fn ground(trunc: Truncation) -> Self {
        Self::basis_state(trunc, 0, 0, 0).unwrap()
    }

    /// Pure product basis state |atom, cav, mech⟩.
    pub fn basis_state(
        trunc: Truncation,
        atom: usize,
        cav: usize,
        mech: usize,
    ) -> Result<Self, OracleError> {
        if atom > 1 || cav > trunc.n_cav_max() || mech > trunc.n_mech_max() {
            return Err(OracleError::BadBasisState { atom, cav, mech });
        }
        let dim = trunc.dim();
        let mut rho = CMat::zeros((dim, dim));
        let idx = trunc.index(atom, cav, mech);
        rho[[idx, idx]] = C64::new(1.0, 0.0);
        Ok(Self { rho, trunc })
    }

    /// Wrap an externally built density matrix, enforcing unit trace
    /// (within 1e−9) and Hermiticity (within 1e−12).
    pub fn from_density_matrix(trunc: Truncation, rho: CMat) -> Result<Self, OracleError> {
        let dim = trunc.dim();
        if rho.shape() != [dim, dim] {
            return Err(OracleError::Nonphysical(format!(
                "shape {:?} does not match dimension {dim}",
                rho.shape()
            )));
        }
        let trace: C64 = rho.diag().sum();
        if (trace - 1.0).norm() > 1e-9 {
            return Err(OracleError::Nonphysical(format!("trace = {trace}, expected 1")));
        }
        let herm = hermiticity_defect(&rho);
        if herm > 1e-12 {
            return Err(OracleError::Nonphysical(format!("Hermiticity defect {herm:.3e}")));
        }
        Ok(Self { rho, trunc })
    }

    /// Clean up solver output: symmetrize and normalize the trace, then wrap.
    pub(crate) fn hermitized(trunc: Truncation, rho: &CMat) -> Self {
        let mut clean = CMat::zeros(rho.raw_dim());
        for i in 0..rho.nrows() {
            for j in 0..rho.ncols() {
                clean[[i, j]] = 0.5 * (rho[[i, j]] + rho[[j, i]].conj());
            }
        }
        let trace: C64 = clean.diag().sum();
        clean.mapv_inplace(|z| z / trace);
        Self { rho: clean, trunc }
    }

    pub fn rho(&self) -> &CMat {
        &self.rho
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn trace(&self) -> C64 {
        self.rho.diag().sum()
    }

    /// tr(Oρ).
    pub fn expectation(&self, op: &CMat) -> C64 {
        trace_of_product(op, &self.rho)
    }

    /// Full physicality audit: unit trace (1e−9), Hermiticity (1e−12),
    /// spectrum bounded below by −1e−9.
    pub fn check_physical(&self) -> Result<(), OracleError> {
        let trace = self.trace();
        if (trace - 1.0).norm() > 1e-9 {
            return Err(OracleError::Nonphysical(format!("trace = {trace}")));
        }
        let herm = hermiticity_defect(&self.rho);
        if herm > 1e-12 {
            return Err(OracleError::Nonphysical(format!("Hermiticity defect {herm:.3e}")));
        }
        let symmetrized = QuantumState::hermitized(self.trunc, &self.rho);
        let eigs = symmetrized
            .rho
            .eigvalsh(ndarray_linalg::UPLO::Lower)
            .map_err(OracleError::from)?;
        let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-9 {
            return Err(OracleError::Nonphysical(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

pub(crate) fn trace_of_product(op: &CMat, rho: &CMat) -> C64 {
    let n = op.nrows();
    let mut sum = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            sum += op[[i, j]] * rho[[j, i]];
        }
    }
    sum
}

pub(crate) fn hermiticity_defect(m: &CMat) -> f64 {
    let mut defect = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            defect = defect.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    defect
}

pub(crate) fn frobenius_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
