//! Small dense linear algebra and the numerical kernels shared by the rest of the crate:
//! Jacobi eigensolvers, a simplex LP solver and a Nelder–Mead minimizer.

mod cmatrix;
mod eig;
mod lp;
mod nelder_mead;
mod rmatrix;

use thiserror::Error;

pub use cmatrix::{inner, kron_vec, random_unitary, vec_norm, CMatrix};
pub use eig::{herm_eig, project_psd, project_psd_sym, psd_part, sym_eig, sym_eig_with_basis, HermEig, SymEig};
pub use lp::{solve_lp, Constraint, LpProblem, LpSolution, Sense};
pub use nelder_mead::{minimize, MinimizeResult, NelderMeadOptions};
pub use rmatrix::{Cholesky, RMatrix};

pub use num_complex::Complex64;

pub const DEFAULT_EIG_TOL: f64 = 1e-12;
pub const DEFAULT_LP_TOL: f64 = 1e-9;
pub const DEFAULT_MIN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MathError {
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("iteration did not converge after {sweeps} sweeps (residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
}

/// Shorthand for a real complex number.
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
