//! ADMM for `max g·t  s.t.  D t + X₀ ∈ K`, where `K` is the PSD cone of the
//! (reduced) moment matrix times one nonnegative ray per inequality slack.

use serde::{Deserialize, Serialize};

use super::{NpaError, NpaProblem};
use crate::mathcore::{psd_part, sym_eig, sym_eig_with_basis, RMatrix, DEFAULT_EIG_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpOptions {
    pub rho: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { rho: 1.0, tol: 1e-8, max_iter: 200_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    MaxIter,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// Objective at `moment_matrix`.
    pub value: f64,
    pub moment_matrix: RMatrix,
    /// Inequality slacks `rhs − lhs` at `moment_matrix`.
    pub slacks: Vec<f64>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

impl SdpSolution {
    pub fn min_eigenvalue(&self) -> Result<f64, NpaError> {
        Ok(sym_eig(&self.moment_matrix, DEFAULT_EIG_TOL)?.eigenvalues[0])
    }
}

const BALANCE_EVERY: usize = 20;
const BALANCE_RATIO: f64 = 10.0;
const RHO_RANGE: (f64, f64) = (1e-6, 1e6);

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn solve(p: &NpaProblem, opts: &SdpOptions) -> Result<SdpSolution, NpaError> {
    let model = p.model();
    let k = model.face_dim;
    let block = k * k;
    let len = block + model.slack_offset.len();
    let d = model.dim();

    let mut x0 = model.x0_block.clone();
    x0.extend(model.slack_offset.iter().zip(p.inequalities()).map(|(o, i)| o + i.rhs));

    let mut rho = opts.rho.clamp(RHO_RANGE.0, RHO_RANGE.1);
    let mut t = vec![0.0; d];
    let (mut z, mut basis) = project(&x0, k, None)?;
    let mut u = vec![0.0; len];
    let mut x = vec![0.0; len];
    let mut work = vec![0.0; len];
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);
    let mut iterations = 0;
    let mut status = SolveStatus::MaxIter;

    while iterations < opts.max_iter {
        iterations += 1;
        // t = (DᵀD)⁻¹ (g/ρ + Dᵀ(Z − U − X₀))
        for i in 0..len {
            work[i] = z[i] - u[i] - x0[i];
        }
        model.adjoint(&work, &mut t);
        for (ti, gi) in t.iter_mut().zip(&model.grad) {
            *ti += gi / rho;
        }
        model.solve_normal(&mut t);

        model.apply(&t, &mut x);
        for i in 0..len {
            x[i] += x0[i];
            work[i] = x[i] + u[i];
        }
        let (z_new, new_basis) = project(&work, k, Some(&basis))?;
        basis = new_basis;

        primal = dist(&x, &z_new);
        dual = rho * dist(&z_new, &z);
        for i in 0..len {
            u[i] += x[i] - z_new[i];
        }
        z = z_new;

        if primal < opts.tol && dual < opts.tol {
            status = SolveStatus::Converged;
            break;
        }
        if iterations % BALANCE_EVERY == 0 {
            if primal > BALANCE_RATIO * dual && rho * 2.0 <= RHO_RANGE.1 {
                rho *= 2.0;
                u.iter_mut().for_each(|v| *v *= 0.5);
            } else if dual > BALANCE_RATIO * primal && rho / 2.0 >= RHO_RANGE.0 {
                rho /= 2.0;
                u.iter_mut().for_each(|v| *v *= 2.0);
            }
        }
    }

    let s = p.structure();
    let moment_matrix = model.full_matrix(s, &t);
    let moments = s.moments_of(&moment_matrix);
    let slacks = p.inequalities().iter().map(|i| i.rhs - s.evaluate(&i.coeffs, &moments)).collect();
    let value = model.value_offset + model.grad.iter().zip(&t).map(|(a, b)| a * b).sum::<f64>();
    Ok(SdpSolution { value, moment_matrix, slacks, primal_residual: primal, dual_residual: dual, iterations, status })
}

/// Projection onto the cone; also returns the eigenbasis for the next warm start.
fn project(v: &[f64], k: usize, basis: Option<&RMatrix>) -> Result<(Vec<f64>, RMatrix), NpaError> {
    let block = RMatrix::from_vec(k, k, v[..k * k].to_vec());
    let eig = sym_eig_with_basis(&block, basis, DEFAULT_EIG_TOL)?;
    let mut out = psd_part(&eig).as_slice().to_vec();
    out.extend(v[k * k..].iter().map(|s| s.max(0.0)));
    Ok((out, eig.eigenvectors))
}
