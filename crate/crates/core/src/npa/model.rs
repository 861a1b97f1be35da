//! Dense affine parameterization `t ↦ (Vᵀ Γ(y) V, slacks(y))`, `y = y₀ + B t`.
//!
//! Without a known kernel, `V = I`, `B = I` and `y₀ = 0`. With kernel vectors `K`
//! (so `Γ K = 0` on every feasible point), `V` spans `K^⊥` and `B` spans the
//! free class values compatible with `Γ(y) K = 0`.

use super::{MomentStructure, NpaError};
use crate::mathcore::{sym_eig, Cholesky, RMatrix, DEFAULT_EIG_TOL};

const RANK_TOL: f64 = 1e-10;

#[derive(Debug)]
pub struct AffineModel {
    /// Side length of the reduced PSD block.
    pub face_dim: usize,
    y_offset: Vec<f64>,
    y_basis: RMatrix,
    /// Columns are images of the basis directions, vectorized as the full
    /// reduced block (row-major) followed by the slacks.
    columns: RMatrix,
    /// Reduced-block part of the image of `y₀`, including the identity cell.
    pub x0_block: Vec<f64>,
    /// `−coeffs[0] − coeffs·y₀` per inequality; the solver adds the right-hand side.
    pub slack_offset: Vec<f64>,
    /// Objective gradient in `t`.
    pub grad: Vec<f64>,
    /// Objective at `t = 0`.
    pub value_offset: f64,
    factor: Cholesky,
}

fn gamma_of(s: &MomentStructure, y: &[f64], with_identity: bool) -> RMatrix {
    let n = s.size();
    RMatrix::from_fn(n, n, |i, j| match s.cell_class(i, j) {
        0 if with_identity => 1.0,
        0 => 0.0,
        k => y[k - 1],
    })
}

/// Eigenpairs `(λ, v)` spanning the range.
type Range = Vec<(f64, Vec<f64>)>;

/// Orthonormal bases of the (near-)null space and the range of a symmetric PSD matrix.
fn split_spaces(g: &RMatrix) -> Result<(RMatrix, Range), NpaError> {
    let n = g.rows();
    let eig = sym_eig(g, DEFAULT_EIG_TOL)?;
    let scale = eig.eigenvalues.last().copied().unwrap_or(0.0).max(1.0);
    let null: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] <= RANK_TOL * scale).collect();
    let null_basis = RMatrix::from_fn(n, null.len(), |i, k| eig.eigenvectors[(i, null[k])]);
    let range = (0..n)
        .filter(|&k| eig.eigenvalues[k] > RANK_TOL * scale)
        .map(|k| (eig.eigenvalues[k], (0..n).map(|i| eig.eigenvectors[(i, k)]).collect()))
        .collect();
    Ok((null_basis, range))
}

impl AffineModel {
    pub fn new(
        s: &MomentStructure,
        objective: &[f64],
        rows: &[Vec<f64>],
        kernel: &[Vec<f64>],
    ) -> Result<Self, NpaError> {
        let n = s.size();
        let m = s.num_classes() - 1;

        // Linear conditions (Γ(y) v)_i = 0 as E y = f.
        let mut e_rows: Vec<Vec<f64>> = Vec::new();
        let mut f: Vec<f64> = Vec::new();
        for v in kernel {
            for i in 0..n {
                let mut row = vec![0.0; m];
                let mut rhs = 0.0;
                for (j, &vj) in v.iter().enumerate() {
                    match s.cell_class(i, j) {
                        0 => rhs -= vj,
                        k => row[k - 1] += vj,
                    }
                }
                if row.iter().any(|&x| x != 0.0) || rhs != 0.0 {
                    e_rows.push(row);
                    f.push(rhs);
                }
            }
        }

        let (y_offset, y_basis) = if e_rows.is_empty() {
            (vec![0.0; m], RMatrix::identity(m))
        } else {
            let ete = RMatrix::from_fn(m, m, |a, b| e_rows.iter().map(|r| r[a] * r[b]).sum());
            let etf: Vec<f64> = (0..m).map(|a| e_rows.iter().zip(&f).map(|(r, fi)| r[a] * fi).sum()).collect();
            let (null, range) = split_spaces(&ete)?;
            let mut y0 = vec![0.0; m];
            for (lambda, v) in &range {
                let coef = v.iter().zip(&etf).map(|(a, b)| a * b).sum::<f64>() / lambda;
                for (y, vi) in y0.iter_mut().zip(v) {
                    *y += coef * vi;
                }
            }
            let worst = e_rows
                .iter()
                .zip(&f)
                .map(|(r, fi)| (r.iter().zip(&y0).map(|(a, b)| a * b).sum::<f64>() - fi).abs())
                .fold(0.0, f64::max);
            if worst > 1e-9 {
                return Err(NpaError::InconsistentFace);
            }
            (y0, null)
        };

        let face = if kernel.is_empty() {
            RMatrix::identity(n)
        } else {
            let k = RMatrix::from_fn(n, n, |i, j| kernel.iter().map(|v| v[i] * v[j]).sum());
            split_spaces(&k)?.0
        };
        let face_dim = face.cols();
        let face_t = face.transpose();
        let reduce = |g: &RMatrix| -> Vec<f64> {
            let w = face_t.matmul(g).matmul(&face);
            // Exact symmetry keeps every later combination symmetric.
            let w = RMatrix::from_fn(face_dim, face_dim, |i, j| 0.5 * (w[(i, j)] + w[(j, i)]));
            w.as_slice().to_vec()
        };

        let d = y_basis.cols();
        let block = face_dim * face_dim;
        let mut columns = RMatrix::zeros(block + rows.len(), d);
        for k in 0..d {
            let dir: Vec<f64> = (0..m).map(|a| y_basis[(a, k)]).collect();
            for (i, v) in reduce(&gamma_of(s, &dir, false)).into_iter().enumerate() {
                columns[(i, k)] = v;
            }
            for (r, row) in rows.iter().enumerate() {
                columns[(block + r, k)] = -row[1..].iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        let x0_block = reduce(&gamma_of(s, &y_offset, true));
        let slack_offset =
            rows.iter().map(|row| -row[0] - row[1..].iter().zip(&y_offset).map(|(a, b)| a * b).sum::<f64>()).collect();
        let grad = (0..d).map(|k| (0..m).map(|a| objective[a + 1] * y_basis[(a, k)]).sum()).collect();
        let value_offset = objective[0] + objective[1..].iter().zip(&y_offset).map(|(a, b)| a * b).sum::<f64>();

        let h = columns.transpose().matmul(&columns);
        let factor = Cholesky::factor(&h).ok_or(NpaError::Singular)?;
        Ok(Self { face_dim, y_offset, y_basis, columns, x0_block, slack_offset, grad, value_offset, factor })
    }

    pub fn dim(&self) -> usize {
        self.y_basis.cols()
    }

    /// Image of `t` without the constant part.
    pub fn apply(&self, t: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let d = self.dim();
        let cols = self.columns.as_slice();
        for (i, o) in out.iter_mut().enumerate() {
            let row = &cols[i * d..(i + 1) * d];
            *o = row.iter().zip(t).map(|(a, b)| a * b).sum();
        }
    }

    pub fn adjoint(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let d = self.dim();
        let cols = self.columns.as_slice();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(&cols[i * d..(i + 1) * d]) {
                *o += a * xi;
            }
        }
    }

    pub fn solve_normal(&self, b: &mut [f64]) {
        self.factor.solve_in_place(b);
    }

    /// Free class values for parameters `t`.
    pub fn class_values(&self, t: &[f64]) -> Vec<f64> {
        let mut y = self.y_offset.clone();
        for (a, ya) in y.iter_mut().enumerate() {
            *ya += (0..self.dim()).map(|k| self.y_basis[(a, k)] * t[k]).sum::<f64>();
        }
        y
    }

    pub fn full_matrix(&self, s: &MomentStructure, t: &[f64]) -> RMatrix {
        gamma_of(s, &self.class_values(t), true)
    }
}
