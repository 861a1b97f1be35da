//! Cyclic Jacobi eigensolvers.
//!
//! Sweeps visit the upper triangle in fixed row-major order, so the output is a
//! deterministic function of the input bits.

use num_complex::Complex64;

use super::{CMatrix, MathError, RMatrix};

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition of a Hermitian matrix: `H = V diag(λ) V†`.
#[derive(Clone, Debug)]
pub struct HermEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

impl HermEig {
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        CMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj()).sum())
    }
}

/// Real symmetric counterpart of [`HermEig`].
#[derive(Clone, Debug)]
pub struct SymEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: RMatrix,
}

fn check_square(rows: usize, cols: usize) -> Result<usize, MathError> {
    if rows != cols || rows == 0 {
        return Err(MathError::DimensionMismatch(format!("expected a nonempty square matrix, got {rows}x{cols}")));
    }
    Ok(rows)
}

fn off_diag_norm_c(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// `tol` bounds both the accepted non-Hermiticity `‖H − H†‖_F` and the final
/// off-diagonal norm (relative to `max(1, ‖H‖_F)`).
pub fn herm_eig(h: &CMatrix, tol: f64) -> Result<HermEig, MathError> {
    let n = check_square(h.rows(), h.cols())?;
    let defect = h.hermiticity_defect();
    if defect > tol {
        return Err(MathError::NotHermitian(defect));
    }
    // Symmetrize so the rotations see an exactly Hermitian matrix.
    let mut a = CMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);
    let scale = h.frobenius_norm().max(1.0);
    let target = tol * scale;
    let skip = target * 1e-3 / n as f64;

    let mut converged = off_diag_norm_c(&a) <= target;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= skip {
                    continue;
                }
                let phase = apq / mag; // e^{iθ}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let ph_conj = phase.conj();
                // A ← A G, with G = [[c, s], [−s e^{−iθ}, c e^{−iθ}]] on (p, q).
                for r in 0..n {
                    let x = a[(r, p)];
                    let y = a[(r, q)];
                    a[(r, p)] = x * c - y * ph_conj * s;
                    a[(r, q)] = x * s + y * ph_conj * c;
                }
                // A ← G† A.
                for r in 0..n {
                    let x = a[(p, r)];
                    let y = a[(q, r)];
                    a[(p, r)] = x * c - y * phase * s;
                    a[(q, r)] = x * s + y * phase * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(app - t * mag, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
                for r in 0..n {
                    let x = v[(r, p)];
                    let y = v[(r, q)];
                    v[(r, p)] = x * c - y * ph_conj * s;
                    v[(r, q)] = x * s + y * ph_conj * c;
                }
            }
        }
        sweeps += 1;
        // One sweep past the threshold: quadratic convergence takes the
        // off-diagonal mass to rounding level.
        if converged {
            break;
        }
        converged = off_diag_norm_c(&a) <= target;
    }
    if !converged {
        return Err(MathError::NoConvergence { sweeps, residual: off_diag_norm_c(&a) });
    }

    let raw: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let order = ascending_order(&raw);
    let mut vecs = CMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        vecs.set_column(k, &v.column(src));
    }
    Ok(HermEig { eigenvalues: order.iter().map(|&i| raw[i]).collect(), eigenvectors: vecs })
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    order
}

/// Frobenius-nearest positive semidefinite matrix: negative eigenvalues clipped to zero.
pub fn project_psd(h: &CMatrix, tol: f64) -> Result<CMatrix, MathError> {
    let eig = herm_eig(h, tol)?;
    let clipped =
        HermEig { eigenvalues: eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect(), eigenvectors: eig.eigenvectors };
    Ok(clipped.reconstruct())
}

fn off_diag_norm_r(a: &RMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// Real symmetric Jacobi, optionally warm-started from an orthogonal basis that
/// nearly diagonalizes `a` (the previous iterate's eigenvectors inside ADMM).
pub fn sym_eig_with_basis(a: &RMatrix, basis: Option<&RMatrix>, tol: f64) -> Result<SymEig, MathError> {
    let n = check_square(a.rows(), a.cols())?;
    let defect = a.symmetry_defect();
    if defect > tol * a.frobenius_norm().max(1.0) {
        return Err(MathError::NotHermitian(defect));
    }
    let sym = RMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let (mut m, mut v) = match basis {
        Some(b) => {
            assert_eq!((b.rows(), b.cols()), (n, n));
            let rotated = b.transpose().matmul(&sym).matmul(b);
            let rotated = RMatrix::from_fn(n, n, |i, j| 0.5 * (rotated[(i, j)] + rotated[(j, i)]));
            (rotated, b.clone())
        }
        None => (sym, RMatrix::identity(n)),
    };
    let target = tol * a.frobenius_norm().max(1.0);
    let skip = target * 1e-3 / n as f64;

    let mut converged = off_diag_norm_r(&m) <= target;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= skip {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let x = m[(r, p)];
                    let y = m[(r, q)];
                    let nx = c * x - s * y;
                    let ny = s * x + c * y;
                    m[(r, p)] = nx;
                    m[(p, r)] = nx;
                    m[(r, q)] = ny;
                    m[(q, r)] = ny;
                }
                m[(p, p)] = app - t * apq;
                m[(q, q)] = aqq + t * apq;
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for r in 0..n {
                    let x = v[(r, p)];
                    let y = v[(r, q)];
                    v[(r, p)] = c * x - s * y;
                    v[(r, q)] = s * x + c * y;
                }
            }
        }
        sweeps += 1;
        if converged {
            break;
        }
        converged = off_diag_norm_r(&m) <= target;
    }
    if !converged {
        return Err(MathError::NoConvergence { sweeps, residual: off_diag_norm_r(&m) });
    }
    let raw: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let order = ascending_order(&raw);
    let vecs = RMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(SymEig { eigenvalues: order.iter().map(|&i| raw[i]).collect(), eigenvectors: vecs })
}

pub fn sym_eig(a: &RMatrix, tol: f64) -> Result<SymEig, MathError> {
    sym_eig_with_basis(a, None, tol)
}

/// `V diag(max(λ, 0)) Vᵀ` for an already computed decomposition.
pub fn psd_part(eig: &SymEig) -> RMatrix {
    let v = &eig.eigenvectors;
    let n = v.rows();
    let mut out = RMatrix::zeros(n, n);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l <= 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = v[(i, k)] * l;
            if vik == 0.0 {
                continue;
            }
            for j in i..n {
                out[(i, j)] += vik * v[(j, k)];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            out[(i, j)] = out[(j, i)];
        }
    }
    out
}

pub fn project_psd_sym(a: &RMatrix, tol: f64) -> Result<RMatrix, MathError> {
    Ok(psd_part(&sym_eig(a, tol)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathcore::{random_unitary, DEFAULT_EIG_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = herm_eig(&CMatrix::identity(3), DEFAULT_EIG_TOL).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
        assert_eq!(e.eigenvectors, CMatrix::identity(3));
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let e = herm_eig(&CMatrix::diag_real(&[2.0, -1.0]), DEFAULT_EIG_TOL).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 2.0]);
        assert_eq!(e.eigenvectors[(1, 0)], c(1.0));
        assert_eq!(e.eigenvectors[(0, 1)], c(1.0));
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = herm_eig(&x, DEFAULT_EIG_TOL).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // (1, -1)/√2 and (1, 1)/√2 up to a phase
        let v0 = e.eigenvectors.column(0);
        let v1 = e.eigenvectors.column(1);
        assert!(((v0[0] * v0[1].conj()).re + 0.5).abs() < 1e-14);
        assert!(((v1[0] * v1[1].conj()).re - 0.5).abs() < 1e-14);
        assert!((v0[0].norm() - h).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(herm_eig(&m, 1e-12), Err(MathError::NotHermitian(_))));
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..7);
            let u = random_unitary(n, &mut rng);
            let lam: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let h = u.matmul(&CMatrix::diag_real(&lam)).matmul(&u.adjoint());
            let h = CMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
            let e = herm_eig(&h, DEFAULT_EIG_TOL).unwrap();
            let err = (&e.reconstruct() - &h).frobenius_norm();
            assert!(err < 1e-12, "n={n} err={err} vals={:?} lam={lam:?}", e.eigenvalues);
            let mut sorted = lam.clone();
            sorted.sort_by(f64::total_cmp);
            for (a, b) in e.eigenvalues.iter().zip(&sorted) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn psd_projection_examples() {
        let p = project_psd(&CMatrix::diag_real(&[3.0, 5.0]), 1e-12).unwrap();
        assert!((&p - &CMatrix::diag_real(&[3.0, 5.0])).frobenius_norm() < 1e-15);
        let p = project_psd(&CMatrix::diag_real(&[-1.0, 2.0]), 1e-12).unwrap();
        assert!((&p - &CMatrix::diag_real(&[0.0, 2.0])).frobenius_norm() < 1e-15);
        let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let p = project_psd(&x, 1e-12).unwrap();
        let expect = CMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!((&p - &expect).frobenius_norm() < 1e-14);
    }

    #[test]
    fn symmetric_warm_start_agrees_with_cold() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 9;
        let mut a = RMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        a = RMatrix::from_fn(n, n, |i, j| a[(i, j)] + a[(j, i)]);
        let cold = sym_eig(&a, 1e-12).unwrap();
        let mut b = a.clone();
        b[(0, 1)] += 1e-3;
        b[(1, 0)] += 1e-3;
        let warm = sym_eig_with_basis(&b, Some(&cold.eigenvectors), 1e-12).unwrap();
        let direct = sym_eig(&b, 1e-12).unwrap();
        for (x, y) in warm.eigenvalues.iter().zip(&direct.eigenvalues) {
            assert!((x - y).abs() < 1e-12);
        }
        let p1 = psd_part(&warm);
        let p2 = psd_part(&direct);
        for (x, y) in p1.as_slice().iter().zip(p2.as_slice()) {
            assert!((x - y).abs() < 1e-11);
        }
    }
}
