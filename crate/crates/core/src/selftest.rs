//! Self-testing of the optimal state: Jordan block decomposition of two projectors,
//! direct sums of optimal blocks, and the ancilla-swap extraction isometry.
//!
//! Basis convention on each local space: index `2k` is the `+` eigenvector of the
//! first setting in block `k`, index `2k + 1` the `−` eigenvector.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mathcore::{herm_eig, inner, vec_norm, CMatrix, Complex64, MathError, DEFAULT_EIG_TOL};
use crate::qubit::{self, analytic_optimum, MeasurementParams};
use crate::scenario::{self, Behavior, BinaryMeasurement, ScenarioError};

/// Tolerance for the block-diagonal structure and projector checks.
pub const BLOCK_TOL: f64 = 1e-10;
/// Eigenvalues of `(P0 − P1)²` closer than this are treated as one Jordan angle.
const CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelftestError {
    #[error("invalid projector: {0}")]
    InvalidProjector(String),
    #[error("invalid weights: {0}")]
    BadWeights(String),
    #[error("local dimension {0} is odd")]
    OddDimension(usize),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error(transparent)]
    Math(#[from] MathError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

fn check_projector(p: &CMatrix, name: &str) -> Result<(), SelftestError> {
    if !p.is_square() {
        return Err(SelftestError::InvalidProjector(format!("{name} is not square")));
    }
    let herm = p.hermiticity_defect();
    let idem = (&p.matmul(p) - p).frobenius_norm();
    if herm > BLOCK_TOL || idem > BLOCK_TOL {
        return Err(SelftestError::InvalidProjector(format!(
            "{name}: hermiticity defect {herm:.2e}, idempotence defect {idem:.2e}"
        )));
    }
    Ok(())
}

/// Orthonormal basis in which two projectors are simultaneously block diagonal
/// with blocks of size 1 or 2.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    /// Unitary whose columns are the new basis vectors.
    pub basis: CMatrix,
    pub blocks: Vec<Range<usize>>,
    /// Restrictions of `P0` to each block, in block order.
    pub p0_blocks: Vec<CMatrix>,
    pub p1_blocks: Vec<CMatrix>,
}

impl BlockDecomposition {
    pub fn two_blocks(&self) -> usize {
        self.blocks.iter().filter(|b| b.len() == 2).count()
    }

    /// Angle between the two projectors' ranges inside each 2×2 block.
    pub fn principal_angles(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .zip(&self.p1_blocks)
            .filter(|(b, _)| b.len() == 2)
            .map(|(_, p1)| p1[(0, 0)].re.clamp(0.0, 1.0).sqrt().acos())
            .collect()
    }

    /// `basis · (⊕ blocks) · basis†` for the chosen setting.
    pub fn reconstruct(&self, setting: usize) -> CMatrix {
        let parts = if setting == 0 { &self.p0_blocks } else { &self.p1_blocks };
        let d = self.basis.rows();
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for (r, blk) in self.blocks.iter().zip(parts) {
            for (i, gi) in r.clone().enumerate() {
                for (j, gj) in r.clone().enumerate() {
                    data[gi * d + gj] = blk[(i, j)];
                }
            }
        }
        let m = CMatrix::from_vec(d, d, data);
        self.basis.matmul(&m).matmul(&self.basis.adjoint())
    }
}

/// Splits the space by the eigenvalues `λ` of `(P0 − P1)²`. Where `λ ∈ {0, 1}` the
/// projectors commute and are diagonalized jointly. Otherwise each `+` vector `e`
/// of `P0` pairs with `f ∝ (I − P0) P1 e`, giving a 2×2 block in which `P0 = diag(1, 0)`
/// and the off-diagonal of `P1` is real and nonnegative.
pub fn block_diagonalize(p0: &CMatrix, p1: &CMatrix) -> Result<BlockDecomposition, SelftestError> {
    check_projector(p0, "P0")?;
    check_projector(p1, "P1")?;
    let d = p0.rows();
    if p1.rows() != d {
        return Err(SelftestError::InvalidProjector(format!("P0 is {d}×{d} but P1 is {0}×{0}", p1.rows())));
    }
    let diff = p0 - p1;
    let sq = diff.matmul(&diff);
    let eig = herm_eig(&sq, DEFAULT_EIG_TOL)?;

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if (l - eig.eigenvalues[c[0]]).abs() < CLUSTER_TOL => c.push(k),
            _ => clusters.push(vec![k]),
        }
    }

    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    let mut blocks = Vec::new();
    let id = CMatrix::identity(d);
    for cluster in clusters {
        let lambda = cluster.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / cluster.len() as f64;
        let w = CMatrix::from_fn(d, cluster.len(), |i, k| eig.eigenvectors[(i, cluster[k])]);
        let wt = w.adjoint();
        if !(CLUSTER_TOL..=1.0 - CLUSTER_TOL).contains(&lambda) {
            // Commuting sector: P0 + 2·P1 separates the joint eigenspaces.
            let combo = &wt.matmul(p0).matmul(&w) + &wt.matmul(p1).matmul(&w).scale(Complex64::new(2.0, 0.0));
            let inner_eig = herm_eig(&combo, DEFAULT_EIG_TOL)?;
            let rotated = w.matmul(&inner_eig.eigenvectors);
            for k in 0..cluster.len() {
                blocks.push(vectors.len()..vectors.len() + 1);
                vectors.push(rotated.column(k));
            }
        } else {
            let local = wt.matmul(p0).matmul(&w);
            let inner_eig = herm_eig(&local, DEFAULT_EIG_TOL)?;
            let plus: Vec<usize> = (0..cluster.len()).filter(|&k| inner_eig.eigenvalues[k] > 0.5).collect();
            if 2 * plus.len() != cluster.len() {
                return Err(SelftestError::InvalidProjector(format!(
                    "sector with angle parameter {lambda:.3e} has {} of {} dimensions in the range of P0",
                    plus.len(),
                    cluster.len()
                )));
            }
            let complement = &id - p0;
            for &k in &plus {
                let e = w.mul_vec(&inner_eig.eigenvectors.column(k));
                let f = complement.matmul(p1).mul_vec(&e);
                let n = vec_norm(&f);
                let f: Vec<Complex64> = f.iter().map(|z| z / n).collect();
                blocks.push(vectors.len()..vectors.len() + 2);
                vectors.push(e);
                vectors.push(f);
            }
        }
    }

    let mut basis = CMatrix::zeros(d, d);
    for (j, v) in vectors.iter().enumerate() {
        basis.set_column(j, v);
    }
    let q0 = basis.adjoint().matmul(p0).matmul(&basis);
    let q1 = basis.adjoint().matmul(p1).matmul(&basis);
    let unitarity = (&basis.adjoint().matmul(&basis) - &id).frobenius_norm();
    let off = q0.off_block_max(&blocks).max(q1.off_block_max(&blocks));
    if unitarity > BLOCK_TOL || off > BLOCK_TOL {
        return Err(SelftestError::InvalidProjector(format!(
            "block structure not reached (unitarity defect {unitarity:.2e}, off-block {off:.2e})"
        )));
    }
    let p0_blocks = blocks.iter().map(|r| q0.sub_block(r.clone())).collect();
    let p1_blocks = blocks.iter().map(|r| q1.sub_block(r.clone())).collect();
    Ok(BlockDecomposition { basis, blocks, p0_blocks, p1_blocks })
}

/// Pure state `⊕ᵢⱼ √μᵢⱼ |ψᵢⱼ⟩` on `C^{2nA} ⊗ C^{2nB}`, block `(i, j)` spanning
/// local indices `{2i, 2i+1} × {2j, 2j+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectSumState {
    /// `weights[i][j] = μᵢⱼ`.
    pub weights: Vec<Vec<f64>>,
    pub blocks: Vec<Vec<[Complex64; 4]>>,
    /// Measurement phases `(φ, ξ)` shared by all blocks.
    pub phases: (f64, f64),
    amplitudes: Vec<Complex64>,
}

fn check_weights(weights: &[Vec<f64>]) -> Result<(usize, usize), SelftestError> {
    let na = weights.len();
    let nb = weights.first().map_or(0, |r| r.len());
    if na == 0 || nb == 0 {
        return Err(SelftestError::BadWeights("empty weight matrix".into()));
    }
    if weights.iter().any(|r| r.len() != nb) {
        return Err(SelftestError::BadWeights("ragged weight matrix".into()));
    }
    if weights.iter().flatten().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(SelftestError::BadWeights("weights must be finite and nonnegative".into()));
    }
    let total: f64 = weights.iter().flatten().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(SelftestError::BadWeights(format!("weights sum to {total}, not 1")));
    }
    Ok((na, nb))
}

/// The optimal two-qubit state for measurement phases `(φ, ξ)`.
pub fn optimal_block(phi: f64, xi: f64) -> [Complex64; 4] {
    analytic_optimum().state(phi, xi)
}

/// Block settings of the optimum for phases `(φ, ξ)`.
pub fn optimal_settings(phi: f64, xi: f64) -> MeasurementParams {
    let o = analytic_optimum();
    MeasurementParams { alpha: o.alpha, beta: o.beta, phi, xi }
}

/// General direct sum: weight matrix plus one normalized two-qubit state per block pair.
pub fn assemble_blocks(
    weights: Vec<Vec<f64>>,
    blocks: Vec<Vec<[Complex64; 4]>>,
    phases: (f64, f64),
) -> Result<DirectSumState, SelftestError> {
    let (na, nb) = check_weights(&weights)?;
    if blocks.len() != na || blocks.iter().any(|r| r.len() != nb) {
        return Err(SelftestError::BadWeights("block states do not match the weight matrix".into()));
    }
    for psi in blocks.iter().flatten() {
        let n = vec_norm(psi);
        if (n - 1.0).abs() > 1e-12 {
            return Err(SelftestError::BadWeights(format!("block state has norm {n}")));
        }
    }
    let db = 2 * nb;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 4 * na * nb];
    for i in 0..na {
        for j in 0..nb {
            let s = weights[i][j].sqrt();
            for a in 0..2 {
                for b in 0..2 {
                    amplitudes[(2 * i + a) * db + 2 * j + b] = blocks[i][j][2 * a + b] * s;
                }
            }
        }
    }
    Ok(DirectSumState { weights, blocks, phases, amplitudes })
}

/// Direct sum of optimal blocks with an arbitrary weight matrix.
pub fn assemble_direct_sum(weights: Vec<Vec<f64>>, phases: (f64, f64)) -> Result<DirectSumState, SelftestError> {
    let psi = optimal_block(phases.0, phases.1);
    let blocks = weights.iter().map(|r| vec![psi; r.len()]).collect();
    assemble_blocks(weights, blocks, phases)
}

/// Direct sum with `μᵢⱼ = weights[i]·δᵢⱼ`, so `n` weights give local dimension `2n`.
pub fn assemble_diagonal(weights: &[f64], phases: (f64, f64)) -> Result<DirectSumState, SelftestError> {
    let n = weights.len();
    let m = (0..n).map(|i| (0..n).map(|j| if i == j { weights[i] } else { 0.0 }).collect()).collect();
    assemble_direct_sum(m, phases)
}

impl DirectSumState {
    pub fn dims(&self) -> (usize, usize) {
        (2 * self.weights.len(), 2 * self.weights[0].len())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `‖(Πᵢ ⊗ Πⱼ)χ‖²` for every block pair.
    pub fn block_occupancies(&self) -> Vec<Vec<f64>> {
        let (_, db) = self.dims();
        (0..self.weights.len())
            .map(|i| {
                (0..self.weights[0].len())
                    .map(|j| {
                        let mut s = 0.0;
                        for a in 0..2 {
                            for b in 0..2 {
                                s += self.amplitudes[(2 * i + a) * db + 2 * j + b].norm_sqr();
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect()
    }

    /// Optimal block settings extended to every block on each side.
    pub fn settings(&self) -> ([BinaryMeasurement; 2], [BinaryMeasurement; 2]) {
        let m = qubit::projectors(&optimal_settings(self.phases.0, self.phases.1))
            .expect("optimal settings are inside the parameter domain");
        let extend = |p: &BinaryMeasurement, n: usize| {
            let id = CMatrix::identity(n);
            BinaryMeasurement { plus: id.kron(&p.plus), minus: id.kron(&p.minus) }
        };
        let (na, nb) = (self.weights.len(), self.weights[0].len());
        ([extend(&m.a0, na), extend(&m.a1, na)], [extend(&m.b0, nb), extend(&m.b1, nb)])
    }

    pub fn behavior(&self) -> Result<Behavior, SelftestError> {
        let (alice, bob) = self.settings();
        Ok(scenario::behavior_from_quantum(&self.amplitudes, &alice, &bob)?)
    }

    pub fn score(&self) -> Result<f64, SelftestError> {
        Ok(scenario::cabello_stats(&self.behavior()?).score)
    }

    /// Score of block `(i, j)` alone under the block settings.
    pub fn block_score(&self, i: usize, j: usize) -> Result<f64, SelftestError> {
        let m = optimal_settings(self.phases.0, self.phases.1);
        Ok(qubit::simulate_stats(&self.blocks[i][j], &m)
            .map_err(|e| SelftestError::BasisMismatch(e.to_string()))?
            .score)
    }
}

/// `cos θ·ψ + sin θ·ψ⊥`, with `ψ⊥` the normalized part of `|00⟩` orthogonal to `ψ`.
pub fn rotate_away(psi: &[Complex64; 4], theta: f64) -> [Complex64; 4] {
    let mut perp =
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    let overlap = inner(psi, &perp);
    for (p, s) in perp.iter_mut().zip(psi) {
        *p -= s * overlap;
    }
    let n = vec_norm(&perp);
    let (s, c) = theta.sin_cos();
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for k in 0..4 {
        out[k] = psi[k] * c + perp[k] / n * s;
    }
    out
}

/// Local isometry on `C^d ⊗ C²` (index `2·s + a`) with `|2k,0⟩ ↦ |2k,0⟩` and
/// `|2k+1,0⟩ ↦ |2k,1⟩`. Ancilla-`|1⟩` inputs are sent, in index order, to the
/// remaining basis vectors in index order, so the map is a permutation.
pub fn extraction_isometry(d: usize) -> Result<CMatrix, SelftestError> {
    if d % 2 == 1 || d == 0 {
        return Err(SelftestError::OddDimension(d));
    }
    let n = 2 * d;
    let mut target = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for s in 0..d {
        let out = 2 * (2 * (s / 2)) + s % 2;
        target[2 * s] = out;
        used[out] = true;
    }
    let mut free = (0..n).filter(|&k| !used[k]);
    for s in 0..d {
        target[2 * s + 1] = free.next().expect("permutation has room for every ancilla-|1⟩ input");
    }
    let mut m = CMatrix::zeros(n, n);
    for (col, &row) in target.iter().enumerate() {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[row] = Complex64::new(1.0, 0.0);
        m.set_column(col, &v);
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
    /// `|⟨Ψ_max|ψᵢⱼ⟩|²`.
    pub overlap: f64,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub fidelity: f64,
    pub junk_dims: [usize; 2],
    pub blocks: Vec<BlockReport>,
}

/// Applies `Φ_A ⊗ Φ_B` to `χ ⊗ |00⟩` and returns the fidelity of the ancilla pair
/// with the optimal state.
pub fn verify_selftest(state: &DirectSumState) -> Result<IsometryReport, SelftestError> {
    let (da, db) = state.dims();
    if state.amplitudes.len() != da * db {
        return Err(SelftestError::BasisMismatch(format!("{} amplitudes for dims {da}×{db}", state.amplitudes.len())));
    }
    let phi_a = extraction_isometry(da)?;
    let phi_b = extraction_isometry(db)?;
    // Order (A, A', B, B'): index ((2·sA + a')·2dB + 2·sB + b').
    let (na, nb) = (2 * da, 2 * db);
    let mut input = vec![Complex64::new(0.0, 0.0); na * nb];
    for sa in 0..da {
        for sb in 0..db {
            input[(2 * sa) * nb + 2 * sb] = state.amplitudes[sa * db + sb];
        }
    }
    let out = phi_a.kron(&phi_b).mul_vec(&input);

    let reference = optimal_block(state.phases.0, state.phases.1);
    let mut fidelity = 0.0;
    for sa in 0..da {
        for sb in 0..db {
            let mut amp = Complex64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    amp += reference[2 * a + b].conj() * out[(2 * sa + a) * nb + 2 * sb + b];
                }
            }
            fidelity += amp.norm_sqr();
        }
    }

    let mut blocks = Vec::new();
    for (i, row) in state.weights.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let overlap = inner(&reference, &state.blocks[i][j]).norm_sqr().clamp(0.0, 1.0);
            blocks.push(BlockReport { i, j, weight: w, overlap, score: state.block_score(i, j)? });
        }
    }
    Ok(IsometryReport { fidelity: fidelity.clamp(0.0, 1.0), junk_dims: [da, db], blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn commuting_projectors_give_unit_blocks() {
        let p0 = CMatrix::diag_real(&[1.0, 0.0, 1.0]);
        let p1 = CMatrix::diag_real(&[1.0, 1.0, 0.0]);
        let dec = block_diagonalize(&p0, &p1).unwrap();
        assert!(dec.blocks.iter().all(|b| b.len() == 1));
        assert!((&dec.reconstruct(0) - &p0).frobenius_norm() < 1e-10);
        assert!((&dec.reconstruct(1) - &p1).frobenius_norm() < 1e-10);
    }

    #[test]
    fn qubit_pair_gives_one_block() {
        let p0 = CMatrix::diag_real(&[1.0, 0.0]);
        let plus = [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)];
        let p1 = CMatrix::projector_onto(&plus);
        let dec = block_diagonalize(&p0, &p1).unwrap();
        assert_eq!(dec.blocks, vec![0..2]);
        let angles = dec.principal_angles();
        assert!((angles[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_projector() {
        let p = CMatrix::diag_real(&[0.5, 0.0]);
        assert!(matches!(block_diagonalize(&p, &p), Err(SelftestError::InvalidProjector(_))));
    }

    #[test]
    fn isometry_examples() {
        let phi = extraction_isometry(2).unwrap();
        // |0,0⟩ = index 0 ↦ index 0; |1,0⟩ = index 2 ↦ |0,1⟩ = index 1.
        assert_eq!(phi[(0, 0)], c(1.0));
        assert_eq!(phi[(1, 2)], c(1.0));
        for d in [2, 4, 6] {
            let m = extraction_isometry(d).unwrap();
            assert!((&m.adjoint().matmul(&m) - &CMatrix::identity(2 * d)).frobenius_norm() < 1e-12);
        }
        assert_eq!(extraction_isometry(3).unwrap_err(), SelftestError::OddDimension(3));
    }

    #[test]
    fn single_block_is_the_optimum() {
        let s = assemble_diagonal(&[1.0], (0.3, 0.2)).unwrap();
        let psi = optimal_block(0.3, 0.2);
        assert_eq!(s.amplitudes(), &psi[..]);
        let r = verify_selftest(&s).unwrap();
        assert!((r.fidelity - 1.0).abs() < 1e-12);
        assert_eq!(r.junk_dims, [2, 2]);
    }

    #[test]
    fn bad_weights_rejected() {
        assert!(matches!(assemble_diagonal(&[0.5, 0.6], (0.0, 0.0)), Err(SelftestError::BadWeights(_))));
        assert!(matches!(assemble_diagonal(&[], (0.0, 0.0)), Err(SelftestError::BadWeights(_))));
        assert!(matches!(assemble_diagonal(&[1.5, -0.5], (0.0, 0.0)), Err(SelftestError::BadWeights(_))));
    }

    #[test]
    fn rotation_oracle() {
        let psi = optimal_block(0.0, 0.0);
        for theta in [0.0, 0.1, 0.4] {
            let r = rotate_away(&psi, theta);
            assert!((vec_norm(&r) - 1.0).abs() < 1e-12);
            assert!((inner(&psi, &r).norm_sqr() - theta.cos().powi(2)).abs() < 1e-12);
        }
    }
}
