//! Two-qubit states and measurements in canonical form.
//!
//! `A0 = B0 = σ_z` (outcome `+` ↔ `|0⟩`); `A1` and `B1` are parameterized by
//! `(α, φ)` and `(β, ξ)`:
//!
//! ```text
//! u₊ = cos(α/2)|0⟩ + e^{iφ} sin(α/2)|1⟩
//! u₋ = −sin(α/2)|0⟩ + e^{iφ} cos(α/2)|1⟩
//! ```

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mathcore::{CMatrix, Complex64};
use crate::scenario::{self, Behavior, BinaryMeasurement, CabelloStats, ScenarioError, PLUS};

/// Radicands this far below zero are rounding noise on the boundary of the
/// normalizable region and are clamped to zero.
pub const RADICAND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QubitError {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("state is not normalizable (radicand {0:.3e} < 0)")]
    NotNormalizable(f64),
    #[error("ansatz amplitudes are not normalized (s00² + 2·s01² + s11² = {0})")]
    NotNormalized(f64),
    #[error("invalid POVM effect: {0}")]
    InvalidEffect(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

fn cis(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t)
}

/// Reduces a phase into `[0, 2π)`; `rem_euclid` alone can round up to `2π`.
pub fn wrap_phase(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementParams {
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
    pub xi: f64,
}

impl MeasurementParams {
    pub fn new(alpha: f64, beta: f64, phi: f64, xi: f64) -> Result<Self, QubitError> {
        let m = Self { alpha, beta, phi, xi };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), QubitError> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > 0.0 && v < PI) {
                return Err(QubitError::OutOfRange(format!("{name} = {v} not in (0, π)")));
            }
        }
        for (name, v) in [("phi", self.phi), ("xi", self.xi)] {
            if !(0.0..TAU).contains(&v) {
                return Err(QubitError::OutOfRange(format!("{name} = {v} not in [0, 2π)")));
            }
        }
        Ok(())
    }

    /// `(u₊, u₋)` for `A1`.
    pub fn alice_basis(&self) -> ([Complex64; 2], [Complex64; 2]) {
        setting_basis(self.alpha, self.phi)
    }

    pub fn bob_basis(&self) -> ([Complex64; 2], [Complex64; 2]) {
        setting_basis(self.beta, self.xi)
    }
}

fn setting_basis(angle: f64, phase: f64) -> ([Complex64; 2], [Complex64; 2]) {
    let (s, c) = (angle / 2.0).sin_cos();
    let e = cis(phase);
    ([Complex64::new(c, 0.0), e * s], [Complex64::new(-s, 0.0), e * c])
}

/// The eight projectors of both parties.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitMeasurements {
    pub a0: BinaryMeasurement,
    pub a1: BinaryMeasurement,
    pub b0: BinaryMeasurement,
    pub b1: BinaryMeasurement,
}

impl QubitMeasurements {
    pub fn alice(&self) -> [BinaryMeasurement; 2] {
        [self.a0.clone(), self.a1.clone()]
    }

    pub fn bob(&self) -> [BinaryMeasurement; 2] {
        [self.b0.clone(), self.b1.clone()]
    }
}

fn pair_from_basis(plus: &[Complex64; 2], minus: &[Complex64; 2]) -> BinaryMeasurement {
    BinaryMeasurement { plus: CMatrix::outer(plus, plus), minus: CMatrix::outer(minus, minus) }
}

pub fn projectors(m: &MeasurementParams) -> Result<QubitMeasurements, QubitError> {
    m.validate()?;
    Ok(projectors_unchecked(m))
}

fn projectors_unchecked(m: &MeasurementParams) -> QubitMeasurements {
    let z = BinaryMeasurement { plus: CMatrix::diag_real(&[1.0, 0.0]), minus: CMatrix::diag_real(&[0.0, 1.0]) };
    let (ap, am) = m.alice_basis();
    let (bp, bm) = m.bob_basis();
    QubitMeasurements { a0: z.clone(), a1: pair_from_basis(&ap, &am), b0: z, b1: pair_from_basis(&bp, &bm) }
}

/// State parameters of the family satisfying both zero-probability constraints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedStateParams {
    pub c: f64,
    pub delta: f64,
    #[serde(flatten)]
    pub measurements: MeasurementParams,
}

impl ConstrainedStateParams {
    /// `1 − c²(1 + tan²(α/2) + tan²(β/2))`, the squared modulus of the `|00⟩` amplitude.
    pub fn radicand(&self) -> f64 {
        let ta = (self.measurements.alpha / 2.0).tan();
        let tb = (self.measurements.beta / 2.0).tan();
        1.0 - self.c * self.c * (1.0 + ta * ta + tb * tb)
    }

    pub fn validate(&self) -> Result<(), QubitError> {
        self.measurements.validate()?;
        if !(0.0..=1.0).contains(&self.c) {
            return Err(QubitError::OutOfRange(format!("c = {} not in [0, 1]", self.c)));
        }
        if !(0.0..TAU).contains(&self.delta) {
            return Err(QubitError::OutOfRange(format!("delta = {} not in [0, 2π)", self.delta)));
        }
        let r = self.radicand();
        if r < -RADICAND_TOL {
            return Err(QubitError::NotNormalizable(r));
        }
        Ok(())
    }
}

/// Amplitudes on `|00⟩, |01⟩, |10⟩, |11⟩` of the constrained family.
///
/// ```text
/// e^{iδ}√R |00⟩ − c(e^{−iφ} tan(α/2)|01⟩ + e^{−iξ} tan(β/2)|10⟩) + c|11⟩
/// ```
pub fn constrained_state(p: &ConstrainedStateParams) -> Result<[Complex64; 4], QubitError> {
    p.validate()?;
    Ok(constrained_state_unchecked(p))
}

pub(crate) fn constrained_state_unchecked(p: &ConstrainedStateParams) -> [Complex64; 4] {
    let m = &p.measurements;
    let ta = (m.alpha / 2.0).tan();
    let tb = (m.beta / 2.0).tan();
    let root = p.radicand().max(0.0).sqrt();
    [cis(p.delta) * root, -cis(-m.phi) * (p.c * ta), -cis(-m.xi) * (p.c * tb), Complex64::new(p.c, 0.0)]
}

/// Closed-form degree of success over the constrained family, transcribed term by term.
pub fn closed_form_score(p: &ConstrainedStateParams) -> Result<f64, QubitError> {
    p.validate()?;
    Ok(closed_form_unchecked(
        p.measurements.alpha,
        p.measurements.beta,
        p.c,
        p.delta + p.measurements.xi + p.measurements.phi,
    ))
}

/// The same expression with the phases collapsed to their sum; no range checks.
pub(crate) fn closed_form_unchecked(alpha: f64, beta: f64, c: f64, phase_sum: f64) -> f64 {
    let (ca, cb) = (alpha.cos(), beta.cos());
    let ta2 = (alpha / 2.0).tan().powi(2);
    let tb2 = (beta / 2.0).tan().powi(2);
    let c2 = c * c;
    let inner = c2 * (-ta2) - 2.0 * c2 / (cb + 1.0) + 1.0;
    let inner = if inner < 0.0 && inner > -RADICAND_TOL { 0.0 } else { inner };
    0.25 * (ca * cb + ca + cb - 3.0 - 2.0 * c * alpha.sin() * beta.sin() * phase_sum.cos() * inner.sqrt()
        + 2.0 * c2 * (ca * (cb - 1.0) + 2.0 * ta2 - cb + 2.0 * tb2 + 1.0))
}

/// Closed-form maximizer over two-qubit states and measurements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticOptimum {
    pub score: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub kappa00: f64,
    /// Negative: the `|01⟩`/`|10⟩` amplitude is `−c·tan(α/2)` in the constrained family,
    /// so the sign sits outside the square root.
    pub kappa01: f64,
    pub kappa11: f64,
}

pub fn analytic_optimum() -> AnalyticOptimum {
    let r78 = 78f64.sqrt();
    let big = 307.0 + 39.0 * r78;
    let tail = (big.powi(2).cbrt() - 29.0) / big.cbrt();
    let score = (tail - 5.0) / 3.0;
    let c = (tail - 2.0) / 6.0;
    let alpha = 2.0 * ((((359.0 - 12.0 * r78).cbrt() + (359.0 + 12.0 * r78).cbrt()) - 1.0) / 12.0).sqrt().atan();
    let small = 53.0 - 6.0 * r78;
    let kappa00 = (4.0 - (small.powi(2).cbrt() + 1.0) / small.cbrt()) / 6.0;
    let w = 67.0 * r78 - 414.0;
    let kappa01 = -((12.0 - 31.0 * 6f64.powf(2.0 / 3.0) / w.cbrt() + (6.0 * w).cbrt()) / 12.0).sqrt();
    AnalyticOptimum { score, alpha, beta: alpha, c, kappa00, kappa01, kappa11: c }
}

impl AnalyticOptimum {
    /// Constrained-family parameters realizing the optimum for the given measurement phases.
    pub fn params(&self, phi: f64, xi: f64) -> ConstrainedStateParams {
        ConstrainedStateParams {
            c: self.c,
            delta: wrap_phase(PI - phi - xi),
            measurements: MeasurementParams { alpha: self.alpha, beta: self.beta, phi, xi },
        }
    }

    /// The optimal state written with the symmetric amplitudes `κ`.
    pub fn state(&self, phi: f64, xi: f64) -> [Complex64; 4] {
        ansatz_state_unchecked(&AnsatzParams { s00: self.kappa00, s01: self.kappa01, s11: self.kappa11, phi, xi })
    }
}

/// Symmetric real-amplitude family used for the relaxed-constraint lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    pub s00: f64,
    pub s01: f64,
    pub s11: f64,
    pub phi: f64,
    pub xi: f64,
}

impl AnsatzParams {
    pub fn norm_sqr(&self) -> f64 {
        self.s00 * self.s00 + 2.0 * self.s01 * self.s01 + self.s11 * self.s11
    }
}

/// `s00 e^{−i(ξ+φ)}|00⟩ + s01(e^{−iφ}|01⟩ + e^{−iξ}|10⟩) + s11|11⟩`.
pub fn ansatz_state(p: &AnsatzParams) -> Result<[Complex64; 4], QubitError> {
    let n = p.norm_sqr();
    if (n - 1.0).abs() > 1e-10 {
        return Err(QubitError::NotNormalized(n));
    }
    Ok(ansatz_state_unchecked(p))
}

pub(crate) fn ansatz_state_unchecked(p: &AnsatzParams) -> [Complex64; 4] {
    [cis(-(p.xi + p.phi)) * p.s00, cis(-p.phi) * p.s01, cis(-p.xi) * p.s01, Complex64::new(p.s11, 0.0)]
}

/// Behavior of a two-qubit pure state under the canonical measurements, through
/// the general projector pipeline.
pub fn simulate(state: &[Complex64; 4], m: &MeasurementParams) -> Result<Behavior, QubitError> {
    let ms = projectors(m)?;
    Ok(scenario::behavior_from_quantum(state, &ms.alice(), &ms.bob())?)
}

pub fn simulate_stats(state: &[Complex64; 4], m: &MeasurementParams) -> Result<CabelloStats, QubitError> {
    Ok(scenario::cabello_stats(&simulate(state, m)?))
}

/// Cabello statistics from basis-vector overlaps only. Skips every validity check;
/// the optimizers use it as their inner objective.
pub(crate) fn fast_stats(state: &[Complex64; 4], half_alpha: f64, half_beta: f64, phi: f64, xi: f64) -> CabelloStats {
    let (sa, ca) = half_alpha.sin_cos();
    let (sb, cb) = half_beta.sin_cos();
    let ea = cis(-phi);
    let eb = cis(-xi);
    // ⟨u ⊗ v|ψ⟩ with conjugated bra components.
    let overlap = |u: [Complex64; 2], v: [Complex64; 2]| {
        u[0] * v[0] * state[0] + u[0] * v[1] * state[1] + u[1] * v[0] * state[2] + u[1] * v[1] * state[3]
    };
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let a1p = [Complex64::new(ca, 0.0), ea * sa];
    let b1p = [Complex64::new(cb, 0.0), eb * sb];
    let q = state[0].norm_sqr();
    let p = overlap(a1p, b1p).norm_sqr();
    let e10 = overlap(a1p, [zero, one]).norm_sqr();
    let e01 = overlap([zero, one], b1p).norm_sqr();
    CabelloStats { q, p, e10, e01, score: p - q }
}

/// Uniform draw from the constrained family: angles in `[0.01, π − 0.01]`, phases
/// in `[0, 2π)`, and `c` uniform over its normalizable range.
pub fn sample_constrained_params<R: Rng + ?Sized>(rng: &mut R) -> ConstrainedStateParams {
    let alpha = rng.gen_range(0.01..PI - 0.01);
    let beta = rng.gen_range(0.01..PI - 0.01);
    let measurements = MeasurementParams { alpha, beta, phi: rng.gen_range(0.0..TAU), xi: rng.gen_range(0.0..TAU) };
    let (ta, tb) = ((alpha / 2.0).tan(), (beta / 2.0).tan());
    let c_max = 1.0 / (1.0 + ta * ta + tb * tb).sqrt();
    ConstrainedStateParams { c: rng.gen_range(0.0..=c_max), delta: rng.gen_range(0.0..TAU), measurements }
}

/// Two-outcome qubit POVM effect `E = a0·I + η·(â·σ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitPovmEffect {
    pub a0: f64,
    pub eta: f64,
    pub axis: [f64; 3],
}

impl QubitPovmEffect {
    pub fn validate(&self) -> Result<(), QubitError> {
        let bad = |m: String| Err(QubitError::InvalidEffect(m));
        if !(0.0..=1.0).contains(&self.a0) {
            return bad(format!("a0 = {} not in [0, 1]", self.a0));
        }
        let cap = self.a0.min(1.0 - self.a0);
        if !(self.eta >= 0.0 && self.eta <= cap + 1e-12) {
            return bad(format!("eta = {} not in [0, {cap}]", self.eta));
        }
        let n = self.axis.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-10 {
            return bad(format!("axis has norm {n}"));
        }
        Ok(())
    }

    /// `â·σ`.
    pub fn axis_operator(&self) -> CMatrix {
        let [x, y, z] = self.axis;
        CMatrix::from_vec(
            2,
            2,
            vec![Complex64::new(z, 0.0), Complex64::new(x, -y), Complex64::new(x, y), Complex64::new(-z, 0.0)],
        )
    }

    pub fn matrix(&self) -> CMatrix {
        &CMatrix::identity(2).scale(Complex64::new(self.a0, 0.0))
            + &self.axis_operator().scale(Complex64::new(self.eta, 0.0))
    }
}

/// Splits the POVM `{E, I − E}` into the mixture
/// `(a0 − η)·{I, 0} + (1 − a0 − η)·{0, I} + 2η·{(I + â·σ)/2, (I − â·σ)/2}`.
pub fn decompose_povm(e: &QubitPovmEffect) -> Result<[(f64, BinaryMeasurement); 3], QubitError> {
    e.validate()?;
    let id = CMatrix::identity(2);
    let zero = CMatrix::zeros(2, 2);
    let half = Complex64::new(0.5, 0.0);
    let n = e.axis_operator();
    let m3 = BinaryMeasurement { plus: (&id + &n).scale(half), minus: (&id - &n).scale(half) };
    Ok([
        ((e.a0 - e.eta).max(0.0), BinaryMeasurement { plus: id.clone(), minus: zero.clone() }),
        ((1.0 - e.a0 - e.eta).max(0.0), BinaryMeasurement { plus: zero, minus: id }),
        (2.0 * e.eta, m3),
    ])
}

/// Probability of the `+` effect of a mixture of measurements on a qubit state.
pub fn mixture_plus_effect(parts: &[(f64, BinaryMeasurement)]) -> CMatrix {
    parts.iter().fold(CMatrix::zeros(2, 2), |acc, (w, m)| &acc + &m.effect(PLUS).scale(Complex64::new(*w, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathcore::vec_norm;
    use std::f64::consts::FRAC_PI_2;

    fn example_3_80() -> ConstrainedStateParams {
        ConstrainedStateParams {
            c: (9.0f64 / 15.0).sqrt(),
            delta: 0.0,
            measurements: MeasurementParams { alpha: PI / 3.0, beta: PI / 3.0, phi: FRAC_PI_2, xi: FRAC_PI_2 },
        }
    }

    #[test]
    fn hadamard_setting() {
        let m = projectors(&MeasurementParams { alpha: FRAC_PI_2, beta: 1.0, phi: 0.0, xi: 0.0 }).unwrap();
        let expect = CMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!((&m.a1.plus - &expect).frobenius_norm() < 1e-15);
    }

    #[test]
    fn out_of_range_angles_rejected() {
        assert!(matches!(MeasurementParams::new(0.0, 1.0, 0.0, 0.0), Err(QubitError::OutOfRange(_))));
        assert!(matches!(MeasurementParams::new(1.0, PI, 0.0, 0.0), Err(QubitError::OutOfRange(_))));
        assert!(matches!(MeasurementParams::new(1.0, 1.0, TAU, 0.0), Err(QubitError::OutOfRange(_))));
    }

    #[test]
    fn example_score_is_three_eightieths() {
        let p = example_3_80();
        assert!((closed_form_score(&p).unwrap() - 3.0 / 80.0).abs() < 1e-12);
        let s = simulate_stats(&constrained_state(&p).unwrap(), &p.measurements).unwrap();
        assert!((s.score - 3.0 / 80.0).abs() < 1e-12);
    }

    #[test]
    fn zero_c_is_product_state() {
        let p = ConstrainedStateParams {
            c: 0.0,
            delta: 1.0,
            measurements: MeasurementParams::new(1.0, 2.0, 0.5, 0.7).unwrap(),
        };
        let s = constrained_state(&p).unwrap();
        assert!((s[0] - cis(1.0)).norm() < 1e-15);
        assert!(s[1..].iter().all(|z| z.norm() == 0.0));
        let (a, b) = (1.0f64, 2.0f64);
        let expect = (a.cos() * b.cos() + a.cos() + b.cos() - 3.0) / 4.0;
        assert!((closed_form_score(&p).unwrap() - expect).abs() < 1e-15);
        assert!((simulate_stats(&s, &p.measurements).unwrap().score - expect).abs() < 1e-12);
    }

    #[test]
    fn not_normalizable_rejected() {
        let p = ConstrainedStateParams {
            c: 0.9,
            delta: 0.0,
            measurements: MeasurementParams::new(2.0, 2.0, 0.0, 0.0).unwrap(),
        };
        assert!(matches!(constrained_state(&p), Err(QubitError::NotNormalizable(_))));
        assert!(matches!(closed_form_score(&p), Err(QubitError::NotNormalizable(_))));
    }

    #[test]
    fn analytic_optimum_printed_values() {
        let o = analytic_optimum();
        assert!((o.score - 0.1078).abs() < 5e-5);
        assert!((o.alpha - 1.6136).abs() < 5e-5);
        assert!((o.c - 0.5539).abs() < 5e-5);
        assert!((o.kappa00 + 0.1573).abs() < 5e-5);
        assert!((o.kappa01 + 0.5781).abs() < 5e-5);
    }

    #[test]
    fn analytic_optimum_is_consistent() {
        let o = analytic_optimum();
        let p = o.params(0.3, 1.1);
        assert!((closed_form_score(&p).unwrap() - o.score).abs() < 1e-12);
        let psi = constrained_state(&p).unwrap();
        let kappa = o.state(0.3, 1.1);
        // Same state up to the global phase e^{iδ}… which is already fixed by c on |11⟩.
        for (x, y) in psi.iter().zip(&kappa) {
            assert!((x - y).norm() < 1e-12, "{x} vs {y}");
        }
        assert!(((p.delta + 0.3 + 1.1).cos() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn ansatz_examples() {
        let s = ansatz_state(&AnsatzParams { s00: 1.0, s01: 0.0, s11: 0.0, phi: 0.4, xi: 0.2 }).unwrap();
        assert!((s[0].norm() - 1.0).abs() < 1e-15);
        assert!(matches!(
            ansatz_state(&AnsatzParams { s00: 1.0, s01: 0.1, s11: 0.0, phi: 0.0, xi: 0.0 }),
            Err(QubitError::NotNormalized(_))
        ));
        let s = ansatz_state(&AnsatzParams { s00: 0.5, s01: 0.5, s11: 0.5, phi: 0.7, xi: 0.7 }).unwrap();
        assert_eq!(s[1], s[2]);
        assert!((vec_norm(&s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fast_path_matches_pipeline() {
        let o = analytic_optimum();
        let p = o.params(0.2, 0.9);
        let psi = constrained_state(&p).unwrap();
        let slow = simulate_stats(&psi, &p.measurements).unwrap();
        let fast = fast_stats(&psi, o.alpha / 2.0, o.beta / 2.0, 0.2, 0.9);
        assert!((slow.score - fast.score).abs() < 1e-14);
        assert!((slow.e10 - fast.e10).abs() < 1e-14);
        assert!((slow.e01 - fast.e01).abs() < 1e-14);
    }

    #[test]
    fn povm_examples() {
        let z = QubitPovmEffect { a0: 0.5, eta: 0.0, axis: [0.0, 0.0, 1.0] };
        let parts = decompose_povm(&z).unwrap();
        assert_eq!(parts.iter().map(|p| p.0).collect::<Vec<_>>(), vec![0.5, 0.5, 0.0]);

        let proj = QubitPovmEffect { a0: 0.5, eta: 0.5, axis: [0.0, 0.0, 1.0] };
        let parts = decompose_povm(&proj).unwrap();
        assert_eq!(parts.iter().map(|p| p.0).collect::<Vec<_>>(), vec![0.0, 0.0, 1.0]);
        assert!((&parts[2].1.plus - &CMatrix::diag_real(&[1.0, 0.0])).frobenius_norm() < 1e-15);

        let x = QubitPovmEffect { a0: 0.6, eta: 0.3, axis: [1.0, 0.0, 0.0] };
        let parts = decompose_povm(&x).unwrap();
        let w: Vec<f64> = parts.iter().map(|p| p.0).collect();
        for (a, b) in w.iter().zip([0.3, 0.1, 0.6]) {
            assert!((a - b).abs() < 1e-15);
        }
        // E = [[0.6, 0.3], [0.3, 0.6]] by hand.
        let expect = CMatrix::from_real(2, 2, &[0.6, 0.3, 0.3, 0.6]);
        assert!((&mixture_plus_effect(&parts) - &expect).frobenius_norm() < 1e-12);

        let bad = QubitPovmEffect { a0: 0.2, eta: 0.3, axis: [1.0, 0.0, 0.0] };
        assert!(matches!(decompose_povm(&bad), Err(QubitError::InvalidEffect(_))));
    }

    #[test]
    fn param_json_field_names() {
        let v = serde_json::to_value(example_3_80()).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, vec!["alpha", "beta", "c", "delta", "phi", "xi"]);
        let a = serde_json::to_value(AnsatzParams { s00: 1.0, s01: 0.0, s11: 0.0, phi: 0.0, xi: 0.0 }).unwrap();
        assert!(a.get("s00").is_some() && a.get("s01").is_some() && a.get("s11").is_some());
    }
}
