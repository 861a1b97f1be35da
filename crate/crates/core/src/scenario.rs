//! The two-party, two-setting, two-outcome Bell scenario.
//!
//! Outcome convention used everywhere in the crate: index `0` is the `+` outcome,
//! index `1` is the `−` outcome. Settings are indexed `0, 1` for `A0, A1` (and
//! `B0, B1`). A behavior is addressed as `p[x][y][a][b]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mathcore::{self, CMatrix, Complex64, Constraint, LpProblem, MathError, Sense};

pub const PLUS: usize = 0;
pub const MINUS: usize = 1;

/// Tolerance for normalization and no-signalling checks on behaviors.
pub const BEHAVIOR_TOL: f64 = 1e-9;
/// Tolerance for state normalization and projector validity.
pub const OPERATOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),
    #[error("error bound must be finite and nonnegative, got {0}")]
    InvalidEpsilon(f64),
    #[error(transparent)]
    Math(#[from] MathError),
}

/// The sixteen joint probabilities `P(a, b | x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Behavior {
    pub p: [[[[f64; 2]; 2]; 2]; 2],
}

impl Behavior {
    pub fn new(p: [[[[f64; 2]; 2]; 2]; 2]) -> Result<Self, ScenarioError> {
        let b = Self { p };
        b.validate(BEHAVIOR_TOL)?;
        Ok(b)
    }

    pub fn uniform() -> Self {
        Self { p: [[[[0.25; 2]; 2]; 2]; 2] }
    }

    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[x][y][a][b]
    }

    /// Entries in `[0, 1]` and each `(x, y)` block summing to one.
    pub fn validate(&self, tol: f64) -> Result<(), ScenarioError> {
        for x in 0..2 {
            for y in 0..2 {
                let mut total = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        let v = self.p[x][y][a][b];
                        if !(-tol..=1.0 + tol).contains(&v) {
                            return Err(ScenarioError::InvalidBehavior(format!(
                                "p[{x}][{y}][{a}][{b}] = {v} outside [0, 1]"
                            )));
                        }
                        total += v;
                    }
                }
                if (total - 1.0).abs() > tol {
                    return Err(ScenarioError::InvalidBehavior(format!("setting pair ({x}, {y}) sums to {total}")));
                }
            }
        }
        Ok(())
    }

    /// Alice's marginal `P(a | x)` as seen with Bob's setting `y`.
    pub fn alice_marginal(&self, x: usize, y: usize, a: usize) -> f64 {
        self.p[x][y][a][0] + self.p[x][y][a][1]
    }

    pub fn bob_marginal(&self, x: usize, y: usize, b: usize) -> f64 {
        self.p[x][y][0][b] + self.p[x][y][1][b]
    }

    /// Largest change of a one-party marginal under the other party's setting.
    pub fn signalling_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..2 {
            for o in 0..2 {
                worst = worst.max((self.alice_marginal(k, 0, o) - self.alice_marginal(k, 1, o)).abs());
                worst = worst.max((self.bob_marginal(0, k, o) - self.bob_marginal(1, k, o)).abs());
            }
        }
        worst
    }

    /// Convex combination `Σ wᵢ behaviorᵢ`.
    pub fn mixture(parts: &[(f64, Behavior)]) -> Self {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for (w, b) in parts {
            for x in 0..2 {
                for y in 0..2 {
                    for a in 0..2 {
                        for bb in 0..2 {
                            p[x][y][a][bb] += w * b.p[x][y][a][bb];
                        }
                    }
                }
            }
        }
        Self { p }
    }
}

/// The four probabilities of the argument and the degree of success `p − q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CabelloStats {
    /// `P(+, + | A0, B0)`
    pub q: f64,
    /// `P(+, + | A1, B1)`
    pub p: f64,
    /// `P(+, − | A1, B0)`
    pub e10: f64,
    /// `P(−, + | A0, B1)`
    pub e01: f64,
    pub score: f64,
}

pub fn cabello_stats(b: &Behavior) -> CabelloStats {
    let q = b.p[0][0][PLUS][PLUS];
    let p = b.p[1][1][PLUS][PLUS];
    CabelloStats { q, p, e10: b.p[1][0][PLUS][MINUS], e01: b.p[0][1][MINUS][PLUS], score: p - q }
}

/// A two-outcome projective measurement `{Π₊, Π₋}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryMeasurement {
    pub plus: CMatrix,
    pub minus: CMatrix,
}

impl BinaryMeasurement {
    /// Completes `Π₊` with `Π₋ = I − Π₊`.
    pub fn from_plus(plus: CMatrix) -> Self {
        let minus = &CMatrix::identity(plus.rows()) - &plus;
        Self { plus, minus }
    }

    pub fn dim(&self) -> usize {
        self.plus.rows()
    }

    pub fn effect(&self, outcome: usize) -> &CMatrix {
        if outcome == PLUS {
            &self.plus
        } else {
            &self.minus
        }
    }

    pub fn validate(&self, tol: f64) -> Result<(), ScenarioError> {
        let d = self.plus.rows();
        let bad = |msg: String| Err(ScenarioError::InvalidMeasurement(msg));
        if !self.plus.is_square() || self.minus.rows() != d || !self.minus.is_square() {
            return bad("projectors must be square and of equal dimension".into());
        }
        for (name, p) in [("plus", &self.plus), ("minus", &self.minus)] {
            let herm = p.hermiticity_defect();
            if herm > tol {
                return bad(format!("{name} projector not Hermitian (defect {herm:.3e})"));
            }
            let idem = (&p.matmul(p) - p).frobenius_norm();
            if idem > tol {
                return bad(format!("{name} projector not idempotent (defect {idem:.3e})"));
            }
        }
        let comp = (&(&self.plus + &self.minus) - &CMatrix::identity(d)).frobenius_norm();
        if comp > tol {
            return bad(format!("projectors do not sum to identity (defect {comp:.3e})"));
        }
        Ok(())
    }

    /// `U Π U†` for both effects.
    pub fn conjugated(&self, u: &CMatrix) -> Self {
        let ud = u.adjoint();
        Self { plus: u.matmul(&self.plus).matmul(&ud), minus: u.matmul(&self.minus).matmul(&ud) }
    }
}

/// `P(a, b | x, y) = ⟨ψ| Π_{a|x} ⊗ Π_{b|y} |ψ⟩` for a pure state on `C^dA ⊗ C^dB`.
///
/// The state index is `i·dB + j` for `|i⟩_A |j⟩_B`.
pub fn behavior_from_quantum(
    state: &[Complex64],
    alice: &[BinaryMeasurement; 2],
    bob: &[BinaryMeasurement; 2],
) -> Result<Behavior, ScenarioError> {
    let da = alice[0].dim();
    let db = bob[0].dim();
    for m in alice.iter().chain(bob) {
        m.validate(OPERATOR_TOL)?;
    }
    if alice[1].dim() != da || bob[1].dim() != db {
        return Err(ScenarioError::InvalidMeasurement("settings of one party act on different spaces".into()));
    }
    if state.len() != da * db {
        return Err(ScenarioError::InvalidState(format!("state has {} amplitudes, expected {}", state.len(), da * db)));
    }
    let norm = mathcore::vec_norm(state);
    if (norm - 1.0).abs() > OPERATOR_TOL {
        return Err(ScenarioError::InvalidState(format!("state norm {norm} differs from 1")));
    }

    let psi = CMatrix::from_vec(da, db, state.to_vec());
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for x in 0..2 {
        for a in 0..2 {
            let left = alice[x].effect(a).matmul(&psi);
            for y in 0..2 {
                for b in 0..2 {
                    // (Πa ⊗ Πb)ψ  ↔  Πa Ψ Πbᵀ
                    let image = left.matmul(&bob[y].effect(b).transpose());
                    let v: f64 = psi.as_slice().iter().zip(image.as_slice()).map(|(u, w)| (u.conj() * w).re).sum();
                    p[x][y][a][b] = v.clamp(0.0, 1.0);
                }
            }
        }
    }
    Ok(Behavior { p })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Outcome {
    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => PLUS,
            Outcome::Minus => MINUS,
        }
    }
}

/// A local deterministic assignment of outcomes to all four observables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub a0: Outcome,
    pub a1: Outcome,
    pub b0: Outcome,
    pub b1: Outcome,
}

impl DeterministicStrategy {
    pub fn behavior(&self) -> Behavior {
        let alice = [self.a0.index(), self.a1.index()];
        let bob = [self.b0.index(), self.b1.index()];
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                p[x][y][alice[x]][bob[y]] = 1.0;
            }
        }
        Behavior { p }
    }
}

/// The sixteen vertices of the local polytope. Bit `k` of the list index
/// selects `−` for observable `k` in the order `A0, A1, B0, B1`.
pub fn enumerate_local_deterministic() -> Vec<(DeterministicStrategy, Behavior)> {
    let pick = |bits: usize, k: usize| if bits >> k & 1 == 1 { Outcome::Minus } else { Outcome::Plus };
    (0..16)
        .map(|bits| {
            let s =
                DeterministicStrategy { a0: pick(bits, 0), a1: pick(bits, 1), b0: pick(bits, 2), b1: pick(bits, 3) };
            (s, s.behavior())
        })
        .collect()
}

/// Optimal local mixture for the relaxed constraints `e10 ≤ ε`, `e01 ≤ ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalBound {
    pub eps: f64,
    pub value: f64,
    /// Mixture weights over [`enumerate_local_deterministic`] order.
    pub weights: Vec<f64>,
}

fn check_eps(eps: f64) -> Result<(), ScenarioError> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(ScenarioError::InvalidEpsilon(eps));
    }
    Ok(())
}

/// Maximum of `p − q` over the local polytope with both constraint probabilities at most `eps`.
pub fn local_bound(eps: f64) -> Result<LocalBound, ScenarioError> {
    check_eps(eps)?;
    let stats: Vec<CabelloStats> = enumerate_local_deterministic().iter().map(|(_, b)| cabello_stats(b)).collect();
    let lp = LpProblem::maximize(
        stats.iter().map(|s| s.score).collect(),
        vec![
            Constraint::new(vec![1.0; 16], Sense::Eq, 1.0),
            Constraint::new(stats.iter().map(|s| s.e10).collect(), Sense::Le, eps),
            Constraint::new(stats.iter().map(|s| s.e01).collect(), Sense::Le, eps),
        ],
    );
    let sol = mathcore::solve_lp(&lp, mathcore::DEFAULT_LP_TOL)?;
    Ok(LocalBound { eps, value: sol.value, weights: sol.x })
}

pub fn local_max_score(eps: f64) -> Result<f64, ScenarioError> {
    Ok(local_bound(eps)?.value)
}

/// Which relaxed constraint a behavior breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintViolation {
    E10,
    E01,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub certified: bool,
    /// `score − local_max_score(eps)`.
    pub margin: f64,
    pub local_bound: f64,
    pub violated: Option<ConstraintViolation>,
}

/// Nonlocality witness: both constraints hold within `eps` and the score beats the local bound.
pub fn certify_nonlocal(b: &Behavior, eps: f64) -> Result<Certificate, ScenarioError> {
    b.validate(BEHAVIOR_TOL)?;
    let local = local_max_score(eps)?;
    let s = cabello_stats(b);
    let violated = match (s.e10 > eps, s.e01 > eps) {
        (true, true) => Some(ConstraintViolation::Both),
        (true, false) => Some(ConstraintViolation::E10),
        (false, true) => Some(ConstraintViolation::E01),
        (false, false) => None,
    };
    let margin = s.score - local;
    Ok(Certificate { certified: violated.is_none() && margin > 0.0, margin, local_bound: local, violated })
}
