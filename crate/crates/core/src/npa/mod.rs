//! Moment-matrix relaxations of the set of quantum behaviors for two parties
//! with two binary settings each, solved as real semidefinite programs.

mod model;
mod solver;
mod words;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mathcore::{MathError, RMatrix};

use model::AffineModel;

pub use solver::{solve, SdpOptions, SdpSolution, SolveStatus};
pub use words::{canonical_words_up_to, Letter, Word};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NpaError {
    #[error("unsupported hierarchy level {0:?} (expected 1, 1+AB, 2 or 3)")]
    UnsupportedLevel(String),
    #[error("eps must be finite and nonnegative, got {0}")]
    InvalidEpsilon(f64),
    #[error("moment {0} is not present at this level")]
    MissingMoment(String),
    #[error("linear functional has {got} coefficients, expected {expected}")]
    BadFunctional { expected: usize, got: usize },
    #[error("affine map is rank deficient")]
    Singular,
    #[error("known kernel of the moment matrix is inconsistent with the moment structure")]
    InconsistentFace,
    #[error(transparent)]
    Math(#[from] MathError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NpaLevel {
    One,
    OneAB,
    Two,
    Three,
}

impl NpaLevel {
    pub const ALL: [NpaLevel; 4] = [NpaLevel::One, NpaLevel::OneAB, NpaLevel::Two, NpaLevel::Three];

    fn index(self) -> usize {
        self as usize
    }

    pub fn words(self) -> Vec<Word> {
        match self {
            NpaLevel::One => canonical_words_up_to(1),
            NpaLevel::OneAB => {
                let mut w = canonical_words_up_to(1);
                for x in 0..2 {
                    for y in 0..2 {
                        w.push(Word::new(vec![Letter::alice(x), Letter::bob(y)]));
                    }
                }
                w
            }
            NpaLevel::Two => canonical_words_up_to(2),
            NpaLevel::Three => canonical_words_up_to(3),
        }
    }
}

impl fmt::Display for NpaLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NpaLevel::One => "1",
            NpaLevel::OneAB => "1+AB",
            NpaLevel::Two => "2",
            NpaLevel::Three => "3",
        })
    }
}

impl FromStr for NpaLevel {
    type Err = NpaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "1" => Ok(NpaLevel::One),
            "1+AB" => Ok(NpaLevel::OneAB),
            "2" => Ok(NpaLevel::Two),
            "3" => Ok(NpaLevel::Three),
            _ => Err(NpaError::UnsupportedLevel(s.to_string())),
        }
    }
}

impl TryFrom<String> for NpaLevel {
    type Error = NpaError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<NpaLevel> for String {
    fn from(l: NpaLevel) -> String {
        l.to_string()
    }
}

/// Word list and the partition of moment-matrix cells into equality classes.
/// Class 0 is always the identity.
#[derive(Debug)]
pub struct MomentStructure {
    level: NpaLevel,
    words: Vec<Word>,
    cell_class: Vec<usize>,
    class_keys: Vec<Word>,
    class_sizes: Vec<usize>,
    lookup: HashMap<Word, usize>,
}

impl MomentStructure {
    fn new(level: NpaLevel) -> Self {
        let words = level.words();
        let n = words.len();
        let mut lookup = HashMap::new();
        let mut class_keys = vec![Word::identity()];
        lookup.insert(Word::identity(), 0);
        let mut cell_class = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let key = words[i].adjoint().concat(&words[j]).moment_key();
                let next = class_keys.len();
                let k = *lookup.entry(key.clone()).or_insert_with(|| {
                    class_keys.push(key);
                    next
                });
                cell_class[i * n + j] = k;
            }
        }
        let mut class_sizes = vec![0; class_keys.len()];
        for &k in &cell_class {
            class_sizes[k] += 1;
        }
        Self { level, words, cell_class, class_keys, class_sizes, lookup }
    }

    pub fn level(&self) -> NpaLevel {
        self.level
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Side length of the moment matrix.
    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_keys.len()
    }

    pub fn class_key(&self, k: usize) -> &Word {
        &self.class_keys[k]
    }

    pub fn cell_class(&self, i: usize, j: usize) -> usize {
        self.cell_class[i * self.size() + j]
    }

    pub fn class_size(&self, k: usize) -> usize {
        self.class_sizes[k]
    }

    pub fn class_of(&self, w: &Word) -> Option<usize> {
        self.lookup.get(&w.moment_key()).copied()
    }

    fn require(&self, letters: &[Letter]) -> Result<usize, NpaError> {
        let w = Word::new(letters.to_vec());
        self.class_of(&w).ok_or_else(|| NpaError::MissingMoment(w.to_string()))
    }

    /// Coefficients over classes of `P(a, b | x, y)` for `a, b ∈ {+ = 0, − = 1}`.
    pub fn probability(&self, a: usize, b: usize, x: usize, y: usize) -> Result<Vec<f64>, NpaError> {
        let mut v = vec![0.0; self.num_classes()];
        let ka = self.require(&[Letter::alice(x)])?;
        let kb = self.require(&[Letter::bob(y)])?;
        let kab = self.require(&[Letter::alice(x), Letter::bob(y)])?;
        // Π− = 1 − Π+ on either side.
        let sa = if a == 0 { 1.0 } else { -1.0 };
        let sb = if b == 0 { 1.0 } else { -1.0 };
        v[kab] += sa * sb;
        if a == 1 {
            v[kb] += sb;
        }
        if b == 1 {
            v[ka] += sa;
        }
        if a == 1 && b == 1 {
            v[0] += 1.0;
        }
        Ok(v)
    }

    /// Affine functional `Σ_k coeffs[k]·m_k` evaluated at class values `m` (with `m_0 = 1`).
    pub fn evaluate(&self, coeffs: &[f64], moments: &[f64]) -> f64 {
        coeffs.iter().zip(moments).map(|(c, m)| c * m).sum()
    }

    /// Class values read off a moment matrix (averaged over each class).
    pub fn moments_of(&self, gamma: &RMatrix) -> Vec<f64> {
        let n = self.size();
        let mut acc = vec![0.0; self.num_classes()];
        for i in 0..n {
            for j in 0..n {
                acc[self.cell_class(i, j)] += gamma[(i, j)];
            }
        }
        acc.iter().zip(&self.class_sizes).map(|(a, &s)| a / s as f64).collect()
    }

    /// Largest spread of entries within any one class.
    pub fn class_defect(&self, gamma: &RMatrix) -> f64 {
        let m = self.moments_of(gamma);
        let n = self.size();
        let mut worst: f64 = (gamma[(0, 0)] - 1.0).abs();
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((gamma[(i, j)] - m[self.cell_class(i, j)]).abs());
            }
        }
        worst
    }
}

/// Linear inequality `Σ_k coeffs[k]·m_k ≤ rhs` over class values, `m_0 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

/// Fully specified relaxation: maximize `objective · m` subject to the inequalities
/// and `Γ(m) ⪰ 0`.
#[derive(Clone, Debug)]
pub struct NpaProblem {
    structure: Arc<MomentStructure>,
    objective: Vec<f64>,
    inequalities: Vec<Inequality>,
    model: Arc<AffineModel>,
}

struct LevelCache {
    structure: Arc<MomentStructure>,
    objective: Vec<f64>,
    rows: [Vec<f64>; 2],
    general: Arc<AffineModel>,
    /// Restricted to the face where both constrained probabilities vanish.
    face: Arc<AffineModel>,
}

static CACHE: [OnceLock<Result<LevelCache, NpaError>>; 4] =
    [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];

fn level_cache(level: NpaLevel) -> Result<&'static LevelCache, NpaError> {
    CACHE[level.index()]
        .get_or_init(|| {
            let structure = Arc::new(MomentStructure::new(level));
            let p = structure.probability(0, 0, 1, 1)?;
            let q = structure.probability(0, 0, 0, 0)?;
            let objective: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a - b).collect();
            let rows = [structure.probability(0, 1, 1, 0)?, structure.probability(1, 0, 0, 1)?];
            let general = Arc::new(AffineModel::new(&structure, &objective, &rows, &[])?);
            // P(+−|A1B0) = ‖(A1 − A1B0)ψ‖² and P(−+|A0B1) = ‖(B1 − A0B1)ψ‖²: when they
            // vanish, so do the corresponding vectors.
            let kernel: Vec<Vec<f64>> = [
                [(1.0, vec![Letter::A1]), (-1.0, vec![Letter::A1, Letter::B0])],
                [(1.0, vec![Letter::B1]), (-1.0, vec![Letter::A0, Letter::B1])],
            ]
            .iter()
            .filter_map(|terms| structure.word_combination(terms))
            .collect();
            let face = Arc::new(AffineModel::new(&structure, &objective, &rows, &kernel)?);
            Ok(LevelCache { structure, objective, rows, general, face })
        })
        .as_ref()
        .map_err(Clone::clone)
}

impl MomentStructure {
    /// Coefficient vector over the word list for `Σ c·w`, if every word is listed.
    fn word_combination(&self, terms: &[(f64, Vec<Letter>)]) -> Option<Vec<f64>> {
        let mut v = vec![0.0; self.size()];
        for (c, letters) in terms {
            let w = Word::new(letters.clone()).canonical();
            let i = self.words.iter().position(|x| *x == w)?;
            v[i] += c;
        }
        Some(v)
    }
}

/// The Cabello relaxation: maximize `P(++|A1B1) − P(++|A0B0)` subject to
/// `P(+−|A1B0) ≤ eps` and `P(−+|A0B1) ≤ eps`.
pub fn build_problem(level: NpaLevel, eps: f64) -> Result<NpaProblem, NpaError> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(NpaError::InvalidEpsilon(eps));
    }
    let c = level_cache(level)?;
    Ok(NpaProblem {
        structure: Arc::clone(&c.structure),
        objective: c.objective.clone(),
        inequalities: c.rows.iter().map(|r| Inequality { coeffs: r.clone(), rhs: eps }).collect(),
        model: Arc::clone(if eps == 0.0 { &c.face } else { &c.general }),
    })
}

impl NpaProblem {
    /// A relaxation with an arbitrary affine objective and inequality set at `level`.
    pub fn custom(level: NpaLevel, objective: Vec<f64>, inequalities: Vec<Inequality>) -> Result<Self, NpaError> {
        let structure = Arc::clone(&level_cache(level)?.structure);
        let expected = structure.num_classes();
        for got in std::iter::once(objective.len()).chain(inequalities.iter().map(|i| i.coeffs.len())) {
            if got != expected {
                return Err(NpaError::BadFunctional { expected, got });
            }
        }
        let rows: Vec<Vec<f64>> = inequalities.iter().map(|i| i.coeffs.clone()).collect();
        let model = Arc::new(AffineModel::new(&structure, &objective, &rows, &[])?);
        Ok(Self { structure, objective, inequalities, model })
    }

    pub fn structure(&self) -> &MomentStructure {
        &self.structure
    }

    pub fn level(&self) -> NpaLevel {
        self.structure.level
    }

    pub fn size(&self) -> usize {
        self.structure.size()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    pub(crate) fn model(&self) -> &AffineModel {
        &self.model
    }
}

/// Builds the Cabello relaxation at `(level, eps)` and solves it. The affine
/// factorization is shared across calls at the same level.
pub fn npa_upper_bound(level: NpaLevel, eps: f64, opts: &SdpOptions) -> Result<SdpSolution, NpaError> {
    solve(&build_problem(level, eps)?, opts)
}
