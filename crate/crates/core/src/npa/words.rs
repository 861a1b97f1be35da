use std::fmt;

use serde::{Deserialize, Serialize};

/// Projector onto the `+` outcome of one setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    A0,
    A1,
    B0,
    B1,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A0, Letter::A1, Letter::B0, Letter::B1];

    pub fn is_alice(self) -> bool {
        matches!(self, Letter::A0 | Letter::A1)
    }

    pub fn alice(x: usize) -> Letter {
        [Letter::A0, Letter::A1][x]
    }

    pub fn bob(y: usize) -> Letter {
        [Letter::B0, Letter::B1][y]
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Letter::A0 => "A0",
            Letter::A1 => "A1",
            Letter::B0 => "B0",
            Letter::B1 => "B1",
        };
        f.write_str(s)
    }
}

/// Product of projectors; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn new(letters: impl Into<Vec<Letter>>) -> Self {
        Self(letters.into())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Reversed word; every letter is a Hermitian projector.
    pub fn adjoint(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    /// Moves Alice's letters in front of Bob's (they commute) and collapses
    /// repeated adjacent letters (`P² = P`).
    pub fn canonical(&self) -> Self {
        let mut out = Vec::with_capacity(self.0.len());
        for alice in [true, false] {
            let start = out.len();
            for &l in self.0.iter().filter(|l| l.is_alice() == alice) {
                if out.len() > start && out.last() == Some(&l) {
                    continue;
                }
                out.push(l);
            }
        }
        Self(out)
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Representative of the moment `⟨w⟩` after identifying it with `⟨w†⟩`,
    /// which is valid because the relaxation is solved over real symmetric matrices.
    pub fn moment_key(&self) -> Self {
        let a = self.canonical();
        let b = self.adjoint().canonical();
        if b.sort_key() < a.sort_key() {
            b
        } else {
            a
        }
    }

    fn sort_key(&self) -> (usize, &[Letter]) {
        (self.0.len(), &self.0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// All canonical words of length at most `max_len`, shortest first, then by letters.
pub fn canonical_words_up_to(max_len: usize) -> Vec<Word> {
    let mut frontier = vec![Word::identity()];
    let mut all = vec![Word::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in Letter::ALL {
                let cand = w.concat(&Word::new(vec![l]));
                if cand.is_canonical() {
                    next.push(cand);
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    all.dedup();
    all
}
