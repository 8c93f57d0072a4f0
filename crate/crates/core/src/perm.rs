//! Permutations of `{1, …, n}` (stored 0-based).

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation `w` of `{0, …, n−1}`; `images[i] = w(i)`.
///
/// Displayed and serialized in 1-based one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    /// The identity of `S_n`.
    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidInput(format!("{images:?} is not a permutation of 0..{n}")));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    /// Builds a permutation from 1-based one-line notation.
    pub fn from_one_line(one_based: &[usize]) -> Result<Self> {
        if one_based.contains(&0) {
            return Err(Error::InvalidInput("one-line notation is 1-based".into()));
        }
        Self::from_images(one_based.iter().map(|&x| x - 1).collect())
    }

    /// The transposition exchanging `i` and `j` (0-based).
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Self { images }
    }

    /// All of `S_n` in lexicographic order of one-line notation.
    pub fn all(n: usize) -> Vec<Perm> {
        (0..n).permutations(n).map(|images| Perm { images }).collect()
    }

    /// Degree `n`.
    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// `w(i)`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// 0-based images.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `w⁻¹`.
    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.n()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Perm { images: inv }
    }

    /// The composite `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.n(), other.n(), "composing permutations of different degree");
        Perm { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    /// True for the identity.
    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Sorted image of a set of 0-based indices.
    pub fn image_of_set(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&i| self.images[i]).collect();
        out.sort_unstable();
        out
    }

    /// 1-based one-line notation.
    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x + 1).collect()
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.one_line().iter().map(|x| x.to_string()).join(","))
    }
}

impl TryFrom<Vec<usize>> for Perm {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Perm::from_one_line(&v)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Self {
        p.one_line()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_laws() {
        let all = Perm::all(4);
        assert_eq!(all.len(), 24);
        assert!(all[0].is_identity());
        for a in &all {
            assert!(a.compose(&a.inverse()).is_identity());
            for b in all.iter().step_by(5) {
                let ab = a.compose(b);
                for i in 0..4 {
                    assert_eq!(ab.apply(i), a.apply(b.apply(i)));
                }
            }
        }
    }

    #[test]
    fn parsing_and_display() {
        let w = Perm::from_one_line(&[2, 3, 1]).unwrap();
        assert_eq!(w.to_string(), "[2,3,1]");
        assert_eq!(w.apply(0), 1);
        assert!(Perm::from_one_line(&[1, 1, 2]).is_err());
        assert!(Perm::from_one_line(&[0, 1]).is_err());
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(json, "[2,3,1]");
        assert_eq!(serde_json::from_str::<Perm>(&json).unwrap(), w);
    }
}
