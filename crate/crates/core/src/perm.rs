//! Permutations of `{0, …, n-1}`.
//!
//! Composition follows function notation: `(σ·τ)(x) = σ(τ(x))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::from_images(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation(images))
    }

    /// The cycle `a₀ → a₁ → … → a₀` on `n` points.
    pub fn cycle(n: usize, points: &[usize]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for (k, &a) in points.iter().enumerate() {
            if a >= n {
                return Err(Error::InvalidArgument(format!("point {a} outside 0..{n}")));
            }
            images[a] = points[(k + 1) % points.len()];
        }
        Permutation::from_images(images)
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        Permutation::cycle(n, &[a, b])
    }

    /// `i ↦ i + k mod n`.
    pub fn rotation(n: usize, k: usize) -> Self {
        Permutation((0..n).map(|i| (i + k) % n).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn pow(&self, k: i64) -> Permutation {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Permutation::identity(self.degree());
        for _ in 0..k.unsigned_abs() {
            out = out.compose(&base);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Orbits, each listed from its smallest point along the permutation.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut i = self.0[start];
            while i != start {
                seen[i] = true;
                orbit.push(i);
                i = self.0[i];
            }
            out.push(orbit);
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.orbits().iter().fold(1, |acc, o| crate::lcm(acc, o.len() as u64))
    }

    pub fn is_even(&self) -> bool {
        self.orbits().iter().map(|o| o.len() - 1).sum::<usize>() % 2 == 0
    }

    /// All permutations of `n` points in lexicographic order of images.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut current: Vec<usize> = (0..n).collect();
        let mut out = vec![Permutation(current.clone())];
        // Next lexicographic permutation until exhausted.
        loop {
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else { break };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
            out.push(Permutation(current.clone()));
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with fixed points omitted, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.orbits().into_iter().filter(|o| o.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_is_function_composition() {
        let s = Permutation::cycle(3, &[0, 1, 2]).unwrap();
        let t = Permutation::transposition(3, 0, 1).unwrap();
        // (s∘t)(0) = s(1) = 2
        assert_eq!(s.compose(&t).apply(0), 2);
        assert_eq!(t.compose(&s).apply(0), 0);
    }

    #[test]
    fn inverse_and_powers() {
        let s = Permutation::cycle(4, &[0, 2, 3]).unwrap();
        assert!(s.compose(&s.inverse()).is_identity());
        assert!(s.pow(3).is_identity());
        assert_eq!(s.pow(-1), s.inverse());
        assert_eq!(s.order(), 3);
    }

    #[test]
    fn enumeration_and_parity() {
        let all = Permutation::all(4);
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all.iter().filter(|p| p.is_even()).count(), 12);
    }

    #[test]
    fn display_and_validation() {
        let p = Permutation::from_images(vec![1, 0, 3, 2]).unwrap();
        assert_eq!(p.to_string(), "(0 1)(2 3)");
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert_eq!(p.orbits(), vec![vec![0, 1], vec![2, 3]]);
    }
}
