//! Computational toolkit for stabilized automorphism groups of subshifts of
//! finite type.
//!
//! The crate is organised bottom-up:
//!
//! - [`sft`]: edge shifts, languages, period, entropy and power shifts.
//! - [`spectral`]: rational eigenvalues, cyclic partitions, Smale
//!   decomposition and transitivity of powers.
//! - [`codes`]: sliding block codes commuting with a power of the shift,
//!   enumeration of radius-bounded automorphisms and their action on cyclic
//!   partitions.
//! - [`perm`], [`group`], [`wreath`], [`iso`]: exact finite group arithmetic,
//!   wreath products and isomorphism search.
//! - [`verify`]: reports tying the dynamical side to the algebraic side.
//! - [`sequences`]: the recursive marker words built over the binary and
//!   Sturmian alphabets.
//!
//! Every analysis is exact or carries an explicit numerical tolerance, and all
//! enumerations are bounded by [`Budgets`]; exceeding a budget is an error,
//! never a silent truncation.

pub mod codes;
pub mod group;
pub mod iso;
pub mod perm;
pub mod sequences;
pub mod sft;
pub mod spectral;
pub mod verify;
pub mod wreath;

use thiserror::Error;

/// Version tag embedded in every emitted document.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix is not square: row {row} has {got} entries, expected {expected}")]
    NotSquare { row: usize, got: usize, expected: usize },
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: i64 },
    #[error("graph is empty after removing non-essential states")]
    EmptyGraph,
    #[error("shift is not irreducible")]
    Reducible,
    #[error("{0} is not a rational eigenvalue (period {1})")]
    NoSuchEigenvalue(u64, u64),
    #[error("{what} budget exceeded: need {needed}, limit {limit}")]
    BudgetExceeded { what: &'static str, needed: u128, limit: u128 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("word is not admissible")]
    Inadmissible,
    #[error("word of length {len} is too short for radius {radius}")]
    WordTooShort { len: usize, radius: usize },
    #[error("codes act on different shifts")]
    ShiftMismatch,
    #[error("image of class {0} meets several classes")]
    ImageSplitsClasses(usize),
    #[error("class action is not a rotation")]
    NotARotation,
    #[error("elements belong to different wreath products")]
    AmbientMismatch,
    #[error("zero entropy: ratio undefined")]
    ZeroEntropy,
    #[error("{0} has no factorisation into a transitive power and a rational eigenvalue")]
    NoPowerDecomposition(u64),
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Hard caps on every exponential enumeration in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Total number of words a language table may hold.
    pub words: u128,
    /// Largest group materialised as a multiplication table or scanned by
    /// brute force.
    pub group_order: u128,
    /// Search nodes visited by the automorphism enumerator.
    pub search_nodes: u128,
    /// Length of generated example words.
    pub sequence_len: u128,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            words: 10_000_000,
            group_order: 20_000,
            search_nodes: 200_000_000,
            sequence_len: 1 << 27,
        }
    }
}

impl Budgets {
    /// Defaults overridden by `STABDYN_BUDGET`.
    ///
    /// The variable holds either a single integer (the word budget) or a comma
    /// separated list of `key=value` pairs with keys `words`, `group`,
    /// `search` and `sequence`.
    pub fn from_env() -> Result<Self> {
        match std::env::var("STABDYN_BUDGET") {
            Ok(spec) => Budgets::default().with_overrides(&spec),
            Err(_) => Ok(Budgets::default()),
        }
    }

    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(self);
        }
        if let Ok(v) = spec.parse::<u128>() {
            self.words = v;
            return Ok(self);
        }
        for item in spec.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad budget entry {item:?}")))?;
            let value: u128 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad budget value {value:?}")))?;
            match key.trim() {
                "words" => self.words = value,
                "group" => self.group_order = value,
                "search" => self.search_nodes = value,
                "sequence" => self.sequence_len = value,
                other => return Err(Error::Parse(format!("unknown budget key {other:?}"))),
            }
        }
        Ok(self)
    }

    pub(crate) fn check(what: &'static str, needed: u128, limit: u128) -> Result<()> {
        if needed > limit {
            Err(Error::BudgetExceeded { what, needed, limit })
        } else {
            Ok(())
        }
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_overrides() {
        let b = Budgets::default().with_overrides("500").unwrap();
        assert_eq!(b.words, 500);
        let b = Budgets::default().with_overrides("group=10, search=7").unwrap();
        assert_eq!((b.group_order, b.search_nodes), (10, 7));
        assert!(Budgets::default().with_overrides("bogus=1").is_err());
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(6), vec![1, 2, 3, 6]);
        assert_eq!(divisors(16), vec![1, 2, 4, 8, 16]);
        assert_eq!(lcm(4, 6), 12);
    }
}
