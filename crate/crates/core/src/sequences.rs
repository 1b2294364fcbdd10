//! Recursive marker words and their residue properties.
//!
//! Two families of finite words are generated, each carrying markers that
//! may only appear in one residue class:
//!
//! - binary: `A_0` empty, `A_n = A_{n-1} A_{n-1} b_n`, `b_n = 1 0^{2ⁿ-1}`;
//! - over `{0, 1, a}` with a Sturmian filling: `A_0 = aaa`,
//!   `b_n = a F_{[1, 3ⁿ-2]} a`, `A_{n+1} = A_n b_{n+1} A_n`, so that
//!   `|A_n| = 3^{n+1}`.
//!
//! Words are ASCII strings; positions are relative to the start of the
//! generated prefix.

use std::collections::BTreeSet;

use memchr::memmem;
use serde::Serialize;

use crate::{Budgets, Error, Result, SCHEMA_VERSION};

/// The marker `b_n = 1 0^{2ⁿ-1}`.
pub fn example1_marker(n: u32) -> String {
    let mut b = String::with_capacity(1 << n);
    b.push('1');
    b.extend(std::iter::repeat_n('0', (1usize << n) - 1));
    b
}

/// `|A_n| = n·2ⁿ`.
pub fn example1_len(level: u32) -> u128 {
    level as u128 * (1u128 << level)
}

/// `A_level` of the binary family.
pub fn example1_word(level: u32, budgets: &Budgets) -> Result<String> {
    if level >= 100 {
        return Err(Error::InvalidArgument(format!("level {level} is too large")));
    }
    Budgets::check("sequence length", example1_len(level), budgets.sequence_len)?;
    let mut a = String::new();
    for n in 1..=level {
        let prev = a.clone();
        a.push_str(&prev);
        a.push_str(&example1_marker(n));
    }
    Ok(a)
}

/// Sturmian symbols `F_1 … F_len` of slope `α = (√5 − 1)/2` and intercept
/// zero, `F_i = ⌊(i+1)α⌋ − ⌊iα⌋`, computed in exact integer arithmetic.
pub fn sturmian_prefix(len: usize, budgets: &Budgets) -> Result<String> {
    Budgets::check("sequence length", len as u128, budgets.sequence_len)?;
    // ⌊kα⌋ = ⌊(⌊k√5⌋ − k)/2⌋ since k√5 is irrational for k > 0.
    let floor_alpha = |k: u128| ((5 * k * k).isqrt() - k) / 2;
    Ok((1..=len as u128)
        .map(|i| if floor_alpha(i + 1) - floor_alpha(i) == 1 { '1' } else { '0' })
        .collect())
}

/// The marker `b_n = a F_{[1, 3ⁿ-2]} a`.
pub fn example2_marker(n: u32, budgets: &Budgets) -> Result<String> {
    if n == 0 {
        return Err(Error::InvalidArgument("markers start at n = 1".into()));
    }
    let len = 3usize.pow(n);
    Ok(format!("a{}a", sturmian_prefix(len - 2, budgets)?))
}

/// `A_level` of the Sturmian family.
pub fn example2_word(level: u32, budgets: &Budgets) -> Result<String> {
    if level >= 60 {
        return Err(Error::InvalidArgument(format!("level {level} is too large")));
    }
    Budgets::check("sequence length", 3u128.pow(level + 1), budgets.sequence_len)?;
    let mut a = String::from("aaa");
    for n in 1..=level {
        let b = example2_marker(n, budgets)?;
        a = format!("{a}{b}{a}");
    }
    debug_assert_eq!(a.len(), 3usize.pow(level + 1));
    Ok(a)
}

/// A marker `b_k` with its occurrence positions in a generated prefix.
#[derive(Debug, Clone, Serialize)]
pub struct MarkerEntry {
    pub k: u32,
    pub word: String,
    pub positions: Vec<usize>,
}

/// A generated prefix together with its marker catalog.
#[derive(Debug, Clone, Serialize)]
pub struct RecursiveWordSpec {
    pub schema_version: u32,
    pub scheme: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub header: Option<String>,
    pub level: u32,
    pub length: usize,
    pub prefix: String,
    pub markers: Vec<MarkerEntry>,
}

/// `A_level` of the binary family with markers `b_1 … b_level`.
pub fn example1_spec(level: u32, budgets: &Budgets) -> Result<RecursiveWordSpec> {
    let prefix = example1_word(level, budgets)?;
    let markers = (1..=level)
        .map(|k| {
            let word = example1_marker(k);
            let positions = occurrences(&prefix, &word);
            MarkerEntry { k, word, positions }
        })
        .collect();
    Ok(RecursiveWordSpec {
        schema_version: SCHEMA_VERSION,
        scheme: "example1".into(),
        header: None,
        level,
        length: prefix.len(),
        prefix,
        markers,
    })
}

/// `A_level` of the Sturmian family with markers `b_1 … b_level`.
pub fn example2_spec(level: u32, budgets: &Budgets) -> Result<RecursiveWordSpec> {
    let prefix = example2_word(level, budgets)?;
    let markers = (1..=level)
        .map(|k| {
            let word = example2_marker(k, budgets)?;
            let positions = occurrences(&prefix, &word);
            Ok(MarkerEntry { k, word, positions })
        })
        .collect::<Result<_>>()?;
    Ok(RecursiveWordSpec {
        schema_version: SCHEMA_VERSION,
        scheme: "example2".into(),
        header: Some(EXAMPLE2_HEADER.into()),
        level,
        length: prefix.len(),
        prefix,
        markers,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidueReport {
    pub schema_version: u32,
    pub scheme: String,
    /// Recursion actually used, stated up front.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub header: Option<String>,
    pub n: u32,
    pub modulus: u64,
    pub depth: usize,
    pub marker_len: usize,
    pub occurrences: usize,
    /// Distinct residues of occurrence positions.
    pub residues: Vec<u64>,
    /// Whether every `a` lies in an aligned `aaa` block or at an end of a
    /// marker occurrence. Only for the Sturmian family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_covered: Option<bool>,
    pub passed: bool,
}

/// Positions of all (possibly overlapping) occurrences of `pattern`.
pub fn occurrences(word: &str, pattern: &str) -> Vec<usize> {
    memmem::find_iter(word.as_bytes(), pattern.as_bytes()).collect()
}

/// Distinct residues of the occurrences of `pattern` modulo `modulus`.
pub fn residues(word: &str, pattern: &str, modulus: u64) -> (usize, Vec<u64>) {
    let occ = occurrences(word, pattern);
    let set: BTreeSet<u64> = occ.iter().map(|&i| i as u64 % modulus).collect();
    (occ.len(), set.into_iter().collect())
}

/// Residue check of `b_n` on an arbitrary binary word.
pub fn example1_residues_in(word: &str, n: u32) -> ResidueReport {
    let marker = example1_marker(n);
    let modulus = 1u64 << n;
    let (occurrences, residues) = residues(word, &marker, modulus);
    ResidueReport {
        schema_version: SCHEMA_VERSION,
        scheme: "example1".into(),
        header: None,
        n,
        modulus,
        depth: word.len(),
        marker_len: marker.len(),
        occurrences,
        passed: residues.len() <= 1,
        residues,
        alpha_covered: None,
    }
}

/// Residue check of `b_n` on the first `depth` symbols of the binary
/// family, generated to the smallest sufficient level.
pub fn check_example1_residues(n: u32, depth: usize, budgets: &Budgets) -> Result<ResidueReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("markers start at n = 1".into()));
    }
    let level = (n..100)
        .find(|&l| example1_len(l) >= depth as u128)
        .ok_or_else(|| Error::InvalidArgument(format!("depth {depth} too large")))?;
    let word = example1_word(level, budgets)?;
    Ok(example1_residues_in(&word[..depth], n))
}

const EXAMPLE2_HEADER: &str = "A_{n+1} = A_n b_{n+1} A_n, matching |A_n| = 3^(n+1)";

/// Residue and coverage checks of `b_n` on an arbitrary word over
/// `{0, 1, a}`. Markers `b_1 … b_levels` are used for the coverage check.
pub fn example2_residues_in(word: &str, n: u32, levels: u32, budgets: &Budgets) -> Result<ResidueReport> {
    let marker = example2_marker(n, budgets)?;
    let modulus = 3u64.pow(n);
    let (occ, residues) = residues(word, &marker, modulus);
    let bytes = word.as_bytes();
    let mut covered = vec![false; bytes.len()];
    for k in 1..=levels.max(n) {
        let b = example2_marker(k, budgets)?;
        if b.len() > word.len() {
            break;
        }
        for i in occurrences(word, &b) {
            covered[i] = true;
            covered[i + b.len() - 1] = true;
        }
    }
    for (start, chunk) in bytes.chunks(3).enumerate() {
        if chunk == b"aaa" {
            covered[3 * start..3 * start + 3].iter_mut().for_each(|c| *c = true);
        }
    }
    let alpha_covered = bytes.iter().zip(&covered).all(|(&s, &c)| s != b'a' || c);
    Ok(ResidueReport {
        schema_version: SCHEMA_VERSION,
        scheme: "example2".into(),
        header: Some(EXAMPLE2_HEADER.into()),
        n,
        modulus,
        depth: word.len(),
        marker_len: marker.len(),
        occurrences: occ,
        passed: residues.len() <= 1 && alpha_covered,
        residues,
        alpha_covered: Some(alpha_covered),
    })
}

/// Checks of `b_n` on the first `depth` symbols of the Sturmian family.
pub fn check_example2_markers(n: u32, depth: usize, budgets: &Budgets) -> Result<ResidueReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("markers start at n = 1".into()));
    }
    let level = (n..60)
        .find(|&l| 3u128.pow(l + 1) >= depth as u128)
        .ok_or_else(|| Error::InvalidArgument(format!("depth {depth} too large")))?;
    let word = example2_word(level, budgets)?;
    example2_residues_in(&word[..depth], n, level, budgets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budgets {
        Budgets::default()
    }

    #[test]
    fn binary_family() {
        assert_eq!(example1_word(1, &b()).unwrap(), "10");
        assert_eq!(example1_word(2, &b()).unwrap(), "10101000");
        for level in 1..=20 {
            let len = example1_word(level, &b()).unwrap().len();
            assert_eq!(len as u128, example1_len(level));
            assert_eq!(len % (1 << level), 0);
        }
    }

    #[test]
    fn binary_residues() {
        let r = check_example1_residues(1, 8, &b()).unwrap();
        assert_eq!((r.occurrences, r.residues.clone()), (3, vec![0]));
        assert!(r.passed);
        let depth = example1_len(4) as usize;
        let r = check_example1_residues(2, depth, &b()).unwrap();
        assert!(r.passed && r.residues.len() == 1);
        // "10" at 0 and at 3
        assert!(!example1_residues_in("10010", 1).passed);
    }

    #[test]
    fn sturmian() {
        assert_eq!(sturmian_prefix(5, &b()).unwrap(), "10110");
        // no factor 00 at slope above 1/2
        assert!(!sturmian_prefix(1000, &b()).unwrap().contains("00"));
    }

    #[test]
    fn marker_catalogs() {
        let s = example1_spec(2, &b()).unwrap();
        assert_eq!(s.prefix, "10101000");
        assert_eq!(s.markers[0].positions, vec![0, 2, 4]);
        assert_eq!(s.markers[1].positions, vec![4]);
        let s = example2_spec(2, &b()).unwrap();
        assert_eq!(s.length, 27);
        assert_eq!(s.markers[1].positions, vec![9]);
    }

    #[test]
    fn sturmian_family() {
        assert_eq!(example2_word(0, &b()).unwrap(), "aaa");
        assert_eq!(example2_word(1, &b()).unwrap(), "aaaa1aaaa");
        assert_eq!(example2_word(2, &b()).unwrap().len(), 27);
        let r = check_example2_markers(1, 81, &b()).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.header.as_deref(), Some(EXAMPLE2_HEADER));
    }
}
