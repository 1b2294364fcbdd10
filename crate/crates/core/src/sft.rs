//! Edge shifts presented by nonnegative integer matrices.
//!
//! The alphabet of an [`EdgeShift`] is its edge set. Edges are numbered in
//! row-major order of the adjacency matrix, parallel edges consecutively, so
//! the labeling is a function of the matrix alone.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{gcd, Budgets, Error, Result, SCHEMA_VERSION};

/// An edge label.
pub type Sym = u16;
/// A finite sequence of edge labels.
pub type Word = Vec<Sym>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub struct EdgeShift {
    states: Vec<String>,
    adjacency: Vec<Vec<u64>>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<Sym>>,
    log: Vec<String>,
}

impl PartialEq for EdgeShift {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states && self.adjacency == other.adjacency
    }
}

impl Eq for EdgeShift {}

#[derive(Debug, Deserialize)]
struct MatrixDocument {
    #[serde(default)]
    states: Option<Vec<serde_json::Value>>,
    adjacency: Vec<Vec<i64>>,
}

#[derive(Debug, Serialize)]
pub struct ShiftDocument {
    pub schema_version: u32,
    pub states: Vec<String>,
    pub adjacency: Vec<Vec<u64>>,
    pub hash: String,
}

/// Words of every length up to `max_length`, each level sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageTable {
    levels: Vec<Vec<Word>>,
}

impl LanguageTable {
    pub fn max_length(&self) -> usize {
        self.levels.len()
    }

    /// Sorted admissible words of length `len` (1-based).
    pub fn level(&self, len: usize) -> &[Word] {
        &self.levels[len - 1]
    }

    pub fn count(&self, len: usize) -> usize {
        self.levels[len - 1].len()
    }

    pub fn contains(&self, word: &[Sym]) -> bool {
        let len = word.len();
        len >= 1
            && len <= self.levels.len()
            && self.levels[len - 1]
                .binary_search_by(|w| w.as_slice().cmp(word))
                .is_ok()
    }
}

/// Presentation of `(X, σⁿ)` as an edge shift whose edges are length-`n`
/// paths of the original graph.
#[derive(Debug, Clone)]
pub struct PowerShift {
    pub shift: EdgeShift,
    /// `paths[e]` is the original path spelled by power edge `e`.
    pub paths: Vec<Word>,
}

/// Perron eigenvalue and the derived entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entropy {
    pub entropy: f64,
    pub perron: f64,
    pub iterations: usize,
}

const ENTROPY_TOL: f64 = 1e-12;
const ENTROPY_MAX_ITER: usize = 1_000_000;

impl EdgeShift {
    /// Builds a shift from an adjacency matrix with default state names
    /// `0, 1, …`.
    pub fn from_matrix(adjacency: Vec<Vec<u64>>) -> Result<Self> {
        let states = (0..adjacency.len()).map(|i| i.to_string()).collect();
        Self::new(states, adjacency)
    }

    /// Builds and normalizes a shift: states without an outgoing or without
    /// an incoming edge are pruned until the graph is essential.
    pub fn new(states: Vec<String>, adjacency: Vec<Vec<u64>>) -> Result<Self> {
        let n = adjacency.len();
        if states.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} state names for a {n}x{n} matrix",
                states.len()
            )));
        }
        for (row, r) in adjacency.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, got: r.len(), expected: n });
            }
        }
        let mut alive = vec![true; n];
        let mut log = Vec::new();
        loop {
            let mut changed = false;
            for s in 0..n {
                if !alive[s] {
                    continue;
                }
                let has_out = (0..n).any(|t| alive[t] && adjacency[s][t] > 0);
                let has_in = (0..n).any(|t| alive[t] && adjacency[t][s] > 0);
                if !has_out || !has_in {
                    alive[s] = false;
                    changed = true;
                    let why = if !has_out { "no outgoing edge" } else { "no incoming edge" };
                    log.push(format!("removed state {}: {why}", states[s]));
                }
            }
            if !changed {
                break;
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&s| alive[s]).collect();
        if keep.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let states: Vec<String> = keep.iter().map(|&s| states[s].clone()).collect();
        let adjacency: Vec<Vec<u64>> = keep
            .iter()
            .map(|&s| keep.iter().map(|&t| adjacency[s][t]).collect())
            .collect();
        let total: u64 = adjacency.iter().flatten().sum();
        Budgets::check("alphabet", total as u128, Sym::MAX as u128)?;
        let mut edges = Vec::with_capacity(total as usize);
        let mut out_edges = vec![Vec::new(); keep.len()];
        for (i, row) in adjacency.iter().enumerate() {
            for (j, &count) in row.iter().enumerate() {
                for _ in 0..count {
                    out_edges[i].push(edges.len() as Sym);
                    edges.push(Edge { from: i, to: j });
                }
            }
        }
        Ok(EdgeShift { states, adjacency, edges, out_edges, log })
    }

    /// Parses either matrix text (rows separated by `/` or newlines, entries
    /// by whitespace) or a JSON document `{"states": [...], "adjacency": [[...]]}`.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.starts_with('{') {
            let doc: MatrixDocument =
                serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
            let n = doc.adjacency.len();
            let states = match doc.states {
                Some(s) => s
                    .into_iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => s,
                        other => other.to_string(),
                    })
                    .collect(),
                None => (0..n).map(|i| i.to_string()).collect(),
            };
            return Self::new(states, check_entries(doc.adjacency)?);
        }
        let mut rows = Vec::new();
        for line in trimmed.split(['/', '\n', ';']) {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad matrix entry {tok:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty matrix".into()));
        }
        Self::from_matrix(check_entries(rows)?)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn adjacency(&self) -> &[Vec<u64>] {
        &self.adjacency
    }

    pub fn alphabet_size(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, sym: Sym) -> Edge {
        self.edges[sym as usize]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, state: usize) -> &[Sym] {
        &self.out_edges[state]
    }

    /// Record of states pruned during normalization.
    pub fn normalization_log(&self) -> &[String] {
        &self.log
    }

    pub fn is_admissible(&self, word: &[Sym]) -> bool {
        word.iter().all(|&s| (s as usize) < self.edges.len())
            && word
                .windows(2)
                .all(|p| self.edges[p[0] as usize].to == self.edges[p[1] as usize].from)
    }

    /// Short content hash of the adjacency matrix.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for row in &self.adjacency {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            h.update(line.join(" ").as_bytes());
            h.update(b"/");
        }
        hex::encode(&h.finalize()[..8])
    }

    pub fn to_document(&self) -> ShiftDocument {
        ShiftDocument {
            schema_version: SCHEMA_VERSION,
            states: self.states.clone(),
            adjacency: self.adjacency.clone(),
            hash: self.hash(),
        }
    }

    pub fn symbol_label(&self, sym: Sym) -> String {
        let n = self.edges.len();
        if n <= 36 {
            std::char::from_digit(sym as u32, 36).unwrap().to_string()
        } else {
            sym.to_string()
        }
    }

    /// Renders a word: one character per symbol for alphabets of at most 36
    /// edges, dot separated decimals otherwise.
    pub fn format_word(&self, word: &[Sym]) -> String {
        let parts: Vec<String> = word.iter().map(|&s| self.symbol_label(s)).collect();
        if self.edges.len() <= 36 {
            parts.concat()
        } else {
            parts.join(".")
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let syms: Vec<Sym> = if self.edges.len() <= 36 {
            text.chars()
                .map(|c| {
                    c.to_digit(36)
                        .map(|d| d as Sym)
                        .ok_or_else(|| Error::Parse(format!("bad symbol {c:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            text.split('.')
                .map(|t| t.parse::<Sym>().map_err(|_| Error::Parse(format!("bad symbol {t:?}"))))
                .collect::<Result<_>>()?
        };
        if syms.iter().any(|&s| s as usize >= self.edges.len()) {
            return Err(Error::Parse(format!("symbol out of range in {text:?}")));
        }
        Ok(syms)
    }

    /// Strongly connected components, each sorted, listed by smallest member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.num_states();
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| self.adjacency[i][j] > 0).collect())
            .collect();
        let mut pred = vec![Vec::new(); n];
        for (i, s) in succ.iter().enumerate() {
            for &j in s {
                pred[j].push(i);
            }
        }
        // Kosaraju, iteratively.
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut stack = vec![(root, 0usize)];
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next < succ[v].len() {
                    let w = succ[v][*next];
                    *next += 1;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push((w, 0));
                    }
                } else {
                    order.push(v);
                    stack.pop();
                }
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for &root in order.iter().rev() {
            if comp[root] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![root];
            comp[root] = id;
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for &w in &pred[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps.sort();
        comps
    }

    pub fn is_irreducible(&self) -> bool {
        self.strongly_connected_components().len() == 1
    }

    /// Period of an irreducible shift: gcd of `level(u) + 1 − level(v)` over
    /// all edges `u → v`, where levels are BFS distances from state 0.
    pub fn period(&self) -> Result<u64> {
        if !self.is_irreducible() {
            return Err(Error::Reducible);
        }
        let levels = self.bfs_levels(0);
        let mut g = 0u64;
        for e in &self.edges {
            let d = levels[e.from] as i64 + 1 - levels[e.to] as i64;
            g = gcd(g, d.unsigned_abs());
        }
        Ok(g)
    }

    pub(crate) fn bfs_levels(&self, base: usize) -> Vec<usize> {
        let n = self.num_states();
        let mut level = vec![usize::MAX; n];
        level[base] = 0;
        let mut queue = VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.out_edges[v] {
                let w = self.edges[e as usize].to;
                if level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        level
    }

    pub fn is_mixing(&self) -> bool {
        matches!(self.period(), Ok(1))
    }

    /// Entropy `log λ` of an irreducible shift, with `λ` the Perron
    /// eigenvalue.
    ///
    /// Iterates `A + I`, which is primitive whenever `A` is irreducible, and
    /// stops once the Collatz–Wielandt bounds `min (Bx)ᵢ/xᵢ ≤ λ+1 ≤ max (Bx)ᵢ/xᵢ`
    /// agree to a relative `1e-12`.
    pub fn entropy(&self) -> Result<Entropy> {
        if !self.is_irreducible() {
            return Err(Error::Reducible);
        }
        let n = self.num_states();
        let b: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.adjacency[i][j] as f64 + if i == j { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let mut x = vec![1.0f64; n];
        for it in 1..=ENTROPY_MAX_ITER {
            let y: Vec<f64> = b
                .iter()
                .map(|row| row.iter().zip(&x).map(|(a, v)| a * v).sum())
                .collect();
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for (yi, xi) in y.iter().zip(&x) {
                let r = yi / xi;
                lo = lo.min(r);
                hi = hi.max(r);
            }
            if hi - lo <= ENTROPY_TOL * hi {
                let perron = 0.5 * (lo + hi) - 1.0;
                return Ok(Entropy { entropy: perron.ln(), perron, iterations: it });
            }
            let top = y.iter().cloned().fold(0.0, f64::max);
            x = y.into_iter().map(|v| v / top).collect();
        }
        Err(Error::NoConvergence(ENTROPY_MAX_ITER))
    }

    /// The shift `(X, σⁿ)` with length-`n` paths as edges.
    pub fn power_shift(&self, n: usize, budgets: &Budgets) -> Result<PowerShift> {
        if n == 0 {
            return Err(Error::InvalidArgument("power must be positive".into()));
        }
        let total: u128 = mat_pow(&self.adjacency, n).iter().flatten().sum();
        Budgets::check("power-shift paths", total, budgets.words.min(Sym::MAX as u128))?;
        let mut paths: Vec<Word> = Vec::with_capacity(total as usize);
        for s in 0..self.num_states() {
            let mut stack: Vec<Word> = vec![Vec::new()];
            // Depth-first, pushed in reverse so paths come out sorted.
            while let Some(p) = stack.pop() {
                if p.len() == n {
                    paths.push(p);
                    continue;
                }
                let at = p.last().map_or(s, |&e| self.edges[e as usize].to);
                for &e in self.out_edges[at].iter().rev() {
                    let mut q = p.clone();
                    q.push(e);
                    stack.push(q);
                }
            }
        }
        let key = |p: &Word| {
            (self.edges[p[0] as usize].from, self.edges[*p.last().unwrap() as usize].to)
        };
        paths.sort_by(|a, b| key(a).cmp(&key(b)).then_with(|| a.cmp(b)));
        let mut adj = vec![vec![0u64; self.num_states()]; self.num_states()];
        for p in &paths {
            let (i, j) = key(p);
            adj[i][j] += 1;
        }
        // Powers of an essential graph stay essential, so no state is pruned
        // and the canonical labels line up with the sorted paths.
        let shift = EdgeShift::new(self.states.clone(), adj)?;
        Ok(PowerShift { shift, paths })
    }

    /// Induced subshift on `keep` (sorted state indices), with the map from
    /// new edge labels to old ones.
    pub fn restrict(&self, keep: &[usize]) -> Result<(EdgeShift, Vec<Sym>)> {
        let states = keep.iter().map(|&s| self.states[s].clone()).collect();
        let adjacency = keep
            .iter()
            .map(|&s| keep.iter().map(|&t| self.adjacency[s][t]).collect())
            .collect();
        let sub = EdgeShift::new(states, adjacency)?;
        if sub.num_states() != keep.len() {
            return Err(Error::InvalidArgument("restriction is not essential".into()));
        }
        let mut map = Vec::with_capacity(sub.alphabet_size());
        for &s in keep {
            for &e in &self.out_edges[s] {
                if keep.contains(&self.edges[e as usize].to) {
                    map.push(e);
                }
            }
        }
        // Old edges from a fixed source are grouped by target in increasing
        // order, exactly as the new labeling enumerates them.
        debug_assert_eq!(map.len(), sub.alphabet_size());
        Ok((sub, map))
    }

    /// All admissible edge words of length `1..=max_len`.
    pub fn words(&self, max_len: usize, budgets: &Budgets) -> Result<LanguageTable> {
        if max_len == 0 {
            return Err(Error::InvalidArgument("word length must be positive".into()));
        }
        let mut total: u128 = 0;
        let mut power = identity(self.num_states());
        for _ in 0..max_len {
            power = mat_mul(&power, &self.adjacency);
            total = total.saturating_add(power.iter().flatten().sum());
        }
        Budgets::check("words", total, budgets.words)?;
        let mut levels: Vec<Vec<Word>> = Vec::with_capacity(max_len);
        levels.push((0..self.edges.len() as Sym).map(|e| vec![e]).collect());
        for _ in 1..max_len {
            let prev = levels.last().unwrap();
            let mut next = Vec::new();
            for w in prev {
                let at = self.edges[*w.last().unwrap() as usize].to;
                for &e in &self.out_edges[at] {
                    let mut v = w.clone();
                    v.push(e);
                    next.push(v);
                }
            }
            levels.push(next);
        }
        Ok(LanguageTable { levels })
    }

    /// Sorted admissible words of exactly `len` symbols.
    pub fn words_of_length(&self, len: usize, budgets: &Budgets) -> Result<Vec<Word>> {
        if len == 0 {
            return Ok(vec![Vec::new()]);
        }
        let count: u128 = mat_pow(&self.adjacency, len).iter().flatten().sum();
        Budgets::check("words", count, budgets.words)?;
        let mut level: Vec<Word> = (0..self.edges.len() as Sym).map(|e| vec![e]).collect();
        for _ in 1..len {
            level = level
                .iter()
                .flat_map(|w| {
                    let at = self.edges[*w.last().unwrap() as usize].to;
                    self.out_edges[at].iter().map(move |&e| {
                        let mut v = w.clone();
                        v.push(e);
                        v
                    })
                })
                .collect();
        }
        Ok(level)
    }

    /// Vertex-shift words of length `len` for a 0/1 matrix: sequences of
    /// `len` states along edges.
    pub fn vertex_words(&self, len: usize, budgets: &Budgets) -> Result<Vec<Vec<usize>>> {
        if self.adjacency.iter().flatten().any(|&c| c > 1) {
            return Err(Error::InvalidArgument("vertex labeling needs a 0/1 matrix".into()));
        }
        if len == 0 {
            return Err(Error::InvalidArgument("word length must be positive".into()));
        }
        let n = self.num_states();
        let count: u128 = mat_pow(&self.adjacency, len - 1).iter().flatten().sum();
        Budgets::check("words", count, budgets.words)?;
        let mut out: Vec<Vec<usize>> = (0..n).map(|s| vec![s]).collect();
        for _ in 1..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    let last = *w.last().unwrap();
                    (0..n).filter(move |&t| self.adjacency[last][t] > 0).map(move |t| {
                        let mut v = w.clone();
                        v.push(t);
                        v
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

fn check_entries(rows: Vec<Vec<i64>>) -> Result<Vec<Vec<u64>>> {
    let n = rows.len();
    for (row, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare { row, got: r.len(), expected: n });
        }
    }
    rows.into_iter()
        .enumerate()
        .map(|(row, r)| {
            r.into_iter()
                .enumerate()
                .map(|(col, v)| {
                    u64::try_from(v).map_err(|_| Error::NegativeEntry { row, col, value: v })
                })
                .collect()
        })
        .collect()
}

fn identity(n: usize) -> Vec<Vec<u128>> {
    (0..n).map(|i| (0..n).map(|j| u128::from(i == j)).collect()).collect()
}

fn mat_mul(a: &[Vec<u128>], b: &[Vec<u64>]) -> Vec<Vec<u128>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(0u128, |acc, k| {
                        acc.saturating_add(a[i][k].saturating_mul(b[k][j] as u128))
                    })
                })
                .collect()
        })
        .collect()
}

/// `Aⁿ` with saturating arithmetic.
pub fn mat_pow(a: &[Vec<u64>], n: usize) -> Vec<Vec<u128>> {
    let mut p = identity(a.len());
    for _ in 0..n {
        p = mat_mul(&p, a);
    }
    p
}

/// Characteristic polynomial `det(xI − A)` by Faddeev–LeVerrier, lowest
/// degree first.
pub fn characteristic_polynomial(a: &[Vec<u64>]) -> Vec<i128> {
    let n = a.len();
    let a: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut coeffs = vec![0i128; n + 1];
    coeffs[n] = 1;
    let mut m = vec![vec![0i128; n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).map(|l| a[i][l] * m[l][j]).sum::<i128>();
            }
            next[i][i] += coeffs[n - k + 1];
        }
        m = next;
        let trace: i128 = (0..n).map(|i| (0..n).map(|l| a[i][l] * m[l][i]).sum::<i128>()).sum();
        coeffs[n - k] = -trace / k as i128;
    }
    coeffs
}

/// Largest real root of the characteristic polynomial, located by a downward
/// sign scan from the maximal row sum followed by bisection. Independent of
/// [`EdgeShift::entropy`]; meant for small matrices.
pub fn perron_root_by_charpoly(a: &[Vec<u64>]) -> f64 {
    let coeffs = characteristic_polynomial(a);
    let eval = |x: f64| coeffs.iter().rev().fold(0.0f64, |acc, &c| acc * x + c as f64);
    let top = a.iter().map(|r| r.iter().sum::<u64>()).max().unwrap_or(0) as f64 + 1.0;
    let steps = 200_000;
    let mut hi = top;
    let positive = eval(hi) > 0.0;
    for k in 1..=steps {
        let x = top * (1.0 - k as f64 / steps as f64);
        let v = eval(x);
        if v == 0.0 {
            return x;
        }
        if (v > 0.0) != positive {
            let mut lo = x;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (eval(mid) > 0.0) == positive {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        hi = x;
    }
    0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budgets {
        Budgets::default()
    }

    #[test]
    fn parse_full_two_shift() {
        let x = EdgeShift::parse("2").unwrap();
        assert_eq!(x.num_states(), 1);
        assert_eq!(x.alphabet_size(), 2);
    }

    #[test]
    fn parse_golden_mean() {
        let x = EdgeShift::parse("1 1 / 1 0").unwrap();
        assert_eq!(x.num_states(), 2);
        assert_eq!(x.words(2, &b()).unwrap().count(2), 5);
        assert_eq!(x.vertex_words(2, &b()).unwrap().len(), 3);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(EdgeShift::parse("0 1 / 0 0"), Err(Error::EmptyGraph));
        assert!(matches!(EdgeShift::parse("1 1 / 1"), Err(Error::NotSquare { .. })));
        assert!(matches!(EdgeShift::parse("1 -1 / 1 0"), Err(Error::NegativeEntry { .. })));
        assert!(matches!(EdgeShift::parse("1 x"), Err(Error::Parse(_))));
    }

    #[test]
    fn normalization_logs_removed_states() {
        let x = EdgeShift::parse("1 1 / 0 0").unwrap();
        assert_eq!(x.num_states(), 1);
        assert_eq!(x.normalization_log().len(), 1);
        assert!(x.normalization_log()[0].contains("state 1"));
    }

    #[test]
    fn parse_json_document() {
        let x = EdgeShift::parse(r#"{"states": ["a", "b"], "adjacency": [[0, 1], [1, 0]]}"#)
            .unwrap();
        assert_eq!(x.states(), &["a".to_string(), "b".to_string()]);
        assert_eq!(x.period().unwrap(), 2);
    }

    #[test]
    fn irreducibility() {
        assert!(EdgeShift::parse("2").unwrap().is_irreducible());
        assert!(EdgeShift::parse("0 1 / 1 0").unwrap().is_irreducible());
        assert!(!EdgeShift::parse("1 0 / 0 1").unwrap().is_irreducible());
    }

    #[test]
    fn periods() {
        assert_eq!(EdgeShift::parse("2").unwrap().period().unwrap(), 1);
        assert_eq!(EdgeShift::parse("0 1 / 1 0").unwrap().period().unwrap(), 2);
        assert_eq!(EdgeShift::parse("0 2 0 / 0 0 1 / 1 0 0").unwrap().period().unwrap(), 3);
        assert_eq!(EdgeShift::parse("1 0 / 0 1").unwrap().period(), Err(Error::Reducible));
    }

    #[test]
    fn mixing() {
        assert!(EdgeShift::parse("2").unwrap().is_mixing());
        assert!(!EdgeShift::parse("0 1 / 1 0").unwrap().is_mixing());
        assert!(EdgeShift::parse("1 1 / 1 0").unwrap().is_mixing());
    }

    #[test]
    fn entropies() {
        let h = EdgeShift::parse("2").unwrap().entropy().unwrap();
        assert!((h.entropy - 2f64.ln()).abs() < 1e-12);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let h = EdgeShift::parse("1 1 / 1 0").unwrap().entropy().unwrap();
        assert!((h.entropy - golden.ln()).abs() < 1e-12);
        assert!((h.entropy - 0.481211825).abs() < 1e-9);
        let h = EdgeShift::parse("0 1 0 / 0 0 1 / 1 0 0").unwrap().entropy().unwrap();
        assert!(h.entropy.abs() < 1e-12);
    }

    #[test]
    fn charpoly_golden_mean() {
        let a = vec![vec![1, 1], vec![1, 0]];
        assert_eq!(characteristic_polynomial(&a), vec![-1, -1, 1]);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((perron_root_by_charpoly(&a) - golden).abs() < 1e-12);
    }

    #[test]
    fn power_shifts() {
        let p = EdgeShift::parse("2").unwrap().power_shift(3, &b()).unwrap();
        assert_eq!(p.shift.num_states(), 1);
        assert_eq!(p.shift.alphabet_size(), 8);
        let p = EdgeShift::parse("0 1 / 1 0").unwrap().power_shift(2, &b()).unwrap();
        assert_eq!(p.shift.adjacency(), &[vec![1, 0], vec![0, 1]]);
        assert_eq!(p.shift.strongly_connected_components().len(), 2);
        let p = EdgeShift::parse("1 1 / 1 0").unwrap().power_shift(2, &b()).unwrap();
        assert_eq!(p.shift.adjacency(), &[vec![2, 1], vec![1, 1]]);
        for (e, path) in p.paths.iter().enumerate() {
            let edge = p.shift.edge(e as Sym);
            let orig = EdgeShift::parse("1 1 / 1 0").unwrap();
            assert_eq!(orig.edge(path[0]).from, edge.from);
            assert_eq!(orig.edge(path[1]).to, edge.to);
            assert!(orig.is_admissible(path));
        }
        assert!(EdgeShift::parse("2").unwrap().power_shift(0, &b()).is_err());
    }

    #[test]
    fn word_tables() {
        let x = EdgeShift::parse("2").unwrap();
        let t = x.words(2, &b()).unwrap();
        let rendered: Vec<String> = t.level(2).iter().map(|w| x.format_word(w)).collect();
        assert_eq!(rendered, ["00", "01", "10", "11"]);
        let golden = EdgeShift::parse("1 1 / 1 0").unwrap();
        assert_eq!(golden.vertex_words(3, &b()).unwrap().len(), 5);
        let cycle = EdgeShift::parse("0 1 0 / 0 0 1 / 1 0 0").unwrap();
        assert_eq!(cycle.words(4, &b()).unwrap().count(4), 3);
        let tight = Budgets { words: 5, ..b() };
        assert!(matches!(x.words(3, &tight), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn word_round_trip() {
        let x = EdgeShift::parse("0 2 / 1 0").unwrap();
        let w = x.parse_word("021").unwrap();
        assert_eq!(x.format_word(&w), "021");
        assert!(x.is_admissible(&w));
        assert!(!x.is_admissible(&x.parse_word("01").unwrap()));
        assert!(x.parse_word("3").is_err());
    }
}
