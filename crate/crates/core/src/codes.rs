//! Sliding block codes on edge shifts.
//!
//! A code of radius `r` and period `N` carries `N` local rules
//! `f_0, …, f_{N-1}` on admissible `(2r+1)`-words and acts by
//! `F(x)_j = f_{j mod N}(x_{[j-r, j+r]})`. Codes of period `N` are exactly the
//! continuous maps commuting with `σᴺ`, so automorphisms of `(X, σⁿ)` are the
//! invertible codes whose period divides `n`. Period-1 codes commute with `σ`.
//!
//! Every constructor returns the canonical form: the smallest radius through
//! which all rules factor, then the smallest period. Two codes are equal as
//! maps exactly when their canonical forms are equal.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::perm::Permutation;
use crate::sft::{EdgeShift, LanguageTable, Sym, Word};
use crate::spectral::CyclicPartition;
use crate::{divisors, lcm, Budgets, Error, Result, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlidingBlockCode {
    radius: usize,
    rules: Vec<BTreeMap<Word, Sym>>,
    shift: Arc<str>,
}

#[derive(Debug, Serialize)]
pub struct CodeDocument {
    pub radius: usize,
    pub period: usize,
    /// Phase-0 rule as `[window, output]` pairs.
    pub rule: Vec<(String, String)>,
    /// All phase rules, present when the period exceeds 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<Vec<(String, String)>>>,
}

impl SlidingBlockCode {
    /// A code from one rule per phase. Each rule must be defined on exactly
    /// the admissible `(2r+1)`-words and map adjacent windows to composable
    /// edges.
    pub fn from_rules(shift: &EdgeShift, radius: usize, rules: Vec<BTreeMap<Word, Sym>>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::InvalidArgument("a code needs at least one phase".into()));
        }
        let windows = shift.words_of_length(2 * radius + 1, &Budgets::default())?;
        for rule in &rules {
            if rule.len() != windows.len() || !windows.iter().all(|w| rule.contains_key(w)) {
                return Err(Error::InvalidArgument(
                    "rule is not defined on exactly the admissible windows".into(),
                ));
            }
            if rule.values().any(|&s| s as usize >= shift.alphabet_size()) {
                return Err(Error::InvalidArgument("rule outputs an unknown symbol".into()));
            }
        }
        let n = rules.len();
        for z in shift.words_of_length(2 * radius + 2, &Budgets::default())? {
            for j in 0..n {
                let a = rules[j][&z[..z.len() - 1]];
                let b = rules[(j + 1) % n][&z[1..]];
                if shift.edge(a).to != shift.edge(b).from {
                    return Err(Error::Inadmissible);
                }
            }
        }
        Ok(SlidingBlockCode { radius, rules, shift: shift.hash().into() }.canonical())
    }

    /// A code from a rule function `(phase, window) ↦ symbol`.
    pub fn from_fn(
        shift: &EdgeShift,
        radius: usize,
        period: usize,
        f: impl Fn(usize, &[Sym]) -> Sym,
    ) -> Result<Self> {
        SlidingBlockCode::try_from_fn(shift, radius, period, |j, w| Ok(f(j, w)))
    }

    /// Like [`Self::from_fn`] with a fallible rule.
    pub fn try_from_fn(
        shift: &EdgeShift,
        radius: usize,
        period: usize,
        f: impl Fn(usize, &[Sym]) -> Result<Sym>,
    ) -> Result<Self> {
        let windows = shift.words_of_length(2 * radius + 1, &Budgets::default())?;
        let rules = (0..period)
            .map(|j| windows.iter().map(|w| Ok((w.clone(), f(j, w)?))).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        SlidingBlockCode::from_rules(shift, radius, rules)
    }

    pub fn identity(shift: &EdgeShift) -> Self {
        let rule = (0..shift.alphabet_size() as Sym).map(|e| (vec![e], e)).collect();
        SlidingBlockCode { radius: 0, rules: vec![rule], shift: shift.hash().into() }
    }

    /// `σᵗ`, i.e. `x ↦ (x_{j+t})_j`.
    pub fn shift_power(shift: &EdgeShift, t: i64) -> Result<Self> {
        let r = t.unsigned_abs() as usize;
        let centre = r as i64 + t;
        SlidingBlockCode::from_fn(shift, r, 1, |_, w| w[centre as usize])
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn period(&self) -> usize {
        self.rules.len()
    }

    pub fn rule(&self, phase: usize) -> &BTreeMap<Word, Sym> {
        &self.rules[phase % self.rules.len()]
    }

    pub fn shift_hash(&self) -> &str {
        &self.shift
    }

    pub fn is_identity(&self) -> bool {
        self.radius == 0 && self.rules.len() == 1 && self.rules[0].iter().all(|(w, &s)| w[0] == s)
    }

    /// Applies the code to `w`, reading `w[0]` at coordinate `-r`: output
    /// symbol `i` sits at coordinate `i`.
    pub fn apply(&self, shift: &EdgeShift, w: &[Sym]) -> Result<Word> {
        self.check_shift(shift)?;
        if !shift.is_admissible(w) {
            return Err(Error::Inadmissible);
        }
        self.apply_at(w, 0)
    }

    /// Like [`Self::apply`], with the first output symbol at coordinate
    /// `first`, which selects the phase of each window.
    pub fn apply_at(&self, w: &[Sym], first: i64) -> Result<Word> {
        let r = self.radius;
        if w.len() < 2 * r + 1 {
            return Err(Error::WordTooShort { len: w.len(), radius: r });
        }
        let n = self.rules.len() as i64;
        (0..w.len() - 2 * r)
            .map(|i| {
                let phase = (first + i as i64).rem_euclid(n) as usize;
                self.rules[phase].get(&w[i..i + 2 * r + 1]).copied().ok_or(Error::Inadmissible)
            })
            .collect()
    }

    fn check_shift(&self, shift: &EdgeShift) -> Result<()> {
        if *self.shift != *shift.hash() {
            return Err(Error::ShiftMismatch);
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SlidingBlockCode, shift: &EdgeShift) -> Result<Self> {
        self.check_shift(shift)?;
        other.check_shift(shift)?;
        let windows = shift.words_of_length(2 * (self.radius + other.radius) + 1, &Budgets::default())?;
        self.compose_over(other, &windows)
    }

    fn compose_over(&self, other: &SlidingBlockCode, windows: &[Word]) -> Result<Self> {
        if self.shift != other.shift {
            return Err(Error::ShiftMismatch);
        }
        let r = self.radius + other.radius;
        let n = lcm(self.period() as u64, other.period() as u64) as usize;
        let mut rules = Vec::with_capacity(n);
        for j in 0..n {
            let mut rule = BTreeMap::new();
            for w in windows {
                let inner = other.apply_at(w, j as i64 - self.radius as i64)?;
                rule.insert(w.clone(), self.rule(j)[&inner]);
            }
            rules.push(rule);
        }
        Ok(SlidingBlockCode { radius: r, rules, shift: self.shift.clone() }.canonical())
    }

    fn canonical(mut self) -> Self {
        while self.radius > 0 {
            let mut reduced = Vec::with_capacity(self.rules.len());
            let mut ok = true;
            'phases: for rule in &self.rules {
                let mut inner: BTreeMap<Word, Sym> = BTreeMap::new();
                for (w, &s) in rule {
                    let key = w[1..w.len() - 1].to_vec();
                    if *inner.entry(key).or_insert(s) != s {
                        ok = false;
                        break 'phases;
                    }
                }
                reduced.push(inner);
            }
            if !ok {
                break;
            }
            self.rules = reduced;
            self.radius -= 1;
        }
        let n = self.rules.len();
        for d in divisors(n as u64) {
            let d = d as usize;
            if (0..n).all(|j| self.rules[j] == self.rules[j % d]) {
                self.rules.truncate(d);
                break;
            }
        }
        self
    }

    /// Whether `F ∘ σⁿ = σⁿ ∘ F`, checked on all admissible words of length
    /// `len` at every phase.
    pub fn commutes_with_power(&self, shift: &EdgeShift, n: usize, len: usize) -> Result<bool> {
        self.check_shift(shift)?;
        if len < 2 * self.radius + 1 {
            return Err(Error::WordTooShort { len, radius: self.radius });
        }
        for u in shift.words_of_length(len, &Budgets::default())? {
            for t in 0..self.period() as i64 {
                if self.apply_at(&u, t)? != self.apply_at(&u, t + n as i64)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The inverse code of radius at most `max_radius`, if one exists.
    pub fn inverse(&self, shift: &EdgeShift, max_radius: usize) -> Result<Option<Self>> {
        self.check_shift(shift)?;
        let table = shift.words(2 * (self.radius + max_radius) + 1, &Budgets::default())?;
        self.inverse_in(&table, max_radius)
    }

    fn inverse_in(&self, table: &LanguageTable, max_radius: usize) -> Result<Option<Self>> {
        for big_r in 0..=max_radius {
            if let Some(g) = self.inverse_at(table, big_r)? {
                return Ok(Some(g));
            }
        }
        Ok(None)
    }

    /// Each image window of length `2R+1` must determine the centre symbol
    /// of its preimage, and every admissible window must occur as an image.
    fn inverse_at(&self, table: &LanguageTable, big_r: usize) -> Result<Option<Self>> {
        let r = self.radius;
        let n = self.period();
        let mut rules: Vec<HashMap<Word, Sym>> = vec![HashMap::new(); n];
        for (j, rule) in rules.iter_mut().enumerate() {
            for v in table.level(2 * (big_r + r) + 1) {
                let u = self.apply_at(v, j as i64 - big_r as i64)?;
                let centre = v[big_r + r];
                if *rule.entry(u).or_insert(centre) != centre {
                    return Ok(None);
                }
            }
            if rule.len() != table.count(2 * big_r + 1) {
                return Ok(None);
            }
        }
        let g = SlidingBlockCode {
            radius: big_r,
            rules: rules.into_iter().map(|m| m.into_iter().collect()).collect(),
            shift: self.shift.clone(),
        }
        .canonical();
        let back = self.compose_over(&g, table.level(2 * (r + big_r) + 1))?;
        Ok(back.is_identity().then_some(g))
    }

    /// `Some(t)` when the code equals `σᵗ`.
    pub fn is_shift_power(&self, shift: &EdgeShift) -> Result<Option<i64>> {
        self.check_shift(shift)?;
        if self.period() != 1 {
            return Ok(None);
        }
        let r = self.radius as i64;
        let mut candidates: Vec<i64> = vec![0, r, -r];
        // On graphs with periodic pieces a shift power can collapse to a
        // smaller radius; try a wider range.
        let extra = (r + shift.alphabet_size() as i64).min(16);
        candidates.extend((1..=extra).flat_map(|t| [t, -t]));
        for t in candidates {
            let k = r.max(t.abs());
            let words = shift.words_of_length((2 * k + 1) as usize, &Budgets::default())?;
            let rule = &self.rules[0];
            let hit = words.iter().all(|v| {
                let window = &v[(k - r) as usize..(k + r + 1) as usize];
                rule[window] == v[(k + t) as usize]
            });
            if hit {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    /// The permutation `π` of partition classes with `F(T^k X_m) ⊆
    /// T^{π(k)} X_m`, read from the phase-0 rule.
    pub fn partition_action(&self, shift: &EdgeShift, part: &CyclicPartition) -> Result<Permutation> {
        self.check_shift(shift)?;
        if part.matrix_hash != *self.shift {
            return Err(Error::ShiftMismatch);
        }
        let r = self.radius;
        let mut image: Vec<Option<usize>> = vec![None; part.size];
        for (w, &s) in &self.rules[0] {
            let k = part.class_of_edge(shift, w[r]);
            let c = part.class_of_edge(shift, s);
            match image[k] {
                Some(prev) if prev != c => return Err(Error::ImageSplitsClasses(k)),
                _ => image[k] = Some(c),
            }
        }
        let images: Vec<usize> = image
            .into_iter()
            .enumerate()
            .map(|(k, c)| c.ok_or(Error::ImageSplitsClasses(k)))
            .collect::<Result<_>>()?;
        Permutation::from_images(images).map_err(|_| Error::ImageSplitsClasses(0))
    }

    /// The `j` with `F(X_m) = T^j X_m`, requiring the action on classes to
    /// be the rotation `k ↦ k + j`.
    pub fn rotation_index(&self, shift: &EdgeShift, part: &CyclicPartition) -> Result<usize> {
        let pi = self.partition_action(shift, part)?;
        let j = pi.apply(0);
        if pi != Permutation::rotation(part.size, j) {
            return Err(Error::NotARotation);
        }
        Ok(j)
    }

    pub fn to_document(&self, shift: &EdgeShift) -> CodeDocument {
        let render = |rule: &BTreeMap<Word, Sym>| {
            rule.iter().map(|(w, &s)| (shift.format_word(w), shift.symbol_label(s))).collect::<Vec<_>>()
        };
        CodeDocument {
            radius: self.radius,
            period: self.period(),
            rule: render(&self.rules[0]),
            phases: (self.period() > 1).then(|| self.rules.iter().map(render).collect()),
        }
    }
}

/// The class-permuting code `ρ(τ)`: on `T^i X_m` it acts as `T^{τ(i) - i}`.
/// It has period `m` and radius at most `m - 1`.
pub fn class_permutation_code(
    shift: &EdgeShift,
    part: &CyclicPartition,
    tau: &Permutation,
) -> Result<SlidingBlockCode> {
    let m = part.size;
    if tau.degree() != m {
        return Err(Error::InvalidArgument(format!("permutation of degree {} for {m} classes", tau.degree())));
    }
    let r = m - 1;
    SlidingBlockCode::from_fn(shift, r, m, |j, w| {
        let class = part.class_of_edge(shift, w[r]);
        let i = (class + m - j % m) % m;
        let offset = tau.apply(i) as i64 - i as i64;
        w[(r as i64 + offset) as usize]
    })
}

/// Invertible codes commuting with `σⁿ` of radius at most `r` whose inverse
/// has radius at most `r_inv`. This is a finite piece of `Aut(X, σⁿ)`, not
/// the whole group.
#[derive(Debug, Clone)]
pub struct AutomorphismSet {
    pub power: usize,
    pub radius: usize,
    pub inv_radius: usize,
    /// Canonically sorted.
    pub elements: Vec<SlidingBlockCode>,
    /// `inverses[i]` is the inverse of `elements[i]`.
    pub inverses: Vec<SlidingBlockCode>,
    pub search_nodes: u64,
}

#[derive(Debug, Serialize)]
pub struct AutomorphismSetDocument {
    pub schema_version: u32,
    pub matrix_hash: String,
    pub power: usize,
    pub radius: usize,
    pub inv_radius: usize,
    pub truncated: bool,
    pub count: usize,
    pub search_nodes: u64,
    pub elements: Vec<CodeDocument>,
}

impl AutomorphismSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, code: &SlidingBlockCode) -> Option<usize> {
        self.elements.binary_search(code).ok()
    }

    pub fn contains(&self, code: &SlidingBlockCode) -> bool {
        self.index_of(code).is_some()
    }

    pub fn to_document(&self, shift: &EdgeShift) -> AutomorphismSetDocument {
        AutomorphismSetDocument {
            schema_version: SCHEMA_VERSION,
            matrix_hash: shift.hash(),
            power: self.power,
            radius: self.radius,
            inv_radius: self.inv_radius,
            truncated: true,
            count: self.elements.len(),
            search_nodes: self.search_nodes,
            elements: self.elements.iter().map(|c| c.to_document(shift)).collect(),
        }
    }
}

/// Enumerates [`AutomorphismSet`] by depth-first search over rule tables.
///
/// Variables are `(phase, window)` pairs in lexicographic order. Partial
/// tables are pruned when two overlapping windows in consecutive phases
/// map to non-composable edges, and, for irreducible shifts, when the Parry
/// measure of the windows sent to some symbol exceeds that symbol's
/// measure (automorphisms of `σⁿ` preserve the Parry measure). Complete
/// tables are kept when an inverse of radius `≤ r_inv` exists.
pub fn enumerate_automorphisms(
    shift: &EdgeShift,
    n: usize,
    r: usize,
    r_inv: usize,
    budgets: &Budgets,
) -> Result<AutomorphismSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("power must be positive".into()));
    }
    let table = shift.words((2 * (r + r_inv) + 1).max(2 * r + 2), budgets)?;
    let windows: Vec<Word> = table.level(2 * r + 1).to_vec();
    let w_count = windows.len();
    Budgets::check(
        "rule table",
        (w_count * n) as u128 * shift.alphabet_size() as u128,
        budgets.words,
    )?;
    let index: HashMap<&[Sym], usize> = windows.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let mut succ = vec![Vec::new(); w_count];
    let mut pred = vec![Vec::new(); w_count];
    for z in table.level(2 * r + 2) {
        let a = index[&z[..z.len() - 1]];
        let b = index[&z[1..]];
        succ[a].push(b);
        pred[b].push(a);
    }
    let weights = parry_weights(shift, &windows);
    let search = Search {
        shift,
        n,
        w_count,
        succ,
        pred,
        weights,
        nodes: AtomicU64::new(0),
        limit: budgets.search_nodes,
    };
    // Split the first few variables into independent jobs.
    let mut prefixes = vec![State::new(n, w_count, shift.alphabet_size())];
    let mut depth = 0;
    while prefixes.len() < 64 && depth < n * w_count {
        let mut next = Vec::new();
        for st in &prefixes {
            for s in 0..shift.alphabet_size() as Sym {
                if let Some(st2) = search.assign(st, depth, s)? {
                    next.push(st2);
                }
            }
        }
        prefixes = next;
        depth += 1;
    }
    let found: Vec<Vec<(SlidingBlockCode, SlidingBlockCode)>> = prefixes
        .into_par_iter()
        .map(|st| {
            let mut out = Vec::new();
            search.dfs(st, depth, &mut |st: &State| {
                let rules = (0..n)
                    .map(|p| {
                        windows
                            .iter()
                            .enumerate()
                            .map(|(wi, w)| (w.clone(), st.value[p * w_count + wi]))
                            .collect()
                    })
                    .collect();
                let code = SlidingBlockCode { radius: r, rules, shift: shift.hash().into() }.canonical();
                if let Some(inv) = code.inverse_in(&table, r_inv)? {
                    out.push((code, inv));
                }
                Ok(())
            })?;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut pairs: Vec<(SlidingBlockCode, SlidingBlockCode)> = found.into_iter().flatten().collect();
    pairs.sort();
    let (elements, inverses) = pairs.into_iter().unzip();
    Ok(AutomorphismSet {
        power: n,
        radius: r,
        inv_radius: r_inv,
        elements,
        inverses,
        search_nodes: search.nodes.load(Ordering::Relaxed),
    })
}

/// Parry measures of the given windows and of single symbols, or `None`
/// for reducible shifts.
fn parry_weights(shift: &EdgeShift, windows: &[Word]) -> Option<(Vec<f64>, Vec<f64>)> {
    let perron = shift.entropy().ok()?.perron;
    let k = shift.num_states();
    let a = shift.adjacency();
    let eigvec = |transpose: bool| {
        let mut x = vec![1.0f64; k];
        for _ in 0..100_000 {
            let y: Vec<f64> = (0..k)
                .map(|i| {
                    x[i] + (0..k)
                        .map(|j| if transpose { a[j][i] } else { a[i][j] } as f64 * x[j])
                        .sum::<f64>()
                })
                .collect();
            let top = y.iter().cloned().fold(0.0, f64::max);
            let y: Vec<f64> = y.into_iter().map(|v| v / top).collect();
            let delta = y.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            x = y;
            if delta < 1e-15 {
                break;
            }
        }
        x
    };
    let left = eigvec(true);
    let right = eigvec(false);
    let norm: f64 = left.iter().zip(&right).map(|(u, v)| u * v).sum();
    let measure = |w: &[Sym]| {
        let first = shift.edge(w[0]).from;
        let last = shift.edge(*w.last().unwrap()).to;
        left[first] * right[last] / norm / perron.powi(w.len() as i32)
    };
    let windows = windows.iter().map(|w| measure(w)).collect();
    let symbols = (0..shift.alphabet_size() as Sym).map(|s| measure(&[s])).collect();
    Some((windows, symbols))
}

#[derive(Clone)]
struct State {
    value: Vec<Sym>,
    assigned: Vec<bool>,
    /// mass[p * alphabet + s]
    mass: Vec<f64>,
    alphabet: usize,
}

impl State {
    fn new(n: usize, w_count: usize, alphabet: usize) -> Self {
        State {
            value: vec![0; n * w_count],
            assigned: vec![false; n * w_count],
            mass: vec![0.0; n * alphabet],
            alphabet,
        }
    }
}

struct Search<'a> {
    shift: &'a EdgeShift,
    n: usize,
    w_count: usize,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    weights: Option<(Vec<f64>, Vec<f64>)>,
    nodes: AtomicU64,
    limit: u128,
}

const MASS_EPS: f64 = 1e-9;

impl Search<'_> {
    fn assign(&self, st: &State, var: usize, s: Sym) -> Result<Option<State>> {
        let visited = self.nodes.fetch_add(1, Ordering::Relaxed) as u128 + 1;
        Budgets::check("automorphism search", visited, self.limit)?;
        let (p, wi) = (var / self.w_count, var % self.w_count);
        let edge = self.shift.edge(s);
        let next_p = (p + 1) % self.n;
        for &b in &self.succ[wi] {
            let v = next_p * self.w_count + b;
            if st.assigned[v] && self.shift.edge(st.value[v]).from != edge.to {
                return Ok(None);
            }
        }
        let prev_p = (p + self.n - 1) % self.n;
        for &a in &self.pred[wi] {
            let v = prev_p * self.w_count + a;
            if st.assigned[v] && self.shift.edge(st.value[v]).to != edge.from {
                return Ok(None);
            }
        }
        let mut next = st.clone();
        if let Some((windows, symbols)) = &self.weights {
            let slot = p * st.alphabet + s as usize;
            let m = next.mass[slot] + windows[wi];
            if m > symbols[s as usize] * (1.0 + MASS_EPS) {
                return Ok(None);
            }
            next.mass[slot] = m;
        }
        next.value[var] = s;
        next.assigned[var] = true;
        Ok(Some(next))
    }

    fn dfs(
        &self,
        st: State,
        var: usize,
        leaf: &mut dyn FnMut(&State) -> Result<()>,
    ) -> Result<()> {
        if var == self.n * self.w_count {
            return leaf(&st);
        }
        for s in 0..self.shift.alphabet_size() as Sym {
            if let Some(next) = self.assign(&st, var, s)? {
                self.dfs(next, var + 1, leaf)?;
            }
        }
        Ok(())
    }
}
