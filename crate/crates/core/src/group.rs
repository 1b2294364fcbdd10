//! Finite groups stored as full multiplication tables.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::perm::Permutation;
use crate::{Budgets, Error, Result};

/// Index of a group element.
pub type Elem = u32;

/// Orders up to this size get an exhaustive associativity check; larger
/// tables are sampled.
const EXHAUSTIVE_ASSOCIATIVITY: usize = 64;
const SAMPLED_TRIPLES: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<Elem>,
    identity: Elem,
    inverses: Vec<Elem>,
    generators: Vec<Elem>,
    names: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDocument {
    pub order: usize,
    pub table: Vec<Vec<Elem>>,
    pub generators: Vec<Elem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl FiniteGroup {
    /// Validates a multiplication table: closure, identity, inverses,
    /// associativity, and that `generators` generate.
    pub fn from_table(rows: Vec<Vec<Elem>>, generators: Vec<Elem>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::InvalidGroup(format!("row {i} has {} entries", r.len())));
            }
            if r.iter().any(|&v| v as usize >= n) {
                return Err(Error::InvalidGroup(format!("row {i} leaves the group")));
            }
        }
        let table: Vec<Elem> = rows.into_iter().flatten().collect();
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e * n + x] as usize == x && table[x * n + e] as usize == x))
            .ok_or_else(|| Error::InvalidGroup("no identity".into()))? as Elem;
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a * n + b] == identity && table[b * n + a] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
            inverses.push(inv as Elem);
        }
        let assoc = |a: usize, b: usize, c: usize| {
            let ab = table[a * n + b] as usize;
            let bc = table[b * n + c] as usize;
            table[ab * n + c] == table[a * n + bc]
        };
        if n <= EXHAUSTIVE_ASSOCIATIVITY {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(Error::InvalidGroup(format!("({a}{b}){c} != {a}({b}{c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !assoc(a, b, c) {
                    return Err(Error::InvalidGroup(format!("({a}{b}){c} != {a}({b}{c})")));
                }
            }
        }
        if generators.iter().any(|&g| g as usize >= n) {
            return Err(Error::InvalidGroup("generator out of range".into()));
        }
        let g = FiniteGroup { order: n, table, identity, inverses, generators, names: None };
        if g.generate(&g.generators).len() != n {
            return Err(Error::InvalidGroup("generators do not generate".into()));
        }
        Ok(g)
    }

    /// Builds a group from a trusted multiplication rule on `0..order`.
    pub(crate) fn from_fn(
        order: usize,
        identity: Elem,
        generators: Vec<Elem>,
        mul: impl Fn(Elem, Elem) -> Elem,
    ) -> Self {
        let mut table = Vec::with_capacity(order * order);
        for a in 0..order as Elem {
            for b in 0..order as Elem {
                table.push(mul(a, b));
            }
        }
        let mut inverses = vec![0; order];
        for a in 0..order {
            for b in 0..order {
                if table[a * order + b] == identity {
                    inverses[a] = b as Elem;
                    break;
                }
            }
        }
        FiniteGroup { order, table, identity, inverses, generators, names: None }
    }

    pub fn from_document(doc: GroupDocument) -> Result<Self> {
        if doc.order != doc.table.len() {
            return Err(Error::InvalidGroup(format!(
                "order {} but {} rows",
                doc.order,
                doc.table.len()
            )));
        }
        let mut g = FiniteGroup::from_table(doc.table, doc.generators)?;
        if let Some(names) = doc.names {
            if names.len() != g.order {
                return Err(Error::InvalidGroup("wrong number of names".into()));
            }
            g.names = Some(names);
        }
        Ok(g)
    }

    pub fn to_document(&self) -> GroupDocument {
        GroupDocument {
            order: self.order,
            table: self.table.chunks(self.order).map(<[Elem]>::to_vec).collect(),
            generators: self.generators.clone(),
            names: self.names.clone(),
        }
    }

    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let gens = if n > 1 { vec![1] } else { vec![] };
        FiniteGroup::from_fn(n, 0, gens, |a, b| (a + b) % n as Elem)
    }

    /// `A × B`, with `(a, b)` stored at index `a·|B| + b`.
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Self {
        let nb = b.order as Elem;
        let mut gens: Vec<Elem> = a.generators.iter().map(|&g| g * nb + b.identity).collect();
        gens.extend(b.generators.iter().map(|&h| a.identity * nb + h));
        FiniteGroup::from_fn(a.order * b.order, a.identity * nb + b.identity, gens, |x, y| {
            a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb)
        })
    }

    /// The group generated by `gens`, elements sorted by image list, so the
    /// identity is element 0. Returns the elements alongside.
    pub fn from_permutations(
        gens: &[Permutation],
        degree: usize,
        budgets: &Budgets,
    ) -> Result<(Self, Vec<Permutation>)> {
        let id = Permutation::identity(degree);
        let mut seen: BTreeSet<Permutation> = BTreeSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in gens {
                let q = p.compose(g);
                if seen.insert(q.clone()) {
                    Budgets::check("group order", seen.len() as u128, budgets.group_order)?;
                    queue.push_back(q);
                }
            }
        }
        let elems: Vec<Permutation> = seen.into_iter().collect();
        let index: HashMap<&Permutation, Elem> =
            elems.iter().enumerate().map(|(i, p)| (p, i as Elem)).collect();
        let gen_idx = gens.iter().map(|g| index[g]).collect();
        let g = FiniteGroup::from_fn(elems.len(), 0, gen_idx, |a, b| {
            index[&elems[a as usize].compose(&elems[b as usize])]
        });
        Ok((g, elems))
    }

    /// `Sym(n)` generated by adjacent transpositions, plus its elements.
    pub fn symmetric(n: usize, budgets: &Budgets) -> Result<(Self, Vec<Permutation>)> {
        let gens: Vec<Permutation> =
            (0..n.saturating_sub(1)).map(|i| Permutation::transposition(n, i, i + 1).unwrap()).collect();
        FiniteGroup::from_permutations(&gens, n, budgets)
    }

    /// Symmetries of a regular `k`-gon, order `2k`.
    pub fn dihedral(k: usize) -> Self {
        let rot = Permutation::rotation(k, 1);
        let refl = Permutation::from_images((0..k).map(|i| (k - i) % k).collect()).unwrap();
        FiniteGroup::from_permutations(&[rot, refl], k, &Budgets::default()).unwrap().0
    }

    /// The quaternion group `{±1, ±i, ±j, ±k}`; element `2u + s` is the unit
    /// `u ∈ {1, i, j, k}` with sign `(-1)^s`.
    pub fn quaternion() -> Self {
        // unit products: (sign, unit)
        const UNIT: [[(u32, u32); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        FiniteGroup::from_fn(8, 0, vec![2, 4], |a, b| {
            let (ua, sa) = (a / 2, a % 2);
            let (ub, sb) = (b / 2, b % 2);
            let (s, u) = UNIT[ua as usize][ub as usize];
            2 * u + (sa + sb + s) % 2
        })
    }

    /// Parses a built-in name: `Zn`, `Sn`, `Sym(n)`, `Dn` (order `2n`),
    /// `Q8`, `1`, or products joined with `x`.
    pub fn builtin(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.contains('x') {
            let mut parts = spec.split('x');
            let first = FiniteGroup::builtin(parts.next().unwrap())?;
            return parts.try_fold(first, |acc, p| {
                Ok(FiniteGroup::direct_product(&acc, &FiniteGroup::builtin(p)?))
            });
        }
        let bad = || Error::Parse(format!("unknown group {spec:?}"));
        let num = |s: &str| s.parse::<usize>().ok().filter(|&k| k >= 1);
        if spec == "1" || spec == "trivial" {
            return Ok(FiniteGroup::trivial());
        }
        if spec == "Q8" {
            return Ok(FiniteGroup::quaternion());
        }
        if let Some(k) = spec.strip_prefix("Sym(").and_then(|s| s.strip_suffix(')')) {
            let k = num(k).ok_or_else(bad)?;
            return Ok(FiniteGroup::symmetric(k, &Budgets::default())?.0);
        }
        let (head, tail) = spec.split_at(1);
        let k = num(tail).ok_or_else(bad)?;
        match head {
            "Z" | "C" => Ok(FiniteGroup::cyclic(k)),
            "S" => Ok(FiniteGroup::symmetric(k, &Budgets::default())?.0),
            "D" if k >= 3 => Ok(FiniteGroup::dihedral(k)),
            _ => Err(bad()),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverses[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order as Elem
    }

    pub fn pow(&self, a: Elem, k: u64) -> Elem {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn elem_order(&self, a: Elem) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// `g h g⁻¹`.
    pub fn conj(&self, h: Elem, g: Elem) -> Elem {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn generate(&self, gens: &[Elem]) -> Vec<Elem> {
        let mut seen = vec![false; self.order];
        seen[self.identity as usize] = true;
        let mut out = vec![self.identity];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !std::mem::replace(&mut seen[y as usize], true) {
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Conjugacy classes, each sorted, ordered by smallest element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<Elem>> {
        let mut seen = vec![false; self.order];
        let mut out = Vec::new();
        for a in self.elements() {
            if seen[a as usize] {
                continue;
            }
            let mut class: Vec<Elem> = self.elements().map(|g| self.conj(a, g)).collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                seen[c as usize] = true;
            }
            out.push(class);
        }
        out
    }

    /// Elements commuting with every member of `subset`.
    pub fn centralizer(&self, subset: &[Elem]) -> Vec<Elem> {
        self.elements()
            .filter(|&g| subset.iter().all(|&k| self.mul(g, k) == self.mul(k, g)))
            .collect()
    }

    pub fn center(&self) -> Vec<Elem> {
        self.centralizer(&self.generators)
    }

    pub fn derived_subgroup(&self) -> Vec<Elem> {
        let mut comms = BTreeSet::new();
        for a in self.elements() {
            for b in self.elements() {
                let c = self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)));
                comms.insert(c);
            }
        }
        self.generate(&comms.into_iter().collect::<Vec<_>>())
    }

    pub fn is_normal(&self, subgroup: &[Elem]) -> bool {
        let mut member = vec![false; self.order];
        for &h in subgroup {
            member[h as usize] = true;
        }
        subgroup
            .iter()
            .all(|&h| self.generators.iter().all(|&g| member[self.conj(h, g) as usize]))
    }

    /// All normal subgroups, sorted by order then elements.
    pub fn normal_subgroups(&self) -> Vec<Vec<Elem>> {
        let closures: Vec<Vec<Elem>> =
            self.conjugacy_classes().iter().map(|c| self.generate(c)).collect();
        let mut found: BTreeSet<Vec<Elem>> = BTreeSet::from([vec![self.identity]]);
        let mut queue: VecDeque<Vec<Elem>> = VecDeque::from([vec![self.identity]]);
        while let Some(n) = queue.pop_front() {
            for c in &closures {
                if c.iter().all(|x| n.binary_search(x).is_ok()) {
                    continue;
                }
                let mut gens = n.clone();
                gens.extend_from_slice(c);
                let j = self.generate(&gens);
                if found.insert(j.clone()) {
                    queue.push_back(j);
                }
            }
        }
        sort_by_order(found)
    }

    /// The full subgroup lattice, built as joins of cyclic subgroups. Sorted
    /// by order then elements.
    pub fn subgroups(&self, budgets: &Budgets) -> Result<Vec<Vec<Elem>>> {
        let cyclic: BTreeSet<Vec<Elem>> = self.elements().map(|a| self.generate(&[a])).collect();
        let cyclic_gens: Vec<Elem> = cyclic.iter().map(|c| {
            // any element generating the cyclic subgroup
            *c.iter().find(|&&x| self.generate(&[x]) == *c).unwrap()
        }).collect();
        let mut found: BTreeSet<Vec<Elem>> = BTreeSet::new();
        let mut queue: VecDeque<(Vec<Elem>, Vec<Elem>)> = VecDeque::new();
        found.insert(vec![self.identity]);
        queue.push_back((vec![self.identity], vec![]));
        while let Some((h, gens)) = queue.pop_front() {
            for &x in &cyclic_gens {
                if h.binary_search(&x).is_ok() {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(x);
                let j = self.generate(&g2);
                if !found.contains(&j) {
                    found.insert(j.clone());
                    Budgets::check("subgroup count", found.len() as u128, budgets.group_order)?;
                    queue.push_back((j, g2));
                }
            }
        }
        Ok(sort_by_order(found))
    }
}

fn sort_by_order(set: BTreeSet<Vec<Elem>>) -> Vec<Vec<Elem>> {
    let mut v: Vec<Vec<Elem>> = set.into_iter().collect();
    v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    v
}
