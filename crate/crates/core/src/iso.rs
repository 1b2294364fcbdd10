//! Exact isomorphism testing for table groups.
//!
//! Cheap invariants are compared first. The search then fixes a small
//! generating set of the source group and backtracks over images of the
//! generators, extending each partial assignment along the Cayley graph so
//! that inconsistencies surface as early as possible.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::group::{Elem, FiniteGroup};
use crate::{Budgets, Result};

/// Invariants compared before any search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupInvariants {
    pub order: usize,
    /// element order → count
    pub element_orders: BTreeMap<u64, usize>,
    pub center_order: usize,
    /// (class size, element order) → number of classes
    pub class_profile: BTreeMap<(usize, u64), usize>,
    pub derived_order: usize,
}

pub fn invariants(g: &FiniteGroup) -> GroupInvariants {
    let mut element_orders = BTreeMap::new();
    for a in g.elements() {
        *element_orders.entry(g.elem_order(a)).or_insert(0) += 1;
    }
    let mut class_profile = BTreeMap::new();
    for c in g.conjugacy_classes() {
        *class_profile.entry((c.len(), g.elem_order(c[0]))).or_insert(0) += 1;
    }
    GroupInvariants {
        order: g.order(),
        element_orders,
        center_order: g.center().len(),
        class_profile,
        derived_order: g.derived_subgroup().len(),
    }
}

/// Per-element signature: (order, class size).
fn signatures(g: &FiniteGroup) -> Vec<(u64, usize)> {
    let mut sig = vec![(0, 0); g.order()];
    for c in g.conjugacy_classes() {
        let o = g.elem_order(c[0]);
        for &x in &c {
            sig[x as usize] = (o, c.len());
        }
    }
    sig
}

/// An isomorphism `G → H` as the image list `φ[g]`, or `None` when the
/// groups are not isomorphic. Among all isomorphisms the one whose
/// generator images are lexicographically least is returned.
pub fn is_isomorphic(g: &FiniteGroup, h: &FiniteGroup, budgets: &Budgets) -> Result<Option<Vec<Elem>>> {
    if g.order() != h.order() {
        return Ok(None);
    }
    Budgets::check("group order", g.order() as u128, budgets.group_order)?;
    if g == h {
        return Ok(Some(g.elements().collect()));
    }
    if invariants(g) != invariants(h) {
        return Ok(None);
    }
    let sig_g = signatures(g);
    let sig_h = signatures(h);
    let gens = generating_set(g, &sig_g);
    let candidates: Vec<Vec<Elem>> = gens
        .iter()
        .map(|&x| h.elements().filter(|&y| sig_h[y as usize] == sig_g[x as usize]).collect())
        .collect();
    let mut search = Search { g, h, gens: &gens, candidates: &candidates, nodes: 0, limit: budgets.search_nodes };
    let mut map = vec![None; g.order()];
    let mut used = vec![false; h.order()];
    map[g.identity() as usize] = Some(h.identity());
    used[h.identity() as usize] = true;
    let found = search.extend(0, map, used)?;
    Ok(found.map(|m| {
        let m: Vec<Elem> = m.into_iter().map(Option::unwrap).collect();
        debug_assert!(verify_isomorphism(g, h, &m));
        m
    }))
}

/// Checks that `phi` is a bijective homomorphism.
pub fn verify_isomorphism(g: &FiniteGroup, h: &FiniteGroup, phi: &[Elem]) -> bool {
    if phi.len() != g.order() || g.order() != h.order() {
        return false;
    }
    let mut hit = vec![false; h.order()];
    for &y in phi {
        if std::mem::replace(&mut hit[y as usize], true) {
            return false;
        }
    }
    g.elements().all(|x| {
        g.elements().all(|y| phi[g.mul(x, y) as usize] == h.mul(phi[x as usize], phi[y as usize]))
    })
}

/// Greedy generating set preferring elements with rare signatures, which
/// keeps candidate lists short.
fn generating_set(g: &FiniteGroup, sig: &[(u64, usize)]) -> Vec<Elem> {
    let mut freq: BTreeMap<(u64, usize), usize> = BTreeMap::new();
    for s in sig {
        *freq.entry(*s).or_insert(0) += 1;
    }
    let mut order: Vec<Elem> = g.elements().collect();
    // rare signature first, then larger element order, then index
    order.sort_by_key(|&x| (freq[&sig[x as usize]], std::cmp::Reverse(sig[x as usize].0), x));
    let mut gens = Vec::new();
    let mut sub = vec![g.identity()];
    while sub.len() < g.order() {
        // the candidate enlarging the subgroup most
        let best = order
            .iter()
            .copied()
            .filter(|x| sub.binary_search(x).is_err())
            .take(64)
            .max_by_key(|&x| {
                let mut t = gens.clone();
                t.push(x);
                (g.generate(&t).len(), std::cmp::Reverse(order.iter().position(|&y| y == x)))
            })
            .unwrap();
        gens.push(best);
        sub = g.generate(&gens);
    }
    gens
}

struct Search<'a> {
    g: &'a FiniteGroup,
    h: &'a FiniteGroup,
    gens: &'a [Elem],
    candidates: &'a [Vec<Elem>],
    nodes: u128,
    limit: u128,
}

impl Search<'_> {
    fn extend(
        &mut self,
        level: usize,
        map: Vec<Option<Elem>>,
        used: Vec<bool>,
    ) -> Result<Option<Vec<Option<Elem>>>> {
        if level == self.gens.len() {
            return Ok(Some(map));
        }
        let x = self.gens[level];
        for &y in &self.candidates[level] {
            self.nodes += 1;
            crate::Budgets::check("isomorphism search", self.nodes, self.limit)?;
            if let Some(m) = map[x as usize] {
                // already determined by earlier generators
                if m != y {
                    continue;
                }
            } else if used[y as usize] {
                continue;
            }
            let mut m2 = map.clone();
            let mut u2 = used.clone();
            m2[x as usize] = Some(y);
            u2[y as usize] = true;
            if self.close(level, &mut m2, &mut u2) {
                if let Some(found) = self.extend(level + 1, m2, u2)? {
                    return Ok(Some(found));
                }
            }
        }
        Ok(None)
    }

    /// Propagates `φ(a·gᵢ) = φ(a)·φ(gᵢ)` over generators `0..=level`;
    /// returns false on a conflict.
    fn close(&self, level: usize, map: &mut [Option<Elem>], used: &mut [bool]) -> bool {
        let (g, h) = (self.g, self.h);
        let imgs: Vec<(Elem, Elem)> = self.gens[..=level]
            .iter()
            .map(|&x| (x, map[x as usize].unwrap()))
            .collect();
        let mut stack: Vec<Elem> = g.elements().filter(|&a| map[a as usize].is_some()).collect();
        while let Some(a) = stack.pop() {
            let fa = map[a as usize].unwrap();
            for &(x, fx) in &imgs {
                let b = g.mul(a, x);
                let fb = h.mul(fa, fx);
                match map[b as usize] {
                    Some(v) if v != fb => return false,
                    Some(_) => {}
                    None => {
                        if std::mem::replace(&mut used[fb as usize], true) {
                            return false;
                        }
                        map[b as usize] = Some(fb);
                        stack.push(b);
                    }
                }
            }
        }
        true
    }
}
