//! Exact arithmetic in `G ≀ Sym(n)`.
//!
//! Elements are pairs `(g, σ)` with `g ∈ Gⁿ`. The symmetric group acts on
//! the left by `g_σ = (g_{σ⁻¹(0)}, …, g_{σ⁻¹(n-1)})` and the product is
//! `(g, σ)(h, τ) = (g_{τ⁻¹} h, στ)`. A subscript listing several
//! permutations, such as `g_{τ⁻¹σ}`, means the actions applied one after the
//! other from left to right: `(g_{τ⁻¹})_σ`.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::group::{Elem, FiniteGroup};
use crate::perm::Permutation;
use crate::{Budgets, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WreathElement {
    pub g: Vec<Elem>,
    pub sigma: Permutation,
}

/// The ambient `G ≀ Sym(n)`.
#[derive(Debug, Clone, Copy)]
pub struct Wreath<'a> {
    pub base: &'a FiniteGroup,
    pub n: usize,
}

impl<'a> Wreath<'a> {
    pub fn new(base: &'a FiniteGroup, n: usize) -> Self {
        Wreath { base, n }
    }

    /// `|G|ⁿ · n!`, saturating.
    pub fn order(&self) -> u128 {
        let g = self.base.order() as u128;
        let fact = (1..=self.n as u128).fold(1u128, |a, k| a.saturating_mul(k));
        (0..self.n).fold(fact, |a, _| a.saturating_mul(g))
    }

    pub fn identity(&self) -> WreathElement {
        WreathElement { g: vec![self.base.identity(); self.n], sigma: Permutation::identity(self.n) }
    }

    pub fn element(&self, g: Vec<Elem>, sigma: Permutation) -> Result<WreathElement> {
        let x = WreathElement { g, sigma };
        self.check(&x)?;
        Ok(x)
    }

    pub fn check(&self, x: &WreathElement) -> Result<()> {
        if x.g.len() != self.n
            || x.sigma.degree() != self.n
            || x.g.iter().any(|&a| a as usize >= self.base.order())
        {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    /// `(g_σ)_i = g_{σ⁻¹(i)}`.
    pub fn act(&self, g: &[Elem], sigma: &Permutation) -> Vec<Elem> {
        let mut out = vec![self.base.identity(); g.len()];
        for (j, &a) in g.iter().enumerate() {
            out[sigma.apply(j)] = a;
        }
        out
    }

    /// Successive actions, first permutation first.
    pub fn act_seq(&self, g: &[Elem], perms: &[&Permutation]) -> Vec<Elem> {
        perms.iter().fold(g.to_vec(), |acc, p| self.act(&acc, p))
    }

    /// Componentwise product of base vectors.
    pub fn base_mul(&self, g: &[Elem], h: &[Elem]) -> Vec<Elem> {
        g.iter().zip(h).map(|(&a, &b)| self.base.mul(a, b)).collect()
    }

    pub fn base_inv(&self, g: &[Elem]) -> Vec<Elem> {
        g.iter().map(|&a| self.base.inv(a)).collect()
    }

    fn base_prod(&self, factors: &[Vec<Elem>]) -> Vec<Elem> {
        factors[1..].iter().fold(factors[0].clone(), |acc, f| self.base_mul(&acc, f))
    }

    /// `(g, σ)(h, τ) = (g_{τ⁻¹} h, στ)`.
    pub fn mul(&self, x: &WreathElement, y: &WreathElement) -> Result<WreathElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul_unchecked(x, y))
    }

    fn mul_unchecked(&self, x: &WreathElement, y: &WreathElement) -> WreathElement {
        let tau_inv = y.sigma.inverse();
        WreathElement {
            g: self.base_mul(&self.act(&x.g, &tau_inv), &y.g),
            sigma: x.sigma.compose(&y.sigma),
        }
    }

    /// `(g, σ)⁻¹ = (g⁻¹_σ, σ⁻¹)`.
    pub fn inv(&self, x: &WreathElement) -> WreathElement {
        WreathElement { g: self.act(&self.base_inv(&x.g), &x.sigma), sigma: x.sigma.inverse() }
    }

    /// `(h, τ)^{(g, σ)} = (g_{τ⁻¹σ} h_σ g⁻¹_σ, στσ⁻¹)`, the conjugate of `x`
    /// by `by`, equal to `by · x · by⁻¹`.
    pub fn conj(&self, x: &WreathElement, by: &WreathElement) -> Result<WreathElement> {
        self.check(x)?;
        self.check(by)?;
        let (h, tau) = (&x.g, &x.sigma);
        let (g, sigma) = (&by.g, &by.sigma);
        let tau_inv = tau.inverse();
        let g_inv = self.base_inv(g);
        let g = self.base_prod(&[
            self.act_seq(g, &[&tau_inv, sigma]),
            self.act(h, sigma),
            self.act(&g_inv, sigma),
        ]);
        Ok(WreathElement { g, sigma: sigma.compose(tau).compose(&sigma.inverse()) })
    }

    /// `[(g, σ), (h, τ)] = (g_{τ⁻¹στ} h_{στ} g⁻¹_{στ} h⁻¹_τ, στσ⁻¹τ⁻¹)`.
    pub fn comm(&self, x: &WreathElement, y: &WreathElement) -> Result<WreathElement> {
        self.check(x)?;
        self.check(y)?;
        let (g, sigma) = (&x.g, &x.sigma);
        let (h, tau) = (&y.g, &y.sigma);
        let tau_inv = tau.inverse();
        let g = self.base_prod(&[
            self.act_seq(g, &[&tau_inv, sigma, tau]),
            self.act_seq(h, &[sigma, tau]),
            self.act_seq(&self.base_inv(g), &[sigma, tau]),
            self.act(&self.base_inv(h), tau),
        ]);
        let perm = sigma.compose(tau).compose(&sigma.inverse()).compose(&tau_inv);
        Ok(WreathElement { g, sigma: perm })
    }

    /// `c_σ(g, j) = g_{σ^{-(L-1)}(j)} ⋯ g_{σ⁻¹(j)} g_j` with `L` the length of
    /// the orbit of `j`.
    pub fn cycle_product(&self, g: &[Elem], sigma: &Permutation, j: usize) -> Elem {
        let inv = sigma.inverse();
        let mut orbit = vec![j];
        let mut i = inv.apply(j);
        while i != j {
            orbit.push(i);
            i = inv.apply(i);
        }
        // orbit = [j, σ⁻¹j, σ⁻²j, …]; multiply from the far end.
        orbit.iter().rev().fold(self.base.identity(), |acc, &i| self.base.mul(acc, g[i]))
    }

    /// A base vector `k` with `(k, 1)(g, σ)(k, 1)⁻¹ = (h, σ)`, normalised to
    /// `k = 1` at each anchor (default: the smallest point of each orbit).
    ///
    /// The vector is built along each orbit by `k_{σ(i)} = h_i k_i g_i⁻¹` and
    /// exists exactly when the recursion closes up at every anchor. For
    /// abelian `G` this is the condition `c_σ(g, j) = c_σ(h, j)` on anchors.
    pub fn conjugate_in_base(
        &self,
        g: &[Elem],
        h: &[Elem],
        sigma: &Permutation,
        anchors: Option<&[usize]>,
    ) -> Option<Vec<Elem>> {
        let orbits = sigma.orbits();
        let default: Vec<usize> = orbits.iter().map(|o| o[0]).collect();
        let anchors = anchors.unwrap_or(&default);
        let e = self.base.identity();
        let mut k = vec![e; self.n];
        for &a in anchors {
            let mut i = a;
            loop {
                let next = sigma.apply(i);
                let val = self.base.mul(self.base.mul(h[i], k[i]), self.base.inv(g[i]));
                if next == a {
                    if val != e {
                        return None;
                    }
                    break;
                }
                k[next] = val;
                i = next;
            }
        }
        Some(k)
    }

    pub fn diagonal(&self, a: Elem) -> Vec<Elem> {
        vec![a; self.n]
    }

    /// Every element, ordered by permutation (lexicographic) then base
    /// vector (first coordinate least significant).
    pub fn elements(&self, budgets: &Budgets) -> Result<Vec<WreathElement>> {
        Budgets::check("group order", self.order(), budgets.group_order)?;
        let perms = Permutation::all(self.n);
        let q = self.base.order() as u64;
        let b = q.pow(self.n as u32);
        let mut out = Vec::with_capacity((b as usize) * perms.len());
        for p in &perms {
            for code in 0..b {
                out.push(WreathElement { g: decode(code, q, self.n), sigma: p.clone() });
            }
        }
        Ok(out)
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> WreathElement {
        let g = (0..self.n).map(|_| rng.gen_range(0..self.base.order() as Elem)).collect();
        let mut images: Vec<usize> = (0..self.n).collect();
        for i in (1..self.n).rev() {
            images.swap(i, rng.gen_range(0..=i));
        }
        WreathElement { g, sigma: Permutation::from_images(images).unwrap() }
    }

    /// Brute-force centralizer of `subset`, in the order of [`Self::elements`].
    pub fn centralizer(&self, subset: &[WreathElement], budgets: &Budgets) -> Result<Vec<WreathElement>> {
        for s in subset {
            self.check(s)?;
        }
        Ok(self
            .elements(budgets)?
            .into_iter()
            .filter(|x| {
                subset.iter().all(|k| self.mul_unchecked(x, k) == self.mul_unchecked(k, x))
            })
            .collect())
    }

    /// Materialises the multiplication table. Element indices follow
    /// [`Self::elements`]; generators are the generators of `G` in
    /// coordinate 0 plus the adjacent transpositions.
    pub fn group(&self, budgets: &Budgets) -> Result<(FiniteGroup, Vec<WreathElement>)> {
        let elems = self.elements(budgets)?;
        let perms = Permutation::all(self.n);
        let q = self.base.order() as u64;
        let b = q.pow(self.n as u32) as usize;
        let pindex: HashMap<&Permutation, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let ptab: Vec<usize> = perms
            .iter()
            .flat_map(|s| perms.iter().map(|t| pindex[&s.compose(t)]).collect::<Vec<_>>())
            .collect();
        let vectors: Vec<Vec<Elem>> = (0..b as u64).map(|c| decode(c, q, self.n)).collect();
        let encode = |v: &[Elem]| v.iter().rev().fold(0usize, |acc, &a| acc * q as usize + a as usize);
        // act_inv[t][c] = code of g_{τ⁻¹} for τ = perms[t]
        let act_inv: Vec<usize> = perms
            .iter()
            .flat_map(|t| {
                let ti = t.inverse();
                vectors.iter().map(|v| encode(&self.act(v, &ti))).collect::<Vec<_>>()
            })
            .collect();
        let bmul: Vec<usize> = vectors
            .iter()
            .flat_map(|v| vectors.iter().map(|w| encode(&self.base_mul(v, w))).collect::<Vec<_>>())
            .collect();
        let np = perms.len();
        let idx = |p: usize, c: usize| (p * b + c) as Elem;
        let id_code = encode(&self.diagonal(self.base.identity()));
        let mut gens: Vec<Elem> = self
            .base
            .generators()
            .iter()
            .map(|&a| {
                let mut v = self.diagonal(self.base.identity());
                v[0] = a;
                idx(0, encode(&v))
            })
            .collect();
        for i in 0..self.n.saturating_sub(1) {
            let t = Permutation::transposition(self.n, i, i + 1).unwrap();
            gens.push(idx(pindex[&t], id_code));
        }
        let group = FiniteGroup::from_fn(elems.len(), idx(0, id_code), gens, |x, y| {
            let (s, g) = (x as usize / b, x as usize % b);
            let (t, h) = (y as usize / b, y as usize % b);
            idx(ptab[s * np + t], bmul[act_inv[t * b + g] * b + h])
        });
        Ok((group, elems))
    }
}

fn decode(mut code: u64, q: u64, n: usize) -> Vec<Elem> {
    (0..n)
        .map(|_| {
            let d = (code % q) as Elem;
            code /= q;
            d
        })
        .collect()
}

/// `G ≀ Sym(n)` as a table group.
pub fn wreath_group(base: &FiniteGroup, n: usize, budgets: &Budgets) -> Result<FiniteGroup> {
    Ok(Wreath::new(base, n).group(budgets)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn el(g: &[Elem], sigma: &[usize]) -> WreathElement {
        WreathElement { g: g.to_vec(), sigma: Permutation::from_images(sigma.to_vec()).unwrap() }
    }

    #[test]
    fn product_examples() {
        let z2 = FiniteGroup::cyclic(2);
        let w = Wreath::new(&z2, 2);
        let x = el(&[1, 0], &[1, 0]);
        let y = el(&[0, 1], &[1, 0]);
        assert_eq!(w.mul(&x, &y).unwrap(), el(&[0, 0], &[0, 1]));
        assert_eq!(w.inv(&x), y);
        assert_eq!(w.mul(&w.identity(), &x).unwrap(), x);
        let z3 = FiniteGroup::cyclic(3);
        let w = Wreath::new(&z3, 3);
        let x = el(&[1, 0, 0], &[1, 2, 0]);
        let y = el(&[0, 1, 0], &[0, 1, 2]);
        assert_eq!(w.mul(&x, &y).unwrap(), el(&[1, 1, 0], &[1, 2, 0]));
    }

    #[test]
    fn ambient_mismatch() {
        let z2 = FiniteGroup::cyclic(2);
        let w = Wreath::new(&z2, 2);
        assert_eq!(w.mul(&el(&[0], &[0]), &w.identity()), Err(Error::AmbientMismatch));
        assert_eq!(w.mul(&el(&[0, 5], &[0, 1]), &w.identity()), Err(Error::AmbientMismatch));
    }

    #[test]
    fn formulas_match_definitions() {
        let z4 = FiniteGroup::cyclic(4);
        let s3 = FiniteGroup::builtin("S3").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for base in [&z4, &s3] {
            let w = Wreath::new(base, 3);
            for _ in 0..500 {
                let x = w.random(&mut rng);
                let y = w.random(&mut rng);
                let conj = w.mul(&w.mul(&y, &x).unwrap(), &w.inv(&y)).unwrap();
                assert_eq!(w.conj(&x, &y).unwrap(), conj);
                let comm = w.mul(&w.mul(&x, &y).unwrap(), &w.mul(&w.inv(&x), &w.inv(&y)).unwrap()).unwrap();
                assert_eq!(w.comm(&x, &y).unwrap(), comm);
                assert_eq!(w.mul(&x, &w.inv(&x)).unwrap(), w.identity());
            }
        }
    }

    #[test]
    fn cycle_products() {
        let z = FiniteGroup::builtin("S3").unwrap();
        let w = Wreath::new(&z, 3);
        let c = Permutation::cycle(3, &[0, 1, 2]).unwrap();
        let g = [1, 2, 3];
        let expected = z.mul(z.mul(g[0], g[1]), g[2]);
        assert_eq!(w.cycle_product(&g, &c, 2), expected);
        assert_eq!(w.cycle_product(&g, &Permutation::identity(3), 1), 2);
        assert_eq!(w.cycle_product(&[0, 0, 0], &c, 0), 0);
    }

    #[test]
    fn base_conjugators() {
        let z2 = FiniteGroup::cyclic(2);
        let w = Wreath::new(&z2, 2);
        let swap = Permutation::from_images(vec![1, 0]).unwrap();
        let k = w.conjugate_in_base(&[1, 0], &[0, 1], &swap, None).unwrap();
        let conj = w.conj(&el(&[1, 0], &[1, 0]), &WreathElement { g: k, sigma: Permutation::identity(2) });
        assert_eq!(conj.unwrap(), el(&[0, 1], &[1, 0]));
        let z3 = FiniteGroup::cyclic(3);
        let w = Wreath::new(&z3, 2);
        assert!(w.conjugate_in_base(&[1, 0], &[2, 0], &swap, None).is_none());
        assert_eq!(w.conjugate_in_base(&[1, 2], &[1, 2], &swap, None).unwrap(), vec![0, 0]);
    }

    #[test]
    fn tables() {
        let b = Budgets::default();
        let z2 = FiniteGroup::cyclic(2);
        let (g, elems) = Wreath::new(&z2, 2).group(&b).unwrap();
        assert_eq!(g.order(), 8);
        assert!(!g.is_abelian());
        let w = Wreath::new(&z2, 2);
        for x in 0..8u32 {
            for y in 0..8u32 {
                let p = w.mul(&elems[x as usize], &elems[y as usize]).unwrap();
                assert_eq!(elems[g.mul(x, y) as usize], p);
            }
        }
        FiniteGroup::from_document(g.to_document()).unwrap();
        assert_eq!(wreath_group(&FiniteGroup::cyclic(3), 2, &b).unwrap().order(), 18);
        assert_eq!(wreath_group(&FiniteGroup::trivial(), 3, &b).unwrap().order(), 6);
        let tight = Budgets { group_order: 10, ..b };
        assert!(wreath_group(&z2, 3, &tight).is_err());
    }

    #[test]
    fn centralizer_of_whole_group() {
        let z2 = FiniteGroup::cyclic(2);
        let w = Wreath::new(&z2, 3);
        let all = w.elements(&Budgets::default()).unwrap();
        let c = w.centralizer(&all, &Budgets::default()).unwrap();
        assert_eq!(c, vec![w.identity(), el(&[1, 1, 1], &[0, 1, 2])]);
    }
}
