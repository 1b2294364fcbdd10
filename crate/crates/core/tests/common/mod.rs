//! Independent oracles and the shared graph corpus.
//!
//! Nothing here calls the library routine it is used to check.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabdyn::group::{Elem, FiniteGroup};
use stabdyn::perm::Permutation;
use stabdyn::sft::EdgeShift;
use stabdyn::wreath::WreathElement;

pub fn shift(s: &str) -> EdgeShift {
    EdgeShift::parse(s).unwrap()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Boolean matrix product.
fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let k = a.len();
    (0..k).map(|i| (0..k).map(|j| (0..k).any(|l| a[i][l] && b[l][j])).collect()).collect()
}

fn pattern(x: &EdgeShift) -> Vec<Vec<bool>> {
    x.adjacency().iter().map(|r| r.iter().map(|&c| c > 0).collect()).collect()
}

/// Period as the gcd of all closed-walk lengths up to `k² + k`, read off
/// the diagonals of boolean matrix powers.
pub fn period_by_cycles(x: &EdgeShift) -> u64 {
    let a = pattern(x);
    let k = a.len();
    let mut p = a.clone();
    let mut g = 0;
    for len in 1..=(k * k + k) as u64 {
        if (0..k).any(|i| p[i][i]) {
            g = gcd(g, len);
        }
        p = bool_mul(&p, &a);
    }
    g
}

/// Strong connectivity of the boolean pattern of `Aⁿ`, by transitive
/// closure.
pub fn power_strongly_connected(x: &EdgeShift, n: usize) -> bool {
    let a = pattern(x);
    let k = a.len();
    let mut an: Vec<Vec<bool>> = (0..k).map(|i| (0..k).map(|j| i == j).collect()).collect();
    for _ in 0..n {
        an = bool_mul(&an, &a);
    }
    let mut reach = an.clone();
    for l in 0..k {
        for i in 0..k {
            for j in 0..k {
                reach[i][j] |= reach[i][l] && reach[l][j];
            }
        }
    }
    (0..k).all(|i| (0..k).all(|j| reach[i][j]))
}

/// Whether some labelling of states by `0..m` sends every edge from class
/// `c` to class `c+1`, by exhaustive search.
pub fn partition_exists(x: &EdgeShift, m: usize) -> bool {
    let k = x.num_states();
    let edges: Vec<(usize, usize)> = x.edges().iter().map(|e| (e.from, e.to)).collect();
    let total = (m as u64).pow(k as u32);
    (0..total).any(|mut code| {
        let mut label = vec![0; k];
        for l in label.iter_mut() {
            *l = (code % m as u64) as usize;
            code /= m as u64;
        }
        label[0] == 0 && edges.iter().all(|&(u, v)| label[v] == (label[u] + 1) % m)
    })
}

/// Spectral radius from a dense Schur decomposition, or, when the QR
/// iteration stalls on a periodic matrix, the largest real root of
/// `det(λI − A)` located by a downward scan and bisection.
pub fn spectral_radius(x: &EdgeShift) -> f64 {
    let k = x.num_states();
    spectral_radius_of(DMatrix::from_fn(k, k, |i, j| x.adjacency()[i][j] as f64))
}

/// [`spectral_radius`] of a nonnegative matrix.
pub fn spectral_radius_of(a: DMatrix<f64>) -> f64 {
    let k = a.nrows();
    if let Some(schur) = a.clone().try_schur(1e-13, 100_000) {
        return schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let det = |l: f64| (DMatrix::identity(k, k) * l - &a).determinant();
    let top = a.row_iter().map(|r| r.sum()).fold(0.0, f64::max) + 1.0;
    let steps = 200_000;
    let mut hi = top;
    for s in 1..=steps {
        let lo = top * (1.0 - s as f64 / steps as f64);
        if det(lo) == 0.0 {
            return lo;
        }
        if det(lo).signum() != det(hi).signum() {
            let (mut lo, mut hi) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if det(mid).signum() == det(hi).signum() { hi = mid } else { lo = mid }
            }
            return 0.5 * (lo + hi);
        }
        hi = lo;
    }
    0.0
}

/// The shared corpus: named graphs followed by seeded random irreducible
/// graphs, all with at most six states.
pub fn corpus() -> Vec<(String, EdgeShift)> {
    let named = [
        ("full-2", "2"),
        ("full-3", "3"),
        ("golden-mean", "1 1 / 1 0"),
        ("2-cycle", "0 1 / 1 0"),
        ("doubled-loop", "0 2 / 1 0"),
        ("3-cycle", "0 1 0 / 0 0 1 / 1 0 0"),
        ("3-cycle-doubled", "0 2 0 / 0 0 1 / 1 0 0"),
        ("4-cycle", "0 1 0 0 / 0 0 1 0 / 0 0 0 1 / 1 0 0 0"),
        ("4-cycle-chord", "0 1 0 0 / 0 0 1 0 / 0 0 0 1 / 1 1 0 0"),
        ("5-cycle", "0 1 0 0 0 / 0 0 1 0 0 / 0 0 0 1 0 / 0 0 0 0 1 / 1 0 0 0 0"),
        (
            "6-cycle-period-2",
            "0 1 0 0 0 0 / 0 0 1 0 0 0 / 0 0 0 1 0 0 / 0 0 0 0 1 0 / 0 0 0 0 0 1 / 1 0 0 1 0 0",
        ),
        (
            "6-cycle-period-3",
            "0 1 0 0 0 0 / 0 0 1 0 0 0 / 0 0 0 1 0 0 / 0 0 0 0 1 0 / 0 0 0 0 0 1 / 1 0 1 0 0 0",
        ),
        (
            "6-cycle-doubled",
            "0 2 0 0 0 0 / 0 0 1 0 0 0 / 0 0 0 1 0 0 / 0 0 0 0 1 0 / 0 0 0 0 0 1 / 1 0 0 0 0 0",
        ),
        ("bipartite-2-2", "0 0 1 1 / 0 0 1 1 / 1 1 0 0 / 1 1 0 0"),
    ];
    let mut out: Vec<(String, EdgeShift)> = named.iter().map(|(n, s)| (n.to_string(), shift(s))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut found = 0;
    while found < 40 {
        let k = rng.gen_range(2..=6);
        let mut adj = vec![vec![0u64; k]; k];
        // a Hamiltonian cycle keeps the graph irreducible
        let mut order: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        for i in 0..k {
            adj[order[i]][order[(i + 1) % k]] = 1;
        }
        for _ in 0..rng.gen_range(0..k) {
            let (i, j) = (rng.gen_range(0..k), rng.gen_range(0..k));
            adj[i][j] += rng.gen_range(1..=2);
        }
        let x = EdgeShift::from_matrix(adj).unwrap();
        if x.is_irreducible() && x.alphabet_size() <= 14 {
            out.push((format!("random-{found}"), x));
            found += 1;
        }
    }
    out
}

/// Wreath elements as permutations of `G × {0..n}` with
/// `(k, ρ)·(x, i) = (kᵢ x, ρ(i))`, a faithful action independent of the
/// library formulas.
pub struct WreathOracle<'a> {
    pub g: &'a FiniteGroup,
    pub n: usize,
}

impl WreathOracle<'_> {
    pub fn encode(&self, w: &WreathElement) -> Permutation {
        let o = self.g.order();
        let mut images = vec![0; o * self.n];
        for i in 0..self.n {
            for x in self.g.elements() {
                let y = self.g.mul(w.g[i], x);
                images[i * o + x as usize] = w.sigma.apply(i) * o + y as usize;
            }
        }
        Permutation::from_images(images).unwrap()
    }

    pub fn decode(&self, p: &Permutation) -> WreathElement {
        let o = self.g.order();
        let e = self.g.identity() as usize;
        let mut g = Vec::with_capacity(self.n);
        let mut sigma = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let img = p.apply(i * o + e);
            sigma.push(img / o);
            g.push((img % o) as Elem);
        }
        WreathElement { g, sigma: Permutation::from_images(sigma).unwrap() }
    }

    pub fn mul(&self, a: &WreathElement, b: &WreathElement) -> WreathElement {
        self.decode(&self.encode(a).compose(&self.encode(b)))
    }

    pub fn inv(&self, a: &WreathElement) -> WreathElement {
        self.decode(&self.encode(a).inverse())
    }

    /// `by · x · by⁻¹`.
    pub fn conj(&self, x: &WreathElement, by: &WreathElement) -> WreathElement {
        let (p, q) = (self.encode(x), self.encode(by));
        self.decode(&q.compose(&p).compose(&q.inverse()))
    }

    /// `x y x⁻¹ y⁻¹`.
    pub fn comm(&self, x: &WreathElement, y: &WreathElement) -> WreathElement {
        let (p, q) = (self.encode(x), self.encode(y));
        self.decode(&p.compose(&q).compose(&p.inverse()).compose(&q.inverse()))
    }

    /// All elements, by brute force over `Gⁿ × Sym(n)`.
    pub fn elements(&self) -> Vec<WreathElement> {
        let o = self.g.order();
        let mut out = Vec::new();
        for sigma in Permutation::all(self.n) {
            for mut code in 0..o.pow(self.n as u32) {
                let mut g = vec![0; self.n];
                for slot in g.iter_mut() {
                    *slot = (code % o) as Elem;
                    code /= o;
                }
                out.push(WreathElement { g, sigma: sigma.clone() });
            }
        }
        out
    }

    /// Elements commuting with every element of `subset`.
    pub fn centralizer(&self, subset: &[WreathElement]) -> Vec<WreathElement> {
        let enc: Vec<Permutation> = subset.iter().map(|s| self.encode(s)).collect();
        let mut out: Vec<WreathElement> = self
            .elements()
            .into_iter()
            .filter(|c| {
                let p = self.encode(c);
                enc.iter().all(|s| p.compose(s) == s.compose(&p))
            })
            .collect();
        out.sort();
        out
    }
}
