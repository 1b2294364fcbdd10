//! Randomised invariants.

mod common;

use std::sync::OnceLock;

use common::{shift, WreathOracle};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabdyn::codes::{enumerate_automorphisms, AutomorphismSet};
use stabdyn::group::FiniteGroup;
use stabdyn::perm::Permutation;
use stabdyn::sft::EdgeShift;
use stabdyn::spectral::{cyclic_partition, is_power_transitive};
use stabdyn::verify::entropy_ratio;
use stabdyn::wreath::Wreath;
use stabdyn::Budgets;

fn b() -> Budgets {
    Budgets::default()
}

/// An irreducible graph on 2..=5 states: a random Hamiltonian cycle plus
/// a few extra edges.
fn irreducible(seed: u64) -> EdgeShift {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=5);
    let mut adj = vec![vec![0u64; k]; k];
    let mut order: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    for i in 0..k {
        adj[order[i]][order[(i + 1) % k]] = 1;
    }
    for _ in 0..rng.gen_range(0..=k) {
        let (i, j) = (rng.gen_range(0..k), rng.gen_range(0..k));
        adj[i][j] += 1;
    }
    EdgeShift::from_matrix(adj).unwrap()
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn doubled_loop() -> &'static (EdgeShift, AutomorphismSet) {
    static SET: OnceLock<(EdgeShift, AutomorphismSet)> = OnceLock::new();
    SET.get_or_init(|| {
        let x = shift("0 2 / 1 0");
        let a = enumerate_automorphisms(&x, 2, 1, 2, &b()).unwrap();
        (x, a)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_entropy_scales(seed in any::<u64>(), n in 1usize..=6) {
        let x = irreducible(seed);
        let h = x.entropy().unwrap().entropy;
        let p = x.power_shift(n, &b()).unwrap();
        // the power splits into gcd(n, period) irreducible pieces
        for comp in p.shift.strongly_connected_components() {
            let (sub, _) = p.shift.restrict(&comp).unwrap();
            let hn = sub.entropy().unwrap().entropy;
            prop_assert!((hn - n as f64 * h).abs() < 1e-9, "{hn} vs {n}·{h}");
        }
    }

    #[test]
    fn power_transitivity_is_coprimality(seed in any::<u64>(), n in 1u64..=12) {
        let x = irreducible(seed);
        let p = common::period_by_cycles(&x);
        prop_assert_eq!(is_power_transitive(&x, n).unwrap(), gcd(n, p) == 1);
        prop_assert_eq!(
            common::power_strongly_connected(&x, n as usize),
            gcd(n, p) == 1
        );
    }

    #[test]
    fn self_entropy_ratio_is_one(seed in any::<u64>()) {
        let x = irreducible(seed);
        prop_assume!(x.entropy().unwrap().entropy > 1e-6);
        let r = entropy_ratio(&x, &x, 50, 1e-12, &b()).unwrap();
        prop_assert_eq!((r.p, r.q), (1, 1));
        prop_assert!(r.residual < 1e-12);
    }

    #[test]
    fn permutation_group_laws(a in permutation(6), b in permutation(6), c in permutation(6), k in -8i64..8, l in -8i64..8) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        prop_assert!(a.compose(&a.inverse()).is_identity());
        prop_assert!(a.pow(a.order() as i64).is_identity());
        prop_assert_eq!(a.pow(k).compose(&a.pow(l)), a.pow(k + l));
        prop_assert_eq!(a.compose(&b).is_even(), a.is_even() == b.is_even());
    }

    #[test]
    fn wreath_products_match_oracle(seed in any::<u64>(), base in 0usize..4, n in 2usize..=4) {
        let name = ["Z2", "Z3", "S3", "Q8"][base];
        let g = FiniteGroup::builtin(name).unwrap();
        let w = Wreath::new(&g, n);
        let o = WreathOracle { g: &g, n };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (w.random(&mut rng), w.random(&mut rng), w.random(&mut rng));
        let xy = w.mul(&x, &y).unwrap();
        prop_assert_eq!(&xy, &o.mul(&x, &y));
        prop_assert_eq!(w.mul(&xy, &z).unwrap(), w.mul(&x, &w.mul(&y, &z).unwrap()).unwrap());
        prop_assert_eq!(w.inv(&x), o.inv(&x));
        prop_assert_eq!(w.conj(&x, &y).unwrap(), o.conj(&x, &y));
        prop_assert_eq!(w.comm(&x, &y).unwrap(), o.comm(&x, &y));
    }

    #[test]
    fn code_composition_is_associative(i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), k in any::<prop::sample::Index>()) {
        let (x, a) = doubled_loop();
        let (f, g, h) = (&a.elements[i.index(a.len())], &a.elements[j.index(a.len())], &a.elements[k.index(a.len())]);
        let left = f.compose(g, x).unwrap().compose(h, x).unwrap();
        let right = f.compose(&g.compose(h, x).unwrap(), x).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn partition_action_is_multiplicative(i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let (x, a) = doubled_loop();
        let part = cyclic_partition(x, 2).unwrap();
        let (f, g) = (&a.elements[i.index(a.len())], &a.elements[j.index(a.len())]);
        let lhs = f.compose(g, x).unwrap().partition_action(x, &part).unwrap();
        let rhs = f.partition_action(x, &part).unwrap().compose(&g.partition_action(x, &part).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sturmian_windows_are_balanced(start in 0usize..3000, k in 1usize..64) {
        let w = stabdyn::sequences::sturmian_prefix(start + 2 * k + 1, &b()).unwrap();
        let ones = |s: &str| s.bytes().filter(|&c| c == b'1').count() as i64;
        let (u, v) = (&w[start..start + k], &w[start + k + 1..start + 2 * k + 1]);
        prop_assert!((ones(u) - ones(v)).abs() <= 1);
    }
}
