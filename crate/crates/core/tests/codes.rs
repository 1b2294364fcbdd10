//! Sliding block codes against direct evaluation on words.

mod common;

use common::shift;
use stabdyn::codes::{class_permutation_code, enumerate_automorphisms, SlidingBlockCode};
use stabdyn::perm::Permutation;
use stabdyn::sft::{EdgeShift, Sym};
use stabdyn::spectral::cyclic_partition;
use stabdyn::Budgets;

fn b() -> Budgets {
    Budgets::default()
}

/// Radius-0 automorphisms by brute force: symbol permutations preserving
/// the transition relation.
fn radius_zero_automorphisms(x: &EdgeShift) -> usize {
    let k = x.alphabet_size();
    Permutation::all(k)
        .into_iter()
        .filter(|p| {
            (0..k).all(|a| {
                (0..k).all(|c| {
                    let adm = x.edge(a as Sym).to == x.edge(c as Sym).from;
                    let img = x.edge(p.apply(a) as Sym).to == x.edge(p.apply(c) as Sym).from;
                    adm == img
                })
            })
        })
        .count()
}

#[test]
fn radius_zero_counts_match_brute_force() {
    for s in ["2", "3", "1 1 / 1 0", "0 2 / 1 0", "2 1 / 1 1"] {
        let x = shift(s);
        let a = enumerate_automorphisms(&x, 1, 0, 0, &b()).unwrap();
        assert_eq!(a.len(), radius_zero_automorphisms(&x), "{s}");
    }
}

#[test]
fn enumerated_sets_obey_group_laws() {
    for (s, n, r) in [("2", 1, 1), ("2", 2, 1), ("3", 1, 0), ("1 1 / 1 0", 1, 2), ("0 2 / 1 0", 2, 1)] {
        let x = shift(s);
        let a = enumerate_automorphisms(&x, n, r, 2 * r, &b()).unwrap();
        let id = SlidingBlockCode::identity(&x);
        assert!(a.contains(&id), "{s}");
        assert!(a.elements.windows(2).all(|w| w[0] < w[1]));
        for (f, g) in a.elements.iter().zip(&a.inverses) {
            assert!(f.compose(g, &x).unwrap().is_identity(), "{s}");
            assert!(g.compose(f, &x).unwrap().is_identity(), "{s}");
            assert!(f.commutes_with_power(&x, n, 2 * f.radius() + n + 1).unwrap());
        }
        for f in &a.elements {
            for g in &a.elements {
                let fg = f.compose(g, &x).unwrap();
                // compositions within the bounds are members
                if fg.radius() <= r {
                    if let Some(inv) = fg.inverse(&x, 2 * r).unwrap() {
                        assert!(a.contains(&fg), "{s}");
                        assert!(fg.compose(&inv, &x).unwrap().is_identity());
                    }
                }
            }
        }
    }
}

#[test]
fn codes_preserve_admissibility() {
    let x = shift("1 1 / 1 0");
    let a = enumerate_automorphisms(&x, 1, 2, 4, &b()).unwrap();
    for f in &a.elements {
        for len in 2 * f.radius() + 1..=2 * f.radius() + 5 {
            for w in x.words_of_length(len, &b()).unwrap() {
                assert!(x.is_admissible(&f.apply(&x, &w).unwrap()));
            }
        }
    }
}

#[test]
fn composition_agrees_with_sequential_application() {
    let x = shift("0 2 / 1 0");
    let a = enumerate_automorphisms(&x, 2, 1, 2, &b()).unwrap();
    let words = x.words_of_length(9, &b()).unwrap();
    for f in a.elements.iter().take(8) {
        for g in a.elements.iter().rev().take(8) {
            let fg = f.compose(g, &x).unwrap();
            let r = fg.radius();
            let (rf, rg) = (f.radius(), g.radius());
            for w in &words {
                let inner = g.apply_at(w, -(rf as i64)).unwrap();
                let outer = f.apply_at(&inner, 0).unwrap();
                let slack = rf + rg - r;
                let direct = fg.apply(&x, &w[slack..w.len() - slack]).unwrap();
                assert_eq!(outer, direct);
            }
        }
    }
}

#[test]
fn partition_action_is_a_homomorphism() {
    let x = shift("0 2 0 / 0 0 1 / 1 0 0");
    let part = cyclic_partition(&x, 3).unwrap();
    let a = enumerate_automorphisms(&x, 3, 1, 1, &b()).unwrap();
    for f in &a.elements {
        for g in &a.elements {
            let fg = f.compose(g, &x).unwrap();
            let lhs = fg.partition_action(&x, &part).unwrap();
            let rhs = f.partition_action(&x, &part).unwrap().compose(&g.partition_action(&x, &part).unwrap());
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn class_swap_on_doubled_loop() {
    let x = shift("0 2 / 1 0");
    let part = cyclic_partition(&x, 2).unwrap();
    let swap = Permutation::transposition(2, 0, 1).unwrap();
    let rho = class_permutation_code(&x, &part, &swap).unwrap();
    assert_eq!(rho.partition_action(&x, &part).unwrap(), swap);
    assert!(rho.commutes_with_power(&x, 2, 2 * rho.radius() + 3).unwrap());
    assert!(!rho.commutes_with_power(&x, 1, 2 * rho.radius() + 2).unwrap());
    let square = rho.compose(&rho, &x).unwrap();
    assert!(square.is_identity());
}

#[test]
fn equal_actions_give_equal_canonical_forms() {
    let x = shift("2");
    let words = x.words_of_length(3, &b()).unwrap();
    let f = SlidingBlockCode::from_fn(&x, 1, 1, |_, w| w[1] ^ (w[0] & w[2])).unwrap();
    // the same rule written at radius 2
    let g = SlidingBlockCode::from_fn(&x, 2, 1, |_, w| w[2] ^ (w[1] & w[3])).unwrap();
    assert_eq!(f, g);
    assert_eq!(g.radius(), 1);
    for w in &words {
        assert_eq!(f.apply(&x, w).unwrap(), vec![w[1] ^ (w[0] & w[2])]);
    }
    let doc = serde_json::to_value(f.to_document(&x)).unwrap();
    assert_eq!(doc["radius"], 1);
    assert_eq!(doc["rule"].as_array().unwrap().len(), 8);
}
