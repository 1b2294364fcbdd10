//! Rational eigenvalues, cyclic partitions and the Smale decomposition of an
//! irreducible edge shift.
//!
//! For an irreducible shift of period `p` the rational eigenvalues are
//! exactly the divisors of `p`, and the cyclic partition of size `m | p`
//! groups states by BFS level modulo `m`.

use serde::Serialize;

use crate::sft::{EdgeShift, Sym, Word};
use crate::{divisors, gcd, Budgets, Error, Result, SCHEMA_VERSION};

/// Ordered classes of states; every edge runs from class `k` to class
/// `k + 1 mod size`, and the base state 0 lies in class 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclicPartition {
    pub size: usize,
    pub classes: Vec<Vec<usize>>,
    #[serde(skip)]
    class_of: Vec<usize>,
    pub matrix_hash: String,
}

impl CyclicPartition {
    pub fn class_of(&self, state: usize) -> usize {
        self.class_of[state]
    }

    /// Class of the state an edge leaves from.
    pub fn class_of_edge(&self, shift: &EdgeShift, sym: Sym) -> usize {
        self.class_of[shift.edge(sym).from]
    }

    /// Checks the defining properties against `shift`.
    pub fn is_valid_for(&self, shift: &EdgeShift) -> bool {
        self.class_of.len() == shift.num_states()
            && self.class_of[0] == 0
            && shift
                .edges()
                .iter()
                .all(|e| self.class_of[e.to] == (self.class_of[e.from] + 1) % self.size)
    }

    fn from_labels(class_of: Vec<usize>, size: usize, matrix_hash: String) -> Self {
        let mut classes = vec![Vec::new(); size];
        for (s, &c) in class_of.iter().enumerate() {
            classes[c].push(s);
        }
        CyclicPartition { size, classes, class_of, matrix_hash }
    }
}

/// The mixing component `(X_p, σᵖ|X_p)` of an irreducible shift of period
/// `p`.
#[derive(Debug, Clone)]
pub struct SmaleDecomposition {
    pub period: usize,
    pub component: EdgeShift,
    pub partition: CyclicPartition,
    /// `paths[e]` is the length-`period` path of the original shift spelled
    /// by component edge `e`.
    pub paths: Vec<Word>,
}

#[derive(Debug, Serialize)]
pub struct SmaleSummary {
    pub schema_version: u32,
    pub period: usize,
    pub component_states: Vec<String>,
    pub component_adjacency: Vec<Vec<u64>>,
    pub component_mixing: bool,
    pub partition: CyclicPartition,
}

impl SmaleDecomposition {
    pub fn summary(&self) -> SmaleSummary {
        SmaleSummary {
            schema_version: SCHEMA_VERSION,
            period: self.period,
            component_states: self.component.states().to_vec(),
            component_adjacency: self.component.adjacency().to_vec(),
            component_mixing: self.component.is_mixing(),
            partition: self.partition.clone(),
        }
    }
}

/// `n = k·ℓ` with `σᵏ` transitive and `ℓ` a rational eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PowerDecomposition {
    pub n: u64,
    pub k: u64,
    pub l: u64,
}

/// The set `Eig(σ)` as a sorted list: all divisors of the period.
pub fn rational_eigs(x: &EdgeShift) -> Result<Vec<u64>> {
    Ok(divisors(x.period()?))
}

pub fn cyclic_partition(x: &EdgeShift, m: usize) -> Result<CyclicPartition> {
    let p = x.period()?;
    if m == 0 || p % m as u64 != 0 {
        return Err(Error::NoSuchEigenvalue(m as u64, p));
    }
    let class_of = x.bfs_levels(0).into_iter().map(|l| l % m).collect();
    Ok(CyclicPartition::from_labels(class_of, m, x.hash()))
}

/// Merges classes `k, k+p, k+2p, …` into class `k`.
pub fn coarsen_partition(part: &CyclicPartition, p: usize) -> Result<CyclicPartition> {
    if p == 0 || part.size % p != 0 {
        return Err(Error::InvalidArgument(format!(
            "{p} does not divide partition size {}",
            part.size
        )));
    }
    let class_of = part.class_of.iter().map(|c| c % p).collect();
    Ok(CyclicPartition::from_labels(class_of, p, part.matrix_hash.clone()))
}

pub fn smale(x: &EdgeShift, budgets: &Budgets) -> Result<SmaleDecomposition> {
    component(x, x.period()? as usize, budgets)
}

/// `(X_m, σᵐ|X_m)` for any rational eigenvalue `m`. It is mixing only when
/// `m` is the period.
pub fn component(x: &EdgeShift, m: usize, budgets: &Budgets) -> Result<SmaleDecomposition> {
    let p = m;
    let partition = cyclic_partition(x, p)?;
    let power = x.power_shift(p, budgets)?;
    let (component, map) = power.shift.restrict(&partition.classes[0])?;
    let paths = map.iter().map(|&e| power.paths[e as usize].clone()).collect();
    Ok(SmaleDecomposition { period: p, component, partition, paths })
}

/// Whether `σⁿ` is transitive, i.e. `gcd(n, period) = 1`.
pub fn is_power_transitive(x: &EdgeShift, n: u64) -> Result<bool> {
    Ok(gcd(n, x.period()?) == 1)
}

/// Transitivity of `σⁿ` read off the graph of `Aⁿ` directly.
pub fn is_power_transitive_by_connectivity(x: &EdgeShift, n: usize) -> bool {
    let all: Vec<usize> = (0..x.num_states()).collect();
    strongly_connected(&reachability_power(x, n), &all)
}

/// The unique `n = k·ℓ` with `ℓ | period` and `gcd(k, period) = 1`, when it
/// exists. It fails exactly when some prime divides both `n / gcd(n, p)` and
/// `p`, as for `n = 4`, `p = 2`.
pub fn decompose_power(x: &EdgeShift, n: u64) -> Result<PowerDecomposition> {
    if n == 0 {
        return Err(Error::InvalidArgument("power must be positive".into()));
    }
    let p = x.period()?;
    let l = gcd(n, p);
    let k = n / l;
    if gcd(k, p) != 1 {
        return Err(Error::NoPowerDecomposition(n));
    }
    Ok(PowerDecomposition { n, k, l })
}

/// Whether `σ^{nm}` is transitive on the class-0 piece of the size-`m`
/// cyclic partition: `gcd(n, period / m) = 1`.
pub fn restricted_transitivity(x: &EdgeShift, m: usize, n: u64) -> Result<bool> {
    let p = x.period()?;
    if m == 0 || p % m as u64 != 0 {
        return Err(Error::NoSuchEigenvalue(m as u64, p));
    }
    Ok(gcd(n, p / m as u64) == 1)
}

/// The same property from strong connectivity of `A^{nm}` on class 0.
pub fn restricted_transitivity_by_connectivity(x: &EdgeShift, m: usize, n: usize) -> Result<bool> {
    let part = cyclic_partition(x, m)?;
    Ok(strongly_connected(&reachability_power(x, n * m), &part.classes[0]))
}

/// Boolean pattern of `Aⁿ`.
fn reachability_power(x: &EdgeShift, n: usize) -> Vec<Vec<bool>> {
    let k = x.num_states();
    let a: Vec<Vec<bool>> = x.adjacency().iter().map(|r| r.iter().map(|&c| c > 0).collect()).collect();
    let mut p: Vec<Vec<bool>> = (0..k).map(|i| (0..k).map(|j| i == j).collect()).collect();
    for _ in 0..n {
        p = (0..k)
            .map(|i| (0..k).map(|j| (0..k).any(|l| p[i][l] && a[l][j])).collect())
            .collect();
    }
    p
}

fn strongly_connected(adj: &[Vec<bool>], within: &[usize]) -> bool {
    let Some(&root) = within.first() else { return false };
    let reach = |forward: bool| {
        let mut seen = vec![false; adj.len()];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &w in within {
                let edge = if forward { adj[v][w] } else { adj[w][v] };
                if edge && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        within.iter().all(|&w| seen[w])
    };
    reach(true) && reach(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift(s: &str) -> EdgeShift {
        EdgeShift::parse(s).unwrap()
    }

    fn six_cycle() -> EdgeShift {
        let mut a = vec![vec![0; 6]; 6];
        for i in 0..6 {
            a[i][(i + 1) % 6] = 1;
        }
        a[0][1] = 2;
        EdgeShift::from_matrix(a).unwrap()
    }

    #[test]
    fn eigenvalue_sets() {
        assert_eq!(rational_eigs(&shift("2")).unwrap(), vec![1]);
        assert_eq!(rational_eigs(&six_cycle()).unwrap(), vec![1, 2, 3, 6]);
        assert_eq!(rational_eigs(&shift("0 1 / 1 0")).unwrap(), vec![1, 2]);
    }

    #[test]
    fn partitions() {
        let p = cyclic_partition(&shift("0 1 / 1 0"), 2).unwrap();
        assert_eq!(p.classes, vec![vec![0], vec![1]]);
        let p = cyclic_partition(&shift("1 1 / 1 0"), 1).unwrap();
        assert_eq!(p.classes, vec![vec![0, 1]]);
        assert_eq!(
            cyclic_partition(&shift("1 1 / 1 0"), 2),
            Err(Error::NoSuchEigenvalue(2, 1))
        );
    }

    #[test]
    fn coarsening_matches_direct_partition() {
        let x = six_cycle();
        let six = cyclic_partition(&x, 6).unwrap();
        let three = coarsen_partition(&six, 3).unwrap();
        assert_eq!(three, cyclic_partition(&x, 3).unwrap());
        assert!(three.classes.iter().all(|c| c.len() == 2));
        assert_eq!(coarsen_partition(&six, 6).unwrap(), six);
        assert!(coarsen_partition(&six, 4).is_err());
    }

    #[test]
    fn smale_components() {
        let b = Budgets::default();
        let s = smale(&shift("2"), &b).unwrap();
        assert_eq!((s.period, s.component.adjacency().to_vec()), (1, vec![vec![2]]));
        let s = smale(&shift("0 1 / 1 0"), &b).unwrap();
        assert_eq!(s.component.adjacency(), &[vec![1]]);
        assert_eq!(s.component.entropy().unwrap().entropy.abs() < 1e-12, true);
        let s = smale(&shift("0 2 / 1 0"), &b).unwrap();
        assert_eq!(s.component.adjacency(), &[vec![2]]);
        assert!(s.component.is_mixing());
        assert_eq!(s.paths.len(), 2);
    }

    #[test]
    fn power_transitivity() {
        let x = shift("0 1 / 1 0");
        assert!(!is_power_transitive(&x, 2).unwrap());
        assert!(!is_power_transitive_by_connectivity(&x, 2));
        assert!(is_power_transitive(&x, 3).unwrap());
        assert!(is_power_transitive_by_connectivity(&x, 3));
        assert!(is_power_transitive(&shift("1 1 / 1 0"), 7).unwrap());
    }

    #[test]
    fn power_decompositions() {
        let p2 = shift("0 1 / 1 0");
        assert_eq!(decompose_power(&p2, 6).unwrap(), PowerDecomposition { n: 6, k: 3, l: 2 });
        assert_eq!(decompose_power(&shift("2"), 5).unwrap(), PowerDecomposition { n: 5, k: 5, l: 1 });
        let p4 = shift("0 1 0 0 / 0 0 1 0 / 0 0 0 1 / 1 0 0 0");
        assert_eq!(decompose_power(&p4, 4).unwrap(), PowerDecomposition { n: 4, k: 1, l: 4 });
        assert_eq!(decompose_power(&p2, 4), Err(Error::NoPowerDecomposition(4)));
    }

    #[test]
    fn restricted() {
        let p2 = shift("0 2 / 1 0");
        assert!(restricted_transitivity(&p2, 2, 1).unwrap());
        let p4 = shift("0 2 0 0 / 0 0 1 0 / 0 0 0 1 / 1 0 0 0");
        assert!(!restricted_transitivity(&p4, 2, 2).unwrap());
        assert!(!restricted_transitivity_by_connectivity(&p4, 2, 2).unwrap());
        for n in 1..6 {
            assert!(restricted_transitivity(&p4, 4, n).unwrap());
            assert!(restricted_transitivity_by_connectivity(&p4, 4, n as usize).unwrap());
        }
        assert!(restricted_transitivity(&p4, 3, 1).is_err());
    }
}
