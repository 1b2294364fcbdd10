//! Reports tying the dynamics of an edge shift to the algebra of its
//! automorphism groups.
//!
//! All checks run on finite, radius-bounded pieces of the groups involved.
//! A passing report certifies the property on that piece only.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::codes::{class_permutation_code, enumerate_automorphisms, AutomorphismSet, SlidingBlockCode};
use crate::group::{Elem, FiniteGroup};
use crate::iso::is_isomorphic;
use crate::perm::Permutation;
use crate::sft::{EdgeShift, Sym, Word};
use crate::spectral::{component, cyclic_partition, CyclicPartition, SmaleDecomposition};
use crate::wreath::wreath_group;
use crate::{divisors, gcd, Budgets, Error, Result, SCHEMA_VERSION};

/// One named property with an optional replayable counterexample.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// How many cases were examined.
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check { name, passed: true, cases: 0, counterexample: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok && self.passed {
            self.passed = false;
            self.counterexample = Some(witness());
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitInstance {
    pub matrix_hash: String,
    pub n: usize,
    pub m: usize,
    pub radius: usize,
    pub inv_radius: usize,
    pub component_radius: usize,
    pub component_inv_radius: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiEntry {
    /// Indices into the component automorphism list.
    pub tuple: Vec<usize>,
    pub radius: usize,
    /// Index of the image in the enumerated set, when it lies there.
    pub index: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RhoEntry {
    pub permutation: Permutation,
    pub radius: usize,
    pub index: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WreathDecompositionReport {
    pub schema_version: u32,
    pub instance: SplitInstance,
    pub passed: bool,
    /// `|A|` for the enumerated subgroup `A ≤ Aut(σ^{nm})`.
    pub automorphisms: usize,
    pub kernel: usize,
    pub image: Vec<Permutation>,
    pub component_automorphisms: usize,
    pub tuples_total: u128,
    pub tuples_checked: usize,
    pub checks: Vec<Check>,
    /// Group-order exactness `|A| = |ker π|·|im π|`. It is diagnostic only:
    /// it can fail when `A` is not closed under composition.
    pub exactness: Exactness,
    /// `π` of every element of `A`, by index.
    pub pi_table: Vec<Permutation>,
    pub rho_table: Vec<RhoEntry>,
    pub psi_table: Vec<PsiEntry>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Exactness {
    pub holds: bool,
    /// Size of each fibre of `π`, keyed by permutation in cycle notation.
    pub fibres: BTreeMap<String, usize>,
    /// False when some sampled composition left the enumerated set.
    pub closed_under_composition: bool,
}

/// Parameters of [`verify_split_sequence`].
#[derive(Debug, Clone, Copy)]
pub struct SplitParams {
    pub n: usize,
    pub m: usize,
    pub radius: usize,
    pub inv_radius: usize,
    /// Largest number of `ψ`-tuples checked; beyond it a seeded sample is
    /// drawn.
    pub max_tuples: usize,
    /// Largest number of pairs checked for each homomorphism law.
    pub max_pairs: usize,
    pub seed: u64,
}

impl SplitParams {
    pub fn new(n: usize, m: usize, radius: usize) -> Self {
        SplitParams { n, m, radius, inv_radius: 2 * radius, max_tuples: 2048, max_pairs: 4096, seed: 0 }
    }
}

/// Checks the split exact sequence
/// `1 → Aut(σ^{nm}|X_m)ᵐ → Aut(σ^{nm}) → Sym(m) → 1`
/// on radius-bounded pieces, with the section `ρ` permuting partition
/// classes and `ψ(g)(σⁱx) = σⁱ gᵢ(x)` for `x ∈ X_m`.
pub fn verify_split_sequence(
    x: &EdgeShift,
    params: &SplitParams,
    budgets: &Budgets,
) -> Result<WreathDecompositionReport> {
    let SplitParams { n, m, radius, inv_radius, .. } = *params;
    let period = x.period()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if gcd(n as u64, period) != 1 {
        return Err(Error::InvalidArgument(format!(
            "σ^{n} is not transitive on a shift of period {period}"
        )));
    }
    let part = cyclic_partition(x, m)?;
    let comp = component(x, m, budgets)?;
    let rc = radius.div_ceil(m);
    let rc_inv = inv_radius.div_ceil(m);
    let instance = SplitInstance {
        matrix_hash: x.hash(),
        n,
        m,
        radius,
        inv_radius,
        component_radius: rc,
        component_inv_radius: rc_inv,
    };
    let a = enumerate_automorphisms(x, n * m, radius, inv_radius, budgets)?;
    let b = enumerate_automorphisms(&comp.component, n, rc, rc_inv, budgets)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let doc = |c: &SlidingBlockCode| serde_json::to_value(c.to_document(x)).unwrap_or(Value::Null);
    let cdoc = |c: &SlidingBlockCode| serde_json::to_value(c.to_document(&comp.component)).unwrap_or(Value::Null);

    // ρ
    let perms = Permutation::all(m);
    let rho: Vec<SlidingBlockCode> =
        perms.iter().map(|t| class_permutation_code(x, &part, t)).collect::<Result<_>>()?;
    let rho_of = |t: &Permutation| &rho[perms.binary_search(t).expect("all permutations listed")];
    let mut c = Check::new("pi_rho_identity");
    for (t, code) in perms.iter().zip(&rho) {
        let got = code.partition_action(x, &part);
        c.record(got.as_ref() == Ok(t), || json!({"tau": t, "rho": doc(code)}));
    }
    checks.push(c);
    let mut c = Check::new("rho_homomorphism");
    for s in &perms {
        for t in &perms {
            let lhs = rho_of(s).compose(rho_of(t), x)?;
            c.record(lhs == *rho_of(&s.compose(t)), || json!({"sigma": s, "tau": t}));
        }
    }
    checks.push(c);
    let mut c = Check::new("rho_commutes_with_power");
    for (t, code) in perms.iter().zip(&rho) {
        let len = 2 * code.radius() + n * m + 1;
        c.record(code.commutes_with_power(x, n * m, len)?, || json!({"tau": t}));
    }
    checks.push(c);

    // π on A
    let mut c = Check::new("pi_defined");
    let mut pi_table = Vec::with_capacity(a.len());
    for f in &a.elements {
        match f.partition_action(x, &part) {
            Ok(p) => {
                c.record(true, || Value::Null);
                pi_table.push(p);
            }
            Err(e) => {
                c.record(false, || json!({"code": doc(f), "error": e.to_string()}));
                pi_table.push(Permutation::identity(m));
            }
        }
    }
    checks.push(c);
    let mut c = Check::new("pi_homomorphism");
    let mut left_set = false;
    for (i, j) in sample_pairs(a.len(), a.len(), params.max_pairs, &mut rng) {
        let fg = a.elements[i].compose(&a.elements[j], x)?;
        left_set |= a.index_of(&fg).is_none();
        let ok = fg.partition_action(x, &part).ok() == Some(pi_table[i].compose(&pi_table[j]));
        c.record(ok, || json!({"f": doc(&a.elements[i]), "g": doc(&a.elements[j])}));
    }
    checks.push(c);

    let image: BTreeSet<Permutation> = pi_table.iter().cloned().collect();
    let kernel: Vec<usize> = (0..a.len()).filter(|&i| pi_table[i].is_identity()).collect();
    let rotations = image.iter().filter(|p| !p.is_identity() && **p == Permutation::rotation(m, p.apply(0))).count();
    if m > 1 && rotations == 0 {
        notes.push("no element acts on classes by a nontrivial rotation at this radius".into());
    }

    // ψ⁻¹ on the kernel
    let kit = Psi::new(x, &part, &comp, n)?;
    let mut c = Check::new("kernel_decomposes");
    for &k in &kernel {
        let f = &a.elements[k];
        let inv = &a.inverses[k];
        let ok = (|| -> Result<bool> {
            let (Some(g), Some(h)) = (kit.split(f)?, kit.split(inv)?) else { return Ok(false) };
            let rebuilt = kit.build(&g.iter().collect::<Vec<_>>())? == *f;
            let inverse_parts = g
                .iter()
                .zip(&h)
                .map(|(gi, hi)| Ok(gi.compose(hi, &comp.component)?.is_identity()))
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .all(|v| v);
            let members = g.iter().all(|gi| b.contains(gi));
            Ok(rebuilt && inverse_parts && members)
        })()?;
        c.record(ok, || json!({"code": doc(f)}));
    }
    checks.push(c);

    // ψ on tuples of component automorphisms
    let tuples_total = (b.len() as u128).saturating_pow(m as u32);
    let tuples = sample_tuples(b.len(), m, params.max_tuples, &mut rng);
    if (tuples.len() as u128) < tuples_total {
        notes.push(format!("ψ checked on {} of {} tuples (seed {})", tuples.len(), tuples_total, params.seed));
    }
    let psi: Vec<SlidingBlockCode> = tuples
        .iter()
        .map(|t| kit.build(&t.iter().map(|&i| &b.elements[i]).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let tuple_doc = |t: &[usize]| Value::Array(t.iter().map(|&i| cdoc(&b.elements[i])).collect());

    let mut c = Check::new("psi_lands_in_kernel");
    for (t, f) in tuples.iter().zip(&psi) {
        let inv: Vec<&SlidingBlockCode> = t.iter().map(|&i| &b.inverses[i]).collect();
        let ok = f.partition_action(x, &part).map(|p| p.is_identity()).unwrap_or(false)
            && f.compose(&kit.build(&inv)?, x)?.is_identity()
            && f.commutes_with_power(x, n * m, 2 * f.radius() + n * m + 1)?;
        c.record(ok, || tuple_doc(t));
    }
    checks.push(c);

    let mut c = Check::new("psi_injective");
    let mut seen: HashMap<&SlidingBlockCode, usize> = HashMap::new();
    for (k, f) in psi.iter().enumerate() {
        let prev = seen.insert(f, k);
        c.record(prev.is_none(), || json!({"first": tuple_doc(&tuples[prev.unwrap_or(k)]), "second": tuple_doc(&tuples[k])}));
    }
    checks.push(c);

    let mut c = Check::new("psi_homomorphism");
    for (i, j) in sample_pairs(tuples.len(), tuples.len(), params.max_pairs, &mut rng) {
        let parts: Vec<SlidingBlockCode> = tuples[i]
            .iter()
            .zip(&tuples[j])
            .map(|(&p, &q)| b.elements[p].compose(&b.elements[q], &comp.component))
            .collect::<Result<_>>()?;
        let lhs = psi[i].compose(&psi[j], x)?;
        let rhs = kit.build(&parts.iter().collect::<Vec<_>>())?;
        c.record(lhs == rhs, || json!({"g": tuple_doc(&tuples[i]), "h": tuple_doc(&tuples[j])}));
    }
    checks.push(c);

    // ρ(τ)⁻¹ ψ(g) ρ(τ) = ψ(g_τ) with (g_τ)_i = g_{τ(i)}
    let mut c = Check::new("conjugation_relation");
    for t in &perms {
        let r = rho_of(t);
        let r_inv = rho_of(&t.inverse());
        for (g, f) in tuples.iter().zip(&psi) {
            let lhs = r_inv.compose(&f.compose(r, x)?, x)?;
            let permuted: Vec<&SlidingBlockCode> = (0..m).map(|i| &b.elements[g[t.apply(i)]]).collect();
            c.record(lhs == kit.build(&permuted)?, || json!({"tau": t, "g": tuple_doc(g)}));
        }
    }
    checks.push(c);

    let mut fibres: BTreeMap<String, usize> = BTreeMap::new();
    for p in &pi_table {
        *fibres.entry(p.to_string()).or_insert(0) += 1;
    }
    let exactness = Exactness {
        holds: a.len() == kernel.len() * image.len(),
        fibres,
        closed_under_composition: !left_set,
    };
    if !exactness.holds {
        notes.push(if left_set {
            "fibre sizes differ; the radius-bounded set is not closed under composition".into()
        } else {
            "fibre sizes differ".into()
        });
    }

    let rho_table = perms
        .iter()
        .zip(&rho)
        .map(|(t, r)| RhoEntry { permutation: t.clone(), radius: r.radius(), index: a.index_of(r) })
        .collect();
    let psi_table = tuples
        .iter()
        .zip(&psi)
        .map(|(t, f)| PsiEntry { tuple: t.clone(), radius: f.radius(), index: a.index_of(f) })
        .collect();
    Ok(WreathDecompositionReport {
        schema_version: SCHEMA_VERSION,
        instance,
        passed: checks.iter().all(|c| c.passed),
        automorphisms: a.len(),
        kernel: kernel.len(),
        image: image.into_iter().collect(),
        component_automorphisms: b.len(),
        tuples_total,
        tuples_checked: tuples.len(),
        checks,
        exactness,
        pi_table,
        rho_table,
        psi_table,
        notes,
    })
}

/// All index pairs, or a seeded sample of `limit` of them.
fn sample_pairs(n1: usize, n2: usize, limit: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let total = n1 * n2;
    if total <= limit {
        (0..total).map(|k| (k / n2, k % n2)).collect()
    } else {
        let mut idx = sample(rng, total, limit).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|k| (k / n2, k % n2)).collect()
    }
}

/// All `m`-tuples over `0..b`, or a seeded sample, in lexicographic order.
fn sample_tuples(b: usize, m: usize, limit: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let total = (b as u128).saturating_pow(m as u32);
    let decode = |mut k: u128| {
        let mut t = vec![0; m];
        for slot in t.iter_mut().rev() {
            *slot = (k % b as u128) as usize;
            k /= b as u128;
        }
        t
    };
    if total <= limit as u128 {
        (0..total).map(decode).collect()
    } else if total <= usize::MAX as u128 {
        let mut idx = sample(rng, total as usize, limit).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|k| decode(k as u128)).collect()
    } else {
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        while set.len() < limit {
            set.insert((0..m).map(|_| rand::Rng::gen_range(rng, 0..b)).collect());
        }
        set.into_iter().collect()
    }
}

/// Translation between codes on `X` and tuples of codes on the component
/// `(X_m, σᵐ|X_m)`.
struct Psi<'a> {
    x: &'a EdgeShift,
    part: &'a CyclicPartition,
    comp: &'a SmaleDecomposition,
    path_index: HashMap<&'a [Sym], Sym>,
    n: usize,
}

impl<'a> Psi<'a> {
    fn new(x: &'a EdgeShift, part: &'a CyclicPartition, comp: &'a SmaleDecomposition, n: usize) -> Result<Self> {
        let path_index = comp.paths.iter().enumerate().map(|(e, p)| (p.as_slice(), e as Sym)).collect();
        Ok(Psi { x, part, comp, path_index, n })
    }

    fn block(&self, path: &[Sym]) -> Result<Sym> {
        self.path_index.get(path).copied().ok_or(Error::Inadmissible)
    }

    /// `ψ(g)`: on `σⁱX_m` act as `σⁱ gᵢ σ⁻ⁱ`.
    fn build(&self, g: &[&SlidingBlockCode]) -> Result<SlidingBlockCode> {
        let m = self.part.size;
        let rc = g.iter().map(|c| c.radius()).max().unwrap_or(0);
        let big_r = rc * m + m - 1;
        SlidingBlockCode::try_from_fn(self.x, big_r, self.n * m, |j, w| {
            let class = self.part.class_of_edge(self.x, w[big_r]);
            let i = (class + m - j % m) % m;
            let c = j + i;
            let t = c / m;
            let code = g[i];
            let r = code.radius();
            // C-block s covers window positions s·m − i − j + R onward
            // C-block s starts at window position s·m − i − j + R
            let cword: Word = (0..2 * r + 1)
                .map(|k| {
                    let s = t as i64 - r as i64 + k as i64;
                    let start = (s * m as i64 - i as i64 - j as i64 + big_r as i64) as usize;
                    self.block(&w[start..start + m])
                })
                .collect::<Result<_>>()?;
            let out = code.rule(t % self.n).get(&cword).copied().ok_or(Error::Inadmissible)?;
            Ok(self.comp.paths[out as usize][c % m])
        })
    }

    /// The tuple `g` with `ψ(g) = f`, for `f` fixing every class. `None`
    /// when `f` moves some class.
    fn split(&self, f: &SlidingBlockCode) -> Result<Option<Vec<SlidingBlockCode>>> {
        let m = self.part.size;
        let r = f.radius();
        let rc = r.div_ceil(m);
        let period = f.period();
        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            let code = SlidingBlockCode::try_from_fn(&self.comp.component, rc, self.n, |t, cw| {
                let xw: Word = cw.iter().flat_map(|&e| self.comp.paths[e as usize].iter().copied()).collect();
                let base = (t as i64 - rc as i64) * m as i64;
                let mut path = Vec::with_capacity(m);
                for c in t * m..(t + 1) * m {
                    let lo = (c as i64 - r as i64 - base) as usize;
                    let phase = (c as i64 - i as i64).rem_euclid(period as i64) as usize;
                    let sym = f.rule(phase).get(&xw[lo..lo + 2 * r + 1]).copied().ok_or(Error::Inadmissible)?;
                    path.push(sym);
                }
                self.block(&path)
            });
            match code {
                Ok(c) => out.push(c),
                Err(Error::Inadmissible) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        Ok(Some(out))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientSide {
    /// Size of the enumerated automorphism set.
    pub automorphisms: usize,
    /// Number of cosets found, or `None` when products left the set.
    pub order: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientReport {
    pub schema_version: u32,
    pub matrix_hash: String,
    pub m: usize,
    pub radius: usize,
    pub inv_radius: usize,
    /// `Aut(σ)/⟨σ⟩`.
    pub shift_quotient: QuotientSide,
    /// `Aut(σ)/⟨σᵐ⟩`.
    pub power_quotient: QuotientSide,
    /// `Aut(σᵐ|X_m)/⟨σᵐ|X_m⟩`.
    pub component_quotient: QuotientSide,
    /// `Aut(σ)/⟨σ⟩ ≅ Aut(σᵐ|X_m)/⟨σᵐ|X_m⟩`; `None` when inconclusive.
    pub shift_isomorphic: Option<bool>,
    /// `Aut(σ)/⟨σᵐ⟩ ≅ Aut(σᵐ|X_m)/⟨σᵐ|X_m⟩ × Z/m`; `None` when inconclusive.
    pub power_isomorphic: Option<bool>,
    pub inconclusive: bool,
}

/// Compares the quotients of radius-bounded automorphism sets by the shift
/// subgroups on both sides of the Smale decomposition.
pub fn verify_quotient_isos(
    x: &EdgeShift,
    m: usize,
    radius: usize,
    inv_radius: usize,
    budgets: &Budgets,
) -> Result<QuotientReport> {
    let period = x.period()?;
    if m as u64 != period {
        return Err(Error::InvalidArgument(format!("m = {m} but the period is {period}")));
    }
    let comp = component(x, m, budgets)?;
    let a = enumerate_automorphisms(x, 1, radius, inv_radius, budgets)?;
    let b = enumerate_automorphisms(&comp.component, 1, radius.div_ceil(m), inv_radius.div_ceil(m), budgets)?;
    let q1 = quotient(x, &a, 1)?;
    let qm = quotient(x, &a, m as i64)?;
    let qc = quotient(&comp.component, &b, 1)?;
    let side = |set: &AutomorphismSet, q: &Option<FiniteGroup>| QuotientSide {
        automorphisms: set.len(),
        order: q.as_ref().map(FiniteGroup::order),
    };
    let shift_isomorphic = match (&q1, &qc) {
        (Some(g), Some(h)) => Some(is_isomorphic(g, h, budgets)?.is_some()),
        _ => None,
    };
    let power_isomorphic = match (&qm, &qc) {
        (Some(g), Some(h)) => {
            let target = FiniteGroup::direct_product(h, &FiniteGroup::cyclic(m));
            Some(is_isomorphic(g, &target, budgets)?.is_some())
        }
        _ => None,
    };
    Ok(QuotientReport {
        schema_version: SCHEMA_VERSION,
        matrix_hash: x.hash(),
        m,
        radius,
        inv_radius,
        shift_quotient: side(&a, &q1),
        power_quotient: side(&a, &qm),
        component_quotient: side(&b, &qc),
        inconclusive: shift_isomorphic.is_none() || power_isomorphic.is_none(),
        shift_isomorphic,
        power_isomorphic,
    })
}

/// The quotient of an automorphism set by `⟨σᵏ⟩` as a table group, or
/// `None` when some product of coset representatives falls outside every
/// coset found.
pub fn quotient(x: &EdgeShift, set: &AutomorphismSet, k: i64) -> Result<Option<FiniteGroup>> {
    // index of representative, and its inverse
    let mut reps: Vec<(usize, &SlidingBlockCode)> = Vec::new();
    let same = |f: &SlidingBlockCode, rep_inv: &SlidingBlockCode| -> Result<bool> {
        Ok(matches!(f.compose(rep_inv, x)?.is_shift_power(x)?, Some(t) if t % k == 0))
    };
    let identity = SlidingBlockCode::identity(x);
    let id_idx = match set.index_of(&identity) {
        Some(i) => i,
        None => return Ok(None),
    };
    reps.push((id_idx, &set.inverses[id_idx]));
    for (i, f) in set.elements.iter().enumerate() {
        let mut found = false;
        for &(_, rinv) in &reps {
            if same(f, rinv)? {
                found = true;
                break;
            }
        }
        if !found {
            reps.push((i, &set.inverses[i]));
        }
    }
    let find = |f: &SlidingBlockCode| -> Result<Option<Elem>> {
        for (c, &(_, rinv)) in reps.iter().enumerate() {
            if same(f, rinv)? {
                return Ok(Some(c as Elem));
            }
        }
        Ok(None)
    };
    let mut rows = Vec::with_capacity(reps.len());
    for &(i, _) in &reps {
        let mut row = Vec::with_capacity(reps.len());
        for &(j, _) in &reps {
            let p = set.elements[i].compose(&set.elements[j], x)?;
            match find(&p)? {
                Some(c) => row.push(c),
                None => return Ok(None),
            }
        }
        rows.push(row);
    }
    let generators = (0..reps.len() as Elem).collect();
    Ok(FiniteGroup::from_table(rows, generators).ok())
}

#[derive(Debug, Clone, Serialize)]
pub struct RigidityReport {
    pub schema_version: u32,
    pub g_order: usize,
    pub n: usize,
    pub h_order: usize,
    pub m: usize,
    pub wreath_order_g: u128,
    pub wreath_order_h: u128,
    pub wreaths_isomorphic: bool,
    /// Whether the base groups are isomorphic; computed when `n = m`.
    pub bases_isomorphic: Option<bool>,
    pub violation: bool,
    pub message: String,
}

/// `G ≀ Sym(n) ≅ H ≀ Sym(m)` forces `n = m`, and `G ≅ H` once `n ≥ 4`.
/// A report with `violation` set contradicts that statement.
pub fn check_wreath_rigidity(
    g: &FiniteGroup,
    n: usize,
    h: &FiniteGroup,
    m: usize,
    budgets: &Budgets,
) -> Result<RigidityReport> {
    let order = |base: &FiniteGroup, k: usize| -> u128 {
        (base.order() as u128).saturating_pow(k as u32).saturating_mul((1..=k as u128).product())
    };
    let (og, oh) = (order(g, n), order(h, m));
    let wreaths_isomorphic = if og != oh {
        false
    } else {
        Budgets::check("wreath order", og, budgets.group_order)?;
        let wg = wreath_group(g, n, budgets)?;
        let wh = wreath_group(h, m, budgets)?;
        is_isomorphic(&wg, &wh, budgets)?.is_some()
    };
    let bases_isomorphic = if n == m { Some(is_isomorphic(g, h, budgets)?.is_some()) } else { None };
    let violation = wreaths_isomorphic && (n != m || (n >= 4 && bases_isomorphic == Some(false)));
    let message = match (wreaths_isomorphic, violation) {
        (_, true) => "THEOREM-VIOLATION: isomorphic wreath products contradict rigidity".to_string(),
        (true, false) => "isomorphism found; consistent".to_string(),
        (false, _) => "no isomorphism found; consistent".to_string(),
    };
    Ok(RigidityReport {
        schema_version: SCHEMA_VERSION,
        g_order: g.order(),
        n,
        h_order: h.order(),
        m,
        wreath_order_g: og,
        wreath_order_h: oh,
        wreaths_isomorphic,
        bases_isomorphic,
        violation,
        message,
    })
}

/// Named base groups of order at most 9, excluding the trivial group.
pub fn small_groups() -> Vec<(&'static str, FiniteGroup)> {
    [
        "Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6", "S3", "Z7", "Z8", "Z2xZ4", "Z2xZ2xZ2", "D4", "Q8", "Z9",
        "Z3xZ3",
    ]
    .into_iter()
    .map(|name| (name, FiniteGroup::builtin(name).expect("builtin group")))
    .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub g: String,
    pub n: usize,
    pub h: String,
    pub m: usize,
    pub report: RigidityReport,
}

/// Rigidity checks over all pairs of small base groups and `n, m ∈ 2..=4`
/// with equal wreath orders at most `max_order`, sorted by instance key.
pub fn rigidity_sweep(max_order: u128, include_equal: bool, budgets: &Budgets) -> Result<Vec<SweepEntry>> {
    use rayon::prelude::*;
    let groups = small_groups();
    let order = |g: &FiniteGroup, k: usize| (g.order() as u128).pow(k as u32) * (1..=k as u128).product::<u128>();
    let mut jobs = Vec::new();
    for (gi, (_, g)) in groups.iter().enumerate() {
        for n in 2..=4 {
            for (hi, (_, h)) in groups.iter().enumerate() {
                for m in 2..=4 {
                    let o = order(g, n);
                    let key_ok = (gi, n) <= (hi, m);
                    if key_ok && o <= max_order && o == order(h, m) && (n != m || include_equal) {
                        jobs.push((gi, n, hi, m));
                    }
                }
            }
        }
    }
    let mut out: Vec<SweepEntry> = jobs
        .into_par_iter()
        .map(|(gi, n, hi, m)| {
            let report = check_wreath_rigidity(&groups[gi].1, n, &groups[hi].1, m, budgets)?;
            Ok(SweepEntry { g: groups[gi].0.into(), n, h: groups[hi].0.into(), m, report })
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| (&a.g, a.n, &a.h, a.m).cmp(&(&b.g, b.n, &b.h, b.m)));
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct EigReport {
    pub schema_version: u32,
    pub period_x: u64,
    pub period_y: u64,
    pub eig_x: Vec<u64>,
    pub eig_y: Vec<u64>,
    pub equal: bool,
    pub message: String,
}

/// Compares `Eig(σ_X)` and `Eig(σ_Y)`. Equal periods give equal
/// eigenvalue sets; an isomorphism of stabilized automorphism groups
/// would force equal periods. That hypothesis is not tested here.
pub fn compare_rational_eigs(x: &EdgeShift, y: &EdgeShift) -> Result<EigReport> {
    let (px, py) = (x.period()?, y.period()?);
    let (eig_x, eig_y) = (divisors(px), divisors(py));
    let equal = eig_x == eig_y;
    let message = if equal {
        format!("equal eigenvalue sets; top wreath sizes agree ({px})")
    } else {
        format!(
            "eigenvalue sets differ: divisors of {px} vs divisors of {py}; \
             stabilized automorphism groups with these periods cannot be isomorphic"
        )
    };
    Ok(EigReport { schema_version: SCHEMA_VERSION, period_x: px, period_y: py, eig_x, eig_y, equal, message })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    RationalWithinTolerance,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyRatioReport {
    pub schema_version: u32,
    pub h_x: f64,
    pub h_y: f64,
    pub ratio: f64,
    pub p: u64,
    pub q: u64,
    pub residual: f64,
    pub max_denominator: u64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// `λ_X^q = λ_Y^p` decided exactly, when both Perron roots are integers.
    pub exact: Option<bool>,
}

/// Best rational approximation of `h_X / h_Y` by continued fractions.
pub fn entropy_ratio(
    x: &EdgeShift,
    y: &EdgeShift,
    max_denominator: u64,
    tol: f64,
    budgets: &Budgets,
) -> Result<EntropyRatioReport> {
    if max_denominator == 0 || !(tol >= 1e-12) {
        return Err(Error::InvalidArgument("need max_denominator ≥ 1 and tol ≥ 1e-12".into()));
    }
    let (h_x, lx) = component_entropy(x, budgets)?;
    let (h_y, ly) = component_entropy(y, budgets)?;
    if h_x <= 0.0 || h_y <= 0.0 {
        return Err(Error::ZeroEntropy);
    }
    let ratio = h_x / h_y;
    let convergents = convergents(ratio, max_denominator);
    let (p, q) = convergents
        .iter()
        .copied()
        .find(|&(p, q)| (ratio - p as f64 / q as f64).abs() <= tol)
        .or_else(|| convergents.last().copied())
        .unwrap_or((ratio.round() as u64, 1));
    let residual = (ratio - p as f64 / q as f64).abs();
    let verdict = if residual <= tol { Verdict::RationalWithinTolerance } else { Verdict::Inconclusive };
    let exact = match (integer_root(lx), integer_root(ly)) {
        (Some(a), Some(b)) => Some(factor_power(a, q) == factor_power(b, p)),
        _ => None,
    };
    Ok(EntropyRatioReport {
        schema_version: SCHEMA_VERSION,
        h_x,
        h_y,
        ratio,
        p,
        q,
        residual,
        max_denominator,
        tolerance: tol,
        verdict,
        exact,
    })
}

/// Entropy through the mixing component, cross-checked against the direct
/// value. Returns `(h, λ)`.
fn component_entropy(x: &EdgeShift, budgets: &Budgets) -> Result<(f64, f64)> {
    let direct = x.entropy()?;
    let sm = crate::spectral::smale(x, budgets)?;
    let h_c = sm.component.entropy()?.entropy;
    let h = h_c / sm.period as f64;
    if (h_c - sm.period as f64 * direct.entropy).abs() > 1e-9 {
        return Err(Error::NoConvergence(direct.iterations));
    }
    Ok((h, direct.perron))
}

fn integer_root(lambda: f64) -> Option<u64> {
    let r = lambda.round();
    ((lambda - r).abs() < 1e-9 && r >= 1.0).then_some(r as u64)
}

/// Prime factorisation of `a^e` as `prime → exponent`.
fn factor_power(mut a: u64, e: u64) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    let mut d = 2;
    while d * d <= a {
        while a % d == 0 {
            *out.entry(d).or_insert(0) += e;
            a /= d;
        }
        d += 1;
    }
    if a > 1 {
        *out.entry(a).or_insert(0) += e;
    }
    out
}

/// Continued-fraction convergents with denominator at most `max_q`.
fn convergents(x: f64, max_q: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a > u32::MAX as f64 {
            break;
        }
        let a = a as u64;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_q {
            break;
        }
        out.push((p2, q2));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a as f64;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    out
}
