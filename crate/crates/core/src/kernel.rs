//! Vertex-cover kernels: atoms outside the cover with equal roles are redundant.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{incidence_graph, primal_graph, rule_type, rule_vertex, typed_primal_graphs, RuleType};
use crate::oracle::{is_consistent, OracleBudget};
use crate::program::{AtomId, Program, Rule};
use crate::structparams::{min_vertex_cover, verify_vertex_cover};

/// A rule restricted to the cover: (H ∩ S, B+ ∩ S, B− ∩ S), atoms by name.
pub type Skeleton = (Vec<String>, Vec<String>, Vec<String>);

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Role {
    pub head: BTreeSet<Skeleton>,
    pub pos: BTreeSet<Skeleton>,
    pub neg: BTreeSet<Skeleton>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Removal {
    pub removed: String,
    pub kept: String,
    pub class_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelBounds {
    /// 4^c · Σ_{i<c} C(|S|, i)
    pub stated: u128,
    /// 4^c · C(|S|, c)
    pub original: u128,
    /// |S| + 2^(3N) with N = Σ_{i<c} C(|S|, i)·3^i, the number of possible roles plus the cover.
    pub role_count: Option<u128>,
}

#[derive(Clone, Debug)]
pub struct Kernel {
    pub program: Program,
    pub log: Vec<Removal>,
    /// The cover the roles were computed against (for the incidence kernel, the derived primal cover).
    pub cover: BTreeSet<String>,
    pub bounds: KernelBounds,
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

pub fn kernel_bounds(s: usize, c: usize) -> KernelBounds {
    let (s, c) = (s as u128, c as u128);
    let four_c = 4u128.saturating_pow(c as u32);
    let sum: u128 = (0..c).map(|i| binom(s, i)).fold(0, u128::saturating_add);
    let n: u128 = (0..c).map(|i| binom(s, i).saturating_mul(3u128.saturating_pow(i as u32))).fold(0, u128::saturating_add);
    KernelBounds {
        stated: four_c.saturating_mul(sum),
        original: four_c.saturating_mul(binom(s, c)),
        role_count: (3 * n < 127).then(|| s + (1u128 << (3 * n))),
    }
}

fn skeleton(p: &Program, r: &Rule, s: &BTreeSet<AtomId>) -> Skeleton {
    let keep = |v: &[AtomId]| -> Vec<String> {
        let mut out: Vec<String> = v.iter().filter(|a| s.contains(a)).map(|&a| p.name(a).to_string()).collect();
        out.sort();
        out
    };
    (keep(&r.head), keep(&r.pos), keep(&r.neg))
}

fn role_over(p: &Program, s: &BTreeSet<AtomId>, a: AtomId, rules: impl Iterator<Item = usize>) -> Role {
    let mut role = Role::default();
    for ri in rules {
        let r = p.rule(ri);
        let sk = skeleton(p, r, s);
        if r.head.contains(&a) {
            role.head.insert(sk);
        } else if r.pos.contains(&a) {
            role.pos.insert(sk);
        } else if r.neg.contains(&a) {
            role.neg.insert(sk);
        }
    }
    role
}

/// R(a, Pos, Π) for Pos = H, B+, B−.
pub fn compute_role(p: &Program, s: &BTreeSet<AtomId>, a: AtomId) -> Result<Role> {
    if s.contains(&a) {
        return Err(Error::Precondition(format!("{} is in the cover", p.name(a))));
    }
    Ok(role_over(p, s, a, (0..p.num_rules()).filter(|&i| p.rule(i).contains(a))))
}

fn check_sizes(p: &Program, c: usize) -> Result<()> {
    if let Some(r) = p.rules().iter().find(|r| r.size() > c) {
        return Err(Error::Precondition(format!("rule {} has {} atoms, more than c = {c}", r.label, r.size())));
    }
    Ok(())
}

/// Program over `keep` only: rules mentioning any other atom are dropped.
fn restrict(p: &Program, keep: &BTreeSet<AtomId>) -> Program {
    let mut out = Program::new();
    for &a in keep {
        out.intern(p.name(a));
    }
    let map = |v: &[AtomId]| -> Vec<AtomId> { v.iter().map(|&a| out.atom_id(p.name(a)).unwrap()).collect() };
    let mut rules = Vec::new();
    for r in p.rules() {
        if r.atoms().all(|a| keep.contains(&a)) {
            rules.push((r.label.clone(), map(&r.head), map(&r.pos), map(&r.neg)));
        }
    }
    for (label, h, b, n) in rules {
        out.add_labeled_rule(label, &h, &b, &n).expect("restricted rule is valid");
    }
    out
}

fn names(p: &Program, s: &BTreeSet<AtomId>) -> BTreeSet<String> {
    s.iter().map(|&a| p.name(a).to_string()).collect()
}

/// Keeps the least atom of every role class.
pub fn kernelize_primal(p: &Program, s: &BTreeSet<AtomId>, c: usize) -> Result<Kernel> {
    check_sizes(p, c)?;
    if !verify_vertex_cover(&primal_graph(p), s) {
        return Err(Error::Precondition("S is not a vertex cover of the primal graph".into()));
    }
    let mut classes: BTreeMap<Role, Vec<AtomId>> = BTreeMap::new();
    for a in (0..p.num_atoms()).filter(|a| !s.contains(a)) {
        classes.entry(compute_role(p, s, a)?).or_default().push(a);
    }
    let mut keep = s.clone();
    let mut log = Vec::new();
    for members in classes.values() {
        keep.insert(members[0]);
        for &b in &members[1..] {
            log.push(Removal { removed: p.name(b).into(), kept: p.name(members[0]).into(), class_size: members.len() });
        }
    }
    log.sort_by(|x, y| x.removed.cmp(&y.removed));
    Ok(Kernel { program: restrict(p, &keep), log, cover: names(p, s), bounds: kernel_bounds(s.len(), c) })
}

/// Shape of the type-1/2 rules joining a gadget (first, second): bit 0 first ← ¬second,
/// bit 1 second ← ¬first, bit 2 first ∨ second.
fn link_shape(links: &[&Rule], first: AtomId) -> u8 {
    let mut shape = 0;
    for r in links {
        shape |= match rule_type(r) {
            RuleType::Type1 if r.head[0] == first => 1,
            RuleType::Type1 => 2,
            _ => 4,
        };
    }
    shape
}

fn swap_shape(shape: u8) -> u8 {
    (shape & 4) | (shape & 1) << 1 | (shape & 2) >> 1
}

/// Compound-role kernel: S covers the type-0 primal graph, and pairs of non-cover atoms joined by
/// type-1/2 rules are deduplicated as gadgets, four per class.
pub fn kernelize_extended(p: &Program, s: &BTreeSet<AtomId>, c: usize) -> Result<Kernel> {
    check_sizes(p, c)?;
    let (g0, _, _) = typed_primal_graphs(p);
    if !verify_vertex_cover(&g0, s) {
        return Err(Error::Precondition("S is not a vertex cover of the type-0 primal graph".into()));
    }
    let mut partner: Vec<Option<AtomId>> = vec![None; p.num_atoms()];
    let mut links: BTreeMap<(AtomId, AtomId), Vec<usize>> = BTreeMap::new();
    for (i, r) in p.rules().iter().enumerate() {
        if rule_type(r) == RuleType::Type0 {
            continue;
        }
        let at: Vec<AtomId> = r.atoms().collect();
        let (x, y) = (at[0].min(at[1]), at[0].max(at[1]));
        if s.contains(&x) || s.contains(&y) {
            continue;
        }
        for (u, v) in [(x, y), (y, x)] {
            match partner[u] {
                Some(w) if w != v => {
                    return Err(Error::Precondition(format!(
                        "{} has two type-1/2 neighbours outside the cover ({} and {})",
                        p.name(u),
                        p.name(w),
                        p.name(v)
                    )))
                }
                _ => partner[u] = Some(v),
            }
        }
        links.entry((x, y)).or_default().push(i);
    }

    let own_role = |a: AtomId| -> Role {
        let linked: BTreeSet<usize> = partner[a]
            .map(|b| links[&(a.min(b), a.max(b))].iter().copied().collect())
            .unwrap_or_default();
        role_over(p, s, a, (0..p.num_rules()).filter(|i| !linked.contains(i) && p.rule(*i).contains(a)))
    };

    let mut keep = s.clone();
    let mut log = Vec::new();
    let mut singles: BTreeMap<Role, Vec<AtomId>> = BTreeMap::new();
    let mut gadgets: BTreeMap<(Role, Role, u8), Vec<(AtomId, AtomId)>> = BTreeMap::new();
    for a in (0..p.num_atoms()).filter(|a| !s.contains(a)) {
        match partner[a] {
            None => singles.entry(own_role(a)).or_default().push(a),
            Some(b) if a < b => {
                let rules: Vec<&Rule> = links[&(a, b)].iter().map(|&i| p.rule(i)).collect();
                let fwd = (own_role(a), own_role(b), link_shape(&rules, a));
                let bwd = (fwd.1.clone(), fwd.0.clone(), swap_shape(fwd.2));
                let (key, pair) = if bwd < fwd { (bwd, (b, a)) } else { (fwd, (a, b)) };
                gadgets.entry(key).or_default().push(pair);
            }
            Some(_) => {}
        }
    }
    for members in singles.values() {
        keep.insert(members[0]);
        for &b in &members[1..] {
            log.push(Removal { removed: p.name(b).into(), kept: p.name(members[0]).into(), class_size: members.len() });
        }
    }
    for members in gadgets.values() {
        for &(a, b) in members.iter().take(4) {
            keep.insert(a);
            keep.insert(b);
        }
        for &(a, b) in members.iter().skip(4) {
            let (ka, kb) = members[0];
            log.push(Removal { removed: p.name(a).into(), kept: p.name(ka).into(), class_size: members.len() });
            log.push(Removal { removed: p.name(b).into(), kept: p.name(kb).into(), class_size: members.len() });
        }
    }
    log.sort_by(|x, y| x.removed.cmp(&y.removed));
    Ok(Kernel { program: restrict(p, &keep), log, cover: names(p, s), bounds: kernel_bounds(s.len(), c) })
}

/// Π_I: every rule r becomes `H_r ← aux_r` and `aux_r ← B+_r, not B−_r`.
pub fn split_rules(p: &Program) -> Program {
    let mut out = Program::new();
    for n in p.names() {
        out.intern(n);
    }
    for r in p.rules() {
        let aux = out.intern(&out.fresh_name(&format!("aux_{}", r.label)));
        out.add_rule(&r.head, &[aux], &[]).expect("split head rule is valid");
        out.add_rule(&[aux], &r.pos, &r.neg).expect("split body rule is valid");
    }
    out
}

/// S' = (S ∩ at(Π)) ∪ ⋃_{r ∈ S ∩ Π} at(r), with incidence vertex ids as in [`incidence_graph`].
pub fn derived_primal_cover(p: &Program, s: &BTreeSet<usize>) -> BTreeSet<AtomId> {
    let n = p.num_atoms();
    let mut out: BTreeSet<AtomId> = s.iter().copied().filter(|&v| v < n).collect();
    for &v in s.iter().filter(|&&v| v >= n) {
        out.extend(p.rule(v - n).atoms());
    }
    out
}

/// Kernel from a vertex cover of the incidence graph (atom ids, then `num_atoms + rule index`).
pub fn kernelize_incidence(p: &Program, s: &BTreeSet<usize>, c: usize) -> Result<Kernel> {
    check_sizes(p, c)?;
    if !verify_vertex_cover(&incidence_graph(p), s) {
        return Err(Error::Precondition("S is not a vertex cover of the incidence graph".into()));
    }
    let split = split_rules(p);
    // Atom ids of p are preserved in the split program.
    let cover = derived_primal_cover(p, s);
    kernelize_primal(&split, &cover, c + 1)
}

/// Incidence vertex id of rule `label`, for building covers by name.
pub fn incidence_rule_vertex(p: &Program, label: &str) -> Option<usize> {
    p.rule_index(label).map(|i| rule_vertex(p, i))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VcDecision {
    pub consistent: bool,
    pub cover_size: usize,
    pub kernel_atoms: usize,
}

/// Minimum primal vertex cover, primal kernel, then exhaustive consistency on the kernel.
pub fn decide_consistency_vc(p: &Program, c: usize, budget: &OracleBudget) -> Result<VcDecision> {
    check_sizes(p, c)?;
    let cover = min_vertex_cover(&primal_graph(p), None).expect("unbounded search finds a cover");
    let k = kernelize_primal(p, &cover, c)?;
    let n = k.program.num_atoms();
    if n > budget.max_atoms {
        return Err(Error::Budget(format!("kernel has {n} atoms, enumeration cap is {}", budget.max_atoms)));
    }
    let naive = OracleBudget { search_atoms: 0, ..budget.clone() };
    Ok(VcDecision { consistent: is_consistent(&k.program, &naive)?, cover_size: cover.len(), kernel_atoms: n })
}
