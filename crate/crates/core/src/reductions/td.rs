use std::collections::{BTreeMap, BTreeSet};

use super::{ceil_log2, check_source, witness_from_td, Emitter, Origin, ReductionOutput, ReductionParams};
use crate::error::{Error, Result};
use crate::graphs::primal_graph;
use crate::program::{normalize_with, AtomId, NormalizeOptions, Program};
use crate::structparams::{check_td, verify_annotated, verify_pd, AnnotatedTD, PathDecomposition, TreeDecomposition};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TdMode {
    /// Bits propagate both ways between neighbouring bags and every node keeps one unused code.
    #[default]
    Sound,
    /// The rules exactly as in the construction: m_t = max(1, ⌈log₂|χ(t)|⌉), bits propagate downwards only.
    Literal,
}

/// Output atoms of an R_td run, indexed by node, pointer and bit.
#[derive(Clone, Debug, Default)]
pub struct TdAtoms {
    /// (x, x̄) per source atom id; `None` for atoms outside at(Π).
    pub lit: Vec<Option<(AtomId, AtomId)>>,
    pub sat_r: Vec<(AtomId, AtomId)>,
    /// bits[t][j][i] = (b, b̄)
    pub bits: Vec<[Vec<(AtomId, AtomId)>; 3]>,
    pub vals: Vec<[(AtomId, AtomId); 3]>,
    pub sat_t: Vec<AtomId>,
    /// sat'_t of the localized variant; empty otherwise.
    pub local: Vec<AtomId>,
}

impl TdAtoms {
    /// Bits and values of pointer j at node t.
    fn pointer(&self, t: usize, j: usize) -> impl Iterator<Item = AtomId> + '_ {
        let (v, vb) = self.vals[t][j];
        self.bits[t][j].iter().flat_map(|&(b, bb)| [b, bb]).chain([v, vb])
    }

    fn items(&self, a: &AnnotatedTD, t: usize) -> Vec<AtomId> {
        let (atoms, rules) = a.assigned(t);
        let mut out: Vec<AtomId> = atoms.iter().filter_map(|&x| self.lit.get(x).copied().flatten()).flat_map(|(x, xb)| [x, xb]).collect();
        out.extend(rules.iter().flat_map(|&r| [self.sat_r[r].0, self.sat_r[r].1]));
        out
    }
}

#[derive(Clone, Debug)]
pub struct TdWitness {
    /// Normalized output program the decomposition is for.
    pub normalized: Program,
    pub td: TreeDecomposition,
    pub width: usize,
    pub bound: usize,
}

fn bits_for(mode: TdMode, bag_len: usize) -> usize {
    match mode {
        TdMode::Sound => ceil_log2(bag_len + 1),
        TdMode::Literal => ceil_log2(bag_len).max(1),
    }
}

fn emit(p: &Program, a: &AnnotatedTD, mode: TdMode, localized: bool) -> Result<ReductionOutput> {
    check_source(p)?;
    verify_annotated(p, a).map_err(Error::Precondition)?;
    let td = &a.td;
    let n = td.len();
    let ch = td.children();
    let members: Vec<Vec<AtomId>> = td.bags.iter().map(|b| b.iter().copied().collect()).collect();
    let m: Vec<usize> = members.iter().map(|b| bits_for(mode, b.len())).collect();

    let mut e = Emitter::new();
    let used = p.used_atoms();
    let mut lit = vec![None; p.num_atoms()];
    for &x in &used {
        lit[x] = Some((e.out.intern(p.name(x)), 0));
    }
    for &x in &used {
        let bar = e.atom(&format!("{}_bar", p.name(x)));
        lit[x] = lit[x].map(|(t, _)| (t, bar));
    }
    let sat_r: Vec<(AtomId, AtomId)> = p
        .rules()
        .iter()
        .map(|r| (e.atom(&format!("sat_{}", r.label)), e.atom(&format!("sat_{}_bar", r.label))))
        .collect();
    let mut bits = Vec::with_capacity(n);
    let mut vals = Vec::with_capacity(n);
    for t in 0..n {
        let pb: [Vec<(AtomId, AtomId)>; 3] = std::array::from_fn(|j| {
            (0..m[t]).map(|i| (e.atom(&format!("t{t}_b{}_{i}", j + 1)), e.atom(&format!("t{t}_b{}_{i}_bar", j + 1)))).collect()
        });
        let pv: [(AtomId, AtomId); 3] = std::array::from_fn(|j| (e.atom(&format!("t{t}_v{}", j + 1)), e.atom(&format!("t{t}_v{}_bar", j + 1))));
        bits.push(pb);
        vals.push(pv);
    }
    let sat_t: Vec<AtomId> = (0..n).map(|t| e.atom(&format!("t{t}_sat"))).collect();
    let root_sat = sat_t[td.root];
    let local: Vec<AtomId> = if localized {
        (0..n).map(|t| if t == td.root { root_sat } else { e.atom(&format!("t{t}_satl")) }).collect()
    } else {
        Vec::new()
    };
    let at = TdAtoms { lit, sat_r, bits, vals, sat_t, local };
    // Head of the checking rules placed at node t.
    let top = |t: usize| if localized { at.local[t] } else { root_sat };
    let phi_rule = &a.phi_rule;

    // (b, ḃ) pairs of bval(x, t, j).
    let bval = |x: AtomId, t: usize, j: usize| -> Vec<(AtomId, AtomId)> {
        let code = members[t].iter().position(|&y| y == x).expect("atom is in the bag");
        at.bits[t][j - 1]
            .iter()
            .enumerate()
            .map(|(i, &(b, bb))| if code >> i & 1 == 1 { (b, bb) } else { (bb, b) })
            .collect()
    };

    // (10)
    for &(x, xb) in at.lit.iter().flatten() {
        e.fam(10, &[x, xb], &[], &[]);
    }
    for &(s, sb) in &at.sat_r {
        e.fam(10, &[s, sb], &[], &[]);
    }
    for t in 0..n {
        for &(b, bb) in at.bits[t].iter().flatten() {
            e.fam(10, &[b, bb], &[], &[]);
        }
        for &(v, vb) in &at.vals[t] {
            e.fam(10, &[v, vb], &[], &[]);
        }
    }
    // (11)
    for t in 0..n {
        for &(b, bb) in at.bits[t].iter().flatten() {
            e.fam(11, &[b], &[top(t)], &[]);
            e.fam(11, &[bb], &[top(t)], &[]);
        }
    }
    e.fam(11, &[], &[], &[root_sat]);
    // (12)
    for t in 0..n {
        for &(v, vb) in &at.vals[t] {
            e.fam(12, &[v], &[top(t)], &[]);
            e.fam(12, &[vb], &[top(t)], &[]);
        }
    }
    for (ri, &(s, sb)) in at.sat_r.iter().enumerate() {
        e.fam(12, &[s], &[top(phi_rule[ri])], &[]);
        e.fam(12, &[sb], &[top(phi_rule[ri])], &[]);
    }
    // (13)
    for (ri, r) in p.rules().iter().enumerate() {
        let t = phi_rule[ri];
        for x in r.atoms() {
            for (_, flip) in bval(x, t, p.ord(ri, x)?) {
                e.fam(13, &[top(t)], &[at.sat_r[ri].0, flip], &[]);
            }
        }
    }
    // (14), (15)
    for &x in &used {
        let t = a.phi_atom[x];
        let (xt, xf) = at.lit[x].unwrap();
        for j in 1..=3 {
            let code: Vec<AtomId> = bval(x, t, j).into_iter().map(|(b, _)| b).collect();
            let (v, vb) = at.vals[t][j - 1];
            e.fam(14, &[top(t)], &[code.clone(), vec![vb, xt]].concat(), &[]);
            e.fam(15, &[top(t)], &[code, vec![v, xf]].concat(), &[]);
        }
    }
    // (16)
    for t in 0..n {
        for &c in &ch[t] {
            let shared: Vec<AtomId> = members[t].iter().copied().filter(|x| td.bags[c].contains(x)).collect();
            if shared.is_empty() {
                continue;
            }
            for j in 1..=3 {
                for &x in &shared {
                    let directions: &[(usize, usize)] = match mode {
                        TdMode::Sound => &[(t, c), (c, t)],
                        TdMode::Literal => &[(t, c)],
                    };
                    for &(from, to) in directions {
                        let code: Vec<AtomId> = bval(x, from, j).into_iter().map(|(b, _)| b).collect();
                        for (_, flip) in bval(x, to, j) {
                            e.fam(16, &[top(t)], &[code.clone(), vec![flip]].concat(), &[]);
                        }
                    }
                }
                let (v, vb) = at.vals[t][j - 1];
                let (w, wb) = at.vals[c][j - 1];
                e.fam(16, &[top(t)], &[vb, w], &[]);
                e.fam(16, &[top(t)], &[v, wb], &[]);
            }
        }
    }
    // (17), (18)
    for (f, want_pos) in [(17u8, false), (18, true)] {
        for (ri, r) in p.rules().iter().enumerate() {
            let t = phi_rule[ri];
            for x in r.atoms() {
                if r.pos.contains(&x) != want_pos {
                    continue;
                }
                let (v, vb) = at.vals[t][p.ord(ri, x)? - 1];
                e.fam(f, &[top(t)], &[at.sat_r[ri].0, if want_pos { vb } else { v }], &[]);
            }
        }
    }
    // (19)
    for t in 0..n {
        let mut body: Vec<AtomId> = ch[t].iter().map(|&c| at.sat_t[c]).collect();
        body.extend((0..p.num_rules()).filter(|&r| phi_rule[r] == t).map(|r| at.sat_r[r].1));
        e.fam(19, &[at.sat_t[t]], &body, &[]);
    }
    if localized {
        for t in 0..n {
            for &c in &ch[t] {
                e.rule(Origin::LocalSat, &[at.local[c]], &[at.local[t]], &[]);
                e.rule(Origin::LocalSat, &[at.local[t]], &[at.local[c]], &[]);
            }
        }
    }

    let width = td.width();
    let out = ReductionOutput {
        program: e.out,
        projection: used.iter().map(|&x| p.name(x).to_string()).collect(),
        provenance: e.origin,
        params: ReductionParams {
            kind: if localized { "td-local" } else { "td" }.into(),
            order: Vec::new(),
            s: None,
            m: m.iter().copied().max(),
            k: Some(width),
        },
        witness: None,
        td_atoms: Some(at),
    };
    Ok(out)
}

fn attach_witness(mut out: ReductionOutput, a: &AnnotatedTD) -> Result<ReductionOutput> {
    let w = td_witness_for_reduced(&out, a)?;
    out.witness = Some(witness_from_td(&w.normalized, &w.td, w.bound, true));
    Ok(out)
}

/// R_td guided by an annotated nice TD of the primal graph.
pub fn reduce_td(p: &Program, a: &AnnotatedTD, mode: TdMode) -> Result<ReductionOutput> {
    attach_witness(emit(p, a, mode, false)?, a)
}

/// R_td with a copy sat'_t per node as the head of the checking rules at t, linked along the tree.
pub fn reduce_td_localized(p: &Program, a: &AnnotatedTD, mode: TdMode) -> Result<ReductionOutput> {
    attach_witness(emit(p, a, mode, true)?, a)
}

/// Tree decomposition of the normalized output: a bag per node with its own atoms, three bags per
/// tree edge moving the pointers across one at a time, and a pendant bag per split rule.
pub fn td_witness_for_reduced(out: &ReductionOutput, a: &AnnotatedTD) -> Result<TdWitness> {
    let at = out.td_atoms.as_ref().ok_or_else(|| Error::Precondition("output was not produced by R_td".into()))?;
    let td = &a.td;
    if at.sat_t.len() != td.len() {
        return Err(Error::Precondition("decomposition does not match the output".into()));
    }
    let ch = td.children();
    let root_sat = at.sat_t[td.root];
    let mut bags: Vec<BTreeSet<AtomId>> = Vec::new();
    let mut parent: Vec<Option<usize>> = Vec::new();
    let mut node = vec![0usize; td.len()];

    let mut stack = vec![(td.root, None::<usize>)];
    while let Some((t, up)) = stack.pop() {
        let mut own: BTreeSet<AtomId> = (0..3).flat_map(|j| at.pointer(t, j)).collect();
        own.extend([root_sat, at.sat_t[t]]);
        own.extend(ch[t].iter().map(|&c| at.sat_t[c]));
        own.extend(at.items(a, t));
        if !at.local.is_empty() {
            own.insert(at.local[t]);
            own.extend(ch[t].iter().map(|&c| at.local[c]));
        }
        bags.push(own);
        parent.push(up);
        node[t] = bags.len() - 1;
        for &c in &ch[t] {
            let mut prev = node[t];
            for j in 0..3 {
                let mut e: BTreeSet<AtomId> = (j..3).flat_map(|i| at.pointer(t, i)).chain((0..=j).flat_map(|i| at.pointer(c, i))).collect();
                e.extend([root_sat, at.sat_t[c]]);
                if !at.local.is_empty() {
                    e.extend([at.local[t], at.local[c]]);
                }
                bags.push(e);
                parent.push(Some(prev));
                prev = bags.len() - 1;
            }
            stack.push((c, Some(prev)));
        }
    }

    let norm = normalize_with(&out.program, &NormalizeOptions::default())?;
    let np = &norm.program;
    let base = out.program.num_atoms();
    let mut aux: BTreeMap<usize, BTreeSet<AtomId>> = BTreeMap::new();
    for (i, r) in np.rules().iter().enumerate() {
        let extra: Vec<AtomId> = r.atoms().filter(|&x| x >= base).collect();
        if !extra.is_empty() {
            aux.entry(norm.origin[i]).or_default().extend(extra);
        }
    }
    for (orig, extra) in aux {
        let atoms: BTreeSet<AtomId> = out.program.rule(orig).atoms().collect();
        let host = bags
            .iter()
            .position(|b| atoms.is_subset(b))
            .ok_or_else(|| Error::Verification(format!("no bag holds rule {}", out.program.rule(orig).label)))?;
        bags.push(atoms.into_iter().chain(extra).collect());
        parent.push(Some(host));
    }

    let root = node[td.root];
    let wtd = TreeDecomposition { bags, parent, root };
    check_td(&primal_graph(np), &wtd).map_err(Error::Verification)?;
    let width = wtd.width();
    let bound = 20 * ceil_log2(td.width()).max(1) + 14;
    if width > bound {
        return Err(Error::Verification(format!("witness width {width} exceeds {bound}")));
    }
    Ok(TdWitness { normalized: norm.program, td: wtd, width, bound })
}

/// Path decomposition of the primal graph of a `reduce_td_localized` output over a path-shaped TD,
/// with every atom in at most two bags.
pub fn localized_pd_witness(out: &ReductionOutput, a: &AnnotatedTD) -> Result<PathDecomposition> {
    let at = out.td_atoms.as_ref().ok_or_else(|| Error::Precondition("output was not produced by R_td".into()))?;
    if at.local.is_empty() {
        return Err(Error::Precondition("output was not produced by the localized variant".into()));
    }
    let td = &a.td;
    let ch = td.children();
    let mut path = vec![td.root];
    while let Some(&t) = path.last() {
        match ch[t].as_slice() {
            [] => break,
            [c] => path.push(*c),
            _ => return Err(Error::Precondition("decomposition is not a path".into())),
        }
    }
    let local_atoms = |t: usize| -> BTreeSet<AtomId> {
        let mut s: BTreeSet<AtomId> = (0..3).flat_map(|j| at.pointer(t, j)).collect();
        s.extend([at.local[t], at.sat_t[t]]);
        s
    };
    let mut bags: Vec<BTreeSet<AtomId>> = if path.len() == 1 {
        vec![local_atoms(path[0])]
    } else {
        path.windows(2).map(|w| local_atoms(w[0]).union(&local_atoms(w[1])).copied().collect()).collect()
    };
    for (i, &t) in path.iter().enumerate() {
        let slot = i.min(bags.len() - 1);
        bags[slot].extend(at.items(a, t));
    }
    let pd = PathDecomposition { bags };
    if !pd.two_bag_restricted() {
        return Err(Error::Verification("an atom occurs in more than two bags".into()));
    }
    if !verify_pd(&primal_graph(&out.program), &pd) {
        return Err(Error::Verification("bags do not form a path decomposition of the output".into()));
    }
    Ok(pd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{check_projection, CheckMode, OracleBudget};
    use crate::program::parse_program;
    use crate::structparams::{annotate, make_nice, tree_decomposition, TdStrategy};

    const PIM: &str = "a :- not b.\nb :- not a.\n:- a, b.";

    fn annotated(p: &Program) -> AnnotatedTD {
        let (td, _) = tree_decomposition(&primal_graph(p), TdStrategy::MinFill);
        annotate(&make_nice(&td), p).unwrap()
    }

    fn two_node(p: &Program) -> AnnotatedTD {
        let all: BTreeSet<AtomId> = (0..p.num_atoms()).collect();
        let td = TreeDecomposition { bags: vec![all.clone(), all], parent: vec![None, Some(0)], root: 0 };
        annotate(&td, p).unwrap()
    }

    fn passes(p: &Program, out: &ReductionOutput) -> bool {
        let rep = check_projection(p, &out.program, &out.projection, CheckMode::Set, &OracleBudget::default()).unwrap();
        rep.pass
    }

    #[test]
    fn micro_program_sound() {
        let p = parse_program(PIM).unwrap();
        for a in [annotated(&p), two_node(&p)] {
            let out = reduce_td(&p, &a, TdMode::Sound).unwrap();
            assert!(passes(&p, &out));
            assert_eq!(out.provenance.len(), out.program.num_rules());
            let w = td_witness_for_reduced(&out, &a).unwrap();
            assert!(w.width <= w.bound);
            assert_eq!(w.bound, 34);
        }
    }

    #[test]
    fn node_atom_counts() {
        let p = parse_program(PIM).unwrap();
        let a = annotated(&p);
        let out = reduce_td(&p, &a, TdMode::Literal).unwrap();
        for t in 0..a.td.len() {
            let prefix = format!("t{t}_");
            let count = out.program.names().iter().filter(|n| n.starts_with(&prefix)).count();
            let m = ceil_log2(a.td.bags[t].len()).max(1);
            assert_eq!(count, 6 * m + 6 + 1, "node {t}");
        }
    }

    #[test]
    fn localized_variant() {
        let p = parse_program(PIM).unwrap();
        let a = two_node(&p);
        let out = reduce_td_localized(&p, &a, TdMode::Sound).unwrap();
        assert!(passes(&p, &out));
        let pd = localized_pd_witness(&out, &a).unwrap();
        assert!(pd.two_bag_restricted());
        assert!(localized_pd_witness(&reduce_td(&p, &a, TdMode::Sound).unwrap(), &a).is_err());
    }

    #[test]
    fn literal_mode_counterexample() {
        // Some atom sits at a node above a rule using it, which downward-only propagation cannot reach.
        let p = parse_program("a :- not b.\nb :- not a.\nc :- a.\n:- c, b.").unwrap();
        let a = annotated(&p);
        assert!(passes(&p, &reduce_td(&p, &a, TdMode::Sound).unwrap()));
        let literal = [annotated(&p), two_node(&p)].iter().map(|a| passes(&p, &reduce_td(&p, a, TdMode::Literal).unwrap())).collect::<Vec<_>>();
        assert!(literal.contains(&false), "{literal:?}");
    }
}
