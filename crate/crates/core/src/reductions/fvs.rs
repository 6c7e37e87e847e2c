use std::collections::{BTreeMap, BTreeSet};

use super::{build_bval, ceil_log2, check_source, without_rules, BitEncoding, Emitter, Origin, ReductionOutput, ReductionParams, Witness};
use crate::error::{Error, Result};
use crate::graphs::{incidence_graph, primal_graph, rule_vertex, VertexId};
use crate::program::{normalize_with, AtomId, NormalizeOptions, Program};
use crate::structparams::{is_sparse, verify_fvs};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FvsOptions {
    /// m = max(1, ⌈log₂|S|⌉) instead of ⌈log₂|S|⌉.
    pub floor: bool,
    /// Verify the source preconditions and that S is a sparse FVS.
    pub check: bool,
}

impl Default for FvsOptions {
    fn default() -> Self {
        FvsOptions { floor: true, check: true }
    }
}

/// S'' for the output of `reduce_fvs`, as vertices of its incidence graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FvsWitness {
    /// sat, the values and the bits.
    pub s_prime: BTreeSet<AtomId>,
    /// Index of the rule sat ← s̄at_{r₁}, …
    pub wide_rule: usize,
    pub set: BTreeSet<VertexId>,
    pub bound: usize,
}

struct Atoms {
    /// source id → (x, x̄) in the output
    lit: BTreeMap<AtomId, (AtomId, AtomId)>,
    /// per source rule: (sat_r, s̄at_r)
    sat_r: Vec<(AtomId, AtomId)>,
    /// bits[j][i] = (b_j^i, b̄_j^i)
    bits: Vec<Vec<(AtomId, AtomId)>>,
    /// (v_j, v̄_j)
    val: Vec<(AtomId, AtomId)>,
}

/// Fresh copy per use of sat_r, x and x̄, chained from the original atom.
struct Chains {
    on: bool,
    last: BTreeMap<AtomId, (AtomId, usize)>,
}

impl Chains {
    fn take(&mut self, e: &mut Emitter, a: AtomId) -> AtomId {
        if !self.on {
            return a;
        }
        let (prev, n) = *self.last.get(&a).unwrap_or(&(a, 0));
        let base = format!("{}_c{}", e.out.name(a), n + 1);
        let copy = e.atom(&base);
        e.rule(Origin::CopyChain, &[copy], &[prev], &[]);
        self.last.insert(a, (copy, n + 1));
        copy
    }
}

fn validate(p: &Program, s: &[AtomId], opts: &FvsOptions) -> Result<()> {
    let used: BTreeSet<AtomId> = p.used_atoms().into_iter().collect();
    if let Some(&x) = s.iter().find(|x| !used.contains(x)) {
        return Err(Error::Precondition(format!("S member #{x} does not occur in the program")));
    }
    let set: BTreeSet<AtomId> = s.iter().copied().collect();
    if set.len() != s.len() {
        return Err(Error::Precondition("S repeats a member".into()));
    }
    if opts.check {
        check_source(p)?;
        if !verify_fvs(&primal_graph(p), &set) {
            return Err(Error::Precondition("S is not a feedback vertex set of the primal graph".into()));
        }
        if !is_sparse(p, &set) {
            return Err(Error::Precondition("S is not sparse".into()));
        }
    } else if !p.is_normalized() {
        return Err(Error::Precondition("the input must be normalized".into()));
    }
    Ok(())
}

fn emit(p: &Program, s: &[AtomId], opts: &FvsOptions, chains: bool) -> Result<ReductionOutput> {
    validate(p, s, opts)?;
    let enc = if s.is_empty() {
        BitEncoding::with_bits(Vec::new(), 0)
    } else if opts.floor {
        build_bval(s)?
    } else {
        BitEncoding::with_bits(s.to_vec(), ceil_log2(s.len()))
    };
    let m = enc.m;
    let in_s: BTreeSet<AtomId> = s.iter().copied().collect();
    let used = p.used_atoms();

    let mut e = Emitter::new();
    let mut lit = BTreeMap::new();
    for &x in &used {
        lit.insert(x, (e.out.intern(p.name(x)), 0));
    }
    for &x in &used {
        let bar = e.atom(&format!("{}_bar", p.name(x)));
        lit.get_mut(&x).unwrap().1 = bar;
    }
    let sat_r: Vec<(AtomId, AtomId)> = p
        .rules()
        .iter()
        .map(|r| (e.atom(&format!("sat_{}", r.label)), e.atom(&format!("sat_{}_bar", r.label))))
        .collect();
    let bits: Vec<Vec<(AtomId, AtomId)>> = (1..=3)
        .map(|j| (0..m).map(|i| (e.atom(&format!("b{j}_{i}")), e.atom(&format!("b{j}_{i}_bar")))).collect())
        .collect();
    let val: Vec<(AtomId, AtomId)> = (1..=3).map(|j| (e.atom(&format!("v{j}")), e.atom(&format!("v{j}_bar")))).collect();
    let sat = e.atom("sat");
    let a = Atoms { lit, sat_r, bits, val };
    let mut ch = Chains { on: chains, last: BTreeMap::new() };

    // (1)
    for &(x, xb) in a.lit.values() {
        e.fam(1, &[x, xb], &[], &[]);
    }
    for &(t, f) in &a.sat_r {
        e.fam(1, &[t, f], &[], &[]);
    }
    for &(b, bb) in a.bits.iter().flatten() {
        e.fam(1, &[b, bb], &[], &[]);
    }
    for &(v, vb) in &a.val {
        e.fam(1, &[v, vb], &[], &[]);
    }
    // (2)
    for &(b, bb) in a.bits.iter().flatten() {
        e.fam(2, &[b], &[sat], &[]);
        e.fam(2, &[bb], &[sat], &[]);
    }
    for &(v, vb) in &a.val {
        e.fam(2, &[v], &[sat], &[]);
        e.fam(2, &[vb], &[sat], &[]);
    }
    // (3)
    for &(t, f) in &a.sat_r {
        e.fam(3, &[t], &[sat], &[]);
        e.fam(3, &[f], &[sat], &[]);
    }
    e.fam(3, &[], &[], &[sat]);

    let bval = |x: AtomId, j: usize| -> Vec<(AtomId, AtomId)> {
        // (b, ḃ) pairs of bval(x, j)
        enc.bval(x)
            .unwrap()
            .into_iter()
            .map(|(i, one)| {
                let (b, bb) = a.bits[j - 1][i];
                if one { (b, bb) } else { (bb, b) }
            })
            .collect()
    };

    // (4)
    for (ri, r) in p.rules().iter().enumerate() {
        for x in r.atoms().filter(|x| in_s.contains(x)) {
            let j = p.ord(ri, x)?;
            for (_, flip) in bval(x, j) {
                let sr = ch.take(&mut e, a.sat_r[ri].0);
                e.fam(4, &[sat], &[sr, flip], &[]);
            }
        }
    }
    // (5)
    for &x in s {
        let (xt, xf) = a.lit[&x];
        for j in 1..=3 {
            let code: Vec<AtomId> = bval(x, j).into_iter().map(|(b, _)| b).collect();
            let (v, vb) = a.val[j - 1];
            let xc = ch.take(&mut e, xt);
            e.fam(5, &[sat], &[code.clone(), vec![vb, xc]].concat(), &[]);
            let xfc = ch.take(&mut e, xf);
            e.fam(5, &[sat], &[code, vec![v, xfc]].concat(), &[]);
        }
    }
    // (6), (7), (8)
    for (f, want_s) in [(6u8, true), (7, true), (8, false)] {
        for (ri, r) in p.rules().iter().enumerate() {
            for x in r.atoms() {
                if in_s.contains(&x) != want_s {
                    continue;
                }
                let positive = r.pos.contains(&x);
                let other = match f {
                    6 if !positive => a.val[p.ord(ri, x)? - 1].0,
                    7 if positive => a.val[p.ord(ri, x)? - 1].1,
                    8 if positive => a.lit[&x].1,
                    8 => a.lit[&x].0,
                    _ => continue,
                };
                let sr = ch.take(&mut e, a.sat_r[ri].0);
                e.fam(f, &[sat], &[sr, other], &[]);
            }
        }
    }
    // (9)
    let bars: Vec<AtomId> = a.sat_r.iter().map(|&(_, f)| f).collect();
    e.fam(9, &[sat], &bars, &[]);

    let mut out = ReductionOutput {
        program: e.out,
        projection: used.iter().map(|&x| p.name(x).to_string()).collect(),
        provenance: e.origin,
        params: ReductionParams {
            kind: if chains { "fvs-paths" } else { "fvs" }.into(),
            order: s.iter().map(|&x| p.name(x).to_string()).collect(),
            s: Some(s.len()),
            m: Some(m),
            k: None,
        },
        witness: None,
        td_atoms: None,
    };
    let w = fvs_witness_for_reduced(&out)?;
    let g = incidence_graph(&out.program);
    out.witness = Some(Witness::Fvs {
        set: w.set.iter().map(|&v| vertex_name(&out.program, &g, v)).collect(),
        size: w.set.len(),
        bound: w.bound,
    });
    Ok(out)
}

fn vertex_name(p: &Program, g: &crate::graphs::Graph, v: VertexId) -> String {
    if v < p.num_atoms() { p.name(v).to_string() } else { format!("rule:{}", g.label(v)) }
}

/// R_fvs over the ordered sparse FVS `s`.
pub fn reduce_fvs(p: &Program, s: &[AtomId], opts: &FvsOptions) -> Result<ReductionOutput> {
    emit(p, s, opts, false)
}

/// R_fvs where every use of sat_r in families (4), (6)–(8) and of x, x̄ in family (5) goes through
/// its own copy, chained from the original atom.
pub fn reduce_fvs_almost_paths(p: &Program, s: &[AtomId], opts: &FvsOptions) -> Result<ReductionOutput> {
    emit(p, s, opts, true)
}

/// Builds S'' = S' ∪ {wide rule} for a `reduce_fvs` output and checks it: ℐ minus S'' is acyclic for
/// the output and for its normalization with x, x̄ chained first, and S' is a sparse FVS of the
/// normalized primal graph without the wide rule.
pub fn fvs_witness_for_reduced(out: &ReductionOutput) -> Result<FvsWitness> {
    let p = &out.program;
    let fam2 = out.family_rules(2);
    let s_prime: BTreeSet<AtomId> = fam2.iter().flat_map(|&i| p.rule(i).atoms()).collect();
    let s_prime = if s_prime.is_empty() {
        return Err(Error::Verification("output has no saturation rules".into()));
    } else {
        s_prime
    };
    let wide = match out.family_rules(9).as_slice() {
        [w] => *w,
        _ => return Err(Error::Verification("output must contain exactly one rule of family (9)".into())),
    };
    let m = out.params.m.unwrap_or(0);
    let bound = 6 * m.max(1) + 8;
    let mut set: BTreeSet<VertexId> = s_prime.clone();
    set.insert(rule_vertex(p, wide));

    if set.len() > bound {
        return Err(Error::Verification(format!("|S''| = {} exceeds {bound}", set.len())));
    }
    if !incidence_graph(p).is_acyclic_without(&set) {
        return Err(Error::Verification("incidence graph minus S'' has a cycle".into()));
    }

    let source: BTreeSet<&str> = out.projection.iter().map(String::as_str).collect();
    let priority: Vec<AtomId> = (0..p.num_atoms())
        .filter(|&a| {
            let n = p.name(a);
            source.contains(n) || n.strip_suffix("_bar").is_some_and(|b| source.contains(b))
        })
        .collect();
    let norm = normalize_with(p, &NormalizeOptions { priority, keep: BTreeSet::from([wide]) })?;
    let np = &norm.program;
    let nwide = norm.origin.iter().position(|&o| o == wide).expect("wide rule is kept");
    let mut nset = s_prime.clone();
    nset.insert(rule_vertex(np, nwide));
    if !incidence_graph(np).is_acyclic_without(&nset) {
        return Err(Error::Verification("normalized incidence graph minus S'' has a cycle".into()));
    }
    let rest = without_rules(np, &BTreeSet::from([nwide]));
    if !verify_fvs(&primal_graph(&rest), &s_prime) || !is_sparse(&rest, &s_prime) {
        return Err(Error::Verification("S' is not a sparse FVS of the normalized primal graph".into()));
    }
    Ok(FvsWitness { s_prime, wide_rule: wide, set, bound })
}
