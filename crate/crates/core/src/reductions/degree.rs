use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graphs::primal_graph;
use crate::program::{AtomId, Program};
use crate::structparams::{annotate, check_td, make_nice, AnnotatedTD, TreeDecomposition};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DegreeScheme {
    /// One copy a_t per bag occurrence, a_t ↔ a_t' along tree edges. Primal degree ≤ 4.
    #[default]
    Paired,
    /// Down and up copies d_t, u_t forming one implication cycle per atom. Primal degree ≤ 4 and
    /// incidence degree ≤ 3.
    Ring,
}

#[derive(Clone, Debug)]
pub struct DegreeOutput {
    pub program: Program,
    /// Decomposition of the output's primal graph over the same tree; every atom occurs in at most two bags.
    pub witness: TreeDecomposition,
    /// Source atom of every output atom.
    pub map: Vec<AtomId>,
    pub annotated: AnnotatedTD,
}

impl DegreeOutput {
    /// (output atom, source atom) pairs.
    pub fn pairs(&self) -> Vec<(AtomId, AtomId)> {
        self.map.iter().copied().enumerate().collect()
    }
}

/// Rewrites `p` so that every atom is replaced by local copies along a nice TD of its primal graph.
pub fn bound_degree(p: &Program, td: &TreeDecomposition, scheme: DegreeScheme) -> Result<DegreeOutput> {
    if !p.is_normalized() {
        return Err(Error::Precondition("the input must be normalized".into()));
    }
    check_td(&primal_graph(p), td).map_err(Error::Precondition)?;
    let nice = if td.is_nice() { td.clone() } else { make_nice(td) };
    let a = annotate(&nice, p)?;
    let t = &a.td;
    let ch = t.children();
    let n = t.len();

    let mut out = Program::new();
    let mut map = Vec::new();
    let mut copy = |out: &mut Program, x: AtomId, tag: &str, node: usize| -> AtomId {
        let name = out.fresh_name(&format!("{}_{tag}{node}", p.name(x)));
        map.push(x);
        out.intern(&name)
    };
    // down[t][x], up[t][x]; up equals down for the paired scheme.
    let mut down = vec![std::collections::BTreeMap::new(); n];
    let mut up = vec![std::collections::BTreeMap::new(); n];
    for node in 0..n {
        for &x in &t.bags[node] {
            match scheme {
                DegreeScheme::Paired => {
                    let c = copy(&mut out, x, "t", node);
                    down[node].insert(x, c);
                    up[node].insert(x, c);
                }
                DegreeScheme::Ring => {
                    let d = copy(&mut out, x, "d", node);
                    let u = copy(&mut out, x, "u", node);
                    down[node].insert(x, d);
                    up[node].insert(x, u);
                }
            }
        }
    }
    for (ri, r) in p.rules().iter().enumerate() {
        let at = &down[a.phi_rule[ri]];
        let m = |v: &[AtomId]| v.iter().map(|x| at[x]).collect::<Vec<_>>();
        out.add_labeled_rule(r.label.clone(), &m(&r.head), &m(&r.pos), &m(&r.neg))?;
    }
    for node in 0..n {
        for &c in &ch[node] {
            for x in t.bags[node].intersection(&t.bags[c]) {
                match scheme {
                    DegreeScheme::Paired => {
                        out.add_rule(&[down[c][x]], &[down[node][x]], &[])?;
                        out.add_rule(&[down[node][x]], &[down[c][x]], &[])?;
                    }
                    DegreeScheme::Ring => {
                        out.add_rule(&[down[c][x]], &[down[node][x]], &[])?;
                        out.add_rule(&[up[node][x]], &[up[c][x]], &[])?;
                    }
                }
            }
        }
    }
    if scheme == DegreeScheme::Ring {
        for node in 0..n {
            for &x in &t.bags[node] {
                if !ch[node].iter().any(|&c| t.bags[c].contains(&x)) {
                    out.add_rule(&[up[node][&x]], &[down[node][&x]], &[])?;
                }
                if !t.parent[node].is_some_and(|q| t.bags[q].contains(&x)) {
                    out.add_rule(&[down[node][&x]], &[up[node][&x]], &[])?;
                }
            }
        }
    }

    let bags: Vec<BTreeSet<AtomId>> = (0..n)
        .map(|node| {
            let mut b: BTreeSet<AtomId> = down[node].values().chain(up[node].values()).copied().collect();
            for &c in &ch[node] {
                for x in t.bags[node].intersection(&t.bags[c]) {
                    b.extend([down[c][x], up[c][x]]);
                }
            }
            b
        })
        .collect();
    let witness = TreeDecomposition { bags, parent: t.parent.clone(), root: t.root };
    check_td(&primal_graph(&out), &witness).map_err(Error::Verification)?;
    Ok(DegreeOutput { program: out, witness, map, annotated: a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::incidence_graph;
    use crate::oracle::{check_mapping, CheckMode, OracleBudget};
    use crate::program::parse_program;
    use crate::structparams::{tree_decomposition, TdStrategy};

    #[test]
    fn star_program() {
        let p = parse_program("s :- a.\ns :- b.\ns :- c.\ns :- d.\ns :- e.\ns :- f.\na | b.\nc | d.\ne | f.").unwrap();
        assert!(primal_graph(&p).max_degree() >= 6);
        let (td, _) = tree_decomposition(&primal_graph(&p), TdStrategy::MinFill);
        for scheme in [DegreeScheme::Paired, DegreeScheme::Ring] {
            let d = bound_degree(&p, &td, scheme).unwrap();
            assert!(primal_graph(&d.program).max_degree() <= 4, "{scheme:?}");
            let rep = check_mapping(&p, &d.program, &d.pairs(), CheckMode::Bijection, &OracleBudget::default()).unwrap();
            assert!(rep.pass, "{rep:?}");
            assert!(d.witness.bags.iter().flatten().all(|&v| d.witness.occurrences(v) <= 2));
        }
        let ring = bound_degree(&p, &td, DegreeScheme::Ring).unwrap();
        let g = incidence_graph(&ring.program);
        assert!((0..ring.program.num_atoms()).all(|v| g.degree(v) <= 3));
    }

    #[test]
    fn path_width() {
        let p = parse_program("a :- not b.\nb :- not a.\nc :- a.\n:- c, b.").unwrap();
        let td = TreeDecomposition::path(vec![[0, 1, 2].into()]);
        let d = bound_degree(&p, &td, DegreeScheme::Paired).unwrap();
        assert!(d.witness.width() <= 2 * td.width() + 1);
        let r = bound_degree(&p, &td, DegreeScheme::Ring).unwrap();
        assert!(r.witness.width() <= 4 * td.width() + 3);
    }

    #[test]
    fn rejects_bad_input() {
        let p = parse_program("a :- b, c, d.\nb.\nc.\nd.").unwrap();
        assert!(bound_degree(&p, &TreeDecomposition::single((0..4).collect()), DegreeScheme::Paired).is_err());
        let q = parse_program("a :- b.\nb.").unwrap();
        assert!(bound_degree(&q, &TreeDecomposition::single([0].into()), DegreeScheme::Paired).is_err());
    }
}
