use std::collections::BTreeSet;

use super::{AtomId, Program};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct NormalizeOptions {
    /// Atoms chained before all other body literals, in this order.
    pub priority: Vec<AtomId>,
    /// Indices of rules copied verbatim regardless of size.
    pub keep: BTreeSet<usize>,
}

#[derive(Clone, Debug)]
pub struct Normalized {
    pub program: Program,
    /// Atoms of the input program; answer sets are compared after projecting onto these.
    pub projection: Vec<AtomId>,
    /// For every output rule, the index of the input rule it was derived from.
    pub origin: Vec<usize>,
}

pub fn normalize(p: &Program) -> Result<(Program, Vec<AtomId>)> {
    let n = normalize_with(p, &NormalizeOptions::default())?;
    Ok((n.program, n.projection))
}

/// Body chaining: while a rule has more than three atoms, its first two body
/// literals are replaced by a fresh atom defined by a two-literal rule.
pub fn normalize_with(p: &Program, opts: &NormalizeOptions) -> Result<Normalized> {
    let mut out = Program::new();
    for name in p.names() {
        out.intern(name);
    }
    let mut origin = Vec::new();
    let mut next_aux = 1usize;

    for (ri, r) in p.rules().iter().enumerate() {
        if r.size() <= 3 || opts.keep.contains(&ri) {
            out.add_rule(&r.head, &r.pos, &r.neg)?;
            origin.push(ri);
            continue;
        }
        if r.head.len() >= 2 {
            return Err(Error::NotNormalizable {
                rule: r.label.clone(),
                reason: format!("disjunctive head with {} atoms in total", r.size()),
            });
        }
        // (atom, positive) literals: priority atoms first, then ord order.
        let mut lits: Vec<(AtomId, bool)> = r.pos.iter().map(|&a| (a, true)).chain(r.neg.iter().map(|&a| (a, false))).collect();
        let rank = |a: AtomId| opts.priority.iter().position(|&x| x == a).unwrap_or(usize::MAX);
        lits.sort_by_key(|&(a, _)| rank(a));

        while r.head.len() + lits.len() > 3 {
            let name = loop {
                let cand = format!("aux{next_aux}");
                next_aux += 1;
                if p.atom_id(&cand).is_none() && out.atom_id(&cand).is_none() {
                    break cand;
                }
            };
            let aux = out.intern(&name);
            let (l1, l2) = (lits[0], lits[1]);
            let pos: Vec<_> = [l1, l2].iter().filter(|l| l.1).map(|l| l.0).collect();
            let neg: Vec<_> = [l1, l2].iter().filter(|l| !l.1).map(|l| l.0).collect();
            out.add_rule(&[aux], &pos, &neg)?;
            origin.push(ri);
            lits.splice(0..2, [(aux, true)]);
        }
        let pos: Vec<_> = lits.iter().filter(|l| l.1).map(|l| l.0).collect();
        let neg: Vec<_> = lits.iter().filter(|l| !l.1).map(|l| l.0).collect();
        out.add_rule(&r.head, &pos, &neg)?;
        origin.push(ri);
    }
    Ok(Normalized { program: out, projection: (0..p.num_atoms()).collect(), origin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;

    #[test]
    fn chains_long_body() {
        let p = parse_program("a :- b, c, d, e.").unwrap();
        let (q, proj) = normalize(&p).unwrap();
        assert_eq!(q.to_string(), "aux1 :- b, c.\naux2 :- d, aux1.\na :- e, aux2.");
        assert_eq!(proj, vec![0, 1, 2, 3, 4]);
        assert!(q.rules().iter().all(|r| r.size() <= 3));
    }

    #[test]
    fn identity_on_small_rules() {
        let p = parse_program("b :- not a.\nb :- a, c.\na | d.\nc :- a, not d.").unwrap();
        let (q, _) = normalize(&p).unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn rejects_wide_disjunction() {
        let p = parse_program("a | b :- c, d.").unwrap();
        assert!(matches!(normalize(&p), Err(Error::NotNormalizable { .. })));
        let keep = NormalizeOptions { keep: [0].into(), ..Default::default() };
        assert_eq!(normalize_with(&p, &keep).unwrap().program.max_rule_size(), 4);
    }

    #[test]
    fn priority_atoms_chain_first() {
        let p = parse_program("sat :- b0, b1, v1_bar, x.").unwrap();
        let x = p.atom_id("x").unwrap();
        let v = p.atom_id("v1_bar").unwrap();
        let n = normalize_with(&p, &NormalizeOptions { priority: vec![x, v], ..Default::default() }).unwrap();
        let q = &n.program;
        assert_eq!(q.num_rules(), 3);
        assert!(q.rules().iter().all(|r| r.size() <= 3));
        assert!(q.rule(0).contains(x) && q.rule(0).contains(v));
        assert_eq!(n.origin, vec![0, 0, 0]);
    }

    #[test]
    fn negative_literals_are_chained() {
        let p = parse_program(":- a, not b, c, not d.").unwrap();
        let (q, _) = normalize(&p).unwrap();
        assert_eq!(q.to_string(), "aux1 :- a, c.\n:- aux1, not b, not d.");
    }

    #[test]
    fn aux_names_are_fresh() {
        let p = parse_program("a :- aux1, c, d, e.").unwrap();
        let (q, _) = normalize(&p).unwrap();
        assert!(q.atom_id("aux2").is_some());
        assert_eq!(q.atom_id("aux1"), p.atom_id("aux1"));
    }
}
