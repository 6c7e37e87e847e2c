use super::{AtomId, Program, Rule};

/// 𝒞(Π): Π plus, per atom h with non-empty 𝓗(h), a support disjunction
/// `r1^h | … | rl^h :- h` and constraints tying each r^h to its rule's body
/// and to the other head atoms. With `simplify_singletons`, r^h is h itself
/// when 𝓗(h) has one rule, and the resulting tautology is dropped.
pub fn completion(p: &Program, simplify_singletons: bool) -> Program {
    let mut out = Program::new();
    for name in p.names() {
        out.intern(name);
    }
    for r in p.rules() {
        out.add_labeled_rule(r.label.clone(), &r.head, &r.pos, &r.neg).expect("copied rule is valid");
    }
    let emit = |out: &mut Program, head: &[AtomId], pos: &[AtomId], neg: &[AtomId]| {
        let mut probe = Rule { label: String::new(), head: head.to_vec(), pos: pos.to_vec(), neg: neg.to_vec() };
        probe.head.sort_unstable();
        probe.pos.sort_unstable();
        probe.neg.sort_unstable();
        if out.rules().iter().any(|r| r.same_shape(&probe)) {
            return;
        }
        out.add_rule(head, pos, neg).expect("completion rule is valid");
    };

    for h in 0..p.num_atoms() {
        let hr = p.head_rules(h);
        if hr.is_empty() {
            continue;
        }
        let supports: Vec<AtomId> = if simplify_singletons && hr.len() == 1 {
            vec![h]
        } else {
            hr.iter()
                .map(|&ri| {
                    let name = out.fresh_name(&format!("{}_{}", p.rule(ri).label, p.name(h)));
                    out.intern(&name)
                })
                .collect()
        };
        if supports[0] != h {
            emit(&mut out, &supports, &[h], &[]);
        }
        for (&ri, &s) in hr.iter().zip(&supports) {
            let r = p.rule(ri);
            for &a in &r.pos {
                emit(&mut out, &[], &[s], &[a]);
            }
            for &b in r.neg.iter().chain(&r.head) {
                if b != h {
                    emit(&mut out, &[], &[s, b], &[]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;

    const PI1: &str = "b :- not a.\nb :- a, c.\na | d.\nc :- a, not d.";

    #[test]
    fn reproduces_pi2() {
        let p = parse_program(PI1).unwrap();
        let c = completion(&p, true);
        let expected = "b :- not a.\nb :- a, c.\na | d.\nc :- a, not d.\n\
                        r1_b | r2_b :- b.\n:- a, r1_b.\n:- r2_b, not a.\n:- r2_b, not c.\n\
                        :- a, d.\n:- c, not a.\n:- c, d.";
        assert_eq!(c.to_string(), expected);
        assert_eq!(c.num_rules(), 11);
        assert_eq!(c.num_atoms(), 6);
    }

    #[test]
    fn atoms_without_head_rules_add_nothing() {
        let p = parse_program(":- a.").unwrap();
        assert_eq!(completion(&p, true), p);
    }

    #[test]
    fn singleton_fact_adds_nothing() {
        let p = parse_program("a.").unwrap();
        assert_eq!(completion(&p, true).num_rules(), 1);
        let full = completion(&p, false);
        assert_eq!(full.to_string(), "a.\nr1_a :- a.");
    }
}
