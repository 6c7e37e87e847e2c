//! Model enumeration with a CDCL solver plus a second SAT call per model for
//! minimality. Used for programs too large for the bitmask scan.

use std::time::Instant;

use varisat::{ExtendFormula, Lit, Solver};

use crate::error::{Error, Result};
use crate::program::{Interpretation, Program};

fn lit(a: usize, positive: bool) -> Lit {
    Lit::from_index(a, positive)
}

fn solve(s: &mut Solver) -> Result<bool> {
    s.solve().map_err(|e| Error::Budget(format!("sat backend: {e}")))
}

/// A model of Π^I strictly inside `i`, if one exists.
pub fn smaller_reduct_model(p: &Program, i: &Interpretation) -> Result<Option<Interpretation>> {
    if i.is_empty() {
        return Ok(None);
    }
    let mut s = Solver::new();
    for r in p.rules() {
        if r.neg.iter().any(|a| i.contains(a)) || !r.pos.iter().all(|a| i.contains(a)) {
            continue;
        }
        let clause: Vec<Lit> = r
            .head
            .iter()
            .filter(|a| i.contains(a))
            .map(|&a| lit(a, true))
            .chain(r.pos.iter().map(|&a| lit(a, false)))
            .collect();
        if clause.is_empty() {
            // `i` itself violates this rule of the reduct; nothing below it can do better.
            return Ok(None);
        }
        s.add_clause(&clause);
    }
    let strict: Vec<Lit> = i.iter().map(|&a| lit(a, false)).collect();
    s.add_clause(&strict);
    if solve(&mut s)? {
        let model = s.model().unwrap_or_default();
        Ok(Some(model.iter().filter(|l| l.is_positive() && i.contains(&l.index())).map(|l| l.index()).collect()))
    } else {
        Ok(None)
    }
}

/// Answer sets (unordered); stops after `limit` when given.
pub fn answer_sets(
    p: &Program,
    limit: Option<usize>,
    max_models: usize,
    deadline: Option<Instant>,
) -> Result<Vec<Interpretation>> {
    let used = p.used_atoms();
    let mut s = Solver::new();
    for r in p.rules() {
        let clause: Vec<Lit> = r
            .head
            .iter()
            .chain(&r.neg)
            .map(|&a| lit(a, true))
            .chain(r.pos.iter().map(|&a| lit(a, false)))
            .collect();
        s.add_clause(&clause);
    }
    let mut out = Vec::new();
    let mut seen = 0usize;
    while solve(&mut s)? {
        seen += 1;
        if seen > max_models {
            return Err(Error::Budget(format!("more than {max_models} classical models")));
        }
        if let Some(d) = deadline {
            if Instant::now() > d {
                return Err(Error::Budget("wall-clock limit reached during search".into()));
            }
        }
        let model = s.model().unwrap_or_default();
        let mut truth = vec![false; p.num_atoms()];
        for l in &model {
            if l.index() < truth.len() {
                truth[l.index()] = l.is_positive();
            }
        }
        let i: Interpretation = used.iter().copied().filter(|&a| truth[a]).collect();
        if smaller_reduct_model(p, &i)?.is_none() {
            out.push(i.clone());
            if limit.is_some_and(|l| out.len() >= l) {
                break;
            }
        }
        let block: Vec<Lit> = used.iter().map(|&a| lit(a, !truth[a])).collect();
        if block.is_empty() {
            break;
        }
        s.add_clause(&block);
    }
    Ok(out)
}
