use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::program::{AtomId, Program};

/// CNF over variables 1..=num_vars; literals are signed variable numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

/// DIMACS: `c` comment lines, one `p cnf V C` header, clauses terminated by 0.
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let err = |line: usize, msg: String| Error::Syntax { line, col: 1, msg };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if t.starts_with('p') {
            let parts: Vec<&str> = t.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                return Err(err(line_no, format!("bad header `{t}`")));
            }
            let v = parts[2].parse().map_err(|_| err(line_no, "bad variable count".into()))?;
            let c = parts[3].parse().map_err(|_| err(line_no, "bad clause count".into()))?;
            header = Some((v, c));
            continue;
        }
        let (nv, _) = header.ok_or_else(|| err(line_no, "clause before `p cnf` header".into()))?;
        for tok in t.split_whitespace() {
            let l: i32 = tok.parse().map_err(|_| err(line_no, format!("bad literal `{tok}`")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if l.unsigned_abs() as usize > nv {
                return Err(err(line_no, format!("literal {l} exceeds {nv} variables")));
            } else {
                current.push(l);
            }
        }
    }
    let (num_vars, count) = header.ok_or_else(|| err(1, "missing `p cnf` header".into()))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != count {
        return Err(Error::Format(format!("header announces {count} clauses, found {}", clauses.len())));
    }
    Ok(Cnf { num_vars, clauses })
}

fn encode(f: &Cnf, exclusive: bool) -> Result<Program> {
    if let Some(c) = f.clauses.iter().find(|c| c.len() > 3) {
        return Err(Error::Precondition(format!("clause {c:?} has more than three literals")));
    }
    let mut p = Program::new();
    let mut var = Vec::with_capacity(f.num_vars);
    for v in 1..=f.num_vars {
        let a = p.intern(&format!("x{v}"));
        let abar = p.intern(&format!("x{v}_bar"));
        var.push((a, abar));
    }
    for &(a, abar) in &var {
        p.add_rule(&[a], &[], &[abar])?;
        p.add_rule(&[abar], &[], &[a])?;
    }
    for c in &f.clauses {
        // A clause is violated when every literal is false, i.e. every complement holds.
        let mut body: Vec<AtomId> = c
            .iter()
            .map(|&l| {
                let (a, abar) = var[l.unsigned_abs() as usize - 1];
                if l > 0 { abar } else { a }
            })
            .collect();
        body.sort_unstable();
        body.dedup();
        if has_both(&var, &body) {
            // x ∨ ¬x: the clause is a tautology.
            continue;
        }
        p.add_rule(&[], &body, &[])?;
    }
    if exclusive {
        for &(a, abar) in &var {
            p.add_rule(&[], &[a, abar], &[])?;
        }
    }
    Ok(p)
}

fn has_both(var: &[(AtomId, AtomId)], body: &[AtomId]) -> bool {
    var.iter().any(|(a, b)| body.contains(a) && body.contains(b))
}

/// x ← ¬x̄, x̄ ← ¬x per variable and one constraint per clause over the complemented literals.
pub fn sat_to_asp(f: &Cnf) -> Result<Program> {
    encode(f, false)
}

/// `sat_to_asp` plus ← x, x̄ per variable, which makes every model of the program supported.
pub fn sat_to_asp_exclusive(f: &Cnf) -> Result<Program> {
    encode(f, true)
}

/// Number of satisfying assignments by enumeration (at most 25 variables).
pub fn model_count_brute(f: &Cnf) -> Result<u64> {
    if f.num_vars > 25 {
        return Err(Error::Budget(format!("{} variables exceed the truth-table cap", f.num_vars)));
    }
    Ok((0u64..1 << f.num_vars)
        .filter(|m| f.clauses.iter().all(|c| c.iter().any(|&l| (m >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0))))
        .count() as u64)
}
