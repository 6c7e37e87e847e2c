use std::collections::HashMap;

use super::{completion, AtomId, Program};
use crate::error::{Error, Result};
use crate::oracle::naive;

/// D_Π as adjacency lists: an edge a → b for a ∈ B+_r, b ∈ H_r.
pub fn dependency_graph(p: &Program) -> Vec<Vec<AtomId>> {
    let mut adj = vec![Vec::new(); p.num_atoms()];
    for r in p.rules() {
        for &a in &r.pos {
            for &b in &r.head {
                if !adj[a].contains(&b) {
                    adj[a].push(b);
                }
            }
        }
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    adj
}

pub fn is_tight(p: &Program) -> bool {
    let adj = dependency_graph(p);
    let mut indeg = vec![0usize; adj.len()];
    for l in &adj {
        for &b in l {
            indeg[b] += 1;
        }
    }
    let mut stack: Vec<_> = (0..adj.len()).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    seen == adj.len()
}

/// Brute-force check that projecting models of 𝒞(Π) onto at(Π) is a
/// bijection onto the models of Π.
pub fn is_fully_tight(p: &Program, atom_cap: usize) -> Result<bool> {
    if !is_tight(p) {
        return Err(Error::Precondition("program is not tight".into()));
    }
    let c = completion(p, true);
    if c.num_atoms() > atom_cap.min(naive::MAX_ATOMS) {
        return Err(Error::Budget(format!(
            "completion has {} atoms, cap is {}; full tightness unverifiable at this scale",
            c.num_atoms(),
            atom_cap
        )));
    }
    let n = p.num_atoms();
    let low = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut counts: HashMap<u64, u32> = HashMap::new();
    for m in naive::models(&c, None)? {
        *counts.entry(m & low).or_default() += 1;
    }
    for m in naive::models(p, None)? {
        if counts.remove(&m) != Some(1) {
            return Ok(false);
        }
    }
    Ok(counts.is_empty())
}
