//! Exhaustive bitmask scan. Deliberately simple: every interpretation is
//! checked against every rule, and minimality is decided by walking all
//! proper submasks.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::program::{AtomId, Program};

pub const MAX_ATOMS: usize = 63;

#[derive(Clone, Copy, Debug)]
pub(crate) struct MaskRule {
    pub head: u64,
    pub pos: u64,
    pub neg: u64,
}

impl MaskRule {
    #[inline]
    pub fn satisfied(&self, i: u64) -> bool {
        (self.head | self.neg) & i != 0 || self.pos & !i != 0
    }
}

/// Rules over the atom table of `p` (atom id = bit index).
pub(crate) fn compile(p: &Program) -> Result<Vec<MaskRule>> {
    if p.num_atoms() > MAX_ATOMS {
        return Err(Error::Budget(format!("{} atoms exceed the bitmask width", p.num_atoms())));
    }
    let mask = |v: &[AtomId]| v.iter().fold(0u64, |m, &a| m | 1 << a);
    Ok(p.rules().iter().map(|r| MaskRule { head: mask(&r.head), pos: mask(&r.pos), neg: mask(&r.neg) }).collect())
}

fn check_deadline(deadline: Option<Instant>, step: u64) -> Result<()> {
    if step & 0xffff == 0 {
        if let Some(d) = deadline {
            if Instant::now() > d {
                return Err(Error::Budget("wall-clock limit reached during enumeration".into()));
            }
        }
    }
    Ok(())
}

fn full_range(n: usize) -> u64 {
    if n == 0 {
        1
    } else {
        1u64 << n
    }
}

/// All classical models of `p` as masks over its atom table, ascending.
pub fn models(p: &Program, deadline: Option<Instant>) -> Result<Vec<u64>> {
    let rules = compile(p)?;
    let mut out = Vec::new();
    for i in 0..full_range(p.num_atoms()) {
        check_deadline(deadline, i)?;
        if rules.iter().all(|r| r.satisfied(i)) {
            out.push(i);
        }
    }
    Ok(out)
}

/// Whether `i` is a minimal model of Π^i, given that it is a model of Π.
pub(crate) fn minimal_in_reduct(rules: &[MaskRule], i: u64) -> bool {
    let reduct: Vec<MaskRule> = rules.iter().filter(|r| r.neg & i == 0 && r.pos & !i == 0).copied().collect();
    let mut j = i;
    while j != 0 {
        j = (j - 1) & i;
        if reduct.iter().all(|r| r.head & j != 0 || r.pos & !j != 0) {
            return false;
        }
    }
    true
}

pub fn is_answer_set(p: &Program, i: u64) -> Result<bool> {
    let rules = compile(p)?;
    Ok(rules.iter().all(|r| r.satisfied(i)) && minimal_in_reduct(&rules, i))
}

/// Answer sets as masks, ascending; stops after `limit` hits when given.
pub fn answer_sets(p: &Program, limit: Option<usize>, deadline: Option<Instant>) -> Result<Vec<u64>> {
    let rules = compile(p)?;
    let mut out = Vec::new();
    for i in 0..full_range(p.num_atoms()) {
        check_deadline(deadline, i)?;
        if rules.iter().all(|r| r.satisfied(i)) && minimal_in_reduct(&rules, i) {
            out.push(i);
            if limit.is_some_and(|l| out.len() >= l) {
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;

    #[test]
    fn pi1_answer_sets() {
        let p = parse_program("b :- not a.\nb :- a, c.\na | d.\nc :- a, not d.").unwrap();
        // b=0 a=1 c=2 d=3: {b,d} = 0b1001, {a,b,c} = 0b0111
        assert_eq!(answer_sets(&p, None, None).unwrap(), vec![0b0111, 0b1001]);
        assert!(!is_answer_set(&p, 0b1111).unwrap());
    }

    #[test]
    fn empty_program_has_empty_answer_set() {
        assert_eq!(answer_sets(&Program::new(), None, None).unwrap(), vec![0]);
    }
}
