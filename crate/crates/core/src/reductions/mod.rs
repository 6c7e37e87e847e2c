//! Parameter-compressing reductions: SAT encoding, R_fvs, R_td and the degree bound.

mod degree;
mod fvs;
mod sat;
mod td;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::program::{is_fully_tight, is_tight, AtomId, Program};
use crate::structparams::TreeDecomposition;

pub use degree::{bound_degree, DegreeOutput, DegreeScheme};
pub use fvs::{fvs_witness_for_reduced, reduce_fvs, reduce_fvs_almost_paths, FvsOptions, FvsWitness};
pub use sat::{model_count_brute, parse_dimacs, sat_to_asp, sat_to_asp_exclusive, Cnf};
pub use td::{
    localized_pd_witness, reduce_td, reduce_td_localized, td_witness_for_reduced, TdAtoms, TdMode, TdWitness,
};

/// Which rule family of the construction emitted a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Family(u8),
    /// Copy chains of the almost-paths variant.
    CopyChain,
    /// sat'_t ↔ sat'_t' links of the localized variant.
    LocalSat,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub kind: String,
    /// S in bit-encoding order (R_fvs).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub order: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Width of the decomposition guiding R_td.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Fvs { set: Vec<String>, size: usize, bound: usize },
    Td { bags: Vec<Vec<String>>, parent: Vec<Option<usize>>, root: usize, width: usize, bound: usize, normalized: bool },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReductionOutput {
    /// Written separately in the program grammar.
    #[serde(skip)]
    pub program: Program,
    /// at(source) by name.
    pub projection: Vec<String>,
    /// Family per output rule, parallel to `program.rules()`.
    pub provenance: Vec<Origin>,
    pub params: ReductionParams,
    pub witness: Option<Witness>,
    /// Atom handles for building the decomposition witness.
    #[serde(skip)]
    pub td_atoms: Option<TdAtoms>,
}

impl ReductionOutput {
    /// {witness, projection, provenance, parameters}; provenance is keyed by rule label.
    pub fn sidecar(&self) -> serde_json::Value {
        let prov: serde_json::Map<String, serde_json::Value> = self
            .program
            .rules()
            .iter()
            .zip(&self.provenance)
            .map(|(r, o)| (r.label.clone(), serde_json::to_value(o).unwrap()))
            .collect();
        serde_json::json!({
            "witness": self.witness,
            "projection": self.projection,
            "provenance": prov,
            "parameters": self.params,
        })
    }

    pub fn family_rules(&self, family: u8) -> Vec<usize> {
        (0..self.provenance.len()).filter(|&i| self.provenance[i] == Origin::Family(family)).collect()
    }
}

pub(crate) fn witness_from_td(p: &Program, td: &TreeDecomposition, bound: usize, normalized: bool) -> Witness {
    Witness::Td {
        bags: td.bags.iter().map(|b| b.iter().map(|&v| p.name(v).to_string()).collect()).collect(),
        parent: td.parent.clone(),
        root: td.root,
        width: td.width(),
        bound,
        normalized,
    }
}

/// ⌈log₂ n⌉, with 0 for n ≤ 1.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Ordinal codes over an ordered member list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitEncoding {
    pub members: Vec<AtomId>,
    pub m: usize,
}

impl BitEncoding {
    pub fn with_bits(members: Vec<AtomId>, m: usize) -> Self {
        BitEncoding { members, m }
    }

    pub fn ordinal(&self, x: AtomId) -> Option<usize> {
        self.members.iter().position(|&y| y == x)
    }

    /// bval(x, ·) as (bit index, bit is 1) pairs: b^i when set, b̄^i otherwise.
    pub fn bval(&self, x: AtomId) -> Option<Vec<(usize, bool)>> {
        let code = self.ordinal(x)?;
        Some((0..self.m).map(|i| (i, code >> i & 1 == 1)).collect())
    }
}

/// Encoding of S with m = max(1, ⌈log₂|S|⌉).
pub fn build_bval(s: &[AtomId]) -> Result<BitEncoding> {
    if s.is_empty() {
        return Err(Error::Precondition("bit encoding of an empty set".into()));
    }
    let distinct: BTreeSet<_> = s.iter().collect();
    if distinct.len() != s.len() {
        return Err(Error::Precondition("bit encoding order repeats a member".into()));
    }
    Ok(BitEncoding::with_bits(s.to_vec(), ceil_log2(s.len()).max(1)))
}

/// Output program under construction plus the family of every rule.
pub(crate) struct Emitter {
    pub out: Program,
    pub origin: Vec<Origin>,
}

impl Emitter {
    pub fn new() -> Self {
        Emitter { out: Program::new(), origin: Vec::new() }
    }

    pub fn atom(&mut self, base: &str) -> AtomId {
        let name = self.out.fresh_name(base);
        self.out.intern(&name)
    }

    pub fn rule(&mut self, origin: Origin, head: &[AtomId], pos: &[AtomId], neg: &[AtomId]) {
        self.out.add_rule(head, pos, neg).expect("emitted rule is well formed");
        self.origin.push(origin);
    }

    pub fn fam(&mut self, f: u8, head: &[AtomId], pos: &[AtomId], neg: &[AtomId]) {
        self.rule(Origin::Family(f), head, pos, neg)
    }
}

/// Checks shared by R_fvs and R_td: normalized, tight, every atom of at(Π) in some head, and full
/// tightness when the completion fits the brute-force cap.
pub(crate) fn check_source(p: &Program) -> Result<()> {
    if let Some(r) = p.rules().iter().find(|r| r.size() > 3) {
        return Err(Error::Precondition(format!("rule {} has {} atoms; the input must be normalized", r.label, r.size())));
    }
    if !is_tight(p) {
        return Err(Error::Precondition("program is not tight".into()));
    }
    let heads: BTreeSet<AtomId> = p.rules().iter().flat_map(|r| r.head.iter().copied()).collect();
    if let Some(&a) = p.used_atoms().iter().find(|a| !heads.contains(a)) {
        return Err(Error::Precondition(format!("{} occurs in no rule head", p.name(a))));
    }
    match is_fully_tight(p, 16) {
        Ok(true) | Err(Error::Budget(_)) => Ok(()),
        Ok(false) => Err(Error::Precondition("program is not fully tight".into())),
        Err(e) => Err(e),
    }
}

/// `p` without the rules at the given indices.
pub(crate) fn without_rules(p: &Program, skip: &BTreeSet<usize>) -> Program {
    let mut out = Program::new();
    for n in p.names() {
        out.intern(n);
    }
    for (i, r) in p.rules().iter().enumerate() {
        if !skip.contains(&i) {
            out.add_labeled_rule(r.label.clone(), &r.head, &r.pos, &r.neg).expect("copied rule is valid");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_and_bval() {
        assert_eq!((0..=9).map(ceil_log2).collect::<Vec<_>>(), vec![0, 0, 1, 2, 2, 3, 3, 3, 3, 4]);
        let e = build_bval(&[7, 3, 5]).unwrap();
        assert_eq!(e.m, 2);
        assert_eq!(e.bval(5), Some(vec![(0, false), (1, true)]));
        let one = build_bval(&[4]).unwrap();
        assert_eq!(one.m, 1);
        assert_eq!(one.bval(4), Some(vec![(0, false)]));
        let four = build_bval(&[0, 1, 2, 3]).unwrap();
        assert_eq!(four.bval(2), Some(vec![(0, false), (1, true)]));
        assert!(build_bval(&[]).is_err());
        assert!(build_bval(&[1, 1]).is_err());
        // Codes are pairwise distinct.
        let big = build_bval(&(0..13).collect::<Vec<_>>()).unwrap();
        let codes: BTreeSet<_> = (0..13).map(|x| big.bval(x).unwrap()).collect();
        assert_eq!(codes.len(), 13);
    }
}
