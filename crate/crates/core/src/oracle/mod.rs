//! Ground truth for everything else in the crate: satisfaction, GL reduct,
//! answer-set recognition and enumeration, and source/output correspondence.

pub mod naive;
pub mod search;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::program::{AtomId, Interpretation, Program, Rule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleBudget {
    /// Largest atom table handled by the exhaustive bitmask scan.
    pub max_atoms: usize,
    /// Largest number of used atoms handed to the SAT-backed search.
    pub search_atoms: usize,
    /// Classical models the search may visit before giving up.
    pub max_models: usize,
    pub seconds: Option<f64>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_atoms: 22, search_atoms: 400, max_models: 1 << 20, seconds: None }
    }
}

impl OracleBudget {
    /// Defaults, with `ASPSTRUCT_BUDGET_ATOMS` (when set) capping both engines.
    pub fn from_env() -> Self {
        let mut b = Self::default();
        if let Some(n) = std::env::var("ASPSTRUCT_BUDGET_ATOMS").ok().and_then(|v| v.parse::<usize>().ok()) {
            b.max_atoms = b.max_atoms.min(n);
            b.search_atoms = n;
        }
        b
    }

    pub fn naive_only(max_atoms: usize) -> Self {
        OracleBudget { max_atoms, search_atoms: 0, ..Self::default() }
    }

    fn deadline(&self) -> Option<Instant> {
        self.seconds.map(|s| Instant::now() + Duration::from_secs_f64(s))
    }
}

pub fn satisfies(i: &Interpretation, r: &Rule) -> bool {
    r.head.iter().chain(&r.neg).any(|a| i.contains(a)) || r.pos.iter().any(|a| !i.contains(a))
}

pub fn is_model(p: &Program, i: &Interpretation) -> bool {
    p.rules().iter().all(|r| satisfies(i, r))
}

/// Π^I: rules whose negative body meets I are dropped, the rest lose their negative bodies.
pub fn gl_reduct(p: &Program, i: &Interpretation) -> Program {
    let mut out = Program::new();
    for n in p.names() {
        out.intern(n);
    }
    for r in p.rules() {
        if r.neg.iter().any(|a| i.contains(a)) {
            continue;
        }
        out.add_labeled_rule(r.label.clone(), &r.head, &r.pos, &[]).expect("reduct rule is valid");
    }
    out
}

fn to_mask(i: &Interpretation) -> u64 {
    i.iter().fold(0, |m, &a| m | 1 << a)
}

fn from_mask(m: u64) -> Interpretation {
    (0..64).filter(|b| m >> b & 1 == 1).collect()
}

/// Order of the interpretations read as binary numbers (bit a = atom a).
pub fn mask_order(a: &Interpretation, b: &Interpretation) -> Ordering {
    let mut ia = a.iter().rev();
    let mut ib = b.iter().rev();
    loop {
        match (ia.next(), ib.next()) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(x), Some(y)) if x != y => return x.cmp(y),
            _ => {}
        }
    }
}

fn use_naive(p: &Program, budget: &OracleBudget) -> bool {
    p.num_atoms() <= budget.max_atoms.min(naive::MAX_ATOMS)
}

fn check_search(p: &Program, budget: &OracleBudget) -> Result<()> {
    let used = p.used_atoms().len();
    if used > budget.search_atoms {
        return Err(Error::Budget(format!(
            "program has {} atoms ({} used); budget allows {} for enumeration and {} for search",
            p.num_atoms(),
            used,
            budget.max_atoms,
            budget.search_atoms
        )));
    }
    Ok(())
}

/// I is a minimal model of Π^I.
pub fn is_answer_set(p: &Program, i: &Interpretation, budget: &OracleBudget) -> Result<bool> {
    if i.iter().any(|&a| a >= p.num_atoms()) {
        return Err(Error::UnknownAtom(format!("interpretation mentions atom outside the table of {}", p.num_atoms())));
    }
    if !is_model(p, i) {
        return Ok(false);
    }
    if i.len() <= budget.max_atoms.min(naive::MAX_ATOMS) && p.num_atoms() <= naive::MAX_ATOMS {
        let rules = naive::compile(p)?;
        return Ok(naive::minimal_in_reduct(&rules, to_mask(i)));
    }
    if i.len() > budget.search_atoms {
        return Err(Error::Budget(format!("minimality check over {} atoms exceeds the budget", i.len())));
    }
    Ok(search::smaller_reduct_model(p, i)?.is_none())
}

fn enumerate(p: &Program, limit: Option<usize>, budget: &OracleBudget) -> Result<Vec<Interpretation>> {
    let deadline = budget.deadline();
    let mut out = if use_naive(p, budget) {
        naive::answer_sets(p, limit, deadline)?.into_iter().map(from_mask).collect::<Vec<_>>()
    } else {
        check_search(p, budget)?;
        search::answer_sets(p, limit, budget.max_models, deadline)?
    };
    out.sort_by(mask_order);
    Ok(out)
}

/// Every answer set, in ascending bitmask order.
pub fn enumerate_answer_sets(p: &Program, budget: &OracleBudget) -> Result<Vec<Interpretation>> {
    enumerate(p, None, budget)
}

/// Exhaustive scan regardless of the search budget.
pub fn naive_answer_sets(p: &Program, budget: &OracleBudget) -> Result<Vec<Interpretation>> {
    if !use_naive(p, budget) {
        return Err(Error::Budget(format!("{} atoms exceed the enumeration cap {}", p.num_atoms(), budget.max_atoms)));
    }
    Ok(naive::answer_sets(p, None, budget.deadline())?.into_iter().map(from_mask).collect())
}

/// SAT-backed search regardless of size.
pub fn search_answer_sets(p: &Program, budget: &OracleBudget) -> Result<Vec<Interpretation>> {
    check_search(p, budget)?;
    let mut out = search::answer_sets(p, None, budget.max_models, budget.deadline())?;
    out.sort_by(mask_order);
    Ok(out)
}

pub fn is_consistent(p: &Program, budget: &OracleBudget) -> Result<bool> {
    Ok(!enumerate(p, Some(1), budget)?.is_empty())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Set,
    Bijection,
    Consistency,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub mode: CheckMode,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_answer_sets: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_answer_sets: Option<usize>,
}

fn show(p: &Program, i: &Interpretation) -> String {
    format!("{{{}}}", p.set_names(i).join(","))
}

/// Compares AS(src) with the answer sets of `out` projected onto the atoms
/// named in `projection` (matched by name).
pub fn check_projection(
    src: &Program,
    out: &Program,
    projection: &[String],
    mode: CheckMode,
    budget: &OracleBudget,
) -> Result<CorrespondenceReport> {
    let mut map: Vec<(AtomId, AtomId)> = Vec::new();
    for name in projection {
        let o = out.atom_id(name).ok_or_else(|| Error::UnknownAtom(format!("{name} (output)")))?;
        if let Some(s) = src.atom_id(name) {
            map.push((o, s));
        }
    }
    check_mapping(src, out, &map, mode, budget)
}

/// Like `check_projection`, with the correspondence given as (output atom, source atom) pairs.
pub fn check_mapping(
    src: &Program,
    out: &Program,
    map: &[(AtomId, AtomId)],
    mode: CheckMode,
    budget: &OracleBudget,
) -> Result<CorrespondenceReport> {
    let project = |m: &Interpretation| -> Interpretation { map.iter().filter(|(o, _)| m.contains(o)).map(|&(_, s)| s).collect() };

    if mode == CheckMode::Consistency {
        let a = is_consistent(src, budget)?;
        let b = is_consistent(out, budget)?;
        return Ok(CorrespondenceReport {
            mode,
            pass: a == b,
            counterexample: (a != b).then(|| format!("source consistent: {a}, output consistent: {b}")),
            source_answer_sets: None,
            output_answer_sets: None,
        });
    }

    let src_sets: BTreeSet<Interpretation> = enumerate_answer_sets(src, budget)?.into_iter().collect();
    let out_sets = enumerate_answer_sets(out, budget)?;
    let mut projected = BTreeSet::new();
    let mut counterexample = None;
    for m in &out_sets {
        let pm = project(m);
        if !projected.insert(pm.clone()) && mode == CheckMode::Bijection && counterexample.is_none() {
            counterexample = Some(format!("two output answer sets project to {}", show(src, &pm)));
        }
        if !src_sets.contains(&pm) && counterexample.is_none() {
            counterexample = Some(format!("output answer set {} projects to non-answer set {}", show(out, m), show(src, &pm)));
        }
    }
    if counterexample.is_none() {
        if let Some(missing) = src_sets.iter().find(|s| !projected.contains(*s)) {
            counterexample = Some(format!("source answer set {} has no extension", show(src, missing)));
        }
    }
    Ok(CorrespondenceReport {
        mode,
        pass: counterexample.is_none(),
        counterexample,
        source_answer_sets: Some(src_sets.len()),
        output_answer_sets: Some(out_sets.len()),
    })
}
