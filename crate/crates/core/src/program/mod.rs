//! Ground disjunctive programs: atoms, rules, printing and the per-rule
//! position map `ord`.

mod completion;
mod normalize;
mod parse;
mod tight;

pub use completion::completion;
pub use normalize::{normalize, normalize_with, NormalizeOptions, Normalized};
pub use parse::{is_atom_name, parse_program};
pub use tight::{dependency_graph, is_fully_tight, is_tight};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type AtomId = usize;

/// A set of atoms, the oracle's unit of enumeration.
pub type Interpretation = BTreeSet<AtomId>;

/// `H ← B+, not B−` with all three blocks sorted by atom id and pairwise disjoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub label: String,
    pub head: Vec<AtomId>,
    pub pos: Vec<AtomId>,
    pub neg: Vec<AtomId>,
}

impl Rule {
    /// Atoms in `ord` order: positive body, head, negative body.
    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.pos.iter().chain(&self.head).chain(&self.neg).copied()
    }

    pub fn size(&self) -> usize {
        self.head.len() + self.pos.len() + self.neg.len()
    }

    pub fn contains(&self, a: AtomId) -> bool {
        self.head.contains(&a) || self.pos.contains(&a) || self.neg.contains(&a)
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    /// Position of `x` in the rule, counted from 1.
    pub fn ord(&self, x: AtomId) -> Option<usize> {
        self.atoms().position(|a| a == x).map(|i| i + 1)
    }

    /// Same head and bodies, labels ignored.
    pub fn same_shape(&self, other: &Rule) -> bool {
        self.head == other.head && self.pos == other.pos && self.neg == other.neg
    }
}

#[derive(Clone, Debug, Default)]
pub struct Program {
    names: Vec<String>,
    index: HashMap<String, AtomId>,
    rules: Vec<Rule>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.rules == other.rules
    }
}

impl Eq for Program {}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `name`, adding it to the atom table if needed.
    pub fn intern(&mut self, name: &str) -> AtomId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn atom_id(&self, name: &str) -> Option<AtomId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn num_atoms(&self) -> usize {
        self.names.len()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, i: usize) -> &Rule {
        &self.rules[i]
    }

    pub fn num_rules(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rule_index(&self, label: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.label == label)
    }

    /// Adds a rule labeled `r<k>` where k is its 1-based position.
    pub fn add_rule(&mut self, head: &[AtomId], pos: &[AtomId], neg: &[AtomId]) -> Result<usize> {
        let mut k = self.rules.len() + 1;
        while self.rules.iter().any(|r| r.label == format!("r{k}")) {
            k += 1;
        }
        self.add_labeled_rule(format!("r{k}"), head, pos, neg)
    }

    pub fn add_labeled_rule(
        &mut self,
        label: String,
        head: &[AtomId],
        pos: &[AtomId],
        neg: &[AtomId],
    ) -> Result<usize> {
        let sorted = |v: &[AtomId]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v
        };
        let rule = Rule { label, head: sorted(head), pos: sorted(pos), neg: sorted(neg) };
        self.check_rule(&rule)?;
        self.rules.push(rule);
        Ok(self.rules.len() - 1)
    }

    /// Convenience for tests and builders: atoms given by name, interned on the fly.
    pub fn add_rule_named(&mut self, head: &[&str], pos: &[&str], neg: &[&str]) -> Result<usize> {
        let h: Vec<_> = head.iter().map(|n| self.intern(n)).collect();
        let p: Vec<_> = pos.iter().map(|n| self.intern(n)).collect();
        let n: Vec<_> = neg.iter().map(|n| self.intern(n)).collect();
        self.add_rule(&h, &p, &n)
    }

    fn check_rule(&self, rule: &Rule) -> Result<()> {
        if rule.size() == 0 {
            return Err(Error::Precondition(format!("rule {} is empty", rule.label)));
        }
        let mut seen = BTreeSet::new();
        for a in rule.atoms() {
            if a >= self.names.len() {
                return Err(Error::UnknownAtom(format!("#{a}")));
            }
            if !seen.insert(a) {
                return Err(Error::DuplicateAtom {
                    rule: rule.label.clone(),
                    atom: self.names[a].clone(),
                });
            }
        }
        if self.rules.iter().any(|r| r.label == rule.label) {
            return Err(Error::Precondition(format!("duplicate rule label {}", rule.label)));
        }
        Ok(())
    }

    /// at(Π): atoms occurring in some rule, ascending.
    pub fn used_atoms(&self) -> Vec<AtomId> {
        let set: BTreeSet<_> = self.rules.iter().flat_map(|r| r.atoms()).collect();
        set.into_iter().collect()
    }

    /// 𝓗(a): indices of rules with `a` in the head.
    pub fn head_rules(&self, a: AtomId) -> Vec<usize> {
        (0..self.rules.len()).filter(|&i| self.rules[i].head.contains(&a)).collect()
    }

    /// Largest |at(r)| over all rules (0 for the empty program).
    pub fn max_rule_size(&self) -> usize {
        self.rules.iter().map(Rule::size).max().unwrap_or(0)
    }

    pub fn is_normalized(&self) -> bool {
        self.max_rule_size() <= 3
    }

    /// ord(r, x) for the rule at index `rule`.
    pub fn ord(&self, rule: usize, x: AtomId) -> Result<usize> {
        let r = &self.rules[rule];
        r.ord(x).ok_or_else(|| Error::NotInRule {
            rule: r.label.clone(),
            atom: self.names.get(x).cloned().unwrap_or_else(|| format!("#{x}")),
        })
    }

    pub fn set_names(&self, set: &Interpretation) -> Vec<String> {
        set.iter().map(|&a| self.names[a].clone()).collect()
    }

    pub fn set_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Interpretation> {
        names
            .iter()
            .map(|n| self.atom_id(n.as_ref()).ok_or_else(|| Error::UnknownAtom(n.as_ref().into())))
            .collect()
    }

    /// Name that is not yet in the atom table, derived from `base` by appending `_`.
    pub fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.index.contains_key(&name) {
            name.push('_');
        }
        name
    }

    pub fn render_rule(&self, r: &Rule) -> String {
        let mut out = r.head.iter().map(|&a| self.names[a].as_str()).collect::<Vec<_>>().join(" | ");
        if !r.pos.is_empty() || !r.neg.is_empty() {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(":- ");
            let body: Vec<String> = r
                .pos
                .iter()
                .map(|&a| self.names[a].clone())
                .chain(r.neg.iter().map(|&a| format!("not {}", self.names[a])))
                .collect();
            out.push_str(&body.join(", "));
        }
        out.push('.');
        out
    }

    /// Rules with identical shape (labels ignored) appear in both, in any order.
    pub fn same_rules(&self, other: &Program) -> bool {
        let key = |p: &Program| {
            let mut v: Vec<String> = p.rules.iter().map(|r| p.render_rule(r)).collect();
            v.sort();
            v
        };
        key(self) == key(other)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rules.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", self.render_rule(r))?;
        }
        Ok(())
    }
}

pub fn render_program(p: &Program) -> String {
    p.to_string()
}
