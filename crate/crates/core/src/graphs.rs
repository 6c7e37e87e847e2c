//! Primal, incidence and typed primal graphs of a program.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::program::{AtomId, Program, Rule};

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Atom,
    Rule,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub kind: VertexKind,
    pub label: String,
}

/// Simple undirected graph. Sorted adjacency lists; edges stored once as (u, v) with u < v.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<Vertex>,
    adj: Vec<Vec<VertexId>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` atom-kind vertices labelled by their index.
    pub fn with_vertices(n: usize) -> Self {
        let mut g = Graph::new();
        for i in 0..n {
            g.add_vertex(VertexKind::Atom, &i.to_string());
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Self {
        let mut g = Self::with_vertices(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_vertex(&mut self, kind: VertexKind, label: &str) -> VertexId {
        let id = self.vertices.len();
        self.vertices.push(Vertex { id, kind, label: label.to_string() });
        self.adj.push(Vec::new());
        id
    }

    /// Ignores loops and repeated edges.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        if u == v {
            return false;
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                true
            }
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v]
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.vertices[v].label
    }

    pub fn find(&self, label: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.label == label)
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (u, l) in self.adj.iter().enumerate() {
            out.extend(l.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    /// Subgraph on the vertices not in `removed`; ids are preserved and removed vertices become isolated.
    pub fn without(&self, removed: &BTreeSet<VertexId>) -> Graph {
        let mut g = Graph { vertices: self.vertices.clone(), adj: vec![Vec::new(); self.vertices.len()] };
        for (u, v) in self.edges() {
            if !removed.contains(&u) && !removed.contains(&v) {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Connected components among `alive` vertices, each sorted.
    pub fn components(&self, alive: &dyn Fn(VertexId) -> bool) -> Vec<Vec<VertexId>> {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] || !alive(s) {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if !seen[w] && alive(w) {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Whether the graph with `removed` deleted has no cycle.
    pub fn is_acyclic_without(&self, removed: &BTreeSet<VertexId>) -> bool {
        let alive = |v: VertexId| !removed.contains(&v);
        let mut edges = 0usize;
        let mut verts = 0usize;
        for u in 0..self.num_vertices() {
            if alive(u) {
                verts += 1;
                edges += self.adj[u].iter().filter(|&&w| alive(w) && w > u).count();
            }
        }
        edges + self.components(&alive).len() == verts
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for v in &self.vertices {
            let shape = match v.kind {
                VertexKind::Atom => "ellipse",
                VertexKind::Rule => "box",
            };
            let _ = writeln!(s, "  {} [label=\"{}\", shape={}];", v.id, v.label.replace('"', "\\\""), shape);
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "  {u} -- {v};");
        }
        s.push('}');
        s.push('\n');
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.vertices,
            "edges": self.edges().iter().map(|&(u, v)| [u, v]).collect::<Vec<_>>(),
        })
    }
}

/// 𝒢_Π: atoms as vertices (vertex id = atom id), an edge for every pair sharing a rule.
pub fn primal_graph(p: &Program) -> Graph {
    primal_of_rules(p, p.rules().iter())
}

fn primal_of_rules<'a>(p: &Program, rules: impl Iterator<Item = &'a Rule>) -> Graph {
    let mut g = Graph::new();
    for n in p.names() {
        g.add_vertex(VertexKind::Atom, n);
    }
    for r in rules {
        let at: Vec<AtomId> = r.atoms().collect();
        for (i, &a) in at.iter().enumerate() {
            for &b in &at[i + 1..] {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// ℐ_Π: atom ids first, then rule i at vertex `num_atoms + i`.
pub fn incidence_graph(p: &Program) -> Graph {
    let mut g = Graph::new();
    for n in p.names() {
        g.add_vertex(VertexKind::Atom, n);
    }
    for r in p.rules() {
        let v = g.add_vertex(VertexKind::Rule, &r.label);
        for a in r.atoms() {
            g.add_edge(a, v);
        }
    }
    g
}

pub fn rule_vertex(p: &Program, rule: usize) -> VertexId {
    p.num_atoms() + rule
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleType {
    Type0,
    /// a ← ¬b
    Type1,
    /// a ∨ b ←
    Type2,
}

pub fn rule_type(r: &Rule) -> RuleType {
    match (r.head.len(), r.pos.len(), r.neg.len()) {
        (1, 0, 1) => RuleType::Type1,
        (2, 0, 0) => RuleType::Type2,
        _ => RuleType::Type0,
    }
}

/// (𝒢⁰, 𝒢¹, 𝒢²): primal graphs of the type-0, type-1 and type-2 rules.
pub fn typed_primal_graphs(p: &Program) -> (Graph, Graph, Graph) {
    let of = |t: RuleType| primal_of_rules(p, p.rules().iter().filter(move |r| rule_type(r) == t));
    (of(RuleType::Type0), of(RuleType::Type1), of(RuleType::Type2))
}
