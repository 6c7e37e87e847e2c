use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{primal_graph, Graph, VertexId};
use crate::program::Program;

/// Largest graph handled by the exact width routines.
pub const EXACT_LIMIT: usize = 10;

pub type Bag = BTreeSet<VertexId>;

/// Rooted tree with a bag per node. `parent[root]` is `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Bag>,
    pub parent: Vec<Option<usize>>,
    pub root: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Inner,
    Join,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimality {
    Exact,
    UpperBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TdStrategy {
    MinFill,
    MinDegree,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdStrategy {
    Heuristic,
    Exact,
}

impl TreeDecomposition {
    pub fn single(bag: Bag) -> Self {
        TreeDecomposition { bags: vec![bag], parent: vec![None], root: 0 }
    }

    /// Bags in path order, first bag as root.
    pub fn path(bags: Vec<Bag>) -> Self {
        let parent = (0..bags.len()).map(|i| i.checked_sub(1)).collect();
        TreeDecomposition { bags, parent, root: 0 }
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Largest bag size minus one (0 for decompositions without non-empty bags).
    pub fn width(&self) -> usize {
        self.bags.iter().map(BTreeSet::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.bags.len()];
        for (t, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                ch[p].push(t);
            }
        }
        ch
    }

    pub fn kind(&self, children: &[Vec<usize>], t: usize) -> NodeKind {
        match children[t].len() {
            0 => NodeKind::Leaf,
            1 => NodeKind::Inner,
            _ => NodeKind::Join,
        }
    }

    /// Nodes with every child before its parent.
    pub fn post_order(&self) -> Vec<usize> {
        let ch = self.children();
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root, false)];
        while let Some((t, done)) = stack.pop() {
            if done {
                out.push(t);
            } else {
                stack.push((t, true));
                for &c in ch[t].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Every node has at most two children, joins copy their bag to both children and inner
    /// nodes differ from their child by at most one vertex.
    pub fn is_nice(&self) -> bool {
        let ch = self.children();
        (0..self.len()).all(|t| match ch[t].len() {
            0 => true,
            1 => self.bags[t].symmetric_difference(&self.bags[ch[t][0]]).count() <= 1,
            2 => ch[t].iter().all(|&c| self.bags[c] == self.bags[t]),
            _ => false,
        })
    }

    /// Nodes whose bag contains `v`.
    pub fn occurrences(&self, v: VertexId) -> usize {
        self.bags.iter().filter(|b| b.contains(&v)).count()
    }

    /// PACE `.td` text; bag and vertex numbers are 1-based.
    pub fn to_pace(&self, num_vertices: usize) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "s td {} {} {}", self.len(), self.width() + usize::from(!self.bags.iter().all(Bag::is_empty)), num_vertices);
        for (i, b) in self.bags.iter().enumerate() {
            let _ = write!(s, "b {}", i + 1);
            for v in b {
                let _ = write!(s, " {}", v + 1);
            }
            s.push('\n');
        }
        for (t, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                let _ = writeln!(s, "{} {}", p + 1, t + 1);
            }
        }
        s
    }

    /// Parses PACE `.td`; the first bag becomes the root.
    pub fn from_pace(text: &str) -> Result<(Self, usize)> {
        let bad = |line: usize, msg: &str| Error::Format(format!("line {}: {msg}", line + 1));
        let mut header: Option<(usize, usize)> = None;
        let mut bags: Vec<Option<Bag>> = Vec::new();
        let mut edges = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.first() {
                None | Some(&"c") => continue,
                Some(&"s") => {
                    if toks.len() != 5 || toks[1] != "td" || header.is_some() {
                        return Err(bad(ln, "malformed solution line"));
                    }
                    let nb: usize = toks[2].parse().map_err(|_| bad(ln, "bad bag count"))?;
                    let nv: usize = toks[4].parse().map_err(|_| bad(ln, "bad vertex count"))?;
                    header = Some((nb, nv));
                    bags = vec![None; nb];
                }
                Some(&"b") => {
                    let (nb, nv) = header.ok_or_else(|| bad(ln, "bag before solution line"))?;
                    let id: usize = toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| bad(ln, "bad bag id"))?;
                    if id == 0 || id > nb || bags[id - 1].is_some() {
                        return Err(bad(ln, "bag id out of range or repeated"));
                    }
                    let mut bag = Bag::new();
                    for t in &toks[2..] {
                        let v: usize = t.parse().map_err(|_| bad(ln, "bad vertex"))?;
                        if v == 0 || v > nv {
                            return Err(bad(ln, "vertex out of range"));
                        }
                        bag.insert(v - 1);
                    }
                    bags[id - 1] = Some(bag);
                }
                Some(_) => {
                    let (nb, _) = header.ok_or_else(|| bad(ln, "edge before solution line"))?;
                    if toks.len() != 2 {
                        return Err(bad(ln, "expected a tree edge"));
                    }
                    let u: usize = toks[0].parse().map_err(|_| bad(ln, "bad edge"))?;
                    let v: usize = toks[1].parse().map_err(|_| bad(ln, "bad edge"))?;
                    if u == 0 || v == 0 || u > nb || v > nb {
                        return Err(bad(ln, "edge endpoint out of range"));
                    }
                    edges.push((u - 1, v - 1));
                }
            }
        }
        let (nb, nv) = header.ok_or_else(|| Error::Format("missing solution line".into()))?;
        let bags: Vec<Bag> = bags.into_iter().map(|b| b.unwrap_or_default()).collect();
        if nb == 0 {
            return Ok((TreeDecomposition::single(Bag::new()), nv));
        }
        if edges.len() + 1 != nb {
            return Err(Error::Format(format!("{} tree edges for {} bags", edges.len(), nb)));
        }
        let mut adj = vec![Vec::new(); nb];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut parent = vec![None; nb];
        let mut seen = vec![false; nb];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Format("tree edges do not connect all bags".into()));
        }
        Ok((TreeDecomposition { bags, parent, root: 0 }, nv))
    }
}

/// Checks the tree shape and the three decomposition conditions against `g`.
pub fn check_td(g: &Graph, td: &TreeDecomposition) -> std::result::Result<(), String> {
    let n = td.len();
    if n == 0 || td.parent.len() != n || td.root >= n || td.parent[td.root].is_some() {
        return Err("malformed tree".into());
    }
    let mut depth_ok = vec![false; n];
    depth_ok[td.root] = true;
    for t in 0..n {
        let mut x = t;
        let mut steps = 0;
        while !depth_ok[x] {
            match td.parent[x] {
                Some(p) if p < n && steps <= n => {
                    x = p;
                    steps += 1;
                }
                _ => return Err(format!("node {t} does not reach the root")),
            }
        }
        let mut x = t;
        while !depth_ok[x] {
            depth_ok[x] = true;
            x = td.parent[x].unwrap();
        }
    }
    let nv = g.num_vertices();
    if let Some(v) = td.bags.iter().flatten().find(|&&v| v >= nv) {
        return Err(format!("bag mentions unknown vertex {v}"));
    }
    for v in 0..nv {
        if td.occurrences(v) == 0 {
            return Err(format!("vertex {} is in no bag", g.label(v)));
        }
    }
    for (u, v) in g.edges() {
        if !td.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            return Err(format!("edge {{{}, {}}} is in no bag", g.label(u), g.label(v)));
        }
    }
    // Connectedness: the nodes containing v minus one is the number of tree edges inside that set.
    let mut inside = vec![0usize; nv];
    let mut count = vec![0usize; nv];
    for t in 0..n {
        for &v in &td.bags[t] {
            count[v] += 1;
            if let Some(p) = td.parent[t] {
                if td.bags[p].contains(&v) {
                    inside[v] += 1;
                }
            }
        }
    }
    for v in 0..nv {
        if inside[v] + 1 != count[v] {
            return Err(format!("bags containing {} are not connected", g.label(v)));
        }
    }
    Ok(())
}

pub fn verify_td(g: &Graph, td: &TreeDecomposition) -> bool {
    check_td(g, td).is_ok()
}

/// Decomposition from an elimination ordering: the bag of v is v plus its later neighbours in the
/// fill-in graph, hung below the bag of the earliest of those neighbours.
fn td_from_ordering(g: &Graph, order: &[VertexId]) -> TreeDecomposition {
    let n = g.num_vertices();
    if n == 0 {
        return TreeDecomposition::single(Bag::new());
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<BTreeSet<VertexId>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut parent_vertex = vec![None; n];
    for &v in order {
        let later: Vec<VertexId> = adj[v].iter().copied().filter(|&w| pos[w] > pos[v]).collect();
        for (i, &a) in later.iter().enumerate() {
            for &b in &later[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        parent_vertex[v] = later.iter().copied().min_by_key(|&w| pos[w]);
        let mut bag: Bag = later.into_iter().collect();
        bag.insert(v);
        bags.push(bag);
    }
    // Node i is the bag of order[i]; components hang below the last node.
    let root = n - 1;
    let parent = order
        .iter()
        .enumerate()
        .map(|(i, &v)| if i == root { None } else { Some(parent_vertex[v].map_or(root, |w| pos[w])) })
        .collect();
    TreeDecomposition { bags, parent, root }
}

fn greedy_ordering(g: &Graph, fill: bool) -> Vec<VertexId> {
    let n = g.num_vertices();
    let mut adj: Vec<BTreeSet<VertexId>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive: BTreeSet<VertexId> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    while !alive.is_empty() {
        let score = |v: VertexId| -> usize {
            if fill {
                let nb: Vec<_> = adj[v].iter().copied().collect();
                let mut missing = 0;
                for (i, &a) in nb.iter().enumerate() {
                    for &b in &nb[i + 1..] {
                        if !adj[a].contains(&b) {
                            missing += 1;
                        }
                    }
                }
                missing
            } else {
                adj[v].len()
            }
        };
        let v = *alive.iter().min_by_key(|&&v| (score(v), v)).unwrap();
        let nb: Vec<_> = adj[v].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &nb {
            adj[a].remove(&v);
        }
        alive.remove(&v);
        order.push(v);
    }
    order
}

/// Vertices outside `set ∪ {v}` reachable from v through `set`.
fn q_size(g: &Graph, set: usize, v: VertexId) -> usize {
    let mut seen: usize = 1 << v;
    let mut stack = vec![v];
    let mut count = 0;
    while let Some(u) = stack.pop() {
        for &w in g.neighbors(u) {
            if seen >> w & 1 == 1 {
                continue;
            }
            seen |= 1 << w;
            if set >> w & 1 == 1 {
                stack.push(w);
            } else {
                count += 1;
            }
        }
    }
    count
}

/// Optimal elimination ordering by dynamic programming over vertex subsets.
fn exact_ordering(g: &Graph) -> Vec<VertexId> {
    let n = g.num_vertices();
    let full = (1usize << n) - 1;
    let mut best = vec![usize::MAX; 1 << n];
    let mut choice = vec![0usize; 1 << n];
    best[0] = 0;
    for set in 1..=full {
        for v in 0..n {
            if set >> v & 1 == 0 {
                continue;
            }
            let rest = set & !(1 << v);
            let w = best[rest].max(q_size(g, rest, v));
            if w < best[set] {
                best[set] = w;
                choice[set] = v;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut set = full;
    while set != 0 {
        let v = choice[set];
        order.push(v);
        set &= !(1 << v);
    }
    order.reverse();
    order
}

pub fn tree_decomposition(g: &Graph, strategy: TdStrategy) -> (TreeDecomposition, Optimality) {
    let n = g.num_vertices();
    match strategy {
        TdStrategy::Exact if n <= EXACT_LIMIT => (td_from_ordering(g, &exact_ordering(g)), Optimality::Exact),
        TdStrategy::MinDegree => (td_from_ordering(g, &greedy_ordering(g, false)), Optimality::UpperBound),
        _ => (td_from_ordering(g, &greedy_ordering(g, true)), Optimality::UpperBound),
    }
}

/// Nice TD of the same width: empty leaves with introduce chains, one-vertex steps between original
/// bags (forgets first) and binary joins over identical bags.
pub fn make_nice(td: &TreeDecomposition) -> TreeDecomposition {
    let ch = td.children();
    let mut out = TreeDecomposition { bags: Vec::new(), parent: Vec::new(), root: 0 };
    let push = |out: &mut TreeDecomposition, bag: Bag, children: &[usize]| -> usize {
        let id = out.bags.len();
        out.bags.push(bag);
        out.parent.push(None);
        for &c in children {
            out.parent[c] = Some(id);
        }
        id
    };
    let mut top = vec![usize::MAX; td.len()];
    for t in td.post_order() {
        let target = &td.bags[t];
        let mut heads = Vec::new();
        let mut sources: Vec<(usize, Bag)> = ch[t].iter().map(|&c| (top[c], td.bags[c].clone())).collect();
        if sources.is_empty() {
            let leaf = push(&mut out, Bag::new(), &[]);
            sources.push((leaf, Bag::new()));
        }
        for (mut node, mut bag) in sources {
            for v in bag.clone().difference(target) {
                bag.remove(v);
                node = push(&mut out, bag.clone(), &[node]);
            }
            for &v in target.difference(&bag.clone()) {
                bag.insert(v);
                node = push(&mut out, bag.clone(), &[node]);
            }
            heads.push(node);
        }
        while heads.len() > 1 {
            let a = heads.remove(0);
            let b = heads.remove(0);
            let j = push(&mut out, target.clone(), &[a, b]);
            heads.insert(0, j);
        }
        top[t] = heads[0];
    }
    out.root = top[td.root];
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedTD {
    pub td: TreeDecomposition,
    /// φ(a) per atom id.
    pub phi_atom: Vec<usize>,
    /// φ(r) per rule index.
    pub phi_rule: Vec<usize>,
}

impl AnnotatedTD {
    /// Items assigned to node t: (atoms, rules).
    pub fn assigned(&self, t: usize) -> (Vec<usize>, Vec<usize>) {
        let atoms = (0..self.phi_atom.len()).filter(|&a| self.phi_atom[a] == t).collect();
        let rules = (0..self.phi_rule.len()).filter(|&r| self.phi_rule[r] == t).collect();
        (atoms, rules)
    }
}

/// Gives every atom (by id) and then every rule a fresh copy of the lowest-index node whose bag
/// contains it, inserted directly above that node.
pub fn annotate(td: &TreeDecomposition, p: &Program) -> Result<AnnotatedTD> {
    let mut out = td.clone();
    let base = td.len();
    let place = |out: &mut TreeDecomposition, need: &[usize], what: &str| -> Result<usize> {
        let t = (0..base)
            .find(|&t| need.iter().all(|v| out.bags[t].contains(v)))
            .ok_or_else(|| Error::Precondition(format!("no bag contains {what}")))?;
        let id = out.bags.len();
        out.bags.push(out.bags[t].clone());
        out.parent.push(out.parent[t]);
        out.parent[t] = Some(id);
        if out.root == t {
            out.root = id;
        }
        Ok(id)
    };
    let mut phi_atom = Vec::with_capacity(p.num_atoms());
    for a in 0..p.num_atoms() {
        phi_atom.push(place(&mut out, &[a], p.name(a))?);
    }
    let mut phi_rule = Vec::with_capacity(p.num_rules());
    for r in p.rules() {
        let at: Vec<usize> = r.atoms().collect();
        phi_rule.push(place(&mut out, &at, &format!("the atoms of {}", r.label))?);
    }
    Ok(AnnotatedTD { td: out, phi_atom, phi_rule })
}

pub fn verify_annotated(p: &Program, a: &AnnotatedTD) -> std::result::Result<(), String> {
    check_td(&primal_graph(p), &a.td)?;
    if !a.td.is_nice() {
        return Err("decomposition is not nice".into());
    }
    if a.phi_atom.len() != p.num_atoms() || a.phi_rule.len() != p.num_rules() {
        return Err("annotation does not cover every atom and rule".into());
    }
    let mut used = HashMap::new();
    for (i, &t) in a.phi_atom.iter().chain(&a.phi_rule).enumerate() {
        if t >= a.td.len() {
            return Err(format!("annotation points to missing node {t}"));
        }
        if let Some(j) = used.insert(t, i) {
            return Err(format!("annotation is not injective (items {j} and {i} share node {t})"));
        }
    }
    for (x, &t) in a.phi_atom.iter().enumerate() {
        if !a.td.bags[t].contains(&x) {
            return Err(format!("{} is not in the bag of its node", p.name(x)));
        }
    }
    for (r, &t) in a.phi_rule.iter().enumerate() {
        if !p.rule(r).atoms().all(|x| a.td.bags[t].contains(&x)) {
            return Err(format!("atoms of {} are not in the bag of its node", p.rule(r).label));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathDecomposition {
    pub bags: Vec<Bag>,
}

impl PathDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(BTreeSet::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Every vertex occurs in at most two bags.
    pub fn two_bag_restricted(&self) -> bool {
        let mut count: HashMap<VertexId, usize> = HashMap::new();
        for b in &self.bags {
            for &v in b {
                *count.entry(v).or_default() += 1;
            }
        }
        count.values().all(|&c| c <= 2)
    }

    pub fn to_td(&self) -> TreeDecomposition {
        if self.bags.is_empty() {
            return TreeDecomposition::single(Bag::new());
        }
        TreeDecomposition::path(self.bags.clone())
    }
}

pub fn verify_pd(g: &Graph, pd: &PathDecomposition) -> bool {
    verify_td(g, &pd.to_td())
}

/// Bags of a vertex-separation layout, with bags contained in a neighbour dropped.
fn pd_from_layout(g: &Graph, order: &[VertexId]) -> PathDecomposition {
    let n = g.num_vertices();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut bags: Vec<Bag> = Vec::with_capacity(n);
    for (i, &v) in order.iter().enumerate() {
        let mut bag: Bag = order[..i].iter().copied().filter(|&u| g.neighbors(u).iter().any(|&w| pos[w] >= i)).collect();
        bag.insert(v);
        bags.push(bag);
    }
    let mut out: Vec<Bag> = Vec::new();
    for b in bags {
        if out.last().is_some_and(|l| l.is_subset(&b)) {
            out.pop();
        }
        if out.last().is_none_or(|l| !b.is_subset(l)) {
            out.push(b);
        }
    }
    PathDecomposition { bags: out }
}

/// Optimal vertex-separation layout by dynamic programming over subsets.
fn exact_layout(g: &Graph) -> Vec<VertexId> {
    let n = g.num_vertices();
    let full = (1usize << n) - 1;
    let mut best = vec![usize::MAX; 1 << n];
    let mut last = vec![0usize; 1 << n];
    best[0] = 0;
    for set in 1..=full {
        for v in 0..n {
            if set >> v & 1 == 0 {
                continue;
            }
            let rest = set & !(1 << v);
            // Bag at v: v plus the vertices placed before it that still have a neighbour at or after v.
            let sep = (0..n).filter(|&u| rest >> u & 1 == 1 && g.neighbors(u).iter().any(|&w| rest >> w & 1 == 0)).count();
            let w = best[rest].max(sep);
            if w < best[set] {
                best[set] = w;
                last[set] = v;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut set = full;
    while set != 0 {
        let v = last[set];
        order.push(v);
        set &= !(1 << v);
    }
    order.reverse();
    order
}

pub fn path_decomposition(g: &Graph, strategy: PdStrategy) -> (PathDecomposition, Optimality) {
    let n = g.num_vertices();
    if n == 0 {
        return (PathDecomposition { bags: vec![Bag::new()] }, Optimality::Exact);
    }
    if strategy == PdStrategy::Exact && n <= EXACT_LIMIT {
        return (pd_from_layout(g, &exact_layout(g)), Optimality::Exact);
    }
    let mut orders = vec![greedy_ordering(g, true), greedy_ordering(g, false)];
    orders.iter_mut().for_each(|o| o.reverse());
    orders.push((0..n).collect());
    let best = orders.into_iter().map(|o| pd_from_layout(g, &o)).min_by_key(PathDecomposition::width).unwrap();
    (best, Optimality::UpperBound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;
    use rand::{Rng, SeedableRng};

    const PI1: &str = "b :- not a.\nb :- a, c.\na | d.\nc :- a, not d.";

    fn k(n: usize) -> Graph {
        let mut g = Graph::with_vertices(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
        let mut g = Graph::with_vertices(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Treewidth as the minimum over all orderings of the largest later-neighbourhood.
    fn brute_tw(g: &Graph) -> usize {
        let n = g.num_vertices();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = usize::MAX;
        permute(&mut perm, 0, &mut |o| best = best.min(td_from_ordering(g, o).width()));
        best
    }

    /// Pathwidth as the minimum over all layouts of the largest bag of the layout decomposition.
    fn brute_pw(g: &Graph) -> usize {
        let n = g.num_vertices();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = usize::MAX;
        permute(&mut perm, 0, &mut |o| {
            let pos: Vec<usize> = {
                let mut p = vec![0; n];
                for (i, &v) in o.iter().enumerate() {
                    p[v] = i;
                }
                p
            };
            let w = (0..n)
                .map(|i| (0..i).filter(|&j| g.neighbors(o[j]).iter().any(|&w| pos[w] >= i)).count())
                .max()
                .unwrap_or(0);
            best = best.min(w);
        });
        best
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    #[test]
    fn widths_of_examples() {
        let g = primal_graph(&parse_program(PI1).unwrap());
        let (td, opt) = tree_decomposition(&g, TdStrategy::Exact);
        assert_eq!(opt, Optimality::Exact);
        assert!(verify_td(&g, &td));
        assert_eq!(td.width(), 2);
        let (pd, _) = path_decomposition(&g, PdStrategy::Exact);
        assert!(verify_pd(&g, &pd));
        assert_eq!(pd.width(), 2);
        let tree = Graph::from_edges(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]);
        assert_eq!(tree_decomposition(&tree, TdStrategy::Exact).0.width(), 1);
        assert_eq!(tree_decomposition(&k(5), TdStrategy::Exact).0.width(), 4);
        assert_eq!(path_decomposition(&k(4), PdStrategy::Exact).0.width(), 3);
    }

    #[test]
    fn path_graph_pd() {
        let p5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let (pd, _) = path_decomposition(&p5, PdStrategy::Exact);
        assert_eq!(pd.width(), 1);
        assert!(pd.two_bag_restricted());
        assert_eq!(pd.bags.len(), 4);
    }

    #[test]
    fn figure_td_verifies() {
        let p = parse_program(PI1).unwrap();
        let mut g = primal_graph(&p);
        let bags = vec![p.set_from_names(&["a", "b", "c"]).unwrap(), p.set_from_names(&["a", "c", "d"]).unwrap()];
        let td = TreeDecomposition::path(bags);
        assert!(verify_td(&g, &td));
        g.add_edge(p.atom_id("b").unwrap(), p.atom_id("d").unwrap());
        assert!(!verify_td(&g, &td));
        let nice = make_nice(&td);
        assert!(nice.is_nice());
        assert_eq!(nice.width(), 2);
        assert!(verify_td(&primal_graph(&p), &nice));
    }

    #[test]
    fn disconnected_bags_rejected() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let td = TreeDecomposition::path(vec![[0, 1].into(), [1, 2].into(), [0].into()]);
        assert!(check_td(&g, &td).unwrap_err().contains("not connected"));
    }

    #[test]
    fn nice_single_bag() {
        let td = TreeDecomposition::single([0, 1].into());
        let nice = make_nice(&td);
        assert_eq!(nice.len(), 3);
        assert!(nice.bags.contains(&Bag::new()));
        assert!(nice.is_nice());
        assert_eq!(nice.width(), 1);
    }

    #[test]
    fn annotation_of_pi1() {
        let p = parse_program(PI1).unwrap();
        let bags = vec![p.set_from_names(&["a", "b", "c"]).unwrap(), p.set_from_names(&["a", "c", "d"]).unwrap()];
        let nice = make_nice(&TreeDecomposition::path(bags));
        let ann = annotate(&nice, &p).unwrap();
        verify_annotated(&p, &ann).unwrap();
        assert!(ann.td.len() <= nice.len() + p.num_atoms() + p.num_rules());
        assert_eq!(ann.td.width(), nice.width());
        let abc = p.set_from_names(&["a", "b", "c"]).unwrap();
        for r in 0..2 {
            assert_eq!(ann.td.bags[ann.phi_rule[r]], abc);
        }
        for r in 2..4 {
            assert!(ann.td.bags[ann.phi_rule[r]].contains(&p.atom_id("d").unwrap()));
        }
    }

    #[test]
    fn annotation_single_rule() {
        let p = parse_program("a :- b.").unwrap();
        let nice = make_nice(&TreeDecomposition::single([0, 1].into()));
        let ann = annotate(&nice, &p).unwrap();
        verify_annotated(&p, &ann).unwrap();
        assert_eq!(ann.td.len(), nice.len() + 3);
    }

    #[test]
    fn annotation_rejects_uncovered_rule() {
        let p = parse_program("a :- b.").unwrap();
        let td = TreeDecomposition::path(vec![[0].into(), [1].into()]);
        assert!(annotate(&td, &p).is_err());
    }

    #[test]
    fn pace_round_trip() {
        let td = TreeDecomposition::path(vec![[0, 1].into(), [1, 2].into()]);
        let text = td.to_pace(3);
        assert!(text.starts_with("s td 2 2 3\n"));
        let (back, nv) = TreeDecomposition::from_pace(&text).unwrap();
        assert_eq!(nv, 3);
        assert_eq!(back, td);
        assert!(TreeDecomposition::from_pace("b 1 1\n").is_err());
        assert!(TreeDecomposition::from_pace("s td 2 1 2\nb 1 1\nb 2 2\n").is_err());
    }

    #[test]
    fn exact_widths_match_permutation_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(1..=7);
            let g = random_graph(&mut rng, n, 0.4);
            let (td, _) = tree_decomposition(&g, TdStrategy::Exact);
            assert!(verify_td(&g, &td));
            assert_eq!(td.width(), brute_tw(&g));
            let (pd, _) = path_decomposition(&g, PdStrategy::Exact);
            assert!(verify_pd(&g, &pd));
            assert_eq!(pd.width(), brute_pw(&g));
        }
    }

    #[test]
    fn heuristics_are_valid_and_nice_preserves_width() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..60 {
            let n = rng.gen_range(1..=14);
            let g = random_graph(&mut rng, n, 0.3);
            for s in [TdStrategy::MinFill, TdStrategy::MinDegree, TdStrategy::Exact] {
                let (td, _) = tree_decomposition(&g, s);
                assert!(verify_td(&g, &td));
                let nice = make_nice(&td);
                assert!(nice.is_nice());
                assert!(verify_td(&g, &nice));
                assert_eq!(nice.width(), td.width());
            }
            let (pd, _) = path_decomposition(&g, PdStrategy::Heuristic);
            assert!(verify_pd(&g, &pd));
        }
    }
}
