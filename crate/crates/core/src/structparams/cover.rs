use std::collections::BTreeSet;

use crate::graphs::{primal_graph, Graph, VertexId};
use crate::program::{AtomId, Program};

pub fn verify_vertex_cover(g: &Graph, s: &BTreeSet<VertexId>) -> bool {
    g.edges().iter().all(|(u, v)| s.contains(u) || s.contains(v))
}

/// Minimum vertex cover by branching on a maximum-degree vertex (take it, or take all its neighbours).
/// With `budget`, returns `None` when no cover of that size exists.
pub fn min_vertex_cover(g: &Graph, budget: Option<usize>) -> Option<BTreeSet<VertexId>> {
    let limit = budget.unwrap_or(g.num_vertices());
    (0..=limit).find_map(|k| {
        let mut alive = vec![true; g.num_vertices()];
        let mut chosen = Vec::new();
        vc_branch(g, &mut alive, &mut chosen, k).then(|| chosen.into_iter().collect())
    })
}

fn vc_branch(g: &Graph, alive: &mut [bool], chosen: &mut Vec<VertexId>, k: usize) -> bool {
    let live_deg = |v: VertexId, alive: &[bool]| g.neighbors(v).iter().filter(|&&w| alive[w]).count();
    let mut best: Option<(usize, VertexId)> = None;
    for v in 0..g.num_vertices() {
        if alive[v] {
            let d = live_deg(v, alive);
            if d > 0 && best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, v));
            }
        }
    }
    let Some((deg, v)) = best else { return true };
    if k == 0 {
        return false;
    }
    // A vertex of degree one never needs to be taken itself.
    if deg == 1 {
        if let Some(u) = (0..g.num_vertices()).find(|&u| alive[u] && live_deg(u, alive) == 1) {
            let w = *g.neighbors(u).iter().find(|&&w| alive[w]).unwrap();
            alive[w] = false;
            chosen.push(w);
            if vc_branch(g, alive, chosen, k - 1) {
                return true;
            }
            chosen.pop();
            alive[w] = true;
            return false;
        }
    }
    alive[v] = false;
    chosen.push(v);
    if vc_branch(g, alive, chosen, k - 1) {
        return true;
    }
    chosen.pop();
    alive[v] = true;

    let nbrs: Vec<VertexId> = g.neighbors(v).iter().copied().filter(|&w| alive[w]).collect();
    if nbrs.len() <= k {
        for &w in &nbrs {
            alive[w] = false;
            chosen.push(w);
        }
        if vc_branch(g, alive, chosen, k - nbrs.len()) {
            return true;
        }
        for &w in &nbrs {
            alive[w] = true;
            chosen.pop();
        }
    }
    false
}

pub fn verify_fvs(g: &Graph, s: &BTreeSet<VertexId>) -> bool {
    g.is_acyclic_without(s)
}

/// Minimum feedback vertex set: iterative deepening, branching over the vertices of a shortest cycle.
pub fn min_fvs(g: &Graph) -> BTreeSet<VertexId> {
    for k in 0..=g.num_vertices() {
        let mut removed = BTreeSet::new();
        if fvs_branch(g, &mut removed, k) {
            return removed;
        }
    }
    unreachable!("removing every vertex leaves no cycle")
}

fn fvs_branch(g: &Graph, removed: &mut BTreeSet<VertexId>, k: usize) -> bool {
    let Some(cycle) = shortest_cycle(g, removed) else { return true };
    if k == 0 {
        return false;
    }
    for v in cycle {
        removed.insert(v);
        if fvs_branch(g, removed, k - 1) {
            return true;
        }
        removed.remove(&v);
    }
    false
}

/// Vertices of a shortest cycle avoiding `removed`, sorted; found by BFS from every vertex.
fn shortest_cycle(g: &Graph, removed: &BTreeSet<VertexId>) -> Option<Vec<VertexId>> {
    let n = g.num_vertices();
    let mut best: Option<Vec<VertexId>> = None;
    for s in 0..n {
        if removed.contains(&s) {
            continue;
        }
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if removed.contains(&w) || w == parent[u] {
                    continue;
                }
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else {
                    let len = dist[u] + dist[w] + 1;
                    if best.as_ref().is_none_or(|b| len < b.len()) {
                        let mut cyc = BTreeSet::new();
                        for mut x in [u, w] {
                            while x != usize::MAX {
                                cyc.insert(x);
                                x = parent[x];
                            }
                        }
                        // The two tree paths may meet below s; the union still contains a cycle through u–w.
                        best = Some(cyc.into_iter().collect());
                    }
                }
            }
        }
    }
    best
}

/// Atom pairs outside `s` that occur together in two or more rules.
pub fn violating_pairs(p: &Program, s: &BTreeSet<AtomId>) -> Vec<(AtomId, AtomId)> {
    let mut count = std::collections::BTreeMap::new();
    for r in p.rules() {
        let at: Vec<AtomId> = {
            let mut v: Vec<_> = r.atoms().filter(|a| !s.contains(a)).collect();
            v.sort_unstable();
            v
        };
        for (i, &a) in at.iter().enumerate() {
            for &b in &at[i + 1..] {
                *count.entry((a, b)).or_insert(0usize) += 1;
            }
        }
    }
    count.into_iter().filter(|&(_, c)| c >= 2).map(|(k, _)| k).collect()
}

pub fn is_sparse(p: &Program, s: &BTreeSet<AtomId>) -> bool {
    violating_pairs(p, s).is_empty()
}

/// Greedy augmentation: repeatedly add the atom occurring in most violating pairs (lowest id on ties).
pub fn sparsify_fvs(p: &Program, s: &BTreeSet<AtomId>) -> BTreeSet<AtomId> {
    let mut out = s.clone();
    loop {
        let pairs = violating_pairs(p, &out);
        if pairs.is_empty() {
            return out;
        }
        let mut hits = vec![0usize; p.num_atoms()];
        for (a, b) in pairs {
            hits[a] += 1;
            hits[b] += 1;
        }
        let best = (0..p.num_atoms()).max_by_key(|&a| (hits[a], std::cmp::Reverse(a))).unwrap();
        out.insert(best);
    }
}

/// Smallest FVS of 𝒢_p that is also sparse, by increasing-size subset enumeration (lexicographically
/// first among the smallest).
pub fn min_sparse_fvs(p: &Program) -> BTreeSet<AtomId> {
    let g = primal_graph(p);
    let n = p.num_atoms();
    for k in 0..=n {
        let mut found = None;
        for_each_subset(n, k, &mut |s| {
            if found.is_none() && g.is_acyclic_without(s) && is_sparse(p, s) {
                found = Some(s.clone());
            }
            found.is_some()
        });
        if let Some(s) = found {
            return s;
        }
    }
    (0..n).collect()
}

/// Visits the k-subsets of 0..n in lexicographic order until `f` returns true.
fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&BTreeSet<usize>) -> bool) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let set: BTreeSet<usize> = idx.iter().copied().collect();
        if f(&set) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}
