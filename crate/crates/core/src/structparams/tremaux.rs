use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{Graph, VertexId};

/// Rooted spanning forest given by parent pointers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TremauxTree {
    pub parent: Vec<Option<VertexId>>,
}

impl TremauxTree {
    /// Depth of every vertex in edges, or `None` if the parent pointers contain a cycle.
    pub fn depths(&self) -> Option<Vec<usize>> {
        let n = self.parent.len();
        let mut depth = vec![usize::MAX; n];
        for v in 0..n {
            let mut path = Vec::new();
            let mut x = v;
            while depth[x] == usize::MAX {
                path.push(x);
                if path.len() > n {
                    return None;
                }
                match self.parent[x] {
                    Some(p) if p < n => x = p,
                    Some(_) => return None,
                    None => {
                        depth[x] = 0;
                        path.pop();
                        break;
                    }
                }
            }
            let mut d = depth[x];
            for &y in path.iter().rev() {
                d += 1;
                depth[y] = d;
            }
        }
        Some(depth)
    }

    pub fn is_ancestor(&self, a: VertexId, mut v: VertexId) -> bool {
        loop {
            if v == a {
                return true;
            }
            match self.parent[v] {
                Some(p) => v = p,
                None => return false,
            }
        }
    }
}

/// Height in edges of a Trémaux tree of `g`; errors if it does not span `g` or some edge joins
/// two vertices neither of which is an ancestor of the other.
pub fn verify_tremaux(g: &Graph, t: &TremauxTree) -> Result<usize> {
    if t.parent.len() != g.num_vertices() {
        return Err(Error::Verification(format!("tree has {} vertices, graph has {}", t.parent.len(), g.num_vertices())));
    }
    let depth = t.depths().ok_or_else(|| Error::Verification("parent pointers contain a cycle".into()))?;
    for (u, v) in g.edges() {
        if !t.is_ancestor(u, v) && !t.is_ancestor(v, u) {
            return Err(Error::Verification(format!("edge {{{}, {}}} is not ancestor-descendant", g.label(u), g.label(v))));
        }
    }
    Ok(depth.into_iter().max().unwrap_or(0))
}

/// S stacked as a chain (in the given order) with a minimum-height elimination tree of every
/// component of G − S hung below its last vertex.
pub fn treedepth_witness_from_fvs(g: &Graph, s: &[VertexId]) -> Result<TremauxTree> {
    let in_s: BTreeSet<VertexId> = s.iter().copied().collect();
    if !g.is_acyclic_without(&in_s) {
        return Err(Error::Precondition("removing S leaves a cycle".into()));
    }
    let mut parent = vec![None; g.num_vertices()];
    for w in s.windows(2) {
        parent[w[1]] = Some(w[0]);
    }
    let anchor = s.last().copied();
    for comp in g.components(&|v| !in_s.contains(&v)) {
        let set: BTreeSet<VertexId> = comp.into_iter().collect();
        eliminate(g, &set, anchor, &mut parent);
    }
    Ok(TremauxTree { parent })
}

/// Elimination tree of a tree component: exact by memoised search for small components,
/// centroid splitting otherwise.
fn eliminate(g: &Graph, comp: &BTreeSet<VertexId>, above: Option<VertexId>, parent: &mut [Option<VertexId>]) {
    let root = if comp.len() <= 16 {
        let verts: Vec<VertexId> = comp.iter().copied().collect();
        let mut memo = HashMap::new();
        best_root(g, &verts, &mut memo).1
    } else {
        centroid(g, comp)
    };
    parent[root] = above;
    let mut rest = comp.clone();
    rest.remove(&root);
    for sub in g.components(&|v| rest.contains(&v)) {
        eliminate(g, &sub.into_iter().collect(), Some(root), parent);
    }
}

/// (height in vertices, best root) for the connected vertex set `verts` (sorted).
fn best_root(g: &Graph, verts: &[VertexId], memo: &mut HashMap<Vec<VertexId>, (usize, VertexId)>) -> (usize, VertexId) {
    if let Some(&r) = memo.get(verts) {
        return r;
    }
    let mut best = (usize::MAX, verts[0]);
    for &v in verts {
        let rest: BTreeSet<VertexId> = verts.iter().copied().filter(|&u| u != v).collect();
        let mut h = 0;
        for sub in g.components(&|u| rest.contains(&u)) {
            h = h.max(best_root(g, &sub, memo).0);
            if h + 1 >= best.0 {
                break;
            }
        }
        if h + 1 < best.0 {
            best = (h + 1, v);
        }
    }
    memo.insert(verts.to_vec(), best);
    best
}

fn centroid(g: &Graph, comp: &BTreeSet<VertexId>) -> VertexId {
    let largest_after = |v: VertexId| {
        let rest: BTreeSet<VertexId> = comp.iter().copied().filter(|&u| u != v).collect();
        g.components(&|u| rest.contains(&u)).iter().map(Vec::len).max().unwrap_or(0)
    };
    *comp.iter().min_by_key(|&&v| (largest_after(v), v)).unwrap()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlmostPaths {
    pub ok: bool,
    /// Longest path (in edges) over the components of G − S.
    pub max_path_len: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Whether G − S is a disjoint union of paths whose vertices may each carry one extra pendant
/// neighbour: a forest of maximum degree 3 in which the non-leaf vertices of each component form a path.
pub fn check_almost_paths(g: &Graph, s: &BTreeSet<VertexId>) -> AlmostPaths {
    let fail = |reason: String, len| AlmostPaths { ok: false, max_path_len: len, reason: Some(reason) };
    if !g.is_acyclic_without(s) {
        return fail("G − S has a cycle".into(), 0);
    }
    let alive = |v: VertexId| !s.contains(&v);
    let deg = |v: VertexId| g.neighbors(v).iter().filter(|&&w| alive(w)).count();
    let mut longest = 0;
    for comp in g.components(&alive) {
        longest = longest.max(diameter(g, &comp, &alive));
        if let Some(&v) = comp.iter().find(|&&v| deg(v) > 3) {
            return fail(format!("{} has degree {}", g.label(v), deg(v)), longest);
        }
        if comp.len() <= 2 {
            continue;
        }
        let core: Vec<VertexId> = comp.iter().copied().filter(|&v| deg(v) > 1).collect();
        let core_deg = |v: VertexId| g.neighbors(v).iter().filter(|&&w| alive(w) && deg(w) > 1).count();
        if let Some(&v) = core.iter().find(|&&v| core_deg(v) > 2) {
            return fail(format!("{} branches", g.label(v)), longest);
        }
    }
    AlmostPaths { ok: true, max_path_len: longest, reason: None }
}

/// Longest shortest path in edges within a tree component (two BFS sweeps).
fn diameter(g: &Graph, comp: &[VertexId], alive: &dyn Fn(VertexId) -> bool) -> usize {
    let bfs = |s: VertexId| -> (VertexId, usize) {
        let mut dist: HashMap<VertexId, usize> = HashMap::from([(s, 0)]);
        let mut queue = std::collections::VecDeque::from([s]);
        let mut far = (s, 0);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            if d > far.1 {
                far = (u, d);
            }
            for &w in g.neighbors(u) {
                if alive(w) && !dist.contains_key(&w) {
                    dist.insert(w, d + 1);
                    queue.push_back(w);
                }
            }
        }
        far
    };
    let (a, _) = bfs(comp[0]);
    bfs(a).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::primal_graph;
    use crate::program::parse_program;

    #[test]
    fn pi1_witness_from_fvs() {
        let p = parse_program("b :- not a.\nb :- a, c.\na | d.\nc :- a, not d.").unwrap();
        let g = primal_graph(&p);
        let a = p.atom_id("a").unwrap();
        let t = treedepth_witness_from_fvs(&g, &[a]).unwrap();
        assert_eq!(verify_tremaux(&g, &t).unwrap(), 2);
        let c = p.atom_id("c").unwrap();
        assert_eq!(t.parent[c], Some(a));
        assert_eq!(t.parent[p.atom_id("b").unwrap()], Some(c));
        assert_eq!(t.parent[p.atom_id("d").unwrap()], Some(c));
    }

    #[test]
    fn degenerate_witnesses() {
        let one = Graph::with_vertices(1);
        assert_eq!(verify_tremaux(&one, &treedepth_witness_from_fvs(&one, &[]).unwrap()).unwrap(), 0);
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(verify_tremaux(&tri, &treedepth_witness_from_fvs(&tri, &[0, 1, 2]).unwrap()).unwrap(), 2);
        assert!(treedepth_witness_from_fvs(&tri, &[]).is_err());
    }

    #[test]
    fn tremaux_rejections() {
        let e = Graph::from_edges(3, &[(0, 1)]);
        let siblings = TremauxTree { parent: vec![Some(2), Some(2), None] };
        assert!(verify_tremaux(&e, &siblings).is_err());
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let mid = TremauxTree { parent: vec![Some(1), None, Some(1)] };
        assert_eq!(verify_tremaux(&p3, &mid).unwrap(), 1);
        let cyclic = TremauxTree { parent: vec![Some(1), Some(0), None] };
        assert!(verify_tremaux(&p3, &cyclic).is_err());
    }

    #[test]
    fn path_height_is_logarithmic() {
        for n in 1..40usize {
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            let g = Graph::from_edges(n, &edges);
            let h = verify_tremaux(&g, &treedepth_witness_from_fvs(&g, &[]).unwrap()).unwrap();
            let l = n - 1;
            assert!(h as f64 <= ((l + 1) as f64).log2().ceil(), "n={n} h={h}");
        }
    }

    #[test]
    fn almost_paths() {
        // spine 0-1-2-3 with pendants 4..7
        let cat = Graph::from_edges(8, &[(0, 1), (1, 2), (2, 3), (0, 4), (1, 5), (2, 6), (3, 7)]);
        let r = check_almost_paths(&cat, &BTreeSet::new());
        assert!(r.ok);
        assert_eq!(r.max_path_len, 5);
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(!check_almost_paths(&tri, &BTreeSet::new()).ok);
        assert!(check_almost_paths(&tri, &[1].into()).ok);
        // a spider with three legs of length two branches in its core
        let spider = Graph::from_edges(7, &[(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]);
        assert!(!check_almost_paths(&spider, &BTreeSet::new()).ok);
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert!(!check_almost_paths(&star, &BTreeSet::new()).ok);
    }
}
