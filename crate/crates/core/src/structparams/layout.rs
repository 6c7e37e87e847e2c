use serde::{Deserialize, Serialize};

use super::td::PathDecomposition;
use crate::error::{Error, Result};
use crate::graphs::{Graph, VertexId};

/// A linear ordering; `order[i]` is the vertex at position i + 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearLayout {
    pub order: Vec<VertexId>,
}

impl LinearLayout {
    /// Position of every vertex, or an error when the ordering is not a bijection onto the graph.
    pub fn positions(&self, n: usize) -> Result<Vec<usize>> {
        if self.order.len() != n {
            return Err(Error::Precondition(format!("layout has {} entries for {} vertices", self.order.len(), n)));
        }
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in self.order.iter().enumerate() {
            if v >= n || pos[v] != usize::MAX {
                return Err(Error::Precondition(format!("layout repeats or misses vertex {v}")));
            }
            pos[v] = i;
        }
        Ok(pos)
    }

    /// Whitespace-separated vertex ids.
    pub fn to_text(&self) -> String {
        self.order.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    }
}

pub fn layout_bandwidth(g: &Graph, f: &LinearLayout) -> Result<usize> {
    let pos = f.positions(g.num_vertices())?;
    Ok(g.edges().iter().map(|&(u, v)| pos[u].abs_diff(pos[v])).max().unwrap_or(0))
}

pub fn layout_cutwidth(g: &Graph, f: &LinearLayout) -> Result<usize> {
    let n = g.num_vertices();
    let pos = f.positions(n)?;
    // Difference array over gaps: edge (u, v) crosses gaps min..max-1.
    let mut delta = vec![0isize; n + 1];
    for (u, v) in g.edges() {
        let (a, b) = (pos[u].min(pos[v]), pos[u].max(pos[v]));
        delta[a] += 1;
        delta[b] -= 1;
    }
    let mut run = 0isize;
    let mut best = 0isize;
    for d in delta {
        run += d;
        best = best.max(run);
    }
    Ok(best as usize)
}

pub fn pd_bandwidth_bound(width: usize) -> usize {
    (2 * width).saturating_sub(1)
}

/// Layout from a PD in which every vertex occurs in at most two bags: bags are visited in path
/// order and each bag's new vertices get consecutive numbers, those continuing into the next bag last.
pub fn bandwidth_layout_from_pd(g: &Graph, pd: &PathDecomposition) -> Result<LinearLayout> {
    if !pd.two_bag_restricted() {
        return Err(Error::Precondition("some vertex occurs in more than two bags".into()));
    }
    let n = g.num_vertices();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for (i, bag) in pd.bags.iter().enumerate() {
        let next = pd.bags.get(i + 1);
        let fresh: Vec<VertexId> = bag.iter().copied().filter(|&v| v < n && !placed[v]).collect();
        let (cont, stay): (Vec<_>, Vec<_>) = fresh.into_iter().partition(|v| next.is_some_and(|b| b.contains(v)));
        for v in stay.into_iter().chain(cont) {
            placed[v] = true;
            order.push(v);
        }
    }
    order.extend((0..n).filter(|&v| !placed[v]));
    Ok(LinearLayout { order })
}

/// Cuthill–McKee order: BFS per component from a minimum-degree vertex, neighbours by degree.
pub fn cuthill_mckee(g: &Graph) -> LinearLayout {
    let n = g.num_vertices();
    let mut seen = vec![false; n];
    let mut by_degree: Vec<VertexId> = (0..n).collect();
    by_degree.sort_by_key(|&v| (g.degree(v), v));
    let mut order = Vec::with_capacity(n);
    for &s in &by_degree {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let start = order.len();
        order.push(s);
        let mut i = start;
        while i < order.len() {
            let mut next: Vec<VertexId> = g.neighbors(order[i]).iter().copied().filter(|&w| !seen[w]).collect();
            next.sort_by_key(|&w| (g.degree(w), w));
            for w in next {
                seen[w] = true;
                order.push(w);
            }
            i += 1;
        }
    }
    LinearLayout { order }
}

/// Minimum bandwidth by backtracking over positions, trying widths upwards.
pub fn exact_bandwidth(g: &Graph) -> (usize, LinearLayout) {
    let n = g.num_vertices();
    if g.num_edges() == 0 {
        return (0, LinearLayout { order: (0..n).collect() });
    }
    let lower = (0..n).map(|v| g.degree(v).div_ceil(2)).max().unwrap_or(0).max(1);
    for b in lower..n {
        let mut pos = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        if bw_place(g, b, &mut pos, &mut order) {
            return (b, LinearLayout { order });
        }
    }
    unreachable!("bandwidth n-1 always succeeds")
}

fn bw_place(g: &Graph, b: usize, pos: &mut [usize], order: &mut Vec<VertexId>) -> bool {
    let i = order.len();
    if i == pos.len() {
        return true;
    }
    for v in 0..pos.len() {
        if pos[v] != usize::MAX {
            continue;
        }
        if g.neighbors(v).iter().any(|&u| pos[u] != usize::MAX && i - pos[u] > b) {
            continue;
        }
        pos[v] = i;
        order.push(v);
        // The vertex leaving the window must have all neighbours placed.
        let ok = i < b || {
            let u = order[i - b];
            g.neighbors(u).iter().all(|&w| pos[w] != usize::MAX)
        };
        if ok && bw_place(g, b, pos, order) {
            return true;
        }
        order.pop();
        pos[v] = usize::MAX;
    }
    false
}

/// Minimum cutwidth by dynamic programming over the set of vertices placed first.
pub fn exact_cutwidth(g: &Graph) -> (usize, LinearLayout) {
    let n = g.num_vertices();
    assert!(n < 32, "exact cutwidth is limited to small graphs");
    let nbr: Vec<usize> = (0..n).map(|v| g.neighbors(v).iter().fold(0usize, |m, &w| m | 1 << w)).collect();
    let full = if n == 0 { 0 } else { (1usize << n) - 1 };
    let mut cut = vec![0usize; 1 << n];
    for set in 1..=full {
        let v = set.trailing_zeros() as usize;
        let rest = set & !(1 << v);
        // Adding v removes its edges into `rest` from the cut and adds those leaving.
        let inside = (nbr[v] & rest).count_ones() as usize;
        let outside = (nbr[v] & !set & full).count_ones() as usize;
        cut[set] = cut[rest] + outside - inside;
    }
    let mut best = vec![usize::MAX; 1 << n];
    let mut last = vec![0usize; 1 << n];
    best[0] = 0;
    for set in 1..=full {
        for v in 0..n {
            if set >> v & 1 == 1 {
                let rest = set & !(1 << v);
                let w = best[rest].max(cut[set]);
                if w < best[set] {
                    best[set] = w;
                    last[set] = v;
                }
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
    (best[full], LinearLayout { order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::primal_graph;
    use crate::program::parse_program;

    fn all_orders(n: usize) -> Vec<Vec<usize>> {
        fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == used.len() {
                out.push(cur.clone());
                return;
            }
            for v in 0..used.len() {
                if !used[v] {
                    used[v] = true;
                    cur.push(v);
                    go(cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        let mut out = Vec::new();
        go(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    #[test]
    fn pi1_bandwidth_and_cutwidth() {
        let g = primal_graph(&parse_program("b :- not a.\nb :- a, c.\na | d.\nc :- a, not d.").unwrap());
        let orders = all_orders(4);
        let bw = orders.iter().map(|o| layout_bandwidth(&g, &LinearLayout { order: o.clone() }).unwrap()).min();
        let cw = orders.iter().map(|o| layout_cutwidth(&g, &LinearLayout { order: o.clone() }).unwrap()).min();
        assert_eq!(bw, Some(2));
        assert_eq!(cw, Some(3));
        assert_eq!(exact_bandwidth(&g).0, 2);
        assert_eq!(exact_cutwidth(&g).0, 3);
    }

    #[test]
    fn edgeless_layouts() {
        let g = Graph::with_vertices(3);
        let f = LinearLayout { order: vec![2, 0, 1] };
        assert_eq!(layout_bandwidth(&g, &f).unwrap(), 0);
        assert_eq!(layout_cutwidth(&g, &f).unwrap(), 0);
        assert!(layout_bandwidth(&g, &LinearLayout { order: vec![0, 0, 1] }).is_err());
    }

    #[test]
    fn cuthill_mckee_on_path_and_star() {
        let p4 = Graph::from_edges(4, &[(2, 0), (0, 3), (3, 1)]);
        let f = cuthill_mckee(&p4);
        assert_eq!(f.order, vec![1, 3, 0, 2]);
        assert_eq!(layout_bandwidth(&p4, &f).unwrap(), 1);
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert!(star.num_vertices() == cuthill_mckee(&star).positions(5).unwrap().len());
    }

    #[test]
    fn pd_bandwidth_bound_on_path_and_triangle() {
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let pd = PathDecomposition { bags: vec![[0, 1].into(), [1, 2].into(), [2, 3].into()] };
        let f = bandwidth_layout_from_pd(&p4, &pd).unwrap();
        assert_eq!(f.order, vec![0, 1, 2, 3]);
        assert_eq!(layout_bandwidth(&p4, &f).unwrap(), 1);
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let pd = PathDecomposition { bags: vec![[0, 1, 2].into()] };
        let f = bandwidth_layout_from_pd(&k3, &pd).unwrap();
        assert!(layout_bandwidth(&k3, &f).unwrap() <= pd_bandwidth_bound(2));
        let three = PathDecomposition { bags: vec![[0, 1].into(), [1, 2].into(), [1, 3].into()] };
        assert!(bandwidth_layout_from_pd(&p4, &three).is_err());
    }

    #[test]
    fn exact_layouts_match_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(1..=6);
            let mut g = Graph::with_vertices(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.4) {
                        g.add_edge(u, v);
                    }
                }
            }
            let orders = all_orders(n);
            let bw = orders.iter().map(|o| layout_bandwidth(&g, &LinearLayout { order: o.clone() }).unwrap()).min().unwrap();
            let cw = orders.iter().map(|o| layout_cutwidth(&g, &LinearLayout { order: o.clone() }).unwrap()).min().unwrap();
            let (b, fb) = exact_bandwidth(&g);
            let (c, fc) = exact_cutwidth(&g);
            assert_eq!((b, c), (bw, cw));
            assert_eq!(layout_bandwidth(&g, &fb).unwrap(), b);
            assert_eq!(layout_cutwidth(&g, &fc).unwrap(), c);
        }
    }
}
