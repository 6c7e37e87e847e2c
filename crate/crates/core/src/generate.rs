//! Seeded random instances: programs, graphs with two-bag path decompositions, and 3-CNFs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graphs::Graph;
use crate::program::{completion, is_fully_tight, AtomId, Program};
use crate::reductions::Cnf;
use crate::structparams::PathDecomposition;

pub use rand_chacha::ChaCha8Rng as Rng64;

pub fn rng(seed: u64) -> Rng64 {
    rand::SeedableRng::seed_from_u64(seed)
}

fn atom_table(n: usize) -> Program {
    let mut p = Program::new();
    for i in 0..n {
        p.intern(&format!("p{i}"));
    }
    p
}

/// Random normalized tight program. Positive body atoms always have a smaller id than every head
/// atom; any that would not are moved to the negative body.
pub fn random_tight_program<R: Rng>(rng: &mut R, atoms: usize, rules: usize) -> Program {
    random_rules(rng, atoms, rules, true)
}

/// Random normalized program; positive cycles allowed.
pub fn random_normalized_program<R: Rng>(rng: &mut R, atoms: usize, rules: usize) -> Program {
    random_rules(rng, atoms, rules, false)
}

fn random_rules<R: Rng>(rng: &mut R, atoms: usize, rules: usize, tight: bool) -> Program {
    assert!(atoms >= 1);
    let mut p = atom_table(atoms);
    let ids: Vec<AtomId> = (0..atoms).collect();
    while p.num_rules() < rules {
        let size = rng.gen_range(1..=3.min(atoms));
        let chosen: Vec<AtomId> = ids.choose_multiple(rng, size).copied().collect();
        let heads = match size {
            1 => 1,
            _ => rng.gen_range(0..=2.min(size)),
        };
        let (head, body) = chosen.split_at(heads);
        let low = head.iter().min().copied().unwrap_or(usize::MAX);
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for &b in body {
            if rng.gen_bool(0.5) && (b < low || !tight) {
                pos.push(b);
            } else {
                neg.push(b);
            }
        }
        p.add_rule(head, &pos, &neg).expect("distinct atoms");
    }
    p
}

/// Random program closed under completion: a base program in which every atom heads exactly one
/// rule, completed with singleton simplification, kept when the brute-force check confirms full
/// tightness.
pub fn random_fully_tight<R: Rng>(rng: &mut R, atoms: usize) -> Program {
    loop {
        let mut base = atom_table(atoms);
        let mut order: Vec<AtomId> = (0..atoms).collect();
        order.shuffle(rng);
        let mut free = vec![true; atoms];
        for &h in &order {
            if !free[h] {
                continue;
            }
            free[h] = false;
            let mut head = vec![h];
            if rng.gen_bool(0.2) {
                if let Some(&k) = order.iter().find(|&&k| free[k]) {
                    free[k] = false;
                    head.push(k);
                }
            }
            let low = *head.iter().min().unwrap();
            let others: Vec<AtomId> = (0..atoms).filter(|a| !head.contains(a)).collect();
            let room = (3 - head.len()).min(others.len());
            let size = rng.gen_range(0..=room);
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            for b in others.choose_multiple(rng, size).copied() {
                if b < low && rng.gen_bool(0.5) {
                    pos.push(b);
                } else {
                    neg.push(b);
                }
            }
            base.add_rule(&head, &pos, &neg).expect("distinct atoms");
        }
        let p = completion(&base, true);
        if p.is_normalized() && is_fully_tight(&p, 16).unwrap_or(false) {
            return p;
        }
    }
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> Graph {
    let mut g = Graph::with_vertices(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Graph with a path decomposition of at most `width + 1` vertices per bag in which every vertex
/// lies in one bag or two consecutive bags; edges are drawn inside bags.
pub fn random_two_bag_pd<R: Rng>(rng: &mut R, bags: usize, width: usize) -> (Graph, PathDecomposition) {
    let cap = width + 1;
    let mut pd: Vec<std::collections::BTreeSet<usize>> = Vec::with_capacity(bags);
    let mut carried: Vec<usize> = Vec::new();
    let mut next = 0;
    for i in 0..bags {
        let mut bag: std::collections::BTreeSet<usize> = carried.iter().copied().collect();
        let fresh = rng.gen_range(usize::from(bag.is_empty())..=cap - bag.len());
        for _ in 0..fresh {
            bag.insert(next);
            next += 1;
        }
        carried = if i + 1 < bags {
            let newcomers: Vec<usize> = bag.iter().copied().filter(|v| !carried.contains(v)).collect();
            let keep = rng.gen_range(0..=newcomers.len().min(cap - 1));
            newcomers.choose_multiple(rng, keep).copied().collect()
        } else {
            Vec::new()
        };
        pd.push(bag);
    }
    let mut g = Graph::with_vertices(next);
    let density = rng.gen_range(0.3..0.9);
    for bag in &pd {
        let vs: Vec<usize> = bag.iter().copied().collect();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                if rng.gen_bool(density) {
                    g.add_edge(u, v);
                }
            }
        }
    }
    (g, PathDecomposition { bags: pd })
}

/// Clauses of one to three distinct variables with random signs.
pub fn random_3cnf<R: Rng>(rng: &mut R, vars: usize, clauses: usize) -> Cnf {
    let ids: Vec<i32> = (1..=vars as i32).collect();
    let clauses = (0..clauses)
        .map(|_| {
            let k = rng.gen_range(1..=3.min(vars));
            ids.choose_multiple(rng, k).map(|&v| if rng.gen_bool(0.5) { v } else { -v }).collect()
        })
        .collect();
    Cnf { num_vars: vars, clauses }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::is_tight;
    use crate::structparams::verify_pd;

    #[test]
    fn generated_shapes() {
        let mut r = rng(1);
        for _ in 0..50 {
            let p = random_tight_program(&mut r, 6, 5);
            assert!(is_tight(&p) && p.is_normalized());
            let q = random_fully_tight(&mut r, 3);
            assert!(is_fully_tight(&q, 16).unwrap());
            let (g, pd) = random_two_bag_pd(&mut r, 5, 3);
            assert!(verify_pd(&g, &pd) && pd.two_bag_restricted() && pd.width() <= 3);
            let f = random_3cnf(&mut r, 5, 4);
            assert!(f.clauses.iter().all(|c| (1..=3).contains(&c.len())));
        }
    }

    #[test]
    fn deterministic() {
        let a = random_fully_tight(&mut rng(9), 4);
        let b = random_fully_tight(&mut rng(9), 4);
        assert_eq!(a, b);
    }
}
