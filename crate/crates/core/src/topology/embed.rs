//! Randomized VF2-style search for subgraph monomorphisms.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::graph::ConnectivityGraph;
use super::layout::Mapping;

/// Search-tree nodes visited before giving up on finding more embeddings.
const VISIT_BUDGET: usize = 20_000_000;

/// Pattern vertices in BFS order from the highest-degree vertex, so every
/// vertex after the first of its component has an already-placed neighbor.
fn match_order(pattern: &ConnectivityGraph) -> Vec<usize> {
    let n = pattern.num_qubits();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let root = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (pattern.degree(v), std::cmp::Reverse(v)))
            .expect("unplaced vertex");
        placed[root] = true;
        let start = order.len();
        order.push(root);
        let mut head = start;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut next: Vec<usize> = pattern.neighbors(v).iter().copied().filter(|&w| !placed[w]).collect();
            next.sort_by_key(|&w| (std::cmp::Reverse(pattern.degree(w)), w));
            for w in next {
                if !placed[w] {
                    placed[w] = true;
                    order.push(w);
                }
            }
        }
    }
    order
}

struct Search<'a, R: Rng> {
    pattern: &'a ConnectivityGraph,
    host: &'a ConnectivityGraph,
    order: Vec<usize>,
    /// Earlier-placed neighbors of `order[i]`.
    back_edges: Vec<Vec<usize>>,
    host_order: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
    k: usize,
    distinct: Vec<Vec<usize>>,
    images: HashSet<Vec<usize>>,
    extras: Vec<Vec<usize>>,
    visits: usize,
    rng: &'a mut R,
}

impl<R: Rng> Search<'_, R> {
    fn done(&self) -> bool {
        self.distinct.len() >= self.k || self.visits >= VISIT_BUDGET
    }

    fn feasible(&self, depth: usize, h: usize) -> bool {
        let u = self.order[depth];
        !self.used[h]
            && self.host.degree(h) >= self.pattern.degree(u)
            && self.back_edges[depth].iter().all(|&w| self.host.has_edge(self.map[w], h))
    }

    fn record(&mut self) {
        let mut image = self.map.clone();
        image.sort_unstable();
        if self.images.insert(image) {
            self.distinct.push(self.map.clone());
        } else if self.extras.len() < self.k {
            self.extras.push(self.map.clone());
        }
    }

    fn extend(&mut self, depth: usize) {
        if self.done() {
            return;
        }
        self.visits += 1;
        if depth == self.order.len() {
            self.record();
            return;
        }
        let u = self.order[depth];
        let mut candidates: Vec<usize> = match self.back_edges[depth].first() {
            Some(&anchor) => self.host.neighbors(self.map[anchor]).to_vec(),
            None => self.host_order.clone(),
        };
        if !self.back_edges[depth].is_empty() {
            candidates.shuffle(self.rng);
        }
        for h in candidates {
            if !self.feasible(depth, h) {
                continue;
            }
            self.map[u] = h;
            self.used[h] = true;
            self.extend(depth + 1);
            self.used[h] = false;
            if self.done() {
                return;
            }
        }
    }
}

/// Up to `k` distinct edge-preserving injective maps of `pattern` into
/// `host`, each returned as a [`Mapping`] from pattern vertex to host qubit.
///
/// Candidate order is randomized from `rng`, so the set returned for `k`
/// smaller than the total count depends on the seed but is reproducible for a
/// fixed one. Embeddings with a new vertex image are preferred; orderings of
/// an already-seen image only fill the remainder. When fewer than `k` exist,
/// all of them are returned.
pub fn find_isomorphic_embeddings<R: Rng>(
    pattern: &ConnectivityGraph,
    host: &ConnectivityGraph,
    k: usize,
    rng: &mut R,
) -> Vec<Mapping> {
    let n = pattern.num_qubits();
    if k == 0 || n > host.num_qubits() {
        return Vec::new();
    }
    let order = match_order(pattern);
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let back_edges: Vec<Vec<usize>> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut earlier: Vec<usize> = pattern.neighbors(v).iter().copied().filter(|&w| position[w] < i).collect();
            earlier.sort_by_key(|&w| position[w]);
            earlier
        })
        .collect();
    let mut host_order: Vec<usize> = (0..host.num_qubits()).collect();
    host_order.shuffle(rng);

    let mut search = Search {
        pattern,
        host,
        order,
        back_edges,
        host_order,
        map: vec![usize::MAX; n],
        used: vec![false; host.num_qubits()],
        k,
        distinct: Vec::new(),
        images: HashSet::new(),
        extras: Vec::new(),
        visits: 0,
        rng,
    };
    if n == 0 {
        return vec![Mapping { mapping_id: "embedding-00".into(), physical: Vec::new() }];
    }
    search.extend(0);
    let Search { mut distinct, extras, .. } = search;
    let room = k.saturating_sub(distinct.len());
    distinct.extend(extras.into_iter().take(room));
    distinct
        .into_iter()
        .enumerate()
        .map(|(i, physical)| Mapping { mapping_id: format!("embedding-{i:02}"), physical })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    /// Every injective map checked edge by edge.
    fn brute_force_count(pattern: &ConnectivityGraph, host: &ConnectivityGraph) -> usize {
        fn go(p: &ConnectivityGraph, h: &ConnectivityGraph, map: &mut Vec<usize>, used: &mut Vec<bool>) -> usize {
            if map.len() == p.num_qubits() {
                let ok = p.edges().iter().all(|&(a, b)| h.has_edge(map[a], map[b]));
                return usize::from(ok);
            }
            let mut total = 0;
            for v in 0..h.num_qubits() {
                if !used[v] {
                    used[v] = true;
                    map.push(v);
                    total += go(p, h, map, used);
                    map.pop();
                    used[v] = false;
                }
            }
            total
        }
        go(pattern, host, &mut Vec::new(), &mut vec![false; host.num_qubits()])
    }

    #[test]
    fn path_into_five_cycle() {
        let p = ConnectivityGraph::path(3);
        let h = ConnectivityGraph::cycle(5);
        assert_eq!(brute_force_count(&p, &h), 10);
        assert_eq!(find_isomorphic_embeddings(&p, &h, 100, &mut seeded(0)).len(), 10);
    }

    #[test]
    fn triangle_automorphisms() {
        let t = ConnectivityGraph::complete(3);
        assert_eq!(brute_force_count(&t, &t), 6);
        assert_eq!(find_isomorphic_embeddings(&t, &t, 100, &mut seeded(1)).len(), 6);
    }

    #[test]
    fn sixteen_on_heavy_hex() {
        let p = ConnectivityGraph::path(5);
        let h = ConnectivityGraph::heavy_hex(3, 3);
        let found = find_isomorphic_embeddings(&p, &h, 16, &mut seeded(2));
        assert_eq!(found.len(), 16);
        let images: HashSet<Vec<usize>> = found.iter().map(Mapping::image).collect();
        assert_eq!(images.len(), 16);
        for m in &found {
            assert!(p.edges().iter().all(|&(a, b)| h.has_edge(m.physical[a], m.physical[b])));
        }
    }

    #[test]
    fn seed_determinism() {
        let p = ConnectivityGraph::path(4);
        let h = ConnectivityGraph::grid(5, 5);
        let a = find_isomorphic_embeddings(&p, &h, 8, &mut seeded(3));
        let b = find_isomorphic_embeddings(&p, &h, 8, &mut seeded(3));
        assert_eq!(a, b);
    }

    #[test]
    fn no_embedding() {
        let t = ConnectivityGraph::complete(3);
        let h = ConnectivityGraph::heavy_hex(2, 2);
        assert!(find_isomorphic_embeddings(&t, &h, 4, &mut seeded(4)).is_empty());
        let big = ConnectivityGraph::path(10);
        assert!(find_isomorphic_embeddings(&big, &ConnectivityGraph::path(3), 1, &mut seeded(4)).is_empty());
    }
}
