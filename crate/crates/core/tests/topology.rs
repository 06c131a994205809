mod common;

use rand::Rng;
use syndrome_fp::rng::seeded;
use syndrome_fp::sim::{Circuit, GateOp};
use syndrome_fp::topology::{find_isomorphic_embeddings, remap, used_subgraph, ConnectivityGraph, Mapping};

fn all_embeddings(p: &ConnectivityGraph, h: &ConnectivityGraph) -> Vec<Mapping> {
    find_isomorphic_embeddings(p, h, usize::MAX, &mut seeded(0))
}

#[test]
fn embedding_count_matches_brute_force() {
    let mut rng = seeded(33);
    for _ in 0..80 {
        let hn = rng.random_range(2..=8);
        let pn = rng.random_range(1..=hn.min(5));
        let h = common::random_graph(hn, 0.5, &mut rng);
        let p = common::random_graph(pn, 0.6, &mut rng);
        let found = all_embeddings(&p, &h);
        assert_eq!(found.len(), common::count_embeddings(&p, &h));
        for m in &found {
            assert!(p.edges().iter().all(|&(a, b)| h.has_edge(m.physical[a], m.physical[b])));
        }
        let mut distinct = found.iter().map(|m| m.physical.clone()).collect::<Vec<_>>();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), found.len());
    }
}

#[test]
fn path_into_cycle() {
    let p3 = ConnectivityGraph::new(3, [(0, 1), (1, 2)]).unwrap();
    let c5 = ConnectivityGraph::new(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
    assert_eq!(all_embeddings(&p3, &c5).len(), 10);
    // fewer requested than exist: distinct images come first
    let some = find_isomorphic_embeddings(&p3, &c5, 5, &mut seeded(2));
    let mut images: Vec<_> = some.iter().map(Mapping::image).collect();
    images.sort();
    images.dedup();
    assert_eq!(images.len(), 5);
}

#[test]
fn embeddings_are_seed_reproducible() {
    let p = ConnectivityGraph::grid(3, 3);
    let h = ConnectivityGraph::heavy_hex(3, 3);
    let g = ConnectivityGraph::grid(6, 6);
    let a = find_isomorphic_embeddings(&p, &g, 16, &mut seeded(4));
    assert_eq!(a, find_isomorphic_embeddings(&p, &g, 16, &mut seeded(4)));
    assert_eq!(a.len(), 16);
    // a grid cell is a 4-cycle; heavy-hex has none
    assert!(find_isomorphic_embeddings(&p, &h, 1, &mut seeded(4)).is_empty());
}

#[test]
fn remap_round_trip() {
    let host = ConnectivityGraph::grid(4, 4);
    let mut c = Circuit::new(16);
    c.push(GateOp::h(0)).push(GateOp::cnot(0, 1)).push(GateOp::cnot(1, 5)).push(GateOp::measure(5));
    let pattern = used_subgraph(&c, &Mapping::new("id", (0..16).collect()).unwrap(), &host).unwrap();
    assert!(pattern.has_edge(0, 1) && pattern.has_edge(1, 5));
    let a = Mapping::new("a", (0..16).collect()).unwrap();
    let b = Mapping::new("b", (0..16).rev().collect()).unwrap();
    let there = remap(&c, &a, &b, &host).unwrap();
    assert_eq!(remap(&there, &b, &a, &host).unwrap(), c);
    let broken = Mapping::new("c", vec![0, 5, 1, 3, 4, 2, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]).unwrap();
    assert!(remap(&c, &a, &broken, &host).is_err());
}
