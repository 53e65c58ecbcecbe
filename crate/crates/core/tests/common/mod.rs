//! Shared helpers for the integration suites: an independent naive solver,
//! small-graph enumeration up to isomorphism, and seeded random generators
//! for graphs, trees, and clearing protocols.

use std::collections::HashMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use immunize_core::engine::{clears, run, step, ModelParams, Protocol, SimState};
use immunize_core::graph::{Graph, VertexSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent oracle: depth-bounded depth-first search over move sequences
/// with state-revisit pruning. Moves are enumerated by bitmask value, a
/// deliberately different order from the solver's size-then-colex scheme.
pub fn naive_clearable(g: &Graph, params: ModelParams, k: usize) -> bool {
    let n = g.vertex_count();
    let mut moves: Vec<VertexSet> = Vec::new();
    for mask in 0u64..(1 << n) {
        if (mask.count_ones() as usize) <= k {
            let ids = (0..n).filter(|&v| mask >> v & 1 == 1);
            moves.push(VertexSet::from_ids(n, ids).unwrap());
        }
    }
    // A shortest clearing sequence never revisits a state, so the number of
    // distinct states bounds the useful depth.
    let depth_cap = (params.r + params.s + 1).pow(n as u32);
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
    fn dfs(
        g: &Graph,
        params: ModelParams,
        moves: &[VertexSet],
        state: &SimState,
        depth_left: usize,
        seen: &mut HashMap<Vec<u8>, usize>,
    ) -> bool {
        if state.all_green(params) {
            return true;
        }
        if depth_left == 0 {
            return false;
        }
        if let Some(&d) = seen.get(&state.codes) {
            if d >= depth_left {
                return false;
            }
        }
        seen.insert(state.codes.clone(), depth_left);
        for a in moves {
            let next = step(g, state, a, params).unwrap();
            if dfs(g, params, moves, &next, depth_left - 1, seen) {
                return true;
            }
        }
        false
    }
    dfs(
        g,
        params,
        &moves,
        &SimState::initial(n),
        depth_cap,
        &mut seen,
    )
}

pub fn naive_immunization_number(g: &Graph, params: ModelParams) -> usize {
    (1..=g.vertex_count())
        .find(|&k| naive_clearable(g, params, k))
        .expect("immunizing everything clears")
}

fn vertex_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect()
}

/// Canonical form of a small graph: the minimum adjacency bitmask over all
/// vertex permutations.
fn canonical_form(n: usize, edges: &[(usize, usize)]) -> u64 {
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::new();
            for p in &out {
                for v in 0..n {
                    if !p.contains(&v) {
                        let mut q = p.clone();
                        q.push(v);
                        next.push(q);
                    }
                }
            }
            out = next;
        }
        out
    }
    let pairs = vertex_pairs(n);
    let index: HashMap<(usize, usize), usize> = pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();
    let mut best = u64::MAX;
    for perm in permutations(n) {
        let mut mask = 0u64;
        for &(u, v) in edges {
            let (a, b) = (perm[u].min(perm[v]), perm[u].max(perm[v]));
            mask |= 1 << index[&(a, b)];
        }
        best = best.min(mask);
    }
    best
}

/// Every connected graph on exactly `n <= 5` vertices, one representative
/// per isomorphism class.
pub fn connected_graphs_up_to_iso(n: usize) -> Vec<Graph> {
    assert!(n <= 5, "enumeration is only meant for tiny graphs");
    let pairs = vertex_pairs(n);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if let Ok(g) = Graph::new(n, &edges) {
            if seen.insert(canonical_form(n, &edges)) {
                out.push(g);
            }
        }
    }
    out
}

/// Seeded random connected graph: a random spanning tree plus random extras.
pub fn random_connected_graph(n: usize, extra_edges: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push((u, v));
    }
    let pairs = vertex_pairs(n);
    for _ in 0..extra_edges {
        let e = pairs[rng.random_range(0..pairs.len())];
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    Graph::new(n, &edges).unwrap()
}

/// Seeded random labeled tree from a random Pruefer sequence.
pub fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    assert!(n >= 1);
    if n == 1 {
        return Graph::new(1, &[]).unwrap();
    }
    if n == 2 {
        return Graph::new(2, &[(0, 1)]).unwrap();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut leaf_heap: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &v in &seq {
        let std::cmp::Reverse(leaf) = leaf_heap.pop().unwrap();
        edges.push((leaf.min(v), leaf.max(v)));
        degree[leaf] -= 1;
        degree[v] -= 1;
        if degree[v] == 1 {
            leaf_heap.push(std::cmp::Reverse(v));
        }
    }
    let std::cmp::Reverse(a) = leaf_heap.pop().unwrap();
    let std::cmp::Reverse(b) = leaf_heap.pop().unwrap();
    edges.push((a.min(b), a.max(b)));
    Graph::new(n, &edges).unwrap()
}

/// Random clearing protocol: immunizes random subsets, preferring non-green
/// vertices, until the graph clears. Returns `None` when the cap is hit.
pub fn random_clearing_protocol(
    g: &Graph,
    params: ModelParams,
    max_width: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Protocol> {
    let n = g.vertex_count();
    let mut state = SimState::initial(n);
    let mut steps: Vec<Vec<usize>> = Vec::new();
    for _ in 0..(8 * n * (params.r + params.s)) {
        if state.all_green(params) {
            break;
        }
        let width = rng.random_range(1..=max_width);
        let mut candidates: Vec<usize> = (0..n)
            .filter(|&v| (state.codes[v] as usize) <= params.s)
            .collect();
        if candidates.is_empty() || rng.random_bool(0.2) {
            candidates = (0..n).collect();
        }
        candidates.shuffle(rng);
        candidates.truncate(width);
        let a = VertexSet::from_ids(n, candidates.iter().copied()).unwrap();
        state = step(g, &state, &a, params).unwrap();
        steps.push(candidates);
    }
    if !state.all_green(params) {
        return None;
    }
    let protocol = Protocol::new(n, params, steps).unwrap();
    debug_assert!(clears(&run(g, &protocol).unwrap()));
    Some(protocol)
}

/// A mutated copy of a clearing protocol: appends a wait step and re-immunizes
/// a random already-immunized vertex at the end (still clearing).
pub fn frivolous_variant(
    g: &Graph,
    protocol: &Protocol,
    rng: &mut ChaCha8Rng,
) -> Option<Protocol> {
    let mut steps = protocol.step_ids();
    let immunized: Vec<usize> = {
        let mut all: Vec<usize> = steps.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    };
    if immunized.is_empty() {
        return None;
    }
    steps.push(vec![]);
    steps.push(vec![immunized[rng.random_range(0..immunized.len())]]);
    let mutated = Protocol::new(g.vertex_count(), protocol.params(), steps).unwrap();
    clears(&run(g, &mutated).unwrap()).then_some(mutated)
}

/// Random subgraph of `g`: a nonempty random vertex subset plus a random
/// subset of the induced edges. May be disconnected.
pub fn random_subgraph(g: &Graph, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<(usize, usize)>) {
    let n = g.vertex_count();
    let mut vertices: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.7)).collect();
    if vertices.is_empty() {
        vertices.push(rng.random_range(0..n));
    }
    let kept: std::collections::HashSet<usize> = vertices.iter().copied().collect();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| kept.contains(&u) && kept.contains(&v) && rng.random_bool(0.8))
        .collect();
    (vertices, edges)
}
