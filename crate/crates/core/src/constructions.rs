//! Merging leaf-rooted pieces into larger graphs that still clear with two
//! immunizers, subdivided m-ary trees, tree subdivisions, and the
//! subdivided-grid example.
//!
//! A *rooted piece* is a graph with a designated degree-1 leaf and a width-2
//! clearing protocol that immunizes the leaf only in its final step. Pieces
//! merge by joining their leaves through long subdivided paths to the first
//! piece's leaf and hanging a fresh stem there; the merged protocol clears
//! segment by segment (piece m, its path, piece m-1, ...), re-clearing each
//! path's reinfected interior after every completed clearing of the previous
//! path and re-immunizing the attachment vertex on alternating steps. Every
//! generated protocol is re-verified by simulation before it is returned;
//! a failure is a construction bug and is reported as an error, never as a
//! result.

use std::collections::HashMap;

use thiserror::Error;

use crate::engine::{clears, protocol_width, run, step, ModelParams, Protocol, SimState};
use crate::graph::{hatted_mary_tree, Graph, VertexSet};
use crate::protocols::restrict;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("invalid rooted piece: {0}")]
    InvalidPiece(String),
    #[error("merging needs at least two pieces")]
    TooFewPieces,
    #[error("input is not a tree")]
    NotATree,
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("construction would need {needed} vertices, over the limit of {limit}")]
    Budget { needed: usize, limit: usize },
    #[error("construction bug: generated protocol failed verification: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
    #[error(transparent)]
    Protocols(#[from] crate::protocols::ProtocolsError),
}

/// Default cap on the number of vertices a construction may produce.
pub const DEFAULT_CONSTRUCTION_VERTEX_LIMIT: usize = 200_000;

fn params_11() -> ModelParams {
    ModelParams::new(1, 1).unwrap()
}

/// A graph with a designated degree-1 leaf and a width-2 clearing protocol
/// that immunizes the leaf only in its final step.
#[derive(Clone, Debug)]
pub struct RootedPiece {
    pub graph: Graph,
    pub leaf: usize,
    pub protocol: Protocol,
}

impl RootedPiece {
    pub fn validate(&self) -> Result<(), ConstructionError> {
        let fail = |msg: String| Err(ConstructionError::InvalidPiece(msg));
        if self.leaf >= self.graph.vertex_count() || self.graph.degree(self.leaf) != 1 {
            return fail(format!("leaf {} does not have degree 1", self.leaf));
        }
        if self.protocol.is_empty() {
            return fail("piece protocol is empty".to_string());
        }
        if protocol_width(&self.protocol)? > 2 {
            return fail("piece protocol has width above 2".to_string());
        }
        let n = self.protocol.len();
        for t in 1..=n {
            let contains = self.protocol.set_at(t).contains(self.leaf);
            if t < n && contains {
                return fail(format!("leaf immunized at non-final step {t}"));
            }
            if t == n && !contains {
                return fail("leaf not immunized in the final step".to_string());
            }
        }
        let trace = run(&self.graph, &self.protocol)?;
        if !clears(&trace) {
            return fail("piece protocol does not clear its graph".to_string());
        }
        Ok(())
    }

    /// Number of time-steps of the piece protocol.
    pub fn steps(&self) -> usize {
        self.protocol.len()
    }
}

/// One entry of a merged protocol's clearing order: a piece's own protocol or
/// a pass over one connecting path. Indices are 1-based, piece 1 being the
/// one that carries the stem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Segment {
    Piece(usize),
    Path(usize),
}

/// Output of a merge: the combined graph, its stem (a fresh leaf immunized
/// only in the final step), the verified width-2 clearing protocol, and the
/// order in which the construction cleared its parts.
#[derive(Clone, Debug)]
pub struct MergedResult {
    pub graph: Graph,
    /// The fresh leaf; immunized only in the final step.
    pub stem: usize,
    /// The vertex the stem hangs from (piece 1's leaf in merged ids).
    pub attach: usize,
    pub protocol: Protocol,
    pub steps_used: usize,
    pub clearing_order: Vec<Segment>,
    /// Merged-id range of each input piece, in input order.
    pub piece_ranges: Vec<std::ops::Range<usize>>,
    /// Interior vertices of the path to piece `k`, index `k - 2`, ordered
    /// from the piece-k end towards the attachment vertex.
    pub path_interiors: Vec<Vec<usize>>,
}

impl MergedResult {
    /// Reinterprets the merge as a rooted piece for further merging.
    pub fn into_piece(self) -> RootedPiece {
        RootedPiece {
            graph: self.graph,
            leaf: self.stem,
            protocol: self.protocol,
        }
    }
}

/// Joins two pieces: a new path with `s_1` interior vertices (the length of
/// the first piece's protocol) between the two leaves, and a fresh stem on
/// the first leaf. The result clears with width 2 in at most `s_2 + 3 s_1`
/// steps.
pub fn merge_two(p1: &RootedPiece, p2: &RootedPiece) -> Result<MergedResult, ConstructionError> {
    merge_with_lengths(&[p1.clone(), p2.clone()], &[p1.steps()])
}

/// Joins `m >= 2` pieces: for each `k >= 2` a new path with `2^(k-2) * s`
/// interior vertices (`s` the longest piece protocol) between leaf 1 and
/// leaf `k`, plus a fresh stem on leaf 1. The result clears with width 2 in
/// at most `s ((m+3) 2^(m-2) - 1)` steps.
pub fn merge_many(pieces: &[RootedPiece]) -> Result<MergedResult, ConstructionError> {
    if pieces.len() < 2 {
        return Err(ConstructionError::TooFewPieces);
    }
    let s = pieces.iter().map(|p| p.steps()).max().unwrap();
    let lens: Vec<usize> = (2..=pieces.len()).map(|k| s << (k - 2)).collect();
    merge_with_lengths(pieces, &lens)
}

/// Closed-form step bound for the m-way merge: `s ((m+3) 2^(m-2) - 1)`.
pub fn merged_time_bound(m: usize, s: usize) -> Result<usize, ConstructionError> {
    if m < 2 || s < 1 {
        return Err(ConstructionError::BadParameter(format!(
            "time bound needs m >= 2 and s >= 1 (got m={m}, s={s})"
        )));
    }
    Ok(s * ((m + 3) * (1 << (m - 2)) - 1))
}

/// Clearing order for an m-way merge: piece m and its path first, then the
/// (m-1)-way order with a pass over path m inserted after every pass over
/// path m-1.
fn clearing_sequence(m: usize) -> Vec<Segment> {
    let mut seq = vec![
        Segment::Piece(2),
        Segment::Path(2),
        Segment::Piece(1),
        Segment::Path(2),
    ];
    for k in 3..=m {
        let mut out = vec![Segment::Piece(k), Segment::Path(k)];
        for seg in seq {
            out.push(seg);
            if seg == Segment::Path(k - 1) {
                out.push(Segment::Path(k));
            }
        }
        seq = out;
    }
    seq
}

fn merge_with_lengths(
    pieces: &[RootedPiece],
    path_lens: &[usize],
) -> Result<MergedResult, ConstructionError> {
    let m = pieces.len();
    debug_assert_eq!(path_lens.len(), m - 1);
    for p in pieces {
        p.validate()?;
    }

    // Assemble the merged graph: pieces in input order, then the path
    // interiors for k = 2..=m (each ordered from the piece-k end towards
    // leaf 1), then the stem.
    let mut piece_ranges = Vec::with_capacity(m);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut offset = 0;
    for p in pieces {
        let n = p.graph.vertex_count();
        piece_ranges.push(offset..offset + n);
        for &(u, v) in p.graph.edges() {
            edges.push((offset + u, offset + v));
        }
        offset += n;
    }
    let leaf_of = |k: usize| piece_ranges[k - 1].start + pieces[k - 1].leaf;
    let attach = leaf_of(1);
    let mut path_interiors = Vec::with_capacity(m - 1);
    for k in 2..=m {
        let len = path_lens[k - 2];
        let ids: Vec<usize> = (offset..offset + len).collect();
        let mut prev = leaf_of(k);
        for &u in &ids {
            edges.push((prev, u));
            prev = u;
        }
        edges.push((prev, attach));
        offset += len;
        path_interiors.push(ids);
    }
    let stem = offset;
    edges.push((attach, stem));
    let graph = Graph::new(stem + 1, &edges)?;
    let n = graph.vertex_count();

    // Drive the schedule against a live simulation so re-clearing passes
    // touch exactly the vertices that are actually infected.
    let params = params_11();
    let mut state = SimState::initial(n);
    let mut steps: Vec<Vec<usize>> = Vec::new();
    let mut apply = |state: &mut SimState, mut ids: Vec<usize>| {
        ids.sort_unstable();
        let set = VertexSet::from_ids(n, ids.iter().copied()).unwrap();
        *state = step(&graph, state, &set, params).expect("ids are in range");
        steps.push(ids);
    };

    let order = clearing_sequence(m);
    let mut first_clear_done = vec![false; m + 1];
    for &segment in &order {
        match segment {
            Segment::Piece(k) => {
                let base = piece_ranges[k - 1].start;
                for a in pieces[k - 1].protocol.steps() {
                    apply(&mut state, a.iter().map(|v| base + v).collect());
                }
            }
            Segment::Path(k) => {
                let interiors = &path_interiors[k - 2];
                if !first_clear_done[k] {
                    first_clear_done[k] = true;
                    // Fresh path: everything is red. Two vertices on the
                    // first step, one per step after, the attachment last.
                    let len = interiors.len();
                    if len == 1 {
                        apply(&mut state, vec![interiors[0], attach]);
                    } else {
                        apply(&mut state, vec![interiors[0], interiors[1]]);
                        for &u in &interiors[2..] {
                            apply(&mut state, vec![u]);
                        }
                        apply(&mut state, vec![attach]);
                    }
                } else {
                    // Re-clearing pass: immunize the infected interiors from
                    // the far end towards the attachment, keeping the
                    // attachment off red on alternating steps.
                    let infected: Vec<usize> = interiors
                        .iter()
                        .copied()
                        .filter(|&u| (state.codes[u] as usize) <= params.s)
                        .collect();
                    for (i, &u) in infected.iter().enumerate() {
                        if i % 2 == 0 {
                            apply(&mut state, vec![u, attach]);
                        } else {
                            apply(&mut state, vec![u]);
                        }
                    }
                }
            }
        }
    }
    apply(&mut state, vec![stem, attach]);

    let protocol = Protocol::new(n, params, steps)?;
    let result = MergedResult {
        graph,
        stem,
        attach,
        protocol,
        steps_used: 0,
        clearing_order: order,
        piece_ranges,
        path_interiors,
    };
    verify_merged(result)
}

fn verify_merged(mut result: MergedResult) -> Result<MergedResult, ConstructionError> {
    let trace = run(&result.graph, &result.protocol)?;
    if !clears(&trace) {
        return Err(ConstructionError::VerificationFailed(
            "protocol does not clear the merged graph".to_string(),
        ));
    }
    if protocol_width(&result.protocol)? > 2 {
        return Err(ConstructionError::VerificationFailed(
            "protocol width exceeds 2".to_string(),
        ));
    }
    let last = result.protocol.len();
    for t in 1..=last {
        let has_stem = result.protocol.set_at(t).contains(result.stem);
        if has_stem != (t == last) {
            return Err(ConstructionError::VerificationFailed(format!(
                "stem immunization out of place at step {t}"
            )));
        }
    }
    result.steps_used = result.protocol.len();
    Ok(result)
}

/// The depth-1 piece: a hatted star with a verified clearing protocol. The
/// two-child case clears in two width-2 steps; larger stars sweep the leaves
/// alternating with the center at width 1, which survives the center's
/// yellow phases.
fn base_piece(m: usize) -> Result<RootedPiece, ConstructionError> {
    let (graph, stem) = hatted_mary_tree(m, 1)?;
    let steps: Vec<Vec<usize>> = if m == 2 {
        vec![vec![1, 2], vec![0, stem]]
    } else {
        let mut steps = Vec::with_capacity(2 * m + 1);
        for child in 1..=m {
            steps.push(vec![child]);
            steps.push(vec![0]);
        }
        steps.push(vec![stem]);
        steps
    };
    let protocol = Protocol::new(graph.vertex_count(), params_11(), steps)?;
    let piece = RootedPiece {
        graph,
        leaf: stem,
        protocol,
    };
    piece.validate()?;
    Ok(piece)
}

/// Builds a subdivision of the hatted complete m-ary tree of depth `d` with
/// a verified width-2 clearing protocol whose stem is immunized only in the
/// final step. Depth 1 is the base piece; each further depth merges `m`
/// copies of the previous level.
pub fn build_subdivided_hatted_tree(
    m: usize,
    d: usize,
    max_vertices: usize,
) -> Result<MergedResult, ConstructionError> {
    if m < 1 || d < 1 {
        return Err(ConstructionError::BadParameter(format!(
            "hatted tree construction needs m >= 1 and d >= 1 (got m={m}, d={d})"
        )));
    }
    if m == 1 {
        // A subdivision of a path is a path; the plain sweep already has
        // width 1 and immunizes the stem last.
        let n = d + 2;
        if n > max_vertices {
            return Err(ConstructionError::Budget {
                needed: n,
                limit: max_vertices,
            });
        }
        let mut edges: Vec<(usize, usize)> = (0..d).map(|i| (i, i + 1)).collect();
        let stem = d + 1;
        edges.push((0, stem));
        let graph = Graph::new(n, &edges)?;
        let mut steps: Vec<Vec<usize>> = (0..=d).rev().map(|v| vec![v]).collect();
        steps.push(vec![stem]);
        let protocol = Protocol::new(n, params_11(), steps)?;
        let result = MergedResult {
            graph,
            stem,
            attach: 0,
            protocol,
            steps_used: 0,
            clearing_order: Vec::new(),
            piece_ranges: Vec::new(),
            path_interiors: Vec::new(),
        };
        return verify_merged(result);
    }
    let base = base_piece(m)?;
    let mut current = MergedResult {
        graph: base.graph.clone(),
        stem: base.leaf,
        attach: 0,
        protocol: base.protocol.clone(),
        steps_used: base.protocol.len(),
        clearing_order: Vec::new(),
        piece_ranges: Vec::new(),
        path_interiors: Vec::new(),
    };
    for _ in 2..=d {
        let piece = current.into_piece();
        let s = piece.steps();
        let size = piece.graph.vertex_count();
        let needed = m * size + s * ((1 << (m - 1)) - 1) + 1;
        if needed > max_vertices {
            return Err(ConstructionError::Budget {
                needed,
                limit: max_vertices,
            });
        }
        let copies = vec![piece; m];
        current = merge_many(&copies)?;
    }
    Ok(current)
}

/// Suppresses every degree-2 vertex of a tree, joining its neighbors. The
/// returned tree keeps the branch structure; vertex `i` corresponds to the
/// i-th surviving vertex in ascending original id.
pub fn smooth_tree(g: &Graph) -> Result<Graph, ConstructionError> {
    if !g.is_tree() {
        return Err(ConstructionError::NotATree);
    }
    let n = g.vertex_count();
    let terminals: Vec<usize> = (0..n).filter(|&v| g.degree(v) != 2).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in terminals.iter().enumerate() {
        index[v] = i;
    }
    let mut edges = Vec::new();
    for &t in &terminals {
        for &first in g.neighbors(t) {
            let mut prev = t;
            let mut cur = first;
            while g.degree(cur) == 2 {
                let next = g
                    .neighbors(cur)
                    .iter()
                    .copied()
                    .find(|&u| u != prev)
                    .expect("degree-2 vertex has another neighbor");
                prev = cur;
                cur = next;
            }
            if t < cur {
                edges.push((index[t], index[cur]));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(Graph::new(terminals.len(), &edges)?)
}

/// Tree isomorphism by canonical rooted encodings at the tree centers.
pub fn trees_isomorphic(a: &Graph, b: &Graph) -> bool {
    if !a.is_tree() || !b.is_tree() || a.vertex_count() != b.vertex_count() {
        return false;
    }
    fn centers(g: &Graph) -> Vec<usize> {
        let n = g.vertex_count();
        if n <= 2 {
            return (0..n).collect();
        }
        let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
        let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
        let mut removed = vec![false; n];
        let mut remaining = n;
        while remaining > 2 {
            let mut next = Vec::new();
            for &v in &layer {
                removed[v] = true;
            }
            remaining -= layer.len();
            for &v in &layer {
                for &u in g.neighbors(v) {
                    if !removed[u] {
                        degree[u] -= 1;
                        if degree[u] == 1 {
                            next.push(u);
                        }
                    }
                }
            }
            layer = next;
        }
        (0..n).filter(|&v| !removed[v]).collect()
    }
    fn canon(g: &Graph, root: usize) -> String {
        // Iterative post-order to avoid deep recursion on long paths.
        let n = g.vertex_count();
        let mut parent = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        let mut seen = vec![false; n];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &u in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = v;
                    stack.push(u);
                }
            }
        }
        let mut label: Vec<String> = vec![String::new(); n];
        for &v in order.iter().rev() {
            let mut kids: Vec<&str> = g
                .neighbors(v)
                .iter()
                .filter(|&&u| parent[u] == v)
                .map(|&u| label[u].as_str())
                .collect();
            kids.sort_unstable();
            label[v] = format!("({})", kids.concat());
        }
        label[root].clone()
    }
    let ca: Vec<String> = centers(a).into_iter().map(|c| canon(a, c)).collect();
    let cb: Vec<String> = centers(b).into_iter().map(|c| canon(b, c)).collect();
    ca.iter().any(|x| cb.contains(x))
}

/// A subdivision of an arbitrary tree together with a width-2 clearing
/// protocol and the data needed to contract it back.
#[derive(Clone, Debug)]
pub struct TreeSubdivision {
    pub subdivided: Graph,
    pub protocol: Protocol,
    /// Original tree vertex -> its image in `subdivided`.
    pub vertex_map: Vec<usize>,
    /// Per original edge `(u, v)` with `u < v`: the interior vertices of its
    /// chain in `subdivided`, ordered from the `u` side.
    pub chains: Vec<(usize, usize, Vec<usize>)>,
}

/// Produces a subdivision of the tree `t` that clears with width at most 2:
/// roots `t` to minimize (max child count, height), builds the subdivided
/// hatted host tree of that shape, embeds `t`'s edges onto host chains, and
/// restricts the host protocol to the embedded subgraph.
pub fn tree_subdivision_protocol(
    t: &Graph,
    max_vertices: usize,
) -> Result<TreeSubdivision, ConstructionError> {
    if !t.is_tree() {
        return Err(ConstructionError::NotATree);
    }
    let n = t.vertex_count();
    if n == 1 {
        let protocol = Protocol::new(1, params_11(), vec![vec![0]])?;
        return Ok(TreeSubdivision {
            subdivided: t.clone(),
            protocol,
            vertex_map: vec![0],
            chains: Vec::new(),
        });
    }

    // Shape under each candidate root: (max child count, height).
    let shape = |root: usize| -> (usize, usize) {
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        let mut max_children = 0;
        let mut height = 0;
        while let Some(v) = queue.pop_front() {
            let children = t
                .neighbors(v)
                .iter()
                .filter(|&&u| depth[u] == usize::MAX)
                .count();
            max_children = max_children.max(children);
            for &u in t.neighbors(v) {
                if depth[u] == usize::MAX {
                    depth[u] = depth[v] + 1;
                    height = height.max(depth[u]);
                    queue.push_back(u);
                }
            }
        }
        (max_children, height)
    };
    let root = (0..n).min_by_key(|&v| (shape(v), v)).unwrap();
    let (m, d) = shape(root);
    debug_assert!(m >= 1 && d >= 1);

    if m == 1 {
        // t is a path; the host is a path and t maps onto it unchanged
        // (no interior vertices on any chain).
        let host = build_subdivided_hatted_tree(1, d, max_vertices)?;
        let mut order = Vec::with_capacity(n);
        let mut prev = usize::MAX;
        let mut cur = root;
        loop {
            order.push(cur);
            match t.neighbors(cur).iter().copied().find(|&u| u != prev) {
                Some(next) => {
                    prev = cur;
                    cur = next;
                }
                None => break,
            }
        }
        debug_assert_eq!(order.len(), n);
        // Host ids 0..d are the path, attach (= 0) at the root end.
        let kept: Vec<usize> = (0..n).collect();
        let sub_edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let (subdivided, _, protocol) = restrict(&host.protocol, &host.graph, &kept, &sub_edges)?;
        let mut vertex_map = vec![usize::MAX; n];
        for (host_pos, &tv) in order.iter().enumerate() {
            vertex_map[tv] = host_pos;
        }
        let chains = t
            .edges()
            .iter()
            .map(|&(a, b)| (a, b, Vec::new()))
            .collect();
        let trace = run(&subdivided, &protocol)?;
        if !clears(&trace) || protocol_width(&protocol)? > 2 {
            return Err(ConstructionError::VerificationFailed(
                "path protocol failed simulation".to_string(),
            ));
        }
        return Ok(TreeSubdivision {
            subdivided,
            protocol,
            vertex_map,
            chains,
        });
    }

    let host = build_subdivided_hatted_tree(m, d, max_vertices)?;

    // Smooth the host down to the hatted m-ary tree and record each chain.
    let hg = &host.graph;
    let hn = hg.vertex_count();
    let is_terminal = |v: usize| hg.degree(v) != 2;
    // chain(v, first): terminal reached from terminal v through `first`,
    // plus the interiors walked.
    let walk = |tstart: usize, first: usize| -> (usize, Vec<usize>) {
        let mut interiors = Vec::new();
        let mut prev = tstart;
        let mut cur = first;
        while hg.degree(cur) == 2 {
            interiors.push(cur);
            let next = hg
                .neighbors(cur)
                .iter()
                .copied()
                .find(|&u| u != prev)
                .unwrap();
            prev = cur;
            cur = next;
        }
        (cur, interiors)
    };
    let mut smoothed_adj: HashMap<usize, Vec<(usize, Vec<usize>)>> = HashMap::new();
    for v in 0..hn {
        if is_terminal(v) {
            let mut out = Vec::new();
            for &u in hg.neighbors(v) {
                out.push(walk(v, u));
            }
            smoothed_adj.insert(v, out);
        }
    }

    // Root the smoothed host at the attachment vertex; its children are all
    // smoothed neighbors except the stem.
    let rho = host.attach;
    debug_assert!(is_terminal(rho));

    // Embed t (rooted) into the smoothed host: children in ascending id are
    // assigned to host children in ascending id.
    let mut image = vec![usize::MAX; n];
    image[root] = rho;
    let mut chains: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let mut stack = vec![(root, rho, host.stem)];
    while let Some((tv, hv, h_parent_side)) = stack.pop() {
        let t_children: Vec<usize> = t
            .neighbors(tv)
            .iter()
            .copied()
            .filter(|&u| image[u] == usize::MAX)
            .collect();
        // All smoothed neighbors except the one leading back to the parent
        // (or to the stem, at the root). Trees have at most one chain
        // between any two terminals, so the endpoint identifies it.
        let mut host_children: Vec<(usize, Vec<usize>)> = smoothed_adj[&hv]
            .iter()
            .filter(|(child, _)| *child != h_parent_side)
            .cloned()
            .collect();
        host_children.sort_by_key(|(child, _)| *child);
        if t_children.len() > host_children.len() {
            return Err(ConstructionError::VerificationFailed(format!(
                "embedding failed: vertex {tv} has {} children but the host offers {}",
                t_children.len(),
                host_children.len()
            )));
        }
        for (tc, (hc, interiors)) in t_children.iter().zip(host_children.iter()) {
            image[*tc] = *hc;
            let (a, b) = (tv.min(*tc), tv.max(*tc));
            let interiors_from_a = if a == tv {
                // recorded from hv towards hc, i.e. from tv's side
                interiors.clone()
            } else {
                let mut rev = interiors.clone();
                rev.reverse();
                rev
            };
            chains.push((a, b, interiors_from_a));
            stack.push((*tc, *hc, hv));
        }
    }

    // Collect the embedded subgraph and restrict the host protocol to it.
    let mut kept: Vec<usize> = image.iter().copied().collect();
    let mut sub_edges: Vec<(usize, usize)> = Vec::new();
    for (a, b, interiors) in &chains {
        let mut prev = image[*a];
        for &i in interiors {
            sub_edges.push((prev, i));
            kept.push(i);
            prev = i;
        }
        sub_edges.push((prev, image[*b]));
    }
    kept.sort_unstable();
    kept.dedup();
    let sub_edges: Vec<(usize, usize)> = sub_edges
        .iter()
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    let (subdivided, old_ids, protocol) = restrict(&host.protocol, hg, &kept, &sub_edges)?;
    let to_new: HashMap<usize, usize> = old_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let trace = run(&subdivided, &protocol)?;
    if !clears(&trace) || protocol_width(&protocol)? > 2 {
        return Err(ConstructionError::VerificationFailed(
            "restricted tree protocol failed simulation".to_string(),
        ));
    }

    Ok(TreeSubdivision {
        subdivided,
        protocol,
        vertex_map: image.iter().map(|&h| to_new[&h]).collect(),
        chains: chains
            .into_iter()
            .map(|(a, b, interiors)| {
                (a, b, interiors.into_iter().map(|i| to_new[&i]).collect())
            })
            .collect(),
    })
}

/// The 46-vertex subdivided 4x4 grid with its explicit width-2 clearing
/// protocol. The grid vertices are labeled `a..p` in id order, the
/// subdivision path interiors `w1..w30` with `w1` adjacent to `i` and `w30`
/// adjacent to `e`; the protocol clears the path in pairs, sweeps the grid,
/// and then re-clears the reinfected path back towards `i`, re-immunizing
/// `i` on alternating steps.
pub fn build_subdivided_grid_example() -> Result<(Graph, Protocol), ConstructionError> {
    let mut grid = crate::graph::generate(&crate::graph::FamilySpec::Grid(4))?;
    for v in 0..16u8 {
        grid.set_label(v as usize, ((b'a' + v) as char).to_string());
    }
    // Edge {e, i} = {4, 8}; interiors appended from the e side, so the
    // paper-facing names w1 (at i) .. w30 (at e) map to ids 45 down to 16.
    let mut h = crate::graph::subdivide_edge(&grid, (4, 8), 30)?;
    let w = |j: usize| 46 - j;
    for j in 1..=30 {
        h.set_label(w(j), format!("w{j}"));
    }

    let mut steps: Vec<Vec<usize>> = Vec::new();
    for t in 1..=15 {
        steps.push(vec![w(2 * t - 1), w(2 * t)]);
    }
    let by_letter = |c: char| (c as u8 - b'a') as usize;
    for pair in [
        "ef", "ab", "cf", "dh", "cf", "gh", "fl", "gk", "fl", "jk", "lp", "jk", "po", "jn", "im",
    ] {
        let mut chars = pair.chars();
        steps.push(vec![
            by_letter(chars.next().unwrap()),
            by_letter(chars.next().unwrap()),
        ]);
    }
    steps.push(vec![w(29), w(28)]);
    let i = by_letter('i');
    let mut queue = (1..=27).rev().map(w); // w27 down to w1
    let mut step_no = 32;
    loop {
        let Some(first) = queue.next() else { break };
        if step_no % 2 == 0 {
            steps.push(vec![first, i]);
        } else {
            match queue.next() {
                Some(second) => steps.push(vec![first, second]),
                None => steps.push(vec![first]),
            }
        }
        step_no += 1;
    }

    let protocol = Protocol::new(h.vertex_count(), params_11(), steps)?;
    let trace = run(&h, &protocol)?;
    if !clears(&trace) || protocol_width(&protocol)? != 2 {
        return Err(ConstructionError::VerificationFailed(
            "grid example protocol failed simulation".to_string(),
        ));
    }
    Ok((h, protocol))
}
