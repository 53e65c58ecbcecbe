//! Protocol classification and transformation.
//!
//! A clearing protocol is *minimal* when it never immunizes a green vertex
//! whose remaining protection window sees no red neighbor, *monotone* when an
//! immunized vertex is never red afterwards, and *cautious* when every vertex
//! is re-immunized at least once in every `r + s` consecutive steps between
//! its first and last immunization. The module also carries the two bridges
//! between protocols and path decompositions: a cautious clearing protocol
//! built from any valid decomposition, and a valid decomposition recovered
//! from any cautious protocol.

use thiserror::Error;

use crate::engine::{clears, run, ModelParams, Protocol, Trace};
use crate::graph::{Graph, GraphError, VertexSet};
use crate::pathdecomp::{validate, width, PathDecomposition, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolsError {
    #[error("protocol does not clear the graph")]
    DoesNotClear,
    #[error("protocol is not cautious")]
    NotCautious,
    #[error("decomposition is invalid: {0}")]
    InvalidDecomposition(ValidationReport),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
}

/// Steps at which each vertex is immunized, ascending. Index 0 is vertex 0.
fn occurrences(protocol: &Protocol) -> Vec<Vec<usize>> {
    let n = protocol
        .steps()
        .first()
        .map(|s| s.universe())
        .unwrap_or(0);
    let mut occ = vec![Vec::new(); n];
    for (i, set) in protocol.steps().iter().enumerate() {
        for v in set.iter() {
            occ[v].push(i + 1);
        }
    }
    occ
}

/// Does `v`, green with `level` steps of protection left at time `t`, see a
/// red neighbor anywhere in the steps where a fresh immunization at `t + 1`
/// would still matter? The window `t+level ..= t+r` is clipped at the final
/// step `N`.
fn has_red_neighbor_in_window(
    g: &Graph,
    trace: &Trace,
    v: usize,
    t: usize,
    level: usize,
) -> bool {
    let r = trace.params().r;
    let lo = t + level;
    let hi = (t + r).min(trace.len());
    if lo > hi {
        return false;
    }
    (lo..=hi).any(|j| g.neighbors(v).iter().any(|&u| trace.is_red(j, u)))
}

/// True when no immunization of a green vertex is frivolous: every green
/// vertex re-immunized at `t + 1` has a red neighbor somewhere in its
/// remaining protection window.
pub fn is_minimal(g: &Graph, protocol: &Protocol) -> Result<bool, ProtocolsError> {
    let trace = run(g, protocol)?;
    for t in 0..protocol.len() {
        for v in protocol.set_at(t + 1).iter() {
            if let crate::engine::Color::Green(level) = trace.color(t, v) {
                if !has_red_neighbor_in_window(g, &trace, v, t, level) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Strips frivolous immunizations from a clearing protocol by a backward
/// pass, re-simulating before each step's decision because earlier removals
/// change green counter levels downstream. The result clears, is minimal,
/// and is a stepwise subset of the input (steps are kept, possibly emptied).
pub fn minimize(g: &Graph, protocol: &Protocol) -> Result<Protocol, ProtocolsError> {
    let trace = run(g, protocol)?;
    if !clears(&trace) {
        return Err(ProtocolsError::DoesNotClear);
    }
    let mut steps: Vec<VertexSet> = protocol.steps().to_vec();
    for t_mod in (1..=steps.len()).rev() {
        let current = Protocol::from_sets(protocol.params(), steps.clone());
        let trace = run(g, &current)?;
        let t = t_mod - 1;
        let mut kept = steps[t_mod - 1].clone();
        for v in steps[t_mod - 1].iter() {
            if let crate::engine::Color::Green(level) = trace.color(t, v) {
                if !has_red_neighbor_in_window(g, &trace, v, t, level) {
                    kept.remove(v);
                }
            }
        }
        steps[t_mod - 1] = kept;
    }
    Ok(Protocol::from_sets(protocol.params(), steps))
}

/// Restriction of a protocol to a subgraph: intersects every immunization set
/// with the kept vertices. Returns the subgraph relabeled over dense ids, the
/// map from new id to original id, and the restricted protocol. If the input
/// clears the host graph, the restriction clears the subgraph.
pub fn restrict(
    protocol: &Protocol,
    g: &Graph,
    vertices: &[usize],
    edges: &[(usize, usize)],
) -> Result<(Graph, Vec<usize>, Protocol), ProtocolsError> {
    let n = g.vertex_count();
    let mut kept = vec![false; n];
    for &v in vertices {
        if v >= n {
            return Err(GraphError::VertexOutOfRange(v, n).into());
        }
        kept[v] = true;
    }
    let old_ids: Vec<usize> = (0..n).filter(|&v| kept[v]).collect();
    let mut new_id = vec![usize::MAX; n];
    for (i, &v) in old_ids.iter().enumerate() {
        new_id[v] = i;
    }
    let mut new_edges = Vec::with_capacity(edges.len());
    for &(u, v) in edges {
        if u >= n || v >= n || !kept[u] || !kept[v] {
            return Err(GraphError::NotASubgraph(format!(
                "edge {{{u}, {v}}} has an endpoint outside the kept vertices"
            ))
            .into());
        }
        if !g.has_edge(u, v) {
            return Err(GraphError::NotASubgraph(format!(
                "{{{u}, {v}}} is not an edge of the host graph"
            ))
            .into());
        }
        new_edges.push((new_id[u], new_id[v]));
    }
    let sub = Graph::new_unconnected(old_ids.len(), &new_edges)?;
    let steps: Vec<Vec<usize>> = protocol
        .steps()
        .iter()
        .map(|a| a.iter().filter(|&v| kept[v]).map(|v| new_id[v]).collect())
        .collect();
    let restricted = Protocol::new(old_ids.len(), protocol.params(), steps)?;
    Ok((sub, old_ids, restricted))
}

/// True when no immunized vertex is ever red at a later step.
pub fn is_monotone(g: &Graph, protocol: &Protocol) -> Result<bool, ProtocolsError> {
    let trace = run(g, protocol)?;
    for (v, occ) in occurrences(protocol).iter().enumerate() {
        if let Some(&first) = occ.first() {
            for t in (first + 1)..=trace.len() {
                if trace.is_red(t, v) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Equivalent formulation of monotonicity: every vertex about to turn
/// contagious (in `Y(1)` at step `j`) is immunized at step `j + 1`. The
/// condition is vacuous at the final step, where no next step exists.
pub fn is_monotone_via_yellow(g: &Graph, protocol: &Protocol) -> Result<bool, ProtocolsError> {
    let trace = run(g, protocol)?;
    for j in 1..protocol.len() {
        let state = trace.state(j);
        for (v, &code) in state.codes.iter().enumerate() {
            if code == 1 && !protocol.set_at(j + 1).contains(v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True when the protocol clears the graph and every vertex is re-immunized
/// at least once in every `r + s` consecutive steps between its first and
/// last immunization.
pub fn is_cautious(g: &Graph, protocol: &Protocol) -> Result<bool, ProtocolsError> {
    let trace = run(g, protocol)?;
    if !clears(&trace) {
        return Ok(false);
    }
    let horizon = protocol.params().horizon();
    for occ in occurrences(protocol) {
        for w in occ.windows(2) {
            if w[1] - w[0] > horizon {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Builds a cautious clearing protocol from a valid path decomposition.
///
/// Each bag is split into `r + s` sections of size at most
/// `ceil((1 + width) / (r + s))`; vertices carried over from the previous bag
/// keep their section, new vertices go to the least-loaded section (ties to
/// the lowest section index, processed in ascending id). The protocol cycles
/// through each bag's sections twice, giving `2 m (r + s)` steps in total.
pub fn protocol_from_decomposition(
    g: &Graph,
    pd: &PathDecomposition,
    params: ModelParams,
) -> Result<Protocol, ProtocolsError> {
    let report = validate(g, pd);
    if !report.is_valid() || pd.is_empty() {
        return Err(ProtocolsError::InvalidDecomposition(report));
    }
    let n = g.vertex_count();
    let horizon = params.horizon();
    let cap = (1 + width(pd).expect("non-empty")).div_ceil(horizon);
    let mut section_of = vec![usize::MAX; n];
    let mut steps: Vec<VertexSet> = Vec::with_capacity(2 * pd.len() * horizon);
    let mut prev_bag: Option<&VertexSet> = None;
    for bag in pd.bags() {
        let mut sections: Vec<Vec<usize>> = vec![Vec::new(); horizon];
        for v in bag.iter() {
            let carried = prev_bag.map_or(false, |p| p.contains(v));
            if carried {
                sections[section_of[v]].push(v);
            }
        }
        for v in bag.iter() {
            let carried = prev_bag.map_or(false, |p| p.contains(v));
            if !carried {
                let mut best = 0;
                for i in 1..horizon {
                    if sections[i].len() < sections[best].len() {
                        best = i;
                    }
                }
                debug_assert!(sections[best].len() < cap);
                sections[best].push(v);
            }
        }
        for (i, section) in sections.iter().enumerate() {
            for &v in section {
                section_of[v] = i;
            }
        }
        for _cycle in 0..2 {
            for section in &sections {
                steps.push(VertexSet::from_ids(n, section.iter().copied())?);
            }
        }
        prev_bag = Some(bag);
    }
    Ok(Protocol::from_sets(params, steps))
}

/// Recovers a path decomposition from a cautious protocol: bag `i` is the
/// union of the `r + s` immunization sets starting at step `i`. When the
/// protocol is shorter than `r + s` steps the result degenerates to the
/// single bag holding every immunized vertex.
pub fn decomposition_from_cautious(
    g: &Graph,
    protocol: &Protocol,
) -> Result<PathDecomposition, ProtocolsError> {
    if !is_cautious(g, protocol)? {
        return Err(ProtocolsError::NotCautious);
    }
    let n = g.vertex_count();
    let horizon = protocol.params().horizon();
    let len = protocol.len();
    let mut bags = Vec::new();
    if len < horizon {
        let mut bag = VertexSet::empty(n);
        for a in protocol.steps() {
            bag.union_with(a);
        }
        bags.push(bag);
    } else {
        for i in 0..=(len - horizon) {
            let mut bag = VertexSet::empty(n);
            for a in &protocol.steps()[i..i + horizon] {
                bag.union_with(a);
            }
            bags.push(bag);
        }
    }
    Ok(PathDecomposition::new(bags))
}
