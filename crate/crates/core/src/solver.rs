//! Exact immunization numbers by state-space reachability, lower-bound
//! refutations from vertex boundaries, the pathwidth upper bound, and
//! machine-checkable certificates for both directions.
//!
//! The width-k search runs breadth-first from the all-red state over all
//! moves `A` with `|A| <= k` (the empty move included), memoizing visited
//! states on the per-vertex code vector. Moves are enumerated by size and
//! then colexicographically, and parents are kept first-reached, so the
//! returned witness is deterministic and of minimum length among width-k
//! protocols.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use thiserror::Error;

use crate::engine::{clears, protocol_width, run, step, ModelParams, Protocol, SimState};
use crate::graph::{
    is_caterpillar, isoperimetric_value_with_floor, Combinations, Graph, GraphError,
    SubsetBudget, VertexSet,
};
use crate::pathdecomp::{pathwidth, PathdecompError, DEFAULT_PATHWIDTH_VERTEX_LIMIT};
use crate::protocols::{protocol_from_decomposition, ProtocolsError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("state budget exhausted after {0} states")]
    StatesExhausted(usize),
    #[error("subset budget exhausted")]
    SubsetsExhausted,
    #[error("pathwidth budget exhausted: {0}")]
    PathwidthExhausted(PathdecompError),
    #[error("constructed protocol failed verification: {0}")]
    ConstructionFailure(String),
    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
    #[error(transparent)]
    Protocols(#[from] ProtocolsError),
}

/// Explicit work limits. Exhaustion is always surfaced, never converted into
/// an answer.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_states: usize,
    pub max_subsets: u64,
    pub max_pathwidth_vertices: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: 5_000_000,
            max_subsets: 200_000_000,
            max_pathwidth_vertices: DEFAULT_PATHWIDTH_VERTEX_LIMIT,
        }
    }
}

impl Budget {
    fn subset_budget(&self) -> SubsetBudget {
        SubsetBudget {
            max_subsets: self.max_subsets,
        }
    }
}

/// Outcome of the width-k reachability search.
#[derive(Clone, Debug)]
pub enum WidthDecision {
    /// A clearing protocol of width at most `k`, of minimum length.
    Cleared(Protocol),
    /// The full reachable state space contains no all-green state.
    Impossible,
    /// The state budget was hit before the search finished.
    Exhausted { states_visited: usize },
}

/// Runs breadth-first search for a clearing protocol of width at most `k`.
pub fn clearable_with_width(
    g: &Graph,
    params: ModelParams,
    k: usize,
    budget: &Budget,
) -> WidthDecision {
    let n = g.vertex_count();
    let moves: Vec<VertexSet> = moves_up_to_width(n, k.min(n));
    let start = SimState::initial(n);
    if start.all_green(params) {
        return WidthDecision::Cleared(Protocol::from_sets(params, vec![]));
    }
    // Arena of visited states; parents index into it.
    let mut arena: Vec<(Vec<u8>, usize, usize)> = vec![(start.codes.clone(), usize::MAX, 0)];
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
    seen.insert(start.codes, 0);
    let mut head = 0;
    while head < arena.len() {
        let codes = arena[head].0.clone();
        let state = SimState { t: 0, codes };
        for (mv, a) in moves.iter().enumerate() {
            let next = step(g, &state, a, params).expect("moves are within the universe");
            match seen.entry(next.codes) {
                Entry::Occupied(_) => {}
                Entry::Vacant(slot) => {
                    let idx = arena.len();
                    if idx > budget.max_states {
                        return WidthDecision::Exhausted {
                            states_visited: idx,
                        };
                    }
                    let goal = slot.key().iter().all(|&c| c as usize > params.s);
                    arena.push((slot.key().clone(), head, mv));
                    slot.insert(idx);
                    if goal {
                        return WidthDecision::Cleared(reconstruct(params, &moves, &arena, idx));
                    }
                }
            }
        }
        head += 1;
    }
    WidthDecision::Impossible
}

fn reconstruct(
    params: ModelParams,
    moves: &[VertexSet],
    arena: &[(Vec<u8>, usize, usize)],
    goal: usize,
) -> Protocol {
    let mut steps = Vec::new();
    let mut idx = goal;
    while idx != 0 {
        let (_, parent, mv) = arena[idx];
        steps.push(moves[mv].clone());
        idx = parent;
    }
    steps.reverse();
    Protocol::from_sets(params, steps)
}

/// All subsets of `0..n` of size at most `k`, ordered by size and then
/// colexicographically.
fn moves_up_to_width(n: usize, k: usize) -> Vec<VertexSet> {
    let mut moves = Vec::new();
    for size in 0..=k {
        for ids in Combinations::new(n, size) {
            moves.push(VertexSet::from_ids(n, ids).unwrap());
        }
    }
    moves
}

/// Evidence that the immunization number exceeds some width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LowerEvidence {
    /// Width 0 cannot clear a graph with at least one vertex.
    TrivialNonempty,
    /// The graph has an edge and is not a caterpillar, so width 1 cannot
    /// clear it (r = s = 1 semantics).
    NonCaterpillar,
    /// For every subset size `q` in `p-w+1 ..= p`, the minimum boundary
    /// exceeds `2w - 1`, refuting width `w` (r = s = 1 semantics). Each entry
    /// records the exact minimum for one size.
    Isoperimetric {
        p: usize,
        size_min_boundary: Vec<(usize, usize)>,
    },
    /// The width-w reachability search explored its entire state space
    /// without reaching the all-green state.
    SearchImpossible,
}

/// Evidence that some protocol of the stated width clears the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpperEvidence {
    Protocol(Protocol),
    Decomposition(crate::pathdecomp::PathDecomposition),
}

/// Replayable evidence for a one-sided bound on the immunization number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Lower {
        params: ModelParams,
        width: usize,
        evidence: LowerEvidence,
    },
    Upper {
        params: ModelParams,
        width: usize,
        evidence: UpperEvidence,
    },
}

/// Result of the exact solver: the immunization number with certificates for
/// `i <= value` and `i > value - 1`.
#[derive(Clone, Debug)]
pub struct ImmunizationNumber {
    pub value: usize,
    pub lower: Certificate,
    pub upper: Certificate,
}

/// Searches for the smallest `p` such that every p-subset has boundary at
/// least 2, which refutes width 1 (r = s = 1). Returns `None` when no such
/// `p` exists, which is inconclusive.
pub fn refute_width_one(g: &Graph, budget: &Budget) -> Result<Option<usize>, SolverError> {
    let n = g.vertex_count();
    let sb = budget.subset_budget();
    for p in 1..n {
        match isoperimetric_value_with_floor(g, p, 1, &sb) {
            Ok(min) if min >= 2 => return Ok(Some(p)),
            Ok(_) => {}
            Err(GraphError::EnumerationExhausted(_)) => {
                return Err(SolverError::SubsetsExhausted)
            }
            Err(_) => unreachable!("p is within 1..n"),
        }
    }
    Ok(None)
}

/// Searches for the smallest `p` in `w+1 ..= n-1` such that no subset of any
/// size in `p-w+1 ..= p` has boundary at most `2w - 1`; such a `p` proves
/// the immunization number exceeds `w` (r = s = 1). Returns the witness `p`
/// together with the exact per-size minimum boundaries.
pub fn refute_width(
    g: &Graph,
    w: usize,
    budget: &Budget,
) -> Result<Option<(usize, Vec<(usize, usize)>)>, SolverError> {
    assert!(w >= 1);
    let n = g.vertex_count();
    let threshold = 2 * w - 1;
    let sb = budget.subset_budget();
    // min_for[q]: exact minimum when it exceeds the threshold, or the
    // early-exit value at most the threshold when the size fails.
    let mut min_for: Vec<Option<usize>> = vec![None; n];
    let mut min_of = |q: usize| -> Result<usize, SolverError> {
        if let Some(m) = min_for[q] {
            return Ok(m);
        }
        let m = isoperimetric_value_with_floor(g, q, threshold, &sb).map_err(|e| match e {
            GraphError::EnumerationExhausted(_) => SolverError::SubsetsExhausted,
            other => panic!("unexpected enumeration error: {other}"),
        })?;
        min_for[q] = Some(m);
        Ok(m)
    };
    for p in (w + 1)..n {
        let lo = p - w + 1;
        let mut witness = Vec::new();
        let mut all_exceed = true;
        for q in lo..=p {
            let m = min_of(q)?;
            if m <= threshold {
                all_exceed = false;
                break;
            }
            witness.push((q, m));
        }
        if all_exceed {
            return Ok(Some((p, witness)));
        }
    }
    Ok(None)
}

/// The pathwidth upper bound `ceil((1 + pw) / (r + s))`, certified by a
/// protocol constructed from a minimum-width decomposition and verified by
/// simulation.
pub fn upper_bound_pathwidth(
    g: &Graph,
    params: ModelParams,
    budget: &Budget,
) -> Result<(usize, Certificate), SolverError> {
    let (pw, pd) = pathwidth(g, budget.max_pathwidth_vertices)
        .map_err(SolverError::PathwidthExhausted)?;
    let bound = (1 + pw).div_ceil(params.horizon());
    let protocol = protocol_from_decomposition(g, &pd, params)?;
    let trace = run(g, &protocol)?;
    if !clears(&trace) {
        return Err(SolverError::ConstructionFailure(
            "decomposition-derived protocol does not clear".to_string(),
        ));
    }
    if protocol_width(&protocol)? > bound {
        return Err(SolverError::ConstructionFailure(
            "decomposition-derived protocol exceeds the pathwidth bound".to_string(),
        ));
    }
    Ok((
        bound,
        Certificate::Upper {
            params,
            width: bound,
            evidence: UpperEvidence::Protocol(protocol),
        },
    ))
}

/// Computes the exact immunization number with certificates. Iterates the
/// width from the best refutation-backed lower bound upward; the lower
/// certificate for the answer comes from the refutation ladder or from an
/// exhaustive impossible verdict at `value - 1`.
pub fn immunization_number(
    g: &Graph,
    params: ModelParams,
    budget: &Budget,
) -> Result<ImmunizationNumber, SolverError> {
    let n = g.vertex_count();
    assert!(n >= 1);
    let mut lower = 1usize;
    let mut lower_cert = Certificate::Lower {
        params,
        width: 0,
        evidence: LowerEvidence::TrivialNonempty,
    };
    if params == (ModelParams { r: 1, s: 1 }) {
        if let Some(p) = refute_width_one(g, budget)? {
            lower = 2;
            let sb = budget.subset_budget();
            let exact = isoperimetric_value_with_floor(g, p, 0, &sb)
                .map_err(|_| SolverError::SubsetsExhausted)?;
            lower_cert = Certificate::Lower {
                params,
                width: 1,
                evidence: LowerEvidence::Isoperimetric {
                    p,
                    size_min_boundary: vec![(p, exact)],
                },
            };
        } else if g.edge_count() >= 1 && !is_caterpillar(g) {
            lower = 2;
            lower_cert = Certificate::Lower {
                params,
                width: 1,
                evidence: LowerEvidence::NonCaterpillar,
            };
        }
        if lower == 2 {
            let mut w = 2;
            while let Some((p, witness)) = refute_width(g, w, budget)? {
                lower = w + 1;
                lower_cert = Certificate::Lower {
                    params,
                    width: w,
                    evidence: LowerEvidence::Isoperimetric {
                        p,
                        size_min_boundary: witness,
                    },
                };
                w += 1;
            }
        }
    }
    for k in lower..=n {
        match clearable_with_width(g, params, k, budget) {
            WidthDecision::Cleared(witness) => {
                let upper = Certificate::Upper {
                    params,
                    width: k,
                    evidence: UpperEvidence::Protocol(witness),
                };
                return Ok(ImmunizationNumber {
                    value: k,
                    lower: lower_cert,
                    upper,
                });
            }
            WidthDecision::Impossible => {
                lower_cert = Certificate::Lower {
                    params,
                    width: k,
                    evidence: LowerEvidence::SearchImpossible,
                };
            }
            WidthDecision::Exhausted { states_visited } => {
                return Err(SolverError::StatesExhausted(states_visited));
            }
        }
    }
    unreachable!("immunizing all vertices at once always clears");
}

/// Re-verifies a certificate from scratch, without trusting the search that
/// produced it. Upper certificates are re-simulated; lower certificates
/// re-enumerate the claimed subset families exhaustively (or re-run the
/// exhaustive search for impossible verdicts).
pub fn check_certificate(
    g: &Graph,
    cert: &Certificate,
    budget: &Budget,
) -> Result<bool, SolverError> {
    match cert {
        Certificate::Upper {
            params,
            width,
            evidence,
        } => {
            let protocol = match evidence {
                UpperEvidence::Protocol(p) => {
                    if p.params() != *params {
                        return Ok(false);
                    }
                    p.clone()
                }
                UpperEvidence::Decomposition(pd) => {
                    if !crate::pathdecomp::validate(g, pd).is_valid() {
                        return Ok(false);
                    }
                    match protocol_from_decomposition(g, pd, *params) {
                        Ok(p) => p,
                        Err(_) => return Ok(false),
                    }
                }
            };
            if protocol.is_empty() {
                return Ok(g.vertex_count() == 0);
            }
            for a in protocol.steps() {
                if a.universe() != g.vertex_count() {
                    return Ok(false);
                }
            }
            let trace = match run(g, &protocol) {
                Ok(t) => t,
                Err(_) => return Ok(false),
            };
            Ok(clears(&trace) && protocol_width(&protocol)? <= *width)
        }
        Certificate::Lower {
            params,
            width,
            evidence,
        } => match evidence {
            LowerEvidence::TrivialNonempty => Ok(*width == 0 && g.vertex_count() >= 1),
            LowerEvidence::NonCaterpillar => Ok(*width == 1
                && *params == ModelParams { r: 1, s: 1 }
                && g.edge_count() >= 1
                && !is_caterpillar(g)),
            LowerEvidence::Isoperimetric {
                p,
                size_min_boundary,
            } => {
                if *params != (ModelParams { r: 1, s: 1 }) || *width < 1 {
                    return Ok(false);
                }
                let n = g.vertex_count();
                let w = *width;
                let lo_ok = if w == 1 { *p >= 1 } else { *p >= w + 1 };
                if !lo_ok || *p > n.saturating_sub(1) {
                    return Ok(false);
                }
                let lo = p.saturating_sub(w - 1);
                let expected: Vec<usize> = (lo..=*p).collect();
                let listed: Vec<usize> = size_min_boundary.iter().map(|&(q, _)| q).collect();
                if listed != expected {
                    return Ok(false);
                }
                let sb = budget.subset_budget();
                for &(q, claimed) in size_min_boundary {
                    let actual = isoperimetric_value_with_floor(g, q, 0, &sb)
                        .map_err(|_| SolverError::SubsetsExhausted)?;
                    if actual != claimed || actual <= 2 * w - 1 {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            LowerEvidence::SearchImpossible => {
                match clearable_with_width(g, *params, *width, budget) {
                    WidthDecision::Impossible => Ok(true),
                    WidthDecision::Cleared(_) => Ok(false),
                    WidthDecision::Exhausted { states_visited } => {
                        Err(SolverError::StatesExhausted(states_visited))
                    }
                }
            }
        },
    }
}
