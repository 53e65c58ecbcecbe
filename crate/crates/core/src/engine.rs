//! Exact simulation of the `(r,s)` transition system.
//!
//! At time 0 every vertex is contagious (red). Each step applies its
//! immunization set in two phases:
//!
//! * phase 1 (neighbor-independent): immunized vertices become `G(r)`; red
//!   stays red; `Y(1)` turns red; `Y(i)` decays to `Y(i-1)`; `G(i)` decays to
//!   `G(i-1)`; an unimmunized `G(1)` vertex is left pending;
//! * phase 2: each pending vertex with a neighbor in the phase-1 red set
//!   becomes `Y(s)`, otherwise it remains `G(1)`.
//!
//! The split resolves the self-reference in the transition table — a vertex
//! turning red this step infects its susceptible neighbors this same step.
//!
//! States are encoded per vertex as an integer code: `0` = red, `1..=s` =
//! `Y(1)..Y(s)`, `s+1..=s+r` = `G(1)..G(r)`. Solver state hashing packs this
//! code vector into bytes in vertex order (vertex 0 first), so search results
//! are reproducible across implementations.

use thiserror::Error;

use crate::graph::{Graph, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("model parameters require r >= 1 and s >= 1 (got r={0}, s={1})")]
    BadParams(usize, usize),
    #[error("immunization set universe {0} does not match graph size {1}")]
    UniverseMismatch(usize, usize),
    #[error("state belongs to a graph with {0} vertices, expected {1}")]
    StateMismatch(usize, usize),
    #[error("protocol is empty")]
    EmptyProtocol,
    #[error("time index {0} out of range (trace has steps 0..={1})")]
    TimeOutOfRange(usize, usize),
}

/// Protective period `r` and latency period `s`, both at least one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelParams {
    pub r: usize,
    pub s: usize,
}

impl ModelParams {
    pub fn new(r: usize, s: usize) -> Result<Self, EngineError> {
        if r < 1 || s < 1 {
            return Err(EngineError::BadParams(r, s));
        }
        Ok(ModelParams { r, s })
    }

    /// `r + s`: the window length used by cautious protocols.
    pub fn horizon(&self) -> usize {
        self.r + self.s
    }

    fn green_code(&self, level: usize) -> u8 {
        debug_assert!(level >= 1 && level <= self.r);
        (self.s + level) as u8
    }
}

/// Color of one vertex at one time-step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Color {
    Red,
    /// Infected but not contagious; turns red after `level` more unimmunized
    /// steps.
    Yellow(usize),
    /// Healthy; protection lasts `level` more steps.
    Green(usize),
}

impl Color {
    pub fn from_code(code: u8, params: ModelParams) -> Color {
        let c = code as usize;
        if c == 0 {
            Color::Red
        } else if c <= params.s {
            Color::Yellow(c)
        } else {
            debug_assert!(c <= params.s + params.r);
            Color::Green(c - params.s)
        }
    }

    pub fn is_green(self) -> bool {
        matches!(self, Color::Green(_))
    }

    pub fn is_red(self) -> bool {
        matches!(self, Color::Red)
    }
}

/// Per-vertex color codes at one time-step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimState {
    pub t: usize,
    pub codes: Vec<u8>,
}

impl SimState {
    /// The all-red state at time 0.
    pub fn initial(n: usize) -> SimState {
        SimState {
            t: 0,
            codes: vec![0; n],
        }
    }

    pub fn all_green(&self, params: ModelParams) -> bool {
        self.codes.iter().all(|&c| c as usize > params.s)
    }

    pub fn red_set(&self) -> Vec<usize> {
        (0..self.codes.len()).filter(|&v| self.codes[v] == 0).collect()
    }
}

/// An ordered sequence of immunization sets under fixed model parameters.
/// Empty sets are legal steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Protocol {
    params: ModelParams,
    steps: Vec<VertexSet>,
}

impl Protocol {
    /// Builds a protocol over a graph with `n` vertices from raw id lists.
    pub fn new(
        n: usize,
        params: ModelParams,
        steps: Vec<Vec<usize>>,
    ) -> Result<Self, EngineError> {
        let mut sets = Vec::with_capacity(steps.len());
        for ids in steps {
            let set = VertexSet::from_ids(n, ids)
                .map_err(|_| EngineError::UniverseMismatch(n, n))?;
            sets.push(set);
        }
        Ok(Protocol {
            params,
            steps: sets,
        })
    }

    pub fn from_sets(params: ModelParams, steps: Vec<VertexSet>) -> Self {
        Protocol { params, steps }
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn steps(&self) -> &[VertexSet] {
        &self.steps
    }

    /// Number of time-steps `N`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The immunization set of step `t` (1-based).
    pub fn set_at(&self, t: usize) -> &VertexSet {
        &self.steps[t - 1]
    }

    /// Step ids as ascending lists, for serialization.
    pub fn step_ids(&self) -> Vec<Vec<usize>> {
        self.steps.iter().map(|s| s.ids()).collect()
    }
}

/// The width of a protocol: the largest immunization set it uses.
pub fn protocol_width(protocol: &Protocol) -> Result<usize, EngineError> {
    if protocol.is_empty() {
        return Err(EngineError::EmptyProtocol);
    }
    Ok(protocol.steps().iter().map(|a| a.len()).max().unwrap())
}

/// Full history of a simulation: states for `t = 0..=N` plus the protocol
/// that produced them.
#[derive(Clone, Debug)]
pub struct Trace {
    protocol: Protocol,
    states: Vec<SimState>,
}

impl Trace {
    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    pub fn params(&self) -> ModelParams {
        self.protocol.params()
    }

    /// Number of steps `N` (the trace holds `N + 1` states).
    pub fn len(&self) -> usize {
        self.states.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn state(&self, t: usize) -> &SimState {
        &self.states[t]
    }

    pub fn final_state(&self) -> &SimState {
        self.states.last().unwrap()
    }

    pub fn color(&self, t: usize, v: usize) -> Color {
        Color::from_code(self.states[t].codes[v], self.params())
    }

    pub fn is_red(&self, t: usize, v: usize) -> bool {
        self.states[t].codes[v] == 0
    }
}

/// Applies one immunization set to a state.
pub fn step(
    g: &Graph,
    state: &SimState,
    a: &VertexSet,
    params: ModelParams,
) -> Result<SimState, EngineError> {
    let n = g.vertex_count();
    if a.universe() != n {
        return Err(EngineError::UniverseMismatch(a.universe(), n));
    }
    if state.codes.len() != n {
        return Err(EngineError::StateMismatch(state.codes.len(), n));
    }
    let s = params.s as u8;
    let mut next = vec![0u8; n];
    let mut pending = Vec::new();
    for v in 0..n {
        if a.contains(v) {
            next[v] = params.green_code(params.r);
            continue;
        }
        let c = state.codes[v];
        next[v] = if c <= 1 {
            0 // red stays red, Y(1) turns red
        } else if c <= s {
            c - 1 // yellow decays
        } else if c == s + 1 {
            pending.push(v); // G(1): resolved against the phase-1 red set
            c
        } else {
            c - 1 // green decays
        };
    }
    for &v in &pending {
        if g.neighbors(v).iter().any(|&u| next[u] == 0) {
            next[v] = s; // infected: Y(s)
        }
    }
    Ok(SimState {
        t: state.t + 1,
        codes: next,
    })
}

/// Runs a protocol from the all-red state, producing the full trace.
pub fn run(g: &Graph, protocol: &Protocol) -> Result<Trace, EngineError> {
    let mut states = Vec::with_capacity(protocol.len() + 1);
    states.push(SimState::initial(g.vertex_count()));
    for a in protocol.steps() {
        let next = step(g, states.last().unwrap(), a, protocol.params())?;
        states.push(next);
    }
    Ok(Trace {
        protocol: protocol.clone(),
        states,
    })
}

/// True when every vertex is green at the final time-step.
pub fn clears(trace: &Trace) -> bool {
    trace.final_state().all_green(trace.params())
}

/// The exact color partition at one time-step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorClasses {
    pub red: Vec<usize>,
    /// `yellow[i]` holds `Y(i+1)`, i.e. index 0 is the about-to-turn-red class.
    pub yellow: Vec<Vec<usize>>,
    /// `green[i]` holds `G(i+1)`, i.e. the last entry is the freshly immunized class.
    pub green: Vec<Vec<usize>>,
}

/// Splits the trace state at time `t` into its color classes.
pub fn color_classes(trace: &Trace, t: usize) -> Result<ColorClasses, EngineError> {
    if t > trace.len() {
        return Err(EngineError::TimeOutOfRange(t, trace.len()));
    }
    let params = trace.params();
    let mut classes = ColorClasses {
        red: Vec::new(),
        yellow: vec![Vec::new(); params.s],
        green: vec![Vec::new(); params.r],
    };
    for (v, &code) in trace.state(t).codes.iter().enumerate() {
        match Color::from_code(code, params) {
            Color::Red => classes.red.push(v),
            Color::Yellow(i) => classes.yellow[i - 1].push(v),
            Color::Green(i) => classes.green[i - 1].push(v),
        }
    }
    Ok(classes)
}
