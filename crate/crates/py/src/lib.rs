//! Python bindings: a `Graph` class plus module-level functions covering
//! simulation, protocol classification, pathwidth, the exact solver, and the
//! tree constructions. Protocols cross the boundary as plain lists of
//! per-step id lists; `r` and `s` are passed alongside.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use immunize_core::constructions::{
    build_subdivided_grid_example, build_subdivided_hatted_tree, merged_time_bound,
    tree_subdivision_protocol, DEFAULT_CONSTRUCTION_VERTEX_LIMIT,
};
use immunize_core::engine::{self, ModelParams, Protocol};
use immunize_core::graph::{self, FamilySpec, SubsetBudget, VertexSet};
use immunize_core::pathdecomp::{self, PathDecomposition, DEFAULT_PATHWIDTH_VERTEX_LIMIT};
use immunize_core::protocols;
use immunize_core::solver::{self, Budget};

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// An undirected simple graph over dense vertex ids.
#[pyclass(frozen)]
struct Graph {
    inner: graph::Graph,
}

#[pymethods]
impl Graph {
    /// Graph(n, edges, allow_disconnected=False)
    #[new]
    #[pyo3(signature = (n, edges, allow_disconnected = false))]
    fn new(n: usize, edges: Vec<(usize, usize)>, allow_disconnected: bool) -> PyResult<Self> {
        let inner = if allow_disconnected {
            graph::Graph::new_unconnected(n, &edges)
        } else {
            graph::Graph::new(n, &edges)
        }
        .map_err(value_err)?;
        Ok(Graph { inner })
    }

    /// Named family: "path", "cycle", "star", "grid", "mary_tree",
    /// "hatted_mary_tree" (with numeric args), "caterpillar" (list of leaf
    /// counts), "petersen" or "spider_k13" (no args).
    #[staticmethod]
    #[pyo3(signature = (name, *args))]
    fn family(name: &str, args: Vec<usize>) -> PyResult<Self> {
        let arg = |i: usize| -> PyResult<usize> {
            args.get(i).copied().ok_or_else(|| {
                PyValueError::new_err(format!("family {name:?} needs more parameters"))
            })
        };
        let spec = match name {
            "path" => FamilySpec::Path(arg(0)?),
            "cycle" => FamilySpec::Cycle(arg(0)?),
            "star" => FamilySpec::Star(arg(0)?),
            "grid" => FamilySpec::Grid(arg(0)?),
            "petersen" => FamilySpec::Petersen,
            "spider_k13" => FamilySpec::SpiderK13Subdiv,
            "caterpillar" => FamilySpec::Caterpillar(args.clone()),
            "mary_tree" => FamilySpec::MaryTree(arg(0)?, arg(1)?),
            "hatted_mary_tree" => FamilySpec::HattedMaryTree(arg(0)?, arg(1)?),
            other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
        };
        Ok(Graph {
            inner: graph::generate(&spec).map_err(value_err)?,
        })
    }

    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.vertex_count() {
            return Err(value_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn label(&self, v: usize) -> Option<String> {
        self.inner.label(v).map(str::to_string)
    }

    fn is_caterpillar(&self) -> bool {
        graph::is_caterpillar(&self.inner)
    }

    fn subdivide_edge(&self, u: usize, v: usize, k: usize) -> PyResult<Graph> {
        Ok(Graph {
            inner: graph::subdivide_edge(&self.inner, (u, v), k).map_err(value_err)?,
        })
    }

    fn boundary(&self, members: Vec<usize>) -> PyResult<Vec<usize>> {
        let s =
            VertexSet::from_ids(self.inner.vertex_count(), members).map_err(value_err)?;
        Ok(graph::boundary(&self.inner, &s).ids())
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, m={})",
            self.inner.vertex_count(),
            self.inner.edge_count()
        )
    }
}

fn to_protocol(g: &Graph, r: usize, s: usize, steps: Vec<Vec<usize>>) -> PyResult<Protocol> {
    let params = ModelParams::new(r, s).map_err(value_err)?;
    Protocol::new(g.inner.vertex_count(), params, steps).map_err(value_err)
}

fn to_decomposition(g: &Graph, bags: Vec<Vec<usize>>) -> PyResult<PathDecomposition> {
    let n = g.inner.vertex_count();
    let mut sets = Vec::with_capacity(bags.len());
    for bag in bags {
        sets.push(VertexSet::from_ids(n, bag).map_err(value_err)?);
    }
    Ok(PathDecomposition::new(sets))
}

/// True when the protocol leaves every vertex green at its final step.
#[pyfunction]
fn protocol_clears(g: &Graph, r: usize, s: usize, steps: Vec<Vec<usize>>) -> PyResult<bool> {
    let j = to_protocol(g, r, s, steps)?;
    let trace = engine::run(&g.inner, &j).map_err(value_err)?;
    Ok(engine::clears(&trace))
}

/// Full trace as a list of per-step code vectors (0 red, 1..=s yellow,
/// s+1..=s+r green).
#[pyfunction]
fn simulate(g: &Graph, r: usize, s: usize, steps: Vec<Vec<usize>>) -> PyResult<Vec<Vec<u8>>> {
    let j = to_protocol(g, r, s, steps)?;
    let trace = engine::run(&g.inner, &j).map_err(value_err)?;
    Ok((0..=trace.len())
        .map(|t| trace.state(t).codes.clone())
        .collect())
}

#[pyfunction]
fn is_minimal(g: &Graph, r: usize, s: usize, steps: Vec<Vec<usize>>) -> PyResult<bool> {
    protocols::is_minimal(&g.inner, &to_protocol(g, r, s, steps)?).map_err(value_err)
}

#[pyfunction]
fn is_monotone(g: &Graph, r: usize, s: usize, steps: Vec<Vec<usize>>) -> PyResult<bool> {
    protocols::is_monotone(&g.inner, &to_protocol(g, r, s, steps)?).map_err(value_err)
}

#[pyfunction]
fn is_cautious(g: &Graph, r: usize, s: usize, steps: Vec<Vec<usize>>) -> PyResult<bool> {
    protocols::is_cautious(&g.inner, &to_protocol(g, r, s, steps)?).map_err(value_err)
}

#[pyfunction]
fn minimize(
    g: &Graph,
    r: usize,
    s: usize,
    steps: Vec<Vec<usize>>,
) -> PyResult<Vec<Vec<usize>>> {
    let out = protocols::minimize(&g.inner, &to_protocol(g, r, s, steps)?).map_err(value_err)?;
    Ok(out.step_ids())
}

/// Exact pathwidth and a witness decomposition as a list of bags.
#[pyfunction]
fn pathwidth(g: &Graph) -> PyResult<(usize, Vec<Vec<usize>>)> {
    let (pw, pd) =
        pathdecomp::pathwidth(&g.inner, DEFAULT_PATHWIDTH_VERTEX_LIMIT).map_err(runtime_err)?;
    Ok((pw, pd.bag_ids()))
}

/// Cautious clearing protocol from a path decomposition.
#[pyfunction]
fn protocol_from_decomposition(
    g: &Graph,
    bags: Vec<Vec<usize>>,
    r: usize,
    s: usize,
) -> PyResult<Vec<Vec<usize>>> {
    let pd = to_decomposition(g, bags)?;
    let params = ModelParams::new(r, s).map_err(value_err)?;
    let j = protocols::protocol_from_decomposition(&g.inner, &pd, params).map_err(value_err)?;
    Ok(j.step_ids())
}

/// Path decomposition recovered from a cautious protocol.
#[pyfunction]
fn decomposition_from_cautious(
    g: &Graph,
    r: usize,
    s: usize,
    steps: Vec<Vec<usize>>,
) -> PyResult<Vec<Vec<usize>>> {
    let pd = protocols::decomposition_from_cautious(&g.inner, &to_protocol(g, r, s, steps)?)
        .map_err(value_err)?;
    Ok(pd.bag_ids())
}

/// Exact immunization number; returns (value, witness protocol).
#[pyfunction]
#[pyo3(signature = (g, r, s, max_states = None))]
fn immunization_number(
    g: &Graph,
    r: usize,
    s: usize,
    max_states: Option<usize>,
) -> PyResult<(usize, Vec<Vec<usize>>)> {
    let params = ModelParams::new(r, s).map_err(value_err)?;
    let mut budget = Budget::default();
    if let Some(states) = max_states {
        budget.max_states = states;
    }
    let result = solver::immunization_number(&g.inner, params, &budget).map_err(runtime_err)?;
    let witness = match &result.upper {
        immunize_core::solver::Certificate::Upper {
            evidence: immunize_core::solver::UpperEvidence::Protocol(p),
            ..
        } => p.step_ids(),
        _ => Vec::new(),
    };
    Ok((result.value, witness))
}

/// Exact minimum boundary size over all k-subsets.
#[pyfunction]
fn isoperimetric_value(g: &Graph, k: usize) -> PyResult<usize> {
    graph::isoperimetric_value(&g.inner, k, &SubsetBudget::default()).map_err(runtime_err)
}

/// Closed-form step bound for the m-way merge construction.
#[pyfunction]
fn merge_time_bound(m: usize, s: usize) -> PyResult<usize> {
    merged_time_bound(m, s).map_err(value_err)
}

/// Subdivided hatted m-ary tree of depth d with its width-2 protocol:
/// returns (graph, stem, protocol steps).
#[pyfunction]
fn subdivided_hatted_tree(m: usize, d: usize) -> PyResult<(Graph, usize, Vec<Vec<usize>>)> {
    let built = build_subdivided_hatted_tree(m, d, DEFAULT_CONSTRUCTION_VERTEX_LIMIT)
        .map_err(runtime_err)?;
    Ok((
        Graph { inner: built.graph },
        built.stem,
        built.protocol.step_ids(),
    ))
}

/// Subdivision of an arbitrary tree clearing at width <= 2:
/// returns (graph, protocol steps, vertex map).
#[pyfunction]
fn tree_subdivision(g: &Graph) -> PyResult<(Graph, Vec<Vec<usize>>, Vec<usize>)> {
    let result = tree_subdivision_protocol(&g.inner, DEFAULT_CONSTRUCTION_VERTEX_LIMIT)
        .map_err(runtime_err)?;
    Ok((
        Graph {
            inner: result.subdivided,
        },
        result.protocol.step_ids(),
        result.vertex_map,
    ))
}

/// The 46-vertex subdivided grid example: returns (graph, protocol steps).
#[pyfunction]
fn subdivided_grid_example() -> PyResult<(Graph, Vec<Vec<usize>>)> {
    let (g, j) = build_subdivided_grid_example().map_err(runtime_err)?;
    Ok((Graph { inner: g }, j.step_ids()))
}

#[pymodule]
fn immunize_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(protocol_clears, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(is_minimal, m)?)?;
    m.add_function(wrap_pyfunction!(is_monotone, m)?)?;
    m.add_function(wrap_pyfunction!(is_cautious, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(pathwidth, m)?)?;
    m.add_function(wrap_pyfunction!(protocol_from_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(decomposition_from_cautious, m)?)?;
    m.add_function(wrap_pyfunction!(immunization_number, m)?)?;
    m.add_function(wrap_pyfunction!(isoperimetric_value, m)?)?;
    m.add_function(wrap_pyfunction!(merge_time_bound, m)?)?;
    m.add_function(wrap_pyfunction!(subdivided_hatted_tree, m)?)?;
    m.add_function(wrap_pyfunction!(tree_subdivision, m)?)?;
    m.add_function(wrap_pyfunction!(subdivided_grid_example, m)?)?;
    Ok(())
}
