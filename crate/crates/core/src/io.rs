//! Plain-text formats.
//!
//! Graph: a `n <count>` line, then one `e <u> <v>` line per edge and optional
//! `label <id> <name>` lines; `#` starts a comment. The emitter writes the
//! canonical form (edges sorted with `u < v`, labels sorted by id), and
//! parse/emit round-trips are byte-exact on canonical input.
//!
//! Protocol: a `rs <r> <s>` line, then one `a <id> <id> ...` line per step (a
//! bare `a` is an empty step).
//!
//! Decomposition: one `b <id> <id> ...` line per bag, in sequence order.
//!
//! Certificate: a `cert {lower|upper} <width>` line and a `rs <r> <s>` line,
//! followed by the evidence: protocol `a` lines or decomposition `b` lines
//! for upper certificates; a `kind ...` line plus optional `p`/`size` lines
//! for lower certificates.
//!
//! Trace dump: one `t <t> R:<ids> Y1:<ids> ... G1:<ids> ...` line per
//! time-step, ids comma-separated ascending.

use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::{color_classes, ModelParams, Protocol, Trace};
use crate::graph::Graph;
use crate::pathdecomp::PathDecomposition;
use crate::solver::{Certificate, LowerEvidence, UpperEvidence};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

fn parse_int(line: usize, token: &str, what: &str) -> Result<usize, ParseError> {
    token
        .parse()
        .map_err(|_| ParseError {
            line,
            message: format!("invalid {what}: {token:?}"),
        })
}

/// Content lines with line numbers, comments and blanks stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Raw graph data: vertex count, edges, labels.
pub struct RawGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub labels: Vec<(usize, String)>,
}

pub fn parse_graph_raw(text: &str) -> Result<RawGraph, ParseError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in content_lines(text) {
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        match head {
            "n" => {
                if n.is_some() {
                    return err(lineno, "duplicate n line");
                }
                let value = tokens
                    .next()
                    .ok_or(ParseError {
                        line: lineno,
                        message: "n line needs a count".to_string(),
                    })?;
                n = Some(parse_int(lineno, value, "vertex count")?);
            }
            "e" => {
                let u = tokens.next().map(|t| parse_int(lineno, t, "vertex id"));
                let v = tokens.next().map(|t| parse_int(lineno, t, "vertex id"));
                match (u, v) {
                    (Some(u), Some(v)) => edges.push((u?, v?)),
                    _ => return err(lineno, "e line needs two vertex ids"),
                }
                if tokens.next().is_some() {
                    return err(lineno, "e line has trailing tokens");
                }
            }
            "label" => {
                let id = tokens.next().ok_or(ParseError {
                    line: lineno,
                    message: "label line needs an id".to_string(),
                })?;
                let id = parse_int(lineno, id, "vertex id")?;
                let name: Vec<&str> = tokens.collect();
                if name.is_empty() {
                    return err(lineno, "label line needs a name");
                }
                labels.push((id, name.join(" ")));
            }
            other => return err(lineno, format!("unknown directive {other:?}")),
        }
    }
    match n {
        Some(n) => Ok(RawGraph { n, edges, labels }),
        None => err(1, "missing n line"),
    }
}

/// Parses a graph, rejecting disconnected input unless `allow_disconnected`.
pub fn parse_graph(text: &str, allow_disconnected: bool) -> Result<Graph, ParseError> {
    let raw = parse_graph_raw(text)?;
    let built = if allow_disconnected {
        Graph::new_unconnected(raw.n, &raw.edges)
    } else {
        Graph::new(raw.n, &raw.edges)
    };
    let mut g = built.map_err(|e| ParseError {
        line: 1,
        message: e.to_string(),
    })?;
    for (id, name) in raw.labels {
        if id >= raw.n {
            return err(1, format!("label id {id} out of range"));
        }
        g.set_label(id, name);
    }
    Ok(g)
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", g.vertex_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "e {u} {v}").unwrap();
    }
    for (v, label) in g.labels() {
        writeln!(out, "label {v} {label}").unwrap();
    }
    out
}

/// Raw protocol data, not yet bound to a graph.
pub struct RawProtocol {
    pub r: usize,
    pub s: usize,
    pub steps: Vec<Vec<usize>>,
}

pub fn parse_protocol_raw(text: &str) -> Result<RawProtocol, ParseError> {
    let mut params: Option<(usize, usize)> = None;
    let mut steps = Vec::new();
    for (lineno, line) in content_lines(text) {
        let mut tokens = line.split_whitespace();
        match tokens.next().unwrap() {
            "rs" => {
                if params.is_some() {
                    return err(lineno, "duplicate rs line");
                }
                let r = tokens.next().ok_or(ParseError {
                    line: lineno,
                    message: "rs line needs r and s".to_string(),
                })?;
                let s = tokens.next().ok_or(ParseError {
                    line: lineno,
                    message: "rs line needs r and s".to_string(),
                })?;
                params = Some((
                    parse_int(lineno, r, "r")?,
                    parse_int(lineno, s, "s")?,
                ));
            }
            "a" => {
                let mut ids = Vec::new();
                for t in tokens {
                    ids.push(parse_int(lineno, t, "vertex id")?);
                }
                steps.push(ids);
            }
            other => return err(lineno, format!("unknown directive {other:?}")),
        }
    }
    match params {
        Some((r, s)) => Ok(RawProtocol { r, s, steps }),
        None => err(1, "missing rs line"),
    }
}

/// Parses a protocol and binds it to a graph with `n` vertices.
pub fn parse_protocol(text: &str, n: usize) -> Result<Protocol, ParseError> {
    let raw = parse_protocol_raw(text)?;
    let params = ModelParams::new(raw.r, raw.s).map_err(|e| ParseError {
        line: 1,
        message: e.to_string(),
    })?;
    for (i, step) in raw.steps.iter().enumerate() {
        if let Some(&v) = step.iter().find(|&&v| v >= n) {
            return err(
                i + 2,
                format!("vertex {v} out of range (graph has {n} vertices)"),
            );
        }
    }
    Protocol::new(n, params, raw.steps).map_err(|e| ParseError {
        line: 1,
        message: e.to_string(),
    })
}

pub fn format_protocol(protocol: &Protocol) -> String {
    let params = protocol.params();
    let mut out = String::new();
    writeln!(out, "rs {} {}", params.r, params.s).unwrap();
    for step in protocol.step_ids() {
        out.push('a');
        for v in step {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_decomposition_raw(text: &str) -> Result<Vec<Vec<usize>>, ParseError> {
    let mut bags = Vec::new();
    for (lineno, line) in content_lines(text) {
        let mut tokens = line.split_whitespace();
        match tokens.next().unwrap() {
            "b" => {
                let mut ids = Vec::new();
                for t in tokens {
                    ids.push(parse_int(lineno, t, "vertex id")?);
                }
                bags.push(ids);
            }
            other => return err(lineno, format!("unknown directive {other:?}")),
        }
    }
    Ok(bags)
}

/// Parses a decomposition over a graph with `n` vertices.
pub fn parse_decomposition(text: &str, n: usize) -> Result<PathDecomposition, ParseError> {
    let raw = parse_decomposition_raw(text)?;
    let mut bags = Vec::with_capacity(raw.len());
    for (i, ids) in raw.into_iter().enumerate() {
        let bag = crate::graph::VertexSet::from_ids(n, ids).map_err(|e| ParseError {
            line: i + 1,
            message: e.to_string(),
        })?;
        bags.push(bag);
    }
    Ok(PathDecomposition::new(bags))
}

pub fn format_decomposition(pd: &PathDecomposition) -> String {
    let mut out = String::new();
    for bag in pd.bag_ids() {
        out.push('b');
        for v in bag {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn format_certificate(cert: &Certificate) -> String {
    let mut out = String::new();
    match cert {
        Certificate::Upper {
            params,
            width,
            evidence,
        } => {
            writeln!(out, "cert upper {width}").unwrap();
            writeln!(out, "rs {} {}", params.r, params.s).unwrap();
            match evidence {
                UpperEvidence::Protocol(p) => {
                    for step in p.step_ids() {
                        out.push('a');
                        for v in step {
                            write!(out, " {v}").unwrap();
                        }
                        out.push('\n');
                    }
                }
                UpperEvidence::Decomposition(pd) => {
                    out.push_str(&format_decomposition(pd));
                }
            }
        }
        Certificate::Lower {
            params,
            width,
            evidence,
        } => {
            writeln!(out, "cert lower {width}").unwrap();
            writeln!(out, "rs {} {}", params.r, params.s).unwrap();
            match evidence {
                LowerEvidence::TrivialNonempty => writeln!(out, "kind trivial").unwrap(),
                LowerEvidence::NonCaterpillar => writeln!(out, "kind noncaterpillar").unwrap(),
                LowerEvidence::SearchImpossible => writeln!(out, "kind impossible").unwrap(),
                LowerEvidence::Isoperimetric {
                    p,
                    size_min_boundary,
                } => {
                    writeln!(out, "kind isoperimetric").unwrap();
                    writeln!(out, "p {p}").unwrap();
                    for (q, min) in size_min_boundary {
                        writeln!(out, "size {q} min {min}").unwrap();
                    }
                }
            }
        }
    }
    out
}

/// Parses a certificate over a graph with `n` vertices.
pub fn parse_certificate(text: &str, n: usize) -> Result<Certificate, ParseError> {
    let mut lines = content_lines(text);
    let (l1, head) = lines.next().ok_or(ParseError {
        line: 1,
        message: "empty certificate".to_string(),
    })?;
    let tokens: Vec<&str> = head.split_whitespace().collect();
    if tokens.len() != 3 || tokens[0] != "cert" {
        return err(l1, "expected `cert {lower|upper} <width>`");
    }
    let width = parse_int(l1, tokens[2], "width")?;
    let (l2, rs_line) = lines.next().ok_or(ParseError {
        line: l1,
        message: "missing rs line".to_string(),
    })?;
    let rs: Vec<&str> = rs_line.split_whitespace().collect();
    if rs.len() != 3 || rs[0] != "rs" {
        return err(l2, "expected `rs <r> <s>`");
    }
    let params = ModelParams::new(
        parse_int(l2, rs[1], "r")?,
        parse_int(l2, rs[2], "s")?,
    )
    .map_err(|e| ParseError {
        line: l2,
        message: e.to_string(),
    })?;
    let rest: Vec<(usize, &str)> = lines.collect();
    match tokens[1] {
        "upper" => {
            let mut steps: Vec<Vec<usize>> = Vec::new();
            let mut bags: Vec<Vec<usize>> = Vec::new();
            for (lineno, line) in rest {
                let mut toks = line.split_whitespace();
                let head = toks.next().unwrap();
                let mut ids = Vec::new();
                for t in toks {
                    ids.push(parse_int(lineno, t, "vertex id")?);
                }
                match head {
                    "a" => steps.push(ids),
                    "b" => bags.push(ids),
                    other => return err(lineno, format!("unknown directive {other:?}")),
                }
            }
            if !steps.is_empty() && !bags.is_empty() {
                return err(l1, "upper certificate mixes protocol and decomposition lines");
            }
            let evidence = if !bags.is_empty() {
                let mut sets = Vec::new();
                for ids in bags {
                    sets.push(
                        crate::graph::VertexSet::from_ids(n, ids).map_err(|e| ParseError {
                            line: l1,
                            message: e.to_string(),
                        })?,
                    );
                }
                UpperEvidence::Decomposition(PathDecomposition::new(sets))
            } else {
                let protocol = Protocol::new(n, params, steps).map_err(|e| ParseError {
                    line: l1,
                    message: e.to_string(),
                })?;
                UpperEvidence::Protocol(protocol)
            };
            Ok(Certificate::Upper {
                params,
                width,
                evidence,
            })
        }
        "lower" => {
            let mut kind: Option<String> = None;
            let mut p: Option<usize> = None;
            let mut sizes: Vec<(usize, usize)> = Vec::new();
            for (lineno, line) in rest {
                let toks: Vec<&str> = line.split_whitespace().collect();
                match toks[0] {
                    "kind" if toks.len() == 2 => kind = Some(toks[1].to_string()),
                    "p" if toks.len() == 2 => p = Some(parse_int(lineno, toks[1], "p")?),
                    "size" if toks.len() == 4 && toks[2] == "min" => sizes.push((
                        parse_int(lineno, toks[1], "size")?,
                        parse_int(lineno, toks[3], "minimum boundary")?,
                    )),
                    _ => return err(lineno, format!("unknown certificate line {line:?}")),
                }
            }
            let evidence = match kind.as_deref() {
                Some("trivial") => LowerEvidence::TrivialNonempty,
                Some("noncaterpillar") => LowerEvidence::NonCaterpillar,
                Some("impossible") => LowerEvidence::SearchImpossible,
                Some("isoperimetric") => LowerEvidence::Isoperimetric {
                    p: p.ok_or(ParseError {
                        line: l1,
                        message: "isoperimetric certificate needs a p line".to_string(),
                    })?,
                    size_min_boundary: sizes,
                },
                other => {
                    return err(l1, format!("unknown lower certificate kind {other:?}"))
                }
            };
            Ok(Certificate::Lower {
                params,
                width,
                evidence,
            })
        }
        other => err(l1, format!("unknown certificate direction {other:?}")),
    }
}

/// One line per time-step with the full color partition.
pub fn format_trace(trace: &Trace) -> String {
    let params = trace.params();
    let mut out = String::new();
    let join = |ids: &[usize]| -> String {
        ids.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    for t in 0..=trace.len() {
        let classes = color_classes(trace, t).expect("t in range");
        write!(out, "t {t} R:{}", join(&classes.red)).unwrap();
        for i in 1..=params.s {
            write!(out, " Y{i}:{}", join(&classes.yellow[i - 1])).unwrap();
        }
        for i in 1..=params.r {
            write!(out, " G{i}:{}", join(&classes.green[i - 1])).unwrap();
        }
        out.push('\n');
    }
    out
}
