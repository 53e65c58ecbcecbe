//! Discrete-time immunization model on graphs.
//!
//! Every vertex of a connected graph starts out contagious (red). At each
//! time-step a set of vertices is immunized and becomes healthy (green) for a
//! protective period of `r` steps; a healthy vertex past its protection that
//! has a contagious neighbor becomes infected (yellow) and turns contagious
//! after a latency of `s` steps. A protocol — an ordered sequence of
//! immunization sets — *clears* the graph when every vertex is green at the
//! final step, and its *width* is the largest set it ever uses. The
//! `(r,s)`-immunization number of a graph is the smallest width of a clearing
//! protocol.
//!
//! The crate provides:
//!
//! * [`engine`] — exact simulation of the transition system, full traces,
//!   color-class bookkeeping;
//! * [`graph`] — graph representation, named family generators, edge
//!   subdivision, boundary/isoperimetric computations;
//! * [`pathdecomp`] — path decompositions: validation, width, and exact
//!   pathwidth by a vertex-separation dynamic program;
//! * [`protocols`] — protocol classification (minimal / monotone / cautious),
//!   the minimization transform, subgraph restriction, and the two
//!   protocol ↔ path-decomposition constructions;
//! * [`solver`] — exact immunization numbers by state-space reachability,
//!   plus lower/upper bound certificates and an independent certificate
//!   checker;
//! * [`constructions`] — merging leaf-rooted pieces into larger graphs with
//!   explicit width-2 protocols, subdivided m-ary trees, tree subdivisions,
//!   and the subdivided-grid example;
//! * [`io`] — plain-text formats for graphs, protocols, decompositions,
//!   certificates, and trace dumps.

pub mod constructions;
pub mod engine;
pub mod graph;
pub mod io;
pub mod pathdecomp;
pub mod protocols;
pub mod solver;

pub use engine::{clears, color_classes, protocol_width, run, step};
pub use engine::{Color, ColorClasses, ModelParams, Protocol, SimState, Trace};
pub use graph::{boundary, generate, is_caterpillar, isoperimetric_value, subdivide_edge};
pub use graph::{FamilySpec, Graph, VertexSet};
pub use pathdecomp::{pathwidth, validate, width, PathDecomposition, ValidationReport};
pub use solver::{clearable_with_width, immunization_number, Budget, Certificate, WidthDecision};
