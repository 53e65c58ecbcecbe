//! Undirected simple graphs over dense integer vertex ids, named family
//! generators, edge subdivision, and neighborhood-boundary computations.
//!
//! Graphs are connected by default; the constructors reject disconnected
//! input unless the caller explicitly opts in (subgraph restriction can
//! legitimately produce disconnected graphs and the simulation engine is
//! well defined on them).

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("{{{0}, {1}}} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("invalid family parameter: {0}")]
    BadFamilyParameter(String),
    #[error("not a subgraph: {0}")]
    NotASubgraph(String),
    #[error("subset enumeration budget exhausted after {0} subsets")]
    EnumerationExhausted(u64),
}

/// Membership set over the vertices `0..n-1` of a graph, with dense bitset
/// storage. Iteration is always in ascending id order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(n: usize, ids: I) -> Result<Self, GraphError> {
        let mut s = Self::empty(n);
        for v in ids {
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Size of the universe `0..n-1` this set lives in.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        debug_assert!(v < self.n);
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        if v < self.n {
            self.words[v / 64] &= !(1 << (v % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&v| self.contains(v))
    }

    /// Members in ascending order.
    pub fn ids(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Undirected simple connected graph with vertex ids `0..n-1` and optional
/// per-vertex display labels.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    labels: BTreeMap<usize, String>,
}

impl Graph {
    /// Builds a graph and rejects disconnected input.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let g = Self::new_unconnected(n, edges)?;
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    /// Builds a graph that is allowed to be disconnected.
    pub fn new_unconnected(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut canonical: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n {
                return Err(GraphError::VertexOutOfRange(a, n));
            }
            if b >= n {
                return Err(GraphError::VertexOutOfRange(b, n));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            canonical.push((a.min(b), a.max(b)));
        }
        canonical.sort_unstable();
        for w in canonical.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &canonical {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            adj,
            edges: canonical,
            labels: BTreeMap::new(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges in canonical order: `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.vertex_count() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }

    /// True when the graph is connected and has exactly `n - 1` edges.
    pub fn is_tree(&self) -> bool {
        self.vertex_count() >= 1
            && self.edge_count() == self.vertex_count() - 1
            && self.is_connected()
    }

    pub fn set_label(&mut self, v: usize, label: impl Into<String>) {
        self.labels.insert(v, label.into());
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.get(&v).map(|s| s.as_str())
    }

    pub fn labels(&self) -> &BTreeMap<usize, String> {
        &self.labels
    }

    /// Looks up a vertex by its display label.
    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.labels
            .iter()
            .find(|(_, l)| l.as_str() == label)
            .map(|(&v, _)| v)
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Graph(n={}, m={}, edges={:?})",
            self.vertex_count(),
            self.edge_count(),
            self.edges
        )
    }
}

/// Named graph families with fixed, documented vertex numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    /// Path on `n >= 1` vertices, ids in path order.
    Path(usize),
    /// Cycle on `n >= 3` vertices, ids in cycle order.
    Cycle(usize),
    /// Star `K_{1,m}`, `m >= 1`: center 0, leaves `1..=m`.
    Star(usize),
    /// The claw with every edge subdivided once: center 0, midpoints 1..=3,
    /// leaves 4..=6 (midpoint `i` joins center to leaf `i + 3`).
    SpiderK13Subdiv,
    /// Caterpillar: spine vertices `0..k-1` in path order, then the leaves of
    /// spine vertex 0, of spine vertex 1, ... with consecutive ids.
    Caterpillar(Vec<usize>),
    /// `n x n` grid (Cartesian product of two paths), row-major ids.
    Grid(usize),
    /// Petersen graph in Kneser form: vertices are the 2-subsets of
    /// `{1..5}` in lexicographic order (ids 0..9, labeled "12".."45"),
    /// adjacent exactly when disjoint.
    Petersen,
    /// Complete m-ary tree of depth `d`, ids in breadth-first order from the
    /// root (id 0), children in order.
    MaryTree(usize, usize),
    /// Complete m-ary tree of depth `d` plus a stem leaf attached to the
    /// root. The stem always receives the last id (`n - 1`) and the label
    /// "stem".
    HattedMaryTree(usize, usize),
}

/// Generates a named family graph with deterministic vertex numbering.
pub fn generate(spec: &FamilySpec) -> Result<Graph, GraphError> {
    let bad = |msg: &str| Err(GraphError::BadFamilyParameter(msg.to_string()));
    match spec {
        FamilySpec::Path(n) => {
            if *n < 1 {
                return bad("path requires n >= 1");
            }
            let edges: Vec<_> = (1..*n).map(|v| (v - 1, v)).collect();
            Graph::new(*n, &edges)
        }
        FamilySpec::Cycle(n) => {
            if *n < 3 {
                return bad("cycle requires n >= 3");
            }
            let mut edges: Vec<_> = (1..*n).map(|v| (v - 1, v)).collect();
            edges.push((*n - 1, 0));
            Graph::new(*n, &edges)
        }
        FamilySpec::Star(m) => {
            if *m < 1 {
                return bad("star requires m >= 1");
            }
            let edges: Vec<_> = (1..=*m).map(|v| (0, v)).collect();
            Graph::new(m + 1, &edges)
        }
        FamilySpec::SpiderK13Subdiv => {
            let edges = [(0, 1), (0, 2), (0, 3), (1, 4), (2, 5), (3, 6)];
            Graph::new(7, &edges)
        }
        FamilySpec::Caterpillar(leaf_counts) => {
            let k = leaf_counts.len();
            if k < 1 {
                return bad("caterpillar requires at least one spine vertex");
            }
            let n = k + leaf_counts.iter().sum::<usize>();
            let mut edges: Vec<_> = (1..k).map(|v| (v - 1, v)).collect();
            let mut next = k;
            for (spine, &count) in leaf_counts.iter().enumerate() {
                for _ in 0..count {
                    edges.push((spine, next));
                    next += 1;
                }
            }
            Graph::new(n, &edges)
        }
        FamilySpec::Grid(n) => {
            if *n < 1 {
                return bad("grid requires n >= 1");
            }
            let id = |r: usize, c: usize| r * n + c;
            let mut edges = Vec::new();
            for r in 0..*n {
                for c in 0..*n {
                    if c + 1 < *n {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < *n {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            Graph::new(n * n, &edges)
        }
        FamilySpec::Petersen => {
            let mut pairs = Vec::new();
            for a in 1..=5u8 {
                for b in (a + 1)..=5 {
                    pairs.push((a, b));
                }
            }
            let mut edges = Vec::new();
            for i in 0..pairs.len() {
                for j in (i + 1)..pairs.len() {
                    let (a, b) = pairs[i];
                    let (c, d) = pairs[j];
                    if a != c && a != d && b != c && b != d {
                        edges.push((i, j));
                    }
                }
            }
            let mut g = Graph::new(10, &edges)?;
            for (i, (a, b)) in pairs.iter().enumerate() {
                g.set_label(i, format!("{a}{b}"));
            }
            Ok(g)
        }
        FamilySpec::MaryTree(m, d) => {
            if *m < 1 {
                return bad("m-ary tree requires m >= 1");
            }
            let edges = mary_tree_edges(*m, *d);
            let n = mary_tree_size(*m, *d);
            Graph::new(n, &edges)
        }
        FamilySpec::HattedMaryTree(m, d) => Ok(hatted_mary_tree(*m, *d)?.0),
    }
}

fn mary_tree_size(m: usize, d: usize) -> usize {
    // 1 + m + m^2 + ... + m^d
    let mut total = 1usize;
    let mut level = 1usize;
    for _ in 0..d {
        level *= m;
        total += level;
    }
    total
}

fn mary_tree_edges(m: usize, d: usize) -> Vec<(usize, usize)> {
    let n = mary_tree_size(m, d);
    let mut edges = Vec::new();
    let mut next_child = 1;
    let mut frontier = vec![0usize];
    for _ in 0..d {
        let mut new_frontier = Vec::new();
        for &parent in &frontier {
            for _ in 0..m {
                edges.push((parent, next_child));
                new_frontier.push(next_child);
                next_child += 1;
            }
        }
        frontier = new_frontier;
    }
    debug_assert_eq!(next_child, n);
    edges
}

/// Complete m-ary tree of depth `d` with a stem leaf on the root; returns
/// the graph and the stem id (always `n - 1`).
pub fn hatted_mary_tree(m: usize, d: usize) -> Result<(Graph, usize), GraphError> {
    if m < 1 {
        return Err(GraphError::BadFamilyParameter(
            "hatted m-ary tree requires m >= 1".to_string(),
        ));
    }
    let base = mary_tree_size(m, d);
    let mut edges = mary_tree_edges(m, d);
    let stem = base;
    edges.push((0, stem));
    let mut g = Graph::new(base + 1, &edges)?;
    g.set_label(stem, "stem");
    Ok((g, stem))
}

/// Replaces edge `e` of `g` by a path with `k` new interior vertices. The
/// new ids are appended `n, n+1, ...` ordered from the lower-id endpoint of
/// `e`; `k = 0` returns the graph unchanged.
pub fn subdivide_edge(g: &Graph, e: (usize, usize), k: usize) -> Result<Graph, GraphError> {
    let (lo, hi) = (e.0.min(e.1), e.0.max(e.1));
    if !g.has_edge(lo, hi) {
        return Err(GraphError::NotAnEdge(e.0, e.1));
    }
    if k == 0 {
        return Ok(g.clone());
    }
    let n = g.vertex_count();
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| (u, v) != (lo, hi))
        .collect();
    let mut prev = lo;
    for i in 0..k {
        edges.push((prev, n + i));
        prev = n + i;
    }
    edges.push((prev, hi));
    let mut out = Graph::new_unconnected(n + k, &edges)?;
    for (&v, label) in g.labels() {
        out.set_label(v, label.clone());
    }
    Ok(out)
}

/// True when `g` is a tree whose non-leaf vertices induce a path (possibly
/// empty or a single vertex).
pub fn is_caterpillar(g: &Graph) -> bool {
    if !g.is_tree() {
        return false;
    }
    // Degree within the leaf-deleted tree: count neighbors that are not leaves.
    for v in 0..g.vertex_count() {
        if g.degree(v) <= 1 {
            continue;
        }
        let internal_degree = g.neighbors(v).iter().filter(|&&u| g.degree(u) >= 2).count();
        if internal_degree > 2 {
            return false;
        }
    }
    true
}

/// `N(S) - S`: the vertices outside `S` adjacent to some member of `S`.
pub fn boundary(g: &Graph, s: &VertexSet) -> VertexSet {
    let mut out = VertexSet::empty(g.vertex_count());
    for v in s.iter() {
        for &u in g.neighbors(v) {
            if !s.contains(u) {
                out.insert(u);
            }
        }
    }
    out
}

/// Work budget for exhaustive subset enumeration.
#[derive(Clone, Copy, Debug)]
pub struct SubsetBudget {
    pub max_subsets: u64,
}

impl Default for SubsetBudget {
    fn default() -> Self {
        SubsetBudget {
            max_subsets: 200_000_000,
        }
    }
}

/// Iterator over the k-subsets of `0..n` in colexicographic order.
pub(crate) struct Combinations {
    current: Vec<usize>,
    n: usize,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations {
            current: (0..k).collect(),
            n,
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        // Advance in colex order: bump the leftmost element that can move
        // without touching its successor, resetting everything below it.
        let k = self.current.len();
        let mut i = 0;
        loop {
            if i == k {
                self.done = true;
                break;
            }
            let limit = if i + 1 < k {
                self.current[i + 1]
            } else {
                self.n
            };
            if self.current[i] + 1 < limit {
                self.current[i] += 1;
                for j in 0..i {
                    self.current[j] = j;
                }
                break;
            }
            i += 1;
        }
        Some(out)
    }
}

/// Exact `Phi_V(g, k)`: the minimum of `|N(S) - S|` over all k-subsets,
/// enumerated in colexicographic order. Stops early when the running minimum
/// reaches `floor` (pass 0 for a full scan). The budget bounds the number of
/// subsets examined; exceeding it reports exhaustion rather than a partial
/// minimum.
pub fn isoperimetric_value_with_floor(
    g: &Graph,
    k: usize,
    floor: usize,
    budget: &SubsetBudget,
) -> Result<usize, GraphError> {
    let n = g.vertex_count();
    assert!(k >= 1 && k <= n, "k must be in 1..=n");
    let mut best = usize::MAX;
    let mut examined = 0u64;
    let mut members = VertexSet::empty(n);
    for subset in Combinations::new(n, k) {
        examined += 1;
        if examined > budget.max_subsets {
            return Err(GraphError::EnumerationExhausted(examined - 1));
        }
        for w in members.words.iter_mut() {
            *w = 0;
        }
        for &v in &subset {
            members.insert(v);
        }
        let b = boundary(g, &members).len();
        if b < best {
            best = b;
            if best <= floor {
                return Ok(best);
            }
        }
    }
    Ok(best)
}

/// Exact vertex-isoperimetric value `Phi_V(g, k)` by full enumeration.
pub fn isoperimetric_value(g: &Graph, k: usize, budget: &SubsetBudget) -> Result<usize, GraphError> {
    isoperimetric_value_with_floor(g, k, 0, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn star_is_k13() {
        let g = generate(&FamilySpec::Star(3)).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degree(0), 3);
    }

    #[test]
    fn petersen_shape() {
        let g = generate(&FamilySpec::Petersen).unwrap();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 15);
        assert!((0..10).all(|v| g.degree(v) == 3));
        assert_eq!(g.label(0), Some("12"));
        assert_eq!(g.vertex_by_label("45"), Some(9));
    }

    #[test]
    fn degenerate_path() {
        let g = generate(&FamilySpec::Path(1)).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn grid4_edge_count() {
        let g = generate(&FamilySpec::Grid(4)).unwrap();
        assert_eq!(g.vertex_count(), 16);
        assert_eq!(g.edge_count(), 24);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(generate(&FamilySpec::Path(0)).is_err());
        assert!(generate(&FamilySpec::Cycle(2)).is_err());
        assert!(generate(&FamilySpec::Star(0)).is_err());
        assert!(generate(&FamilySpec::Grid(0)).is_err());
    }

    #[test]
    fn subdivision_of_grid_edge() {
        let g = generate(&FamilySpec::Grid(4)).unwrap();
        let h = subdivide_edge(&g, (4, 8), 30).unwrap();
        assert_eq!(h.vertex_count(), 46);
        assert_eq!(h.edge_count(), 24 + 30);
        assert!(h.is_connected());
    }

    #[test]
    fn subdivision_with_zero_is_identity() {
        let g = generate(&FamilySpec::Cycle(5)).unwrap();
        let h = subdivide_edge(&g, (0, 1), 0).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn subdividing_triangle_gives_four_cycle() {
        let g = generate(&FamilySpec::Cycle(3)).unwrap();
        let h = subdivide_edge(&g, (0, 1), 1).unwrap();
        assert_eq!(h.vertex_count(), 4);
        assert_eq!(h.edge_count(), 4);
        assert!((0..4).all(|v| h.degree(v) == 2));
    }

    #[test]
    fn subdividing_non_edge_fails() {
        let g = generate(&FamilySpec::Path(3)).unwrap();
        assert_eq!(
            subdivide_edge(&g, (0, 2), 1),
            Err(GraphError::NotAnEdge(0, 2))
        );
    }

    #[test]
    fn caterpillar_checks() {
        assert!(is_caterpillar(&generate(&FamilySpec::Star(5)).unwrap()));
        assert!(is_caterpillar(&generate(&FamilySpec::Path(1)).unwrap()));
        assert!(is_caterpillar(
            &generate(&FamilySpec::Caterpillar(vec![3, 1, 2])).unwrap()
        ));
        assert!(!is_caterpillar(&generate(&FamilySpec::SpiderK13Subdiv).unwrap()));
        assert!(!is_caterpillar(&generate(&FamilySpec::Cycle(4)).unwrap()));
    }

    #[test]
    fn boundary_examples() {
        let g = generate(&FamilySpec::Petersen).unwrap();
        let n = g.vertex_count();
        for pair in Combinations::new(n, 2) {
            let s = VertexSet::from_ids(n, pair).unwrap();
            assert!(boundary(&g, &s).len() >= 4);
        }
        let full = VertexSet::full(n);
        assert!(boundary(&g, &full).is_empty());
    }

    #[test]
    fn grid3_isoperimetric_values() {
        let g = generate(&FamilySpec::Grid(3)).unwrap();
        let budget = SubsetBudget::default();
        for k in 2..=5 {
            assert_eq!(isoperimetric_value(&g, k, &budget).unwrap(), 3, "k={k}");
        }
        assert_eq!(isoperimetric_value(&g, 9, &budget).unwrap(), 0);
    }

    #[test]
    fn enumeration_budget_is_surfaced() {
        let g = generate(&FamilySpec::Grid(3)).unwrap();
        let tiny = SubsetBudget { max_subsets: 5 };
        assert!(matches!(
            isoperimetric_value(&g, 4, &tiny),
            Err(GraphError::EnumerationExhausted(_))
        ));
    }

    #[test]
    fn combinations_are_colex() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 3],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(Combinations::new(3, 4).count(), 0);
    }

    #[test]
    fn hatted_tree_reports_stem() {
        let (g, stem) = hatted_mary_tree(2, 2).unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(stem, 7);
        assert_eq!(g.degree(stem), 1);
        assert!(g.has_edge(0, stem));
        assert_eq!(g.label(stem), Some("stem"));
    }

    fn arbitrary_connected_graph() -> impl Strategy<Value = Graph> {
        (2usize..8).prop_flat_map(|n| {
            let all_pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
                .collect();
            let len = all_pairs.len();
            proptest::collection::vec(proptest::bool::ANY, len).prop_filter_map(
                "connected",
                move |mask| {
                    // Spanning path keeps the sample connected.
                    let mut edges: Vec<(usize, usize)> =
                        (1..n).map(|v| (v - 1, v)).collect();
                    for (i, &keep) in mask.iter().enumerate() {
                        if keep && !edges.contains(&all_pairs[i]) {
                            edges.push(all_pairs[i]);
                        }
                    }
                    Graph::new(n, &edges).ok()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn boundary_is_disjoint_from_set(g in arbitrary_connected_graph(), seed in 0u64..1000) {
            let n = g.vertex_count();
            let ids: Vec<usize> = (0..n).filter(|v| (seed >> (v % 10)) & 1 == 1).collect();
            let s = VertexSet::from_ids(n, ids).unwrap();
            let b = boundary(&g, &s);
            for v in b.iter() {
                prop_assert!(!s.contains(v));
            }
        }

        #[test]
        fn subdivision_adds_k_vertices_and_edges(g in arbitrary_connected_graph(), k in 0usize..5, pick in 0usize..100) {
            let e = g.edges()[pick % g.edge_count()];
            let h = subdivide_edge(&g, e, k).unwrap();
            prop_assert_eq!(h.vertex_count(), g.vertex_count() + k);
            prop_assert_eq!(h.edge_count(), g.edge_count() + k);
            prop_assert!(h.is_connected());
        }
    }

    #[test]
    fn isoperimetric_matches_naive_recomputation() {
        // Independent oracle: recursive enumeration instead of colex iteration.
        fn naive(g: &Graph, k: usize) -> usize {
            fn rec(g: &Graph, start: usize, left: usize, chosen: &mut Vec<usize>, best: &mut usize) {
                if left == 0 {
                    let s = VertexSet::from_ids(g.vertex_count(), chosen.iter().copied()).unwrap();
                    *best = (*best).min(boundary(g, &s).len());
                    return;
                }
                for v in start..g.vertex_count() {
                    chosen.push(v);
                    rec(g, v + 1, left - 1, chosen, best);
                    chosen.pop();
                }
            }
            let mut best = usize::MAX;
            rec(g, 0, k, &mut Vec::new(), &mut best);
            best
        }
        let budget = SubsetBudget::default();
        for spec in [
            FamilySpec::Cycle(6),
            FamilySpec::Star(4),
            FamilySpec::Grid(3),
            FamilySpec::SpiderK13Subdiv,
        ] {
            let g = generate(&spec).unwrap();
            for k in 1..=g.vertex_count() {
                assert_eq!(
                    isoperimetric_value(&g, k, &budget).unwrap(),
                    naive(&g, k),
                    "{spec:?} k={k}"
                );
            }
        }
    }
}
