//! Path decompositions: validation, width, and exact pathwidth.
//!
//! Pathwidth is computed through the vertex-separation formulation: over all
//! orderings of the vertices, minimize the maximum number of prefix vertices
//! that still have a neighbor outside the prefix. That minimum equals the
//! pathwidth, and the optimal ordering converts directly into a witness
//! decomposition.

use thiserror::Error;

use crate::graph::{Graph, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathdecompError {
    #[error("empty bag sequence")]
    EmptySequence,
    #[error("bag member {0} out of range for graph with {1} vertices")]
    VertexOutOfRange(usize, usize),
    #[error("graph has {0} vertices, exceeding the exact-DP budget of {1}")]
    Exhausted(usize, usize),
}

/// Default vertex cap for the exponential pathwidth DP.
pub const DEFAULT_PATHWIDTH_VERTEX_LIMIT: usize = 24;

/// An ordered sequence of vertex bags over a host graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathDecomposition {
    bags: Vec<VertexSet>,
}

impl PathDecomposition {
    pub fn new(bags: Vec<VertexSet>) -> Self {
        PathDecomposition { bags }
    }

    pub fn bags(&self) -> &[VertexSet] {
        &self.bags
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Bag contents as ascending id lists, for serialization.
    pub fn bag_ids(&self) -> Vec<Vec<usize>> {
        self.bags.iter().map(|b| b.ids()).collect()
    }
}

/// Outcome of checking the two decomposition conditions plus full vertex
/// coverage. Failures are data, not errors; each records the first violating
/// edge or vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    /// First edge contained in no bag, if any.
    pub uncovered_edge: Option<(usize, usize)>,
    /// First vertex whose bags do not form a consecutive run, if any.
    pub nonconsecutive_vertex: Option<usize>,
    /// First vertex appearing in no bag, if any.
    pub missing_vertex: Option<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.uncovered_edge.is_none()
            && self.nonconsecutive_vertex.is_none()
            && self.missing_vertex.is_none()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let mut parts = Vec::new();
        if let Some((u, v)) = self.uncovered_edge {
            parts.push(format!("edge {{{u}, {v}}} in no bag"));
        }
        if let Some(v) = self.nonconsecutive_vertex {
            parts.push(format!("vertex {v} appears in non-consecutive bags"));
        }
        if let Some(v) = self.missing_vertex {
            parts.push(format!("vertex {v} appears in no bag"));
        }
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks edge coverage, consecutiveness, and full vertex coverage of `pd`
/// against `g`.
pub fn validate(g: &Graph, pd: &PathDecomposition) -> ValidationReport {
    let n = g.vertex_count();
    let mut first_bag = vec![usize::MAX; n];
    let mut last_bag = vec![usize::MAX; n];
    let mut count = vec![0usize; n];
    for (i, bag) in pd.bags().iter().enumerate() {
        for v in bag.iter() {
            if v < n {
                if first_bag[v] == usize::MAX {
                    first_bag[v] = i;
                }
                last_bag[v] = i;
                count[v] += 1;
            }
        }
    }
    let missing_vertex = (0..n).find(|&v| count[v] == 0);
    let nonconsecutive_vertex =
        (0..n).find(|&v| count[v] > 0 && last_bag[v] - first_bag[v] + 1 != count[v]);
    let uncovered_edge = g
        .edges()
        .iter()
        .copied()
        .find(|&(u, v)| !pd.bags().iter().any(|b| b.contains(u) && b.contains(v)));
    ValidationReport {
        uncovered_edge,
        nonconsecutive_vertex,
        missing_vertex,
    }
}

/// Width of a decomposition: the largest bag size minus one.
pub fn width(pd: &PathDecomposition) -> Result<usize, PathdecompError> {
    if pd.is_empty() {
        return Err(PathdecompError::EmptySequence);
    }
    Ok(pd.bags().iter().map(|b| b.len()).max().unwrap() - 1)
}

/// Exact pathwidth together with a witness decomposition that validates at
/// exactly the returned width. Graphs larger than `max_vertices` report
/// exhaustion instead of running the exponential table.
pub fn pathwidth(
    g: &Graph,
    max_vertices: usize,
) -> Result<(usize, PathDecomposition), PathdecompError> {
    let n = g.vertex_count();
    let cap = max_vertices.min(26); // table is u8-indexed by a u32 mask
    if n > cap {
        return Err(PathdecompError::Exhausted(n, cap));
    }
    assert!(n >= 1);
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };

    // Number of prefix vertices with a neighbor outside the prefix.
    let active = |mask: u32| -> u8 {
        let mut count = 0u8;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if nbr[v] & !mask != 0 {
                count += 1;
            }
        }
        count
    };

    let mut table = vec![u8::MAX; (full as usize) + 1];
    table[0] = 0;
    for mask in 1..=full {
        let b = active(mask);
        let mut best = u8::MAX;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            let prev = table[(mask & !(1 << v)) as usize];
            best = best.min(prev.max(b));
        }
        table[mask as usize] = best;
    }
    let separation = table[full as usize] as usize;

    // Reconstruct an optimal ordering back-to-front: at each set, drop the
    // lowest-id vertex whose remainder still meets the optimum.
    let mut order = vec![0usize; n];
    let mut mask = full;
    for slot in (0..n).rev() {
        let mut chosen = None;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            if table[(mask & !(1 << v)) as usize] <= table[mask as usize] {
                chosen = Some(v as usize);
                break;
            }
        }
        let v = chosen.expect("table is consistent");
        order[slot] = v;
        mask &= !(1 << v);
    }

    // Bags: the new vertex plus every earlier vertex still adjacent to the
    // outside of the previous prefix.
    let mut bags = Vec::with_capacity(n);
    let mut prefix: u32 = 0;
    for &v in &order {
        let mut bag = VertexSet::empty(n);
        bag.insert(v);
        let mut rest = prefix;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if nbr[u] & !prefix != 0 {
                bag.insert(u);
            }
        }
        bags.push(bag);
        prefix |= 1 << v;
    }
    let pd = PathDecomposition::new(bags);
    debug_assert!(validate(g, &pd).is_valid());
    debug_assert_eq!(width(&pd).unwrap(), separation);
    Ok((separation, pd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, FamilySpec};

    fn bag(n: usize, ids: &[usize]) -> VertexSet {
        VertexSet::from_ids(n, ids.iter().copied()).unwrap()
    }

    #[test]
    fn star_decomposition_is_valid_of_width_one() {
        let g = generate(&FamilySpec::Star(3)).unwrap();
        let pd = PathDecomposition::new(vec![bag(4, &[1, 0]), bag(4, &[2, 0]), bag(4, &[3, 0])]);
        assert!(validate(&g, &pd).is_valid());
        assert_eq!(width(&pd).unwrap(), 1);
    }

    #[test]
    fn single_full_bag_is_always_valid() {
        for spec in [FamilySpec::Petersen, FamilySpec::Grid(3), FamilySpec::Path(1)] {
            let g = generate(&spec).unwrap();
            let n = g.vertex_count();
            let pd = PathDecomposition::new(vec![VertexSet::full(n)]);
            assert!(validate(&g, &pd).is_valid());
            assert_eq!(width(&pd).unwrap(), n - 1);
        }
    }

    #[test]
    fn violations_are_reported_with_first_witness() {
        let g = generate(&FamilySpec::Star(3)).unwrap();
        // a1 appears in bags 0 and 2 but not 1; edge {0,2} is uncovered.
        let pd = PathDecomposition::new(vec![bag(4, &[1, 0]), bag(4, &[2]), bag(4, &[1, 3])]);
        let report = validate(&g, &pd);
        assert!(!report.is_valid());
        assert_eq!(report.nonconsecutive_vertex, Some(1));
        assert_eq!(report.uncovered_edge, Some((0, 2)));
        assert_eq!(report.missing_vertex, None);
    }

    #[test]
    fn missing_vertex_reported() {
        let g = generate(&FamilySpec::Path(3)).unwrap();
        let pd = PathDecomposition::new(vec![bag(3, &[0, 1])]);
        let report = validate(&g, &pd);
        assert_eq!(report.missing_vertex, Some(2));
    }

    #[test]
    fn width_of_empty_sequence_is_an_error() {
        assert!(width(&PathDecomposition::new(vec![])).is_err());
    }

    #[test]
    fn pathwidth_of_named_families() {
        let limit = DEFAULT_PATHWIDTH_VERTEX_LIMIT;
        for spec in [
            FamilySpec::Caterpillar(vec![3, 1, 2]),
            FamilySpec::Star(5),
            FamilySpec::Path(6),
        ] {
            let g = generate(&spec).unwrap();
            let (pw, pd) = pathwidth(&g, limit).unwrap();
            assert_eq!(pw, 1, "{spec:?}");
            assert!(validate(&g, &pd).is_valid());
            assert_eq!(width(&pd).unwrap(), 1);
        }
        for n in 3..=8 {
            let g = generate(&FamilySpec::Cycle(n)).unwrap();
            assert_eq!(pathwidth(&g, limit).unwrap().0, 2, "cycle({n})");
        }
        for n in [3, 4] {
            let g = generate(&FamilySpec::Grid(n)).unwrap();
            let (pw, pd) = pathwidth(&g, limit).unwrap();
            assert_eq!(pw, n, "grid({n})");
            assert!(validate(&g, &pd).is_valid());
            assert_eq!(width(&pd).unwrap(), n);
        }
        let single = generate(&FamilySpec::Path(1)).unwrap();
        assert_eq!(pathwidth(&single, limit).unwrap().0, 0);
    }

    #[test]
    fn budget_is_surfaced() {
        let g = generate(&FamilySpec::Grid(3)).unwrap();
        assert!(matches!(
            pathwidth(&g, 5),
            Err(PathdecompError::Exhausted(9, 5))
        ));
    }

    /// Brute-force vertex separation over all orderings.
    fn separation_by_orderings(g: &Graph) -> usize {
        fn permutations(n: usize) -> Vec<Vec<usize>> {
            let mut out = vec![vec![]];
            for _ in 0..n {
                let mut next = Vec::new();
                for p in out {
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
        let n = g.vertex_count();
        let mut best = usize::MAX;
        for order in permutations(n) {
            let mut prefix = vec![false; n];
            let mut worst = 0;
            for &v in &order {
                prefix[v] = true;
                let b = (0..n)
                    .filter(|&u| prefix[u] && g.neighbors(u).iter().any(|&w| !prefix[w]))
                    .count();
                worst = worst.max(b);
            }
            best = best.min(worst);
        }
        best
    }

    #[test]
    fn dp_matches_brute_force_on_small_graphs() {
        let mut graphs: Vec<Graph> = vec![
            generate(&FamilySpec::Cycle(5)).unwrap(),
            generate(&FamilySpec::Star(4)).unwrap(),
            generate(&FamilySpec::SpiderK13Subdiv).unwrap(),
            generate(&FamilySpec::Path(6)).unwrap(),
        ];
        // All connected graphs on 4 vertices.
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for mask in 0u32..64 {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            if let Ok(g) = Graph::new(4, &edges) {
                graphs.push(g);
            }
        }
        for g in &graphs {
            let (pw, pd) = pathwidth(g, 24).unwrap();
            assert_eq!(pw, separation_by_orderings(g), "{g:?}");
            assert!(validate(g, &pd).is_valid());
            assert_eq!(width(&pd).unwrap(), pw);
        }
    }
}
