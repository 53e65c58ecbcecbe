//! Acceptance suite: one test per criterion, each printing a PASS line when
//! its assertions hold. Run with `cargo test --test acceptance -- --nocapture`
//! to see the per-criterion report.

mod common;

use common::*;

use immunize_core::constructions::{
    build_subdivided_grid_example, build_subdivided_hatted_tree, merge_many, merged_time_bound,
    smooth_tree, trees_isomorphic, tree_subdivision_protocol, Segment,
    DEFAULT_CONSTRUCTION_VERTEX_LIMIT,
};
use immunize_core::engine::{
    clears, color_classes, protocol_width, run, Color, ModelParams, Protocol,
};
use immunize_core::graph::{
    generate, hatted_mary_tree, is_caterpillar, isoperimetric_value, FamilySpec, SubsetBudget,
};
use immunize_core::pathdecomp::{pathwidth, validate, width};
use immunize_core::protocols::{
    decomposition_from_cautious, is_cautious, is_minimal, is_monotone, is_monotone_via_yellow,
    minimize, protocol_from_decomposition, restrict,
};
use immunize_core::solver::{
    check_certificate, clearable_with_width, immunization_number, refute_width, Budget,
    Certificate, LowerEvidence, UpperEvidence, WidthDecision,
};

fn p(r: usize, s: usize) -> ModelParams {
    ModelParams::new(r, s).unwrap()
}

fn all_params() -> [ModelParams; 4] {
    [p(1, 1), p(1, 2), p(2, 1), p(2, 2)]
}

/// The star clearing protocol ({a1},{x},{a2},{x},...,{a_m}).
fn star_protocol(m: usize) -> Protocol {
    let mut steps = Vec::new();
    for leaf in 1..=m {
        steps.push(vec![leaf]);
        if leaf < m {
            steps.push(vec![0]);
        }
    }
    Protocol::new(m + 1, p(1, 1), steps).unwrap()
}

#[test]
fn criterion_01_star_traces_match_the_transition_table() {
    for m in [3, 4, 5] {
        let g = generate(&FamilySpec::Star(m)).unwrap();
        let j = star_protocol(m);
        let trace = run(&g, &j).unwrap();
        assert!(clears(&trace), "K_1_{m} must clear");
        assert_eq!(trace.len(), 2 * m - 1);
        // The center is infected exactly at the odd steps 3 ..= 2m-3 and is
        // never contagious after its first immunization at step 2.
        for t in 0..=trace.len() {
            let yellow = matches!(trace.color(t, 0), Color::Yellow(_));
            let expected = t % 2 == 1 && t >= 3 && t <= 2 * m - 3;
            assert_eq!(yellow, expected, "m={m} t={t}");
            if t >= 2 {
                assert!(!trace.is_red(t, 0), "m={m} t={t}");
            }
        }
        // Leaves stay green once immunized.
        for leaf in 1..=m {
            let first = 2 * leaf - 1;
            for t in first..=trace.len() {
                assert!(trace.color(t, leaf).is_green(), "m={m} leaf={leaf} t={t}");
            }
        }
    }
    println!("criterion  1 PASS: star protocol traces match the transition semantics");
}

#[test]
fn criterion_02_exact_small_immunization_numbers() {
    let budget = Budget::default();
    let mut cases: Vec<(FamilySpec, usize)> = (1..=5).map(|m| (FamilySpec::Star(m), 1)).collect();
    for n in 3..=7 {
        cases.push((FamilySpec::Cycle(n), 2));
    }
    cases.push((FamilySpec::SpiderK13Subdiv, 2));
    cases.push((FamilySpec::Grid(3), 2));
    for (spec, expected) in cases {
        let g = generate(&spec).unwrap();
        let start = std::time::Instant::now();
        let result = immunization_number(&g, p(1, 1), &budget).unwrap();
        assert_eq!(result.value, expected, "{spec:?}");
        assert!(check_certificate(&g, &result.upper, &budget).unwrap());
        assert!(check_certificate(&g, &result.lower, &budget).unwrap());
        assert!(
            start.elapsed().as_secs() < 30,
            "{spec:?} exceeded the 30 s budget"
        );
    }
    println!("criterion  2 PASS: exact immunization numbers for stars, cycles, the subdivided claw, and the 3x3 grid");
}

#[test]
fn criterion_03_petersen() {
    let g = generate(&FamilySpec::Petersen).unwrap();
    let budget = Budget::default();
    let by_label = |names: [&str; 3]| -> Vec<usize> {
        names
            .iter()
            .map(|s| g.vertex_by_label(s).unwrap())
            .collect()
    };
    let j = Protocol::new(
        10,
        p(1, 1),
        vec![
            by_label(["12", "34", "35"]),
            by_label(["15", "25", "45"]),
            by_label(["13", "23", "35"]),
            by_label(["14", "24", "25"]),
            by_label(["15", "23", "34"]),
        ],
    )
    .unwrap();
    let trace = run(&g, &j).unwrap();
    assert!(clears(&trace));
    assert_eq!(protocol_width(&j).unwrap(), 3);

    assert!(matches!(
        clearable_with_width(&g, p(1, 1), 2, &budget),
        WidthDecision::Impossible
    ));

    let (witness_p, sizes) = refute_width(&g, 2, &budget).unwrap().unwrap();
    assert_eq!(witness_p, 3);
    assert_eq!(sizes, vec![(2, 4), (3, 5)]);
    println!("criterion  3 PASS: Petersen clears at width 3, width 2 is impossible, and the boundary refutation returns p = 3");
}

#[test]
fn criterion_04_grid4_certificates() {
    let g = generate(&FamilySpec::Grid(4)).unwrap();
    let budget = Budget::default();
    let sb = SubsetBudget::default();
    let start = std::time::Instant::now();
    for k in 4..=9 {
        assert_eq!(isoperimetric_value(&g, k, &sb).unwrap(), 4, "k={k}");
    }
    assert!(start.elapsed().as_secs() < 120, "boundary sweep too slow");

    // Lower: boundary refutation of width 2.
    let (witness_p, sizes) = refute_width(&g, 2, &budget).unwrap().unwrap();
    assert!(sizes.iter().all(|&(_, min)| min > 3));
    let lower = Certificate::Lower {
        params: p(1, 1),
        width: 2,
        evidence: LowerEvidence::Isoperimetric {
            p: witness_p,
            size_min_boundary: sizes,
        },
    };
    assert!(check_certificate(&g, &lower, &budget).unwrap());

    // Upper: width-3 protocol from a width-4 decomposition.
    let (pw, pd) = pathwidth(&g, budget.max_pathwidth_vertices).unwrap();
    assert_eq!(pw, 4);
    let j = protocol_from_decomposition(&g, &pd, p(1, 1)).unwrap();
    assert!(protocol_width(&j).unwrap() <= 3);
    assert!(clears(&run(&g, &j).unwrap()));
    let upper = Certificate::Upper {
        params: p(1, 1),
        width: 3,
        evidence: UpperEvidence::Protocol(j),
    };
    assert!(check_certificate(&g, &upper, &budget).unwrap());
    println!("criterion  4 PASS: 4x4 grid has certified bounds 2 < i <= 3, so i = 3");
}

#[test]
fn criterion_05_grid4_isoperimetric_value_at_eight() {
    let g = generate(&FamilySpec::Grid(4)).unwrap();
    assert_eq!(
        isoperimetric_value(&g, 8, &SubsetBudget::default()).unwrap(),
        4
    );
    println!("criterion  5 PASS: exhaustive minimum boundary over 8-subsets of the 4x4 grid is 4");
}

#[test]
fn criterion_06_pathwidth_suite() {
    let limit = Budget::default().max_pathwidth_vertices;
    let mut cases: Vec<(FamilySpec, usize)> = vec![
        (FamilySpec::Caterpillar(vec![3, 1, 2]), 1),
        (FamilySpec::Caterpillar(vec![0, 2, 0, 4]), 1),
        (FamilySpec::Star(5), 1),
        (FamilySpec::Path(7), 1),
        (FamilySpec::Grid(3), 3),
        (FamilySpec::Grid(4), 4),
    ];
    for n in 3..=8 {
        cases.push((FamilySpec::Cycle(n), 2));
    }
    for (spec, expected) in cases {
        let g = generate(&spec).unwrap();
        let (pw, pd) = pathwidth(&g, limit).unwrap();
        assert_eq!(pw, expected, "{spec:?}");
        assert!(validate(&g, &pd).is_valid(), "{spec:?}");
        assert_eq!(width(&pd).unwrap(), pw, "{spec:?}");
    }
    println!("criterion  6 PASS: exact pathwidth with validating witnesses on caterpillars, cycles, and grids");
}

fn criterion7_graphs() -> Vec<FamilySpec> {
    vec![
        FamilySpec::Grid(3),
        FamilySpec::Grid(4),
        FamilySpec::SpiderK13Subdiv,
        FamilySpec::Cycle(6),
        FamilySpec::Caterpillar(vec![3, 1, 2]),
    ]
}

#[test]
fn criterion_07_decomposition_protocols() {
    let limit = Budget::default().max_pathwidth_vertices;
    for spec in criterion7_graphs() {
        let g = generate(&spec).unwrap();
        let (pw, pd) = pathwidth(&g, limit).unwrap();
        for params in all_params() {
            let j = protocol_from_decomposition(&g, &pd, params).unwrap();
            let bound = (1 + pw).div_ceil(params.horizon());
            assert!(clears(&run(&g, &j).unwrap()), "{spec:?} {params:?}");
            assert!(
                protocol_width(&j).unwrap() <= bound,
                "{spec:?} {params:?}"
            );
            assert!(is_cautious(&g, &j).unwrap(), "{spec:?} {params:?}");
            if spec == FamilySpec::Grid(4) && params == p(1, 2) {
                assert_eq!(protocol_width(&j).unwrap(), 2);
            }
        }
    }
    println!("criterion  7 PASS: decomposition-built protocols clear cautiously within the pathwidth bound");
}

#[test]
fn criterion_08_cautious_protocols_give_decompositions() {
    // The caterpillar protocol from the worked example: spine x,y,z = 0,1,2
    // with leaves a1,a2,a3 = 3,4,5, b1 = 6, c1,c2 = 7,8.
    let g = generate(&FamilySpec::Caterpillar(vec![3, 1, 2])).unwrap();
    let j = Protocol::new(
        9,
        p(1, 1),
        [3, 0, 4, 0, 5, 0, 1, 6, 1, 2, 7, 2, 8]
            .iter()
            .map(|&v| vec![v])
            .collect(),
    )
    .unwrap();
    let pd = decomposition_from_cautious(&g, &j).unwrap();
    assert_eq!(
        pd.bag_ids(),
        vec![
            vec![0, 3],
            vec![0, 4],
            vec![0, 4],
            vec![0, 5],
            vec![0, 5],
            vec![0, 1],
            vec![1, 6],
            vec![1, 6],
            vec![1, 2],
            vec![2, 7],
            vec![2, 7],
            vec![2, 8],
        ]
    );

    // Every cautious protocol from criterion 7 converts into a valid
    // decomposition within the width bound.
    let limit = Budget::default().max_pathwidth_vertices;
    for spec in criterion7_graphs() {
        let g = generate(&spec).unwrap();
        let (pw, pd) = pathwidth(&g, limit).unwrap();
        for params in all_params() {
            let j = protocol_from_decomposition(&g, &pd, params).unwrap();
            let recovered = decomposition_from_cautious(&g, &j).unwrap();
            assert!(validate(&g, &recovered).is_valid(), "{spec:?} {params:?}");
            let w = protocol_width(&j).unwrap();
            assert!(
                pw <= params.horizon() * w - 1,
                "{spec:?} {params:?}: pathwidth {pw} vs bound {}",
                params.horizon() * w - 1
            );
        }
    }
    println!("criterion  8 PASS: cautious protocols convert to valid decompositions; the worked example reproduces its 12 bags");
}

#[test]
fn criterion_09_theorem_property_suites() {
    let budget = Budget::default();
    let mut rng = rng(0x5eed_0901);
    let mut protocols: Vec<(immunize_core::graph::Graph, Protocol)> = Vec::new();

    // Graph corpus: every connected graph on up to 4 vertices plus seeded
    // random 5- and 6-vertex graphs.
    let mut graphs: Vec<immunize_core::graph::Graph> = Vec::new();
    for n in 2..=4 {
        graphs.extend(connected_graphs_up_to_iso(n));
    }
    for _ in 0..12 {
        graphs.push(random_connected_graph(5, 3, &mut rng));
        graphs.push(random_connected_graph(6, 4, &mut rng));
    }

    for g in &graphs {
        for params in all_params() {
            // Solver witness at the exact width.
            let result = immunization_number(g, params, &budget).unwrap();
            if let Certificate::Upper {
                evidence: UpperEvidence::Protocol(w),
                ..
            } = &result.upper
            {
                protocols.push((g.clone(), w.clone()));
                if let Some(mutated) = frivolous_variant(g, w, &mut rng) {
                    protocols.push((g.clone(), mutated));
                }
            }
            // Random clearing protocols.
            if let Some(j) = random_clearing_protocol(g, params, 3, &mut rng) {
                protocols.push((g.clone(), j));
            }
            // A cautious one from the pathwidth machinery.
            let (_, pd) = pathwidth(g, budget.max_pathwidth_vertices).unwrap();
            let j = protocol_from_decomposition(g, &pd, params).unwrap();
            protocols.push((g.clone(), j));
        }
    }
    assert!(
        protocols.len() >= 500,
        "need at least 500 protocols, generated {}",
        protocols.len()
    );

    for (g, j) in &protocols {
        let trace = run(g, j).unwrap();
        assert!(clears(&trace));
        let params = j.params();

        // No immunized vertex turns contagious within its protection window.
        for t in 1..=j.len() {
            for v in j.set_at(t).iter() {
                for t2 in t..=(t + params.r + params.s - 1).min(trace.len()) {
                    assert!(!trace.is_red(t2, v), "protection window violated");
                }
            }
        }

        // The two monotonicity formulations agree.
        let monotone = is_monotone(g, j).unwrap();
        assert_eq!(monotone, is_monotone_via_yellow(g, j).unwrap());

        // Cautious protocols are monotone.
        if is_cautious(g, j).unwrap() {
            assert!(monotone, "cautious protocol must be monotone");
        }

        // Minimal and monotone clearing protocols are cautious.
        if monotone && is_minimal(g, j).unwrap() {
            assert!(is_cautious(g, j).unwrap(), "minimal+monotone must be cautious");
        }

        // Minimization: stepwise subset, clears, minimal.
        let minimized = minimize(g, j).unwrap();
        assert_eq!(minimized.len(), j.len());
        for t in 1..=j.len() {
            assert!(minimized.set_at(t).is_subset_of(j.set_at(t)));
        }
        assert!(clears(&run(g, &minimized).unwrap()));
        assert!(is_minimal(g, &minimized).unwrap());

        // Restrictions to random subgraphs still clear.
        let (verts, edges) = random_subgraph(g, &mut rng);
        let (sub, _, restricted) = restrict(j, g, &verts, &edges).unwrap();
        assert!(
            clears(&run(&sub, &restricted).unwrap()),
            "restricted protocol must clear the subgraph"
        );
    }
    println!(
        "criterion  9 PASS: {} protocols, zero violations across the protection-window, monotonicity, cautiousness, minimization, and restriction properties",
        protocols.len()
    );
}

#[test]
fn criterion_10_width_one_characterizes_caterpillars() {
    let budget = Budget::default();
    let mut rng = rng(0x5eed_1001);
    let mut trees: Vec<immunize_core::graph::Graph> = vec![
        generate(&FamilySpec::SpiderK13Subdiv).unwrap(),
        generate(&FamilySpec::Star(5)).unwrap(),
        generate(&FamilySpec::Path(9)).unwrap(),
        generate(&FamilySpec::Caterpillar(vec![2, 0, 3, 1])).unwrap(),
        generate(&FamilySpec::MaryTree(2, 3)).unwrap(),
    ];
    for i in 0..220 {
        let n = 2 + (i % 8);
        trees.push(random_tree(n, &mut rng));
    }
    assert!(trees.len() >= 200);
    let mut caterpillars = 0;
    for t in &trees {
        assert!(t.vertex_count() >= 2 && t.vertex_count() <= 15);
        let width_one = matches!(
            clearable_with_width(t, p(1, 1), 1, &budget),
            WidthDecision::Cleared(_)
        );
        assert_eq!(
            width_one,
            is_caterpillar(t),
            "tree {:?} disagrees",
            t.edges()
        );
        caterpillars += usize::from(width_one);
    }
    assert!(caterpillars > 0 && caterpillars < trees.len());
    println!(
        "criterion 10 PASS: over {} trees, width-1 clearability coincides exactly with being a caterpillar",
        trees.len()
    );
}

#[test]
fn criterion_11_subdivision_constructions() {
    let start = std::time::Instant::now();
    let limit = DEFAULT_CONSTRUCTION_VERTEX_LIMIT;

    for (m, d) in [(2, 2), (2, 3), (2, 4), (3, 2)] {
        let built = build_subdivided_hatted_tree(m, d, limit).unwrap();
        let trace = run(&built.graph, &built.protocol).unwrap();
        assert!(clears(&trace), "(m,d)=({m},{d})");
        assert!(protocol_width(&built.protocol).unwrap() <= 2);
        let last = built.protocol.len();
        for t in 1..=last {
            assert_eq!(
                built.protocol.set_at(t).contains(built.stem),
                t == last,
                "stem must appear exactly in the final step"
            );
        }
        // Step bound against the previous level's protocol length.
        let s_prev = if d == 2 {
            build_subdivided_hatted_tree(m, 1, limit).unwrap().steps_used
        } else {
            build_subdivided_hatted_tree(m, d - 1, limit).unwrap().steps_used
        };
        assert!(
            built.steps_used <= merged_time_bound(m, s_prev).unwrap(),
            "(m,d)=({m},{d}): {} steps over bound {}",
            built.steps_used,
            merged_time_bound(m, s_prev).unwrap()
        );
        // The graph is a genuine subdivision of the hatted m-ary tree.
        let (target, _) = hatted_mary_tree(m, d).unwrap();
        assert!(trees_isomorphic(&smooth_tree(&built.graph).unwrap(), &target));
    }

    // The four-way merge clears its parts in the documented insertion order.
    let piece = build_subdivided_hatted_tree(2, 1, limit).unwrap().into_piece();
    let merged = merge_many(&vec![piece; 4]).unwrap();
    use Segment::*;
    assert_eq!(
        merged.clearing_order,
        vec![
            Piece(4),
            Path(4),
            Piece(3),
            Path(3),
            Path(4),
            Piece(2),
            Path(2),
            Path(3),
            Path(4),
            Piece(1),
            Path(2),
            Path(3),
            Path(4),
        ]
    );

    // The subdivided grid example clears at width 2 and is not cautious.
    let (h, j) = build_subdivided_grid_example().unwrap();
    assert!(clears(&run(&h, &j).unwrap()));
    assert_eq!(protocol_width(&j).unwrap(), 2);
    assert!(!is_cautious(&h, &j).unwrap());

    // Random trees subdivide into width-2 territory and contract back.
    let mut rng = rng(0x5eed_1101);
    for i in 0..20 {
        let n = 2 + (i * 18 + 7) % 19; // sizes spread over 2..=20
        let t = random_tree(n, &mut rng);
        let result = tree_subdivision_protocol(&t, limit).unwrap();
        let trace = run(&result.subdivided, &result.protocol).unwrap();
        assert!(clears(&trace), "tree #{i}");
        assert!(protocol_width(&result.protocol).unwrap() <= 2);
        // Contraction oracle: the chains reproduce exactly the tree's edges,
        // and chain interiors are plain degree-2 vertices.
        let mut recovered: Vec<(usize, usize)> =
            result.chains.iter().map(|&(a, b, _)| (a, b)).collect();
        recovered.sort_unstable();
        assert_eq!(recovered, t.edges(), "tree #{i}");
        for (a, b, interiors) in &result.chains {
            let mut prev = result.vertex_map[*a];
            for &mid in interiors {
                assert_eq!(result.subdivided.degree(mid), 2);
                assert!(result.subdivided.has_edge(prev, mid));
                prev = mid;
            }
            assert!(result.subdivided.has_edge(prev, result.vertex_map[*b]));
        }
        assert_eq!(
            result.subdivided.edge_count(),
            result
                .chains
                .iter()
                .map(|(_, _, i)| i.len() + 1)
                .sum::<usize>(),
            "subdivision has no extra edges"
        );
    }
    assert!(
        start.elapsed().as_secs() < 120,
        "construction suite exceeded 2 minutes"
    );
    println!("criterion 11 PASS: subdivision constructions clear at width 2 within their step bounds and contract back to their trees");
}

#[test]
fn criterion_12_solver_agrees_with_naive_search() {
    let budget = Budget::default();
    for n in 1..=5 {
        for g in connected_graphs_up_to_iso(n) {
            for params in all_params() {
                let exact = immunization_number(&g, params, &budget).unwrap().value;
                let naive = naive_immunization_number(&g, params);
                assert_eq!(
                    exact,
                    naive,
                    "disagreement on {:?} with {params:?}",
                    g.edges()
                );
            }
        }
    }
    println!("criterion 12 PASS: reachability solver agrees with the naive depth-bounded search on every small connected graph");
}

/// Subgraphs never need more immunizers than their host (solver-level check
/// complementing the restriction property of criterion 9).
#[test]
fn subgraph_immunization_numbers_are_monotone() {
    let budget = Budget::default();
    let mut rng = rng(0x5eed_c210);
    for _ in 0..12 {
        let g = random_connected_graph(5, 3, &mut rng);
        let host = immunization_number(&g, p(1, 1), &budget).unwrap().value;
        // Induced connected subgraph on a random vertex subset.
        let (verts, _) = random_subgraph(&g, &mut rng);
        let induced: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| verts.contains(&u) && verts.contains(&v))
            .collect();
        let dummy = Protocol::new(g.vertex_count(), p(1, 1), vec![]).unwrap();
        let (sub, _, _) = restrict(&dummy, &g, &verts, &induced).unwrap();
        if !sub.is_connected() || sub.vertex_count() == 0 {
            continue;
        }
        let part = immunization_number(&sub, p(1, 1), &budget).unwrap().value;
        assert!(part <= host, "subgraph needs more than its host");
    }
}

/// The exact solver never exceeds the pathwidth upper bound.
#[test]
fn solver_respects_the_pathwidth_bound() {
    let budget = Budget::default();
    for spec in [
        FamilySpec::Cycle(5),
        FamilySpec::Star(4),
        FamilySpec::SpiderK13Subdiv,
        FamilySpec::Grid(3),
    ] {
        let g = generate(&spec).unwrap();
        for params in all_params() {
            let exact = immunization_number(&g, params, &budget).unwrap().value;
            let (bound, cert) =
                immunize_core::solver::upper_bound_pathwidth(&g, params, &budget).unwrap();
            assert!(exact <= bound, "{spec:?} {params:?}");
            assert!(check_certificate(&g, &cert, &budget).unwrap());
        }
    }
}
