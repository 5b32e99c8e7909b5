//! For real-interval targets, probing cone comparisons with the two
//! endpoint anchors (covering the function and its negation) is equivalent
//! to probing with every sampled anchor.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treeamle::amle::{default_probes, t_comparison_check, ComparisonProbe, InterpolatedMap};
use treeamle::graph::{PartialVertexMap, VertexId};
use treeamle::harmonic::{extend_inf_harmonic, TiePolicy};
use treeamle::targets::{MetricTree, TreePoint};
use treeamle::validation::random_connected_graph;

fn endpoint_probes(tree: &MetricTree, probes: &[ComparisonProbe]) -> Vec<ComparisonProbe> {
    let ends = [tree.vertex_point("a").unwrap(), tree.vertex_point("b").unwrap()];
    probes.iter().filter(|p| ends.contains(&p.anchor)).cloned().collect()
}

#[test]
fn endpoint_anchors_are_as_strong_as_all_anchors_on_interval_targets() {
    let tree = MetricTree::new(&["a", "b"], &[("a", "b", 4.0)]).unwrap();
    let seg = |x: f64| {
        let (e, _) = tree.edge_between("a", "b").unwrap();
        tree.point_on_edge(e, x).unwrap()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x22);
    let mut corrupted_checked = 0;
    for round in 0..12 {
        let graph = random_connected_graph(&mut rng, 9, 3);
        let n = graph.vertex_count();
        let omega_size = rng.random_range(1..n);
        let mut omega = BTreeSet::new();
        let mut boundary = PartialVertexMap::new();
        while omega.len() < omega_size {
            let v = VertexId(rng.random_range(0..n));
            if omega.insert(v) {
                boundary.insert(v, seg(rng.random_range(0.5..3.5)));
            }
        }
        let ext =
            extend_inf_harmonic(&graph, &boundary, &tree, TiePolicy::Lexicographic).unwrap();
        let mut map = ext.map.clone();
        let corrupt = round % 2 == 1 && omega.len() < n;
        if corrupt {
            // push one free value to an extreme so the map has an interior
            // local extremum in both orientations of the segment
            let free: Vec<usize> =
                (0..n).filter(|&i| !omega.contains(&VertexId(i))).collect();
            let v = free[rng.random_range(0..free.len())];
            let target = if round % 4 == 1 { 3.9 } else { 0.1 };
            map.insert(VertexId(v), seg(target));
            corrupted_checked += 1;
        }
        let f = InterpolatedMap::new(&graph, &map, &tree).unwrap();
        let all = default_probes(&f, &omega).unwrap();
        let ends = endpoint_probes(&tree, &all);
        assert!(!ends.is_empty());
        let verdict_all = t_comparison_check(&f, &all, 12, 1e-9).unwrap();
        let verdict_ends = t_comparison_check(&f, &ends, 12, 1e-9).unwrap();
        assert_eq!(
            verdict_all.passed, verdict_ends.passed,
            "round {round}: endpoint and full anchor families disagree (corrupt={corrupt})"
        );
        if !corrupt {
            assert!(verdict_all.passed, "round {round}: extension output flagged");
        }
    }
    assert!(corrupted_checked >= 4);
}

/// Interpolation is geodesic on edges: both distance identities hold at ten
/// random parameters per edge.
#[test]
fn interpolation_is_geodesic_on_every_edge() {
    use treeamle::graph::GraphPoint;
    use treeamle::validation::{random_instance};

    let mut rng = ChaCha8Rng::seed_from_u64(0x9E0);
    for _ in 0..25 {
        let inst = random_instance(&mut rng, 12, 9, None);
        let ext = extend_inf_harmonic(
            &inst.graph,
            &inst.boundary,
            &inst.tree,
            TiePolicy::Lexicographic,
        )
        .unwrap();
        let f = InterpolatedMap::new(&inst.graph, &ext.map, &inst.tree).unwrap();
        for (u, v) in inst.graph.edges_iter() {
            if u == v {
                continue;
            }
            let fu: TreePoint = *ext.map.get(u).unwrap();
            let fv: TreePoint = *ext.map.get(v).unwrap();
            let d = inst.tree.distance(&fu, &fv);
            for k in 0..10 {
                let lam = rng.random_range(0.0..1.0);
                let p = GraphPoint::on_edge(&inst.graph, u, v, lam).unwrap();
                let img = f.eval(&p).unwrap();
                // the canonical offset runs from the smaller endpoint
                let lam_canon = match p {
                    GraphPoint::Interior { u: cu, offset, .. } => {
                        if cu == u {
                            offset
                        } else {
                            1.0 - offset
                        }
                    }
                    GraphPoint::Vertex(w) => {
                        if w == u {
                            0.0
                        } else {
                            1.0
                        }
                    }
                };
                let _ = k;
                assert!((inst.tree.distance(&img, &fu) - lam_canon * d).abs() <= 1e-9);
                assert!(
                    (inst.tree.distance(&img, &fv) - (1.0 - lam_canon) * d).abs() <= 1e-9
                );
            }
        }
    }
}
