//! Independent oracle for the extension: at a free vertex, the midpoint
//! clauses pin the value to the tree 1-center of the neighbor images — the
//! geodesic midpoint of their diameter pair. Iterating that local update
//! (Gauss–Seidel sweeps) therefore converges to the unique
//! infinity-harmonic extension through arithmetic that shares nothing with
//! the production algorithm: no external-path metrics, no step constants,
//! no ball-intersection witnesses.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treeamle::graph::{SimplicialGraph, VertexId};
use treeamle::harmonic::{extend_inf_harmonic, TiePolicy};
use treeamle::targets::{MetricTree, TreePoint};
use treeamle::validation::{random_instance, RandomInstance};

/// Midpoint of the diameter pair of a nonempty point set: the unique
/// minimizer of the maximal distance to the set, because the covering
/// radius of a tree point set equals half its diameter.
fn one_center(tree: &MetricTree, pts: &[TreePoint]) -> TreePoint {
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for i in 0..pts.len() {
        for j in i..pts.len() {
            let d = tree.distance(&pts[i], &pts[j]);
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    tree.geodesic_point(&pts[best.1], &pts[best.2], 0.5).unwrap()
}

/// Sweeps the local 1-center update over the free vertices until the values
/// stop moving; `None` when the sweep cap is hit first.
fn relaxation_extension(
    graph: &SimplicialGraph,
    inst: &RandomInstance,
    max_sweeps: usize,
) -> Option<Vec<TreePoint>> {
    let n = graph.vertex_count();
    let anchor = *inst.boundary.iter().next().unwrap().1;
    let mut values: Vec<TreePoint> = (0..n)
        .map(|i| inst.boundary.get(VertexId(i)).copied().unwrap_or(anchor))
        .collect();
    let free: Vec<usize> =
        (0..n).filter(|&i| !inst.omega.contains(&VertexId(i))).collect();
    for _ in 0..max_sweeps {
        let mut moved: f64 = 0.0;
        for &v in &free {
            let images: Vec<TreePoint> =
                graph.neighbors(VertexId(v)).iter().map(|&u| values[u]).collect();
            let next = one_center(&inst.tree, &images);
            moved = moved.max(inst.tree.distance(&values[v], &next));
            values[v] = next;
        }
        if moved < 1e-11 {
            return Some(values);
        }
    }
    None
}

#[test]
fn relaxation_oracle_reproduces_the_extension() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
    let mut converged = 0;
    let instances = 25;
    for idx in 0..instances {
        let inst = random_instance(&mut rng, 10, 7, None);
        let ext = extend_inf_harmonic(
            &inst.graph,
            &inst.boundary,
            &inst.tree,
            TiePolicy::Lexicographic,
        )
        .unwrap();
        let Some(oracle) = relaxation_extension(&inst.graph, &inst, 60_000) else {
            continue; // counted below: most instances must converge
        };
        converged += 1;
        for i in 0..inst.graph.vertex_count() {
            let d = inst.tree.distance(&oracle[i], ext.map.get(VertexId(i)).unwrap());
            assert!(
                d <= 1e-6,
                "instance {idx}: oracle and extension differ by {d} at {}",
                inst.graph.vertex_name(VertexId(i))
            );
        }
    }
    assert!(converged >= 20, "only {converged} of {instances} instances converged");
}
