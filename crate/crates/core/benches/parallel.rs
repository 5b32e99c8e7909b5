//! Parallel vs sequential throughput for the two data-parallel hot paths:
//! Monte-Carlo value estimation and the exhaustive open-set sweep. Both
//! pairs must agree bit for bit; the benchmark asserts that once up front.

use std::collections::BTreeSet;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use treeamle::amle::{is_amle_exhaustive, is_amle_exhaustive_seq, InterpolatedMap};
use treeamle::graph::{PartialVertexMap, SimplicialGraph, VertexId};
use treeamle::harmonic::{extend_inf_harmonic, TiePolicy};
use treeamle::politics::{estimate_value, estimate_value_seq};
use treeamle::targets::MetricTree;
use treeamle::validation::politics_fixtures;

fn bench_estimate(c: &mut Criterion) {
    let (_, config) = politics_fixtures().into_iter().nth(4).unwrap();
    let trials = 5_000;
    let par = estimate_value(&config, trials, None).unwrap();
    let seq = estimate_value_seq(&config, trials).unwrap();
    assert_eq!(par.mean.to_bits(), seq.mean.to_bits());

    let mut group = c.benchmark_group("estimate_value");
    group.bench_function("parallel", |b| {
        b.iter(|| estimate_value(black_box(&config), trials, None).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| estimate_value_seq(black_box(&config), trials).unwrap())
    });
    group.finish();
}

fn ladder(n: usize) -> SimplicialGraph {
    let names: Vec<String> = (0..n).map(|i| format!("v{i:02}")).collect();
    let mut edges: Vec<(String, String)> =
        (1..n).map(|i| (names[i - 1].clone(), names[i].clone())).collect();
    for i in 3..n {
        if i % 3 == 0 {
            edges.push((names[i - 3].clone(), names[i].clone()));
        }
    }
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let edge_refs: Vec<(&str, &str)> =
        edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    SimplicialGraph::new(&name_refs, &edge_refs, false).unwrap()
}

fn bench_exhaustive(c: &mut Criterion) {
    let graph = ladder(14);
    let tree = MetricTree::new(&["a", "b"], &[("a", "b", 5.0)]).unwrap();
    let (e, _) = tree.edge_between("a", "b").unwrap();
    let omega: BTreeSet<VertexId> =
        [VertexId(0), VertexId(graph.vertex_count() - 1)].into_iter().collect();
    let mut boundary = PartialVertexMap::new();
    boundary.insert(VertexId(0), tree.point_on_edge(e, 0.0).unwrap());
    boundary.insert(
        VertexId(graph.vertex_count() - 1),
        tree.point_on_edge(e, 5.0).unwrap(),
    );
    let ext = extend_inf_harmonic(&graph, &boundary, &tree, TiePolicy::Lexicographic).unwrap();
    let map = ext.map;
    let f = InterpolatedMap::new(&graph, &map, &tree).unwrap();
    let par = is_amle_exhaustive(&f, &omega, 8, 1e-6, 14).unwrap();
    let seq = is_amle_exhaustive_seq(&f, &omega, 8, 1e-6, 14).unwrap();
    assert_eq!(par.amle, seq.amle);

    let mut group = c.benchmark_group("exhaustive_open_set_sweep");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| is_amle_exhaustive(black_box(&f), &omega, 8, 1e-6, 14).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| is_amle_exhaustive_seq(black_box(&f), &omega, 8, 1e-6, 14).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_estimate, bench_exhaustive);
criterion_main!(benches);
