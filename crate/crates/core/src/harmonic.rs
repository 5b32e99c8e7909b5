//! Infinity-harmonicity testing and the constructive Lipschitz-preserving
//! infinity-harmonic extension.
//!
//! A map `f` is infinity-harmonic at a vertex `v` when some pair of
//! neighbors `u, w` realizes the maximal image distance
//! `M = max_z d(f(z), f(v))` on both sides and `d(f(u), f(w)) = 2M`, i.e.
//! `f(v)` is an exact midpoint of the two extreme neighbor images.
//!
//! The extension algorithm assigns values to the free vertices one at a
//! time. At each step it computes the external-path metric `d_k` induced by
//! the already-assigned set, takes the pair of assigned vertices maximizing
//! the image-distance to `d_k` ratio, walks one step along a shortest
//! external path between them, and picks the new value inside the
//! intersection of balls `B(f(a), L_k · d_k(a, w))` over all assigned `a`.
//! That intersection is provably nonempty for any target with the binary
//! intersection property; an empty intersection here is reported as a
//! defect, never patched over.

use std::collections::{BTreeSet, BinaryHeap};

use crate::error::{Error, Result};
use crate::graph::{PartialVertexMap, SimplicialGraph, VertexId};
use crate::targets::TargetSpace;

/// Deterministic tie-break policy: the order in which vertices are compared
/// when several choices are equally good. Correctness of the extension does
/// not depend on the choice; exposing both directions lets callers observe
/// that.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    Lexicographic,
    ReverseLexicographic,
}

#[derive(Clone, Copy)]
struct PolicyKeys {
    rev: bool,
    n: usize,
}

impl PolicyKeys {
    fn new(policy: TiePolicy, n: usize) -> Self {
        PolicyKeys { rev: policy == TiePolicy::ReverseLexicographic, n }
    }

    fn key(&self, i: usize) -> u32 {
        if self.rev {
            (self.n - 1 - i) as u32
        } else {
            i as u32
        }
    }

    fn pair_key(&self, a: usize, b: usize) -> (u32, u32) {
        let (x, y) = (self.key(a), self.key(b));
        (x.min(y), x.max(y))
    }
}

/// Outcome of the infinity-harmonicity test at one vertex.
#[derive(Debug, Clone)]
pub struct HarmonicCheck {
    pub harmonic: bool,
    /// `M`: the largest image distance from `f(v)` to a neighbor image.
    pub max_neighbor_distance: f64,
    /// A witnessing neighbor pair when harmonic (equal when `M = 0`).
    pub witness: Option<(VertexId, VertexId)>,
    /// Human-readable reason when not harmonic.
    pub failure: Option<String>,
}

/// Tests the two midpoint clauses at `v`. The map must cover `v` and its
/// whole neighborhood (which includes `v` itself when a self-loop sits
/// there).
pub fn is_inf_harmonic_at<T: TargetSpace>(
    graph: &SimplicialGraph,
    map: &PartialVertexMap<T::Point>,
    target: &T,
    v: VertexId,
    tol: f64,
) -> Result<HarmonicCheck> {
    let nbhd = graph.neighborhood_for_game(v);
    if nbhd.is_empty() {
        return Err(Error::input(format!(
            "vertex {:?} has no neighbors",
            graph.vertex_name(v)
        )));
    }
    let fv = map
        .get(v)
        .ok_or_else(|| Error::input(format!("map misses vertex {:?}", graph.vertex_name(v))))?;
    let mut dists = Vec::with_capacity(nbhd.len());
    for &u in &nbhd {
        let fu = map.get(VertexId(u)).ok_or_else(|| {
            Error::input(format!("map misses neighbor {:?}", graph.vertex_name(VertexId(u))))
        })?;
        dists.push((u, target.distance(fu, fv)));
    }
    let m = dists.iter().map(|&(_, d)| d).fold(0.0, f64::max);
    for (i, &(u, du)) in dists.iter().enumerate() {
        if (du - m).abs() > tol {
            continue;
        }
        for &(w, dw) in &dists[i..] {
            if (dw - m).abs() > tol {
                continue;
            }
            let spread = target.distance(
                map.get(VertexId(u)).unwrap(),
                map.get(VertexId(w)).unwrap(),
            );
            if (spread - 2.0 * m).abs() <= tol {
                return Ok(HarmonicCheck {
                    harmonic: true,
                    max_neighbor_distance: m,
                    witness: Some((VertexId(u), VertexId(w))),
                    failure: None,
                });
            }
        }
    }
    // Diagnose: the widest spread achieved among maximal neighbors.
    let maximizers: Vec<usize> =
        dists.iter().filter(|&&(_, d)| (d - m).abs() <= tol).map(|&(u, _)| u).collect();
    let mut best_spread = 0.0f64;
    for (i, &u) in maximizers.iter().enumerate() {
        for &w in &maximizers[i..] {
            let s = target.distance(map.get(VertexId(u)).unwrap(), map.get(VertexId(w)).unwrap());
            best_spread = best_spread.max(s);
        }
    }
    Ok(HarmonicCheck {
        harmonic: false,
        max_neighbor_distance: m,
        witness: None,
        failure: Some(format!(
            "no neighbor pair spans 2*M = {:.12}; best spread among maximal neighbors is {:.12}",
            2.0 * m,
            best_spread
        )),
    })
}

/// Per-step record of the extension, enough to observe the monotone
/// sequence of step constants and the chosen pairs.
#[derive(Debug, Clone)]
pub enum ExtensionStep {
    /// One vertex assigned through a maximizing pair and a ball intersection.
    Assign {
        vertex: VertexId,
        lipschitz: f64,
        pair: (VertexId, VertexId),
        path_length: u32,
    },
    /// Every remaining vertex was flooded from its unique reachable anchor.
    Flood { assignments: Vec<(VertexId, VertexId)> },
}

#[derive(Debug, Clone, Default)]
pub struct ExtensionTrace {
    pub steps: Vec<ExtensionStep>,
}

impl ExtensionTrace {
    /// The step constants of pair-assignment steps, in order.
    pub fn step_constants(&self) -> Vec<f64> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                ExtensionStep::Assign { lipschitz, .. } => Some(*lipschitz),
                ExtensionStep::Flood { .. } => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Extension<P> {
    /// Total vertex map extending the boundary data.
    pub map: PartialVertexMap<P>,
    pub trace: ExtensionTrace,
}

#[derive(Debug, Clone, Copy)]
struct PairEntry {
    ratio: f64,
    key: (u32, u32),
    a: u32,
    b: u32,
}

impl PartialEq for PairEntry {
    fn eq(&self, other: &Self) -> bool {
        self.ratio == other.ratio && self.key == other.key
    }
}
impl Eq for PairEntry {}
impl PartialOrd for PairEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PairEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap: larger ratio first, then the policy-smaller pair
        self.ratio.total_cmp(&other.ratio).then_with(|| other.key.cmp(&self.key))
    }
}

/// Extends `boundary` (defined on a nonempty vertex set) to a total map that
/// is infinity-harmonic at every free vertex and has the same Lipschitz
/// constant on `V` as the data had on its domain, with respect to the hop
/// metric. The target must supply ball-intersection witnesses.
pub fn extend_inf_harmonic<T: TargetSpace>(
    graph: &SimplicialGraph,
    boundary: &PartialVertexMap<T::Point>,
    target: &T,
    policy: TiePolicy,
) -> Result<Extension<T::Point>> {
    if graph.has_any_self_loop() {
        return Err(Error::input("extension requires a graph without self-loops"));
    }
    if boundary.is_empty() {
        return Err(Error::input("boundary set must be nonempty"));
    }
    let n = graph.vertex_count();
    let pol = PolicyKeys::new(policy, n);
    let mut value: Vec<Option<T::Point>> = vec![None; n];
    for (v, p) in boundary.iter() {
        if v.0 >= n {
            return Err(Error::input(format!("vertex id {} out of range", v.0)));
        }
        value[v.0] = Some(p.clone());
    }
    let mut in_omega: Vec<bool> = (0..n).map(|i| value[i].is_some()).collect();
    let mut free_count = n - boundary.len();
    let mut trace = ExtensionTrace::default();

    let dist_of = |value: &[Option<T::Point>], a: usize, b: usize| -> f64 {
        target.distance(value[a].as_ref().unwrap(), value[b].as_ref().unwrap())
    };

    // Seed the candidate heap with every boundary pair at its exact ratio.
    let mut heap: BinaryHeap<PairEntry> = BinaryHeap::new();
    let omega0: Vec<usize> = (0..n).filter(|&i| in_omega[i]).collect();
    for (idx, &a) in omega0.iter().enumerate() {
        if idx + 1 == omega0.len() {
            break;
        }
        let d = graph.external_bfs(&in_omega, a);
        for &b in &omega0[idx + 1..] {
            if d[b] != u32::MAX {
                heap.push(PairEntry {
                    ratio: dist_of(&value, a, b) / d[b] as f64,
                    key: pol.pair_key(a, b),
                    a: a as u32,
                    b: b as u32,
                });
            }
        }
    }

    while free_count > 0 {
        // Lazy-max search: stored ratios only ever overestimate (the
        // external metric is non-decreasing), so the first entry whose
        // recomputed ratio matches its key is a true maximizer, and among
        // equal ratios the heap yields the policy-smallest pair first.
        let mut accepted: Option<(usize, usize, f64, u32)> = None;
        while let Some(top) = heap.pop() {
            let (a, b) = (top.a as usize, top.b as usize);
            let d = graph.external_bfs_until(&in_omega, a, Some(b));
            if d[b] == u32::MAX {
                continue; // unreachable now means unreachable forever
            }
            let ratio = dist_of(&value, a, b) / d[b] as f64;
            if ratio == top.ratio {
                accepted = Some((a, b, ratio, d[b]));
                break;
            }
            heap.push(PairEntry { ratio, key: top.key, a: top.a, b: top.b });
        }

        let Some((a, b, l_k, d_ab)) = accepted else {
            // No assigned pair is joined by an external path: every free
            // component touches exactly one assigned vertex.
            let mut assignments = Vec::with_capacity(free_count);
            let mut order: Vec<usize> = (0..n).filter(|&i| !in_omega[i]).collect();
            order.sort_by_key(|&i| pol.key(i));
            let mut visited = vec![false; n];
            for &seed in &order {
                if visited[seed] {
                    continue;
                }
                let mut component = vec![seed];
                let mut anchors: BTreeSet<usize> = BTreeSet::new();
                visited[seed] = true;
                let mut stack = vec![seed];
                while let Some(v) = stack.pop() {
                    for &u in graph.neighbors(VertexId(v)) {
                        if in_omega[u] {
                            anchors.insert(u);
                        } else if !visited[u] {
                            visited[u] = true;
                            component.push(u);
                            stack.push(u);
                        }
                    }
                }
                if anchors.len() != 1 {
                    return Err(Error::invariant(format!(
                        "flood component with {} anchors; exactly one was guaranteed",
                        anchors.len()
                    )));
                }
                let anchor = *anchors.iter().next().unwrap();
                component.sort_by_key(|&i| pol.key(i));
                for &c in &component {
                    value[c] = Some(value[anchor].clone().unwrap());
                    assignments.push((VertexId(c), VertexId(anchor)));
                }
            }
            for &(v, _) in &assignments {
                in_omega[v.0] = true;
            }
            trace.steps.push(ExtensionStep::Flood { assignments });
            break;
        };

        // Orient the pair by policy and keep it alive for later steps.
        heap.push(PairEntry {
            ratio: l_k,
            key: pol.pair_key(a, b),
            a: a as u32,
            b: b as u32,
        });
        let (x, y) = if pol.key(a) <= pol.key(b) { (a, b) } else { (b, a) };

        // One step along a policy-least shortest external path from x to y.
        let d_from_y = graph.external_bfs(&in_omega, y);
        let w = graph
            .neighbors(VertexId(x))
            .iter()
            .copied()
            .filter(|&u| !in_omega[u] && d_from_y[u] == d_ab - 1)
            .min_by_key(|&u| pol.key(u))
            .ok_or_else(|| Error::invariant("no first step on a shortest external path"))?;

        let d_from_w = graph.external_bfs(&in_omega, w);
        let mut balls = Vec::new();
        for i in 0..n {
            if in_omega[i] && d_from_w[i] != u32::MAX {
                balls.push((value[i].clone().unwrap(), l_k * d_from_w[i] as f64));
            }
        }
        let witness = target.ball_intersection_witness(&balls)?.ok_or_else(|| {
            Error::invariant(
                "empty ball intersection during extension; nonemptiness is guaranteed for \
                 targets with the binary intersection property"
                    .to_owned(),
            )
        })?;

        // New candidate pairs against the fresh vertex; the pre-insertion
        // distances are valid upper bounds for every later step.
        for i in 0..n {
            if in_omega[i] && d_from_w[i] != u32::MAX {
                heap.push(PairEntry {
                    ratio: target.distance(value[i].as_ref().unwrap(), &witness)
                        / d_from_w[i] as f64,
                    key: pol.pair_key(i, w),
                    a: i as u32,
                    b: w as u32,
                });
            }
        }
        value[w] = Some(witness);
        in_omega[w] = true;
        free_count -= 1;
        trace.steps.push(ExtensionStep::Assign {
            vertex: VertexId(w),
            lipschitz: l_k,
            pair: (VertexId(x), VertexId(y)),
            path_length: d_ab,
        });
    }

    let mut map = PartialVertexMap::new();
    for (i, v) in value.into_iter().enumerate() {
        map.insert(VertexId(i), v.expect("extension is total"));
    }
    Ok(Extension { map, trace })
}

/// Which graph metric a Lipschitz constant is taken against.
#[derive(Debug, Clone, Copy)]
pub enum GraphMetric<'a> {
    /// Plain hop metric.
    ShortestPath,
    /// External-path metric relative to the given set.
    External(&'a BTreeSet<VertexId>),
}

/// `max_{x≠y in subset} d_Z(f(x), f(y)) / metric(x, y)`, with pairs at
/// infinite metric distance contributing 0. Zero for singletons.
pub fn lipschitz_constant<T: TargetSpace>(
    graph: &SimplicialGraph,
    map: &PartialVertexMap<T::Point>,
    subset: &BTreeSet<VertexId>,
    metric: GraphMetric,
    target: &T,
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::input("subset must be nonempty"));
    }
    for v in subset {
        if map.get(*v).is_none() {
            return Err(Error::input(format!(
                "map misses vertex {:?}",
                graph.vertex_name(*v)
            )));
        }
    }
    let members: Vec<usize> = subset.iter().map(|v| v.0).collect();
    let mut best = 0.0f64;
    for (idx, &x) in members.iter().enumerate() {
        if idx + 1 == members.len() {
            break;
        }
        let dists: Vec<u32> = match metric {
            GraphMetric::ShortestPath => graph.bfs_from(VertexId(x)),
            GraphMetric::External(omega) => {
                let mask = graph.omega_mask(omega);
                graph.external_bfs(&mask, x)
            }
        };
        for &y in &members[idx + 1..] {
            if dists[y] == u32::MAX || dists[y] == 0 {
                continue;
            }
            let r = target.distance(map.get(VertexId(x)).unwrap(), map.get(VertexId(y)).unwrap())
                / dists[y] as f64;
            best = best.max(r);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::{MetricTree, TreePoint};

    fn path_graph(n: usize) -> SimplicialGraph {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let edges: Vec<(String, String)> =
            (0..n - 1).map(|i| (i.to_string(), (i + 1).to_string())).collect();
        SimplicialGraph::new(&names, &edges, false).unwrap()
    }

    fn segment(len: f64) -> MetricTree {
        MetricTree::new(&["a", "b"], &[("a", "b", len)]).unwrap()
    }

    fn seg_point(t: &MetricTree, offset: f64) -> TreePoint {
        let (e, _) = t.edge_between("a", "b").unwrap();
        t.point_on_edge(e, offset).unwrap()
    }

    #[test]
    fn midpoint_clause_on_a_path() {
        let g = path_graph(3);
        let t = segment(3.0);
        let v = |s: &str| g.vertex_id(s).unwrap();
        let mut map = PartialVertexMap::new();
        map.insert(v("0"), seg_point(&t, 0.0));
        map.insert(v("1"), seg_point(&t, 1.0));
        map.insert(v("2"), seg_point(&t, 2.0));
        let check = is_inf_harmonic_at(&g, &map, &t, v("1"), 1e-9).unwrap();
        assert!(check.harmonic);
        assert_eq!(check.witness, Some((v("0"), v("2"))));

        map.insert(v("1"), seg_point(&t, 0.9));
        let check = is_inf_harmonic_at(&g, &map, &t, v("1"), 1e-9).unwrap();
        assert!(!check.harmonic);
        assert!(check.failure.is_some());
    }

    #[test]
    fn extension_on_path_hits_the_geodesic_parametrization() {
        let g = path_graph(4);
        let t = segment(3.0);
        let v = |s: &str| g.vertex_id(s).unwrap();
        let mut boundary = PartialVertexMap::new();
        boundary.insert(v("0"), seg_point(&t, 0.0));
        boundary.insert(v("3"), seg_point(&t, 3.0));
        let ext = extend_inf_harmonic(&g, &boundary, &t, TiePolicy::Lexicographic).unwrap();
        assert_eq!(*ext.map.get(v("1")).unwrap(), seg_point(&t, 1.0));
        assert_eq!(*ext.map.get(v("2")).unwrap(), seg_point(&t, 2.0));
        // step constants are non-increasing
        let consts = ext.trace.step_constants();
        assert!(consts.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        // Lipschitz preserved
        let all: BTreeSet<VertexId> = (0..4).map(VertexId).collect();
        let omega: BTreeSet<VertexId> = [v("0"), v("3")].into_iter().collect();
        let lip_all =
            lipschitz_constant(&g, &ext.map, &all, GraphMetric::ShortestPath, &t).unwrap();
        let lip_omega =
            lipschitz_constant(&g, &boundary, &omega, GraphMetric::ShortestPath, &t).unwrap();
        assert!((lip_all - lip_omega).abs() < 1e-12);
        assert!((lip_all - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extension_with_total_boundary_is_identity() {
        let g = path_graph(2);
        let t = segment(1.0);
        let v = |s: &str| g.vertex_id(s).unwrap();
        let mut boundary = PartialVertexMap::new();
        boundary.insert(v("0"), seg_point(&t, 0.0));
        boundary.insert(v("1"), seg_point(&t, 1.0));
        let ext = extend_inf_harmonic(&g, &boundary, &t, TiePolicy::Lexicographic).unwrap();
        assert_eq!(ext.map, boundary);
        assert!(ext.trace.steps.is_empty());
    }

    #[test]
    fn star_center_goes_to_the_branch_vertex() {
        let g = SimplicialGraph::new(
            &["c", "x1", "x2", "x3"],
            &[("c", "x1"), ("c", "x2"), ("c", "x3")],
            false,
        )
        .unwrap();
        let t = MetricTree::new(
            &["m", "l1", "l2", "l3"],
            &[("m", "l1", 2.0), ("m", "l2", 2.0), ("m", "l3", 1.0)],
        )
        .unwrap();
        let v = |s: &str| g.vertex_id(s).unwrap();
        let mut boundary = PartialVertexMap::new();
        boundary.insert(v("x1"), t.vertex_point("l1").unwrap());
        boundary.insert(v("x2"), t.vertex_point("l2").unwrap());
        boundary.insert(v("x3"), t.vertex_point("l3").unwrap());
        let ext = extend_inf_harmonic(&g, &boundary, &t, TiePolicy::Lexicographic).unwrap();
        let center = ext.map.get(v("c")).unwrap();
        assert_eq!(*center, t.vertex_point("m").unwrap());

        // grid-search oracle: the midpoint clauses at the center pick out a
        // unique tree point, and it is the branch vertex
        let mut best_defect = f64::INFINITY;
        let mut best = None;
        let leaves = [
            t.vertex_point("l1").unwrap(),
            t.vertex_point("l2").unwrap(),
            t.vertex_point("l3").unwrap(),
        ];
        for ei in 0..t.edge_count() {
            let len = t.edge_length(crate::targets::TreeEdgeId(ei));
            for k in 0..=400 {
                let p = t
                    .point_on_edge(crate::targets::TreeEdgeId(ei), len * k as f64 / 400.0)
                    .unwrap();
                let ds: Vec<f64> = leaves.iter().map(|l| t.distance(&p, l)).collect();
                let m = ds.iter().cloned().fold(0.0, f64::max);
                // defect: how far the best pair is from the midpoint clauses
                let mut defect = f64::INFINITY;
                for i in 0..3 {
                    for j in i..3 {
                        let spread = t.distance(&leaves[i], &leaves[j]);
                        let d = (ds[i] - m).abs() + (ds[j] - m).abs() + (spread - 2.0 * m).abs();
                        defect = defect.min(d);
                    }
                }
                if defect < best_defect {
                    best_defect = defect;
                    best = Some(p);
                }
            }
        }
        assert!(best_defect < 1e-9);
        assert_eq!(best.unwrap(), t.vertex_point("m").unwrap());
    }

    #[test]
    fn constant_boundary_data_extends_constantly() {
        let g = path_graph(5);
        let t = segment(2.0);
        let v = |s: &str| g.vertex_id(s).unwrap();
        let p = seg_point(&t, 0.7);
        let mut boundary = PartialVertexMap::new();
        boundary.insert(v("0"), p);
        boundary.insert(v("4"), p);
        let ext = extend_inf_harmonic(&g, &boundary, &t, TiePolicy::Lexicographic).unwrap();
        for i in 0..5 {
            assert_eq!(*ext.map.get(VertexId(i)).unwrap(), p);
        }
    }

    #[test]
    fn single_anchor_floods_its_component() {
        let g = path_graph(4);
        let t = segment(2.0);
        let v = |s: &str| g.vertex_id(s).unwrap();
        let p = seg_point(&t, 1.3);
        let mut boundary = PartialVertexMap::new();
        boundary.insert(v("0"), p);
        let ext = extend_inf_harmonic(&g, &boundary, &t, TiePolicy::Lexicographic).unwrap();
        for i in 0..4 {
            assert_eq!(*ext.map.get(VertexId(i)).unwrap(), p);
        }
        assert!(matches!(ext.trace.steps[0], ExtensionStep::Flood { .. }));
    }

    #[test]
    fn lipschitz_constant_examples() {
        let g = path_graph(2);
        let t = segment(3.0);
        let v = |s: &str| g.vertex_id(s).unwrap();
        let mut map = PartialVertexMap::new();
        map.insert(v("0"), seg_point(&t, 0.0));
        map.insert(v("1"), seg_point(&t, 3.0));
        let s: BTreeSet<VertexId> = [v("0"), v("1")].into_iter().collect();
        assert_eq!(
            lipschitz_constant(&g, &map, &s, GraphMetric::ShortestPath, &t).unwrap(),
            3.0
        );
        let single: BTreeSet<VertexId> = [v("0")].into_iter().collect();
        assert_eq!(
            lipschitz_constant(&g, &map, &single, GraphMetric::ShortestPath, &t).unwrap(),
            0.0
        );
        let mut cmap = PartialVertexMap::new();
        cmap.insert(v("0"), seg_point(&t, 1.0));
        cmap.insert(v("1"), seg_point(&t, 1.0));
        assert_eq!(
            lipschitz_constant(&g, &cmap, &s, GraphMetric::ShortestPath, &t).unwrap(),
            0.0
        );
    }

    #[test]
    fn input_errors_are_reported() {
        let g = path_graph(3);
        let t = segment(1.0);
        // empty boundary
        let empty: PartialVertexMap<TreePoint> = PartialVertexMap::new();
        assert!(extend_inf_harmonic(&g, &empty, &t, TiePolicy::Lexicographic).is_err());
        // lonely vertex has no neighborhood to test
        let single = SimplicialGraph::new(&["x"], &[], false).unwrap();
        let mut m = PartialVertexMap::new();
        m.insert(single.vertex_id("x").unwrap(), seg_point(&t, 0.0));
        assert!(is_inf_harmonic_at(&single, &m, &t, single.vertex_id("x").unwrap(), 1e-9)
            .is_err());
        // self-loops carry no geometry for extension
        let looped =
            SimplicialGraph::new(&["a", "b"], &[("a", "b"), ("a", "a")], true).unwrap();
        let mut b = PartialVertexMap::new();
        b.insert(looped.vertex_id("a").unwrap(), seg_point(&t, 0.0));
        assert!(extend_inf_harmonic(&looped, &b, &t, TiePolicy::Lexicographic).is_err());
    }

    #[test]
    fn external_metric_lipschitz_ignores_internal_shortcuts() {
        // 0 - 1 - 2 with boundary {0, 1}: the only edge at vertex 0 is
        // internal to the set, so no external path leaves it at all.
        let g = path_graph(3);
        let t = segment(3.0);
        let v = |s: &str| g.vertex_id(s).unwrap();
        let mut map = PartialVertexMap::new();
        map.insert(v("0"), seg_point(&t, 0.0));
        map.insert(v("1"), seg_point(&t, 1.0));
        map.insert(v("2"), seg_point(&t, 2.0));
        let omega: BTreeSet<VertexId> = [v("0"), v("1")].into_iter().collect();
        let hop =
            lipschitz_constant(&g, &map, &omega, GraphMetric::ShortestPath, &t).unwrap();
        assert!((hop - 1.0).abs() < 1e-12);
        let ext =
            lipschitz_constant(&g, &map, &omega, GraphMetric::External(&omega), &t).unwrap();
        // the pair at infinite external distance contributes 0
        assert_eq!(ext, 0.0);
    }

    #[test]
    fn policies_agree_on_tree_targets() {
        let g = SimplicialGraph::new(
            &["a", "b", "c", "d", "e"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("b", "d")],
            false,
        )
        .unwrap();
        let t = MetricTree::new(
            &["r", "p", "q"],
            &[("r", "p", 2.0), ("r", "q", 3.0)],
        )
        .unwrap();
        let v = |s: &str| g.vertex_id(s).unwrap();
        let mut boundary = PartialVertexMap::new();
        boundary.insert(v("a"), t.vertex_point("p").unwrap());
        boundary.insert(v("e"), t.vertex_point("q").unwrap());
        let fwd = extend_inf_harmonic(&g, &boundary, &t, TiePolicy::Lexicographic).unwrap();
        let rev =
            extend_inf_harmonic(&g, &boundary, &t, TiePolicy::ReverseLexicographic).unwrap();
        for i in 0..g.vertex_count() {
            let d = t.distance(
                fwd.map.get(VertexId(i)).unwrap(),
                rev.map.get(VertexId(i)).unwrap(),
            );
            assert!(d <= 1e-9, "vertex {i} differs by {d}");
        }
    }
}
