//! Linear interpolation to the simplicial complex and verification of the
//! absolutely-minimal-Lipschitz-extension property.
//!
//! Two verification routes are provided. `is_amle_via_harmonicity` is the
//! exact certificate for tree targets: subdivide the graph, extend to the
//! midpoints by target midpoints, and test the midpoint clauses everywhere.
//! `is_amle_exhaustive` is a brute-force oracle over vertex-generated open
//! sets with sampled Lipschitz constants; it is exponential in the number of
//! free vertices and capped accordingly. The T-comparison checker is a
//! falsifier: it probes finitely many cone comparisons and can only ever
//! refute, never certify.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{GraphPoint, PartialVertexMap, SimplicialGraph, VertexId};
use crate::harmonic::is_inf_harmonic_at;
use crate::targets::{MetricTree, TargetSpace, TreePoint};

/// Open sets are enumerated over all nonempty subsets of the free vertices;
/// beyond this many free vertices the exhaustive route refuses to run.
pub const DEFAULT_OPEN_SET_CAP: usize = 14;

/// A vertex map made continuous on the complex: each edge is sent to the
/// geodesic between its endpoint images with proportional parametrization.
pub struct InterpolatedMap<'a, T: TargetSpace> {
    graph: &'a SimplicialGraph,
    map: &'a PartialVertexMap<T::Point>,
    target: &'a T,
}

impl<'a, T: TargetSpace> InterpolatedMap<'a, T> {
    pub fn new(
        graph: &'a SimplicialGraph,
        map: &'a PartialVertexMap<T::Point>,
        target: &'a T,
    ) -> Result<Self> {
        if !map.is_total_on(graph) {
            return Err(Error::input("interpolation requires a total vertex map"));
        }
        Ok(InterpolatedMap { graph, map, target })
    }

    pub fn graph(&self) -> &SimplicialGraph {
        self.graph
    }

    pub fn vertex_map(&self) -> &PartialVertexMap<T::Point> {
        self.map
    }

    pub fn target(&self) -> &T {
        self.target
    }

    /// Evaluates the interpolation at a complex point.
    pub fn eval(&self, x: &GraphPoint) -> Result<T::Point> {
        match x {
            GraphPoint::Vertex(v) => Ok(self.map.get(*v).unwrap().clone()),
            GraphPoint::Interior { u, v, offset } => self.target.geodesic_point(
                self.map.get(*u).unwrap(),
                self.map.get(*v).unwrap(),
                *offset,
            ),
        }
    }
}

/// The open set generated by a core of free vertices: the union of the
/// half-open edges incident to the core, including the core vertices.
/// Its boundary is the set of non-core endpoints of those edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexOpenSet {
    pub core: BTreeSet<VertexId>,
    pub boundary: BTreeSet<VertexId>,
}

impl VertexOpenSet {
    pub fn from_core(graph: &SimplicialGraph, core: BTreeSet<VertexId>) -> Result<Self> {
        if core.is_empty() {
            return Err(Error::input("open-set core must be nonempty"));
        }
        let mut boundary = BTreeSet::new();
        for &v in &core {
            if v.0 >= graph.vertex_count() {
                return Err(Error::input(format!("vertex id {} out of range", v.0)));
            }
            for &u in graph.neighbors(v) {
                if !core.contains(&VertexId(u)) {
                    boundary.insert(VertexId(u));
                }
            }
        }
        Ok(VertexOpenSet { core, boundary })
    }

    /// Whether a complex point belongs to the (open) set.
    pub fn contains_point(&self, p: &GraphPoint) -> bool {
        match p {
            GraphPoint::Vertex(v) => self.core.contains(v),
            GraphPoint::Interior { u, v, .. } => self.core.contains(u) || self.core.contains(v),
        }
    }
}

/// Sampled Lipschitz constant over a finite set of complex points, after
/// augmenting the set with `m` equispaced interior points on every edge both
/// of whose endpoints occur in `points` as vertex points.
pub fn lip_over_region<T: TargetSpace>(
    f: &InterpolatedMap<T>,
    points: &[GraphPoint],
    m: usize,
) -> Result<f64> {
    let graph = f.graph();
    let hops = graph.all_pairs();
    let mut samples: Vec<(GraphPoint, T::Point)> = Vec::new();
    let mut present = vec![false; graph.vertex_count()];
    for p in points {
        samples.push((*p, f.eval(p)?));
        if let GraphPoint::Vertex(v) = p {
            present[v.0] = true;
        }
    }
    for (u, v) in graph.edges_iter() {
        if u != v && present[u.0] && present[v.0] {
            for k in 1..=m {
                let offset = k as f64 / (m + 1) as f64;
                let gp = GraphPoint::on_edge(graph, u, v, offset)?;
                samples.push((gp, f.eval(&gp)?));
            }
        }
    }
    Ok(max_ratio(f.target(), &samples, &hops))
}

fn max_ratio<T: TargetSpace>(
    target: &T,
    samples: &[(GraphPoint, T::Point)],
    hops: &[Vec<u32>],
) -> f64 {
    let mut best = 0.0f64;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let d = GraphPoint::complex_distance(&samples[i].0, &samples[j].0, hops);
            if d > 1e-15 {
                let r = target.distance(&samples[i].1, &samples[j].1) / d;
                best = best.max(r);
            }
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct OpenSetViolation {
    pub set: VertexOpenSet,
    pub lip_interior: f64,
    pub lip_boundary: f64,
}

#[derive(Debug, Clone)]
pub struct ExhaustiveVerdict {
    pub amle: bool,
    pub violation: Option<OpenSetViolation>,
}

/// Shared precomputation for the subset sweep: interior samples per edge and
/// the images of everything.
struct SampleCache<P> {
    hops: Vec<Vec<u32>>,
    vertex_pts: Vec<GraphPoint>,
    vertex_vals: Vec<P>,
    /// per edge: m interior sampled points with images
    edge_samples: Vec<Vec<(GraphPoint, P)>>,
    edge_ends: Vec<(usize, usize)>,
}

fn build_cache<T: TargetSpace>(
    f: &InterpolatedMap<T>,
    m: usize,
) -> Result<SampleCache<T::Point>> {
    let graph = f.graph();
    let n = graph.vertex_count();
    let vertex_pts: Vec<GraphPoint> = (0..n).map(|i| GraphPoint::Vertex(VertexId(i))).collect();
    let mut vertex_vals = Vec::with_capacity(n);
    for p in &vertex_pts {
        vertex_vals.push(f.eval(p)?);
    }
    let mut edge_samples = Vec::new();
    let mut edge_ends = Vec::new();
    for (u, v) in graph.edges_iter() {
        if u == v {
            continue;
        }
        let mut row = Vec::with_capacity(m);
        for k in 1..=m {
            let offset = k as f64 / (m + 1) as f64;
            let gp = GraphPoint::on_edge(graph, u, v, offset)?;
            row.push((gp, f.eval(&gp)?));
        }
        edge_samples.push(row);
        edge_ends.push((u.0, v.0));
    }
    Ok(SampleCache { hops: graph.all_pairs(), vertex_pts, vertex_vals, edge_samples, edge_ends })
}

fn check_mask<T: TargetSpace>(
    target: &T,
    graph: &SimplicialGraph,
    cache: &SampleCache<T::Point>,
    free: &[usize],
    mask: u64,
    tol: f64,
) -> Result<Option<OpenSetViolation>> {
    let core: BTreeSet<VertexId> = free
        .iter()
        .enumerate()
        .filter(|(bit, _)| mask >> bit & 1 == 1)
        .map(|(_, &v)| VertexId(v))
        .collect();
    let set = VertexOpenSet::from_core(graph, core)?;

    // Lipschitz constant over the boundary vertices, hop metric.
    let boundary: Vec<usize> = set.boundary.iter().map(|v| v.0).collect();
    let mut lip_boundary = 0.0f64;
    for (i, &x) in boundary.iter().enumerate() {
        for &y in &boundary[i + 1..] {
            let d = cache.hops[x][y] as f64;
            if d > 0.0 {
                lip_boundary = lip_boundary
                    .max(target.distance(&cache.vertex_vals[x], &cache.vertex_vals[y]) / d);
            }
        }
    }

    // Sampled Lipschitz constant over the closure: core and boundary
    // vertices plus the interiors of every edge incident to the core.
    let mut samples: Vec<(&GraphPoint, &T::Point)> = Vec::new();
    for &v in set.core.iter().chain(set.boundary.iter()) {
        samples.push((&cache.vertex_pts[v.0], &cache.vertex_vals[v.0]));
    }
    for (ei, &(u, v)) in cache.edge_ends.iter().enumerate() {
        if set.core.contains(&VertexId(u)) || set.core.contains(&VertexId(v)) {
            for (gp, val) in &cache.edge_samples[ei] {
                samples.push((gp, val));
            }
        }
    }
    let mut lip_interior = 0.0f64;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let d = GraphPoint::complex_distance(samples[i].0, samples[j].0, &cache.hops);
            if d > 1e-15 {
                let r = target.distance(samples[i].1, samples[j].1) / d;
                lip_interior = lip_interior.max(r);
            }
        }
    }

    if lip_interior > lip_boundary + tol {
        Ok(Some(OpenSetViolation { set, lip_interior, lip_boundary }))
    } else {
        Ok(None)
    }
}

/// Brute-force oracle: sweeps every nonempty vertex-generated open set with
/// core inside the free vertices and compares the sampled interior Lipschitz
/// constant against the boundary one. Deterministic first violation in
/// subset-mask order regardless of parallelism.
///
/// Vertex-generated sets diagnose every midpoint-clause failure on
/// triangle-free graphs; to audit an arbitrary map on a graph with
/// triangles, run the oracle on its subdivision.
pub fn is_amle_exhaustive<T>(
    f: &InterpolatedMap<T>,
    omega: &BTreeSet<VertexId>,
    m: usize,
    tol: f64,
    cap: usize,
) -> Result<ExhaustiveVerdict>
where
    T: TargetSpace + Sync,
{
    let graph = f.graph();
    if omega.is_empty() {
        return Err(Error::input("boundary set must be nonempty"));
    }
    let free: Vec<usize> =
        (0..graph.vertex_count()).filter(|&i| !omega.contains(&VertexId(i))).collect();
    if free.is_empty() {
        return Ok(ExhaustiveVerdict { amle: true, violation: None });
    }
    if free.len() > cap {
        return Err(Error::input(format!(
            "{} free vertices exceed the exhaustive cap of {cap}; use the harmonicity route",
            free.len()
        )));
    }
    let cache = build_cache(f, m)?;
    let total: u64 = (1u64 << free.len()) - 1;

    type ScanHit = Option<(u64, OpenSetViolation)>;
    let scan_range = |lo: u64, hi: u64| -> Result<ScanHit> {
        for mask in lo..=hi {
            if let Some(v) = check_mask(f.target(), graph, &cache, &free, mask, tol)? {
                return Ok(Some((mask, v)));
            }
        }
        Ok(None)
    };

    #[cfg(feature = "parallel")]
    let first: Option<(u64, OpenSetViolation)> = {
        use rayon::prelude::*;
        let chunk: u64 = 512;
        let ranges: Vec<(u64, u64)> =
            (1..=total).step_by(chunk as usize).map(|lo| (lo, (lo + chunk - 1).min(total))).collect();
        let hits: Vec<ScanHit> = ranges
            .into_par_iter()
            .map(|(lo, hi)| scan_range(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        hits.into_iter().flatten().min_by_key(|(mask, _)| *mask)
    };
    #[cfg(not(feature = "parallel"))]
    let first: Option<(u64, OpenSetViolation)> = scan_range(1, total)?;

    Ok(match first {
        Some((_, v)) => ExhaustiveVerdict { amle: false, violation: Some(v) },
        None => ExhaustiveVerdict { amle: true, violation: None },
    })
}

/// Sequential twin of [`is_amle_exhaustive`], always available; the parallel
/// entry point must agree with it bit for bit.
pub fn is_amle_exhaustive_seq<T: TargetSpace>(
    f: &InterpolatedMap<T>,
    omega: &BTreeSet<VertexId>,
    m: usize,
    tol: f64,
    cap: usize,
) -> Result<ExhaustiveVerdict> {
    let graph = f.graph();
    if omega.is_empty() {
        return Err(Error::input("boundary set must be nonempty"));
    }
    let free: Vec<usize> =
        (0..graph.vertex_count()).filter(|&i| !omega.contains(&VertexId(i))).collect();
    if free.is_empty() {
        return Ok(ExhaustiveVerdict { amle: true, violation: None });
    }
    if free.len() > cap {
        return Err(Error::input(format!(
            "{} free vertices exceed the exhaustive cap of {cap}; use the harmonicity route",
            free.len()
        )));
    }
    let cache = build_cache(f, m)?;
    let total: u64 = (1u64 << free.len()) - 1;
    for mask in 1..=total {
        if let Some(v) = check_mask(f.target(), graph, &cache, &free, mask, tol)? {
            return Ok(ExhaustiveVerdict { amle: false, violation: Some(v) });
        }
    }
    Ok(ExhaustiveVerdict { amle: true, violation: None })
}

/// Exact certificate for tree targets: subdivide the graph, give each
/// midpoint the target midpoint of its endpoint images, and test the
/// midpoint clauses at every non-boundary vertex of the subdivision. A
/// passing run certifies the interpolation is an AMLE of the boundary data.
pub fn is_amle_via_harmonicity(
    graph: &SimplicialGraph,
    omega: &BTreeSet<VertexId>,
    map: &PartialVertexMap<TreePoint>,
    target: &MetricTree,
    tol: f64,
) -> Result<bool> {
    if !map.is_total_on(graph) {
        return Err(Error::input("harmonicity certification requires a total vertex map"));
    }
    let (sub, midpoints) = graph.subdivide()?;
    let mut submap: PartialVertexMap<TreePoint> = PartialVertexMap::new();
    for (v, p) in map.iter() {
        submap.insert(sub.vertex_id(graph.vertex_name(v))?, *p);
    }
    for ((u, v), mid_name) in &midpoints {
        let mid = target.geodesic_point(map.get(*u).unwrap(), map.get(*v).unwrap(), 0.5)?;
        submap.insert(sub.vertex_id(mid_name)?, mid);
    }
    let omega_names: BTreeSet<&str> =
        omega.iter().map(|&v| graph.vertex_name(v)).collect();
    for name in sub.vertex_names() {
        if omega_names.contains(name) {
            continue;
        }
        let check = is_inf_harmonic_at(&sub, &submap, target, sub.vertex_id(name)?, tol)?;
        if !check.harmonic {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One cone-comparison probe: the function `x ↦ d_T(t, F(x))` is compared
/// against `x ↦ b·d(x, z) + c` on the open set `W`.
#[derive(Debug, Clone)]
pub struct ComparisonProbe {
    pub anchor: TreePoint,
    pub cone_base: GraphPoint,
    pub slope: f64,
    pub intercept: f64,
    pub region: VertexOpenSet,
}

#[derive(Debug, Clone)]
pub struct ComparisonViolation {
    pub probe_index: usize,
    pub point: GraphPoint,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct ComparisonVerdict {
    pub passed: bool,
    pub violation: Option<ComparisonViolation>,
}

/// Checks each probe: when the cone dominates `d_T(t, F(·))` at every
/// sampled boundary point of `W`, it must dominate at every sampled interior
/// point. This is a falsifier — finitely many probes can refute the
/// comparison property but never certify it.
pub fn t_comparison_check(
    f: &InterpolatedMap<MetricTree>,
    probes: &[ComparisonProbe],
    m: usize,
    tol: f64,
) -> Result<ComparisonVerdict> {
    let graph = f.graph();
    let hops = graph.all_pairs();
    for (idx, probe) in probes.iter().enumerate() {
        if probe.region.contains_point(&probe.cone_base) {
            return Err(Error::input(format!(
                "probe {idx}: cone base lies inside the probed region"
            )));
        }
        let cone = |x: &GraphPoint| {
            probe.slope * GraphPoint::complex_distance(x, &probe.cone_base, &hops)
                + probe.intercept
        };
        // boundary first
        let mut dominated = true;
        for &v in &probe.region.boundary {
            let x = GraphPoint::Vertex(v);
            let lhs = f.target().distance(&probe.anchor, &f.eval(&x)?);
            if lhs > cone(&x) + tol {
                dominated = false;
                break;
            }
        }
        if !dominated {
            continue; // vacuous probe
        }
        // interior samples: core vertices plus incident edge interiors
        let mut interior: Vec<GraphPoint> =
            probe.region.core.iter().map(|&v| GraphPoint::Vertex(v)).collect();
        for (u, v) in graph.edges_iter() {
            if u != v
                && (probe.region.core.contains(&u) || probe.region.core.contains(&v))
            {
                for k in 1..=m {
                    interior.push(GraphPoint::on_edge(graph, u, v, k as f64 / (m + 1) as f64)?);
                }
            }
        }
        for x in &interior {
            let lhs = f.target().distance(&probe.anchor, &f.eval(x)?);
            let rhs = cone(x);
            if lhs > rhs + tol {
                return Ok(ComparisonVerdict {
                    passed: false,
                    violation: Some(ComparisonViolation {
                        probe_index: idx,
                        point: *x,
                        lhs,
                        rhs,
                    }),
                });
            }
        }
    }
    Ok(ComparisonVerdict { passed: true, violation: None })
}

/// Default probe family: anchors range over tree vertices and boundary
/// images, cone bases over vertices outside the region, regions over
/// single-vertex cores and the full free set, and `(b, c)` is fitted as the
/// tightest cone dominating the boundary samples (smallest maximal slack,
/// then smallest slope).
pub fn default_probes(
    f: &InterpolatedMap<MetricTree>,
    omega: &BTreeSet<VertexId>,
) -> Result<Vec<ComparisonProbe>> {
    let graph = f.graph();
    let target = f.target();
    let hops = graph.all_pairs();
    let n = graph.vertex_count();
    let free: Vec<usize> = (0..n).filter(|&i| !omega.contains(&VertexId(i))).collect();
    if free.is_empty() {
        return Ok(Vec::new());
    }
    let mut anchors: Vec<TreePoint> =
        (0..target.vertex_count()).map(|i| TreePoint::Vertex(crate::targets::TreeVertexId(i))).collect();
    for &v in omega {
        let img = f.eval(&GraphPoint::Vertex(v))?;
        if !anchors.contains(&img) {
            anchors.push(img);
        }
    }
    let mut cores: Vec<BTreeSet<VertexId>> =
        free.iter().map(|&v| BTreeSet::from([VertexId(v)])).collect();
    if free.len() > 1 {
        cores.push(free.iter().map(|&v| VertexId(v)).collect());
    }

    let mut probes = Vec::new();
    for core in cores {
        let region = VertexOpenSet::from_core(graph, core)?;
        for anchor in &anchors {
            for z in 0..n {
                let zv = VertexId(z);
                if region.core.contains(&zv) {
                    continue;
                }
                let base = GraphPoint::Vertex(zv);
                // boundary samples
                let mut samples: Vec<(f64, f64)> = Vec::new();
                for &b in &region.boundary {
                    let x = GraphPoint::Vertex(b);
                    let g = target.distance(anchor, &f.eval(&x)?);
                    let d = GraphPoint::complex_distance(&x, &base, &hops);
                    samples.push((d, g));
                }
                if samples.is_empty() {
                    continue;
                }
                let (slope, intercept) = fit_tightest_cone(&samples);
                probes.push(ComparisonProbe {
                    anchor: *anchor,
                    cone_base: base,
                    slope,
                    intercept,
                    region: region.clone(),
                });
            }
        }
    }
    Ok(probes)
}

/// Tightest dominating line over `(d_i, g_i)` pairs: candidate slopes are 0
/// and all nonnegative pairwise difference quotients; the intercept is the
/// smallest making the line dominate; tightness is the smallest maximal
/// slack, ties toward the smaller slope.
fn fit_tightest_cone(samples: &[(f64, f64)]) -> (f64, f64) {
    let mut slopes = vec![0.0f64];
    for (i, &(di, gi)) in samples.iter().enumerate() {
        for &(dj, gj) in &samples[i + 1..] {
            if (di - dj).abs() > 1e-12 {
                let s = (gi - gj) / (di - dj);
                if s > 0.0 && s.is_finite() {
                    slopes.push(s);
                }
            }
        }
    }
    let mut best: Option<(f64, f64, f64)> = None; // (max_slack, slope, intercept)
    for &b in &slopes {
        let c = samples.iter().map(|&(d, g)| g - b * d).fold(f64::NEG_INFINITY, f64::max);
        let slack = samples.iter().map(|&(d, g)| b * d + c - g).fold(0.0, f64::max);
        match best {
            Some((s0, b0, _)) if (slack, b) >= (s0, b0) => {}
            _ => best = Some((slack, b, c)),
        }
    }
    let (_, b, c) = best.unwrap();
    (b, c)
}
