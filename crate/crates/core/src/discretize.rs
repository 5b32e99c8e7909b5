//! ε-nets of a length space, the induced graphs, extension on the net, and
//! convergence studies of the resulting approximate extensions.
//!
//! A net `Λ_ε` covers the space and its boundary set with ε-balls; two net
//! points are adjacent in `G_ε` when their distance is at most `√ε`; a
//! maximal `√ε`-separated subnet carries the evaluation map, which assigns
//! to any point the extension value at its nearest subnet point. As ε
//! shrinks, the evaluation converges uniformly to the exact extension.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{PartialVertexMap, SimplicialGraph, VertexId};
use crate::harmonic::{extend_inf_harmonic, TiePolicy};
use crate::targets::{MetricTree, TreePoint};
use crate::GEOM_TOL;

/// Boundary datum attached to a point of a domain.
pub type BoundaryValueFn<P> = Box<dyn Fn(&P) -> TreePoint + Send + Sync>;

/// Exact extension used as the reference of a convergence study.
pub type ReferenceFn<'a, P> = &'a (dyn Fn(&P) -> TreePoint + Sync);

/// A compact metric space the pipeline can discretize. `sample_net` must
/// return points covering the space (and its boundary set by boundary
/// points) within ε, in a deterministic order; closed balls are meant.
pub trait LengthSpace: Sync {
    type Point: Clone + PartialEq + std::fmt::Debug + Send + Sync;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;

    fn sample_net(&self, eps: f64) -> Result<Vec<Self::Point>>;

    /// Whether a point belongs to the boundary data set.
    fn in_boundary(&self, x: &Self::Point) -> bool;

    /// Boundary datum at a boundary point.
    fn boundary_value(&self, x: &Self::Point) -> Result<TreePoint>;

    /// A dense probe set used to audit the covering property and to measure
    /// sup errors; `resolution` scales its density.
    fn probe_points(&self, resolution: usize) -> Vec<Self::Point>;

    fn diameter_bound(&self) -> f64;
}

/// The ε-net with its graph and back-references into the space.
pub struct NetGraph<P> {
    pub eps: f64,
    pub points: Vec<P>,
    pub graph: SimplicialGraph,
    /// flags for membership in the boundary part of the net
    pub boundary: Vec<bool>,
    /// indices of the maximal `√ε`-separated subnet, ascending
    pub subnet: Vec<usize>,
}

fn net_vertex_name(i: usize) -> String {
    format!("n{i:06}")
}

/// Builds `Λ_ε`, `G_ε`, and the greedy maximal subnet. Fails when ε is out
/// of range, the boundary loses all its net points, or the net graph comes
/// out disconnected (ε too large relative to the geometry).
pub fn build_net<L: LengthSpace>(space: &L, eps: f64) -> Result<NetGraph<L::Point>> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::input(format!("eps {eps} outside (0, 1/4)")));
    }
    let points = space.sample_net(eps)?;
    if points.is_empty() {
        return Err(Error::input("empty net"));
    }
    let boundary: Vec<bool> = points.iter().map(|p| space.in_boundary(p)).collect();
    if !boundary.iter().any(|&b| b) {
        return Err(Error::input("net contains no boundary points; boundary data would be lost"));
    }
    let sqrt_eps = eps.sqrt();
    let names: Vec<String> = (0..points.len()).map(net_vertex_name).collect();
    let mut edges: Vec<(String, String)> = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if space.distance(&points[i], &points[j]) <= sqrt_eps {
                edges.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    let graph = SimplicialGraph::new(&names, &edges, false).map_err(|_| {
        Error::input(format!("net graph at eps {eps} is disconnected; eps too large for the geometry"))
    })?;
    let mut subnet: Vec<usize> = Vec::new();
    for i in 0..points.len() {
        if subnet.iter().all(|&j| space.distance(&points[i], &points[j]) >= sqrt_eps) {
            subnet.push(i);
        }
    }
    Ok(NetGraph { eps, points, graph, boundary, subnet })
}

/// Audits the covering property against a dense probe set: every probe must
/// sit within ε of a net point, and every boundary probe within ε of a
/// boundary net point.
pub fn covering_defect<L: LengthSpace>(
    space: &L,
    net: &NetGraph<L::Point>,
    probes: &[L::Point],
) -> f64 {
    let mut worst: f64 = 0.0;
    for p in probes {
        let near = net
            .points
            .iter()
            .map(|q| space.distance(p, q))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(near);
        if space.in_boundary(p) {
            let near_boundary = net
                .points
                .iter()
                .zip(&net.boundary)
                .filter(|(_, &b)| b)
                .map(|(q, _)| space.distance(p, q))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(near_boundary);
        }
    }
    worst
}

#[derive(Debug, Clone)]
pub struct MetricApproxReport {
    /// `max |d_G(x,y)·√ε − d_X(x,y)|` over the sampled pairs.
    pub max_discrepancy: f64,
    /// the same maximum divided by `√ε`
    pub implied_constant: f64,
}

/// Compares the rescaled net-graph metric against the space metric over the
/// given pairs of net indices.
pub fn metric_approx_error<L: LengthSpace>(
    space: &L,
    net: &NetGraph<L::Point>,
    pairs: &[(usize, usize)],
) -> Result<MetricApproxReport> {
    let sqrt_eps = net.eps.sqrt();
    let mut sources: Vec<usize> = pairs.iter().map(|&(a, _)| a).collect();
    sources.sort_unstable();
    sources.dedup();
    let mut max_discrepancy: f64 = 0.0;
    for &src in &sources {
        let hops = net.graph.bfs_from(VertexId(src));
        for &(a, b) in pairs.iter().filter(|&&(a, _)| a == src) {
            if hops[b] == u32::MAX {
                return Err(Error::input("net graph is disconnected"));
            }
            let approx = hops[b] as f64 * sqrt_eps;
            let exact = space.distance(&net.points[a], &net.points[b]);
            max_discrepancy = max_discrepancy.max((approx - exact).abs());
        }
    }
    Ok(MetricApproxReport { max_discrepancy, implied_constant: max_discrepancy / sqrt_eps })
}

/// All unordered subnet pairs, a canonical deterministic sample.
pub fn subnet_pairs<P>(net: &NetGraph<P>) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &a) in net.subnet.iter().enumerate() {
        for &b in &net.subnet[i + 1..] {
            out.push((a, b));
        }
    }
    out
}

/// Pairs over an even stride of at most `max_points` net points — a
/// deterministic sample that stays informative even when the subnet
/// degenerates to a single point at coarse ε.
pub fn stride_pairs<P>(net: &NetGraph<P>, max_points: usize) -> Vec<(usize, usize)> {
    let n = net.points.len();
    let step = n.div_ceil(max_points.max(2));
    let picks: Vec<usize> = (0..n).step_by(step.max(1)).collect();
    let mut out = Vec::new();
    for (i, &a) in picks.iter().enumerate() {
        for &b in &picks[i + 1..] {
            out.push((a, b));
        }
    }
    out
}

/// The extension over the net, together with the observed Lipschitz data
/// behind the net Lipschitz bound.
pub struct NetExtension {
    /// extension value at each net point
    pub values: Vec<TreePoint>,
    /// Lipschitz constant of the boundary data w.r.t. the space metric
    pub boundary_lip: f64,
    /// Lipschitz constant of the extension over the subnet w.r.t. the space metric
    pub subnet_lip: f64,
    /// observed metric-approximation constant over the subnet pairs
    pub observed_constant: f64,
}

/// Extends the boundary data over the net graph and verifies the net
/// Lipschitz bound: over the subnet, the extension is Lipschitz with
/// constant at most `Lip_Y(f) · (1 + C)` for the observed metric constant C.
pub fn approximate_amle<L: LengthSpace>(
    space: &L,
    net: &NetGraph<L::Point>,
    target: &MetricTree,
) -> Result<NetExtension> {
    let mut boundary_map = PartialVertexMap::new();
    let mut boundary_idx = Vec::new();
    for (i, flag) in net.boundary.iter().enumerate() {
        if *flag {
            boundary_map.insert(VertexId(i), space.boundary_value(&net.points[i])?);
            boundary_idx.push(i);
        }
    }
    let ext = extend_inf_harmonic(&net.graph, &boundary_map, target, TiePolicy::Lexicographic)?;
    let values: Vec<TreePoint> =
        (0..net.points.len()).map(|i| *ext.map.get(VertexId(i)).unwrap()).collect();

    let mut boundary_lip: f64 = 0.0;
    for (i, &a) in boundary_idx.iter().enumerate() {
        for &b in &boundary_idx[i + 1..] {
            let dx = space.distance(&net.points[a], &net.points[b]);
            if dx > GEOM_TOL {
                boundary_lip = boundary_lip.max(target.distance(&values[a], &values[b]) / dx);
            }
        }
    }
    let pairs = subnet_pairs(net);
    let report = metric_approx_error(space, net, &pairs)?;
    let mut subnet_lip: f64 = 0.0;
    for &(a, b) in &pairs {
        let dx = space.distance(&net.points[a], &net.points[b]);
        if dx > GEOM_TOL {
            subnet_lip = subnet_lip.max(target.distance(&values[a], &values[b]) / dx);
        }
    }
    let bound = boundary_lip * (1.0 + report.implied_constant) + GEOM_TOL;
    if subnet_lip > bound {
        return Err(Error::invariant(format!(
            "net Lipschitz bound violated: {subnet_lip} > {bound}"
        )));
    }
    Ok(NetExtension {
        values,
        boundary_lip,
        subnet_lip,
        observed_constant: report.implied_constant,
    })
}

/// The evaluation map: the extension value at the nearest subnet point
/// (lowest index on ties).
pub fn evaluate_nearest<L: LengthSpace>(
    space: &L,
    net: &NetGraph<L::Point>,
    ext: &NetExtension,
    x: &L::Point,
) -> TreePoint {
    let mut best = (f64::INFINITY, usize::MAX);
    for &i in &net.subnet {
        let d = space.distance(x, &net.points[i]);
        if d < best.0 {
            best = (d, i);
        }
    }
    ext.values[best.1]
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub net_size: usize,
    pub metric_discrepancy: f64,
    pub lip_bound: f64,
    /// sup distance to the reference, or to the previous ε when no
    /// reference is supplied (absent on the first row in that mode)
    pub sup_error: Option<f64>,
}

/// Runs the pipeline across a decreasing ε schedule. With a reference
/// function the sup error against it is reported per ε; otherwise
/// successive sup differences serve as a Cauchy diagnostic.
pub fn convergence_report<L: LengthSpace>(
    space: &L,
    target: &MetricTree,
    eps_list: &[f64],
    probe_resolution: usize,
    reference: Option<ReferenceFn<L::Point>>,
) -> Result<Vec<ConvergenceRow>> {
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::input("eps schedule must be strictly decreasing"));
    }
    let probes = space.probe_points(probe_resolution);
    let mut rows = Vec::new();
    let mut previous: Option<Vec<TreePoint>> = None;
    for &eps in eps_list {
        let net = build_net(space, eps)?;
        let ext = approximate_amle(space, &net, target)?;
        let evals: Vec<TreePoint> =
            probes.iter().map(|p| evaluate_nearest(space, &net, &ext, p)).collect();
        let report = metric_approx_error(space, &net, &stride_pairs(&net, 40))?;
        let sup_error = match (&reference, &previous) {
            (Some(f), _) => Some(
                probes
                    .iter()
                    .zip(&evals)
                    .map(|(p, v)| target.distance(&f(p), v))
                    .fold(0.0, f64::max),
            ),
            (None, Some(prev)) => Some(
                prev.iter().zip(&evals).map(|(a, b)| target.distance(a, b)).fold(0.0, f64::max),
            ),
            (None, None) => None,
        };
        rows.push(ConvergenceRow {
            eps,
            net_size: net.points.len(),
            metric_discrepancy: report.max_discrepancy,
            lip_bound: ext.subnet_lip,
            sup_error,
        });
        previous = Some(evals);
    }
    Ok(rows)
}

pub fn report_to_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("eps,net_size,metric_discrepancy,lip_bound,sup_error_or_cauchy\n");
    for r in rows {
        let err = r.sup_error.map(|e| e.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.eps, r.net_size, r.metric_discrepancy, r.lip_bound, err
        ));
    }
    out
}

/// The unit interval-style domain `[a, b]` with finitely many boundary
/// points.
pub struct IntervalDomain {
    a: f64,
    b: f64,
    boundary: Vec<f64>,
    value: IntervalValueFn,
}

/// Boundary datum on the line, taken by value.
pub type IntervalValueFn = Box<dyn Fn(f64) -> TreePoint + Send + Sync>;

impl IntervalDomain {
    pub fn new(a: f64, b: f64, boundary: Vec<f64>, value: IntervalValueFn) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::input("interval needs finite a < b"));
        }
        for &y in &boundary {
            if !(a - GEOM_TOL..=b + GEOM_TOL).contains(&y) {
                return Err(Error::input(format!("boundary point {y} outside [{a}, {b}]")));
            }
        }
        if boundary.is_empty() {
            return Err(Error::input("boundary set must be nonempty"));
        }
        Ok(IntervalDomain { a, b, boundary, value })
    }
}

impl LengthSpace for IntervalDomain {
    type Point = f64;

    fn distance(&self, x: &f64, y: &f64) -> f64 {
        (x - y).abs()
    }

    fn sample_net(&self, eps: f64) -> Result<Vec<f64>> {
        let steps = ((self.b - self.a) / eps).ceil().max(1.0) as usize;
        let mut pts: Vec<f64> =
            (0..=steps).map(|i| self.a + (self.b - self.a) * i as f64 / steps as f64).collect();
        pts.extend(self.boundary.iter().copied());
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);
        Ok(pts)
    }

    fn in_boundary(&self, x: &f64) -> bool {
        self.boundary.iter().any(|y| (x - y).abs() <= GEOM_TOL)
    }

    fn boundary_value(&self, x: &f64) -> Result<TreePoint> {
        if !self.in_boundary(x) {
            return Err(Error::input(format!("{x} is not a boundary point")));
        }
        Ok((self.value)(*x))
    }

    fn probe_points(&self, resolution: usize) -> Vec<f64> {
        let k = resolution.max(1);
        let mut pts: Vec<f64> =
            (0..=k).map(|i| self.a + (self.b - self.a) * i as f64 / k as f64).collect();
        pts.extend(self.boundary.iter().copied());
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);
        pts
    }

    fn diameter_bound(&self) -> f64 {
        self.b - self.a
    }
}

/// An axis-aligned rectangle with intrinsic (= Euclidean) metric, whose
/// boundary set is a union of perimeter arcs and isolated points. Arcs are
/// intervals of the counterclockwise perimeter parameter starting at the
/// lower-left corner.
pub struct RectDomain {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    arcs: Vec<(f64, f64)>,
    points: Vec<[f64; 2]>,
    value: BoundaryValueFn<[f64; 2]>,
}

impl RectDomain {
    pub fn new(
        bounds: [f64; 4],
        arcs: Vec<(f64, f64)>,
        points: Vec<[f64; 2]>,
        value: BoundaryValueFn<[f64; 2]>,
    ) -> Result<Self> {
        let [x0, y0, x1, y1] = bounds;
        if !(x0 < x1 && y0 < y1) {
            return Err(Error::input("rectangle needs x0 < x1 and y0 < y1"));
        }
        let dom = RectDomain { x0, y0, x1, y1, arcs, points, value };
        let perim = dom.perimeter();
        for &(t0, t1) in &dom.arcs {
            if !(0.0 <= t0 && t0 < t1 && t1 <= perim + GEOM_TOL) {
                return Err(Error::input(format!("bad arc ({t0}, {t1}); perimeter is {perim}")));
            }
        }
        if dom.arcs.is_empty() && dom.points.is_empty() {
            return Err(Error::input("boundary set must be nonempty"));
        }
        Ok(dom)
    }

    /// Boundary data along the full perimeter.
    pub fn with_full_boundary(bounds: [f64; 4], value: BoundaryValueFn<[f64; 2]>) -> Result<Self> {
        let [x0, y0, x1, y1] = bounds;
        let perim = 2.0 * ((x1 - x0) + (y1 - y0));
        RectDomain::new(bounds, vec![(0.0, perim)], Vec::new(), value)
    }

    fn perimeter(&self) -> f64 {
        2.0 * ((self.x1 - self.x0) + (self.y1 - self.y0))
    }

    fn param_to_point(&self, t: f64) -> [f64; 2] {
        let w = self.x1 - self.x0;
        let h = self.y1 - self.y0;
        let t = t.rem_euclid(self.perimeter());
        if t < w {
            [self.x0 + t, self.y0]
        } else if t < w + h {
            [self.x1, self.y0 + (t - w)]
        } else if t < 2.0 * w + h {
            [self.x1 - (t - w - h), self.y1]
        } else {
            [self.x0, self.y1 - (t - 2.0 * w - h)]
        }
    }

    fn point_to_param(&self, p: &[f64; 2]) -> Option<f64> {
        let w = self.x1 - self.x0;
        let h = self.y1 - self.y0;
        let [x, y] = *p;
        if (y - self.y0).abs() <= GEOM_TOL && (self.x0..=self.x1).contains(&x) {
            Some(x - self.x0)
        } else if (x - self.x1).abs() <= GEOM_TOL && (self.y0..=self.y1).contains(&y) {
            Some(w + (y - self.y0))
        } else if (y - self.y1).abs() <= GEOM_TOL && (self.x0..=self.x1).contains(&x) {
            Some(w + h + (self.x1 - x))
        } else if (x - self.x0).abs() <= GEOM_TOL && (self.y0..=self.y1).contains(&y) {
            Some(2.0 * w + h + (self.y1 - y))
        } else {
            None
        }
    }
}

impl LengthSpace for RectDomain {
    type Point = [f64; 2];

    fn distance(&self, x: &[f64; 2], y: &[f64; 2]) -> f64 {
        ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt()
    }

    fn sample_net(&self, eps: f64) -> Result<Vec<[f64; 2]>> {
        let w = self.x1 - self.x0;
        let h = self.y1 - self.y0;
        let nx = (w / eps).ceil().max(1.0) as usize;
        let ny = (h / eps).ceil().max(1.0) as usize;
        let mut pts: Vec<[f64; 2]> = Vec::new();
        for i in 0..=nx {
            for j in 0..=ny {
                pts.push([
                    self.x0 + w * i as f64 / nx as f64,
                    self.y0 + h * j as f64 / ny as f64,
                ]);
            }
        }
        for &(t0, t1) in &self.arcs {
            let k = ((t1 - t0) / eps).ceil().max(1.0) as usize;
            for j in 0..=k {
                pts.push(self.param_to_point(t0 + (t1 - t0) * j as f64 / k as f64));
            }
        }
        pts.extend(self.points.iter().copied());
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup_by(|a, b| (a[0] - b[0]).abs() <= 1e-12 && (a[1] - b[1]).abs() <= 1e-12);
        Ok(pts)
    }

    fn in_boundary(&self, p: &[f64; 2]) -> bool {
        if self.points.iter().any(|q| self.distance(p, q) <= GEOM_TOL) {
            return true;
        }
        match self.point_to_param(p) {
            Some(t) => self
                .arcs
                .iter()
                .any(|&(t0, t1)| t >= t0 - GEOM_TOL && t <= t1 + GEOM_TOL),
            None => false,
        }
    }

    fn boundary_value(&self, p: &[f64; 2]) -> Result<TreePoint> {
        if !self.in_boundary(p) {
            return Err(Error::input(format!("({}, {}) is not a boundary point", p[0], p[1])));
        }
        Ok((self.value)(p))
    }

    fn probe_points(&self, resolution: usize) -> Vec<[f64; 2]> {
        let k = resolution.max(2);
        let w = self.x1 - self.x0;
        let h = self.y1 - self.y0;
        let mut pts = Vec::with_capacity((k + 1) * (k + 1));
        for i in 0..=k {
            for j in 0..=k {
                pts.push([
                    self.x0 + w * i as f64 / k as f64,
                    self.y0 + h * j as f64 / k as f64,
                ]);
            }
        }
        for j in 0..4 * k {
            pts.push(self.param_to_point(self.perimeter() * j as f64 / (4 * k) as f64));
        }
        pts.extend(self.points.iter().copied());
        pts
    }

    fn diameter_bound(&self) -> f64 {
        self.distance(&[self.x0, self.y0], &[self.x1, self.y1])
    }
}

/// The vertex skeleton of a graph complex, rescaled so the pipeline can be
/// cross-validated against the direct extension. With `scale = √ε` the net
/// graph reproduces the original graph exactly — vertex order, edges, and
/// boundary data — so the net extension agrees with the direct one bit for
/// bit, and the whole vertex set is its own maximal subnet.
pub struct GraphComplexDomain {
    graph: SimplicialGraph,
    scale: f64,
    omega: BTreeSet<VertexId>,
    values: PartialVertexMap<TreePoint>,
    hops: Vec<Vec<u32>>,
}

impl GraphComplexDomain {
    pub fn new(
        graph: SimplicialGraph,
        scale: f64,
        omega: BTreeSet<VertexId>,
        values: PartialVertexMap<TreePoint>,
    ) -> Result<Self> {
        if graph.has_any_self_loop() {
            return Err(Error::input("graph domain must not have self-loops"));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::input("scale must be positive"));
        }
        if omega.is_empty() {
            return Err(Error::input("boundary set must be nonempty"));
        }
        for v in &omega {
            if values.get(*v).is_none() {
                return Err(Error::input(format!(
                    "boundary vertex {:?} has no value",
                    graph.vertex_name(*v)
                )));
            }
        }
        let hops = graph.all_pairs();
        Ok(GraphComplexDomain { graph, scale, omega, values, hops })
    }

    /// The scale at which the ε-net of this domain is the graph itself.
    pub fn matching_scale(eps: f64) -> f64 {
        eps.sqrt()
    }

    pub fn graph(&self) -> &SimplicialGraph {
        &self.graph
    }
}

impl LengthSpace for GraphComplexDomain {
    type Point = usize;

    fn distance(&self, x: &usize, y: &usize) -> f64 {
        self.scale * self.hops[*x][*y] as f64
    }

    fn sample_net(&self, _eps: f64) -> Result<Vec<usize>> {
        Ok((0..self.graph.vertex_count()).collect())
    }

    fn in_boundary(&self, x: &usize) -> bool {
        self.omega.contains(&VertexId(*x))
    }

    fn boundary_value(&self, x: &usize) -> Result<TreePoint> {
        self.values
            .get(VertexId(*x))
            .copied()
            .ok_or_else(|| Error::input(format!("vertex {x} carries no boundary value")))
    }

    fn probe_points(&self, _resolution: usize) -> Vec<usize> {
        (0..self.graph.vertex_count()).collect()
    }

    fn diameter_bound(&self) -> f64 {
        let mut best = 0u32;
        for row in &self.hops {
            for &d in row {
                best = best.max(d);
            }
        }
        self.scale * best as f64
    }
}
