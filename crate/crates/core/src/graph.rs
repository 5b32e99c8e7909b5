//! Finite connected graphs as combinatorial objects and as unit-edge-length
//! simplicial complexes, plus the external-path distances used by the
//! extension algorithm.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::SNAP_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Hop distance that may be infinite. The infinite case is a distinguished
/// variant, never a large finite number, so arithmetic with it cannot
/// silently overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopDistance {
    Finite(u32),
    Infinite,
}

impl HopDistance {
    pub fn finite(self) -> Option<u32> {
        match self {
            HopDistance::Finite(d) => Some(d),
            HopDistance::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, HopDistance::Finite(_))
    }
}

/// A finite connected graph with lexicographically ordered opaque string
/// identifiers. Vertex ids follow the lexicographic name order, so every
/// index-based tie-break in the crate is reproducible. Self-loops are
/// permitted only when flagged (they are meaningful for the game module but
/// carry no geometry).
#[derive(Debug, Clone)]
pub struct SimplicialGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    /// sorted unordered pairs (u <= v), lexicographic order; self-loops as (v, v)
    edges: Vec<(usize, usize)>,
    /// neighbor lists excluding self, ascending
    adj: Vec<Vec<usize>>,
    self_loop: Vec<bool>,
    allow_self_loops: bool,
}

impl SimplicialGraph {
    pub fn new<S: AsRef<str>>(
        vertices: &[S],
        edges: &[(S, S)],
        allow_self_loops: bool,
    ) -> Result<Self> {
        let mut names: Vec<String> = vertices.iter().map(|s| s.as_ref().to_owned()).collect();
        names.sort();
        names.dedup();
        if names.len() != vertices.len() {
            return Err(Error::input("duplicate vertex identifiers"));
        }
        if names.is_empty() {
            return Err(Error::input("graph must have at least one vertex"));
        }
        let index: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let n = names.len();
        let mut pairs = BTreeSet::new();
        let mut self_loop = vec![false; n];
        for (u, v) in edges {
            let iu = *index
                .get(u.as_ref())
                .ok_or_else(|| Error::input(format!("unknown vertex {:?}", u.as_ref())))?;
            let iv = *index
                .get(v.as_ref())
                .ok_or_else(|| Error::input(format!("unknown vertex {:?}", v.as_ref())))?;
            if iu == iv {
                if !allow_self_loops {
                    return Err(Error::input(format!(
                        "self-loop at {:?} but self-loops are not allowed here",
                        u.as_ref()
                    )));
                }
                self_loop[iu] = true;
                pairs.insert((iu, iu));
            } else {
                pairs.insert((iu.min(iv), iu.max(iv)));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &pairs {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = SimplicialGraph {
            names,
            index,
            edges: pairs.into_iter().collect(),
            adj,
            self_loop,
            allow_self_loops,
        };
        if !g.is_connected() {
            return Err(Error::input("graph is not connected"));
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let n = self.names.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
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

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_id(&self, name: &str) -> Result<VertexId> {
        self.index
            .get(name)
            .map(|&i| VertexId(i))
            .ok_or_else(|| Error::input(format!("unknown vertex {name:?}")))
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn vertex_names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|s| s.as_str())
    }

    /// Neighbors of `v`, ascending, excluding `v` itself.
    pub fn neighbors(&self, v: VertexId) -> &[usize] {
        &self.adj[v.0]
    }

    pub fn has_self_loop(&self, v: VertexId) -> bool {
        self.self_loop[v.0]
    }

    pub fn allows_self_loops(&self) -> bool {
        self.allow_self_loops
    }

    pub fn has_any_self_loop(&self) -> bool {
        self.self_loop.iter().any(|&b| b)
    }

    /// The closed neighborhood used by the game module: `N(v)`, plus `v`
    /// itself when a self-loop sits at `v`.
    pub fn neighborhood_for_game(&self, v: VertexId) -> Vec<usize> {
        let mut out = self.adj[v.0].clone();
        if self.self_loop[v.0] {
            out.push(v.0);
            out.sort_unstable();
        }
        out
    }

    /// Whether `{a, b}` is an edge (including self-loops when `a == b`).
    pub fn is_move_legal(&self, a: VertexId, b: VertexId) -> bool {
        if a == b {
            self.self_loop[a.0]
        } else {
            self.adj[a.0].binary_search(&b.0).is_ok()
        }
    }

    pub fn edges_iter(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().map(|&(u, v)| (VertexId(u), VertexId(v)))
    }

    /// Copy without self-loops (for extension use, where loops carry no
    /// geometry).
    pub fn without_self_loops(&self) -> SimplicialGraph {
        let names: Vec<&str> = self.names.iter().map(|s| s.as_str()).collect();
        let edges: Vec<(&str, &str)> = self
            .edges
            .iter()
            .filter(|(u, v)| u != v)
            .map(|&(u, v)| (self.names[u].as_str(), self.names[v].as_str()))
            .collect();
        SimplicialGraph::new(&names, &edges, false).expect("loop-stripped graph stays valid")
    }

    /// Hop count of a shortest path.
    pub fn distance(&self, x: VertexId, y: VertexId) -> u32 {
        self.bfs_from(x)[y.0]
    }

    /// BFS hop distances from a source (self-loops never help and are
    /// ignored).
    pub fn bfs_from(&self, src: VertexId) -> Vec<u32> {
        let n = self.names.len();
        let mut dist = vec![u32::MAX; n];
        dist[src.0] = 0;
        let mut queue = VecDeque::from([src.0]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adj[v] {
                if dist[u] == u32::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// All-pairs hop distances, row-major.
    pub fn all_pairs(&self) -> Vec<Vec<u32>> {
        (0..self.names.len()).map(|i| self.bfs_from(VertexId(i))).collect()
    }

    /// Minimum length of a path from `x` to `y` that is external to `omega`:
    /// no step of the path may have both endpoints in `omega`. `Infinite`
    /// when no such path exists; 0 when `x == y`.
    pub fn external_distance(
        &self,
        omega: &BTreeSet<VertexId>,
        x: VertexId,
        y: VertexId,
    ) -> HopDistance {
        let in_omega = self.omega_mask(omega);
        let d = self.external_bfs(&in_omega, x.0);
        if d[y.0] == u32::MAX {
            HopDistance::Infinite
        } else {
            HopDistance::Finite(d[y.0])
        }
    }

    pub(crate) fn omega_mask(&self, omega: &BTreeSet<VertexId>) -> Vec<bool> {
        let mut mask = vec![false; self.names.len()];
        for v in omega {
            mask[v.0] = true;
        }
        mask
    }

    /// BFS in the graph with every edge internal to the masked set deleted.
    /// `u32::MAX` marks unreachable vertices. Stops early once `stop_at`
    /// has been settled.
    pub(crate) fn external_bfs_until(
        &self,
        in_omega: &[bool],
        src: usize,
        stop_at: Option<usize>,
    ) -> Vec<u32> {
        let n = self.names.len();
        let mut dist = vec![u32::MAX; n];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            if stop_at == Some(v) {
                break;
            }
            for &u in &self.adj[v] {
                if in_omega[v] && in_omega[u] {
                    continue;
                }
                if dist[u] == u32::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub(crate) fn external_bfs(&self, in_omega: &[bool], src: usize) -> Vec<u32> {
        self.external_bfs_until(in_omega, src, None)
    }

    /// Replaces each edge `uv` by `u — m — v` with a fresh midpoint vertex.
    /// The result is triangle-free and its complex is the original complex
    /// with distances doubled. Returns the subdivided graph together with
    /// the midpoint name of every original edge.
    pub fn subdivide(&self) -> Result<(SimplicialGraph, EdgeMidpoints)> {
        if self.has_any_self_loop() {
            return Err(Error::input("cannot subdivide a graph with self-loops"));
        }
        let mut names: Vec<String> = self.names.clone();
        let taken: BTreeSet<&String> = self.names.iter().collect();
        let mut midpoints = BTreeMap::new();
        let mut edges: Vec<(String, String)> = Vec::with_capacity(2 * self.edges.len());
        for &(u, v) in &self.edges {
            let mut mid = format!("{}~{}", self.names[u], self.names[v]);
            while taken.contains(&mid) {
                mid.push('~');
            }
            edges.push((self.names[u].clone(), mid.clone()));
            edges.push((mid.clone(), self.names[v].clone()));
            midpoints.insert((VertexId(u), VertexId(v)), mid.clone());
            names.push(mid);
        }
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let edge_refs: Vec<(&str, &str)> =
            edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let g = SimplicialGraph::new(&name_refs, &edge_refs, false)?;
        Ok((g, midpoints))
    }
}

/// The midpoint vertex introduced on each original edge by a subdivision.
pub type EdgeMidpoints = BTreeMap<(VertexId, VertexId), String>;

/// A point of the unit-edge complex, in canonical form analogous to tree
/// points: `offset` is measured from the lexicographically smaller endpoint
/// and lies strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphPoint {
    Vertex(VertexId),
    Interior { u: VertexId, v: VertexId, offset: f64 },
}

impl GraphPoint {
    /// Canonical interior point on the edge `{a, b}` at `offset` from `a`.
    pub fn on_edge(graph: &SimplicialGraph, a: VertexId, b: VertexId, offset: f64) -> Result<Self> {
        if !graph.is_move_legal(a, b) || a == b {
            return Err(Error::input(format!(
                "no edge between {:?} and {:?}",
                graph.vertex_name(a),
                graph.vertex_name(b)
            )));
        }
        if !offset.is_finite() || !(-crate::GEOM_TOL..=1.0 + crate::GEOM_TOL).contains(&offset) {
            return Err(Error::input(format!("offset {offset} outside [0, 1]")));
        }
        let (u, v, off) = if a.0 <= b.0 { (a, b, offset) } else { (b, a, 1.0 - offset) };
        let off = off.clamp(0.0, 1.0);
        if off <= SNAP_TOL {
            Ok(GraphPoint::Vertex(u))
        } else if off >= 1.0 - SNAP_TOL {
            Ok(GraphPoint::Vertex(v))
        } else {
            Ok(GraphPoint::Interior { u, v, offset: off })
        }
    }

    /// Shortest-path distance in the complex between two canonical points,
    /// given the all-pairs vertex hop table.
    pub fn complex_distance(a: &GraphPoint, b: &GraphPoint, hops: &[Vec<u32>]) -> f64 {
        let hop = |x: usize, y: usize| hops[x][y] as f64;
        match (a, b) {
            (GraphPoint::Vertex(x), GraphPoint::Vertex(y)) => hop(x.0, y.0),
            (GraphPoint::Vertex(x), GraphPoint::Interior { u, v, offset })
            | (GraphPoint::Interior { u, v, offset }, GraphPoint::Vertex(x)) => {
                (offset + hop(u.0, x.0)).min(1.0 - offset + hop(v.0, x.0))
            }
            (
                GraphPoint::Interior { u: u1, v: v1, offset: s },
                GraphPoint::Interior { u: u2, v: v2, offset: t },
            ) => {
                if u1 == u2 && v1 == v2 {
                    (s - t).abs()
                } else {
                    (s + hop(u1.0, u2.0) + t)
                        .min(s + hop(u1.0, v2.0) + 1.0 - t)
                        .min(1.0 - s + hop(v1.0, u2.0) + t)
                        .min(1.0 - s + hop(v1.0, v2.0) + 1.0 - t)
                }
            }
        }
    }
}

/// A map defined on a subset of vertices with values in some target space.
/// The domain is the key set; a map is total when it covers every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialVertexMap<P> {
    values: BTreeMap<usize, P>,
}

impl<P: Clone> Default for PartialVertexMap<P> {
    fn default() -> Self {
        PartialVertexMap { values: BTreeMap::new() }
    }
}

impl<P: Clone> PartialVertexMap<P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: VertexId, value: P) {
        self.values.insert(v.0, value);
    }

    pub fn get(&self, v: VertexId) -> Option<&P> {
        self.values.get(&v.0)
    }

    pub fn domain(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.values.keys().map(|&i| VertexId(i))
    }

    pub fn domain_set(&self) -> BTreeSet<VertexId> {
        self.values.keys().map(|&i| VertexId(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_total_on(&self, graph: &SimplicialGraph) -> bool {
        self.values.len() == graph.vertex_count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &P)> {
        self.values.iter().map(|(&i, p)| (VertexId(i), p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> SimplicialGraph {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let edges: Vec<(String, String)> =
            (0..n - 1).map(|i| (i.to_string(), (i + 1).to_string())).collect();
        SimplicialGraph::new(&names, &edges, false).unwrap()
    }

    fn cycle(n: usize) -> SimplicialGraph {
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let edges: Vec<(String, String)> =
            (0..n).map(|i| (format!("v{i}"), format!("v{}", (i + 1) % n))).collect();
        SimplicialGraph::new(&names, &edges, false).unwrap()
    }

    /// Exhaustive oracle for external distance: dynamic programming over the
    /// set of vertices reachable in exactly k external steps.
    fn external_oracle(
        g: &SimplicialGraph,
        omega: &BTreeSet<VertexId>,
        x: VertexId,
        y: VertexId,
    ) -> HopDistance {
        if x == y {
            return HopDistance::Finite(0);
        }
        let mask = g.omega_mask(omega);
        let n = g.vertex_count();
        let mut reach = vec![false; n];
        reach[x.0] = true;
        for step in 1..=n as u32 {
            let mut next = vec![false; n];
            for v in 0..n {
                if !reach[v] {
                    continue;
                }
                for &u in g.neighbors(VertexId(v)) {
                    if !(mask[v] && mask[u]) {
                        next[u] = true;
                    }
                }
            }
            if next[y.0] {
                return HopDistance::Finite(step);
            }
            reach = next;
        }
        HopDistance::Infinite
    }

    #[test]
    fn graph_distance_basics() {
        let g = path(4);
        let v = |s: &str| g.vertex_id(s).unwrap();
        assert_eq!(g.distance(v("0"), v("0")), 0);
        assert_eq!(g.distance(v("0"), v("1")), 1);
        assert_eq!(g.distance(v("0"), v("3")), 3);
        assert!(g.vertex_id("nope").is_err());
    }

    #[test]
    fn five_cycle_distance_matches_enumeration() {
        let g = cycle(5);
        let v = |s: &str| g.vertex_id(s).unwrap();
        assert_eq!(g.distance(v("v0"), v("v2")), 2);
        assert_eq!(g.distance(v("v0"), v("v3")), 2);
        let oracle = external_oracle(&g, &BTreeSet::new(), v("v0"), v("v3"));
        assert_eq!(oracle, HopDistance::Finite(2));
    }

    #[test]
    fn external_distance_examples() {
        let g = path(3); // 0 - 1 - 2
        let v = |s: &str| g.vertex_id(s).unwrap();
        let omega: BTreeSet<VertexId> = [v("0"), v("1"), v("2")].into_iter().collect();
        assert_eq!(g.external_distance(&omega, v("0"), v("0")), HopDistance::Finite(0));
        assert_eq!(g.external_distance(&omega, v("0"), v("2")), HopDistance::Infinite);
        assert_eq!(
            external_oracle(&g, &omega, v("0"), v("2")),
            HopDistance::Infinite
        );
        // single external step when one endpoint is free
        let omega2: BTreeSet<VertexId> = [v("0"), v("2")].into_iter().collect();
        assert_eq!(g.external_distance(&omega2, v("0"), v("1")), HopDistance::Finite(1));
        assert_eq!(g.external_distance(&omega2, v("0"), v("2")), HopDistance::Finite(2));
    }

    #[test]
    fn external_distance_random_graphs_match_oracle() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let n = rng.random_range(2..9usize);
            let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
            let mut edges: Vec<(String, String)> = (1..n)
                .map(|i| (format!("x{}", rng.random_range(0..i)), format!("x{i}")))
                .collect();
            for _ in 0..rng.random_range(0..4usize) {
                let a = rng.random_range(0..n);
                let b = rng.random_range(0..n);
                if a != b {
                    edges.push((format!("x{a}"), format!("x{b}")));
                }
            }
            let g = SimplicialGraph::new(&names, &edges, false).unwrap();
            let omega: BTreeSet<VertexId> = (0..n)
                .filter(|_| rng.random_bool(0.5))
                .map(VertexId)
                .collect();
            for a in 0..n {
                for b in 0..n {
                    let fast = g.external_distance(&omega, VertexId(a), VertexId(b));
                    let slow = external_oracle(&g, &omega, VertexId(a), VertexId(b));
                    assert_eq!(fast, slow, "omega={omega:?} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn subdivision_counts_and_triangle_freeness() {
        let g = SimplicialGraph::new(
            &["a", "b", "c"],
            &[("a", "b"), ("b", "c"), ("a", "c")],
            false,
        )
        .unwrap();
        let (s, mids) = g.subdivide().unwrap();
        assert_eq!(s.vertex_count(), g.vertex_count() + g.edge_count());
        assert_eq!(s.edge_count(), 2 * g.edge_count());
        assert_eq!(mids.len(), 3);
        // K3 subdivides to a 6-cycle: every vertex has degree 2
        for i in 0..s.vertex_count() {
            assert_eq!(s.neighbors(VertexId(i)).len(), 2);
        }
        // distances double for original vertices
        for (u, v) in [("a", "b"), ("b", "c"), ("a", "c")] {
            let du = g.distance(g.vertex_id(u).unwrap(), g.vertex_id(v).unwrap());
            let ds = s.distance(s.vertex_id(u).unwrap(), s.vertex_id(v).unwrap());
            assert_eq!(ds, 2 * du);
        }
    }

    #[test]
    fn subdivision_rejects_self_loops() {
        let g = SimplicialGraph::new(&["a", "b"], &[("a", "b"), ("a", "a")], true).unwrap();
        assert!(g.subdivide().is_err());
        assert!(g.has_self_loop(g.vertex_id("a").unwrap()));
        assert!(g.is_move_legal(g.vertex_id("a").unwrap(), g.vertex_id("a").unwrap()));
        assert!(!g.is_move_legal(g.vertex_id("b").unwrap(), g.vertex_id("b").unwrap()));
    }

    #[test]
    fn graph_points_canonicalize() {
        let g = path(3);
        let v = |s: &str| g.vertex_id(s).unwrap();
        let p = GraphPoint::on_edge(&g, v("1"), v("0"), 0.25).unwrap();
        // measured from "1" toward "0": canonical form flips to u="0"
        assert_eq!(p, GraphPoint::Interior { u: v("0"), v: v("1"), offset: 0.75 });
        let q = GraphPoint::on_edge(&g, v("0"), v("1"), 1.0 - 1e-14).unwrap();
        assert_eq!(q, GraphPoint::Vertex(v("1")));
        assert!(GraphPoint::on_edge(&g, v("0"), v("2"), 0.5).is_err());
    }

    #[test]
    fn complex_distance_between_edge_points() {
        let g = path(4);
        let v = |s: &str| g.vertex_id(s).unwrap();
        let hops = g.all_pairs();
        let p = GraphPoint::on_edge(&g, v("0"), v("1"), 0.25).unwrap();
        let q = GraphPoint::on_edge(&g, v("2"), v("3"), 0.5).unwrap();
        let d = GraphPoint::complex_distance(&p, &q, &hops);
        assert!((d - (0.75 + 1.0 + 0.5)).abs() < 1e-12);
        let same = GraphPoint::on_edge(&g, v("0"), v("1"), 0.75).unwrap();
        assert!((GraphPoint::complex_distance(&p, &same, &hops) - 0.5).abs() < 1e-12);
    }
}
