//! Finite metric trees: the simplicial complex of a graph-theoretical tree
//! with positive edge lengths under the shortest-path metric.

use std::collections::{BTreeSet, HashMap};

use super::{validate_radii, TargetSpace, CLIP_SLACK, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::{GEOM_TOL, SNAP_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeVertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeEdgeId(pub usize);

/// A point of the tree complex, in canonical form: anything within
/// [`SNAP_TOL`] of an edge endpoint is represented as the vertex itself, so
/// equality is decidable by plain field comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TreePoint {
    Vertex(TreeVertexId),
    /// Strictly interior point of an edge; `offset` is measured from the
    /// edge's stored `u` endpoint and lies in `(0, length)`.
    Interior { edge: TreeEdgeId, offset: f64 },
}

#[derive(Debug, Clone)]
struct TreeEdge {
    u: usize,
    v: usize,
    length: f64,
}

/// A finite weighted tree. Vertex identifiers are opaque strings ordered
/// lexicographically; vertex ids follow that order and edge ids follow the
/// lexicographic order of their endpoint pairs, so all tie-breaks are
/// reproducible across runs.
#[derive(Debug, Clone)]
pub struct MetricTree {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<TreeEdge>,
    /// vertex -> incident edge ids
    incident: Vec<Vec<usize>>,
    /// row-major all-pairs vertex distances
    dist: Vec<f64>,
    /// row-major next vertex on the path from row to column
    hop: Vec<usize>,
}

impl MetricTree {
    /// Builds a tree from named vertices and weighted edges. Fails unless the
    /// edge set is a spanning tree with positive finite lengths.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, f64)]) -> Result<Self> {
        let mut names: Vec<String> = vertices.iter().map(|s| s.as_ref().to_owned()).collect();
        names.sort();
        names.dedup();
        if names.len() != vertices.len() {
            return Err(Error::input("duplicate vertex identifiers"));
        }
        if names.is_empty() {
            return Err(Error::input("tree must have at least one vertex"));
        }
        let index: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        if edges.len() + 1 != names.len() {
            return Err(Error::input(format!(
                "a tree on {} vertices needs exactly {} edges, got {}",
                names.len(),
                names.len() - 1,
                edges.len()
            )));
        }
        let mut built: Vec<TreeEdge> = Vec::with_capacity(edges.len());
        let mut seen_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (u, v, len) in edges {
            let iu = *index
                .get(u.as_ref())
                .ok_or_else(|| Error::input(format!("unknown vertex {:?}", u.as_ref())))?;
            let iv = *index
                .get(v.as_ref())
                .ok_or_else(|| Error::input(format!("unknown vertex {:?}", v.as_ref())))?;
            if iu == iv {
                return Err(Error::input(format!("self-loop at {:?}", u.as_ref())));
            }
            if !len.is_finite() || *len <= 0.0 {
                return Err(Error::input(format!("edge length must be positive, got {len}")));
            }
            if !seen_pairs.insert((iu.min(iv), iu.max(iv))) {
                return Err(Error::input("parallel edge"));
            }
            built.push(TreeEdge { u: iu, v: iv, length: *len });
        }
        built.sort_by(|a, b| {
            let ka = (a.u.min(a.v), a.u.max(a.v));
            let kb = (b.u.min(b.v), b.u.max(b.v));
            ka.cmp(&kb)
        });
        let n = names.len();
        let mut incident = vec![Vec::new(); n];
        for (ei, e) in built.iter().enumerate() {
            incident[e.u].push(ei);
            incident[e.v].push(ei);
        }
        let mut tree = MetricTree {
            names,
            index,
            edges: built,
            incident,
            dist: vec![f64::INFINITY; n * n],
            hop: vec![usize::MAX; n * n],
        };
        tree.fill_tables()?;
        Ok(tree)
    }

    fn fill_tables(&mut self) -> Result<()> {
        let n = self.names.len();
        for s in 0..n {
            self.dist[s * n + s] = 0.0;
            self.hop[s * n + s] = s;
            let mut stack = vec![(s, usize::MAX)];
            while let Some((v, from)) = stack.pop() {
                for &ei in &self.incident[v] {
                    let e = &self.edges[ei];
                    let u = if e.u == v { e.v } else { e.u };
                    if u == from {
                        continue;
                    }
                    self.dist[s * n + u] = self.dist[s * n + v] + e.length;
                    self.hop[s * n + u] = if v == s { u } else { self.hop[s * n + v] };
                    stack.push((u, v));
                }
            }
        }
        if self.dist.iter().any(|d| !d.is_finite()) {
            return Err(Error::input("tree is not connected"));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_id(&self, name: &str) -> Result<TreeVertexId> {
        self.index
            .get(name)
            .map(|&i| TreeVertexId(i))
            .ok_or_else(|| Error::input(format!("unknown tree vertex {name:?}")))
    }

    pub fn vertex_name(&self, v: TreeVertexId) -> &str {
        &self.names[v.0]
    }

    /// The point sitting at a named vertex.
    pub fn vertex_point(&self, name: &str) -> Result<TreePoint> {
        Ok(TreePoint::Vertex(self.vertex_id(name)?))
    }

    pub fn edge_endpoints(&self, e: TreeEdgeId) -> (TreeVertexId, TreeVertexId) {
        let edge = &self.edges[e.0];
        (TreeVertexId(edge.u), TreeVertexId(edge.v))
    }

    pub fn edge_length(&self, e: TreeEdgeId) -> f64 {
        self.edges[e.0].length
    }

    /// Looks up the edge joining two named vertices. The boolean is true when
    /// the stored orientation is `(a, b)`, false when it is `(b, a)`.
    pub fn edge_between(&self, a: &str, b: &str) -> Result<(TreeEdgeId, bool)> {
        let ia = self.vertex_id(a)?.0;
        let ib = self.vertex_id(b)?.0;
        for &ei in &self.incident[ia] {
            let e = &self.edges[ei];
            if e.u == ia && e.v == ib {
                return Ok((TreeEdgeId(ei), true));
            }
            if e.u == ib && e.v == ia {
                return Ok((TreeEdgeId(ei), false));
            }
        }
        Err(Error::input(format!("no edge between {a:?} and {b:?}")))
    }

    /// Canonical point on an edge; offsets within [`SNAP_TOL`] of an endpoint
    /// snap to the vertex form.
    pub fn point_on_edge(&self, e: TreeEdgeId, offset: f64) -> Result<TreePoint> {
        if e.0 >= self.edges.len() {
            return Err(Error::input(format!("edge id {} out of range", e.0)));
        }
        let len = self.edges[e.0].length;
        if !offset.is_finite() || offset < -GEOM_TOL || offset > len + GEOM_TOL {
            return Err(Error::input(format!(
                "offset {offset} outside [0, {len}] on edge {}",
                e.0
            )));
        }
        Ok(self.snap(e, offset.clamp(0.0, len)))
    }

    fn snap(&self, e: TreeEdgeId, offset: f64) -> TreePoint {
        let edge = &self.edges[e.0];
        if offset <= SNAP_TOL {
            TreePoint::Vertex(TreeVertexId(edge.u))
        } else if offset >= edge.length - SNAP_TOL {
            TreePoint::Vertex(TreeVertexId(edge.v))
        } else {
            TreePoint::Interior { edge: e, offset }
        }
    }

    /// Validates and canonicalizes a point that may come from outside.
    pub fn canonicalize(&self, p: &TreePoint) -> Result<TreePoint> {
        match p {
            TreePoint::Vertex(v) => {
                if v.0 >= self.names.len() {
                    return Err(Error::input(format!("vertex id {} out of range", v.0)));
                }
                Ok(*p)
            }
            TreePoint::Interior { edge, offset } => self.point_on_edge(*edge, *offset),
        }
    }

    fn dvv(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.names.len() + b]
    }

    fn next_hop(&self, from: usize, to: usize) -> usize {
        self.hop[from * self.names.len() + to]
    }

    /// Length of the unique arc between two canonical points.
    pub fn distance(&self, p: &TreePoint, q: &TreePoint) -> f64 {
        match (p, q) {
            (TreePoint::Vertex(a), TreePoint::Vertex(b)) => self.dvv(a.0, b.0),
            (TreePoint::Vertex(a), TreePoint::Interior { edge, offset })
            | (TreePoint::Interior { edge, offset }, TreePoint::Vertex(a)) => {
                let e = &self.edges[edge.0];
                (offset + self.dvv(e.u, a.0)).min(e.length - offset + self.dvv(e.v, a.0))
            }
            (
                TreePoint::Interior { edge: e1, offset: s },
                TreePoint::Interior { edge: e2, offset: t },
            ) => {
                if e1 == e2 {
                    (s - t).abs()
                } else {
                    let a = &self.edges[e1.0];
                    let b = &self.edges[e2.0];
                    let (s, t, la, _lb) = (*s, *t, a.length, b.length);
                    let via = |x_cost: f64, x: usize, y: usize, y_cost: f64| {
                        x_cost + self.dvv(x, y) + y_cost
                    };
                    via(s, a.u, b.u, t)
                        .min(via(s, a.u, b.v, b.length - t))
                        .min(via(la - s, a.v, b.u, t))
                        .min(via(la - s, a.v, b.v, b.length - t))
                }
            }
        }
    }

    /// Distance with input validation, for points of external origin.
    pub fn try_distance(&self, p: &TreePoint, q: &TreePoint) -> Result<f64> {
        let p = self.canonicalize(p)?;
        let q = self.canonicalize(q)?;
        Ok(self.distance(&p, &q))
    }

    /// The point at parameter `lambda` along the arc from `p` to `q`:
    /// `distance(p, r) = lambda * distance(p, q)` exactly up to rounding.
    pub fn geodesic_point(&self, p: &TreePoint, q: &TreePoint, lambda: f64) -> Result<TreePoint> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::input(format!("lambda {lambda} outside [0, 1]")));
        }
        let p = self.canonicalize(p)?;
        let q = self.canonicalize(q)?;
        let total = self.distance(&p, &q);
        if total <= 0.0 || lambda == 0.0 {
            return Ok(p);
        }
        if lambda == 1.0 {
            return Ok(q);
        }
        let m = lambda * total;

        // Both interior on the same edge: straight interpolation.
        if let (
            TreePoint::Interior { edge: e1, offset: s },
            TreePoint::Interior { edge: e2, offset: t },
        ) = (&p, &q)
        {
            if e1 == e2 {
                let dir = if t > s { 1.0 } else { -1.0 };
                return self.point_on_edge(*e1, s + dir * m);
            }
        }

        // Leave p's edge through the endpoint that lies on the arc.
        let (exit, first_len) = match p {
            TreePoint::Vertex(v) => (v.0, 0.0),
            TreePoint::Interior { edge, offset } => {
                let e = &self.edges[edge.0];
                let via_u = offset + self.distance(&TreePoint::Vertex(TreeVertexId(e.u)), &q);
                let via_v =
                    e.length - offset + self.distance(&TreePoint::Vertex(TreeVertexId(e.v)), &q);
                if via_u <= via_v {
                    if m <= offset {
                        return self.point_on_edge(edge, offset - m);
                    }
                    (e.u, offset)
                } else {
                    if m <= e.length - offset {
                        return self.point_on_edge(edge, offset + m);
                    }
                    (e.v, e.length - offset)
                }
            }
        };
        // Enter q's edge through the endpoint nearest the exit vertex.
        let entry = match q {
            TreePoint::Vertex(v) => v.0,
            TreePoint::Interior { edge, offset } => {
                let e = &self.edges[edge.0];
                let via_u = self.dvv(exit, e.u) + offset;
                let via_v = self.dvv(exit, e.v) + e.length - offset;
                if via_u <= via_v {
                    e.u
                } else {
                    e.v
                }
            }
        };

        let mut walked = first_len;
        let mut cur = exit;
        while cur != entry {
            let nxt = self.next_hop(cur, entry);
            let (ei, len, forward) = self.edge_towards(cur, nxt);
            if m <= walked + len {
                let along = m - walked;
                let offset = if forward { along } else { len - along };
                return self.point_on_edge(TreeEdgeId(ei), offset);
            }
            walked += len;
            cur = nxt;
        }
        match q {
            TreePoint::Vertex(_) => Ok(q),
            TreePoint::Interior { edge, .. } => {
                let e = &self.edges[edge.0];
                let rem = (m - walked).max(0.0);
                let offset = if cur == e.u { rem } else { e.length - rem };
                self.point_on_edge(edge, offset)
            }
        }
    }

    fn edge_towards(&self, from: usize, to: usize) -> (usize, f64, bool) {
        for &ei in &self.incident[from] {
            let e = &self.edges[ei];
            if e.u == from && e.v == to {
                return (ei, e.length, true);
            }
            if e.v == from && e.u == to {
                return (ei, e.length, false);
            }
        }
        unreachable!("next_hop produced a non-edge");
    }

    /// True iff `a` and `b` lie in the same connected component of the tree
    /// with `cut` removed, i.e. the cut does not sit strictly inside the arc
    /// from `a` to `b`.
    pub fn side_of_cut(&self, cut: &TreePoint, a: &TreePoint, b: &TreePoint) -> Result<bool> {
        let cut = self.canonicalize(cut)?;
        let a = self.canonicalize(a)?;
        let b = self.canonicalize(b)?;
        if a == cut || b == cut {
            return Err(Error::input("side_of_cut endpoints must differ from the cut point"));
        }
        let through = self.distance(&a, &cut) + self.distance(&cut, &b);
        Ok(through > self.distance(&a, &b) + GEOM_TOL)
    }

    /// Largest distance between any two points of the complex; for a tree it
    /// is attained at a vertex pair.
    pub fn diameter(&self) -> f64 {
        let n = self.names.len();
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(self.dvv(i, j));
            }
        }
        best
    }

    /// Canonical representative of "anywhere in the tree": the lexicographic
    /// first point, used when every ball constraint is vacuous.
    fn base_point(&self) -> TreePoint {
        if self.edges.is_empty() {
            TreePoint::Vertex(TreeVertexId(0))
        } else {
            self.snap(TreeEdgeId(0), 0.0)
        }
    }

    /// Common point of closed balls, or `None` when the intersection is
    /// empty. Radii may be `f64::INFINITY` (the whole tree). Writing
    /// `φ(x) = max_i (d(x, c_i) − r_i)` over finite-radius balls, the
    /// intersection is nonempty iff `min φ ≤ 0` (up to [`FEASIBILITY_TOL`]),
    /// which on a tree reduces to the pairwise condition
    /// `d(c_i, c_j) ≤ r_i + r_j`. The returned witness is the minimizer of φ
    /// with the lexicographically smallest `(edge id, offset)` among
    /// per-edge minimizers.
    pub fn ball_intersection(&self, balls: &[(TreePoint, f64)]) -> Result<Option<TreePoint>> {
        validate_radii(balls)?;
        let mut finite = Vec::with_capacity(balls.len());
        for (p, r) in balls {
            let p = self.canonicalize(p)?;
            if r.is_finite() {
                finite.push((p, *r));
            }
        }
        if finite.is_empty() {
            return Ok(Some(self.base_point()));
        }
        let t_star = self.min_ball_defect(&finite);
        if t_star > FEASIBILITY_TOL {
            return Ok(None);
        }
        // Exact clipping first: when every quantity is representable the
        // witness comes out exactly. Retry with a little slack only when
        // rounding makes the system look empty.
        match self
            .ball_witness(&finite, t_star, 0.0)
            .or_else(|| self.ball_witness(&finite, t_star, CLIP_SLACK))
        {
            Some(w) => Ok(Some(w)),
            None => Err(Error::invariant(
                "ball system judged feasible but no witness was found".to_owned(),
            )),
        }
    }

    /// `min_x max_i (d(x, c_i) − r_i)`, computed in closed form:
    /// the maximum over `−r_i` and `(d(c_i, c_j) − r_i − r_j) / 2`, the
    /// latter via a linear-time weighted-diameter pass over the tree with
    /// the centers attached as nodes.
    fn min_ball_defect(&self, balls: &[(TreePoint, f64)]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for (_, r) in balls {
            best = best.max(-r);
        }
        if balls.len() < 2 {
            return best;
        }

        let n = self.names.len();
        let mut node_weights: Vec<Vec<f64>> = vec![Vec::new(); n];
        let mut on_edge: Vec<Vec<(f64, usize)>> = vec![Vec::new(); self.edges.len()];
        let mut next_node = n;
        for (p, r) in balls {
            match p {
                TreePoint::Vertex(v) => {
                    push_top2(&mut node_weights[v.0], -r);
                }
                TreePoint::Interior { edge, offset } => {
                    on_edge[edge.0].push((*offset, next_node));
                    node_weights.push(vec![-r]);
                    next_node += 1;
                }
            }
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); next_node];
        for (ei, e) in self.edges.iter().enumerate() {
            let chain = &mut on_edge[ei];
            chain.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut prev = e.u;
            let mut prev_off = 0.0;
            for &(off, node) in chain.iter() {
                adj[prev].push((node, off - prev_off));
                adj[node].push((prev, off - prev_off));
                prev = node;
                prev_off = off;
            }
            adj[prev].push((e.v, e.length - prev_off));
            adj[e.v].push((prev, e.length - prev_off));
        }

        let mut parent = vec![usize::MAX; next_node];
        let mut order = Vec::with_capacity(next_node);
        let mut seen = vec![false; next_node];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &(u, _) in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = v;
                    stack.push(u);
                }
            }
        }

        let mut down = vec![f64::NEG_INFINITY; next_node];
        let mut best_pair = f64::NEG_INFINITY;
        for &v in order.iter().rev() {
            let mut top1 = f64::NEG_INFINITY;
            let mut top2 = f64::NEG_INFINITY;
            for &w in &node_weights[v] {
                if w > top1 {
                    top2 = top1;
                    top1 = w;
                } else if w > top2 {
                    top2 = w;
                }
            }
            for &(u, len) in &adj[v] {
                if parent[u] == v && down[u] > f64::NEG_INFINITY {
                    let cand = down[u] + len;
                    if cand > top1 {
                        top2 = top1;
                        top1 = cand;
                    } else if cand > top2 {
                        top2 = cand;
                    }
                }
            }
            if top2 > f64::NEG_INFINITY {
                best_pair = best_pair.max(top1 + top2);
            }
            down[v] = top1;
        }
        best.max(best_pair / 2.0)
    }

    fn ball_witness(&self, balls: &[(TreePoint, f64)], t_star: f64, slack: f64) -> Option<TreePoint> {
        if self.edges.is_empty() {
            return Some(TreePoint::Vertex(TreeVertexId(0)));
        }
        for ei in 0..self.edges.len() {
            let len = self.edges[ei].length;
            let mut pieces: Vec<(f64, f64)> = vec![(0.0, len)];
            for (c, r) in balls {
                // r + t_star ≥ 0 because t_star ≥ −r for every ball.
                let rho = r + t_star + slack;
                let allowed = self.ball_edge_intervals(ei, c, rho);
                pieces = intersect_interval_lists(&pieces, &allowed);
                if pieces.is_empty() {
                    break;
                }
            }
            if let Some(&(lo, _)) = pieces.first() {
                return Some(self.snap(TreeEdgeId(ei), lo.clamp(0.0, len)));
            }
        }
        None
    }

    /// The trace of the closed ball `B(c, rho)` on edge `ei`, as at most two
    /// disjoint intervals of offsets.
    fn ball_edge_intervals(&self, ei: usize, c: &TreePoint, rho: f64) -> Vec<(f64, f64)> {
        let e = &self.edges[ei];
        if let TreePoint::Interior { edge, offset } = c {
            if edge.0 == ei {
                let lo = (offset - rho).max(0.0);
                let hi = (offset + rho).min(e.length);
                return if lo <= hi { vec![(lo, hi)] } else { vec![] };
            }
        }
        let du = self.distance(&TreePoint::Vertex(TreeVertexId(e.u)), c);
        let dv = self.distance(&TreePoint::Vertex(TreeVertexId(e.v)), c);
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(2);
        if rho >= du {
            out.push((0.0, (rho - du).min(e.length)));
        }
        if rho >= dv {
            let lo = (e.length - (rho - dv)).max(0.0);
            match out.last_mut() {
                Some(first) if lo <= first.1 => first.1 = e.length,
                _ => out.push((lo, e.length)),
            }
        }
        out
    }

    /// A copy of the tree with every edge length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<MetricTree> {
        let names: Vec<&str> = self.names.iter().map(|s| s.as_str()).collect();
        let edges: Vec<(&str, &str, f64)> = self
            .edges
            .iter()
            .map(|e| (self.names[e.u].as_str(), self.names[e.v].as_str(), e.length * factor))
            .collect();
        MetricTree::new(&names, &edges)
    }

    /// Maps a point of this tree to the corresponding point of
    /// [`MetricTree::scaled`]`(factor)`. Edge ids are preserved because the
    /// vertex name order does not change.
    pub fn scale_point(&self, p: &TreePoint, factor: f64) -> TreePoint {
        match p {
            TreePoint::Vertex(v) => TreePoint::Vertex(*v),
            TreePoint::Interior { edge, offset } => {
                TreePoint::Interior { edge: *edge, offset: offset * factor }
            }
        }
    }

    pub fn vertex_names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|s| s.as_str())
    }

    pub fn edge_records(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.edges.iter().map(|e| (self.names[e.u].as_str(), self.names[e.v].as_str(), e.length))
    }
}

impl TargetSpace for MetricTree {
    type Point = TreePoint;

    fn distance(&self, p: &TreePoint, q: &TreePoint) -> f64 {
        MetricTree::distance(self, p, q)
    }

    fn geodesic_point(&self, p: &TreePoint, q: &TreePoint, lambda: f64) -> Result<TreePoint> {
        MetricTree::geodesic_point(self, p, q, lambda)
    }

    fn ball_intersection_witness(&self, balls: &[(TreePoint, f64)]) -> Result<Option<TreePoint>> {
        MetricTree::ball_intersection(self, balls)
    }
}

fn push_top2(slot: &mut Vec<f64>, w: f64) {
    slot.push(w);
    slot.sort_by(|a, b| b.total_cmp(a));
    slot.truncate(2);
}

/// Intersection of two sorted disjoint interval lists.
fn intersect_interval_lists(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo <= hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}
