//! JSON schemas for trees, graphs, points, and vertex maps.
//!
//! Tree file: `{"vertices": ["a", ...], "edges": [{"u": "a", "v": "b", "length": 1.5}, ...]}`.
//! Graph file: `{"vertices": [...], "edges": [["u", "v"], ...], "allow_self_loops": false}`.
//! Tree/graph points: `{"vertex": "a"}` or `{"edge": ["a", "b"], "offset": 0.75}` with the
//! offset measured from the first named endpoint.
//! Mapping file: `{"Ω": ["u", ...], "values": {"u": <point>, ...}}` (the key `omega` is
//! accepted as an ASCII alias on input).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{GraphPoint, PartialVertexMap, SimplicialGraph, VertexId};
use crate::targets::{BoxTarget, MetricTree, PlaneTarget, TreePoint};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeEdgeFile {
    pub u: String,
    pub v: String,
    pub length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeFile {
    pub vertices: Vec<String>,
    pub edges: Vec<TreeEdgeFile>,
}

pub fn tree_from_json(text: &str) -> Result<MetricTree> {
    let file: TreeFile =
        serde_json::from_str(text).map_err(|e| Error::input(format!("tree file: {e}")))?;
    let edges: Vec<(&str, &str, f64)> =
        file.edges.iter().map(|e| (e.u.as_str(), e.v.as_str(), e.length)).collect();
    let names: Vec<&str> = file.vertices.iter().map(|s| s.as_str()).collect();
    MetricTree::new(&names, &edges)
}

pub fn tree_to_json(tree: &MetricTree) -> Value {
    json!({
        "vertices": tree.vertex_names().collect::<Vec<_>>(),
        "edges": tree
            .edge_records()
            .map(|(u, v, length)| json!({"u": u, "v": v, "length": length}))
            .collect::<Vec<_>>(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    #[serde(default)]
    pub allow_self_loops: bool,
}

pub fn graph_from_json(text: &str) -> Result<SimplicialGraph> {
    let file: GraphFile =
        serde_json::from_str(text).map_err(|e| Error::input(format!("graph file: {e}")))?;
    let names: Vec<&str> = file.vertices.iter().map(|s| s.as_str()).collect();
    let edges: Vec<(&str, &str)> =
        file.edges.iter().map(|[u, v]| (u.as_str(), v.as_str())).collect();
    SimplicialGraph::new(&names, &edges, file.allow_self_loops)
}

pub fn graph_to_json(graph: &SimplicialGraph) -> Value {
    json!({
        "vertices": graph.vertex_names().collect::<Vec<_>>(),
        "edges": graph
            .edges_iter()
            .map(|(u, v)| json!([graph.vertex_name(u), graph.vertex_name(v)]))
            .collect::<Vec<_>>(),
        "allow_self_loops": graph.allows_self_loops(),
    })
}

/// Serialized form shared by tree points and complex points.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRepr {
    Vertex { vertex: String },
    Edge { edge: [String; 2], offset: f64 },
}

pub fn tree_point_from_value(tree: &MetricTree, v: &Value) -> Result<TreePoint> {
    let repr: PointRepr =
        serde_json::from_value(v.clone()).map_err(|e| Error::input(format!("tree point: {e}")))?;
    match repr {
        PointRepr::Vertex { vertex } => tree.vertex_point(&vertex),
        PointRepr::Edge { edge: [a, b], offset } => {
            let (id, forward) = tree.edge_between(&a, &b)?;
            let len = tree.edge_length(id);
            let off = if forward { offset } else { len - offset };
            tree.point_on_edge(id, off)
        }
    }
}

pub fn tree_point_to_value(tree: &MetricTree, p: &TreePoint) -> Value {
    match p {
        TreePoint::Vertex(v) => json!({"vertex": tree.vertex_name(*v)}),
        TreePoint::Interior { edge, offset } => {
            let (u, v) = tree.edge_endpoints(*edge);
            json!({"edge": [tree.vertex_name(u), tree.vertex_name(v)], "offset": offset})
        }
    }
}

pub fn graph_point_from_value(graph: &SimplicialGraph, v: &Value) -> Result<GraphPoint> {
    let repr: PointRepr =
        serde_json::from_value(v.clone()).map_err(|e| Error::input(format!("graph point: {e}")))?;
    match repr {
        PointRepr::Vertex { vertex } => Ok(GraphPoint::Vertex(graph.vertex_id(&vertex)?)),
        PointRepr::Edge { edge: [a, b], offset } => {
            GraphPoint::on_edge(graph, graph.vertex_id(&a)?, graph.vertex_id(&b)?, offset)
        }
    }
}

pub fn graph_point_to_value(graph: &SimplicialGraph, p: &GraphPoint) -> Value {
    match p {
        GraphPoint::Vertex(v) => json!({"vertex": graph.vertex_name(*v)}),
        GraphPoint::Interior { u, v, offset } => {
            json!({"edge": [graph.vertex_name(*u), graph.vertex_name(*v)], "offset": offset})
        }
    }
}

/// A target space loaded from a file: a tree file, `{"space": "box",
/// "dimension": d}`, or `{"space": "plane"}`.
#[derive(Debug, Clone)]
pub enum AnyTarget {
    Tree(MetricTree),
    Box(BoxTarget),
    Plane(PlaneTarget),
}

pub fn target_from_json(text: &str) -> Result<AnyTarget> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::input(format!("target file: {e}")))?;
    if let Some(space) = v.get("space").and_then(|s| s.as_str()) {
        match space {
            "box" => {
                let dim = v
                    .get("dimension")
                    .and_then(|d| d.as_u64())
                    .ok_or_else(|| Error::input("box target needs a positive dimension"))?;
                Ok(AnyTarget::Box(BoxTarget::new(dim as usize)?))
            }
            "plane" => Ok(AnyTarget::Plane(PlaneTarget::new())),
            other => Err(Error::input(format!("unknown target space {other:?}"))),
        }
    } else {
        Ok(AnyTarget::Tree(tree_from_json(text)?))
    }
}

pub fn vector_point_from_value(dim: usize, v: &Value) -> Result<Vec<f64>> {
    let coords: Vec<f64> =
        serde_json::from_value(v.clone()).map_err(|e| Error::input(format!("point: {e}")))?;
    if coords.len() != dim {
        return Err(Error::input(format!(
            "point has {} coordinates, expected {dim}",
            coords.len()
        )));
    }
    Ok(coords)
}

pub fn plane_point_from_value(v: &Value) -> Result<[f64; 2]> {
    let coords = vector_point_from_value(2, v)?;
    Ok([coords[0], coords[1]])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MappingFile {
    #[serde(rename = "Ω", alias = "omega")]
    pub omega: Vec<String>,
    pub values: BTreeMap<String, Value>,
}

/// Parses a mapping file against a graph, converting each value with the
/// supplied point parser. The value table may cover more vertices than the
/// listed domain (e.g. a total map with a marked boundary), but every listed
/// domain vertex must have a value.
pub fn mapping_from_json<P>(
    graph: &SimplicialGraph,
    text: &str,
    parse_point: impl Fn(&Value) -> Result<P>,
) -> Result<(BTreeSet<VertexId>, PartialVertexMap<P>)>
where
    P: Clone,
{
    let file: MappingFile =
        serde_json::from_str(text).map_err(|e| Error::input(format!("mapping file: {e}")))?;
    let mut omega = BTreeSet::new();
    for name in &file.omega {
        omega.insert(graph.vertex_id(name)?);
    }
    let mut map = PartialVertexMap::new();
    for (name, value) in &file.values {
        map.insert(graph.vertex_id(name)?, parse_point(value)?);
    }
    for v in &omega {
        if map.get(*v).is_none() {
            return Err(Error::input(format!(
                "domain vertex {:?} has no value",
                graph.vertex_name(*v)
            )));
        }
    }
    Ok((omega, map))
}

pub fn mapping_to_json<P>(
    graph: &SimplicialGraph,
    omega: &BTreeSet<VertexId>,
    map: &PartialVertexMap<P>,
    point_to_value: impl Fn(&P) -> Value,
) -> Value
where
    P: Clone,
{
    let omega_names: Vec<&str> = omega.iter().map(|&v| graph.vertex_name(v)).collect();
    let values: BTreeMap<String, Value> = map
        .iter()
        .map(|(v, p)| (graph.vertex_name(v).to_owned(), point_to_value(p)))
        .collect();
    json!({"Ω": omega_names, "values": values})
}
