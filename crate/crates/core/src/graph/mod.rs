//! Graph representation shared by every other module.
//!
//! A [`LabeledGraph`] is a directed or undirected graph on dense node ids with
//! exact nonnegative weights. Generated instances additionally carry
//! construction labels on nodes and edges plus a [`Family`] tag, which is what
//! the frame builder and the edge classifier read.

mod cut;
mod flow;
mod metric;
mod paths;

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

pub use cut::{
    all_violated_cuts, cut_capacity, global_min_cut_check, CutDirection, CutRestriction, CutSide, ViolatedCut,
};
pub use flow::{max_flow, max_flow_with_cut, FlowResult};
pub use metric::{metric_closure, MetricError, MetricInstance, MetricJson};
pub use paths::{unique_bfs_path_excluding, unique_bfs_path_within, Path};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
}

impl Edge {
    /// The endpoint opposite `v`. Only meaningful when `v` is an endpoint.
    pub fn other(&self, v: NodeId) -> NodeId {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("node {0} out of range for a graph on {1} nodes")]
    NodeOutOfRange(usize, usize),
    #[error("edge {0} out of range for a graph with {1} edges")]
    EdgeOutOfRange(usize, usize),
    #[error("self loop at node {0}")]
    SelfLoop(usize),
    #[error("negative weight {weight} on edge {tail}->{head}")]
    NegativeWeight { tail: usize, head: usize, weight: Rational },
    #[error("negative capacity {value} on edge {edge}")]
    NegativeCapacity { edge: usize, value: Rational },
    #[error("vector has {got} entries but the graph has {expected} edges")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("node {to} is unreachable from node {from}")]
    Unreachable { from: usize, to: usize },
    #[error("source and sink must differ (both are {0})")]
    SameEndpoints(usize),
    #[error("cut certification needs at least two nodes, graph has {0}")]
    TooFewNodes(usize),
    #[error("no path from {from} to {to} avoiding edge {edge}")]
    NoPath { from: usize, to: usize, edge: usize },
    #[error("shortest path from {from} to {to} avoiding edge {edge} is not unique: {first:?} vs {second:?}")]
    ShortestPathTie { from: usize, to: usize, edge: usize, first: Vec<EdgeId>, second: Vec<EdgeId> },
    #[error("malformed graph JSON: {0}")]
    Json(String),
}

/// Which side of a copy's level cycle an edge of a CGK construction lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathSide {
    Source,
    Sink,
}

/// Role of a node in the CGK construction: terminal of the copy named by its
/// address, or the single node of a level-0 copy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalRole {
    Source,
    Sink,
    Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymNodeRole {
    TopPath,
    BottomPath,
    LeftClique,
    RightClique,
    S,
    T,
    Connector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymEdgeRole {
    /// Edge of the top or bottom horizontal path.
    Path,
    /// Edge inside one of the two cliques.
    Clique,
    /// Edge between a clique and a path endpoint or a terminal.
    Link,
    /// Edge of the added s-t connecting path.
    New,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeLabel {
    Cgk {
        level: u32,
        /// Child indices from the root to the copy that introduced the edge.
        address: Vec<u32>,
        side: PathSide,
        /// Position along that copy's source or sink path (or cycle at the root).
        position: u32,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        replacement: bool,
    },
    Sym {
        role: SymEdgeRole,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeLabel {
    Cgk { address: Vec<u32>, terminal: TerminalRole },
    Sym { role: SymNodeRole, index: u32 },
}

/// Which generator produced a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Family {
    /// `closed = false` is G_{k,r}; `closed = true` is L_{k,r}.
    Cgk { k: u32, r: u32, closed: bool },
    /// `closing_path = false` is G_{ell,q}; `true` is G'_{ell,q}.
    SymPath { ell: u32, q: u32, closing_path: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    directed: bool,
    n: usize,
    edges: Vec<Edge>,
    weights: Vec<Rational>,
    edge_labels: Vec<Option<EdgeLabel>>,
    node_labels: Option<Vec<NodeLabel>>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    s: Option<NodeId>,
    t: Option<NodeId>,
    family: Option<Family>,
}

impl LabeledGraph {
    pub fn new(directed: bool, n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        Ok(LabeledGraph {
            directed,
            n,
            edges: Vec::new(),
            weights: Vec::new(),
            edge_labels: Vec::new(),
            node_labels: None,
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            s: None,
            t: None,
            family: None,
        })
    }

    /// Complete graph on `n` nodes, every edge weighted `weight`.
    /// Directed edges are emitted in row-major order of (tail, head);
    /// undirected edges as (u, v) with u < v.
    pub fn complete(directed: bool, n: usize, weight: &Rational) -> Result<Self, GraphError> {
        let mut g = LabeledGraph::new(directed, n)?;
        for u in 0..n {
            for v in 0..n {
                if u == v || (!directed && v < u) {
                    continue;
                }
                g.add_edge(NodeId(u), NodeId(v), weight.clone())?;
            }
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, tail: NodeId, head: NodeId, weight: Rational) -> Result<EdgeId, GraphError> {
        self.add_labeled_edge(tail, head, weight, None)
    }

    pub fn add_labeled_edge(
        &mut self,
        tail: NodeId,
        head: NodeId,
        weight: Rational,
        label: Option<EdgeLabel>,
    ) -> Result<EdgeId, GraphError> {
        for v in [tail, head] {
            if v.0 >= self.n {
                return Err(GraphError::NodeOutOfRange(v.0, self.n));
            }
        }
        if tail == head {
            return Err(GraphError::SelfLoop(tail.0));
        }
        if weight.is_negative() {
            return Err(GraphError::NegativeWeight { tail: tail.0, head: head.0, weight });
        }
        let id = EdgeId(self.edges.len());
        self.edges.push(Edge { tail, head });
        self.weights.push(weight);
        self.edge_labels.push(label);
        self.out_adj[tail.0].push(id);
        self.in_adj[head.0].push(id);
        if !self.directed {
            self.out_adj[head.0].push(id);
            self.in_adj[tail.0].push(id);
        }
        Ok(id)
    }

    pub fn set_terminals(&mut self, s: Option<NodeId>, t: Option<NodeId>) -> Result<(), GraphError> {
        for v in [s, t].into_iter().flatten() {
            if v.0 >= self.n {
                return Err(GraphError::NodeOutOfRange(v.0, self.n));
            }
        }
        self.s = s;
        self.t = t;
        Ok(())
    }

    pub fn set_node_labels(&mut self, labels: Vec<NodeLabel>) {
        assert_eq!(labels.len(), self.n, "one label per node");
        self.node_labels = Some(labels);
    }

    pub fn set_family(&mut self, family: Option<Family>) {
        self.family = family;
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n).map(NodeId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e.0]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weight(&self, e: EdgeId) -> &Rational {
        &self.weights[e.0]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn total_weight(&self) -> Rational {
        self.weights.iter().sum()
    }

    /// Edges leaving `v`; for undirected graphs, every incident edge.
    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_adj[v.0]
    }

    /// Edges entering `v`; for undirected graphs, every incident edge.
    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_adj[v.0]
    }

    pub fn edge_label(&self, e: EdgeId) -> Option<&EdgeLabel> {
        self.edge_labels[e.0].as_ref()
    }

    pub fn node_label(&self, v: NodeId) -> Option<&NodeLabel> {
        self.node_labels.as_ref().map(|l| &l[v.0])
    }

    pub fn has_labels(&self) -> bool {
        self.node_labels.is_some() && self.edge_labels.iter().all(Option::is_some)
    }

    pub fn s(&self) -> Option<NodeId> {
        self.s
    }

    pub fn t(&self) -> Option<NodeId> {
        self.t
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    /// First edge from `u` to `v` (either orientation when undirected).
    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.out_adj[u.0]
            .iter()
            .copied()
            .find(|&e| self.edges[e.0].other(u) == v && (!self.directed || self.edges[e.0].tail == u))
    }

    /// Same graph with every edge reversed (labels kept). Identity for undirected graphs.
    pub fn reversed(&self) -> LabeledGraph {
        if !self.directed {
            return self.clone();
        }
        let mut g = self.clone();
        for e in g.edges.iter_mut() {
            std::mem::swap(&mut e.tail, &mut e.head);
        }
        std::mem::swap(&mut g.out_adj, &mut g.in_adj);
        g
    }

    pub fn check_vector(&self, x: &EdgeVector) -> Result<(), GraphError> {
        if x.len() != self.m() {
            return Err(GraphError::DimensionMismatch { expected: self.m(), got: x.len() });
        }
        Ok(())
    }

    /// Whether every node reaches every other node along edge directions
    /// (plain connectivity for undirected graphs).
    pub fn is_strongly_connected(&self) -> bool {
        let reach = |adj: &Vec<Vec<EdgeId>>, forward: bool| {
            let mut seen = vec![false; self.n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for &e in &adj[u] {
                    let edge = self.edges[e.0];
                    let w = if !self.directed {
                        edge.other(NodeId(u)).0
                    } else if forward {
                        edge.head.0
                    } else {
                        edge.tail.0
                    };
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.into_iter().all(|b| b)
        };
        reach(&self.out_adj, true) && (!self.directed || reach(&self.in_adj, false))
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            directed: self.directed,
            n: self.n,
            edges: self
                .edges
                .iter()
                .zip(&self.weights)
                .zip(&self.edge_labels)
                .map(|((e, w), l)| EdgeJson { tail: e.tail.0, head: e.head.0, weight: w.clone(), labels: l.clone() })
                .collect(),
            s: self.s.map(|v| v.0),
            t: self.t.map(|v| v.0),
            family: self.family,
            nodes: self.node_labels.clone(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self, GraphError> {
        let mut g = LabeledGraph::new(json.directed, json.n)?;
        for e in &json.edges {
            g.add_labeled_edge(NodeId(e.tail), NodeId(e.head), e.weight.clone(), e.labels.clone())?;
        }
        g.set_terminals(json.s.map(NodeId), json.t.map(NodeId))?;
        if let Some(nodes) = &json.nodes {
            if nodes.len() != json.n {
                return Err(GraphError::Json(format!("{} node labels for {} nodes", nodes.len(), json.n)));
            }
            g.set_node_labels(nodes.clone());
        }
        g.family = json.family;
        Ok(g)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("graph JSON serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self, GraphError> {
        let json: GraphJson = serde_json::from_str(s).map_err(|e| GraphError::Json(e.to_string()))?;
        LabeledGraph::from_json(&json)
    }
}

/// Index of the edge (u, v) in [`LabeledGraph::complete`] order. For
/// undirected graphs the endpoints may be given in either order.
pub fn complete_edge_index(directed: bool, n: usize, u: NodeId, v: NodeId) -> usize {
    let (u, v) = (u.0, v.0);
    debug_assert!(u != v && u < n && v < n);
    if directed {
        u * (n - 1) + if v < u { v } else { v - 1 }
    } else {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        a * n - a * (a + 1) / 2 + (b - a - 1)
    }
}

/// Wire format: `{directed, n, edges: [{tail, head, weight: "p/q", labels}], s, t}`
/// plus optional `family` and per-node `nodes` labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub directed: bool,
    pub n: usize,
    pub edges: Vec<EdgeJson>,
    #[serde(default)]
    pub s: Option<usize>,
    #[serde(default)]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<NodeLabel>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub tail: usize,
    pub head: usize,
    pub weight: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<EdgeLabel>,
}

/// Exact value per edge of a graph: fractional points, capacities, cone rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeVector(Vec<Rational>);

impl EdgeVector {
    pub fn new(values: Vec<Rational>) -> Self {
        EdgeVector(values)
    }

    pub fn zeros(m: usize) -> Self {
        EdgeVector(vec![Rational::zero(); m])
    }

    pub fn constant(m: usize, value: Rational) -> Self {
        EdgeVector(vec![value; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().sum()
    }

    pub fn sum_over(&self, edges: &[EdgeId]) -> Rational {
        edges.iter().map(|e| &self.0[e.0]).sum()
    }

    pub fn dot(&self, other: &[Rational]) -> Rational {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, factor: &Rational) -> EdgeVector {
        EdgeVector(self.0.iter().map(|v| v * factor).collect())
    }
}

impl Index<EdgeId> for EdgeVector {
    type Output = Rational;
    fn index(&self, e: EdgeId) -> &Rational {
        &self.0[e.0]
    }
}

impl IndexMut<EdgeId> for EdgeVector {
    fn index_mut(&mut self, e: EdgeId) -> &mut Rational {
        &mut self.0[e.0]
    }
}

impl FromIterator<Rational> for EdgeVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        EdgeVector(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn rejects_self_loops_and_negative_weights() {
        let mut g = LabeledGraph::new(true, 3).unwrap();
        assert!(matches!(g.add_edge(NodeId(1), NodeId(1), q(1, 1)), Err(GraphError::SelfLoop(1))));
        assert!(matches!(g.add_edge(NodeId(0), NodeId(1), q(-1, 2)), Err(GraphError::NegativeWeight { .. })));
        assert!(matches!(g.add_edge(NodeId(0), NodeId(3), q(1, 1)), Err(GraphError::NodeOutOfRange(3, 3))));
        assert!(LabeledGraph::new(false, 0).is_err());
    }

    #[test]
    fn json_round_trip_is_identity() {
        let mut g = LabeledGraph::new(true, 3).unwrap();
        g.add_labeled_edge(
            NodeId(0),
            NodeId(1),
            q(3, 1),
            Some(EdgeLabel::Cgk { level: 2, address: vec![1], side: PathSide::Sink, position: 0, replacement: true }),
        )
        .unwrap();
        g.add_edge(NodeId(1), NodeId(2), q(1, 2)).unwrap();
        g.set_terminals(Some(NodeId(0)), Some(NodeId(2))).unwrap();
        let text = g.to_json_string();
        assert!(text.contains("\"weight\": \"1/2\""));
        let back = LabeledGraph::from_json_str(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn undirected_adjacency_is_symmetric() {
        let g = LabeledGraph::complete(false, 4, &Rational::one()).unwrap();
        assert_eq!(g.m(), 6);
        for v in g.nodes() {
            assert_eq!(g.out_edges(v).len(), 3);
            assert_eq!(g.in_edges(v), g.out_edges(v));
        }
        assert_eq!(g.find_edge(NodeId(3), NodeId(1)), g.find_edge(NodeId(1), NodeId(3)));
    }

    #[test]
    fn complete_index_matches_construction_order() {
        for directed in [true, false] {
            let g = LabeledGraph::complete(directed, 6, &Rational::one()).unwrap();
            for e in g.edge_ids() {
                let edge = g.edge(e);
                assert_eq!(complete_edge_index(directed, 6, edge.tail, edge.head), e.0);
                if !directed {
                    assert_eq!(complete_edge_index(directed, 6, edge.head, edge.tail), e.0);
                }
            }
        }
    }

    #[test]
    fn strong_connectivity() {
        let mut g = LabeledGraph::new(true, 3).unwrap();
        g.add_edge(NodeId(0), NodeId(1), q(1, 1)).unwrap();
        g.add_edge(NodeId(1), NodeId(2), q(1, 1)).unwrap();
        assert!(!g.is_strongly_connected());
        g.add_edge(NodeId(2), NodeId(0), q(1, 1)).unwrap();
        assert!(g.is_strongly_connected());
    }
}
