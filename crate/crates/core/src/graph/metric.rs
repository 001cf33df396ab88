use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{GraphError, LabeledGraph, NodeId};
use crate::rational::Rational;

/// Distances on the complete graph over `n` nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricInstance {
    directed: bool,
    n: usize,
    dist: Vec<Rational>,
    s: Option<NodeId>,
    t: Option<NodeId>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("distance matrix must be {n}x{n}")]
    Shape { n: usize },
    #[error("negative distance {value} from {u} to {v}")]
    Negative { u: usize, v: usize, value: Rational },
    #[error("nonzero self distance at node {0}")]
    Diagonal(usize),
    #[error("undirected instance has d({u},{v}) != d({v},{u})")]
    Asymmetric { u: usize, v: usize },
    #[error("triangle inequality fails: d({u},{w}) > d({u},{v}) + d({v},{w})")]
    Triangle { u: usize, v: usize, w: usize },
}

impl MetricInstance {
    /// Builds and validates an instance from a full distance matrix.
    pub fn from_matrix(
        directed: bool,
        rows: Vec<Vec<Rational>>,
        s: Option<NodeId>,
        t: Option<NodeId>,
    ) -> Result<Self, MetricError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(MetricError::Shape { n });
        }
        let inst = MetricInstance { directed, n, dist: rows.into_iter().flatten().collect(), s, t };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<(), MetricError> {
        let n = self.n;
        for u in 0..n {
            if !self.d(u, u).is_zero() {
                return Err(MetricError::Diagonal(u));
            }
            for v in 0..n {
                if self.d(u, v).is_negative() {
                    return Err(MetricError::Negative { u, v, value: self.d(u, v).clone() });
                }
                if !self.directed && self.d(u, v) != self.d(v, u) {
                    return Err(MetricError::Asymmetric { u, v });
                }
            }
        }
        if let Some((u, v, w)) = self.triangle_violation() {
            return Err(MetricError::Triangle { u, v, w });
        }
        Ok(())
    }

    fn d(&self, u: usize, v: usize) -> &Rational {
        &self.dist[u * self.n + v]
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> Option<NodeId> {
        self.s
    }

    pub fn t(&self) -> Option<NodeId> {
        self.t
    }

    pub fn with_terminals(mut self, s: Option<NodeId>, t: Option<NodeId>) -> Self {
        self.s = s;
        self.t = t;
        self
    }

    pub fn distance(&self, u: NodeId, v: NodeId) -> &Rational {
        self.d(u.0, v.0)
    }

    /// First ordered triple (u, v, w) with d(u,w) > d(u,v) + d(v,w).
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    if *self.d(u, w) > self.d(u, v) + self.d(v, w) {
                        return Some((u, v, w));
                    }
                }
            }
        }
        None
    }

    /// The complete graph K_n with these distances as weights, in the edge
    /// order of [`LabeledGraph::complete`]. Terminals are carried over.
    pub fn complete_graph(&self) -> LabeledGraph {
        let mut g = LabeledGraph::new(self.directed, self.n).expect("n >= 1");
        for u in 0..self.n {
            for v in 0..self.n {
                if u == v || (!self.directed && v < u) {
                    continue;
                }
                g.add_edge(NodeId(u), NodeId(v), self.d(u, v).clone()).expect("metric distances are nonnegative");
            }
        }
        g.set_terminals(self.s, self.t).expect("terminals in range");
        g
    }

    pub fn to_json(&self) -> MetricJson {
        MetricJson {
            directed: self.directed,
            n: self.n,
            distances: self.dist.chunks(self.n).map(|r| r.to_vec()).collect(),
            s: self.s.map(|v| v.0),
            t: self.t.map(|v| v.0),
        }
    }

    pub fn from_json(json: MetricJson) -> Result<Self, MetricError> {
        if json.distances.len() != json.n {
            return Err(MetricError::Shape { n: json.n });
        }
        MetricInstance::from_matrix(json.directed, json.distances, json.s.map(NodeId), json.t.map(NodeId))
    }
}

/// Wire format for a metric instance: full distance matrix of `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricJson {
    pub directed: bool,
    pub n: usize,
    pub distances: Vec<Vec<Rational>>,
    #[serde(default)]
    pub s: Option<usize>,
    #[serde(default)]
    pub t: Option<usize>,
}

/// All-pairs exact shortest-path distances of `g` (Dijkstra from every node).
/// Fails on the first unreachable ordered pair.
pub fn metric_closure(g: &LabeledGraph) -> Result<MetricInstance, GraphError> {
    let n = g.n();
    let mut dist = Vec::with_capacity(n * n);
    for src in 0..n {
        let row = dijkstra(g, NodeId(src));
        for (v, d) in row.into_iter().enumerate() {
            match d {
                Some(d) => dist.push(d),
                None => return Err(GraphError::Unreachable { from: src, to: v }),
            }
        }
    }
    Ok(MetricInstance { directed: g.directed(), n, dist, s: g.s(), t: g.t() })
}

fn dijkstra(g: &LabeledGraph, src: NodeId) -> Vec<Option<Rational>> {
    let mut best: Vec<Option<Rational>> = vec![None; g.n()];
    let mut done = vec![false; g.n()];
    let mut heap = BinaryHeap::new();
    best[src.0] = Some(Rational::zero());
    heap.push(Reverse((Rational::zero(), src.0)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &e in g.out_edges(NodeId(u)) {
            let w = g.edge(e).other(NodeId(u)).0;
            let cand = &d + g.weight(e);
            if best[w].as_ref().is_none_or(|b| cand < *b) {
                best[w] = Some(cand.clone());
                heap.push(Reverse((cand, w)));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn directed_three_cycle() {
        let mut g = LabeledGraph::new(true, 3).unwrap();
        for v in 0..3 {
            g.add_edge(NodeId(v), NodeId((v + 1) % 3), q(1, 1)).unwrap();
        }
        let m = metric_closure(&g).unwrap();
        for u in 0..3 {
            assert_eq!(m.distance(NodeId(u), NodeId((u + 1) % 3)), &q(1, 1));
            assert_eq!(m.distance(NodeId(u), NodeId((u + 2) % 3)), &q(2, 1));
        }
        assert_eq!(m.triangle_violation(), None);
    }

    #[test]
    fn disconnected_names_pair() {
        let mut g = LabeledGraph::new(true, 3).unwrap();
        g.add_edge(NodeId(0), NodeId(1), q(1, 1)).unwrap();
        g.add_edge(NodeId(1), NodeId(0), q(1, 1)).unwrap();
        assert!(matches!(metric_closure(&g), Err(GraphError::Unreachable { from: 0, to: 2 })));
    }

    #[test]
    fn validation_rejects_non_metrics() {
        let one = q(1, 1);
        let z = Rational::zero();
        let bad = vec![
            vec![z.clone(), one.clone(), q(5, 1)],
            vec![one.clone(), z.clone(), one.clone()],
            vec![q(5, 1), one.clone(), z.clone()],
        ];
        assert_eq!(
            MetricInstance::from_matrix(false, bad, None, None),
            Err(MetricError::Triangle { u: 0, v: 1, w: 2 })
        );
        let asym = vec![vec![z.clone(), one.clone()], vec![q(2, 1), z.clone()]];
        assert!(matches!(
            MetricInstance::from_matrix(false, asym.clone(), None, None),
            Err(MetricError::Asymmetric { .. })
        ));
        assert!(MetricInstance::from_matrix(true, asym, None, None).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let mut g = LabeledGraph::new(false, 3).unwrap();
        g.add_edge(NodeId(0), NodeId(1), q(1, 2)).unwrap();
        g.add_edge(NodeId(1), NodeId(2), q(1, 3)).unwrap();
        g.set_terminals(Some(NodeId(0)), Some(NodeId(2))).unwrap();
        let m = metric_closure(&g).unwrap();
        let text = serde_json::to_string(&m.to_json()).unwrap();
        let back = MetricInstance::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.distance(NodeId(0), NodeId(2)), &q(5, 6));
    }
}
