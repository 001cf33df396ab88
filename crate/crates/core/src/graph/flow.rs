//! Exact max-flow by shortest augmenting paths (Edmonds-Karp).
//!
//! Augmenting along BFS-shortest paths terminates on arbitrary rational
//! capacities, so no scaling or tolerance is involved anywhere.

use std::collections::VecDeque;

use super::{EdgeVector, GraphError, LabeledGraph, NodeId};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowResult {
    pub value: Rational,
    /// Nodes reachable from the source in the final residual network; the
    /// edges leaving this set form a minimum cut.
    pub source_side: Vec<NodeId>,
}

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: Rational,
}

/// Residual network with paired arcs: arc `i ^ 1` is the reverse of arc `i`.
#[derive(Clone, Debug)]
pub(crate) struct FlowNetwork {
    n: usize,
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub(crate) fn new(n: usize) -> Self {
        FlowNetwork { n, arcs: Vec::new(), adj: vec![Vec::new(); n] }
    }

    /// Adds `u -> v` with capacity `cap` and the paired reverse arc with
    /// capacity `back` (zero for directed edges, `cap` for undirected ones).
    pub(crate) fn add_pair(&mut self, u: usize, v: usize, cap: Rational, back: Rational) {
        if u == v || (cap.is_zero() && back.is_zero()) {
            return;
        }
        self.adj[u].push(self.arcs.len());
        self.arcs.push(Arc { to: v, cap });
        self.adj[v].push(self.arcs.len());
        self.arcs.push(Arc { to: u, cap: back });
    }

    /// Network over `g` with capacities `cap`, each node mapped through
    /// `node_map` (used to contract nodes). `reverse` flips every directed edge.
    pub(crate) fn from_graph(g: &LabeledGraph, cap: &EdgeVector, node_map: &[usize], n: usize, reverse: bool) -> Self {
        let mut net = FlowNetwork::new(n);
        for e in g.edge_ids() {
            let edge = g.edge(e);
            let (mut u, mut v) = (node_map[edge.tail.0], node_map[edge.head.0]);
            if reverse {
                std::mem::swap(&mut u, &mut v);
            }
            let c = cap[e].clone();
            let back = if g.directed() { Rational::zero() } else { c.clone() };
            net.add_pair(u, v, c, back);
        }
        net
    }

    pub(crate) fn max_flow(&self, s: usize, t: usize) -> (Rational, Vec<bool>) {
        let mut residual: Vec<Rational> = self.arcs.iter().map(|a| a.cap.clone()).collect();
        let mut total = Rational::zero();
        loop {
            let mut pred: Vec<Option<usize>> = vec![None; self.n];
            let mut seen = vec![false; self.n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &a in &self.adj[u] {
                    let w = self.arcs[a].to;
                    if !seen[w] && residual[a].is_positive() {
                        seen[w] = true;
                        pred[w] = Some(a);
                        queue.push_back(w);
                    }
                }
            }
            if !seen[t] {
                return (total, seen);
            }
            let mut bottleneck: Option<Rational> = None;
            let mut v = t;
            while let Some(a) = pred[v] {
                bottleneck = Some(match bottleneck {
                    Some(b) if b <= residual[a] => b,
                    _ => residual[a].clone(),
                });
                v = self.arcs[a ^ 1].to;
            }
            let bottleneck = bottleneck.expect("s != t so the augmenting path is nonempty");
            let mut v = t;
            while let Some(a) = pred[v] {
                residual[a] -= &bottleneck;
                residual[a ^ 1] += &bottleneck;
                v = self.arcs[a ^ 1].to;
            }
            total += bottleneck;
        }
    }
}

pub(crate) fn check_capacities(g: &LabeledGraph, cap: &EdgeVector) -> Result<(), GraphError> {
    g.check_vector(cap)?;
    if let Some(e) = g.edge_ids().find(|&e| cap[e].is_negative()) {
        return Err(GraphError::NegativeCapacity { edge: e.0, value: cap[e].clone() });
    }
    Ok(())
}

fn check_endpoints(g: &LabeledGraph, s: NodeId, t: NodeId) -> Result<(), GraphError> {
    for v in [s, t] {
        if v.0 >= g.n() {
            return Err(GraphError::NodeOutOfRange(v.0, g.n()));
        }
    }
    if s == t {
        return Err(GraphError::SameEndpoints(s.0));
    }
    Ok(())
}

/// Maximum `s`-`t` flow value under capacities `cap`.
pub fn max_flow(g: &LabeledGraph, cap: &EdgeVector, s: NodeId, t: NodeId) -> Result<Rational, GraphError> {
    max_flow_with_cut(g, cap, s, t).map(|r| r.value)
}

/// Maximum flow together with the source side of a minimum cut.
pub fn max_flow_with_cut(g: &LabeledGraph, cap: &EdgeVector, s: NodeId, t: NodeId) -> Result<FlowResult, GraphError> {
    check_capacities(g, cap)?;
    check_endpoints(g, s, t)?;
    let identity: Vec<usize> = (0..g.n()).collect();
    let net = FlowNetwork::from_graph(g, cap, &identity, g.n(), false);
    let (value, seen) = net.max_flow(s.0, t.0);
    let source_side = seen.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| NodeId(v)).collect();
    Ok(FlowResult { value, source_side })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cut_capacity;
    use crate::graph::CutDirection;
    use crate::rational::q;
    use proptest::prelude::*;

    #[test]
    fn single_edge() {
        let mut g = LabeledGraph::new(true, 2).unwrap();
        g.add_edge(NodeId(0), NodeId(1), q(1, 1)).unwrap();
        let cap = EdgeVector::constant(1, q(1, 1));
        assert_eq!(max_flow(&g, &cap, NodeId(0), NodeId(1)).unwrap(), q(1, 1));
        assert_eq!(max_flow(&g, &cap, NodeId(1), NodeId(0)).unwrap(), q(0, 1));
    }

    #[test]
    fn rejects_bad_input() {
        let mut g = LabeledGraph::new(true, 2).unwrap();
        g.add_edge(NodeId(0), NodeId(1), q(1, 1)).unwrap();
        let neg = EdgeVector::new(vec![q(-1, 3)]);
        assert!(matches!(max_flow(&g, &neg, NodeId(0), NodeId(1)), Err(GraphError::NegativeCapacity { edge: 0, .. })));
        let cap = EdgeVector::constant(1, q(1, 1));
        assert!(matches!(max_flow(&g, &cap, NodeId(1), NodeId(1)), Err(GraphError::SameEndpoints(1))));
        assert!(matches!(
            max_flow(&g, &EdgeVector::zeros(2), NodeId(0), NodeId(1)),
            Err(GraphError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn undirected_edges_carry_flow_both_ways() {
        let mut g = LabeledGraph::new(false, 3).unwrap();
        g.add_edge(NodeId(1), NodeId(0), q(1, 1)).unwrap();
        g.add_edge(NodeId(2), NodeId(1), q(1, 1)).unwrap();
        let cap = EdgeVector::new(vec![q(1, 2), q(2, 3)]);
        assert_eq!(max_flow(&g, &cap, NodeId(0), NodeId(2)).unwrap(), q(1, 2));
        assert_eq!(max_flow(&g, &cap, NodeId(2), NodeId(0)).unwrap(), q(1, 2));
    }

    fn brute_min_cut(g: &LabeledGraph, cap: &EdgeVector, s: usize, t: usize) -> Rational {
        let n = g.n();
        let mut best: Option<Rational> = None;
        for mask in 0u32..(1 << n) {
            if mask & (1 << s) == 0 || mask & (1 << t) != 0 {
                continue;
            }
            let set: Vec<NodeId> = (0..n).filter(|v| mask & (1 << v) != 0).map(NodeId).collect();
            let dir = if g.directed() { CutDirection::Out } else { CutDirection::Undirected };
            let c = cut_capacity(g, cap, &set, dir);
            best = Some(match best {
                Some(b) if b <= c => b,
                _ => c,
            });
        }
        best.unwrap()
    }

    type Network = (bool, usize, Vec<(usize, usize, i64, i64)>);

    fn random_network() -> impl Strategy<Value = Network> {
        (any::<bool>(), 2usize..=8).prop_flat_map(|(directed, n)| {
            let edge = (0..n, 0..n, 0i64..5, 1i64..4);
            (Just(directed), Just(n), prop::collection::vec(edge, 0..(n * 3)))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn max_flow_equals_enumerated_min_cut((directed, n, raw) in random_network()) {
            let mut g = LabeledGraph::new(directed, n).unwrap();
            let mut caps = Vec::new();
            for (u, v, num, den) in raw {
                if u != v && g.find_edge(NodeId(u), NodeId(v)).is_none() {
                    g.add_edge(NodeId(u), NodeId(v), q(1, 1)).unwrap();
                    caps.push(q(num, den));
                }
            }
            let cap = EdgeVector::new(caps);
            for s in 0..n {
                for t in 0..n {
                    if s == t { continue; }
                    let flow = max_flow_with_cut(&g, &cap, NodeId(s), NodeId(t)).unwrap();
                    let expected = brute_min_cut(&g, &cap, s, t);
                    prop_assert_eq!(&flow.value, &expected);
                    let dir = if directed { CutDirection::Out } else { CutDirection::Undirected };
                    prop_assert_eq!(cut_capacity(&g, &cap, &flow.source_side, dir), expected);
                }
            }
        }
    }
}
