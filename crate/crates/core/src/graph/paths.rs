use std::collections::VecDeque;

use super::{EdgeId, GraphError, LabeledGraph, NodeId};

/// A walk given by its start node and edge sequence.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Path {
    pub start: NodeId,
    pub edges: Vec<EdgeId>,
}

impl Path {
    /// Node sequence visited by the walk, including both ends.
    pub fn nodes(&self, g: &LabeledGraph) -> Vec<NodeId> {
        let mut out = vec![self.start];
        let mut at = self.start;
        for &e in &self.edges {
            at = g.edge(e).other(at);
            out.push(at);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// The hop-shortest path from `tail(e)` to `head(e)` in `g - e`.
///
/// Fails with [`GraphError::ShortestPathTie`] carrying two witnesses when the
/// shortest path is not unique, and with [`GraphError::NoPath`] when the head
/// is unreachable. Parallel edges count as distinct paths.
pub fn unique_bfs_path_excluding(g: &LabeledGraph, e: EdgeId) -> Result<Path, GraphError> {
    unique_bfs_path_within(g, e, None)
}

/// Like [`unique_bfs_path_excluding`], but only edges with both endpoints in
/// `allowed` may be used (all edges when `allowed` is `None`).
pub fn unique_bfs_path_within(g: &LabeledGraph, e: EdgeId, allowed: Option<&[bool]>) -> Result<Path, GraphError> {
    if e.0 >= g.m() {
        return Err(GraphError::EdgeOutOfRange(e.0, g.m()));
    }
    let inside = |v: NodeId| allowed.is_none_or(|a| a[v.0]);
    let (from, to) = (g.edge(e).tail, g.edge(e).head);
    let n = g.n();
    let mut dist: Vec<Option<usize>> = vec![None; n];
    // Shortest-path counts, saturated at 2.
    let mut count = vec![0u8; n];
    let mut preds: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    if !inside(from) || !inside(to) {
        return Err(GraphError::NoPath { from: from.0, to: to.0, edge: e.0 });
    }
    dist[from.0] = Some(0);
    count[from.0] = 1;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u.0].unwrap();
        for &f in g.out_edges(u) {
            let w = g.edge(f).other(u);
            if f == e || !inside(w) {
                continue;
            }
            match dist[w.0] {
                None => {
                    dist[w.0] = Some(du + 1);
                    count[w.0] = count[u.0];
                    preds[w.0].push(f);
                    queue.push_back(w);
                }
                Some(dw) if dw == du + 1 => {
                    count[w.0] = (count[w.0] + count[u.0]).min(2);
                    preds[w.0].push(f);
                }
                _ => {}
            }
        }
    }
    if dist[to.0].is_none() {
        return Err(GraphError::NoPath { from: from.0, to: to.0, edge: e.0 });
    }
    let mut witnesses = Vec::new();
    let mut suffix = Vec::new();
    collect_paths(g, &preds, from, to, &mut suffix, &mut witnesses);
    if count[to.0] >= 2 {
        let second = witnesses.pop().unwrap_or_default();
        let first = witnesses.pop().unwrap_or_default();
        return Err(GraphError::ShortestPathTie { from: from.0, to: to.0, edge: e.0, first, second });
    }
    Ok(Path { start: from, edges: witnesses.pop().expect("reachable head has a path") })
}

/// Walks the shortest-path predecessor DAG backwards, stopping after two paths.
fn collect_paths(
    g: &LabeledGraph,
    preds: &[Vec<EdgeId>],
    from: NodeId,
    at: NodeId,
    suffix: &mut Vec<EdgeId>,
    out: &mut Vec<Vec<EdgeId>>,
) {
    if out.len() >= 2 {
        return;
    }
    if at == from {
        out.push(suffix.iter().rev().copied().collect());
        return;
    }
    for &f in &preds[at.0] {
        suffix.push(f);
        collect_paths(g, preds, from, g.edge(f).other(at), suffix, out);
        suffix.pop();
        if out.len() >= 2 {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn diamond_tie_is_reported() {
        // 0 -> 1 -> 3, 0 -> 2 -> 3, plus the excluded edge 0 -> 3.
        let mut g = LabeledGraph::new(true, 4).unwrap();
        let e = g.add_edge(NodeId(0), NodeId(3), q(1, 1)).unwrap();
        for (a, b) in [(0, 1), (1, 3), (0, 2), (2, 3)] {
            g.add_edge(NodeId(a), NodeId(b), q(1, 1)).unwrap();
        }
        match unique_bfs_path_excluding(&g, e) {
            Err(GraphError::ShortestPathTie { first, second, .. }) => {
                assert_eq!(first.len(), 2);
                assert_eq!(second.len(), 2);
                assert_ne!(first, second);
            }
            other => panic!("expected tie, got {other:?}"),
        }
    }

    #[test]
    fn unique_path_and_unreachable() {
        let mut g = LabeledGraph::new(true, 3).unwrap();
        let e = g.add_edge(NodeId(0), NodeId(2), q(1, 1)).unwrap();
        let a = g.add_edge(NodeId(0), NodeId(1), q(1, 1)).unwrap();
        let b = g.add_edge(NodeId(1), NodeId(2), q(1, 1)).unwrap();
        let p = unique_bfs_path_excluding(&g, e).unwrap();
        assert_eq!(p.edges, vec![a, b]);
        assert_eq!(p.nodes(&g), vec![NodeId(0), NodeId(1), NodeId(2)]);
        assert!(matches!(unique_bfs_path_excluding(&g, a), Err(GraphError::NoPath { .. })));
        let no_middle = [true, false, true];
        assert!(matches!(unique_bfs_path_within(&g, e, Some(&no_middle)), Err(GraphError::NoPath { .. })));
    }
}
