//! Certification of cut constraints by max-flow from fixed roots.
//!
//! Every nonempty proper node set either contains the root or it does not, so
//! flows root -> v and v -> root for all v cover every cut. Restricted families
//! (s-t crossing, non-crossing, sets avoiding a node) use the matching roots,
//! contracting s and t for the non-crossing family.

use std::collections::HashSet;

use super::flow::{check_capacities, FlowNetwork};
use super::{EdgeVector, GraphError, LabeledGraph, NodeId};
use crate::rational::Rational;

/// Which directed cut family to certify. Ignored for undirected graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutSide {
    Both,
    OutOnly,
    InOnly,
}

/// Which node sets S are in the certified family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutRestriction {
    /// All nonempty proper subsets.
    All,
    /// Sets with exactly one of s, t.
    StCrossing { s: NodeId, t: NodeId },
    /// Sets containing both or neither of s, t.
    StNonCrossing { s: NodeId, t: NodeId },
    /// Nonempty sets not containing the given node.
    Avoiding(NodeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutDirection {
    /// Capacity of edges leaving S.
    Out,
    /// Capacity of edges entering S.
    In,
    /// Capacity of edges with exactly one endpoint in S.
    Undirected,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ViolatedCut {
    /// The set S, sorted.
    pub set: Vec<NodeId>,
    pub direction: CutDirection,
    /// Exact capacity of the cut, recomputed from `set`.
    pub capacity: Rational,
    pub threshold: Rational,
}

/// `x(δ⁺(S))`, `x(δ⁻(S))` or `x(δ(S))` depending on `direction`.
pub fn cut_capacity(g: &LabeledGraph, cap: &EdgeVector, set: &[NodeId], direction: CutDirection) -> Rational {
    let mut inside = vec![false; g.n()];
    for v in set {
        inside[v.0] = true;
    }
    g.edge_ids()
        .filter(|&e| {
            let edge = g.edge(e);
            let (a, b) = (inside[edge.tail.0], inside[edge.head.0]);
            match direction {
                CutDirection::Out => a && !b,
                CutDirection::In => !a && b,
                CutDirection::Undirected => a != b,
            }
        })
        .map(|e| &cap[e])
        .sum()
}

/// Certifies that every cut of the requested family has capacity at least
/// `threshold`, or returns the first violated cut found (roots and targets
/// are scanned in increasing node order, out-cuts before in-cuts).
pub fn global_min_cut_check(
    g: &LabeledGraph,
    cap: &EdgeVector,
    threshold: &Rational,
    side: CutSide,
    restriction: CutRestriction,
) -> Result<Option<ViolatedCut>, GraphError> {
    let mut found = scan(g, cap, threshold, side, restriction, true)?;
    Ok(found.pop())
}

/// Every distinct violated cut encountered during the same flow scan that
/// [`global_min_cut_check`] performs. Used for separation in cutting-plane loops.
pub fn all_violated_cuts(
    g: &LabeledGraph,
    cap: &EdgeVector,
    threshold: &Rational,
    side: CutSide,
    restriction: CutRestriction,
) -> Result<Vec<ViolatedCut>, GraphError> {
    scan(g, cap, threshold, side, restriction, false)
}

fn scan(
    g: &LabeledGraph,
    cap: &EdgeVector,
    threshold: &Rational,
    side: CutSide,
    restriction: CutRestriction,
    stop_at_first: bool,
) -> Result<Vec<ViolatedCut>, GraphError> {
    check_capacities(g, cap)?;
    let n = g.n();
    if n < 2 {
        return Err(GraphError::TooFewNodes(n));
    }
    match restriction {
        CutRestriction::StCrossing { s, t } | CutRestriction::StNonCrossing { s, t } => {
            for v in [s, t] {
                if v.0 >= n {
                    return Err(GraphError::NodeOutOfRange(v.0, n));
                }
            }
            if s == t {
                return Err(GraphError::SameEndpoints(s.0));
            }
        }
        CutRestriction::Avoiding(a) if a.0 >= n => return Err(GraphError::NodeOutOfRange(a.0, n)),
        _ => {}
    }

    let passes: &[CutDirection] = if !g.directed() {
        &[CutDirection::Undirected]
    } else {
        match side {
            CutSide::Both => &[CutDirection::Out, CutDirection::In],
            CutSide::OutOnly => &[CutDirection::Out],
            CutSide::InOnly => &[CutDirection::In],
        }
    };

    // Contraction map: for the non-crossing family t is merged into s.
    let (node_map, width) = match restriction {
        CutRestriction::StNonCrossing { s, t } => {
            let mut map = Vec::with_capacity(n);
            let mut next = 0;
            for v in 0..n {
                if v == t.0 {
                    map.push(usize::MAX);
                } else {
                    map.push(next);
                    next += 1;
                }
            }
            map[t.0] = map[s.0];
            (map, n - 1)
        }
        _ => ((0..n).collect::<Vec<_>>(), n),
    };

    // (source, sink) pairs in the (possibly contracted) network.
    let pairs: Vec<(usize, usize)> = match restriction {
        CutRestriction::All => {
            let mut p = Vec::new();
            for v in 1..n {
                p.push((0, v));
                if g.directed() {
                    p.push((v, 0));
                }
            }
            p
        }
        CutRestriction::StCrossing { s, t } => {
            if g.directed() {
                vec![(s.0, t.0), (t.0, s.0)]
            } else {
                vec![(s.0, t.0)]
            }
        }
        CutRestriction::StNonCrossing { s, .. } => {
            let z = node_map[s.0];
            let mut p = Vec::new();
            for v in 0..width {
                if v == z {
                    continue;
                }
                p.push((z, v));
                if g.directed() {
                    p.push((v, z));
                }
            }
            p
        }
        CutRestriction::Avoiding(a) => (0..n).filter(|&v| v != a.0).map(|v| (v, a.0)).collect(),
    };

    let mut found = Vec::new();
    let mut seen: HashSet<(Vec<NodeId>, CutDirection)> = HashSet::new();
    for &direction in passes {
        let reverse = direction == CutDirection::In;
        let net = FlowNetwork::from_graph(g, cap, &node_map, width, reverse);
        for &(src, dst) in &pairs {
            let (value, reach) = net.max_flow(src, dst);
            if value >= *threshold {
                continue;
            }
            let set: Vec<NodeId> = (0..n).filter(|&v| reach[node_map[v]]).map(NodeId).collect();
            let capacity = cut_capacity(g, cap, &set, direction);
            debug_assert_eq!(capacity, value, "min cut must match flow value");
            if !seen.insert((set.clone(), direction)) {
                continue;
            }
            found.push(ViolatedCut { set, direction, capacity, threshold: threshold.clone() });
            if stop_at_first {
                return Ok(found);
            }
        }
    }
    Ok(found)
}
