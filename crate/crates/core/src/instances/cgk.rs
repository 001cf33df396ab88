//! The recursive directed graphs G_{k,r} and their closed variants L_{k,r}.
//!
//! A copy of G_j (j >= 1) has a source, a sink and `r` child copies of
//! G_{j-1}; a copy of G_0 is a single node that serves as both terminals.
//! The source path of a copy runs s -> s(C_0) -> ... -> s(C_{r-1}) -> t and the
//! sink path t -> t(C_{r-1}) -> ... -> t(C_0) -> s, so together they form one
//! directed cycle. In L_{k,r} the root has no terminals: its source and sink
//! paths are closed into two cycles by the replacement edges
//! s(C_{r-1}) -> s(C_0) and t(C_0) -> t(C_{r-1}).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::InstanceError;
use crate::graph::{EdgeId, EdgeLabel, Family, LabeledGraph, NodeId, NodeLabel, PathSide, TerminalRole};
use crate::rational::Rational;

/// Generated graphs are capped at this many nodes.
pub const MAX_CGK_NODES: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CgkParams {
    pub k: u32,
    pub r: u32,
}

impl CgkParams {
    pub fn new(k: u32, r: u32) -> Result<Self, InstanceError> {
        if k < 1 || r < 2 {
            return Err(InstanceError::InvalidCgk { k, r });
        }
        let p = CgkParams { k, r };
        match p.g_node_count() {
            Some(n) if n <= MAX_CGK_NODES => Ok(p),
            _ => Err(InstanceError::TooLarge { limit: MAX_CGK_NODES }),
        }
    }

    /// N_k = r N_{k-1} + 2 with N_0 = 1.
    pub fn g_node_count(&self) -> Option<u64> {
        let mut n: u64 = 1;
        for _ in 0..self.k {
            n = n.checked_mul(self.r as u64)?.checked_add(2)?;
        }
        Some(n)
    }

    /// E_k = r E_{k-1} + 2(r+1) with E_0 = 0.
    pub fn g_edge_count(&self) -> Option<u64> {
        let mut m: u64 = 0;
        for _ in 0..self.k {
            m = m.checked_mul(self.r as u64)?.checked_add(2 * (self.r as u64 + 1))?;
        }
        Some(m)
    }

    /// r^{level-1}, the weight of edges introduced at `level`.
    pub fn level_weight(&self, level: u32) -> Rational {
        Rational::from_bigints(num_bigint::BigInt::from(self.r).pow(level - 1), 1.into())
    }

    /// 2k(r+1)r^{k-1}, the total weight of G_{k,r}.
    pub fn g_total_weight(&self) -> Rational {
        Rational::from_integer(2 * self.k as i64 * (self.r as i64 + 1)) * self.level_weight(self.k)
    }
}

struct Builder {
    p: CgkParams,
    g: LabeledGraph,
    nodes: Vec<NodeLabel>,
    next: usize,
}

impl Builder {
    fn node(&mut self, address: &[u32], terminal: TerminalRole) -> NodeId {
        let v = NodeId(self.next);
        self.next += 1;
        self.nodes.push(NodeLabel::Cgk { address: address.to_vec(), terminal });
        v
    }

    #[allow(clippy::too_many_arguments)]
    fn edge(
        &mut self,
        tail: NodeId,
        head: NodeId,
        level: u32,
        address: &[u32],
        side: PathSide,
        position: usize,
        replacement: bool,
    ) {
        let label = EdgeLabel::Cgk { level, address: address.to_vec(), side, position: position as u32, replacement };
        self.g
            .add_labeled_edge(tail, head, self.p.level_weight(level), Some(label))
            .expect("generator emits valid edges");
    }

    /// Builds a copy of G_level at `address`; returns its (source, sink).
    fn copy(&mut self, level: u32, address: &mut Vec<u32>) -> (NodeId, NodeId) {
        if level == 0 {
            let v = self.node(address, TerminalRole::Point);
            return (v, v);
        }
        let s = self.node(address, TerminalRole::Source);
        let children = self.children(level, address);
        let t = self.node(address, TerminalRole::Sink);
        let r = self.p.r as usize;
        let mut src_chain = vec![s];
        src_chain.extend(children.iter().map(|c| c.0));
        src_chain.push(t);
        for (i, w) in src_chain.windows(2).enumerate() {
            self.edge(w[0], w[1], level, address, PathSide::Source, i, false);
        }
        let mut snk_chain = vec![t];
        snk_chain.extend(children.iter().rev().map(|c| c.1));
        snk_chain.push(s);
        for (i, w) in snk_chain.windows(2).enumerate() {
            self.edge(w[0], w[1], level, address, PathSide::Sink, i, false);
        }
        debug_assert_eq!(src_chain.len(), r + 2);
        (s, t)
    }

    fn children(&mut self, level: u32, address: &mut Vec<u32>) -> Vec<(NodeId, NodeId)> {
        (0..self.p.r)
            .map(|i| {
                address.push(i);
                let c = self.copy(level - 1, address);
                address.pop();
                c
            })
            .collect()
    }

    /// The root of L_{k,r}: children plus the two closed level-k cycles.
    fn closed_root(&mut self) {
        let k = self.p.k;
        let mut address = Vec::new();
        let children = self.children(k, &mut address);
        let r = children.len();
        for i in 0..r {
            let (a, b) = (children[i].0, children[(i + 1) % r].0);
            self.edge(a, b, k, &[], PathSide::Source, i, i == r - 1);
        }
        for i in 0..r {
            let (a, b) = (children[r - 1 - i].1, children[(2 * r - 2 - i) % r].1);
            self.edge(a, b, k, &[], PathSide::Sink, i, i == r - 1);
        }
    }
}

fn builder(p: CgkParams, n: usize) -> Builder {
    Builder { p, g: LabeledGraph::new(true, n).expect("n >= 1"), nodes: Vec::with_capacity(n), next: 0 }
}

/// G_{k,r} with terminals s, t marked and every node and edge labeled.
pub fn build_cgk_g(p: CgkParams) -> Result<LabeledGraph, InstanceError> {
    let p = CgkParams::new(p.k, p.r)?;
    let n = p.g_node_count().expect("validated") as usize;
    let mut b = builder(p, n);
    let (s, t) = b.copy(p.k, &mut Vec::new());
    debug_assert_eq!(b.next, n);
    b.g.set_terminals(Some(s), Some(t)).expect("terminals in range");
    b.g.set_node_labels(b.nodes);
    b.g.set_family(Some(Family::Cgk { k: p.k, r: p.r, closed: false }));
    Ok(b.g)
}

/// L_{k,r}: G_{k,r} with s and t removed and the two replacement edges added.
/// No terminals are marked. For r = 2 at k = 1 the result has parallel edges.
pub fn build_cgk_l(p: CgkParams) -> Result<LabeledGraph, InstanceError> {
    let p = CgkParams::new(p.k, p.r)?;
    let n = p.g_node_count().expect("validated") as usize - 2;
    let mut b = builder(p, n);
    b.closed_root();
    debug_assert_eq!(b.next, n);
    b.g.set_node_labels(b.nodes);
    b.g.set_family(Some(Family::Cgk { k: p.k, r: p.r, closed: true }));
    Ok(b.g)
}

/// Level and mediating/outer class of an edge. Both flags are `None` at level k;
/// `outer` is `Some(false)` for every level-(k-1) edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeClass {
    pub level: u32,
    pub mediating: Option<bool>,
    pub outer: Option<bool>,
}

/// One copy of some G_j inside a generated graph, recovered from labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyInfo {
    pub address: Vec<u32>,
    pub level: u32,
    pub source: Option<NodeId>,
    pub sink: Option<NodeId>,
    /// Edges introduced by this copy on its source path, by position.
    pub src: Vec<EdgeId>,
    /// Edges introduced by this copy on its sink path, by position.
    pub snk: Vec<EdgeId>,
}

impl CopyInfo {
    /// All edges this copy introduces, source path first: the forward cycle.
    pub fn level_cycle(&self) -> Vec<EdgeId> {
        self.src.iter().chain(&self.snk).copied().collect()
    }
}

/// Copy hierarchy of a labeled CGK graph.
#[derive(Clone, Debug)]
pub struct CgkLayout {
    pub params: CgkParams,
    pub closed: bool,
    copies: Vec<CopyInfo>,
    by_address: HashMap<Vec<u32>, usize>,
    node_address: Vec<Vec<u32>>,
}

impl CgkLayout {
    pub fn from_graph(g: &LabeledGraph) -> Result<Self, InstanceError> {
        let Some(Family::Cgk { k, r, closed }) = g.family() else {
            return Err(InstanceError::NotCgk);
        };
        if !g.has_labels() {
            return Err(InstanceError::Unlabeled);
        }
        let params = CgkParams { k, r };
        let mut layout = CgkLayout {
            params,
            closed,
            copies: Vec::new(),
            by_address: HashMap::new(),
            node_address: Vec::with_capacity(g.n()),
        };
        for v in g.nodes() {
            let Some(NodeLabel::Cgk { address, terminal }) = g.node_label(v) else {
                return Err(InstanceError::Unlabeled);
            };
            layout.node_address.push(address.clone());
            if *terminal != TerminalRole::Point {
                let level = k - address.len() as u32;
                let c = layout.copy_mut(address, level);
                match terminal {
                    TerminalRole::Source => c.source = Some(v),
                    _ => c.sink = Some(v),
                }
            }
        }
        for e in g.edge_ids() {
            let Some(EdgeLabel::Cgk { level, address, side, position, .. }) = g.edge_label(e) else {
                return Err(InstanceError::Unlabeled);
            };
            let c = layout.copy_mut(address, *level);
            let list = match side {
                PathSide::Source => &mut c.src,
                PathSide::Sink => &mut c.snk,
            };
            let pos = *position as usize;
            if list.len() <= pos {
                list.resize(pos + 1, EdgeId(usize::MAX));
            }
            list[pos] = e;
        }
        Ok(layout)
    }

    fn copy_mut(&mut self, address: &[u32], level: u32) -> &mut CopyInfo {
        let idx = *self.by_address.entry(address.to_vec()).or_insert_with(|| {
            self.copies.push(CopyInfo {
                address: address.to_vec(),
                level,
                source: None,
                sink: None,
                src: Vec::new(),
                snk: Vec::new(),
            });
            self.copies.len() - 1
        });
        &mut self.copies[idx]
    }

    pub fn copy(&self, address: &[u32]) -> Option<&CopyInfo> {
        self.by_address.get(address).map(|&i| &self.copies[i])
    }

    pub fn copies(&self) -> &[CopyInfo] {
        &self.copies
    }

    pub fn node_address(&self, v: NodeId) -> &[u32] {
        &self.node_address[v.0]
    }

    /// Whether node `v` lies inside the copy at `address`.
    pub fn node_in_copy(&self, v: NodeId, address: &[u32]) -> bool {
        self.node_address[v.0].starts_with(address)
    }

    /// Introducing copy of `e` with the edge's side and position.
    pub fn edge_origin<'a>(
        &'a self,
        g: &LabeledGraph,
        e: EdgeId,
    ) -> Result<(&'a CopyInfo, PathSide, usize), InstanceError> {
        match g.edge_label(e) {
            Some(EdgeLabel::Cgk { address, side, position, .. }) => {
                Ok((self.copy(address).ok_or(InstanceError::Unlabeled)?, *side, *position as usize))
            }
            _ => Err(InstanceError::Unlabeled),
        }
    }

    /// Classification of `e` following the mediating/outer definitions.
    pub fn classify(&self, g: &LabeledGraph, e: EdgeId) -> Result<EdgeClass, InstanceError> {
        let (copy, side, pos) = self.edge_origin(g, e)?;
        let (k, r) = (self.params.k, self.params.r as usize);
        let level = copy.level;
        if level == k {
            return Ok(EdgeClass { level, mediating: None, outer: None });
        }
        let mediating = pos == 0 || pos == r;
        let outer = if level + 1 == k {
            false
        } else {
            // Following the level cycle forward ends at t for source-side
            // edges and at s for sink-side edges. That terminal's other
            // entering edge belongs to the parent and is mediating exactly
            // when this copy is the last (resp. first) child.
            let index = *copy.address.last().expect("non-root copy") as usize;
            match side {
                PathSide::Source => index == r - 1,
                PathSide::Sink => index == 0,
            }
        };
        Ok(EdgeClass { level, mediating: Some(mediating), outer: Some(outer) })
    }
}

/// Class of edge `e` in a labeled CGK graph.
pub fn classify_edge(l: &LabeledGraph, e: EdgeId) -> Result<EdgeClass, InstanceError> {
    CgkLayout::from_graph(l)?.classify(l, e)
}
