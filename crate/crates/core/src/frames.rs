//! Frames on L_{k,r}: for each edge (u, v) an edge-simple u -> v path avoiding
//! the edge plus edge-disjoint cycles, chosen so that frame membership is a
//! symmetric relation.
//!
//! Level-k edges use the unique hop-shortest detour in the whole graph. An
//! edge introduced by a copy A of G_l with l < k leaves A through one terminal
//! and re-enters through the other. In the inner case the detour crosses the
//! next sibling of A in the direction of travel; in the outer case there is no
//! such sibling and it bounces off a terminal of the parent copy. The path is
//! the unique hop-shortest detour inside exactly those nodes. The globally
//! shortest detour can differ once k >= 3, because a sibling next to a parent
//! terminal can be bypassed through that terminal, and then symmetry fails.
//!
//! Every sibling copy of A that the path does not touch contributes its full
//! level-l cycle.

use serde::{Deserialize, Serialize};

use crate::graph::{
    unique_bfs_path_excluding, unique_bfs_path_within, EdgeId, GraphError, LabeledGraph, NodeId, Path, PathSide,
};
use crate::instances::{CgkLayout, InstanceError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub owner: EdgeId,
    pub path: Path,
    pub cycles: Vec<Vec<EdgeId>>,
}

impl Frame {
    /// Every frame edge, path first, then cycles in order.
    pub fn members(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.path.edges.iter().chain(self.cycles.iter().flatten()).copied()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.members().any(|f| f == e)
    }

    pub fn size(&self) -> usize {
        self.path.len() + self.cycles.iter().map(Vec::len).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum FrameViolation {
    EdgeOutOfRange {
        edge: EdgeId,
    },
    OwnerEdgePresent,
    PathWrongStart {
        expected: NodeId,
        got: NodeId,
    },
    PathBroken {
        index: usize,
    },
    PathWrongEnd {
        expected: NodeId,
        got: NodeId,
    },
    EmptyCycle {
        cycle: usize,
    },
    CycleBroken {
        cycle: usize,
        index: usize,
    },
    CycleNotClosed {
        cycle: usize,
    },
    /// An edge occurs twice across the path and cycles.
    NotEdgeDisjoint {
        edge: EdgeId,
    },
}

impl std::fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FrameViolation::EdgeOutOfRange { edge } => write!(f, "edge {edge} out of range"),
            FrameViolation::OwnerEdgePresent => write!(f, "owner edge present"),
            FrameViolation::PathWrongStart { expected, got } => {
                write!(f, "path starts at {got}, expected {expected}")
            }
            FrameViolation::PathBroken { index } => write!(f, "path is not a walk at step {index}"),
            FrameViolation::PathWrongEnd { expected, got } => write!(f, "path ends at {got}, expected {expected}"),
            FrameViolation::EmptyCycle { cycle } => write!(f, "cycle {cycle} is empty"),
            FrameViolation::CycleBroken { cycle, index } => write!(f, "cycle {cycle} is not a walk at step {index}"),
            FrameViolation::CycleNotClosed { cycle } => write!(f, "cycle {cycle} is not closed"),
            FrameViolation::NotEdgeDisjoint { edge } => write!(f, "not edge-disjoint: edge {edge} repeats"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FrameError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("frame of edge {edge} is invalid: {violations:?}")]
    Invalid { edge: EdgeId, violations: Vec<FrameViolation> },
    #[error("frame family needs one frame per edge: {frames} frames for {edges} edges")]
    Count { frames: usize, edges: usize },
    #[error("frame of edge {owner} is stored at index {index}")]
    Misplaced { owner: EdgeId, index: usize },
    #[error("asymmetric frames: {e2} is in the frame of {e1} but not the converse")]
    Asymmetric { e1: EdgeId, e2: EdgeId },
}

/// Walks `edges` from `start`; returns the end node or the first broken step.
fn walk(g: &LabeledGraph, start: NodeId, edges: &[EdgeId]) -> Result<NodeId, usize> {
    let mut at = start;
    for (i, &e) in edges.iter().enumerate() {
        let edge = g.edge(e);
        at = if edge.tail == at {
            edge.head
        } else if !g.directed() && edge.head == at {
            edge.tail
        } else {
            return Err(i);
        };
    }
    Ok(at)
}

/// Every violated frame invariant, in a fixed order. Empty means valid.
pub fn validate_frame(g: &LabeledGraph, f: &Frame) -> Vec<FrameViolation> {
    let mut out = Vec::new();
    let m = g.m();
    if f.owner.0 >= m {
        out.push(FrameViolation::EdgeOutOfRange { edge: f.owner });
    }
    for e in f.members() {
        if e.0 >= m {
            out.push(FrameViolation::EdgeOutOfRange { edge: e });
        }
    }
    if !out.is_empty() {
        return out;
    }
    if f.contains(f.owner) {
        out.push(FrameViolation::OwnerEdgePresent);
    }
    let owner = g.edge(f.owner);
    if f.path.start != owner.tail {
        out.push(FrameViolation::PathWrongStart { expected: owner.tail, got: f.path.start });
    }
    match walk(g, f.path.start, &f.path.edges) {
        Err(index) => out.push(FrameViolation::PathBroken { index }),
        Ok(end) if end != owner.head => out.push(FrameViolation::PathWrongEnd { expected: owner.head, got: end }),
        Ok(_) => {}
    }
    for (c, cycle) in f.cycles.iter().enumerate() {
        let Some(&first) = cycle.first() else {
            out.push(FrameViolation::EmptyCycle { cycle: c });
            continue;
        };
        // An undirected cycle may be walked from either end of its first edge.
        let starts: &[NodeId] =
            if g.directed() { &[g.edge(first).tail] } else { &[g.edge(first).tail, g.edge(first).head] };
        let mut best = None;
        for &start in starts {
            match walk(g, start, cycle) {
                Ok(end) if end == start => {
                    best = None;
                    break;
                }
                Ok(_) => best = best.or(Some(FrameViolation::CycleNotClosed { cycle: c })),
                Err(index) => best = Some(best.unwrap_or(FrameViolation::CycleBroken { cycle: c, index })),
            }
        }
        out.extend(best);
    }
    let mut seen = vec![false; m];
    for e in f.members() {
        if std::mem::replace(&mut seen[e.0], true) {
            out.push(FrameViolation::NotEdgeDisjoint { edge: e });
        }
    }
    out
}

/// Frame of `e` in a labeled L_{k,r}.
pub fn build_frame(l: &LabeledGraph, e: EdgeId) -> Result<Frame, FrameError> {
    let layout = CgkLayout::from_graph(l)?;
    build_frame_with(l, &layout, e)
}

pub fn build_frame_with(l: &LabeledGraph, layout: &CgkLayout, e: EdgeId) -> Result<Frame, FrameError> {
    let (copy, side, _) = layout.edge_origin(l, e)?;
    let path = match detour_nodes(l, layout, &copy.address, side)? {
        Some(allowed) => unique_bfs_path_within(l, e, Some(&allowed))?,
        None => unique_bfs_path_excluding(l, e)?,
    };
    let mut cycles = Vec::new();
    if let Some((&own, parent)) = copy.address.split_last() {
        let nodes = path.nodes(l);
        let mut address = parent.to_vec();
        for i in 0..layout.params.r {
            if i == own {
                continue;
            }
            address.push(i);
            if !nodes.iter().any(|&v| layout.node_in_copy(v, &address)) {
                let sibling = layout.copy(&address).ok_or(InstanceError::Unlabeled)?;
                cycles.push(sibling.level_cycle());
            }
            address.pop();
        }
    }
    Ok(Frame { owner: e, path, cycles })
}

/// Nodes the detour of an edge introduced by the copy at `address` may use,
/// or `None` for the root copy.
fn detour_nodes(
    l: &LabeledGraph,
    layout: &CgkLayout,
    address: &[u32],
    side: PathSide,
) -> Result<Option<Vec<bool>>, FrameError> {
    let Some((&own, parent)) = address.split_last() else {
        return Ok(None);
    };
    let r = layout.params.r as i64;
    let step = match side {
        PathSide::Source => 1,
        PathSide::Sink => -1,
    };
    let mut next = own as i64 + step;
    let closed_root = parent.is_empty() && layout.closed;
    if closed_root {
        next = next.rem_euclid(r);
    }
    let mut allowed: Vec<bool> = l.nodes().map(|v| layout.node_in_copy(v, address)).collect();
    if (0..r).contains(&next) {
        let mut sibling = parent.to_vec();
        sibling.push(next as u32);
        for v in l.nodes() {
            allowed[v.0] |= layout.node_in_copy(v, &sibling);
        }
    } else {
        let p = layout.copy(parent).ok_or(InstanceError::Unlabeled)?;
        for v in [p.source, p.sink].into_iter().flatten() {
            allowed[v.0] = true;
        }
    }
    Ok(Some(allowed))
}

/// One frame per edge with a symmetric membership relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrameFamily {
    frames: Vec<Frame>,
    #[serde(skip)]
    membership: Vec<bool>,
}

impl FrameFamily {
    /// Validates every frame and checks symmetry over all ordered pairs.
    pub fn from_frames(g: &LabeledGraph, frames: Vec<Frame>) -> Result<Self, FrameError> {
        let m = g.m();
        if frames.len() != m {
            return Err(FrameError::Count { frames: frames.len(), edges: m });
        }
        let mut membership = vec![false; m * m];
        for (i, f) in frames.iter().enumerate() {
            if f.owner.0 != i {
                return Err(FrameError::Misplaced { owner: f.owner, index: i });
            }
            let violations = validate_frame(g, f);
            if !violations.is_empty() {
                return Err(FrameError::Invalid { edge: f.owner, violations });
            }
            for e in f.members() {
                membership[i * m + e.0] = true;
            }
        }
        for a in 0..m {
            for b in 0..m {
                if membership[a * m + b] && !membership[b * m + a] {
                    return Err(FrameError::Asymmetric { e1: EdgeId(a), e2: EdgeId(b) });
                }
            }
        }
        Ok(FrameFamily { frames, membership })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, e: EdgeId) -> &Frame {
        &self.frames[e.0]
    }

    /// Whether `e2` belongs to the frame of `e1`.
    pub fn contains(&self, e1: EdgeId, e2: EdgeId) -> bool {
        self.membership[e1.0 * self.frames.len() + e2.0]
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }
}

/// Frames for every edge of a labeled L_{k,r}, validated and symmetric.
pub fn build_frame_family(l: &LabeledGraph) -> Result<FrameFamily, FrameError> {
    let layout = CgkLayout::from_graph(l)?;
    let frames = l.edge_ids().map(|e| build_frame_with(l, &layout, e)).collect::<Result<Vec<_>, _>>()?;
    FrameFamily::from_frames(l, frames)
}
