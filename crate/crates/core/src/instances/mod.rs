//! Generators for the CGK and symmetric-path instance families.

mod cgk;
mod sympath;

pub use cgk::{build_cgk_g, build_cgk_l, classify_edge, CgkLayout, CgkParams, CopyInfo, EdgeClass, MAX_CGK_NODES};
pub use sympath::{build_sym_pair, cheung_vector, new_edges, unit_extension, SymPathParams, MAX_SYM_PARAM};

use crate::graph::{complete_edge_index, metric_closure, EdgeId, EdgeVector, GraphError, LabeledGraph, MetricInstance};

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("CGK parameters need k >= 1 and r >= 2, got k={k}, r={r}")]
    InvalidCgk { k: u32, r: u32 },
    #[error("symmetric path parameters need ell >= 1 and q >= 0, got ell={ell}, q={q}")]
    InvalidSym { ell: u32, q: u32 },
    #[error("instance exceeds the size limit of {limit}")]
    TooLarge { limit: u64 },
    #[error("graph is not a generated CGK instance")]
    NotCgk,
    #[error("graph is missing construction labels")]
    Unlabeled,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The metric closure of `g` together with `x` extended by zeros to the
/// complete graph. Values on parallel edges of `g` are added together.
pub fn extend_to_complete(g: &LabeledGraph, x: &EdgeVector) -> Result<(MetricInstance, EdgeVector), InstanceError> {
    g.check_vector(x)?;
    let metric = metric_closure(g)?;
    let n = g.n();
    let m = if g.directed() { n * (n - 1) } else { n * (n - 1) / 2 };
    let mut hat = EdgeVector::zeros(m);
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let idx = complete_edge_index(g.directed(), n, edge.tail, edge.head);
        hat[EdgeId(idx)] += &x[e];
    }
    Ok((metric, hat))
}

/// Objective `d . x` of a point on the complete graph of `inst`.
pub fn objective(inst: &MetricInstance, x: &EdgeVector) -> crate::rational::Rational {
    let k = inst.complete_graph();
    k.edge_ids().map(|e| k.weight(e) * &x[e]).sum()
}
