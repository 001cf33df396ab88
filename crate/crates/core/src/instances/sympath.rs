//! The undirected graphs G_{ell,q} and G'_{ell,q} with the Cheung point.
//!
//! Node order: s, the top path (ell+1 nodes, left to right), the bottom path,
//! the left clique, the right clique, t, and in G' the ell-1 connector nodes.

use serde::{Deserialize, Serialize};

use super::InstanceError;
use crate::graph::{EdgeId, EdgeLabel, EdgeVector, Family, LabeledGraph, NodeId, NodeLabel, SymEdgeRole, SymNodeRole};
use crate::rational::Rational;

/// Largest accepted ell and q; keeps the graphs far below memory limits.
pub const MAX_SYM_PARAM: u32 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymPathParams {
    pub ell: u32,
    pub q: u32,
}

impl SymPathParams {
    pub fn new(ell: u32, q: u32) -> Result<Self, InstanceError> {
        if ell < 1 {
            return Err(InstanceError::InvalidSym { ell, q });
        }
        if ell > MAX_SYM_PARAM || q > MAX_SYM_PARAM {
            return Err(InstanceError::TooLarge { limit: MAX_SYM_PARAM as u64 });
        }
        Ok(SymPathParams { ell, q })
    }

    pub fn clique_size(&self) -> usize {
        3 * self.q as usize + 3
    }

    /// 2(ell+1) + 2(3q+3) + 2.
    pub fn node_count(&self) -> usize {
        2 * (self.ell as usize + 1) + 2 * self.clique_size() + 2
    }

    /// 2 ell + 2 C(3q+3, 2) + 6(3q+3).
    pub fn edge_count(&self) -> usize {
        let c = self.clique_size();
        2 * self.ell as usize + c * (c - 1) + 6 * c
    }

    pub fn clique_value(&self) -> Rational {
        let q = self.q as i64;
        (Rational::from_integer(2) - Rational::new(1, q + 1)) / Rational::from_integer(3 * q + 2)
    }

    pub fn link_value(&self) -> Rational {
        Rational::new(1, 3 * self.q as i64 + 3)
    }

    /// 2 ell + 6q + 9.
    pub fn cheung_objective(&self) -> Rational {
        Rational::from_integer(2 * self.ell as i64 + 6 * self.q as i64 + 9)
    }
}

/// G_{ell,q} and G'_{ell,q}. Edge ids of G are preserved in G'; the ell new
/// edges come last, ordered from s to t.
pub fn build_sym_pair(p: SymPathParams) -> Result<(LabeledGraph, LabeledGraph), InstanceError> {
    let p = SymPathParams::new(p.ell, p.q)?;
    let ell = p.ell as usize;
    let c = p.clique_size();
    let n = p.node_count();
    let s = NodeId(0);
    let (top, bottom, left, right) = (1, 2 + ell, 2 * ell + 3, 2 * ell + 3 + c);
    let t = NodeId(n - 1);

    let mut labels = vec![NodeLabel::Sym { role: SymNodeRole::S, index: 0 }];
    for (role, count) in [
        (SymNodeRole::TopPath, ell + 1),
        (SymNodeRole::BottomPath, ell + 1),
        (SymNodeRole::LeftClique, c),
        (SymNodeRole::RightClique, c),
    ] {
        labels.extend((0..count).map(|i| NodeLabel::Sym { role, index: i as u32 }));
    }
    labels.push(NodeLabel::Sym { role: SymNodeRole::T, index: 0 });

    let mut g = LabeledGraph::new(false, n).expect("n >= 1");
    let one = Rational::one();
    let add = |g: &mut LabeledGraph, a: NodeId, b: NodeId, role: SymEdgeRole| {
        g.add_labeled_edge(a, b, one.clone(), Some(EdgeLabel::Sym { role })).expect("valid edge");
    };
    for path in [top, bottom] {
        for i in 0..ell {
            add(&mut g, NodeId(path + i), NodeId(path + i + 1), SymEdgeRole::Path);
        }
    }
    for clique in [left, right] {
        for i in 0..c {
            for j in i + 1..c {
                add(&mut g, NodeId(clique + i), NodeId(clique + j), SymEdgeRole::Clique);
            }
        }
    }
    for (ends, clique, terminal) in [([top, bottom], left, s), ([top + ell, bottom + ell], right, t)] {
        for end in ends {
            for i in 0..c {
                add(&mut g, NodeId(end), NodeId(clique + i), SymEdgeRole::Link);
            }
        }
        for i in 0..c {
            add(&mut g, terminal, NodeId(clique + i), SymEdgeRole::Link);
        }
    }
    debug_assert_eq!(g.m(), p.edge_count());
    g.set_terminals(Some(s), Some(t)).expect("in range");
    g.set_node_labels(labels.clone());
    g.set_family(Some(Family::SymPath { ell: p.ell, q: p.q, closing_path: false }));

    let mut gp = LabeledGraph::new(false, n + ell - 1).expect("n >= 1");
    for e in g.edge_ids() {
        let edge = g.edge(e);
        gp.add_labeled_edge(edge.tail, edge.head, one.clone(), g.edge_label(e).cloned()).expect("valid edge");
    }
    let mut chain = vec![s];
    chain.extend((0..ell - 1).map(|i| NodeId(n + i)));
    chain.push(t);
    for w in chain.windows(2) {
        add(&mut gp, w[0], w[1], SymEdgeRole::New);
    }
    labels.extend((0..ell - 1).map(|i| NodeLabel::Sym { role: SymNodeRole::Connector, index: i as u32 }));
    gp.set_terminals(Some(s), Some(t)).expect("in range");
    gp.set_node_labels(labels);
    gp.set_family(Some(Family::SymPath { ell: p.ell, q: p.q, closing_path: true }));
    Ok((g, gp))
}

fn sym_role(g: &LabeledGraph, e: EdgeId) -> Option<SymEdgeRole> {
    match g.edge_label(e) {
        Some(EdgeLabel::Sym { role }) => Some(*role),
        _ => None,
    }
}

/// The fractional point on G_{ell,q}: 1 on path edges, the clique value inside
/// cliques and the link value elsewhere.
pub fn cheung_vector(p: SymPathParams) -> Result<EdgeVector, InstanceError> {
    let (g, _) = build_sym_pair(p)?;
    Ok(cheung_vector_on(&g, p))
}

pub(crate) fn cheung_vector_on(g: &LabeledGraph, p: SymPathParams) -> EdgeVector {
    let (clique, link) = (p.clique_value(), p.link_value());
    g.edge_ids()
        .map(|e| match sym_role(g, e) {
            Some(SymEdgeRole::Path) | Some(SymEdgeRole::New) => Rational::one(),
            Some(SymEdgeRole::Clique) => clique.clone(),
            _ => link.clone(),
        })
        .collect()
}

/// Extends a point on G to G' by putting 1 on every new edge.
pub fn unit_extension(gp: &LabeledGraph, x: &EdgeVector) -> EdgeVector {
    gp.edge_ids().map(|e| if e.0 < x.len() { x[e].clone() } else { Rational::one() }).collect()
}

/// Edges of G' that are not in G.
pub fn new_edges(gp: &LabeledGraph) -> Vec<EdgeId> {
    gp.edge_ids().filter(|&e| sym_role(gp, e) == Some(SymEdgeRole::New)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn p(ell: u32, qq: u32) -> SymPathParams {
        SymPathParams::new(ell, qq).unwrap()
    }

    #[test]
    fn counts() {
        let (g, gp) = build_sym_pair(p(4, 1)).unwrap();
        assert_eq!((g.n(), g.m()), (24, 74));
        assert_eq!((gp.n(), gp.m()), (27, 78));
        let (g, _) = build_sym_pair(p(3, 0)).unwrap();
        assert_eq!((g.n(), g.m()), (16, 30));
        let (g, gp) = build_sym_pair(p(1, 0)).unwrap();
        assert_eq!(g.n(), 12);
        assert_eq!((gp.n(), gp.m()), (12, g.m() + 1));
        assert!(gp.find_edge(g.s().unwrap(), g.t().unwrap()).is_some());
    }

    #[test]
    fn cheung_values() {
        let x = cheung_vector(p(3, 0)).unwrap();
        let mut values: Vec<_> = x.iter().cloned().collect();
        values.sort();
        values.dedup();
        assert_eq!(values, vec![q(1, 3), q(1, 2), q(1, 1)]);
        assert_eq!(x.sum(), q(15, 1));
        let x = cheung_vector(p(4, 1)).unwrap();
        let mut values: Vec<_> = x.iter().cloned().collect();
        values.sort();
        values.dedup();
        assert_eq!(values, vec![q(1, 6), q(3, 10), q(1, 1)]);
        assert_eq!(x.sum(), q(23, 1));
    }

    #[test]
    fn clique_node_degree_is_two() {
        let pp = p(4, 1);
        let (g, _) = build_sym_pair(pp).unwrap();
        let x = cheung_vector_on(&g, pp);
        let v = NodeId(2 * 4 + 3);
        assert!(matches!(g.node_label(v), Some(NodeLabel::Sym { role: SymNodeRole::LeftClique, .. })));
        assert_eq!(x.sum_over(g.out_edges(v)), q(2, 1));
    }

    #[test]
    fn rejects_ell_zero() {
        assert!(matches!(SymPathParams::new(0, 1), Err(InstanceError::InvalidSym { .. })));
    }
}
