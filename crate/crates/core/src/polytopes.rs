//! Exact membership tests for ST, SP, AT, AP and AT_bal and their cones.
//!
//! Constraints are checked in a fixed order: box, then degree or balance by
//! node, then cut families by flow. The first violation is returned as a
//! witness that can be re-evaluated against the point.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{
    cut_capacity, global_min_cut_check, CutDirection, CutRestriction, CutSide, EdgeId, EdgeVector, GraphError,
    LabeledGraph, NodeId,
};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "polytope", rename_all = "snake_case")]
pub enum PolytopeKind {
    St,
    Sp { s: NodeId, t: NodeId },
    At,
    Ap { s: NodeId, t: NodeId },
    AtBal,
}

impl PolytopeKind {
    /// Parses `st|sp|at|ap|atbal`; the path kinds take `s`, `t`.
    pub fn from_name(name: &str, s: Option<NodeId>, t: Option<NodeId>) -> Result<Self, PolytopeError> {
        let name: PolytopeName = name.parse()?;
        name.with_terminals(s, t)
    }

    pub fn name(&self) -> PolytopeName {
        match self {
            PolytopeKind::St => PolytopeName::St,
            PolytopeKind::Sp { .. } => PolytopeName::Sp,
            PolytopeKind::At => PolytopeName::At,
            PolytopeKind::Ap { .. } => PolytopeName::Ap,
            PolytopeKind::AtBal => PolytopeName::AtBal,
        }
    }

    pub fn directed(&self) -> bool {
        !matches!(self, PolytopeKind::St | PolytopeKind::Sp { .. })
    }

    pub fn terminals(&self) -> Option<(NodeId, NodeId)> {
        match *self {
            PolytopeKind::Sp { s, t } | PolytopeKind::Ap { s, t } => Some((s, t)),
            _ => None,
        }
    }
}

/// Polytope tag without terminals, as named on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolytopeName {
    St,
    Sp,
    At,
    Ap,
    AtBal,
}

impl PolytopeName {
    pub fn with_terminals(self, s: Option<NodeId>, t: Option<NodeId>) -> Result<PolytopeKind, PolytopeError> {
        let pair = || match (s, t) {
            (Some(s), Some(t)) if s != t => Ok((s, t)),
            (Some(s), Some(_)) => Err(PolytopeError::SameTerminals(s)),
            _ => Err(PolytopeError::MissingTerminals(self)),
        };
        Ok(match self {
            PolytopeName::St => PolytopeKind::St,
            PolytopeName::At => PolytopeKind::At,
            PolytopeName::AtBal => PolytopeKind::AtBal,
            PolytopeName::Sp => {
                let (s, t) = pair()?;
                PolytopeKind::Sp { s, t }
            }
            PolytopeName::Ap => {
                let (s, t) = pair()?;
                PolytopeKind::Ap { s, t }
            }
        })
    }
}

impl FromStr for PolytopeName {
    type Err = PolytopeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "st" => Ok(PolytopeName::St),
            "sp" => Ok(PolytopeName::Sp),
            "at" => Ok(PolytopeName::At),
            "ap" => Ok(PolytopeName::Ap),
            "atbal" | "at_bal" | "at-bal" => Ok(PolytopeName::AtBal),
            _ => Err(PolytopeError::UnknownKind(s.to_string())),
        }
    }
}

impl fmt::Display for PolytopeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolytopeName::St => "st",
            PolytopeName::Sp => "sp",
            PolytopeName::At => "at",
            PolytopeName::Ap => "ap",
            PolytopeName::AtBal => "atbal",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PolytopeError {
    #[error("unknown polytope {0:?}; expected st, sp, at, ap or atbal")]
    UnknownKind(String),
    #[error("polytope {0} needs distinct terminals s and t")]
    MissingTerminals(PolytopeName),
    #[error("terminals s and t are both node {0}")]
    SameTerminals(NodeId),
    #[error("polytope {kind} needs a {} graph", if *.directed { "directed" } else { "undirected" })]
    WrongGraph { kind: PolytopeName, directed: bool },
    #[error("cone vector has {got} coordinates, expected {expected}")]
    ConeDimension { expected: usize, got: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A violated constraint with both sides evaluated exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum ConstraintWitness {
    /// `value` lies outside [0, 1].
    Box { edge: EdgeId, value: Rational },
    /// `x(delta(node))` in `direction` is `lhs` but must equal `rhs`.
    Degree { node: NodeId, direction: CutDirection, lhs: Rational, rhs: Rational },
    /// `x(delta+(node)) = out` differs from `x(delta-(node)) = into`.
    Balance { node: NodeId, out: Rational, into: Rational },
    /// The cut of `set` in `direction` has capacity `lhs` below `rhs`.
    Cut { set: Vec<NodeId>, direction: CutDirection, lhs: Rational, rhs: Rational },
    /// Cone vector with a negative leading coordinate.
    NegativeMultiplier { lambda: Rational },
    /// Cone vector with zero leading coordinate but a nonzero coordinate.
    NonzeroApex { coordinate: usize, value: Rational },
}

impl ConstraintWitness {
    pub fn kind(&self) -> &'static str {
        match self {
            ConstraintWitness::Box { .. } => "box",
            ConstraintWitness::Degree { .. } => "degree",
            ConstraintWitness::Balance { .. } => "balance",
            ConstraintWitness::Cut { .. } => "cut",
            ConstraintWitness::NegativeMultiplier { .. } => "negative multiplier",
            ConstraintWitness::NonzeroApex { .. } => "nonzero apex",
        }
    }

    /// Recomputes the constraint from `x` and reports whether it is violated.
    /// Cone witnesses are re-evaluated by [`ConstraintWitness::violated_by_cone`].
    pub fn violated_by(&self, g: &LabeledGraph, x: &EdgeVector) -> bool {
        match self {
            ConstraintWitness::Box { edge, .. } => {
                let v = &x[*edge];
                v.is_negative() || *v > Rational::one()
            }
            ConstraintWitness::Degree { node, direction, rhs, .. } => degree(g, x, *node, *direction) != *rhs,
            ConstraintWitness::Balance { node, .. } => {
                degree(g, x, *node, CutDirection::Out) != degree(g, x, *node, CutDirection::In)
            }
            ConstraintWitness::Cut { set, direction, rhs, .. } => cut_capacity(g, x, set, *direction) < *rhs,
            _ => false,
        }
    }

    /// Re-evaluation against a cone vector `(lambda, lambda x)`.
    pub fn violated_by_cone(&self, g: &LabeledGraph, v: &[Rational]) -> bool {
        match self {
            ConstraintWitness::NegativeMultiplier { .. } => v[0].is_negative(),
            ConstraintWitness::NonzeroApex { coordinate, .. } => v[0].is_zero() && !v[*coordinate].is_zero(),
            _ => {
                if !v[0].is_positive() {
                    return false;
                }
                let inv = v[0].recip();
                let x: EdgeVector = v[1..].iter().map(|c| c * &inv).collect();
                self.violated_by(g, &x)
            }
        }
    }
}

impl fmt::Display for ConstraintWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintWitness::Box { edge, value } => write!(f, "box: x[{edge}] = {value} not in [0,1]"),
            ConstraintWitness::Degree { node, direction, lhs, rhs } => {
                write!(f, "degree: {direction:?} degree of node {node} is {lhs}, expected {rhs}")
            }
            ConstraintWitness::Balance { node, out, into } => {
                write!(f, "balance: node {node} has out {out} but in {into}")
            }
            ConstraintWitness::Cut { set, direction, lhs, rhs } => {
                write!(f, "cut: {direction:?} cut of {} nodes has capacity {lhs} < {rhs}", set.len())
            }
            ConstraintWitness::NegativeMultiplier { lambda } => write!(f, "negative multiplier {lambda}"),
            ConstraintWitness::NonzeroApex { coordinate, value } => {
                write!(f, "zero multiplier with coordinate {coordinate} = {value}")
            }
        }
    }
}

fn degree(g: &LabeledGraph, x: &EdgeVector, v: NodeId, direction: CutDirection) -> Rational {
    let edges = match direction {
        CutDirection::In => g.in_edges(v),
        _ => g.out_edges(v),
    };
    x.sum_over(edges)
}

fn check_shape(kind: PolytopeKind, g: &LabeledGraph, x: &EdgeVector) -> Result<(), PolytopeError> {
    if kind.directed() != g.directed() {
        return Err(PolytopeError::WrongGraph { kind: kind.name(), directed: kind.directed() });
    }
    if let Some((s, t)) = kind.terminals() {
        for v in [s, t] {
            if v.0 >= g.n() {
                return Err(GraphError::NodeOutOfRange(v.0, g.n()).into());
            }
        }
        if s == t {
            return Err(PolytopeError::SameTerminals(s));
        }
    }
    g.check_vector(x)?;
    Ok(())
}

/// Degree and balance constraints in node order.
fn degree_constraints(kind: PolytopeKind, g: &LabeledGraph, x: &EdgeVector) -> Option<ConstraintWitness> {
    let one = Rational::one();
    let two = Rational::from_integer(2);
    let zero = Rational::zero();
    let equal = |v: NodeId, direction: CutDirection, rhs: &Rational| {
        let lhs = degree(g, x, v, direction);
        (lhs != *rhs).then(|| ConstraintWitness::Degree { node: v, direction, lhs, rhs: rhs.clone() })
    };
    for v in g.nodes() {
        let found = match kind {
            PolytopeKind::St => equal(v, CutDirection::Undirected, &two),
            PolytopeKind::Sp { s, t } => {
                let rhs = if v == s || v == t { &one } else { &two };
                equal(v, CutDirection::Undirected, rhs)
            }
            PolytopeKind::At => equal(v, CutDirection::Out, &one).or_else(|| equal(v, CutDirection::In, &one)),
            PolytopeKind::Ap { s, t } => {
                let out = if v == t { &zero } else { &one };
                let into = if v == s { &zero } else { &one };
                equal(v, CutDirection::Out, out).or_else(|| equal(v, CutDirection::In, into))
            }
            PolytopeKind::AtBal => {
                let out = degree(g, x, v, CutDirection::Out);
                let into = degree(g, x, v, CutDirection::In);
                (out != into).then_some(ConstraintWitness::Balance { node: v, out, into })
            }
        };
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Cut families of each polytope as (threshold, side, restriction).
pub(crate) fn cut_families(kind: PolytopeKind) -> Vec<(Rational, CutSide, CutRestriction)> {
    let one = Rational::one();
    let two = Rational::from_integer(2);
    match kind {
        PolytopeKind::St => vec![(two, CutSide::Both, CutRestriction::All)],
        PolytopeKind::Sp { s, t } => vec![
            (two, CutSide::Both, CutRestriction::StNonCrossing { s, t }),
            (one, CutSide::Both, CutRestriction::StCrossing { s, t }),
        ],
        PolytopeKind::At | PolytopeKind::AtBal => vec![(one, CutSide::Both, CutRestriction::All)],
        PolytopeKind::Ap { s, t } => vec![
            (one.clone(), CutSide::OutOnly, CutRestriction::Avoiding(t)),
            (one, CutSide::InOnly, CutRestriction::Avoiding(s)),
        ],
    }
}

/// First violated constraint of `x` for polytope `kind` on `g`, or `None`.
pub fn check_point(
    kind: PolytopeKind,
    g: &LabeledGraph,
    x: &EdgeVector,
) -> Result<Option<ConstraintWitness>, PolytopeError> {
    check_shape(kind, g, x)?;
    let one = Rational::one();
    if let Some(e) = g.edge_ids().find(|&e| x[e].is_negative() || x[e] > one) {
        return Ok(Some(ConstraintWitness::Box { edge: e, value: x[e].clone() }));
    }
    if let Some(w) = degree_constraints(kind, g, x) {
        return Ok(Some(w));
    }
    if g.n() < 2 {
        return Ok(None);
    }
    for (threshold, side, restriction) in cut_families(kind) {
        if let Some(cut) = global_min_cut_check(g, x, &threshold, side, restriction)? {
            return Ok(Some(ConstraintWitness::Cut {
                set: cut.set,
                direction: cut.direction,
                lhs: cut.capacity,
                rhs: cut.threshold,
            }));
        }
    }
    Ok(None)
}

/// Membership of `v = (lambda, lambda x)` in the cone over the polytope.
pub fn check_cone_vector(
    kind: PolytopeKind,
    g: &LabeledGraph,
    v: &[Rational],
) -> Result<Option<ConstraintWitness>, PolytopeError> {
    if v.len() != g.m() + 1 {
        return Err(PolytopeError::ConeDimension { expected: g.m() + 1, got: v.len() });
    }
    let lambda = &v[0];
    if lambda.is_negative() {
        return Ok(Some(ConstraintWitness::NegativeMultiplier { lambda: lambda.clone() }));
    }
    if lambda.is_zero() {
        if kind.directed() != g.directed() {
            return Err(PolytopeError::WrongGraph { kind: kind.name(), directed: kind.directed() });
        }
        let nonzero = v.iter().enumerate().skip(1).find(|(_, c)| !c.is_zero());
        return Ok(nonzero.map(|(i, c)| ConstraintWitness::NonzeroApex { coordinate: i, value: c.clone() }));
    }
    let inv = lambda.recip();
    let x: EdgeVector = v[1..].iter().map(|c| c * &inv).collect();
    check_point(kind, g, &x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{build_cgk_l, build_sym_pair, cheung_vector, unit_extension, CgkParams, SymPathParams};
    use crate::rational::q;

    fn k4_cycle() -> (LabeledGraph, EdgeVector) {
        let g = LabeledGraph::complete(true, 4, &Rational::one()).unwrap();
        let x = g
            .edge_ids()
            .map(|e| {
                let edge = g.edge(e);
                if edge.head.0 == (edge.tail.0 + 1) % 4 {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        (g, x)
    }

    #[test]
    fn hamiltonian_cycle_is_in_at_and_atbal() {
        let (g, x) = k4_cycle();
        assert_eq!(check_point(PolytopeKind::At, &g, &x).unwrap(), None);
        assert_eq!(check_point(PolytopeKind::AtBal, &g, &x).unwrap(), None);
    }

    #[test]
    fn two_thirds_on_l23() {
        let l = build_cgk_l(CgkParams::new(2, 3).unwrap()).unwrap();
        let x = EdgeVector::constant(l.m(), q(2, 3));
        assert_eq!(check_point(PolytopeKind::AtBal, &l, &x).unwrap(), None);
        let w = check_point(PolytopeKind::At, &l, &x).unwrap().unwrap();
        assert!(matches!(&w, ConstraintWitness::Degree { lhs, rhs, .. } if *lhs == q(4, 3) && *rhs == q(1, 1)));
        assert!(w.violated_by(&l, &x));
    }

    #[test]
    fn cheung_point_and_its_extension() {
        let p = SymPathParams::new(3, 0).unwrap();
        let (g, gp) = build_sym_pair(p).unwrap();
        let x = cheung_vector(p).unwrap();
        let sp = PolytopeKind::Sp { s: g.s().unwrap(), t: g.t().unwrap() };
        assert_eq!(check_point(sp, &g, &x).unwrap(), None);
        assert_eq!(check_point(PolytopeKind::St, &gp, &unit_extension(&gp, &x)).unwrap(), None);
    }

    #[test]
    fn cone_vectors() {
        let (g, x) = k4_cycle();
        let zero = vec![Rational::zero(); g.m() + 1];
        for kind in [PolytopeKind::At, PolytopeKind::AtBal, PolytopeKind::Ap { s: NodeId(0), t: NodeId(1) }] {
            assert_eq!(check_cone_vector(kind, &g, &zero).unwrap(), None);
        }
        let mut neg = vec![q(-1, 1)];
        neg.extend(x.iter().cloned());
        let w = check_cone_vector(PolytopeKind::At, &g, &neg).unwrap().unwrap();
        assert_eq!(w.kind(), "negative multiplier");
        let mut scaled = vec![q(2, 5)];
        scaled.extend(x.iter().map(|v| v * q(2, 5)));
        assert_eq!(check_cone_vector(PolytopeKind::At, &g, &scaled).unwrap(), None);
        let mut apex = zero.clone();
        apex[3] = q(1, 7);
        let w = check_cone_vector(PolytopeKind::At, &g, &apex).unwrap().unwrap();
        assert!(w.violated_by_cone(&g, &apex));
        assert!(matches!(
            check_cone_vector(PolytopeKind::At, &g, &zero[1..]),
            Err(PolytopeError::ConeDimension { .. })
        ));
    }

    #[test]
    fn subtour_is_cut_off() {
        // Two directed 2-cycles on K_4 satisfy degrees but not cuts.
        let g = LabeledGraph::complete(true, 4, &Rational::one()).unwrap();
        let x: EdgeVector = g
            .edge_ids()
            .map(|e| {
                let edge = g.edge(e);
                if edge.tail.0 / 2 == edge.head.0 / 2 {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        let w = check_point(PolytopeKind::At, &g, &x).unwrap().unwrap();
        assert_eq!(w.kind(), "cut");
        assert!(w.violated_by(&g, &x));
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            PolytopeKind::from_name("sp", Some(NodeId(1)), None),
            Err(PolytopeError::MissingTerminals(PolytopeName::Sp))
        ));
        assert!(matches!(PolytopeKind::from_name("xt", None, None), Err(PolytopeError::UnknownKind(_))));
        assert_eq!(PolytopeKind::from_name("ATBAL", None, None).unwrap(), PolytopeKind::AtBal);
        let (g, x) = k4_cycle();
        assert!(matches!(check_point(PolytopeKind::St, &g, &x), Err(PolytopeError::WrongGraph { .. })));
    }
}
