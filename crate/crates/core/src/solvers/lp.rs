//! Exact LP optima of the standard relaxations over a complete metric graph.
//!
//! `lp_optimize` starts from box and degree or balance constraints, solves
//! with the dual simplex, separates violated cuts by max-flow, adds them to a
//! deduplicated pool and re-solves from the warm basis until no cut is
//! violated. `lp_full_enumeration` materializes every cut up front and is
//! only meant as an oracle for small n.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::simplex::{DualSimplex, Row};
use super::SolverError;
use crate::graph::{
    all_violated_cuts, CutDirection, CutRestriction, CutSide, EdgeVector, LabeledGraph, MetricInstance, NodeId,
};
use crate::polytopes::{check_point, cut_families, PolytopeError, PolytopeKind};
use crate::rational::Rational;

/// Largest n accepted by [`lp_full_enumeration`].
pub const MAX_ENUMERATION_NODES: usize = 10;

/// A cut constraint `x(delta(S)) >= threshold` in canonical form: directed
/// in-cuts are stored as out-cuts of the complement, undirected cuts use the
/// side without node 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PoolCut {
    pub set: Vec<NodeId>,
    pub direction: CutDirection,
    pub threshold: Rational,
}

impl PoolCut {
    pub fn canonical(n: usize, set: &[NodeId], direction: CutDirection, threshold: Rational) -> PoolCut {
        let mut inside = vec![false; n];
        for v in set {
            inside[v.0] = true;
        }
        let flip = match direction {
            CutDirection::In => true,
            CutDirection::Undirected => inside[0],
            CutDirection::Out => false,
        };
        let direction = if direction == CutDirection::In { CutDirection::Out } else { direction };
        let set = (0..n).filter(|&v| inside[v] != flip).map(NodeId).collect();
        PoolCut { set, direction, threshold }
    }

    fn row(&self, g: &LabeledGraph) -> Row {
        let mut inside = vec![false; g.n()];
        for v in &self.set {
            inside[v.0] = true;
        }
        let coeffs = g
            .edge_ids()
            .filter(|&e| {
                let edge = g.edge(e);
                let (a, b) = (inside[edge.tail.0], inside[edge.head.0]);
                match self.direction {
                    CutDirection::Out => a && !b,
                    CutDirection::In => !a && b,
                    CutDirection::Undirected => a != b,
                }
            })
            .map(|e| (e.0, Rational::one()))
            .collect();
        Row::at_least(coeffs, self.threshold.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpResult {
    pub polytope: PolytopeKind,
    pub value: Rational,
    /// Point over the edges of the complete graph, in its edge order.
    pub point: EdgeVector,
    pub cuts: Vec<PoolCut>,
    pub rounds: usize,
    pub pivots: usize,
}

/// Everything needed to re-check an enumerated LP by weak duality.
#[derive(Clone, Debug)]
pub struct EnumeratedLp {
    pub result: LpResult,
    pub costs: Vec<Rational>,
    pub rows: Vec<Row>,
    pub duals: Vec<Rational>,
}

fn prepare(kind: PolytopeKind, inst: &MetricInstance) -> Result<LabeledGraph, SolverError> {
    let g = inst.complete_graph();
    if g.n() < 2 {
        return Err(SolverError::TooFewNodes(g.n()));
    }
    // Surfaces orientation and terminal errors before any solving.
    check_point(kind, &g, &EdgeVector::zeros(g.m()))?;
    Ok(g)
}

/// Degree, in-degree/out-degree or balance equalities, by node.
fn degree_rows(kind: PolytopeKind, g: &LabeledGraph) -> Vec<Row> {
    let ones = |edges: &[crate::graph::EdgeId]| edges.iter().map(|e| (e.0, Rational::one())).collect::<Vec<_>>();
    let int = Rational::from_integer;
    let mut rows = Vec::new();
    for v in g.nodes() {
        match kind {
            PolytopeKind::St => rows.push(Row::equal(ones(g.out_edges(v)), int(2))),
            PolytopeKind::Sp { s, t } => {
                let rhs = if v == s || v == t { 1 } else { 2 };
                rows.push(Row::equal(ones(g.out_edges(v)), int(rhs)));
            }
            PolytopeKind::At => {
                rows.push(Row::equal(ones(g.out_edges(v)), int(1)));
                rows.push(Row::equal(ones(g.in_edges(v)), int(1)));
            }
            PolytopeKind::Ap { s, t } => {
                rows.push(Row::equal(ones(g.out_edges(v)), int((v != t) as i64)));
                rows.push(Row::equal(ones(g.in_edges(v)), int((v != s) as i64)));
            }
            PolytopeKind::AtBal => {
                let mut coeffs = ones(g.out_edges(v));
                coeffs.extend(g.in_edges(v).iter().map(|e| (e.0, -Rational::one())));
                rows.push(Row::equal(coeffs, Rational::zero()));
            }
        }
    }
    rows
}

fn new_simplex(g: &LabeledGraph) -> Result<DualSimplex, SolverError> {
    DualSimplex::new(g.weights().to_vec(), vec![Some(Rational::one()); g.m()])
}

/// Exact optimum of `d . x` over the relaxation `kind` of the complete graph
/// on the metric, by cutting planes.
pub fn lp_optimize(kind: PolytopeKind, inst: &MetricInstance) -> Result<LpResult, SolverError> {
    let g = prepare(kind, inst)?;
    let mut lp = new_simplex(&g)?;
    for row in degree_rows(kind, &g) {
        lp.add_row(row)?;
    }
    let mut pool: HashSet<PoolCut> = HashSet::new();
    let mut cuts = Vec::new();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let sol = lp.solve()?;
        let point = EdgeVector::new(sol.x);
        let mut added = 0;
        let mut violated = 0;
        for (threshold, side, restriction) in cut_families(kind) {
            for cut in all_violated_cuts(&g, &point, &threshold, side, restriction).map_err(PolytopeError::from)? {
                violated += 1;
                let pc = PoolCut::canonical(g.n(), &cut.set, cut.direction, cut.threshold);
                if pool.insert(pc.clone()) {
                    lp.add_row(pc.row(&g))?;
                    cuts.push(pc);
                    added += 1;
                }
            }
        }
        if violated > 0 && added == 0 {
            return Err(SolverError::Stalled { rounds });
        }
        if violated == 0 {
            if let Some(w) = check_point(kind, &g, &point)? {
                return Err(SolverError::PostCheck(Box::new(w)));
            }
            return Ok(LpResult { polytope: kind, value: sol.value, point, cuts, rounds, pivots: sol.pivots });
        }
    }
}

fn in_family(restriction: CutRestriction, inside: &[bool]) -> bool {
    match restriction {
        CutRestriction::All => true,
        CutRestriction::StCrossing { s, t } => inside[s.0] != inside[t.0],
        CutRestriction::StNonCrossing { s, t } => inside[s.0] == inside[t.0],
        CutRestriction::Avoiding(v) => !inside[v.0],
    }
}

fn directions(directed: bool, side: CutSide) -> &'static [CutDirection] {
    match (directed, side) {
        (false, _) => &[CutDirection::Undirected],
        (true, CutSide::Both) => &[CutDirection::Out, CutDirection::In],
        (true, CutSide::OutOnly) => &[CutDirection::Out],
        (true, CutSide::InOnly) => &[CutDirection::In],
    }
}

/// Every cut constraint of the polytope on an n-node complete graph,
/// deduplicated in canonical form.
pub fn enumerate_cuts(kind: PolytopeKind, n: usize, directed: bool) -> Vec<PoolCut> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) - 1 {
        let inside: Vec<bool> = (0..n).map(|v| mask & (1 << v) != 0).collect();
        let set: Vec<NodeId> = (0..n).filter(|&v| inside[v]).map(NodeId).collect();
        for (threshold, side, restriction) in cut_families(kind) {
            if !in_family(restriction, &inside) {
                continue;
            }
            for &dir in directions(directed, side) {
                let pc = PoolCut::canonical(n, &set, dir, threshold.clone());
                if seen.insert(pc.clone()) {
                    out.push(pc);
                }
            }
        }
    }
    out
}

/// The same LP with all cuts materialized before the first solve.
pub fn lp_full_enumeration(kind: PolytopeKind, inst: &MetricInstance) -> Result<EnumeratedLp, SolverError> {
    let n = inst.n();
    if n > MAX_ENUMERATION_NODES {
        return Err(SolverError::TooManyNodes { n, limit: MAX_ENUMERATION_NODES });
    }
    let g = prepare(kind, inst)?;
    let mut lp = new_simplex(&g)?;
    for row in degree_rows(kind, &g) {
        lp.add_row(row)?;
    }
    let cuts = enumerate_cuts(kind, n, g.directed());
    for pc in &cuts {
        lp.add_row(pc.row(&g))?;
    }
    let sol = lp.solve()?;
    let result = LpResult {
        polytope: kind,
        value: sol.value,
        point: EdgeVector::new(sol.x),
        cuts,
        rounds: 1,
        pivots: sol.pivots,
    };
    Ok(EnumeratedLp { result, costs: g.weights().to_vec(), rows: lp.rows().to_vec(), duals: sol.duals })
}
