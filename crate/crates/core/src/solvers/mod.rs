//! Exact integer optima by Held-Karp and exact LP optima by cutting planes.

pub mod held_karp;
pub mod lp;
pub mod simplex;

pub use held_karp::{
    enumerate_path, enumerate_tour, held_karp_path, held_karp_tour, is_permutation, witness_cost, DpResult,
    MAX_DP_NODES, MAX_ENUM_NODES,
};
pub use lp::{enumerate_cuts, lp_full_enumeration, lp_optimize, EnumeratedLp, LpResult, PoolCut};
pub use simplex::{dual_bound, DualSimplex, LpSolution, Row};

use crate::polytopes::{ConstraintWitness, PolytopeError};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("{n} nodes exceeds the limit of {limit}")]
    TooManyNodes { n: usize, limit: usize },
    #[error("{0} nodes is too few")]
    TooFewNodes(usize),
    #[error("scaled distances do not fit the 64-bit dynamic program")]
    DistanceOverflow,
    #[error("cannot allocate a table of {entries} entries")]
    OutOfMemory { entries: usize },
    #[error("node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("s and t are both node {0}")]
    SameTerminals(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("column {column} has negative cost and no upper bound")]
    Unbounded { column: usize },
    #[error("row has neither a lower nor an upper bound")]
    FreeRow,
    #[error("LP is infeasible")]
    Infeasible,
    #[error("pivot limit {0} reached")]
    PivotLimit(usize),
    #[error("separation returned only pooled cuts in round {rounds}")]
    Stalled { rounds: usize },
    #[error("final point violates {0}")]
    PostCheck(Box<ConstraintWitness>),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

impl SolverError {
    /// Errors caused by size or resource limits rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            SolverError::TooManyNodes { .. }
                | SolverError::DistanceOverflow
                | SolverError::OutOfMemory { .. }
                | SolverError::PivotLimit(_)
        )
    }
}
