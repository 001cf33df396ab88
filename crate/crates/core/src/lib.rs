// Errors carry exact rationals for diagnostics; matrix code indexes rows and columns together.
#![allow(clippy::result_large_err, clippy::needless_range_loop)]

pub mod export;
pub mod frames;
pub mod graph;
pub mod instances;
pub mod lift;
pub mod polytopes;
pub mod rational;
pub mod report;
pub mod solvers;
