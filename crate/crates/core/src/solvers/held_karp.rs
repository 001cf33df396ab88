//! Held-Karp subset dynamic programs for minimum hamiltonian cycles and
//! s-t paths, plus a factorial enumeration used as an oracle on small n.
//!
//! Distances are scaled to integers by their common denominator so the
//! table holds `u64`; the result is scaled back to an exact rational.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::graph::{MetricInstance, NodeId};
use crate::rational::Rational;

/// Hard cap on the number of nodes for the dynamic programs.
pub const MAX_DP_NODES: usize = 22;
/// Hard cap on the number of nodes for factorial enumeration.
pub const MAX_ENUM_NODES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DpResult {
    pub value: Rational,
    /// Tours list every node once starting at node 0; the closing edge back
    /// to the first node is implied. Paths run from s to t.
    pub witness: Vec<NodeId>,
}

const INF: u64 = u64::MAX;

struct Scaled {
    n: usize,
    denom: BigInt,
    dist: Vec<u64>,
}

impl Scaled {
    fn new(inst: &MetricInstance) -> Result<Self, SolverError> {
        let n = inst.n();
        if n > MAX_DP_NODES {
            return Err(SolverError::TooManyNodes { n, limit: MAX_DP_NODES });
        }
        let all: Vec<&Rational> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .map(|(u, v)| inst.distance(NodeId(u), NodeId(v)))
            .collect();
        let denom = Rational::common_denominator(all.iter().copied());
        // A tour or path uses at most n edges, so n * max must stay below INF.
        let cap = (INF - 1) / (n.max(1) as u64);
        let mut dist = Vec::with_capacity(n * n);
        for d in all {
            let scaled = d.numer() * (&denom / d.denom());
            match scaled.to_u64() {
                Some(v) if v <= cap => dist.push(v),
                _ => return Err(SolverError::DistanceOverflow),
            }
        }
        Ok(Scaled { n, denom, dist })
    }

    fn d(&self, u: usize, v: usize) -> u64 {
        self.dist[u * self.n + v]
    }

    fn value(&self, total: u64) -> Rational {
        Rational::from_bigints(BigInt::from(total), self.denom.clone())
    }
}

/// Subset table over the nodes other than `start`. `dp[mask][j]` is the
/// cheapest path from `start` through exactly the nodes in `mask`, ending at
/// the node of bit `j`.
struct Table {
    others: Vec<usize>,
    dp: Vec<u64>,
}

impl Table {
    fn fill(sc: &Scaled, start: usize) -> Result<Table, SolverError> {
        let others: Vec<usize> = (0..sc.n).filter(|&v| v != start).collect();
        let k = others.len();
        let size = (1usize << k).checked_mul(k).ok_or(SolverError::TooManyNodes { n: sc.n, limit: MAX_DP_NODES })?;
        let mut dp = Vec::new();
        dp.try_reserve_exact(size).map_err(|_| SolverError::OutOfMemory { entries: size })?;
        dp.resize(size, INF);
        for (j, &v) in others.iter().enumerate() {
            dp[(1 << j) * k + j] = sc.d(start, v);
        }
        for mask in 1usize..(1 << k) {
            for j in 0..k {
                let cur = dp[mask * k + j];
                if mask & (1 << j) == 0 || cur == INF {
                    continue;
                }
                for nxt in 0..k {
                    if mask & (1 << nxt) != 0 {
                        continue;
                    }
                    let cand = cur + sc.d(others[j], others[nxt]);
                    let slot = &mut dp[(mask | (1 << nxt)) * k + nxt];
                    if cand < *slot {
                        *slot = cand;
                    }
                }
            }
        }
        Ok(Table { others, dp })
    }

    fn get(&self, mask: usize, j: usize) -> u64 {
        self.dp[mask * self.others.len() + j]
    }

    /// Nodes of an optimal path from the start ending at bit `last`, start excluded.
    fn backtrack(&self, sc: &Scaled, mut mask: usize, mut last: usize) -> Vec<usize> {
        let mut rev = vec![self.others[last]];
        while mask != 1 << last {
            let here = self.get(mask, last);
            let prev_mask = mask & !(1 << last);
            let prev = (0..self.others.len())
                .filter(|&i| prev_mask & (1 << i) != 0)
                .find(|&i| {
                    let p = self.get(prev_mask, i);
                    p != INF && p + sc.d(self.others[i], self.others[last]) == here
                })
                .expect("dp entry has a predecessor");
            rev.push(self.others[prev]);
            mask = prev_mask;
            last = prev;
        }
        rev.reverse();
        rev
    }
}

/// Minimum-cost hamiltonian cycle.
pub fn held_karp_tour(inst: &MetricInstance) -> Result<DpResult, SolverError> {
    let sc = Scaled::new(inst)?;
    match sc.n {
        0 => return Err(SolverError::TooFewNodes(0)),
        1 => return Ok(DpResult { value: Rational::zero(), witness: vec![NodeId(0)] }),
        _ => {}
    }
    let table = Table::fill(&sc, 0)?;
    let k = sc.n - 1;
    let full = (1usize << k) - 1;
    let (best, last) =
        (0..k).map(|j| (table.get(full, j) + sc.d(table.others[j], 0), j)).min().expect("at least one other node");
    let mut witness = vec![NodeId(0)];
    witness.extend(table.backtrack(&sc, full, last).into_iter().map(NodeId));
    Ok(DpResult { value: sc.value(best), witness })
}

/// Minimum-cost hamiltonian path from `s` to `t`.
pub fn held_karp_path(inst: &MetricInstance, s: NodeId, t: NodeId) -> Result<DpResult, SolverError> {
    let sc = Scaled::new(inst)?;
    check_terminals(sc.n, s, t)?;
    let table = Table::fill(&sc, s.0)?;
    let k = sc.n - 1;
    let full = (1usize << k) - 1;
    let last = table.others.iter().position(|&v| v == t.0).expect("t differs from s");
    let mut witness = vec![s];
    witness.extend(table.backtrack(&sc, full, last).into_iter().map(NodeId));
    Ok(DpResult { value: sc.value(table.get(full, last)), witness })
}

fn check_terminals(n: usize, s: NodeId, t: NodeId) -> Result<(), SolverError> {
    for v in [s, t] {
        if v.0 >= n {
            return Err(SolverError::NodeOutOfRange { node: v.0, n });
        }
    }
    if s == t {
        return Err(SolverError::SameTerminals(s.0));
    }
    Ok(())
}

/// Exact cost of a witness: a closed tour when `closed`, else an open path.
pub fn witness_cost(inst: &MetricInstance, witness: &[NodeId], closed: bool) -> Rational {
    let mut total: Rational = witness.windows(2).map(|w| inst.distance(w[0], w[1])).sum();
    if closed && witness.len() > 1 {
        total += inst.distance(witness[witness.len() - 1], witness[0]);
    }
    total
}

/// Whether `witness` lists every node of an n-node instance exactly once.
pub fn is_permutation(witness: &[NodeId], n: usize) -> bool {
    let mut seen = vec![false; n];
    witness.len() == n && witness.iter().all(|v| v.0 < n && !std::mem::replace(&mut seen[v.0], true))
}

/// Factorial enumeration of all tours (node 0 fixed first) in exact rationals.
pub fn enumerate_tour(inst: &MetricInstance) -> Result<Rational, SolverError> {
    let n = inst.n();
    if n > MAX_ENUM_NODES {
        return Err(SolverError::TooManyNodes { n, limit: MAX_ENUM_NODES });
    }
    if n == 0 {
        return Err(SolverError::TooFewNodes(0));
    }
    let mut order = vec![NodeId(0)];
    let mut best = None;
    extend(inst, &mut order, &mut vec![false; n], None, &mut best);
    Ok(best.expect("n >= 1 has a tour"))
}

/// Factorial enumeration of all s-t hamiltonian paths in exact rationals.
pub fn enumerate_path(inst: &MetricInstance, s: NodeId, t: NodeId) -> Result<Rational, SolverError> {
    let n = inst.n();
    if n > MAX_ENUM_NODES {
        return Err(SolverError::TooManyNodes { n, limit: MAX_ENUM_NODES });
    }
    check_terminals(n, s, t)?;
    let mut order = vec![s];
    let mut best = None;
    extend(inst, &mut order, &mut vec![false; n], Some(t), &mut best);
    Ok(best.expect("n >= 2 has a path"))
}

fn extend(
    inst: &MetricInstance,
    order: &mut Vec<NodeId>,
    used: &mut Vec<bool>,
    end: Option<NodeId>,
    best: &mut Option<Rational>,
) {
    let n = inst.n();
    used[order[0].0] = true;
    if order.len() == n {
        let cost = witness_cost(inst, order, end.is_none());
        if best.as_ref().is_none_or(|b| cost < *b) {
            *best = Some(cost);
        }
        return;
    }
    for v in 0..n {
        if used[v] {
            continue;
        }
        // The path end may only be placed last.
        if end == Some(NodeId(v)) && order.len() + 1 != n {
            continue;
        }
        used[v] = true;
        order.push(NodeId(v));
        extend(inst, order, used, end, best);
        order.pop();
        used[v] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn metric(directed: bool, rows: &[&[i64]]) -> MetricInstance {
        let dist = rows.iter().map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect()).collect();
        MetricInstance::from_matrix(directed, dist, None, None).unwrap()
    }

    #[test]
    fn directed_triangle() {
        let inst = metric(true, &[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
        let r = held_karp_tour(&inst).unwrap();
        assert_eq!(r.value, q(3, 1));
        assert!(is_permutation(&r.witness, 3));
    }

    #[test]
    fn three_node_path() {
        let inst = metric(false, &[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]);
        let r = held_karp_path(&inst, NodeId(0), NodeId(2)).unwrap();
        assert_eq!(r.value, q(2, 1));
        assert_eq!(r.witness, vec![NodeId(0), NodeId(1), NodeId(2)]);
    }

    #[test]
    fn fractional_distances_scale_back() {
        let h = q(1, 2);
        let t = q(1, 3);
        let z = Rational::zero();
        let dist = vec![vec![z.clone(), h.clone(), t.clone()], vec![t.clone(), z.clone(), h.clone()], vec![h, t, z]];
        let inst = MetricInstance::from_matrix(true, dist, None, None).unwrap();
        let r = held_karp_tour(&inst).unwrap();
        assert_eq!(r.value, q(1, 1));
        assert_eq!(witness_cost(&inst, &r.witness, true), r.value);
        assert_eq!(enumerate_tour(&inst).unwrap(), r.value);
    }

    #[test]
    fn limits_are_explicit() {
        let n = MAX_DP_NODES + 1;
        let dist = (0..n).map(|u| (0..n).map(|v| Rational::from_integer((u != v) as i64)).collect()).collect();
        let inst = MetricInstance::from_matrix(true, dist, None, None).unwrap();
        assert!(matches!(held_karp_tour(&inst), Err(SolverError::TooManyNodes { n: 23, limit: 22 })));
        let inst = metric(false, &[&[0, 1], &[1, 0]]);
        assert!(matches!(held_karp_path(&inst, NodeId(1), NodeId(1)), Err(SolverError::SameTerminals(1))));
    }

    #[test]
    fn small_cases() {
        let one = metric(false, &[&[0]]);
        assert_eq!(held_karp_tour(&one).unwrap().value, q(0, 1));
        let two = metric(true, &[&[0, 2], &[3, 0]]);
        assert_eq!(held_karp_tour(&two).unwrap().value, q(5, 1));
        assert_eq!(held_karp_path(&two, NodeId(1), NodeId(0)).unwrap().value, q(3, 1));
    }
}
