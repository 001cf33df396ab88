//! Brute-force oracles and generators shared by the property tests.
#![allow(dead_code)]

use liftgap::graph::{metric_closure, EdgeVector, LabeledGraph, MetricInstance, NodeId};
use liftgap::polytopes::PolytopeKind;
use liftgap::rational::Rational;
use proptest::prelude::*;

pub fn bit(mask: u32, i: usize) -> bool {
    mask & (1 << i) != 0
}

fn out_deg(g: &LabeledGraph, x: &EdgeVector, v: usize) -> Rational {
    g.edge_ids().filter(|&e| g.edge(e).tail.0 == v).map(|e| x[e].clone()).fold(Rational::zero(), |a, b| a + b)
}

fn in_deg(g: &LabeledGraph, x: &EdgeVector, v: usize) -> Rational {
    g.edge_ids().filter(|&e| g.edge(e).head.0 == v).map(|e| x[e].clone()).fold(Rational::zero(), |a, b| a + b)
}

/// Sum of x over edges leaving (`out`) or entering the node set `mask`.
/// Undirected graphs count edges with exactly one endpoint inside.
fn cut(g: &LabeledGraph, x: &EdgeVector, mask: u32, out: bool) -> Rational {
    let mut total = Rational::zero();
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let (a, b) = (bit(mask, edge.tail.0), bit(mask, edge.head.0));
        let crosses = if g.directed() {
            if out {
                a && !b
            } else {
                !a && b
            }
        } else {
            a != b
        };
        if crosses {
            total += x[e].clone();
        }
    }
    total
}

/// Membership by evaluating every constraint of the polytope, cuts over all subsets.
pub fn brute_member(kind: PolytopeKind, g: &LabeledGraph, x: &EdgeVector) -> bool {
    let n = g.n();
    let (zero, one, two) = (Rational::zero(), Rational::one(), Rational::from_integer(2));
    if x.iter().any(|v| v.is_negative() || *v > one) {
        return false;
    }
    let deg = |v: usize| out_deg(g, x, v) + in_deg(g, x, v);
    for v in 0..n {
        let ok = match kind {
            PolytopeKind::St => deg(v) == two,
            PolytopeKind::Sp { s, t } => deg(v) == if v == s.0 || v == t.0 { one.clone() } else { two.clone() },
            PolytopeKind::At => out_deg(g, x, v) == one && in_deg(g, x, v) == one,
            PolytopeKind::Ap { s, t } => {
                out_deg(g, x, v) == if v == t.0 { zero.clone() } else { one.clone() }
                    && in_deg(g, x, v) == if v == s.0 { zero.clone() } else { one.clone() }
            }
            PolytopeKind::AtBal => out_deg(g, x, v) == in_deg(g, x, v),
        };
        if !ok {
            return false;
        }
    }
    for mask in 1u32..(1 << n) - 1 {
        let ok = match kind {
            PolytopeKind::St => cut(g, x, mask, true) >= two,
            PolytopeKind::Sp { s, t } => {
                let need = if bit(mask, s.0) != bit(mask, t.0) { &one } else { &two };
                cut(g, x, mask, true) >= *need
            }
            PolytopeKind::At | PolytopeKind::AtBal => cut(g, x, mask, true) >= one && cut(g, x, mask, false) >= one,
            PolytopeKind::Ap { s, t } => {
                (bit(mask, t.0) || cut(g, x, mask, true) >= one) && (bit(mask, s.0) || cut(g, x, mask, false) >= one)
            }
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Whether the 0/1 vector `x` is a hamiltonian cycle (no terminals) or a
/// hamiltonian s-t path, by walking its edges.
pub fn is_hamiltonian(g: &LabeledGraph, x: &EdgeVector, terminals: Option<(NodeId, NodeId)>) -> bool {
    let n = g.n();
    let chosen: Vec<_> = g.edge_ids().filter(|&e| x[e].is_one()).collect();
    if chosen.len() + usize::from(terminals.is_some()) != n || x.iter().any(|v| !v.is_zero() && !v.is_one()) {
        return false;
    }
    let start = terminals.map_or(0, |(s, _)| s.0);
    let mut used = vec![false; chosen.len()];
    let mut seen = vec![false; n];
    let mut at = start;
    seen[at] = true;
    for step in 0..chosen.len() {
        let next = chosen.iter().enumerate().find_map(|(i, &e)| {
            let edge = g.edge(e);
            if used[i] {
                return None;
            }
            if edge.tail.0 == at {
                Some((i, edge.head.0))
            } else if !g.directed() && edge.head.0 == at {
                Some((i, edge.tail.0))
            } else {
                None
            }
        });
        let Some((i, v)) = next else { return false };
        used[i] = true;
        let last = step + 1 == chosen.len();
        if last && terminals.is_none() {
            return v == start && seen.iter().all(|&b| b);
        }
        if seen[v] {
            return false;
        }
        seen[v] = true;
        at = v;
    }
    terminals.is_some_and(|(_, t)| at == t.0) && seen.iter().all(|&b| b)
}

/// Every 0/1 vector on `g` that is hamiltonian in the sense of `terminals`.
pub fn hamiltonian_vectors(g: &LabeledGraph, terminals: Option<(NodeId, NodeId)>) -> Vec<EdgeVector> {
    (0u32..(1 << g.m())).map(|mask| indicator(g.m(), mask)).filter(|x| is_hamiltonian(g, x, terminals)).collect()
}

pub fn indicator(m: usize, mask: u32) -> EdgeVector {
    (0..m).map(|e| if bit(mask, e) { Rational::one() } else { Rational::zero() }).collect()
}

/// Metric closure of a complete graph with the given integer weights.
pub fn metric_from_weights(directed: bool, n: usize, weights: &[u32]) -> MetricInstance {
    let mut g = LabeledGraph::new(directed, n).unwrap();
    let mut w = weights.iter().cycle();
    for u in 0..n {
        for v in 0..n {
            if u != v && (directed || u < v) {
                g.add_edge(NodeId(u), NodeId(v), Rational::from_integer(*w.next().unwrap() as i64)).unwrap();
            }
        }
    }
    metric_closure(&g).unwrap()
}

pub fn arb_metric(nodes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = MetricInstance> {
    (any::<bool>(), nodes, prop::collection::vec(1u32..=12, 56))
        .prop_map(|(directed, n, w)| metric_from_weights(directed, n, &w))
}

/// Node sequences covering every node once: an s-t path (when terminals are
/// given) followed by vertex-disjoint cycles, derived from a permutation.
pub fn cover(
    n: usize,
    perm: &[usize],
    cuts: &[bool],
    terminals: Option<(usize, usize)>,
    min_cycle: usize,
) -> (Vec<usize>, Vec<Vec<usize>>) {
    let rest: Vec<usize> = perm.iter().copied().filter(|v| terminals.is_none_or(|(s, t)| *v != s && *v != t)).collect();
    let mut path = Vec::new();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    for (i, &v) in rest.iter().enumerate() {
        current.push(v);
        let last = i + 1 == rest.len();
        if last || (cuts[i % cuts.len()] && current.len() >= min_cycle && rest.len() - i > min_cycle) {
            cycles.push(std::mem::take(&mut current));
        }
    }
    if let Some((s, t)) = terminals {
        // The first block joins the path so paths are not always trivial.
        path.push(s);
        if !cycles.is_empty() && (cuts[0] || cycles[0].len() < min_cycle) {
            path.extend(cycles.remove(0));
        }
        path.push(t);
        while cycles.last().is_some_and(|c| c.len() < min_cycle) {
            let c = cycles.pop().unwrap();
            let tt = path.pop().unwrap();
            path.extend(c);
            path.push(tt);
        }
    } else if let Some(c) = cycles.pop_if(|c| c.len() < min_cycle) {
        match cycles.last_mut() {
            Some(prev) => prev.extend(c),
            None => cycles.push(c),
        }
    }
    debug_assert_eq!(path.len() + cycles.iter().map(Vec::len).sum::<usize>(), n);
    (path, cycles)
}

/// 0/1 vector on the complete graph `g` using the consecutive pairs of `path`
/// and the closed `cycles`.
pub fn cover_vector(g: &LabeledGraph, path: &[usize], cycles: &[Vec<usize>]) -> EdgeVector {
    let mut x = EdgeVector::zeros(g.m());
    let mut add = |u: usize, v: usize| {
        let e = g.find_edge(NodeId(u), NodeId(v)).expect("complete graph");
        x[e] = Rational::one();
    };
    for w in path.windows(2) {
        add(w[0], w[1]);
    }
    for c in cycles {
        for i in 0..c.len() {
            add(c[i], c[(i + 1) % c.len()]);
        }
    }
    x
}
