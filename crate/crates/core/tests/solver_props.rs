mod common;

use common::{arb_metric, brute_member};
use liftgap::graph::NodeId;
use liftgap::polytopes::{check_point, PolytopeKind};
use liftgap::rational::Rational;
use liftgap::solvers::{
    dual_bound, enumerate_path, enumerate_tour, held_karp_path, held_karp_tour, is_permutation, lp_full_enumeration,
    lp_optimize, witness_cost,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn held_karp_matches_enumeration(inst in arb_metric(2..=8)) {
        let n = inst.n();
        let tour = held_karp_tour(&inst).unwrap();
        prop_assert_eq!(&tour.value, &enumerate_tour(&inst).unwrap());
        prop_assert!(is_permutation(&tour.witness, n) && tour.witness[0] == NodeId(0));
        prop_assert_eq!(witness_cost(&inst, &tour.witness, true), tour.value);

        let (s, t) = (NodeId(0), NodeId(n - 1));
        let path = held_karp_path(&inst, s, t).unwrap();
        prop_assert_eq!(&path.value, &enumerate_path(&inst, s, t).unwrap());
        prop_assert!(is_permutation(&path.witness, n));
        prop_assert_eq!((path.witness[0], path.witness[n - 1]), (s, t));
        prop_assert_eq!(witness_cost(&inst, &path.witness, false), path.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cutting_planes_match_full_enumeration(inst in arb_metric(3..=6)) {
        let n = inst.n();
        let (s, t) = (NodeId(0), NodeId(n - 1));
        let kinds = if inst.directed() {
            vec![PolytopeKind::At, PolytopeKind::Ap { s, t }, PolytopeKind::AtBal]
        } else {
            vec![PolytopeKind::St, PolytopeKind::Sp { s, t }]
        };
        let tour = held_karp_tour(&inst).unwrap().value;
        let path = held_karp_path(&inst, s, t).unwrap().value;
        let g = inst.complete_graph();
        for kind in kinds {
            let cut = lp_optimize(kind, &inst).unwrap();
            let full = lp_full_enumeration(kind, &inst).unwrap();
            prop_assert_eq!(&cut.value, &full.result.value, "{:?}", kind);
            prop_assert!(brute_member(kind, &g, &cut.point), "{:?}: optimum not in the polytope", kind);
            prop_assert!(check_point(kind, &g, &cut.point).unwrap().is_none());
            prop_assert_eq!(g.weights().iter().zip(cut.point.iter()).map(|(w, x)| w * x).fold(Rational::zero(), |a, b| a + b), cut.value.clone());
            let upper = vec![Some(Rational::one()); full.costs.len()];
            prop_assert_eq!(dual_bound(&full.costs, &upper, &full.rows, &full.duals), Some(full.result.value.clone()));
            let integral = if kind.terminals().is_some() { &path } else { &tour };
            prop_assert!(cut.value <= *integral, "{:?}: LP {} above integer optimum {}", kind, cut.value, integral);
        }
    }
}
