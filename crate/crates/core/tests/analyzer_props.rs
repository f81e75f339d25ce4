mod common;

use common::{arb_self_independent, arb_system, fixed_points, oscillates_through, reachable};
use ixsys::analyzer::CommitMap;
use ixsys::{
    check_r_fair, committed_map, decide_convergence, decide_r_convergence, replay_witness,
    spectrum, stable_states, Commitment, HistorylessSystem, State,
};
use proptest::prelude::*;

fn commitments(sys: &HistorylessSystem) -> CommitMap<State> {
    committed_map(sys).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 200,
        max_global_rejects: 100_000,
        ..ProptestConfig::default()
    })]

    #[test]
    fn stable_states_are_the_fixed_points(sys in arb_system(4, 3)) {
        prop_assert_eq!(stable_states(&sys).unwrap(), fixed_points(&sys));
    }

    #[test]
    fn agrees_with_closed_walk_search(sys in arb_system(3, 3)) {
        prop_assume!(sys.space().state_count() <= 16);
        let oracle = sys.space().states().any(|a| oscillates_through(&sys, &a));
        let v = decide_convergence(&sys).unwrap();
        prop_assert_eq!(v.is_convergent(), !oracle);
        if let Some(w) = v.witness() {
            prop_assert!(replay_witness(&sys, w).unwrap().is_cycling());
        }
    }

    #[test]
    fn several_stable_states_rule_out_convergence(sys in arb_self_independent(4, 3)) {
        prop_assume!(fixed_points(&sys).len() >= 2);
        prop_assert!(!decide_convergence(&sys).unwrap().is_convergent());
    }

    #[test]
    fn neighbours_commit_to_the_same_state(sys in arb_self_independent(3, 3)) {
        let map = commitments(&sys);
        let space = sys.space();
        for (idx, ca) in map.entries.iter().enumerate() {
            let Commitment::CommittedTo(x) = ca else { continue };
            let a = space.decode(idx as u64);
            for i in 0..space.node_count() {
                for v in 0..space.size(i) {
                    let b = a.with(i, v);
                    let cb = &map.entries[space.encode(&b) as usize];
                    if let Commitment::CommittedTo(y) = cb {
                        prop_assert_eq!(x, y);
                    }
                }
            }
        }
    }

    #[test]
    fn several_stable_states_leave_something_uncommitted(sys in arb_self_independent(3, 3)) {
        prop_assume!(fixed_points(&sys).len() >= 2);
        prop_assert!(commitments(&sys).uncommitted_count() >= 1);
    }

    #[test]
    fn commitments_match_spectra(sys in arb_system(3, 3)) {
        prop_assume!(sys.space().state_count() <= 16);
        for (idx, c) in commitments(&sys).entries.iter().enumerate() {
            let a = sys.space().decode(idx as u64);
            let spec = spectrum(&sys, &a).unwrap();
            let reach = reachable(&sys, &a);
            let mut stable_reach: Vec<State> =
                reach.iter().filter(|b| sys.reaction(b) == **b).cloned().collect();
            stable_reach.sort_by_key(|b| sys.space().encode(b));
            prop_assert_eq!(&spec, &stable_reach);
            let osc = reach.iter().any(|b| oscillates_through(&sys, b));
            match c {
                Commitment::CommittedTo(b) => {
                    prop_assert_eq!(&spec, &vec![b.clone()]);
                    prop_assert!(!osc);
                }
                Commitment::Uncommitted => prop_assert!(osc || spec.len() >= 2),
            }
        }
    }

    #[test]
    fn fairness_bounds_only_help(sys in arb_system(3, 2)) {
        let fair = decide_convergence(&sys).unwrap().is_convergent();
        let mut previous = true;
        for r in 1..=4 {
            let v = decide_r_convergence(&sys, r).unwrap();
            if fair {
                prop_assert!(v.is_convergent());
            }
            // convergent at r implies convergent at every smaller bound
            prop_assert!(previous || !v.is_convergent());
            previous = v.is_convergent();
            if let Some(w) = v.witness() {
                prop_assert!(replay_witness(&sys, w).unwrap().is_cycling());
                let mut word = w.prefix.clone();
                for _ in 0..=r {
                    word.extend(&w.cycle);
                }
                prop_assert!(check_r_fair(&word, r, sys.node_count()).unwrap());
            }
        }
    }
}
