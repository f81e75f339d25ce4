mod common;

use common::{arb_game, arb_self_independent, arb_system};
use ixsys::{
    best_responses, br_system, decide_convergence, enumerate_pne, induced_game, stable_states,
    Budget, Game, TieBreak,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        max_global_rejects: 100_000,
        ..ProptestConfig::default()
    })]

    #[test]
    fn equilibria_are_best_response_fixed_points(game in arb_game(3, 3, 4)) {
        let Ok(sys) = br_system(&game, TieBreak::Refuse) else {
            return Ok(());
        };
        prop_assert_eq!(enumerate_pne(&game), stable_states(&sys).unwrap());
    }

    #[test]
    fn stable_states_are_induced_equilibria(sys in arb_system(3, 3)) {
        let pne = enumerate_pne(&induced_game(&sys).unwrap());
        for a in stable_states(&sys).unwrap() {
            prop_assert!(pne.contains(&a));
        }
    }

    #[test]
    fn induced_equilibria_are_stable_states(sys in arb_self_independent(3, 3)) {
        let game = induced_game(&sys).unwrap();
        prop_assert_eq!(enumerate_pne(&game), stable_states(&sys).unwrap());
    }

    #[test]
    fn round_trip_keeps_the_table(sys in arb_self_independent(3, 3)) {
        let back = br_system(&induced_game(&sys).unwrap(), TieBreak::Refuse).unwrap();
        prop_assert_eq!(back.table(Budget::default()).unwrap(), sys.table(Budget::default()).unwrap());
    }

    #[test]
    fn generic_games_with_two_equilibria_oscillate(game in arb_game(3, 3, 6)) {
        prop_assume!(enumerate_pne(&game).len() >= 2);
        let sys = br_system(&game, TieBreak::Refuse);
        prop_assume!(sys.is_ok());
        prop_assert!(!decide_convergence(&sys.unwrap()).unwrap().is_convergent());
    }

    #[test]
    fn positive_affine_maps_change_nothing(
        game in arb_game(3, 3, 4),
        node_seed in any::<usize>(),
        scale in 1i64..=5,
        shift in -7i64..=7,
    ) {
        let i = node_seed % game.node_count();
        let mut tables: Vec<Vec<i64>> = (0..game.node_count()).map(|j| game.table(j).to_vec()).collect();
        for u in &mut tables[i] {
            *u = *u * scale + shift;
        }
        let moved = Game::new(game.space().clone(), tables).unwrap();
        for a in game.space().states() {
            for j in 0..game.node_count() {
                prop_assert_eq!(best_responses(&game, j, &a).unwrap(), best_responses(&moved, j, &a).unwrap());
            }
        }
        prop_assert_eq!(enumerate_pne(&game), enumerate_pne(&moved));
        for tie in [TieBreak::Refuse, TieBreak::Min] {
            match (br_system(&game, tie), br_system(&moved, tie)) {
                (Ok(x), Ok(y)) => prop_assert_eq!(
                    x.table(Budget::default()).unwrap(),
                    y.table(Budget::default()).unwrap()
                ),
                (x, y) => prop_assert_eq!(x.is_err(), y.is_err()),
            }
        }
    }
}

#[test]
fn self_dependent_flip_gains_spurious_equilibria() {
    // one node that always switches: no fixed point, yet every state is an
    // equilibrium of the induced game since all utilities are 0
    let space = ixsys::ActionSpace::uniform(1, 2).unwrap();
    let flip = ixsys::HistorylessSystem::from_node_rule(space, |_, a| 1 - a[0]);
    assert!(stable_states(&flip).unwrap().is_empty());
    assert_eq!(enumerate_pne(&induced_game(&flip).unwrap()).len(), 2);
}
