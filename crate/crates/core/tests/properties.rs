use gpbg_core::board::{acceptable_move, is_upper_echelon, reduce_to_echelon, replay_moves, BoardState};
use gpbg_core::forest::{build_forest, extract_factor_maps};
use gpbg_core::kernel::{build_kernels, combine_factors, schedule_factor, DimMode};
use gpbg_core::map::CollisionMap;
use proptest::prelude::*;

fn arb_map() -> impl Strategy<Value = CollisionMap> {
    (1usize..=3, 1usize..=7).prop_flat_map(|(k, n)| {
        let cols: Vec<_> = (0..n).map(|i| 1..=k + i).collect();
        cols.prop_map(move |mu| CollisionMap::new(k, mu).unwrap())
    })
}

proptest! {
    #[test]
    fn reduction_reaches_echelon_form(m in arb_map()) {
        let r = reduce_to_echelon(&m);
        prop_assert!(is_upper_echelon(&r.representative));
        let n = m.n();
        prop_assert!(r.moves.len() <= n * (n - 1) / 2);
        let b = replay_moves(&m, &r.moves).unwrap();
        prop_assert_eq!(b.matrix(), r.representative.clone());
        prop_assert_eq!(b.sigma(), r.sigma.clone());
        // echelon forms are fixed points
        let again = reduce_to_echelon(&CollisionMap::from_matrix(&r.representative));
        prop_assert!(again.moves.is_empty());
    }

    #[test]
    fn moves_are_involutions(m in arb_map()) {
        let b = BoardState::new(m);
        for j in b.legal_moves() {
            let moved = acceptable_move(&b, j).unwrap();
            prop_assert!(!moved.can_move(j));
            prop_assert_eq!(moved.exchange(j).unwrap(), b.clone());
        }
    }

    #[test]
    fn forest_partitions_vertices_and_leaves(m in arb_map()) {
        let f = build_forest(&m);
        let (k, n) = (m.k(), m.n());
        prop_assert_eq!(f.m().iter().sum::<usize>(), n);
        let mut leaves: Vec<usize> = f.trees().iter().flat_map(|t| t.leaves.clone()).collect();
        leaves.sort_unstable();
        prop_assert_eq!(leaves, (1..=k + n).collect::<Vec<_>>());
        let fms = extract_factor_maps(&f);
        prop_assert_eq!(fms.iter().filter(|fm| fm.distinguished).count(), 1);
        for fm in &fms {
            // a relabeled factor is itself a valid one-particle map
            if let Some(local) = fm.as_map() {
                prop_assert_eq!(local.n(), fm.time_slots.len());
            }
        }
    }

    #[test]
    fn key_lemma_exponents(m in arb_map()) {
        let f = build_forest(&m);
        let fk = build_kernels(&f).unwrap();
        for mode in DimMode::ALL {
            let bounds: Vec<_> = fk.factors.iter().map(|x| schedule_factor(&fk.arena, x, mode).unwrap()).collect();
            let all = combine_factors(&bounds, m.k(), m.n()).unwrap();
            prop_assert_eq!(all.time_power as usize, m.n() - 1);
            prop_assert_eq!(all.phi_power as usize, 2 * (m.k() + m.n()));
            prop_assert_eq!(all.prefactor_log2 as usize, m.n());
        }
    }
}
