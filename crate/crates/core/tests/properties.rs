//! Property tests over the randomized constructors and the criterion
//! pipeline's structural invariants.

use proptest::prelude::*;

use entkit::criteria::{analyze, participation_ratio, renyi_entropy, Overall};
use entkit::linalg::min_eigenvalue;
use entkit::states::BipartiteState;
use entkit::tol::{self, Tolerances};

fn dims_strategy() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=4, 2usize..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_states_are_valid_density_matrices(
        (da, db) in dims_strategy(),
        rank_sel in 1usize..=16,
        seed in any::<u64>(),
    ) {
        let rank = 1 + rank_sel % (da * db);
        let state = BipartiteState::random(da, db, rank, seed).unwrap();
        prop_assert!(state.validate(&Tolerances::default()).is_ok());

        let numerical = state.rank(tol::RANK_EPSILON);
        prop_assert!(numerical <= rank);
        prop_assert!(numerical >= 1);

        let ratio = participation_ratio(&state);
        prop_assert!(ratio >= 1.0 - 1e-9);
        prop_assert!(ratio <= numerical as f64 + 1e-9);
    }

    #[test]
    fn separable_ground_truth_never_false_alarms(
        (da, db) in (2usize..=3, 2usize..=3),
        terms in 1usize..=9,
        seed in any::<u64>(),
    ) {
        let state = BipartiteState::random_separable(da, db, terms, seed).unwrap();
        let report = analyze(&state, &Tolerances::default());
        // Necessary conditions must hold on ground-truth separable states.
        prop_assert!(report.ppt.is_ppt);
        prop_assert!(!report.reduction.violated);
        prop_assert!(report.entropies.iter().all(|e| e.satisfied));
        prop_assert!(report.overall != Overall::Distillable);
    }

    #[test]
    fn renyi_entropy_is_nonincreasing_in_alpha(
        (da, db) in dims_strategy(),
        rank_sel in 1usize..=16,
        seed in any::<u64>(),
    ) {
        let rank = 1 + rank_sel % (da * db);
        let state = BipartiteState::random(da, db, rank, seed).unwrap();
        let tols = Tolerances::default();
        let orders = [0.0, 0.5, 1.0, 2.0, 4.0, f64::INFINITY];
        let values: Vec<f64> = orders
            .iter()
            .map(|&a| renyi_entropy(&state, a, &tols).unwrap())
            .collect();
        for pair in values.windows(2) {
            prop_assert!(pair[0] >= pair[1] - 1e-9, "{values:?}");
        }
    }

    #[test]
    fn distillable_overall_implies_npt_or_witness(
        (da, db) in dims_strategy(),
        rank_sel in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let rank = 1 + rank_sel % (da * db).min(4);
        let state = BipartiteState::random(da, db, rank, seed).unwrap();
        let report = analyze(&state, &Tolerances::default());
        if report.overall == Overall::Distillable {
            // Every distillability flag in this pipeline implies NPT.
            let pt_min = min_eigenvalue(&state.partial_transpose()).unwrap();
            prop_assert!(pt_min < -1e-10, "distillable but PT min eig = {pt_min:.3e}");
        }
    }
}
