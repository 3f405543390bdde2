mod common;

use circtrack::baseline::ssp_solve;
use circtrack::instances::{random_network, RandomNetworkConfig};
use circtrack::solver::{check_epsilon_optimality, refine_iteration_bound, solve_with_observer, SolverState};
use circtrack::{validate_network, CirculationNetwork, SolveOptions};
use proptest::prelude::*;

fn networks() -> impl Strategy<Value = CirculationNetwork> {
    (
        0usize..=40,
        1u32..=8,
        1u32..=3,
        1usize..=4,
        prop_oneof![Just((-100i64, 100i64)), Just((-30, 5)), Just((0, 1_000_000)), Just((-1, 1))],
        any::<u64>(),
    )
        .prop_map(|(detections, frames, max_gap, max_out, range, seed)| {
            let cfg = RandomNetworkConfig {
                detections,
                frames,
                max_gap,
                max_out,
                enter: (range.0.max(0), range.1.max(1)),
                exit: (range.0.max(0), range.1.max(1)),
                observation: range,
                transition: (range.0, range.1),
            };
            random_network(&cfg, seed)
        })
}

/// Residual arcs the solver currently considers (all of them when fixing is off).
fn unfixed_epsilon_optimal(state: &SolverState, net: &CirculationNetwork) -> bool {
    (0..2 * net.arc_count())
        .filter(|&r| state.is_residual(r) && !state.fixed()[r >> 1])
        .all(|r| state.reduced_cost(net, r) >= -state.epsilon())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1024))]

    #[test]
    fn cost_scaling_invariants(net in networks()) {
        prop_assert!(validate_network(&net).is_ok());

        for arc_fixing in [false, true] {
            let opts = SolveOptions { arc_fixing, ..SolveOptions::default() };
            let mut refines = 0u64;
            let mut last_eps = i64::MAX;
            let mut failure = None;
            let sol = solve_with_observer(&net, &opts, |state| {
                refines += 1;
                let ok = if arc_fixing {
                    unfixed_epsilon_optimal(state, &net)
                } else {
                    check_epsilon_optimality(state, &net)
                };
                if !ok {
                    failure.get_or_insert(format!("not eps-optimal after refine {refines}"));
                }
                if state.excess().iter().any(|&e| e != 0) {
                    failure.get_or_insert(format!("excess left after refine {refines}"));
                }
                if state.epsilon() >= last_eps {
                    failure.get_or_insert("epsilon did not shrink".to_string());
                }
                last_eps = state.epsilon();
            })
            .unwrap();
            prop_assert!(failure.is_none(), "{:?}", failure);

            let cycles = common::decompose(&net, &sol.flow);
            prop_assert!(cycles.is_ok(), "{:?}", cycles);
            let cycles = cycles.unwrap();
            let dummy_out = (0..net.arc_count()).filter(|&k| sol.flow[k] && net.tail(k) == 0).count();
            prop_assert_eq!(cycles.len(), dummy_out);
            prop_assert_eq!(net.flow_cost(&sol.flow), sol.total_cost);
            prop_assert!(sol.stats.refine_iterations <= refine_iteration_bound(&net));
            prop_assert_eq!(sol.total_cost, ssp_solve(&net, None).unwrap().total_cost);
        }
    }
}
