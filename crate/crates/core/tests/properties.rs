use std::collections::BTreeSet;

use proptest::prelude::*;

use amasnet::compose::{agent_nets, compose_nets, verify_proposition1};
use amasnet::gen::{generate, GenConfig};
use amasnet::liveness::{check_1liveness, find_dead_transitions, Heuristic, LivenessOptions};
use amasnet::mas::{compose_iis, compose_iis_eager, iso_check, reachable_prune};
use amasnet::model::{parse_model, render_model};

fn config() -> impl Strategy<Value = (u64, GenConfig)> {
    (any::<u64>(), 1usize..=3, 1usize..=4, 1usize..=5, 0.2f64..0.8).prop_map(
        |(seed, agents, max_states, labels, arc_probability)| {
            (
                seed,
                GenConfig {
                    agents,
                    max_states,
                    labels,
                    arc_probability,
                },
            )
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_then_parse_is_identity((seed, cfg) in config()) {
        let amas = generate(seed, &cfg);
        let text = render_model(&amas);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(&back, &amas);
        prop_assert_eq!(render_model(&back), text);
    }

    #[test]
    fn marking_graph_matches_interleaving((seed, cfg) in config()) {
        prop_assert!(verify_proposition1(&generate(seed, &cfg)).unwrap());
    }

    #[test]
    fn lazy_and_eager_interleavings_agree((seed, cfg) in config()) {
        let amas = generate(seed, &cfg);
        let lazy = reachable_prune(&compose_iis(&amas).unwrap());
        let eager = reachable_prune(&compose_iis_eager(&amas).unwrap());
        prop_assert!(iso_check(&lazy, &eager).unwrap());
    }

    #[test]
    fn dead_transitions_are_the_oracle_complement((seed, cfg) in config()) {
        let amas = generate(seed, &cfg);
        let nets = agent_nets(&amas);
        let global = compose_nets(&nets).unwrap();
        let live = global.net.marking_graph().unwrap().live_transitions();
        let expected: BTreeSet<_> = global
            .fused()
            .iter()
            .enumerate()
            .filter(|(i, _)| !live.contains(i))
            .map(|(_, g)| g.clone())
            .collect();
        let dead = find_dead_transitions(&amas, &nets, &LivenessOptions::default()).unwrap();
        prop_assert_eq!(dead, expected);
    }

    #[test]
    fn pruning_never_changes_a_verdict(seed in any::<u64>(), agents in 2usize..=3) {
        let cfg = GenConfig { agents, max_states: 3, labels: 4, arc_probability: 0.5 };
        let amas = generate(seed, &cfg);
        let nets = agent_nets(&amas);
        let global = compose_nets(&nets).unwrap();
        for t in global.fused() {
            let labels = BTreeSet::from([t.label.clone()]);
            let verdicts: Vec<bool> = [true, false]
                .into_iter()
                .flat_map(|prune| Heuristic::ALL.map(|heuristic| (prune, heuristic)))
                .map(|(prune, heuristic)| {
                    let opts = LivenessOptions { heuristic, prune, ..LivenessOptions::default() };
                    check_1liveness(t, &amas, &nets, &labels, &opts).unwrap().live
                })
                .collect();
            prop_assert!(verdicts.iter().all(|&v| v == verdicts[0]), "{}: {:?}", t, verdicts);
        }
    }
}
