//! End-to-end acceptance checks over the shipped models and a seeded random
//! corpus. Every criterion prints one PASS/FAIL line; the test fails if any
//! criterion does.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use amasnet::compose::{
    agent_nets, compose_nets, project_transition, subsystem, verify_proposition1, ComposedNet,
};
use amasnet::gen::corpus;
use amasnet::liveness::{check_1liveness, comp_min_paths, Heuristic, LivenessOptions};
use amasnet::mas::{iso_check, reachable_prune, Amas, Lts};
use amasnet::model::parse_model;
use amasnet::net::LabelledNet;
use amasnet::synthesis::{
    check_essp, check_ssp, enumerate_regions, minimal_regions, synthesize, SeparationWitness,
    SynthesisOutcome, DEFAULT_REGION_BOUND,
};

const CORPUS_SIZE: u64 = 200;

const TGC: &str = include_str!("../models/tgc.amas");
const DEAD_ZERO: &str = include_str!("../models/dead_zero.amas");
const FALSE_PATH: &str = include_str!("../models/false_path.amas");
const TWO_PATHS: &str = include_str!("../models/two_paths.amas");

struct Instance {
    seed: u64,
    amas: Amas,
    nets: Vec<LabelledNet>,
    global: ComposedNet,
    /// Brute-force verdict for each global transition index.
    live: Vec<bool>,
}

fn instance(seed: u64, amas: Amas) -> Instance {
    let nets = agent_nets(&amas);
    let global = compose_nets(&nets).unwrap();
    let live = (0..global.net.transitions().len())
        .map(|t| global.net.is_one_live_bruteforce(t).unwrap())
        .collect();
    Instance {
        seed,
        amas,
        nets,
        global,
        live,
    }
}

fn load_corpus() -> Vec<Instance> {
    corpus(CORPUS_SIZE).map(|(s, a)| instance(s, a)).collect()
}

fn labels(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn verdict(inst: &Instance, t: usize, heuristic: Heuristic) -> bool {
    let gt = inst.global.fused_transition(t);
    let opts = LivenessOptions {
        heuristic,
        ..LivenessOptions::default()
    };
    check_1liveness(gt, &inst.amas, &inst.nets, &labels(&[&gt.label]), &opts)
        .unwrap()
        .live
}

type Outcome = Result<String, String>;

fn oracle_equivalence(corpus: &[Instance]) -> Outcome {
    let start = Instant::now();
    let (mut checked, mut live, mut bad) = (0, 0, Vec::new());
    for inst in corpus {
        for t in 0..inst.live.len() {
            checked += 1;
            live += inst.live[t] as usize;
            if verdict(inst, t, Heuristic::default()) != inst.live[t] {
                bad.push(format!("seed {} {}", inst.seed, inst.global.fused_transition(t)));
            }
        }
    }
    let elapsed = start.elapsed();
    let summary = format!(
        "{checked} fused transitions over {} systems ({live} live), {} disagreements, {elapsed:.2?}",
        corpus.len(),
        bad.len()
    );
    if !bad.is_empty() {
        return Err(format!("{summary}; first: {}", bad[0]));
    }
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("{summary}; over the 60 s budget"));
    }
    Ok(summary)
}

fn marking_graph_isomorphism(corpus: &[Instance]) -> Outcome {
    for (name, text) in [("tgc", TGC), ("dead_zero", DEAD_ZERO)] {
        if !verify_proposition1(&parse_model(text).unwrap()).unwrap() {
            return Err(format!("{name}: marking graph differs from the pruned IIS"));
        }
    }
    for inst in corpus {
        if !verify_proposition1(&inst.amas).unwrap() {
            return Err(format!("seed {}: marking graph differs from the pruned IIS", inst.seed));
        }
    }
    Ok(format!("tgc, dead_zero and {} corpus systems isomorphic", corpus.len()))
}

fn necessary_condition(corpus: &[Instance]) -> Outcome {
    let mut filtered = 0;
    for inst in corpus {
        for (t, gt) in inst.global.fused().iter().enumerate() {
            let sub = subsystem(&inst.amas, &inst.nets, &labels(&[&gt.label])).unwrap();
            let target = project_transition(gt, &sub).expect("owners are in the subsystem");
            let mg = sub.composed.net.marking_graph().unwrap();
            if comp_min_paths(&mg, target).next().is_none() {
                filtered += 1;
                if inst.live[t] {
                    return Err(format!("seed {}: {gt} has no path locally but is live", inst.seed));
                }
            }
        }
    }
    Ok(format!("{filtered} transitions without a local path, all dead"))
}

fn false_path() -> Outcome {
    let amas = parse_model(FALSE_PATH).unwrap();
    let nets = agent_nets(&amas);
    let global = compose_nets(&nets).unwrap();
    let t = global
        .fused()
        .iter()
        .position(|g| g.label == "d")
        .ok_or("no d transition")?;
    let gt = global.fused_transition(t);
    let sub = subsystem(&amas, &nets, &labels(&["d"])).unwrap();
    let mg = sub.composed.net.marking_graph().unwrap();
    let target = project_transition(gt, &sub).unwrap();
    let local: Vec<Vec<String>> = comp_min_paths(&mg, target)
        .map(|p| {
            p.transitions
                .iter()
                .map(|&i| sub.composed.net.transitions()[i].label.clone())
                .collect()
        })
        .collect();
    if !local.contains(&vec!["c".into(), "b".into(), "d".into()]) {
        return Err(format!("expected the local path c b d, got {local:?}"));
    }
    let v = check_1liveness(gt, &amas, &nets, &labels(&["d"]), &LivenessOptions::default()).unwrap();
    if v.live {
        return Err("check_1liveness reports d live".into());
    }
    if global.net.is_one_live_bruteforce(t).unwrap() {
        return Err("oracle reports d live".into());
    }
    Ok(format!(
        "subsystem of d ({} agents) has path c b d; verdict dead, oracle dead",
        sub.agents.len()
    ))
}

fn heuristic_effect() -> Outcome {
    let amas = parse_model(TWO_PATHS).unwrap();
    let nets = agent_nets(&amas);
    let global = compose_nets(&nets).unwrap();
    let gt = global
        .fused()
        .iter()
        .find(|g| g.label == "d")
        .ok_or("no d transition")?;

    let sub = subsystem(&amas, &nets, &labels(&["d"])).unwrap();
    let mg = sub.composed.net.marking_graph().unwrap();
    let target = project_transition(gt, &sub).unwrap();
    let mut paths: Vec<String> = comp_min_paths(&mg, target)
        .map(|p| {
            p.transitions
                .iter()
                .map(|&i| sub.composed.net.transitions()[i].label.as_str())
                .collect()
        })
        .collect();
    paths.sort();
    if paths != ["ad", "bcd"] {
        return Err(format!("minimal paths to d: {paths:?}"));
    }

    let run = |h| {
        let opts = LivenessOptions {
            heuristic: h,
            ..LivenessOptions::default()
        };
        check_1liveness(gt, &amas, &nets, &labels(&["d"]), &opts).unwrap()
    };
    let fewest = run(Heuristic::FewestNewAgents);
    let shortest = run(Heuristic::ShortestFirst);
    if !fewest.live || !shortest.live {
        return Err("d should be live".into());
    }
    let via = fewest.witness.as_ref().unwrap().labels().join("");
    if via != "bcd" {
        return Err(format!("fewest-new-agents witness is {via}"));
    }
    if fewest.max_agents() >= shortest.max_agents() {
        return Err(format!(
            "fewest-new-agents composed {} agents, shortest-first {}",
            fewest.max_agents(),
            shortest.max_agents()
        ));
    }
    let size = |ls: &[&str]| {
        subsystem(&amas, &nets, &labels(ls))
            .unwrap()
            .composed
            .net
            .marking_graph()
            .unwrap()
            .node_count()
    };
    let (bcd, ad) = (size(&["b", "c", "d"]), size(&["a", "d"]));
    if bcd >= ad {
        return Err(format!("subsystem b,c,d has {bcd} markings, a,d has {ad}"));
    }
    Ok(format!(
        "fewest-new-agents: {} agents via bcd; shortest-first: {} agents; markings {bcd} (b,c,d) < {ad} (a,d)",
        fewest.max_agents(),
        shortest.max_agents()
    ))
}

fn safety(corpus: &[Instance]) -> Outcome {
    let mut markings = 0;
    for inst in corpus {
        for (i, net) in inst.nets.iter().enumerate() {
            if !net.check_one_safe().is_safe() {
                return Err(format!("seed {}: agent net {i} is not 1-safe", inst.seed));
            }
            let mg = net.marking_graph().unwrap();
            if mg.markings().iter().any(|m| m.len() != 1) {
                return Err(format!("seed {}: agent net {i} has a marking without exactly one token", inst.seed));
            }
        }
        let net = &inst.global.net;
        if !net.check_one_safe().is_safe() {
            return Err(format!("seed {}: global net is not 1-safe", inst.seed));
        }
        // place names are `<agent>.<state>`
        let owner = |p: usize| net.place_name(p).split('.').next().unwrap().to_string();
        let mg = net.marking_graph().unwrap();
        for m in mg.markings() {
            markings += 1;
            let agents: Vec<String> = m.places().iter().map(|&p| owner(p)).collect();
            let distinct: BTreeSet<&String> = agents.iter().collect();
            if agents.len() != inst.amas.len() || distinct.len() != agents.len() {
                return Err(format!(
                    "seed {}: marking {} is not one token per agent",
                    inst.seed,
                    net.render_marking(m)
                ));
            }
        }
    }
    Ok(format!("all nets 1-safe; {markings} global markings with one token per agent"))
}

fn synthesis_round_trip(corpus: &[Instance]) -> Outcome {
    let (mut synthesised, mut rejected) = (0, 0);
    for inst in corpus {
        for agent in inst.amas.agents() {
            let lts = agent.local_lts();
            let minimal = minimal_regions(&enumerate_regions(&lts, DEFAULT_REGION_BOUND).unwrap());
            let separable = check_ssp(&lts, &minimal).is_ok() && check_essp(&lts, &minimal).is_ok();
            match synthesize(&lts).unwrap() {
                SynthesisOutcome::Net(net) if separable => {
                    synthesised += 1;
                    let mg = net.marking_graph().unwrap().to_lts(&net).unwrap();
                    if !iso_check(&mg, &reachable_prune(&lts)).unwrap() {
                        return Err(format!("seed {} agent {}: round trip differs", inst.seed, agent.name()));
                    }
                }
                SynthesisOutcome::Failure(_) if !separable => rejected += 1,
                _ => {
                    return Err(format!(
                        "seed {} agent {}: outcome disagrees with SSP/ESSP",
                        inst.seed,
                        agent.name()
                    ))
                }
            }
        }
    }
    let trivial =
        Lts::from_arcs("b0", &[("b0", "3", "b1"), ("b1", "3", "b0"), ("b1", "2", "b1")]).unwrap();
    match synthesize(&trivial).unwrap() {
        SynthesisOutcome::Failure(SeparationWitness::States(..)) => {}
        other => return Err(format!("trivial-regions example: expected an SSP witness, got {other:?}")),
    }
    Ok(format!(
        "{synthesised} LTSs round-trip, {rejected} rejected; trivial-regions example fails SSP"
    ))
}

fn heuristic_independence(corpus: &[Instance]) -> Outcome {
    let mut checked = 0;
    for inst in corpus {
        for t in 0..inst.live.len() {
            let vs: Vec<bool> = Heuristic::ALL.iter().map(|&h| verdict(inst, t, h)).collect();
            checked += 1;
            if vs.iter().any(|&v| v != vs[0]) {
                return Err(format!(
                    "seed {} {}: verdicts {vs:?}",
                    inst.seed,
                    inst.global.fused_transition(t)
                ));
            }
        }
    }
    Ok(format!("{checked} transitions, identical verdicts under agents, short and fifo"))
}

#[test]
fn acceptance() {
    let corpus = load_corpus();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 oracle equivalence", oracle_equivalence(&corpus)),
        ("2 marking graph isomorphic to pruned IIS", marking_graph_isomorphism(&corpus)),
        ("3 no local path implies dead", necessary_condition(&corpus)),
        ("4 locally reachable but globally dead", false_path()),
        ("5 fewest-new-agents composes fewer agents", heuristic_effect()),
        ("6 safety invariants", safety(&corpus)),
        ("7 synthesis round trip", synthesis_round_trip(&corpus)),
        ("8 verdicts independent of heuristic", heuristic_independence(&corpus)),
    ];
    // Written past the test harness capture so the lines show up in a plain
    // `cargo test` run.
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (name, r) in &results {
        let line = match r {
            Ok(msg) => format!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed.push(*name);
                format!("FAIL criterion {name}: {msg}")
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    drop(out);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
