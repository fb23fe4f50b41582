//! Seeded random systems for property tests and benchmarks.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mas::{Amas, Lts};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenConfig {
    /// Exact number of agents.
    pub agents: usize,
    /// Each agent gets between 1 and this many states.
    pub max_states: usize,
    /// Size of the label pool `a, b, c, …`.
    pub labels: usize,
    /// Probability that a (state, label) pair of an agent gets an arc.
    pub arc_probability: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            agents: 3,
            max_states: 4,
            labels: 5,
            arc_probability: 0.4,
        }
    }
}

/// `a` … `z`, then `l26`, `l27`, …
pub fn label_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("l{i}")
    }
}

/// A random system. Agents are named `A0, A1, …` with local states
/// `s0, s1, …`; an agent's alphabet may contain labels it has no arc for.
pub fn generate(seed: u64, cfg: &GenConfig) -> Amas {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<String> = (0..cfg.labels.max(1)).map(label_name).collect();
    let agents = (0..cfg.agents.max(1))
        .map(|i| {
            let n = rng.random_range(1..=cfg.max_states.max(1));
            let states: Vec<String> = (0..n).map(|s| format!("s{s}")).collect();
            let mut alphabet: BTreeSet<String> = pool
                .iter()
                .filter(|_| rng.random_bool(0.5))
                .cloned()
                .collect();
            if alphabet.is_empty() {
                alphabet.insert(pool[rng.random_range(0..pool.len())].clone());
            }
            let mut arcs = Vec::new();
            for s in &states {
                for e in &alphabet {
                    if rng.random_bool(cfg.arc_probability) {
                        let t = &states[rng.random_range(0..n)];
                        arcs.push((s.clone(), e.clone(), t.clone()));
                    }
                }
            }
            let lts = Lts::new(states.clone(), alphabet, arcs, states[0].clone())
                .expect("generated arcs are deterministic");
            (format!("A{i}"), lts)
        })
        .collect();
    Amas::new(agents).expect("generated agent names are distinct")
}

/// The configuration used by the test corpus for a given seed: 2 to 4
/// agents, at most 5 states each, 6 labels.
pub fn corpus_config(seed: u64) -> GenConfig {
    GenConfig {
        agents: 2 + (seed % 3) as usize,
        max_states: 5,
        labels: 6,
        arc_probability: 0.6,
    }
}

pub fn corpus(count: u64) -> impl Iterator<Item = (u64, Amas)> {
    (0..count).map(|seed| (seed, generate(seed, &corpus_config(seed))))
}
