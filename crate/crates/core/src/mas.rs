//! Agents as labelled transition systems and their interleaved composition.
//!
//! An [`Lts`] is the behavioural skeleton of one agent: states, events, a
//! deterministic partial transition function and an initial state. The local
//! protocol (events available in a state) is not stored, it is read off the
//! domain of the transition function.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Separator used when a global state is rendered as a single identifier.
pub const GLOBAL_STATE_SEPARATOR: &str = "|";

/// Deterministic initialised labelled transition system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    states: BTreeSet<String>,
    events: BTreeSet<String>,
    trans: BTreeMap<(String, String), String>,
    initial: String,
}

impl Lts {
    /// Builds an LTS, rejecting arcs over undeclared states or events and
    /// a second arc for the same `(state, label)` pair.
    pub fn new<S, E, A, I>(states: S, events: E, arcs: A, initial: I) -> Result<Self>
    where
        S: IntoIterator,
        S::Item: Into<String>,
        E: IntoIterator,
        E::Item: Into<String>,
        A: IntoIterator<Item = (String, String, String)>,
        I: Into<String>,
    {
        let states: BTreeSet<String> = states.into_iter().map(Into::into).collect();
        let events: BTreeSet<String> = events.into_iter().map(Into::into).collect();
        let initial = initial.into();
        if !states.contains(&initial) {
            return Err(Error::UnknownState(initial));
        }
        let mut trans = BTreeMap::new();
        for (src, label, dst) in arcs {
            for s in [&src, &dst] {
                if !states.contains(s) {
                    return Err(Error::UnknownState(s.clone()));
                }
            }
            if !events.contains(&label) {
                return Err(Error::UnknownEvent(label));
            }
            if trans.contains_key(&(src.clone(), label.clone())) {
                return Err(Error::Nondeterministic { state: src, label });
            }
            trans.insert((src, label), dst);
        }
        Ok(Lts {
            states,
            events,
            trans,
            initial,
        })
    }

    /// Convenience constructor: states and events are whatever the arcs and
    /// the initial state mention.
    pub fn from_arcs(initial: &str, arcs: &[(&str, &str, &str)]) -> Result<Self> {
        let mut states: BTreeSet<String> = BTreeSet::from([initial.to_string()]);
        let mut events = BTreeSet::new();
        for (s, e, t) in arcs {
            states.insert(s.to_string());
            states.insert(t.to_string());
            events.insert(e.to_string());
        }
        let arcs = arcs
            .iter()
            .map(|(s, e, t)| (s.to_string(), e.to_string(), t.to_string()));
        Lts::new(states, events, arcs, initial)
    }

    pub fn states(&self) -> &BTreeSet<String> {
        &self.states
    }

    pub fn events(&self) -> &BTreeSet<String> {
        &self.events
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn arc_count(&self) -> usize {
        self.trans.len()
    }

    /// All arcs `(source, label, target)`, sorted by source then label.
    pub fn arcs(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.trans
            .iter()
            .map(|((s, e), t)| (s.as_str(), e.as_str(), t.as_str()))
    }

    /// Outgoing arcs of `state` as `(label, target)` pairs, sorted by label.
    pub fn outgoing<'a>(&'a self, state: &str) -> impl Iterator<Item = (&'a str, &'a str)> + 'a {
        let key = state.to_string();
        self.trans
            .range((key.clone(), String::new())..)
            .take_while(move |((s, _), _)| *s == key)
            .map(|((_, e), t)| (e.as_str(), t.as_str()))
    }

    pub fn successor(&self, state: &str, label: &str) -> Option<&str> {
        self.trans
            .get(&(state.to_string(), label.to_string()))
            .map(String::as_str)
    }

    /// The local protocol: events enabled in `state`.
    pub fn protocol(&self, state: &str) -> Result<BTreeSet<&str>> {
        if !self.states.contains(state) {
            return Err(Error::UnknownState(state.to_string()));
        }
        Ok(self.outgoing(state).map(|(e, _)| e).collect())
    }

    /// States reachable from the initial state, in breadth-first order.
    pub fn reachable_states(&self) -> Vec<&str> {
        let mut seen: BTreeSet<&str> = BTreeSet::from([self.initial.as_str()]);
        let mut order = vec![self.initial.as_str()];
        let mut queue = VecDeque::from([self.initial.as_str()]);
        while let Some(s) = queue.pop_front() {
            for (_, t) in self.outgoing(s) {
                if seen.insert(t) {
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// Applies `rename` to every state identifier.
    pub fn rename_states(&self, mut rename: impl FnMut(&str) -> String) -> Result<Lts> {
        let map: HashMap<&str, String> = self
            .states
            .iter()
            .map(|s| (s.as_str(), rename(s)))
            .collect();
        Lts::new(
            map.values().cloned(),
            self.events.iter().cloned(),
            self.arcs()
                .map(|(s, e, t)| (map[s].clone(), e.to_string(), map[t].clone())),
            map[self.initial.as_str()].clone(),
        )
    }
}

/// One agent of an [`Amas`]: a name and its transition system, whose state
/// identifiers are qualified as `<name>.<local>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    name: String,
    lts: Lts,
}

impl Agent {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lts(&self) -> &Lts {
        &self.lts
    }

    pub fn qualify(&self, local: &str) -> String {
        format!("{}.{}", self.name, local)
    }

    /// Strips the agent prefix from a qualified state identifier.
    pub fn local<'a>(&self, qualified: &'a str) -> &'a str {
        qualified
            .strip_prefix(self.name.as_str())
            .and_then(|rest| rest.strip_prefix('.'))
            .unwrap_or(qualified)
    }

    /// The agent's transition system with local (unqualified) state names.
    pub fn local_lts(&self) -> Lts {
        self.lts
            .rename_states(|s| self.local(s).to_string())
            .expect("stripping a common prefix keeps states distinct")
    }
}

/// Asynchronous multi-agent system: an ordered, non-empty list of agents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amas {
    agents: Vec<Agent>,
}

impl Amas {
    /// Takes agents with local state names and namespaces every state with
    /// its agent name, so agent state sets are pairwise disjoint.
    pub fn new(agents: Vec<(String, Lts)>) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::EmptyAmas);
        }
        let mut names = BTreeSet::new();
        let mut out = Vec::with_capacity(agents.len());
        for (name, lts) in agents {
            if !names.insert(name.clone()) {
                return Err(Error::DuplicateAgent(name));
            }
            let lts = lts.rename_states(|s| format!("{name}.{s}"))?;
            out.push(Agent { name, lts });
        }
        Ok(Amas { agents: out })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a.name == name)
    }

    /// Union of all agents' events, sorted.
    pub fn events(&self) -> BTreeSet<&str> {
        self.agents
            .iter()
            .flat_map(|a| a.lts.events.iter().map(String::as_str))
            .collect()
    }
}

/// Indices of the agents whose event set contains `label`.
pub fn agents_sharing(amas: &Amas, label: &str) -> BTreeSet<usize> {
    amas.agents
        .iter()
        .enumerate()
        .filter(|(_, a)| a.lts.events.contains(label))
        .map(|(i, _)| i)
        .collect()
}

/// A global state: one local state per agent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalState(pub Vec<String>);

impl fmt::Display for GlobalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(GLOBAL_STATE_SEPARATOR))
    }
}

/// Canonical IIS over global states together with the tuple behind each
/// rendered state identifier.
#[derive(Clone, Debug)]
pub struct Iis {
    pub lts: Lts,
    pub states: Vec<GlobalState>,
}

struct Interleaving<'a> {
    amas: &'a Amas,
    events: Vec<&'a str>,
    owners: Vec<Vec<usize>>,
}

impl<'a> Interleaving<'a> {
    fn new(amas: &'a Amas) -> Self {
        let events: Vec<&str> = amas.events().into_iter().collect();
        let owners = events
            .iter()
            .map(|e| agents_sharing(amas, e).into_iter().collect())
            .collect();
        Interleaving {
            amas,
            events,
            owners,
        }
    }

    fn initial(&self) -> GlobalState {
        GlobalState(self.amas.agents.iter().map(|a| a.lts.initial.clone()).collect())
    }

    /// Global successor under event number `k`; `None` when some owner of the
    /// event does not enable it locally.
    fn step(&self, g: &GlobalState, k: usize) -> Option<GlobalState> {
        let mut next = g.clone();
        for &i in &self.owners[k] {
            let succ = self.amas.agents[i].lts.successor(&g.0[i], self.events[k])?;
            next.0[i] = succ.to_string();
        }
        Some(next)
    }

    fn build(&self, states: Vec<GlobalState>) -> Result<Iis> {
        let index: HashMap<&GlobalState, usize> =
            states.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut arcs = Vec::new();
        for g in &states {
            for k in 0..self.events.len() {
                if let Some(next) = self.step(g, k) {
                    if index.contains_key(&next) {
                        arcs.push((g.to_string(), self.events[k].to_string(), next.to_string()));
                    }
                }
            }
        }
        let lts = Lts::new(
            states.iter().map(ToString::to_string),
            self.events.iter().copied(),
            arcs,
            self.initial().to_string(),
        )?;
        Ok(Iis { lts, states })
    }
}

/// Canonical IIS restricted to the global states reachable from the initial
/// one (the pruned system), built by forward exploration.
pub fn compose_iis(amas: &Amas) -> Result<Lts> {
    compose_iis_with_states(amas).map(|iis| iis.lts)
}

/// [`compose_iis`], also returning the state tuples in discovery order.
pub fn compose_iis_with_states(amas: &Amas) -> Result<Iis> {
    if amas.is_empty() {
        return Err(Error::EmptyAmas);
    }
    let il = Interleaving::new(amas);
    let init = il.initial();
    let mut seen: HashMap<GlobalState, ()> = HashMap::from([(init.clone(), ())]);
    let mut order = vec![init.clone()];
    let mut queue = VecDeque::from([init]);
    while let Some(g) = queue.pop_front() {
        for k in 0..il.events.len() {
            if let Some(next) = il.step(&g, k) {
                if seen.insert(next.clone(), ()).is_none() {
                    order.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    il.build(order)
}

/// Canonical IIS over the full product of local state sets, unreachable
/// tuples included.
pub fn compose_iis_eager(amas: &Amas) -> Result<Lts> {
    if amas.is_empty() {
        return Err(Error::EmptyAmas);
    }
    let il = Interleaving::new(amas);
    let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
    for agent in &amas.agents {
        tuples = tuples
            .into_iter()
            .flat_map(|prefix| {
                agent.lts.states.iter().map(move |s| {
                    let mut t = prefix.clone();
                    t.push(s.clone());
                    t
                })
            })
            .collect();
    }
    il.build(tuples.into_iter().map(GlobalState).collect())
        .map(|iis| iis.lts)
}

/// Sub-LTS induced by the states reachable from the initial state.
pub fn reachable_prune(lts: &Lts) -> Lts {
    let keep: BTreeSet<&str> = lts.reachable_states().into_iter().collect();
    let arcs = lts
        .arcs()
        .filter(|(s, _, _)| keep.contains(s))
        .map(|(s, e, t)| (s.to_string(), e.to_string(), t.to_string()));
    Lts::new(
        keep.iter().copied(),
        lts.events.iter().cloned(),
        arcs,
        lts.initial.clone(),
    )
    .expect("a sub-LTS of a well-formed LTS is well formed")
}

fn ensure_pruned(lts: &Lts) -> Result<()> {
    let reach: BTreeSet<&str> = lts.reachable_states().into_iter().collect();
    match lts.states.iter().find(|s| !reach.contains(s.as_str())) {
        Some(s) => Err(Error::NotPruned(s.clone())),
        None => Ok(()),
    }
}

/// Decides whether two reachable deterministic LTSs are isomorphic: a
/// bijection of states mapping initial to initial and preserving labelled
/// arcs. Event sets are not compared, only arcs.
pub fn iso_check(a: &Lts, b: &Lts) -> Result<bool> {
    ensure_pruned(a)?;
    ensure_pruned(b)?;
    if a.state_count() != b.state_count() || a.arc_count() != b.arc_count() {
        return Ok(false);
    }
    let mut fwd: HashMap<&str, &str> = HashMap::from([(a.initial(), b.initial())]);
    let mut bwd: HashMap<&str, &str> = HashMap::from([(b.initial(), a.initial())]);
    let mut queue = VecDeque::from([(a.initial(), b.initial())]);
    while let Some((sa, sb)) = queue.pop_front() {
        let out_a: Vec<(&str, &str)> = a.outgoing(sa).collect();
        let out_b: Vec<(&str, &str)> = b.outgoing(sb).collect();
        if out_a.len() != out_b.len() {
            return Ok(false);
        }
        for ((ea, ta), (eb, tb)) in out_a.into_iter().zip(out_b) {
            if ea != eb {
                return Ok(false);
            }
            match (fwd.get(ta), bwd.get(tb)) {
                (Some(&x), Some(&y)) if x == tb && y == ta => {}
                (None, None) => {
                    fwd.insert(ta, tb);
                    bwd.insert(tb, ta);
                    queue.push_back((ta, tb));
                }
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}
