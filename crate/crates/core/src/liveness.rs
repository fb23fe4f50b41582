//! 1-liveness of fused transitions, decided on label-selected subsystems.
//!
//! [`check_1liveness`] starts from the subsystem owning the target's label
//! and follows minimal firing sequences into the subsystems selected by
//! their labels. A sequence whose labels select exactly the current agents
//! is a firing sequence of the global net; it is replayed on the agent nets
//! before the verdict is returned.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::compose::{
    agents_for_labels, global_transitions, project_transition, subsystem, GlobalTransition,
};
use crate::error::{Error, Result};
use crate::mas::{agents_sharing, Amas};
use crate::net::{LabelledNet, Marking, MarkingGraph};

pub const DEFAULT_FRONTIER: usize = 256;

/// Order in which candidate paths are tried.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Heuristic {
    /// Fewest agents outside the current subsystem, then shortest, then
    /// lexicographic on transition ids.
    #[default]
    FewestNewAgents,
    ShortestFirst,
    InputOrder,
}

impl Heuristic {
    pub const ALL: [Heuristic; 3] = [
        Heuristic::FewestNewAgents,
        Heuristic::ShortestFirst,
        Heuristic::InputOrder,
    ];
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "agents" => Ok(Heuristic::FewestNewAgents),
            "short" => Ok(Heuristic::ShortestFirst),
            "fifo" => Ok(Heuristic::InputOrder),
            other => Err(format!("unknown heuristic `{other}` (expected agents, short or fifo)")),
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Heuristic::FewestNewAgents => "agents",
            Heuristic::ShortestFirst => "short",
            Heuristic::InputOrder => "fifo",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LivenessOptions {
    pub heuristic: Heuristic,
    /// Number of materialised candidate paths the heuristic chooses from.
    pub frontier: usize,
    /// Skip path prefixes that can only lead to already explored agent sets.
    pub prune: bool,
}

impl Default for LivenessOptions {
    fn default() -> Self {
        LivenessOptions {
            heuristic: Heuristic::default(),
            frontier: DEFAULT_FRONTIER,
            prune: true,
        }
    }
}

/// A firing sequence whose markings before the last step are pairwise
/// distinct. `markings` has one more entry than `transitions`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalPath {
    pub transitions: Vec<usize>,
    pub markings: Vec<Marking>,
}

impl MinimalPath {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn labels(&self, net: &LabelledNet) -> BTreeSet<String> {
        self.transitions
            .iter()
            .map(|&t| net.transitions()[t].label.clone())
            .collect()
    }
}

/// Depth-first enumeration of the minimal paths ending with one firing of
/// `target`. Nodes that cannot reach a marking enabling the target are never
/// entered, and a path is not extended past an occurrence of the target.
/// Successors are tried nearest to the target first.
pub struct MinimalPaths<'a> {
    mg: &'a MarkingGraph,
    target: usize,
    // per node: arc indices towards nodes that can still reach the target,
    // sorted by distance to the target
    order: Vec<Vec<usize>>,
    on_path: Vec<bool>,
    // (node, next position in order); transitions[i] leads from stack[i] to stack[i + 1]
    stack: Vec<(usize, usize)>,
    transitions: Vec<usize>,
}

pub fn comp_min_paths(mg: &MarkingGraph, target: usize) -> MinimalPaths<'_> {
    let n = mg.node_count();
    // dist[v]: fewest steps from v to a firing of target
    let mut dist: Vec<Option<usize>> = vec![None; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue = std::collections::VecDeque::new();
    for a in mg.arcs() {
        preds[a.target].push(a.source);
        if a.transition == target && dist[a.source].is_none() {
            dist[a.source] = Some(1);
            queue.push_back(a.source);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap_or_default();
        for &u in &preds[v] {
            if dist[u].is_none() {
                dist[u] = Some(d + 1);
                queue.push_back(u);
            }
        }
    }
    let order = (0..n)
        .map(|v| {
            let mut out: Vec<usize> = mg
                .outgoing_indices(v)
                .iter()
                .copied()
                .filter(|&i| {
                    let a = &mg.arcs()[i];
                    a.transition == target || dist[a.target].is_some()
                })
                .collect();
            out.sort_by_key(|&i| {
                let a = &mg.arcs()[i];
                (if a.transition == target { 0 } else { dist[a.target].unwrap_or_default() + 1 }, i)
            });
            out
        })
        .collect();
    let mut on_path = vec![false; n];
    let mut stack = Vec::new();
    if n > 0 && dist[MarkingGraph::INITIAL].is_some() {
        on_path[MarkingGraph::INITIAL] = true;
        stack.push((MarkingGraph::INITIAL, 0));
    }
    MinimalPaths {
        mg,
        target,
        order,
        on_path,
        stack,
        transitions: Vec::new(),
    }
}

impl MinimalPaths<'_> {
    /// Next path, skipping every path with a prefix rejected by `viable`.
    /// `viable` sees the transition sequence of each candidate prefix,
    /// complete paths included, and the graph node the prefix leads to.
    pub fn next_with(
        &mut self,
        viable: &mut dyn FnMut(&[usize], usize) -> bool,
    ) -> Option<MinimalPath> {
        loop {
            let (node, pos) = self.stack.last_mut()?;
            let node = *node;
            let out = &self.order[node];
            if *pos >= out.len() {
                self.on_path[node] = false;
                self.stack.pop();
                self.transitions.pop();
                continue;
            }
            let arc = &self.mg.arcs()[out[*pos]];
            *pos += 1;
            if arc.transition == self.target {
                self.transitions.push(arc.transition);
                let ok = viable(&self.transitions, arc.target);
                let path = ok.then(|| MinimalPath {
                    transitions: self.transitions.clone(),
                    markings: self
                        .stack
                        .iter()
                        .map(|&(v, _)| v)
                        .chain([arc.target])
                        .map(|v| self.mg.markings()[v].clone())
                        .collect(),
                });
                self.transitions.pop();
                if path.is_some() {
                    return path;
                }
                continue;
            }
            if self.on_path[arc.target] {
                continue;
            }
            self.transitions.push(arc.transition);
            if !viable(&self.transitions, arc.target) {
                self.transitions.pop();
                continue;
            }
            self.on_path[arc.target] = true;
            self.stack.push((arc.target, 0));
        }
    }
}

impl Iterator for MinimalPaths<'_> {
    type Item = MinimalPath;

    fn next(&mut self) -> Option<MinimalPath> {
        self.next_with(&mut |_, _| true)
    }
}

/// A materialised path together with the data the heuristics rank by.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub path: MinimalPath,
    pub ids: Vec<String>,
    pub labels: BTreeSet<String>,
    /// Agents selected by `labels`.
    pub agents: BTreeSet<usize>,
    /// Of those, how many lie outside the current subsystem.
    pub new_agents: usize,
}

/// Removes and returns the candidate preferred by `heuristic`.
pub fn select_path(candidates: &mut Vec<Candidate>, heuristic: Heuristic) -> Result<Candidate> {
    if candidates.is_empty() {
        return Err(Error::EmptyPathSet);
    }
    let pick = match heuristic {
        Heuristic::InputOrder => 0,
        Heuristic::ShortestFirst => argmin(candidates, |c| (0, c.path.len())),
        Heuristic::FewestNewAgents => argmin(candidates, |c| (c.new_agents, c.path.len())),
    };
    Ok(candidates.remove(pick))
}

fn argmin(cs: &[Candidate], key: impl Fn(&Candidate) -> (usize, usize)) -> usize {
    let mut best = 0;
    for i in 1..cs.len() {
        let (a, b) = (&cs[i], &cs[best]);
        if (key(a), &a.ids) < (key(b), &b.ids) {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Global transitions, the last one being the target.
    pub steps: Vec<GlobalTransition>,
    pub agents: BTreeSet<usize>,
}

impl Witness {
    pub fn labels(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.label.as_str()).collect()
    }
}

/// One subsystem built during a check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExploredSubsystem {
    pub agents: BTreeSet<usize>,
    pub labels: BTreeSet<String>,
    pub markings: usize,
    pub arcs: usize,
    /// Candidate paths taken from the frontier.
    pub paths: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LivenessVerdict {
    pub transition: GlobalTransition,
    pub live: bool,
    pub witness: Option<Witness>,
    pub explored: Vec<ExploredSubsystem>,
}

impl LivenessVerdict {
    /// Size of the largest subsystem that had to be composed.
    pub fn max_agents(&self) -> usize {
        self.explored.iter().map(|e| e.agents.len()).max().unwrap_or(0)
    }
}

struct Search<'a> {
    amas: &'a Amas,
    nets: &'a [LabelledNet],
    target: &'a GlobalTransition,
    opts: LivenessOptions,
    owners: HashMap<String, BTreeSet<usize>>,
    // agent sets entered so far: either on the recursion stack or failed
    visited: HashSet<BTreeSet<usize>>,
    explored: Vec<ExploredSubsystem>,
}

impl Search<'_> {
    fn owners(&mut self, label: &str) -> &BTreeSet<usize> {
        if !self.owners.contains_key(label) {
            let o = agents_sharing(self.amas, label);
            self.owners.insert(label.to_string(), o);
        }
        &self.owners[label]
    }

    fn run(&mut self, labels: &BTreeSet<String>) -> Result<Option<Vec<GlobalTransition>>> {
        let agents = agents_for_labels(self.amas, labels.iter().map(String::as_str));
        if !self.visited.insert(agents.clone()) {
            return Ok(None);
        }
        let sub = subsystem(self.amas, self.nets, labels)?;
        let net = &sub.composed.net;
        let mg = net.marking_graph()?;
        let slot = self.explored.len();
        self.explored.push(ExploredSubsystem {
            agents: agents.clone(),
            labels: labels.clone(),
            markings: mg.node_count(),
            arcs: mg.arc_count(),
            paths: 0,
        });
        let Some(target) = project_transition(self.target, &sub) else {
            return Ok(None);
        };
        let owners: Vec<BTreeSet<usize>> = net
            .transitions()
            .iter()
            .map(|t| self.owners(&t.label).clone())
            .collect();
        let base = self.owners(&self.target.label.clone()).clone();
        let n = self.amas.len();
        let internal = internal_coreach(&mg, target, |t| owners[t].is_subset(&agents));
        // agent sets of the candidates materialised here
        let mut seen: HashSet<BTreeSet<usize>> = HashSet::new();

        let mut paths = comp_min_paths(&mg, target);
        let mut frontier: Vec<Candidate> = Vec::new();
        // once a candidate closes the subsystem the verdict is settled and
        // only the choice of witness is left, so the frontier stops growing
        let mut closing = false;
        loop {
            while !closing && frontier.len() < self.opts.frontier.max(1) {
                let prune = self.opts.prune;
                let (visited, seen_ref) = (&self.visited, &seen);
                let mut viable = |prefix: &[usize], node: usize| {
                    if !prune {
                        return true;
                    }
                    let mut needed = base.clone();
                    for &t in prefix {
                        needed.extend(owners[t].iter().copied());
                    }
                    let done = |set: &BTreeSet<usize>| visited.contains(set) || seen_ref.contains(set);
                    if prefix.last() == Some(&target) {
                        return needed == agents || !done(&needed);
                    }
                    (needed.is_subset(&agents) && internal[node])
                        || !all_supersets(&needed, n, |set| set == &agents || done(set))
                };
                match paths.next_with(&mut viable) {
                    Some(path) => {
                        let labels = path.labels(net);
                        let selected = agents_for_labels(self.amas, labels.iter().map(String::as_str));
                        if selected == agents {
                            closing = true;
                        } else {
                            seen.insert(selected.clone());
                        }
                        frontier.push(Candidate {
                            ids: path
                                .transitions
                                .iter()
                                .map(|&t| net.transitions()[t].id.clone())
                                .collect(),
                            new_agents: selected.difference(&agents).count(),
                            agents: selected,
                            labels,
                            path,
                        });
                    }
                    None => break,
                }
            }
            if frontier.is_empty() {
                return Ok(None);
            }
            let c = select_path(&mut frontier, self.opts.heuristic)?;
            self.explored[slot].paths += 1;
            if c.agents == agents {
                return Ok(Some(
                    c.path
                        .transitions
                        .iter()
                        .map(|&t| sub.composed.fused_transition(t).clone())
                        .collect(),
                ));
            }
            if self.visited.contains(&c.agents) {
                continue;
            }
            if let Some(steps) = self.run(&c.labels)? {
                return Ok(Some(steps));
            }
        }
    }
}

/// Whether `covered` holds for every agent set containing `needed`. Gives
/// up (returns false) when there are too many supersets to check.
fn all_supersets(
    needed: &BTreeSet<usize>,
    n: usize,
    covered: impl Fn(&BTreeSet<usize>) -> bool,
) -> bool {
    let missing: Vec<usize> = (0..n).filter(|i| !needed.contains(i)).collect();
    if missing.len() > 16 {
        return false;
    }
    (0u32..1 << missing.len()).all(|mask| {
        let mut set = needed.clone();
        set.extend((0..missing.len()).filter(|b| mask >> b & 1 == 1).map(|b| missing[b]));
        covered(&set)
    })
}

/// Nodes from which `target` can fire using only transitions accepted by
/// `keep` (on-path constraints ignored, so this over-approximates).
fn internal_coreach(mg: &MarkingGraph, target: usize, keep: impl Fn(usize) -> bool) -> Vec<bool> {
    let n = mg.node_count();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut reach = vec![false; n];
    let mut stack = Vec::new();
    for a in mg.arcs() {
        if a.transition == target {
            if !reach[a.source] {
                reach[a.source] = true;
                stack.push(a.source);
            }
        } else if keep(a.transition) {
            preds[a.target].push(a.source);
        }
    }
    while let Some(v) = stack.pop() {
        for &u in &preds[v] {
            if !reach[u] {
                reach[u] = true;
                stack.push(u);
            }
        }
    }
    reach
}

/// Decides whether `target` can ever fire, starting from the subsystem
/// selected by `labels`, which must contain the target's label.
pub fn check_1liveness(
    target: &GlobalTransition,
    amas: &Amas,
    nets: &[LabelledNet],
    labels: &BTreeSet<String>,
    opts: &LivenessOptions,
) -> Result<LivenessVerdict> {
    if !labels.contains(&target.label) {
        return Err(Error::LabelNotInSet(target.label.clone()));
    }
    let mut search = Search {
        amas,
        nets,
        target,
        opts: *opts,
        owners: HashMap::new(),
        visited: HashSet::new(),
        explored: Vec::new(),
    };
    let found = search.run(labels)?;
    let witness = match found {
        Some(steps) => {
            replay_global(amas, nets, &steps, target)?;
            let agents = steps.iter().flat_map(|s| s.agents()).collect();
            Some(Witness { steps, agents })
        }
        None => None,
    };
    Ok(LivenessVerdict {
        transition: target.clone(),
        live: witness.is_some(),
        witness,
        explored: search.explored,
    })
}

/// Fires `steps` on the global net, materialising only the fused
/// transitions along the way, and checks that the last one is `target`.
pub fn replay_global(
    amas: &Amas,
    nets: &[LabelledNet],
    steps: &[GlobalTransition],
    target: &GlobalTransition,
) -> Result<()> {
    let fail = |msg: String| Err(Error::ReplayFailed(msg));
    let mut marking: BTreeSet<&str> = nets
        .iter()
        .flat_map(|n| n.initial_marking().places().iter().map(move |&p| n.place_name(p)))
        .collect();
    for step in steps {
        if step.agents() != agents_sharing(amas, &step.label) {
            return fail(format!("`{step}` does not involve every owner of `{}`", step.label));
        }
        let mut consumed = Vec::new();
        let mut produced = Vec::new();
        for (&agent, id) in &step.components {
            let net = &nets[agent];
            let Some(t) = net.transition_by_id(id) else {
                return fail(format!("agent {agent} has no transition `{id}`"));
            };
            let tr = &net.transitions()[t];
            if tr.label != step.label {
                return fail(format!("`{id}` is not labelled `{}`", step.label));
            }
            consumed.extend(tr.preset.iter().map(|&p| net.place_name(p)));
            produced.extend(tr.postset.iter().map(|&p| net.place_name(p)));
        }
        if let Some(p) = consumed.iter().find(|p| !marking.contains(*p)) {
            return fail(format!("`{step}` is not enabled: `{p}` is empty"));
        }
        for p in &consumed {
            marking.remove(p);
        }
        for p in produced {
            if !marking.insert(p) {
                return fail(format!("`{step}` puts a second token on `{p}`"));
            }
        }
    }
    match steps.last() {
        Some(last) if last == target => Ok(()),
        _ => fail(format!("the sequence does not end with `{target}`")),
    }
}

/// Checks every fused transition (optionally only those labelled `label`),
/// each from the subsystem of its own label.
pub fn check_all(
    amas: &Amas,
    nets: &[LabelledNet],
    opts: &LivenessOptions,
    label: Option<&str>,
) -> Result<Vec<LivenessVerdict>> {
    let mut out = Vec::new();
    for alpha in amas.events() {
        if label.is_some_and(|l| l != alpha) {
            continue;
        }
        let labels = BTreeSet::from([alpha.to_string()]);
        for t in global_transitions(amas, nets, alpha) {
            out.push(check_1liveness(&t, amas, nets, &labels, opts)?);
        }
    }
    Ok(out)
}

/// Fused transitions that can never fire; removing them leaves the
/// behaviour of the global net unchanged.
pub fn find_dead_transitions(
    amas: &Amas,
    nets: &[LabelledNet],
    opts: &LivenessOptions,
) -> Result<BTreeSet<GlobalTransition>> {
    Ok(check_all(amas, nets, opts, None)?
        .into_iter()
        .filter(|v| !v.live)
        .map(|v| v.transition)
        .collect())
}
