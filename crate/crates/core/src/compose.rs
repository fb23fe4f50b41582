//! Transition fusion of agent nets, for the whole system or for the
//! subsystem selected by a set of labels.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mas::{agents_sharing, compose_iis, iso_check, reachable_prune, Amas};
use crate::net::LabelledNet;
use crate::synthesis::agent_to_net;

/// A fused transition: a label and, for every participating agent, the
/// identifier of that agent's component transition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GlobalTransition {
    pub label: String,
    pub components: BTreeMap<usize, String>,
}

impl GlobalTransition {
    pub fn agents(&self) -> BTreeSet<usize> {
        self.components.keys().copied().collect()
    }
}

/// Renders as `label[t_i,t_j,…]` with components in agent order. This is
/// also the transition identifier inside composed nets.
impl fmt::Display for GlobalTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.components.values().map(String::as_str).collect();
        write!(f, "{}[{}]", self.label, parts.join(","))
    }
}

/// States-as-places nets of every agent, indexed like the agents.
pub fn agent_nets(amas: &Amas) -> Vec<LabelledNet> {
    amas.agents()
        .iter()
        .enumerate()
        .map(|(i, a)| agent_to_net(i, a.lts()))
        .collect()
}

/// Lazy cartesian product of the `label`-transitions of the selected agents
/// owning `label`. Empty when an owner has no such transition.
pub struct FusedTransitions<'a> {
    label: String,
    choices: Vec<(usize, Vec<&'a str>)>,
    cursor: Option<Vec<usize>>,
}

impl<'a> FusedTransitions<'a> {
    pub fn new(nets: &'a [LabelledNet], agents: &BTreeSet<usize>, label: &str) -> Self {
        let choices: Vec<(usize, Vec<&str>)> = agents
            .iter()
            .filter(|&&i| nets[i].alphabet().contains(label))
            .map(|&i| {
                let ids = nets[i]
                    .transitions()
                    .iter()
                    .filter(|t| t.label == label)
                    .map(|t| t.id.as_str())
                    .collect();
                (i, ids)
            })
            .collect();
        let live = !choices.is_empty() && choices.iter().all(|(_, ids)| !ids.is_empty());
        FusedTransitions {
            label: label.to_string(),
            cursor: live.then(|| vec![0; choices.len()]),
            choices,
        }
    }
}

impl Iterator for FusedTransitions<'_> {
    type Item = GlobalTransition;

    fn next(&mut self) -> Option<GlobalTransition> {
        let cursor = self.cursor.as_mut()?;
        let item = GlobalTransition {
            label: self.label.clone(),
            components: self
                .choices
                .iter()
                .zip(cursor.iter())
                .map(|((agent, ids), &k)| (*agent, ids[k].to_string()))
                .collect(),
        };
        // odometer, last agent fastest
        let mut pos = cursor.len();
        loop {
            if pos == 0 {
                self.cursor = None;
                break;
            }
            pos -= 1;
            cursor[pos] += 1;
            if cursor[pos] < self.choices[pos].1.len() {
                break;
            }
            cursor[pos] = 0;
        }
        Some(item)
    }
}

/// Fused transitions of the whole system carrying `label`.
pub fn global_transitions<'a>(
    amas: &Amas,
    nets: &'a [LabelledNet],
    label: &str,
) -> FusedTransitions<'a> {
    FusedTransitions::new(nets, &agents_sharing(amas, label), label)
}

/// A composed net together with the fused transition behind each of its
/// transitions (same index).
#[derive(Clone, Debug)]
pub struct ComposedNet {
    pub net: LabelledNet,
    pub agents: BTreeSet<usize>,
    fused: Vec<GlobalTransition>,
    index: HashMap<GlobalTransition, usize>,
}

impl ComposedNet {
    pub fn fused(&self) -> &[GlobalTransition] {
        &self.fused
    }

    pub fn fused_transition(&self, t: usize) -> &GlobalTransition {
        &self.fused[t]
    }

    pub fn index_of(&self, t: &GlobalTransition) -> Option<usize> {
        self.index.get(t).copied()
    }
}

/// Fuses all agent nets; agent `i` is `nets[i]`.
pub fn compose_nets(nets: &[LabelledNet]) -> Result<ComposedNet> {
    compose_selected(nets, &(0..nets.len()).collect())
}

/// Fuses the nets of the selected agents. Labels owned by unselected agents
/// synchronise only among the selected ones.
pub fn compose_selected(nets: &[LabelledNet], agents: &BTreeSet<usize>) -> Result<ComposedNet> {
    let mut b = LabelledNet::builder();
    let mut owner_of_place: HashMap<&str, usize> = HashMap::new();
    let mut labels = BTreeSet::new();
    for &i in agents {
        let net = nets
            .get(i)
            .ok_or_else(|| Error::UnknownTransition(format!("agent #{i}")))?;
        for p in net.places() {
            if owner_of_place.insert(p.as_str(), i).is_some() {
                return Err(Error::PlaceCollision(p.clone()));
            }
            b.place(p.clone());
        }
        for &p in net.initial_marking().places() {
            b.mark(net.place_name(p));
        }
        labels.extend(net.alphabet().iter().cloned());
    }
    let mut fused = Vec::new();
    for label in &labels {
        b.label(label.clone());
        for gt in FusedTransitions::new(nets, agents, label) {
            let (mut pre, mut post) = (BTreeSet::new(), BTreeSet::new());
            for (&agent, id) in &gt.components {
                let net = &nets[agent];
                let t = net.transition(net.transition_by_id(id).expect("component exists"))?;
                pre.extend(t.preset.iter().map(|&p| net.place_name(p)));
                post.extend(t.postset.iter().map(|&p| net.place_name(p)));
            }
            let pre: Vec<&str> = pre.into_iter().collect();
            let post: Vec<&str> = post.into_iter().collect();
            b.transition(gt.to_string(), label.clone(), &pre, &post);
            fused.push(gt);
        }
    }
    let net = b.build()?;
    let mut by_id: HashMap<String, GlobalTransition> =
        fused.into_iter().map(|g| (g.to_string(), g)).collect();
    let fused: Vec<GlobalTransition> = net
        .transitions()
        .iter()
        .map(|t| by_id.remove(&t.id).expect("every net transition is fused"))
        .collect();
    let index = fused.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
    Ok(ComposedNet {
        net,
        agents: agents.clone(),
        fused,
        index,
    })
}

/// The net `Σ^Λ` over the agents whose alphabet meets a label set.
#[derive(Clone, Debug)]
pub struct Subsystem {
    pub agents: BTreeSet<usize>,
    pub origin_labels: BTreeSet<String>,
    pub composed: ComposedNet,
}

/// Agents owning at least one of `labels`.
pub fn agents_for_labels<'a>(
    amas: &Amas,
    labels: impl IntoIterator<Item = &'a str>,
) -> BTreeSet<usize> {
    labels
        .into_iter()
        .flat_map(|l| agents_sharing(amas, l))
        .collect()
}

pub fn subsystem(amas: &Amas, nets: &[LabelledNet], labels: &BTreeSet<String>) -> Result<Subsystem> {
    let agents = agents_for_labels(amas, labels.iter().map(String::as_str));
    if agents.is_empty() {
        return Err(Error::EmptySubsystem);
    }
    Ok(Subsystem {
        composed: compose_selected(nets, &agents)?,
        agents,
        origin_labels: labels.clone(),
    })
}

/// The subsystem transition identified with `t`: same components, provided
/// every owner of `t` is in the subsystem.
pub fn project_transition(t: &GlobalTransition, sub: &Subsystem) -> Option<usize> {
    if !t.components.keys().all(|i| sub.agents.contains(i)) {
        return None;
    }
    sub.composed.index_of(t)
}

/// Checks that the label projection of the fused net's marking graph is
/// isomorphic to the pruned canonical IIS.
pub fn verify_proposition1(amas: &Amas) -> Result<bool> {
    let composed = compose_nets(&agent_nets(amas))?;
    let mg = composed.net.marking_graph()?;
    let from_net = mg.to_lts(&composed.net)?;
    let iis = reachable_prune(&compose_iis(amas)?);
    iso_check(&from_net, &iis)
}
