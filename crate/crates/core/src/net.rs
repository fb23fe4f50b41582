//! 1-safe labelled Petri nets: structure, firing rule and marking graph.
//!
//! Markings are sets of places. A firing that would put a second token on a
//! place is reported as [`Error::SafetyViolation`] rather than saturated.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::mas::Lts;

/// A marking of a 1-safe net: sorted, duplicate-free place indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(Vec<usize>);

impl Marking {
    pub fn new(places: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = places.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Marking(v)
    }

    pub fn contains(&self, place: usize) -> bool {
        self.0.binary_search(&place).is_ok()
    }

    pub fn places(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn includes(&self, places: &[usize]) -> bool {
        places.iter().all(|&p| self.contains(p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    pub label: String,
    /// Sorted place indices.
    pub preset: Vec<usize>,
    /// Sorted place indices.
    pub postset: Vec<usize>,
}

/// One arc of the flow relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FlowArc {
    PlaceToTransition(usize, usize),
    TransitionToPlace(usize, usize),
}

/// Relation between two transitions enabled at the same marking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairRelation {
    Conflict,
    Concurrent,
    Neither,
}

/// 1-safe labelled net system `(P, T, F, m0, λ)`.
///
/// Places and transitions are kept sorted by identifier, so indices are
/// stable for a given set of identifiers. The alphabet may list labels that
/// no transition carries: an agent owning such a label blocks it in a
/// composition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledNet {
    places: Vec<String>,
    place_index: HashMap<String, usize>,
    transitions: Vec<Transition>,
    transition_index: HashMap<String, usize>,
    initial: Marking,
    alphabet: BTreeSet<String>,
}

#[derive(Default)]
pub struct NetBuilder {
    places: BTreeSet<String>,
    transitions: Vec<(String, String, Vec<String>, Vec<String>)>,
    marked: BTreeSet<String>,
    alphabet: BTreeSet<String>,
    duplicate_place: Option<String>,
}

impl NetBuilder {
    pub fn place(&mut self, name: impl Into<String>) -> &mut Self {
        let name = name.into();
        if !self.places.insert(name.clone()) && self.duplicate_place.is_none() {
            self.duplicate_place = Some(name);
        }
        self
    }

    pub fn transition<P: AsRef<str>>(
        &mut self,
        id: impl Into<String>,
        label: impl Into<String>,
        preset: &[P],
        postset: &[P],
    ) -> &mut Self {
        let label = label.into();
        self.alphabet.insert(label.clone());
        self.transitions.push((
            id.into(),
            label,
            preset.iter().map(|p| p.as_ref().to_string()).collect(),
            postset.iter().map(|p| p.as_ref().to_string()).collect(),
        ));
        self
    }

    pub fn mark(&mut self, place: impl Into<String>) -> &mut Self {
        self.marked.insert(place.into());
        self
    }

    /// Adds a label to the alphabet without a transition carrying it.
    pub fn label(&mut self, label: impl Into<String>) -> &mut Self {
        self.alphabet.insert(label.into());
        self
    }

    pub fn build(&self) -> Result<LabelledNet> {
        if let Some(p) = &self.duplicate_place {
            return Err(Error::DuplicatePlace(p.clone()));
        }
        let places: Vec<String> = self.places.iter().cloned().collect();
        let place_index: HashMap<String, usize> = places
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let lookup = |p: &String| {
            place_index
                .get(p)
                .copied()
                .ok_or_else(|| Error::UnknownPlace(p.clone()))
        };
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (id, label, pre, post) in &self.transitions {
            if pre.is_empty() || post.is_empty() {
                return Err(Error::EmptyNeighbourhood(id.clone()));
            }
            let preset: BTreeSet<usize> = pre.iter().map(lookup).collect::<Result<_>>()?;
            let postset: BTreeSet<usize> = post.iter().map(lookup).collect::<Result<_>>()?;
            transitions.push(Transition {
                id: id.clone(),
                label: label.clone(),
                preset: preset.into_iter().collect(),
                postset: postset.into_iter().collect(),
            });
        }
        transitions.sort_by(|a, b| a.id.cmp(&b.id));
        let mut transition_index = HashMap::with_capacity(transitions.len());
        for (i, t) in transitions.iter().enumerate() {
            if transition_index.insert(t.id.clone(), i).is_some() {
                return Err(Error::DuplicateTransition(t.id.clone()));
            }
        }
        let initial = Marking::new(self.marked.iter().map(lookup).collect::<Result<Vec<_>>>()?);
        Ok(LabelledNet {
            places,
            place_index,
            transitions,
            transition_index,
            initial,
            alphabet: self.alphabet.clone(),
        })
    }
}

impl LabelledNet {
    pub fn builder() -> NetBuilder {
        NetBuilder::default()
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn place_name(&self, place: usize) -> &str {
        &self.places[place]
    }

    pub fn place_by_name(&self, name: &str) -> Option<usize> {
        self.place_index.get(name).copied()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, t: usize) -> Result<&Transition> {
        self.transitions
            .get(t)
            .ok_or_else(|| Error::UnknownTransition(format!("#{t}")))
    }

    pub fn transition_by_id(&self, id: &str) -> Option<usize> {
        self.transition_index.get(id).copied()
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    /// Labels of the net; a superset of the labels its transitions carry.
    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    pub fn flow(&self) -> impl Iterator<Item = FlowArc> + '_ {
        self.transitions.iter().enumerate().flat_map(|(t, tr)| {
            tr.preset
                .iter()
                .map(move |&p| FlowArc::PlaceToTransition(p, t))
                .chain(tr.postset.iter().map(move |&p| FlowArc::TransitionToPlace(t, p)))
        })
    }

    pub fn marking_of<S: AsRef<str>>(&self, places: &[S]) -> Result<Marking> {
        places
            .iter()
            .map(|p| {
                self.place_by_name(p.as_ref())
                    .ok_or_else(|| Error::UnknownPlace(p.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Marking::new)
    }

    /// `{p,q}` with place names in index order.
    pub fn render_marking(&self, m: &Marking) -> String {
        let names: Vec<&str> = m.0.iter().map(|&p| self.places[p].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn enabled(&self, m: &Marking, t: usize) -> Result<bool> {
        Ok(m.includes(&self.transition(t)?.preset))
    }

    /// Fires `t` at `m`: `(m \ preset) ∪ postset`, self-loop places keep
    /// their token.
    pub fn fire(&self, m: &Marking, t: usize) -> Result<Marking> {
        let tr = self.transition(t)?;
        if !m.includes(&tr.preset) {
            return Err(Error::NotEnabled(tr.id.clone()));
        }
        for &p in &tr.postset {
            if m.contains(p) && tr.preset.binary_search(&p).is_err() {
                return Err(Error::SafetyViolation {
                    transition: tr.id.clone(),
                    place: self.places[p].clone(),
                });
            }
        }
        Ok(Marking::new(
            m.0.iter()
                .copied()
                .filter(|p| tr.preset.binary_search(p).is_err())
                .chain(tr.postset.iter().copied()),
        ))
    }

    /// Breadth-first exploration of the reachable markings.
    pub fn marking_graph(&self) -> Result<MarkingGraph> {
        let mut graph = MarkingGraph {
            markings: vec![self.initial.clone()],
            index: HashMap::from([(self.initial.clone(), 0)]),
            arcs: Vec::new(),
            outgoing: vec![Vec::new()],
        };
        let mut next = 0;
        while next < graph.markings.len() {
            let m = graph.markings[next].clone();
            for t in 0..self.transitions.len() {
                if !m.includes(&self.transitions[t].preset) {
                    continue;
                }
                let target = self.fire(&m, t)?;
                let target = match graph.index.get(&target) {
                    Some(&j) => j,
                    None => {
                        let j = graph.markings.len();
                        graph.index.insert(target.clone(), j);
                        graph.markings.push(target);
                        graph.outgoing.push(Vec::new());
                        j
                    }
                };
                graph.outgoing[next].push(graph.arcs.len());
                graph.arcs.push(GraphArc {
                    source: next,
                    transition: t,
                    label: self.transitions[t].label.clone(),
                    target,
                });
            }
            next += 1;
        }
        Ok(graph)
    }

    /// Reference 1-liveness check: is `t` enabled at some reachable marking?
    pub fn is_one_live_bruteforce(&self, t: usize) -> Result<bool> {
        let tr = self.transition(t)?;
        let graph = self.marking_graph()?;
        Ok(graph.markings.iter().any(|m| m.includes(&tr.preset)))
    }

    pub fn classify_pair(&self, m: &Marking, t1: usize, t2: usize) -> Result<PairRelation> {
        for t in [t1, t2] {
            if !self.enabled(m, t)? {
                return Err(Error::NotEnabled(self.transitions[t].id.clone()));
            }
        }
        let (a, b) = (&self.transitions[t1], &self.transitions[t2]);
        let meets = |x: &[usize], y: &[usize]| x.iter().any(|p| y.binary_search(p).is_ok());
        Ok(if meets(&a.preset, &b.preset) {
            PairRelation::Conflict
        } else if !meets(&a.postset, &b.postset) {
            PairRelation::Concurrent
        } else {
            PairRelation::Neither
        })
    }

    /// Explores the reachable markings and reports the first firing that
    /// would put a second token on a marked place, with the firing sequence
    /// leading to it.
    pub fn check_one_safe(&self) -> SafetyReport {
        let mut index = HashMap::from([(self.initial.clone(), 0usize)]);
        let mut markings = vec![self.initial.clone()];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let m = markings[i].clone();
            for t in 0..self.transitions.len() {
                if !m.includes(&self.transitions[t].preset) {
                    continue;
                }
                match self.fire(&m, t) {
                    Ok(next) => {
                        if !index.contains_key(&next) {
                            index.insert(next.clone(), markings.len());
                            parent.push(Some((i, t)));
                            queue.push_back(markings.len());
                            markings.push(next);
                        }
                    }
                    Err(Error::SafetyViolation { transition, place }) => {
                        let mut trace = Vec::new();
                        let mut cur = i;
                        while let Some((p, tt)) = parent[cur] {
                            trace.push(self.transitions[tt].id.clone());
                            cur = p;
                        }
                        trace.reverse();
                        return SafetyReport {
                            violation: Some(SafetyViolation {
                                trace,
                                transition,
                                place,
                            }),
                        };
                    }
                    Err(e) => unreachable!("enabled transition failed to fire: {e}"),
                }
            }
        }
        SafetyReport { violation: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyViolation {
    /// Firing sequence from the initial marking to the offending marking.
    pub trace: Vec<String>,
    pub transition: String,
    pub place: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyReport {
    pub violation: Option<SafetyViolation>,
}

impl SafetyReport {
    pub fn is_safe(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphArc {
    pub source: usize,
    pub transition: usize,
    pub label: String,
    pub target: usize,
}

/// Reachability graph of a net. Node 0 is the initial marking; arcs carry
/// both the fired transition and its label.
#[derive(Clone, Debug)]
pub struct MarkingGraph {
    markings: Vec<Marking>,
    index: HashMap<Marking, usize>,
    arcs: Vec<GraphArc>,
    outgoing: Vec<Vec<usize>>,
}

impl MarkingGraph {
    pub const INITIAL: usize = 0;

    pub fn markings(&self) -> &[Marking] {
        &self.markings
    }

    pub fn node_count(&self) -> usize {
        self.markings.len()
    }

    pub fn arcs(&self) -> &[GraphArc] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn node_of(&self, m: &Marking) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn outgoing(&self, node: usize) -> impl Iterator<Item = &GraphArc> {
        self.outgoing[node].iter().map(|&a| &self.arcs[a])
    }

    /// Indices into [`MarkingGraph::arcs`] of the arcs leaving `node`.
    pub fn outgoing_indices(&self, node: usize) -> &[usize] {
        &self.outgoing[node]
    }

    /// Transitions fired on at least one arc.
    pub fn live_transitions(&self) -> BTreeSet<usize> {
        self.arcs.iter().map(|a| a.transition).collect()
    }

    /// Label projection as an LTS whose states are rendered markings.
    pub fn to_lts(&self, net: &LabelledNet) -> Result<Lts> {
        let names: Vec<String> = self.markings.iter().map(|m| net.render_marking(m)).collect();
        let mut arcs: Vec<(String, String, String)> = Vec::new();
        let mut seen: HashMap<(usize, &str), usize> = HashMap::new();
        for a in &self.arcs {
            match seen.get(&(a.source, a.label.as_str())) {
                Some(&t) if t == a.target => continue,
                Some(_) => {
                    return Err(Error::NondeterministicGraph {
                        marking: names[a.source].clone(),
                        label: a.label.clone(),
                    })
                }
                None => {
                    seen.insert((a.source, a.label.as_str()), a.target);
                    arcs.push((names[a.source].clone(), a.label.clone(), names[a.target].clone()));
                }
            }
        }
        Lts::new(
            names.iter().cloned(),
            net.alphabet().iter().cloned(),
            arcs,
            names[Self::INITIAL].clone(),
        )
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}
