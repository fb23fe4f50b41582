//! Region-based synthesis of 1-safe nets and the states-as-places agent
//! translation.
//!
//! Region enumeration is exhaustive over state subsets and therefore bounded
//! by [`DEFAULT_REGION_BOUND`] states. The composition pipeline only needs
//! [`agent_to_net`], which always succeeds.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::mas::Lts;
use crate::net::LabelledNet;

pub const DEFAULT_REGION_BOUND: usize = 20;

/// A subset of states crossed uniformly by every label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region(pub BTreeSet<String>);

impl Region {
    pub fn contains(&self, state: &str) -> bool {
        self.0.contains(state)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<&str> = self.0.iter().map(String::as_str).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

/// How one label relates to a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Crossing {
    Enters,
    Leaves,
}

/// Crossing kinds of the arcs labelled `label`, as (enter, leave, stay)
/// flags.
fn crossings(lts: &Lts, label: &str, inside: impl Fn(&str) -> bool) -> (bool, bool, bool) {
    let (mut enter, mut leave, mut stay) = (false, false, false);
    for (s, e, t) in lts.arcs() {
        if e != label {
            continue;
        }
        match (inside(s), inside(t)) {
            (false, true) => enter = true,
            (true, false) => leave = true,
            _ => stay = true,
        }
    }
    (enter, leave, stay)
}

fn label_crosses(lts: &Lts, label: &str, region: &Region, kind: Crossing) -> bool {
    let (enter, leave, stay) = crossings(lts, label, |s| region.contains(s));
    match kind {
        Crossing::Enters => !leave && !stay,
        Crossing::Leaves => !enter && !stay,
    }
}

/// `label` leaves `region`: every arc labelled `label` goes from inside to
/// outside (vacuously true for a label without arcs).
pub fn leaves(lts: &Lts, label: &str, region: &Region) -> bool {
    label_crosses(lts, label, region, Crossing::Leaves)
}

pub fn enters(lts: &Lts, label: &str, region: &Region) -> bool {
    label_crosses(lts, label, region, Crossing::Enters)
}

pub fn is_region(lts: &Lts, subset: &BTreeSet<String>) -> bool {
    lts.events().iter().all(|e| {
        let (enter, leave, stay) = crossings(lts, e, |s| subset.contains(s));
        [enter, leave, stay].iter().filter(|&&f| f).count() <= 1
    })
}

/// All regions of `lts`, the two trivial ones included, sorted.
pub fn enumerate_regions(lts: &Lts, bound: usize) -> Result<Vec<Region>> {
    let n = lts.state_count();
    if n > bound || n >= 63 {
        return Err(Error::RegionBound {
            states: n,
            bound: bound.min(62),
        });
    }
    let states: Vec<&String> = lts.states().iter().collect();
    let events: Vec<&String> = lts.events().iter().collect();
    let idx = |s: &str| states.iter().position(|x| x.as_str() == s).unwrap();
    // arcs grouped by label as (source, target) bit positions
    let arcs_by_label: Vec<Vec<(usize, usize)>> = events
        .iter()
        .map(|e| {
            lts.arcs()
                .filter(|(_, l, _)| l == e)
                .map(|(s, _, t)| (idx(s), idx(t)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let inside = |i: usize| mask >> i & 1 == 1;
        let ok = arcs_by_label.iter().all(|arcs| {
            let mut kinds = 0u8;
            for &(s, t) in arcs {
                kinds |= match (inside(s), inside(t)) {
                    (false, true) => 1,
                    (true, false) => 2,
                    _ => 4,
                };
            }
            kinds.count_ones() <= 1
        });
        if ok {
            out.push(Region(
                (0..n).filter(|&i| inside(i)).map(|i| states[i].clone()).collect(),
            ));
        }
    }
    out.sort();
    Ok(out)
}

/// Non-empty regions that contain no strictly smaller non-empty region.
pub fn minimal_regions(regions: &[Region]) -> Vec<Region> {
    let nonempty: Vec<&Region> = regions.iter().filter(|r| !r.is_empty()).collect();
    let mut out: Vec<Region> = nonempty
        .iter()
        .filter(|r| {
            !nonempty
                .iter()
                .any(|o| o.len() < r.len() && o.0.is_subset(&r.0))
        })
        .map(|r| (*r).clone())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Why a transition system cannot be synthesised from a set of regions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparationWitness {
    /// No region holds exactly one of the two states.
    States(String, String),
    /// `event` is disabled in `state`, yet no region excluding `state` is
    /// left by `event`.
    EventState { state: String, event: String },
}

impl fmt::Display for SeparationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeparationWitness::States(a, b) => {
                write!(f, "SSP fails: states `{a}` and `{b}` are not separated")
            }
            SeparationWitness::EventState { state, event } => write!(
                f,
                "ESSP fails: event `{event}` is disabled at `{state}` but no region prevents it"
            ),
        }
    }
}

/// State separation: every pair of distinct states is split by a region.
pub fn check_ssp(lts: &Lts, regions: &[Region]) -> Result<(), SeparationWitness> {
    let states: Vec<&String> = lts.states().iter().collect();
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            if !regions.iter().any(|r| r.contains(a) != r.contains(b)) {
                return Err(SeparationWitness::States((*a).clone(), (*b).clone()));
            }
        }
    }
    Ok(())
}

/// Event/state separation: if `e` is not outgoing from `s`, some region
/// left by `e` excludes `s`.
pub fn check_essp(lts: &Lts, regions: &[Region]) -> Result<(), SeparationWitness> {
    for s in lts.states() {
        for e in lts.events() {
            if lts.successor(s, e).is_some() {
                continue;
            }
            if !regions.iter().any(|r| !r.contains(s) && leaves(lts, e, r)) {
                return Err(SeparationWitness::EventState {
                    state: s.clone(),
                    event: e.clone(),
                });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SynthesisOutcome {
    Net(LabelledNet),
    Failure(SeparationWitness),
}

/// Exact synthesis: one transition per label, one place per minimal region.
///
/// The place for the full state set is added when some label would
/// otherwise end up with an empty preset or postset; it is marked at every
/// reachable marking and only contributes self-loops.
pub fn synthesize(lts: &Lts) -> Result<SynthesisOutcome> {
    synthesize_bounded(lts, DEFAULT_REGION_BOUND)
}

pub fn synthesize_bounded(lts: &Lts, bound: usize) -> Result<SynthesisOutcome> {
    let regions = enumerate_regions(lts, bound)?;
    let mut places = minimal_regions(&regions);
    if let Err(w) = check_ssp(lts, &places).and_then(|_| check_essp(lts, &places)) {
        return Ok(SynthesisOutcome::Failure(w));
    }
    let flow = |places: &[Region], e: &str| {
        let mut pre = Vec::new();
        let mut post = Vec::new();
        for r in places {
            let name = r.to_string();
            let (l, n) = (leaves(lts, e, r), enters(lts, e, r));
            if l {
                pre.push(name.clone());
            }
            if n {
                post.push(name.clone());
            }
            if !l && !n && all_inside(lts, e, r) {
                pre.push(name.clone());
                post.push(name);
            }
        }
        (pre, post)
    };
    let needs_full = lts.events().iter().any(|e| {
        let (pre, post) = flow(&places, e);
        pre.is_empty() || post.is_empty()
    });
    let full = Region(lts.states().clone());
    if needs_full && !places.contains(&full) {
        places.push(full);
    }
    let mut b = LabelledNet::builder();
    for r in &places {
        b.place(r.to_string());
        if r.contains(lts.initial()) {
            b.mark(r.to_string());
        }
    }
    for e in lts.events() {
        let (pre, post) = flow(&places, e);
        b.transition(e.clone(), e.clone(), &pre, &post);
    }
    b.build().map(SynthesisOutcome::Net)
}

fn all_inside(lts: &Lts, label: &str, r: &Region) -> bool {
    lts.arcs()
        .filter(|(_, e, _)| *e == label)
        .all(|(s, _, t)| r.contains(s) && r.contains(t))
}

/// Transition identifier used by [`agent_to_net`].
pub fn agent_transition_id(agent: usize, source: &str, label: &str, target: &str) -> String {
    format!("{agent}:{source}-{label}->{target}")
}

/// States-as-places translation: one place per state, one transition per
/// arc, the initial state marked. The net is a state machine.
pub fn agent_to_net(agent: usize, lts: &Lts) -> LabelledNet {
    let mut b = LabelledNet::builder();
    for s in lts.states() {
        b.place(s.clone());
    }
    b.mark(lts.initial());
    for e in lts.events() {
        b.label(e.clone());
    }
    for (s, e, t) in lts.arcs() {
        b.transition(agent_transition_id(agent, s, e, t), e, &[s], &[t]);
    }
    b.build()
        .expect("distinct arcs of a deterministic LTS give distinct transitions")
}
