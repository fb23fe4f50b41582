//! Python bindings: a `Model` class wrapping a parsed system and its agent
//! nets.

use std::collections::BTreeSet;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use amasnet::compose::{
    agent_nets, compose_nets, global_transitions, verify_proposition1, GlobalTransition,
};
use amasnet::dot::{lts_to_dot, marking_graph_to_dot, net_to_dot};
use amasnet::gen::{generate, GenConfig};
use amasnet::liveness::{check_1liveness, find_dead_transitions, Heuristic, LivenessOptions};
use amasnet::mas::{compose_iis, reachable_prune, Amas};
use amasnet::model::{parse_model, render_model};
use amasnet::net::LabelledNet;
use amasnet::synthesis::{synthesize, SynthesisOutcome};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn options(heuristic: &str) -> PyResult<LivenessOptions> {
    Ok(LivenessOptions {
        heuristic: heuristic.parse::<Heuristic>().map_err(err)?,
        ..LivenessOptions::default()
    })
}

/// Outcome of a 1-liveness check.
#[pyclass(frozen, get_all)]
struct Verdict {
    transition: String,
    live: bool,
    /// Global transition ids of the witness, empty when dead.
    witness: Vec<String>,
    /// (agents, markings, arcs, paths tried) per explored subsystem.
    explored: Vec<(Vec<usize>, usize, usize, usize)>,
}

#[pymethods]
impl Verdict {
    #[getter]
    fn witness_labels(&self) -> Vec<String> {
        self.witness
            .iter()
            .map(|w| w.split('[').next().unwrap_or_default().to_string())
            .collect()
    }

    #[getter]
    fn max_agents(&self) -> usize {
        self.explored.iter().map(|e| e.0.len()).max().unwrap_or(0)
    }

    fn __repr__(&self) -> String {
        format!(
            "Verdict({}, live={})",
            self.transition,
            if self.live { "True" } else { "False" }
        )
    }
}

#[pyclass(frozen)]
struct Model {
    amas: Amas,
    nets: Vec<LabelledNet>,
}

impl Model {
    fn wrap(amas: Amas) -> Self {
        let nets = agent_nets(&amas);
        Model { amas, nets }
    }

    fn find(&self, id: &str) -> PyResult<GlobalTransition> {
        let label = id.split('[').next().unwrap_or_default();
        global_transitions(&self.amas, &self.nets, label)
            .find(|g| g.to_string() == id)
            .ok_or_else(|| err(format!("no fused transition `{id}`")))
    }
}

#[pymethods]
impl Model {
    /// Parses the `.amas` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_model(text).map(Model::wrap).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(err)?;
        Self::parse(&text)
    }

    #[staticmethod]
    #[pyo3(signature = (seed, agents=3, states=4, labels=5))]
    fn generate(seed: u64, agents: usize, states: usize, labels: usize) -> PyResult<Self> {
        if agents == 0 || states == 0 || labels == 0 {
            return Err(err("agents, states and labels must be positive"));
        }
        let cfg = GenConfig {
            agents,
            max_states: states,
            labels,
            ..GenConfig::default()
        };
        Ok(Model::wrap(generate(seed, &cfg)))
    }

    #[getter]
    fn agents(&self) -> Vec<String> {
        self.amas.agents().iter().map(|a| a.name().to_string()).collect()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.amas.events().into_iter().map(str::to_string).collect()
    }

    fn render(&self) -> String {
        render_model(&self.amas)
    }

    /// Fused transition ids of the global net, optionally for one label.
    #[pyo3(signature = (label=None))]
    fn transitions(&self, label: Option<&str>) -> Vec<String> {
        self.amas
            .events()
            .into_iter()
            .filter(|l| label.is_none_or(|x| x == *l))
            .flat_map(|l| global_transitions(&self.amas, &self.nets, l).map(|g| g.to_string()))
            .collect()
    }

    /// (markings, arcs) of the global marking graph.
    fn marking_graph_size(&self) -> PyResult<(usize, usize)> {
        let c = compose_nets(&self.nets).map_err(err)?;
        let mg = c.net.marking_graph().map_err(err)?;
        Ok((mg.node_count(), mg.arc_count()))
    }

    fn verify_prop1(&self) -> PyResult<bool> {
        verify_proposition1(&self.amas).map_err(err)
    }

    #[pyo3(signature = (transition, heuristic="agents"))]
    fn check_liveness(&self, transition: &str, heuristic: &str) -> PyResult<Verdict> {
        let t = self.find(transition)?;
        let labels = BTreeSet::from([t.label.clone()]);
        let v = check_1liveness(&t, &self.amas, &self.nets, &labels, &options(heuristic)?)
            .map_err(err)?;
        Ok(Verdict {
            transition: v.transition.to_string(),
            live: v.live,
            witness: v
                .witness
                .map(|w| w.steps.iter().map(ToString::to_string).collect())
                .unwrap_or_default(),
            explored: v
                .explored
                .iter()
                .map(|e| (e.agents.iter().copied().collect(), e.markings, e.arcs, e.paths))
                .collect(),
        })
    }

    /// Brute-force reference: is the transition enabled in some reachable
    /// marking of the global net?
    fn is_live_bruteforce(&self, transition: &str) -> PyResult<bool> {
        let t = self.find(transition)?;
        let c = compose_nets(&self.nets).map_err(err)?;
        let i = c.index_of(&t).ok_or_else(|| err("transition not in the global net"))?;
        c.net.is_one_live_bruteforce(i).map_err(err)
    }

    #[pyo3(signature = (heuristic="agents"))]
    fn find_dead(&self, heuristic: &str) -> PyResult<Vec<String>> {
        Ok(find_dead_transitions(&self.amas, &self.nets, &options(heuristic)?)
            .map_err(err)?
            .iter()
            .map(ToString::to_string)
            .collect())
    }

    /// Whether region synthesis reproduces the named agent exactly.
    fn synthesizable(&self, agent: &str) -> PyResult<bool> {
        let i = self
            .amas
            .agent_index(agent)
            .ok_or_else(|| err(format!("no agent named `{agent}`")))?;
        let lts = self.amas.agents()[i].local_lts();
        Ok(matches!(synthesize(&lts).map_err(err)?, SynthesisOutcome::Net(_)))
    }

    /// Graphviz text for `net`, `mg` or `iis`.
    #[pyo3(signature = (kind="net"))]
    fn dot(&self, kind: &str) -> PyResult<String> {
        match kind {
            "net" => {
                let c = compose_nets(&self.nets).map_err(err)?;
                Ok(net_to_dot(&c.net, Some(c.fused())))
            }
            "mg" => {
                let c = compose_nets(&self.nets).map_err(err)?;
                Ok(marking_graph_to_dot(&c.net.marking_graph().map_err(err)?, &c.net))
            }
            "iis" => Ok(lts_to_dot(&reachable_prune(
                &compose_iis(&self.amas).map_err(err)?,
            ))),
            other => Err(err(format!("unknown kind `{other}` (net, mg or iis)"))),
        }
    }

    fn __repr__(&self) -> String {
        format!("Model(agents={:?})", self.agents())
    }
}

#[pymodule]
fn pyamasnet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Verdict>()?;
    Ok(())
}
