//! Command-line front end. [`run`] takes the argument vector and two sinks
//! and returns the process exit code: 0 on success, 1 when a checked
//! property fails, 2 on bad input.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::compose::{agent_nets, compose_nets, global_transitions, verify_proposition1};
use crate::dot::{lts_to_dot, marking_graph_to_dot, net_to_dot};
use crate::gen::{generate, GenConfig};
use crate::liveness::{check_1liveness, check_all, Heuristic, LivenessOptions, LivenessVerdict};
use crate::mas::{compose_iis, reachable_prune, Amas, Lts};
use crate::model::{parse_model, render_model};
use crate::net::LabelledNet;
use crate::synthesis::{
    check_essp, check_ssp, enumerate_regions, minimal_regions, synthesize_bounded,
    SynthesisOutcome, DEFAULT_REGION_BOUND,
};

#[derive(Parser, Debug)]
#[command(name = "amasnet", version, about = "Multi-agent systems as 1-safe Petri nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Write a Graphviz rendering to this file.
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reachable part of the interleaved composition.
    Iis {
        model: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Agent nets (states as places), or exact region synthesis.
    Synth {
        model: PathBuf,
        /// Synthesise from regions instead of translating states to places.
        #[arg(long)]
        exact: bool,
        /// Only this agent.
        #[arg(long)]
        agent: Option<String>,
        #[arg(long, default_value_t = DEFAULT_REGION_BOUND)]
        bound: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Global net obtained by transition fusion.
    Compose {
        model: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Marking graph of the global net.
    Mg {
        model: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Regions of each agent and the separation properties.
    Regions {
        model: PathBuf,
        #[arg(long)]
        agent: Option<String>,
        #[arg(long, default_value_t = DEFAULT_REGION_BOUND)]
        bound: usize,
        #[arg(long)]
        json: bool,
    },
    /// 1-liveness of fused transitions.
    Liveness {
        model: PathBuf,
        /// Fused transition identifier, e.g. `x[0:A.p-x->A.q,1:B.r-x->B.s]`.
        #[arg(long, conflicts_with = "all")]
        transition: Option<String>,
        /// Only transitions with this label.
        #[arg(long)]
        label: Option<String>,
        /// Every fused transition (restricted by --label if given).
        #[arg(long)]
        all: bool,
        #[arg(long, default_value = "agents", value_parser = clap::builder::ValueParser::new(str::parse::<Heuristic>))]
        heuristic: Heuristic,
        #[arg(long, default_value_t = crate::liveness::DEFAULT_FRONTIER)]
        frontier: usize,
        /// Exit with status 1 when a dead transition is found.
        #[arg(long)]
        fail_on_dead: bool,
        #[arg(long)]
        json: bool,
    },
    /// Checks that the global net's marking graph matches the interleaved
    /// composition.
    #[command(name = "verify-prop1")]
    VerifyProp1 {
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Prints a seeded random model.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        agents: usize,
        /// Maximum number of states per agent.
        #[arg(long, default_value_t = 4)]
        states: usize,
        #[arg(long, default_value_t = 5)]
        labels: usize,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn input_error(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

type CmdResult = std::result::Result<i32, Failure>;

struct Ctx<'a> {
    out: &'a mut dyn Write,
    color: bool,
}

impl Ctx<'_> {
    fn line(&mut self, s: impl AsRef<str>) -> std::result::Result<(), Failure> {
        writeln!(self.out, "{}", s.as_ref()).map_err(input_error)
    }

    fn json(&mut self, v: &Value) -> std::result::Result<(), Failure> {
        let s = serde_json::to_string_pretty(v).map_err(input_error)?;
        self.line(s)
    }

    fn paint(&self, s: &str, code: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

/// Runs without colour.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_color(args, out, err, false)
}

pub fn run_with_color<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let mut ctx = Ctx { out, color };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load(path: &Path) -> std::result::Result<Amas, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write_dot(path: &Option<PathBuf>, text: String) -> std::result::Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, text)
            .map_err(|e| input_error(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn select_agent(amas: &Amas, name: &Option<String>) -> std::result::Result<Vec<usize>, Failure> {
    match name {
        None => Ok((0..amas.len()).collect()),
        Some(n) => amas
            .agent_index(n)
            .map(|i| vec![i])
            .ok_or_else(|| input_error(format!("no agent named `{n}`"))),
    }
}

fn net_json(net: &LabelledNet) -> Value {
    let names = |ps: &[usize]| ps.iter().map(|&p| net.place_name(p)).collect::<Vec<_>>();
    json!({
        "places": net.places(),
        "initial": names(net.initial_marking().places()),
        "transitions": net.transitions().iter().map(|t| json!({
            "id": t.id,
            "label": t.label,
            "preset": names(&t.preset),
            "postset": names(&t.postset),
        })).collect::<Vec<_>>(),
    })
}

fn net_text(ctx: &mut Ctx, net: &LabelledNet) -> std::result::Result<(), Failure> {
    ctx.line(format!(
        "places ({}): {}",
        net.places().len(),
        net.places().join(" ")
    ))?;
    ctx.line(format!("initial: {}", net.render_marking(net.initial_marking())))?;
    ctx.line(format!("transitions ({}):", net.transitions().len()))?;
    for t in net.transitions() {
        let names = |ps: &[usize]| {
            ps.iter()
                .map(|&p| net.place_name(p))
                .collect::<Vec<_>>()
                .join(",")
        };
        ctx.line(format!(
            "  {}  {{{}}} -{}-> {{{}}}",
            t.id,
            names(&t.preset),
            t.label,
            names(&t.postset)
        ))?;
    }
    Ok(())
}

fn agents_phrase(n: usize) -> String {
    if n == 1 {
        "1 agent".to_string()
    } else {
        format!("{n} agents")
    }
}

fn lts_json(lts: &Lts) -> Value {
    json!({
        "states": lts.states(),
        "initial": lts.initial(),
        "arcs": lts.arcs().map(|(s, e, t)| json!({"source": s, "label": e, "target": t})).collect::<Vec<_>>(),
    })
}

fn dispatch(cmd: Command, ctx: &mut Ctx) -> CmdResult {
    match cmd {
        Command::Iis { model, out } => {
            let amas = load(&model)?;
            let iis = reachable_prune(&compose_iis(&amas).map_err(input_error)?);
            write_dot(&out.dot, lts_to_dot(&iis))?;
            if out.json {
                ctx.json(&lts_json(&iis))?;
            } else {
                ctx.line(format!(
                    "states: {}  arcs: {}  initial: {}",
                    iis.state_count(),
                    iis.arc_count(),
                    iis.initial()
                ))?;
                for (s, e, t) in iis.arcs() {
                    ctx.line(format!("  {s} -{e}-> {t}"))?;
                }
            }
            Ok(0)
        }
        Command::Synth {
            model,
            exact,
            agent,
            bound,
            out,
        } => {
            let amas = load(&model)?;
            let chosen = select_agent(&amas, &agent)?;
            let nets = agent_nets(&amas);
            let mut code = 0;
            let mut reports = Vec::new();
            let mut dot = String::new();
            for i in chosen {
                let a = &amas.agents()[i];
                if !exact {
                    dot.push_str(&net_to_dot(&nets[i], None));
                    reports.push((a.name().to_string(), Ok(nets[i].clone())));
                    continue;
                }
                match synthesize_bounded(&a.local_lts(), bound).map_err(input_error)? {
                    SynthesisOutcome::Net(net) => {
                        dot.push_str(&net_to_dot(&net, None));
                        reports.push((a.name().to_string(), Ok(net)));
                    }
                    SynthesisOutcome::Failure(w) => {
                        code = 1;
                        reports.push((a.name().to_string(), Err(w.to_string())));
                    }
                }
            }
            write_dot(&out.dot, dot)?;
            if out.json {
                let v: Vec<Value> = reports
                    .iter()
                    .map(|(name, r)| match r {
                        Ok(net) => json!({"agent": name, "ok": true, "net": net_json(net)}),
                        Err(w) => json!({"agent": name, "ok": false, "witness": w}),
                    })
                    .collect();
                ctx.json(&Value::Array(v))?;
            } else {
                for (name, r) in &reports {
                    ctx.line(format!("agent {name}"))?;
                    match r {
                        Ok(net) => net_text(ctx, net)?,
                        Err(w) => ctx.line(format!("  synthesis failed: {w}"))?,
                    }
                }
            }
            Ok(code)
        }
        Command::Compose { model, out } => {
            let amas = load(&model)?;
            let c = compose_nets(&agent_nets(&amas)).map_err(input_error)?;
            write_dot(&out.dot, net_to_dot(&c.net, Some(c.fused())))?;
            if out.json {
                ctx.json(&net_json(&c.net))?;
            } else {
                net_text(ctx, &c.net)?;
            }
            Ok(0)
        }
        Command::Mg { model, out } => {
            let amas = load(&model)?;
            let c = compose_nets(&agent_nets(&amas)).map_err(input_error)?;
            let mg = c.net.marking_graph().map_err(input_error)?;
            write_dot(&out.dot, marking_graph_to_dot(&mg, &c.net))?;
            let name = |i: usize| c.net.render_marking(&mg.markings()[i]);
            if out.json {
                ctx.json(&json!({
                    "markings": (0..mg.node_count()).map(name).collect::<Vec<_>>(),
                    "arcs": mg.arcs().iter().map(|a| json!({
                        "source": a.source,
                        "target": a.target,
                        "label": a.label,
                        "transition": c.net.transitions()[a.transition].id,
                    })).collect::<Vec<_>>(),
                }))?;
            } else {
                ctx.line(format!("markings: {}  arcs: {}", mg.node_count(), mg.arc_count()))?;
                for a in mg.arcs() {
                    ctx.line(format!("  {} -{}-> {}", name(a.source), a.label, name(a.target)))?;
                }
            }
            Ok(0)
        }
        Command::Regions {
            model,
            agent,
            bound,
            json: as_json,
        } => {
            let amas = load(&model)?;
            let mut reports = Vec::new();
            for i in select_agent(&amas, &agent)? {
                let a = &amas.agents()[i];
                let lts = a.local_lts();
                let all = enumerate_regions(&lts, bound).map_err(input_error)?;
                let minimal = minimal_regions(&all);
                let ssp = check_ssp(&lts, &minimal).err().map(|w| w.to_string());
                let essp = check_essp(&lts, &minimal).err().map(|w| w.to_string());
                reports.push((a.name().to_string(), all, minimal, ssp, essp));
            }
            if as_json {
                let v: Vec<Value> = reports
                    .iter()
                    .map(|(name, all, min, ssp, essp)| {
                        json!({
                            "agent": name,
                            "regions": all.iter().map(|r| &r.0).collect::<Vec<_>>(),
                            "minimal": min.iter().map(|r| &r.0).collect::<Vec<_>>(),
                            "ssp": ssp.is_none(),
                            "essp": essp.is_none(),
                            "witnesses": ssp.iter().chain(essp.iter()).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                ctx.json(&Value::Array(v))?;
            } else {
                for (name, all, min, ssp, essp) in &reports {
                    ctx.line(format!("agent {name}: {} regions", all.len()))?;
                    let mins: Vec<String> = min.iter().map(ToString::to_string).collect();
                    ctx.line(format!("  minimal: {}", mins.join(" ")))?;
                    ctx.line(format!("  SSP: {}", ssp.as_deref().unwrap_or("holds")))?;
                    ctx.line(format!("  ESSP: {}", essp.as_deref().unwrap_or("holds")))?;
                }
            }
            Ok(0)
        }
        Command::Liveness {
            model,
            transition,
            label,
            all,
            heuristic,
            frontier,
            fail_on_dead,
            json: as_json,
        } => {
            let amas = load(&model)?;
            let nets = agent_nets(&amas);
            let opts = LivenessOptions {
                heuristic,
                frontier,
                ..LivenessOptions::default()
            };
            let verdicts: Vec<LivenessVerdict> = match (&transition, &label, all) {
                (Some(id), _, _) => {
                    let lbl = id.split('[').next().unwrap_or_default();
                    if label.as_deref().is_some_and(|l| l != lbl) {
                        return Err(input_error(format!("`{id}` is not labelled `{}`", label.unwrap())));
                    }
                    let t = global_transitions(&amas, &nets, lbl)
                        .find(|g| g.to_string() == *id)
                        .ok_or_else(|| input_error(format!("no fused transition `{id}`")))?;
                    let labels = BTreeSet::from([lbl.to_string()]);
                    vec![check_1liveness(&t, &amas, &nets, &labels, &opts).map_err(input_error)?]
                }
                (None, Some(l), _) => {
                    if !amas.events().contains(l.as_str()) {
                        return Err(input_error(format!("no agent has label `{l}`")));
                    }
                    check_all(&amas, &nets, &opts, Some(l)).map_err(input_error)?
                }
                (None, None, true) => check_all(&amas, &nets, &opts, None).map_err(input_error)?,
                (None, None, false) => {
                    return Err(input_error("give --transition, --label or --all"));
                }
            };
            let dead = verdicts.iter().filter(|v| !v.live).count();
            if as_json {
                ctx.json(&json!({
                    "heuristic": heuristic,
                    "total": verdicts.len(),
                    "dead": dead,
                    "verdicts": verdicts,
                }))?;
            } else {
                for v in &verdicts {
                    let line = match &v.witness {
                        Some(w) => format!(
                            "{}  {}  via {}  (largest subsystem: {})",
                            ctx.paint("live", "32"),
                            v.transition,
                            w.labels().join(" "),
                            agents_phrase(v.max_agents())
                        ),
                        None => format!(
                            "{}  {}  (largest subsystem: {})",
                            ctx.paint("dead", "31"),
                            v.transition,
                            agents_phrase(v.max_agents())
                        ),
                    };
                    ctx.line(line)?;
                }
                ctx.line(format!("dead: {dead} of {}", verdicts.len()))?;
            }
            Ok(if fail_on_dead && dead > 0 { 1 } else { 0 })
        }
        Command::VerifyProp1 { model, json: as_json } => {
            let amas = load(&model)?;
            let iso = verify_proposition1(&amas).map_err(input_error)?;
            if as_json {
                ctx.json(&json!({ "isomorphic": iso }))?;
            } else {
                ctx.line(format!("isomorphic: {iso}"))?;
            }
            Ok(if iso { 0 } else { 1 })
        }
        Command::Gen {
            seed,
            agents,
            states,
            labels,
        } => {
            if agents == 0 || states == 0 || labels == 0 {
                return Err(input_error("--agents, --states and --labels must be positive"));
            }
            let cfg = GenConfig {
                agents,
                max_states: states,
                labels,
                ..GenConfig::default()
            };
            let text = render_model(&generate(seed, &cfg));
            write!(ctx.out, "{text}").map_err(input_error)?;
            Ok(0)
        }
    }
}
