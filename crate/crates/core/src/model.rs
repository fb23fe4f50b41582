//! The `.amas` text format.
//!
//! ```text
//! # two agents sharing `go`
//! agent left
//! states idle busy
//! events stop          # optional: events without arcs
//! init idle
//! arc idle go busy
//!
//! agent right
//! states off on
//! init off
//! arc off go on
//! ```
//!
//! One directive per line, whitespace separated; `#` starts a comment.
//! Identifiers use `[A-Za-z0-9_.']`, agent names may not contain `.`.
//! An agent's events are the labels of its arcs plus those listed in
//! `events`. [`render_model`] writes the canonical form: states and events
//! sorted, arcs sorted by source then label, one blank line between agents.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::mas::{Amas, Lts};

struct Draft {
    line: usize,
    name: String,
    states: Option<BTreeSet<String>>,
    events: BTreeSet<String>,
    init: Option<String>,
    arcs: BTreeMap<(String, String), String>,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        message: message.into(),
    })
}

fn check_ident(line: usize, s: &str, agent_name: bool) -> Result<()> {
    let ok = !s.is_empty()
        && s.chars().all(|c| {
            c.is_ascii_alphanumeric() || c == '_' || c == '\'' || (c == '.' && !agent_name)
        });
    if ok {
        Ok(())
    } else {
        err(line, format!("invalid identifier `{s}`"))
    }
}

pub fn parse_model(text: &str) -> Result<Amas> {
    let mut drafts: Vec<Draft> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut words = content.split_whitespace();
        let Some(directive) = words.next() else {
            continue;
        };
        let args: Vec<&str> = words.collect();
        if directive == "agent" {
            let [name] = args[..] else {
                return err(line, "expected `agent <name>`");
            };
            check_ident(line, name, true)?;
            if drafts.iter().any(|d| d.name == name) {
                return err(line, format!("duplicate agent `{name}`"));
            }
            drafts.push(Draft {
                line,
                name: name.to_string(),
                states: None,
                events: BTreeSet::new(),
                init: None,
                arcs: BTreeMap::new(),
            });
            continue;
        }
        let Some(d) = drafts.last_mut() else {
            return err(line, format!("`{directive}` before the first `agent`"));
        };
        for a in &args {
            check_ident(line, a, false)?;
        }
        match directive {
            "states" => {
                if d.states.is_some() {
                    return err(line, format!("agent `{}` declares its states twice", d.name));
                }
                if args.is_empty() {
                    return err(line, "expected at least one state");
                }
                d.states = Some(args.iter().map(|s| s.to_string()).collect());
            }
            "events" => d.events.extend(args.iter().map(|s| s.to_string())),
            "init" => {
                let [s] = args[..] else {
                    return err(line, "expected `init <state>`");
                };
                if d.init.is_some() {
                    return err(line, format!("agent `{}` has two initial states", d.name));
                }
                let Some(states) = &d.states else {
                    return err(line, "`init` before `states`");
                };
                if !states.contains(s) {
                    return err(line, format!("undeclared state `{s}`"));
                }
                d.init = Some(s.to_string());
            }
            "arc" => {
                let [src, label, dst] = args[..] else {
                    return err(line, "expected `arc <source> <label> <target>`");
                };
                let Some(states) = &d.states else {
                    return err(line, "`arc` before `states`");
                };
                for s in [src, dst] {
                    if !states.contains(s) {
                        return err(line, format!("undeclared state `{s}`"));
                    }
                }
                let key = (src.to_string(), label.to_string());
                if d.arcs.contains_key(&key) {
                    return err(
                        line,
                        format!("duplicate arc from `{src}` labelled `{label}`"),
                    );
                }
                d.arcs.insert(key, dst.to_string());
            }
            other => return err(line, format!("unknown directive `{other}`")),
        }
    }
    if drafts.is_empty() {
        return err(text.lines().count().max(1), "no agent declared");
    }
    let mut agents = Vec::with_capacity(drafts.len());
    for d in drafts {
        let Some(states) = d.states else {
            return err(d.line, format!("agent `{}` declares no states", d.name));
        };
        let Some(init) = d.init else {
            return err(d.line, format!("agent `{}` has no `init`", d.name));
        };
        let mut events = d.events;
        events.extend(d.arcs.keys().map(|(_, e)| e.clone()));
        let arcs = d.arcs.into_iter().map(|((s, e), t)| (s, e, t));
        let lts = Lts::new(states, events, arcs, init).map_err(|e| Error::Parse {
            line: d.line,
            message: e.to_string(),
        })?;
        agents.push((d.name, lts));
    }
    Amas::new(agents)
}

pub fn render_model(amas: &Amas) -> String {
    let mut out = String::new();
    for (i, agent) in amas.agents().iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let lts = agent.local_lts();
        let states: Vec<&str> = lts.states().iter().map(String::as_str).collect();
        out.push_str(&format!("agent {}\nstates {}\n", agent.name(), states.join(" ")));
        let used: BTreeSet<&str> = lts.arcs().map(|(_, e, _)| e).collect();
        let extra: Vec<&str> = lts
            .events()
            .iter()
            .map(String::as_str)
            .filter(|e| !used.contains(e))
            .collect();
        if !extra.is_empty() {
            out.push_str(&format!("events {}\n", extra.join(" ")));
        }
        out.push_str(&format!("init {}\n", lts.initial()));
        for (s, e, t) in lts.arcs() {
            out.push_str(&format!("arc {s} {e} {t}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "\
agent left
states busy idle
events stop
init idle
arc idle go busy

agent right
states off on
init off
arc off go on
";

    #[test]
    fn canonical_text_round_trips() {
        let amas = parse_model(TWO).unwrap();
        assert_eq!(amas.len(), 2);
        assert!(amas.agents()[0].lts().events().contains("stop"));
        assert_eq!(render_model(&amas), TWO);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let amas = parse_model("# header\n\nagent a   # trailing\nstates x\ninit x\n").unwrap();
        assert_eq!(amas.agents()[0].lts().state_count(), 1);
    }

    fn parse_error(text: &str) -> (usize, String) {
        match parse_model(text) {
            Err(Error::Parse { line, message }) => (line, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics_name_the_line() {
        let (line, msg) = parse_error("agent a\nstates x\ninit x\narc x go y\n");
        assert_eq!(line, 4);
        assert!(msg.contains("undeclared state `y`"), "{msg}");

        let (line, msg) = parse_error("agent a\nstates x y\ninit x\narc x go y\narc x go x\n");
        assert_eq!(line, 5);
        assert!(msg.contains("duplicate arc"), "{msg}");

        let (line, msg) = parse_error("agent a\nstates x\n\nagent b\nstates y\ninit y\n");
        assert_eq!(line, 1);
        assert!(msg.contains("no `init`"), "{msg}");

        let (line, _) = parse_error("agent a\nstates x\ninit x\nfoo bar\n");
        assert_eq!(line, 4);
        let (line, _) = parse_error("states x\n");
        assert_eq!(line, 1);
        let (line, _) = parse_error("agent a.b\n");
        assert_eq!(line, 1);
        let (line, _) = parse_error("agent a\nstates x-y\n");
        assert_eq!(line, 2);
    }
}
