//! JSON model documents: automata, the supervisor network, the plant
//! expression and the specification.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::automaton::{parallel_compose, structural_subautomaton, TimedAutomaton};
use crate::error::{Error, Result};
use crate::event::EventId;
use crate::network::{ChannelSpec, NetworkConfig, Supervisor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub event: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDoc {
    pub name: String,
    pub states: Vec<String>,
    pub initial: String,
    #[serde(default)]
    pub marked: Vec<String>,
    /// Defaults to the events used by the transitions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<String>>,
    #[serde(default)]
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupervisorDoc {
    pub alphabet: Vec<String>,
    pub controllable: Vec<String>,
    pub observable: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    /// 1-based supervisor index.
    pub from: usize,
    pub to: usize,
    pub events: Vec<String>,
    #[serde(default)]
    pub lossy: Vec<String>,
    pub delay_bound: u32,
}

/// A COM matrix entry, written as 0/1 or as a boolean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bit {
    Int(u8),
    Bool(bool),
}

impl Bit {
    fn value(self) -> Result<bool> {
        match self {
            Bit::Int(0) | Bit::Bool(false) => Ok(false),
            Bit::Int(1) | Bit::Bool(true) => Ok(true),
            Bit::Int(v) => Err(Error::Schema(format!("com entries must be 0 or 1, found {v}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub n: usize,
    pub supervisors: Vec<SupervisorDoc>,
    #[serde(default)]
    pub enforceable: Vec<String>,
    pub com: Vec<Vec<Bit>>,
    #[serde(default)]
    pub channels: Vec<ChannelDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpecDoc {
    /// The plant with some states (and their transitions) deleted, optionally
    /// with a smaller marked set.
    Remove {
        remove_states: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        marked: Option<Vec<String>>,
    },
    /// One of the document's automata, by name.
    Named { automaton: String },
    Inline(AutomatonDoc),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub automata: Vec<AutomatonDoc>,
    pub network: NetworkDoc,
    pub plant: String,
    pub spec: SpecDoc,
}

/// A validated model.
#[derive(Clone, Debug)]
pub struct Model {
    pub automata: Vec<TimedAutomaton>,
    pub network: NetworkConfig,
    pub plant: TimedAutomaton,
    pub spec: TimedAutomaton,
}

fn event_set(names: &[String], context: &str) -> Result<BTreeSet<EventId>> {
    let mut set = BTreeSet::new();
    for n in names {
        if n.is_empty() {
            return Err(Error::Schema(format!("empty event name in {context}")));
        }
        if !set.insert(EventId::new(n)) {
            return Err(Error::Schema(format!("event `{n}` listed twice in {context}")));
        }
    }
    Ok(set)
}

impl AutomatonDoc {
    pub fn build(&self) -> Result<TimedAutomaton> {
        let name = &self.name;
        let index: HashMap<&str, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let lookup = |s: &str, what: &str| {
            index.get(s).copied().ok_or_else(|| Error::Reference {
                kind: "state",
                name: s.to_owned(),
                context: format!("{what} of automaton `{name}`"),
            })
        };
        let alphabet = match &self.alphabet {
            Some(a) => event_set(a, &format!("alphabet of `{name}`"))?,
            None => self.transitions.iter().map(|t| EventId::new(&t.event)).collect(),
        };
        let transitions = self
            .transitions
            .iter()
            .map(|t| {
                if t.event.is_empty() {
                    return Err(Error::Schema(format!("empty event name in automaton `{name}`")));
                }
                Ok((lookup(&t.from, "transitions")?, EventId::new(&t.event), lookup(&t.to, "transitions")?))
            })
            .collect::<Result<Vec<_>>>()?;
        let marked = self
            .marked
            .iter()
            .map(|m| lookup(m, "marked states"))
            .collect::<Result<Vec<_>>>()?;
        TimedAutomaton::from_parts(
            name.clone(),
            self.states.clone(),
            alphabet,
            &transitions,
            lookup(&self.initial, "initial state")?,
            &marked,
        )
    }

    pub fn from_automaton(a: &TimedAutomaton) -> Self {
        AutomatonDoc {
            name: a.name().to_owned(),
            states: a.states().to_vec(),
            initial: a.state_name(a.initial()).to_owned(),
            marked: a.marked_states().iter().map(|&s| a.state_name(s).to_owned()).collect(),
            alphabet: Some(a.alphabet().iter().map(|e| e.name().to_owned()).collect()),
            transitions: a
                .transitions()
                .into_iter()
                .map(|(f, e, t)| TransitionDoc {
                    from: a.state_name(f).to_owned(),
                    event: e.name().to_owned(),
                    to: a.state_name(t).to_owned(),
                })
                .collect(),
        }
    }
}

impl NetworkDoc {
    pub fn build(&self) -> Result<NetworkConfig> {
        if self.n != self.supervisors.len() {
            return Err(Error::Schema(format!(
                "network.n = {} but {} supervisors are listed",
                self.n,
                self.supervisors.len()
            )));
        }
        let supervisors = self
            .supervisors
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let ctx = |what: &str| format!("{what} events of supervisor {}", i + 1);
                Ok(Supervisor {
                    alphabet: event_set(&s.alphabet, &ctx("alphabet"))?,
                    controllable: event_set(&s.controllable, &ctx("controllable"))?,
                    observable: event_set(&s.observable, &ctx("observable"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let com = self
            .com
            .iter()
            .map(|row| row.iter().map(|b| b.value()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let mut channels = BTreeMap::new();
        for ch in &self.channels {
            if ch.from == 0 || ch.to == 0 || ch.from > self.n || ch.to > self.n {
                return Err(Error::Schema(format!(
                    "channel {}->{}: indices are 1-based and at most {}",
                    ch.from, ch.to, self.n
                )));
            }
            let ctx = format!("channel {}->{}", ch.from, ch.to);
            let spec = ChannelSpec {
                events: event_set(&ch.events, &ctx)?,
                lossy: event_set(&ch.lossy, &ctx)?,
                delay_bound: ch.delay_bound,
            };
            if channels.insert((ch.from - 1, ch.to - 1), spec).is_some() {
                return Err(Error::Schema(format!("{ctx} declared twice")));
            }
        }
        let enforceable = event_set(&self.enforceable, "enforceable")?;
        NetworkConfig::new(supervisors, enforceable, com, channels)
    }

    pub fn from_network(net: &NetworkConfig) -> Self {
        let names = |s: &BTreeSet<EventId>| s.iter().map(|e| e.name().to_owned()).collect::<Vec<_>>();
        NetworkDoc {
            n: net.n(),
            supervisors: net
                .supervisors()
                .iter()
                .map(|s| SupervisorDoc {
                    alphabet: names(&s.alphabet),
                    controllable: names(&s.controllable),
                    observable: names(&s.observable),
                })
                .collect(),
            enforceable: names(net.enforceable()),
            com: net
                .com_matrix()
                .iter()
                .map(|row| row.iter().map(|&b| Bit::Int(b as u8)).collect())
                .collect(),
            channels: net
                .channels()
                .iter()
                .filter(|(_, c)| !c.events.is_empty() || c.delay_bound > 0)
                .map(|(&(i, j), c)| ChannelDoc {
                    from: i + 1,
                    to: j + 1,
                    events: names(&c.events),
                    lossy: names(&c.lossy),
                    delay_bound: c.delay_bound,
                })
                .collect(),
        }
    }
}

/// Resolves `A || B || …` against the named automata.
pub fn resolve_plant(expr: &str, automata: &[TimedAutomaton]) -> Result<TimedAutomaton> {
    let find = |name: &str| {
        automata
            .iter()
            .find(|a| a.name() == name)
            .ok_or_else(|| Error::Reference {
                kind: "automaton",
                name: name.to_owned(),
                context: "plant expression".into(),
            })
    };
    let parts: Vec<&str> = expr.split("||").map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Schema(format!("malformed plant expression `{expr}`")));
    }
    let mut plant = find(parts[0])?.clone();
    for p in &parts[1..] {
        plant = parallel_compose(&plant, find(p)?)?;
    }
    Ok(plant)
}

impl ModelDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents serialize")
    }

    pub fn build(&self) -> Result<Model> {
        let mut automata: Vec<TimedAutomaton> = Vec::new();
        for doc in &self.automata {
            if automata.iter().any(|a| a.name() == doc.name) {
                return Err(Error::Schema(format!("automaton `{}` defined twice", doc.name)));
            }
            automata.push(doc.build()?);
        }
        let network = self.network.build()?;
        let plant = resolve_plant(&self.plant, &automata)?;
        let known = network.alphabet();
        if let Some(e) = plant.alphabet().iter().find(|e| !known.contains(e)) {
            return Err(Error::Reference {
                kind: "event",
                name: e.to_string(),
                context: "plant alphabet (no supervisor owns it)".into(),
            });
        }
        let spec = match &self.spec {
            SpecDoc::Remove { remove_states, marked } => {
                let mut removed = BTreeSet::new();
                for s in remove_states {
                    let idx = plant.state_index(s).ok_or_else(|| Error::Reference {
                        kind: "state",
                        name: s.clone(),
                        context: "spec.remove_states".into(),
                    })?;
                    removed.insert(idx);
                }
                let h = plant.induced("H", |s| !removed.contains(&s))?;
                match marked {
                    None => h,
                    Some(names) => {
                        let mut idx = Vec::new();
                        for m in names {
                            let s = h.state_index(m).ok_or_else(|| Error::Reference {
                                kind: "state",
                                name: m.clone(),
                                context: "spec.marked".into(),
                            })?;
                            if !h.is_marked(s) {
                                return Err(Error::Schema(format!(
                                    "spec.marked: `{m}` is not marked in the plant"
                                )));
                            }
                            idx.push(s);
                        }
                        h.with_marked(&idx)?
                    }
                }
            }
            SpecDoc::Named { automaton } => automata
                .iter()
                .find(|a| a.name() == automaton)
                .cloned()
                .ok_or_else(|| Error::Reference {
                    kind: "automaton",
                    name: automaton.clone(),
                    context: "spec".into(),
                })?,
            SpecDoc::Inline(doc) => doc.build()?,
        };
        if structural_subautomaton(&spec, &plant).is_none() {
            return Err(Error::Model(format!(
                "specification `{}` is not obtained from plant `{}` by removing states",
                spec.name(),
                plant.name()
            )));
        }
        Ok(Model {
            automata,
            network,
            plant,
            spec,
        })
    }
}

impl Model {
    pub fn from_json(text: &str) -> Result<Self> {
        ModelDoc::from_json(text)?.build()
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
