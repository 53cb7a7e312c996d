use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::event::EventId;

/// Local event partitions of one supervisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Supervisor {
    pub alphabet: BTreeSet<EventId>,
    pub controllable: BTreeSet<EventId>,
    pub observable: BTreeSet<EventId>,
}

impl Supervisor {
    pub fn uncontrollable(&self) -> BTreeSet<EventId> {
        self.alphabet.difference(&self.controllable).cloned().collect()
    }
}

/// Configuration of the channel carrying event reports from one supervisor
/// to another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelSpec {
    pub events: BTreeSet<EventId>,
    pub lossy: BTreeSet<EventId>,
    /// Maximum age of an undelivered entry, in ticks.
    pub delay_bound: u32,
}

/// Supervisor partitions, enforceable events and the communication topology.
/// Supervisor indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkConfig {
    supervisors: Vec<Supervisor>,
    enforceable: BTreeSet<EventId>,
    com: Vec<Vec<bool>>,
    channels: BTreeMap<(usize, usize), ChannelSpec>,
}

fn names(set: impl IntoIterator<Item = EventId>) -> Vec<String> {
    set.into_iter().map(|e| e.name().to_owned()).collect()
}

impl NetworkConfig {
    /// Validates and assembles a network. Every `com[i][j] = true` pair
    /// without an entry in `channels` gets an empty channel.
    pub fn new(
        supervisors: Vec<Supervisor>,
        enforceable: BTreeSet<EventId>,
        com: Vec<Vec<bool>>,
        mut channels: BTreeMap<(usize, usize), ChannelSpec>,
    ) -> Result<Self> {
        let n = supervisors.len();
        if n == 0 {
            return Err(Error::Schema("network needs at least one supervisor".into()));
        }
        if com.len() != n || com.iter().any(|row| row.len() != n) {
            return Err(Error::Schema(format!("com must be a {n}x{n} matrix")));
        }
        for (i, sup) in supervisors.iter().enumerate() {
            let label = i + 1;
            if !sup.alphabet.contains(&EventId::tick()) {
                return Err(Error::Schema(format!("supervisor {label}: alphabet must contain tick")));
            }
            if !sup.observable.contains(&EventId::tick()) {
                return Err(Error::Schema(format!(
                    "supervisor {label}: tick must be observable"
                )));
            }
            for (what, set) in [("controllable", &sup.controllable), ("observable", &sup.observable)] {
                let stray: Vec<_> = set.difference(&sup.alphabet).cloned().collect();
                if !stray.is_empty() {
                    return Err(Error::Schema(format!(
                        "supervisor {label}: {what} events {:?} are outside its alphabet",
                        names(stray)
                    )));
                }
            }
            if com[i][i] {
                return Err(Error::Schema(format!("com[{label}][{label}] must be 0")));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let shared: Vec<EventId> = supervisors[i]
                    .alphabet
                    .intersection(&supervisors[j].alphabet)
                    .filter(|e| !e.is_tick())
                    .cloned()
                    .collect();
                if !shared.is_empty() {
                    return Err(Error::Disjointness {
                        first: i + 1,
                        second: j + 1,
                        shared: names(shared),
                    });
                }
            }
        }
        if enforceable.iter().any(EventId::is_tick) {
            return Err(Error::Schema("tick cannot be enforceable".into()));
        }
        for e in &enforceable {
            if !supervisors.iter().any(|s| s.alphabet.contains(e)) {
                return Err(Error::Reference {
                    kind: "event",
                    name: e.to_string(),
                    context: "enforceable".into(),
                });
            }
        }
        for (&(i, j), ch) in &channels {
            if i >= n || j >= n {
                return Err(Error::Schema(format!(
                    "channel {}->{} refers to a missing supervisor",
                    i + 1,
                    j + 1
                )));
            }
            if !com[i][j] {
                return Err(Error::Schema(format!(
                    "channel {}->{} declared but com[{}][{}] = 0",
                    i + 1,
                    j + 1,
                    i + 1,
                    j + 1
                )));
            }
            if ch.events.iter().any(EventId::is_tick) || ch.lossy.iter().any(EventId::is_tick) {
                return Err(Error::Schema(format!(
                    "channel {}->{}: tick cannot be communicated",
                    i + 1,
                    j + 1
                )));
            }
            let stray: Vec<_> = ch.events.difference(&supervisors[i].observable).cloned().collect();
            if !stray.is_empty() {
                return Err(Error::Schema(format!(
                    "channel {}->{}: events {:?} are not observable by supervisor {}",
                    i + 1,
                    j + 1,
                    names(stray),
                    i + 1
                )));
            }
            if !ch.lossy.is_subset(&ch.events) {
                return Err(Error::Schema(format!(
                    "channel {}->{}: lossy events must be a subset of the channel events",
                    i + 1,
                    j + 1
                )));
            }
        }
        for (i, row) in com.iter().enumerate() {
            for (j, &linked) in row.iter().enumerate() {
                if linked {
                    channels.entry((i, j)).or_insert_with(|| ChannelSpec {
                        events: BTreeSet::new(),
                        lossy: BTreeSet::new(),
                        delay_bound: 0,
                    });
                }
            }
        }
        Ok(NetworkConfig {
            supervisors,
            enforceable,
            com,
            channels,
        })
    }

    pub fn n(&self) -> usize {
        self.supervisors.len()
    }

    pub fn supervisors(&self) -> &[Supervisor] {
        &self.supervisors
    }

    pub fn supervisor(&self, i: usize) -> &Supervisor {
        &self.supervisors[i]
    }

    pub fn enforceable(&self) -> &BTreeSet<EventId> {
        &self.enforceable
    }

    pub fn is_enforceable(&self, e: &EventId) -> bool {
        self.enforceable.contains(e)
    }

    pub fn com(&self, i: usize, j: usize) -> bool {
        self.com[i][j]
    }

    pub fn com_matrix(&self) -> &[Vec<bool>] {
        &self.com
    }

    /// Channels keyed by `(from, to)` in canonical order.
    pub fn channels(&self) -> &BTreeMap<(usize, usize), ChannelSpec> {
        &self.channels
    }

    pub fn channel(&self, from: usize, to: usize) -> Option<&ChannelSpec> {
        self.channels.get(&(from, to))
    }

    /// Union of all supervisor alphabets.
    pub fn alphabet(&self) -> BTreeSet<EventId> {
        self.supervisors
            .iter()
            .flat_map(|s| s.alphabet.iter().cloned())
            .collect()
    }

    /// The supervisor whose alphabet contains a non-tick event.
    pub fn owner(&self, e: &EventId) -> Option<usize> {
        if e.is_tick() {
            return None;
        }
        self.supervisors.iter().position(|s| s.alphabet.contains(e))
    }

    /// Supervisors able to disable `e`.
    pub fn controllers(&self, e: &EventId) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.supervisors[i].controllable.contains(e))
            .collect()
    }

    /// Membership in the global controllable set: an event is controllable
    /// unless some supervisor owning it declares it uncontrollable.
    pub fn is_controllable(&self, e: &EventId) -> bool {
        let owners: Vec<&Supervisor> = self
            .supervisors
            .iter()
            .filter(|s| s.alphabet.contains(e))
            .collect();
        !owners.is_empty() && owners.iter().all(|s| s.controllable.contains(e))
    }

    /// Events a supervisor can observe, directly or through its incoming
    /// channels.
    pub fn observation_alphabet(&self, i: usize) -> BTreeSet<EventId> {
        let mut obs = self.supervisors[i].observable.clone();
        for (&(_, to), ch) in &self.channels {
            if to == i {
                obs.extend(ch.events.iter().cloned());
            }
        }
        obs
    }
}
