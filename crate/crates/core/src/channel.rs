//! FIFO channel configurations and their four update operators: aging on
//! tick, pushing an occurred event, delivering the head, and losing the
//! d-th entry.
//!
//! Operators that may be undefined return `Option`; `None` is a modeled
//! outcome (the corresponding transition does not exist), not an error.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::event::EventId;
use crate::network::NetworkConfig;

/// An event in transit and the number of ticks since it was pushed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelEntry {
    pub event: EventId,
    pub age: u32,
}

/// Contents of one channel, front (oldest) first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelConfig(Vec<ChannelEntry>);

impl ChannelConfig {
    pub fn new(entries: Vec<ChannelEntry>) -> Self {
        ChannelConfig(entries)
    }

    pub fn entries(&self) -> &[ChannelEntry] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn front(&self) -> Option<&ChannelEntry> {
        self.0.first()
    }

    /// Ages never increase from front to back.
    pub fn ages_monotone(&self) -> bool {
        self.0.windows(2).all(|w| w[0].age >= w[1].age)
    }

    /// `(β1,1)(α1,0)` style rendering; `ε` when empty.
    pub fn render(&self) -> String {
        if self.0.is_empty() {
            return "ε".to_owned();
        }
        let mut out = String::new();
        for entry in &self.0 {
            let _ = write!(out, "({},{})", entry.event, entry.age);
        }
        out
    }
}

/// Age of the front entry, which is the largest age in the queue; 0 when empty.
pub fn max_delay(theta: &ChannelConfig) -> u32 {
    theta.front().map_or(0, |e| e.age)
}

/// Configurations of every channel of a network, keyed by `(from, to)`.
/// Pairs without a channel are implicitly empty and not stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelState(BTreeMap<(usize, usize), ChannelConfig>);

impl ChannelState {
    /// All channels of `net` empty.
    pub fn empty(net: &NetworkConfig) -> Self {
        ChannelState(
            net.channels()
                .keys()
                .map(|&k| (k, ChannelConfig::default()))
                .collect(),
        )
    }

    pub fn get(&self, from: usize, to: usize) -> Option<&ChannelConfig> {
        self.0.get(&(from, to))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &ChannelConfig)> {
        self.0.iter()
    }

    /// Replaces one channel's configuration.
    pub fn with(&self, from: usize, to: usize, theta: ChannelConfig) -> Self {
        let mut next = self.clone();
        next.0.insert((from, to), theta);
        next
    }

    pub fn total_len(&self) -> usize {
        self.0.values().map(ChannelConfig::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.values().all(ChannelConfig::is_empty)
    }

    /// Channel renderings in key order, comma separated.
    pub fn render(&self) -> String {
        self.0
            .values()
            .map(ChannelConfig::render)
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Ages every entry by one tick. Undefined when some channel's front entry
/// would exceed its delay bound.
pub fn time_step(state: &ChannelState, net: &NetworkConfig) -> Option<ChannelState> {
    let mut next = state.clone();
    for (&(i, j), theta) in next.0.iter_mut() {
        let bound = net.channel(i, j).map_or(0, |c| c.delay_bound);
        for entry in theta.0.iter_mut() {
            entry.age += 1;
        }
        if max_delay(theta) > bound {
            return None;
        }
    }
    Some(next)
}

/// Appends `(σ, 0)` to every channel whose event set contains `σ`.
pub fn push(state: &ChannelState, event: &EventId, net: &NetworkConfig) -> ChannelState {
    let mut next = state.clone();
    for (key, spec) in net.channels() {
        if spec.events.contains(event) {
            next.0.entry(*key).or_default().0.push(ChannelEntry {
                event: event.clone(),
                age: 0,
            });
        }
    }
    next
}

/// Removes the front entry of channel `from -> to`, defined only when that
/// entry carries `event`.
pub fn deliver(state: &ChannelState, from: usize, to: usize, event: &EventId) -> Option<ChannelState> {
    let theta = state.get(from, to)?;
    match theta.front() {
        Some(head) if head.event == *event => Some(state.with(from, to, ChannelConfig(theta.0[1..].to_vec()))),
        _ => None,
    }
}

/// Removes the `d`-th entry (1-based) of channel `from -> to`, defined only
/// when it exists and its event is lossy on that channel.
pub fn lose(state: &ChannelState, from: usize, to: usize, d: usize, net: &NetworkConfig) -> Option<ChannelState> {
    let theta = state.get(from, to)?;
    let spec = net.channel(from, to)?;
    if d == 0 || d > theta.len() || !spec.lossy.contains(&theta.0[d - 1].event) {
        return None;
    }
    let mut entries = theta.0.clone();
    entries.remove(d - 1);
    Some(state.with(from, to, ChannelConfig(entries)))
}
