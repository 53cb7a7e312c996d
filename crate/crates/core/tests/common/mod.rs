#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use netsup::channel::{self, max_delay, ChannelState};
use netsup::{ChannelSpec, EventId, Model, NetworkConfig, Supervisor};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> Model {
    Model::from_file(fixture_path(name)).unwrap()
}

pub fn set(names: &[&str]) -> BTreeSet<EventId> {
    names.iter().map(EventId::new).collect()
}

/// Supervisors 1 and 2 owning `a1,b1` and `a2,b2`, channels in both
/// directions, `a1` and `b2` lossy.
pub fn two_channel_net(n12: u32, n21: u32) -> NetworkConfig {
    let sup = |own: &[&str]| {
        let mut names = vec!["tick"];
        names.extend_from_slice(own);
        Supervisor {
            alphabet: set(&names),
            controllable: set(&names),
            observable: set(&names),
        }
    };
    let channels = BTreeMap::from([
        (
            (0, 1),
            ChannelSpec {
                events: set(&["a1", "b1"]),
                lossy: set(&["a1"]),
                delay_bound: n12,
            },
        ),
        (
            (1, 0),
            ChannelSpec {
                events: set(&["a2", "b2"]),
                lossy: set(&["b2"]),
                delay_bound: n21,
            },
        ),
    ]);
    NetworkConfig::new(
        vec![sup(&["a1", "b1"]), sup(&["a2", "b2"])],
        BTreeSet::new(),
        vec![vec![false, true], vec![true, false]],
        channels,
    )
    .unwrap()
}

pub const OP_EVENTS: [&str; 4] = ["a1", "b1", "a2", "b2"];
pub const OP_CHANNELS: [(usize, usize); 2] = [(0, 1), (1, 0)];

#[derive(Clone, Debug)]
pub enum ChannelOp {
    Time,
    Push(usize),
    Deliver(usize, usize),
    Lose(usize, usize),
}

fn lens(s: &ChannelState) -> Vec<usize> {
    OP_CHANNELS.iter().map(|&(i, j)| s.get(i, j).map_or(0, |c| c.len())).collect()
}

/// Applies `ops` from the all-empty state, skipping undefined operations,
/// and checks after every step: age monotonicity, the age bound, exact
/// length bookkeeping per operator, and that each channel's deliveries and
/// remaining entries form, in order, a subsequence of what was pushed into
/// it. Returns the number of operations that were defined.
pub fn run_channel_ops(net: &NetworkConfig, ops: &[ChannelOp]) -> Result<usize, String> {
    let mut state = ChannelState::empty(net);
    let mut pushed: Vec<Vec<EventId>> = vec![Vec::new(); OP_CHANNELS.len()];
    let mut delivered: Vec<Vec<EventId>> = vec![Vec::new(); OP_CHANNELS.len()];
    let mut applied = 0;
    for op in ops {
        let before = lens(&state);
        let next = match op {
            ChannelOp::Time => channel::time_step(&state, net),
            ChannelOp::Push(e) => {
                let ev = EventId::new(OP_EVENTS[*e]);
                for (c, &(i, j)) in OP_CHANNELS.iter().enumerate() {
                    if net.channel(i, j).is_some_and(|s| s.events.contains(&ev)) {
                        pushed[c].push(ev.clone());
                    }
                }
                Some(channel::push(&state, &ev, net))
            }
            ChannelOp::Deliver(c, e) => {
                let (i, j) = OP_CHANNELS[*c];
                let ev = EventId::new(OP_EVENTS[*e]);
                let r = channel::deliver(&state, i, j, &ev);
                if r.is_some() {
                    delivered[*c].push(ev);
                }
                r
            }
            ChannelOp::Lose(c, d) => {
                let (i, j) = OP_CHANNELS[*c];
                channel::lose(&state, i, j, *d, net)
            }
        };
        let Some(next) = next else { continue };
        applied += 1;
        let after = lens(&next);
        match op {
            ChannelOp::Time => {
                if after != before {
                    return Err(format!("tick changed lengths {before:?} -> {after:?}"));
                }
            }
            ChannelOp::Push(e) => {
                let ev = EventId::new(OP_EVENTS[*e]);
                for (c, &(i, j)) in OP_CHANNELS.iter().enumerate() {
                    let grow = usize::from(net.channel(i, j).is_some_and(|s| s.events.contains(&ev)));
                    if after[c] != before[c] + grow {
                        return Err(format!("push {ev} grew channel {c} by {}", after[c] - before[c]));
                    }
                }
            }
            ChannelOp::Deliver(c, _) | ChannelOp::Lose(c, _) => {
                for k in 0..OP_CHANNELS.len() {
                    let want = if k == *c { before[k] - 1 } else { before[k] };
                    if after[k] != want {
                        return Err(format!("{op:?} changed channel {k}: {} -> {}", before[k], after[k]));
                    }
                }
                if let ChannelOp::Lose(c, _) = op {
                    let (i, j) = OP_CHANNELS[*c];
                    for (k, &(a, b)) in OP_CHANNELS.iter().enumerate() {
                        if k != *c && state.get(a, b) != next.get(a, b) {
                            return Err(format!("losing on {i}->{j} touched {a}->{b}"));
                        }
                    }
                }
            }
        }
        state = next;
        for (c, &(i, j)) in OP_CHANNELS.iter().enumerate() {
            let theta = state.get(i, j).cloned().unwrap_or_default();
            if !theta.ages_monotone() {
                return Err(format!("ages not monotone on {i}->{j}: {}", theta.render()));
            }
            let bound = net.channel(i, j).unwrap().delay_bound;
            if max_delay(&theta) > bound {
                return Err(format!("age bound {bound} exceeded on {i}->{j}: {}", theta.render()));
            }
            let mut rest: Vec<EventId> = delivered[c].clone();
            rest.extend(theta.entries().iter().map(|e| e.event.clone()));
            if !is_subsequence(&rest, &pushed[c]) {
                return Err(format!("channel {i}->{j} reordered: {rest:?} vs pushed {:?}", pushed[c]));
            }
        }
    }
    Ok(applied)
}

pub fn is_subsequence<T: PartialEq>(sub: &[T], full: &[T]) -> bool {
    let mut it = full.iter();
    sub.iter().all(|x| it.any(|y| y == x))
}
