//! Seeded random instances for property tests and oracle runs.
//!
//! Non-tick transitions only go from lower to higher state indices, so the
//! plant never has a cycle of non-tick events. States without an outgoing
//! tick get an enforceable active event, or a tick if they have none.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{accessible, validate_timed_assumptions, TimedAutomaton};
use crate::error::Result;
use crate::event::EventId;
use crate::model::{AutomatonDoc, Bit, ChannelDoc, Model, ModelDoc, NetworkDoc, SpecDoc, SupervisorDoc};

#[derive(Clone, Debug)]
pub struct GenParams {
    pub supervisors: usize,
    pub min_states: usize,
    pub max_states: usize,
    pub max_events_per_supervisor: usize,
    /// Probability of each candidate non-tick transition.
    pub transition_density: f64,
    /// Probability that a state has an outgoing tick.
    pub tick_density: f64,
    pub channel_density: f64,
    pub loss_density: f64,
    pub max_delay: u32,
    /// Probability of deleting each non-initial state to form the specification.
    pub removal: f64,
    /// Probability of shrinking the specification's marked set.
    pub marking_override: f64,
    pub controllable: f64,
    pub observable: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            supervisors: 2,
            min_states: 2,
            max_states: 6,
            max_events_per_supervisor: 2,
            transition_density: 0.35,
            tick_density: 0.8,
            channel_density: 0.7,
            loss_density: 0.4,
            max_delay: 2,
            removal: 0.25,
            marking_override: 0.1,
            controllable: 0.7,
            observable: 0.7,
        }
    }
}

/// A generated instance: the document (for replay) and its validated model.
#[derive(Clone, Debug)]
pub struct Instance {
    pub seed: u64,
    pub doc: ModelDoc,
    pub model: Model,
}

fn names(set: &BTreeSet<EventId>) -> Vec<String> {
    set.iter().map(|e| e.name().to_owned()).collect()
}

fn subset<R: Rng>(rng: &mut R, items: &BTreeSet<EventId>, p: f64) -> BTreeSet<EventId> {
    items.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

fn attempt(rng: &mut ChaCha8Rng, p: &GenParams) -> Option<ModelDoc> {
    let letters = ["a", "b", "c", "d", "e", "f"];
    let mut sup_events: Vec<BTreeSet<EventId>> = Vec::new();
    for i in 0..p.supervisors {
        let k = rng.gen_range(1..=p.max_events_per_supervisor);
        sup_events.push((0..k).map(|j| EventId::new(format!("{}{}", letters[j], i + 1))).collect());
    }
    let events: Vec<EventId> = sup_events.iter().flatten().cloned().collect();

    let m = rng.gen_range(p.min_states..=p.max_states);
    let mut trans: Vec<(usize, EventId, usize)> = Vec::new();
    let mut enforceable = BTreeSet::new();
    for s in 0..m {
        let mut active = Vec::new();
        if s + 1 < m {
            for e in &events {
                if rng.gen_bool(p.transition_density) {
                    trans.push((s, e.clone(), rng.gen_range(s + 1..m)));
                    active.push(e.clone());
                }
            }
        }
        if rng.gen_bool(p.tick_density) || active.is_empty() {
            trans.push((s, EventId::tick(), rng.gen_range(0..m)));
        } else {
            enforceable.insert(active.choose(rng).expect("nonempty").clone());
        }
    }
    let marked: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
    let states: Vec<String> = (0..m).map(|s| s.to_string()).collect();
    let alphabet: BTreeSet<EventId> = events.iter().cloned().collect();
    let g = TimedAutomaton::from_parts("G", states, alphabet, &trans, 0, &marked).ok()?;
    let g = accessible(&g);

    let removed: Vec<String> = (1..g.num_states())
        .filter(|_| rng.gen_bool(p.removal))
        .map(|s| g.state_name(s).to_owned())
        .collect();
    let spec_marked = if rng.gen_bool(p.marking_override) {
        let inherited: Vec<String> = g
            .marked_states()
            .into_iter()
            .map(|s| g.state_name(s).to_owned())
            .filter(|s| !removed.contains(s))
            .collect();
        let keep: Vec<String> = inherited.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
        Some(keep)
    } else {
        None
    };

    let tick_controllable = rng.gen_bool(0.5);
    let tick: BTreeSet<EventId> = [EventId::tick()].into();
    let mut supervisors = Vec::new();
    let mut observables = Vec::new();
    for own in &sup_events {
        let mut controllable = subset(rng, own, p.controllable);
        let mut observable = subset(rng, own, p.observable);
        if tick_controllable {
            controllable.extend(tick.iter().cloned());
        }
        observable.extend(tick.iter().cloned());
        let alphabet: BTreeSet<EventId> = own.union(&tick).cloned().collect();
        supervisors.push(SupervisorDoc {
            alphabet: names(&alphabet),
            controllable: names(&controllable),
            observable: names(&observable),
        });
        observables.push(observable);
    }

    let n = p.supervisors;
    let mut com = vec![vec![Bit::Int(0); n]; n];
    let mut channels = Vec::new();
    for (i, row) in com.iter_mut().enumerate() {
        for (j, bit) in row.iter_mut().enumerate() {
            if i == j || !rng.gen_bool(p.channel_density) {
                continue;
            }
            *bit = Bit::Int(1);
            let candidates: BTreeSet<EventId> = observables[i].iter().filter(|e| !e.is_tick()).cloned().collect();
            let events = subset(rng, &candidates, 0.7);
            let lossy = subset(rng, &events, p.loss_density);
            channels.push(ChannelDoc {
                from: i + 1,
                to: j + 1,
                events: names(&events),
                lossy: names(&lossy),
                delay_bound: rng.gen_range(0..=p.max_delay),
            });
        }
    }

    Some(ModelDoc {
        automata: vec![AutomatonDoc::from_automaton(&g)],
        network: NetworkDoc {
            n,
            supervisors,
            enforceable: names(&enforceable),
            com,
            channels,
        },
        plant: "G".into(),
        spec: SpecDoc::Remove {
            remove_states: removed,
            marked: spec_marked,
        },
    })
}

/// Draws instances until one is valid and satisfies the timing assumptions.
pub fn random_instance(seed: u64, p: &GenParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let Some(doc) = attempt(&mut rng, p) else { continue };
        let Ok(model) = doc.build() else { continue };
        if validate_timed_assumptions(&model.plant, &model.network).is_some() {
            continue;
        }
        return Instance { seed, doc, model };
    }
}

/// Validated instance from a document, for replaying stored failures.
pub fn instance_from_doc(seed: u64, doc: ModelDoc) -> Result<Instance> {
    let model = doc.build()?;
    Ok(Instance { seed, doc, model })
}
