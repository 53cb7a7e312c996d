//! Random closed-loop runs of the communication automaton under a set of
//! supervisors.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::comm::{observe, CommAutomaton, CommEvent};
use crate::event::EventId;
use crate::network::NetworkConfig;
use crate::synthesis::{advance, permitted, SupervisorMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    StepLimit,
    DeadlockMarked,
    DeadlockUnmarked,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::StepLimit => "step-limit",
            Termination::DeadlockMarked => "deadlock-marked",
            Termination::DeadlockUnmarked => "deadlock-unmarked",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub event: CommEvent,
    /// Communication-automaton state after the event.
    pub state: usize,
    /// What each supervisor observed, if anything.
    pub observations: Vec<Option<EventId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub seed: u64,
    pub initial: usize,
    pub steps: Vec<TraceStep>,
    pub terminated: Termination,
}

impl Trace {
    /// States visited, starting with the initial one.
    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.initial).chain(self.steps.iter().map(|s| s.state))
    }

    pub fn events(&self) -> Vec<CommEvent> {
        self.steps.iter().map(|s| s.event.clone()).collect()
    }
}

/// Runs the closed loop from its initial state, choosing uniformly among the
/// permitted events, until `max_steps` events or a deadlock.
pub fn simulate(gt: &CommAutomaton, gamma: &[SupervisorMap], net: &NetworkConfig, seed: u64, max_steps: usize) -> Trace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = gt.initial();
    let mut obs: Vec<usize> = gamma.iter().map(|s| s.observer.initial()).collect();
    let mut steps = Vec::new();
    let terminated = loop {
        if steps.len() >= max_steps {
            break Termination::StepLimit;
        }
        let choices: Vec<(&CommEvent, usize, Vec<usize>)> = gt
            .edges(x)
            .iter()
            .filter(|(e, _)| permitted(net, gamma, &obs, e))
            .filter_map(|(e, y)| advance(net, gamma, &obs, e).map(|o| (e, *y, o)))
            .collect();
        if choices.is_empty() {
            break if gt.is_marked(x) {
                Termination::DeadlockMarked
            } else {
                Termination::DeadlockUnmarked
            };
        }
        let (e, y, next_obs) = choices[rng.gen_range(0..choices.len())].clone();
        steps.push(TraceStep {
            event: e.clone(),
            state: y,
            observations: (0..net.n()).map(|i| observe(net, i, e)).collect(),
        });
        x = y;
        obs = next_obs;
    };
    Trace {
        seed,
        initial: gt.initial(),
        steps,
        terminated,
    }
}

fn observation_column(observations: &[Option<EventId>]) -> String {
    observations
        .iter()
        .enumerate()
        .map(|(i, o)| format!("{}:{}", i + 1, o.as_ref().map_or("-", |e| e.name())))
        .collect::<Vec<_>>()
        .join(" ")
}

/// One line per step: index, event, ticks so far, state, observations.
pub fn render_trace(gt: &CommAutomaton, trace: &Trace) -> String {
    let mut out = format!(
        "# seed {} from {} ({} steps, {})\n",
        trace.seed,
        gt.render_state(trace.initial),
        trace.steps.len(),
        trace.terminated.as_str()
    );
    let mut ticks = 0;
    for (k, step) in trace.steps.iter().enumerate() {
        if step.event.is_tick() {
            ticks += 1;
        }
        let _ = writeln!(
            out,
            "{:>5}  {:<12} clock={:<4} {:<28} obs {}",
            k + 1,
            step.event.to_string(),
            ticks,
            gt.render_state(step.state),
            observation_column(&step.observations)
        );
    }
    out
}

/// The trace as JSON lines: a header object, then one object per step.
pub fn trace_json_lines(gt: &CommAutomaton, trace: &Trace) -> String {
    let mut out = json!({
        "seed": trace.seed,
        "initial": gt.render_state(trace.initial),
        "steps": trace.steps.len(),
        "terminated": trace.terminated.as_str(),
    })
    .to_string();
    out.push('\n');
    let mut ticks = 0;
    for (k, step) in trace.steps.iter().enumerate() {
        if step.event.is_tick() {
            ticks += 1;
        }
        let observations: serde_json::Map<String, serde_json::Value> = step
            .observations
            .iter()
            .enumerate()
            .filter_map(|(i, o)| o.as_ref().map(|e| ((i + 1).to_string(), json!(e.name()))))
            .collect();
        out.push_str(
            &json!({
                "step": k + 1,
                "event": step.event.to_string(),
                "clock": ticks,
                "state": gt.render_state(step.state),
                "spec": gt.spec_flag(step.state),
                "observations": observations,
            })
            .to_string(),
        );
        out.push('\n');
    }
    out
}
