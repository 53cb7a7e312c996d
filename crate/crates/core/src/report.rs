//! JSON and text renderings of verdicts, supervisors and solve reports.
//! Supervisor indices are 1-based in every rendering.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::automaton::TimingViolation;
use crate::comm::CommEvent;
use crate::dfa::LanguageComparison;
use crate::synthesis::{SolveReport, SupervisorMap, SynthesisOutcome};
use crate::verify::{Verdict, Witness};

pub const SPEC_VERSION: u32 = 1;

fn word(w: &[CommEvent]) -> Value {
    Value::Array(w.iter().map(|e| json!(e.to_string())).collect())
}

fn word_text(w: &[CommEvent]) -> String {
    if w.is_empty() {
        return "ε".into();
    }
    w.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn condition_name(v: &Verdict) -> String {
    format!("{:?}", v.condition)
}

pub fn witness_json(w: &Witness) -> Value {
    json!({
        "mu": word(&w.mu),
        "nu": w.nu.as_deref().map(word),
        "sigma": w.sigma.as_ref().map(|s| s.name()),
        "supervisor": w.supervisor.map(|i| i + 1),
    })
}

pub fn verdict_json(v: &Verdict) -> Value {
    json!({
        "condition": condition_name(v),
        "holds": v.holds,
        "witness": v.witness.as_ref().map(witness_json),
    })
}

/// `NetCtrl1: holds` or a failure line with its counterexample.
pub fn verdict_text(v: &Verdict) -> String {
    let mut out = format!("{:<24} {}", condition_name(v), if v.holds { "holds" } else { "FAILS" });
    if let Some(w) = &v.witness {
        let _ = write!(out, "  ({})", v.condition);
        if let Some(i) = w.supervisor {
            let _ = write!(out, "\n    supervisor {}", i + 1);
        }
        if let Some(s) = &w.sigma {
            let _ = write!(out, "\n    event      {s}");
        }
        let _ = write!(out, "\n    mu         {}", word_text(&w.mu));
        if let Some(nu) = &w.nu {
            let _ = write!(out, "\n    nu         {}", word_text(nu));
        }
    }
    out
}

pub fn timing_json(v: Option<&TimingViolation>) -> Value {
    match v {
        None => json!({"holds": true, "violation": null}),
        Some(v) => {
            let detail = match v {
                TimingViolation::NonTickCycle { cycle } => json!({
                    "assumption": "non-tick-cycle",
                    "cycle": cycle.iter().map(|(s, e)| json!([s, e.name()])).collect::<Vec<_>>(),
                }),
                TimingViolation::Deadlock { state } => json!({"assumption": "no-active-event", "state": state}),
                TimingViolation::TickNotPreemptable { state } => {
                    json!({"assumption": "no-tick-no-enforceable", "state": state})
                }
            };
            json!({"holds": false, "violation": detail, "message": v.to_string()})
        }
    }
}

pub fn comparison_json(c: &LanguageComparison<CommEvent>) -> Value {
    json!({
        "generated_equal": c.generated_equal(),
        "marked_equal": c.marked_equal(),
        "generated_witness": c.generated.as_deref().map(word),
        "marked_witness": c.marked.as_deref().map(word),
    })
}

pub fn supervisor_json(s: &SupervisorMap) -> Value {
    let obs = &s.observer;
    let name = |t: usize| format!("t{t}");
    let mut transitions = Vec::new();
    for t in 0..obs.num_states() {
        for (o, u) in obs.dfa.edges(t) {
            transitions.push(json!({"from": name(t), "obs": o.name(), "to": name(*u)}));
        }
    }
    let enable: Map<String, Value> = (0..obs.num_states())
        .map(|t| (name(t), json!(s.enable[t].iter().map(|e| e.name()).collect::<Vec<_>>())))
        .collect();
    json!({
        "supervisor": s.supervisor + 1,
        "obs_alphabet": s.obs_alphabet().iter().map(|e| e.name()).collect::<Vec<_>>(),
        "states": (0..obs.num_states()).map(name).collect::<Vec<_>>(),
        "initial": name(obs.initial()),
        "transitions": transitions,
        "enable": enable,
    })
}

pub fn synthesis_json(s: &SynthesisOutcome) -> Value {
    json!({
        "admissibility": s.admissibility.iter().map(verdict_json).collect::<Vec<_>>(),
        "admissible": s.admissible(),
        "closed_loop_states": s.closed_loop.num_states(),
        "language": comparison_json(&s.comparison),
        "achieves_spec": s.achieves_spec(),
        "supervisors": s.supervisors.iter().map(supervisor_json).collect::<Vec<_>>(),
    })
}

pub fn solve_json(r: &SolveReport) -> Value {
    json!({
        "spec_version": SPEC_VERSION,
        "solvable": r.solvable,
        "comm": {
            "states": r.comm.num_states(),
            "transitions": r.comm.num_transitions(),
            "spec_states": r.comm.num_spec_states(),
        },
        "verdicts": r.verdicts.iter().map(verdict_json).collect::<Vec<_>>(),
        "spec_nonblocking": r.spec_nonblocking,
        "synthesis": r.synthesis.as_ref().map(synthesis_json),
    })
}

pub fn solve_text(r: &SolveReport) -> String {
    let mut out = format!(
        "communication automaton: {} states, {} transitions ({} in the specification)\n",
        r.comm.num_states(),
        r.comm.num_transitions(),
        r.comm.num_spec_states()
    );
    for v in &r.verdicts {
        let _ = writeln!(out, "{}", verdict_text(v));
    }
    let _ = writeln!(
        out,
        "specification nonblocking: {}",
        if r.spec_nonblocking { "yes" } else { "no" }
    );
    if let Some(s) = &r.synthesis {
        for v in &s.admissibility {
            let _ = writeln!(out, "{}", verdict_text(v));
        }
        let sizes: Vec<String> = s
            .supervisors
            .iter()
            .map(|m| format!("S{}: {} observer states", m.supervisor + 1, m.observer.num_states()))
            .collect();
        let _ = writeln!(out, "supervisors: {}", sizes.join(", "));
        let _ = writeln!(out, "closed loop: {} states", s.closed_loop.num_states());
        let eq = |b: bool| if b { "equal" } else { "DIFFERENT" };
        let _ = writeln!(out, "closed-loop language vs specification: {}", eq(s.comparison.generated_equal()));
        if let Some(w) = &s.comparison.generated {
            let _ = writeln!(out, "    distinguishing string {}", word_text(w));
        }
        let _ = writeln!(out, "closed-loop marked language vs specification: {}", eq(s.comparison.marked_equal()));
        if let Some(w) = &s.comparison.marked {
            let _ = writeln!(out, "    distinguishing string {}", word_text(w));
        }
    }
    let _ = writeln!(out, "{}", if r.solvable { "SOLVABLE" } else { "UNSOLVABLE" });
    out
}
