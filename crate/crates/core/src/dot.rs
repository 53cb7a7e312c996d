//! Graphviz output. Node and edge order follow state numbering, so equal
//! inputs give byte-identical files.

use std::fmt::{Display, Write as _};

use crate::automaton::TimedAutomaton;
use crate::comm::CommAutomaton;
use crate::dfa::Dfa;
use crate::synthesis::{ClosedLoop, SupervisorMap};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

struct Node {
    label: String,
    marked: bool,
    dashed: bool,
}

fn render<E: Display + Ord + Clone>(name: &str, dfa: &Dfa<E>, node: impl Fn(usize) -> Node) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=LR;\n  __start [shape=point];\n", quote(name));
    for s in 0..dfa.num_states() {
        let n = node(s);
        let mut attrs = vec![format!("label={}", quote(&n.label))];
        attrs.push(format!("shape={}", if n.marked { "doublecircle" } else { "circle" }));
        if n.dashed {
            attrs.push("style=dashed".into());
        }
        let _ = writeln!(out, "  s{s} [{}];", attrs.join(", "));
    }
    let _ = writeln!(out, "  __start -> s{};", dfa.initial());
    for s in 0..dfa.num_states() {
        for (e, t) in dfa.edges(s) {
            let _ = writeln!(out, "  s{s} -> s{t} [label={}];", quote(&e.to_string()));
        }
    }
    out.push_str("}\n");
    out
}

pub fn automaton_to_dot(a: &TimedAutomaton) -> String {
    render(a.name(), a.dfa(), |s| Node {
        label: a.state_name(s).to_owned(),
        marked: a.is_marked(s),
        dashed: false,
    })
}

/// States outside the specification are dashed; marked states are double circles.
pub fn comm_to_dot(gt: &CommAutomaton) -> String {
    render("G~", gt.dfa(), |x| Node {
        label: gt.render_state(x),
        marked: gt.is_marked(x),
        dashed: !gt.spec_flag(x),
    })
}

/// Observer states labeled with their enable sets.
pub fn supervisor_to_dot(s: &SupervisorMap) -> String {
    let obs = &s.observer;
    render(&format!("S{}", s.supervisor + 1), &obs.dfa, |t| {
        let enable: Vec<&str> = s.enable[t].iter().map(|e| e.name()).collect();
        Node {
            label: format!("t{t} {{{}}}", enable.join(",")),
            marked: false,
            dashed: false,
        }
    })
}

pub fn closed_loop_to_dot(cl: &ClosedLoop, gt: &CommAutomaton) -> String {
    render("closed loop", cl.dfa(), |s| {
        let x = cl.comm_state(s);
        let obs: Vec<String> = cl.observer_states(s).iter().map(|t| format!("t{t}")).collect();
        Node {
            label: format!("{} [{}]", gt.render_state(x), obs.join(",")),
            marked: gt.is_marked(x),
            dashed: !gt.spec_flag(x),
        }
    })
}
