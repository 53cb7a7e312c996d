//! Decision procedures for the existence conditions: network
//! controllability (two parts), network joint observability, and closure of
//! the specification language with respect to the marked plant language.
//!
//! All checks are statewise on the communication automaton and return the
//! shortest counterexample found by breadth-first search.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::comm::{observe, CommAutomaton, CommEvent};
use crate::event::EventId;
use crate::network::NetworkConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    /// Uncontrollable events never leave the specification.
    NetCtrl1,
    /// A tick leaving the specification can be preempted by an enforceable event.
    NetCtrl2,
    /// Needed disablements are distinguishable by the disabling supervisors.
    NetJointObs,
    /// Marked specification language equals specification language
    /// intersected with the marked plant language.
    LmClosure,
    /// Supervisors never disable uncontrollable events.
    AdmissibleUncontrollable,
    /// Supervisors never disable a tick that cannot be preempted.
    AdmissibleTick,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::NetCtrl1 => "network controllability (uncontrollable events)",
            Condition::NetCtrl2 => "network controllability (tick preemption)",
            Condition::NetJointObs => "network joint observability",
            Condition::LmClosure => "Lm-closure",
            Condition::AdmissibleUncontrollable => "admissibility (uncontrollable events enabled)",
            Condition::AdmissibleTick => "admissibility (non-preemptable tick enabled)",
        };
        f.write_str(s)
    }
}

/// Counterexample attached to a failing verdict.
///
/// `mu` always reaches the violating state. For joint observability `nu` is
/// the string with the same observation after which `sigma` must stay
/// enabled, and `supervisor` is the one unable to tell them apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub mu: Vec<CommEvent>,
    pub nu: Option<Vec<CommEvent>>,
    pub sigma: Option<EventId>,
    pub supervisor: Option<usize>,
}

impl Witness {
    fn at(mu: Vec<CommEvent>, sigma: Option<EventId>) -> Self {
        Witness {
            mu,
            nu: None,
            sigma,
            supervisor: None,
        }
    }

    /// Length used for bounded comparisons: the longest string involved.
    pub fn depth(&self) -> usize {
        self.mu.len().max(self.nu.as_ref().map_or(0, Vec::len))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub condition: Condition,
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass(condition: Condition) -> Self {
        Verdict {
            condition,
            holds: true,
            witness: None,
        }
    }

    pub fn fail(condition: Condition, witness: Witness) -> Self {
        Verdict {
            condition,
            holds: false,
            witness: Some(witness),
        }
    }
}

/// Target of `x --σ-->` if it exists and leaves the specification.
fn exits(gt: &CommAutomaton, x: usize, sigma: &EventId) -> bool {
    gt.step(x, &CommEvent::Plant(sigma.clone()))
        .is_some_and(|y| !gt.spec_flag(y))
}

fn stays(gt: &CommAutomaton, x: usize, sigma: &EventId) -> bool {
    gt.step(x, &CommEvent::Plant(sigma.clone()))
        .is_some_and(|y| gt.spec_flag(y))
}

/// Both parts of network controllability, `[NetCtrl1, NetCtrl2]`.
pub fn check_network_controllability(gt: &CommAutomaton, net: &NetworkConfig) -> Vec<Verdict> {
    let mut first: Option<Verdict> = None;
    let mut second: Option<Verdict> = None;
    let tick = EventId::tick();
    for &x in gt.spec_states() {
        if first.is_none() {
            for (e, y) in gt.edges(x) {
                if let CommEvent::Plant(sigma) = e {
                    if !gt.spec_flag(*y) && !net.is_controllable(sigma) {
                        first = Some(Verdict::fail(
                            Condition::NetCtrl1,
                            Witness::at(gt.spec_path_to(x), Some(sigma.clone())),
                        ));
                        break;
                    }
                }
            }
        }
        if second.is_none() && exits(gt, x, &tick) {
            let preemptable = gt.edges(x).iter().any(|(e, y)| {
                gt.spec_flag(*y) && e.as_plant().is_some_and(|p| net.is_enforceable(p))
            });
            if !preemptable {
                second = Some(Verdict::fail(
                    Condition::NetCtrl2,
                    Witness::at(gt.spec_path_to(x), Some(tick.clone())),
                ));
            }
        }
        if first.is_some() && second.is_some() {
            break;
        }
    }
    vec![
        first.unwrap_or_else(|| Verdict::pass(Condition::NetCtrl1)),
        second.unwrap_or_else(|| Verdict::pass(Condition::NetCtrl2)),
    ]
}

/// One move of the twin product.
#[derive(Clone, Debug)]
enum TwinMove {
    Left(CommEvent),
    Right(CommEvent),
    Both(CommEvent, CommEvent),
}

/// Pairs of specification states reached by strings that supervisor `i`
/// cannot tell apart, explored breadth first.
struct TwinProduct {
    pairs: Vec<(usize, usize)>,
    parent: Vec<Option<(usize, TwinMove)>>,
}

impl TwinProduct {
    fn build(gt: &CommAutomaton, net: &NetworkConfig, i: usize, mut visit: impl FnMut(usize, (usize, usize)) -> bool) -> Self {
        let start = (gt.initial(), gt.initial());
        let mut tp = TwinProduct {
            pairs: vec![start],
            parent: vec![None],
        };
        let mut index: HashMap<(usize, usize), usize> = HashMap::from([(start, 0)]);
        let spec_edges = |x: usize| {
            gt.edges(x)
                .iter()
                .filter(move |(_, y)| gt.spec_flag(*y))
                .map(move |(e, y)| (e, *y, observe(net, i, e)))
        };
        let mut head = 0;
        while head < tp.pairs.len() {
            let (x, y) = tp.pairs[head];
            if !visit(head, (x, y)) {
                break;
            }
            let mut next: Vec<((usize, usize), TwinMove)> = Vec::new();
            for (e, x2, o) in spec_edges(x) {
                if o.is_none() {
                    next.push(((x2, y), TwinMove::Left(e.clone())));
                }
            }
            for (e, y2, o) in spec_edges(y) {
                if o.is_none() {
                    next.push(((x, y2), TwinMove::Right(e.clone())));
                }
            }
            for (e, x2, o) in spec_edges(x) {
                let Some(o) = o else { continue };
                for (e2, y2, o2) in spec_edges(y) {
                    if o2.as_ref() == Some(&o) {
                        next.push(((x2, y2), TwinMove::Both(e.clone(), e2.clone())));
                    }
                }
            }
            for (pair, mv) in next {
                if let std::collections::hash_map::Entry::Vacant(v) = index.entry(pair) {
                    v.insert(tp.pairs.len());
                    tp.pairs.push(pair);
                    tp.parent.push(Some((head, mv)));
                }
            }
            head += 1;
        }
        tp
    }

    fn strings(&self, mut node: usize) -> (Vec<CommEvent>, Vec<CommEvent>) {
        let mut left = Vec::new();
        let mut right = Vec::new();
        while let Some((p, mv)) = &self.parent[node] {
            match mv {
                TwinMove::Left(e) => left.push(e.clone()),
                TwinMove::Right(e) => right.push(e.clone()),
                TwinMove::Both(e, e2) => {
                    left.push(e.clone());
                    right.push(e2.clone());
                }
            }
            node = *p;
        }
        left.reverse();
        right.reverse();
        (left, right)
    }
}

/// Network joint observability: for every controllable `σ` and every
/// supervisor able to disable it, no pair of indistinguishable specification
/// strings has `σ` leaving the specification after one and staying inside
/// after the other.
pub fn check_network_joint_observability(gt: &CommAutomaton, net: &NetworkConfig) -> Verdict {
    // Controllable events that leave the specification somewhere; nothing
    // else can produce a violation.
    let mut candidates: BTreeMap<EventId, Vec<usize>> = BTreeMap::new();
    for &x in gt.spec_states() {
        for (e, y) in gt.edges(x) {
            if let CommEvent::Plant(sigma) = e {
                if !gt.spec_flag(*y) && net.is_controllable(sigma) {
                    candidates
                        .entry(sigma.clone())
                        .or_insert_with(|| net.controllers(sigma));
                }
            }
        }
    }
    let mut per_supervisor: BTreeMap<usize, Vec<EventId>> = BTreeMap::new();
    for (sigma, controllers) in &candidates {
        for &i in controllers {
            per_supervisor.entry(i).or_default().push(sigma.clone());
        }
    }
    let mut found: BTreeMap<(EventId, usize), Witness> = BTreeMap::new();
    for (&i, sigmas) in &per_supervisor {
        let mut hits: Vec<(usize, EventId)> = Vec::new();
        let mut remaining = sigmas.len();
        let mut done = vec![false; sigmas.len()];
        let tp = TwinProduct::build(gt, net, i, |node, (x, y)| {
            for (k, sigma) in sigmas.iter().enumerate() {
                if !done[k] && exits(gt, x, sigma) && stays(gt, y, sigma) {
                    done[k] = true;
                    remaining -= 1;
                    hits.push((node, sigma.clone()));
                }
            }
            remaining > 0
        });
        for (node, sigma) in hits {
            let (mu, nu) = tp.strings(node);
            found.insert(
                (sigma.clone(), i),
                Witness {
                    mu,
                    nu: Some(nu),
                    sigma: Some(sigma),
                    supervisor: Some(i),
                },
            );
        }
    }
    match found.into_iter().next() {
        Some((_, w)) => Verdict::fail(Condition::NetJointObs, w),
        None => Verdict::pass(Condition::NetJointObs),
    }
}

/// Every specification state is marked in the specification exactly when
/// it is marked in the communication automaton.
pub fn check_lm_closure(gt: &CommAutomaton) -> Verdict {
    gt.spec_states()
        .iter()
        .find(|&&x| gt.spec_marked(x) != gt.is_marked(x))
        .map_or_else(
            || Verdict::pass(Condition::LmClosure),
            |&x| Verdict::fail(Condition::LmClosure, Witness::at(gt.spec_path_to(x), None)),
        )
}

/// All existence conditions in the order NetCtrl1, NetCtrl2, NetJointObs, LmClosure.
pub fn check_all(gt: &CommAutomaton, net: &NetworkConfig) -> Vec<Verdict> {
    let mut out = check_network_controllability(gt, net);
    out.push(check_network_joint_observability(gt, net));
    out.push(check_lm_closure(gt));
    out
}

/// Replays a witness against the automaton and confirms the violation it
/// claims. Used by tests and by the CLI's self-checks.
pub fn replay_witness(gt: &CommAutomaton, net: &NetworkConfig, verdict: &Verdict) -> bool {
    let Some(w) = &verdict.witness else {
        return verdict.holds;
    };
    let in_spec_run = |word: &[CommEvent]| -> Option<usize> {
        let mut x = gt.initial();
        for e in word {
            x = gt.step(x, e)?;
            if !gt.spec_flag(x) {
                return None;
            }
        }
        Some(x)
    };
    let Some(x) = in_spec_run(&w.mu) else {
        return false;
    };
    match verdict.condition {
        Condition::NetCtrl1 => w
            .sigma
            .as_ref()
            .is_some_and(|s| !net.is_controllable(s) && exits(gt, x, s)),
        Condition::NetCtrl2 => {
            exits(gt, x, &EventId::tick())
                && !net.enforceable().iter().any(|s| stays(gt, x, s))
        }
        Condition::NetJointObs => {
            let (Some(nu), Some(sigma), Some(i)) = (&w.nu, &w.sigma, w.supervisor) else {
                return false;
            };
            let Some(y) = in_spec_run(nu) else {
                return false;
            };
            net.controllers(sigma).contains(&i)
                && net.is_controllable(sigma)
                && exits(gt, x, sigma)
                && stays(gt, y, sigma)
                && crate::comm::project_psi_fi(&w.mu, i, net) == crate::comm::project_psi_fi(nu, i, net)
        }
        Condition::LmClosure => gt.is_marked(x) != gt.spec_marked(x),
        Condition::AdmissibleUncontrollable | Condition::AdmissibleTick => false,
    }
}
