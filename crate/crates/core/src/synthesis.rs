//! Supervisor synthesis: per-supervisor observers over the communication
//! automaton, enable sets computed from them, admissibility, the closed loop
//! and the end-to-end solving pipeline.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::automaton::{validate_timed_assumptions, TimedAutomaton};
use crate::comm::{build_comm_automaton, observe, BuildOptions, CommAutomaton, CommEvent};
use crate::dfa::{compare_languages, Dfa, LanguageComparison};
use crate::error::{Error, Result};
use crate::event::EventId;
use crate::network::NetworkConfig;
use crate::verify::{check_all, Condition, Verdict, Witness};

/// A communication-automaton state and whether the strings that reach it
/// along the current observation stayed inside the specification.
pub type Element = (usize, bool);

/// Deterministic observer of one supervisor: each state is the set of
/// elements compatible with an observation string.
#[derive(Clone, Debug)]
pub struct Observer {
    pub supervisor: usize,
    pub alphabet: BTreeSet<EventId>,
    pub states: Vec<Vec<Element>>,
    pub dfa: Dfa<EventId>,
}

impl Observer {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        self.dfa.initial()
    }

    pub fn step(&self, t: usize, o: &EventId) -> Option<usize> {
        self.dfa.step(t, o)
    }

    /// Observer state reached by an observation string.
    pub fn state_after(&self, observation: &[EventId]) -> Option<usize> {
        self.dfa.run(observation)
    }
}

/// Silent closure under events supervisor `i` does not observe.
fn silent_closure(gt: &CommAutomaton, net: &NetworkConfig, i: usize, seed: BTreeSet<Element>) -> Vec<Element> {
    let mut set = seed;
    let mut stack: Vec<Element> = set.iter().copied().collect();
    while let Some((x, h)) = stack.pop() {
        for (e, y) in gt.edges(x) {
            if observe(net, i, e).is_none() {
                let el = (*y, h && gt.spec_flag(*y));
                if set.insert(el) {
                    stack.push(el);
                }
            }
        }
    }
    set.into_iter().collect()
}

/// Subset construction of supervisor `i`'s observer over the communication
/// automaton.
pub fn build_observer(gt: &CommAutomaton, i: usize, net: &NetworkConfig, max_states: usize) -> Result<Observer> {
    let x0 = gt.initial();
    let start = silent_closure(gt, net, i, BTreeSet::from([(x0, gt.spec_flag(x0))]));
    let mut states = vec![start.clone()];
    let mut index: HashMap<Vec<Element>, usize> = HashMap::from([(start, 0)]);
    let mut edges: Vec<Vec<(EventId, usize)>> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let mut by_obs: BTreeMap<EventId, BTreeSet<Element>> = BTreeMap::new();
        for &(x, h) in &states[head] {
            for (e, y) in gt.edges(x) {
                if let Some(o) = observe(net, i, e) {
                    by_obs.entry(o).or_default().insert((*y, h && gt.spec_flag(*y)));
                }
            }
        }
        let mut out = Vec::with_capacity(by_obs.len());
        for (o, seed) in by_obs {
            let set = silent_closure(gt, net, i, seed);
            let id = match index.get(&set) {
                Some(&id) => id,
                None => {
                    if states.len() >= max_states {
                        return Err(Error::StateCap {
                            what: "observer",
                            cap: max_states,
                        });
                    }
                    index.insert(set.clone(), states.len());
                    states.push(set);
                    states.len() - 1
                }
            };
            out.push((o, id));
        }
        edges.push(out);
        head += 1;
    }
    let n = states.len();
    Ok(Observer {
        supervisor: i,
        alphabet: net.observation_alphabet(i),
        states,
        dfa: Dfa::from_edges(edges, 0, vec![false; n]).expect("grouped by observation"),
    })
}

/// A supervisor realized as an observer with an enable set per observer state.
#[derive(Clone, Debug)]
pub struct SupervisorMap {
    pub supervisor: usize,
    pub observer: Observer,
    pub enable: Vec<BTreeSet<EventId>>,
}

impl SupervisorMap {
    pub fn obs_alphabet(&self) -> &BTreeSet<EventId> {
        &self.observer.alphabet
    }

    pub fn enabled(&self, t: usize) -> &BTreeSet<EventId> {
        &self.enable[t]
    }

    /// Control command issued after an observation string; `None` if the
    /// observation cannot occur.
    pub fn command(&self, observation: &[EventId]) -> Option<&BTreeSet<EventId>> {
        self.observer.state_after(observation).map(|t| &self.enable[t])
    }

    /// The supervisor that enables its whole alphabet everywhere.
    pub fn permissive(observer: Observer, net: &NetworkConfig) -> Self {
        let all = net.supervisor(observer.supervisor).alphabet.clone();
        SupervisorMap {
            supervisor: observer.supervisor,
            enable: vec![all; observer.num_states()],
            observer,
        }
    }
}

/// Enable set of one observer state: every uncontrollable event, plus the
/// controllable events that no in-specification element would use to leave
/// the specification.
pub fn enable_set(gt: &CommAutomaton, net: &NetworkConfig, i: usize, elements: &[Element]) -> BTreeSet<EventId> {
    let sup = net.supervisor(i);
    let mut enable = sup.uncontrollable();
    for sigma in &sup.controllable {
        let ev = CommEvent::Plant(sigma.clone());
        let exits = elements
            .iter()
            .any(|&(x, h)| h && gt.step(x, &ev).is_some_and(|y| !gt.spec_flag(y)));
        if !exits {
            enable.insert(sigma.clone());
        }
    }
    enable
}

pub fn synthesize_supervisor(gt: &CommAutomaton, i: usize, net: &NetworkConfig, max_states: usize) -> Result<SupervisorMap> {
    let observer = build_observer(gt, i, net, max_states)?;
    let enable = observer
        .states
        .iter()
        .map(|t| enable_set(gt, net, i, t))
        .collect();
    Ok(SupervisorMap {
        supervisor: i,
        observer,
        enable,
    })
}

/// Supervisors for every index, built concurrently.
pub fn synthesize_all(gt: &CommAutomaton, net: &NetworkConfig, max_states: usize) -> Result<Vec<SupervisorMap>> {
    (0..net.n())
        .into_par_iter()
        .map(|i| synthesize_supervisor(gt, i, net, max_states))
        .collect()
}

/// Whether supervisors permit `e` given their current observer states.
pub fn permitted(net: &NetworkConfig, gamma: &[SupervisorMap], obs: &[usize], e: &CommEvent) -> bool {
    match e {
        CommEvent::Plant(sigma) if net.is_controllable(sigma) => net
            .controllers(sigma)
            .into_iter()
            .all(|i| gamma[i].enabled(obs[i]).contains(sigma)),
        _ => true,
    }
}

/// Observer states after `e`; `None` if some observer cannot follow.
pub fn advance(net: &NetworkConfig, gamma: &[SupervisorMap], obs: &[usize], e: &CommEvent) -> Option<Vec<usize>> {
    let mut next = obs.to_vec();
    for (i, s) in gamma.iter().enumerate() {
        if let Some(o) = observe(net, i, e) {
            next[i] = s.observer.step(obs[i], &o)?;
        }
    }
    Some(next)
}

/// Synchronous product of the communication automaton and every observer,
/// keeping only transitions the supervisors permit.
#[derive(Clone, Debug)]
pub struct ClosedLoop {
    states: Vec<(usize, Vec<usize>)>,
    dfa: Dfa<CommEvent>,
    parent: Vec<Option<(usize, CommEvent)>>,
}

impl ClosedLoop {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn dfa(&self) -> &Dfa<CommEvent> {
        &self.dfa
    }

    /// Communication-automaton component of a closed-loop state.
    pub fn comm_state(&self, s: usize) -> usize {
        self.states[s].0
    }

    pub fn observer_states(&self, s: usize) -> &[usize] {
        &self.states[s].1
    }

    pub fn path_to(&self, mut s: usize) -> Vec<CommEvent> {
        let mut word = Vec::new();
        while let Some((p, e)) = &self.parent[s] {
            word.push(e.clone());
            s = *p;
        }
        word.reverse();
        word
    }
}

/// Breadth-first product over `(comm state, observer states)`. `keep`
/// filters communication-automaton transitions before supervision.
fn product(
    gt: &CommAutomaton,
    gamma: &[SupervisorMap],
    net: &NetworkConfig,
    max_states: usize,
    supervise: bool,
    keep: impl Fn(usize) -> bool,
) -> Result<ClosedLoop> {
    let start = (gt.initial(), gamma.iter().map(|s| s.observer.initial()).collect::<Vec<_>>());
    let mut states = vec![start.clone()];
    let mut index: HashMap<(usize, Vec<usize>), usize> = HashMap::from([(start, 0)]);
    let mut parent = vec![None];
    let mut edges: Vec<Vec<(CommEvent, usize)>> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let (x, obs) = states[head].clone();
        let mut out = Vec::new();
        for (e, y) in gt.edges(x) {
            if !keep(*y) || (supervise && !permitted(net, gamma, &obs, e)) {
                continue;
            }
            let Some(next_obs) = advance(net, gamma, &obs, e) else { continue };
            let key = (*y, next_obs);
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    if states.len() >= max_states {
                        return Err(Error::StateCap {
                            what: "closed loop",
                            cap: max_states,
                        });
                    }
                    index.insert(key.clone(), states.len());
                    states.push(key);
                    parent.push(Some((head, e.clone())));
                    states.len() - 1
                }
            };
            out.push((e.clone(), id));
        }
        edges.push(out);
        head += 1;
    }
    let marked = states.iter().map(|(x, _)| gt.is_marked(*x)).collect();
    Ok(ClosedLoop {
        dfa: Dfa::from_edges(edges, 0, marked).expect("one edge per event"),
        states,
        parent,
    })
}

pub fn closed_loop(gt: &CommAutomaton, gamma: &[SupervisorMap], net: &NetworkConfig, max_states: usize) -> Result<ClosedLoop> {
    product(gt, gamma, net, max_states, true, |_| true)
}

/// Both admissibility conditions, `[AdmissibleUncontrollable, AdmissibleTick]`,
/// checked over the specification paired with the supervisors' observers.
pub fn check_admissibility(gamma: &[SupervisorMap], gt: &CommAutomaton, net: &NetworkConfig, max_states: usize) -> Result<Vec<Verdict>> {
    let prod = product(gt, gamma, net, max_states, false, |y| gt.spec_flag(y))?;
    let tick = EventId::tick();
    let mut first = None;
    let mut second = None;
    for s in 0..prod.num_states() {
        let x = prod.comm_state(s);
        let obs = prod.observer_states(s);
        if first.is_none() {
            'outer: for (i, sup) in gamma.iter().enumerate() {
                for e in net.supervisor(i).uncontrollable() {
                    if !sup.enabled(obs[i]).contains(&e) {
                        first = Some(Verdict::fail(
                            Condition::AdmissibleUncontrollable,
                            Witness {
                                mu: prod.path_to(s),
                                nu: None,
                                sigma: Some(e),
                                supervisor: Some(i),
                            },
                        ));
                        break 'outer;
                    }
                }
            }
        }
        if second.is_none() && gt.step(x, &CommEvent::Plant(tick.clone())).is_some() {
            let preemptable = gt.edges(x).iter().any(|(e, y)| {
                gt.spec_flag(*y) && e.as_plant().is_some_and(|p| net.is_enforceable(p))
            });
            if !preemptable {
                if let Some(i) = (0..gamma.len()).find(|&i| !gamma[i].enabled(obs[i]).contains(&tick)) {
                    second = Some(Verdict::fail(
                        Condition::AdmissibleTick,
                        Witness {
                            mu: prod.path_to(s),
                            nu: None,
                            sigma: Some(tick.clone()),
                            supervisor: Some(i),
                        },
                    ));
                }
            }
        }
        if first.is_some() && second.is_some() {
            break;
        }
    }
    Ok(vec![
        first.unwrap_or_else(|| Verdict::pass(Condition::AdmissibleUncontrollable)),
        second.unwrap_or_else(|| Verdict::pass(Condition::AdmissibleTick)),
    ])
}

/// Exact comparison of generated and marked languages.
pub fn language_equal<E: Ord + Clone + std::hash::Hash>(a: &Dfa<E>, b: &Dfa<E>) -> LanguageComparison<E> {
    compare_languages(a, b)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    pub build: BuildOptions,
    /// Synthesize and evaluate supervisors even when a condition fails.
    pub diagnostic: bool,
}

/// Synthesized supervisors and how they perform in closed loop.
#[derive(Clone, Debug)]
pub struct SynthesisOutcome {
    pub supervisors: Vec<SupervisorMap>,
    pub admissibility: Vec<Verdict>,
    pub closed_loop: ClosedLoop,
    /// Closed loop against the specification.
    pub comparison: LanguageComparison<CommEvent>,
}

impl SynthesisOutcome {
    pub fn admissible(&self) -> bool {
        self.admissibility.iter().all(|v| v.holds)
    }

    /// Admissible and both languages equal those of the specification.
    pub fn achieves_spec(&self) -> bool {
        self.admissible() && self.comparison.is_equal()
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub comm: CommAutomaton,
    /// NetCtrl1, NetCtrl2, NetJointObs, LmClosure.
    pub verdicts: Vec<Verdict>,
    pub solvable: bool,
    /// Every specification state can reach a marked specification state.
    pub spec_nonblocking: bool,
    pub synthesis: Option<SynthesisOutcome>,
}

/// Synthesizes supervisors for an already built communication automaton and
/// evaluates them.
pub fn evaluate_synthesis(gt: &CommAutomaton, net: &NetworkConfig, max_states: usize) -> Result<SynthesisOutcome> {
    let supervisors = synthesize_all(gt, net, max_states)?;
    let admissibility = check_admissibility(&supervisors, gt, net, max_states)?;
    let closed_loop = closed_loop(gt, &supervisors, net, max_states)?;
    let comparison = language_equal(closed_loop.dfa(), &gt.spec_dfa());
    Ok(SynthesisOutcome {
        supervisors,
        admissibility,
        closed_loop,
        comparison,
    })
}

/// Full pipeline: build the communication automaton, decide the existence
/// conditions and, when they hold (or in diagnostic mode), synthesize and
/// verify the supervisors.
pub fn solve_dnnscp(g: &TimedAutomaton, h: &TimedAutomaton, net: &NetworkConfig, opts: SolveOptions) -> Result<SolveReport> {
    if let Some(v) = validate_timed_assumptions(g, net) {
        return Err(Error::Model(format!("plant `{}` violates a timing assumption: {v}", g.name())));
    }
    let comm = build_comm_automaton(g, h, net, opts.build)?;
    let verdicts = check_all(&comm, net);
    let solvable = verdicts.iter().all(|v| v.holds);
    let spec_nonblocking = comm.spec_dfa().is_nonblocking();
    let synthesis = if solvable || opts.diagnostic {
        Some(evaluate_synthesis(&comm, net, opts.build.max_states)?)
    } else {
        None
    };
    Ok(SolveReport {
        comm,
        verdicts,
        solvable,
        spec_nonblocking,
        synthesis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Supervisor;

    fn set(names: &[&str]) -> BTreeSet<EventId> {
        names.iter().map(EventId::new).collect()
    }

    /// One supervisor, plant 0 -a-> 1 -tick-> 1, 0 -b-> 2 -tick-> 2,
    /// 0 -tick-> 0; specification drops state 2.
    fn instance(b_controllable: bool) -> (TimedAutomaton, TimedAutomaton, NetworkConfig) {
        let g = TimedAutomaton::from_names(
            "G",
            &["0", "1", "2"],
            "0",
            &["0", "1", "2"],
            &[("0", "tick", "0"), ("0", "a", "1"), ("0", "b", "2"), ("1", "tick", "1"), ("2", "tick", "2")],
        )
        .unwrap();
        let h = g.induced("H", |s| s != 2).unwrap();
        let mut controllable = set(&["tick", "a"]);
        if b_controllable {
            controllable.insert(EventId::new("b"));
        }
        let net = NetworkConfig::new(
            vec![Supervisor {
                alphabet: set(&["tick", "a", "b"]),
                controllable,
                observable: set(&["tick", "a", "b"]),
            }],
            BTreeSet::new(),
            vec![vec![false]],
            BTreeMap::new(),
        )
        .unwrap();
        (g, h, net)
    }

    #[test]
    fn disables_only_the_exiting_event() {
        let (g, h, net) = instance(true);
        let report = solve_dnnscp(&g, &h, &net, SolveOptions::default()).unwrap();
        assert!(report.solvable);
        let syn = report.synthesis.unwrap();
        let s = &syn.supervisors[0];
        let root = s.enabled(s.observer.initial());
        assert!(!root.contains(&EventId::new("b")));
        assert!(root.contains(&EventId::new("a")));
        assert!(syn.achieves_spec());
    }

    #[test]
    fn uncontrollable_exit_is_unsolvable() {
        let (g, h, net) = instance(false);
        let report = solve_dnnscp(&g, &h, &net, SolveOptions { diagnostic: true, ..Default::default() }).unwrap();
        assert!(!report.solvable);
        assert_eq!(report.verdicts[0].condition, Condition::NetCtrl1);
        assert!(!report.verdicts[0].holds);
        let syn = report.synthesis.unwrap();
        assert!(syn.admissible());
        assert!(!syn.comparison.is_equal());
    }

    #[test]
    fn permissive_closed_loop_is_the_comm_automaton() {
        let (g, h, net) = instance(true);
        let gt = build_comm_automaton(&g, &h, &net, BuildOptions::default()).unwrap();
        let obs = build_observer(&gt, 0, &net, 1000).unwrap();
        let gamma = vec![SupervisorMap::permissive(obs, &net)];
        let cl = closed_loop(&gt, &gamma, &net, 1000).unwrap();
        assert!(language_equal(cl.dfa(), gt.dfa()).is_equal());
    }

    #[test]
    fn disabling_an_uncontrollable_event_is_inadmissible() {
        let (g, h, net) = instance(false);
        let gt = build_comm_automaton(&g, &h, &net, BuildOptions::default()).unwrap();
        let mut s = synthesize_supervisor(&gt, 0, &net, 1000).unwrap();
        for en in &mut s.enable {
            en.remove(&EventId::new("b"));
        }
        let v = check_admissibility(&[s], &gt, &net, 1000).unwrap();
        assert!(!v[0].holds);
        assert!(v[1].holds);
    }
}
