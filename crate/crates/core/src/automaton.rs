//! Timed automata: the plant and specification models.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::dfa::Dfa;
use crate::error::{Error, Result};
use crate::event::EventId;
use crate::network::NetworkConfig;

/// Deterministic automaton whose alphabet contains the clock event `tick`.
///
/// States carry string names; their indices follow the order in which the
/// names were first listed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedAutomaton {
    name: String,
    states: Vec<String>,
    alphabet: BTreeSet<EventId>,
    dfa: Dfa<EventId>,
}

impl TimedAutomaton {
    /// Assembles an automaton from indexed parts. `tick` is added to the
    /// alphabet if missing.
    pub fn from_parts(
        name: impl Into<String>,
        states: Vec<String>,
        mut alphabet: BTreeSet<EventId>,
        transitions: &[(usize, EventId, usize)],
        initial: usize,
        marked: &[usize],
    ) -> Result<Self> {
        let name = name.into();
        if states.is_empty() {
            return Err(Error::Schema(format!("automaton `{name}` has no states")));
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(Error::Schema(format!("automaton `{name}` lists state `{s}` twice")));
            }
        }
        alphabet.insert(EventId::tick());
        let n = states.len();
        if initial >= n {
            return Err(Error::Schema(format!("automaton `{name}`: initial state out of range")));
        }
        let mut edges: Vec<Vec<(EventId, usize)>> = vec![Vec::new(); n];
        for (from, event, to) in transitions {
            if *from >= n || *to >= n {
                return Err(Error::Schema(format!("automaton `{name}`: transition endpoint out of range")));
            }
            if !alphabet.contains(event) {
                return Err(Error::Reference {
                    kind: "event",
                    name: event.to_string(),
                    context: format!("transitions of `{name}` (not in its alphabet)"),
                });
            }
            edges[*from].push((event.clone(), *to));
        }
        let mut marking = vec![false; n];
        for &m in marked {
            if m >= n {
                return Err(Error::Schema(format!("automaton `{name}`: marked state out of range")));
            }
            marking[m] = true;
        }
        let dfa = Dfa::from_edges(edges, initial, marking).map_err(|(s, e)| Error::Determinism {
            automaton: name.clone(),
            state: states[s].clone(),
            event: e.to_string(),
        })?;
        Ok(TimedAutomaton {
            name,
            states,
            alphabet,
            dfa,
        })
    }

    /// Convenience constructor working on state names. The alphabet is the
    /// set of events used by the transitions plus `tick`.
    pub fn from_names(
        name: &str,
        states: &[&str],
        initial: &str,
        marked: &[&str],
        transitions: &[(&str, &str, &str)],
    ) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let index: HashMap<&str, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let lookup = |s: &str| {
            index.get(s).copied().ok_or_else(|| Error::Reference {
                kind: "state",
                name: s.to_owned(),
                context: format!("automaton `{name}`"),
            })
        };
        let mut alphabet = BTreeSet::new();
        let mut trans = Vec::new();
        for (f, e, t) in transitions {
            let e = EventId::new(e);
            alphabet.insert(e.clone());
            trans.push((lookup(f)?, e, lookup(t)?));
        }
        let marked = marked.iter().map(|m| lookup(m)).collect::<Result<Vec<_>>>()?;
        Self::from_parts(name, states.clone(), alphabet, &trans, lookup(initial)?, &marked)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn alphabet(&self) -> &BTreeSet<EventId> {
        &self.alphabet
    }

    pub fn dfa(&self) -> &Dfa<EventId> {
        &self.dfa
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        self.dfa.initial()
    }

    pub fn is_marked(&self, s: usize) -> bool {
        self.dfa.is_marked(s)
    }

    pub fn marked_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&s| self.is_marked(s)).collect()
    }

    pub fn step(&self, s: usize, e: &EventId) -> Option<usize> {
        self.dfa.step(s, e)
    }

    /// Active event set of a state.
    pub fn active(&self, s: usize) -> impl Iterator<Item = &EventId> {
        self.dfa.edges(s).iter().map(|(e, _)| e)
    }

    /// All transitions as `(from, event, to)` triples, in state then event order.
    pub fn transitions(&self) -> Vec<(usize, EventId, usize)> {
        (0..self.num_states())
            .flat_map(|s| self.dfa.edges(s).iter().map(move |(e, t)| (s, e.clone(), *t)))
            .collect()
    }

    /// The sub-automaton induced by the states satisfying `keep` (not made
    /// accessible), with marking inherited.
    pub fn induced(&self, name: &str, keep: impl Fn(usize) -> bool) -> Result<Self> {
        let kept: Vec<usize> = (0..self.num_states()).filter(|&s| keep(s)).collect();
        if !kept.contains(&self.initial()) {
            return Err(Error::Model(format!(
                "removing states from `{}` would remove its initial state",
                self.name
            )));
        }
        let mut new_of_old = vec![usize::MAX; self.num_states()];
        for (k, &old) in kept.iter().enumerate() {
            new_of_old[old] = k;
        }
        let trans: Vec<_> = self
            .transitions()
            .into_iter()
            .filter(|(f, _, t)| keep(*f) && keep(*t))
            .map(|(f, e, t)| (new_of_old[f], e, new_of_old[t]))
            .collect();
        let marked: Vec<usize> = kept
            .iter()
            .filter(|&&s| self.is_marked(s))
            .map(|&s| new_of_old[s])
            .collect();
        Self::from_parts(
            name,
            kept.iter().map(|&s| self.states[s].clone()).collect(),
            self.alphabet.clone(),
            &trans,
            new_of_old[self.initial()],
            &marked,
        )
    }

    /// Same structure with a different marked set.
    pub fn with_marked(&self, marked: &[usize]) -> Result<Self> {
        Self::from_parts(
            self.name.clone(),
            self.states.clone(),
            self.alphabet.clone(),
            &self.transitions(),
            self.initial(),
            marked,
        )
    }
}

/// Synchronous product: `tick` synchronizes, private events interleave.
/// Only the accessible part is built. State names are `(a,b)`.
pub fn parallel_compose(a: &TimedAutomaton, b: &TimedAutomaton) -> Result<TimedAutomaton> {
    let shared: Vec<String> = a
        .alphabet
        .intersection(&b.alphabet)
        .filter(|e| !e.is_tick())
        .map(|e| e.to_string())
        .collect();
    if !shared.is_empty() {
        return Err(Error::Composition {
            left: a.name.clone(),
            right: b.name.clone(),
            shared,
        });
    }
    let alphabet: BTreeSet<EventId> = a.alphabet.union(&b.alphabet).cloned().collect();
    let start = (a.initial(), b.initial());
    let mut pairs = vec![start];
    let mut index = HashMap::from([(start, 0usize)]);
    let mut trans = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let (p, q) = pairs[k];
        for e in &alphabet {
            let next = match (a.alphabet.contains(e), b.alphabet.contains(e)) {
                (true, true) => a.step(p, e).zip(b.step(q, e)),
                (true, false) => a.step(p, e).map(|p2| (p2, q)),
                (false, true) => b.step(q, e).map(|q2| (p, q2)),
                (false, false) => None,
            };
            if let Some(pair) = next {
                let id = *index.entry(pair).or_insert_with(|| {
                    pairs.push(pair);
                    queue.push_back(pairs.len() - 1);
                    pairs.len() - 1
                });
                trans.push((k, e.clone(), id));
            }
        }
    }
    let states = pairs
        .iter()
        .map(|&(p, q)| format!("({},{})", a.state_name(p), b.state_name(q)))
        .collect();
    let marked: Vec<usize> = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(p, q))| a.is_marked(p) && b.is_marked(q))
        .map(|(k, _)| k)
        .collect();
    TimedAutomaton::from_parts(
        format!("{}||{}", a.name, b.name),
        states,
        alphabet,
        &trans,
        0,
        &marked,
    )
}

/// Restriction to the states reachable from the initial state. Surviving
/// states keep their relative order.
pub fn accessible(g: &TimedAutomaton) -> TimedAutomaton {
    let reach = g.dfa.reachable();
    g.induced(&g.name, |s| reach[s])
        .expect("initial state is reachable")
}

/// `h` is obtained from `g` by deleting states and every transition touching
/// them, and `h`'s marking is inherited from `g`.
pub fn is_subautomaton(h: &TimedAutomaton, g: &TimedAutomaton) -> bool {
    structural_subautomaton(h, g).is_some_and(|map| {
        map.iter()
            .enumerate()
            .all(|(hs, &gs)| h.is_marked(hs) == g.is_marked(gs))
    })
}

/// Structural part of [`is_subautomaton`] with the marking relaxed to
/// `Q_m,H ⊆ Q_H ∩ Q_m`. Returns the map from `h` states to `g` states.
pub fn structural_subautomaton(h: &TimedAutomaton, g: &TimedAutomaton) -> Option<Vec<usize>> {
    let map: Vec<usize> = h
        .states
        .iter()
        .map(|s| g.state_index(s))
        .collect::<Option<_>>()?;
    let mut in_h = vec![None; g.num_states()];
    for (hs, &gs) in map.iter().enumerate() {
        in_h[gs] = Some(hs);
    }
    if map[h.initial()] != g.initial() {
        return None;
    }
    for (hs, &gs) in map.iter().enumerate() {
        if h.is_marked(hs) && !g.is_marked(gs) {
            return None;
        }
        // Edges of `g` between retained states must be exactly the edges of `h`.
        let expected: Vec<(EventId, usize)> = g
            .dfa
            .edges(gs)
            .iter()
            .filter_map(|(e, t)| in_h[*t].map(|ht| (e.clone(), ht)))
            .collect();
        if expected.as_slice() != h.dfa.edges(hs) {
            return None;
        }
    }
    Some(map)
}

/// Every reachable state can reach a marked state.
pub fn is_nonblocking(g: &TimedAutomaton) -> bool {
    g.dfa.is_nonblocking()
}

/// The first violated timing assumption, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TimingViolation {
    /// A cycle made only of non-tick events: `(state, event)` steps
    /// returning to the first state.
    NonTickCycle { cycle: Vec<(String, EventId)> },
    /// A reachable state with no active event.
    Deadlock { state: String },
    /// A reachable state where tick is not active and no enforceable event is.
    TickNotPreemptable { state: String },
}

impl std::fmt::Display for TimingViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimingViolation::NonTickCycle { cycle } => {
                write!(f, "condition 1 (finitely many events per tick) violated by cycle")?;
                for (s, e) in cycle {
                    write!(f, " {s} -{e}->")?;
                }
                if let Some((s, _)) = cycle.first() {
                    write!(f, " {s}")?;
                }
                Ok(())
            }
            TimingViolation::Deadlock { state } => {
                write!(f, "condition 2 (time never stops) violated at state {state}")
            }
            TimingViolation::TickNotPreemptable { state } => write!(
                f,
                "condition 3 (tick absent implies an enforceable event) violated at state {state}"
            ),
        }
    }
}

/// Checks, in order: no non-tick cycle, no deadlocked state, and every
/// reachable state without tick has an active enforceable event.
pub fn validate_timed_assumptions(
    g: &TimedAutomaton,
    net: &NetworkConfig,
) -> Option<TimingViolation> {
    let reach = g.dfa.reachable();
    if let Some(cycle) = non_tick_cycle(g, &reach) {
        return Some(TimingViolation::NonTickCycle {
            cycle: cycle
                .into_iter()
                .map(|(s, e)| (g.state_name(s).to_owned(), e))
                .collect(),
        });
    }
    for s in (0..g.num_states()).filter(|&s| reach[s]) {
        if g.dfa.edges(s).is_empty() {
            return Some(TimingViolation::Deadlock {
                state: g.state_name(s).to_owned(),
            });
        }
    }
    let tick = EventId::tick();
    for s in (0..g.num_states()).filter(|&s| reach[s]) {
        if g.step(s, &tick).is_none() && !g.active(s).any(|e| net.is_enforceable(e)) {
            return Some(TimingViolation::TickNotPreemptable {
                state: g.state_name(s).to_owned(),
            });
        }
    }
    None
}

fn non_tick_cycle(g: &TimedAutomaton, reach: &[bool]) -> Option<Vec<(usize, EventId)>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Grey,
        Black,
    }
    let n = g.num_states();
    let mut color = vec![Color::White; n];
    for root in (0..n).filter(|&s| reach[s]) {
        if color[root] != Color::White {
            continue;
        }
        // Iterative DFS; `path` holds (state, edge cursor) plus the event used
        // to reach the next frame.
        let mut path: Vec<(usize, usize)> = vec![(root, 0)];
        let mut via: Vec<EventId> = Vec::new();
        color[root] = Color::Grey;
        while let Some(&mut (s, ref mut cursor)) = path.last_mut() {
            let edges = g.dfa.edges(s);
            if let Some((e, t)) = edges[*cursor..].iter().find(|(e, _)| !e.is_tick()) {
                *cursor = edges.iter().position(|(e2, _)| e2 == e).unwrap() + 1;
                match color[*t] {
                    Color::White => {
                        color[*t] = Color::Grey;
                        via.push(e.clone());
                        path.push((*t, 0));
                    }
                    Color::Grey => {
                        let start = path.iter().position(|(p, _)| p == t).unwrap();
                        let mut cycle: Vec<(usize, EventId)> = path[start..]
                            .iter()
                            .zip(&via[start..])
                            .map(|((p, _), ev)| (*p, ev.clone()))
                            .collect();
                        cycle.push((s, e.clone()));
                        return Some(cycle);
                    }
                    Color::Black => {}
                }
            } else {
                color[s] = Color::Black;
                path.pop();
                via.pop();
            }
        }
    }
    None
}
