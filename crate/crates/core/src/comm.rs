//! The communication automaton: the plant augmented with the state of every
//! channel, delivery events and loss events.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::automaton::{structural_subautomaton, TimedAutomaton};
use crate::channel::{self, ChannelState};
use crate::dfa::{compare_languages, Dfa};
use crate::error::{Error, Result};
use crate::event::EventId;
use crate::network::NetworkConfig;

/// Event of the communication automaton. The derived ordering (plant events
/// with tick first, then deliveries by `(from, to, event)`, then losses by
/// `(from, to, index)`) is the exploration order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CommEvent {
    Plant(EventId),
    /// The head of channel `from -> to`, carrying `event`, is delivered.
    Deliver { from: usize, to: usize, event: EventId },
    /// The `index`-th (1-based) entry of channel `from -> to` is lost.
    Lose { from: usize, to: usize, index: usize },
}

impl CommEvent {
    pub fn plant(name: &str) -> Self {
        CommEvent::Plant(EventId::new(name))
    }

    pub fn as_plant(&self) -> Option<&EventId> {
        match self {
            CommEvent::Plant(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_tick(&self) -> bool {
        matches!(self, CommEvent::Plant(e) if e.is_tick())
    }
}

fn pair_label(from: usize, to: usize) -> String {
    if from < 9 && to < 9 {
        format!("{}{}", from + 1, to + 1)
    } else {
        format!("{}_{}", from + 1, to + 1)
    }
}

impl fmt::Display for CommEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommEvent::Plant(e) => write!(f, "{e}"),
            CommEvent::Deliver { from, to, event } => write!(f, "f{}({event})", pair_label(*from, *to)),
            CommEvent::Lose { from, to, index } => write!(f, "g{}({index})", pair_label(*from, *to)),
        }
    }
}

impl fmt::Debug for CommEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A plant state paired with the configuration of every channel.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CommState {
    pub plant: usize,
    pub channels: ChannelState,
}

/// Limits guarding the forward exploration.
#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// A channel may hold at most `queue_cap_factor * (N + 1) * |Q|` entries.
    pub queue_cap_factor: usize,
    pub max_states: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            queue_cap_factor: 10,
            max_states: 2_000_000,
        }
    }
}

/// The accessible communication automaton, with the specification encoded
/// as per-state flags rather than as a second automaton.
#[derive(Clone, Debug)]
pub struct CommAutomaton {
    plant_names: Vec<String>,
    states: Vec<CommState>,
    dfa: Dfa<CommEvent>,
    parent: Vec<Option<(usize, CommEvent)>>,
    spec_flag: Vec<bool>,
    in_spec: Vec<bool>,
    spec_marked: Vec<bool>,
    spec_parent: Vec<Option<(usize, CommEvent)>>,
    spec_order: Vec<usize>,
}

impl CommAutomaton {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.dfa.num_transitions()
    }

    pub fn initial(&self) -> usize {
        self.dfa.initial()
    }

    pub fn state(&self, x: usize) -> &CommState {
        &self.states[x]
    }

    pub fn states(&self) -> &[CommState] {
        &self.states
    }

    pub fn dfa(&self) -> &Dfa<CommEvent> {
        &self.dfa
    }

    pub fn edges(&self, x: usize) -> &[(CommEvent, usize)] {
        self.dfa.edges(x)
    }

    pub fn step(&self, x: usize, e: &CommEvent) -> Option<usize> {
        self.dfa.step(x, e)
    }

    pub fn is_marked(&self, x: usize) -> bool {
        self.dfa.is_marked(x)
    }

    pub fn plant_name(&self, x: usize) -> &str {
        &self.plant_names[self.states[x].plant]
    }

    /// Plant component belongs to the specification's state set.
    pub fn spec_flag(&self, x: usize) -> bool {
        self.spec_flag[x]
    }

    /// State of the specification automaton: reachable from the initial
    /// state through flagged states only.
    pub fn in_spec(&self, x: usize) -> bool {
        self.in_spec[x]
    }

    pub fn spec_marked(&self, x: usize) -> bool {
        self.spec_marked[x]
    }

    /// Specification states in breadth-first order of discovery.
    pub fn spec_states(&self) -> &[usize] {
        &self.spec_order
    }

    pub fn num_spec_states(&self) -> usize {
        self.spec_order.len()
    }

    /// Shortest string reaching `x`.
    pub fn path_to(&self, x: usize) -> Vec<CommEvent> {
        unwind(&self.parent, x)
    }

    /// Shortest string reaching the specification state `x` without leaving
    /// the specification.
    pub fn spec_path_to(&self, x: usize) -> Vec<CommEvent> {
        debug_assert!(self.in_spec[x]);
        unwind(&self.spec_parent, x)
    }

    /// The specification as a stand-alone automaton (states renumbered).
    pub fn spec_dfa(&self) -> Dfa<CommEvent> {
        let flags = &self.spec_flag;
        let (sub, old) = self
            .dfa
            .restrict(|x| flags[x])
            .expect("initial state is a specification state");
        let marking = old.iter().map(|&x| self.spec_marked[x]).collect();
        sub.with_marking(marking)
    }

    /// `(q,θ12,θ21,…)` rendering with channels in key order.
    pub fn render_state(&self, x: usize) -> String {
        let s = &self.states[x];
        if s.channels.iter().next().is_none() {
            return format!("({})", self.plant_name(x));
        }
        format!("({},{})", self.plant_name(x), s.channels.render())
    }

    /// Index of the state rendered as `label`, if any.
    pub fn find_rendered(&self, label: &str) -> Option<usize> {
        (0..self.num_states()).find(|&x| self.render_state(x) == label)
    }
}

fn unwind(parent: &[Option<(usize, CommEvent)>], mut x: usize) -> Vec<CommEvent> {
    let mut word = Vec::new();
    while let Some((p, e)) = &parent[x] {
        word.push(e.clone());
        x = *p;
    }
    word.reverse();
    word
}

/// Successors of one state, in exploration order. Entries whose target
/// operator is undefined are omitted.
fn successors(
    g: &TimedAutomaton,
    net: &NetworkConfig,
    state: &CommState,
) -> Vec<(CommEvent, CommState)> {
    let mut out = Vec::new();
    for (e, q2) in g.dfa().edges(state.plant) {
        let channels = if e.is_tick() {
            match channel::time_step(&state.channels, net) {
                Some(c) => c,
                None => continue,
            }
        } else {
            channel::push(&state.channels, e, net)
        };
        out.push((CommEvent::Plant(e.clone()), CommState { plant: *q2, channels }));
    }
    for (&(i, j), theta) in state.channels.iter() {
        if let Some(head) = theta.front() {
            let channels = channel::deliver(&state.channels, i, j, &head.event).expect("head is deliverable");
            out.push((
                CommEvent::Deliver {
                    from: i,
                    to: j,
                    event: head.event.clone(),
                },
                CommState {
                    plant: state.plant,
                    channels,
                },
            ));
        }
    }
    for (&(i, j), theta) in state.channels.iter() {
        for d in 1..=theta.len() {
            if let Some(channels) = channel::lose(&state.channels, i, j, d, net) {
                out.push((
                    CommEvent::Lose { from: i, to: j, index: d },
                    CommState {
                        plant: state.plant,
                        channels,
                    },
                ));
            }
        }
    }
    out
}

/// Builds the communication automaton of plant `g` under network `net` by
/// breadth-first exploration from `(q0, ε, …, ε)`, flagging the states whose
/// plant component belongs to the specification `h`.
pub fn build_comm_automaton(
    g: &TimedAutomaton,
    h: &TimedAutomaton,
    net: &NetworkConfig,
    opts: BuildOptions,
) -> Result<CommAutomaton> {
    let h_of_g = spec_map(g, h)?;
    let caps: HashMap<(usize, usize), usize> = net
        .channels()
        .iter()
        .map(|(&k, c)| (k, opts.queue_cap_factor * (c.delay_bound as usize + 1) * g.num_states()))
        .collect();

    let start = CommState {
        plant: g.initial(),
        channels: ChannelState::empty(net),
    };
    let mut states = vec![start.clone()];
    let mut index: HashMap<CommState, usize> = HashMap::from([(start, 0)]);
    let mut parent: Vec<Option<(usize, CommEvent)>> = vec![None];
    let mut edges: Vec<Vec<(CommEvent, usize)>> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let mut out = Vec::new();
        for (e, next) in successors(g, net, &states[head]) {
            for (&(i, j), theta) in next.channels.iter() {
                let cap = caps[&(i, j)];
                if theta.len() > cap {
                    let mut trace: Vec<String> = unwind(&parent, head).iter().map(ToString::to_string).collect();
                    trace.push(e.to_string());
                    return Err(Error::QueueCap {
                        from: i + 1,
                        to: j + 1,
                        cap,
                        trace,
                    });
                }
            }
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= opts.max_states {
                        return Err(Error::StateCap {
                            what: "communication automaton",
                            cap: opts.max_states,
                        });
                    }
                    let id = states.len();
                    index.insert(next.clone(), id);
                    states.push(next);
                    parent.push(Some((head, e.clone())));
                    id
                }
            };
            out.push((e, id));
        }
        edges.push(out);
        head += 1;
    }

    let marked: Vec<bool> = states.iter().map(|s| g.is_marked(s.plant)).collect();
    let spec_flag: Vec<bool> = states.iter().map(|s| h_of_g[s.plant].is_some()).collect();
    let dfa = Dfa::from_edges(edges, 0, marked).expect("exploration yields one edge per event");

    let n = states.len();
    let mut in_spec = vec![false; n];
    let mut spec_parent: Vec<Option<(usize, CommEvent)>> = vec![None; n];
    let mut spec_order = Vec::new();
    if spec_flag[0] {
        in_spec[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            spec_order.push(x);
            for (e, y) in dfa.edges(x) {
                if spec_flag[*y] && !in_spec[*y] {
                    in_spec[*y] = true;
                    spec_parent[*y] = Some((x, e.clone()));
                    queue.push_back(*y);
                }
            }
        }
    }
    let spec_marked = (0..n)
        .map(|x| in_spec[x] && h_of_g[states[x].plant].is_some_and(|hs| h.is_marked(hs)))
        .collect();

    Ok(CommAutomaton {
        plant_names: g.states().to_vec(),
        states,
        dfa,
        parent,
        spec_flag,
        in_spec,
        spec_marked,
        spec_parent,
        spec_order,
    })
}

/// Map from plant states to specification states, requiring `h ⊑ g`.
fn spec_map(g: &TimedAutomaton, h: &TimedAutomaton) -> Result<Vec<Option<usize>>> {
    let map = structural_subautomaton(h, g).ok_or_else(|| {
        Error::Model(format!(
            "specification `{}` is not a subautomaton of plant `{}`",
            h.name(),
            g.name()
        ))
    })?;
    let mut h_of_g = vec![None; g.num_states()];
    for (hs, gs) in map.into_iter().enumerate() {
        h_of_g[gs] = Some(hs);
    }
    Ok(h_of_g)
}

/// Projection onto plant events: deliveries and losses are erased.
pub fn project_psi(word: &[CommEvent]) -> Vec<EventId> {
    word.iter().filter_map(|e| e.as_plant().cloned()).collect()
}

/// What supervisor `i` observes when `e` occurs: its own observable plant
/// events, and the payload of deliveries addressed to it.
pub fn observe(net: &NetworkConfig, i: usize, e: &CommEvent) -> Option<EventId> {
    match e {
        CommEvent::Plant(ev) if net.supervisor(i).observable.contains(ev) => Some(ev.clone()),
        CommEvent::Deliver { to, event, .. } if *to == i => Some(event.clone()),
        _ => None,
    }
}

/// Observation string of supervisor `i` along `word`.
pub fn project_psi_fi(word: &[CommEvent], i: usize, net: &NetworkConfig) -> Vec<EventId> {
    word.iter().filter_map(|e| observe(net, i, e)).collect()
}

/// Result of comparing `ψ(L(G̃))` with `L(G)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionVerdict {
    pub holds: bool,
    /// A string in exactly one of the two languages.
    pub witness: Option<Vec<EventId>>,
    pub projection_states: usize,
}

/// Builds the projection of the communication automaton onto plant events
/// (silent closure over deliveries and losses, then subset construction)
/// and checks that its language equals the plant's.
pub fn check_proposition1(g: &TimedAutomaton, gt: &CommAutomaton) -> ProjectionVerdict {
    let closure = |seed: BTreeSet<usize>| -> Vec<usize> {
        let mut set = seed;
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(x) = stack.pop() {
            for (e, y) in gt.edges(x) {
                if e.as_plant().is_none() && set.insert(*y) {
                    stack.push(*y);
                }
            }
        }
        set.into_iter().collect()
    };
    let start = closure(BTreeSet::from([gt.initial()]));
    let mut subsets = vec![start.clone()];
    let mut index = HashMap::from([(start, 0usize)]);
    let mut edges: Vec<Vec<(EventId, usize)>> = Vec::new();
    let mut head = 0;
    while head < subsets.len() {
        let mut by_event: std::collections::BTreeMap<EventId, BTreeSet<usize>> = Default::default();
        for &x in &subsets[head] {
            for (e, y) in gt.edges(x) {
                if let Some(p) = e.as_plant() {
                    by_event.entry(p.clone()).or_default().insert(*y);
                }
            }
        }
        let mut out = Vec::new();
        for (e, targets) in by_event {
            let set = closure(targets);
            let id = *index.entry(set.clone()).or_insert_with(|| {
                subsets.push(set);
                subsets.len() - 1
            });
            out.push((e, id));
        }
        edges.push(out);
        head += 1;
    }
    let n = subsets.len();
    let projection = Dfa::from_edges(edges, 0, vec![false; n]).expect("grouped by event");
    let plant = g.dfa().clone().with_marking(vec![false; g.num_states()]);
    let cmp = compare_languages(&projection, &plant);
    ProjectionVerdict {
        holds: cmp.generated_equal(),
        witness: cmp.generated,
        projection_states: n,
    }
}
