//! A small deterministic automaton over an arbitrary ordered event type, plus
//! the language-level operations the rest of the crate builds on.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

/// Deterministic finite automaton with dense state indices.
///
/// The outgoing edges of every state are sorted by event, so `step` is a
/// binary search and iteration follows the event ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa<E> {
    edges: Vec<Vec<(E, usize)>>,
    initial: usize,
    marked: Vec<bool>,
}

impl<E: Ord + Clone> Dfa<E> {
    /// Builds an automaton from per-state edge lists. On a duplicate
    /// `(state, event)` pair the offending pair is returned.
    pub fn from_edges(
        mut edges: Vec<Vec<(E, usize)>>,
        initial: usize,
        marked: Vec<bool>,
    ) -> Result<Self, (usize, E)> {
        assert!(initial < edges.len(), "initial state out of range");
        assert_eq!(edges.len(), marked.len(), "marking length mismatch");
        for (s, out) in edges.iter_mut().enumerate() {
            out.sort_by(|a, b| a.0.cmp(&b.0));
            if let Some(w) = out.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err((s, w[0].0.clone()));
            }
            debug_assert!(out.iter().all(|(_, t)| *t < marked.len()));
        }
        Ok(Dfa {
            edges,
            initial,
            marked,
        })
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_marked(&self, s: usize) -> bool {
        self.marked[s]
    }

    pub fn marking(&self) -> &[bool] {
        &self.marked
    }

    pub fn edges(&self, s: usize) -> &[(E, usize)] {
        &self.edges[s]
    }

    pub fn step(&self, s: usize, e: &E) -> Option<usize> {
        let out = &self.edges[s];
        out.binary_search_by(|(ev, _)| ev.cmp(e))
            .ok()
            .map(|k| out[k].1)
    }

    pub fn run<'a>(&self, word: impl IntoIterator<Item = &'a E>) -> Option<usize>
    where
        E: 'a,
    {
        word.into_iter()
            .try_fold(self.initial, |s, e| self.step(s, e))
    }

    pub fn with_marking(mut self, marked: Vec<bool>) -> Self {
        assert_eq!(marked.len(), self.edges.len());
        self.marked = marked;
        self
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(s) = stack.pop() {
            for (_, t) in &self.edges[s] {
                if !seen[*t] {
                    seen[*t] = true;
                    stack.push(*t);
                }
            }
        }
        seen
    }

    /// States from which some marked state is reachable.
    pub fn coaccessible(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut preds = vec![Vec::new(); n];
        for (s, out) in self.edges.iter().enumerate() {
            for (_, t) in out {
                preds[*t].push(s);
            }
        }
        let mut good = self.marked.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&s| good[s]).collect();
        while let Some(s) = stack.pop() {
            for &p in &preds[s] {
                if !good[p] {
                    good[p] = true;
                    stack.push(p);
                }
            }
        }
        good
    }

    /// Every reachable state can reach a marked state.
    pub fn is_nonblocking(&self) -> bool {
        let co = self.coaccessible();
        self.reachable()
            .iter()
            .zip(&co)
            .all(|(&r, &c)| !r || c)
    }

    /// Restriction to the states satisfying `keep`, followed by the
    /// accessible part. The relative order of the surviving states is
    /// preserved. Returns the new automaton and the map new index -> old
    /// index, or `None` when the initial state itself is dropped.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Option<(Self, Vec<usize>)> {
        if !keep(self.initial) {
            return None;
        }
        let n = self.num_states();
        let mut seen = vec![false; n];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(s) = stack.pop() {
            for (_, t) in &self.edges[s] {
                if !seen[*t] && keep(*t) {
                    seen[*t] = true;
                    stack.push(*t);
                }
            }
        }
        let old_of_new: Vec<usize> = (0..n).filter(|&s| seen[s]).collect();
        let mut new_of_old = vec![usize::MAX; n];
        for (new, &old) in old_of_new.iter().enumerate() {
            new_of_old[old] = new;
        }
        let edges = old_of_new
            .iter()
            .map(|&old| {
                self.edges[old]
                    .iter()
                    .filter(|(_, t)| seen[*t])
                    .map(|(e, t)| (e.clone(), new_of_old[*t]))
                    .collect()
            })
            .collect();
        let marked = old_of_new.iter().map(|&old| self.marked[old]).collect();
        Some((
            Dfa {
                edges,
                initial: new_of_old[self.initial],
                marked,
            },
            old_of_new,
        ))
    }

    /// Accessible part; see [`Dfa::restrict`] for the returned index map.
    pub fn accessible(&self) -> (Self, Vec<usize>) {
        self.restrict(|_| true).expect("initial state is always kept")
    }

    /// Shortest word from `from` to any marked state, if one exists.
    pub fn shortest_to_marked(&self, from: usize) -> Option<Vec<E>> {
        let mut parent: Vec<Option<(usize, E)>> = vec![None; self.num_states()];
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(s) = queue.pop_front() {
            if self.marked[s] {
                let mut word = Vec::new();
                let mut cur = s;
                while let Some((p, e)) = parent[cur].clone() {
                    word.push(e);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for (e, t) in &self.edges[s] {
                if !seen[*t] {
                    seen[*t] = true;
                    parent[*t] = Some((s, e.clone()));
                    queue.push_back(*t);
                }
            }
        }
        None
    }
}

/// Outcome of comparing two automata's generated and marked languages.
/// Each field holds a shortest distinguishing string, or `None` when the
/// corresponding languages are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageComparison<E> {
    pub generated: Option<Vec<E>>,
    pub marked: Option<Vec<E>>,
}

impl<E> LanguageComparison<E> {
    pub fn generated_equal(&self) -> bool {
        self.generated.is_none()
    }

    pub fn marked_equal(&self) -> bool {
        self.marked.is_none()
    }

    pub fn is_equal(&self) -> bool {
        self.generated.is_none() && self.marked.is_none()
    }
}

struct PairSearch<E> {
    nodes: Vec<(Option<usize>, Option<usize>)>,
    parent: Vec<Option<(usize, E)>>,
}

impl<E: Clone> PairSearch<E> {
    fn path(&self, mut node: usize) -> Vec<E> {
        let mut word = Vec::new();
        while let Some((p, e)) = self.parent[node].clone() {
            word.push(e);
            node = p;
        }
        word.reverse();
        word
    }
}

fn merged_events<'a, E: Ord + Clone>(a: &'a [(E, usize)], b: &'a [(E, usize)]) -> Vec<E> {
    let mut out: Vec<E> = a.iter().chain(b).map(|(e, _)| e.clone()).collect();
    out.sort();
    out.dedup();
    out
}

/// Exact comparison of `L(a)` against `L(b)` and `Lm(a)` against `Lm(b)`
/// by synchronized breadth-first search over state pairs.
pub fn compare_languages<E: Ord + Clone + Hash>(a: &Dfa<E>, b: &Dfa<E>) -> LanguageComparison<E> {
    LanguageComparison {
        generated: generated_difference(a, b),
        marked: marked_difference(a, b),
    }
}

fn generated_difference<E: Ord + Clone + Hash>(a: &Dfa<E>, b: &Dfa<E>) -> Option<Vec<E>> {
    let mut search = PairSearch {
        nodes: vec![(Some(a.initial), Some(b.initial))],
        parent: vec![None],
    };
    let mut index = HashMap::from([((a.initial, b.initial), 0usize)]);
    let mut head = 0;
    while head < search.nodes.len() {
        let (Some(p), Some(q)) = search.nodes[head] else {
            unreachable!()
        };
        for e in merged_events(a.edges(p), b.edges(q)) {
            match (a.step(p, &e), b.step(q, &e)) {
                (Some(p2), Some(q2)) => {
                    if let std::collections::hash_map::Entry::Vacant(v) = index.entry((p2, q2)) {
                        v.insert(search.nodes.len());
                        search.nodes.push((Some(p2), Some(q2)));
                        search.parent.push(Some((head, e)));
                    }
                }
                _ => {
                    let mut w = search.path(head);
                    w.push(e);
                    return Some(w);
                }
            }
        }
        head += 1;
    }
    None
}

fn marked_difference<E: Ord + Clone + Hash>(a: &Dfa<E>, b: &Dfa<E>) -> Option<Vec<E>> {
    // Work on the trim parts: a state that cannot reach a marking contributes
    // nothing to the marked language and is treated as absent.
    let ca = a.coaccessible();
    let cb = b.coaccessible();
    let start = (
        Some(a.initial).filter(|&s| ca[s]),
        Some(b.initial).filter(|&s| cb[s]),
    );
    let mut search = PairSearch {
        nodes: vec![start],
        parent: vec![None],
    };
    let mut index = HashMap::from([(start, 0usize)]);
    let mut layer_start = 0;
    while layer_start < search.nodes.len() {
        let layer_end = search.nodes.len();
        // Marking mismatches in this layer are strictly shorter than any
        // transition mismatch leaving it.
        for node in layer_start..layer_end {
            match search.nodes[node] {
                (None, None) => {}
                (Some(p), None) => {
                    let mut w = search.path(node);
                    w.extend(a.shortest_to_marked(p).expect("coaccessible"));
                    return Some(w);
                }
                (None, Some(q)) => {
                    let mut w = search.path(node);
                    w.extend(b.shortest_to_marked(q).expect("coaccessible"));
                    return Some(w);
                }
                (Some(p), Some(q)) => {
                    if a.is_marked(p) != b.is_marked(q) {
                        return Some(search.path(node));
                    }
                }
            }
        }
        for node in layer_start..layer_end {
            let (Some(p), Some(q)) = search.nodes[node] else {
                continue;
            };
            for e in merged_events(a.edges(p), b.edges(q)) {
                let next = (
                    a.step(p, &e).filter(|&s| ca[s]),
                    b.step(q, &e).filter(|&s| cb[s]),
                );
                if next == (None, None) {
                    continue;
                }
                if let std::collections::hash_map::Entry::Vacant(v) = index.entry(next) {
                    v.insert(search.nodes.len());
                    search.nodes.push(next);
                    search.parent.push(Some((node, e)));
                }
            }
        }
        layer_start = layer_end;
    }
    None
}
