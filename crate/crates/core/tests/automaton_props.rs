mod common;

use std::collections::{BTreeMap, BTreeSet};

use netsup::automaton::{accessible, is_subautomaton, parallel_compose, validate_timed_assumptions};
use netsup::oracle::enumerate;
use netsup::{EventId, TimedAutomaton};
use proptest::prelude::*;

const BOUND: usize = 5;

/// A random deterministic automaton over `tick` and two private events
/// `{prefix}0`, `{prefix}1`.
fn automaton(prefix: &'static str) -> impl Strategy<Value = TimedAutomaton> {
    (1..4usize)
        .prop_flat_map(move |n| {
            (
                Just(n),
                prop::collection::vec((0..n, 0..3usize, 0..n), 0..3 * n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
        .prop_map(move |(n, edges, marked)| {
            let events = [EventId::tick(), EventId::new(format!("{prefix}0")), EventId::new(format!("{prefix}1"))];
            let unique: BTreeMap<(usize, usize), usize> = edges.into_iter().map(|(f, e, t)| ((f, e), t)).collect();
            let transitions: Vec<(usize, EventId, usize)> =
                unique.into_iter().map(|((f, e), t)| (f, events[e].clone(), t)).collect();
            let marked: Vec<usize> = (0..n).filter(|&s| marked[s]).collect();
            TimedAutomaton::from_parts(
                prefix,
                (0..n).map(|s| s.to_string()).collect(),
                events.iter().cloned().collect(),
                &transitions,
                0,
                &marked,
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn composition_is_associative(a in automaton("a"), b in automaton("b"), c in automaton("c")) {
        let left = parallel_compose(&parallel_compose(&a, &b).unwrap(), &c).unwrap();
        let right = parallel_compose(&a, &parallel_compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(enumerate(left.dfa(), BOUND), enumerate(right.dfa(), BOUND));
        prop_assert_eq!(left.num_states(), right.num_states());
    }

    #[test]
    fn accessible_is_idempotent(a in automaton("a")) {
        let once = accessible(&a);
        let twice = accessible(&once);
        prop_assert_eq!(once.states(), twice.states());
        prop_assert_eq!(once.transitions(), twice.transitions());
        prop_assert_eq!(once.marked_states(), twice.marked_states());
        prop_assert_eq!(enumerate(a.dfa(), BOUND), enumerate(once.dfa(), BOUND));
    }

    #[test]
    fn subautomaton_languages_are_included(a in automaton("a"), keep in prop::collection::vec(any::<bool>(), 4)) {
        let h = a.induced("H", |s| s == a.initial() || keep[s]).unwrap();
        prop_assert!(is_subautomaton(&h, &a));
        let lh = enumerate(h.dfa(), BOUND);
        let lg = enumerate(a.dfa(), BOUND);
        prop_assert!(lh.strings.is_subset(&lg.strings));
        prop_assert!(lh.marked.is_subset(&lg.marked));
    }
}

#[test]
fn composition_with_an_unmarked_component_marks_nothing() {
    let a = TimedAutomaton::from_names("A", &["0"], "0", &["0"], &[("0", "tick", "0"), ("0", "x", "0")]).unwrap();
    let b = TimedAutomaton::from_names("B", &["0"], "0", &[], &[("0", "tick", "0")]).unwrap();
    let ab = parallel_compose(&a, &b).unwrap();
    assert_eq!(ab.state_name(0), "(0,0)");
    assert!(enumerate(ab.dfa(), 3).marked.is_empty());
    assert!(enumerate(ab.dfa(), 3).strings.contains(&vec![EventId::new("x"), EventId::tick()]));
}

#[test]
fn every_fixture_satisfies_the_timing_assumptions() {
    for name in [
        "production_line.json",
        "production_line_no_ch21.json",
        "production_line_uncontrollable.json",
        "minimal.json",
    ] {
        let m = common::fixture(name);
        assert_eq!(validate_timed_assumptions(&m.plant, &m.network), None, "{name}");
    }
}

#[test]
fn fixture_plant_blocks_and_its_specification_does_not() {
    let m = common::fixture("production_line.json");
    assert!(!netsup::automaton::is_nonblocking(&m.plant));
    assert!(netsup::automaton::is_nonblocking(&m.spec));
    let names: BTreeSet<&str> = m.spec.states().iter().map(String::as_str).collect();
    assert!(!names.contains("8"));
}
