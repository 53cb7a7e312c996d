mod common;

use netsup::comm::{build_comm_automaton, BuildOptions, CommAutomaton, CommEvent};
use netsup::generate::{random_instance, GenParams};
use netsup::oracle::{brute_check, check_agreement, classify, enumerate, Agreement};
use netsup::verify::{check_all, check_lm_closure, replay_witness, Condition};
use netsup::{EventId, Model, ModelDoc};
use proptest::prelude::*;

fn comm(m: &Model) -> CommAutomaton {
    build_comm_automaton(&m.plant, &m.spec, &m.network, BuildOptions::default()).unwrap()
}

/// Supervisor 1 owns an uncontrollable `u` that leaves the specification
/// after three ticks.
const PLANTED: &str = r#"{
  "automata": [{
    "name": "G",
    "states": ["0", "1", "2", "3", "bad"],
    "initial": "0",
    "marked": ["0", "1", "2", "3", "bad"],
    "transitions": [
      {"from": "0", "event": "tick", "to": "1"},
      {"from": "1", "event": "tick", "to": "2"},
      {"from": "2", "event": "tick", "to": "3"},
      {"from": "3", "event": "tick", "to": "3"},
      {"from": "3", "event": "u", "to": "bad"},
      {"from": "bad", "event": "tick", "to": "bad"}
    ]
  }],
  "network": {
    "n": 2,
    "supervisors": [
      {"alphabet": ["tick", "u"], "controllable": ["tick"], "observable": ["tick", "u"]},
      {"alphabet": ["tick"], "controllable": ["tick"], "observable": ["tick"]}
    ],
    "com": [[0, 0], [0, 0]]
  },
  "plant": "G",
  "spec": {"remove_states": ["bad"]}
}"#;

#[test]
fn planted_uncontrollable_defect_is_found_only_within_the_bound() {
    let m = Model::from_json(PLANTED).unwrap();
    let gt = comm(&m);
    let engine = &check_all(&gt, &m.network)[0];
    assert_eq!(engine.condition, Condition::NetCtrl1);
    assert!(!engine.holds);
    let w = engine.witness.as_ref().unwrap();
    assert_eq!(w.mu, vec![CommEvent::plant("tick"); 3]);
    assert_eq!(w.sigma, Some(EventId::new("u")));
    assert!(replay_witness(&gt, &m.network, engine));

    let deep = brute_check(Condition::NetCtrl1, &gt, &m.network, 8);
    assert!(!deep.holds);
    assert_eq!(classify(engine, &deep, 8), Agreement::Agree);
    let shallow = brute_check(Condition::NetCtrl1, &gt, &m.network, 2);
    assert!(shallow.holds);
    assert_eq!(classify(engine, &shallow, 2), Agreement::BeyondBound);
}

#[test]
fn marking_override_breaks_closure_with_a_confirmed_witness() {
    let text = std::fs::read_to_string(common::fixture_path("production_line.json")).unwrap();
    let mut doc = ModelDoc::from_json(&text).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
    value["spec"]["marked"] = serde_json::json!([]);
    doc = ModelDoc::from_json(&value.to_string()).unwrap();
    let m = doc.build().unwrap();
    let gt = comm(&m);
    let v = check_lm_closure(&gt);
    assert!(!v.holds);
    assert!(replay_witness(&gt, &m.network, &v));
    let w = v.witness.unwrap().mu;
    let spec = enumerate(&gt.spec_dfa(), 8);
    let plant = enumerate(gt.dfa(), 8);
    assert!(spec.strings.contains(&w));
    assert!(plant.marked.contains(&w));
    assert!(!spec.marked.contains(&w));
}

#[test]
fn inherited_marking_is_closed() {
    let m = common::fixture("production_line.json");
    assert!(check_lm_closure(&comm(&m)).holds);
}

#[test]
fn missing_back_channel_failure_is_confirmed_by_enumeration() {
    let m = common::fixture("production_line_no_ch21.json");
    let gt = comm(&m);
    let engine = check_all(&gt, &m.network)
        .into_iter()
        .find(|v| v.condition == Condition::NetJointObs)
        .unwrap();
    assert!(!engine.holds);
    let k = engine.witness.as_ref().unwrap().depth();
    let oracle = brute_check(Condition::NetJointObs, &gt, &m.network, k);
    assert!(!oracle.holds);
    assert_eq!(classify(&engine, &oracle, k), Agreement::Agree);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn failing_verdicts_replay(seed in any::<u64>()) {
        let inst = random_instance(seed, &GenParams::default());
        let gt = comm(&inst.model);
        for v in check_all(&gt, &inst.model.network) {
            prop_assert_eq!(v.holds, v.witness.is_none());
            if !v.holds {
                prop_assert!(replay_witness(&gt, &inst.model.network, &v), "{:?}", v);
            }
        }
    }

    #[test]
    fn engine_agrees_with_enumeration(seed in any::<u64>()) {
        let inst = random_instance(seed, &GenParams::default());
        let a = check_agreement(&inst.model, 6, BuildOptions::default()).unwrap();
        prop_assert_eq!(a.disagreements(), 0, "{:?}", a);
    }
}
