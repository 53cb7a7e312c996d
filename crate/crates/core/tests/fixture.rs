use std::path::PathBuf;

use netsup::comm::{build_comm_automaton, check_proposition1, BuildOptions};
use netsup::synthesis::{solve_dnnscp, SolveOptions};
use netsup::verify::{check_all, replay_witness, Condition};
use netsup::{EventId, Model};

fn fixture(name: &str) -> Model {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    Model::from_file(path).unwrap()
}

#[test]
fn production_line_states_and_verdicts() {
    let m = fixture("production_line.json");
    let gt = build_comm_automaton(&m.plant, &m.spec, &m.network, BuildOptions::default()).unwrap();
    for label in ["(0,ε,ε)", "(4,(β1,1),ε)", "(0,ε,(β2,1))", "(4,ε,ε)"] {
        assert!(gt.find_rendered(label).is_some(), "missing {label}");
    }
    assert!(check_proposition1(&m.plant, &gt).holds);
    for v in check_all(&gt, &m.network) {
        assert!(v.holds, "{v:?}");
    }
}

#[test]
fn production_line_is_solved() {
    let m = fixture("production_line.json");
    let r = solve_dnnscp(&m.plant, &m.spec, &m.network, SolveOptions::default()).unwrap();
    assert!(r.solvable);
    assert!(r.spec_nonblocking);
    let syn = r.synthesis.unwrap();
    assert!(syn.achieves_spec(), "{:?}", syn.comparison);
    // α1 is disabled wherever supervisor 1 may be at plant state 4 inside
    // the specification and enabled where it can only be at plant state 0.
    let s1 = &syn.supervisors[0];
    let a1 = EventId::new("α1");
    let gt = &r.comm;
    for x in ["(4,ε,ε)", "(4,(β1,1),ε)", "(0,ε,ε)", "(0,ε,(β2,1))"] {
        let id = gt.find_rendered(x).unwrap();
        let word = gt.spec_path_to(id);
        let obs = netsup::comm::project_psi_fi(&word, 0, &m.network);
        let cmd = s1.command(&obs).unwrap();
        assert_eq!(cmd.contains(&a1), x.starts_with("(0"), "{x}");
    }
}

#[test]
fn without_reverse_channel_joint_observability_fails() {
    let m = fixture("production_line_no_ch21.json");
    let gt = build_comm_automaton(&m.plant, &m.spec, &m.network, BuildOptions::default()).unwrap();
    let verdicts = check_all(&gt, &m.network);
    let jo = verdicts.iter().find(|v| v.condition == Condition::NetJointObs).unwrap();
    assert!(!jo.holds);
    let w = jo.witness.as_ref().unwrap();
    assert_eq!(w.sigma, Some(EventId::new("α1")));
    assert_eq!(w.supervisor, Some(0));
    assert!(replay_witness(&gt, &m.network, jo));
    assert!(verdicts.iter().filter(|v| v.condition != Condition::NetJointObs).all(|v| v.holds));
}

#[test]
fn uncontrollable_exit_fails_controllability() {
    let m = fixture("production_line_uncontrollable.json");
    let gt = build_comm_automaton(&m.plant, &m.spec, &m.network, BuildOptions::default()).unwrap();
    let v = &check_all(&gt, &m.network)[0];
    assert_eq!(v.condition, Condition::NetCtrl1);
    assert!(!v.holds);
    assert_eq!(v.witness.as_ref().unwrap().sigma, Some(EventId::new("α2")));
    assert!(replay_witness(&gt, &m.network, v));
}

#[test]
fn minimal_is_trivially_solvable() {
    let m = fixture("minimal.json");
    let r = solve_dnnscp(&m.plant, &m.spec, &m.network, SolveOptions::default()).unwrap();
    assert!(r.solvable && r.synthesis.unwrap().achieves_spec());
}
