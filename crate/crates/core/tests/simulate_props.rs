mod common;

use netsup::channel::max_delay;
use netsup::comm::{build_comm_automaton, BuildOptions};
use netsup::generate::{random_instance, GenParams};
use netsup::simulate::{render_trace, simulate, trace_json_lines, Termination};
use netsup::synthesis::{closed_loop, synthesize_all};
use proptest::prelude::*;

const CAP: usize = 1_000_000;

#[test]
fn fixture_runs_stay_safe_and_keep_reaching_marked_states() {
    let m = common::fixture("production_line.json");
    let gt = build_comm_automaton(&m.plant, &m.spec, &m.network, BuildOptions::default()).unwrap();
    let gamma = synthesize_all(&gt, &m.network, CAP).unwrap();
    for seed in 0..100 {
        let t = simulate(&gt, &gamma, &m.network, seed, 300);
        assert_eq!(t.terminated, Termination::StepLimit);
        assert!(t.states().all(|x| gt.spec_flag(x)), "seed {seed}");
        assert!(t.states().any(|x| gt.is_marked(x)), "seed {seed}");
        assert_eq!(gt.dfa().run(&t.events()), t.steps.last().map(|s| s.state));
    }
}

#[test]
fn rendering_is_one_line_per_step_plus_header() {
    let m = common::fixture("production_line.json");
    let gt = build_comm_automaton(&m.plant, &m.spec, &m.network, BuildOptions::default()).unwrap();
    let gamma = synthesize_all(&gt, &m.network, CAP).unwrap();
    let t = simulate(&gt, &gamma, &m.network, 5, 40);
    let text = render_trace(&gt, &t);
    assert_eq!(text.lines().count(), 41);
    assert!(text.starts_with("# seed 5 from (0,ε,ε) (40 steps, step-limit)"));
    assert_eq!(trace_json_lines(&gt, &t).lines().count(), 41);
    assert_eq!(text, render_trace(&gt, &simulate(&gt, &gamma, &m.network, 5, 40)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn traces_replay_and_respect_channel_ages(seed in any::<u64>(), run in any::<u64>()) {
        let inst = random_instance(seed, &GenParams::default());
        let net = &inst.model.network;
        let gt = build_comm_automaton(&inst.model.plant, &inst.model.spec, net, BuildOptions::default()).unwrap();
        let gamma = synthesize_all(&gt, net, CAP).unwrap();
        let t = simulate(&gt, &gamma, net, run, 200);
        let mut x = gt.initial();
        for step in &t.steps {
            x = gt.step(x, &step.event).unwrap();
            prop_assert_eq!(x, step.state);
            for (k, c) in gt.state(x).channels.iter() {
                prop_assert!(max_delay(c) <= net.channel(k.0, k.1).unwrap().delay_bound);
            }
        }
        let cl = closed_loop(&gt, &gamma, net, CAP).unwrap();
        prop_assert!(cl.dfa().run(&t.events()).is_some());
        if t.terminated == Termination::DeadlockUnmarked {
            prop_assert!(!cl.dfa().is_nonblocking());
        }
    }
}
