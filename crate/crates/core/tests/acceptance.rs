//! Acceptance suite: runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::{run_channel_ops, two_channel_net, ChannelOp};
use netsup::channel::{self, max_delay, ChannelConfig, ChannelEntry, ChannelState};
use netsup::comm::{build_comm_automaton, check_proposition1, project_psi_fi, BuildOptions, CommAutomaton};
use netsup::generate::{random_instance, GenParams};
use netsup::oracle::{brute_admissibility, brute_check, brute_closed_loop, check_agreement, enumerate};
use netsup::simulate::simulate;
use netsup::synthesis::{evaluate_synthesis, solve_dnnscp, synthesize_all, SolveOptions, SynthesisOutcome};
use netsup::verify::{check_all, Verdict};
use netsup::{EventId, NetworkConfig};

const CAP: usize = 1_000_000;
const K: usize = 8;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn comm(m: &netsup::Model) -> CommAutomaton {
    build_comm_automaton(&m.plant, &m.spec, &m.network, BuildOptions::default()).unwrap()
}

fn fixture_reproduction() -> Outcome {
    let start = Instant::now();
    let m = common::fixture("production_line.json");
    let r = solve_dnnscp(&m.plant, &m.spec, &m.network, SolveOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    for v in &r.verdicts {
        ensure(v.holds, || format!("{} fails", v.condition))?;
    }
    ensure(r.solvable, || "not solvable".into())?;
    let syn = r.synthesis.as_ref().unwrap();
    ensure(syn.admissible(), || "supervisors inadmissible".into())?;
    ensure(syn.comparison.generated_equal(), || format!("closed loop differs: {:?}", syn.comparison.generated))?;
    ensure(syn.comparison.marked_equal(), || format!("marked closed loop differs: {:?}", syn.comparison.marked))?;

    let gt = &r.comm;
    let s1 = &syn.supervisors[0];
    let a1 = EventId::new("α1");
    let (mut at4, mut at0) = (0, 0);
    for &x in gt.spec_states() {
        let cmd = s1.command(&project_psi_fi(&gt.spec_path_to(x), 0, &m.network)).unwrap();
        match gt.plant_name(x) {
            "4" => {
                ensure(!cmd.contains(&a1), || format!("α1 enabled at {}", gt.render_state(x)))?;
                at4 += 1;
            }
            "0" => {
                ensure(cmd.contains(&a1), || format!("α1 disabled at {}", gt.render_state(x)))?;
                at0 += 1;
            }
            _ => {}
        }
    }
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!(
        "all conditions hold, solvable, closed loop equals specification; α1 disabled at {at4} plant-4 states, enabled at {at0} plant-0 states; {elapsed:.2?}"
    ))
}

fn projection_property() -> Outcome {
    let start = Instant::now();
    let p = GenParams::default();
    let failures: Vec<u64> = (0..100u64)
        .into_par_iter()
        .filter(|&seed| {
            let inst = random_instance(seed, &p);
            !check_proposition1(&inst.model.plant, &comm(&inst.model)).holds
        })
        .collect();
    let elapsed = start.elapsed();
    ensure(failures.is_empty(), || format!("projection differs for seeds {failures:?}"))?;
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("100/100 instances; {elapsed:.2?}"))
}

struct Sampled {
    seed: u64,
    gt: CommAutomaton,
    net: NetworkConfig,
    verdicts: Vec<Verdict>,
    syn: SynthesisOutcome,
}

/// Evaluates seeds in batches until both the holding and the failing
/// populations reach `want`.
fn sample(want: usize) -> (Vec<Sampled>, Vec<Sampled>) {
    let p = GenParams::default();
    let (mut holding, mut failing) = (Vec::new(), Vec::new());
    let mut next = 0u64;
    while (holding.len() < want || failing.len() < want) && next < 5000 {
        let batch: Vec<Sampled> = (next..next + 100)
            .into_par_iter()
            .map(|seed| {
                let inst = random_instance(seed, &p);
                let gt = comm(&inst.model);
                let net = inst.model.network;
                let verdicts = check_all(&gt, &net);
                let syn = evaluate_synthesis(&gt, &net, CAP).unwrap();
                Sampled {
                    seed,
                    gt,
                    net,
                    verdicts,
                    syn,
                }
            })
            .collect();
        for s in batch {
            if s.verdicts.iter().all(|v| v.holds) {
                holding.push(s);
            } else {
                failing.push(s);
            }
        }
        next += 100;
    }
    (holding, failing)
}

fn if_part(holding: &[Sampled]) -> Outcome {
    ensure(holding.len() >= 50, || format!("only {} instances satisfy every condition", holding.len()))?;
    for s in holding {
        ensure(s.syn.admissible(), || format!("seed {}: supervisors inadmissible", s.seed))?;
        ensure(s.syn.comparison.is_equal(), || format!("seed {}: closed loop differs: {:?}", s.seed, s.syn.comparison))?;
    }
    Ok(format!("{} instances: admissible, both languages equal", holding.len()))
}

/// Shortest exact evidence that the synthesized supervisors fall short.
fn exact_evidence(s: &Sampled) -> Option<usize> {
    let adm = s.syn.admissibility.iter().filter_map(|v| v.witness.as_ref()).map(|w| w.depth() + 1);
    let cmp = [&s.syn.comparison.generated, &s.syn.comparison.marked]
        .into_iter()
        .filter_map(|w| w.as_ref().map(Vec::len));
    adm.chain(cmp).min()
}

fn only_if_part(failing: &[Sampled]) -> Outcome {
    ensure(failing.len() >= 50, || format!("only {} instances fail a condition", failing.len()))?;
    let (mut confirmed, mut beyond, mut verdicts_confirmed, mut verdicts_beyond) = (0, 0, 0, 0);
    for s in failing {
        ensure(!(s.syn.admissible() && s.syn.comparison.is_equal()), || {
            format!("seed {}: a condition fails but the supervisors achieve the specification", s.seed)
        })?;
        for v in s.verdicts.iter().filter(|v| !v.holds) {
            let depth = v.witness.as_ref().unwrap().depth();
            if depth <= K {
                let o = brute_check(v.condition, &s.gt, &s.net, K);
                ensure(!o.holds, || format!("seed {}: oracle misses {} at depth {depth}", s.seed, v.condition))?;
                verdicts_confirmed += 1;
            } else {
                verdicts_beyond += 1;
            }
        }
        let evidence = exact_evidence(s).unwrap();
        let adm = brute_admissibility(&s.gt, &s.syn.supervisors, &s.net, K);
        let bounded = brute_closed_loop(&s.gt, &s.syn.supervisors, &s.net, K);
        let seen = adm.iter().any(|v| !v.holds) || bounded != enumerate(&s.gt.spec_dfa(), K);
        if seen {
            confirmed += 1;
        } else {
            ensure(evidence > K, || format!("seed {}: oracle misses a shortfall of length {evidence}", s.seed))?;
            beyond += 1;
        }
    }
    Ok(format!(
        "{} instances: all fall short exactly; oracle at k={K} confirms {confirmed}, {beyond} beyond the bound; failed conditions confirmed {verdicts_confirmed}, beyond {verdicts_beyond}",
        failing.len()
    ))
}

fn oracle_agreement() -> Outcome {
    let start = Instant::now();
    let p = GenParams::default();
    let results: Vec<(u64, usize, usize)> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let a = check_agreement(&random_instance(seed, &p).model, K, BuildOptions::default()).unwrap();
            (seed, a.disagreements(), a.beyond_bound())
        })
        .collect();
    let elapsed = start.elapsed();
    let bad: Vec<u64> = results.iter().filter(|r| r.1 > 0).map(|r| r.0).collect();
    let beyond: usize = results.iter().map(|r| r.2).sum();
    ensure(bad.is_empty(), || format!("disagreements on seeds {bad:?}"))?;
    within(elapsed, Duration::from_secs(300))?;
    Ok(format!("200 instances at k={K}: 0 disagreements, {beyond} engine witnesses beyond the bound; {elapsed:.2?}"))
}

fn entry(e: &str, age: u32) -> ChannelEntry {
    ChannelEntry {
        event: EventId::new(e),
        age,
    }
}

fn channel_rows() -> Result<usize, String> {
    let net = common::fixture("production_line.json").network;
    let empty = ChannelState::empty(&net);
    let with12 = |entries: Vec<ChannelEntry>| empty.with(0, 1, ChannelConfig::new(entries));
    let ev = EventId::new;
    let rows: Vec<(&str, bool)> = vec![
        ("max_delay ε", max_delay(&ChannelConfig::default()) == 0),
        ("max_delay (β1,1)", max_delay(&ChannelConfig::new(vec![entry("β1", 1)])) == 1),
        ("max_delay (a,2)(b,0)", max_delay(&ChannelConfig::new(vec![entry("a", 2), entry("b", 0)])) == 2),
        ("time empty", channel::time_step(&empty, &net) == Some(empty.clone())),
        ("time (β1,0)", channel::time_step(&with12(vec![entry("β1", 0)]), &net) == Some(with12(vec![entry("β1", 1)]))),
        ("time (β1,1)", channel::time_step(&with12(vec![entry("β1", 1)]), &net).is_none()),
        ("push α1", channel::push(&empty, &ev("α1"), &net) == with12(vec![entry("α1", 0)])),
        ("push unrouted", channel::push(&empty, &ev("zzz"), &net) == empty),
        (
            "push α1 onto (β1,1)",
            channel::push(&with12(vec![entry("β1", 1)]), &ev("α1"), &net) == with12(vec![entry("β1", 1), entry("α1", 0)]),
        ),
        ("deliver β1", channel::deliver(&with12(vec![entry("β1", 1)]), 0, 1, &ev("β1")) == Some(empty.clone())),
        ("deliver from ε", channel::deliver(&empty, 0, 1, &ev("β1")).is_none()),
        ("deliver non-head", channel::deliver(&with12(vec![entry("a", 1), entry("b", 0)]), 0, 1, &ev("b")).is_none()),
        ("lose α1", channel::lose(&with12(vec![entry("α1", 0)]), 0, 1, 1, &net) == Some(empty.clone())),
        ("lose d=2 of 1", channel::lose(&with12(vec![entry("α1", 0)]), 0, 1, 2, &net).is_none()),
        ("lose non-lossy β1", channel::lose(&with12(vec![entry("α1", 1), entry("β1", 0)]), 0, 1, 2, &net).is_none()),
    ];
    let failed: Vec<&str> = rows.iter().filter(|r| !r.1).map(|r| r.0).collect();
    ensure(failed.is_empty(), || format!("rows failed: {failed:?}"))?;
    Ok(rows.len())
}

fn random_op(rng: &mut ChaCha8Rng) -> ChannelOp {
    match rng.gen_range(0..8) {
        0 | 1 => ChannelOp::Time,
        2..=4 => ChannelOp::Push(rng.gen_range(0..4)),
        5 | 6 => ChannelOp::Deliver(rng.gen_range(0..2), rng.gen_range(0..4)),
        _ => ChannelOp::Lose(rng.gen_range(0..2), rng.gen_range(0..5)),
    }
}

fn channel_calculus() -> Outcome {
    let rows = channel_rows()?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut applied = 0;
    for k in 0..10_000 {
        let net = two_channel_net(rng.gen_range(0..3), rng.gen_range(0..3));
        let len = rng.gen_range(1..=60);
        let ops: Vec<ChannelOp> = (0..len).map(|_| random_op(&mut rng)).collect();
        applied += run_channel_ops(&net, &ops).map_err(|e| format!("sequence {k}: {e}"))?;
    }
    Ok(format!("{rows} example rows; 10000 random sequences ({applied} defined operations)"))
}

fn simulation_safety() -> Outcome {
    let m = common::fixture("production_line.json");
    let gt = comm(&m);
    let gamma = synthesize_all(&gt, &m.network, CAP).unwrap();
    let outside: Vec<(u64, usize, bool)> = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let t = simulate(&gt, &gamma, &m.network, seed, 1000);
            let outside = t.states().filter(|&x| !gt.spec_flag(x)).count();
            let marked = t.states().any(|x| gt.is_marked(x));
            (seed, outside, marked)
        })
        .collect();
    let visits: usize = outside.iter().map(|r| r.1).sum();
    let unmarked = outside.iter().filter(|r| !r.2).count();
    ensure(visits == 0, || {
        let seeds: Vec<u64> = outside.iter().filter(|r| r.1 > 0).map(|r| r.0).collect();
        format!("{visits} visits outside the specification (seeds {seeds:?})")
    })?;
    Ok(format!("1000 runs x 1000 steps: 0 visits outside the specification; {} runs reached a marked state", 1000 - unmarked))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let r = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    match r {
        Ok(detail) => {
            println!("PASS  {name}: {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL  {name}: {detail}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= run("1 fixture reproduction", fixture_reproduction);
    ok &= run("2 projection equals plant language", projection_property);
    let (holding, failing) = sample(50);
    ok &= run("3 conditions sufficient", || if_part(&holding));
    ok &= run("4 conditions necessary", || only_if_part(&failing));
    ok &= run("5 oracle agreement", oracle_agreement);
    ok &= run("6 channel calculus", channel_calculus);
    ok &= run("7 simulation safety", simulation_safety);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
