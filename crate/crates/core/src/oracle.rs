//! Brute-force ground truth: every checked property evaluated literally
//! over all strings up to a length bound. Intentionally naive.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::comm::{build_comm_automaton, project_psi_fi, BuildOptions, CommAutomaton, CommEvent};
use crate::dfa::Dfa;
use crate::error::Result;
use crate::event::EventId;
use crate::model::Model;
use crate::network::NetworkConfig;
use crate::synthesis::{evaluate_synthesis, SupervisorMap};
use crate::verify::{check_all, Condition, Verdict, Witness};

/// Strings of length at most `bound` and their marked subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedLanguage<E> {
    pub bound: usize,
    pub strings: BTreeSet<Vec<E>>,
    pub marked: BTreeSet<Vec<E>>,
}

impl<E: Ord> BoundedLanguage<E> {
    /// Prefix closure holds for every member.
    pub fn is_prefix_closed(&self) -> bool
    where
        E: Clone,
    {
        self.strings
            .iter()
            .all(|s| s.is_empty() || self.strings.contains(&s[..s.len() - 1]))
    }

    /// A string in exactly one of the two languages (generated first, then
    /// marked), shortest first.
    pub fn difference(&self, other: &Self) -> Option<Vec<E>>
    where
        E: Clone,
    {
        let shortest = |a: &BTreeSet<Vec<E>>, b: &BTreeSet<Vec<E>>| {
            a.symmetric_difference(b).min_by_key(|s| s.len()).cloned()
        };
        shortest(&self.strings, &other.strings).or_else(|| shortest(&self.marked, &other.marked))
    }
}

/// All strings of length at most `k` generated by `a`.
pub fn enumerate<E: Ord + Clone>(a: &Dfa<E>, k: usize) -> BoundedLanguage<E> {
    let mut lang = BoundedLanguage {
        bound: k,
        strings: BTreeSet::new(),
        marked: BTreeSet::new(),
    };
    let mut word = Vec::new();
    fn go<E: Ord + Clone>(a: &Dfa<E>, s: usize, k: usize, word: &mut Vec<E>, lang: &mut BoundedLanguage<E>) {
        lang.strings.insert(word.clone());
        if a.is_marked(s) {
            lang.marked.insert(word.clone());
        }
        if word.len() == k {
            return;
        }
        for (e, t) in a.edges(s) {
            word.push(e.clone());
            go(a, *t, k, word, lang);
            word.pop();
        }
    }
    go(a, a.initial(), k, &mut word, &mut lang);
    lang
}

/// Visits every string of the specification language of length at most
/// `k`: strings of the communication automaton whose every prefix ends in a
/// specification state.
fn for_each_spec_string(gt: &CommAutomaton, k: usize, mut f: impl FnMut(&[CommEvent], usize)) {
    fn go(gt: &CommAutomaton, x: usize, k: usize, word: &mut Vec<CommEvent>, f: &mut dyn FnMut(&[CommEvent], usize)) {
        f(word, x);
        if word.len() == k {
            return;
        }
        for (e, y) in gt.edges(x) {
            if gt.spec_flag(*y) {
                word.push(e.clone());
                go(gt, *y, k, word, f);
                word.pop();
            }
        }
    }
    let x0 = gt.initial();
    if gt.spec_flag(x0) {
        go(gt, x0, k, &mut Vec::new(), &mut f);
    }
}

/// Outcome of appending a plant event to a specification string.
enum Ext {
    Undefined,
    Stays,
    Exits,
}

fn extend(gt: &CommAutomaton, x: usize, sigma: &EventId) -> Ext {
    match gt.step(x, &CommEvent::Plant(sigma.clone())) {
        None => Ext::Undefined,
        Some(y) if gt.spec_flag(y) => Ext::Stays,
        Some(_) => Ext::Exits,
    }
}

/// Evaluates one existence condition over all specification strings of
/// length at most `k`. Finds every violation whose witness strings fit the
/// bound and never reports a spurious one.
pub fn brute_check(condition: Condition, gt: &CommAutomaton, net: &NetworkConfig, k: usize) -> Verdict {
    let mut witness: Option<Witness> = None;
    let plain = |mu: &[CommEvent], sigma: Option<EventId>| Witness {
        mu: mu.to_vec(),
        nu: None,
        sigma,
        supervisor: None,
    };
    let tick = EventId::tick();
    match condition {
        Condition::NetCtrl1 => {
            let uncontrollable: Vec<EventId> = net
                .alphabet()
                .into_iter()
                .filter(|e| !net.is_controllable(e))
                .collect();
            for_each_spec_string(gt, k, |mu, x| {
                if witness.is_some() {
                    return;
                }
                if let Some(s) = uncontrollable.iter().find(|s| matches!(extend(gt, x, s), Ext::Exits)) {
                    witness = Some(plain(mu, Some(s.clone())));
                }
            });
        }
        Condition::NetCtrl2 => {
            for_each_spec_string(gt, k, |mu, x| {
                if witness.is_some() || !matches!(extend(gt, x, &tick), Ext::Exits) {
                    return;
                }
                if !net.enforceable().iter().any(|s| matches!(extend(gt, x, s), Ext::Stays)) {
                    witness = Some(plain(mu, Some(tick.clone())));
                }
            });
        }
        Condition::NetJointObs => {
            let controllable: Vec<EventId> = net
                .alphabet()
                .into_iter()
                .filter(|e| net.is_controllable(e))
                .collect();
            // (supervisor, observation, σ) -> a string after which σ exits
            // and one after which it stays.
            type Seen = (Option<Vec<CommEvent>>, Option<Vec<CommEvent>>);
            let mut table: HashMap<(usize, Vec<EventId>, EventId), Seen> = HashMap::new();
            for_each_spec_string(gt, k, |mu, x| {
                for sigma in &controllable {
                    let ext = extend(gt, x, sigma);
                    if matches!(ext, Ext::Undefined) {
                        continue;
                    }
                    for i in net.controllers(sigma) {
                        let key = (i, project_psi_fi(mu, i, net), sigma.clone());
                        let entry = table.entry(key).or_default();
                        let slot = if matches!(ext, Ext::Exits) { &mut entry.0 } else { &mut entry.1 };
                        if slot.is_none() {
                            *slot = Some(mu.to_vec());
                        }
                    }
                }
            });
            let mut hits: Vec<_> = table
                .into_iter()
                .filter_map(|((i, _, sigma), (exit, stay))| Some((sigma, i, exit?, stay?)))
                .collect();
            hits.sort_by(|a, b| (&a.0, a.1, a.2.len() + a.3.len()).cmp(&(&b.0, b.1, b.2.len() + b.3.len())));
            if let Some((sigma, i, mu, nu)) = hits.into_iter().next() {
                witness = Some(Witness {
                    mu,
                    nu: Some(nu),
                    sigma: Some(sigma),
                    supervisor: Some(i),
                });
            }
        }
        Condition::LmClosure => {
            for_each_spec_string(gt, k, |mu, x| {
                if witness.is_none() && gt.spec_marked(x) != gt.is_marked(x) {
                    witness = Some(plain(mu, None));
                }
            });
        }
        Condition::AdmissibleUncontrollable | Condition::AdmissibleTick => {
            panic!("admissibility depends on supervisors; use brute_admissibility")
        }
    }
    match witness {
        Some(w) => Verdict::fail(condition, w),
        None => Verdict::pass(condition),
    }
}

/// Whether the supervisors permit `e` after `mu`, each consulting its own
/// observation of `mu`.
fn admits(net: &NetworkConfig, gamma: &[SupervisorMap], mu: &[CommEvent], e: &CommEvent) -> bool {
    match e {
        CommEvent::Plant(sigma) if net.is_controllable(sigma) => net.controllers(sigma).into_iter().all(|i| {
            gamma[i]
                .command(&project_psi_fi(mu, i, net))
                .is_some_and(|s| s.contains(sigma))
        }),
        _ => true,
    }
}

/// The closed-loop language grown string by string from its recursive
/// definition.
pub fn brute_closed_loop(gt: &CommAutomaton, gamma: &[SupervisorMap], net: &NetworkConfig, k: usize) -> BoundedLanguage<CommEvent> {
    let mut lang = BoundedLanguage {
        bound: k,
        strings: BTreeSet::new(),
        marked: BTreeSet::new(),
    };
    let mut frontier: Vec<(Vec<CommEvent>, usize)> = vec![(Vec::new(), gt.initial())];
    for depth in 0..=k {
        let mut next = Vec::new();
        for (mu, x) in frontier {
            if depth < k {
                for (e, y) in gt.edges(x) {
                    if admits(net, gamma, &mu, e) {
                        let mut w = mu.clone();
                        w.push(e.clone());
                        next.push((w, *y));
                    }
                }
            }
            if gt.is_marked(x) {
                lang.marked.insert(mu.clone());
            }
            lang.strings.insert(mu);
        }
        frontier = next;
    }
    lang
}

/// Admissibility evaluated over specification strings of length at most `k`.
pub fn brute_admissibility(gt: &CommAutomaton, gamma: &[SupervisorMap], net: &NetworkConfig, k: usize) -> Vec<Verdict> {
    let tick = EventId::tick();
    let mut first = None;
    let mut second = None;
    for_each_spec_string(gt, k, |mu, x| {
        let commands: Vec<_> = (0..gamma.len())
            .map(|i| gamma[i].command(&project_psi_fi(mu, i, net)).cloned().unwrap_or_default())
            .collect();
        if first.is_none() {
            for (i, cmd) in commands.iter().enumerate() {
                if let Some(e) = net.supervisor(i).uncontrollable().into_iter().find(|e| !cmd.contains(e)) {
                    first = Some(Witness {
                        mu: mu.to_vec(),
                        nu: None,
                        sigma: Some(e),
                        supervisor: Some(i),
                    });
                    break;
                }
            }
        }
        if second.is_none()
            && !matches!(extend(gt, x, &tick), Ext::Undefined)
            && !net.enforceable().iter().any(|s| matches!(extend(gt, x, s), Ext::Stays))
        {
            if let Some(i) = commands.iter().position(|c| !c.contains(&tick)) {
                second = Some(Witness {
                    mu: mu.to_vec(),
                    nu: None,
                    sigma: Some(tick.clone()),
                    supervisor: Some(i),
                });
            }
        }
    });
    let verdict = |c, w: Option<Witness>| w.map_or_else(|| Verdict::pass(c), |w| Verdict::fail(c, w));
    vec![
        verdict(Condition::AdmissibleUncontrollable, first),
        verdict(Condition::AdmissibleTick, second),
    ]
}

/// How an engine verdict relates to the bounded oracle's.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    Agree,
    /// The engine's counterexample is longer than the bound, so the oracle
    /// cannot be expected to see it.
    BeyondBound,
    Disagree,
}

pub fn classify(engine: &Verdict, oracle: &Verdict, k: usize) -> Agreement {
    match (engine.holds, oracle.holds) {
        (true, true) | (false, false) => Agreement::Agree,
        (true, false) => Agreement::Disagree,
        (false, true) => {
            let depth = engine.witness.as_ref().map_or(0, Witness::depth);
            if depth > k {
                Agreement::BeyondBound
            } else {
                Agreement::Disagree
            }
        }
    }
}

/// Engine and oracle verdicts on one condition.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionAgreement {
    pub condition: Condition,
    pub engine: bool,
    pub oracle: bool,
    pub agreement: Agreement,
}

/// Agreement of the engine with the oracle on one model.
#[derive(Clone, Debug, Serialize)]
pub struct InstanceAgreement {
    pub conditions: Vec<ConditionAgreement>,
    /// Closed loop under the synthesized supervisors, enumerated from its
    /// automaton and grown from its definition.
    pub closed_loop: Agreement,
    pub comm_states: usize,
}

impl InstanceAgreement {
    pub fn disagreements(&self) -> usize {
        self.conditions
            .iter()
            .filter(|c| c.agreement == Agreement::Disagree)
            .count()
            + usize::from(self.closed_loop == Agreement::Disagree)
    }

    pub fn beyond_bound(&self) -> usize {
        self.conditions
            .iter()
            .filter(|c| c.agreement == Agreement::BeyondBound)
            .count()
    }
}

/// Runs every existence check and the closed-loop construction against the
/// oracle at bound `k`.
pub fn check_agreement(model: &Model, k: usize, opts: BuildOptions) -> Result<InstanceAgreement> {
    let gt = build_comm_automaton(&model.plant, &model.spec, &model.network, opts)?;
    let net = &model.network;
    let conditions = check_all(&gt, net)
        .into_iter()
        .map(|engine| {
            let oracle = brute_check(engine.condition, &gt, net, k);
            ConditionAgreement {
                condition: engine.condition,
                engine: engine.holds,
                oracle: oracle.holds,
                agreement: classify(&engine, &oracle, k),
            }
        })
        .collect();
    let syn = evaluate_synthesis(&gt, net, opts.max_states)?;
    let closed_loop = if enumerate(syn.closed_loop.dfa(), k) == brute_closed_loop(&gt, &syn.supervisors, net, k) {
        Agreement::Agree
    } else {
        Agreement::Disagree
    };
    Ok(InstanceAgreement {
        conditions,
        closed_loop,
        comm_states: gt.num_states(),
    })
}
