use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use netsup::automaton::{is_nonblocking, is_subautomaton, validate_timed_assumptions};
use netsup::comm::{build_comm_automaton, check_proposition1, BuildOptions, CommAutomaton};
use netsup::dot;
use netsup::generate::{random_instance, GenParams};
use netsup::model::{resolve_plant, AutomatonDoc, Model};
use netsup::oracle::{check_agreement, InstanceAgreement};
use netsup::report::{self, SPEC_VERSION};
use netsup::simulate::{render_trace, simulate, trace_json_lines, Termination};
use netsup::synthesis::{closed_loop, solve_dnnscp, synthesize_all, SolveOptions};
use netsup::verify::check_all;
use netsup::Error;

#[derive(Parser)]
#[command(name = "netsup", version, about = "Distributed supervisory control over delayed, lossy channels")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel stages (default: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Upper bound on the states of any constructed automaton.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    max_states: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the plant's timing assumptions and the specification's structure.
    Validate { model: PathBuf },
    /// Write the plant (or another composition of the model's automata) as JSON.
    Compose {
        model: PathBuf,
        /// Composition expression such as `G1 || G2`; defaults to the plant.
        #[arg(long)]
        expr: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the communication automaton and report its size.
    BuildComm {
        model: PathBuf,
        /// Also write it as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decide the existence conditions.
    Check { model: PathBuf },
    /// Write the synthesized supervisors as JSON.
    Synthesize {
        model: PathBuf,
        /// Synthesize even when a condition fails.
        #[arg(long)]
        diagnostic: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Full pipeline: conditions, synthesis, admissibility and closed-loop equality.
    Solve {
        model: PathBuf,
        #[arg(long)]
        diagnostic: bool,
    },
    /// Random runs of the closed loop under the synthesized supervisors.
    Simulate {
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Number of runs (seeds `seed`, `seed+1`, ...); more than one prints a summary.
        #[arg(long, default_value_t = 1)]
        runs: u64,
        #[arg(long)]
        diagnostic: bool,
    },
    /// Graphviz rendering of one of the model's automata.
    ExportDot {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = DotTarget::Comm)]
        what: DotTarget,
        /// 1-based supervisor index for `--what observer`.
        #[arg(long, default_value_t = 1)]
        supervisor: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the decision procedures with brute-force enumeration.
    Oracle {
        /// Check this model instead of random instances.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        instances: u64,
        /// Length bound for enumerated strings.
        #[arg(long, default_value_t = 8)]
        bound: usize,
        /// Directory receiving the model of every disagreeing instance.
        #[arg(long)]
        artifacts: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DotTarget {
    Plant,
    Spec,
    Comm,
    Observer,
    ClosedLoop,
}

/// Whether the command's primary verdict holds.
type Outcome = Result<bool, Error>;

struct Ctx {
    json: bool,
    build: BuildOptions,
}

impl Ctx {
    fn emit(&self, json: Value, text: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(&json).expect("serializable"));
        } else {
            print!("{}", text());
        }
    }

    fn comm(&self, m: &Model) -> Result<CommAutomaton, Error> {
        build_comm_automaton(&m.plant, &m.spec, &m.network, self.build)
    }
}

fn write_or_print(output: Option<&Path>, text: &str) -> Result<(), Error> {
    match output {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Model, Error> {
    Model::from_file(path).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        e => e,
    })
}

fn validate(ctx: &Ctx, path: &Path) -> Outcome {
    let m = load(path)?;
    let timing = validate_timed_assumptions(&m.plant, &m.network);
    let inherited = is_subautomaton(&m.spec, &m.plant);
    let spec_nb = is_nonblocking(&m.spec);
    let plant_nb = is_nonblocking(&m.plant);
    ctx.emit(
        json!({
            "spec_version": SPEC_VERSION,
            "plant": {"name": m.plant.name(), "states": m.plant.num_states(), "nonblocking": plant_nb},
            "spec": {"states": m.spec.num_states(), "marking_inherited": inherited, "nonblocking": spec_nb},
            "supervisors": m.network.n(),
            "timing": report::timing_json(timing.as_ref()),
        }),
        || {
            format!(
                "plant `{}`: {} states, {}\nspecification: {} states, marking {}, {}\nsupervisors: {}\ntiming assumptions: {}\n",
                m.plant.name(),
                m.plant.num_states(),
                if plant_nb { "nonblocking" } else { "blocking" },
                m.spec.num_states(),
                if inherited { "inherited" } else { "overridden" },
                if spec_nb { "nonblocking" } else { "blocking" },
                m.network.n(),
                timing.as_ref().map_or("hold".to_owned(), |v| format!("VIOLATED: {v}"))
            )
        },
    );
    Ok(timing.is_none())
}

fn compose(path: &Path, expr: Option<&str>, output: Option<&Path>) -> Outcome {
    let m = load(path)?;
    let a = match expr {
        Some(e) => resolve_plant(e, &m.automata)?,
        None => m.plant,
    };
    let doc = AutomatonDoc::from_automaton(&a);
    write_or_print(output, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    Ok(true)
}

fn build_comm(ctx: &Ctx, path: &Path, dot_out: Option<&Path>) -> Outcome {
    let m = load(path)?;
    let gt = ctx.comm(&m)?;
    let prop = check_proposition1(&m.plant, &gt);
    if let Some(p) = dot_out {
        fs::write(p, dot::comm_to_dot(&gt))?;
    }
    let witness = prop
        .witness
        .as_ref()
        .map(|w| w.iter().map(|e| e.name().to_owned()).collect::<Vec<_>>());
    ctx.emit(
        json!({
            "spec_version": SPEC_VERSION,
            "states": gt.num_states(),
            "transitions": gt.num_transitions(),
            "spec_states": gt.num_spec_states(),
            "projection": {"holds": prop.holds, "states": prop.projection_states, "witness": witness},
        }),
        || {
            format!(
                "states: {}\ntransitions: {}\nspecification states: {}\nprojection onto plant events equals the plant language: {}\n",
                gt.num_states(),
                gt.num_transitions(),
                gt.num_spec_states(),
                if prop.holds { "yes" } else { "NO" }
            )
        },
    );
    Ok(prop.holds)
}

fn check(ctx: &Ctx, path: &Path) -> Outcome {
    let m = load(path)?;
    let gt = ctx.comm(&m)?;
    let verdicts = check_all(&gt, &m.network);
    let holds = verdicts.iter().all(|v| v.holds);
    ctx.emit(
        json!({
            "spec_version": SPEC_VERSION,
            "holds": holds,
            "verdicts": verdicts.iter().map(report::verdict_json).collect::<Vec<_>>(),
        }),
        || verdicts.iter().map(|v| report::verdict_text(v) + "\n").collect(),
    );
    Ok(holds)
}

fn synthesize(ctx: &Ctx, path: &Path, diagnostic: bool, output: Option<&Path>) -> Outcome {
    let m = load(path)?;
    let opts = SolveOptions {
        build: ctx.build,
        diagnostic,
    };
    let r = solve_dnnscp(&m.plant, &m.spec, &m.network, opts)?;
    let Some(syn) = &r.synthesis else {
        eprint!("{}", report::solve_text(&r));
        return Ok(false);
    };
    let doc = json!({
        "spec_version": SPEC_VERSION,
        "solvable": r.solvable,
        "supervisors": syn.supervisors.iter().map(report::supervisor_json).collect::<Vec<_>>(),
    });
    write_or_print(output, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    Ok(r.solvable)
}

fn solve(ctx: &Ctx, path: &Path, diagnostic: bool) -> Outcome {
    let m = load(path)?;
    let opts = SolveOptions {
        build: ctx.build,
        diagnostic,
    };
    let r = solve_dnnscp(&m.plant, &m.spec, &m.network, opts)?;
    ctx.emit(report::solve_json(&r), || report::solve_text(&r));
    Ok(r.solvable)
}

fn simulate_cmd(ctx: &Ctx, path: &Path, seed: u64, steps: usize, runs: u64, diagnostic: bool) -> Outcome {
    let m = load(path)?;
    let opts = SolveOptions {
        build: ctx.build,
        diagnostic,
    };
    let r = solve_dnnscp(&m.plant, &m.spec, &m.network, opts)?;
    let Some(syn) = &r.synthesis else {
        eprint!("{}", report::solve_text(&r));
        eprintln!("no supervisors to simulate; pass --diagnostic to simulate anyway");
        return Ok(false);
    };
    let gt = &r.comm;
    let traces: Vec<_> = (seed..seed + runs)
        .into_par_iter()
        .map(|s| simulate(gt, &syn.supervisors, &m.network, s, steps))
        .collect();
    let outside = |t: &netsup::simulate::Trace| t.states().filter(|&x| !gt.spec_flag(x)).count();
    let total_outside: usize = traces.iter().map(outside).sum();
    if runs == 1 {
        let t = &traces[0];
        if ctx.json {
            print!("{}", trace_json_lines(gt, t));
        } else {
            print!("{}", render_trace(gt, t));
        }
    } else {
        let count = |k: Termination| traces.iter().filter(|t| t.terminated == k).count();
        ctx.emit(
            json!({
                "spec_version": SPEC_VERSION,
                "runs": runs,
                "steps": steps,
                "outside_spec_visits": total_outside,
                "step_limit": count(Termination::StepLimit),
                "deadlock_marked": count(Termination::DeadlockMarked),
                "deadlock_unmarked": count(Termination::DeadlockUnmarked),
            }),
            || {
                format!(
                    "runs: {runs} x {steps} steps\nvisits outside the specification: {total_outside}\nterminations: {} step-limit, {} deadlock-marked, {} deadlock-unmarked\n",
                    count(Termination::StepLimit),
                    count(Termination::DeadlockMarked),
                    count(Termination::DeadlockUnmarked)
                )
            },
        );
    }
    Ok(total_outside == 0)
}

fn export_dot(ctx: &Ctx, path: &Path, what: DotTarget, supervisor: usize, output: Option<&Path>) -> Outcome {
    let m = load(path)?;
    let text = match what {
        DotTarget::Plant => dot::automaton_to_dot(&m.plant),
        DotTarget::Spec => dot::automaton_to_dot(&m.spec),
        DotTarget::Comm => dot::comm_to_dot(&ctx.comm(&m)?),
        DotTarget::Observer | DotTarget::ClosedLoop => {
            let gt = ctx.comm(&m)?;
            let gamma = synthesize_all(&gt, &m.network, ctx.build.max_states)?;
            if what == DotTarget::Observer {
                let s = gamma.get(supervisor.wrapping_sub(1)).ok_or_else(|| {
                    Error::Schema(format!("supervisor {supervisor} does not exist (1..={})", gamma.len()))
                })?;
                dot::supervisor_to_dot(s)
            } else {
                let cl = closed_loop(&gt, &gamma, &m.network, ctx.build.max_states)?;
                dot::closed_loop_to_dot(&cl, &gt)
            }
        }
    };
    write_or_print(output, &text)?;
    Ok(true)
}

fn agreement_json(seed: Option<u64>, a: &InstanceAgreement) -> Value {
    json!({
        "seed": seed,
        "comm_states": a.comm_states,
        "conditions": a.conditions,
        "closed_loop": a.closed_loop,
    })
}

fn oracle(ctx: &Ctx, model: Option<&Path>, seed: u64, instances: u64, bound: usize, artifacts: Option<&Path>) -> Outcome {
    if let Some(path) = model {
        let m = load(path)?;
        let a = check_agreement(&m, bound, ctx.build)?;
        let ok = a.disagreements() == 0;
        ctx.emit(
            json!({"spec_version": SPEC_VERSION, "bound": bound, "result": agreement_json(None, &a)}),
            || {
                let mut out: String = a
                    .conditions
                    .iter()
                    .map(|c| format!("{:<24} engine {:<5} oracle {:<5} {:?}\n", format!("{:?}", c.condition), c.engine, c.oracle, c.agreement))
                    .collect();
                out += &format!("closed loop: {:?}\n", a.closed_loop);
                out
            },
        );
        return Ok(ok);
    }
    let params = GenParams::default();
    let results: Vec<(u64, Result<InstanceAgreement, Error>)> = (seed..seed + instances)
        .into_par_iter()
        .map(|s| {
            let inst = random_instance(s, &params);
            (s, check_agreement(&inst.model, bound, ctx.build))
        })
        .collect();
    let mut disagreeing = Vec::new();
    let mut beyond = 0;
    let mut holding = 0;
    for (s, r) in &results {
        let a = match r {
            Ok(a) => a,
            Err(e) => return Err(Error::Model(format!("instance {s}: {e}"))),
        };
        beyond += a.beyond_bound();
        if a.conditions.iter().all(|c| c.engine) {
            holding += 1;
        }
        if a.disagreements() > 0 {
            disagreeing.push((*s, a));
        }
    }
    if let Some(dir) = artifacts {
        fs::create_dir_all(dir)?;
        for (s, _) in &disagreeing {
            let doc = random_instance(*s, &params).doc;
            fs::write(dir.join(format!("instance-{s}.json")), doc.to_json())?;
        }
    }
    ctx.emit(
        json!({
            "spec_version": SPEC_VERSION,
            "bound": bound,
            "instances": instances,
            "first_seed": seed,
            "all_conditions_hold": holding,
            "beyond_bound": beyond,
            "disagreements": disagreeing.len(),
            "failures": disagreeing.iter().map(|(s, a)| agreement_json(Some(*s), a)).collect::<Vec<_>>(),
        }),
        || {
            let mut out = format!(
                "instances: {instances} (seeds {seed}..{}), bound {bound}\nall conditions hold on {holding}\nengine witnesses beyond the bound: {beyond}\ndisagreements: {}\n",
                seed + instances,
                disagreeing.len()
            );
            for (s, _) in &disagreeing {
                out += &format!("  seed {s}\n");
            }
            out
        },
    );
    Ok(disagreeing.is_empty())
}

fn run(cli: Cli) -> Outcome {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Error::Model(e.to_string()))?;
    }
    let ctx = Ctx {
        json: cli.json,
        build: BuildOptions {
            max_states: cli.max_states,
            ..BuildOptions::default()
        },
    };
    match cli.command {
        Command::Validate { model } => validate(&ctx, &model),
        Command::Compose { model, expr, output } => compose(&model, expr.as_deref(), output.as_deref()),
        Command::BuildComm { model, dot } => build_comm(&ctx, &model, dot.as_deref()),
        Command::Check { model } => check(&ctx, &model),
        Command::Synthesize { model, diagnostic, output } => synthesize(&ctx, &model, diagnostic, output.as_deref()),
        Command::Solve { model, diagnostic } => solve(&ctx, &model, diagnostic),
        Command::Simulate { model, seed, steps, runs, diagnostic } => simulate_cmd(&ctx, &model, seed, steps, runs.max(1), diagnostic),
        Command::ExportDot { model, what, supervisor, output } => export_dot(&ctx, &model, what, supervisor, output.as_deref()),
        Command::Oracle { model, seed, instances, bound, artifacts } => {
            oracle(&ctx, model.as_deref(), seed, instances, bound, artifacts.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            if json {
                eprintln!("{}", json!({"spec_version": SPEC_VERSION, "error": {"kind": e.kind(), "message": e.to_string()}}));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(2)
        }
    }
}
