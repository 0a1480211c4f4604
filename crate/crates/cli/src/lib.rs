//! `ctrlapx`: solve, reduce, verify and generate election-control instances.
//!
//! Exit codes are the same for every command: 0 for a solution, a yes
//! answer or a passing check; 2 for no solution, a no answer or a failing
//! check; 1 for errors.

pub mod doc;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use control_approx::approx::ApproxAlgorithm;
use control_approx::control::{is_feasible, Action, ControlInstance, ControlSolution, ControlSpec, Goal};
use control_approx::election::{two_stage_winners, Rule};
use control_approx::gen;
use control_approx::oracles::{
    check_decision_equivalence, find_x3c, opt_control_with_budget, opt_hitting_set, opt_mku,
    opt_msc, verify_strictness, DEFAULT_NODE_BUDGET,
};
use control_approx::reductions::{map_back, reduce, ReductionKind, SourceInstance};
use control_approx::Error;
use rand::Rng;
use serde::Serialize;

use doc::{
    to_json, Instance, OptDocument, SidecarDocument, SolutionDocument, SourceSolutionDocument,
    SCHEMA_VERSION,
};

#[derive(Parser, Debug)]
#[command(name = "ctrlapx", version, about = "Approximation and reductions for election control")]
pub struct Cli {
    /// Node budget for exhaustive searches.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Greedy covering program for approval CCAV/CCDV.
    CipGreedy,
    /// Delete every candidate but p (any voiced rule).
    VoicedCcdc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Msc,
    Mku,
    HittingSet,
    X3c,
    ElectionControl,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run an approximation algorithm on an election-control instance.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
        /// Expected problem, e.g. approval-ccav; checked against the instance.
        #[arg(long)]
        problem: Option<String>,
    },
    /// Solve an instance exactly by exhaustive search.
    Oracle {
        instance: PathBuf,
        /// Largest add/delete solution to consider.
        #[arg(long)]
        size_limit: Option<usize>,
    },
    /// Apply a reduction; prints the target instance and writes a provenance sidecar.
    Reduce {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        source: PathBuf,
        /// Where to write the sidecar (default: next to the source).
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Map a target solution back to the source problem.
    Mapback {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        sidecar: PathBuf,
        solution: PathBuf,
    },
    /// Check a reduction on seeded random source instances.
    Verify {
        #[arg(long)]
        reduction: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_elements: usize,
        #[arg(long, default_value_t = 4)]
        max_sets: usize,
    },
    /// Print a seeded random instance.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        universe: usize,
        #[arg(long, default_value_t = 4)]
        sets: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Plant an exact cover (x3c).
        #[arg(long)]
        plant: bool,
        #[arg(long, default_value = "approval")]
        rule: String,
        /// Control action code: AC, DC, AV, DV.
        #[arg(long, default_value = "AV")]
        action: String,
        #[arg(long, default_value_t = 3)]
        candidates: usize,
        #[arg(long, default_value_t = 4)]
        voters: usize,
        /// Pool size: spoilers for AC, unregistered voters for AV.
        #[arg(long, default_value_t = 2)]
        extra: usize,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        weights: Vec<u64>,
    },
    /// Winners of the two-stage election given by a partition solution.
    EvalPartition { instance: PathBuf, partition: PathBuf },
}

/// What a command prints and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, stderr: String::new(), code: 0 }
    }

    fn no(stdout: String, why: impl Into<String>) -> Self {
        Outcome { stdout, stderr: why.into(), code: 2 }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> Result<Instance> {
    Instance::parse(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_control(path: &Path) -> Result<ControlInstance> {
    match load(path)? {
        Instance::Control(i) => Ok(i),
        other => bail!("{} holds a {} instance, expected election-control", path.display(), other.kind()),
    }
}

fn load_source(path: &Path) -> Result<SourceInstance> {
    match load(path)? {
        Instance::Source(s) => Ok(s),
        Instance::Control(_) => bail!("{} holds an election-control instance, expected a source problem", path.display()),
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let budget = cli.node_budget;
    match cli.command {
        Command::Solve { instance, algo, problem } => solve(&load_control(&instance)?, algo, problem.as_deref()),
        Command::Oracle { instance, size_limit } => oracle(&load(&instance)?, size_limit, budget),
        Command::Reduce { from, to, source, sidecar } => {
            let kind = ReductionKind::from_pair(&from, &to)
                .ok_or_else(|| anyhow!("no reduction from {from} to {to}"))?;
            let path = sidecar.unwrap_or_else(|| default_sidecar(&source, kind));
            let (out, side) = reduce_cmd(&load_source(&source)?, kind)?;
            fs::write(&path, side).with_context(|| format!("cannot write {}", path.display()))?;
            Ok(Outcome { stderr: format!("provenance written to {}", path.display()), ..Outcome::ok(out) })
        }
        Command::Mapback { source, instance, sidecar, solution } => mapback(
            &load_source(&source)?,
            load_control(&instance)?,
            &SidecarDocument::parse(&read(&sidecar)?)?,
            &SolutionDocument::parse(&read(&solution)?)?,
        ),
        Command::Verify { reduction, trials, seed, max_elements, max_sets } => {
            verify(reduction.parse()?, trials, seed, max_elements, max_sets)
        }
        Command::Gen { kind, seed, universe, sets, k, plant, rule, action, candidates, voters, extra, weights } => {
            let inst = match kind {
                GenKind::ElectionControl => {
                    let rule = parse_rule(&rule)?;
                    let action = parse_action(&action)?;
                    ensure!(!action.is_partition(), "gen supports AC, DC, AV and DV");
                    let spec = ControlSpec::constructive(rule, action);
                    Instance::Control(gen::control_instance(&mut gen::rng(seed), spec, candidates, voters, extra, &weights)?)
                }
                _ => Instance::Source(gen_source(kind, seed, universe, sets, k, plant)?),
            };
            Ok(Outcome::ok(inst.render()?))
        }
        Command::EvalPartition { instance, partition } => {
            eval_partition(&load_control(&instance)?, &SolutionDocument::parse(&read(&partition)?)?)
        }
    }
}

fn default_sidecar(source: &Path, kind: ReductionKind) -> PathBuf {
    let stem = source.file_stem().and_then(|s| s.to_str()).unwrap_or("source");
    source.with_file_name(format!("{stem}.{}.provenance.json", kind.id()))
}

fn parse_rule(s: &str) -> Result<Rule> {
    Rule::ALL
        .into_iter()
        .find(|r| r.name() == s.to_ascii_lowercase())
        .ok_or_else(|| anyhow!("unknown rule {s:?}"))
}

fn parse_action(s: &str) -> Result<Action> {
    Action::ALL
        .into_iter()
        .find(|a| a.code().eq_ignore_ascii_case(s))
        .ok_or_else(|| anyhow!("unknown action {s:?}"))
}

/// Parses names like `approval-ccav`, `plurality-DCUDC` or `condorcet-ccpv-te`.
/// Returns the rule, goal, action and whether `U` (unlimited) was spelled out.
pub fn parse_problem(name: &str) -> Result<(Rule, Goal, Action, bool)> {
    let lower = name.to_ascii_lowercase();
    let mut parts = lower.splitn(2, '-');
    let rule = parse_rule(parts.next().unwrap_or_default())?;
    let rest = parts.next().ok_or_else(|| anyhow!("problem {name:?} lacks a control type"))?;
    let rest = rest.split('-').next().unwrap_or_default();
    let (goal, rest) = if let Some(r) = rest.strip_prefix("cc") {
        (Goal::Constructive, r)
    } else if let Some(r) = rest.strip_prefix("dc") {
        (Goal::Destructive, r)
    } else {
        bail!("problem {name:?} must name cc or dc control");
    };
    let (unlimited, code) = match rest.strip_prefix('u') {
        Some(r) if parse_action(r).is_ok() => (true, r),
        _ => (false, rest),
    };
    Ok((rule, goal, parse_action(code)?, unlimited))
}

fn check_problem(inst: &ControlInstance, name: &str) -> Result<()> {
    let (rule, goal, action, _) = parse_problem(name)?;
    // Re-validating the ballots under the requested rule reports ballot-kind
    // mismatches before anything else.
    inst.with_spec(ControlSpec { rule, ..*inst.spec() })?;
    let spec = inst.spec();
    ensure!(
        (spec.rule, spec.goal, spec.action) == (rule, goal, action),
        "instance is {}, not {name}",
        spec.name()
    );
    Ok(())
}

fn solve(inst: &ControlInstance, algo: Algo, problem: Option<&str>) -> Result<Outcome> {
    if let Some(name) = problem {
        check_problem(inst, name)?;
    }
    let handle = ApproxAlgorithm::for_instance(inst)
        .filter(|a| match algo {
            Algo::CipGreedy => matches!(a, ApproxAlgorithm::CipAddVoters | ApproxAlgorithm::CipDeleteVoters),
            Algo::VoicedCcdc => *a == ApproxAlgorithm::VoicedDeleteCandidates,
        })
        .ok_or_else(|| anyhow!("{algo:?} does not apply to {}", inst.spec().name()))?;
    match handle.run(inst) {
        Ok(r) => Ok(Outcome::ok(to_json(&SolutionDocument::from_solution(inst, &r.solution))?)),
        Err(Error::NoSolution) => Ok(Outcome::no(String::new(), "no solution")),
        Err(e) => Err(e.into()),
    }
}

fn oracle(inst: &Instance, size_limit: Option<usize>, budget: u64) -> Result<Outcome> {
    match inst {
        Instance::Control(i) => {
            let r = opt_control_with_budget(i, size_limit.unwrap_or(usize::MAX), budget)?;
            let doc = OptDocument {
                schema_version: SCHEMA_VERSION,
                kind: "opt-result".to_string(),
                problem: i.spec().name(),
                measure: r.measure.value(),
                nodes_explored: r.nodes_explored,
                solution: r.solution.as_ref().map(|s| SolutionDocument::from_solution(i, s)),
            };
            let out = to_json(&doc)?;
            Ok(if r.solution.is_some() { Outcome::ok(out) } else { Outcome::no(out, "no solution") })
        }
        Instance::Source(src) => {
            let choice = match src {
                SourceInstance::Msc(s) => Some(opt_msc(s)?),
                SourceInstance::Mku(s) => Some(opt_mku(s)?),
                SourceInstance::HittingSet(s) => opt_hitting_set(s)?.filter(|h| h.len() <= s.k()),
                SourceInstance::X3c(s) => find_x3c(s)?,
            };
            match choice {
                Some(c) => Ok(Outcome::ok(to_json(&SourceSolutionDocument::new(src, &c)?)?)),
                None => Ok(Outcome::no(String::new(), "no")),
            }
        }
    }
}

/// Target instance document and sidecar document.
pub fn reduce_cmd(src: &SourceInstance, kind: ReductionKind) -> Result<(String, String)> {
    let art = match reduce(kind, src) {
        Err(Error::Precondition(why)) => bail!("{why} (hint: use oracle on the source instance)"),
        other => other?,
    };
    let out = Instance::Control(art.instance.clone()).render()?;
    Ok((out, to_json(&SidecarDocument::from_artifact(&art))?))
}

fn mapback(
    src: &SourceInstance,
    target: ControlInstance,
    sidecar: &SidecarDocument,
    sol: &SolutionDocument,
) -> Result<Outcome> {
    let art = sidecar.artifact(target)?;
    let y = sol.resolve(&art.instance)?;
    ensure!(is_feasible(&art.instance, &y)?, "the target solution is not feasible");
    let x = map_back(src, &art, &y)?;
    Ok(Outcome::ok(to_json(&SourceSolutionDocument::new(src, &x)?)?))
}

fn gen_source(kind: GenKind, seed: u64, universe: usize, sets: usize, k: usize, plant: bool) -> Result<SourceInstance> {
    let mut r = gen::rng(seed);
    Ok(match kind {
        GenKind::Msc => SourceInstance::Msc(gen::msc(&mut r, universe, sets)?),
        GenKind::Mku => SourceInstance::Mku(gen::mku(&mut r, universe, sets, k)?),
        GenKind::HittingSet => SourceInstance::HittingSet(gen::hitting_set(&mut r, universe, sets, k)?),
        GenKind::X3c => SourceInstance::X3c(gen::x3c(&mut r, k, sets, plant)?),
        GenKind::ElectionControl => unreachable!("handled by the caller"),
    })
}

#[derive(Serialize)]
struct VerifySummary {
    schema_version: u32,
    kind: &'static str,
    reduction: String,
    check: &'static str,
    trials: usize,
    seed: u64,
    passed: usize,
    failed: usize,
    failing_trials: Vec<usize>,
}

/// Random source instance for trial checks of `kind`.
fn trial_source<R: Rng>(r: &mut R, kind: ReductionKind, max_elements: usize, max_sets: usize) -> Result<SourceInstance> {
    ensure!(max_elements >= 1 && max_sets >= 1, "size bounds must be positive");
    let n = r.gen_range(1..=max_elements);
    let m = r.gen_range(1..=max_sets);
    Ok(match kind {
        ReductionKind::MscCcav | ReductionKind::MscCcdv => SourceInstance::Msc(gen::msc(r, n, m)?),
        ReductionKind::MkuCcdc => {
            let m = m.max(2);
            let k = r.gen_range(2..=m);
            SourceInstance::Mku(gen::mku(r, n, m, k)?)
        }
        ReductionKind::HsPluralityDcudc | ReductionKind::HsCondorcetCcudv => {
            let k = r.gen_range(1..=n.min(m));
            SourceInstance::HittingSet(gen::hitting_set(r, n, m, k)?)
        }
        ReductionKind::X3cCondorcetCcuav => {
            let sets = r.gen_range(3..=max_sets.max(3));
            let plant = r.gen_bool(0.5);
            SourceInstance::X3c(gen::x3c(r, 3, sets, plant)?)
        }
    })
}

fn verify(kind: ReductionKind, trials: usize, seed: u64, max_elements: usize, max_sets: usize) -> Result<Outcome> {
    let mut r = gen::rng(seed);
    let mut failing = Vec::new();
    let mut text = String::new();
    for t in 0..trials {
        let src = trial_source(&mut r, kind, max_elements, max_sets)?;
        let ok = if kind.is_strict() {
            let rep = verify_strictness(kind, &src, usize::MAX)?;
            rep.holds() && rep.opts_agree() && rep.extraction_failures == 0
        } else {
            check_decision_equivalence(kind, &src)?.agrees()
        };
        if !ok {
            text.push_str(&format!("trial {t}: FAIL\n"));
            failing.push(t);
        }
    }
    let check = if kind.is_strict() { "strictness" } else { "decision-equivalence" };
    let passed = trials - failing.len();
    text.push_str(&format!("{kind} ({check}): {passed}/{trials} pass\n"));
    let summary = VerifySummary {
        schema_version: SCHEMA_VERSION,
        kind: "verify-summary",
        reduction: kind.id().to_string(),
        check,
        trials,
        seed,
        passed,
        failed: failing.len(),
        failing_trials: failing,
    };
    text.push_str(&serde_json::to_string(&summary)?);
    text.push('\n');
    Ok(if summary.failed == 0 { Outcome::ok(text) } else { Outcome::no(text, "violations found") })
}

#[derive(Serialize)]
struct WinnersDocument {
    schema_version: u32,
    kind: &'static str,
    winners: Vec<String>,
    p_wins: bool,
}

fn eval_partition(inst: &ControlInstance, part: &SolutionDocument) -> Result<Outcome> {
    let spec = inst.spec();
    let (Some(kind), Some(tie)) = (spec.action.partition_kind(), spec.tie_rule) else {
        bail!("{} is not a partition problem", spec.name());
    };
    let ControlSolution::Partition(p) = part.resolve(inst)? else {
        bail!("expected a partition");
    };
    let winners = two_stage_winners(spec.rule, inst.election(), kind, tie, &p)?;
    let doc = WinnersDocument {
        schema_version: SCHEMA_VERSION,
        kind: "winners",
        p_wins: winners.len() == 1 && winners.contains(inst.p()),
        winners: winners.iter().map(|c| c.to_string()).collect(),
    };
    Ok(Outcome::ok(to_json(&doc)?))
}
