//! Brute-force exact solvers.
//!
//! Everything here enumerates; nothing is clever. The searches are ordered
//! so that the first feasible hit is optimal and ties break towards the
//! smallest solution in size-then-lexicographic order. A node budget (one
//! node per feasibility check) turns accidental blowups into
//! [`Error::Resource`] instead of hangs.

mod sources;
mod strictness;

use std::collections::BTreeSet;

use crate::approx::ApproxAlgorithm;
use crate::control::{is_feasible, Action, Budget, ControlInstance, ControlSolution, Measure};
use crate::election::{CandidateId, Partition};
use crate::error::{Error, Result};

pub use sources::{exists_x3c, find_x3c, opt_hitting_set, opt_mku, opt_msc};
pub use strictness::{
    check_decision_equivalence, verify_strictness, verify_strictness_with, DecisionReport,
    StrictnessReport, Violation,
};

/// Default cap on feasibility checks per oracle call.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

pub(crate) struct Nodes {
    used: u64,
    limit: u64,
}

impl Nodes {
    pub(crate) fn new(limit: u64) -> Self {
        Nodes { used: 0, limit }
    }

    pub(crate) fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::Resource(format!("node budget of {} exhausted", self.limit)));
        }
        Ok(())
    }

    pub(crate) fn used(&self) -> u64 {
        self.used
    }
}

/// Calls `f` on every `s`-subset of `0..n` in lexicographic order until it returns `true`.
pub(crate) fn combinations(
    n: usize,
    s: usize,
    mut f: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<bool> {
    if s > n {
        return Ok(false);
    }
    let mut idx: Vec<usize> = (0..s).collect();
    loop {
        if f(&idx)? {
            return Ok(true);
        }
        let Some(i) = (0..s).rev().find(|&i| idx[i] < n - s + i) else {
            return Ok(false);
        };
        idx[i] += 1;
        for j in i + 1..s {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptResult {
    pub solution: Option<ControlSolution>,
    pub measure: Measure,
    pub nodes_explored: u64,
}

/// What an add/delete solution chooses from.
enum Atoms {
    Candidates(Vec<CandidateId>),
    Voters(usize),
}

impl Atoms {
    fn of(inst: &ControlInstance) -> Option<Atoms> {
        Some(match inst.spec().action {
            Action::AddCandidates => {
                Atoms::Candidates(inst.spoilers().into_iter().flatten().cloned().collect())
            }
            Action::DeleteCandidates => Atoms::Candidates(
                inst.registered()
                    .into_iter()
                    .filter(|c| c != inst.p())
                    .collect(),
            ),
            Action::AddVoters => Atoms::Voters(inst.unregistered().len()),
            Action::DeleteVoters => Atoms::Voters(inst.election().voters().len()),
            _ => return None,
        })
    }

    fn len(&self) -> usize {
        match self {
            Atoms::Candidates(c) => c.len(),
            Atoms::Voters(n) => *n,
        }
    }

    fn solution(&self, action: Action, chosen: &[usize]) -> ControlSolution {
        match self {
            Atoms::Candidates(c) => {
                let set: BTreeSet<CandidateId> = chosen.iter().map(|&i| c[i].clone()).collect();
                match action {
                    Action::AddCandidates => ControlSolution::AddCandidates(set),
                    _ => ControlSolution::DeleteCandidates(set),
                }
            }
            Atoms::Voters(_) => {
                let set: BTreeSet<usize> = chosen.iter().copied().collect();
                match action {
                    Action::AddVoters => ControlSolution::AddVoters(set),
                    _ => ControlSolution::DeleteVoters(set),
                }
            }
        }
    }
}

/// Exact optimum with the default node budget.
pub fn opt_control(inst: &ControlInstance, size_limit: usize) -> Result<OptResult> {
    opt_control_with_budget(inst, size_limit, DEFAULT_NODE_BUDGET)
}

/// Exact optimum of a control instance.
///
/// Add/delete actions try every subset of at most `size_limit` objects (and
/// never more than a limited budget allows); partition actions try every
/// two-way partition, most balanced first, and ignore `size_limit`.
pub fn opt_control_with_budget(
    inst: &ControlInstance,
    size_limit: usize,
    node_budget: u64,
) -> Result<OptResult> {
    let mut nodes = Nodes::new(node_budget);
    let mut found = None;
    let action = inst.spec().action;
    if let Some(atoms) = Atoms::of(inst) {
        let mut limit = size_limit.min(atoms.len());
        if let Budget::Limited(k) = inst.spec().budget {
            limit = limit.min(usize::try_from(k).unwrap_or(usize::MAX));
        }
        for s in 0..=limit {
            let hit = combinations(atoms.len(), s, |chosen| {
                nodes.tick()?;
                let sol = atoms.solution(action, chosen);
                if is_feasible(inst, &sol)? {
                    found = Some(sol);
                    return Ok(true);
                }
                Ok(false)
            })?;
            if hit {
                break;
            }
        }
    } else {
        found = best_partition(inst, &mut nodes)?;
    }
    let measure = match &found {
        Some(sol) => crate::control::measure(inst, sol),
        None => Measure::Infinite,
    };
    Ok(OptResult {
        solution: found,
        measure,
        nodes_explored: nodes.used(),
    })
}

fn best_partition(inst: &ControlInstance, nodes: &mut Nodes) -> Result<Option<ControlSolution>> {
    let e = inst.election();
    let candidates = e.candidate_vec();
    let n = if inst.spec().action == Action::PartitionVoters {
        e.voters().len()
    } else {
        candidates.len()
    };
    let mut sizes: Vec<usize> = (0..=n).collect();
    sizes.sort_by_key(|&s| ((2 * s).abs_diff(n), s));
    let mut found = None;
    for s in sizes {
        let hit = combinations(n, s, |first| {
            nodes.tick()?;
            let rest = (0..n).filter(|i| first.binary_search(i).is_err());
            let part = if inst.spec().action == Action::PartitionVoters {
                Partition::Voters(first.to_vec(), rest.collect())
            } else {
                Partition::Candidates(
                    first.iter().map(|&i| candidates[i].clone()).collect(),
                    rest.map(|i| candidates[i].clone()).collect(),
                )
            };
            let sol = ControlSolution::Partition(part);
            if is_feasible(inst, &sol)? {
                found = Some(sol);
                return Ok(true);
            }
            Ok(false)
        })?;
        if hit {
            break;
        }
    }
    Ok(found)
}

/// Every feasible add/delete solution with at most `size_limit` objects, in
/// size-then-lexicographic order.
pub fn feasible_solutions(
    inst: &ControlInstance,
    size_limit: usize,
    node_budget: u64,
) -> Result<Vec<ControlSolution>> {
    let atoms = Atoms::of(inst).ok_or_else(|| {
        crate::error::domain("only add/delete actions can be listed exhaustively")
    })?;
    let mut nodes = Nodes::new(node_budget);
    let mut out = Vec::new();
    let action = inst.spec().action;
    for s in 0..=size_limit.min(atoms.len()) {
        combinations(atoms.len(), s, |chosen| {
            nodes.tick()?;
            let sol = atoms.solution(action, chosen);
            if is_feasible(inst, &sol)? {
                out.push(sol);
            }
            Ok(false)
        })?;
    }
    Ok(out)
}

/// Answers the decision question with an approximation algorithm: yes iff it
/// returns a feasible solution.
pub fn decide_via_approx(inst: &ControlInstance, algorithm: ApproxAlgorithm) -> Result<bool> {
    match algorithm.run(inst) {
        Ok(r) => is_feasible(inst, &r.solution),
        Err(Error::NoSolution) => Ok(false),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{ControlSpec, Goal, Pool};
    use crate::election::{candidate_set, Ballot, Election, Rule, TieRule, Voter};
    use crate::reductions::{mku_to_plurality_ccdc, MkuInstance};

    fn rank(s: &str) -> Voter {
        Voter::unit(Ballot::ranking(s.split('>')).unwrap())
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        combinations(4, 2, |c| {
            seen.push(c.to_vec());
            Ok(false)
        })
        .unwrap();
        assert_eq!(
            seen,
            [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]].map(|a| a.to_vec()).to_vec()
        );
        let mut count = 0;
        combinations(3, 0, |c| {
            assert!(c.is_empty());
            count += 1;
            Ok(false)
        })
        .unwrap();
        assert_eq!(count, 1);
        assert!(!combinations(2, 3, |_| Ok(true)).unwrap());
    }

    #[test]
    fn already_winning_costs_one() {
        let e = Election::new(candidate_set(["p", "a"]), vec![rank("p>a")]).unwrap();
        let spec = ControlSpec::constructive(Rule::Plurality, Action::DeleteCandidates);
        let inst = ControlInstance::new(spec, e, Pool::None, "p".into()).unwrap();
        let r = opt_control(&inst, 5).unwrap();
        assert_eq!(r.measure, Measure::Finite(1));
        assert_eq!(r.solution, Some(ControlSolution::DeleteCandidates(BTreeSet::new())));
        assert_eq!(r.nodes_explored, 1);
    }

    #[test]
    fn mku_gadget_optimum() {
        let src = MkuInstance::new(vec!["u1".into(), "u2".into()], vec![vec![0], vec![1]], 2)
            .unwrap();
        let art = mku_to_plurality_ccdc(&src).unwrap();
        let r = opt_control(&art.instance, 9).unwrap();
        assert_eq!(r.measure, Measure::Finite(3));
        assert_eq!(
            r.solution,
            Some(ControlSolution::DeleteCandidates(candidate_set(["u1", "u2"])))
        );
    }

    #[test]
    fn partition_of_two_voters() {
        let spec = ControlSpec::new(
            Rule::Plurality,
            Action::PartitionVoters,
            Goal::Constructive,
            Budget::Unlimited,
            Some(TieRule::TiesEliminate),
        )
        .unwrap();
        // p and a split the vote, so every split either eliminates both or
        // ends in a tied final.
        let e = Election::new(candidate_set(["p", "a"]), vec![rank("p>a"), rank("a>p")]).unwrap();
        let inst = ControlInstance::new(spec, e, Pool::None, "p".into()).unwrap();
        let r = opt_control(&inst, 0).unwrap();
        assert_eq!(r.solution, None);
        assert_eq!(r.measure, Measure::Infinite);
        assert_eq!(r.nodes_explored, 4);

        let e = Election::new(candidate_set(["p", "a"]), vec![rank("p>a"), rank("p>a")]).unwrap();
        let inst = ControlInstance::new(spec, e, Pool::None, "p".into()).unwrap();
        let r = opt_control(&inst, 0).unwrap();
        assert_eq!(r.measure, Measure::Finite(1));
        assert_eq!(
            r.solution,
            Some(ControlSolution::Partition(Partition::Voters(vec![0], vec![1])))
        );
    }

    #[test]
    fn node_budget_is_enforced() {
        let e = Election::new(
            candidate_set(["p", "a", "b"]),
            vec![rank("a>b>p"), rank("b>a>p")],
        )
        .unwrap();
        let spec = ControlSpec::constructive(Rule::Plurality, Action::DeleteCandidates);
        let inst = ControlInstance::new(spec, e, Pool::None, "p".into()).unwrap();
        assert!(matches!(
            opt_control_with_budget(&inst, 2, 2),
            Err(Error::Resource(_))
        ));
        assert_eq!(opt_control_with_budget(&inst, 2, 4).unwrap().measure, Measure::Finite(3));
    }

    #[test]
    fn decide_via_approx_examples() {
        let pc = candidate_set(["p", "c"]);
        let approve = |a: &[&str]| {
            Voter::unit(Ballot::approval(pc.clone(), candidate_set(a)).unwrap())
        };
        let e = Election::new(pc.clone(), vec![approve(&["c"])]).unwrap();
        let spec = ControlSpec::constructive(Rule::Approval, Action::AddVoters);
        let yes = ControlInstance::new(
            spec,
            e.clone(),
            Pool::Unregistered(vec![approve(&["p"]), approve(&["p"])]),
            "p".into(),
        )
        .unwrap();
        assert!(decide_via_approx(&yes, ApproxAlgorithm::CipAddVoters).unwrap());
        let no = ControlInstance::new(spec, e, Pool::Unregistered(vec![approve(&["p"])]), "p".into())
            .unwrap();
        assert!(!decide_via_approx(&no, ApproxAlgorithm::CipAddVoters).unwrap());
        assert_eq!(opt_control(&no, 1).unwrap().solution, None);
    }
}
