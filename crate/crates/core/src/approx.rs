//! Approximation algorithms.
//!
//! Approval voter control (adding or deleting voters, weighted or not) is
//! encoded as a covering integer program: one row per candidate that
//! currently matches or beats `p`, demanding `Δ_c + 1` units of coverage,
//! one binary unit-cost column per voter that can only help `p`. The CIP is
//! solved with [`greedy_solve`], which keeps the logarithmic guarantee.
//!
//! Constructive deletion of candidates under a voiced rule is approximated
//! within a factor `m` by deleting everyone but `p`.

use std::collections::{BTreeMap, BTreeSet};

use crate::cip::{greedy_solve, Cip};
use crate::control::{
    is_feasible, Action, Budget, ControlInstance, ControlSolution, Goal, Measure,
};
use crate::election::{scores_among, CandidateId, Rule, Voter};
use crate::error::{domain, Error, Result};

/// How a voter-control CIP maps back onto the election.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CipMapping {
    /// Candidates other than `p` whose score is at least `p`'s, one CIP row each (in order).
    pub threatened: Vec<CandidateId>,
    /// `Δ_c = score(c) - score(p)`.
    pub deficits: BTreeMap<CandidateId, u64>,
    /// For each threatened candidate, the voters (pool indices) that close its gap.
    pub eligible_voters: BTreeMap<CandidateId, Vec<usize>>,
    /// CIP column `j` is voter `columns[j]` of the pool (`W` for adding, `V` for deleting).
    pub columns: Vec<usize>,
}

impl CipMapping {
    /// Pool indices selected by a 0/1 CIP vector.
    pub fn voters_of(&self, x: &[u64]) -> BTreeSet<usize> {
        self.columns
            .iter()
            .zip(x)
            .filter(|(_, &xj)| xj > 0)
            .map(|(&v, _)| v)
            .collect()
    }

    /// The 0/1 CIP vector selecting exactly `voters`; `None` if some voter has no column.
    pub fn vector_of(&self, voters: &BTreeSet<usize>) -> Option<Vec<u64>> {
        let x: Vec<u64> = self
            .columns
            .iter()
            .map(|v| u64::from(voters.contains(v)))
            .collect();
        (x.iter().sum::<u64>() as usize == voters.len()).then_some(x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxResult {
    pub solution: ControlSolution,
    pub measure: Measure,
    pub certificate: Option<CipMapping>,
}

fn require(instance: &ControlInstance, rule: Option<Rule>, action: Action) -> Result<()> {
    let spec = instance.spec();
    if rule.is_some_and(|r| r != spec.rule) || spec.action != action || spec.goal != Goal::Constructive
    {
        return Err(domain(format!(
            "algorithm does not apply to {} instances",
            spec.name()
        )));
    }
    Ok(())
}

/// Scores of the registered election, plus `p`'s index among the candidates.
fn base_scores(instance: &ControlInstance) -> Result<(Vec<CandidateId>, Vec<u64>, usize)> {
    let e = instance.election();
    let active = e.candidate_vec();
    let scores = scores_among(Rule::Approval, &active, e.voters())?;
    let pi = active.binary_search(instance.p()).expect("p is a candidate");
    Ok((active, scores, pi))
}

/// Builds the CIP. `helps(v, c)` says whether pool voter `v` widens `p`'s lead over `c`;
/// `column(v)` whether `v` gets a column at all.
fn build_voter_cip(
    instance: &ControlInstance,
    pool: &[Voter],
    column: impl Fn(&Voter) -> bool,
    helps: impl Fn(&Voter, &CandidateId) -> bool,
) -> Result<(Cip, CipMapping)> {
    let (active, scores, pi) = base_scores(instance)?;
    let columns: Vec<usize> = (0..pool.len()).filter(|&i| column(&pool[i])).collect();
    let mut mapping = CipMapping {
        threatened: Vec::new(),
        deficits: BTreeMap::new(),
        eligible_voters: BTreeMap::new(),
        columns,
    };
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (ci, c) in active.iter().enumerate() {
        if ci == pi || scores[ci] < scores[pi] {
            continue;
        }
        let deficit = scores[ci] - scores[pi];
        let row: Vec<u64> = mapping
            .columns
            .iter()
            .map(|&v| if helps(&pool[v], c) { pool[v].weight() } else { 0 })
            .collect();
        let eligible = mapping
            .columns
            .iter()
            .copied()
            .filter(|&v| helps(&pool[v], c))
            .collect();
        mapping.threatened.push(c.clone());
        mapping.deficits.insert(c.clone(), deficit);
        mapping.eligible_voters.insert(c.clone(), eligible);
        a.push(row);
        b.push(deficit + 1);
    }
    let n = mapping.columns.len();
    let cip = Cip::new(a, b, vec![1; n], vec![1; n])?;
    Ok((cip, mapping))
}

fn approves(v: &Voter, c: &str) -> bool {
    v.ballot.as_approval().is_some_and(|a| a.approves(c))
}

/// CIP for approval-CCAV: columns are unregistered voters approving `p`;
/// voter `v` covers candidate `c` with `w(v)` when it does not approve `c`.
pub fn build_ccav_cip(instance: &ControlInstance) -> Result<(Cip, CipMapping)> {
    require(instance, Some(Rule::Approval), Action::AddVoters)?;
    let p = instance.p().clone();
    build_voter_cip(
        instance,
        instance.unregistered(),
        |v| approves(v, p.as_str()),
        |v, c| !approves(v, c.as_str()),
    )
}

/// CIP for approval-CCDV: columns are registered voters not approving `p`;
/// voter `v` covers candidate `c` with `w(v)` when it approves `c`.
pub fn build_ccdv_cip(instance: &ControlInstance) -> Result<(Cip, CipMapping)> {
    require(instance, Some(Rule::Approval), Action::DeleteVoters)?;
    let p = instance.p().clone();
    build_voter_cip(
        instance,
        instance.election().voters(),
        |v| !approves(v, p.as_str()),
        |v, c| approves(v, c.as_str()),
    )
}

fn finish(
    instance: &ControlInstance,
    solution: ControlSolution,
    certificate: Option<CipMapping>,
) -> Result<ApproxResult> {
    let size = solution.size().expect("add/delete solution");
    if let Budget::Limited(k) = instance.spec().budget {
        if size as u64 > k {
            return Err(Error::NoSolution);
        }
    }
    debug_assert!(is_feasible(instance, &solution).unwrap_or(false));
    Ok(ApproxResult {
        solution,
        measure: Measure::of_size(size),
        certificate,
    })
}

fn solve_voter_cip(cip: &Cip) -> Result<Vec<u64>> {
    match greedy_solve(cip) {
        Ok(sol) => Ok(sol.x),
        Err(Error::Infeasible) => Err(Error::NoSolution),
        Err(e) => Err(e),
    }
}

/// Approval-CCAV (weighted or not) through the greedy CIP solver.
///
/// With a limited budget the unlimited problem is solved first and the
/// answer rejected if it needs more than `k` voters.
pub fn approval_ccav_approx(instance: &ControlInstance) -> Result<ApproxResult> {
    let (cip, mapping) = build_ccav_cip(instance)?;
    let x = solve_voter_cip(&cip)?;
    let added = mapping.voters_of(&x);
    finish(instance, ControlSolution::AddVoters(added), Some(mapping))
}

/// Approval-CCDV (weighted or not) through the greedy CIP solver.
pub fn approval_ccdv_approx(instance: &ControlInstance) -> Result<ApproxResult> {
    let (cip, mapping) = build_ccdv_cip(instance)?;
    let x = solve_voter_cip(&cip)?;
    let deleted = mapping.voters_of(&x);
    finish(instance, ControlSolution::DeleteVoters(deleted), Some(mapping))
}

/// Constructive candidate deletion under a voiced rule: delete all of `C - {p}`.
///
/// Every rule here elects the lone candidate of a one-candidate election, so
/// the output is always feasible and its measure `m` is within a factor `m`
/// of optimal.
pub fn voiced_ccdc_approx(rule: Rule, instance: &ControlInstance) -> Result<ApproxResult> {
    require(instance, Some(rule), Action::DeleteCandidates)?;
    let p = instance.p();
    let deleted: BTreeSet<CandidateId> = instance
        .registered()
        .into_iter()
        .filter(|c| c != p)
        .collect();
    finish(instance, ControlSolution::DeleteCandidates(deleted), None)
}

/// Handle naming one of the approximation algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ApproxAlgorithm {
    CipAddVoters,
    CipDeleteVoters,
    VoicedDeleteCandidates,
}

impl ApproxAlgorithm {
    pub fn run(self, instance: &ControlInstance) -> Result<ApproxResult> {
        match self {
            ApproxAlgorithm::CipAddVoters => approval_ccav_approx(instance),
            ApproxAlgorithm::CipDeleteVoters => approval_ccdv_approx(instance),
            ApproxAlgorithm::VoicedDeleteCandidates => {
                voiced_ccdc_approx(instance.spec().rule, instance)
            }
        }
    }

    /// The algorithm that applies to `instance`, if any.
    pub fn for_instance(instance: &ControlInstance) -> Option<Self> {
        let spec = instance.spec();
        if spec.goal != Goal::Constructive {
            return None;
        }
        match (spec.rule, spec.action) {
            (Rule::Approval, Action::AddVoters) => Some(ApproxAlgorithm::CipAddVoters),
            (Rule::Approval, Action::DeleteVoters) => Some(ApproxAlgorithm::CipDeleteVoters),
            (_, Action::DeleteCandidates) => Some(ApproxAlgorithm::VoicedDeleteCandidates),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{measure, ControlSpec, Pool};
    use crate::election::{candidate_set, Ballot, Election};

    fn approve(universe: &[&str], approved: &[&str]) -> Voter {
        Voter::unit(Ballot::approval(candidate_set(universe), candidate_set(approved)).unwrap())
    }

    fn rank(s: &str) -> Voter {
        Voter::unit(Ballot::ranking(s.split('>')).unwrap())
    }

    const PC: [&str; 2] = ["p", "c"];

    fn ccav(v: Vec<Voter>, w: Vec<Voter>) -> ControlInstance {
        let e = Election::new(candidate_set(PC), v).unwrap();
        let spec = ControlSpec::constructive(Rule::Approval, Action::AddVoters);
        ControlInstance::new(spec, e, Pool::Unregistered(w), "p".into()).unwrap()
    }

    fn ccdv(v: Vec<Voter>) -> ControlInstance {
        let e = Election::new(candidate_set(PC), v).unwrap();
        let spec = ControlSpec::constructive(Rule::Approval, Action::DeleteVoters);
        ControlInstance::new(spec, e, Pool::None, "p".into()).unwrap()
    }

    #[test]
    fn ccav_cip_shapes() {
        let inst = ccav(vec![approve(&PC, &["p"])], vec![approve(&PC, &["p"])]);
        let (cip, map) = build_ccav_cip(&inst).unwrap();
        assert_eq!(cip.rows(), 0);
        assert!(map.threatened.is_empty());

        let inst = ccav(
            vec![approve(&PC, &["c"])],
            vec![approve(&PC, &["p"]), approve(&PC, &["p"])],
        );
        let (cip, map) = build_ccav_cip(&inst).unwrap();
        assert_eq!(cip.rows(), 1);
        assert_eq!(cip.demands(), &[2]);
        assert_eq!(cip.matrix(), &[vec![1, 1]]);
        assert_eq!(map.deficits[&CandidateId::from("c")], 1);

        let inst = ccav(
            vec![approve(&PC, &["c"])],
            vec![approve(&PC, &["c"]), approve(&PC, &["p"])],
        );
        let (cip, map) = build_ccav_cip(&inst).unwrap();
        assert_eq!(cip.cols(), 1);
        assert_eq!(map.columns, vec![1]);
    }

    #[test]
    fn ccav_approx_examples() {
        let inst = ccav(vec![approve(&PC, &["p"])], vec![approve(&PC, &["c"])]);
        let r = approval_ccav_approx(&inst).unwrap();
        assert_eq!(r.solution, ControlSolution::AddVoters(BTreeSet::new()));
        assert_eq!(r.measure, Measure::Finite(1));

        let inst = ccav(
            vec![approve(&PC, &["c"])],
            vec![approve(&PC, &["p"]), approve(&PC, &["p"])],
        );
        let r = approval_ccav_approx(&inst).unwrap();
        assert_eq!(r.solution, ControlSolution::AddVoters([0, 1].into()));
        assert_eq!(r.measure, Measure::Finite(3));
        assert_eq!(measure(&inst, &r.solution), r.measure);

        let inst = ccav(vec![approve(&PC, &["c"])], vec![approve(&PC, &["p"])]);
        assert_eq!(approval_ccav_approx(&inst), Err(Error::NoSolution));
    }

    #[test]
    fn ccdv_cip_and_approx_examples() {
        let inst = ccdv(vec![approve(&PC, &["p"])]);
        assert_eq!(build_ccdv_cip(&inst).unwrap().0.rows(), 0);

        let inst = ccdv(vec![
            approve(&PC, &["c"]),
            approve(&PC, &["c"]),
            approve(&PC, &["p"]),
        ]);
        let (cip, map) = build_ccdv_cip(&inst).unwrap();
        assert_eq!(cip.demands(), &[2]);
        assert_eq!(map.columns, vec![0, 1]);
        let r = approval_ccdv_approx(&inst).unwrap();
        assert_eq!(r.solution, ControlSolution::DeleteVoters([0, 1].into()));
        assert_eq!(r.measure, Measure::Finite(3));

        let inst = ccdv(vec![approve(&PC, &["p", "c"]), approve(&PC, &["p", "c"])]);
        let (_, map) = build_ccdv_cip(&inst).unwrap();
        assert!(map.columns.is_empty());
        assert_eq!(approval_ccdv_approx(&inst), Err(Error::NoSolution));
    }

    #[test]
    fn limited_budget_rejects_large_answers() {
        let inst = ccav(
            vec![approve(&PC, &["c"])],
            vec![approve(&PC, &["p"]), approve(&PC, &["p"])],
        );
        let spec = ControlSpec::new(
            Rule::Approval,
            Action::AddVoters,
            Goal::Constructive,
            Budget::Limited(1),
            None,
        )
        .unwrap();
        let limited = inst.with_spec(spec).unwrap();
        assert_eq!(approval_ccav_approx(&limited), Err(Error::NoSolution));
    }

    #[test]
    fn voiced_ccdc_deletes_everyone_else() {
        let e = Election::new(candidate_set(["p"]), vec![rank("p")]).unwrap();
        let spec = ControlSpec::constructive(Rule::Plurality, Action::DeleteCandidates);
        let inst = ControlInstance::new(spec, e, Pool::None, "p".into()).unwrap();
        let r = voiced_ccdc_approx(Rule::Plurality, &inst).unwrap();
        assert_eq!(r.solution, ControlSolution::DeleteCandidates(BTreeSet::new()));
        assert_eq!(r.measure, Measure::Finite(1));

        let pab = ["p", "a", "b"];
        let e = Election::new(candidate_set(pab), vec![rank("a>b>p"), rank("b>a>p")]).unwrap();
        for rule in [Rule::Plurality, Rule::Condorcet] {
            let spec = ControlSpec::constructive(rule, Action::DeleteCandidates);
            let inst = ControlInstance::new(spec, e.clone(), Pool::None, "p".into()).unwrap();
            let r = voiced_ccdc_approx(rule, &inst).unwrap();
            assert_eq!(r.solution, ControlSolution::DeleteCandidates(candidate_set(["a", "b"])));
            assert_eq!(r.measure, Measure::Finite(3));
            assert!(is_feasible(&inst, &r.solution).unwrap());
        }
    }

    #[test]
    fn wrong_spec_is_rejected() {
        let inst = ccdv(vec![approve(&PC, &["c"])]);
        assert!(matches!(approval_ccav_approx(&inst), Err(Error::Domain(_))));
        assert!(matches!(
            voiced_ccdc_approx(Rule::Approval, &inst),
            Err(Error::Domain(_))
        ));
    }
}
