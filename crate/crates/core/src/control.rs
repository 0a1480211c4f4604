//! Control problem instances, feasibility, measures and performance ratios.
//!
//! Measures follow the "+1" convention throughout: an add/delete solution of
//! size `s` has measure `1 + s`, a partition with parts of sizes `a` and `b`
//! has measure `1 + |a - b|` (part cardinalities, never weight sums). Raw
//! sizes are therefore `measure - 1`. Infeasible solutions have measure
//! [`Measure::Infinite`].

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::election::{
    is_unique_winner_among, two_stage_winners, Ballot, CandidateId, Election, Partition,
    PartitionKind, Rule, TieRule, Voter,
};
use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    #[serde(rename = "AC")]
    AddCandidates,
    #[serde(rename = "DC")]
    DeleteCandidates,
    #[serde(rename = "AV")]
    AddVoters,
    #[serde(rename = "DV")]
    DeleteVoters,
    #[serde(rename = "PV")]
    PartitionVoters,
    #[serde(rename = "PC")]
    PartitionCandidates,
    #[serde(rename = "RPC")]
    RunoffPartitionCandidates,
}

impl Action {
    pub const ALL: [Action; 7] = [
        Action::AddCandidates,
        Action::DeleteCandidates,
        Action::AddVoters,
        Action::DeleteVoters,
        Action::PartitionVoters,
        Action::PartitionCandidates,
        Action::RunoffPartitionCandidates,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Action::AddCandidates => "AC",
            Action::DeleteCandidates => "DC",
            Action::AddVoters => "AV",
            Action::DeleteVoters => "DV",
            Action::PartitionVoters => "PV",
            Action::PartitionCandidates => "PC",
            Action::RunoffPartitionCandidates => "RPC",
        }
    }

    pub fn partition_kind(self) -> Option<PartitionKind> {
        match self {
            Action::PartitionVoters => Some(PartitionKind::Voters),
            Action::PartitionCandidates => Some(PartitionKind::Candidates),
            Action::RunoffPartitionCandidates => Some(PartitionKind::RunoffCandidates),
            _ => None,
        }
    }

    pub fn is_partition(self) -> bool {
        self.partition_kind().is_some()
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Goal {
    /// Make `p` the unique winner.
    Constructive,
    /// Prevent `p` from being the unique winner.
    Destructive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Budget {
    Limited(u64),
    Unlimited,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ControlSpec {
    pub rule: Rule,
    pub action: Action,
    pub goal: Goal,
    /// Ignored for partition actions.
    pub budget: Budget,
    /// Present exactly for partition actions.
    pub tie_rule: Option<TieRule>,
}

impl ControlSpec {
    pub fn new(
        rule: Rule,
        action: Action,
        goal: Goal,
        budget: Budget,
        tie_rule: Option<TieRule>,
    ) -> Result<Self> {
        if action.is_partition() != tie_rule.is_some() {
            return Err(domain(format!(
                "a tie rule is required for partition actions and only for them (action {action})"
            )));
        }
        Ok(ControlSpec {
            rule,
            action,
            goal,
            budget,
            tie_rule,
        })
    }

    /// Unlimited, constructive, non-partition spec.
    pub fn constructive(rule: Rule, action: Action) -> Self {
        ControlSpec::new(rule, action, Goal::Constructive, Budget::Unlimited, None)
            .expect("non-partition action")
    }

    /// Conventional name, e.g. `approval-CCUAV` or `plurality-DCPV-TE`.
    pub fn name(&self) -> String {
        let goal = match self.goal {
            Goal::Constructive => "CC",
            Goal::Destructive => "DC",
        };
        let unlimited = match (self.action.is_partition(), self.budget) {
            (false, Budget::Unlimited) => "U",
            _ => "",
        };
        let tie = match self.tie_rule {
            Some(TieRule::TiesEliminate) => "-TE",
            Some(TieRule::TiesPromote) => "-TP",
            None => "",
        };
        format!("{}-{goal}{unlimited}{}{tie}", self.rule, self.action)
    }
}

/// Whatever the control agent may draw from beyond the registered election.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pool {
    None,
    /// Spoiler candidates `A`; they are part of the election's candidate set
    /// (ballots range over `C ∪ A`) but are not registered.
    Spoilers(BTreeSet<CandidateId>),
    /// Unregistered voters `W`, ballots over the registered candidates.
    Unregistered(Vec<Voter>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlInstance {
    spec: ControlSpec,
    election: Election,
    pool: Pool,
    p: CandidateId,
}

fn check_kind(rule: Rule, v: &Voter, what: &str) -> Result<()> {
    let ok = match &v.ballot {
        Ballot::Ranking(_) => rule.uses_rankings(),
        Ballot::Approval(_) => !rule.uses_rankings(),
    };
    if ok {
        Ok(())
    } else if rule.uses_rankings() {
        Err(Error::BallotKind(format!("{rule} requires ranking ballots ({what})")))
    } else {
        Err(Error::BallotKind(format!("{rule} requires approval ballots ({what})")))
    }
}

impl ControlInstance {
    /// For add-candidates the election holds `C ∪ A` and the pool names `A`.
    pub fn new(spec: ControlSpec, election: Election, pool: Pool, p: CandidateId) -> Result<Self> {
        let pool = match (spec.action, pool) {
            (Action::AddCandidates, Pool::None) => Pool::Spoilers(BTreeSet::new()),
            (Action::AddVoters, Pool::None) => Pool::Unregistered(Vec::new()),
            (Action::AddCandidates, pool @ Pool::Spoilers(_)) => pool,
            (Action::AddVoters, pool @ Pool::Unregistered(_)) => pool,
            (_, Pool::None) => Pool::None,
            (action, _) => {
                return Err(domain(format!("action {action} takes no candidate/voter pool of this kind")))
            }
        };
        if !election.contains(p.as_str()) {
            return Err(domain(format!("distinguished candidate {p} is not in the election")));
        }
        match &pool {
            Pool::Spoilers(a) => {
                if a.contains(&p) {
                    return Err(domain("the distinguished candidate cannot be a spoiler"));
                }
                if let Some(c) = a.iter().find(|c| !election.contains(c.as_str())) {
                    return Err(domain(format!("spoiler {c} has no place on the ballots")));
                }
            }
            Pool::Unregistered(w) => {
                for (i, v) in w.iter().enumerate() {
                    if v.ballot.universe() != *election.candidates() {
                        return Err(domain(format!(
                            "unregistered voter {i} does not range over the candidates"
                        )));
                    }
                    check_kind(spec.rule, v, &format!("unregistered voter {i}"))?;
                }
            }
            Pool::None => {}
        }
        for (i, v) in election.voters().iter().enumerate() {
            check_kind(spec.rule, v, &format!("voter {i}"))?;
        }
        Ok(ControlInstance {
            spec,
            election,
            pool,
            p,
        })
    }

    pub fn spec(&self) -> &ControlSpec {
        &self.spec
    }

    pub fn election(&self) -> &Election {
        &self.election
    }

    pub fn pool(&self) -> &Pool {
        &self.pool
    }

    pub fn p(&self) -> &CandidateId {
        &self.p
    }

    pub fn spoilers(&self) -> Option<&BTreeSet<CandidateId>> {
        match &self.pool {
            Pool::Spoilers(a) => Some(a),
            _ => None,
        }
    }

    pub fn unregistered(&self) -> &[Voter] {
        match &self.pool {
            Pool::Unregistered(w) => w,
            _ => &[],
        }
    }

    /// The registered candidate set `C` (election candidates minus spoilers).
    pub fn registered(&self) -> Vec<CandidateId> {
        match &self.pool {
            Pool::Spoilers(a) => self
                .election
                .candidates()
                .iter()
                .filter(|c| !a.contains(*c))
                .cloned()
                .collect(),
            _ => self.election.candidate_vec(),
        }
    }

    /// Same instance with a different spec (pools must still fit).
    pub fn with_spec(&self, spec: ControlSpec) -> Result<Self> {
        ControlInstance::new(spec, self.election.clone(), self.pool.clone(), self.p.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ControlSolution {
    AddCandidates(BTreeSet<CandidateId>),
    DeleteCandidates(BTreeSet<CandidateId>),
    /// Indices into the unregistered pool `W`.
    AddVoters(BTreeSet<usize>),
    /// Indices into the registered voters `V`.
    DeleteVoters(BTreeSet<usize>),
    Partition(Partition),
}

impl ControlSolution {
    pub fn action_matches(&self, action: Action) -> bool {
        matches!(
            (self, action),
            (ControlSolution::AddCandidates(_), Action::AddCandidates)
                | (ControlSolution::DeleteCandidates(_), Action::DeleteCandidates)
                | (ControlSolution::AddVoters(_), Action::AddVoters)
                | (ControlSolution::DeleteVoters(_), Action::DeleteVoters)
                | (ControlSolution::Partition(Partition::Voters(..)), Action::PartitionVoters)
                | (
                    ControlSolution::Partition(Partition::Candidates(..)),
                    Action::PartitionCandidates | Action::RunoffPartitionCandidates
                )
        )
    }

    /// Number of added/deleted objects; `None` for partitions.
    pub fn size(&self) -> Option<usize> {
        match self {
            ControlSolution::AddCandidates(s) | ControlSolution::DeleteCandidates(s) => Some(s.len()),
            ControlSolution::AddVoters(s) | ControlSolution::DeleteVoters(s) => Some(s.len()),
            ControlSolution::Partition(_) => None,
        }
    }
}

/// Whether `p` is the unique winner once `solution` has been applied.
fn p_wins_uniquely(inst: &ControlInstance, solution: &ControlSolution) -> Result<bool> {
    let rule = inst.spec.rule;
    let e = &inst.election;
    let p = &inst.p;
    match solution {
        ControlSolution::AddCandidates(added) => {
            let spoilers = inst.spoilers().expect("validated pool");
            if let Some(c) = added.iter().find(|c| !spoilers.contains(*c)) {
                return Err(domain(format!("{c} is not a spoiler candidate")));
            }
            let active: Vec<CandidateId> = e
                .candidates()
                .iter()
                .filter(|c| !spoilers.contains(*c) || added.contains(*c))
                .cloned()
                .collect();
            is_unique_winner_among(rule, &active, e.voters(), p)
        }
        ControlSolution::DeleteCandidates(deleted) => {
            if deleted.contains(p) {
                return Err(domain("the distinguished candidate cannot be deleted"));
            }
            let registered = inst.registered();
            if let Some(c) = deleted.iter().find(|c| registered.binary_search(c).is_err()) {
                return Err(domain(format!("{c} is not a registered candidate")));
            }
            let active: Vec<CandidateId> = registered
                .into_iter()
                .filter(|c| !deleted.contains(c))
                .collect();
            is_unique_winner_among(rule, &active, e.voters(), p)
        }
        ControlSolution::AddVoters(added) => {
            let w = inst.unregistered();
            if let Some(&i) = added.iter().find(|&&i| i >= w.len()) {
                return Err(domain(format!("unregistered voter index {i} out of range")));
            }
            let active = e.candidate_vec();
            let voters = e.voters().iter().chain(added.iter().map(|&i| &w[i]));
            is_unique_winner_among(rule, &active, voters, p)
        }
        ControlSolution::DeleteVoters(deleted) => {
            let n = e.voters().len();
            if let Some(&i) = deleted.iter().find(|&&i| i >= n) {
                return Err(domain(format!("voter index {i} out of range")));
            }
            let active = e.candidate_vec();
            let voters = e
                .voters()
                .iter()
                .enumerate()
                .filter(|(i, _)| !deleted.contains(i))
                .map(|(_, v)| v);
            is_unique_winner_among(rule, &active, voters, p)
        }
        ControlSolution::Partition(part) => {
            let kind = inst.spec.action.partition_kind().expect("checked by caller");
            let tie = inst.spec.tie_rule.expect("validated spec");
            let w = two_stage_winners(rule, e, kind, tie, part)?;
            Ok(w.len() == 1 && w.contains(p))
        }
    }
}

/// Applies the control action and reports whether the goal (and budget) holds.
pub fn is_feasible(instance: &ControlInstance, solution: &ControlSolution) -> Result<bool> {
    let spec = instance.spec;
    if !solution.action_matches(spec.action) {
        return Err(domain(format!(
            "solution kind does not match control action {}",
            spec.action
        )));
    }
    if let (Some(size), Budget::Limited(k)) = (solution.size(), spec.budget) {
        if size as u64 > k {
            // Still reject a malformed solution before reporting the budget miss.
            p_wins_uniquely(instance, solution)?;
            return Ok(false);
        }
    }
    let unique = p_wins_uniquely(instance, solution)?;
    Ok(match spec.goal {
        Goal::Constructive => unique,
        Goal::Destructive => !unique,
    })
}

/// Objective value of a solution; `Infinite` marks infeasibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Measure {
    Finite(u64),
    Infinite,
}

impl Measure {
    /// `1 + size`, the measure of an add/delete solution of that size.
    pub fn of_size(size: usize) -> Measure {
        Measure::Finite(1 + size as u64)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Measure::Finite(_))
    }

    pub fn value(self) -> Option<u64> {
        match self {
            Measure::Finite(v) => Some(v),
            Measure::Infinite => None,
        }
    }

    /// Raw size (`measure - 1`).
    pub fn raw(self) -> Option<u64> {
        self.value().map(|v| v - 1)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Finite(v) => write!(f, "{v}"),
            Measure::Infinite => f.write_str("infinity"),
        }
    }
}

fn solution_measure(solution: &ControlSolution) -> Measure {
    match solution {
        ControlSolution::Partition(part) => {
            let (a, b) = part.part_sizes();
            Measure::Finite(1 + a.abs_diff(b) as u64)
        }
        other => Measure::of_size(other.size().expect("non-partition")),
    }
}

/// Measure of `solution` on `instance`; malformed or infeasible solutions are `Infinite`.
pub fn measure(instance: &ControlInstance, solution: &ControlSolution) -> Measure {
    match is_feasible(instance, solution) {
        Ok(true) => solution_measure(solution),
        _ => Measure::Infinite,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PerformanceRatio {
    Finite(Ratio<u64>),
    Infinite,
}

impl PerformanceRatio {
    pub fn one() -> Self {
        PerformanceRatio::Finite(Ratio::from_integer(1))
    }
}

impl fmt::Display for PerformanceRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PerformanceRatio::Finite(r) => write!(f, "{r}"),
            PerformanceRatio::Infinite => f.write_str("infinity"),
        }
    }
}

/// `max(achieved/optimal, optimal/achieved)` as an exact rational.
pub fn performance_ratio(achieved: Measure, optimal: Measure) -> Result<PerformanceRatio> {
    let Measure::Finite(opt) = optimal else {
        return Err(Error::NoSolution);
    };
    let Measure::Finite(got) = achieved else {
        return Ok(PerformanceRatio::Infinite);
    };
    if opt == 0 || got == 0 {
        return Err(domain("measures are positive"));
    }
    let r = Ratio::new(got, opt);
    Ok(PerformanceRatio::Finite(if r < Ratio::from_integer(1) {
        r.recip()
    } else {
        r
    }))
}
