//! Elections, ballots and winner determination.
//!
//! Three rules are supported: plurality and Condorcet over rankings, approval
//! over approval ballots. Every voter carries a positive integer weight; an
//! unweighted election is one where all weights are 1. Scoring is exact
//! integer arithmetic throughout.
//!
//! Most evaluators have an `*_among` twin that scores an arbitrary subset of
//! the candidates while reading ballots as if they had been restricted to
//! that subset. Control actions (deleting or adding candidates, two-stage
//! elections) are evaluated through those twins so that no ballot is ever
//! copied on the hot path.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Candidate label. Cheap to clone; ordered by its text.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateId(Arc<str>);

impl CandidateId {
    pub fn new(label: impl AsRef<str>) -> Result<Self> {
        let label = label.as_ref();
        if label.is_empty() {
            return Err(domain("candidate ids must be nonempty"));
        }
        Ok(CandidateId(Arc::from(label)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for CandidateId {
    /// Panics on the empty string; use [`CandidateId::new`] for untrusted input.
    fn from(label: &str) -> Self {
        CandidateId::new(label).expect("nonempty candidate id")
    }
}

impl AsRef<str> for CandidateId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for CandidateId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Serialize for CandidateId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for CandidateId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CandidateId::new(s).map_err(serde::de::Error::custom)
    }
}

/// Collects string-like labels into a candidate set.
pub fn candidate_set<I, S>(labels: I) -> BTreeSet<CandidateId>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    labels
        .into_iter()
        .map(|s| CandidateId::from(s.as_ref()))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Plurality,
    Approval,
    Condorcet,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::Plurality, Rule::Approval, Rule::Condorcet];

    pub fn uses_rankings(self) -> bool {
        !matches!(self, Rule::Approval)
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Plurality => "plurality",
            Rule::Approval => "approval",
            Rule::Condorcet => "condorcet",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An approval ballot: the approved subset of a known candidate universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ApprovalBallot {
    universe: BTreeSet<CandidateId>,
    approved: BTreeSet<CandidateId>,
}

impl ApprovalBallot {
    pub fn universe(&self) -> &BTreeSet<CandidateId> {
        &self.universe
    }

    pub fn approved(&self) -> &BTreeSet<CandidateId> {
        &self.approved
    }

    pub fn approves(&self, c: &str) -> bool {
        self.approved.contains(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ballot {
    /// Strict total order, most preferred first.
    Ranking(Vec<CandidateId>),
    Approval(ApprovalBallot),
}

impl Ballot {
    pub fn ranking<I, S>(order: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let order: Vec<CandidateId> = order
            .into_iter()
            .map(|s| CandidateId::new(s))
            .collect::<Result<_>>()?;
        let distinct: BTreeSet<&CandidateId> = order.iter().collect();
        if distinct.len() != order.len() {
            return Err(domain("a ranking lists some candidate twice"));
        }
        Ok(Ballot::Ranking(order))
    }

    pub fn approval(
        universe: BTreeSet<CandidateId>,
        approved: BTreeSet<CandidateId>,
    ) -> Result<Self> {
        if let Some(stray) = approved.iter().find(|c| !universe.contains(*c)) {
            return Err(domain(format!(
                "approved candidate {stray} is outside the ballot universe"
            )));
        }
        Ok(Ballot::Approval(ApprovalBallot { universe, approved }))
    }

    pub fn universe(&self) -> BTreeSet<CandidateId> {
        match self {
            Ballot::Ranking(order) => order.iter().cloned().collect(),
            Ballot::Approval(a) => a.universe.clone(),
        }
    }

    fn universe_equals(&self, set: &BTreeSet<CandidateId>) -> bool {
        match self {
            Ballot::Ranking(order) => {
                order.len() == set.len() && order.iter().all(|c| set.contains(c))
            }
            Ballot::Approval(a) => &a.universe == set,
        }
    }

    pub fn is_ranking(&self) -> bool {
        matches!(self, Ballot::Ranking(_))
    }

    pub fn as_ranking(&self) -> Option<&[CandidateId]> {
        match self {
            Ballot::Ranking(order) => Some(order),
            Ballot::Approval(_) => None,
        }
    }

    pub fn as_approval(&self) -> Option<&ApprovalBallot> {
        match self {
            Ballot::Approval(a) => Some(a),
            Ballot::Ranking(_) => None,
        }
    }
}

impl fmt::Display for Ballot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ballot::Ranking(order) => {
                for (i, c) in order.iter().enumerate() {
                    if i > 0 {
                        f.write_str(">")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            Ballot::Approval(a) => {
                f.write_str("{")?;
                for (i, c) in a.approved.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Restricts a ballot to `subset`: induced order for rankings, intersection for approval.
pub fn restrict_ballot(ballot: &Ballot, subset: &BTreeSet<CandidateId>) -> Result<Ballot> {
    match ballot {
        Ballot::Ranking(order) => {
            if let Some(stray) = subset.iter().find(|c| !order.contains(c)) {
                return Err(domain(format!("{stray} is not in the ballot universe")));
            }
            Ok(Ballot::Ranking(
                order.iter().filter(|c| subset.contains(*c)).cloned().collect(),
            ))
        }
        Ballot::Approval(a) => {
            if let Some(stray) = subset.iter().find(|c| !a.universe.contains(*c)) {
                return Err(domain(format!("{stray} is not in the ballot universe")));
            }
            Ok(Ballot::Approval(ApprovalBallot {
                universe: subset.clone(),
                approved: a.approved.intersection(subset).cloned().collect(),
            }))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Voter {
    pub ballot: Ballot,
    weight: u64,
}

impl Voter {
    pub fn new(ballot: Ballot, weight: u64) -> Result<Self> {
        if weight == 0 {
            return Err(domain("voter weights must be positive"));
        }
        Ok(Voter { ballot, weight })
    }

    pub fn unit(ballot: Ballot) -> Self {
        Voter { ballot, weight: 1 }
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }
}

/// A candidate set together with a multiset of voters (kept in insertion order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Election {
    candidates: BTreeSet<CandidateId>,
    voters: Vec<Voter>,
}

impl Election {
    pub fn new(candidates: BTreeSet<CandidateId>, voters: Vec<Voter>) -> Result<Self> {
        for (i, v) in voters.iter().enumerate() {
            if !v.ballot.universe_equals(&candidates) {
                return Err(domain(format!(
                    "ballot of voter {i} does not range over the election's candidates"
                )));
            }
        }
        Ok(Election { candidates, voters })
    }

    pub fn candidates(&self) -> &BTreeSet<CandidateId> {
        &self.candidates
    }

    pub fn voters(&self) -> &[Voter] {
        &self.voters
    }

    pub fn contains(&self, c: &str) -> bool {
        self.candidates.contains(c)
    }

    pub fn total_weight(&self) -> u64 {
        self.voters.iter().map(Voter::weight).sum()
    }

    /// Sorted candidate list, the shape every `*_among` evaluator expects.
    pub fn candidate_vec(&self) -> Vec<CandidateId> {
        self.candidates.iter().cloned().collect()
    }
}

fn kind_error(rule: Rule) -> Error {
    if rule.uses_rankings() {
        Error::BallotKind(format!("{rule} requires ranking ballots"))
    } else {
        Error::BallotKind(format!("{rule} requires approval ballots"))
    }
}

/// Scores of `active` (sorted, distinct) under plurality or approval, ballots
/// read as restricted to `active`. Condorcet has no scores and is rejected.
pub fn scores_among<'a, I>(rule: Rule, active: &[CandidateId], voters: I) -> Result<Vec<u64>>
where
    I: IntoIterator<Item = &'a Voter>,
{
    let mut scores = vec![0u64; active.len()];
    match rule {
        Rule::Plurality => {
            for v in voters {
                let order = v.ballot.as_ranking().ok_or_else(|| kind_error(rule))?;
                if let Some(i) = order.iter().find_map(|c| active.binary_search(c).ok()) {
                    scores[i] += v.weight;
                }
            }
        }
        Rule::Approval => {
            for v in voters {
                let a = v.ballot.as_approval().ok_or_else(|| kind_error(rule))?;
                for c in &a.approved {
                    if let Ok(i) = active.binary_search(c) {
                        scores[i] += v.weight;
                    }
                }
            }
        }
        Rule::Condorcet => {
            return Err(domain("condorcet elections have no per-candidate score"));
        }
    }
    Ok(scores)
}

/// Net pairwise margins among `active`: `m[a][b]` is the weight preferring a
/// to b minus the weight preferring b to a.
pub fn pairwise_among<'a, I>(active: &[CandidateId], voters: I) -> Result<Vec<Vec<i64>>>
where
    I: IntoIterator<Item = &'a Voter>,
{
    let n = active.len();
    let mut margin = vec![vec![0i64; n]; n];
    let mut positions = Vec::with_capacity(n);
    for v in voters {
        let order = v
            .ballot
            .as_ranking()
            .ok_or_else(|| kind_error(Rule::Condorcet))?;
        positions.clear();
        positions.extend(order.iter().filter_map(|c| active.binary_search(c).ok()));
        let w = v.weight as i64;
        for (x, &hi) in positions.iter().enumerate() {
            for &lo in &positions[x + 1..] {
                margin[hi][lo] += w;
                margin[lo][hi] -= w;
            }
        }
    }
    Ok(margin)
}

/// Winner indices (into `active`) under `rule`, ballots restricted to `active`.
pub fn winners_among<'a, I>(rule: Rule, active: &[CandidateId], voters: I) -> Result<Vec<usize>>
where
    I: IntoIterator<Item = &'a Voter>,
{
    match rule {
        Rule::Plurality | Rule::Approval => {
            let scores = scores_among(rule, active, voters)?;
            let Some(&best) = scores.iter().max() else {
                return Ok(Vec::new());
            };
            Ok((0..active.len()).filter(|&i| scores[i] == best).collect())
        }
        Rule::Condorcet => {
            let margin = pairwise_among(active, voters)?;
            let winner = (0..active.len())
                .find(|&c| (0..active.len()).all(|d| d == c || margin[c][d] > 0));
            Ok(winner.into_iter().collect())
        }
    }
}

/// Whether `p` (an element of `active`) is the sole winner among `active`.
pub fn is_unique_winner_among<'a, I>(
    rule: Rule,
    active: &[CandidateId],
    voters: I,
    p: &CandidateId,
) -> Result<bool>
where
    I: IntoIterator<Item = &'a Voter>,
{
    let idx = active
        .binary_search(p)
        .map_err(|_| domain(format!("{p} is not an active candidate")))?;
    Ok(winners_among(rule, active, voters)? == [idx])
}

fn to_map(active: &[CandidateId], scores: Vec<u64>) -> BTreeMap<CandidateId, u64> {
    active.iter().cloned().zip(scores).collect()
}

pub fn plurality_scores(election: &Election) -> Result<BTreeMap<CandidateId, u64>> {
    let active = election.candidate_vec();
    let scores = scores_among(Rule::Plurality, &active, &election.voters)?;
    Ok(to_map(&active, scores))
}

pub fn approval_scores(election: &Election) -> Result<BTreeMap<CandidateId, u64>> {
    let active = election.candidate_vec();
    let scores = scores_among(Rule::Approval, &active, &election.voters)?;
    Ok(to_map(&active, scores))
}

/// Weight preferring `a` to `b` minus weight preferring `b` to `a`.
pub fn pairwise_score(election: &Election, a: &str, b: &str) -> Result<i64> {
    if a == b {
        return Err(domain("pairwise score needs two distinct candidates"));
    }
    for c in [a, b] {
        if !election.contains(c) {
            return Err(domain(format!("unknown candidate {c}")));
        }
    }
    let mut score = 0i64;
    for v in &election.voters {
        let order = v
            .ballot
            .as_ranking()
            .ok_or_else(|| kind_error(Rule::Condorcet))?;
        let pa = order.iter().position(|c| c.as_str() == a);
        let pb = order.iter().position(|c| c.as_str() == b);
        if pa < pb {
            score += v.weight as i64;
        } else {
            score -= v.weight as i64;
        }
    }
    Ok(score)
}

pub fn winners(rule: Rule, election: &Election) -> Result<BTreeSet<CandidateId>> {
    let active = election.candidate_vec();
    let idx = winners_among(rule, &active, &election.voters)?;
    Ok(idx.into_iter().map(|i| active[i].clone()).collect())
}

pub fn is_unique_winner(rule: Rule, election: &Election, p: &str) -> Result<bool> {
    if !election.contains(p) {
        return Err(domain(format!("unknown candidate {p}")));
    }
    let w = winners(rule, election)?;
    Ok(w.len() == 1 && w.contains(p))
}

/// Which two-stage protocol to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartitionKind {
    /// Partition of voters.
    #[serde(rename = "PV")]
    Voters,
    /// Partition of candidates: first-part survivors face all of the second part.
    #[serde(rename = "PC")]
    Candidates,
    /// Run-off partition of candidates: survivors of both parts meet.
    #[serde(rename = "RPC")]
    RunoffCandidates,
}

/// Tie handling for first-stage subelections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TieRule {
    /// Only a unique winner advances.
    #[serde(rename = "TE")]
    TiesEliminate,
    /// Every winner advances.
    #[serde(rename = "TP")]
    TiesPromote,
}

/// A two-way split of the voters (by insertion index) or of the candidates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Partition {
    Voters(Vec<usize>, Vec<usize>),
    Candidates(BTreeSet<CandidateId>, BTreeSet<CandidateId>),
}

impl Partition {
    pub fn part_sizes(&self) -> (usize, usize) {
        match self {
            Partition::Voters(a, b) => (a.len(), b.len()),
            Partition::Candidates(a, b) => (a.len(), b.len()),
        }
    }

    /// Checks the parts are disjoint and exactly cover the voters or candidates.
    pub fn validate(&self, election: &Election) -> Result<()> {
        match self {
            Partition::Voters(a, b) => {
                let n = election.voters.len();
                let mut seen = vec![false; n];
                for &i in a.iter().chain(b) {
                    if i >= n {
                        return Err(domain(format!("voter index {i} out of range")));
                    }
                    if std::mem::replace(&mut seen[i], true) {
                        return Err(domain(format!("voter {i} appears in both parts or twice")));
                    }
                }
                if seen.iter().any(|s| !s) {
                    return Err(domain("voter partition does not cover every voter"));
                }
            }
            Partition::Candidates(a, b) => {
                if a.intersection(b).next().is_some() {
                    return Err(domain("candidate parts overlap"));
                }
                let union: BTreeSet<_> = a.union(b).cloned().collect();
                if &union != election.candidates() {
                    return Err(domain("candidate parts do not cover the candidate set"));
                }
            }
        }
        Ok(())
    }
}

fn survivors<'a, I>(
    rule: Rule,
    active: &[CandidateId],
    voters: I,
    tie: TieRule,
) -> Result<Vec<CandidateId>>
where
    I: IntoIterator<Item = &'a Voter>,
{
    let won = winners_among(rule, active, voters)?;
    let pass = match tie {
        TieRule::TiesEliminate => won.len() == 1,
        TieRule::TiesPromote => true,
    };
    Ok(if pass {
        won.into_iter().map(|i| active[i].clone()).collect()
    } else {
        Vec::new()
    })
}

/// Winners of the two-stage election defined by `kind`, `tie` and `partition`.
///
/// The final round is held among the (deduplicated) survivors with every
/// voter's ballot restricted to them.
pub fn two_stage_winners(
    rule: Rule,
    election: &Election,
    kind: PartitionKind,
    tie: TieRule,
    partition: &Partition,
) -> Result<BTreeSet<CandidateId>> {
    partition.validate(election)?;
    let all = election.candidate_vec();
    let voters = &election.voters;
    let mut finalists: BTreeSet<CandidateId> = BTreeSet::new();
    match (kind, partition) {
        (PartitionKind::Voters, Partition::Voters(first, second)) => {
            for part in [first, second] {
                let sub = part.iter().map(|&i| &voters[i]);
                finalists.extend(survivors(rule, &all, sub, tie)?);
            }
        }
        (PartitionKind::RunoffCandidates, Partition::Candidates(first, second)) => {
            for part in [first, second] {
                let active: Vec<CandidateId> = part.iter().cloned().collect();
                finalists.extend(survivors(rule, &active, voters, tie)?);
            }
        }
        (PartitionKind::Candidates, Partition::Candidates(first, second)) => {
            let active: Vec<CandidateId> = first.iter().cloned().collect();
            finalists.extend(survivors(rule, &active, voters, tie)?);
            finalists.extend(second.iter().cloned());
        }
        _ => return Err(domain("partition kind does not match the control action")),
    }
    let finalists: Vec<CandidateId> = finalists.into_iter().collect();
    let won = winners_among(rule, &finalists, voters)?;
    Ok(won.into_iter().map(|i| finalists[i].clone()).collect())
}
