//! Hitting set to destructive plurality candidate deletion and to Condorcet
//! voter deletion. Both gadgets preserve yes/no answers only.

use std::collections::BTreeSet;

use super::{
    ids, require_feasible, require_kind, GadgetObject, HittingSetInstance, Namer, Param,
    ReductionArtifact, ReductionKind, SourceObject,
};
use crate::control::{
    Action, Budget, ControlInstance, ControlSolution, ControlSpec, Goal, Pool,
};
use crate::election::{Ballot, CandidateId, Election, Rule, Voter};
use crate::error::{domain, Error, Result};

fn ranked(order: Vec<CandidateId>) -> Voter {
    Voter::unit(Ballot::ranking(order).expect("distinct candidates"))
}

fn require_k_at_most_m(src: &HittingSetInstance) -> Result<()> {
    if src.k() > src.ground().len() {
        return Err(Error::Precondition(format!(
            "k = {} exceeds the ground set size {}; decide the instance directly",
            src.k(),
            src.ground().len()
        )));
    }
    Ok(())
}

/// Elements `B` plus `c` (the distinguished candidate) and `w`, with
/// `m = |B|`, `n` sets:
///
/// * `2(m - k) + 2n(k + 1) + 4` votes `c > w > B`;
/// * `2n(k + 1) + 5` votes `w > c > B`;
/// * per set, `2(k + 1)` votes `S_i > c > (B - S_i) > w`;
/// * per element, two votes `b_j > w > (B - b_j) > c`.
///
/// The goal is to stop `c` from winning uniquely by deleting candidates.
pub fn hitting_set_to_plurality_dcudc(src: &HittingSetInstance) -> Result<ReductionArtifact> {
    require_k_at_most_m(src)?;
    let elems = ids(src.ground());
    let (m, n, k) = (elems.len(), src.family().len(), src.k());
    let mut namer = Namer::new(src.ground());
    let c = namer.fresh("c");
    let w = namer.fresh("w");

    let mut voters = Vec::new();
    let mut push = |count: usize, order: Vec<CandidateId>| {
        for _ in 0..count {
            voters.push(ranked(order.clone()));
        }
    };
    let g1 = 2 * (m - k) + 2 * n * (k + 1) + 4;
    let g2 = 2 * n * (k + 1) + 5;
    push(g1, [c.clone(), w.clone()].into_iter().chain(elems.iter().cloned()).collect());
    push(g2, [w.clone(), c.clone()].into_iter().chain(elems.iter().cloned()).collect());
    for set in src.family() {
        let mut order: Vec<CandidateId> = set.iter().map(|&j| elems[j].clone()).collect();
        order.push(c.clone());
        order.extend((0..m).filter(|j| set.binary_search(j).is_err()).map(|j| elems[j].clone()));
        order.push(w.clone());
        push(2 * (k + 1), order);
    }
    for j in 0..m {
        let mut order = vec![elems[j].clone(), w.clone()];
        order.extend((0..m).filter(|&i| i != j).map(|i| elems[i].clone()));
        order.push(c.clone());
        push(2, order);
    }
    let g3_end = g1 + g2 + 2 * (k + 1) * n;
    let total = voters.len();

    let mut candidates: BTreeSet<CandidateId> = elems.iter().cloned().collect();
    candidates.insert(c.clone());
    candidates.insert(w.clone());
    let election = Election::new(candidates, voters)?;
    let spec = ControlSpec::new(
        Rule::Plurality,
        Action::DeleteCandidates,
        Goal::Destructive,
        Budget::Unlimited,
        None,
    )?;
    let instance = ControlInstance::new(spec, election, Pool::None, c)?;
    let mut art = ReductionArtifact::new(ReductionKind::HsPluralityDcudc, instance);
    for (j, b) in elems.into_iter().enumerate() {
        art.record(GadgetObject::Candidate(b), SourceObject::Element(j));
    }
    art.param("k", Param::Count(k as u64));
    art.param("w", Param::Candidates(vec![w]));
    art.param("c-over-w", Param::Voters { start: 0, end: g1 });
    art.param("w-over-c", Param::Voters { start: g1, end: g1 + g2 });
    art.param("set-blocks", Param::Voters { start: g1 + g2, end: g3_end });
    art.param("element-blocks", Param::Voters { start: g3_end, end: total });
    Ok(art)
}

/// The surviving elements `B - D`.
pub fn dcudc_solution_to_hitting_set(
    src: &HittingSetInstance,
    art: &ReductionArtifact,
    sol: &ControlSolution,
) -> Result<Vec<usize>> {
    require_kind(art, ReductionKind::HsPluralityDcudc)?;
    require_feasible(art, sol)?;
    let ControlSolution::DeleteCandidates(deleted) = sol else {
        return Err(domain("expected a candidate deletion"));
    };
    Ok((0..src.ground().len())
        .filter(|&j| art.element_candidate(j).is_some_and(|b| !deleted.contains(b)))
        .collect())
}

/// Candidates `p`, one per set `S_l`, `d_1..d_{k+1}` and `e`; voters
///
/// * `x_1`: `S > D - d_1 > p > d_1 > e`;
/// * `x_i` for `2 <= i <= k + 1`: `D - d_i > p > d_i > e > S`;
/// * `y_j` per element: `S - S'_j > e > p > D > S'_j`, where `S'_j` are the sets containing `b_j`.
///
/// `p` can be made the Condorcet winner by deleting voters iff a hitting set
/// of size at most `k` exists.
pub fn hitting_set_to_condorcet_ccudv(src: &HittingSetInstance) -> Result<ReductionArtifact> {
    require_k_at_most_m(src)?;
    let (m, n, k) = (src.ground().len(), src.family().len(), src.k());
    let mut namer = Namer::new(&[]);
    let p = namer.fresh("p");
    let sets: Vec<CandidateId> = (1..=n).map(|l| namer.fresh(&format!("S{l}"))).collect();
    let ds: Vec<CandidateId> = (1..=k + 1).map(|i| namer.fresh(&format!("d{i}"))).collect();
    let e = namer.fresh("e");

    let mut voters = Vec::new();
    for i in 0..=k {
        let others = ds.iter().enumerate().filter(|&(l, _)| l != i).map(|(_, d)| d.clone());
        let order: Vec<CandidateId> = if i == 0 {
            sets.iter()
                .cloned()
                .chain(others)
                .chain([p.clone(), ds[0].clone(), e.clone()])
                .collect()
        } else {
            others
                .chain([p.clone(), ds[i].clone(), e.clone()])
                .chain(sets.iter().cloned())
                .collect()
        };
        voters.push(ranked(order));
    }
    for j in 0..m {
        let contains: Vec<bool> = src.family().iter().map(|s| s.binary_search(&j).is_ok()).collect();
        let order: Vec<CandidateId> = (0..n)
            .filter(|&l| !contains[l])
            .map(|l| sets[l].clone())
            .chain([e.clone(), p.clone()])
            .chain(ds.iter().cloned())
            .chain((0..n).filter(|&l| contains[l]).map(|l| sets[l].clone()))
            .collect();
        voters.push(ranked(order));
    }

    let candidates: BTreeSet<CandidateId> = voters[0].ballot.universe();
    let election = Election::new(candidates, voters)?;
    let spec = ControlSpec::new(
        Rule::Condorcet,
        Action::DeleteVoters,
        Goal::Constructive,
        Budget::Unlimited,
        None,
    )?;
    let instance = ControlInstance::new(spec, election, Pool::None, p)?;
    let mut art = ReductionArtifact::new(ReductionKind::HsCondorcetCcudv, instance);
    for (l, s) in sets.into_iter().enumerate() {
        art.record(GadgetObject::Candidate(s), SourceObject::Set(l));
    }
    for j in 0..m {
        art.record(GadgetObject::Voter(k + 1 + j), SourceObject::Element(j));
    }
    art.param("k", Param::Count(k as u64));
    art.param("D", Param::Candidates(ds));
    art.param("e", Param::Candidates(vec![e]));
    art.param("x", Param::Voters { start: 0, end: k + 1 });
    art.param("y", Param::Voters { start: k + 1, end: k + 1 + m });
    Ok(art)
}

/// Elements whose `y_j` voter was kept.
pub fn condorcet_ccudv_solution_to_hitting_set(
    src: &HittingSetInstance,
    art: &ReductionArtifact,
    sol: &ControlSolution,
) -> Result<Vec<usize>> {
    require_kind(art, ReductionKind::HsCondorcetCcudv)?;
    require_feasible(art, sol)?;
    let ControlSolution::DeleteVoters(deleted) = sol else {
        return Err(domain("expected a voter deletion"));
    };
    let k = src.k();
    Ok((0..src.ground().len())
        .filter(|j| !deleted.contains(&(k + 1 + j)))
        .collect())
}
