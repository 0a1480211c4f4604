//! Minimum k-union to plurality control by deleting candidates.

use std::collections::BTreeSet;

use super::{
    ids, require_feasible, require_kind, GadgetObject, MkuInstance, Namer, Param,
    ReductionArtifact, ReductionKind, SourceObject,
};
use crate::control::{Action, ControlInstance, ControlSolution, ControlSpec, Pool};
use crate::election::{Ballot, CandidateId, Election, Rule, Voter};
use crate::error::{domain, Error, Result};

fn ranked(order: Vec<CandidateId>) -> Voter {
    Voter::unit(Ballot::ranking(order).expect("distinct candidates"))
}

/// `C = U ∪ {b_1..b_{n+1}} ∪ {p}` with `N` the largest element frequency:
///
/// * per set, `S_i > p > (rest of U) > B`;
/// * `k - 1 + N` votes `B > U > p`;
/// * `N` votes `p > U > B`.
///
/// Requires `k > 1`; with `k = 1` the source is solved directly.
pub fn mku_to_plurality_ccdc(src: &MkuInstance) -> Result<ReductionArtifact> {
    let k = src.k();
    if k <= 1 {
        return Err(Error::Precondition(
            "k-union with k = 1 has no gadget; use the oracle".into(),
        ));
    }
    let elems = ids(src.universe());
    let n = elems.len();
    let mut namer = Namer::new(src.universe());
    let buffers: Vec<CandidateId> = (1..=n + 1).map(|i| namer.fresh(&format!("b{i}"))).collect();
    let p = namer.fresh("p");

    let mut freq = vec![0usize; n];
    for &j in src.family().iter().flatten() {
        freq[j] += 1;
    }
    let big_n = freq.iter().copied().max().unwrap_or(0);

    let mut voters = Vec::new();
    for set in src.family() {
        let mut order: Vec<CandidateId> = set.iter().map(|&j| elems[j].clone()).collect();
        order.push(p.clone());
        order.extend((0..n).filter(|j| set.binary_search(j).is_err()).map(|j| elems[j].clone()));
        order.extend(buffers.iter().cloned());
        voters.push(ranked(order));
    }
    let m = voters.len();
    let type2: Vec<CandidateId> = buffers
        .iter()
        .chain(&elems)
        .chain(std::iter::once(&p))
        .cloned()
        .collect();
    for _ in 0..(k - 1 + big_n) {
        voters.push(ranked(type2.clone()));
    }
    let type3: Vec<CandidateId> = std::iter::once(&p)
        .chain(&elems)
        .chain(&buffers)
        .cloned()
        .collect();
    for _ in 0..big_n {
        voters.push(ranked(type3.clone()));
    }
    let total = voters.len();

    let candidates: BTreeSet<CandidateId> = type3.iter().cloned().collect();
    let election = Election::new(candidates, voters)?;
    let spec = ControlSpec::constructive(Rule::Plurality, Action::DeleteCandidates);
    let instance = ControlInstance::new(spec, election, Pool::None, p)?;
    let mut art = ReductionArtifact::new(ReductionKind::MkuCcdc, instance);
    for (j, c) in elems.into_iter().enumerate() {
        art.record(GadgetObject::Candidate(c), SourceObject::Element(j));
    }
    for i in 0..m {
        art.record(GadgetObject::Voter(i), SourceObject::Set(i));
    }
    let type2_end = m + k - 1 + big_n;
    art.param("N", Param::Count(big_n as u64));
    art.param("k", Param::Count(k as u64));
    art.param("buffers", Param::Candidates(buffers));
    art.param("type-1", Param::Voters { start: 0, end: m });
    art.param("type-2", Param::Voters { start: m, end: type2_end });
    art.param("type-3", Param::Voters { start: type2_end, end: total });
    Ok(art)
}

/// The `k` lowest-indexed sets lying entirely inside the deletion set.
pub fn ccdc_solution_to_mku(
    src: &MkuInstance,
    art: &ReductionArtifact,
    sol: &ControlSolution,
) -> Result<Vec<usize>> {
    require_kind(art, ReductionKind::MkuCcdc)?;
    require_feasible(art, sol)?;
    let ControlSolution::DeleteCandidates(deleted) = sol else {
        return Err(domain("expected a candidate deletion"));
    };
    let inside = sets_inside(src, art, deleted);
    if inside.len() < src.k() {
        return Err(domain(format!(
            "only {} sets lie inside the deletion set, fewer than k = {}",
            inside.len(),
            src.k()
        )));
    }
    Ok(inside[..src.k()].to_vec())
}

/// Indices of the sets all of whose elements were deleted.
pub fn sets_inside(
    src: &MkuInstance,
    art: &ReductionArtifact,
    deleted: &BTreeSet<CandidateId>,
) -> Vec<usize> {
    let gone: BTreeSet<usize> = (0..src.universe().len())
        .filter(|&j| art.element_candidate(j).is_some_and(|c| deleted.contains(c)))
        .collect();
    (0..src.family().len())
        .filter(|&i| src.family()[i].iter().all(|j| gone.contains(j)))
        .collect()
}
