//! Minimum set cover to approval control by adding or deleting voters.

use std::collections::BTreeSet;

use super::{
    ids, require_feasible, require_kind, GadgetObject, MscInstance, Namer, Param,
    ReductionArtifact, ReductionKind, SourceObject,
};
use crate::control::{Action, ControlInstance, ControlSolution, ControlSpec, Pool};
use crate::election::{Ballot, CandidateId, Election, Rule, Voter};
use crate::error::{domain, Result};

fn approval_voter(universe: &BTreeSet<CandidateId>, approved: BTreeSet<CandidateId>) -> Voter {
    Voter::unit(Ballot::approval(universe.clone(), approved).expect("approved within universe"))
}

/// `C = U ∪ {p}`, no registered voters, and one unregistered voter per set
/// approving `C - S_i`.
pub fn msc_to_approval_ccav(src: &MscInstance) -> Result<ReductionArtifact> {
    let elems = ids(src.universe());
    let p = Namer::new(src.universe()).fresh("p");
    let mut candidates: BTreeSet<CandidateId> = elems.iter().cloned().collect();
    candidates.insert(p.clone());

    let w: Vec<Voter> = src
        .family()
        .iter()
        .map(|set| {
            let mut approved = candidates.clone();
            for &j in set {
                approved.remove(&elems[j]);
            }
            approval_voter(&candidates, approved)
        })
        .collect();

    let election = Election::new(candidates, Vec::new())?;
    let spec = ControlSpec::constructive(Rule::Approval, Action::AddVoters);
    let instance = ControlInstance::new(spec, election, Pool::Unregistered(w), p)?;
    let mut art = ReductionArtifact::new(ReductionKind::MscCcav, instance);
    for (j, c) in elems.into_iter().enumerate() {
        art.record(GadgetObject::Candidate(c), SourceObject::Element(j));
    }
    for i in 0..src.family().len() {
        art.record(GadgetObject::Unregistered(i), SourceObject::Set(i));
    }
    Ok(art)
}

/// Sets whose voters were added.
pub fn ccav_solution_to_msc(
    src: &MscInstance,
    art: &ReductionArtifact,
    sol: &ControlSolution,
) -> Result<Vec<usize>> {
    require_kind(art, ReductionKind::MscCcav)?;
    require_feasible(art, sol)?;
    let ControlSolution::AddVoters(added) = sol else {
        return Err(domain("expected a voter addition"));
    };
    let sets = sets_of(art, added.iter().map(|&i| GadgetObject::Unregistered(i)));
    debug_assert!(src.covers(&sets).unwrap_or(false));
    Ok(sets)
}

fn sets_of(art: &ReductionArtifact, objects: impl Iterator<Item = GadgetObject>) -> Vec<usize> {
    let sets: BTreeSet<usize> = objects
        .filter_map(|g| match art.source_of(&g) {
            Some(SourceObject::Set(i)) => Some(i),
            _ => None,
        })
        .collect();
    sets.into_iter().collect()
}

/// `C = U ∪ {p}`. One voter per set approving exactly its elements, then `k`
/// padding voters (k the largest element frequency) so that every candidate,
/// `p` included, ends with `k` approvals. Padding voter `t` (1-based)
/// approves `p` and every element whose frequency is at most `k - t`.
pub fn msc_to_approval_ccdv(src: &MscInstance) -> Result<ReductionArtifact> {
    let elems = ids(src.universe());
    let p = Namer::new(src.universe()).fresh("p");
    let mut candidates: BTreeSet<CandidateId> = elems.iter().cloned().collect();
    candidates.insert(p.clone());

    let mut freq = vec![0usize; elems.len()];
    for &j in src.family().iter().flatten() {
        freq[j] += 1;
    }
    let k = freq.iter().copied().max().unwrap_or(0);

    let mut voters: Vec<Voter> = src
        .family()
        .iter()
        .map(|set| approval_voter(&candidates, set.iter().map(|&j| elems[j].clone()).collect()))
        .collect();
    let m = voters.len();
    for t in 1..=k {
        let mut approved: BTreeSet<CandidateId> = (0..elems.len())
            .filter(|&j| k - freq[j] >= t)
            .map(|j| elems[j].clone())
            .collect();
        approved.insert(p.clone());
        voters.push(approval_voter(&candidates, approved));
    }

    let election = Election::new(candidates, voters)?;
    let spec = ControlSpec::constructive(Rule::Approval, Action::DeleteVoters);
    let instance = ControlInstance::new(spec, election, Pool::None, p)?;
    let mut art = ReductionArtifact::new(ReductionKind::MscCcdv, instance);
    for (j, c) in elems.into_iter().enumerate() {
        art.record(GadgetObject::Candidate(c), SourceObject::Element(j));
    }
    for i in 0..m {
        art.record(GadgetObject::Voter(i), SourceObject::Set(i));
    }
    art.param("k", Param::Count(k as u64));
    art.param("type-1", Param::Voters { start: 0, end: m });
    art.param("padding", Param::Voters { start: m, end: m + k });
    Ok(art)
}

/// Sets whose voters were deleted; deleted padding voters are ignored.
pub fn ccdv_solution_to_msc(
    src: &MscInstance,
    art: &ReductionArtifact,
    sol: &ControlSolution,
) -> Result<Vec<usize>> {
    require_kind(art, ReductionKind::MscCcdv)?;
    require_feasible(art, sol)?;
    let ControlSolution::DeleteVoters(deleted) = sol else {
        return Err(domain("expected a voter deletion"));
    };
    let sets = sets_of(art, deleted.iter().map(|&i| GadgetObject::Voter(i)));
    debug_assert!(src.covers(&sets).unwrap_or(false));
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{approval_scores, candidate_set};
    use crate::error::Error;

    fn msc(n: usize, family: Vec<Vec<usize>>) -> MscInstance {
        MscInstance::new((1..=n).map(|i| format!("x{i}")).collect(), family).unwrap()
    }

    fn approved(v: &Voter) -> BTreeSet<CandidateId> {
        v.ballot.as_approval().unwrap().approved().clone()
    }

    #[test]
    fn ccav_singleton() {
        let src = msc(1, vec![vec![0]]);
        let art = msc_to_approval_ccav(&src).unwrap();
        let inst = &art.instance;
        assert_eq!(inst.election().candidates(), &candidate_set(["x1", "p"]));
        assert!(inst.election().voters().is_empty());
        assert_eq!(inst.unregistered().len(), 1);
        assert_eq!(approved(&inst.unregistered()[0]), candidate_set(["p"]));

        let sol = ControlSolution::AddVoters([0].into());
        assert_eq!(ccav_solution_to_msc(&src, &art, &sol).unwrap(), vec![0]);
        let empty = ControlSolution::AddVoters(BTreeSet::new());
        assert!(matches!(ccav_solution_to_msc(&src, &art, &empty), Err(Error::Domain(_))));
    }

    #[test]
    fn ccav_two_singletons() {
        let src = msc(2, vec![vec![0], vec![1]]);
        let art = msc_to_approval_ccav(&src).unwrap();
        let w = art.instance.unregistered();
        assert_eq!(approved(&w[0]), candidate_set(["x2", "p"]));
        assert_eq!(approved(&w[1]), candidate_set(["x1", "p"]));
        let all = ControlSolution::AddVoters([0, 1].into());
        assert_eq!(ccav_solution_to_msc(&src, &art, &all).unwrap(), vec![0, 1]);
    }

    #[test]
    fn p_is_renamed_on_collision() {
        let src = MscInstance::new(vec!["p".into()], vec![vec![0]]).unwrap();
        let art = msc_to_approval_ccav(&src).unwrap();
        assert_eq!(art.instance.p().as_str(), "p'");
        assert_eq!(art.element_candidate(0).unwrap().as_str(), "p");
    }

    #[test]
    fn ccdv_padding_levels_scores() {
        let src = msc(1, vec![vec![0]]);
        let art = msc_to_approval_ccdv(&src).unwrap();
        let v = art.instance.election().voters();
        assert_eq!(v.len(), 2);
        assert_eq!(approved(&v[1]), candidate_set(["p"]));
        assert!(approval_scores(art.instance.election()).unwrap().values().all(|&s| s == 1));

        // x1 lies in both sets, x2 in one: k = 2.
        let src = msc(2, vec![vec![0, 1], vec![0]]);
        let art = msc_to_approval_ccdv(&src).unwrap();
        assert_eq!(art.count("k"), Some(2));
        let v = art.instance.election().voters();
        assert_eq!(approved(&v[2]), candidate_set(["p", "x2"]));
        assert_eq!(approved(&v[3]), candidate_set(["p"]));
        assert!(approval_scores(art.instance.election()).unwrap().values().all(|&s| s == 2));
    }

    #[test]
    fn ccdv_mapback_ignores_padding() {
        let src = msc(1, vec![vec![0]]);
        let art = msc_to_approval_ccdv(&src).unwrap();
        let sol = ControlSolution::DeleteVoters([0].into());
        assert_eq!(ccdv_solution_to_msc(&src, &art, &sol).unwrap(), vec![0]);

        let src = msc(2, vec![vec![0, 1], vec![0]]);
        let art = msc_to_approval_ccdv(&src).unwrap();
        // The last padding voter approves only p; deleting it leaves a three-way tie.
        let bad = ControlSolution::DeleteVoters([0, 3].into());
        assert!(ccdv_solution_to_msc(&src, &art, &bad).is_err());
        let ok = ControlSolution::DeleteVoters([0].into());
        assert_eq!(ccdv_solution_to_msc(&src, &art, &ok).unwrap(), vec![0]);
        let ok = ControlSolution::DeleteVoters([0, 1].into());
        assert_eq!(ccdv_solution_to_msc(&src, &art, &ok).unwrap(), vec![0, 1]);
    }
}
