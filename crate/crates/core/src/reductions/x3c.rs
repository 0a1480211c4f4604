//! Exact cover by 3-sets to Condorcet control by adding voters.

use std::collections::BTreeSet;

use super::{
    ids, require_feasible, require_kind, GadgetObject, Namer, Param, ReductionArtifact,
    ReductionKind, SourceObject, X3cInstance,
};
use crate::control::{
    Action, Budget, ControlInstance, ControlSolution, ControlSpec, Goal, Pool,
};
use crate::election::{Ballot, CandidateId, Election, Rule, Voter};
use crate::error::{domain, Error, Result};

fn ranked(order: Vec<CandidateId>) -> Voter {
    Voter::unit(Ballot::ranking(order).expect("distinct candidates"))
}

/// Candidates `B ∪ {c, p}`; registered voters are `k - 1` copies of
/// `B > p > c` and two of `p > c > B`; each set contributes an unregistered
/// voter `S_i > c > p > (B - S_i)`. Requires `k >= 3`.
pub fn x3c_to_condorcet_ccuav(src: &X3cInstance) -> Result<ReductionArtifact> {
    let k = src.k();
    if k < 3 {
        return Err(Error::Precondition(format!(
            "exact cover with k = {k} < 3 has no gadget; decide the instance directly"
        )));
    }
    let elems = ids(src.ground());
    let mut namer = Namer::new(src.ground());
    let c = namer.fresh("c");
    let p = namer.fresh("p");

    let mut voters = Vec::new();
    let high: Vec<CandidateId> = elems.iter().cloned().chain([p.clone(), c.clone()]).collect();
    for _ in 0..k - 1 {
        voters.push(ranked(high.clone()));
    }
    let low: Vec<CandidateId> = [p.clone(), c.clone()].into_iter().chain(elems.iter().cloned()).collect();
    for _ in 0..2 {
        voters.push(ranked(low.clone()));
    }
    let w: Vec<Voter> = src
        .family()
        .iter()
        .map(|set| {
            let order = set
                .iter()
                .map(|&j| elems[j].clone())
                .chain([c.clone(), p.clone()])
                .chain((0..elems.len()).filter(|j| set.binary_search(j).is_err()).map(|j| elems[j].clone()))
                .collect();
            ranked(order)
        })
        .collect();

    let candidates: BTreeSet<CandidateId> = low.into_iter().collect();
    let election = Election::new(candidates, voters)?;
    let spec = ControlSpec::new(
        Rule::Condorcet,
        Action::AddVoters,
        Goal::Constructive,
        Budget::Unlimited,
        None,
    )?;
    let instance = ControlInstance::new(spec, election, Pool::Unregistered(w), p)?;
    let mut art = ReductionArtifact::new(ReductionKind::X3cCondorcetCcuav, instance);
    for (j, b) in elems.into_iter().enumerate() {
        art.record(GadgetObject::Candidate(b), SourceObject::Element(j));
    }
    for i in 0..src.family().len() {
        art.record(GadgetObject::Unregistered(i), SourceObject::Set(i));
    }
    art.param("k", Param::Count(k as u64));
    art.param("c", Param::Candidates(vec![c]));
    Ok(art)
}

/// Sets whose voters were added.
pub fn ccuav_solution_to_x3c(
    src: &X3cInstance,
    art: &ReductionArtifact,
    sol: &ControlSolution,
) -> Result<Vec<usize>> {
    require_kind(art, ReductionKind::X3cCondorcetCcuav)?;
    require_feasible(art, sol)?;
    let ControlSolution::AddVoters(added) = sol else {
        return Err(domain("expected a voter addition"));
    };
    let sets: Vec<usize> = added.iter().copied().collect();
    debug_assert!(src.is_exact_cover(&sets).unwrap_or(false));
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::is_feasible;
    use crate::election::pairwise_among;

    fn nine(family: Vec<Vec<usize>>) -> X3cInstance {
        X3cInstance::new((1..=9).map(|i| format!("b{i}")).collect(), family, 3).unwrap()
    }

    /// Net margins of `p` over everyone after adding `added`.
    fn margins(art: &ReductionArtifact, added: &[usize]) -> Vec<(CandidateId, i64)> {
        let inst = &art.instance;
        let active = inst.election().candidate_vec();
        let voters = inst
            .election()
            .voters()
            .iter()
            .chain(added.iter().map(|&i| &inst.unregistered()[i]));
        let m = pairwise_among(&active, voters).unwrap();
        let pi = active.binary_search(inst.p()).unwrap();
        active
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pi)
            .map(|(i, c)| (c.clone(), m[pi][i]))
            .collect()
    }

    #[test]
    fn exact_cover_gives_margin_one_over_elements() {
        let src = nine(vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]);
        let art = x3c_to_condorcet_ccuav(&src).unwrap();
        for (c, margin) in margins(&art, &[0, 1, 2]) {
            if c.as_str() == "c" {
                assert!(margin > 0);
            } else {
                assert_eq!(margin, 1, "{c}");
            }
        }
        let sol = ControlSolution::AddVoters([0, 1, 2].into());
        assert!(is_feasible(&art.instance, &sol).unwrap());
        assert_eq!(ccuav_solution_to_x3c(&src, &art, &sol).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn too_many_voters_lose_to_c() {
        let src = nine(vec![
            vec![0, 1, 2],
            vec![3, 4, 5],
            vec![6, 7, 8],
            vec![0, 3, 6],
            vec![1, 4, 7],
        ]);
        let art = x3c_to_condorcet_ccuav(&src).unwrap();
        let vs_c = |added: &[usize]| {
            margins(&art, added)
                .into_iter()
                .find(|(c, _)| c.as_str() == "c")
                .unwrap()
                .1
        };
        // p starts k + 1 ahead of c and every added voter costs one.
        assert_eq!(vs_c(&[]), 4);
        assert_eq!(vs_c(&[0, 1, 2, 3]), 0);
        assert_eq!(vs_c(&[0, 1, 2, 3, 4]), -1);
    }

    #[test]
    fn small_k_is_a_precondition_error() {
        let src = X3cInstance::new(
            (1..=3).map(|i| format!("b{i}")).collect(),
            vec![vec![0, 1, 2]],
            1,
        )
        .unwrap();
        assert!(matches!(x3c_to_condorcet_ccuav(&src), Err(Error::Precondition(_))));
    }
}
