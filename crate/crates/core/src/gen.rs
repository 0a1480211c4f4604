//! Seeded random instances for tests, experiments and the CLI.
//!
//! All generators draw from a caller-supplied RNG; [`rng`] gives the
//! canonical seeded one so identical seeds give identical instances.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cip::Cip;
use crate::control::{Action, ControlInstance, ControlSpec, Pool};
use crate::election::{Ballot, CandidateId, Election, Rule, Voter};
use crate::error::{domain, Result};
use crate::reductions::{HittingSetInstance, MkuInstance, MscInstance, X3cInstance};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn random_subset<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

fn nonempty_subset<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut s = random_subset(rng, n);
    if s.is_empty() {
        s.push(rng.gen_range(0..n));
    }
    s
}

/// Set cover over `x1..x{universe}`: each set takes each element with
/// probability 1/2, then every uncovered element joins a random set.
pub fn msc<R: Rng>(rng: &mut R, universe: usize, sets: usize) -> Result<MscInstance> {
    if universe == 0 || sets == 0 {
        return Err(domain("set cover needs at least one element and one set"));
    }
    let mut family: Vec<Vec<usize>> = (0..sets).map(|_| random_subset(rng, universe)).collect();
    for j in 0..universe {
        if !family.iter().any(|s| s.contains(&j)) {
            family[rng.gen_range(0..sets)].push(j);
        }
    }
    MscInstance::new(labels("x", universe), family)
}

/// k-union with nonempty random sets.
pub fn mku<R: Rng>(rng: &mut R, universe: usize, sets: usize, k: usize) -> Result<MkuInstance> {
    if universe == 0 {
        return Err(domain("k-union needs at least one element"));
    }
    let family = (0..sets).map(|_| nonempty_subset(rng, universe)).collect();
    MkuInstance::new(labels("u", universe), family, k)
}

/// Hitting set with nonempty random sets over `b1..b{ground}`.
pub fn hitting_set<R: Rng>(
    rng: &mut R,
    ground: usize,
    sets: usize,
    k: usize,
) -> Result<HittingSetInstance> {
    if ground == 0 {
        return Err(domain("hitting set needs at least one element"));
    }
    let family = (0..sets).map(|_| nonempty_subset(rng, ground)).collect();
    HittingSetInstance::new(labels("b", ground), family, k)
}

/// Exact cover instance over `3k` elements with `sets` random triples. With
/// `plant`, `k` of them form a shuffled exact cover (needs `sets >= k`).
pub fn x3c<R: Rng>(rng: &mut R, k: usize, sets: usize, plant: bool) -> Result<X3cInstance> {
    if k == 0 {
        return Err(domain("k must be positive"));
    }
    if plant && sets < k {
        return Err(domain("planting a cover needs at least k sets"));
    }
    let n = 3 * k;
    let mut family: Vec<Vec<usize>> = Vec::with_capacity(sets);
    if plant {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        family.extend(perm.chunks(3).map(|c| c.to_vec()));
    }
    while family.len() < sets {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(rng);
        family.push(all[..3].to_vec());
    }
    family.shuffle(rng);
    X3cInstance::new(labels("b", n), family, k)
}

/// Random CIP with entries in `0..=max_entry`, demands in `0..=2 * max_entry`,
/// costs in `1..=3` and bounds in `1..=2`.
pub fn cip<R: Rng>(rng: &mut R, rows: usize, cols: usize, max_entry: u64) -> Result<Cip> {
    let a = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(0..=max_entry)).collect())
        .collect();
    let b = (0..rows).map(|_| rng.gen_range(0..=2 * max_entry)).collect();
    let c = (0..cols).map(|_| rng.gen_range(1..=3)).collect();
    let d = (0..cols).map(|_| rng.gen_range(1..=2)).collect();
    Cip::new(a, b, c, d)
}

/// Candidate labels `p, c1, .., c{m-1}`.
pub fn candidate_labels(m: usize) -> Vec<CandidateId> {
    std::iter::once("p".to_string())
        .chain(labels("c", m.saturating_sub(1)))
        .map(|l| CandidateId::from(l.as_str()))
        .collect()
}

/// A uniformly random ballot of the kind `rule` reads, with a weight drawn from `weights`.
pub fn voter<R: Rng>(rng: &mut R, rule: Rule, candidates: &[CandidateId], weights: &[u64]) -> Voter {
    let ballot = if rule.uses_rankings() {
        let mut order = candidates.to_vec();
        order.shuffle(rng);
        Ballot::Ranking(order)
    } else {
        let universe: BTreeSet<CandidateId> = candidates.iter().cloned().collect();
        let approved = candidates.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        Ballot::approval(universe, approved).expect("subset of the universe")
    };
    let w = weights.choose(rng).copied().unwrap_or(1);
    Voter::new(ballot, w).expect("weights are positive")
}

/// Election with candidates `p, c1, ..` and `voters` random ballots.
pub fn election<R: Rng>(
    rng: &mut R,
    rule: Rule,
    candidates: usize,
    voters: usize,
    weights: &[u64],
) -> Result<Election> {
    if candidates == 0 {
        return Err(domain("an election needs at least one candidate"));
    }
    if weights.contains(&0) {
        return Err(domain("weights must be positive"));
    }
    let cands = candidate_labels(candidates);
    let vs = (0..voters).map(|_| voter(rng, rule, &cands, weights)).collect();
    Election::new(cands.into_iter().collect(), vs)
}

/// Control instance for `spec` with distinguished candidate `p`.
///
/// `extra` is the size of the pool: spoiler candidates `a1..` for adding
/// candidates, unregistered voters for adding voters; ignored otherwise.
pub fn control_instance<R: Rng>(
    rng: &mut R,
    spec: ControlSpec,
    candidates: usize,
    voters: usize,
    extra: usize,
    weights: &[u64],
) -> Result<ControlInstance> {
    let p = CandidateId::from("p");
    match spec.action {
        Action::AddCandidates => {
            let spoilers: Vec<CandidateId> =
                labels("a", extra).iter().map(|l| CandidateId::from(l.as_str())).collect();
            let mut all = candidate_labels(candidates);
            all.extend(spoilers.iter().cloned());
            let vs = (0..voters).map(|_| voter(rng, spec.rule, &all, weights)).collect();
            let e = Election::new(all.into_iter().collect(), vs)?;
            ControlInstance::new(spec, e, Pool::Spoilers(spoilers.into_iter().collect()), p)
        }
        Action::AddVoters => {
            let e = election(rng, spec.rule, candidates, voters, weights)?;
            let cands = e.candidate_vec();
            let w = (0..extra).map(|_| voter(rng, spec.rule, &cands, weights)).collect();
            ControlInstance::new(spec, e, Pool::Unregistered(w), p)
        }
        _ => {
            let e = election(rng, spec.rule, candidates, voters, weights)?;
            ControlInstance::new(spec, e, Pool::None, p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(msc(&mut rng(3), 4, 4).unwrap(), msc(&mut rng(3), 4, 4).unwrap());
        let spec = ControlSpec::constructive(Rule::Approval, Action::AddVoters);
        let a = control_instance(&mut rng(9), spec, 3, 4, 2, &[1, 2]).unwrap();
        let b = control_instance(&mut rng(9), spec, 3, 4, 2, &[1, 2]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn planted_covers_exist() {
        let mut r = rng(1);
        for _ in 0..20 {
            let inst = x3c(&mut r, 3, 5, true).unwrap();
            assert!(crate::oracles::exists_x3c(&inst).unwrap());
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(msc(&mut rng(0), 0, 3).is_err());
        assert!(x3c(&mut rng(0), 3, 2, true).is_err());
        assert!(election(&mut rng(0), Rule::Plurality, 0, 1, &[1]).is_err());
        assert!(election(&mut rng(0), Rule::Plurality, 2, 1, &[0]).is_err());
    }

    #[test]
    fn spoilers_join_the_ballots() {
        let spec = ControlSpec::constructive(Rule::Plurality, Action::AddCandidates);
        let inst = control_instance(&mut rng(2), spec, 2, 3, 2, &[1]).unwrap();
        assert_eq!(inst.election().candidates().len(), 4);
        assert_eq!(inst.spoilers().unwrap().len(), 2);
        assert_eq!(inst.registered().len(), 2);
    }
}
