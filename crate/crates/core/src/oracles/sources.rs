//! Exhaustive solvers for the source problems.

use super::{combinations, Nodes, DEFAULT_NODE_BUDGET};
use crate::error::{domain, Result};
use crate::reductions::{HittingSetInstance, MkuInstance, MscInstance, X3cInstance};

fn masks(n: usize, family: &[Vec<usize>]) -> Result<Vec<u128>> {
    if n > 128 {
        return Err(domain("the brute-force oracles handle at most 128 elements"));
    }
    Ok(family
        .iter()
        .map(|s| s.iter().fold(0u128, |m, &j| m | 1 << j))
        .collect())
}

fn full(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// A minimum set cover, lexicographically first among the smallest.
pub fn opt_msc(src: &MscInstance) -> Result<Vec<usize>> {
    let sets = masks(src.universe().len(), src.family())?;
    let target = full(src.universe().len());
    let mut nodes = Nodes::new(DEFAULT_NODE_BUDGET);
    let mut best = None;
    for s in 0..=sets.len() {
        if combinations(sets.len(), s, |chosen| {
            nodes.tick()?;
            if chosen.iter().fold(0, |m, &i| m | sets[i]) == target {
                best = Some(chosen.to_vec());
                return Ok(true);
            }
            Ok(false)
        })? {
            break;
        }
    }
    Ok(best.expect("a valid set cover instance is covered by its whole family"))
}

/// `k` sets with the smallest union, lexicographically first among ties.
pub fn opt_mku(src: &MkuInstance) -> Result<Vec<usize>> {
    let sets = masks(src.universe().len(), src.family())?;
    let mut nodes = Nodes::new(DEFAULT_NODE_BUDGET);
    let mut best: Option<(u32, Vec<usize>)> = None;
    combinations(sets.len(), src.k(), |chosen| {
        nodes.tick()?;
        let size = chosen.iter().fold(0, |m, &i| m | sets[i]).count_ones();
        if best.as_ref().is_none_or(|(b, _)| size < *b) {
            best = Some((size, chosen.to_vec()));
        }
        Ok(false)
    })?;
    Ok(best.expect("1 <= k <= m").1)
}

/// A minimum hitting set (ignoring `k`), or `None` when some set is empty.
pub fn opt_hitting_set(src: &HittingSetInstance) -> Result<Option<Vec<usize>>> {
    let m = src.ground().len();
    let sets = masks(m, src.family())?;
    if sets.contains(&0) {
        return Ok(None);
    }
    let mut nodes = Nodes::new(DEFAULT_NODE_BUDGET);
    let mut best = None;
    for s in 0..=m {
        if combinations(m, s, |chosen| {
            nodes.tick()?;
            let pick = chosen.iter().fold(0u128, |acc, &j| acc | 1 << j);
            if sets.iter().all(|&set| set & pick != 0) {
                best = Some(chosen.to_vec());
                return Ok(true);
            }
            Ok(false)
        })? {
            break;
        }
    }
    Ok(best)
}

/// Whether `k` pairwise disjoint members cover the ground set.
pub fn exists_x3c(src: &X3cInstance) -> Result<bool> {
    Ok(find_x3c(src)?.is_some())
}

/// The lexicographically first exact cover, if any.
pub fn find_x3c(src: &X3cInstance) -> Result<Option<Vec<usize>>> {
    let sets = masks(src.ground().len(), src.family())?;
    let target = full(src.ground().len());
    let mut nodes = Nodes::new(DEFAULT_NODE_BUDGET);
    let mut cover = None;
    combinations(sets.len(), src.k(), |chosen| {
        nodes.tick()?;
        // k triples reaching all 3k elements are necessarily disjoint.
        if chosen.iter().fold(0, |m, &i| m | sets[i]) == target {
            cover = Some(chosen.to_vec());
            return Ok(true);
        }
        Ok(false)
    })?;
    Ok(cover)
}
