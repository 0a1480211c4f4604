//! Source problems: minimum set cover, minimum k-union, hitting set and
//! exact cover by 3-sets. Elements carry string labels; sets are sorted
//! vectors of element indices.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{domain, Result};

fn check_labels(labels: &[String], what: &str) -> Result<()> {
    if labels.iter().any(|l| l.is_empty()) {
        return Err(domain(format!("{what} labels must be nonempty")));
    }
    let distinct: BTreeSet<&String> = labels.iter().collect();
    if distinct.len() != labels.len() {
        return Err(domain(format!("{what} labels must be distinct")));
    }
    Ok(())
}

fn normalize_family(n: usize, family: Vec<Vec<usize>>) -> Result<Vec<Vec<usize>>> {
    family
        .into_iter()
        .enumerate()
        .map(|(i, mut set)| {
            if let Some(&x) = set.iter().find(|&&x| x >= n) {
                return Err(domain(format!("set {i} names element {x}, but there are only {n}")));
            }
            set.sort_unstable();
            set.dedup();
            Ok(set)
        })
        .collect()
}

fn union_of<'a>(sets: impl IntoIterator<Item = &'a Vec<usize>>) -> BTreeSet<usize> {
    sets.into_iter().flatten().copied().collect()
}

fn check_choice(m: usize, choice: &[usize]) -> Result<()> {
    if let Some(&i) = choice.iter().find(|&&i| i >= m) {
        return Err(domain(format!("set index {i} out of range")));
    }
    Ok(())
}

/// Minimum set cover: a universe and a family whose union is the universe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MscInstance {
    universe: Vec<String>,
    family: Vec<Vec<usize>>,
}

impl MscInstance {
    pub fn new(universe: Vec<String>, family: Vec<Vec<usize>>) -> Result<Self> {
        check_labels(&universe, "element")?;
        if universe.is_empty() || family.is_empty() {
            return Err(domain("set cover needs a nonempty universe and family"));
        }
        let family = normalize_family(universe.len(), family)?;
        if union_of(&family).len() != universe.len() {
            return Err(domain("the family does not cover the universe"));
        }
        Ok(MscInstance { universe, family })
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn family(&self) -> &[Vec<usize>] {
        &self.family
    }

    /// Whether the chosen sets cover the universe.
    pub fn covers(&self, choice: &[usize]) -> Result<bool> {
        check_choice(self.family.len(), choice)?;
        Ok(union_of(choice.iter().map(|&i| &self.family[i])).len() == self.universe.len())
    }
}

/// Minimum k-union: choose `k` sets minimizing the size of their union.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MkuInstance {
    universe: Vec<String>,
    family: Vec<Vec<usize>>,
    k: usize,
}

impl MkuInstance {
    pub fn new(universe: Vec<String>, family: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        check_labels(&universe, "element")?;
        if universe.is_empty() {
            return Err(domain("k-union needs a nonempty universe"));
        }
        let family = normalize_family(universe.len(), family)?;
        if family.iter().any(|s| s.is_empty()) {
            return Err(domain("k-union sets must be nonempty"));
        }
        if k == 0 || k > family.len() {
            return Err(domain(format!("k = {k} must lie in 1..={}", family.len())));
        }
        Ok(MkuInstance { universe, family, k })
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn family(&self) -> &[Vec<usize>] {
        &self.family
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Size of the union of the chosen sets.
    pub fn union_size(&self, choice: &[usize]) -> Result<usize> {
        check_choice(self.family.len(), choice)?;
        Ok(union_of(choice.iter().map(|&i| &self.family[i])).len())
    }
}

/// Hitting set: is there a set of at most `k` elements meeting every member?
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HittingSetInstance {
    ground: Vec<String>,
    family: Vec<Vec<usize>>,
    k: usize,
}

impl HittingSetInstance {
    pub fn new(ground: Vec<String>, family: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        check_labels(&ground, "element")?;
        if k == 0 {
            return Err(domain("k must be positive"));
        }
        let family = normalize_family(ground.len(), family)?;
        Ok(HittingSetInstance { ground, family, k })
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn family(&self) -> &[Vec<usize>] {
        &self.family
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Whether `elements` meets every set (size is not checked).
    pub fn hits_all(&self, elements: &[usize]) -> Result<bool> {
        if let Some(&j) = elements.iter().find(|&&j| j >= self.ground.len()) {
            return Err(domain(format!("element index {j} out of range")));
        }
        let chosen: BTreeSet<usize> = elements.iter().copied().collect();
        Ok(self
            .family
            .iter()
            .all(|s| s.iter().any(|j| chosen.contains(j))))
    }
}

/// Exact cover by 3-sets over a ground set of size `3k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct X3cInstance {
    ground: Vec<String>,
    family: Vec<Vec<usize>>,
    k: usize,
}

impl X3cInstance {
    pub fn new(ground: Vec<String>, family: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        check_labels(&ground, "element")?;
        if k == 0 || ground.len() != 3 * k {
            return Err(domain(format!(
                "the ground set has {} elements, expected 3k with k = {k} > 0",
                ground.len()
            )));
        }
        let family = normalize_family(ground.len(), family)?;
        if let Some(i) = family.iter().position(|s| s.len() != 3) {
            return Err(domain(format!("set {i} does not have exactly three elements")));
        }
        Ok(X3cInstance { ground, family, k })
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn family(&self) -> &[Vec<usize>] {
        &self.family
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Whether the chosen sets are pairwise disjoint and cover the ground set.
    pub fn is_exact_cover(&self, choice: &[usize]) -> Result<bool> {
        check_choice(self.family.len(), choice)?;
        let distinct: BTreeSet<usize> = choice.iter().copied().collect();
        let u = union_of(distinct.iter().map(|&i| &self.family[i]));
        Ok(distinct.len() == self.k && u.len() == self.ground.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "body", rename_all = "kebab-case")]
pub enum SourceInstance {
    Msc(MscInstance),
    Mku(MkuInstance),
    HittingSet(HittingSetInstance),
    X3c(X3cInstance),
}

impl SourceInstance {
    pub fn kind(&self) -> &'static str {
        match self {
            SourceInstance::Msc(_) => "msc",
            SourceInstance::Mku(_) => "mku",
            SourceInstance::HittingSet(_) => "hitting-set",
            SourceInstance::X3c(_) => "x3c",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn msc_validation() {
        assert!(MscInstance::new(labels(1), vec![]).is_err());
        assert!(MscInstance::new(labels(2), vec![vec![0]]).is_err());
        assert!(MscInstance::new(labels(1), vec![vec![1]]).is_err());
        assert!(MscInstance::new(vec!["a".into(), "a".into()], vec![vec![0, 1]]).is_err());
        let i = MscInstance::new(labels(2), vec![vec![1, 0, 1]]).unwrap();
        assert_eq!(i.family(), &[vec![0, 1]]);
        assert!(i.covers(&[0]).unwrap());
        assert!(!i.covers(&[]).unwrap());
    }

    #[test]
    fn mku_validation() {
        assert!(MkuInstance::new(labels(2), vec![vec![0], vec![]], 1).is_err());
        assert!(MkuInstance::new(labels(2), vec![vec![0]], 2).is_err());
        assert!(MkuInstance::new(labels(2), vec![vec![0]], 0).is_err());
        let i = MkuInstance::new(labels(3), vec![vec![0, 1], vec![1, 2]], 2).unwrap();
        assert_eq!(i.union_size(&[0, 1]).unwrap(), 3);
    }

    #[test]
    fn x3c_validation() {
        assert!(X3cInstance::new(labels(4), vec![], 1).is_err());
        assert!(X3cInstance::new(labels(3), vec![vec![0, 1]], 1).is_err());
        let i = X3cInstance::new(labels(3), vec![vec![0, 1, 2]], 1).unwrap();
        assert!(i.is_exact_cover(&[0]).unwrap());
        let i = X3cInstance::new(labels(6), vec![vec![0, 1, 2], vec![2, 3, 4], vec![3, 4, 5]], 2)
            .unwrap();
        assert!(i.is_exact_cover(&[0, 2]).unwrap());
        assert!(!i.is_exact_cover(&[0, 1]).unwrap());
    }

    #[test]
    fn hitting_set_checks() {
        assert!(HittingSetInstance::new(labels(2), vec![], 0).is_err());
        let i = HittingSetInstance::new(labels(3), vec![vec![0, 1], vec![2]], 2).unwrap();
        assert!(i.hits_all(&[1, 2]).unwrap());
        assert!(!i.hits_all(&[0, 1]).unwrap());
        assert!(i.hits_all(&[5]).is_err());
    }
}
