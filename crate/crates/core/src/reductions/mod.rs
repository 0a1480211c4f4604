//! Gadget reductions from classic covering problems to election control.
//!
//! Each reduction has a forward map `f` (source instance to
//! [`ReductionArtifact`]) and, where the target is an optimization problem, a
//! solution map `g` taking a feasible control solution back to a source
//! solution. Rankings left open by a construction ("the rest in any order")
//! are completed canonically: named blocks in ascending source index, then
//! elements ascending, then auxiliary candidates, so outputs are reproducible.

mod hitting;
mod mku;
mod msc;
mod sources;
mod x3c;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::control::{is_feasible, ControlInstance, ControlSolution};
use crate::election::CandidateId;
use crate::error::{domain, Error, Result};

pub use hitting::{
    condorcet_ccudv_solution_to_hitting_set, dcudc_solution_to_hitting_set,
    hitting_set_to_condorcet_ccudv, hitting_set_to_plurality_dcudc,
};
pub use mku::{ccdc_solution_to_mku, mku_to_plurality_ccdc, sets_inside};
pub use msc::{ccav_solution_to_msc, ccdv_solution_to_msc, msc_to_approval_ccav, msc_to_approval_ccdv};
pub use sources::{HittingSetInstance, MkuInstance, MscInstance, SourceInstance, X3cInstance};
pub use x3c::{ccuav_solution_to_x3c, x3c_to_condorcet_ccuav};

/// The six constructions, by stable id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReductionKind {
    MscCcav,
    MscCcdv,
    MkuCcdc,
    HsPluralityDcudc,
    X3cCondorcetCcuav,
    HsCondorcetCcudv,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 6] = [
        ReductionKind::MscCcav,
        ReductionKind::MscCcdv,
        ReductionKind::MkuCcdc,
        ReductionKind::HsPluralityDcudc,
        ReductionKind::X3cCondorcetCcuav,
        ReductionKind::HsCondorcetCcudv,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ReductionKind::MscCcav => "msc-ccav",
            ReductionKind::MscCcdv => "msc-ccdv",
            ReductionKind::MkuCcdc => "mku-ccdc",
            ReductionKind::HsPluralityDcudc => "hs-plurality-dcudc",
            ReductionKind::X3cCondorcetCcuav => "x3c-condorcet-ccuav",
            ReductionKind::HsCondorcetCcudv => "hs-condorcet-ccudv",
        }
    }

    /// Source problem name as used in documents ("msc", "mku", "hitting-set", "x3c").
    pub fn source(self) -> &'static str {
        match self {
            ReductionKind::MscCcav | ReductionKind::MscCcdv => "msc",
            ReductionKind::MkuCcdc => "mku",
            ReductionKind::HsPluralityDcudc | ReductionKind::HsCondorcetCcudv => "hitting-set",
            ReductionKind::X3cCondorcetCcuav => "x3c",
        }
    }

    /// Target problem name ("approval-ccav", "plurality-dcudc", ...).
    pub fn target(self) -> &'static str {
        match self {
            ReductionKind::MscCcav => "approval-ccav",
            ReductionKind::MscCcdv => "approval-ccdv",
            ReductionKind::MkuCcdc => "plurality-ccdc",
            ReductionKind::HsPluralityDcudc => "plurality-dcudc",
            ReductionKind::X3cCondorcetCcuav => "condorcet-ccuav",
            ReductionKind::HsCondorcetCcudv => "condorcet-ccudv",
        }
    }

    /// Looks a reduction up by its source and target names.
    pub fn from_pair(source: &str, target: &str) -> Option<Self> {
        let target = target.to_ascii_lowercase();
        ReductionKind::ALL
            .into_iter()
            .find(|k| k.source() == source && k.target() == target)
    }

    /// Strict reductions between optimization problems; the others only
    /// preserve yes/no answers.
    pub fn is_strict(self) -> bool {
        matches!(
            self,
            ReductionKind::MscCcav | ReductionKind::MscCcdv | ReductionKind::MkuCcdc
        )
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ReductionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReductionKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| domain(format!("unknown reduction {s:?}")))
    }
}

/// A gadget object: a candidate, a registered voter or an unregistered voter (by index).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "gadget", content = "id")]
pub enum GadgetObject {
    Candidate(CandidateId),
    Voter(usize),
    Unregistered(usize),
}

/// An object of the source instance, by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "source", content = "index")]
pub enum SourceObject {
    Element(usize),
    Set(usize),
}

/// Recorded gadget constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Count(u64),
    Candidates(Vec<CandidateId>),
    /// A block of consecutive registered voters, `start..end`.
    Voters { start: usize, end: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionArtifact {
    pub kind: ReductionKind,
    pub instance: ControlInstance,
    /// Gadget objects standing for one source object each; injective.
    pub provenance: BTreeMap<GadgetObject, SourceObject>,
    pub parameters: BTreeMap<String, Param>,
}

impl ReductionArtifact {
    fn new(kind: ReductionKind, instance: ControlInstance) -> Self {
        ReductionArtifact {
            kind,
            instance,
            provenance: BTreeMap::new(),
            parameters: BTreeMap::new(),
        }
    }

    fn param(&mut self, name: &str, value: Param) {
        self.parameters.insert(name.to_string(), value);
    }

    fn record(&mut self, gadget: GadgetObject, source: SourceObject) {
        let prev = self.provenance.insert(gadget, source);
        debug_assert!(prev.is_none());
    }

    /// Candidate standing for source element `j`.
    pub fn element_candidate(&self, j: usize) -> Option<&CandidateId> {
        self.provenance.iter().find_map(|(g, s)| match (g, s) {
            (GadgetObject::Candidate(c), SourceObject::Element(i)) if *i == j => Some(c),
            _ => None,
        })
    }

    pub fn source_of(&self, gadget: &GadgetObject) -> Option<SourceObject> {
        self.provenance.get(gadget).copied()
    }

    pub fn count(&self, name: &str) -> Option<u64> {
        match self.parameters.get(name) {
            Some(Param::Count(n)) => Some(*n),
            _ => None,
        }
    }
}

/// Hands out candidate names that avoid everything already taken.
struct Namer {
    taken: BTreeSet<String>,
}

impl Namer {
    fn new<'a>(reserved: impl IntoIterator<Item = &'a String>) -> Self {
        Namer {
            taken: reserved.into_iter().cloned().collect(),
        }
    }

    fn fresh(&mut self, base: &str) -> CandidateId {
        let mut name = base.to_string();
        while self.taken.contains(&name) {
            name.push('\'');
        }
        self.taken.insert(name.clone());
        CandidateId::from(name.as_str())
    }
}

fn ids(labels: &[String]) -> Vec<CandidateId> {
    labels.iter().map(|l| CandidateId::from(l.as_str())).collect()
}

fn require_kind(art: &ReductionArtifact, kind: ReductionKind) -> Result<()> {
    if art.kind != kind {
        return Err(domain(format!("artifact comes from {}, not {kind}", art.kind)));
    }
    Ok(())
}

fn require_feasible(art: &ReductionArtifact, sol: &ControlSolution) -> Result<()> {
    if !is_feasible(&art.instance, sol)? {
        return Err(domain("the target solution is not feasible"));
    }
    Ok(())
}

/// Runs the forward map of `kind`.
pub fn reduce(kind: ReductionKind, src: &SourceInstance) -> Result<ReductionArtifact> {
    match (kind, src) {
        (ReductionKind::MscCcav, SourceInstance::Msc(i)) => msc_to_approval_ccav(i),
        (ReductionKind::MscCcdv, SourceInstance::Msc(i)) => msc_to_approval_ccdv(i),
        (ReductionKind::MkuCcdc, SourceInstance::Mku(i)) => mku_to_plurality_ccdc(i),
        (ReductionKind::HsPluralityDcudc, SourceInstance::HittingSet(i)) => {
            hitting_set_to_plurality_dcudc(i)
        }
        (ReductionKind::X3cCondorcetCcuav, SourceInstance::X3c(i)) => x3c_to_condorcet_ccuav(i),
        (ReductionKind::HsCondorcetCcudv, SourceInstance::HittingSet(i)) => {
            hitting_set_to_condorcet_ccudv(i)
        }
        _ => Err(domain(format!(
            "{kind} expects a {} instance, got {}",
            kind.source(),
            src.kind()
        ))),
    }
}

/// Runs the solution map of `art.kind`, returning source indices: sets for
/// MSC, MkU and X3C, elements for hitting set.
pub fn map_back(src: &SourceInstance, art: &ReductionArtifact, sol: &ControlSolution) -> Result<Vec<usize>> {
    match (art.kind, src) {
        (ReductionKind::MscCcav, SourceInstance::Msc(i)) => ccav_solution_to_msc(i, art, sol),
        (ReductionKind::MscCcdv, SourceInstance::Msc(i)) => ccdv_solution_to_msc(i, art, sol),
        (ReductionKind::MkuCcdc, SourceInstance::Mku(i)) => ccdc_solution_to_mku(i, art, sol),
        (ReductionKind::HsPluralityDcudc, SourceInstance::HittingSet(i)) => {
            dcudc_solution_to_hitting_set(i, art, sol)
        }
        (ReductionKind::X3cCondorcetCcuav, SourceInstance::X3c(i)) => {
            ccuav_solution_to_x3c(i, art, sol)
        }
        (ReductionKind::HsCondorcetCcudv, SourceInstance::HittingSet(i)) => {
            condorcet_ccudv_solution_to_hitting_set(i, art, sol)
        }
        (kind, _) => Err(domain(format!(
            "{kind} expects a {} instance, got {}",
            kind.source(),
            src.kind()
        ))),
    }
}
