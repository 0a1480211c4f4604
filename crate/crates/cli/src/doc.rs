//! JSON documents read and written by `ctrlapx`.
//!
//! Every document is an object whose first key is `schema_version`. Keys are
//! written in declaration order. Registered voters are named `v1, v2, ..` and
//! unregistered voters `w1, w2, ..` by position; set indices are 0-based.

use std::collections::{BTreeMap, BTreeSet};

use anyhow::{anyhow, bail, ensure, Context, Result};
use control_approx::control::{
    measure, Action, Budget, ControlInstance, ControlSolution, ControlSpec, Goal, Pool,
};
use control_approx::election::{
    Ballot, CandidateId, Election, Partition, Rule, TieRule, Voter,
};
use control_approx::reductions::{
    GadgetObject, HittingSetInstance, MkuInstance, MscInstance, Param, ReductionArtifact,
    ReductionKind, SourceInstance, SourceObject, X3cInstance,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

fn check_version(v: u32) -> Result<()> {
    ensure!(v == SCHEMA_VERSION, "unsupported schema_version {v} (expected {SCHEMA_VERSION})");
    Ok(())
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

fn parse_body<T: DeserializeOwned>(kind: &str, body: Value) -> Result<T> {
    serde_json::from_value(body).with_context(|| format!("invalid {kind} body"))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    schema_version: u32,
    kind: String,
    body: Value,
}

/// A parsed instance document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Control(ControlInstance),
    Source(SourceInstance),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Control(_) => "election-control",
            Instance::Source(s) => s.kind(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let env: Envelope = serde_json::from_str(text).context("malformed instance document")?;
        check_version(env.schema_version)?;
        Ok(match env.kind.as_str() {
            "election-control" => Instance::Control(parse_body::<ControlDoc>(&env.kind, env.body)?.build()?),
            "msc" => {
                let d: SetsDoc = parse_body(&env.kind, env.body)?;
                ensure!(d.k.is_none(), "msc takes no k");
                let (u, f) = d.indexed()?;
                Instance::Source(SourceInstance::Msc(MscInstance::new(u, f)?))
            }
            "mku" => {
                let d: SetsDoc = parse_body(&env.kind, env.body)?;
                let k = d.k.ok_or_else(|| anyhow!("mku needs k"))?;
                let (u, f) = d.indexed()?;
                Instance::Source(SourceInstance::Mku(MkuInstance::new(u, f, k)?))
            }
            "hitting-set" => {
                let d: GroundDoc = parse_body(&env.kind, env.body)?;
                let k = d.k;
                let (g, f) = d.indexed()?;
                Instance::Source(SourceInstance::HittingSet(HittingSetInstance::new(g, f, k)?))
            }
            "x3c" => {
                let d: GroundDoc = parse_body(&env.kind, env.body)?;
                let k = d.k;
                let (g, f) = d.indexed()?;
                Instance::Source(SourceInstance::X3c(X3cInstance::new(g, f, k)?))
            }
            other => bail!("unknown instance kind {other:?}"),
        })
    }

    pub fn render(&self) -> Result<String> {
        let body = match self {
            Instance::Control(i) => serde_json::to_value(ControlDoc::from_instance(i))?,
            Instance::Source(SourceInstance::Msc(i)) => {
                serde_json::to_value(SetsDoc::new(i.universe(), i.family(), None))?
            }
            Instance::Source(SourceInstance::Mku(i)) => {
                serde_json::to_value(SetsDoc::new(i.universe(), i.family(), Some(i.k())))?
            }
            Instance::Source(SourceInstance::HittingSet(i)) => {
                serde_json::to_value(GroundDoc::new(i.ground(), i.family(), i.k()))?
            }
            Instance::Source(SourceInstance::X3c(i)) => {
                serde_json::to_value(GroundDoc::new(i.ground(), i.family(), i.k()))?
            }
        };
        to_json(&Envelope {
            schema_version: SCHEMA_VERSION,
            kind: self.kind().to_string(),
            body,
        })
    }
}

fn label_family(labels: &[String], family: &[Vec<usize>]) -> Vec<Vec<String>> {
    family
        .iter()
        .map(|s| s.iter().map(|&j| labels[j].clone()).collect())
        .collect()
}

fn index_family(labels: &[String], family: &[Vec<String>]) -> Result<Vec<Vec<usize>>> {
    let pos: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    family
        .iter()
        .enumerate()
        .map(|(i, set)| {
            set.iter()
                .map(|l| pos.get(l.as_str()).copied().ok_or_else(|| anyhow!("set {i} names unknown element {l:?}")))
                .collect()
        })
        .collect()
}

/// Body of `msc` and `mku` documents.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetsDoc {
    universe: Vec<String>,
    family: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
}

impl SetsDoc {
    fn new(universe: &[String], family: &[Vec<usize>], k: Option<usize>) -> Self {
        SetsDoc {
            universe: universe.to_vec(),
            family: label_family(universe, family),
            k,
        }
    }

    fn indexed(self) -> Result<(Vec<String>, Vec<Vec<usize>>)> {
        let f = index_family(&self.universe, &self.family)?;
        Ok((self.universe, f))
    }
}

/// Body of `hitting-set` and `x3c` documents.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroundDoc {
    ground: Vec<String>,
    family: Vec<Vec<String>>,
    k: usize,
}

impl GroundDoc {
    fn new(ground: &[String], family: &[Vec<usize>], k: usize) -> Self {
        GroundDoc {
            ground: ground.to_vec(),
            family: label_family(ground, family),
            k,
        }
    }

    fn indexed(self) -> Result<(Vec<String>, Vec<Vec<usize>>)> {
        let f = index_family(&self.ground, &self.family)?;
        Ok((self.ground, f))
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Word {
    Unlimited,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum BudgetDoc {
    Limited(u64),
    Unlimited(Word),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoterDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ballot: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approve: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u64>,
}

impl VoterDoc {
    fn from_voter(v: &Voter) -> Self {
        let (ballot, approve) = match &v.ballot {
            Ballot::Ranking(order) => (Some(order.iter().map(|c| c.to_string()).collect()), None),
            Ballot::Approval(a) => (None, Some(a.approved().iter().map(|c| c.to_string()).collect())),
        };
        VoterDoc {
            ballot,
            approve,
            weight: (v.weight() != 1).then_some(v.weight()),
        }
    }

    fn build(&self, universe: &BTreeSet<CandidateId>, who: &str) -> Result<Voter> {
        let ballot = match (&self.ballot, &self.approve) {
            (Some(order), None) => Ballot::ranking(order)?,
            (None, Some(approved)) => {
                let approved = approved.iter().map(CandidateId::new).collect::<Result<_, _>>()?;
                Ballot::approval(universe.clone(), approved)?
            }
            _ => bail!("voter {who} needs exactly one of \"ballot\" and \"approve\""),
        };
        let weight = self.weight.unwrap_or(1);
        ensure!(weight >= 1, "voter {who} has weight 0");
        Ok(Voter::new(ballot, weight)?)
    }
}

/// Body of an `election-control` document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ControlDoc {
    rule: Rule,
    action: Action,
    goal: Goal,
    budget: BudgetDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tie_rule: Option<TieRule>,
    candidates: Vec<String>,
    p: String,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    spoilers: Option<Vec<String>>,
    voters: Vec<VoterDoc>,
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    unregistered: Option<Vec<VoterDoc>>,
}

impl ControlDoc {
    fn build(self) -> Result<ControlInstance> {
        let budget = match self.budget {
            BudgetDoc::Limited(k) => Budget::Limited(k),
            BudgetDoc::Unlimited(_) => Budget::Unlimited,
        };
        let spec = ControlSpec::new(self.rule, self.action, self.goal, budget, self.tie_rule)?;
        if self.spoilers.is_some() && self.action != Action::AddCandidates {
            bail!("\"A\" only applies to adding candidates");
        }
        if self.unregistered.is_some() && self.action != Action::AddVoters {
            bail!("\"W\" only applies to adding voters");
        }
        let ids = |labels: &[String]| -> Result<Vec<CandidateId>> {
            Ok(labels.iter().map(CandidateId::new).collect::<Result<_, _>>()?)
        };
        let registered = ids(&self.candidates)?;
        let spoilers = ids(self.spoilers.as_deref().unwrap_or_default())?;
        let mut all = BTreeSet::new();
        for c in registered.iter().chain(&spoilers) {
            ensure!(all.insert(c.clone()), "candidate {c} is listed twice");
        }
        let voters = self
            .voters
            .iter()
            .enumerate()
            .map(|(i, v)| v.build(&all, &format!("v{}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        let election = Election::new(all.clone(), voters)?;
        let pool = match self.action {
            Action::AddCandidates => Pool::Spoilers(spoilers.into_iter().collect()),
            Action::AddVoters => Pool::Unregistered(
                self.unregistered
                    .unwrap_or_default()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v.build(&all, &format!("w{}", i + 1)))
                    .collect::<Result<_>>()?,
            ),
            _ => Pool::None,
        };
        Ok(ControlInstance::new(spec, election, pool, CandidateId::new(&self.p)?)?)
    }

    fn from_instance(inst: &ControlInstance) -> Self {
        let spec = inst.spec();
        let names = |it: &mut dyn Iterator<Item = &CandidateId>| it.map(|c| c.to_string()).collect();
        ControlDoc {
            rule: spec.rule,
            action: spec.action,
            goal: spec.goal,
            budget: match spec.budget {
                Budget::Limited(k) => BudgetDoc::Limited(k),
                Budget::Unlimited => BudgetDoc::Unlimited(Word::Unlimited),
            },
            tie_rule: spec.tie_rule,
            candidates: names(&mut inst.registered().iter()),
            p: inst.p().to_string(),
            spoilers: inst.spoilers().map(|a| names(&mut a.iter())),
            voters: inst.election().voters().iter().map(VoterDoc::from_voter).collect(),
            unregistered: (spec.action == Action::AddVoters)
                .then(|| inst.unregistered().iter().map(VoterDoc::from_voter).collect()),
        }
    }
}

pub fn voter_label(i: usize) -> String {
    format!("v{}", i + 1)
}

pub fn unregistered_label(i: usize) -> String {
    format!("w{}", i + 1)
}

fn parse_label(label: &str, prefix: char, n: usize) -> Result<usize> {
    let i = label
        .strip_prefix(prefix)
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|&i| (1..=n).contains(&i))
        .ok_or_else(|| anyhow!("{label:?} names no voter here (expected {prefix}1..{prefix}{n})"))?;
    Ok(i - 1)
}

/// A control solution plus its measure (`null` when infinite).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDocument {
    pub schema_version: u32,
    pub kind: String,
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub added: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deleted: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<[Vec<String>; 2]>,
    #[serde(default)]
    pub measure: Option<u64>,
}

const SOLUTION_KIND: &str = "control-solution";

impl SolutionDocument {
    pub fn from_solution(inst: &ControlInstance, sol: &ControlSolution) -> Self {
        let names = |s: &BTreeSet<CandidateId>| s.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        let mut doc = SolutionDocument {
            schema_version: SCHEMA_VERSION,
            kind: SOLUTION_KIND.to_string(),
            action: inst.spec().action,
            added: None,
            deleted: None,
            parts: None,
            measure: measure(inst, sol).value(),
        };
        match sol {
            ControlSolution::AddCandidates(s) => doc.added = Some(names(s)),
            ControlSolution::DeleteCandidates(s) => doc.deleted = Some(names(s)),
            ControlSolution::AddVoters(s) => doc.added = Some(s.iter().map(|&i| unregistered_label(i)).collect()),
            ControlSolution::DeleteVoters(s) => doc.deleted = Some(s.iter().map(|&i| voter_label(i)).collect()),
            ControlSolution::Partition(Partition::Voters(a, b)) => {
                let l = |v: &[usize]| {
                    let mut v = v.to_vec();
                    v.sort_unstable();
                    v.into_iter().map(voter_label).collect()
                };
                doc.parts = Some([l(a), l(b)]);
            }
            ControlSolution::Partition(Partition::Candidates(a, b)) => doc.parts = Some([names(a), names(b)]),
        }
        doc
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: SolutionDocument = serde_json::from_str(text).context("malformed solution document")?;
        check_version(doc.schema_version)?;
        ensure!(doc.kind == SOLUTION_KIND, "expected a {SOLUTION_KIND} document, got {:?}", doc.kind);
        Ok(doc)
    }

    /// Resolves the ids against `inst`.
    pub fn resolve(&self, inst: &ControlInstance) -> Result<ControlSolution> {
        let action = inst.spec().action;
        ensure!(
            self.action == action,
            "solution is for action {}, the instance is {}",
            self.action,
            action
        );
        let ids = |list: &Option<Vec<String>>, field: &str| -> Result<Vec<String>> {
            list.clone().ok_or_else(|| anyhow!("action {action} needs \"{field}\""))
        };
        let candidates = |labels: Vec<String>| -> Result<BTreeSet<CandidateId>> {
            labels
                .iter()
                .map(|l| {
                    ensure!(inst.election().contains(l), "unknown candidate {l:?}");
                    Ok(CandidateId::new(l)?)
                })
                .collect()
        };
        let n = inst.election().voters().len();
        let voters = |labels: Vec<String>, prefix: char, n: usize| -> Result<Vec<usize>> {
            labels.iter().map(|l| parse_label(l, prefix, n)).collect()
        };
        Ok(match action {
            Action::AddCandidates => ControlSolution::AddCandidates(candidates(ids(&self.added, "added")?)?),
            Action::DeleteCandidates => {
                ControlSolution::DeleteCandidates(candidates(ids(&self.deleted, "deleted")?)?)
            }
            Action::AddVoters => ControlSolution::AddVoters(
                voters(ids(&self.added, "added")?, 'w', inst.unregistered().len())?.into_iter().collect(),
            ),
            Action::DeleteVoters => {
                ControlSolution::DeleteVoters(voters(ids(&self.deleted, "deleted")?, 'v', n)?.into_iter().collect())
            }
            Action::PartitionVoters => {
                let [a, b] = self.parts.clone().ok_or_else(|| anyhow!("a partition needs \"parts\""))?;
                ControlSolution::Partition(Partition::Voters(voters(a, 'v', n)?, voters(b, 'v', n)?))
            }
            Action::PartitionCandidates | Action::RunoffPartitionCandidates => {
                let [a, b] = self.parts.clone().ok_or_else(|| anyhow!("a partition needs \"parts\""))?;
                ControlSolution::Partition(Partition::Candidates(candidates(a)?, candidates(b)?))
            }
        })
    }
}

/// Output of `oracle` on an election-control instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptDocument {
    pub schema_version: u32,
    pub kind: String,
    pub problem: String,
    pub measure: Option<u64>,
    pub nodes_explored: u64,
    pub solution: Option<SolutionDocument>,
}

/// A source-problem solution: set indices, or element labels for hitting set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSolutionDocument {
    pub schema_version: u32,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sets: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
    /// Cover size, union size, hitting set size or `k`; `null` if the choice is invalid.
    pub value: Option<u64>,
}

impl SourceSolutionDocument {
    /// `choice` holds set indices, or element indices for hitting set.
    pub fn new(src: &SourceInstance, choice: &[usize]) -> Result<Self> {
        let (sets, elements, value) = match src {
            SourceInstance::Msc(i) => (Some(choice.to_vec()), None, i.covers(choice)?.then_some(choice.len() as u64)),
            SourceInstance::Mku(i) => {
                let distinct: BTreeSet<usize> = choice.iter().copied().collect();
                let ok = distinct.len() == i.k();
                (Some(choice.to_vec()), None, ok.then_some(i.union_size(choice)? as u64))
            }
            SourceInstance::HittingSet(i) => {
                let labels = choice
                    .iter()
                    .map(|&j| i.ground().get(j).cloned().ok_or_else(|| anyhow!("element {j} out of range")))
                    .collect::<Result<_>>()?;
                let ok = i.hits_all(choice)?;
                (None, Some(labels), ok.then_some(choice.len() as u64))
            }
            SourceInstance::X3c(i) => (Some(choice.to_vec()), None, i.is_exact_cover(choice)?.then_some(i.k() as u64)),
        };
        Ok(SourceSolutionDocument {
            schema_version: SCHEMA_VERSION,
            kind: src.kind().to_string(),
            sets,
            elements,
            value,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: SourceSolutionDocument = serde_json::from_str(text).context("malformed source solution")?;
        check_version(doc.schema_version)?;
        Ok(doc)
    }

    /// Set indices, or element indices for hitting set.
    pub fn choice(&self, src: &SourceInstance) -> Result<Vec<usize>> {
        ensure!(self.kind == src.kind(), "solution is for {}, instance is {}", self.kind, src.kind());
        match src {
            SourceInstance::HittingSet(i) => {
                let labels = self.elements.as_ref().ok_or_else(|| anyhow!("hitting set solutions list \"elements\""))?;
                labels
                    .iter()
                    .map(|l| i.ground().iter().position(|g| g == l).ok_or_else(|| anyhow!("unknown element {l:?}")))
                    .collect()
            }
            _ => self.sets.clone().ok_or_else(|| anyhow!("{} solutions list \"sets\"", self.kind)),
        }
    }
}

/// One provenance entry: which source object a gadget object stands for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceEntry {
    pub gadget: GadgetObject,
    pub source: SourceObject,
}

/// Sidecar written next to a reduced instance; map-back reads it instead of
/// recomputing gadget constants. Gadget voter ids and voter ranges in
/// `parameters` are 0-based positions (`v1` is position 0); ranges are half-open.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidecarDocument {
    pub schema_version: u32,
    pub kind: String,
    pub reduction: String,
    pub provenance: Vec<ProvenanceEntry>,
    pub parameters: BTreeMap<String, Param>,
}

const SIDECAR_KIND: &str = "provenance";

impl SidecarDocument {
    pub fn from_artifact(art: &ReductionArtifact) -> Self {
        SidecarDocument {
            schema_version: SCHEMA_VERSION,
            kind: SIDECAR_KIND.to_string(),
            reduction: art.kind.id().to_string(),
            provenance: art
                .provenance
                .iter()
                .map(|(g, s)| ProvenanceEntry { gadget: g.clone(), source: *s })
                .collect(),
            parameters: art.parameters.clone(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: SidecarDocument = serde_json::from_str(text).context("malformed provenance sidecar")?;
        check_version(doc.schema_version)?;
        ensure!(doc.kind == SIDECAR_KIND, "expected a {SIDECAR_KIND} document, got {:?}", doc.kind);
        Ok(doc)
    }

    /// Reassembles the artifact around the target instance it was written with.
    pub fn artifact(&self, instance: ControlInstance) -> Result<ReductionArtifact> {
        let kind: ReductionKind = self.reduction.parse()?;
        let mut provenance = BTreeMap::new();
        for e in &self.provenance {
            ensure!(
                provenance.insert(e.gadget.clone(), e.source).is_none(),
                "gadget object {:?} appears twice in the sidecar",
                e.gadget
            );
        }
        Ok(ReductionArtifact {
            kind,
            instance,
            provenance,
            parameters: self.parameters.clone(),
        })
    }
}
