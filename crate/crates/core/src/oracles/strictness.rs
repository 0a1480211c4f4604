//! Checks on the reductions: the strictness inequality for the
//! optimization reductions, yes/no agreement for the hardness gadgets.

use super::{feasible_solutions, opt_control, DEFAULT_NODE_BUDGET};
use super::{exists_x3c, opt_hitting_set, opt_mku, opt_msc};
use crate::control::{performance_ratio, ControlSolution, Measure, PerformanceRatio};
use crate::error::{domain, Error, Result};
use crate::reductions::{map_back, reduce, ReductionArtifact, ReductionKind, SourceInstance};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub solution: ControlSolution,
    /// `None` when the solution map failed outright.
    pub source_solution: Option<Vec<usize>>,
    pub r_source: PerformanceRatio,
    pub r_target: PerformanceRatio,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictnessReport {
    pub instance_id: String,
    pub solutions_checked: usize,
    pub max_source_ratio: PerformanceRatio,
    pub max_target_ratio: PerformanceRatio,
    pub violations: Vec<Violation>,
    /// Raw optimum of the source instance (cover size or union size).
    pub source_opt: u64,
    /// Raw optimum of the target instance (solution size).
    pub target_opt: u64,
    /// Feasible target solutions the map could not turn into a valid source solution.
    pub extraction_failures: usize,
}

impl StrictnessReport {
    /// The strictness inequality held for every checked solution.
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn opts_agree(&self) -> bool {
        self.source_opt == self.target_opt
    }
}

/// A stable id for reports: the reduction plus an FNV-1a digest of the source.
fn instance_id(kind: ReductionKind, src: &SourceInstance) -> String {
    let text = format!("{src:?}");
    let digest = text
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
    format!("{kind}-{digest:016x}")
}

/// Objective value of a source solution, `None` if it is not a valid one.
fn source_value(src: &SourceInstance, sol: &[usize]) -> Result<Option<u64>> {
    Ok(match src {
        SourceInstance::Msc(i) => i.covers(sol)?.then_some(sol.len() as u64),
        SourceInstance::Mku(i) => {
            let mut distinct = sol.to_vec();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() == i.k() {
                Some(i.union_size(sol)? as u64)
            } else {
                None
            }
        }
        _ => return Err(domain("only set cover and k-union have objective values here")),
    })
}

fn ratio(value: u64, opt: u64) -> Result<PerformanceRatio> {
    performance_ratio(Measure::Finite(1 + value), Measure::Finite(1 + opt))
}

type SolutionMap<'a> =
    &'a dyn Fn(&SourceInstance, &ReductionArtifact, &ControlSolution) -> Result<Vec<usize>>;

/// Checks `R_source(g(y)) <= R_target(y)` for every feasible target solution
/// `y` with at most `enumeration_bound` objects, both ratios taken over
/// `1 + size` measures.
pub fn verify_strictness(
    kind: ReductionKind,
    src: &SourceInstance,
    enumeration_bound: usize,
) -> Result<StrictnessReport> {
    verify_strictness_with(kind, src, enumeration_bound, &map_back)
}

/// [`verify_strictness`] with a caller-supplied solution map.
pub fn verify_strictness_with(
    kind: ReductionKind,
    src: &SourceInstance,
    enumeration_bound: usize,
    g: SolutionMap<'_>,
) -> Result<StrictnessReport> {
    if !kind.is_strict() {
        return Err(domain(format!(
            "{kind} only preserves yes/no answers; check decision equivalence instead"
        )));
    }
    let art = reduce(kind, src)?;
    let source_opt = match src {
        SourceInstance::Msc(i) => opt_msc(i)?.len() as u64,
        SourceInstance::Mku(i) => i.union_size(&opt_mku(i)?)? as u64,
        _ => unreachable!("reduce checked the source kind"),
    };
    let target = opt_control(&art.instance, enumeration_bound)?;
    let target_opt = target.measure.raw().ok_or_else(|| {
        Error::Precondition("no feasible target solution within the enumeration bound".into())
    })?;

    let ys = feasible_solutions(&art.instance, enumeration_bound, DEFAULT_NODE_BUDGET)?;
    let mut report = StrictnessReport {
        instance_id: instance_id(kind, src),
        solutions_checked: ys.len(),
        max_source_ratio: PerformanceRatio::one(),
        max_target_ratio: PerformanceRatio::one(),
        violations: Vec::new(),
        source_opt,
        target_opt,
        extraction_failures: 0,
    };
    for y in ys {
        let size = y.size().expect("add/delete solution") as u64;
        let r_target = ratio(size, target_opt)?;
        let x = g(src, &art, &y).ok();
        let value = match &x {
            Some(x) => source_value(src, x)?,
            None => None,
        };
        let r_source = match value {
            Some(v) => ratio(v, source_opt)?,
            None => {
                report.extraction_failures += 1;
                PerformanceRatio::Infinite
            }
        };
        report.max_source_ratio = report.max_source_ratio.max(r_source);
        report.max_target_ratio = report.max_target_ratio.max(r_target);
        if r_source > r_target {
            report.violations.push(Violation {
                solution: y,
                source_solution: x,
                r_source,
                r_target,
            });
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionReport {
    pub source_yes: bool,
    pub target_yes: bool,
    /// For yes-instances, whether the extracted source solution is a valid witness.
    pub extraction_ok: Option<bool>,
}

impl DecisionReport {
    pub fn agrees(&self) -> bool {
        self.source_yes == self.target_yes && self.extraction_ok != Some(false)
    }
}

/// Solves both sides of a hardness gadget by brute force and compares answers.
pub fn check_decision_equivalence(kind: ReductionKind, src: &SourceInstance) -> Result<DecisionReport> {
    if kind.is_strict() {
        return Err(domain(format!("{kind} is an optimization reduction; verify strictness instead")));
    }
    let art = reduce(kind, src)?;
    let source_yes = match src {
        SourceInstance::HittingSet(i) => opt_hitting_set(i)?.is_some_and(|h| h.len() <= i.k()),
        SourceInstance::X3c(i) => exists_x3c(i)?,
        _ => unreachable!("reduce checked the source kind"),
    };
    let target = opt_control(&art.instance, usize::MAX)?;
    let extraction_ok = match &target.solution {
        Some(sol) => {
            let x = map_back(src, &art, sol)?;
            Some(match src {
                SourceInstance::HittingSet(i) => x.len() <= i.k() && i.hits_all(&x)?,
                SourceInstance::X3c(i) => i.is_exact_cover(&x)?,
                _ => unreachable!(),
            })
        }
        None => None,
    };
    Ok(DecisionReport {
        source_yes,
        target_yes: target.solution.is_some(),
        extraction_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::{HittingSetInstance, MkuInstance, MscInstance, X3cInstance};

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn msc_ccav_singleton() {
        let src = SourceInstance::Msc(MscInstance::new(labels(1), vec![vec![0]]).unwrap());
        let r = verify_strictness(ReductionKind::MscCcav, &src, 5).unwrap();
        assert_eq!(r.solutions_checked, 1);
        assert!(r.holds());
        assert!(r.opts_agree());
        assert!(r.instance_id.starts_with("msc-ccav-"));
    }

    #[test]
    fn mku_example_has_no_violations() {
        let src = SourceInstance::Mku(
            MkuInstance::new(labels(2), vec![vec![0], vec![1]], 2).unwrap(),
        );
        let r = verify_strictness(ReductionKind::MkuCcdc, &src, 9).unwrap();
        assert!(r.holds());
        assert_eq!(r.extraction_failures, 0);
        assert_eq!((r.source_opt, r.target_opt), (2, 2));
        assert!(r.solutions_checked > 1);
    }

    #[test]
    fn corrupted_map_is_caught() {
        let src = SourceInstance::Msc(
            MscInstance::new(labels(2), vec![vec![0], vec![1], vec![0, 1]]).unwrap(),
        );
        let empty = |_: &SourceInstance, _: &ReductionArtifact, _: &ControlSolution| Ok(vec![]);
        let r = verify_strictness_with(ReductionKind::MscCcdv, &src, 8, &empty).unwrap();
        assert!(!r.holds());
        assert_eq!(r.violations.len(), r.solutions_checked);
    }

    #[test]
    fn decision_equivalence_examples() {
        let hs = SourceInstance::HittingSet(
            HittingSetInstance::new(labels(1), vec![vec![0]], 1).unwrap(),
        );
        for kind in [ReductionKind::HsPluralityDcudc, ReductionKind::HsCondorcetCcudv] {
            let r = check_decision_equivalence(kind, &hs).unwrap();
            assert!(r.source_yes && r.target_yes && r.agrees(), "{kind}");
        }
        let no = SourceInstance::HittingSet(
            HittingSetInstance::new(labels(2), vec![vec![0], vec![1]], 1).unwrap(),
        );
        for kind in [ReductionKind::HsPluralityDcudc, ReductionKind::HsCondorcetCcudv] {
            let r = check_decision_equivalence(kind, &no).unwrap();
            assert!(!r.source_yes && !r.target_yes, "{kind}");
        }
        let x3c = SourceInstance::X3c(
            X3cInstance::new(
                labels(9),
                vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8], vec![0, 3, 6]],
                3,
            )
            .unwrap(),
        );
        let r = check_decision_equivalence(ReductionKind::X3cCondorcetCcuav, &x3c).unwrap();
        assert!(r.source_yes && r.agrees());
    }

    #[test]
    fn kinds_are_routed() {
        let src = SourceInstance::Msc(MscInstance::new(labels(1), vec![vec![0]]).unwrap());
        assert!(check_decision_equivalence(ReductionKind::MscCcav, &src).is_err());
        assert!(verify_strictness(ReductionKind::HsCondorcetCcudv, &src, 3).is_err());
    }
}
