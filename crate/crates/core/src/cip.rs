//! Covering integer programs: minimize `c·x` subject to `A x >= b`,
//! `0 <= x <= d`, `x` integral, with every entry nonnegative.
//!
//! [`greedy_solve`] is the truncated greedy for multiset multicover: each
//! step buys one more unit of the column with the best demand-capped
//! coverage per unit cost. Its cost is within `1 + ln(sum b)` of optimal.
//! [`exact_solve`] is a depth-first branch and bound used as the oracle.

use crate::error::{domain, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cip {
    a: Vec<Vec<u64>>,
    b: Vec<u64>,
    c: Vec<u64>,
    d: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CipSolution {
    pub x: Vec<u64>,
    pub cost: u64,
}

impl Cip {
    /// `a` is row-major (`m` rows of `n` entries). Costs and bounds must be positive.
    pub fn new(a: Vec<Vec<u64>>, b: Vec<u64>, c: Vec<u64>, d: Vec<u64>) -> Result<Self> {
        let n = c.len();
        if d.len() != n {
            return Err(domain("cost and bound vectors differ in length"));
        }
        if a.len() != b.len() {
            return Err(domain("one demand per constraint row is required"));
        }
        if a.iter().any(|row| row.len() != n) {
            return Err(domain("every constraint row needs one entry per column"));
        }
        if c.iter().chain(&d).any(|&v| v == 0) {
            return Err(domain("costs and upper bounds must be positive"));
        }
        Ok(Cip { a, b, c, d })
    }

    pub fn rows(&self) -> usize {
        self.b.len()
    }

    pub fn cols(&self) -> usize {
        self.c.len()
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.a
    }

    pub fn demands(&self) -> &[u64] {
        &self.b
    }

    pub fn costs(&self) -> &[u64] {
        &self.c
    }

    pub fn bounds(&self) -> &[u64] {
        &self.d
    }

    pub fn cost_of(&self, x: &[u64]) -> u64 {
        x.iter().zip(&self.c).map(|(x, c)| x * c).sum()
    }

    /// Whether `x` respects the bounds and covers every demand.
    pub fn is_feasible(&self, x: &[u64]) -> bool {
        x.len() == self.cols()
            && x.iter().zip(&self.d).all(|(x, d)| x <= d)
            && self.a.iter().zip(&self.b).all(|(row, &b)| {
                row.iter().zip(x).map(|(a, x)| a * x).sum::<u64>() >= b
            })
    }

    fn max_coverage_meets_demand(&self) -> bool {
        self.is_feasible(&self.d)
    }

    /// The same program with one extra column appended.
    pub fn with_column(&self, column: &[u64], cost: u64, bound: u64) -> Result<Cip> {
        if column.len() != self.rows() {
            return Err(domain("column length must equal the number of rows"));
        }
        let a = self
            .a
            .iter()
            .zip(column)
            .map(|(row, &v)| {
                let mut row = row.clone();
                row.push(v);
                row
            })
            .collect();
        let mut c = self.c.clone();
        c.push(cost);
        let mut d = self.d.clone();
        d.push(bound);
        Cip::new(a, self.b.clone(), c, d)
    }
}

/// Truncated greedy; ties go to the lowest column index.
pub fn greedy_solve(cip: &Cip) -> Result<CipSolution> {
    let n = cip.cols();
    let mut residual = cip.b.clone();
    let mut x = vec![0u64; n];
    while residual.iter().any(|&r| r > 0) {
        // (gain, cost, column) of the best candidate so far.
        let mut best: Option<(u64, u64, usize)> = None;
        for j in 0..n {
            if x[j] >= cip.d[j] {
                continue;
            }
            let gain: u64 = cip
                .a
                .iter()
                .zip(&residual)
                .map(|(row, &r)| row[j].min(r))
                .sum();
            if gain == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bg, bc, _)) => gain as u128 * bc as u128 > bg as u128 * cip.c[j] as u128,
            };
            if better {
                best = Some((gain, cip.c[j], j));
            }
        }
        let Some((_, _, j)) = best else {
            return Err(Error::Infeasible);
        };
        x[j] += 1;
        for (row, r) in cip.a.iter().zip(residual.iter_mut()) {
            *r = r.saturating_sub(row[j]);
        }
    }
    let cost = cip.cost_of(&x);
    Ok(CipSolution { x, cost })
}

struct Search<'a> {
    cip: &'a Cip,
    /// `suffix_cap[j][i]`: most coverage of row `i` reachable from columns `j..`.
    suffix_cap: Vec<Vec<u64>>,
    x: Vec<u64>,
    best: Option<CipSolution>,
    nodes: u64,
    limit: u64,
}

impl Search<'_> {
    fn run(&mut self, j: usize, residual: &mut Vec<u64>, cost: u64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::Resource(format!(
                "exact CIP search exceeded {} nodes",
                self.limit
            )));
        }
        if let Some(best) = &self.best {
            if cost >= best.cost {
                return Ok(());
            }
        }
        if residual.iter().all(|&r| r == 0) {
            // Remaining columns stay at zero: the lexicographically smallest completion.
            let mut x = self.x.clone();
            x[j..].iter_mut().for_each(|v| *v = 0);
            self.best = Some(CipSolution { x, cost });
            return Ok(());
        }
        if j == self.cip.cols() {
            return Ok(());
        }
        if residual
            .iter()
            .zip(&self.suffix_cap[j])
            .any(|(&r, &cap)| r > cap)
        {
            return Ok(());
        }
        let saved = residual.clone();
        for units in 0..=self.cip.d[j] {
            self.x[j] = units;
            for (i, r) in residual.iter_mut().enumerate() {
                *r = saved[i].saturating_sub(self.cip.a[i][j] * units);
            }
            self.run(j + 1, residual, cost + units * self.cip.c[j])?;
        }
        self.x[j] = 0;
        residual.copy_from_slice(&saved);
        Ok(())
    }
}

/// Minimum-cost solution by exhaustive search with cost and capacity pruning.
/// Among optimal solutions the lexicographically smallest `x` is returned.
pub fn exact_solve(cip: &Cip, node_limit: u64) -> Result<CipSolution> {
    if node_limit == 0 {
        return Err(domain("node limit must be positive"));
    }
    if !cip.max_coverage_meets_demand() {
        return Err(Error::Infeasible);
    }
    let (m, n) = (cip.rows(), cip.cols());
    let mut suffix_cap = vec![vec![0u64; m]; n + 1];
    for j in (0..n).rev() {
        for i in 0..m {
            suffix_cap[j][i] = suffix_cap[j + 1][i] + cip.a[i][j] * cip.d[j];
        }
    }
    let mut search = Search {
        cip,
        suffix_cap,
        x: vec![0; n],
        best: None,
        nodes: 0,
        limit: node_limit,
    };
    let mut residual = cip.b.clone();
    search.run(0, &mut residual, 0)?;
    search.best.ok_or(Error::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Universe {1,2,3}; columns {1,2}, {2,3}, {3}.
    fn set_cover_example() -> Cip {
        Cip::new(
            vec![vec![1, 0, 0], vec![1, 1, 0], vec![0, 1, 1]],
            vec![1, 1, 1],
            vec![1, 1, 1],
            vec![1, 1, 1],
        )
        .unwrap()
    }

    /// Independent oracle: every x in the box, cheapest feasible, lexicographic tie-break.
    fn enumerate(cip: &Cip) -> Option<CipSolution> {
        let n = cip.cols();
        let mut x = vec![0u64; n];
        let mut best: Option<CipSolution> = None;
        loop {
            if cip.is_feasible(&x) {
                let cost = cip.cost_of(&x);
                if best.as_ref().is_none_or(|b| cost < b.cost) {
                    best = Some(CipSolution { x: x.clone(), cost });
                }
            }
            // Odometer with the last column fastest = lexicographic order.
            let mut j = n;
            loop {
                if j == 0 {
                    return best;
                }
                j -= 1;
                if x[j] < cip.bounds()[j] {
                    x[j] += 1;
                    x[j + 1..].iter_mut().for_each(|v| *v = 0);
                    break;
                }
            }
        }
    }

    #[test]
    fn greedy_on_set_cover_example() {
        let cip = set_cover_example();
        let g = greedy_solve(&cip).unwrap();
        assert_eq!(g.x, vec![1, 1, 0]);
        assert_eq!(g.cost, 2);
        let brute = enumerate(&cip).unwrap();
        assert_eq!(brute.cost, 2);
    }

    #[test]
    fn exact_on_set_cover_example() {
        let e = exact_solve(&set_cover_example(), 1_000).unwrap();
        assert_eq!(e.cost, 2);
        assert_eq!(e, enumerate(&set_cover_example()).unwrap());
    }

    #[test]
    fn zero_demand_costs_nothing() {
        let cip = Cip::new(vec![vec![2, 1]], vec![0], vec![1, 1], vec![1, 1]).unwrap();
        let zero = CipSolution { x: vec![0, 0], cost: 0 };
        assert_eq!(greedy_solve(&cip).unwrap(), zero);
        assert_eq!(exact_solve(&cip, 10).unwrap(), zero);
        let empty = Cip::new(vec![], vec![], vec![], vec![]).unwrap();
        assert_eq!(greedy_solve(&empty).unwrap().cost, 0);
    }

    #[test]
    fn infeasible_when_capacity_short() {
        let cip = Cip::new(vec![vec![1, 2]], vec![4], vec![1, 1], vec![1, 1]).unwrap();
        assert_eq!(greedy_solve(&cip), Err(Error::Infeasible));
        assert_eq!(exact_solve(&cip, 100), Err(Error::Infeasible));
    }

    #[test]
    fn node_limit_is_enforced() {
        let cip = Cip::new(
            vec![vec![1; 6]],
            vec![6],
            vec![1; 6],
            vec![3; 6],
        )
        .unwrap();
        assert!(matches!(exact_solve(&cip, 3), Err(Error::Resource(_))));
    }

    #[test]
    fn greedy_respects_costs() {
        // Column 0 covers both rows at cost 5, columns 1 and 2 one row each at cost 1.
        let cip = Cip::new(
            vec![vec![1, 1, 0], vec![1, 0, 1]],
            vec![1, 1],
            vec![5, 1, 1],
            vec![1, 1, 1],
        )
        .unwrap();
        assert_eq!(greedy_solve(&cip).unwrap().x, vec![0, 1, 1]);
    }

    #[test]
    fn rejects_malformed_programs() {
        assert!(Cip::new(vec![vec![1]], vec![1], vec![0], vec![1]).is_err());
        assert!(Cip::new(vec![vec![1]], vec![1], vec![1], vec![0]).is_err());
        assert!(Cip::new(vec![vec![1, 1]], vec![1], vec![1], vec![1]).is_err());
        assert!(Cip::new(vec![], vec![1], vec![1], vec![1]).is_err());
    }

    fn arb_cip() -> impl Strategy<Value = Cip> {
        (0usize..=4, 0usize..=4).prop_flat_map(|(m, n)| {
            (
                prop::collection::vec(prop::collection::vec(0u64..=3, n), m),
                prop::collection::vec(0u64..=3, m),
                prop::collection::vec(1u64..=3, n),
                prop::collection::vec(1u64..=2, n),
            )
                .prop_map(|(a, b, c, d)| Cip::new(a, b, c, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn exact_matches_enumeration(cip in arb_cip()) {
            let brute = enumerate(&cip);
            match exact_solve(&cip, 1_000_000) {
                Ok(sol) => prop_assert_eq!(Some(sol), brute),
                Err(Error::Infeasible) => prop_assert!(brute.is_none()),
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }

        #[test]
        fn greedy_feasible_and_within_log_bound(cip in arb_cip()) {
            match (greedy_solve(&cip), exact_solve(&cip, 1_000_000)) {
                (Ok(g), Ok(e)) => {
                    prop_assert!(cip.is_feasible(&g.x));
                    prop_assert_eq!(g.cost, cip.cost_of(&g.x));
                    let total: u64 = cip.demands().iter().sum();
                    let bound = 1.0 + (total.max(1) as f64).ln();
                    prop_assert!(g.cost as f64 <= bound * e.cost as f64 + 1e-9);
                }
                (Err(Error::Infeasible), Err(Error::Infeasible)) => {}
                (g, e) => prop_assert!(false, "disagreement {g:?} vs {e:?}"),
            }
        }

        #[test]
        fn extra_column_never_raises_optimum(
            cip in arb_cip(),
            col in prop::collection::vec(0u64..=3, 4),
            cost in 1u64..=3,
        ) {
            let col = &col[..cip.rows()];
            let wider = cip.with_column(col, cost, 1).unwrap();
            if let Ok(before) = exact_solve(&cip, 1_000_000) {
                let after = exact_solve(&wider, 1_000_000).unwrap();
                prop_assert!(after.cost <= before.cost);
            }
        }

        #[test]
        fn solvers_are_deterministic(cip in arb_cip()) {
            prop_assert_eq!(greedy_solve(&cip), greedy_solve(&cip));
            prop_assert_eq!(exact_solve(&cip, 1_000_000), exact_solve(&cip, 1_000_000));
        }
    }
}
