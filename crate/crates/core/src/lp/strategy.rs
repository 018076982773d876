//! Pluggable solvers for the assignment relaxation.
//!
//! All strategies return the same exact optimum; they differ in how columns
//! are handled. `auto` is the default everywhere a caller does not say
//! otherwise.

use super::{build_config_lp, colgen, solve_auto, solve_exact, LpSolution};
use crate::error::Result;
use crate::items::ItemSet;
use crate::market::Market;
use crate::valuation::Caps;

pub trait LpSolverStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, market: &Market, restriction: ItemSet, caps: &Caps) -> Result<LpSolution>;
}

/// Materializes every column; subject to the build cap.
pub struct ExactStrategy;

impl LpSolverStrategy for ExactStrategy {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn solve(&self, market: &Market, restriction: ItemSet, caps: &Caps) -> Result<LpSolution> {
        solve_exact(market, &build_config_lp(market, restriction, caps)?)
    }
}

/// Demand-oracle column generation; handles restrictions past the build cap.
pub struct ColumnGenStrategy;

impl LpSolverStrategy for ColumnGenStrategy {
    fn name(&self) -> &'static str {
        "colgen"
    }

    fn solve(&self, market: &Market, restriction: ItemSet, caps: &Caps) -> Result<LpSolution> {
        colgen::solve_column_generation(market, restriction, caps)
    }
}

/// Explicit columns when they fit the build cap, generation otherwise.
pub struct AutoStrategy;

impl LpSolverStrategy for AutoStrategy {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn solve(&self, market: &Market, restriction: ItemSet, caps: &Caps) -> Result<LpSolution> {
        solve_auto(market, restriction, caps)
    }
}

/// Every registered strategy, default first.
pub fn solvers() -> Vec<Box<dyn LpSolverStrategy>> {
    vec![Box::new(AutoStrategy), Box::new(ExactStrategy), Box::new(ColumnGenStrategy)]
}

pub fn solver_by_name(name: &str) -> Option<Box<dyn LpSolverStrategy>> {
    solvers().into_iter().find(|s| s.name() == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::valuation::ValuationSpec;

    #[test]
    fn registry_finds_strategies_by_name() {
        for name in ["auto", "exact", "colgen"] {
            assert_eq!(name, solver_by_name(name).unwrap().name());
        }
        assert!(solver_by_name("gurobi").is_none());
    }

    #[test]
    fn all_strategies_agree() {
        let caps = Caps::default();
        let market = Market::new(
            3,
            vec![
                ValuationSpec::Symmetric {
                    by_size: vec![rat(0, 1), rat(1, 1), rat(3, 2), rat(7, 4)],
                },
                ValuationSpec::Additive { values: vec![rat(1, 2), rat(1, 3), rat(1, 4)] },
            ],
        )
        .unwrap();
        let optima: Vec<_> = solvers()
            .iter()
            .map(|s| s.solve(&market, market.full_set(), &caps).unwrap().optimal)
            .collect();
        assert_eq!(optima[0], optima[1]);
        assert_eq!(optima[1], optima[2]);
    }
}
