//! The assignment relaxation of welfare maximization over a restricted set
//! of items, and its integral counterpart.
//!
//! For a market restricted to sell only `M′ ⊆ M`, the relaxation has one
//! variable `x_{i,S} ∈ [0, 1]` per buyer `i` and nonempty bundle `S ⊆ M′`,
//! maximizing `Σ v_i(S)·x_{i,S}` subject to Σ_S x_{i,S} ≤ 1 per buyer and
//! Σ_{S∋j} x_{i,S} ≤ 1 per item `j ∈ M′`. Its dual variables are a utility
//! `u_i` per buyer and a price `p_j` per item, which is what ties this
//! program to stable outcomes: the restriction supports one exactly when the
//! relaxation's optimum is attained integrally (gap 1).
//!
//! Everything here is exact. Solutions carry their own certificate: the
//! solver verifies primal feasibility, dual feasibility column by column,
//! and strong duality before returning.

pub mod colgen;
pub(crate) mod simplex;
pub mod strategy;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::market::{Allocation, Market};
use crate::rational::Rational;
use crate::valuation::{Caps, ValuationSpec};
use simplex::{Constraint, LinearProgram, Sense, SimplexOutcome};

/// One variable of the relaxation: buyer `i` receives bundle `S` at value
/// `v_i(S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpColumn {
    pub buyer: usize,
    pub bundle: ItemSet,
    pub value: Rational,
}

/// An explicit column set for the relaxation over `restriction`.
#[derive(Clone, Debug)]
pub struct ConfigLp {
    pub restriction: ItemSet,
    pub columns: Vec<LpColumn>,
}

/// Exact optimum of the relaxation with certificates attached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub optimal: Rational,
    /// Nonzero primal weights by (buyer, bundle).
    pub primal: BTreeMap<(usize, ItemSet), Rational>,
    /// Dual utility per buyer.
    pub buyer_duals: Vec<Rational>,
    /// Dual price per item over the full ground set; zero outside the
    /// restriction.
    pub item_duals: Vec<Rational>,
    /// Columns in the program that produced this solution.
    pub columns_used: usize,
}

fn empty_solution(market: &Market) -> LpSolution {
    LpSolution {
        optimal: Rational::zero(),
        primal: BTreeMap::new(),
        buyer_duals: vec![Rational::zero(); market.buyer_count()],
        item_duals: vec![Rational::zero(); market.items() as usize],
        columns_used: 0,
    }
}

fn check_restriction(market: &Market, restriction: ItemSet) -> Result<()> {
    if restriction.universe() != market.items() {
        return Err(Error::Precondition(format!(
            "restriction over {} items, market has {}",
            restriction.universe(),
            market.items()
        )));
    }
    Ok(())
}

/// Materializes every column of the relaxation. Buyers interested in a
/// single bundle contribute at most one column — their desired set, when it
/// fits inside the restriction — since any superset column is dominated.
pub fn build_config_lp(market: &Market, restriction: ItemSet, caps: &Caps) -> Result<ConfigLp> {
    check_restriction(market, restriction)?;
    caps.check_build(restriction.len())?;
    let mut columns = Vec::new();
    for (i, v) in market.buyers().iter().enumerate() {
        if let ValuationSpec::SingleMinded { desired, value } = v {
            if desired.is_subset_of(&restriction) {
                columns.push(LpColumn { buyer: i, bundle: *desired, value: value.clone() });
            }
            continue;
        }
        for s in restriction.subsets().skip(1) {
            columns.push(LpColumn { buyer: i, bundle: s, value: v.value(s) });
        }
    }
    Ok(ConfigLp { restriction, columns })
}

/// Solves the relaxation on the given columns exactly and verifies the
/// optimum before returning it.
pub fn solve_exact(market: &Market, lp: &ConfigLp) -> Result<LpSolution> {
    check_restriction(market, lp.restriction)?;
    let n = market.buyer_count();
    let m = market.items() as usize;
    for (c, col) in lp.columns.iter().enumerate() {
        if col.buyer >= n {
            return Err(Error::InvalidInput(format!("column {c}: no buyer {}", col.buyer)));
        }
        if col.bundle.universe() != market.items() || !col.bundle.is_subset_of(&lp.restriction) {
            return Err(Error::InvalidInput(format!(
                "column {c}: bundle {} is not inside the restriction {}",
                col.bundle, lp.restriction
            )));
        }
        if col.value.is_negative() {
            return Err(Error::InvalidInput(format!("column {c}: negative value")));
        }
    }
    if lp.columns.is_empty() {
        return Ok(empty_solution(market));
    }

    let items = lp.restriction.indices();
    let cols = lp.columns.len();
    let mut constraints = Vec::with_capacity(n + items.len());
    for i in 0..n {
        let mut coeffs = vec![Rational::zero(); cols];
        for (c, col) in lp.columns.iter().enumerate() {
            if col.buyer == i {
                coeffs[c] = Rational::one();
            }
        }
        constraints.push(Constraint::le(coeffs, Rational::one()));
    }
    for &j in &items {
        let mut coeffs = vec![Rational::zero(); cols];
        for (c, col) in lp.columns.iter().enumerate() {
            if col.bundle.contains(j) {
                coeffs[c] = Rational::one();
            }
        }
        constraints.push(Constraint::le(coeffs, Rational::one()));
    }
    let program = LinearProgram {
        sense: Sense::Maximize,
        objective: lp.columns.iter().map(|c| c.value.clone()).collect(),
        constraints,
    };
    let solved = match simplex::solve(&program)? {
        SimplexOutcome::Optimal(s) => s,
        // All-zero is feasible and every buyer row bounds the objective.
        other => unreachable!("assignment relaxation is feasible and bounded, got {other:?}"),
    };

    let mut primal = BTreeMap::new();
    for (c, x) in solved.values.iter().enumerate() {
        if !x.is_zero() {
            let key = (lp.columns[c].buyer, lp.columns[c].bundle);
            *primal.entry(key).or_insert_with(Rational::zero) += x;
        }
    }
    let buyer_duals = solved.duals[..n].to_vec();
    let mut item_duals = vec![Rational::zero(); m];
    for (pos, &j) in items.iter().enumerate() {
        item_duals[j] = solved.duals[n + pos].clone();
    }
    let solution = LpSolution {
        optimal: solved.objective,
        primal,
        buyer_duals,
        item_duals,
        columns_used: cols,
    };
    verify_solution(market, lp, &solution);
    Ok(solution)
}

/// Exact self-check of an optimum: primal feasibility, dual feasibility on
/// every column, nonnegativity, and strong duality. Violations are solver
/// bugs, so they panic rather than surface as recoverable errors.
fn verify_solution(market: &Market, lp: &ConfigLp, sol: &LpSolution) {
    let n = market.buyer_count();
    assert!(
        !sol.buyer_duals.iter().chain(&sol.item_duals).any(|y| y.is_negative()),
        "dual variables must be nonnegative"
    );
    for col in &lp.columns {
        let covered = &sol.buyer_duals[col.buyer] + sol.price_of(col.bundle);
        assert!(
            covered >= col.value,
            "dual infeasible on buyer {} bundle {}: {} < {}",
            col.buyer,
            col.bundle,
            covered,
            col.value
        );
    }
    let dual_total: Rational = sol.buyer_duals.iter().chain(&sol.item_duals).sum();
    assert!(
        dual_total == sol.optimal,
        "strong duality violated: dual {} vs primal {}",
        dual_total,
        sol.optimal
    );
    let mut buyer_load = vec![Rational::zero(); n];
    let mut item_load = vec![Rational::zero(); market.items() as usize];
    let mut objective = Rational::zero();
    for ((i, s), x) in &sol.primal {
        assert!(x.is_positive(), "stored primal weights are positive");
        buyer_load[*i] += x;
        for j in s.iter() {
            item_load[j] += x;
        }
        objective += &(market.buyers()[*i].value(*s) * x);
    }
    let one = Rational::one();
    assert!(buyer_load.iter().all(|l| *l <= one), "buyer load exceeds 1");
    assert!(item_load.iter().all(|l| *l <= one), "item load exceeds 1");
    assert!(objective == sol.optimal, "primal value {objective} != optimum {}", sol.optimal);
}

impl LpSolution {
    /// `Σ_{j∈S}` of the dual item prices.
    pub fn price_of(&self, s: ItemSet) -> Rational {
        s.iter().map(|j| &self.item_duals[j]).sum()
    }
}

/// Builds and solves the relaxation, choosing explicit columns when the
/// restriction is small enough and column generation otherwise.
pub fn solve_auto(market: &Market, restriction: ItemSet, caps: &Caps) -> Result<LpSolution> {
    if restriction.len() <= caps.build_bits {
        solve_exact(market, &build_config_lp(market, restriction, caps)?)
    } else {
        colgen::solve_column_generation(market, restriction, caps)
    }
}

/// Exact integral welfare optimum over the restriction: the best partition
/// of (part of) `restriction` among the buyers, with a canonical
/// deterministic tie-break. Returns the allocation and its welfare.
pub fn integral_opt(
    market: &Market,
    restriction: ItemSet,
    caps: &Caps,
) -> Result<(Allocation, Rational)> {
    check_restriction(market, restriction)?;
    let n = market.buyer_count();
    let m = market.items();
    if restriction.is_empty() {
        return Ok((Allocation::empty(m, n), Rational::zero()));
    }
    if market.is_all_single_minded() {
        return packing_opt(market, restriction, caps);
    }
    if n == 2 {
        return two_buyer_opt(market, restriction, caps);
    }
    assignment_opt(market, restriction, caps)
}

/// All buyers single-minded: welfare maximization is weighted set packing
/// over the desired bundles that fit in the restriction. Enumerates winner
/// sets; the earliest (smallest buyer-mask) maximum wins.
fn packing_opt(
    market: &Market,
    restriction: ItemSet,
    caps: &Caps,
) -> Result<(Allocation, Rational)> {
    let mut candidates = Vec::new();
    for (i, v) in market.buyers().iter().enumerate() {
        if let ValuationSpec::SingleMinded { desired, value } = v {
            if desired.is_subset_of(&restriction) {
                candidates.push((i, *desired, value.clone()));
            }
        } else {
            unreachable!("packing path requires single-minded buyers only");
        }
    }
    let c = candidates.len();
    if c >= 64 || (1u64 << c) > caps.search_nodes {
        return Err(Error::CapExceeded(format!(
            "set packing over {c} desired bundles exceeds the node budget"
        )));
    }
    let mut best = Rational::zero();
    let mut best_mask = 0u64;
    'mask: for mask in 0..(1u64 << c) {
        let mut used = ItemSet::empty(market.items());
        let mut welfare = Rational::zero();
        for (b, (_, desired, value)) in candidates.iter().enumerate() {
            if mask & (1 << b) != 0 {
                if !used.is_disjoint_from(desired) {
                    continue 'mask;
                }
                used = used.union(desired);
                welfare += value;
            }
        }
        if welfare > best {
            best = welfare;
            best_mask = mask;
        }
    }
    let mut bundles = vec![ItemSet::empty(market.items()); market.buyer_count()];
    for (b, (i, desired, _)) in candidates.iter().enumerate() {
        if best_mask & (1 << b) != 0 {
            bundles[*i] = *desired;
        }
    }
    Ok((Allocation::new(market.items(), bundles)?, best))
}

/// Two buyers and monotone valuations: selling everything in the restriction
/// is optimal, so sweep buyer 0's bundle over all subsets.
fn two_buyer_opt(
    market: &Market,
    restriction: ItemSet,
    caps: &Caps,
) -> Result<(Allocation, Rational)> {
    caps.check_demand(restriction.len())?;
    let m = market.items();
    let tables: Option<Vec<Vec<Rational>>> = if m <= caps.sweep_bits {
        Some(
            market
                .buyers()
                .iter()
                .map(|v| crate::valuation::value_table(v, m, caps))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    let value = |i: usize, s: ItemSet| -> Rational {
        match &tables {
            Some(t) => t[i][s.bits() as usize].clone(),
            None => market.buyers()[i].value(s),
        }
    };
    let mut best: Option<(Rational, ItemSet)> = None;
    for s in restriction.subsets() {
        let welfare = value(0, s) + value(1, restriction.minus(&s));
        if best.as_ref().map_or(true, |(b, _)| welfare > *b) {
            best = Some((welfare, s));
        }
    }
    let (welfare, s) = best.expect("the subset sweep always visits ∅");
    let alloc = Allocation::new(m, vec![s, restriction.minus(&s)])?;
    Ok((alloc, welfare))
}

/// General case: enumerate every assignment of restricted items to
/// {unsold, buyer 0, …} as base-(n+1) digit strings, lowest item least
/// significant, keeping the first welfare maximum.
fn assignment_opt(
    market: &Market,
    restriction: ItemSet,
    caps: &Caps,
) -> Result<(Allocation, Rational)> {
    let n = market.buyer_count();
    let m = market.items();
    let items = restriction.indices();
    let nodes = ((n + 1) as u64).checked_pow(items.len() as u32);
    if nodes.map_or(true, |x| x > caps.search_nodes) {
        return Err(Error::CapExceeded(format!(
            "{} assignments of {} items to {n} buyers exceeds the node budget",
            (n + 1).pow(items.len() as u32),
            items.len()
        )));
    }
    let mut digits = vec![0usize; items.len()];
    let bundles_of = |digits: &[usize]| -> Vec<ItemSet> {
        let mut bundles = vec![ItemSet::empty(m); n];
        for (pos, &d) in digits.iter().enumerate() {
            if d > 0 {
                bundles[d - 1] = bundles[d - 1].insert(items[pos]);
            }
        }
        bundles
    };
    let mut best = Rational::zero();
    let mut best_digits = digits.clone();
    loop {
        let bundles = bundles_of(&digits);
        let welfare: Rational = market
            .buyers()
            .iter()
            .zip(&bundles)
            .map(|(v, &s)| v.value(s))
            .sum();
        if welfare > best {
            best = welfare;
            best_digits = digits.clone();
        }
        // Odometer increment; stop after wrapping past the last assignment.
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                let alloc = Allocation::new(m, bundles_of(&best_digits))?;
                return Ok((alloc, best));
            }
            digits[pos] += 1;
            if digits[pos] <= n {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// `fractional optimum / integral optimum` over the restriction; defined as
/// 1 when the market is worthless there (both optima zero). Always ≥ 1.
pub fn integrality_gap(market: &Market, restriction: ItemSet, caps: &Caps) -> Result<Rational> {
    integrality_gap_with(market, restriction, caps, &strategy::AutoStrategy)
}

/// `integrality_gap` with an explicit relaxation solver.
pub fn integrality_gap_with(
    market: &Market,
    restriction: ItemSet,
    caps: &Caps,
    solver: &dyn strategy::LpSolverStrategy,
) -> Result<Rational> {
    let fractional = solver.solve(market, restriction, caps)?.optimal;
    let (_, integral) = integral_opt(market, restriction, caps)?;
    if integral.is_zero() {
        // Monotone nonnegative valuations: a positive fractional optimum
        // needs a positive column, which is itself an integral allocation.
        assert!(fractional.is_zero(), "zero integral optimum with positive relaxation");
        return Ok(Rational::one());
    }
    Ok(fractional / integral)
}
