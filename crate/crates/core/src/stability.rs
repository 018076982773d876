//! Stable outcomes: allocations with supporting item prices.
//!
//! An outcome — allocation plus per-item prices — is stable when every buyer's
//! bundle maximizes their quasi-linear utility over all bundles at those
//! prices. The seller may keep items off the market by pricing them above
//! anyone's willingness to pay, which is why a restriction `M′` enters
//! everywhere: stable outcomes selling (part of) `M′` exist exactly when the
//! assignment relaxation over `M′` has integrality gap 1, and in that case
//! the relaxation's duals are supporting prices for its integral optimum.
//!
//! This module provides both directions of that equivalence as executable
//! pieces: existence checks and extraction via the relaxation, independent
//! price feasibility programs for a fixed allocation, welfare-ordered search
//! for the best stable outcome, and the ratio of unconstrained optimal
//! welfare to the best stably-achievable welfare.

use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::lp::simplex::{Constraint, LinearProgram, Sense, SimplexOutcome};
use crate::lp::strategy::{AutoStrategy, LpSolverStrategy};
use crate::lp::{integral_opt, integrality_gap_with};
use crate::market::{Allocation, Market, PriceVector};
use crate::rational::Rational;
use crate::valuation::{best_response, utility, Caps, ValuationSpec};

/// An allocation together with the prices that are meant to support it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub allocation: Allocation,
    pub prices: PriceVector,
}

/// A buyer who strictly prefers another bundle at the posted prices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityViolation {
    pub buyer: usize,
    pub preferred: ItemSet,
    pub bundle_utility: Rational,
    pub preferred_utility: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub stable: bool,
    /// First violating buyer in index order, with their canonical best
    /// deviation. `None` exactly when stable.
    pub witness: Option<StabilityViolation>,
    /// Utility each buyer gets from their own bundle.
    pub bundle_utilities: Vec<Rational>,
    /// Best utility each buyer could get at these prices.
    pub max_utilities: Vec<Rational>,
}

/// Checks stability of an outcome exactly, buyer by buyer, over the full
/// ground set.
pub fn verify_stable(market: &Market, outcome: &Outcome, caps: &Caps) -> Result<StabilityReport> {
    if outcome.prices.len() != market.items() {
        return Err(Error::Precondition(format!(
            "{} prices for a {}-item market",
            outcome.prices.len(),
            market.items()
        )));
    }
    let full = market.full_set();
    let mut bundle_utilities = Vec::with_capacity(market.buyer_count());
    let mut max_utilities = Vec::with_capacity(market.buyer_count());
    let mut witness = None;
    for (i, v) in market.buyers().iter().enumerate() {
        let own = utility(v, outcome.allocation.bundle(i), &outcome.prices);
        let (best, preferred) = best_response(v, &outcome.prices, full, caps)?;
        if best > own && witness.is_none() {
            witness = Some(StabilityViolation {
                buyer: i,
                preferred,
                bundle_utility: own.clone(),
                preferred_utility: best.clone(),
            });
        }
        bundle_utilities.push(own);
        max_utilities.push(best);
    }
    Ok(StabilityReport { stable: witness.is_none(), witness, bundle_utilities, max_utilities })
}

/// Does any stable outcome selling (part of) `restriction` exist? Equivalent
/// to the relaxation over `restriction` having integrality gap 1.
pub fn stable_exists_on(market: &Market, restriction: ItemSet, caps: &Caps) -> Result<bool> {
    stable_exists_on_with(market, restriction, caps, &AutoStrategy)
}

pub fn stable_exists_on_with(
    market: &Market,
    restriction: ItemSet,
    caps: &Caps,
    solver: &dyn LpSolverStrategy,
) -> Result<bool> {
    Ok(integrality_gap_with(market, restriction, caps, solver)? == Rational::one())
}

/// A stable outcome produced from a restriction with gap 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractedOutcome {
    pub outcome: Outcome,
    /// The restriction the relaxation was solved over.
    pub restriction: ItemSet,
    /// Items actually allocated; a subset of the restriction.
    pub sold: ItemSet,
    pub welfare: Rational,
}

/// Builds a stable outcome over `restriction`, or `None` if the gap exceeds
/// 1 there. The allocation is the canonical integral optimum; prices are the
/// relaxation's dual item prices inside the restriction and prohibitive
/// outside. The constructed outcome is re-verified before being returned —
/// a failure would be a bug, not an input problem.
pub fn extract_stable_outcome(
    market: &Market,
    restriction: ItemSet,
    caps: &Caps,
) -> Result<Option<ExtractedOutcome>> {
    extract_stable_outcome_with(market, restriction, caps, &AutoStrategy)
}

pub fn extract_stable_outcome_with(
    market: &Market,
    restriction: ItemSet,
    caps: &Caps,
    solver: &dyn LpSolverStrategy,
) -> Result<Option<ExtractedOutcome>> {
    let relaxed = solver.solve(market, restriction, caps)?;
    let (allocation, welfare) = integral_opt(market, restriction, caps)?;
    if relaxed.optimal != welfare {
        return Ok(None);
    }
    let sold = allocation.sold();
    let prohibitive = market.prohibitive_price();
    let mut prices = Vec::with_capacity(market.items() as usize);
    for j in 0..market.items() as usize {
        if restriction.contains(j) {
            // Complementary slackness: an unsold item inside the restriction
            // must already be priced at zero by the optimal duals.
            if !sold.contains(j) {
                assert!(
                    relaxed.item_duals[j].is_zero(),
                    "unsold item {j} carries a positive dual price"
                );
            }
            prices.push(relaxed.item_duals[j].clone());
        } else {
            prices.push(prohibitive.clone());
        }
    }
    let outcome = Outcome { allocation, prices: PriceVector::new(prices)? };
    let report = verify_stable(market, &outcome, caps)?;
    assert!(
        report.stable,
        "outcome extracted from a gap-1 relaxation must be stable: {:?}",
        report.witness
    );
    Ok(Some(ExtractedOutcome { outcome, restriction, sold, welfare }))
}

/// Result of searching for prices that support a fixed allocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PricingOutcome {
    /// Supporting prices exist; these minimize the total price.
    Feasible(PriceVector),
    Infeasible,
}

/// Finds nonnegative item prices making the given allocation stable, if any
/// exist. Markets of single-bundle buyers use a reduced two-rows-per-buyer
/// program; everything else enumerates each buyer's alternative bundles,
/// subject to the row cap.
pub fn prices_for_allocation(
    market: &Market,
    allocation: &Allocation,
    caps: &Caps,
) -> Result<PricingOutcome> {
    let program = if market.is_all_single_minded() {
        single_minded_pricing_program(market, allocation)
    } else {
        general_pricing_program(market, allocation, caps)?
    };
    let outcome = match crate::lp::simplex::solve(&program)? {
        SimplexOutcome::Optimal(s) => {
            let prices = PriceVector::new(s.values)?;
            let report =
                verify_stable(market, &Outcome { allocation: allocation.clone(), prices: prices.clone() }, caps)?;
            assert!(
                report.stable,
                "feasible pricing program must yield a stable outcome: {:?}",
                report.witness
            );
            PricingOutcome::Feasible(prices)
        }
        SimplexOutcome::Infeasible => PricingOutcome::Infeasible,
        SimplexOutcome::Unbounded => {
            unreachable!("total price is bounded below by zero")
        }
    };
    Ok(outcome)
}

/// One `≥` row per buyer and alternative bundle `S`:
/// `p(S∖X_i) − p(X_i∖S) ≥ v_i(S) − v_i(X_i)`.
fn general_pricing_program(
    market: &Market,
    allocation: &Allocation,
    caps: &Caps,
) -> Result<LinearProgram> {
    let m = market.items() as usize;
    let n = market.buyer_count();
    let alternatives = (1u64 << market.items()) - 1;
    let rows = (n as u64).saturating_mul(alternatives);
    if rows > caps.price_rows as u64 {
        return Err(Error::CapExceeded(format!(
            "{rows} pricing rows exceed the {}-row cap",
            caps.price_rows
        )));
    }
    let mut constraints = Vec::with_capacity(rows as usize);
    for (i, v) in market.buyers().iter().enumerate() {
        let own = allocation.bundle(i);
        let own_value = v.value(own);
        for s in market.full_set().subsets() {
            if s == own {
                continue;
            }
            let mut coeffs = vec![Rational::zero(); m];
            for j in s.minus(&own).iter() {
                coeffs[j] = Rational::one();
            }
            for j in own.minus(&s).iter() {
                coeffs[j] = -Rational::one();
            }
            constraints.push(Constraint::ge(coeffs, v.value(s) - &own_value));
        }
    }
    Ok(LinearProgram {
        sense: Sense::Minimize,
        objective: vec![Rational::one(); m],
        constraints,
    })
}

/// Single-bundle buyers need at most two rows each. Winners (bundle covers
/// the desired set): the extras must be free — `p(X_i∖S_i*) ≤ 0` — and the
/// bundle affordable — `p(X_i) ≤ v_i`. Losers: their own bundle must be free
/// — `p(X_i) ≤ 0` — and the desired set out of reach even after dropping the
/// bundle — `p(S_i*) − p(X_i) ≥ v_i`. With nonnegative prices these imply
/// every other deviation is priced out.
fn single_minded_pricing_program(market: &Market, allocation: &Allocation) -> LinearProgram {
    let m = market.items() as usize;
    let mut constraints = Vec::with_capacity(2 * market.buyer_count());
    let row = |plus: ItemSet, minus: ItemSet| -> Vec<Rational> {
        let mut coeffs = vec![Rational::zero(); m];
        for j in plus.iter() {
            coeffs[j] = Rational::one();
        }
        for j in minus.iter() {
            coeffs[j] = -Rational::one();
        }
        coeffs
    };
    for (i, v) in market.buyers().iter().enumerate() {
        let ValuationSpec::SingleMinded { desired, value } = v else {
            unreachable!("reduced pricing requires single-minded buyers only")
        };
        let own = allocation.bundle(i);
        let empty = ItemSet::empty(market.items());
        if desired.is_subset_of(&own) {
            let extras = own.minus(desired);
            if !extras.is_empty() {
                constraints.push(Constraint::le(row(extras, empty), Rational::zero()));
            }
            constraints.push(Constraint::le(row(own, empty), value.clone()));
        } else {
            if !own.is_empty() {
                constraints.push(Constraint::le(row(own, empty), Rational::zero()));
            }
            constraints.push(Constraint::ge(row(desired.minus(&own), own.minus(desired)), value.clone()));
        }
    }
    LinearProgram {
        sense: Sense::Minimize,
        objective: vec![Rational::one(); m],
        constraints,
    }
}

/// The best stable outcome by welfare, with canonical tie-breaking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestStable {
    pub outcome: Outcome,
    pub sold: ItemSet,
    pub welfare: Rational,
}

/// Searches all restrictions (welfare-descending) for the stable outcome of
/// maximum welfare. Some stable outcome always exists — selling nothing at
/// prohibitive prices is stable — so this never comes back empty.
pub fn best_stable_outcome(market: &Market, caps: &Caps) -> Result<BestStable> {
    best_stable_outcome_with(market, caps, &AutoStrategy)
}

pub fn best_stable_outcome_with(
    market: &Market,
    caps: &Caps,
    solver: &dyn LpSolverStrategy,
) -> Result<BestStable> {
    if market.is_all_single_minded() {
        return best_stable_single_minded(market, caps);
    }
    let m = market.items();
    let n = market.buyer_count();
    // Integral search over one restriction costs (n+1)^|M′| nodes; summed
    // over all restrictions that is (n+2)^m.
    if (n as u64 + 2).checked_pow(m).map_or(true, |total| total > caps.search_nodes) {
        return Err(Error::CapExceeded(format!(
            "searching every restriction of {m} items for {n} buyers exceeds the node budget"
        )));
    }
    let mut ranked: Vec<(Rational, ItemSet)> = market
        .full_set()
        .subsets()
        .map(|restriction| {
            integral_opt(market, restriction, caps).map(|(_, welfare)| (welfare, restriction))
        })
        .collect::<Result<_>>()?;
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (welfare, restriction) in ranked {
        if let Some(extracted) = extract_stable_outcome_with(market, restriction, caps, solver)? {
            debug_assert!(extracted.welfare == welfare);
            return Ok(BestStable {
                outcome: extracted.outcome,
                sold: extracted.sold,
                welfare: extracted.welfare,
            });
        }
    }
    unreachable!("the empty restriction always yields a stable outcome")
}

/// Single-bundle buyers: a stable outcome's welfare is determined by which
/// buyers win their desired set, and winners must be pairwise disjoint. Try
/// those families welfare-descending and price each candidate allocation.
fn best_stable_single_minded(market: &Market, caps: &Caps) -> Result<BestStable> {
    let m = market.items();
    let n = market.buyer_count();
    if n >= 64 || (1u64 << n) > caps.search_nodes {
        return Err(Error::CapExceeded(format!(
            "enumerating winner families of {n} buyers exceeds the node budget"
        )));
    }
    let desired: Vec<(ItemSet, Rational)> = market
        .buyers()
        .iter()
        .map(|v| {
            let ValuationSpec::SingleMinded { desired, value } = v else {
                unreachable!("single-minded search requires single-minded buyers")
            };
            (*desired, value.clone())
        })
        .collect();
    let mut families: Vec<(Rational, u64)> = Vec::new();
    'mask: for mask in 0..(1u64 << n) {
        let mut used = ItemSet::empty(m);
        let mut welfare = Rational::zero();
        for (i, (want, value)) in desired.iter().enumerate() {
            if mask & (1 << i) != 0 {
                if !used.is_disjoint_from(want) {
                    continue 'mask;
                }
                used = used.union(want);
                welfare += value;
            }
        }
        families.push((welfare, mask));
    }
    families.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (welfare, mask) in families {
        let bundles: Vec<ItemSet> = desired
            .iter()
            .enumerate()
            .map(|(i, (want, _))| if mask & (1 << i) != 0 { *want } else { ItemSet::empty(m) })
            .collect();
        let allocation = Allocation::new(m, bundles)?;
        if let PricingOutcome::Feasible(prices) = prices_for_allocation(market, &allocation, caps)? {
            let sold = allocation.sold();
            return Ok(BestStable {
                outcome: Outcome { allocation, prices },
                sold,
                welfare,
            });
        }
    }
    unreachable!("the empty winner family is always supportable")
}

/// How much welfare is lost by insisting on stability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilityRatio {
    /// Unconstrained optimum over best stable welfare (≥ 1).
    Ratio(Rational),
    /// Positive optimal welfare but no stable outcome extracts any.
    Unbounded,
}

pub fn stability_ratio(market: &Market, caps: &Caps) -> Result<StabilityRatio> {
    stability_ratio_with(market, caps, &AutoStrategy)
}

pub fn stability_ratio_with(
    market: &Market,
    caps: &Caps,
    solver: &dyn LpSolverStrategy,
) -> Result<StabilityRatio> {
    let (_, opt) = integral_opt(market, market.full_set(), caps)?;
    let best = best_stable_outcome_with(market, caps, solver)?;
    if best.welfare.is_zero() {
        return Ok(if opt.is_zero() {
            StabilityRatio::Ratio(Rational::one())
        } else {
            StabilityRatio::Unbounded
        });
    }
    Ok(StabilityRatio::Ratio(opt / best.welfare))
}
