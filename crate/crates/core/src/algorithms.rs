//! Constructive stable-outcome algorithms for restricted valuation classes.
//!
//! Searching every restriction for a gap-free relaxation is exact but
//! exponential. For two budget-additive buyers and for single-minded
//! markets, a stable outcome can instead be built directly:
//!
//! - [`budget_additive_approx`] prices a two-buyer budget-additive market in
//!   one of two ways and always lands a stable outcome worth at least a
//!   quarter of the optimal welfare (and exactly the optimum whenever the
//!   larger budget is not saturated).
//! - [`single_minded_greedy`] solves a covering program for prices and then
//!   awards desired sets greedily by value density, producing a stable
//!   outcome in which every buyer's maximum utility is exactly zero.

use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::lp::simplex::{self, Constraint, LinearProgram, Sense, SimplexOutcome};
use crate::market::{Allocation, Market, PriceVector};
use crate::rational::{rat, Rational};
use crate::stability::{verify_stable, Outcome};
use crate::valuation::{best_response, Caps, ValuationSpec};

/// Which pricing rule [`budget_additive_approx`] applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApproxCase {
    /// The larger budget is reachable (item values sum past it). Every item
    /// is priced at the big buyer's value for it; welfare is at least half
    /// the big budget and hence at least a quarter of the optimum.
    SaturatedBudget,
    /// The larger budget is out of reach, so the big buyer is effectively
    /// additive. Items are split by pointwise winner and priced at the
    /// loser's value; welfare equals the optimum exactly.
    UnsaturatedBudget,
}

#[derive(Clone, Debug)]
pub struct BudgetAdditiveResult {
    pub case: ApproxCase,
    /// Index of the buyer treated as having the larger budget.
    pub big_buyer: usize,
    pub outcome: Outcome,
    pub welfare: Rational,
    /// Cheap upper bound on the optimal welfare: the budget sum in the
    /// saturated case, small budget plus the big buyer's item sum otherwise.
    pub opt_upper: Rational,
}

/// Builds a stable outcome for a market of exactly two budget-additive
/// buyers with `4 · welfare ≥ optimum`. Item values are first capped at the
/// owner's budget, which leaves every bundle value unchanged.
pub fn budget_additive_approx(market: &Market, caps: &Caps) -> Result<BudgetAdditiveResult> {
    if market.buyer_count() != 2 {
        return Err(Error::Precondition(format!(
            "needs exactly two buyers, got {}",
            market.buyer_count()
        )));
    }
    let mut capped = Vec::with_capacity(2);
    let mut budgets = Vec::with_capacity(2);
    for (i, spec) in market.buyers().iter().enumerate() {
        let ValuationSpec::BudgetAdditive { values, budget } = spec else {
            return Err(Error::Precondition(format!(
                "buyer {i} is not budget-additive"
            )));
        };
        // min(Σ_S min(v_j, B), B) = min(Σ_S v_j, B): if any member exceeds
        // the budget both sides saturate, otherwise the caps are inactive.
        capped.push(values.iter().map(|v| v.min(budget).clone()).collect::<Vec<_>>());
        budgets.push(budget.clone());
    }
    let m = market.items();
    caps.check_demand(m)?;
    let (hi, lo) = if budgets[0] >= budgets[1] { (0, 1) } else { (1, 0) };
    let full = market.full_set();
    let hi_sum: Rational = capped[hi].iter().sum();
    let half = &budgets[hi] / Rational::from_int(2);

    let (case, prices, hi_bundle, lo_bundle, opt_upper);
    if hi_sum >= budgets[hi] {
        case = ApproxCase::SaturatedBudget;
        // Prohibit everything at the big buyer's own values; whatever the
        // small buyer then demands, the big buyer keeps a half-budget core.
        prices = PriceVector::new(capped[hi].clone())?;
        let core = match (0..m as usize).position(|j| capped[hi][j] >= half) {
            Some(j) => ItemSet::singleton(m, j),
            None => {
                let mut acc = Rational::zero();
                let mut set = ItemSet::empty(m);
                for j in 0..m as usize {
                    if acc >= half {
                        break;
                    }
                    set = set.insert(j);
                    acc += &capped[hi][j];
                }
                set
            }
        };
        let (_, demanded) = best_response(&market.buyers()[lo], &prices, full, caps)?;
        hi_bundle = core.minus(&demanded);
        lo_bundle = demanded;
        opt_upper = &budgets[hi] + &budgets[lo];
    } else {
        case = ApproxCase::UnsaturatedBudget;
        // Pointwise split: the big buyer (never budget-bound, hence
        // additive) keeps the items it values more, each priced at the
        // small buyer's value, so neither side envies the other's items.
        let mut split = Vec::with_capacity(m as usize);
        let mut keep = ItemSet::empty(m);
        for j in 0..m as usize {
            if capped[hi][j] >= capped[lo][j] {
                keep = keep.insert(j);
                split.push(capped[lo][j].clone());
            } else {
                split.push(capped[hi][j].clone());
            }
        }
        prices = PriceVector::new(split)?;
        let rest = full.minus(&keep);
        let (_, demanded) = best_response(&market.buyers()[lo], &prices, rest, caps)?;
        hi_bundle = keep.union(&rest.minus(&demanded));
        lo_bundle = demanded;
        opt_upper = &budgets[lo] + &hi_sum;
    }

    let mut bundles = vec![ItemSet::empty(m); 2];
    bundles[hi] = hi_bundle;
    bundles[lo] = lo_bundle;
    let allocation = Allocation::new(m, bundles)?;
    let welfare = market.welfare(&allocation);
    let outcome = Outcome { allocation, prices };
    let report = verify_stable(market, &outcome, caps)?;
    assert!(
        report.stable,
        "budget-additive pricing must be stable, witness {:?}",
        report.witness
    );
    Ok(BudgetAdditiveResult { case, big_buyer: hi, outcome, welfare, opt_upper })
}

#[derive(Clone, Debug)]
pub struct SingleMindedGreedyResult {
    pub outcome: Outcome,
    pub welfare: Rational,
    /// Buyers awarded their desired set, in award order.
    pub winners: Vec<usize>,
}

/// Builds a stable outcome for an all-single-minded market: prices come
/// from the cheapest covering of every desired set by its value, and the
/// buyers whose covers are tight are then served greedily by value density
/// `v/√|desired|` (densest first, ties by index) subject to disjointness.
/// Every buyer ends with maximum utility exactly zero, so any covering
/// price vector supports the greedy family.
pub fn single_minded_greedy(market: &Market, caps: &Caps) -> Result<SingleMindedGreedyResult> {
    if !market.is_all_single_minded() {
        return Err(Error::Precondition(
            "needs every buyer to be single-minded".into(),
        ));
    }
    let m = market.items();
    let mut desired = Vec::with_capacity(market.buyer_count());
    let mut values = Vec::with_capacity(market.buyer_count());
    for spec in market.buyers() {
        let ValuationSpec::SingleMinded { desired: d, value } = spec else {
            unreachable!("all buyers checked single-minded");
        };
        desired.push(*d);
        values.push(value.clone());
    }

    // min Σ_j p_j subject to p(desired_i) ≥ v_i, p ≥ 0.
    let constraints = desired
        .iter()
        .zip(&values)
        .map(|(d, v)| {
            let coeffs = (0..m as usize)
                .map(|j| if d.contains(j) { Rational::one() } else { Rational::zero() })
                .collect();
            Constraint::ge(coeffs, v.clone())
        })
        .collect();
    let lp = LinearProgram {
        sense: Sense::Minimize,
        objective: vec![Rational::one(); m as usize],
        constraints,
    };
    let solution = match simplex::solve(&lp)? {
        SimplexOutcome::Optimal(s) => s,
        outcome => unreachable!("covering programs are feasible and bounded, got {outcome:?}"),
    };
    let prices = PriceVector::new(solution.values)?;

    // Only buyers whose cover is tight can win with zero utility; rank them
    // by value density (compare v_i/√s_i exactly via v_i²·s_k vs v_k²·s_i).
    let mut tight: Vec<usize> = (0..market.buyer_count())
        .filter(|&i| prices.total(desired[i]) == values[i])
        .collect();
    tight.sort_by(|&i, &k| {
        let lhs = &(&values[i] * &values[i]) * &rat(desired[k].len() as i64, 1);
        let rhs = &(&values[k] * &values[k]) * &rat(desired[i].len() as i64, 1);
        rhs.cmp(&lhs).then(i.cmp(&k))
    });
    let mut claimed = ItemSet::empty(m);
    let mut winners = Vec::new();
    let mut bundles = vec![ItemSet::empty(m); market.buyer_count()];
    for i in tight {
        if desired[i].intersect(&claimed).is_empty() {
            claimed = claimed.union(&desired[i]);
            bundles[i] = desired[i];
            winners.push(i);
        }
    }

    let allocation = Allocation::new(m, bundles)?;
    let welfare = market.welfare(&allocation);
    let outcome = Outcome { allocation, prices };
    let report = verify_stable(market, &outcome, caps)?;
    assert!(
        report.stable,
        "covering prices must support the greedy family, witness {:?}",
        report.witness
    );
    for (i, u) in report.max_utilities.iter().enumerate() {
        assert!(
            u.is_zero(),
            "buyer {i} should be exactly indifferent, has utility {u}"
        );
    }
    Ok(SingleMindedGreedyResult { outcome, welfare, winners })
}
