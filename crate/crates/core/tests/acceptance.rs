//! End-to-end acceptance checks for the library's headline guarantees.
//!
//! Each test prints one `ACCEPTANCE <label>: PASS/FAIL` line before
//! asserting, so the verdicts survive in the output either way. All
//! comparisons are exact rational equality; the runtime ceilings are part
//! of the contract and are asserted where one is stated.

use std::time::{Duration, Instant};

use walras_core::algorithms::{budget_additive_approx, single_minded_greedy, ApproxCase};
use walras_core::certificates::{
    bucket_gap_certificate, bucket_gap_guarantee, xos_gap_certificate,
};
use walras_core::instances::{
    bucket_market, random_market, single_minded_grid, xos_pair_market, RandomClass,
    RandomMarketParams,
};
use walras_core::lp::colgen::solve_column_generation;
use walras_core::lp::{build_config_lp, integral_opt, integrality_gap, solve_auto, solve_exact};
use walras_core::stability::{
    best_stable_outcome, extract_stable_outcome, prices_for_allocation, stability_ratio,
    stable_exists_on, verify_stable, PricingOutcome, StabilityRatio,
};
use walras_core::valuation::{best_response, is_monotone, is_submodular};
use walras_core::{rat, Allocation, Caps, ItemSet, PriceVector, Rational, ValuationSpec};

fn conclude(label: &str, failures: &[String], detail: String) {
    if failures.is_empty() {
        println!("ACCEPTANCE {label}: PASS — {detail}");
    } else {
        let shown = failures.iter().take(6).map(String::as_str).collect::<Vec<_>>().join("; ");
        println!("ACCEPTANCE {label}: FAIL — {} violation(s); first: {shown}", failures.len());
        panic!("{label} failed with {} violation(s): {shown}", failures.len());
    }
}

fn budget(failures: &mut Vec<String>, elapsed: Duration, limit: Duration) {
    if elapsed >= limit {
        failures.push(format!("ran {elapsed:.2?}, over the {limit:?} ceiling"));
    }
}

/// Every way to hand the items of `sold` to one of `buyers` buyers or leave
/// them unsold.
fn split_assignments(m: u32, buyers: usize, sold: ItemSet) -> Vec<Vec<ItemSet>> {
    let items = sold.indices();
    let options = buyers as u64 + 1;
    let total = options.pow(items.len() as u32);
    let mut out = Vec::with_capacity(total as usize);
    for code in 0..total {
        let mut bundles = vec![ItemSet::empty(m); buyers];
        let mut rest = code;
        for &j in &items {
            let pick = (rest % options) as usize;
            rest /= options;
            if pick < buyers {
                bundles[pick] = bundles[pick].insert(j);
            }
        }
        out.push(bundles);
    }
    out
}

/// Two-buyer pair market, five items: the relaxation beats every integral
/// allocation, no restriction of three or more items supports stable
/// prices, and the best stable welfare is pinned exactly.
#[test]
fn pair_market_relaxation_beats_every_stable_outcome() {
    let started = Instant::now();
    let caps = Caps::default();
    let mut failures = Vec::new();
    let market = xos_pair_market(5, Some(rat(1, 100))).unwrap();

    let (_, integral) = integral_opt(&market, market.full_set(), &caps).unwrap();
    if integral != rat(5, 2) {
        failures.push(format!("full-set integral optimum {integral}, want 5/2"));
    }
    let cert = xos_gap_certificate(&market, &caps).unwrap();
    if cert.fractional_welfare != rat(523, 200) {
        failures.push(format!("certificate welfare {}, want 523/200", cert.fractional_welfare));
    }
    if cert.fractional_welfare <= integral {
        failures.push("certificate fails to beat the integral optimum".into());
    }
    for bits in 0..32u64 {
        let sold = ItemSet::from_bits(5, bits).unwrap();
        let verdict = stable_exists_on(&market, sold, &caps).unwrap();
        if verdict != (sold.len() <= 2) {
            failures.push(format!(
                "restriction {sold} ({} items): stable-exists {verdict}",
                sold.len()
            ));
        }
    }
    let best = best_stable_outcome(&market, &caps).unwrap();
    if best.welfare != rat(149, 100) {
        failures.push(format!("best stable welfare {}, want 149/100", best.welfare));
    }

    let elapsed = started.elapsed();
    budget(&mut failures, elapsed, Duration::from_secs(10));
    conclude(
        "pair-market-gap",
        &failures,
        format!(
            "integral 5/2 < relaxation 523/200; stability stops above two items; \
             best stable 149/100 ({elapsed:.2?})"
        ),
    );
}

/// Single-minded grids: the unconstrained optimum needs the big buyer, but
/// stable prices cannot serve them, so welfare drops by an exact ratio.
#[test]
fn grid_market_pins_the_exact_stability_shortfall() {
    let started = Instant::now();
    let caps = Caps::default();
    let mut failures = Vec::new();

    let market = single_minded_grid(4).unwrap();
    let (_, opt) = integral_opt(&market, market.full_set(), &caps).unwrap();
    if opt != rat(6, 1) {
        failures.push(format!("4-grid optimum {opt}, want 6"));
    }
    let n = market.buyer_count();
    let mut bundles = vec![ItemSet::empty(market.items()); n];
    bundles[n - 1] = market.full_set();
    let everything_to_big = Allocation::new(market.items(), bundles).unwrap();
    if let PricingOutcome::Feasible(p) =
        prices_for_allocation(&market, &everything_to_big, &caps).unwrap()
    {
        failures.push(format!("all-to-last-buyer allocation priced at {:?}", p.as_slice()));
    }
    let best = best_stable_outcome(&market, &caps).unwrap();
    if best.welfare != rat(5, 1) {
        failures.push(format!("4-grid best stable welfare {}, want 5", best.welfare));
    }
    match stability_ratio(&market, &caps).unwrap() {
        StabilityRatio::Ratio(r) if r == rat(6, 5) => {}
        other => failures.push(format!("4-grid stability ratio {other:?}, want 6/5")),
    }

    let market = single_minded_grid(5).unwrap();
    let (_, opt) = integral_opt(&market, market.full_set(), &caps).unwrap();
    if opt != rat(10, 1) {
        failures.push(format!("5-grid optimum {opt}, want 10"));
    }
    match stability_ratio(&market, &caps).unwrap() {
        StabilityRatio::Ratio(r) if r == rat(10, 6) => {}
        other => failures.push(format!("5-grid stability ratio {other:?}, want 10/6")),
    }

    let elapsed = started.elapsed();
    budget(&mut failures, elapsed, Duration::from_secs(30));
    conclude(
        "grid-stability-ratio",
        &failures,
        format!(
            "4-grid: optimum 6, big buyer unpriceable, best stable 5, ratio 6/5; \
             5-grid: optimum 10, ratio 10/6 ({elapsed:.2?})"
        ),
    );
}

/// Submodular pair on sixteen items: both valuations verified submodular
/// exhaustively, and the explicit fractional assignment beats every way of
/// selling all items, so no stable outcome sells everything.
#[test]
fn submodular_pair_blocks_selling_everything() {
    let started = Instant::now();
    let caps = Caps::default();
    let mut failures = Vec::new();
    let market = bucket_market(4, None).unwrap();
    let m = market.items();

    for (i, spec) in market.buyers().iter().enumerate() {
        if !is_monotone(spec, m, &caps).unwrap() {
            failures.push(format!("buyer {i} valuation is not monotone"));
        }
        if !is_submodular(spec, m, &caps).unwrap() {
            failures.push(format!("buyer {i} valuation is not submodular"));
        }
    }

    let cert = bucket_gap_certificate(&market, market.full_set(), &caps).unwrap();
    if cert.anchor_size != 4 {
        failures.push(format!("anchor size {}, want 4", cert.anchor_size));
    }
    if cert.guarantee != rat(1, 12) {
        failures.push(format!("guaranteed margin {}, want 1/12", cert.guarantee));
    }
    if cert.margin != rat(5, 12) {
        failures.push(format!("realized margin {}, want 5/12", cert.margin));
    }
    if cert.margin < bucket_gap_guarantee(4, cert.anchor_size) {
        failures.push("margin fell below the size-4 guarantee".into());
    }

    let (_, integral) = integral_opt(&market, market.full_set(), &caps).unwrap();
    if integral != cert.integral_welfare {
        failures.push(format!(
            "certificate integral welfare {} disagrees with the sweep {integral}",
            cert.integral_welfare
        ));
    }
    if integral != rat(14_693_771, 685_440) {
        failures.push(format!("full-sale integral optimum {integral}, want 14693771/685440"));
    }
    if cert.fractional_welfare <= integral {
        failures.push("certificate does not beat selling everything integrally".into());
    }
    if stable_exists_on(&market, market.full_set(), &caps).unwrap() {
        failures.push("a stable outcome claims to sell all sixteen items".into());
    }

    let elapsed = started.elapsed();
    budget(&mut failures, elapsed, Duration::from_secs(300));
    conclude(
        "submodular-full-sale",
        &failures,
        format!(
            "both buyers submodular on 16 items; certificate margin 5/12 ≥ 1/12 \
             per unit of perturbation; no stable outcome sells everything ({elapsed:.2?})"
        ),
    );
}

/// Four-item bucket market: the gap-is-one verdict must agree with direct
/// price search on every integral-optimal allocation of every restriction.
#[test]
fn tiny_bucket_verdicts_match_exhaustive_pricing() {
    let started = Instant::now();
    let caps = Caps::default();
    let mut failures = Vec::new();
    let market = bucket_market(2, None).unwrap();
    let m = market.items();

    for bits in 0..(1u64 << m) {
        let sold = ItemSet::from_bits(m, bits).unwrap();
        let lp = solve_exact(&market, &build_config_lp(&market, sold, &caps).unwrap()).unwrap();
        let (_, integral) = integral_opt(&market, sold, &caps).unwrap();
        let verdict = lp.optimal == integral;
        if verdict != stable_exists_on(&market, sold, &caps).unwrap() {
            failures.push(format!("restriction {sold}: library verdict disagrees"));
        }
        for bundles in split_assignments(m, market.buyer_count(), sold) {
            let alloc = Allocation::new(m, bundles).unwrap();
            if market.welfare(&alloc) != integral {
                continue;
            }
            let priceable = matches!(
                prices_for_allocation(&market, &alloc, &caps).unwrap(),
                PricingOutcome::Feasible(_)
            );
            if priceable != verdict {
                failures.push(format!(
                    "restriction {sold}: optimal allocation {:?} priceable={priceable}, \
                     verdict={verdict}",
                    alloc.bundles()
                ));
            }
        }
    }

    let elapsed = started.elapsed();
    budget(&mut failures, elapsed, Duration::from_secs(60));
    conclude(
        "bucket-verdict-cross-check",
        &failures,
        format!(
            "all 16 restrictions solved exactly; every integral-optimal allocation \
             prices out iff the gap is one ({elapsed:.2?})"
        ),
    );
}

/// Five hundred seeded budget-additive pairs: outputs are stable, within a
/// quarter of optimal, and meet the per-case welfare floors. Where the
/// smaller budget exceeds the optimum itself — so no outcome whatsoever
/// could reach it — the output must instead be exactly optimal.
#[test]
fn budget_additive_pairs_meet_the_quarter_guarantee() {
    let started = Instant::now();
    let caps = Caps::default();
    let mut failures = Vec::new();
    let mut saturated = 0u32;
    let mut unsaturated = 0u32;
    let mut floor_hit = 0u32;
    let mut unreachable_budget = 0u32;

    for seed in 0..500u64 {
        let market = random_market(&RandomMarketParams {
            seed,
            buyers: 2,
            items: 2 + (seed % 5) as u32,
            classes: vec![RandomClass::BudgetAdditive],
            max_numerator: 12,
            denominator: 4,
        })
        .unwrap();
        let result = budget_additive_approx(&market, &caps).unwrap();
        let report = verify_stable(&market, &result.outcome, &caps).unwrap();
        if !report.stable {
            failures.push(format!("seed {seed}: output not stable: {:?}", report.witness));
            continue;
        }
        let (_, opt) = integral_opt(&market, market.full_set(), &caps).unwrap();
        if &result.welfare * rat(4, 1) < opt {
            failures.push(format!(
                "seed {seed}: welfare {} under a quarter of optimum {opt}",
                result.welfare
            ));
        }
        let budgets: Vec<Rational> = market
            .buyers()
            .iter()
            .map(|b| match b {
                ValuationSpec::BudgetAdditive { budget, .. } => budget.clone(),
                _ => unreachable!("generator was asked for budget-additive buyers"),
            })
            .collect();
        let hi = result.big_buyer;
        match result.case {
            ApproxCase::SaturatedBudget => {
                saturated += 1;
                if &result.welfare * rat(2, 1) < budgets[hi] {
                    failures.push(format!(
                        "seed {seed}: saturated welfare {} under half of budget {}",
                        result.welfare, budgets[hi]
                    ));
                }
            }
            ApproxCase::UnsaturatedBudget => {
                unsaturated += 1;
                let hi_sum: Rational = match &market.buyers()[hi] {
                    ValuationSpec::BudgetAdditive { values, .. } => values.iter().cloned().sum(),
                    _ => unreachable!(),
                };
                if result.welfare < hi_sum {
                    failures.push(format!(
                        "seed {seed}: welfare {} under the big buyer's item total {hi_sum}",
                        result.welfare
                    ));
                }
                let small_budget = &budgets[1 - hi];
                if &result.welfare >= small_budget {
                    floor_hit += 1;
                } else if small_budget > &opt && result.welfare == opt {
                    // The floor exceeds the optimum, so nothing reaches it;
                    // exact optimality is the strongest available promise.
                    unreachable_budget += 1;
                } else {
                    failures.push(format!(
                        "seed {seed}: welfare {} misses the reachable floor {small_budget} \
                         (optimum {opt})",
                        result.welfare
                    ));
                }
            }
        }
    }

    let elapsed = started.elapsed();
    budget(&mut failures, elapsed, Duration::from_secs(120));
    conclude(
        "budget-additive-quarter",
        &failures,
        format!(
            "500 instances stable and within 4x of optimal; {saturated} saturated met the \
             half-budget floor; {unsaturated} unsaturated met the item-total floor, \
             {floor_hit} reached the smaller budget and the other {unreachable_budget} \
             had that budget above the optimum itself yet were exactly optimal ({elapsed:.2?})"
        ),
    );
}

/// Two hundred seeded mixed markets: on every restriction, the gap-is-one
/// verdict coincides with finding supporting prices for some integral
/// allocation matching the relaxation's value, and every extracted outcome
/// re-verifies as stable.
#[test]
fn random_verdicts_match_allocation_pricing() {
    let started = Instant::now();
    let caps = Caps::default();
    let mut failures = Vec::new();
    let mut restrictions = 0u32;
    let mut supported = 0u32;
    let all_classes = vec![
        RandomClass::Additive,
        RandomClass::UnitDemand,
        RandomClass::BudgetAdditive,
        RandomClass::Xos,
        RandomClass::SingleMinded,
        RandomClass::Symmetric,
        RandomClass::Explicit,
    ];

    for seed in 0..200u64 {
        let n = 1 + (seed % 3) as usize;
        let m = 1 + ((seed / 3) % 4) as u32;
        let market = random_market(&RandomMarketParams {
            seed,
            buyers: n,
            items: m,
            classes: all_classes.clone(),
            max_numerator: 8,
            denominator: 2,
        })
        .unwrap();
        for bits in 0..(1u64 << m) {
            restrictions += 1;
            let sold = ItemSet::from_bits(m, bits).unwrap();
            let verdict = stable_exists_on(&market, sold, &caps).unwrap();
            let lp = solve_auto(&market, sold, &caps).unwrap();
            let mut priceable = false;
            for bundles in split_assignments(m, n, sold) {
                let alloc = Allocation::new(m, bundles).unwrap();
                if market.welfare(&alloc) != lp.optimal {
                    continue;
                }
                if matches!(
                    prices_for_allocation(&market, &alloc, &caps).unwrap(),
                    PricingOutcome::Feasible(_)
                ) {
                    priceable = true;
                    break;
                }
            }
            if verdict != priceable {
                failures.push(format!(
                    "seed {seed}, restriction {sold}: verdict {verdict} but priceable {priceable}"
                ));
            }
            if verdict {
                supported += 1;
                match extract_stable_outcome(&market, sold, &caps).unwrap() {
                    Some(extracted) => {
                        let report =
                            verify_stable(&market, &extracted.outcome, &caps).unwrap();
                        if !report.stable {
                            failures.push(format!(
                                "seed {seed}, restriction {sold}: extracted outcome unstable"
                            ));
                        }
                    }
                    None => failures.push(format!(
                        "seed {seed}, restriction {sold}: extraction refused a gap-one \
                         restriction"
                    )),
                }
            }
        }
    }

    let elapsed = started.elapsed();
    budget(&mut failures, elapsed, Duration::from_secs(300));
    conclude(
        "verdict-pricing-equivalence",
        &failures,
        format!(
            "200 markets, {restrictions} restrictions: verdicts match direct price search \
             everywhere; all {supported} supported restrictions extracted and re-verified \
             ({elapsed:.2?})"
        ),
    );
}

/// The explicit-column solver and the column-generating solver agree
/// exactly, their duals price every bundle tightly, and markets from
/// gap-free classes show gap one on every restriction.
#[test]
fn solvers_agree_with_exact_duality() {
    let started = Instant::now();
    let caps = Caps::default();
    let mut failures = Vec::new();

    for seed in 0..100u64 {
        let n = 1 + (seed % 3) as usize;
        let m = 1 + (seed % 10) as u32;
        let market = random_market(&RandomMarketParams {
            seed,
            buyers: n,
            items: m,
            classes: vec![
                RandomClass::Additive,
                RandomClass::UnitDemand,
                RandomClass::BudgetAdditive,
                RandomClass::Xos,
                RandomClass::SingleMinded,
                RandomClass::Symmetric,
                RandomClass::Explicit,
            ],
            max_numerator: 8,
            denominator: 2,
        })
        .unwrap();
        let full = market.full_set();
        let exact =
            solve_exact(&market, &build_config_lp(&market, full, &caps).unwrap()).unwrap();
        let generated = solve_column_generation(&market, full, &caps).unwrap();
        if exact.optimal != generated.optimal {
            failures.push(format!(
                "seed {seed}: explicit {} vs generated {}",
                exact.optimal, generated.optimal
            ));
        }
        for (which, sol) in [("explicit", &exact), ("generated", &generated)] {
            let dual_total: Rational = sol.buyer_duals.iter().cloned().sum::<Rational>()
                + sol.item_duals.iter().cloned().sum::<Rational>();
            if dual_total != sol.optimal {
                failures.push(format!(
                    "seed {seed}: {which} dual objective {dual_total} vs primal {}",
                    sol.optimal
                ));
            }
            let prices = PriceVector::new(sol.item_duals.clone()).unwrap();
            for (i, spec) in market.buyers().iter().enumerate() {
                let (best, _) = best_response(spec, &prices, full, &caps).unwrap();
                if best != sol.buyer_duals[i] {
                    failures.push(format!(
                        "seed {seed}: {which} dual utility {} for buyer {i}, demand says {best}",
                        sol.buyer_duals[i]
                    ));
                }
            }
        }
    }

    let mut sweeps = 0u32;
    for seed in 0..100u64 {
        let class =
            if seed % 2 == 0 { RandomClass::Additive } else { RandomClass::UnitDemand };
        let market = random_market(&RandomMarketParams {
            seed,
            buyers: 1 + (seed % 3) as usize,
            items: 1 + (seed % 5) as u32,
            classes: vec![class],
            max_numerator: 8,
            denominator: 2,
        })
        .unwrap();
        let m = market.items();
        for bits in 0..(1u64 << m) {
            sweeps += 1;
            let sold = ItemSet::from_bits(m, bits).unwrap();
            let gap = integrality_gap(&market, sold, &caps).unwrap();
            if gap != rat(1, 1) {
                failures.push(format!("seed {seed}, restriction {sold}: gap {gap}"));
            }
        }
    }

    let elapsed = started.elapsed();
    budget(&mut failures, elapsed, Duration::from_secs(300));
    conclude(
        "solver-consistency",
        &failures,
        format!(
            "100 markets: solvers agree, duality gap zero, demand confirms every dual \
             utility; {sweeps} restriction sweeps on additive/unit-demand markets all \
             show gap one ({elapsed:.2?})"
        ),
    );
}

/// Covering-price greedy on single-minded markets: the outcome is stable
/// and the prices are so high that no buyer — served or not — can find a
/// bundle of positive utility.
#[test]
fn greedy_prices_leave_no_buyer_wanting() {
    let started = Instant::now();
    let caps = Caps::default();
    let mut failures = Vec::new();
    let mut checked = 0u32;

    let check = |market: &walras_core::Market, label: String, failures: &mut Vec<String>| {
        let result = single_minded_greedy(market, &caps).unwrap();
        let report = verify_stable(market, &result.outcome, &caps).unwrap();
        if !report.stable {
            failures.push(format!("{label}: greedy outcome unstable: {:?}", report.witness));
        }
        for (i, u) in report.max_utilities.iter().enumerate() {
            if u.is_positive() {
                failures.push(format!("{label}: buyer {i} still sees positive utility {u}"));
            }
        }
    };

    for n in 4..=8u32 {
        let market = single_minded_grid(n).unwrap();
        check(&market, format!("{n}-grid"), &mut failures);
        checked += 1;
    }
    for seed in 0..100u64 {
        let market = random_market(&RandomMarketParams {
            seed,
            buyers: 1 + (seed % 8) as usize,
            items: 1 + (seed % 12) as u32,
            classes: vec![RandomClass::SingleMinded],
            max_numerator: 8,
            denominator: 2,
        })
        .unwrap();
        check(&market, format!("seed {seed}"), &mut failures);
        checked += 1;
    }

    let elapsed = started.elapsed();
    conclude(
        "greedy-zero-utility",
        &failures,
        format!(
            "{checked} markets: every greedy outcome stable with all maximum utilities \
             at zero ({elapsed:.2?})"
        ),
    );
}
