//! Column generation for the assignment relaxation.
//!
//! The explicit relaxation has a column per (buyer, bundle) pair — far too
//! many past a dozen items. Instead, start from a small warm set (singletons
//! plus the whole restriction, per buyer), solve that master program, and ask
//! each buyer's demand oracle for a bundle whose utility at the master's dual
//! prices strictly beats the buyer's dual utility. Any such bundle joins the
//! master; when no buyer improves, the master duals are feasible for the full
//! relaxation, so the master optimum — sandwiched between the full primal and
//! dual — is the exact optimum of the whole program.
//!
//! Termination is guaranteed because a strictly improving bundle can never be
//! a column the master already has (existing columns are priced out by the
//! master's own dual feasibility), and there are finitely many bundles.

use std::collections::BTreeSet;

use super::{check_restriction, empty_solution, solve_exact, ConfigLp, LpColumn, LpSolution};
use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::market::{Market, PriceVector};
use crate::rational::Rational;
use crate::valuation::{best_response, Caps, ValuationSpec};

enum Oracle {
    /// Classes with a structural best response (no enumeration).
    Closed,
    /// Everything else: values over subsets of the restriction, compactly
    /// indexed (bit `b` of a compact mask is the `b`-th restricted item).
    Table { values: Vec<Rational> },
}

pub fn solve_column_generation(
    market: &Market,
    restriction: ItemSet,
    caps: &Caps,
) -> Result<LpSolution> {
    check_restriction(market, restriction)?;
    if restriction.is_empty() {
        return Ok(empty_solution(market));
    }
    let m = market.items();
    let items = restriction.indices();
    let w = items.len();

    let needs_table = market.buyers().iter().any(|v| {
        !matches!(
            v,
            ValuationSpec::SingleMinded { .. }
                | ValuationSpec::Additive { .. }
                | ValuationSpec::UnitDemand { .. }
        )
    });
    // expand[c] = ground-set bits of compact mask c. The mapping preserves
    // mask order, so canonical (smallest-mask) choices carry over.
    let expand: Vec<u64> = if needs_table {
        caps.check_sweep(w as u32)?;
        let mut expand = vec![0u64; 1 << w];
        for c in 1..expand.len() {
            let low = c.trailing_zeros() as usize;
            expand[c] = expand[c & (c - 1)] | (1u64 << items[low]);
        }
        expand
    } else {
        Vec::new()
    };
    let oracles: Vec<Oracle> = market
        .buyers()
        .iter()
        .map(|v| match v {
            ValuationSpec::SingleMinded { .. }
            | ValuationSpec::Additive { .. }
            | ValuationSpec::UnitDemand { .. } => Ok(Oracle::Closed),
            _ => {
                let values = expand
                    .iter()
                    .map(|&bits| Ok(v.value(ItemSet::from_bits(m, bits)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Oracle::Table { values })
            }
        })
        .collect::<Result<_>>()?;

    let mut lp = ConfigLp { restriction, columns: Vec::new() };
    let mut seen: BTreeSet<(usize, u64)> = BTreeSet::new();
    for (i, v) in market.buyers().iter().enumerate() {
        for &j in &items {
            let s = ItemSet::singleton(m, j);
            if seen.insert((i, s.bits())) {
                lp.columns.push(LpColumn { buyer: i, bundle: s, value: v.value(s) });
            }
        }
        if seen.insert((i, restriction.bits())) {
            lp.columns.push(LpColumn {
                buyer: i,
                bundle: restriction,
                value: v.value(restriction),
            });
        }
    }

    loop {
        if lp.columns.len() as u64 > caps.search_nodes {
            return Err(Error::CapExceeded(format!(
                "column generation grew past {} columns",
                caps.search_nodes
            )));
        }
        let sol = solve_exact(market, &lp)?;
        let prices = PriceVector::new(sol.item_duals.clone())
            .expect("verified dual prices are nonnegative");
        // Prefix-sum price table over compact masks, shared by all buyers.
        let ptab: Vec<Rational> = if needs_table {
            let mut ptab = vec![Rational::zero(); 1 << w];
            for c in 1..ptab.len() {
                let low = c.trailing_zeros() as usize;
                ptab[c] = &ptab[c & (c - 1)] + prices.get(items[low]);
            }
            ptab
        } else {
            Vec::new()
        };
        let mut improved = false;
        for (i, oracle) in oracles.iter().enumerate() {
            let (best_utility, bundle) = match oracle {
                Oracle::Closed => {
                    best_response(&market.buyers()[i], &prices, restriction, caps)?
                }
                Oracle::Table { values } => {
                    let mut best = Rational::zero();
                    let mut pick = 0u64;
                    for c in 1..values.len() {
                        let u = &values[c] - &ptab[c];
                        if u > best {
                            best = u;
                            pick = expand[c];
                        }
                    }
                    (best, ItemSet::from_bits(m, pick)?)
                }
            };
            if best_utility > sol.buyer_duals[i] {
                assert!(
                    seen.insert((i, bundle.bits())),
                    "an existing column cannot strictly improve on the master duals"
                );
                lp.columns.push(LpColumn {
                    buyer: i,
                    bundle,
                    value: market.buyers()[i].value(bundle),
                });
                improved = true;
            }
        }
        if !improved {
            return Ok(sol);
        }
    }
}
