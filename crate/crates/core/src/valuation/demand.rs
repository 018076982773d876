//! Quasi-linear utilities and demand oracles.
//!
//! `demand` enumerates every bundle and is capped; `best_response` is the
//! workhorse for column generation and stability checks, with closed forms
//! for the classes where the maximizer is known without enumeration.

use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::market::PriceVector;
use crate::rational::Rational;
use crate::valuation::ValuationSpec;

/// Enumeration budgets. Every exponential loop in the crate is bounded by one
/// of these; exceeding a bound is a hard `CapExceeded` error, never a silent
/// truncation.
#[derive(Clone, Debug)]
pub struct Caps {
    /// Max ground-set bits for full demand enumeration (2^bits bundles).
    pub demand_bits: u32,
    /// Max ground-set bits for whole-powerset sweeps (value tables, gaps).
    pub sweep_bits: u32,
    /// Max restriction bits when materializing all columns of the assignment
    /// relaxation explicitly.
    pub build_bits: u32,
    /// Node budget for integral allocation searches.
    pub search_nodes: u64,
    /// Row budget for pricing feasibility programs.
    pub price_rows: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            demand_bits: 20,
            sweep_bits: 16,
            build_bits: 14,
            search_nodes: 1 << 24,
            price_rows: 1 << 14,
        }
    }
}

impl Caps {
    pub fn check_demand(&self, bits: u32) -> Result<()> {
        Self::check(bits, self.demand_bits, "demand enumeration")
    }

    pub fn check_sweep(&self, bits: u32) -> Result<()> {
        Self::check(bits, self.sweep_bits, "powerset sweep")
    }

    pub fn check_build(&self, bits: u32) -> Result<()> {
        Self::check(bits, self.build_bits, "explicit column build")
    }

    fn check(bits: u32, limit: u32, what: &str) -> Result<()> {
        if bits > limit {
            return Err(Error::CapExceeded(format!(
                "{what} over {bits} items exceeds the {limit}-bit cap"
            )));
        }
        Ok(())
    }
}

/// `v(S) - p(S)`.
pub fn utility(v: &ValuationSpec, s: ItemSet, p: &PriceVector) -> Rational {
    v.value(s) - p.total(s)
}

/// Everything a buyer demands at given prices: the maximum utility and every
/// bundle attaining it, in ascending mask order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Demand {
    pub max_utility: Rational,
    pub sets: Vec<ItemSet>,
}

/// Full demand correspondence over all `2^m` bundles. ∅ always competes, so
/// `max_utility ≥ 0`.
pub fn demand(v: &ValuationSpec, p: &PriceVector, caps: &Caps) -> Result<Demand> {
    let m = p.len();
    caps.check_demand(m)?;
    let mut best = Rational::zero();
    let mut sets = vec![ItemSet::empty(m)];
    for s in ItemSet::full(m).subsets().skip(1) {
        let u = utility(v, s, p);
        if u > best {
            best = u;
            sets = vec![s];
        } else if u == best {
            sets.push(s);
        }
    }
    Ok(Demand { max_utility: best, sets })
}

/// Maximum utility over subsets of `within` — see `best_response`.
pub fn max_utility(
    v: &ValuationSpec,
    p: &PriceVector,
    within: ItemSet,
    caps: &Caps,
) -> Result<Rational> {
    best_response(v, p, within, caps).map(|(u, _)| u)
}

/// One utility-maximizing bundle among subsets of `within`, with its utility.
/// Ties break toward the smallest bundle mask, so the answer is canonical in
/// any enumeration order. ∅ always competes: the utility is never negative.
///
/// Closed forms (no enumeration, no cap) cover the classes whose maximizer is
/// structurally forced when prices are nonnegative:
/// - single-minded: only ∅ and the desired set matter;
/// - additive: take exactly the items with positive margin;
/// - unit-demand: a best singleton or ∅.
pub fn best_response(
    v: &ValuationSpec,
    p: &PriceVector,
    within: ItemSet,
    caps: &Caps,
) -> Result<(Rational, ItemSet)> {
    let m = within.universe();
    if p.len() != m {
        return Err(Error::Precondition(format!(
            "price vector over {} items, restriction over {m}",
            p.len()
        )));
    }
    match v {
        ValuationSpec::SingleMinded { desired, value } => {
            let empty = ItemSet::empty(m);
            if !desired.is_subset_of(&within) {
                return Ok((Rational::zero(), empty));
            }
            let u = value - p.total(*desired);
            // On a tie at 0 the empty mask is the smaller canonical choice.
            if u.is_positive() {
                Ok((u, *desired))
            } else {
                Ok((Rational::zero(), empty))
            }
        }
        ValuationSpec::Additive { values } => {
            let mut take = ItemSet::empty(m);
            let mut total = Rational::zero();
            for j in within.iter() {
                let margin = &values[j] - p.get(j);
                if margin.is_positive() {
                    take = take.insert(j);
                    total += &margin;
                }
            }
            Ok((total, take))
        }
        ValuationSpec::UnitDemand { values } => {
            let mut best = Rational::zero();
            let mut pick = ItemSet::empty(m);
            for j in within.iter() {
                let u = &values[j] - p.get(j);
                if u > best {
                    best = u;
                    pick = ItemSet::singleton(m, j);
                }
            }
            Ok((best, pick))
        }
        _ => {
            caps.check_demand(within.len())?;
            let mut best = Rational::zero();
            let mut pick = ItemSet::empty(m);
            for s in within.subsets().skip(1) {
                let u = utility(v, s, p);
                if u > best || (u == best && s.bits() < pick.bits()) {
                    best = u;
                    pick = s;
                }
            }
            Ok((best, pick))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn prices(v: &[Rational]) -> PriceVector {
        PriceVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn unit_demand_picks_best_margin() {
        let v = ValuationSpec::UnitDemand { values: vec![rat(1, 2), rat(7, 8)] };
        let p = prices(&[rat(1, 8), rat(1, 2)]);
        let d = demand(&v, &p, &Caps::default()).unwrap();
        // Margins 3/8 each; both singletons tie, {0,1} also reaches 7/8 - 5/8.
        assert_eq!(rat(3, 8), d.max_utility);
        assert_eq!(
            vec![ItemSet::singleton(2, 0), ItemSet::singleton(2, 1)],
            d.sets
        );
    }

    #[test]
    fn free_items_make_the_full_set_demanded() {
        let v = ValuationSpec::Additive { values: vec![rat(1, 1), rat(2, 1)] };
        let p = prices(&[rat(0, 1), rat(0, 1)]);
        let d = demand(&v, &p, &Caps::default()).unwrap();
        assert_eq!(rat(3, 1), d.max_utility);
        assert_eq!(vec![ItemSet::full(2)], d.sets);
    }

    #[test]
    fn prohibitive_prices_leave_only_the_empty_set() {
        let v = ValuationSpec::Additive { values: vec![rat(1, 1), rat(2, 1)] };
        let p = prices(&[rat(10, 1), rat(10, 1)]);
        let d = demand(&v, &p, &Caps::default()).unwrap();
        assert_eq!(Rational::zero(), d.max_utility);
        assert_eq!(vec![ItemSet::empty(2)], d.sets);
    }

    #[test]
    fn single_minded_response_is_all_or_nothing() {
        let want = ItemSet::from_indices(3, &[0, 1]).unwrap();
        let v = ValuationSpec::SingleMinded { desired: want, value: rat(3, 1) };
        let cheap = prices(&[rat(1, 1), rat(1, 1), rat(0, 1)]);
        let caps = Caps::default();
        assert_eq!(
            (rat(1, 1), want),
            best_response(&v, &cheap, ItemSet::full(3), &caps).unwrap()
        );
        // Exactly at cost: canonical answer is ∅ at utility 0.
        let exact = prices(&[rat(2, 1), rat(1, 1), rat(0, 1)]);
        assert_eq!(
            (Rational::zero(), ItemSet::empty(3)),
            best_response(&v, &exact, ItemSet::full(3), &caps).unwrap()
        );
        // Restriction missing part of the desired set forces ∅.
        let within = ItemSet::from_indices(3, &[0, 2]).unwrap();
        assert_eq!(
            (Rational::zero(), ItemSet::empty(3)),
            best_response(&v, &cheap, within, &caps).unwrap()
        );
    }

    #[test]
    fn best_response_respects_the_restriction() {
        let v = ValuationSpec::Additive { values: vec![rat(5, 1), rat(1, 1)] };
        let p = prices(&[rat(1, 1), rat(1, 2)]);
        let within = ItemSet::singleton(2, 1);
        assert_eq!(
            (rat(1, 2), within),
            best_response(&v, &p, within, &Caps::default()).unwrap()
        );
    }

    /// The closed forms must agree with brute-force enumeration, including
    /// the smallest-mask tie-break.
    fn enumerated(
        v: &ValuationSpec,
        p: &PriceVector,
        within: ItemSet,
    ) -> (Rational, ItemSet) {
        let mut best = Rational::zero();
        let mut pick = ItemSet::empty(within.universe());
        for s in within.subsets() {
            let u = utility(v, s, p);
            if u > best || (u == best && s.bits() < pick.bits()) {
                best = u;
                pick = s;
            }
        }
        (best, pick)
    }

    proptest! {
        #[test]
        fn closed_forms_match_enumeration(
            vals in proptest::collection::vec(0i64..6, 5),
            ps in proptest::collection::vec(0i64..6, 5),
            within_bits in 0u64..32,
            desired_bits in 1u64..32,
            want_value in 0i64..8,
        ) {
            let caps = Caps::default();
            let values: Vec<Rational> = vals.iter().map(|&x| rat(x, 2)).collect();
            let p = prices(&ps.iter().map(|&x| rat(x, 2)).collect::<Vec<_>>());
            let within = ItemSet::from_bits(5, within_bits).unwrap();
            for v in [
                ValuationSpec::Additive { values: values.clone() },
                ValuationSpec::UnitDemand { values: values.clone() },
                ValuationSpec::SingleMinded {
                    desired: ItemSet::from_bits(5, desired_bits).unwrap(),
                    value: rat(want_value, 1),
                },
            ] {
                prop_assert_eq!(enumerated(&v, &p, within), best_response(&v, &p, within, &caps).unwrap());
            }
        }
    }
}
