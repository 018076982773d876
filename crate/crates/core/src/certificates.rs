//! Hand-checkable certificates that a sold set admits no supporting prices.
//!
//! A stable outcome selling exactly the set `K` exists precisely when the
//! assignment relaxation restricted to `K` has an integral optimum. Both
//! certificates here exhibit an explicit feasible fractional assignment
//! whose welfare strictly exceeds the best integral welfare on `K`, which
//! rules such an outcome out without re-deriving the relaxation optimum:
//!
//! - [`xos_gap_certificate`] works on the unit-demand-versus-bulk pair
//!   market and beats the integral optimum by exactly `1/(2(m−1)) − δ`.
//! - [`bucket_gap_certificate`] works on the two-buyer perturbed-harmonic
//!   bucket market and beats the integral optimum by at least
//!   `(1 − 1/k − (t−2)/(t−1))·ε` whenever at least `4k` items are sold,
//!   where `t` is the best bucket's sold count. Since both buyers there are
//!   monotone submodular, this shows submodularity alone cannot guarantee
//!   that large sold sets are supportable.

use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::lp::integral_opt;
use crate::market::Market;
use crate::rational::{rat, Rational};
use crate::valuation::{Caps, ValuationSpec};

/// One fractional assignment column: buyer, bundle, weight.
pub type FractionalColumn = (usize, ItemSet, Rational);

/// Exact feasibility check for a fractional assignment on `sold`: every
/// buyer's weights sum to one and every sold item is covered exactly once.
fn assert_saturated(market: &Market, sold: ItemSet, columns: &[FractionalColumn]) {
    let mut buyer_mass = vec![Rational::zero(); market.buyer_count()];
    let mut item_mass = vec![Rational::zero(); market.items() as usize];
    for (buyer, bundle, weight) in columns {
        assert!(
            bundle.minus(&sold).is_empty(),
            "column bundle {bundle} leaves the sold set {sold}"
        );
        assert!(weight.is_positive(), "column weights must be positive");
        buyer_mass[*buyer] += weight;
        for j in bundle.iter() {
            item_mass[j] += weight;
        }
    }
    for (i, mass) in buyer_mass.iter().enumerate() {
        assert!(*mass == Rational::one(), "buyer {i} carries weight {mass}, not 1");
    }
    for j in sold.iter() {
        assert!(
            item_mass[j] == Rational::one(),
            "item {j} carries weight {}, not 1",
            item_mass[j]
        );
    }
}

fn fractional_welfare(market: &Market, columns: &[FractionalColumn]) -> Rational {
    columns
        .iter()
        .map(|(buyer, bundle, weight)| weight * &market.buyers()[*buyer].value(*bundle))
        .sum()
}

#[derive(Clone, Debug)]
pub struct XosGapCertificate {
    pub delta: Rational,
    pub columns: Vec<FractionalColumn>,
    pub fractional_welfare: Rational,
    pub integral_welfare: Rational,
    /// `fractional − integral`, always exactly `1/(2(m−1)) − δ > 0`.
    pub premium: Rational,
}

/// Certifies that the pair market from [`crate::instances::xos_pair_market`]
/// cannot sell all of its `m ≥ 3` items stably. The fractional solution
/// spreads the unit-demand buyer uniformly over singletons and mixes the
/// bulk buyer between singletons and the full set; its welfare beats the
/// best integral allocation (everything to the bulk buyer, worth `m/2`).
pub fn xos_gap_certificate(market: &Market, caps: &Caps) -> Result<XosGapCertificate> {
    let m = market.items();
    if market.buyer_count() != 2 {
        return Err(Error::Precondition(format!(
            "needs exactly two buyers, got {}",
            market.buyer_count()
        )));
    }
    if m < 3 {
        return Err(Error::Precondition(format!(
            "needs at least 3 items (two items split without a gap), got {m}"
        )));
    }
    let ValuationSpec::UnitDemand { values } = &market.buyers()[0] else {
        return Err(Error::Precondition("buyer 0 must be unit-demand".into()));
    };
    let delta = rat(1, 2) - &values[0];
    if values.iter().any(|v| *v != values[0]) || !delta.is_positive() || delta >= rat(1, 2) {
        return Err(Error::Precondition(
            "buyer 0 must value every item at 1/2 − δ with 0 < δ < 1/2".into(),
        ));
    }
    let ValuationSpec::Symmetric { by_size } = &market.buyers()[1] else {
        return Err(Error::Precondition("buyer 1 must be symmetric".into()));
    };
    for (z, v) in by_size.iter().enumerate().skip(1) {
        if *v != Rational::one().max(rat(z as i64, 2)) {
            return Err(Error::Precondition(format!(
                "buyer 1 must be worth max(1, z/2) at size z, is {v} at {z}"
            )));
        }
    }

    let full = market.full_set();
    let mi = m as i64;
    let mut columns = Vec::with_capacity(2 * m as usize + 1);
    for j in 0..m as usize {
        columns.push((0, ItemSet::singleton(m, j), rat(1, mi)));
        columns.push((1, ItemSet::singleton(m, j), rat(1, mi * (mi - 1))));
    }
    columns.push((1, full, rat(mi - 2, mi - 1)));
    assert_saturated(market, full, &columns);

    let fractional = fractional_welfare(market, &columns);
    let (_, integral) = integral_opt(market, full, caps)?;
    let premium = &fractional - &integral;
    assert_eq!(
        rat(1, 2 * (mi - 1)) - &delta,
        premium,
        "pair-market premium must match its closed form"
    );
    assert!(premium.is_positive(), "certificate must beat the integral optimum");
    Ok(XosGapCertificate {
        delta,
        columns,
        fractional_welfare: fractional,
        integral_welfare: integral,
        premium,
    })
}

/// Lower bound certified by [`bucket_gap_certificate`] on how far (in units
/// of the perturbation weight) the fractional welfare exceeds the integral
/// optimum: `1 − 1/k − (t−2)/(t−1)`, positive for every `t ≤ k`.
pub fn bucket_gap_guarantee(k: u32, t: u32) -> Rational {
    rat(1, 1) - rat(1, k as i64) - rat(t as i64 - 2, t as i64 - 1)
}

#[derive(Clone, Debug)]
pub struct BucketGapCertificate {
    pub sold: ItemSet,
    pub eps: Rational,
    pub bucket_count: u32,
    /// Sold items in the best-covered bucket (`t`).
    pub anchor_size: u32,
    pub columns: Vec<FractionalColumn>,
    pub fractional_welfare: Rational,
    pub integral_welfare: Rational,
    /// `(fractional − integral) / eps`; at least [`bucket_gap_guarantee`].
    pub margin: Rational,
    pub guarantee: Rational,
}

/// Certifies that the two-buyer perturbed-harmonic bucket market cannot
/// stably sell any set of `4k` or more items.
///
/// Writing `t` for the sold count of the best-covered bucket, the
/// fractional solution anchors on that bucket's sold items `S₁`, one sold
/// representative per other touched bucket (`S₂`), and splits the leftover
/// sold items into halves `J₂`/`J₁` sized so that every bundle used has the
/// same cardinality — the harmonic mass then matches the best integral
/// split exactly and only the perturbation terms differ. A matched swap set
/// `T ⊆ J₂` of size `t` lets buyer 0 rotate each anchor item out in
/// exchange for its partner, keeping the anchor bucket's piece large, while
/// buyer 1's columns each touch more buckets than any integral bundle can
/// afford to.
pub fn bucket_gap_certificate(
    market: &Market,
    sold: ItemSet,
    caps: &Caps,
) -> Result<BucketGapCertificate> {
    if market.buyer_count() != 2 {
        return Err(Error::Precondition(format!(
            "needs exactly two buyers, got {}",
            market.buyer_count()
        )));
    }
    let (eps, buckets) = match &market.buyers()[0] {
        ValuationSpec::HarmonicPlus { eps, inner } => match inner.as_ref() {
            ValuationSpec::BucketXos { buckets } => (eps.clone(), buckets.clone()),
            _ => {
                return Err(Error::Precondition(
                    "buyer 0 must carry a best-piece bucket perturbation".into(),
                ))
            }
        },
        _ => return Err(Error::Precondition("buyer 0 must be perturbed-harmonic".into())),
    };
    match &market.buyers()[1] {
        ValuationSpec::HarmonicPlus { eps: e, inner } if *e == eps => match inner.as_ref() {
            ValuationSpec::BucketUnit { buckets: b } if *b == buckets => {}
            _ => {
                return Err(Error::Precondition(
                    "buyer 1 must carry the coverage perturbation over the same buckets".into(),
                ))
            }
        },
        _ => {
            return Err(Error::Precondition(
                "buyer 1 must be perturbed-harmonic with the same weight".into(),
            ))
        }
    }
    let k = buckets.len() as u32;
    if buckets.iter().any(|b| b.len() != k) {
        return Err(Error::Precondition(format!(
            "needs {k} buckets of {k} items each"
        )));
    }
    let m = market.items();
    if !sold.minus(&market.full_set()).is_empty() {
        return Err(Error::InvalidInput(format!(
            "sold set {sold} leaves the {m}-item universe"
        )));
    }
    if sold.len() < 4 * k {
        return Err(Error::Precondition(format!(
            "needs at least 4k = {} sold items, got {}",
            4 * k,
            sold.len()
        )));
    }

    // Anchor bucket: the first bucket with the most sold items. At least
    // 4k sold items over k buckets put at least four in some bucket.
    let counts: Vec<u32> = buckets.iter().map(|b| b.intersect(&sold).len()).collect();
    let anchor = (0..buckets.len()).max_by_key(|&b| (counts[b], usize::MAX - b)).unwrap();
    let t = counts[anchor];
    assert!(t >= 4, "pigeonhole: {} sold items reach a bucket of four", sold.len());

    let s1 = buckets[anchor].intersect(&sold);
    let mut s2 = ItemSet::empty(m);
    for (b, bucket) in buckets.iter().enumerate() {
        if b != anchor {
            if let Some(j) = bucket.intersect(&sold).iter().next() {
                s2 = s2.insert(j);
            }
        }
    }
    let touched = 1 + s2.len(); // ℓ
    let leftovers: Vec<usize> = sold.minus(&s1.union(&s2)).iter().collect();
    let r = leftovers.len() as i64;
    // Balance |S₁ ∪ J₁| = t + (r − j₂) against |{j} ∪ S₂ ∪ J₂∖{π(j)}| =
    // (ℓ−1) + j₂, rounding up, but never below t so the swap set fits.
    let balanced = (r + t as i64 - (touched as i64 - 1) + 1).div_euclid(2);
    let j2 = (t as i64).max(balanced) as usize;
    assert!(j2 <= leftovers.len(), "at least 4k sold items leave enough leftovers");
    let half2 = ItemSet::from_indices(m, &leftovers[..j2])?;
    let half1 = ItemSet::from_indices(m, &leftovers[j2..])?;
    assert!(
        half2.len() > k,
        "the balanced half always exceeds one bucket's worth"
    );
    let swap: Vec<usize> = leftovers[..t as usize].to_vec();
    let anchors: Vec<usize> = s1.iter().collect();

    let mut columns: Vec<FractionalColumn> = Vec::with_capacity(1 + 2 * t as usize);
    columns.push((0, s1.union(&half1), rat(t as i64 - 2, t as i64 - 1)));
    for (j, partner) in anchors.iter().zip(&swap) {
        let swapped = ItemSet::singleton(m, *j)
            .union(&half1)
            .union(&ItemSet::from_indices(m, &swap)?)
            .remove(*partner);
        columns.push((0, swapped, rat(1, t as i64 * (t as i64 - 1))));
        let spread = ItemSet::singleton(m, *j).union(&s2).union(&half2).remove(*partner);
        columns.push((1, spread, rat(1, t as i64)));
    }
    assert_saturated(market, sold, &columns);

    let fractional = fractional_welfare(market, &columns);
    let (_, integral) = integral_opt(market, sold, caps)?;
    let margin = (&fractional - &integral) / &eps;
    let guarantee = bucket_gap_guarantee(k, t);
    assert!(guarantee.is_positive(), "the guarantee is positive whenever t ≤ k");
    assert!(
        margin >= guarantee,
        "certificate margin {margin} fell below its guarantee {guarantee}"
    );
    Ok(BucketGapCertificate {
        sold,
        eps,
        bucket_count: k,
        anchor_size: t,
        columns,
        fractional_welfare: fractional,
        integral_welfare: integral,
        margin,
        guarantee,
    })
}
