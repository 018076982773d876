//! Exhaustive structural checks: monotonicity and submodularity.
//!
//! Both checks precompute the full value table (one entry per bundle mask),
//! then scan the defining inequalities. The scan order is canonical — bundles
//! ascending by mask, item pairs ascending — so a returned witness is the
//! first violation in that order and is stable across runs.

use crate::error::Result;
use crate::items::ItemSet;
use crate::rational::Rational;
use crate::valuation::{Caps, ValuationSpec};

/// All `2^m` values of `v`, indexed by bundle mask. The table powers the
/// structural checks and the enumeration-heavy solvers; building it is
/// subject to the sweep cap.
pub fn value_table(v: &ValuationSpec, m: u32, caps: &Caps) -> Result<Vec<Rational>> {
    caps.check_sweep(m)?;
    Ok(ItemSet::full(m).subsets().map(|s| v.value(s)).collect())
}

/// A bundle and an item whose addition strictly decreases the value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityWitness {
    pub base: ItemSet,
    pub item: usize,
    pub before: Rational,
    pub after: Rational,
}

/// First violation of `v(S) ≤ v(S ∪ {j})` in canonical order, or `None` if
/// `v` is monotone.
pub fn monotonicity_witness(
    v: &ValuationSpec,
    m: u32,
    caps: &Caps,
) -> Result<Option<MonotonicityWitness>> {
    let table = value_table(v, m, caps)?;
    for mask in 0..table.len() {
        for j in 0..m as usize {
            if mask & (1 << j) != 0 {
                continue;
            }
            let with = mask | (1 << j);
            if table[mask] > table[with] {
                return Ok(Some(MonotonicityWitness {
                    base: ItemSet::from_bits(m, mask as u64)?,
                    item: j,
                    before: table[mask].clone(),
                    after: table[with].clone(),
                }));
            }
        }
    }
    Ok(None)
}

pub fn is_monotone(v: &ValuationSpec, m: u32, caps: &Caps) -> Result<bool> {
    Ok(monotonicity_witness(v, m, caps)?.is_none())
}

/// A quadruple violating the diminishing-returns inequality: adding `i` to
/// `base ∪ {j}` gains strictly more than adding `i` to `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmodularityWitness {
    pub base: ItemSet,
    pub first: usize,
    pub second: usize,
    pub gain_alone: Rational,
    pub gain_after_second: Rational,
}

/// First violation of `v(S ∪ {i,j}) - v(S ∪ {j}) ≤ v(S ∪ {i}) - v(S)` over
/// bundles `S` ascending and pairs `i < j`, or `None` if `v` is submodular.
pub fn submodularity_witness(
    v: &ValuationSpec,
    m: u32,
    caps: &Caps,
) -> Result<Option<SubmodularityWitness>> {
    let table = value_table(v, m, caps)?;
    for mask in 0..table.len() {
        for i in 0..m as usize {
            if mask & (1 << i) != 0 {
                continue;
            }
            for j in i + 1..m as usize {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let with_i = mask | (1 << i);
                let with_j = mask | (1 << j);
                let with_both = with_i | (1 << j);
                let gain_alone = &table[with_i] - &table[mask];
                let gain_after = &table[with_both] - &table[with_j];
                if gain_after > gain_alone {
                    return Ok(Some(SubmodularityWitness {
                        base: ItemSet::from_bits(m, mask as u64)?,
                        first: i,
                        second: j,
                        gain_alone,
                        gain_after_second: gain_after,
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn is_submodular(v: &ValuationSpec, m: u32, caps: &Caps) -> Result<bool> {
    Ok(submodularity_witness(v, m, caps)?.is_none())
}
