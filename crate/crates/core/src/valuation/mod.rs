//! Buyer valuation classes over bundles of items.
//!
//! Every class evaluates to a monotone set function with `v(∅) = 0`. The
//! composite `HarmonicPlus` class adds `h(|S|) = |S| + Σ_{i≤|S|} 1/i`, whose
//! strictly decreasing marginal `1 + 1/(z+1)` turns any bounded perturbation
//! into a submodular function once the perturbation weight is small enough;
//! `epsilon_bound` computes how small.

mod checks;
mod demand;

pub use checks::{
    is_monotone, is_submodular, monotonicity_witness, submodularity_witness, value_table,
    MonotonicityWitness, SubmodularityWitness,
};
pub use demand::{best_response, demand, max_utility, utility, Caps, Demand};

use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::rational::{rat, Rational};

/// Description of one buyer's valuation. Serializable by the CLI layer; the
/// recursive `HarmonicPlus` variant composes an inner class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValuationSpec {
    /// `v(S) = Σ_{j∈S} values[j]`.
    Additive { values: Vec<Rational> },
    /// `v(S) = max_{j∈S} values[j]` (0 on ∅).
    UnitDemand { values: Vec<Rational> },
    /// `v(S) = min(Σ_{j∈S} values[j], budget)`.
    BudgetAdditive { values: Vec<Rational>, budget: Rational },
    /// `v(S) = max_clause Σ_{j∈S} clause[j]`; each clause is additive.
    Xos { clauses: Vec<Vec<Rational>> },
    /// `v(S) = value` if `S ⊇ desired`, else 0.
    SingleMinded { desired: ItemSet, value: Rational },
    /// `v(S) = by_size[|S|]`; the table must be nondecreasing from 0.
    Symmetric { by_size: Vec<Rational> },
    /// `v(S) = h(|S|) + eps·inner(S)` with `h(z) = z + Σ_{i=1}^z 1/i`.
    HarmonicPlus { eps: Rational, inner: Box<ValuationSpec> },
    /// Buckets partition the ground set; `v(S) = max_b xos_piece(|S ∩ b|)`
    /// where the piece value is 0, 2, or the piece size for sizes 0, 1, ≥ 2.
    BucketXos { buckets: Vec<ItemSet> },
    /// Buckets partition the ground set; `v(S) = Σ_b unit_piece(S ∩ b)` where
    /// a nonempty piece is worth `1 - 1/k` for `k` buckets.
    BucketUnit { buckets: Vec<ItemSet> },
    /// Explicit table indexed by bundle mask; length `2^m`, monotone, 0 at ∅.
    Explicit { values: Vec<Rational> },
}

/// `h(z) = z + Σ_{i=1}^z 1/i`. Strictly increasing with strictly decreasing
/// marginals `h(z+1) - h(z) = 1 + 1/(z+1)`.
pub fn harmonic_value(z: u32) -> Rational {
    let mut total = Rational::from_int(z as i64);
    for i in 1..=z {
        total += &rat(1, i as i64);
    }
    total
}

/// Value of per-bucket pieces for `BucketXos`: singletons are worth 2,
/// larger pieces their cardinality.
fn xos_piece(size: u32) -> Rational {
    match size {
        0 => Rational::zero(),
        1 => Rational::from_int(2),
        z => Rational::from_int(z as i64),
    }
}

impl ValuationSpec {
    /// Checks internal consistency against a ground set of `m` items.
    pub fn validate(&self, m: u32) -> Result<()> {
        let expect_len = |values: &[Rational], what: &str| -> Result<()> {
            if values.len() != m as usize {
                return Err(Error::InvalidMarket(format!(
                    "{what}: expected {m} per-item values, got {}",
                    values.len()
                )));
            }
            if let Some(v) = values.iter().find(|v| v.is_negative()) {
                return Err(Error::InvalidMarket(format!("{what}: negative value {v}")));
            }
            Ok(())
        };
        match self {
            ValuationSpec::Additive { values } => expect_len(values, "additive"),
            ValuationSpec::UnitDemand { values } => expect_len(values, "unit-demand"),
            ValuationSpec::BudgetAdditive { values, budget } => {
                expect_len(values, "budget-additive")?;
                if budget.is_negative() {
                    return Err(Error::InvalidMarket(format!("negative budget {budget}")));
                }
                Ok(())
            }
            ValuationSpec::Xos { clauses } => {
                if clauses.is_empty() {
                    return Err(Error::InvalidMarket("xos: no clauses".into()));
                }
                for c in clauses {
                    expect_len(c, "xos clause")?;
                }
                Ok(())
            }
            ValuationSpec::SingleMinded { desired, value } => {
                if desired.universe() != m {
                    return Err(Error::InvalidMarket(format!(
                        "single-minded: desired set universe {} != {m}",
                        desired.universe()
                    )));
                }
                if desired.is_empty() {
                    return Err(Error::InvalidMarket("single-minded: empty desired set".into()));
                }
                if value.is_negative() {
                    return Err(Error::InvalidMarket(format!("negative value {value}")));
                }
                Ok(())
            }
            ValuationSpec::Symmetric { by_size } => {
                if by_size.len() != m as usize + 1 {
                    return Err(Error::InvalidMarket(format!(
                        "symmetric: expected {} entries (sizes 0..={m}), got {}",
                        m + 1,
                        by_size.len()
                    )));
                }
                if !by_size[0].is_zero() {
                    return Err(Error::InvalidMarket("symmetric: value at size 0 must be 0".into()));
                }
                if by_size.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::InvalidMarket("symmetric: table must be nondecreasing".into()));
                }
                Ok(())
            }
            ValuationSpec::HarmonicPlus { eps, inner } => {
                if eps.is_negative() {
                    return Err(Error::InvalidMarket(format!("negative eps {eps}")));
                }
                inner.validate(m)
            }
            ValuationSpec::BucketXos { buckets } | ValuationSpec::BucketUnit { buckets } => {
                validate_partition(buckets, m)
            }
            ValuationSpec::Explicit { values } => {
                if m > 20 {
                    return Err(Error::InvalidMarket(format!(
                        "explicit table over {m} items would need 2^{m} entries"
                    )));
                }
                if values.len() != 1usize << m {
                    return Err(Error::InvalidMarket(format!(
                        "explicit: expected {} entries, got {}",
                        1usize << m,
                        values.len()
                    )));
                }
                if !values[0].is_zero() {
                    return Err(Error::InvalidMarket("explicit: value at ∅ must be 0".into()));
                }
                // Monotone along single-item extensions implies monotone.
                for mask in 0..values.len() {
                    for j in 0..m as usize {
                        if mask & (1 << j) == 0 && values[mask] > values[mask | (1 << j)] {
                            return Err(Error::InvalidMarket(format!(
                                "explicit: not monotone at mask {mask:#b} plus item {j}"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Exact value of a bundle. Assumes `validate` passed for `s.universe()`.
    pub fn value(&self, s: ItemSet) -> Rational {
        match self {
            ValuationSpec::Additive { values } => s.iter().map(|j| &values[j]).sum(),
            ValuationSpec::UnitDemand { values } => s
                .iter()
                .map(|j| values[j].clone())
                .max()
                .unwrap_or_else(Rational::zero),
            ValuationSpec::BudgetAdditive { values, budget } => {
                let total: Rational = s.iter().map(|j| &values[j]).sum();
                total.min(budget.clone())
            }
            ValuationSpec::Xos { clauses } => clauses
                .iter()
                .map(|c| s.iter().map(|j| &c[j]).sum())
                .max()
                .unwrap_or_else(Rational::zero),
            ValuationSpec::SingleMinded { desired, value } => {
                if desired.is_subset_of(&s) {
                    value.clone()
                } else {
                    Rational::zero()
                }
            }
            ValuationSpec::Symmetric { by_size } => by_size[s.len() as usize].clone(),
            ValuationSpec::HarmonicPlus { eps, inner } => {
                harmonic_value(s.len()) + eps * inner.value(s)
            }
            ValuationSpec::BucketXos { buckets } => buckets
                .iter()
                .map(|b| xos_piece(s.intersect(b).len()))
                .max()
                .unwrap_or_else(Rational::zero),
            ValuationSpec::BucketUnit { buckets } => {
                let k = buckets.len() as i64;
                let touched = buckets.iter().filter(|b| !s.is_disjoint_from(b)).count() as i64;
                rat(touched * (k - 1), k)
            }
            ValuationSpec::Explicit { values } => values[s.bits() as usize].clone(),
        }
    }

    /// `v(S ∪ {j}) - v(S)`. Errors if `j ∈ S`.
    pub fn marginal(&self, j: usize, s: ItemSet) -> Result<Rational> {
        if s.contains(j) {
            return Err(Error::Precondition(format!("item {j} already in {s}")));
        }
        Ok(self.value(s.insert(j)) - self.value(s))
    }
}

fn validate_partition(buckets: &[ItemSet], m: u32) -> Result<()> {
    if buckets.is_empty() {
        return Err(Error::InvalidMarket("bucket valuation: no buckets".into()));
    }
    let mut seen = ItemSet::empty(m);
    for b in buckets {
        if b.universe() != m {
            return Err(Error::InvalidMarket(format!(
                "bucket universe {} != {m}",
                b.universe()
            )));
        }
        if b.is_empty() {
            return Err(Error::InvalidMarket("empty bucket".into()));
        }
        if !seen.is_disjoint_from(b) {
            return Err(Error::InvalidMarket(format!("buckets overlap at {}", seen.intersect(b))));
        }
        seen = seen.union(b);
    }
    if seen != ItemSet::full(m) {
        return Err(Error::InvalidMarket(format!(
            "buckets cover {seen}, not the full ground set"
        )));
    }
    Ok(())
}

/// Result of `epsilon_bound`: the weight threshold below which the harmonic
/// composite is submodular, or a marker that any weight works because the
/// perturbation is identically zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpsilonBound {
    Below(Rational),
    Unbounded,
}

impl EpsilonBound {
    /// Default weight: half the threshold, or 1 for the unbounded marker.
    pub fn default_eps(&self) -> Rational {
        match self {
            EpsilonBound::Below(b) => b / Rational::from_int(2),
            EpsilonBound::Unbounded => Rational::one(),
        }
    }
}

/// Strict threshold `1 / (2(m+1)(m+2)·max_S f(S))` on the perturbation weight:
/// for any `0 ≤ eps` strictly below it, `h(|S|) + eps·f(S)` is submodular for
/// any bounded `f` with `max_S f(S)` as computed. `m` is the ground-set size.
/// Enumerates all `2^m` bundles, so the sweep cap applies.
pub fn epsilon_bound(f: &ValuationSpec, m: u32, caps: &crate::Caps) -> Result<EpsilonBound> {
    caps.check_sweep(m)?;
    let mut max = Rational::zero();
    for s in ItemSet::full(m).subsets() {
        let v = f.value(s);
        if v > max {
            max = v;
        }
    }
    if max.is_zero() {
        return Ok(EpsilonBound::Unbounded);
    }
    let denom = Rational::from_int(2)
        * Rational::from_int(m as i64 + 1)
        * Rational::from_int(m as i64 + 2)
        * max;
    Ok(EpsilonBound::Below(denom.recip()?))
}
