//! Markets, allocations, and item prices.

use crate::error::{Error, Result};
use crate::items::{ItemSet, MAX_UNIVERSE};
use crate::rational::Rational;
use crate::valuation::ValuationSpec;

/// A combinatorial market: `m` indivisible items and one valuation per buyer.
#[derive(Clone, Debug)]
pub struct Market {
    m: u32,
    buyers: Vec<ValuationSpec>,
}

impl Market {
    pub fn new(m: u32, buyers: Vec<ValuationSpec>) -> Result<Market> {
        if m == 0 || m > MAX_UNIVERSE {
            return Err(Error::InvalidMarket(format!(
                "item count {m} outside 1..={MAX_UNIVERSE}"
            )));
        }
        if buyers.is_empty() {
            return Err(Error::InvalidMarket("no buyers".into()));
        }
        for (i, v) in buyers.iter().enumerate() {
            v.validate(m)
                .map_err(|e| Error::InvalidMarket(format!("buyer {i}: {e}")))?;
        }
        Ok(Market { m, buyers })
    }

    pub fn items(&self) -> u32 {
        self.m
    }

    pub fn buyers(&self) -> &[ValuationSpec] {
        &self.buyers
    }

    pub fn buyer_count(&self) -> usize {
        self.buyers.len()
    }

    pub fn full_set(&self) -> ItemSet {
        ItemSet::full(self.m)
    }

    /// A price no buyer will pay for any single item: `1 + max_i v_i(M)`.
    /// Pricing unsold items at this level removes them from every demand set.
    pub fn prohibitive_price(&self) -> Rational {
        let full = self.full_set();
        let max = self
            .buyers
            .iter()
            .map(|v| v.value(full))
            .max()
            .expect("markets have at least one buyer");
        Rational::one() + max
    }

    pub fn is_all_single_minded(&self) -> bool {
        self.buyers
            .iter()
            .all(|v| matches!(v, ValuationSpec::SingleMinded { .. }))
    }

    /// Total value of an allocation: `Σ_i v_i(X_i)`.
    pub fn welfare(&self, alloc: &Allocation) -> Rational {
        self.buyers
            .iter()
            .zip(alloc.bundles())
            .map(|(v, &s)| v.value(s))
            .sum()
    }
}

/// A partition of (part of) the ground set among the buyers. Bundles must be
/// pairwise disjoint; items in no bundle are unsold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    bundles: Vec<ItemSet>,
    unsold: ItemSet,
}

impl Allocation {
    pub fn new(m: u32, bundles: Vec<ItemSet>) -> Result<Allocation> {
        let mut sold = ItemSet::empty(m);
        for (i, b) in bundles.iter().enumerate() {
            if b.universe() != m {
                return Err(Error::InvalidInput(format!(
                    "bundle {i} over universe {}, market has {m} items",
                    b.universe()
                )));
            }
            if !sold.is_disjoint_from(b) {
                return Err(Error::InvalidInput(format!(
                    "bundle {i} overlaps earlier bundles at {}",
                    sold.intersect(b)
                )));
            }
            sold = sold.union(b);
        }
        Ok(Allocation { unsold: sold.complement(), bundles })
    }

    /// The everything-unsold allocation.
    pub fn empty(m: u32, buyers: usize) -> Allocation {
        Allocation {
            bundles: vec![ItemSet::empty(m); buyers],
            unsold: ItemSet::full(m),
        }
    }

    pub fn bundles(&self) -> &[ItemSet] {
        &self.bundles
    }

    pub fn bundle(&self, buyer: usize) -> ItemSet {
        self.bundles[buyer]
    }

    pub fn unsold(&self) -> ItemSet {
        self.unsold
    }

    pub fn sold(&self) -> ItemSet {
        self.unsold.complement()
    }
}

/// Nonnegative per-item prices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceVector(Vec<Rational>);

impl PriceVector {
    pub fn new(prices: Vec<Rational>) -> Result<PriceVector> {
        if prices.len() as u32 > MAX_UNIVERSE {
            return Err(Error::InvalidInput(format!(
                "{} prices exceed the {MAX_UNIVERSE}-item limit",
                prices.len()
            )));
        }
        if let Some((j, p)) = prices.iter().enumerate().find(|(_, p)| p.is_negative()) {
            return Err(Error::InvalidInput(format!("negative price {p} on item {j}")));
        }
        Ok(PriceVector(prices))
    }

    pub fn zeros(m: u32) -> PriceVector {
        PriceVector(vec![Rational::zero(); m as usize])
    }

    pub fn len(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> &Rational {
        &self.0[j]
    }

    pub fn set(&mut self, j: usize, p: Rational) -> Result<()> {
        if p.is_negative() {
            return Err(Error::InvalidInput(format!("negative price {p} on item {j}")));
        }
        self.0[j] = p;
        Ok(())
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    /// `p(S) = Σ_{j∈S} p_j`.
    pub fn total(&self, s: ItemSet) -> Rational {
        s.iter().map(|j| &self.0[j]).sum()
    }
}
