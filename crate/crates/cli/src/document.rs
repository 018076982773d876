//! On-disk document formats: markets, allocations, and outcomes as JSON
//! with every rational rendered as a `"p/q"` string. Numbers are reserved
//! for counts and item indices, so a float anywhere a rational belongs is
//! a parse error, not a lossy surprise.

use serde::{Deserialize, Serialize};
use walras_core::stability::Outcome;
use walras_core::{Allocation, Error, ItemSet, Market, PriceVector, Rational, Result, ValuationSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MarketDocument {
    pub schema: u32,
    pub m: u32,
    pub buyers: Vec<BuyerDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "class", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuyerDocument {
    Additive { values: Vec<String> },
    UnitDemand { values: Vec<String> },
    BudgetAdditive { values: Vec<String>, budget: String },
    Xos { clauses: Vec<Vec<String>> },
    SingleMinded { desired: Vec<u32>, value: String },
    Symmetric { by_size: Vec<String> },
    HarmonicPlus { eps: String, inner: Box<BuyerDocument> },
    BucketXos { buckets: Vec<Vec<u32>> },
    BucketUnit { buckets: Vec<Vec<u32>> },
    Explicit { values: Vec<String> },
}

/// A bare allocation: per-buyer sorted index lists plus the explicit list
/// of unsold items. The redundancy is deliberate — a document whose parts
/// do not tile the ground set is rejected.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AllocationDocument {
    pub m: u32,
    pub bundles: Vec<Vec<u32>>,
    pub unsold: Vec<u32>,
}

/// An allocation together with its supporting prices, one per item.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct OutcomeDocument {
    pub m: u32,
    pub bundles: Vec<Vec<u32>>,
    pub unsold: Vec<u32>,
    pub prices: Vec<String>,
}

fn parse_rational(s: &str) -> Result<Rational> {
    s.parse()
}

fn parse_rationals(values: &[String]) -> Result<Vec<Rational>> {
    values.iter().map(|s| parse_rational(s)).collect()
}

fn render_rationals(values: &[Rational]) -> Vec<String> {
    values.iter().map(Rational::to_string).collect()
}

fn parse_set(m: u32, indices: &[u32]) -> Result<ItemSet> {
    let as_usize: Vec<usize> = indices.iter().map(|&j| j as usize).collect();
    ItemSet::from_indices(m, &as_usize)
}

fn render_set(s: ItemSet) -> Vec<u32> {
    s.indices().into_iter().map(|j| j as u32).collect()
}

pub fn buyer_from_document(doc: &BuyerDocument, m: u32) -> Result<ValuationSpec> {
    Ok(match doc {
        BuyerDocument::Additive { values } => {
            ValuationSpec::Additive { values: parse_rationals(values)? }
        }
        BuyerDocument::UnitDemand { values } => {
            ValuationSpec::UnitDemand { values: parse_rationals(values)? }
        }
        BuyerDocument::BudgetAdditive { values, budget } => ValuationSpec::BudgetAdditive {
            values: parse_rationals(values)?,
            budget: parse_rational(budget)?,
        },
        BuyerDocument::Xos { clauses } => ValuationSpec::Xos {
            clauses: clauses.iter().map(|c| parse_rationals(c)).collect::<Result<_>>()?,
        },
        BuyerDocument::SingleMinded { desired, value } => ValuationSpec::SingleMinded {
            desired: parse_set(m, desired)?,
            value: parse_rational(value)?,
        },
        BuyerDocument::Symmetric { by_size } => {
            ValuationSpec::Symmetric { by_size: parse_rationals(by_size)? }
        }
        BuyerDocument::HarmonicPlus { eps, inner } => ValuationSpec::HarmonicPlus {
            eps: parse_rational(eps)?,
            inner: Box::new(buyer_from_document(inner, m)?),
        },
        BuyerDocument::BucketXos { buckets } => ValuationSpec::BucketXos {
            buckets: buckets.iter().map(|b| parse_set(m, b)).collect::<Result<_>>()?,
        },
        BuyerDocument::BucketUnit { buckets } => ValuationSpec::BucketUnit {
            buckets: buckets.iter().map(|b| parse_set(m, b)).collect::<Result<_>>()?,
        },
        BuyerDocument::Explicit { values } => {
            ValuationSpec::Explicit { values: parse_rationals(values)? }
        }
    })
}

pub fn buyer_to_document(spec: &ValuationSpec) -> BuyerDocument {
    match spec {
        ValuationSpec::Additive { values } => {
            BuyerDocument::Additive { values: render_rationals(values) }
        }
        ValuationSpec::UnitDemand { values } => {
            BuyerDocument::UnitDemand { values: render_rationals(values) }
        }
        ValuationSpec::BudgetAdditive { values, budget } => BuyerDocument::BudgetAdditive {
            values: render_rationals(values),
            budget: budget.to_string(),
        },
        ValuationSpec::Xos { clauses } => BuyerDocument::Xos {
            clauses: clauses.iter().map(|c| render_rationals(c)).collect(),
        },
        ValuationSpec::SingleMinded { desired, value } => BuyerDocument::SingleMinded {
            desired: render_set(*desired),
            value: value.to_string(),
        },
        ValuationSpec::Symmetric { by_size } => {
            BuyerDocument::Symmetric { by_size: render_rationals(by_size) }
        }
        ValuationSpec::HarmonicPlus { eps, inner } => BuyerDocument::HarmonicPlus {
            eps: eps.to_string(),
            inner: Box::new(buyer_to_document(inner)),
        },
        ValuationSpec::BucketXos { buckets } => BuyerDocument::BucketXos {
            buckets: buckets.iter().map(|b| render_set(*b)).collect(),
        },
        ValuationSpec::BucketUnit { buckets } => BuyerDocument::BucketUnit {
            buckets: buckets.iter().map(|b| render_set(*b)).collect(),
        },
        ValuationSpec::Explicit { values } => {
            BuyerDocument::Explicit { values: render_rationals(values) }
        }
    }
}

pub fn market_from_document(doc: &MarketDocument) -> Result<Market> {
    if doc.schema != SCHEMA_VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported schema {}, this build reads {SCHEMA_VERSION}",
            doc.schema
        )));
    }
    let buyers = doc
        .buyers
        .iter()
        .map(|b| buyer_from_document(b, doc.m))
        .collect::<Result<Vec<_>>>()?;
    Market::new(doc.m, buyers)
}

pub fn market_to_document(market: &Market) -> MarketDocument {
    MarketDocument {
        schema: SCHEMA_VERSION,
        m: market.items(),
        buyers: market.buyers().iter().map(buyer_to_document).collect(),
    }
}

fn bundles_from_lists(m: u32, bundles: &[Vec<u32>], unsold: &[u32]) -> Result<Allocation> {
    let sets = bundles.iter().map(|b| parse_set(m, b)).collect::<Result<Vec<_>>>()?;
    let allocation = Allocation::new(m, sets)?;
    let declared = parse_set(m, unsold)?;
    if declared != allocation.unsold() {
        return Err(Error::InvalidInput(format!(
            "unsold list {:?} does not complement the bundles",
            unsold
        )));
    }
    Ok(allocation)
}

pub fn allocation_from_document(doc: &AllocationDocument) -> Result<Allocation> {
    bundles_from_lists(doc.m, &doc.bundles, &doc.unsold)
}

pub fn allocation_to_document(allocation: &Allocation) -> AllocationDocument {
    AllocationDocument {
        m: allocation.unsold().universe(),
        bundles: allocation.bundles().iter().map(|b| render_set(*b)).collect(),
        unsold: render_set(allocation.unsold()),
    }
}

pub fn outcome_from_document(doc: &OutcomeDocument) -> Result<Outcome> {
    let allocation = bundles_from_lists(doc.m, &doc.bundles, &doc.unsold)?;
    let prices = PriceVector::new(parse_rationals(&doc.prices)?)?;
    Ok(Outcome { allocation, prices })
}

pub fn outcome_to_document(outcome: &Outcome) -> OutcomeDocument {
    let allocation = allocation_to_document(&outcome.allocation);
    OutcomeDocument {
        m: allocation.m,
        bundles: allocation.bundles,
        unsold: allocation.unsold,
        prices: render_rationals(outcome.prices.as_slice()),
    }
}
