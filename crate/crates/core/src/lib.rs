//! Exact-arithmetic toolkit for item pricing and stable outcomes in
//! combinatorial markets.
//!
//! Everything is computed over arbitrary-precision rationals: linear-program
//! optima, integral allocation optima, integrality gaps, price feasibility.
//! No floating point enters any computation; approximate decimal output is a
//! rendering concern (`Rational::decimal_approx`).
//!
//! The core objects:
//! - [`Market`]: items plus per-buyer valuations ([`ValuationSpec`]).
//! - The assignment relaxation over a restricted item set and its exact
//!   optimum ([`lp`]), by explicit columns or column generation.
//! - Stable outcomes: allocations with item prices no buyer wants to deviate
//!   from ([`stability`]). A restriction supports a stable outcome exactly
//!   when its relaxation has integrality gap 1, which makes the gap both a
//!   certificate and a search tool.
//! - Constructions with provably bad gaps and approximation algorithms for
//!   classes where stability fails ([`instances`], [`algorithms`],
//!   [`certificates`]).

pub mod algorithms;
pub mod certificates;
mod error;
pub mod instances;
mod items;
pub mod lp;
mod market;
mod rational;
pub mod scenarios;
pub mod stability;
pub mod valuation;

pub use error::{Error, Result};
pub use items::{ItemSet, MAX_UNIVERSE};
pub use market::{Allocation, Market, PriceVector};
pub use rational::{rat, Rational};
pub use valuation::{Caps, ValuationSpec};
