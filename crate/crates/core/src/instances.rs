//! Benchmark market constructions and random market generation.
//!
//! Three named families exercise the boundary between markets that admit
//! stable outcomes and markets that do not:
//!
//! - [`xos_pair_market`]: a unit-demand buyer against a bulk buyer whose
//!   value concentrates on large bundles. Fractional-over-integral premium
//!   approaching 1/2 of the optimum as `m` grows, with two buyers whose
//!   valuations are fractionally subadditive.
//! - [`bucket_market`]: two monotone submodular (perturbed-harmonic) buyers
//!   over `k` buckets of `k` items. The relaxation strictly beats every
//!   integral allocation on the full set, so no stable outcome sells
//!   everything — submodularity alone does not rescue stability.
//! - [`single_minded_grid`]: `n−1` overlapping single-bundle buyers plus one
//!   buyer wanting everything. The welfare-optimal allocation is never
//!   stably supportable, and the best stable welfare lags by a factor that
//!   grows linearly in `n`.
//!
//! [`random_market`] draws reproducible mixed markets from a seeded stream
//! for cross-validation harnesses, and the [`InstanceGenerator`] registry
//! exposes all of these by name.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::market::Market;
use crate::rational::{rat, Rational};
use crate::valuation::ValuationSpec;

/// Unit-demand buyer (every item worth `1/2 − delta`) against a symmetric
/// bulk buyer worth `max(1, z/2)` for any `z ≥ 1` items. Requires
/// `0 < delta < 1/(2(m−1))`; defaults to the midpoint `1/(4(m−1))`.
pub fn xos_pair_market(m: u32, delta: Option<Rational>) -> Result<Market> {
    if !(2..=crate::MAX_UNIVERSE).contains(&m) {
        return Err(Error::InvalidInput(format!("need 2..=64 items, got {m}")));
    }
    let limit = rat(1, 2 * (m as i64 - 1));
    let delta = delta.unwrap_or_else(|| rat(1, 4 * (m as i64 - 1)));
    if !delta.is_positive() || delta >= limit {
        return Err(Error::InvalidInput(format!(
            "delta must lie strictly between 0 and {limit}, got {delta}"
        )));
    }
    let single = rat(1, 2) - &delta;
    let mut by_size = vec![Rational::zero()];
    for z in 1..=m as i64 {
        by_size.push(Rational::one().max(rat(z, 2)));
    }
    Market::new(
        m,
        vec![
            ValuationSpec::UnitDemand { values: vec![single; m as usize] },
            ValuationSpec::Symmetric { by_size },
        ],
    )
}

/// The `k` buckets of `k` consecutive items each that both bucket valuations
/// share.
pub fn even_buckets(k: u32) -> Vec<ItemSet> {
    let m = k * k;
    (0..k)
        .map(|b| {
            let lo = (b * k) as usize;
            ItemSet::from_indices(m, &(lo..lo + k as usize).collect::<Vec<_>>())
                .expect("bucket indices are within the ground set")
        })
        .collect()
}

/// Largest weight the harmonic perturbation may carry while keeping both
/// bucket-market buyers submodular: `1/(2(m+1)(m+2)·k)`, since the larger of
/// the two perturbations peaks at `k` (a full bucket).
pub fn bucket_epsilon_limit(k: u32) -> Rational {
    let m = (k * k) as i64;
    rat(1, 2 * (m + 1) * (m + 2) * k as i64)
}

/// Two perturbed-harmonic buyers over `k` buckets of `k` items: buyer 0's
/// perturbation rewards the best bucket piece, buyer 1's rewards touching
/// many buckets. Requires `2 ≤ k ≤ 8` and `0 < eps < bucket_epsilon_limit`;
/// defaults to half the limit.
pub fn bucket_market(k: u32, eps: Option<Rational>) -> Result<Market> {
    if !(2..=8).contains(&k) {
        return Err(Error::InvalidInput(format!("need 2..=8 buckets, got {k}")));
    }
    let limit = bucket_epsilon_limit(k);
    let eps = eps.unwrap_or_else(|| &limit / Rational::from_int(2));
    if !eps.is_positive() || eps >= limit {
        return Err(Error::InvalidInput(format!(
            "perturbation weight must lie strictly between 0 and {limit}, got {eps}"
        )));
    }
    Market::new(
        k * k,
        vec![
            ValuationSpec::HarmonicPlus {
                eps: eps.clone(),
                inner: Box::new(ValuationSpec::BucketXos { buckets: even_buckets(k) }),
            },
            ValuationSpec::HarmonicPlus {
                eps,
                inner: Box::new(ValuationSpec::BucketUnit { buckets: even_buckets(k) }),
            },
        ],
    )
}

/// Items of the grid market: all pairs `(a, b)` with `a, b ≥ 1` and
/// `a + b ≤ n`, ordered lexicographically.
pub fn grid_items(n: u32) -> Vec<(u32, u32)> {
    let mut items = Vec::new();
    for a in 1..n {
        for b in 1..=(n - a) {
            items.push((a, b));
        }
    }
    items
}

/// `n−1` single-minded buyers on a triangular grid of `n(n−1)/2` items plus
/// one buyer who wants everything. Buyer `i ∈ 1..n` desires the row `a = i`
/// together with the column `b = n − i` (they meet in one item), worth
/// `n + 1`; the last buyer desires the full set, worth its size. Any two
/// desired sets intersect, so at most one grid buyer can ever win, yet the
/// whole set is worth far more — and can never be sold stably.
pub fn single_minded_grid(n: u32) -> Result<Market> {
    if !(3..=11).contains(&n) {
        return Err(Error::InvalidInput(format!(
            "need 3..=11 (at most 64 grid items), got {n}"
        )));
    }
    let items = grid_items(n);
    let m = items.len() as u32;
    let mut buyers = Vec::with_capacity(n as usize);
    for i in 1..n {
        let members: Vec<usize> = items
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == i || b == n - i)
            .map(|(j, _)| j)
            .collect();
        buyers.push(ValuationSpec::SingleMinded {
            desired: ItemSet::from_indices(m, &members)?,
            value: rat(n as i64 + 1, 1),
        });
    }
    buyers.push(ValuationSpec::SingleMinded {
        desired: ItemSet::full(m),
        value: rat(m as i64, 1),
    });
    Market::new(m, buyers)
}

/// Valuation classes `random_market` can draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomClass {
    Additive,
    UnitDemand,
    BudgetAdditive,
    Xos,
    SingleMinded,
    Symmetric,
    Explicit,
}

#[derive(Clone, Debug)]
pub struct RandomMarketParams {
    pub seed: u64,
    pub buyers: usize,
    pub items: u32,
    pub classes: Vec<RandomClass>,
    /// Every drawn value is `k / denominator` with `k ≤ max_numerator`.
    pub max_numerator: i64,
    pub denominator: i64,
}

impl Default for RandomMarketParams {
    fn default() -> Self {
        RandomMarketParams {
            seed: 0,
            buyers: 3,
            items: 5,
            classes: vec![
                RandomClass::Additive,
                RandomClass::UnitDemand,
                RandomClass::BudgetAdditive,
                RandomClass::SingleMinded,
                RandomClass::Symmetric,
            ],
            max_numerator: 8,
            denominator: 2,
        }
    }
}

/// Reproducible random market: the same parameters always produce the same
/// market, byte for byte.
pub fn random_market(params: &RandomMarketParams) -> Result<Market> {
    if params.classes.is_empty() {
        return Err(Error::InvalidInput("no valuation classes to draw from".into()));
    }
    if params.max_numerator < 1 || params.denominator < 1 {
        return Err(Error::InvalidInput("value range must be positive".into()));
    }
    if params.classes.contains(&RandomClass::Explicit) && params.items > 10 {
        return Err(Error::InvalidInput(format!(
            "explicit tables over {} items are too large to draw",
            params.items
        )));
    }
    let m = params.items;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let value = |rng: &mut ChaCha8Rng| rat(rng.gen_range(0..=params.max_numerator), params.denominator);
    let mut buyers = Vec::with_capacity(params.buyers);
    for _ in 0..params.buyers {
        let class = params.classes[rng.gen_range(0..params.classes.len())];
        let spec = match class {
            RandomClass::Additive => ValuationSpec::Additive {
                values: (0..m).map(|_| value(&mut rng)).collect(),
            },
            RandomClass::UnitDemand => ValuationSpec::UnitDemand {
                values: (0..m).map(|_| value(&mut rng)).collect(),
            },
            RandomClass::BudgetAdditive => ValuationSpec::BudgetAdditive {
                values: (0..m).map(|_| value(&mut rng)).collect(),
                budget: rat(rng.gen_range(0..=2 * params.max_numerator), params.denominator),
            },
            RandomClass::Xos => {
                let clauses = (0..rng.gen_range(1..=3))
                    .map(|_| (0..m).map(|_| value(&mut rng)).collect())
                    .collect();
                ValuationSpec::Xos { clauses }
            }
            RandomClass::SingleMinded => ValuationSpec::SingleMinded {
                desired: ItemSet::from_bits(m, rng.gen_range(1..(1u64 << m)))?,
                value: value(&mut rng),
            },
            RandomClass::Symmetric => {
                let mut by_size = vec![Rational::zero()];
                for z in 1..=m as usize {
                    by_size.push(&by_size[z - 1] + value(&mut rng));
                }
                ValuationSpec::Symmetric { by_size }
            }
            RandomClass::Explicit => {
                let mut values: Vec<Rational> =
                    (0..1usize << m).map(|_| value(&mut rng)).collect();
                values[0] = Rational::zero();
                // Monotonize: raise every bundle to its best sub-bundle.
                for mask in 1..values.len() {
                    for j in 0..m as usize {
                        if mask & (1 << j) != 0 && values[mask ^ (1 << j)] > values[mask] {
                            values[mask] = values[mask ^ (1 << j)].clone();
                        }
                    }
                }
                ValuationSpec::Explicit { values }
            }
        };
        buyers.push(spec);
    }
    Market::new(m, buyers)
}

/// Knobs shared by all named generators; each uses the subset it documents.
#[derive(Clone, Debug, Default)]
pub struct GeneratorParams {
    /// Family-specific size: items for `xos` and `random`, buckets for
    /// `submodular`, grid parameter for `single-minded`.
    pub size: Option<u32>,
    /// Buyer count (`random` only).
    pub buyers: Option<usize>,
    /// Random seed (`random` only).
    pub seed: Option<u64>,
    /// Unit-demand discount (`xos` only).
    pub delta: Option<Rational>,
    /// Perturbation weight (`submodular` only).
    pub eps: Option<Rational>,
}

pub trait InstanceGenerator: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn generate(&self, params: &GeneratorParams) -> Result<Market>;
}

struct XosPairGenerator;

impl InstanceGenerator for XosPairGenerator {
    fn name(&self) -> &'static str {
        "xos"
    }

    fn describe(&self) -> &'static str {
        "unit-demand vs bulk buyer; fractionally subadditive pair with a large gap"
    }

    fn generate(&self, params: &GeneratorParams) -> Result<Market> {
        xos_pair_market(params.size.unwrap_or(5), params.delta.clone())
    }
}

struct BucketGenerator;

impl InstanceGenerator for BucketGenerator {
    fn name(&self) -> &'static str {
        "submodular"
    }

    fn describe(&self) -> &'static str {
        "two perturbed-harmonic submodular buyers over k buckets of k items"
    }

    fn generate(&self, params: &GeneratorParams) -> Result<Market> {
        bucket_market(params.size.unwrap_or(4), params.eps.clone())
    }
}

struct GridGenerator;

impl InstanceGenerator for GridGenerator {
    fn name(&self) -> &'static str {
        "single-minded"
    }

    fn describe(&self) -> &'static str {
        "overlapping single-minded buyers on a triangular grid plus a bulk buyer"
    }

    fn generate(&self, params: &GeneratorParams) -> Result<Market> {
        single_minded_grid(params.size.unwrap_or(4))
    }
}

struct RandomGenerator;

impl InstanceGenerator for RandomGenerator {
    fn name(&self) -> &'static str {
        "random"
    }

    fn describe(&self) -> &'static str {
        "seeded mixed-class market for cross-validation"
    }

    fn generate(&self, params: &GeneratorParams) -> Result<Market> {
        let mut p = RandomMarketParams::default();
        if let Some(size) = params.size {
            p.items = size;
        }
        if let Some(buyers) = params.buyers {
            p.buyers = buyers;
        }
        if let Some(seed) = params.seed {
            p.seed = seed;
        }
        random_market(&p)
    }
}

/// Every registered market generator.
pub fn generators() -> Vec<Box<dyn InstanceGenerator>> {
    vec![
        Box::new(XosPairGenerator),
        Box::new(BucketGenerator),
        Box::new(GridGenerator),
        Box::new(RandomGenerator),
    ]
}

pub fn generator_by_name(name: &str) -> Option<Box<dyn InstanceGenerator>> {
    generators().into_iter().find(|g| g.name() == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::{epsilon_bound, harmonic_value, Caps, EpsilonBound};

    #[test]
    fn bucket_epsilon_limit_matches_the_per_buyer_sweep() {
        let caps = Caps::default();
        for k in [2u32, 3, 4] {
            let m = k * k;
            let bx = ValuationSpec::BucketXos { buckets: even_buckets(k) };
            let bu = ValuationSpec::BucketUnit { buckets: even_buckets(k) };
            let tight = match epsilon_bound(&bx, m, &caps).unwrap() {
                EpsilonBound::Below(b) => b,
                EpsilonBound::Unbounded => panic!("bucket perturbations are not zero"),
            };
            // The best-piece buyer peaks at k, the coverage buyer at k−1, so
            // the shared limit is the best-piece buyer's.
            assert_eq!(bucket_epsilon_limit(k), tight);
            let looser = match epsilon_bound(&bu, m, &caps).unwrap() {
                EpsilonBound::Below(b) => b,
                EpsilonBound::Unbounded => panic!("bucket perturbations are not zero"),
            };
            assert!(looser > tight);
        }
        assert_eq!(rat(1, 120), bucket_epsilon_limit(2));
        assert_eq!(rat(1, 2448), bucket_epsilon_limit(4));
    }

    #[test]
    fn bucket_market_defaults_and_rejects_heavy_perturbations() {
        let market = bucket_market(2, None).unwrap();
        // Default eps = half of 1/120.
        let expect = harmonic_value(4) + rat(1, 240) * rat(2, 1);
        assert_eq!(expect, market.buyers()[0].value(market.full_set()));
        let market = bucket_market(4, None).unwrap();
        let expect = harmonic_value(16) + rat(1, 4896) * rat(4, 1);
        assert_eq!(expect, market.buyers()[0].value(market.full_set()));
        assert!(bucket_market(4, Some(rat(1, 2448))).is_err());
        assert!(bucket_market(4, Some(Rational::zero())).is_err());
        assert!(bucket_market(1, None).is_err());
        assert!(bucket_market(9, None).is_err());
    }

    #[test]
    fn xos_pair_market_has_the_advertised_values() {
        let market = xos_pair_market(5, Some(rat(1, 100))).unwrap();
        let one_item = ItemSet::singleton(5, 0);
        assert_eq!(rat(49, 100), market.buyers()[0].value(one_item));
        assert_eq!(rat(1, 1), market.buyers()[1].value(one_item));
        assert_eq!(rat(5, 2), market.buyers()[1].value(market.full_set()));
        // Delta range is open on both sides: 1/(2(m−1)) = 1/8 at m = 5.
        assert!(xos_pair_market(5, Some(rat(1, 8))).is_err());
        assert!(xos_pair_market(5, Some(Rational::zero())).is_err());
        // Default delta is half the limit.
        let dflt = xos_pair_market(5, None).unwrap();
        assert_eq!(rat(1, 2) - rat(1, 16), dflt.buyers()[0].value(one_item));
    }

    #[test]
    fn grid_desired_sets_overlap_pairwise_in_one_item() {
        for n in 3..=8u32 {
            let market = single_minded_grid(n).unwrap();
            let m = (n * (n - 1) / 2) as usize;
            assert_eq!(m, market.items() as usize);
            assert_eq!(n as usize, market.buyer_count());
            let desired: Vec<ItemSet> = market
                .buyers()
                .iter()
                .map(|v| match v {
                    ValuationSpec::SingleMinded { desired, .. } => *desired,
                    other => panic!("grid buyers are single-minded, got {other:?}"),
                })
                .collect();
            let grid = &desired[..(n - 1) as usize];
            let total: u32 = grid.iter().map(|s| s.len()).sum();
            assert_eq!((n - 1) * (n - 1), total);
            for (i, a) in grid.iter().enumerate() {
                assert_eq!(n - 1, a.len());
                for b in grid.iter().skip(i + 1) {
                    assert_eq!(1, a.intersect(b).len());
                }
            }
            // No item sits in three desired sets.
            for j in 0..m {
                let hits = grid.iter().filter(|s| s.contains(j)).count();
                assert!(hits <= 2, "item {j} in {hits} desired sets");
            }
            assert_eq!(ItemSet::full(m as u32), desired[(n - 1) as usize]);
            assert_eq!(
                rat(m as i64, 1),
                market.buyers()[(n - 1) as usize].value(ItemSet::full(m as u32))
            );
        }
        assert!(single_minded_grid(2).is_err());
        assert!(single_minded_grid(12).is_err());
    }

    #[test]
    fn frozen_grid_layout_for_four() {
        let market = single_minded_grid(4).unwrap();
        assert_eq!(
            vec![(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1)],
            grid_items(4)
        );
        let want = |idx: &[usize]| ItemSet::from_indices(6, idx).unwrap();
        let desired: Vec<ItemSet> = market
            .buyers()
            .iter()
            .map(|v| match v {
                ValuationSpec::SingleMinded { desired, .. } => *desired,
                other => panic!("grid buyers are single-minded, got {other:?}"),
            })
            .collect();
        assert_eq!(vec![want(&[0, 1, 2]), want(&[1, 3, 4]), want(&[0, 3, 5]), ItemSet::full(6)], desired);
    }

    #[test]
    fn random_markets_are_reproducible_and_valid() {
        let params = RandomMarketParams {
            seed: 17,
            buyers: 4,
            items: 5,
            classes: vec![
                RandomClass::Additive,
                RandomClass::UnitDemand,
                RandomClass::BudgetAdditive,
                RandomClass::Xos,
                RandomClass::SingleMinded,
                RandomClass::Symmetric,
                RandomClass::Explicit,
            ],
            max_numerator: 6,
            denominator: 2,
        };
        let a = random_market(&params).unwrap();
        let b = random_market(&params).unwrap();
        assert_eq!(a.buyers(), b.buyers());
        let different = random_market(&RandomMarketParams { seed: 18, ..params }).unwrap();
        assert_ne!(a.buyers(), different.buyers());
    }

    #[test]
    fn registry_resolves_every_family() {
        let names: Vec<&str> = generators().iter().map(|g| g.name()).collect();
        assert_eq!(vec!["xos", "submodular", "single-minded", "random"], names);
        for name in names {
            let market = generator_by_name(name)
                .unwrap()
                .generate(&GeneratorParams::default())
                .unwrap();
            assert!(market.buyer_count() >= 2);
        }
        assert!(generator_by_name("perfect").is_none());
    }
}
