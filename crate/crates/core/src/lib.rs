//! Robust monopoly pricing when demand is known only through moments.
//!
//! A seller posts a price for a good whose buyer valuation distribution is
//! not known. What is known: the mean valuation, an interval for the
//! standard deviation, and an upper bound on the support. This crate
//! computes the revenue the seller can guarantee against every distribution
//! consistent with that information, the price maximizing that guarantee,
//! and several extensions: multiplicative guarantees relative to a
//! full-information benchmark, bundling of independent goods, and pricing
//! when buyers queue for service.
//!
//! The closed forms are exact. The [`oracle`] module provides independent
//! brute-force checks (a discretized linear program and grid search) used
//! by the test suite; it is exported because it is also useful for
//! exploring variants of the model.

pub mod bundling;
pub mod guarantees;
pub mod market;
mod numeric;
pub mod oracle;
pub mod pricing;
pub mod queueing;
pub mod tailbound;

pub use bundling::{bundle_price, bundle_threshold, BundleDecision, BundleQuery};
pub use guarantees::{
    guarantee_ratio, markov_opt_bound, markov_witness, GuaranteeError, GuaranteeReport,
};
pub use market::{Breakpoints, MarketError, MarketInfo, BREAKPOINT_TOL};
pub use pricing::{
    classify_region, optimal_price, price_candidates, thresholds, worst_case_revenue,
    PriceCandidates, PriceRegion, PricingDecision, PricingError, Thresholds,
};
pub use queueing::{
    equilibrium, equilibrium_with_waiting, gamma_max, optimal_queue_price, p_max, revenue_modes,
    waiting_time, Equilibrium, QueueError, QueueMarket,
};
pub use tailbound::{
    witness_distribution, worst_case_tail, DiscreteDistribution, TailBoundResult, TailRegion,
};
