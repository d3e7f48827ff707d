//! Selling several independent goods as one bundle.
//!
//! With `size` independent goods per bundle, each with per-good mean `mu`
//! and std dev in `[sigma_lo, sigma_hi]`, the per-good valuation of the
//! bundle keeps the mean but shrinks the std-dev interval by
//! `1 / sqrt(size)`. Bundling therefore pushes any market toward the
//! low-price region, and for a precisely known std dev a closed-form
//! threshold says how many goods suffice.

use crate::market::MarketInfo;
use crate::pricing::{optimal_price, PricingDecision};
use serde::Serialize;
use std::num::NonZeroU32;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BundleError {
    #[error(
        "SigmaOrder: the bundle threshold needs a precisely known std dev \
         (sigma_lo={sigma_lo}, sigma_hi={sigma_hi})"
    )]
    SigmaOrder { sigma_lo: f64, sigma_hi: f64 },
}

/// A base market together with a bundle size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BundleQuery {
    base: MarketInfo,
    size: NonZeroU32,
}

impl BundleQuery {
    pub fn new(base: MarketInfo, size: NonZeroU32) -> Self {
        Self { base, size }
    }

    pub fn base(&self) -> &MarketInfo {
        &self.base
    }

    pub fn size(&self) -> u32 {
        self.size.get()
    }

    /// The market seen by a buyer of one bundle, per good: same mean and
    /// support bound, std-dev interval shrunk by `1 / sqrt(size)`.
    pub fn rescaled(&self) -> MarketInfo {
        let scale = (self.size.get() as f64).sqrt();
        MarketInfo::new(
            self.base.mu(),
            self.base.sigma_lo() / scale,
            self.base.sigma_hi() / scale,
            self.base.beta(),
        )
        .expect("shrinking the sigma interval preserves feasibility")
    }
}

/// Robust pricing for a bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BundleDecision {
    pub bundle_size: u32,
    /// Price for the whole bundle: `bundle_size` times the per-good price.
    pub bundle_price: f64,
    /// Decision for the rescaled per-good market.
    pub per_good: PricingDecision,
}

/// Prices a bundle by solving the rescaled per-good market.
pub fn bundle_price(q: &BundleQuery) -> BundleDecision {
    let per_good = optimal_price(&q.rescaled());
    BundleDecision {
        bundle_size: q.size(),
        bundle_price: q.size() as f64 * per_good.price,
        per_good,
    }
}

/// For a precisely known std dev, a bundle size beyond which the rescaled
/// market is certain to land in the low-price region. Conservative: smaller
/// bundles may already land there.
pub fn bundle_threshold(base: &MarketInfo) -> Result<f64, BundleError> {
    if !base.has_precise_sigma() {
        return Err(BundleError::SigmaOrder {
            sigma_lo: base.sigma_lo(),
            sigma_hi: base.sigma_hi(),
        });
    }
    let (mu, beta) = (base.mu(), base.beta());
    let sigma = base.sigma_lo();
    let spread = beta - mu;
    let numer = (1.0 + ((beta + 3.0 * mu) / spread).sqrt()) * beta + 2.0 * mu;
    Ok(numer / (2.0 * mu * mu * spread) * sigma * sigma)
}
