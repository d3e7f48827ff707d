//! Shared helpers for the integration suites.
// Each suite uses its own subset of these helpers.
#![allow(dead_code)]

use proptest::prelude::*;
use robust_pricing::{waiting_time, worst_case_tail, MarketInfo, QueueMarket};

/// Markets across scales, avoiding only the degenerate `sigma_hi = 0`
/// corner, which is pinned by dedicated tests.
pub fn arb_market() -> impl Strategy<Value = MarketInfo> {
    (0.05f64..5.0, 1.2f64..20.0, 0.0f64..=1.0, 0.001f64..=1.0).prop_map(
        |(mu, ratio, lo_frac, hi_frac)| {
            let beta = mu * ratio;
            let sigma_hi = hi_frac * (mu * (beta - mu)).sqrt();
            MarketInfo::new(mu, lo_frac * sigma_hi, sigma_hi, beta).unwrap()
        },
    )
}

/// Markets with a precisely known std dev.
pub fn arb_precise_market() -> impl Strategy<Value = MarketInfo> {
    (0.05f64..5.0, 1.2f64..20.0, 0.001f64..=0.999).prop_map(|(mu, ratio, frac)| {
        let beta = mu * ratio;
        let sigma = frac * (mu * (beta - mu)).sqrt();
        MarketInfo::with_precise_sigma(mu, sigma, beta).unwrap()
    })
}

/// A price fraction strategy; combine with a market's `beta`.
pub fn arb_price_frac() -> impl Strategy<Value = f64> {
    0.001f64..=1.0
}

/// The queue's demand response at a posted price: what the equilibrium
/// join rate must reproduce.
pub fn queue_demand(q: &QueueMarket, price: f64, gamma: f64) -> f64 {
    let w = waiting_time(gamma, q.theta()).expect("gamma below the service rate");
    let effective = price + q.hold_cost() * w;
    let zero_from = q.market().breakpoints().zero_start;
    if effective >= zero_from - 1e-12 {
        0.0
    } else {
        q.lambda() * worst_case_tail(q.market(), effective).value
    }
}

/// Damped fixed-point iteration for the queue equilibrium: an independent
/// solver used to referee the bisection. Returns the final iterate after
/// `iters` steps of `gamma += damping * (demand(gamma) - gamma)`.
pub fn damped_equilibrium(q: &QueueMarket, price: f64, damping: f64, iters: usize) -> f64 {
    let cap = q.theta() * (1.0 - 1e-12);
    let mut gamma: f64 = 0.0;
    for _ in 0..iters {
        let next = queue_demand(q, price, gamma).min(cap);
        gamma += damping * (next - gamma);
    }
    gamma
}

/// Largest absolute slope of the demand map over a gamma grid, estimated
/// by finite differences. Used to restrict random queue instances to the
/// regime where damped iteration is a contraction.
pub fn demand_slope_bound(q: &QueueMarket, price: f64, points: usize) -> f64 {
    let cap = q.theta() * (1.0 - 1e-9);
    let hi = q.lambda().min(cap);
    let mut worst: f64 = 0.0;
    let step = hi / points as f64;
    for i in 0..points {
        let a = step * i as f64;
        let b = (a + step).min(hi);
        let da = queue_demand(q, price, a);
        let db = queue_demand(q, price, b);
        if b > a {
            worst = worst.max(((db - da) / (b - a)).abs());
        }
    }
    worst
}
