//! Robust pricing when buyers wait in a queue.
//!
//! Buyers arrive at rate `lambda` and are served at rate `theta` by a
//! single server. A buyer who joins pays the posted price and bears a
//! holding cost `hold_cost` per unit of expected delay, so the price that
//! matters is the effective one: posted price plus expected waiting cost.
//! The join rate `gamma` and the delay it causes feed back on each other;
//! an equilibrium is a fixed point
//! `gamma = lambda * tail(price + hold_cost * W(gamma))`, evaluated against
//! the worst-case tail, where `W` is the M/M/1 delay curve.
//!
//! The feedback map is non-increasing in `gamma` while the identity grows,
//! so the fixed point is unique and bracketed; it is found by bisection.

use crate::market::{MarketInfo, BREAKPOINT_TOL};
use crate::numeric::{bisect, golden_max};
use crate::tailbound::worst_case_tail;
use serde::Serialize;
use thiserror::Error;

/// Join rates are kept this fraction below the service rate so the delay
/// curve stays finite.
const SERVICE_MARGIN: f64 = 1e-12;

/// Revenues this close together are tied; ties resolve toward the higher
/// price.
const REVENUE_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueueError {
    #[error("RateOutOfRange: {field} out of range (value={value})")]
    RateOutOfRange { field: &'static str, value: f64 },
    #[error("PriceOutOfRange: price must be positive and finite (price={price})")]
    PriceOutOfRange { price: f64 },
    #[error("DomainError: {detail} (price={price})")]
    DomainError { detail: &'static str, price: f64 },
}

/// A market whose buyers queue for service.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueMarket {
    market: MarketInfo,
    lambda: f64,
    theta: f64,
    hold_cost: f64,
}

impl QueueMarket {
    pub fn new(
        market: MarketInfo,
        lambda: f64,
        theta: f64,
        hold_cost: f64,
    ) -> Result<Self, QueueError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(QueueError::RateOutOfRange {
                field: "lambda",
                value: lambda,
            });
        }
        if !(theta.is_finite() && theta > 0.0) {
            return Err(QueueError::RateOutOfRange {
                field: "theta",
                value: theta,
            });
        }
        if !(hold_cost.is_finite() && hold_cost >= 0.0) {
            return Err(QueueError::RateOutOfRange {
                field: "hold_cost",
                value: hold_cost,
            });
        }
        Ok(Self {
            market,
            lambda,
            theta,
            hold_cost,
        })
    }

    pub fn market(&self) -> &MarketInfo {
        &self.market
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn hold_cost(&self) -> f64 {
        self.hold_cost
    }
}

/// Expected M/M/1 queueing delay at join rate `gamma` and service rate
/// `theta`. Requires `0 <= gamma < theta`.
pub fn waiting_time(gamma: f64, theta: f64) -> Result<f64, QueueError> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(QueueError::RateOutOfRange {
            field: "theta",
            value: theta,
        });
    }
    if !(gamma >= 0.0 && gamma < theta) {
        return Err(QueueError::RateOutOfRange {
            field: "gamma",
            value: gamma,
        });
    }
    Ok(gamma / (theta * (theta - gamma)))
}

/// Queue equilibrium at a posted price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    /// Fixed-point join rate.
    pub gamma_star: f64,
    /// `gamma_star - lambda * tail(effective price)`: zero up to solver
    /// resolution, except when the queue saturates at the service rate.
    pub residual: f64,
    /// Revenue rate `price * gamma_star`.
    pub revenue: f64,
}

/// Worst-case sale probability at an effective price that may exceed any
/// breakpoint or even the support bound.
fn sale_prob(m: &MarketInfo, price: f64) -> f64 {
    if price >= m.breakpoints().zero_start - BREAKPOINT_TOL {
        0.0
    } else {
        worst_case_tail(m, price).value
    }
}

fn check_price(price: f64) -> Result<(), QueueError> {
    if !(price.is_finite() && price > 0.0) {
        return Err(QueueError::PriceOutOfRange { price });
    }
    Ok(())
}

/// Equilibrium under the standard M/M/1 delay curve.
///
/// When demand at the posted price exceeds the service rate and waiting is
/// free (`hold_cost = 0`), no interior fixed point exists; the join rate
/// saturates just below `theta` and the residual reports the excess demand
/// honestly.
pub fn equilibrium(q: &QueueMarket, price: f64) -> Result<Equilibrium, QueueError> {
    check_price(price)?;
    let cap = q.theta * (1.0 - SERVICE_MARGIN);
    if q.hold_cost == 0.0 {
        let demand = q.lambda * sale_prob(&q.market, price);
        let gamma = demand.min(cap);
        return Ok(Equilibrium {
            gamma_star: gamma,
            residual: gamma - demand,
            revenue: price * gamma,
        });
    }
    // With a positive holding cost the feedback map vanishes as gamma
    // approaches the service rate, so a root is bracketed in [0, cap].
    Ok(solve_fixed_point(q, price, q.lambda.min(cap), |g| {
        g / (q.theta * (q.theta - g))
    }))
}

/// Equilibrium under a caller-supplied delay curve, which must be finite,
/// non-negative and non-decreasing on `[0, lambda]`. Useful for exploring
/// other service disciplines without touching the fixed-point logic.
pub fn equilibrium_with_waiting(
    q: &QueueMarket,
    price: f64,
    waiting: impl Fn(f64) -> f64,
) -> Result<Equilibrium, QueueError> {
    check_price(price)?;
    if q.hold_cost == 0.0 {
        let gamma = q.lambda * sale_prob(&q.market, price);
        return Ok(Equilibrium {
            gamma_star: gamma,
            residual: 0.0,
            revenue: price * gamma,
        });
    }
    Ok(solve_fixed_point(q, price, q.lambda, waiting))
}

fn solve_fixed_point(
    q: &QueueMarket,
    price: f64,
    hi: f64,
    waiting: impl Fn(f64) -> f64,
) -> Equilibrium {
    let target = |g: f64| q.lambda * sale_prob(&q.market, price + q.hold_cost * waiting(g));
    // phi is strictly increasing: the identity grows, the target shrinks.
    let phi = |g: f64| g - target(g);
    let gamma = if phi(0.0) >= 0.0 {
        0.0
    } else {
        bisect(0.0, hi, 200, phi)
    };
    Equilibrium {
        gamma_star: gamma,
        residual: phi(gamma),
        revenue: price * gamma,
    }
}

/// Limiting join rate as the arrival rate grows without bound, treating
/// the mean as the effective price at which demand dries up. Exact when
/// `sigma_lo` is zero; finite only while `price < mu + hold_cost / theta`.
pub fn gamma_max(q: &QueueMarket, price: f64) -> Result<f64, QueueError> {
    check_price(price)?;
    let mu = q.market.mu();
    let denom = q.theta * (mu - price) + q.hold_cost;
    if denom <= 0.0 {
        return Err(QueueError::DomainError {
            detail: "no arrival rate sustains this price: theta(mu - price) + hold_cost <= 0",
            price,
        });
    }
    Ok(q.theta - q.theta * q.hold_cost / denom)
}

/// Price maximizing `price * gamma_max(price)`, the crowded-market revenue
/// rate.
pub fn p_max(q: &QueueMarket) -> f64 {
    let mu = q.market.mu();
    let h = q.hold_cost;
    mu - ((h * h + q.theta * h * mu).sqrt() - h) / q.theta
}

/// Grid used when scanning revenue over prices.
const SCAN_POINTS: usize = 2001;
/// Local maxima closer than this many grid cells count as one bracket.
const BRACKET_SEPARATION: usize = 50;

/// Up to two locally optimal prices with their equilibria, sorted by
/// price. The revenue curve here can be bimodal: one mode prices for
/// throughput, the other prices high for the thin upper tail. Each mode is
/// located on a 2001-point grid and refined by golden-section search.
pub fn revenue_modes(q: &QueueMarket) -> Vec<(f64, Equilibrium)> {
    let top = q.market.breakpoints().zero_start.min(q.market.beta());
    let step = top / SCAN_POINTS as f64;
    let price_at = |i: usize| step * (i + 1) as f64;
    let revenue: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| {
            equilibrium(q, price_at(i))
                .expect("grid prices are positive")
                .revenue
        })
        .collect();

    let mut peaks: Vec<usize> = (0..SCAN_POINTS)
        .filter(|&i| {
            let left = if i == 0 {
                f64::NEG_INFINITY
            } else {
                revenue[i - 1]
            };
            let right = if i + 1 == SCAN_POINTS {
                f64::NEG_INFINITY
            } else {
                revenue[i + 1]
            };
            revenue[i] >= left && revenue[i] >= right
        })
        .collect();
    peaks.sort_by(|&a, &b| revenue[b].total_cmp(&revenue[a]));

    let mut brackets: Vec<usize> = Vec::new();
    for &i in &peaks {
        if brackets.iter().all(|&j| i.abs_diff(j) > BRACKET_SEPARATION) {
            brackets.push(i);
            if brackets.len() == 2 {
                break;
            }
        }
    }

    let mut modes: Vec<(f64, Equilibrium)> = brackets
        .into_iter()
        .map(|i| {
            let lo = if i == 0 { step * 0.5 } else { price_at(i - 1) };
            let hi = if i + 1 == SCAN_POINTS {
                top
            } else {
                price_at(i + 1)
            };
            let p = golden_max(lo, hi, 1e-8, |p| {
                equilibrium(q, p)
                    .expect("prices in (0, top] are positive")
                    .revenue
            });
            (p, equilibrium(q, p).unwrap())
        })
        .collect();
    modes.sort_by(|a, b| a.0.total_cmp(&b.0));
    modes
}

/// Revenue-maximizing posted price and its equilibrium. Ties between modes
/// resolve toward the higher price.
pub fn optimal_queue_price(q: &QueueMarket) -> (f64, Equilibrium) {
    let modes = revenue_modes(q);
    let mut best = modes[0];
    for &(p, eq) in &modes[1..] {
        if eq.revenue > best.1.revenue + REVENUE_TIE_TOL
            || (eq.revenue >= best.1.revenue - REVENUE_TIE_TOL && p > best.0)
        {
            best = (p, eq);
        }
    }
    best
}
