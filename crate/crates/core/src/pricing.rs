//! Robust price selection.
//!
//! The guaranteed revenue at price `p` is `p` times the worst-case tail, a
//! piecewise function whose maximum is always attained by one of three
//! closed-form candidates: a low price maximizing the Cantelli piece, a mid
//! price maximizing the mean-and-support piece, and a high price maximizing
//! the three-point piece. Which candidate wins partitions the
//! `(sigma_lo, sigma_hi)` rectangle into three regions; the boundaries are
//! the thresholds computed by [`thresholds`].

use crate::market::MarketInfo;
use crate::numeric::bisect;
use crate::tailbound::worst_case_tail;
use serde::Serialize;
use thiserror::Error;

/// Revenues this close together are treated as tied; ties resolve toward
/// the higher price.
const REVENUE_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("PriceOutOfRange: price must lie in (0, beta] (price={price}, beta={beta})")]
    PriceOutOfRange { price: f64, beta: f64 },
}

/// Which candidate price is optimal for a market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PriceRegion {
    Low,
    Mid,
    High,
}

/// The three closed-form candidate prices, along with the scaled distance
/// `kappa` between the mean and the low candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceCandidates {
    #[serde(rename = "low")]
    pub p_low: f64,
    #[serde(rename = "mid")]
    pub p_mid: f64,
    #[serde(rename = "high")]
    pub p_high: f64,
    pub kappa: f64,
}

/// Result of [`optimal_price`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PricingDecision {
    pub price: f64,
    pub region: PriceRegion,
    pub worst_case_revenue: f64,
    pub candidates: PriceCandidates,
}

/// Region boundaries in std-dev units for a fixed `(mu, beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Value of `sigma_hi` separating the low region from the mid region.
    pub f_val: f64,
    /// Value of `sigma_lo` below which the mid price beats the high price.
    pub g_val: f64,
    /// Value of `sigma_lo` at which the high price catches the low price;
    /// depends on `sigma_hi`.
    pub h_val: f64,
    /// With a precisely known std dev, the single point where the optimum
    /// jumps from the low price to the high price. `None` when the market
    /// carries a genuine std-dev interval.
    pub sigma_star: Option<f64>,
}

/// Root of `k^3 + 3k = 2 mu / sigma`, the scaled markdown of the low
/// candidate. Evaluated via the hyperbolic form, which has no cancellation
/// for small `sigma`.
pub fn kappa(mu: f64, sigma: f64) -> f64 {
    debug_assert!(mu > 0.0 && sigma > 0.0);
    let r = mu / sigma;
    let u = (r + r.hypot(1.0)).cbrt();
    u - 1.0 / u
}

/// Revenue from the Cantelli piece at price `p`.
fn cantelli_revenue(mu: f64, sigma_hi: f64, p: f64) -> f64 {
    let gap = mu - p;
    p * gap * gap / (gap * gap + sigma_hi * sigma_hi)
}

/// Revenue from the mean-and-support piece at price `p`.
fn mean_support_revenue(mu: f64, beta: f64, p: f64) -> f64 {
    p * (mu - p) / (beta - p)
}

fn p_low(mu: f64, sigma_hi: f64) -> f64 {
    if sigma_hi == 0.0 {
        // Limit of the candidate as the variance bound vanishes.
        return mu;
    }
    mu - sigma_hi * kappa(mu, sigma_hi)
}

fn p_mid(mu: f64, beta: f64) -> f64 {
    beta - (beta * (beta - mu)).sqrt()
}

fn p_high(mu: f64, sigma_lo: f64, beta: f64) -> f64 {
    let zero_start = mu + sigma_lo * sigma_lo / mu;
    beta - (beta * (beta - zero_start)).sqrt()
}

/// The three candidate prices for a market.
pub fn price_candidates(m: &MarketInfo) -> PriceCandidates {
    let k = if m.sigma_hi() == 0.0 {
        0.0
    } else {
        kappa(m.mu(), m.sigma_hi())
    };
    PriceCandidates {
        p_low: p_low(m.mu(), m.sigma_hi()),
        p_mid: p_mid(m.mu(), m.beta()),
        p_high: p_high(m.mu(), m.sigma_lo(), m.beta()),
        kappa: k,
    }
}

/// Guaranteed revenue `p * worst_case_tail(m, p)` for `0 < p <= beta`.
pub fn worst_case_revenue(m: &MarketInfo, price: f64) -> Result<f64, PricingError> {
    if !(price > 0.0 && price <= m.beta()) {
        return Err(PricingError::PriceOutOfRange {
            price,
            beta: m.beta(),
        });
    }
    Ok(price * worst_case_tail(m, price).value)
}

/// The std dev `sigma_lo` at which the best three-point-piece revenue
/// equals `level`, i.e. the inverse of the high candidate's value function.
/// Negative under the radical means no such std dev exists (the high price
/// already wins for every feasible `sigma_lo`); callers clamp.
fn level_to_sigma_sq(mu: f64, beta: f64, level: f64) -> f64 {
    2.0 * beta * (level * mu).sqrt() - beta * level - mu * mu
}

/// Region boundaries for the market's `(mu, beta)` and, where relevant, its
/// `sigma_hi`.
pub fn thresholds(m: &MarketInfo) -> Thresholds {
    let (mu, beta) = (m.mu(), m.beta());
    let f_val = f_threshold(mu, beta);
    let g_val = level_to_sigma_sq(mu, beta, mean_support_revenue(mu, beta, p_mid(mu, beta)))
        .max(0.0)
        .sqrt();
    let h_val = h_threshold(mu, beta, m.sigma_hi());
    let sigma_star = m
        .has_precise_sigma()
        .then(|| precise_switch_point(mu, beta));
    Thresholds {
        f_val,
        g_val,
        h_val,
        sigma_star,
    }
}

fn f_threshold(mu: f64, beta: f64) -> f64 {
    let spread = beta - mu;
    (32.0 / 27.0 * spread * ((beta * spread).sqrt() - spread)).sqrt()
}

fn h_threshold(mu: f64, beta: f64, sigma_hi: f64) -> f64 {
    let sigma_max = (mu * (beta - mu)).sqrt();
    // With sigma_hi = 0 the low revenue approaches mu itself, which no
    // three-point revenue reaches: the boundary sits at the far edge.
    let low_revenue = if sigma_hi == 0.0 {
        mu
    } else {
        cantelli_revenue(mu, sigma_hi, p_low(mu, sigma_hi))
    };
    // Past the crossing the high price wins for every sigma_lo; the
    // radicand goes negative there and the boundary clamps to zero.
    level_to_sigma_sq(mu, beta, low_revenue)
        .clamp(0.0, sigma_max * sigma_max)
        .sqrt()
}

/// For the precise-sigma family, the std dev where the low and high
/// revenues cross: the unique root of `h(sigma) = sigma`.
fn precise_switch_point(mu: f64, beta: f64) -> f64 {
    let sigma_max = (mu * (beta - mu)).sqrt();
    // h decreases from sigma_max to below the diagonal; bisect h - sigma.
    bisect(1e-12 * sigma_max, sigma_max, 200, |s| {
        s - h_threshold(mu, beta, s)
    })
}

/// Classifies which candidate is optimal. Total: every feasible
/// `(sigma_lo, sigma_hi)` pair lands in exactly one branch.
pub fn classify_region(m: &MarketInfo) -> PriceRegion {
    let t = thresholds(m);
    if m.sigma_hi() <= t.f_val && m.sigma_lo() <= t.h_val {
        PriceRegion::Low
    } else if m.sigma_hi() >= t.f_val && m.sigma_lo() <= t.g_val {
        PriceRegion::Mid
    } else {
        PriceRegion::High
    }
}

/// Price maximizing the guaranteed revenue, with the classification, the
/// revenue attained, and the candidates considered.
///
/// A degenerate market (`sigma_hi = 0`) pins the distribution to a point
/// mass at the mean; the supremum `mu` is then approached but not attained
/// under the strict-tail convention, and the reported revenue at the limit
/// price `mu` is 0.
pub fn optimal_price(m: &MarketInfo) -> PricingDecision {
    let candidates = price_candidates(m);
    if m.sigma_hi() == 0.0 {
        return PricingDecision {
            price: candidates.p_low,
            region: PriceRegion::Low,
            worst_case_revenue: 0.0,
            candidates,
        };
    }
    let region = classify_region(m);
    let labeled = [
        (PriceRegion::Low, candidates.p_low),
        (PriceRegion::Mid, candidates.p_mid),
        (PriceRegion::High, candidates.p_high),
    ];
    let revenue_at = |p: f64| worst_case_revenue(m, p).expect("candidate prices lie in (0, beta]");
    let mut price = labeled
        .iter()
        .find(|(r, _)| *r == region)
        .map(|(_, p)| *p)
        .unwrap();
    let mut revenue = revenue_at(price);
    let mut chosen = region;
    for (r, p) in labeled {
        let rev = revenue_at(p);
        if rev >= revenue - REVENUE_TIE_TOL && p > price {
            price = p;
            revenue = rev.max(revenue);
            chosen = r;
        }
    }
    PricingDecision {
        price,
        region: chosen,
        worst_case_revenue: revenue,
        candidates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn market(sigma_lo: f64, sigma_hi: f64) -> MarketInfo {
        MarketInfo::new(0.5, sigma_lo, sigma_hi, 1.0).unwrap()
    }

    #[test]
    fn kappa_solves_its_cubic() {
        for &(mu, sigma) in &[(0.5, 0.2), (0.5, 0.48), (2.0, 1.3), (0.9, 0.01), (3.0, 2.9)] {
            let k = kappa(mu, sigma);
            assert!((k * k * k + 3.0 * k - 2.0 * mu / sigma).abs() < 1e-9 * (mu / sigma).max(1.0));
        }
    }

    #[test]
    fn kappa_is_stable_for_tiny_sigma() {
        // Naive Cardano differencing loses all digits here; the hyperbolic
        // form does not.
        let k = kappa(0.5, 1e-8);
        let residual = k * k * k + 3.0 * k - 1.0 / 1e-8;
        assert!(residual.abs() / 1e8 < 1e-12);
    }

    #[test]
    fn candidate_prices_match_hand_checked_values() {
        let c = price_candidates(&market(0.2, 0.2));
        assert!((c.p_low - 0.26916570096371173).abs() < 1e-12);
        assert!((c.p_mid - 0.2928932188134524).abs() < 1e-12);

        let c = price_candidates(&market(0.48, 0.48));
        assert!((c.p_low - 0.20413579229956486).abs() < 1e-12);

        let c = price_candidates(&market(0.3, 0.3));
        assert!((c.p_low - 0.23533226760850712).abs() < 1e-12);

        let c = price_candidates(&market(0.4, 0.4));
        assert!((c.p_high - 0.5757359312880715).abs() < 1e-12);

        let c = price_candidates(&market(0.45, 0.45));
        assert!((c.p_high - 0.6917792998515513).abs() < 1e-12);

        let m = MarketInfo::new(2.0, 1.0, 1.5, 10.0).unwrap();
        assert!((price_candidates(&m).p_mid - 1.0557280900008408).abs() < 1e-12);
    }

    #[test]
    fn candidates_are_interior_and_ordered_against_mu() {
        for i in 1..50 {
            let s = 0.5 * i as f64 / 50.0;
            let c = price_candidates(&market(s * 0.5, s));
            assert!(c.p_low > 0.0 && c.p_low < 0.5);
            assert!(c.p_mid > 0.0 && c.p_mid < 0.5);
            assert!(c.p_high >= c.p_mid && c.p_high < 1.0);
        }
    }

    #[test]
    fn thresholds_match_hand_checked_values() {
        let t = thresholds(&market(0.2, 0.2));
        assert!((t.f_val - 0.3503283380014283).abs() < 1e-12);
        assert!((t.g_val - 0.28004843285794345).abs() < 1e-12);
        assert!((t.h_val - 0.3882984182734443).abs() < 1e-12);

        let t = thresholds(&market(0.48, 0.48));
        assert!((t.h_val - 0.17049459046253446).abs() < 1e-12);
    }

    #[test]
    fn sigma_star_only_for_precise_markets() {
        let t = thresholds(&market(0.2, 0.2));
        let s = t.sigma_star.unwrap();
        assert!((s - 0.3101494620093308).abs() < 1e-9);
        // The switch point solves h(sigma) = sigma.
        assert!((h_threshold(0.5, 1.0, s) - s).abs() < 1e-9);
        assert!(thresholds(&market(0.1, 0.2)).sigma_star.is_none());
    }

    #[test]
    fn classification_covers_known_examples() {
        assert_eq!(classify_region(&market(0.2, 0.2)), PriceRegion::Low);
        assert_eq!(classify_region(&market(0.45, 0.45)), PriceRegion::High);
        assert_eq!(classify_region(&market(0.0, 0.5)), PriceRegion::Mid);
        assert_eq!(classify_region(&market(0.0, 0.2)), PriceRegion::Low);
        assert_eq!(classify_region(&market(0.3, 0.5)), PriceRegion::High);
    }

    #[test]
    fn optimal_price_attains_the_best_candidate_revenue() {
        for &(lo, hi) in &[
            (0.2, 0.2),
            (0.45, 0.45),
            (0.0, 0.5),
            (0.0, 0.2),
            (0.3, 0.5),
            (0.1, 0.4),
            (0.25, 0.3),
        ] {
            let m = market(lo, hi);
            let d = optimal_price(&m);
            let c = d.candidates;
            let best = [c.p_low, c.p_mid, c.p_high]
                .iter()
                .map(|&p| worst_case_revenue(&m, p).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((d.worst_case_revenue - best).abs() <= 1e-12);
            assert!((worst_case_revenue(&m, d.price).unwrap() - best).abs() <= 1e-12);
        }
    }

    #[test]
    fn optimal_revenues_match_hand_checked_values() {
        let d = optimal_price(&market(0.2, 0.2));
        assert_eq!(d.region, PriceRegion::Low);
        assert!((d.worst_case_revenue - 0.1537485514455676).abs() < 1e-12);

        let d = optimal_price(&market(0.45, 0.45));
        assert_eq!(d.region, PriceRegion::High);
        assert!((d.worst_case_revenue - 0.23927929985155127).abs() < 1e-12);

        let d = optimal_price(&market(0.0, 0.5));
        assert_eq!(d.region, PriceRegion::Mid);
        assert!((d.worst_case_revenue - 0.08578643762690485).abs() < 1e-12);
    }

    #[test]
    fn degenerate_market_reports_the_limit_price() {
        let d = optimal_price(&market(0.0, 0.0));
        assert_eq!(d.price, 0.5);
        assert_eq!(d.region, PriceRegion::Low);
        assert_eq!(d.worst_case_revenue, 0.0);
    }

    #[test]
    fn revenue_rejects_out_of_domain_prices() {
        let m = market(0.1, 0.3);
        assert!(worst_case_revenue(&m, 0.0).is_err());
        assert!(worst_case_revenue(&m, -0.2).is_err());
        assert!(worst_case_revenue(&m, 1.2).is_err());
        assert!(worst_case_revenue(&m, f64::NAN).is_err());
        assert!(worst_case_revenue(&m, 1.0).is_ok());
    }

    #[test]
    fn decision_serializes_with_role_named_keys() {
        let d = optimal_price(&market(0.2, 0.2));
        let json = serde_json::to_value(d).unwrap();
        assert_eq!(json["region"], "low");
        assert!(json["candidates"]["low"].is_number());
        assert!(json["candidates"]["mid"].is_number());
        assert!(json["candidates"]["high"].is_number());
        assert!(json["candidates"]["kappa"].is_number());
    }
}
