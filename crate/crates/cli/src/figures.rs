//! Named sweep presets. Each produces the full data behind one standard
//! illustration of the library's behavior on fixed reference parameters,
//! so runs are reproducible byte for byte.

use robust_pricing::{
    classify_region, equilibrium, guarantee_ratio, optimal_price, worst_case_revenue, MarketInfo,
    QueueMarket,
};

use crate::render::{price_region_text, Cell, Table};

/// Reference single-good market: `mu = 0.5`, `beta = 1`.
const MU: f64 = 0.5;
const BETA: f64 = 1.0;
/// Reference queue: `lambda = 5`, `mu = 2`, `theta = 2`.
const Q_LAMBDA: f64 = 5.0;
const Q_MU: f64 = 2.0;
const Q_THETA: f64 = 2.0;

/// Dispersion upper bounds drawn with the revenue curves of preset 2a.
const SIGMA_HI_FAMILY: [f64; 4] = [0.30, 0.33, 0.36, 0.40];
/// Exact dispersions drawn with the revenue curves of preset 3a.
const SIGMA_FAMILY: [f64; 4] = [0.20, 0.25, 0.30, 0.35];
/// Exact dispersions for the queue presets 6a and 6b.
const Q_SIGMA_FAMILY: [f64; 4] = [2.0, 2.2, 2.4, 2.6];
/// Holding costs for preset 7a (at `beta = 10`).
const HOLD_FAMILY: [f64; 4] = [1.0, 2.0, 3.0, 5.0];
/// Support bounds for preset 7b (at `h = 1`).
const BETA_FAMILY: [f64; 4] = [8.0, 10.0, 12.0, 14.0];

/// Price grid on `(0, 1]` for the single-good revenue curves.
fn unit_prices() -> impl Iterator<Item = f64> {
    (1..=200).map(|k| k as f64 / 200.0)
}

/// Dispersion grid strictly inside `(0, 0.5)`.
fn sigmas() -> impl Iterator<Item = f64> {
    (1..=399).map(|k| 0.5 * k as f64 / 400.0)
}

/// Price grid on `(0, 6]`: the queue revenue curves vanish past the point
/// where the worst-case tail does, which stays below 6 for every family.
fn queue_prices() -> impl Iterator<Item = f64> {
    (1..=200).map(|k| 6.0 * k as f64 / 200.0)
}

fn upper_only(sigma_hi: f64) -> MarketInfo {
    MarketInfo::new(MU, 0.0, sigma_hi, BETA).expect("reference parameters are valid")
}

fn precise(sigma: f64) -> MarketInfo {
    MarketInfo::with_precise_sigma(MU, sigma, BETA).expect("reference parameters are valid")
}

fn queue(sigma: f64, beta: f64, hold: f64) -> QueueMarket {
    let market =
        MarketInfo::with_precise_sigma(Q_MU, sigma, beta).expect("reference parameters are valid");
    QueueMarket::new(market, Q_LAMBDA, Q_THETA, hold).expect("reference parameters are valid")
}

/// Worst-case revenue against price, one curve per dispersion upper bound.
fn revenue_curves_upper() -> Table {
    let mut t = Table::new(vec!["sigma_hi", "p", "revenue"]);
    for &s in &SIGMA_HI_FAMILY {
        let m = upper_only(s);
        for p in unit_prices() {
            let r = worst_case_revenue(&m, p).expect("grid prices lie in (0, beta]");
            t.push(vec![s.into(), p.into(), r.into()]);
        }
    }
    t
}

/// Optimal price against the dispersion upper bound.
fn price_curve_upper() -> Table {
    let mut t = Table::new(vec!["sigma_hi", "price"]);
    for s in sigmas() {
        t.push(vec![s.into(), optimal_price(&upper_only(s)).price.into()]);
    }
    t
}

/// Worst-case revenue against price, one curve per exact dispersion.
fn revenue_curves_precise() -> Table {
    let mut t = Table::new(vec!["sigma", "p", "revenue"]);
    for &s in &SIGMA_FAMILY {
        let m = precise(s);
        for p in unit_prices() {
            let r = worst_case_revenue(&m, p).expect("grid prices lie in (0, beta]");
            t.push(vec![s.into(), p.into(), r.into()]);
        }
    }
    t
}

/// Optimal price against the exact dispersion; jumps once low-to-high.
fn price_curve_precise() -> Table {
    let mut t = Table::new(vec!["sigma", "price"]);
    for s in sigmas() {
        t.push(vec![s.into(), optimal_price(&precise(s)).price.into()]);
    }
    t
}

/// Guarantee ratio against dispersion: U-shaped when the std dev is exact,
/// flattening when only the upper bound is known.
fn ratio_curves() -> Table {
    let mut t = Table::new(vec!["sigma", "ratio_precise", "ratio_upper"]);
    for s in sigmas() {
        let exact = guarantee_ratio(&precise(s)).ratio;
        let upper = guarantee_ratio(&upper_only(s)).ratio;
        t.push(vec![s.into(), exact.into(), upper.into()]);
    }
    t
}

/// Optimal-price region over the dispersion-interval triangle.
fn region_map() -> Table {
    let mut t = Table::new(vec!["sigma_lo", "sigma_hi", "region"]);
    let grid: Vec<f64> = (1..=99).map(|k| 0.5 * k as f64 / 100.0).collect();
    for &hi in &grid {
        for &lo in grid.iter().take_while(|&&lo| lo <= hi) {
            let m = MarketInfo::new(MU, lo, hi, BETA).expect("grid stays inside the triangle");
            let region = price_region_text(classify_region(&m));
            t.push(vec![lo.into(), hi.into(), Cell::Text(region)]);
        }
    }
    t
}

/// Equilibrium join rate against price, one curve per dispersion.
fn queue_rate_curves() -> Table {
    let mut t = Table::new(vec!["sigma", "p", "gamma_star"]);
    for &s in &Q_SIGMA_FAMILY {
        let q = queue(s, 10.0, 1.0);
        for p in queue_prices() {
            let eq = equilibrium(&q, p).expect("grid prices are positive");
            t.push(vec![s.into(), p.into(), eq.gamma_star.into()]);
        }
    }
    t
}

/// Equilibrium revenue against price, one curve per dispersion.
fn queue_revenue_curves() -> Table {
    let mut t = Table::new(vec!["sigma", "p", "revenue"]);
    for &s in &Q_SIGMA_FAMILY {
        let q = queue(s, 10.0, 1.0);
        for p in queue_prices() {
            let eq = equilibrium(&q, p).expect("grid prices are positive");
            t.push(vec![s.into(), p.into(), eq.revenue.into()]);
        }
    }
    t
}

/// Equilibrium revenue against price, one curve per holding cost.
fn queue_hold_curves() -> Table {
    let mut t = Table::new(vec!["h", "p", "revenue"]);
    for &h in &HOLD_FAMILY {
        let q = queue(2.0, 10.0, h);
        for p in queue_prices() {
            let eq = equilibrium(&q, p).expect("grid prices are positive");
            t.push(vec![h.into(), p.into(), eq.revenue.into()]);
        }
    }
    t
}

/// Equilibrium revenue against price, one curve per support bound.
fn queue_beta_curves() -> Table {
    let mut t = Table::new(vec!["beta", "p", "revenue"]);
    for &b in &BETA_FAMILY {
        let q = queue(2.0, b, 1.0);
        for p in queue_prices() {
            let eq = equilibrium(&q, p).expect("grid prices are positive");
            t.push(vec![b.into(), p.into(), eq.revenue.into()]);
        }
    }
    t
}

/// Builds the data set behind the named preset.
pub fn preset(name: crate::Figure) -> Table {
    use crate::Figure::*;
    match name {
        F2a => revenue_curves_upper(),
        F2b => price_curve_upper(),
        F3a => revenue_curves_precise(),
        F3b => price_curve_precise(),
        F4 => ratio_curves(),
        F5 => region_map(),
        F6a => queue_rate_curves(),
        F6b => queue_revenue_curves(),
        F7a => queue_hold_curves(),
        F7b => queue_beta_curves(),
    }
}
