//! Tight lower bound on the probability of sale.
//!
//! At price `p` the seller sells to a buyer with valuation above `p`, so the
//! revenue guarantee rests on the smallest value `P(V > p)` can take over
//! all distributions consistent with a [`MarketInfo`]. That infimum is
//! piecewise in `p`, with four pieces separated by the market's
//! [`Breakpoints`](crate::market::Breakpoints): a Cantelli-type piece where
//! only the upper variance bound binds, a piece shaped by the mean and the
//! support bound alone, a
//! piece where the lower variance bound binds through a three-point
//! distribution, and a region where the tail vanishes outright.
//!
//! Each piece is attained: [`witness_distribution`] returns a feasible
//! distribution whose strict tail equals the bound.

use crate::market::{MarketInfo, BREAKPOINT_TOL};
use serde::{Deserialize, Serialize};

/// Which piece of the worst-case tail applies at a given price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailRegion {
    Cantelli,
    MeanSupport,
    ThreePoint,
    Zero,
}

/// Worst-case tail evaluated at one price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBoundResult {
    #[serde(rename = "p")]
    pub price: f64,
    pub value: f64,
    pub region: TailRegion,
}

/// Evaluates the tight lower bound on `P(V > p)` for `0 < p <= beta`.
///
/// On a breakpoint (within [`BREAKPOINT_TOL`]) the adjacent pieces agree in
/// value; the tag resolves to the left piece. The vanishing region is
/// checked first so the degenerate market `sigma_lo = sigma_hi = 0`, whose
/// breakpoints all collapse onto `mu`, never evaluates an indeterminate
/// ratio.
pub fn worst_case_tail(m: &MarketInfo, price: f64) -> TailBoundResult {
    assert!(
        price > 0.0 && price <= m.beta(),
        "price must lie in (0, beta], got {price}"
    );
    let (mu, beta) = (m.mu(), m.beta());
    let b = m.breakpoints();
    let (region, value) = if price >= b.zero_start - BREAKPOINT_TOL {
        (TailRegion::Zero, 0.0)
    } else if price <= b.cantelli_end + BREAKPOINT_TOL {
        let gap = mu - price;
        let var = m.sigma_hi() * m.sigma_hi();
        (TailRegion::Cantelli, gap * gap / (gap * gap + var))
    } else if price <= b.mean_support_end + BREAKPOINT_TOL {
        (TailRegion::MeanSupport, (mu - price) / (beta - price))
    } else {
        let var = m.sigma_lo() * m.sigma_lo();
        let value = (mu * mu + var - mu * price) / (beta * (beta - price));
        (TailRegion::ThreePoint, value.max(0.0))
    };
    TailBoundResult {
        price,
        value,
        region,
    }
}

/// A finitely supported distribution, used for worst-case witnesses and
/// oracle samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    atoms: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds a distribution from matching atom and probability lists.
    /// Probabilities must be non-negative and sum to one within 1e-9.
    pub fn new(atoms: Vec<f64>, probs: Vec<f64>) -> Self {
        assert_eq!(atoms.len(), probs.len(), "atom/probability length mismatch");
        assert!(!atoms.is_empty(), "distribution needs at least one atom");
        assert!(atoms.iter().all(|a| a.is_finite()), "atoms must be finite");
        assert!(
            probs.iter().all(|q| *q >= 0.0),
            "probabilities must be non-negative"
        );
        let total: f64 = probs.iter().sum();
        assert!(
            (total - 1.0).abs() <= 1e-9,
            "probabilities sum to {total}, not 1"
        );
        Self { atoms, probs }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().zip(&self.probs).map(|(a, q)| a * q).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms
            .iter()
            .zip(&self.probs)
            .map(|(a, q)| a * a * q)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        (self.second_moment() - mean * mean).max(0.0)
    }

    /// `P(V > p)`: mass strictly above `p`.
    pub fn tail_strict(&self, p: f64) -> f64 {
        self.atoms
            .iter()
            .zip(&self.probs)
            .filter(|(a, _)| **a > p)
            .map(|(_, q)| q)
            .sum()
    }

    /// `P(V >= p)`: mass at or above `p`.
    pub fn tail_weak(&self, p: f64) -> f64 {
        self.atoms
            .iter()
            .zip(&self.probs)
            .filter(|(a, _)| **a >= p)
            .map(|(_, q)| q)
            .sum()
    }
}

/// Returns a feasible distribution attaining the worst-case tail at `price`:
/// its mean is `mu`, its variance lies in `[sigma_lo^2, sigma_hi^2]`, its
/// support stays in `[0, beta]`, and its strict tail equals
/// `worst_case_tail(m, price).value`.
pub fn witness_distribution(m: &MarketInfo, price: f64) -> DiscreteDistribution {
    let (mu, beta) = (m.mu(), m.beta());
    match worst_case_tail(m, price).region {
        TailRegion::Cantelli => {
            // Mass at the price (a non-buyer) plus a high atom carrying the
            // mean; saturates the upper variance bound.
            let gap = mu - price;
            let var = m.sigma_hi() * m.sigma_hi();
            if var == 0.0 {
                return DiscreteDistribution::new(vec![mu], vec![1.0]);
            }
            let high = mu + var / gap;
            let denom = gap * gap + var;
            DiscreteDistribution::new(vec![price, high], vec![var / denom, gap * gap / denom])
        }
        TailRegion::MeanSupport => {
            // Two atoms at the price and the support bound; the variance
            // (mu - p)(beta - mu) lands inside the allowed band exactly on
            // this piece.
            let denom = beta - price;
            DiscreteDistribution::new(
                vec![price, beta],
                vec![(beta - mu) / denom, (mu - price) / denom],
            )
        }
        TailRegion::ThreePoint => {
            // Atoms at 0, the price, and the support bound, pinned to the
            // lower variance bound.
            let var = m.sigma_lo() * m.sigma_lo();
            let q_zero = ((beta - mu) * (price - mu) + var) / (beta * price);
            let q_beta = (mu * mu + var - mu * price) / (beta * (beta - price));
            let q_price = 1.0 - q_zero - q_beta;
            let probs = clamp_tiny_negatives(vec![q_zero, q_price, q_beta]);
            DiscreteDistribution::new(vec![0.0, price, beta], probs)
        }
        TailRegion::Zero => {
            // Everything at or below the price: mass at the price itself
            // plus a lower atom restoring the mean at the smallest variance.
            let var = m.sigma_lo() * m.sigma_lo();
            if var == 0.0 {
                return DiscreteDistribution::new(vec![mu], vec![1.0]);
            }
            let gap = price - mu;
            let low = mu - var / gap;
            let denom = gap * gap + var;
            DiscreteDistribution::new(vec![low, price], vec![gap * gap / denom, var / denom])
        }
    }
}

/// Zeroes out float-noise negatives (down to -1e-12) and renormalizes.
fn clamp_tiny_negatives(mut probs: Vec<f64>) -> Vec<f64> {
    for q in &mut probs {
        if *q < 0.0 {
            assert!(
                *q >= -1e-12,
                "probability {q} is negative beyond rounding noise"
            );
            *q = 0.0;
        }
    }
    let total: f64 = probs.iter().sum();
    for q in &mut probs {
        *q /= total;
    }
    probs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn market(sigma_lo: f64, sigma_hi: f64) -> MarketInfo {
        MarketInfo::new(0.5, sigma_lo, sigma_hi, 1.0).unwrap()
    }

    #[test]
    fn pieces_take_their_closed_form_values() {
        let m = market(0.2, 0.4);
        // Breakpoints: cantelli_end = 0.18, mean_support_end = 0.42,
        // zero_start = 0.58.
        let t = worst_case_tail(&m, 0.1);
        assert_eq!(t.region, TailRegion::Cantelli);
        assert!((t.value - 0.16 / (0.16 + 0.16)).abs() < 1e-15);

        let t = worst_case_tail(&m, 0.3);
        assert_eq!(t.region, TailRegion::MeanSupport);
        assert!((t.value - 0.2 / 0.7).abs() < 1e-15);

        let t = worst_case_tail(&m, 0.5);
        assert_eq!(t.region, TailRegion::ThreePoint);
        assert!((t.value - (0.25 + 0.04 - 0.25) / 0.5).abs() < 1e-15);

        let t = worst_case_tail(&m, 0.6);
        assert_eq!(t.region, TailRegion::Zero);
        assert_eq!(t.value, 0.0);
    }

    #[test]
    fn adjacent_pieces_agree_at_breakpoints_and_tag_left() {
        let m = market(0.2, 0.4);
        let b = m.breakpoints();

        let at = worst_case_tail(&m, b.cantelli_end);
        assert_eq!(at.region, TailRegion::Cantelli);
        let gap = 0.5 - b.cantelli_end;
        let mean_support = (0.5 - b.cantelli_end) / (1.0 - b.cantelli_end);
        assert!((at.value - gap * gap / (gap * gap + 0.16)).abs() < 1e-15);
        assert!((at.value - mean_support).abs() < 1e-12);

        let at = worst_case_tail(&m, b.mean_support_end);
        assert_eq!(at.region, TailRegion::MeanSupport);
        let three_point = (0.25 + 0.04 - 0.5 * b.mean_support_end) / (1.0 - b.mean_support_end);
        assert!((at.value - three_point).abs() < 1e-12);

        let at = worst_case_tail(&m, b.zero_start);
        assert_eq!(at.region, TailRegion::Zero);
        assert_eq!(at.value, 0.0);
    }

    #[test]
    fn tail_is_monotone_in_price() {
        let m = market(0.15, 0.35);
        let mut last = f64::INFINITY;
        for i in 1..=1000 {
            let p = i as f64 / 1000.0;
            let v = worst_case_tail(&m, p).value;
            assert!(v <= last + 1e-12, "tail increased at p={p}");
            assert!((0.0..=1.0).contains(&v));
            last = v;
        }
    }

    #[test]
    fn degenerate_sigma_collapses_to_a_point_mass_threshold() {
        let m = market(0.0, 0.0);
        assert_eq!(worst_case_tail(&m, 0.4).value, 1.0);
        let at_mean = worst_case_tail(&m, 0.5);
        assert_eq!(at_mean.region, TailRegion::Zero);
        assert_eq!(at_mean.value, 0.0);
        assert_eq!(worst_case_tail(&m, 0.7).value, 0.0);
    }

    #[test]
    fn witnesses_are_feasible_and_attain_the_bound() {
        let m = market(0.2, 0.4);
        for &p in &[0.05, 0.18, 0.3, 0.42, 0.5, 0.55, 0.58, 0.8, 1.0] {
            let bound = worst_case_tail(&m, p);
            let w = witness_distribution(&m, p);
            assert!((w.mean() - 0.5).abs() < 1e-12, "mean off at p={p}");
            let var = w.variance();
            assert!(
                (0.04 - 1e-10..=0.16 + 1e-10).contains(&var),
                "variance {var} infeasible at p={p}"
            );
            assert!(w.atoms().iter().all(|a| (-1e-12..=1.0 + 1e-12).contains(a)));
            assert!(
                (w.tail_strict(p) - bound.value).abs() < 1e-12,
                "witness misses bound at p={p}"
            );
        }
    }

    #[test]
    fn witness_handles_degenerate_corners() {
        let m = market(0.0, 0.0);
        for &p in &[0.2, 0.5, 0.9] {
            let w = witness_distribution(&m, p);
            assert_eq!(w.atoms(), &[0.5]);
            assert_eq!(w.probs(), &[1.0]);
        }
        // sigma_lo = 0 in the vanishing region: point mass at the mean.
        let m = market(0.0, 0.3);
        let w = witness_distribution(&m, 0.7);
        assert!((w.tail_strict(0.7) - 0.0).abs() == 0.0);
        assert!((w.mean() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weak_tail_dominates_strict_tail() {
        let d = DiscreteDistribution::new(vec![0.2, 0.5, 0.9], vec![0.25, 0.5, 0.25]);
        assert_eq!(d.tail_strict(0.5), 0.25);
        assert_eq!(d.tail_weak(0.5), 0.75);
        assert_eq!(d.tail_strict(0.1), 1.0);
        assert_eq!(d.tail_weak(1.0), 0.0);
    }

    #[test]
    fn serializes_with_short_price_key() {
        let m = market(0.2, 0.4);
        let t = worst_case_tail(&m, 0.3);
        let json = serde_json::to_value(t).unwrap();
        assert_eq!(json["p"], 0.3);
        assert_eq!(json["region"], "MeanSupport");
        assert!(json["value"].is_number());
    }

    #[test]
    #[should_panic(expected = "price must lie in (0, beta]")]
    fn rejects_price_outside_domain() {
        worst_case_tail(&market(0.1, 0.2), 1.5);
    }
}
