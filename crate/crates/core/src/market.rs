//! Market primitives: what the seller knows about the valuation distribution.
//!
//! Knowledge is summarized by four numbers: the mean valuation `mu`, an
//! interval `[sigma_lo, sigma_hi]` containing the standard deviation, and a
//! support bound `beta` (valuations lie in `[0, beta]`). Every distribution
//! on `[0, beta]` with mean `mu` and variance in `[sigma_lo^2, sigma_hi^2]`
//! is considered possible.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance used when comparing prices against breakpoints and
/// other derived boundary values.
pub const BREAKPOINT_TOL: f64 = 1e-12;

/// Rejected market parameters. The `Display` form starts with the variant
/// name so command-line consumers can surface it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarketError {
    #[error("NonFinite: {field} must be a finite number")]
    NonFinite { field: &'static str },
    #[error("MeanOutOfRange: mu must lie strictly between 0 and beta (mu={mu}, beta={beta})")]
    MeanOutOfRange { mu: f64, beta: f64 },
    #[error("NegativeSigma: sigma_lo must be non-negative (sigma_lo={sigma_lo})")]
    NegativeSigma { sigma_lo: f64 },
    #[error(
        "SigmaOrder: sigma_lo must not exceed sigma_hi (sigma_lo={sigma_lo}, sigma_hi={sigma_hi})"
    )]
    SigmaOrder { sigma_lo: f64, sigma_hi: f64 },
    #[error(
        "SigmaInfeasible: no distribution on [0, beta] with mean mu has std dev sigma_hi \
         (sigma_hi={sigma_hi}, max={sigma_max})"
    )]
    SigmaInfeasible { sigma_hi: f64, sigma_max: f64 },
}

/// Validated market description. Construction enforces `0 < mu < beta`,
/// `0 <= sigma_lo <= sigma_hi <= sqrt(mu(beta-mu))`, so every instance
/// describes a non-empty set of distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMarketInfo")]
pub struct MarketInfo {
    mu: f64,
    sigma_lo: f64,
    sigma_hi: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawMarketInfo {
    mu: f64,
    #[serde(default)]
    sigma_lo: f64,
    #[serde(default)]
    sigma_hi: Option<f64>,
    beta: f64,
}

impl TryFrom<RawMarketInfo> for MarketInfo {
    type Error = MarketError;

    fn try_from(raw: RawMarketInfo) -> Result<Self, MarketError> {
        // Omitted sigma_hi means "nothing known beyond the mean": the
        // largest feasible std dev. NaN from invalid mu/beta is caught by
        // the mean check, which runs first.
        let sigma_hi = raw
            .sigma_hi
            .unwrap_or_else(|| (raw.mu * (raw.beta - raw.mu)).sqrt());
        MarketInfo::new(raw.mu, raw.sigma_lo, sigma_hi, raw.beta)
    }
}

impl MarketInfo {
    pub fn new(mu: f64, sigma_lo: f64, sigma_hi: f64, beta: f64) -> Result<Self, MarketError> {
        if !mu.is_finite() {
            return Err(MarketError::NonFinite { field: "mu" });
        }
        if !beta.is_finite() {
            return Err(MarketError::NonFinite { field: "beta" });
        }
        if !(mu > 0.0 && mu < beta) {
            return Err(MarketError::MeanOutOfRange { mu, beta });
        }
        if !sigma_lo.is_finite() {
            return Err(MarketError::NonFinite { field: "sigma_lo" });
        }
        if !sigma_hi.is_finite() {
            return Err(MarketError::NonFinite { field: "sigma_hi" });
        }
        if sigma_lo < 0.0 {
            return Err(MarketError::NegativeSigma { sigma_lo });
        }
        if sigma_lo > sigma_hi {
            return Err(MarketError::SigmaOrder { sigma_lo, sigma_hi });
        }
        let sigma_max = (mu * (beta - mu)).sqrt();
        if sigma_hi > sigma_max {
            return Err(MarketError::SigmaInfeasible {
                sigma_hi,
                sigma_max,
            });
        }
        Ok(Self {
            mu,
            sigma_lo,
            sigma_hi,
            beta,
        })
    }

    /// Market with an exactly known standard deviation.
    pub fn with_precise_sigma(mu: f64, sigma: f64, beta: f64) -> Result<Self, MarketError> {
        Self::new(mu, sigma, sigma, beta)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma_lo(&self) -> f64 {
        self.sigma_lo
    }

    pub fn sigma_hi(&self) -> f64 {
        self.sigma_hi
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Largest std dev any distribution on `[0, beta]` with mean `mu` can
    /// have; attained only by the two-point distribution on `{0, beta}`.
    pub fn sigma_max(&self) -> f64 {
        (self.mu * (self.beta - self.mu)).sqrt()
    }

    /// Whether the std dev is pinned to a single value.
    pub fn has_precise_sigma(&self) -> bool {
        self.sigma_lo == self.sigma_hi
    }

    pub fn breakpoints(&self) -> Breakpoints {
        let spread = self.beta - self.mu;
        Breakpoints {
            cantelli_end: self.mu - self.sigma_hi * self.sigma_hi / spread,
            mean_support_end: self.mu - self.sigma_lo * self.sigma_lo / spread,
            zero_start: self.mu + self.sigma_lo * self.sigma_lo / self.mu,
        }
    }
}

/// Prices at which the worst-case tail changes shape.
///
/// Ordering is `cantelli_end <= mean_support_end < zero_start <= beta`, with
/// `mean_support_end < mu < zero_start`. `cantelli_end` may be negative when
/// `sigma_hi` is large; prices are positive, so such a piece is simply never
/// visited.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakpoints {
    /// Largest price at which the Cantelli piece binds.
    pub cantelli_end: f64,
    /// Largest price at which the mean-and-support piece binds.
    pub mean_support_end: f64,
    /// Smallest price from which no feasible distribution buys: the tail is
    /// identically zero at and beyond this price.
    pub zero_start: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_interior_parameters() {
        let m = MarketInfo::new(0.5, 0.1, 0.3, 1.0).unwrap();
        assert_eq!(m.mu(), 0.5);
        assert_eq!(m.sigma_lo(), 0.1);
        assert_eq!(m.sigma_hi(), 0.3);
        assert_eq!(m.beta(), 1.0);
        assert!(!m.has_precise_sigma());
        assert!(MarketInfo::with_precise_sigma(0.5, 0.2, 1.0)
            .unwrap()
            .has_precise_sigma());
    }

    #[test]
    fn accepts_boundary_sigmas() {
        // sigma_hi = sigma_max and sigma_lo = 0 are both legal.
        let m = MarketInfo::new(0.5, 0.0, 0.5, 1.0).unwrap();
        assert_eq!(m.sigma_max(), 0.5);
        MarketInfo::with_precise_sigma(0.5, 0.0, 1.0).unwrap();
    }

    #[test]
    fn rejects_bad_mean() {
        assert_eq!(
            MarketInfo::new(0.0, 0.0, 0.1, 1.0),
            Err(MarketError::MeanOutOfRange { mu: 0.0, beta: 1.0 })
        );
        assert_eq!(
            MarketInfo::new(1.0, 0.0, 0.1, 1.0),
            Err(MarketError::MeanOutOfRange { mu: 1.0, beta: 1.0 })
        );
        assert_eq!(
            MarketInfo::new(2.0, 0.0, 0.1, 1.0),
            Err(MarketError::MeanOutOfRange { mu: 2.0, beta: 1.0 })
        );
    }

    #[test]
    fn rejects_bad_sigmas() {
        assert!(matches!(
            MarketInfo::new(0.5, -0.1, 0.3, 1.0),
            Err(MarketError::NegativeSigma { .. })
        ));
        assert!(matches!(
            MarketInfo::new(0.5, 0.4, 0.3, 1.0),
            Err(MarketError::SigmaOrder { .. })
        ));
        assert!(matches!(
            MarketInfo::new(0.5, 0.0, 0.6, 1.0),
            Err(MarketError::SigmaInfeasible { .. })
        ));
    }

    #[test]
    fn rejects_non_finite_in_declared_order() {
        assert_eq!(
            MarketInfo::new(f64::NAN, 0.0, 0.1, 1.0),
            Err(MarketError::NonFinite { field: "mu" })
        );
        assert_eq!(
            MarketInfo::new(0.5, 0.0, 0.1, f64::INFINITY),
            Err(MarketError::NonFinite { field: "beta" })
        );
        assert_eq!(
            MarketInfo::new(0.5, f64::NAN, 0.1, 1.0),
            Err(MarketError::NonFinite { field: "sigma_lo" })
        );
        assert_eq!(
            MarketInfo::new(0.5, 0.0, f64::NAN, 1.0),
            Err(MarketError::NonFinite { field: "sigma_hi" })
        );
    }

    #[test]
    fn breakpoints_are_ordered() {
        let m = MarketInfo::new(0.5, 0.2, 0.4, 1.0).unwrap();
        let b = m.breakpoints();
        assert!((b.cantelli_end - 0.18).abs() < 1e-15);
        assert!((b.mean_support_end - 0.42).abs() < 1e-15);
        assert!((b.zero_start - 0.58).abs() < 1e-15);
        assert!(b.cantelli_end <= b.mean_support_end);
        assert!(b.mean_support_end < m.mu());
        assert!(m.mu() < b.zero_start);
        assert!(b.zero_start <= m.beta());
    }

    #[test]
    fn deserializes_with_defaults() {
        let m: MarketInfo = serde_json::from_str(r#"{"mu": 0.5, "beta": 1.0}"#).unwrap();
        assert_eq!(m.sigma_lo(), 0.0);
        assert_eq!(m.sigma_hi(), 0.5);

        let m: MarketInfo =
            serde_json::from_str(r#"{"mu": 0.5, "sigma_lo": 0.1, "sigma_hi": 0.2, "beta": 1.0}"#)
                .unwrap();
        assert_eq!(m.sigma_lo(), 0.1);
        assert_eq!(m.sigma_hi(), 0.2);

        // Validation also runs on deserialization, mean check first.
        let err = serde_json::from_str::<MarketInfo>(r#"{"mu": 2.0, "beta": 1.0}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("MeanOutOfRange"), "{err}");
    }

    #[test]
    fn serializes_round_trip() {
        let m = MarketInfo::new(0.5, 0.1, 0.3, 1.0).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: MarketInfo = serde_json::from_str(&json).unwrap();
        assert_eq!(m, back);
    }
}
