//! Brute-force ground truth for the closed forms.
//!
//! Three independent checks live here: a discretized linear program whose
//! value approaches the worst-case tail from the grid side, an exhaustive
//! grid search for the revenue-maximizing price, and a seeded sampler
//! producing feasible distributions for spot checks. None of them share
//! formulas with the closed-form modules beyond the market data itself,
//! which is what makes them useful as referees.

mod simplex;

use crate::market::MarketInfo;
use crate::numeric::solve3;
use crate::pricing::worst_case_revenue;
use crate::tailbound::DiscreteDistribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simplex::{Rel, SimplexError};
use thiserror::Error;

/// Moment-band slack applied on top of the discretization allowance, in
/// original units.
const MOMENT_SLACK: f64 = 1e-9;
const SAMPLE_ATTEMPTS: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("BadGrid: {detail}")]
    BadGrid { detail: &'static str },
    #[error("Infeasible: the discretized moment set is empty at this grid size")]
    Infeasible,
    #[error("SolverStalled: the simplex iteration budget was exhausted")]
    SolverStalled,
    #[error("SamplingFailed: no feasible distribution found after {attempts} attempts")]
    SamplingFailed { attempts: u32 },
}

/// Grid resolution for the oracle's discretizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    n_atoms: usize,
    n_prices: usize,
}

impl GridSpec {
    pub fn new(n_atoms: usize, n_prices: usize) -> Result<Self, OracleError> {
        if n_atoms < 3 {
            return Err(OracleError::BadGrid {
                detail: "n_atoms must be at least 3",
            });
        }
        if n_prices < 3 {
            return Err(OracleError::BadGrid {
                detail: "n_prices must be at least 3",
            });
        }
        Ok(Self { n_atoms, n_prices })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn n_prices(&self) -> usize {
        self.n_prices
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_atoms: 2001,
            n_prices: 100_001,
        }
    }
}

/// Minimizes the tail probability at `price` over distributions supported
/// on an even grid of `n_atoms` points in `[0, beta]`, subject to the
/// market's moment constraints. `strict` selects `P(V > price)`, otherwise
/// `P(V >= price)`; the price is snapped to its nearest grid index for the
/// indicator.
///
/// The second-moment band is widened only as far as the lattice demands:
/// the tightest grid distribution with the required mean is the
/// adjacent-cell split, so the band's upper edge is raised to the split's
/// second moment when it would otherwise fall short. Any wider allowance
/// would blur the oracle exactly where the tail is most sensitive (tiny
/// std-dev bands near the mean).
pub fn lp_worst_tail(
    m: &MarketInfo,
    price: f64,
    strict: bool,
    grid: &GridSpec,
) -> Result<f64, OracleError> {
    assert!(
        price > 0.0 && price <= m.beta(),
        "price must lie in (0, beta], got {price}"
    );
    let n = grid.n_atoms;
    let beta = m.beta();
    let d = 1.0 / (n - 1) as f64;
    let atom = |i: usize| i as f64 * d;

    // Work on [0, 1]: better conditioned, and tolerances stay meaningful
    // across scales.
    let mu = m.mu() / beta;
    let m2_lo = (m.mu() * m.mu() + m.sigma_lo() * m.sigma_lo()) / (beta * beta);
    let m2_hi = (m.mu() * m.mu() + m.sigma_hi() * m.sigma_hi()) / (beta * beta);
    let mean_tol = MOMENT_SLACK / beta;
    let m2_tol = MOMENT_SLACK / (beta * beta);
    // Least second moment any grid distribution with mean `mu` can have.
    let cell = (mu / d).floor() * d;
    let split_m2 = mu * mu + ((mu - cell) * (cell + d - mu)).max(0.0);
    let m2_cap = (m2_hi + m2_tol).max(split_m2 + m2_tol);

    let j = (price / beta * (n - 1) as f64).round() as usize;
    let cost: Vec<f64> = (0..n)
        .map(|i| {
            let above = if strict { i > j } else { i >= j };
            if above {
                1.0
            } else {
                0.0
            }
        })
        .collect();

    let ones = vec![1.0; n];
    let first: Vec<f64> = (0..n).map(atom).collect();
    let second: Vec<f64> = (0..n).map(|i| atom(i) * atom(i)).collect();
    let rows = [
        (ones, Rel::Eq, 1.0),
        (first.clone(), Rel::Ge, mu - mean_tol),
        (first, Rel::Le, mu + mean_tol),
        (second.clone(), Rel::Ge, (m2_lo - m2_tol).max(0.0)),
        (second, Rel::Le, m2_cap),
    ];

    match simplex::solve(&cost, &rows) {
        Ok(sol) => Ok(sol.objective.clamp(0.0, 1.0)),
        Err(SimplexError::Infeasible) => Err(OracleError::Infeasible),
        // The feasible set is bounded, so "unbounded" can only mean the
        // arithmetic broke down; report it as a solver failure.
        Err(SimplexError::IterationLimit) | Err(SimplexError::Unbounded) => {
            Err(OracleError::SolverStalled)
        }
    }
}

/// Exhaustive search for the best guaranteed revenue over `n_prices` even
/// grid points in `(0, beta]`. Returns `(price, revenue)`; exact ties go to
/// the higher price.
pub fn grid_argmax_revenue(m: &MarketInfo, grid: &GridSpec) -> (f64, f64) {
    let n = grid.n_prices;
    let step = m.beta() / n as f64;
    let mut best = (step, f64::NEG_INFINITY);
    for k in 1..=n {
        let p = (step * k as f64).min(m.beta());
        let r = worst_case_revenue(m, p).expect("grid prices lie in (0, beta]");
        if r >= best.1 {
            best = (p, r);
        }
    }
    best
}

/// Draws a random distribution consistent with the market, deterministically
/// in `seed`. Four atoms: the support endpoints, one point near the mean,
/// and one uniform draw; probabilities solve the moment constraints, with
/// the leftover degree of freedom drawn uniformly from its feasible
/// interval.
pub fn sample_feasible_distribution(
    m: &MarketInfo,
    seed: u64,
) -> Result<DiscreteDistribution, OracleError> {
    if m.sigma_hi() == 0.0 {
        return Ok(DiscreteDistribution::new(vec![m.mu()], vec![1.0]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mu, beta) = (m.mu(), m.beta());
    let (v_lo, v_hi) = (m.sigma_lo() * m.sigma_lo(), m.sigma_hi() * m.sigma_hi());

    for _ in 0..SAMPLE_ATTEMPTS {
        let var: f64 = if v_lo == v_hi {
            v_lo
        } else {
            rng.gen_range(v_lo..=v_hi)
        };
        let m2 = mu * mu + var;
        // An atom within var/beta of the mean keeps the target moment
        // point inside the convex hull of the four atom moment vectors.
        let near = mu + rng.gen_range(-1.0..=1.0) * var / beta;
        let free = rng.gen_range(0.0..beta);
        let sep = 1e-6 * beta;
        if (free - near).abs() < sep || free < sep || (beta - free).abs() < sep {
            continue;
        }

        // Probabilities on {0, near, beta} ignoring the free atom...
        let vander = [
            [1.0, 1.0, 1.0],
            [0.0, near, beta],
            [0.0, near * near, beta * beta],
        ];
        let Some(part) = solve3(vander, [1.0, mu, m2]) else {
            continue;
        };
        // ...plus the null direction that trades them against the free atom.
        let Some(null3) = solve3(vander, [-1.0, -free, -free * free]) else {
            continue;
        };

        let part = [part[0], part[1], part[2], 0.0];
        let null = [null3[0], null3[1], null3[2], 1.0];
        let mut t_lo = f64::NEG_INFINITY;
        let mut t_hi = f64::INFINITY;
        let mut ok = true;
        for i in 0..4 {
            if null[i] > 1e-14 {
                t_lo = t_lo.max(-part[i] / null[i]);
            } else if null[i] < -1e-14 {
                t_hi = t_hi.min(-part[i] / null[i]);
            } else if part[i] < -1e-12 {
                ok = false;
            }
        }
        // At the dispersion boundary the interval degenerates to a point
        // and float noise can cross the bounds; a negative draw that is
        // real (not noise) still gets rejected below.
        if !ok || t_lo > t_hi + 1e-9 {
            continue;
        }
        let t = if t_hi > t_lo {
            rng.gen_range(t_lo..=t_hi)
        } else {
            0.5 * (t_lo + t_hi)
        };

        let mut atoms = vec![0.0, near, free, beta];
        let mut probs = vec![
            part[0] + t * null[0],
            part[1] + t * null[1],
            0.0 + t,
            part[2] + t * null[2],
        ];
        // The free atom was appended after beta in the solve ordering; put
        // the lists in atom order for readability.
        if free < near {
            atoms.swap(1, 2);
            probs.swap(1, 2);
        }
        for q in &mut probs {
            if *q < 0.0 && *q > -1e-12 {
                *q = 0.0;
            }
        }
        if probs.iter().any(|q| *q < 0.0) {
            continue;
        }
        let total: f64 = probs.iter().sum();
        for q in &mut probs {
            *q /= total;
        }
        let d = DiscreteDistribution::new(atoms, probs);
        let mean_ok = (d.mean() - mu).abs() <= 1e-10;
        let m2_ok = d.second_moment() >= mu * mu + v_lo - 1e-10
            && d.second_moment() <= mu * mu + v_hi + 1e-10;
        if mean_ok && m2_ok {
            return Ok(d);
        }
    }
    Err(OracleError::SamplingFailed {
        attempts: SAMPLE_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::optimal_price;
    use crate::tailbound::worst_case_tail;

    fn market(sigma_lo: f64, sigma_hi: f64) -> MarketInfo {
        MarketInfo::new(0.5, sigma_lo, sigma_hi, 1.0).unwrap()
    }

    #[test]
    fn lp_tracks_the_closed_form_tail() {
        let grid = GridSpec::new(2001, 1001).unwrap();
        for &(lo, hi) in &[(0.2, 0.2), (0.0, 0.5), (0.1, 0.4), (0.45, 0.45)] {
            let m = market(lo, hi);
            for &p in &[0.05, 0.2, 0.35, 0.5, 0.62, 0.9] {
                let lp = lp_worst_tail(&m, p, true, &grid).unwrap();
                let closed = worst_case_tail(&m, p).value;
                assert!(
                    (lp - closed).abs() <= 2e-3,
                    "lp {lp} vs closed {closed} at p={p}, sigma=({lo},{hi})"
                );
            }
        }
    }

    #[test]
    fn lp_handles_rescaled_units() {
        let m = MarketInfo::new(2.0, 1.0, 2.0, 10.0).unwrap();
        let grid = GridSpec::new(2001, 1001).unwrap();
        for &p in &[0.5, 1.5, 2.2, 4.0] {
            let lp = lp_worst_tail(&m, p, true, &grid).unwrap();
            let closed = worst_case_tail(&m, p).value;
            assert!(
                (lp - closed).abs() <= 2e-3,
                "lp {lp} vs closed {closed} at p={p}"
            );
        }
    }

    #[test]
    fn lp_survives_the_degenerate_corner() {
        // A point mass off the grid needs the discretization allowance.
        let m = market(0.0, 0.0);
        let grid = GridSpec::new(2001, 1001).unwrap();
        let below = lp_worst_tail(&m, 0.4, true, &grid).unwrap();
        assert!(
            (below - 1.0).abs() <= 2e-3,
            "tail below the mean was {below}"
        );
        let above = lp_worst_tail(&m, 0.7, true, &grid).unwrap();
        assert!(above <= 2e-3, "tail above the mean was {above}");
    }

    #[test]
    fn weak_and_strict_infima_agree() {
        let grid = GridSpec::new(2001, 101).unwrap();
        let m = market(0.15, 0.35);
        for &p in &[0.1, 0.3, 0.45, 0.55] {
            let strict = lp_worst_tail(&m, p, true, &grid).unwrap();
            let weak = lp_worst_tail(&m, p, false, &grid).unwrap();
            // Weak dominates pointwise, but the infima coincide in the
            // continuum: mass parked exactly at the price slides just
            // below it. On the grid "just below" is one cell, so the gap
            // shrinks with the resolution.
            assert!(
                weak >= strict - 1e-9,
                "weak {weak} below strict {strict} at p={p}"
            );
            assert!(weak - strict <= 2e-3, "gap {} at p={p}", weak - strict);
        }
    }

    #[test]
    fn grid_argmax_agrees_with_the_decision() {
        let grid = GridSpec::new(3, 20_001).unwrap();
        for &(lo, hi) in &[(0.2, 0.2), (0.0, 0.5), (0.45, 0.45)] {
            let m = market(lo, hi);
            let d = optimal_price(&m);
            let (p, r) = grid_argmax_revenue(&m, &grid);
            assert!(
                (p - d.price).abs() <= 1e-4,
                "argmax {p} vs decision {}",
                d.price
            );
            assert!((r - d.worst_case_revenue).abs() <= 1e-4);
        }
    }

    #[test]
    fn sampler_is_deterministic_and_feasible() {
        let m = market(0.1, 0.4);
        let a = sample_feasible_distribution(&m, 42).unwrap();
        let b = sample_feasible_distribution(&m, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_feasible_distribution(&m, 43).unwrap();
        assert_ne!(a, c);
        for seed in 0..50 {
            let d = sample_feasible_distribution(&m, seed).unwrap();
            assert!((d.mean() - 0.5).abs() <= 1e-10);
            let var = d.variance();
            assert!(
                (0.01 - 1e-9..=0.16 + 1e-9).contains(&var),
                "variance {var} out of band at seed {seed}"
            );
            assert!(d.atoms().iter().all(|&a| (0.0..=1.0).contains(&a)));
        }
    }

    #[test]
    fn sampler_pins_the_second_moment_for_precise_sigma() {
        let m = MarketInfo::with_precise_sigma(2.0, 1.5, 10.0).unwrap();
        for seed in 0..20 {
            let d = sample_feasible_distribution(&m, seed).unwrap();
            assert!(
                (d.second_moment() - (4.0 + 2.25)).abs() <= 1e-10,
                "second moment drifted at seed {seed}"
            );
        }
    }

    #[test]
    fn sampler_handles_boundary_sigmas() {
        // Degenerate: the only feasible distribution is the point mass.
        let m = market(0.0, 0.0);
        let d = sample_feasible_distribution(&m, 7).unwrap();
        assert_eq!(d.atoms(), &[0.5]);
        // Maximal dispersion: mass must concentrate on the endpoints.
        let m = market(0.5, 0.5);
        let d = sample_feasible_distribution(&m, 7).unwrap();
        assert!((d.variance() - 0.25).abs() <= 1e-9);
    }

    #[test]
    fn grid_spec_validates() {
        assert!(GridSpec::new(2, 100).is_err());
        assert!(GridSpec::new(100, 2).is_err());
        let g = GridSpec::default();
        assert_eq!(g.n_atoms(), 2001);
        assert_eq!(g.n_prices(), 100_001);
    }
}
