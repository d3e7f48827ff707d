//! Oracle agreement run: seeded random markets on which the closed-form
//! tail is checked against the discretized LP, and the strict tail against
//! the weak one. Exits nonzero as soon as either tolerance is exceeded.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_pricing::oracle::{lp_worst_tail, GridSpec};
use robust_pricing::{worst_case_tail, MarketInfo};

use crate::Failure;

/// Default oracle resolution and the tolerance it supports.
const ATOMS: usize = 2001;
/// Finer grid for the strict/weak comparison, whose gap is one atom cell.
const FINE_ATOMS: usize = 8001;
const TOL: f64 = 2e-3;

fn random_market(rng: &mut ChaCha8Rng) -> MarketInfo {
    let mu: f64 = rng.gen_range(0.05..5.0);
    let beta = mu * rng.gen_range(1.2..20.0);
    let sigma_max = (mu * (beta - mu)).sqrt();
    let sigma_hi = sigma_max * rng.gen_range(0.001..=1.0);
    let sigma_lo = sigma_hi * rng.gen_range(0.0..=1.0);
    MarketInfo::new(mu, sigma_lo, sigma_hi, beta).expect("sampled parameters are valid")
}

/// Nearest price the LP can represent: its indicator lives on the atom grid.
fn snap(price: f64, beta: f64, atoms: usize) -> f64 {
    let step = beta / (atoms - 1) as f64;
    ((price / step).round() * step).clamp(step, beta)
}

fn describe(m: &MarketInfo, p: f64) -> String {
    format!(
        "mu={}, sigma_lo={}, sigma_hi={}, beta={}, p={}",
        m.mu(),
        m.sigma_lo(),
        m.sigma_hi(),
        m.beta(),
        p
    )
}

pub fn run(trials: u32, seed: u64, out: &mut dyn Write) -> Result<(), Failure> {
    let coarse = GridSpec::new(ATOMS, 3).expect("resolution is valid");
    let fine = GridSpec::new(FINE_ATOMS, 3).expect("resolution is valid");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_err = (0.0f64, String::new());
    let mut worst_gap = (0.0f64, String::new());
    for _ in 0..trials {
        let m = random_market(&mut rng);
        let p = m.beta() * rng.gen_range(0.001..=1.0);

        let p_c = snap(p, m.beta(), ATOMS);
        let closed = worst_case_tail(&m, p_c).value;
        let lp = lp_worst_tail(&m, p_c, true, &coarse).map_err(Failure::domain)?;
        if (closed - lp).abs() > worst_err.0 {
            worst_err = ((closed - lp).abs(), describe(&m, p_c));
        }

        let p_f = snap(p, m.beta(), FINE_ATOMS);
        let strict = lp_worst_tail(&m, p_f, true, &fine).map_err(Failure::domain)?;
        let weak = lp_worst_tail(&m, p_f, false, &fine).map_err(Failure::domain)?;
        if weak < strict - 1e-9 {
            return Err(Failure::verification(format!(
                "WeakBelowStrict: weak tail {weak} fell below strict {strict} at {}",
                describe(&m, p_f)
            )));
        }
        if weak - strict > worst_gap.0 {
            worst_gap = (weak - strict, describe(&m, p_f));
        }
    }
    if worst_err.0 > TOL {
        return Err(Failure::verification(format!(
            "ToleranceExceeded: |closed - lp| = {:.3e} > {TOL:e} at {}",
            worst_err.0, worst_err.1
        )));
    }
    if worst_gap.0 > TOL {
        return Err(Failure::verification(format!(
            "ToleranceExceeded: weak - strict = {:.3e} > {TOL:e} at {}",
            worst_gap.0, worst_gap.1
        )));
    }
    writeln!(out, "oracle agreement: {trials} trials, seed {seed}")?;
    writeln!(
        out,
        "max |closed - lp| = {:.3e} (tolerance {TOL:e}, {ATOMS} atoms)",
        worst_err.0
    )?;
    writeln!(
        out,
        "max weak - strict = {:.3e} (tolerance {TOL:e}, {FINE_ATOMS} atoms)",
        worst_gap.0
    )?;
    Ok(())
}
