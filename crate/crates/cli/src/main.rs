//! Command-line front end over the pricing library: JSON for single
//! decisions, CSV for sweeps, and a seeded self-check against the LP
//! oracle.
//!
//! Exit codes: 0 success, 1 verification failure, 2 domain validation
//! error, 64 usage error.

mod figures;
mod render;
mod verify;

use std::io::Write;
use std::num::NonZeroU32;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robust_pricing::{
    bundle_price, bundle_threshold, classify_region, equilibrium, optimal_price,
    optimal_queue_price, waiting_time, worst_case_revenue, worst_case_tail, BundleQuery,
    MarketInfo, PricingError, QueueMarket,
};

use render::{price_region_text, sink, tail_region_text, Cell, Table};

/// A failed run: exit code plus the line printed to stderr. Domain
/// rejections reuse the library's error text, which leads with the
/// variant name.
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn domain(err: impl std::fmt::Display) -> Self {
        Failure {
            code: 2,
            message: err.to_string(),
        }
    }

    fn verification(message: String) -> Self {
        Failure { code: 1, message }
    }

    fn usage(message: String) -> Self {
        Failure { code: 64, message }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        // A reader that stops consuming (e.g. `head`) is not a failure.
        if err.kind() == std::io::ErrorKind::BrokenPipe {
            Failure {
                code: 0,
                message: String::new(),
            }
        } else {
            Failure {
                code: 2,
                message: format!("Io: {err}"),
            }
        }
    }
}

#[derive(Parser)]
#[command(
    name = "robust-pricing",
    version,
    about = "Robust monopoly pricing from mean, dispersion, and support information"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Seed for commands that sample.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output encoding; defaults to json for single decisions, csv for sweeps.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimal robust price for one market.
    Price(PriceCmd),
    /// Tight lower bound on the sale probability at one price.
    Tail(TailCmd),
    /// Parameter sweeps and named data-set presets.
    Sweep(SweepCmd),
    /// Optimal-price region across the dispersion-interval triangle.
    Regions(RegionsCmd),
    /// Queue equilibrium and revenue across a price range.
    Queue(QueueCmd),
    /// Robust price for a bundle of goods.
    Bundle(BundleCmd),
    /// Seeded self-check against the LP oracle.
    Verify(VerifyCmd),
}

#[derive(Args)]
struct MarketArgs {
    /// Mean valuation.
    #[arg(long)]
    mu: f64,
    /// Largest possible valuation.
    #[arg(long)]
    beta: f64,
    /// Exact std dev: shorthand for --sigma-lo and --sigma-hi together.
    #[arg(long, conflicts_with_all = ["sigma_lo", "sigma_hi"])]
    sigma: Option<f64>,
    /// Std-dev lower bound; defaults to 0.
    #[arg(long)]
    sigma_lo: Option<f64>,
    /// Std-dev upper bound; defaults to the largest feasible value.
    #[arg(long)]
    sigma_hi: Option<f64>,
}

impl MarketArgs {
    fn market(&self) -> Result<MarketInfo, Failure> {
        market_from(self.mu, self.beta, self.sigma, self.sigma_lo, self.sigma_hi)
    }
}

/// Applies the sigma-flag defaults: an exact value sets both bounds, and
/// absent bounds widen to the full feasible interval.
fn market_from(
    mu: f64,
    beta: f64,
    sigma: Option<f64>,
    sigma_lo: Option<f64>,
    sigma_hi: Option<f64>,
) -> Result<MarketInfo, Failure> {
    if let Some(s) = sigma {
        return MarketInfo::with_precise_sigma(mu, s, beta).map_err(Failure::domain);
    }
    let lo = sigma_lo.unwrap_or(0.0);
    // The fallback expression is only meaningful for valid (mu, beta);
    // construction checks those first, so bad inputs still surface as
    // mean or finiteness errors rather than sigma errors.
    let hi = sigma_hi.unwrap_or_else(|| (mu * (beta - mu)).max(0.0).sqrt());
    MarketInfo::new(mu, lo, hi, beta).map_err(Failure::domain)
}

#[derive(Args)]
struct PriceCmd {
    #[command(flatten)]
    market: MarketArgs,
}

#[derive(Args)]
struct TailCmd {
    #[command(flatten)]
    market: MarketArgs,
    /// Price to evaluate.
    #[arg(long)]
    p: f64,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Figure {
    #[value(name = "2a")]
    F2a,
    #[value(name = "2b")]
    F2b,
    #[value(name = "3a")]
    F3a,
    #[value(name = "3b")]
    F3b,
    #[value(name = "4")]
    F4,
    #[value(name = "5")]
    F5,
    #[value(name = "6a")]
    F6a,
    #[value(name = "6b")]
    F6b,
    #[value(name = "7a")]
    F7a,
    #[value(name = "7b")]
    F7b,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    Sigma,
    #[value(name = "sigma_lo", alias = "sigma-lo")]
    SigmaLo,
    #[value(name = "sigma_hi", alias = "sigma-hi")]
    SigmaHi,
    Beta,
    Price,
    H,
    Lambda,
}

#[derive(Args)]
struct SweepCmd {
    /// Named preset; fixes every parameter of the data set.
    #[arg(long, value_enum, conflicts_with_all = [
        "param", "from", "to", "steps", "mu", "beta",
        "sigma", "sigma_lo", "sigma_hi", "lambda", "theta", "hold_cost",
    ])]
    figure: Option<Figure>,
    /// Swept parameter; needs --from, --to, and --steps.
    #[arg(long, value_enum)]
    param: Option<SweepParam>,
    /// Sweep range start (inclusive).
    #[arg(long)]
    from: Option<f64>,
    /// Sweep range end (inclusive).
    #[arg(long)]
    to: Option<f64>,
    /// Number of sweep points.
    #[arg(long)]
    steps: Option<u32>,
    /// Mean valuation.
    #[arg(long)]
    mu: Option<f64>,
    /// Largest possible valuation.
    #[arg(long)]
    beta: Option<f64>,
    /// Exact std dev: shorthand for --sigma-lo and --sigma-hi together.
    #[arg(long, conflicts_with_all = ["sigma_lo", "sigma_hi"])]
    sigma: Option<f64>,
    /// Std-dev lower bound; defaults to 0.
    #[arg(long)]
    sigma_lo: Option<f64>,
    /// Std-dev upper bound; defaults to the largest feasible value.
    #[arg(long)]
    sigma_hi: Option<f64>,
    /// Arrival rate, for the queue-parameter sweeps.
    #[arg(long)]
    lambda: Option<f64>,
    /// Service rate, for the queue-parameter sweeps.
    #[arg(long)]
    theta: Option<f64>,
    /// Waiting cost per unit time, for --param lambda.
    #[arg(long)]
    hold_cost: Option<f64>,
}

#[derive(Args)]
struct RegionsCmd {
    /// Mean valuation.
    #[arg(long)]
    mu: f64,
    /// Largest possible valuation.
    #[arg(long)]
    beta: f64,
    /// Grid points per dispersion axis.
    #[arg(long, default_value_t = 100)]
    steps: u32,
}

#[derive(Args)]
struct QueueCmd {
    #[command(flatten)]
    market: MarketArgs,
    /// Arrival rate of interested buyers.
    #[arg(long)]
    lambda: f64,
    /// Service rate.
    #[arg(long)]
    theta: f64,
    /// Waiting cost per unit time.
    #[arg(long)]
    hold_cost: f64,
    /// Single price to evaluate instead of a sweep.
    #[arg(long, conflicts_with_all = ["from", "to"])]
    p: Option<f64>,
    /// Sweep range start; defaults to one grid step above 0.
    #[arg(long)]
    from: Option<f64>,
    /// Sweep range end; defaults to the point where the tail vanishes.
    #[arg(long)]
    to: Option<f64>,
    /// Number of sweep points.
    #[arg(long, default_value_t = 200)]
    steps: u32,
}

#[derive(Args)]
struct BundleCmd {
    #[command(flatten)]
    market: MarketArgs,
    /// Number of goods in the bundle.
    #[arg(long)]
    m: NonZeroU32,
}

#[derive(Args)]
struct VerifyCmd {
    /// Number of sampled (market, price) pairs.
    #[arg(long, default_value_t = 100)]
    trials: u32,
}

/// Inclusive evenly spaced grid; rejects an empty or reversed range.
fn linspace(from: f64, to: f64, steps: u32) -> Result<Vec<f64>, Failure> {
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(Failure::domain(format!(
            "SweepRange: need finite from < to (from={from}, to={to})"
        )));
    }
    if steps < 2 {
        return Err(Failure::domain(format!(
            "SweepRange: need at least 2 steps (steps={steps})"
        )));
    }
    let n = steps as usize;
    Ok((0..n)
        .map(|i| from + (to - from) * i as f64 / (n - 1) as f64)
        .collect())
}

fn write_table(t: &Table, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    match format {
        Format::Csv => t.write_csv(out)?,
        Format::Json => t.write_json(out)?,
    }
    Ok(())
}

fn run_price(c: &PriceCmd, format: Option<Format>, out: &mut dyn Write) -> Result<(), Failure> {
    let d = optimal_price(&c.market.market()?);
    match format.unwrap_or(Format::Json) {
        Format::Json => {
            writeln!(
                out,
                "{}",
                serde_json::to_string(&d).expect("decision serializes")
            )?;
        }
        Format::Csv => {
            let mut t = Table::new(vec![
                "price",
                "region",
                "worst_case_revenue",
                "p_low",
                "p_mid",
                "p_high",
                "kappa",
            ]);
            t.push(vec![
                d.price.into(),
                Cell::Text(price_region_text(d.region)),
                d.worst_case_revenue.into(),
                d.candidates.p_low.into(),
                d.candidates.p_mid.into(),
                d.candidates.p_high.into(),
                d.candidates.kappa.into(),
            ]);
            t.write_csv(out)?;
        }
    }
    Ok(())
}

fn run_tail(c: &TailCmd, format: Option<Format>, out: &mut dyn Write) -> Result<(), Failure> {
    let m = c.market.market()?;
    if !(c.p > 0.0 && c.p <= m.beta()) {
        return Err(Failure::domain(PricingError::PriceOutOfRange {
            price: c.p,
            beta: m.beta(),
        }));
    }
    let t = worst_case_tail(&m, c.p);
    match format.unwrap_or(Format::Json) {
        Format::Json => {
            writeln!(
                out,
                "{}",
                serde_json::to_string(&t).expect("tail serializes")
            )?;
        }
        Format::Csv => {
            let mut table = Table::new(vec!["p", "value", "region"]);
            table.push(vec![
                t.price.into(),
                t.value.into(),
                Cell::Text(tail_region_text(t.region)),
            ]);
            table.write_csv(out)?;
        }
    }
    Ok(())
}

fn run_bundle(c: &BundleCmd, format: Option<Format>, out: &mut dyn Write) -> Result<(), Failure> {
    let base = c.market.market()?;
    let d = bundle_price(&BundleQuery::new(base, c.m));
    // The size threshold only exists for an exactly known std dev.
    let m_star = bundle_threshold(&base).ok();
    match format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = serde_json::to_value(d).expect("decision serializes");
            if let Some(ms) = m_star {
                v["m_star"] = serde_json::json!(ms);
            }
            writeln!(out, "{v}")?;
        }
        Format::Csv => {
            let mut t = Table::new(vec![
                "bundle_size",
                "bundle_price",
                "per_good_price",
                "per_good_region",
                "m_star",
            ]);
            let mut row = vec![
                (d.bundle_size as f64).into(),
                d.bundle_price.into(),
                d.per_good.price.into(),
                Cell::Text(price_region_text(d.per_good.region)),
            ];
            row.push(match m_star {
                Some(ms) => ms.into(),
                None => Cell::Text(""),
            });
            t.push(row);
            t.write_csv(out)?;
        }
    }
    Ok(())
}

fn run_regions(c: &RegionsCmd, format: Option<Format>, out: &mut dyn Write) -> Result<(), Failure> {
    if c.steps < 1 {
        return Err(Failure::domain(format!(
            "SweepRange: need at least 1 step (steps={})",
            c.steps
        )));
    }
    // Validate (mu, beta) before deriving the dispersion grid from them.
    let _ = MarketInfo::new(c.mu, 0.0, 0.0, c.beta).map_err(Failure::domain)?;
    let sigma_max = (c.mu * (c.beta - c.mu)).sqrt();
    let grid: Vec<f64> = (1..=c.steps)
        .map(|k| sigma_max * k as f64 / (c.steps + 1) as f64)
        .collect();
    let mut t = Table::new(vec!["sigma_lo", "sigma_hi", "region"]);
    for &hi in &grid {
        for &lo in grid.iter().take_while(|&&lo| lo <= hi) {
            let m = MarketInfo::new(c.mu, lo, hi, c.beta).expect("grid stays feasible");
            let region = price_region_text(classify_region(&m));
            t.push(vec![lo.into(), hi.into(), Cell::Text(region)]);
        }
    }
    write_table(&t, format.unwrap_or(Format::Csv), out)
}

fn run_queue(c: &QueueCmd, format: Option<Format>, out: &mut dyn Write) -> Result<(), Failure> {
    let market = c.market.market()?;
    let q = QueueMarket::new(market, c.lambda, c.theta, c.hold_cost).map_err(Failure::domain)?;
    let prices = match c.p {
        Some(p) => vec![p],
        None => {
            let top = market.breakpoints().zero_start.min(market.beta());
            let from = c.from.unwrap_or(top / c.steps as f64);
            let to = c.to.unwrap_or(top);
            linspace(from, to, c.steps)?
        }
    };
    let mut t = Table::new(vec!["p", "gamma_star", "revenue", "region_of_tail"]);
    for p in prices {
        let eq = equilibrium(&q, p).map_err(Failure::domain)?;
        let wait = waiting_time(eq.gamma_star, c.theta).map_err(Failure::domain)?;
        let effective = p + c.hold_cost * wait;
        // The equilibrium tail is evaluated at the effective price, which
        // waiting costs can push past the support bound.
        let region = if effective > market.beta() {
            "Zero"
        } else {
            tail_region_text(worst_case_tail(&market, effective).region)
        };
        t.push(vec![
            p.into(),
            eq.gamma_star.into(),
            eq.revenue.into(),
            Cell::Text(region),
        ]);
    }
    write_table(&t, format.unwrap_or(Format::Csv), out)
}

fn run_sweep(c: &SweepCmd, format: Option<Format>, out: &mut dyn Write) -> Result<(), Failure> {
    let table = match c.figure {
        Some(f) => figures::preset(f),
        None => {
            let param = c
                .param
                .ok_or_else(|| Failure::usage("one of --figure or --param is required".into()))?;
            let (from, to, steps) = match (c.from, c.to, c.steps) {
                (Some(f), Some(t), Some(s)) => (f, t, s),
                _ => {
                    return Err(Failure::usage(
                        "--param needs --from, --to, and --steps".into(),
                    ))
                }
            };
            param_sweep(c, param, &linspace(from, to, steps)?)?
        }
    };
    write_table(&table, format.unwrap_or(Format::Csv), out)
}

fn param_sweep(c: &SweepCmd, param: SweepParam, xs: &[f64]) -> Result<Table, Failure> {
    let mu =
        c.mu.ok_or_else(|| Failure::usage("--mu is required for this sweep".into()));
    let beta = c
        .beta
        .ok_or_else(|| Failure::usage("--beta is required for this sweep".into()));
    let reject_flag = |set: bool, name: &str| {
        if set {
            Err(Failure::usage(format!(
                "{name} conflicts with the swept parameter"
            )))
        } else {
            Ok(())
        }
    };
    match param {
        SweepParam::Sigma => {
            let (mu, beta) = (mu?, beta?);
            reject_flag(c.sigma.is_some(), "--sigma")?;
            reject_flag(c.sigma_lo.is_some(), "--sigma-lo")?;
            reject_flag(c.sigma_hi.is_some(), "--sigma-hi")?;
            let mut t = Table::new(vec!["sigma", "price"]);
            for &x in xs {
                let m = MarketInfo::with_precise_sigma(mu, x, beta).map_err(Failure::domain)?;
                t.push(vec![x.into(), optimal_price(&m).price.into()]);
            }
            Ok(t)
        }
        SweepParam::SigmaLo => {
            let (mu, beta) = (mu?, beta?);
            reject_flag(c.sigma.is_some(), "--sigma")?;
            reject_flag(c.sigma_lo.is_some(), "--sigma-lo")?;
            let hi = c
                .sigma_hi
                .unwrap_or_else(|| (mu * (beta - mu)).max(0.0).sqrt());
            let mut t = Table::new(vec!["sigma_lo", "price"]);
            for &x in xs {
                let m = MarketInfo::new(mu, x, hi, beta).map_err(Failure::domain)?;
                t.push(vec![x.into(), optimal_price(&m).price.into()]);
            }
            Ok(t)
        }
        SweepParam::SigmaHi => {
            let (mu, beta) = (mu?, beta?);
            reject_flag(c.sigma.is_some(), "--sigma")?;
            reject_flag(c.sigma_hi.is_some(), "--sigma-hi")?;
            let lo = c.sigma_lo.unwrap_or(0.0);
            let mut t = Table::new(vec!["sigma_hi", "price"]);
            for &x in xs {
                let m = MarketInfo::new(mu, lo, x, beta).map_err(Failure::domain)?;
                t.push(vec![x.into(), optimal_price(&m).price.into()]);
            }
            Ok(t)
        }
        SweepParam::Beta => {
            let mu = mu?;
            reject_flag(c.beta.is_some(), "--beta")?;
            let mut t = Table::new(vec!["beta", "price"]);
            for &x in xs {
                let m = market_from(mu, x, c.sigma, c.sigma_lo, c.sigma_hi)?;
                t.push(vec![x.into(), optimal_price(&m).price.into()]);
            }
            Ok(t)
        }
        SweepParam::Price => {
            let m = market_from(mu?, beta?, c.sigma, c.sigma_lo, c.sigma_hi)?;
            let mut t = Table::new(vec!["price", "revenue"]);
            for &x in xs {
                let r = worst_case_revenue(&m, x).map_err(Failure::domain)?;
                t.push(vec![x.into(), r.into()]);
            }
            Ok(t)
        }
        SweepParam::H => {
            let market = market_from(mu?, beta?, c.sigma, c.sigma_lo, c.sigma_hi)?;
            reject_flag(c.hold_cost.is_some(), "--hold-cost")?;
            let lambda = c
                .lambda
                .ok_or_else(|| Failure::usage("--lambda is required for this sweep".into()))?;
            let theta = c
                .theta
                .ok_or_else(|| Failure::usage("--theta is required for this sweep".into()))?;
            let mut t = Table::new(vec!["h", "price"]);
            for &x in xs {
                let q = QueueMarket::new(market, lambda, theta, x).map_err(Failure::domain)?;
                t.push(vec![x.into(), optimal_queue_price(&q).0.into()]);
            }
            Ok(t)
        }
        SweepParam::Lambda => {
            let market = market_from(mu?, beta?, c.sigma, c.sigma_lo, c.sigma_hi)?;
            reject_flag(c.lambda.is_some(), "--lambda")?;
            let theta = c
                .theta
                .ok_or_else(|| Failure::usage("--theta is required for this sweep".into()))?;
            let hold = c
                .hold_cost
                .ok_or_else(|| Failure::usage("--hold-cost is required for this sweep".into()))?;
            let mut t = Table::new(vec!["lambda", "price"]);
            for &x in xs {
                let q = QueueMarket::new(market, x, theta, hold).map_err(Failure::domain)?;
                t.push(vec![x.into(), optimal_queue_price(&q).0.into()]);
            }
            Ok(t)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut out = sink(cli.out.as_deref())?;
    match &cli.cmd {
        Cmd::Price(c) => run_price(c, cli.format, &mut out),
        Cmd::Tail(c) => run_tail(c, cli.format, &mut out),
        Cmd::Sweep(c) => run_sweep(c, cli.format, &mut out),
        Cmd::Regions(c) => run_regions(c, cli.format, &mut out),
        Cmd::Queue(c) => run_queue(c, cli.format, &mut out),
        Cmd::Bundle(c) => run_bundle(c, cli.format, &mut out),
        Cmd::Verify(c) => verify::run(c.trials, cli.seed, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version land here too; only real parse errors are
            // usage failures.
            let code = if err.use_stderr() { 64 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("{}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
