//! Command-line front end: `sweep-alpha`, `sweep-rate`, `optimize` and
//! `validate`. Each subcommand is also callable as a library function that
//! returns its table or report.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::analytics::{
    self, alpha_star_closed_form, critical_rate_closed_form, sum_throughput, FormulaTier,
    OutageParams,
};
use crate::error::{Error, Result};
use crate::numeric::alternating_binomial_sum;
use crate::optimizer::{alpha_star_numeric, best_single_network, critical_rate_numeric, Crossover};
use crate::scenario::{Network, PowerMode, PowerPolicy, RatePolicy, ScenarioFile, Selection};
use crate::simulator::simulate;

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;

/// Significant digits written to CSV.
pub const CSV_DIGITS: usize = 9;

#[derive(Debug, Parser)]
#[command(
    name = "underlay",
    version,
    about = "Sum throughput of two co-existing underlay secondary networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sum throughput against the ITL apportioning parameter alpha.
    SweepAlpha(SweepAlphaArgs),
    /// Sum throughput against the fixed rate, for several user counts.
    SweepRate(SweepRateArgs),
    /// Closed-form and numeric apportioning and critical rate.
    Optimize(OptimizeArgs),
    /// Cross-check the closed forms against simulation and each other.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario file (`key = value` lines).
    #[arg(long, value_name = "PATH")]
    pub scenario: PathBuf,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Monte Carlo trials per point [default: scenario file, else 100000].
    #[arg(long)]
    pub trials: Option<u64>,
    /// Monte Carlo seed [default: scenario file, else 0].
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SweepAlphaArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Fixed rate in bits per channel use [default: scenario file].
    #[arg(long)]
    pub rate: Option<f64>,
    /// Number of alpha points on [0, 1], endpoints included.
    #[arg(long, default_value_t = 21)]
    pub grid: usize,
    #[command(flatten)]
    pub mc: McArgs,
    /// Output CSV [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepRateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Rate range `MIN:MAX` in bits per channel use.
    #[arg(long, default_value = "0.25:8")]
    pub rate_range: String,
    /// Number of rate points, endpoints included.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    /// Comma-separated user counts, applied to both networks (L = M).
    #[arg(long, default_value = "1,3,5,7,10")]
    pub users: String,
    /// Closed form used for the analytic columns.
    #[arg(long, default_value = "exact")]
    pub tier: FormulaTier,
    #[command(flatten)]
    pub mc: McArgs,
    /// Output CSV [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Fixed rate in bits per channel use [default: scenario file].
    #[arg(long)]
    pub rate: Option<f64>,
    /// Closed form used by the numeric searches.
    #[arg(long, default_value = "rational")]
    pub tier: FormulaTier,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub mc: McArgs,
}

/// A numeric table destined for CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_significant(v, CSV_DIGITS)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        out.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

/// `printf("%.{digits}g")`: `digits` significant digits, trailing zeros
/// dropped, exponent form outside [1e-5, 10^digits).
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn resolve_rate(file: &ScenarioFile, rate: Option<f64>) -> Result<RatePolicy> {
    match (rate, file.rate) {
        (Some(r), _) => RatePolicy::new(r),
        (None, Some(r)) => Ok(r),
        (None, None) => Err(Error::Usage(
            "no rate given: pass --rate or set rate_bpcu in the scenario".into(),
        )),
    }
}

fn resolve_mc(file: &ScenarioFile, mc: &McArgs) -> (u64, u64) {
    (
        mc.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
        mc.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
    )
}

/// `alpha = 0` and `alpha = 1` are the single-network modes of S2 and S1.
pub fn power_at(alpha: f64) -> Result<PowerPolicy> {
    if alpha <= 0.0 {
        Ok(PowerPolicy::single(Network::Two))
    } else if alpha >= 1.0 {
        Ok(PowerPolicy::single(Network::One))
    } else {
        PowerPolicy::concurrent(alpha)
    }
}

/// Sum throughput over an evenly spaced alpha grid on [0, 1]; the endpoints
/// are the single-network modes.
pub fn sweep_alpha(
    file: &ScenarioFile,
    rate: &RatePolicy,
    grid: usize,
    trials: u64,
    seed: u64,
) -> Result<SweepResult> {
    if grid < 2 {
        return Err(Error::Usage("--grid must be at least 2".into()));
    }
    let scenario = &file.scenario;
    let mut rows = Vec::with_capacity(grid);
    for i in 0..grid {
        let alpha = i as f64 / (grid - 1) as f64;
        let power = power_at(alpha)?;
        let exact = sum_throughput(scenario, rate, &power, FormulaTier::Exact)?;
        let rational = sum_throughput(scenario, rate, &power, FormulaTier::Rational)?;
        let mc = simulate(scenario, rate, &power, trials, seed)?.sum_throughput();
        rows.push(vec![alpha, exact, rational, mc.mean, mc.std_error]);
    }
    Ok(SweepResult {
        header: ["alpha", "tau_exact", "tau_rational", "tau_mc", "tau_mc_se"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

/// Parses `"1,3,5"`.
pub fn parse_users(list: &str) -> Result<Vec<u32>> {
    let users: Vec<u32> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u32>()
                .map_err(|_| Error::Usage(format!("bad user count `{s}`")))
        })
        .collect::<Result<_>>()?;
    if users.is_empty() {
        return Err(Error::Usage("--users needs at least one user count".into()));
    }
    Ok(users)
}

/// Parses `"MIN:MAX"` and spreads `grid` points over it.
pub fn parse_rate_range(range: &str, grid: usize) -> Result<Vec<f64>> {
    let bad = || Error::Usage(format!("--rate-range must look like MIN:MAX, got `{range}`"));
    let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Usage(format!("rate range needs 0 < MIN < MAX, got {lo}:{hi}")));
    }
    if grid < 2 {
        return Err(Error::Usage("--grid must be at least 2".into()));
    }
    Ok((0..grid)
        .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
        .collect())
}

/// Sum throughput against rate with `L = M = n` for each `n` in `users`,
/// using the scenario's power policy.
pub fn sweep_rate(
    file: &ScenarioFile,
    rates: &[f64],
    users: &[u32],
    tier: FormulaTier,
    trials: u64,
    seed: u64,
) -> Result<SweepResult> {
    if users.is_empty() {
        return Err(Error::Usage("--users needs at least one user count".into()));
    }
    let scenarios = users
        .iter()
        .map(|&n| file.scenario.with_users(n, n))
        .collect::<Result<Vec<_>>>()?;
    let mut header = vec!["rate".to_string()];
    for n in users {
        header.push(format!("tau_{tier}_u{n}"));
        header.push(format!("tau_mc_u{n}"));
        header.push(format!("tau_mc_se_u{n}"));
    }
    let mut rows = Vec::with_capacity(rates.len());
    for &r in rates {
        let rate = RatePolicy::new(r)?;
        let mut row = vec![r];
        for scenario in &scenarios {
            row.push(sum_throughput(scenario, &rate, &file.power, tier)?);
            let mc = simulate(scenario, &rate, &file.power, trials, seed)?.sum_throughput();
            row.push(mc.mean);
            row.push(mc.std_error);
        }
        rows.push(row);
    }
    Ok(SweepResult { header, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeReport {
    pub rate_bpcu: f64,
    pub tier: FormulaTier,
    /// Whether the closed forms apply (one user per network or round-robin).
    pub closed_form_valid: bool,
    pub alpha_closed: f64,
    pub critical_rate_closed: f64,
    pub alpha_numeric: f64,
    pub tau_concurrent: f64,
    pub tau_concurrent_exact: f64,
    pub critical_rate_numeric: f64,
    pub crossover: Crossover,
    pub best_single: Network,
    pub tau_single: f64,
    pub recommendation: PowerMode,
}

pub fn optimize(file: &ScenarioFile, rate: &RatePolicy, tier: FormulaTier) -> Result<OptimizeReport> {
    let s = &file.scenario;
    let closed_form_valid = s.selection == Selection::RoundRobin || (s.l == 1 && s.m == 1);
    let opt = alpha_star_numeric(s, rate, tier)?;
    let (best_single, tau_single) = best_single_network(s, rate, tier)?;
    let rc = critical_rate_numeric(s, tier)?;
    let recommendation = if opt.tau > tau_single {
        PowerMode::Concurrent
    } else {
        match best_single {
            Network::One => PowerMode::SingleNetwork1,
            Network::Two => PowerMode::SingleNetwork2,
        }
    };
    Ok(OptimizeReport {
        rate_bpcu: rate.rate_bpcu(),
        tier,
        closed_form_valid,
        alpha_closed: alpha_star_closed_form(&s.stats),
        critical_rate_closed: critical_rate_closed_form(&s.stats),
        alpha_numeric: opt.alpha,
        tau_concurrent: opt.tau,
        tau_concurrent_exact: opt.tau_exact,
        critical_rate_numeric: rc.rate_bpcu,
        crossover: rc.crossover,
        best_single,
        tau_single,
        recommendation,
    })
}

impl fmt::Display for OptimizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut line = |label: String, value: String| writeln!(f, "{label:<28}{value}");
        line("rate".into(), format!("{:.4} bpcu", self.rate_bpcu))?;
        if self.closed_form_valid {
            line("closed-form alpha*".into(), format!("{:.4}", self.alpha_closed))?;
            line("closed-form R_c".into(), format!("{:.4} bpcu", self.critical_rate_closed))?;
        } else {
            line(
                "closed-form alpha*, R_c".into(),
                format!(
                    "n/a (need L = M = 1 or round-robin; single-user values {:.4}, {:.4} bpcu)",
                    self.alpha_closed, self.critical_rate_closed
                ),
            )?;
        }
        let tier = self.tier;
        line(format!("numeric alpha* ({tier})"), format!("{:.4}", self.alpha_numeric))?;
        line(
            "concurrent tau at alpha*".into(),
            format!(
                "{:.4} bpcu ({tier}), {:.4} bpcu (exact)",
                self.tau_concurrent, self.tau_concurrent_exact
            ),
        )?;
        line(
            "best single network".into(),
            format!("S{} with tau {:.4} bpcu", self.best_single.index(), self.tau_single),
        )?;
        let rc = match self.crossover {
            Crossover::Found => format!("{:.4} bpcu", self.critical_rate_numeric),
            Crossover::ConcurrentNeverWins => "none: a single network always wins".into(),
            Crossover::ConcurrentAlwaysWins => format!(
                "above {:.1} bpcu: concurrent wins on the whole search range",
                self.critical_rate_numeric
            ),
        };
        line(format!("numeric R_c ({tier})"), rc)?;
        let advice = match self.recommendation {
            PowerMode::Concurrent => format!("concurrent, alpha = {:.4}", self.alpha_numeric),
            PowerMode::SingleNetwork1 => "single-network mode (S1 only)".into(),
            PowerMode::SingleNetwork2 => "single-network mode (S2 only)".into(),
        };
        write!(f, "{:<28}{advice}", "recommendation")
    }
}

/// One named validation outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        write!(f, "{}", if self.passed() { "all checks passed" } else { "validation FAILED" })
    }
}

pub const AGREEMENT_ALPHAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
pub const AGREEMENT_RATES: [f64; 5] = [0.5, 1.375, 2.25, 3.125, 4.0];

/// Cells of the agreement grid in which simulation and exact outage agree
/// within three standard errors, per network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgreementTally {
    pub cells: usize,
    pub agree: [usize; 2],
}

/// Compares simulated and exact outage on the 5x5 (alpha, rate) grid. The
/// standard error is the larger of the estimate's own and the one implied by
/// the exact value, so cells with no observed outage are still judged.
pub fn agreement_grid(file: &ScenarioFile, trials: u64, seed: u64) -> Result<AgreementTally> {
    let s = &file.scenario;
    let mut tally = AgreementTally {
        cells: 0,
        agree: [0, 0],
    };
    for (i, &alpha) in AGREEMENT_ALPHAS.iter().enumerate() {
        for (j, &r) in AGREEMENT_RATES.iter().enumerate() {
            let rate = RatePolicy::new(r)?;
            let power = PowerPolicy::concurrent(alpha)?;
            let cell_seed = seed.wrapping_add((i * AGREEMENT_RATES.len() + j) as u64);
            let sim = simulate(s, &rate, &power, trials, cell_seed)?;
            tally.cells += 1;
            for (k, network) in [Network::One, Network::Two].into_iter().enumerate() {
                let exact =
                    analytics::network_outage(s, &rate, &power, network, FormulaTier::Exact)?;
                let est = sim.outage(network)?;
                let null_se = (exact * (1.0 - exact) / trials as f64).sqrt();
                if (est.mean - exact).abs() < 3.0 * est.std_error.max(null_se) {
                    tally.agree[k] += 1;
                }
            }
        }
    }
    Ok(tally)
}

/// Analytic-vs-simulation agreement plus the closed-form self-consistency
/// checks, on the network-1 parameters of `file` at its rate and alpha.
pub fn validate(file: &ScenarioFile, trials: u64, seed: u64) -> Result<ValidationReport> {
    let mut checks = Vec::new();

    let tally = agreement_grid(file, trials, seed)?;
    for (k, agree) in tally.agree.iter().enumerate() {
        checks.push(Check {
            name: format!("outage agreement, network {}", k + 1),
            passed: *agree + 1 >= tally.cells,
            detail: format!("{agree}/{} cells within 3 SE at {trials} trials", tally.cells),
        });
    }

    let rate = file.rate.unwrap_or(RatePolicy::new(1.0)?);
    let alpha = match file.power.mode() {
        PowerMode::Concurrent => file.power.alpha(),
        _ => 0.5,
    };
    let base = OutageParams::for_network(
        &file.scenario,
        &rate,
        &PowerPolicy::concurrent(alpha)?,
        Network::One,
    )?;

    // Removable singularity at b = a: the one-sided differences must cancel.
    let a = base.noise_term(1);
    let at_b = |b: f64| {
        let x = base.interference_coefficient() * base.gamma_th;
        let p = OutageParams {
            mu_cross: base.mu_cross * x / b,
            ..base
        };
        analytics::outage_exact(&p)
    };
    let (below, at, above) = (at_b(a * (1.0 - 1e-6))?, at_b(a)?, at_b(a * (1.0 + 1e-6))?);
    let curvature = (above + below - 2.0 * at).abs();
    checks.push(Check {
        name: "singularity continuity".into(),
        passed: curvature < 1e-10,
        detail: format!("second difference {curvature:.2e} across b = a(1 +/- 1e-6)"),
    });

    // Zero cross interference: exact outage reduces to the noise-only sum.
    let silent = OutageParams {
        mu_cross: f64::INFINITY,
        ..base
    };
    let reduced = analytics::outage_exact(&silent)?;
    let (sum, _) = alternating_binomial_sum(silent.num_users, |j| 1.0 / silent.noise_term(j));
    checks.push(Check {
        name: "zero-interference reduction".into(),
        passed: reduced == (1.0 - sum).clamp(0.0, 1.0),
        detail: format!("{reduced:.12} vs {:.12}", 1.0 - sum),
    });

    // Tier convergence as the ITL grows.
    let gaps = [1e2, 1e3, 1e4]
        .iter()
        .map(|&rho| {
            let p = OutageParams { rho, ..base };
            Ok((analytics::outage_exact(&p)? - analytics::outage_approx_highitl(&p)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    checks.push(Check {
        name: "high-ITL convergence".into(),
        passed: gaps[0] > gaps[1] && gaps[1] > gaps[2],
        detail: format!(
            "|exact - highitl| = {:.2e}, {:.2e}, {:.2e} at rho = 1e2, 1e3, 1e4",
            gaps[0], gaps[1], gaps[2]
        ),
    });

    Ok(ValidationReport { checks })
}

fn write_table(table: &SweepResult, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => {
            let io_err = |source| Error::Io {
                path: path.to_path_buf(),
                source,
            };
            let file = File::create(path).map_err(io_err)?;
            table.write_csv(BufWriter::new(file)).map_err(io_err)
        }
        None => table.write_csv(stdout).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

/// Runs a parsed command. `Ok(false)` means validation ran but failed.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<bool> {
    let print = |stdout: &mut dyn Write, text: String| {
        writeln!(stdout, "{text}").map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
    };
    match cli.command {
        Command::SweepAlpha(args) => {
            let file = ScenarioFile::load(&args.scenario.scenario)?;
            let rate = resolve_rate(&file, args.rate)?;
            let (trials, seed) = resolve_mc(&file, &args.mc);
            let table = sweep_alpha(&file, &rate, args.grid, trials, seed)?;
            write_table(&table, args.out.as_deref(), stdout)?;
        }
        Command::SweepRate(args) => {
            let file = ScenarioFile::load(&args.scenario.scenario)?;
            let users = parse_users(&args.users)?;
            let rates = parse_rate_range(&args.rate_range, args.grid)?;
            let (trials, seed) = resolve_mc(&file, &args.mc);
            let table = sweep_rate(&file, &rates, &users, args.tier, trials, seed)?;
            write_table(&table, args.out.as_deref(), stdout)?;
        }
        Command::Optimize(args) => {
            let file = ScenarioFile::load(&args.scenario.scenario)?;
            let rate = resolve_rate(&file, args.rate)?;
            print(stdout, optimize(&file, &rate, args.tier)?.to_string())?;
        }
        Command::Validate(args) => {
            let file = ScenarioFile::load(&args.scenario.scenario)?;
            let (trials, seed) = resolve_mc(&file, &args.mc);
            let report = validate(&file, trials, seed)?;
            print(stdout, report.to_string())?;
            return Ok(report.passed());
        }
    }
    Ok(true)
}

/// Entry point of the `underlay` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    match run(cli, &mut stdout) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        // Reader went away (`| head`); nothing left to report to.
        Err(Error::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
