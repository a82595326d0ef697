//! Numerical search for the throughput-maximizing apportioning and for the
//! critical rate, for arbitrary user counts.

use crate::analytics::{sum_throughput, FormulaTier};
use crate::error::{Error, Result};
use crate::scenario::{Network, PowerPolicy, RatePolicy, Scenario};

pub const ALPHA_MIN: f64 = 0.005;
pub const ALPHA_MAX: f64 = 0.995;
pub const ALPHA_GRID: usize = 101;
pub const ALPHA_TOL: f64 = 1e-5;

pub const RATE_MIN: f64 = 0.01;
pub const RATE_MAX: f64 = 20.0;
pub const RATE_TOL: f64 = 1e-3;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[lo, hi]` by golden-section search until the bracket is
/// narrower than `tol`. Returns the best point seen and its value.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let well_posed = lo < hi && tol > 0.0;
    if !well_posed {
        return Err(Error::InvalidParameter(format!(
            "golden-section search needs lo < hi and tol > 0, got [{lo}, {hi}], tol {tol}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Outcome of [`alpha_star_numeric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaOptimum {
    pub alpha: f64,
    /// Sum throughput at `alpha` under the search tier.
    pub tau: f64,
    /// Sum throughput at `alpha` re-evaluated with the exact closed form.
    pub tau_exact: f64,
}

/// Throughput-maximizing `alpha` under concurrent transmission: a 101-point
/// grid over [0.005, 0.995], then golden-section refinement around the best
/// grid point.
pub fn alpha_star_numeric(
    scenario: &Scenario,
    rate: &RatePolicy,
    tier: FormulaTier,
) -> Result<AlphaOptimum> {
    let tau = |alpha: f64| sum_throughput(scenario, rate, &PowerPolicy::concurrent(alpha)?, tier);

    let step = (ALPHA_MAX - ALPHA_MIN) / (ALPHA_GRID - 1) as f64;
    let grid: Vec<f64> = (0..ALPHA_GRID).map(|i| ALPHA_MIN + step * i as f64).collect();
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &alpha) in grid.iter().enumerate() {
        let v = tau(alpha)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let lo = grid[best.0.saturating_sub(1)];
    let hi = grid[(best.0 + 1).min(ALPHA_GRID - 1)];
    let (mut alpha, mut value) = golden_section_max(tau, lo, hi, ALPHA_TOL)?;
    if best.1 > value {
        (alpha, value) = (grid[best.0], best.1);
    }

    let tau_exact = match tier {
        FormulaTier::Exact => value,
        _ => sum_throughput(
            scenario,
            rate,
            &PowerPolicy::concurrent(alpha)?,
            FormulaTier::Exact,
        )?,
    };
    Ok(AlphaOptimum {
        alpha,
        tau: value,
        tau_exact,
    })
}

/// The better of the two single-network modes at this rate.
pub fn best_single_network(
    scenario: &Scenario,
    rate: &RatePolicy,
    tier: FormulaTier,
) -> Result<(Network, f64)> {
    let one = sum_throughput(scenario, rate, &PowerPolicy::single(Network::One), tier)?;
    let two = sum_throughput(scenario, rate, &PowerPolicy::single(Network::Two), tier)?;
    Ok(if one >= two {
        (Network::One, one)
    } else {
        (Network::Two, two)
    })
}

/// Optimal concurrent throughput minus the best single-network throughput.
pub fn concurrent_advantage(
    scenario: &Scenario,
    rate: &RatePolicy,
    tier: FormulaTier,
) -> Result<f64> {
    let concurrent = alpha_star_numeric(scenario, rate, tier)?.tau;
    let (_, single) = best_single_network(scenario, rate, tier)?;
    Ok(concurrent - single)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossover {
    /// Concurrent operation wins below the returned rate and loses above it.
    Found,
    /// A single network is at least as good everywhere on the bracket.
    ConcurrentNeverWins,
    /// Concurrent operation still wins at the top of the bracket.
    ConcurrentAlwaysWins,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalRate {
    pub rate_bpcu: f64,
    pub crossover: Crossover,
}

/// Largest rate at which optimally apportioned concurrent transmission still
/// beats the best single network, by bisection on [0.01, 20] to 1e-3.
pub fn critical_rate_numeric(scenario: &Scenario, tier: FormulaTier) -> Result<CriticalRate> {
    let advantage = |r: f64| concurrent_advantage(scenario, &RatePolicy::new(r)?, tier);

    if advantage(RATE_MIN)? <= 0.0 {
        return Ok(CriticalRate {
            rate_bpcu: 0.0,
            crossover: Crossover::ConcurrentNeverWins,
        });
    }
    if advantage(RATE_MAX)? > 0.0 {
        return Ok(CriticalRate {
            rate_bpcu: RATE_MAX,
            crossover: Crossover::ConcurrentAlwaysWins,
        });
    }
    let (mut wins, mut loses) = (RATE_MIN, RATE_MAX);
    while loses - wins > RATE_TOL {
        let mid = 0.5 * (wins + loses);
        if advantage(mid)? > 0.0 {
            wins = mid;
        } else {
            loses = mid;
        }
    }
    Ok(CriticalRate {
        rate_bpcu: wins,
        crossover: Crossover::Found,
    })
}
