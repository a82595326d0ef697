//! Closed-form outage probability, sum throughput, ITL apportioning and
//! critical rate.
//!
//! Both networks share one outage routine: network 2 is network 1 with
//! the roles of the two transmitters swapped, so [`OutageParams`] carries
//! the per-network quantities and [`OutageParams::for_network`] fills them
//! in. In terms of those fields, term `j` of the alternating sum uses
//!
//! ```text
//! a_j = 1 + lambda * j * gamma / (mu_own_p * share * rho)
//! b_j = mu_other_p * lambda / (mu_own_p * mu_cross) * j * (1 - share) / share * gamma
//! ```
//!
//! `a_j` collects the noise contribution and `b_j` the cross interference.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::alternating_binomial_sum;
use crate::scenario::{ChannelStatistics, Network, PowerPolicy, RatePolicy, Scenario, MAX_USERS};

/// Below this relative distance from a removable singularity the closed
/// forms switch to their power series.
const SERIES_WINDOW: f64 = 0.05;

/// Allowed excursion outside [0, 1], relative to the magnitude of the
/// alternating sum, before a result counts as a numerical failure.
const CLAMP_SLACK: f64 = 1e-12;

/// Which closed form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormulaTier {
    /// Exact outage including the noise term.
    #[default]
    Exact,
    /// Noise term dropped (ITL much larger than noise).
    HighItl,
    /// High-ITL form with the logarithm replaced by its first-order
    /// rational approximation `ln z ~ 2(z-1)/(z+1)`.
    Rational,
}

impl FromStr for FormulaTier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "highitl" | "high-itl" => Ok(Self::HighItl),
            "rational" => Ok(Self::Rational),
            other => Err(Error::InvalidParameter(format!(
                "unknown tier `{other}` (expected exact, highitl or rational)"
            ))),
        }
    }
}

impl fmt::Display for FormulaTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::HighItl => "highitl",
            Self::Rational => "rational",
        })
    }
}

/// Inputs of the outage probability of one network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageParams {
    /// Candidate receivers the transmitter selects among.
    pub num_users: u32,
    /// Rate of the own main channels.
    pub lambda_main: f64,
    /// Rate of the own transmitter's channel to the primary receiver.
    pub mu_own_p: f64,
    /// Rate of the competing transmitter's channel to the primary receiver.
    pub mu_other_p: f64,
    /// Rate of the competing transmitter's channel into the own receivers.
    /// May be `+inf` to switch cross interference off.
    pub mu_cross: f64,
    /// Own fraction of the ITL, in (0, 1].
    pub share: f64,
    pub gamma_th: f64,
    /// `I_P / sigma_n^2`.
    pub rho: f64,
}

impl OutageParams {
    /// Network 1 uses `(L, lambda11, mu1P, mu2P, mu21, alpha)`; network 2 uses
    /// `(M, lambda22, mu2P, mu1P, mu12, 1 - alpha)`.
    pub fn for_network(
        scenario: &Scenario,
        rate: &RatePolicy,
        power: &PowerPolicy,
        network: Network,
    ) -> Result<Self> {
        let share = power
            .share(network)
            .ok_or(Error::InactiveNetwork(network.index()))?;
        let s = &scenario.stats;
        let (lambda_main, mu_own_p, mu_other_p, mu_cross) = match network {
            Network::One => (s.lambda11, s.mu1p, s.mu2p, s.mu21),
            Network::Two => (s.lambda22, s.mu2p, s.mu1p, s.mu12),
        };
        let params = Self {
            num_users: scenario.effective_users(network),
            lambda_main,
            mu_own_p,
            mu_other_p,
            mu_cross,
            share,
            gamma_th: rate.gamma_th(),
            rho: scenario.rho(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_users == 0 {
            return Err(Error::InvalidParameter("num_users must be at least 1".into()));
        }
        if self.num_users > MAX_USERS {
            return Err(Error::TooManyUsers {
                count: self.num_users,
                max: MAX_USERS,
            });
        }
        let finite_positive = [
            ("lambda_main", self.lambda_main),
            ("mu_own_p", self.mu_own_p),
            ("mu_other_p", self.mu_other_p),
            ("gamma_th", self.gamma_th),
            ("rho", self.rho),
        ];
        for (name, v) in finite_positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        // NaN fails this too; +inf (no cross link) is allowed.
        let cross_ok = self.mu_cross > 0.0;
        if !cross_ok {
            return Err(Error::InvalidParameter(format!(
                "mu_cross must be positive, got {}",
                self.mu_cross
            )));
        }
        if !(self.share > 0.0 && self.share <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "share must lie in (0, 1], got {}",
                self.share
            )));
        }
        Ok(())
    }

    /// Noise term `a_j`.
    pub fn noise_term(&self, j: u32) -> f64 {
        1.0 + self.lambda_main * j as f64 * self.gamma_th / (self.mu_own_p * self.share * self.rho)
    }

    /// Interference term `b_j`; zero when the competitor is silent.
    pub fn interference_term(&self, j: u32) -> f64 {
        self.interference_coefficient() * j as f64 * self.gamma_th
    }

    /// `x = mu_other_p * lambda / (mu_own_p * mu_cross) * (1 - share) / share`,
    /// so that `b_j = x * j * gamma_th`.
    pub fn interference_coefficient(&self) -> f64 {
        if self.share >= 1.0 || self.mu_cross.is_infinite() {
            return 0.0;
        }
        self.mu_other_p * self.lambda_main / (self.mu_own_p * self.mu_cross)
            * ((1.0 - self.share) / self.share)
    }
}

/// Exact outage probability.
///
/// `1 - sum_j C(N,j) (-1)^(j+1) T_j` with
/// `T_j = 1/a - b [ln(a/b) + b/a - 1] / (a - b)^2`.
pub fn outage_exact(p: &OutageParams) -> Result<f64> {
    p.validate()?;
    let (sum, magnitude) = alternating_binomial_sum(p.num_users, |j| {
        exact_term(p.noise_term(j), p.interference_term(j))
    });
    clamp_probability(1.0 - sum, magnitude)
}

/// `T(a, b)`, continuous across `b = a` and down to `b = 0`.
fn exact_term(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        return 1.0 / a;
    }
    // e = 1 - b/a; the bracket equals sum_{k>=2} e^k / k
    let e = (a - b) / a;
    if e.abs() < SERIES_WINDOW {
        let mut series = 0.0;
        let mut power = 1.0;
        for k in 2..40 {
            let term = power / k as f64;
            series += term;
            if term.abs() < 1e-18 * series.abs() {
                break;
            }
            power *= e;
        }
        return (1.0 - (1.0 - e) * series) / a;
    }
    let bracket = (a / b).ln() + b / a - 1.0;
    1.0 / a - b * bracket / ((a - b) * (a - b))
}

/// Outage probability with the noise term dropped.
///
/// `sum_j C(N,j) (-1)^(j+1) h(gamma x j)` with `h(t) = t (t - ln t - 1) / (1 - t)^2`.
pub fn outage_approx_highitl(p: &OutageParams) -> Result<f64> {
    p.validate()?;
    let x = p.interference_coefficient();
    let (sum, magnitude) =
        alternating_binomial_sum(p.num_users, |j| highitl_term(p.gamma_th * x * j as f64));
    clamp_probability(sum, magnitude)
}

fn highitl_term(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    // d = t - 1; t - ln t - 1 = sum_{k>=2} (-1)^k d^k / k
    let d = t - 1.0;
    if d.abs() < SERIES_WINDOW {
        let mut series = 0.0;
        let mut power = 1.0;
        for k in 2..40 {
            let term = power / k as f64;
            series += term;
            if term.abs() < 1e-18 * series.abs() {
                break;
            }
            power *= -d;
        }
        return t * series;
    }
    t * (t - t.ln() - 1.0) / (d * d)
}

/// Outage probability under the rational logarithm approximation:
/// `1 - sum_j C(N,j) (-1)^(j+1) / (gamma x j + 1)`.
pub fn outage_approx_rational(p: &OutageParams) -> Result<f64> {
    p.validate()?;
    let x = p.interference_coefficient();
    let (sum, magnitude) =
        alternating_binomial_sum(p.num_users, |j| 1.0 / (p.gamma_th * x * j as f64 + 1.0));
    clamp_probability(1.0 - sum, magnitude)
}

pub fn outage(p: &OutageParams, tier: FormulaTier) -> Result<f64> {
    match tier {
        FormulaTier::Exact => outage_exact(p),
        FormulaTier::HighItl => outage_approx_highitl(p),
        FormulaTier::Rational => outage_approx_rational(p),
    }
}

fn clamp_probability(value: f64, magnitude: f64) -> Result<f64> {
    let slack = CLAMP_SLACK * magnitude.max(1.0);
    if !value.is_finite() || value < -slack || value > 1.0 + slack {
        return Err(Error::Numerical(format!(
            "outage {value} falls outside [0, 1] beyond rounding slack {slack:e}"
        )));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Outage probability of `network` under the given policies.
pub fn network_outage(
    scenario: &Scenario,
    rate: &RatePolicy,
    power: &PowerPolicy,
    network: Network,
    tier: FormulaTier,
) -> Result<f64> {
    if rate.gamma_th() == 0.0 {
        power
            .share(network)
            .ok_or(Error::InactiveNetwork(network.index()))?;
        return Ok(0.0);
    }
    outage(&OutageParams::for_network(scenario, rate, power, network)?, tier)
}

/// Sum throughput `(1 - p_out1) R + (1 - p_out2) R` in bits per channel use.
/// A silent network contributes nothing.
pub fn sum_throughput(
    scenario: &Scenario,
    rate: &RatePolicy,
    power: &PowerPolicy,
    tier: FormulaTier,
) -> Result<f64> {
    let r = rate.rate_bpcu();
    let mut total = 0.0;
    for network in [Network::One, Network::Two] {
        if power.is_active(network) {
            total += (1.0 - network_outage(scenario, rate, power, network, tier)?) * r;
        }
    }
    Ok(total)
}

/// Throughput-maximizing apportioning for a single user per network (or
/// round-robin service):
/// `1 / (1 + (mu1P/mu2P) sqrt((lambda22/lambda11) (mu21/mu12)))`.
pub fn alpha_star_closed_form(stats: &ChannelStatistics) -> f64 {
    let ratio = (stats.lambda22 / stats.lambda11 * (stats.mu21 / stats.mu12)).sqrt();
    1.0 / (1.0 + stats.mu1p / stats.mu2p * ratio)
}

/// Rate above which concurrent transmission stops paying off, for a single
/// user per network: `log2(1 + sqrt(mu12 mu21 / (lambda11 lambda22)))`.
pub fn critical_rate_closed_form(stats: &ChannelStatistics) -> f64 {
    (1.0 + (stats.mu12 * stats.mu21 / (stats.lambda11 * stats.lambda22)).sqrt()).log2()
}
