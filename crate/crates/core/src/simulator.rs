//! Monte Carlo link-level simulation of the two-network downlink.
//!
//! Each trial is one quasi-static fading block. Channel power gains are drawn
//! independently from their exponential laws, transmit powers follow the
//! peak-interference rule `P_Si = share_i * I_P / |g_iP|^2`, and the SINR at
//! each served receiver is compared with `2^R - 1`.
//!
//! Randomness is counter based: the uniforms of trial `t` come from ChaCha8
//! stream `t` under the run seed, and every channel reads from a fixed slot
//! of that stream. Results are therefore independent of how trials are
//! batched or scheduled across threads, and runs that differ only in user
//! counts see the same gains on the channels they share.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scenario::{ChannelStatistics, Network, PowerPolicy, RatePolicy, Scenario, Selection, MAX_USERS};

/// Smallest accepted trial count for an estimate.
pub const MIN_TRIALS: u64 = 1_000;

const BATCH: u64 = 4_096;

const SLOT_G1P: u64 = 0;
const SLOT_G2P: u64 = 1;
const SLOT_G2_STAR: u64 = 2;
const SLOT_G1_STAR: u64 = 3;
const SLOT_H1: u64 = 4;
const SLOT_H2: u64 = SLOT_H1 + MAX_USERS as u64;

/// Reproducible uniform source addressed by (seed, trial, channel slot).
#[derive(Debug, Clone)]
pub struct ChannelRng {
    inner: ChaCha8Rng,
}

impl ChannelRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Positions the generator at the start of `trial`'s stream.
    pub fn select_trial(&mut self, trial: u64) {
        self.inner.set_stream(trial);
        self.inner.set_word_pos(0);
    }

    fn seek(&mut self, slot: u64) {
        // one u64 per slot, two 32-bit words each
        self.inner.set_word_pos(2 * slot as u128);
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Inverse-CDF sample of an exponential with the given rate.
pub fn exponential_from_uniform(u: f64, rate: f64) -> f64 {
    -u.ln() / rate
}

/// Channel power gains of one fading block.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialDraw {
    /// `|h_1i|^2`, one per network-1 receiver.
    pub h1: Vec<f64>,
    /// `|h_2i|^2`, one per network-2 receiver.
    pub h2: Vec<f64>,
    pub g1p: f64,
    pub g2p: f64,
    /// Cross gain from S2 into the served network-1 receiver.
    pub g2_star: f64,
    /// Cross gain from S1 into the served network-2 receiver.
    pub g1_star: f64,
}

impl TrialDraw {
    /// Gain of the receiver served in `network`.
    pub fn served_gain(&self, network: Network, selection: Selection) -> f64 {
        let gains = match network {
            Network::One => &self.h1,
            Network::Two => &self.h2,
        };
        match selection {
            Selection::BestUser => gains.iter().copied().fold(0.0, f64::max),
            Selection::RoundRobin => gains[0],
        }
    }
}

/// Draws the gains of the trial `rng` is positioned at.
pub fn draw_trial(stats: &ChannelStatistics, l: u32, m: u32, rng: &mut ChannelRng) -> TrialDraw {
    let mut draw = TrialDraw::default();
    draw_trial_into(stats, l, m, rng, &mut draw);
    draw
}

/// As [`draw_trial`], reusing the buffers of `draw`.
pub fn draw_trial_into(
    stats: &ChannelStatistics,
    l: u32,
    m: u32,
    rng: &mut ChannelRng,
    draw: &mut TrialDraw,
) {
    rng.seek(SLOT_G1P);
    draw.g1p = exponential_from_uniform(rng.uniform(), stats.mu1p);
    debug_assert_eq!(SLOT_G2P, SLOT_G1P + 1);
    draw.g2p = exponential_from_uniform(rng.uniform(), stats.mu2p);
    debug_assert_eq!(SLOT_G2_STAR, SLOT_G2P + 1);
    draw.g2_star = exponential_from_uniform(rng.uniform(), stats.mu21);
    debug_assert_eq!(SLOT_G1_STAR, SLOT_G2_STAR + 1);
    draw.g1_star = exponential_from_uniform(rng.uniform(), stats.mu12);

    rng.seek(SLOT_H1);
    draw.h1.clear();
    draw.h1
        .extend((0..l).map(|_| exponential_from_uniform(rng.uniform(), stats.lambda11)));
    rng.seek(SLOT_H2);
    draw.h2.clear();
    draw.h2
        .extend((0..m).map(|_| exponential_from_uniform(rng.uniform(), stats.lambda22)));
}

/// SINR of the served receiver in `network`, or `None` if that network is
/// silent under `power`. Noise power is 1, so `rho = I_P`.
pub fn sinr(
    draw: &TrialDraw,
    power: &PowerPolicy,
    rho: f64,
    selection: Selection,
    network: Network,
) -> Option<f64> {
    let share = power.share(network)?;
    let other_share = power.share(network.other()).unwrap_or(0.0);
    let (own_p, other_p, cross) = match network {
        Network::One => (draw.g1p, draw.g2p, draw.g2_star),
        Network::Two => (draw.g2p, draw.g1p, draw.g1_star),
    };
    let signal = share * rho * draw.served_gain(network, selection) / own_p;
    let interference = if other_share > 0.0 {
        other_share * rho * cross / other_p
    } else {
        0.0
    };
    Some(signal / (interference + 1.0))
}

/// Both SINRs under concurrent transmission with apportioning `alpha`.
pub fn sinr_pair(draw: &TrialDraw, alpha: f64, rho: f64, selection: Selection) -> (f64, f64) {
    let s1 = alpha * rho * draw.served_gain(Network::One, selection) / draw.g1p;
    let s2 = (1.0 - alpha) * rho * draw.served_gain(Network::Two, selection) / draw.g2p;
    let i1 = (1.0 - alpha) * rho * draw.g2_star / draw.g2p;
    let i2 = alpha * rho * draw.g1_star / draw.g1p;
    (s1 / (i1 + 1.0), s2 / (i2 + 1.0))
}

/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Outage tallies of one simulation run. Merging is associative, so any
/// partition of the trials yields the same totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutageCounts {
    pub trials: u64,
    pub outage1: u64,
    pub outage2: u64,
    pub both: u64,
}

impl OutageCounts {
    pub fn merge(self, other: Self) -> Self {
        Self {
            trials: self.trials + other.trials,
            outage1: self.outage1 + other.outage1,
            outage2: self.outage2 + other.outage2,
            both: self.both + other.both,
        }
    }
}

/// Result of [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simulation {
    pub counts: OutageCounts,
    pub seed: u64,
    rate_bpcu: f64,
    power: PowerPolicy,
}

impl Simulation {
    fn fraction(&self, count: u64) -> f64 {
        count as f64 / self.counts.trials as f64
    }

    pub fn outage(&self, network: Network) -> Result<MonteCarloEstimate> {
        if !self.power.is_active(network) {
            return Err(Error::InactiveNetwork(network.index()));
        }
        let count = match network {
            Network::One => self.counts.outage1,
            Network::Two => self.counts.outage2,
        };
        let p = self.fraction(count);
        Ok(MonteCarloEstimate {
            mean: p,
            std_error: (p * (1.0 - p) / self.counts.trials as f64).sqrt(),
            trials: self.counts.trials,
            seed: self.seed,
        })
    }

    /// Sum throughput; the standard error accounts for the correlation of the
    /// two outage events within a trial.
    pub fn sum_throughput(&self) -> MonteCarloEstimate {
        let r = self.rate_bpcu;
        let p1 = self.fraction(self.counts.outage1);
        let p2 = self.fraction(self.counts.outage2);
        let (mean, var) = match (self.power.is_active(Network::One), self.power.is_active(Network::Two)) {
            (true, true) => {
                let cov = self.fraction(self.counts.both) - p1 * p2;
                (
                    r * (2.0 - p1 - p2),
                    r * r * (p1 * (1.0 - p1) + p2 * (1.0 - p2) + 2.0 * cov),
                )
            }
            (true, false) => (r * (1.0 - p1), r * r * p1 * (1.0 - p1)),
            (false, true) => (r * (1.0 - p2), r * r * p2 * (1.0 - p2)),
            (false, false) => (0.0, 0.0),
        };
        MonteCarloEstimate {
            mean,
            std_error: (var.max(0.0) / self.counts.trials as f64).sqrt(),
            trials: self.counts.trials,
            seed: self.seed,
        }
    }
}

/// Runs `trials` fading blocks and tallies the outage events of both networks.
pub fn simulate(
    scenario: &Scenario,
    rate: &RatePolicy,
    power: &PowerPolicy,
    trials: u64,
    seed: u64,
) -> Result<Simulation> {
    if trials < MIN_TRIALS {
        return Err(Error::TooFewTrials {
            got: trials,
            min: MIN_TRIALS,
        });
    }
    scenario.validate()?;
    let rho = scenario.rho();
    let gamma = rate.gamma_th();
    let batches = trials.div_ceil(BATCH);

    let counts = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChannelRng::new(seed);
            let mut draw = TrialDraw::default();
            let mut counts = OutageCounts::default();
            let end = ((batch + 1) * BATCH).min(trials);
            for trial in batch * BATCH..end {
                rng.select_trial(trial);
                draw_trial_into(&scenario.stats, scenario.l, scenario.m, &mut rng, &mut draw);
                let out = |network| {
                    sinr(&draw, power, rho, scenario.selection, network).is_some_and(|s| s < gamma)
                };
                let (o1, o2) = (out(Network::One), out(Network::Two));
                counts.trials += 1;
                counts.outage1 += o1 as u64;
                counts.outage2 += o2 as u64;
                counts.both += (o1 && o2) as u64;
            }
            counts
        })
        .reduce(OutageCounts::default, OutageCounts::merge);

    Ok(Simulation {
        counts,
        seed,
        rate_bpcu: rate.rate_bpcu(),
        power: *power,
    })
}

/// Fraction of trials in which `network`'s served receiver is in outage.
pub fn estimate_outage(
    scenario: &Scenario,
    rate: &RatePolicy,
    power: &PowerPolicy,
    network: Network,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if !power.is_active(network) {
        return Err(Error::InactiveNetwork(network.index()));
    }
    simulate(scenario, rate, power, trials, seed)?.outage(network)
}

pub fn estimate_sum_throughput(
    scenario: &Scenario,
    rate: &RatePolicy,
    power: &PowerPolicy,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    Ok(simulate(scenario, rate, power, trials, seed)?.sum_throughput())
}
