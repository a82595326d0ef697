//! Physical configuration of the two secondary networks and the primary
//! receiver, and its reduction to exponential channel-gain statistics.
//!
//! Every channel power gain is exponential, parameterized by its *rate*
//! (the reciprocal of its mean). Geometry maps to rates through the
//! path-loss law `mean gain = distance^-phi`, i.e. `rate = distance^phi`.

mod file;

pub use file::ScenarioFile;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest user count accepted per network.
pub const MAX_USERS: u32 = 25;

/// Normalized distances and path-loss exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// S1 to its own receivers.
    pub d11: f64,
    /// S2 to its own receivers.
    pub d22: f64,
    /// S1 to the receivers of network 2.
    pub r12: f64,
    /// S2 to the receivers of network 1.
    pub r21: f64,
    /// S1 to the primary receiver.
    pub r1p: f64,
    /// S2 to the primary receiver.
    pub r2p: f64,
    pub phi: f64,
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("d11", self.d11),
            ("d22", self.d22),
            ("r12", self.r12),
            ("r21", self.r21),
            ("r1P", self.r1p),
            ("r2P", self.r2p),
        ];
        for (name, d) in named {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidGeometry(format!(
                    "{name} must be a positive finite distance, got {d}"
                )));
            }
        }
        if !(self.phi > 0.0 && self.phi.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "path-loss exponent must be positive, got {}",
                self.phi
            )));
        }
        Ok(())
    }

    pub fn channel_stats(&self) -> Result<ChannelStatistics> {
        channel_stats_from_geometry(self)
    }
}

/// Rates of the six exponential channel-gain distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStatistics {
    /// Main channels S1 -> R1i.
    pub lambda11: f64,
    /// Main channels S2 -> R2i.
    pub lambda22: f64,
    /// Cross channels S1 -> R2i.
    pub mu12: f64,
    /// Cross channels S2 -> R1i.
    pub mu21: f64,
    /// S1 -> primary receiver.
    pub mu1p: f64,
    /// S2 -> primary receiver.
    pub mu2p: f64,
}

impl ChannelStatistics {
    pub fn new(
        lambda11: f64,
        lambda22: f64,
        mu12: f64,
        mu21: f64,
        mu1p: f64,
        mu2p: f64,
    ) -> Result<Self> {
        let stats = Self {
            lambda11,
            lambda22,
            mu12,
            mu21,
            mu1p,
            mu2p,
        };
        stats.validate()?;
        Ok(stats)
    }

    /// Identical statistics on every link.
    pub fn uniform(rate: f64) -> Result<Self> {
        Self::new(rate, rate, rate, rate, rate, rate)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, rate) in self.named() {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "channel rate {name} must be positive and finite, got {rate}"
                )));
            }
        }
        Ok(())
    }

    /// All six rates multiplied by a common factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.lambda11 * factor,
            self.lambda22 * factor,
            self.mu12 * factor,
            self.mu21 * factor,
            self.mu1p * factor,
            self.mu2p * factor,
        )
    }

    pub(crate) fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("lambda11", self.lambda11),
            ("lambda22", self.lambda22),
            ("mu12", self.mu12),
            ("mu21", self.mu21),
            ("mu1P", self.mu1p),
            ("mu2P", self.mu2p),
        ]
    }
}

/// Maps geometry to channel rates with unit proportionality constant:
/// each rate equals `distance^phi`.
pub fn channel_stats_from_geometry(geom: &Geometry) -> Result<ChannelStatistics> {
    geom.validate()?;
    let rate = |d: f64| d.powf(geom.phi);
    ChannelStatistics::new(
        rate(geom.d11),
        rate(geom.d22),
        rate(geom.r12),
        rate(geom.r21),
        rate(geom.r1p),
        rate(geom.r2p),
    )
}

/// SINR threshold `2^R - 1` for a fixed rate `R` in bits per channel use.
pub fn gamma_threshold(rate_bpcu: f64) -> Result<f64> {
    if !(rate_bpcu > 0.0 && rate_bpcu.is_finite()) {
        return Err(Error::InvalidRate(format!(
            "rate must be positive and finite, got {rate_bpcu}"
        )));
    }
    Ok(rate_bpcu.exp2() - 1.0)
}

/// ITL-to-noise ratio from decibels.
pub fn ip_linear(ip_db: f64) -> f64 {
    10f64.powf(ip_db / 10.0)
}

/// Which of the two secondary networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Network {
    One,
    Two,
}

impl Network {
    pub fn other(self) -> Self {
        match self {
            Network::One => Network::Two,
            Network::Two => Network::One,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Network::One => 1,
            Network::Two => 2,
        }
    }
}

/// How a transmitter picks the receiver it serves in each block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// Serve the receiver with the strongest own-channel gain.
    #[default]
    BestUser,
    /// Serve receivers in a fixed rotation, blind to channel state.
    RoundRobin,
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best-user" | "best" => Ok(Selection::BestUser),
            "round-robin" | "rr" => Ok(Selection::RoundRobin),
            other => Err(Error::InvalidParameter(format!(
                "unknown selection `{other}` (expected best-user or round-robin)"
            ))),
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selection::BestUser => "best-user",
            Selection::RoundRobin => "round-robin",
        })
    }
}

/// A complete statistical description of the two networks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub stats: ChannelStatistics,
    /// Receivers in network 1.
    pub l: u32,
    /// Receivers in network 2.
    pub m: u32,
    /// ITL in dB relative to the noise power.
    pub ip_db: f64,
    pub selection: Selection,
}

impl Scenario {
    /// Noise variance at every receiver; the ITL is expressed relative to it.
    pub const NOISE_POWER: f64 = 1.0;

    pub fn new(stats: ChannelStatistics, l: u32, m: u32, ip_db: f64) -> Result<Self> {
        let scenario = Self {
            stats,
            l,
            m,
            ip_db,
            selection: Selection::BestUser,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn with_selection(mut self, selection: Selection) -> Self {
        self.selection = selection;
        self
    }

    pub fn with_users(mut self, l: u32, m: u32) -> Result<Self> {
        self.l = l;
        self.m = m;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.stats.validate()?;
        for count in [self.l, self.m] {
            if count == 0 {
                return Err(Error::InvalidParameter(
                    "each network needs at least one user".into(),
                ));
            }
            if count > MAX_USERS {
                return Err(Error::TooManyUsers {
                    count,
                    max: MAX_USERS,
                });
            }
        }
        if !self.ip_db.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ITL must be finite, got {} dB",
                self.ip_db
            )));
        }
        Ok(())
    }

    /// `I_P / sigma_n^2`.
    pub fn rho(&self) -> f64 {
        ip_linear(self.ip_db) / Self::NOISE_POWER
    }

    pub fn users(&self, network: Network) -> u32 {
        match network {
            Network::One => self.l,
            Network::Two => self.m,
        }
    }

    /// Number of candidates the scheduler actually chooses among; round-robin
    /// service sees a single exponential channel regardless of cluster size.
    pub fn effective_users(&self, network: Network) -> u32 {
        match self.selection {
            Selection::BestUser => self.users(network),
            Selection::RoundRobin => 1,
        }
    }
}

/// Fixed transmission rate and the matching SINR threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePolicy {
    rate_bpcu: f64,
    gamma_th: f64,
}

impl RatePolicy {
    /// A zero rate is allowed and gives a zero threshold (nothing is ever in outage).
    pub fn new(rate_bpcu: f64) -> Result<Self> {
        if rate_bpcu == 0.0 {
            return Ok(Self {
                rate_bpcu,
                gamma_th: 0.0,
            });
        }
        Ok(Self {
            rate_bpcu,
            gamma_th: gamma_threshold(rate_bpcu)?,
        })
    }

    pub fn rate_bpcu(&self) -> f64 {
        self.rate_bpcu
    }

    pub fn gamma_th(&self) -> f64 {
        self.gamma_th
    }
}

/// Who transmits, and how the ITL is split between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerMode {
    #[default]
    Concurrent,
    /// Only S1 transmits, using the whole ITL.
    SingleNetwork1,
    /// Only S2 transmits, using the whole ITL.
    SingleNetwork2,
}

impl FromStr for PowerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concurrent" => Ok(PowerMode::Concurrent),
            "single-1" | "single-network-1" => Ok(PowerMode::SingleNetwork1),
            "single-2" | "single-network-2" => Ok(PowerMode::SingleNetwork2),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode `{other}` (expected concurrent, single-1 or single-2)"
            ))),
        }
    }
}

impl fmt::Display for PowerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PowerMode::Concurrent => "concurrent",
            PowerMode::SingleNetwork1 => "single-1",
            PowerMode::SingleNetwork2 => "single-2",
        })
    }
}

/// ITL apportioning: S1 may cause interference `alpha * I_P` at the primary
/// receiver and S2 `(1 - alpha) * I_P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPolicy {
    alpha: f64,
    mode: PowerMode,
}

impl PowerPolicy {
    pub fn concurrent(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "concurrent apportioning needs 0 < alpha < 1, got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            mode: PowerMode::Concurrent,
        })
    }

    pub fn single(network: Network) -> Self {
        match network {
            Network::One => Self {
                alpha: 1.0,
                mode: PowerMode::SingleNetwork1,
            },
            Network::Two => Self {
                alpha: 0.0,
                mode: PowerMode::SingleNetwork2,
            },
        }
    }

    pub fn from_mode(mode: PowerMode, alpha: f64) -> Result<Self> {
        match mode {
            PowerMode::Concurrent => Self::concurrent(alpha),
            PowerMode::SingleNetwork1 => Ok(Self::single(Network::One)),
            PowerMode::SingleNetwork2 => Ok(Self::single(Network::Two)),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mode(&self) -> PowerMode {
        self.mode
    }

    /// Fraction of the ITL granted to `network`, or `None` if it is silent.
    pub fn share(&self, network: Network) -> Option<f64> {
        match (self.mode, network) {
            (PowerMode::Concurrent, Network::One) => Some(self.alpha),
            (PowerMode::Concurrent, Network::Two) => Some(1.0 - self.alpha),
            (PowerMode::SingleNetwork1, Network::One)
            | (PowerMode::SingleNetwork2, Network::Two) => Some(1.0),
            _ => None,
        }
    }

    pub fn is_active(&self, network: Network) -> bool {
        self.share(network).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig2_geometry() -> Geometry {
        Geometry {
            d11: 2.0,
            d22: 1.0,
            r12: 4.0,
            r21: 3.0,
            r1p: 3.0,
            r2p: 3.0,
            phi: 3.0,
        }
    }

    #[test]
    fn geometry_maps_to_rates() {
        let stats = channel_stats_from_geometry(&fig2_geometry()).unwrap();
        assert_eq!(stats.lambda11, 8.0);
        assert_eq!(stats.lambda22, 1.0);
        assert_eq!(stats.mu12, 64.0);
        assert_eq!(stats.mu21, 27.0);
        assert_eq!(stats.mu1p, 27.0);
        assert_eq!(stats.mu2p, 27.0);

        let g = Geometry {
            r21: 3.5,
            ..fig2_geometry()
        };
        assert_relative_eq!(g.channel_stats().unwrap().mu21, 42.875, epsilon = 1e-12);

        for phi in [0.5, 2.0, 3.0, 4.7] {
            let g = Geometry {
                phi,
                ..fig2_geometry()
            };
            assert_eq!(g.channel_stats().unwrap().lambda22, 1.0);
        }
    }

    #[test]
    fn bad_geometry_is_rejected() {
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            let g = Geometry {
                r12: bad,
                ..fig2_geometry()
            };
            assert!(matches!(
                channel_stats_from_geometry(&g),
                Err(Error::InvalidGeometry(_))
            ));
            let g = Geometry {
                phi: bad,
                ..fig2_geometry()
            };
            assert!(matches!(g.validate(), Err(Error::InvalidGeometry(_))));
        }
    }

    #[test]
    fn gamma_threshold_values() {
        assert_eq!(gamma_threshold(1.0).unwrap(), 1.0);
        assert_eq!(gamma_threshold(2.0).unwrap(), 3.0);
        assert!((gamma_threshold(3.9724).unwrap() - 14.697).abs() < 0.01);
        assert!((gamma_threshold(3.9724).unwrap() - 216f64.sqrt()).abs() < 0.01);
        assert!(matches!(gamma_threshold(0.0), Err(Error::InvalidRate(_))));
        assert!(matches!(gamma_threshold(-1.0), Err(Error::InvalidRate(_))));
    }

    #[test]
    fn ip_linear_values() {
        assert_eq!(ip_linear(20.0), 100.0);
        assert_eq!(ip_linear(0.0), 1.0);
        assert_relative_eq!(ip_linear(25.0), 316.227_766_016_837_9, max_relative = 1e-14);
        let s = Scenario::new(ChannelStatistics::uniform(1.0).unwrap(), 1, 1, 20.0).unwrap();
        assert_eq!(s.rho(), 100.0);
    }

    #[test]
    fn scenario_rejects_bad_user_counts() {
        let stats = ChannelStatistics::uniform(1.0).unwrap();
        assert!(Scenario::new(stats, 0, 1, 20.0).is_err());
        assert!(matches!(
            Scenario::new(stats, 1, 26, 20.0),
            Err(Error::TooManyUsers { count: 26, .. })
        ));
        assert!(ChannelStatistics::new(1.0, 1.0, -2.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn power_policy_shares() {
        let p = PowerPolicy::concurrent(0.25).unwrap();
        assert_eq!(p.share(Network::One), Some(0.25));
        assert_eq!(p.share(Network::Two), Some(0.75));
        assert!(PowerPolicy::concurrent(0.0).is_err());
        assert!(PowerPolicy::concurrent(1.0).is_err());
        let s = PowerPolicy::single(Network::Two);
        assert_eq!(s.share(Network::Two), Some(1.0));
        assert_eq!(s.share(Network::One), None);
        assert_eq!("single-network-1".parse::<PowerMode>().unwrap(), PowerMode::SingleNetwork1);
        assert!("both".parse::<PowerMode>().is_err());
    }

    #[test]
    fn rate_policy_tracks_threshold() {
        let r = RatePolicy::new(2.0).unwrap();
        assert_eq!(r.gamma_th(), 3.0);
        assert_eq!(RatePolicy::new(0.0).unwrap().gamma_th(), 0.0);
        assert!(RatePolicy::new(-0.5).is_err());
    }

    proptest! {
        #[test]
        fn gamma_threshold_round_trips(log_g in -3.0f64..4.0) {
            let g = 10f64.powf(log_g);
            let back = gamma_threshold((1.0 + g).log2()).unwrap();
            prop_assert!((back - g).abs() <= 1e-12 * g.max(1.0));
        }

        #[test]
        fn rates_strictly_increase_with_distance(
            d in 0.1f64..10.0,
            bump in 1e-3f64..5.0,
            phi in 0.5f64..6.0,
        ) {
            let near = Geometry { d11: d, r2p: d, phi, ..fig2_geometry() };
            let far = Geometry { d11: d + bump, r2p: d + bump, ..near };
            let (a, b) = (near.channel_stats().unwrap(), far.channel_stats().unwrap());
            prop_assert!(b.lambda11 > a.lambda11);
            prop_assert!(b.mu2p > a.mu2p);
        }
    }
}
