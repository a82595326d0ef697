mod common;

use rand::{rngs::StdRng, Rng, SeedableRng};
use underlay::analytics::{
    alpha_star_closed_form, critical_rate_closed_form, outage_approx_highitl, outage_exact,
    sum_throughput, FormulaTier, OutageParams,
};
use underlay::scenario::{ChannelStatistics, Network, PowerPolicy, RatePolicy, Scenario};

fn fig2() -> Scenario {
    let stats = ChannelStatistics::new(8.0, 1.0, 64.0, 27.0, 27.0, 27.0).unwrap();
    Scenario::new(stats, 1, 1, 20.0).unwrap()
}

fn oracle(p: &OutageParams) -> f64 {
    common::outage_by_quadrature(
        p.num_users,
        p.lambda_main,
        p.mu_own_p,
        p.mu_other_p,
        p.mu_cross,
        p.share,
        p.gamma_th,
        p.rho,
    )
}

#[test]
fn exact_outage_matches_quadrature_on_both_networks() {
    let power = PowerPolicy::concurrent(0.5).unwrap();
    let rate = RatePolicy::new(1.0).unwrap();
    for network in [Network::One, Network::Two] {
        let p = OutageParams::for_network(&fig2(), &rate, &power, network).unwrap();
        let (closed, quad) = (outage_exact(&p).unwrap(), oracle(&p));
        assert!((closed - quad).abs() < 1e-6, "{network:?}: {closed} vs {quad}");
    }
}

#[test]
fn exact_outage_matches_quadrature_with_selection() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..3 {
        let p = OutageParams {
            num_users: rng.random_range(2..=6),
            lambda_main: rng.random_range(0.5..10.0),
            mu_own_p: rng.random_range(1.0..100.0),
            mu_other_p: rng.random_range(1.0..100.0),
            mu_cross: rng.random_range(1.0..100.0),
            share: rng.random_range(0.1..0.9),
            gamma_th: rng.random_range(0.5..20.0),
            rho: rng.random_range(10.0..1000.0),
        };
        let (closed, quad) = (outage_exact(&p).unwrap(), oracle(&p));
        assert!((closed - quad).abs() < 1e-6, "{p:?}: {closed} vs {quad}");
    }
}

#[test]
fn high_itl_gap_shrinks_with_itl() {
    let power = PowerPolicy::concurrent(0.5).unwrap();
    let rate = RatePolicy::new(1.0).unwrap();
    let base = OutageParams::for_network(&fig2(), &rate, &power, Network::One).unwrap();
    let gaps: Vec<f64> = [1e2, 1e3, 1e4, 1e6]
        .into_iter()
        .map(|rho| {
            let p = OutageParams { rho, ..base };
            (outage_exact(&p).unwrap() - outage_approx_highitl(&p).unwrap()).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[2] < 5e-3);
    assert!(gaps[3] < 1e-6);
}

/// tau(alpha) / R under the rational tier on a fine interior grid.
fn rational_curve(s: &Scenario, rate: f64) -> Vec<(f64, f64)> {
    let r = RatePolicy::new(rate).unwrap();
    (0..1000)
        .map(|i| {
            let alpha = (i as f64 + 0.5) / 1000.0;
            let p = PowerPolicy::concurrent(alpha).unwrap();
            (alpha, sum_throughput(s, &r, &p, FormulaTier::Rational).unwrap())
        })
        .collect()
}

#[test]
fn rational_tier_is_concave_below_critical_rate() {
    let s = fig2();
    let rc = critical_rate_closed_form(&s.stats);
    let alpha_star = alpha_star_closed_form(&s.stats);
    for rate in [0.5, 1.0, 2.0, rc - 0.3] {
        let curve = rational_curve(&s, rate);
        let (i, &(alpha, _)) = curve
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .unwrap();
        assert!(i > 0 && i < curve.len() - 1, "rate {rate}: maximum at the edge");
        assert!((alpha - alpha_star).abs() < 1e-2, "rate {rate}: {alpha} vs {alpha_star}");
        let second = curve[i + 1].1 - 2.0 * curve[i].1 + curve[i - 1].1;
        assert!(second < 0.0, "rate {rate}: second difference {second}");
    }
}

#[test]
fn rational_tier_is_convex_above_critical_rate() {
    let s = fig2();
    let rc = critical_rate_closed_form(&s.stats);
    for rate in [rc + 0.3, 5.0, 7.0] {
        let curve = rational_curve(&s, rate);
        // The interior stationary point is the minimum.
        let (i, &(alpha, _)) = curve
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .unwrap();
        assert!(i > 0 && i < curve.len() - 1);
        assert!((alpha - alpha_star_closed_form(&s.stats)).abs() < 1e-2);
        let second = curve[i + 1].1 - 2.0 * curve[i].1 + curve[i - 1].1;
        assert!(second > 0.0, "rate {rate}: second difference {second}");
    }
}

#[test]
fn closed_forms_depend_on_ratios_only() {
    let stats = ChannelStatistics::new(1.0, 8.0, 27.0, 42.875, 64.0, 27.0).unwrap();
    for k in [1e-3, 0.37, 2.0, 19.0, 1e4] {
        let scaled = stats.scaled(k).unwrap();
        let (a, b) = (alpha_star_closed_form(&stats), alpha_star_closed_form(&scaled));
        assert!((a - b).abs() < 1e-14, "{k}");
        let (a, b) = (critical_rate_closed_form(&stats), critical_rate_closed_form(&scaled));
        assert!((a - b).abs() < 1e-13, "{k}");
    }
}
