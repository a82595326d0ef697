//! Test-only oracles. Nothing here calls into the closed-form outage code.

#![allow(dead_code)]

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss-Kronrod integration: keep bisecting the interval
/// with the largest error estimate until the summed estimate is below `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    for _ in 0..2000 {
        let total_err: f64 = parts.iter().map(|p| p.3).sum();
        if total_err < tol {
            break;
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    parts.iter().map(|p| p.2).sum()
}

/// `E[f(X)]` for `X ~ Exp(rate)`, via the inverse-CDF substitution
/// `x = -ln(u) / rate` on `u in (0, 1)`.
///
/// The unit interval is pre-split geometrically towards both ends: the log
/// behaviour at `u -> 0` and thin boundary layers at `u -> 1` (large
/// interference scales) otherwise fool the Gauss-Kronrod error estimate into
/// stopping early, by up to ~1e-5 when outage is close to 1.
pub fn expect_exponential<F: Fn(f64) -> f64>(rate: f64, f: F, tol: f64) -> f64 {
    let mut cuts = vec![0.0];
    cuts.extend((1..=12).rev().map(|k| 10f64.powi(-k)));
    cuts.extend((1..=12).map(|k| 1.0 - 10f64.powi(-k)));
    cuts.push(1.0);
    let piece_tol = tol / (cuts.len() - 1) as f64;
    cuts.windows(2)
        .map(|w| integrate(|u| f(-u.ln() / rate), w[0], w[1], piece_tol))
        .sum()
}

/// Outage probability of one network written directly as the expectation
/// `E[(1 - exp(-lambda * W))^n]`, with
/// `W = ((1-share)/share) * gamma * g_own_p / g_other_p * g_cross + gamma / (share * rho) * g_own_p`,
/// integrated over `g_cross`, `g_other_p`, `g_own_p` (innermost first).
#[allow(clippy::too_many_arguments)]
pub fn outage_by_quadrature(
    n: u32,
    lambda: f64,
    mu_own_p: f64,
    mu_other_p: f64,
    mu_cross: f64,
    share: f64,
    gamma: f64,
    rho: f64,
) -> f64 {
    let interference = (1.0 - share) / share * gamma;
    let noise = gamma / (share * rho);
    let cdf = |w: f64| (-(-lambda * w).exp_m1()).powi(n as i32);
    expect_exponential(
        mu_own_p,
        |g_own_p| {
            expect_exponential(
                mu_other_p,
                |g_other_p| {
                    let scale = interference * g_own_p / g_other_p;
                    let floor = noise * g_own_p;
                    if !scale.is_finite() {
                        return 1.0;
                    }
                    expect_exponential(
                        mu_cross,
                        |g_cross| cdf(scale * g_cross + floor),
                        1e-10,
                    )
                },
                1e-9,
            )
        },
        1e-8,
    )
}
