//! Log-gamma, digamma and a few log-space helpers.
//!
//! Every mass function in the crate goes through [`ln_gamma`]; raw gamma
//! values overflow long before the graph sizes used here.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Natural log of the gamma function for `x > 0`.
///
/// Lanczos approximation (g = 7, nine terms) with reflection below 1/2.
/// Returns `+inf` at `x == 0` and `NaN` for negative or non-finite input.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return f64::INFINITY;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    // Exact small integers avoid the series entirely.
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x < 0.5 {
        return PI.ln() - (PI * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Digamma function ψ(x) = d/dx ln Γ(x) for `x > 0`.
///
/// Upward recurrence to `x >= 10`, then the asymptotic series through
/// the x^-14 term.
pub fn digamma(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return f64::NAN;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 10.0 {
        shift -= 1.0 / y;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    // Bernoulli-number coefficients B_2k / (2k).
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32_760.0 - inv2 / 12.0))))));
    shift + y.ln() - 0.5 * inv - series
}

/// ln Γ(x + k) - ln Γ(x) for x > 0 and a count k.
///
/// For large x the two log-gamma values nearly cancel, so the difference is
/// summed directly as Σ ln(x + i).
pub fn ln_gamma_ratio(x: f64, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    if k <= 16 || x > 1e4 {
        let kf = k as f64;
        let tail: f64 = (1..k).map(|i| (i as f64 / x).ln_1p()).sum();
        kf * x.ln() + tail
    } else {
        ln_gamma(x + k as f64) - ln_gamma(x)
    }
}

/// ψ(x + k) - ψ(x) = Σ_{i<k} 1 / (x + i), with the same switch as
/// [`ln_gamma_ratio`].
pub fn digamma_diff(x: f64, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    if k <= 16 || x > 1e4 {
        (0..k).map(|i| 1.0 / (x + i as f64)).sum()
    } else {
        digamma(x + k as f64) - digamma(x)
    }
}

/// ln C(n, k) via [`ln_gamma`].
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// ln B(a, b) for positive arguments.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `count * ln(p)` with the convention `0 * ln 0 = 0`.
pub fn xlogy(count: f64, p: f64) -> f64 {
    if count == 0.0 {
        0.0
    } else {
        count * p.ln()
    }
}

/// Stable log(Σ exp(v)). Empty input or all `-inf` yields `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Probability of the first of two outcomes given their log weights.
///
/// Handles infinite weights exactly: a `-inf` weight gets probability 0.
/// Returns `None` if both weights are `-inf`.
pub fn prob_from_log_weights(w1: f64, w0: f64) -> Option<f64> {
    match (w1 == f64::NEG_INFINITY, w0 == f64::NEG_INFINITY) {
        (true, true) => None,
        (true, false) => Some(0.0),
        (false, true) => Some(1.0),
        (false, false) => {
            let d = w1 - w0;
            Some(if d >= 0.0 {
                1.0 / (1.0 + (-d).exp())
            } else {
                let e = d.exp();
                e / (1.0 + e)
            })
        }
    }
}
