//! Pure functions behind the appendix inequality suite: normal-tail bounds,
//! log-sum-exp bounds, and the scaled-geometric maximum statistic.

use bandit_core::normal::normal_tail;
use bandit_core::{CounterRng, StreamPurpose};

/// Two-sided bounds on the normal tail 1 - Phi(z) for z >= 0, from the
/// continued-fraction bounds on the complementary error function
/// (Abramowitz & Stegun 7.1.13):
///
/// ```text
/// sqrt(2/pi) e^{-z^2/2} / (z + sqrt(z^2 + 4))      <  1 - Phi(z)
/// 1 - Phi(z)  <=  sqrt(2/pi) e^{-z^2/2} / (z + sqrt(z^2 + 8/pi))
/// ```
///
/// Both hold on all of z >= 0 and are tight to a factor ~1 in the deep tail.
pub fn mills_bounds(z: f64) -> (f64, f64) {
    debug_assert!(z >= 0.0);
    let common = (2.0 / std::f64::consts::PI).sqrt() * (-z * z / 2.0).exp();
    let lower = common / (z + (z * z + 4.0).sqrt());
    let upper = common / (z + (z * z + 8.0 / std::f64::consts::PI).sqrt());
    (lower, upper)
}

/// The tail itself, re-exported next to its bounds for the verify suites.
pub fn normal_tail_value(z: f64) -> f64 {
    normal_tail(z)
}

/// Overflow-safe log(sum exp(a_i)); -inf on an empty slice.
///
/// Satisfies max a_i <= log_sum_exp(a) <= max a_i + ln(n) exactly, including
/// in floating point (the shifted sum is at least 1 and at most n).
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let shifted: f64 = values.iter().map(|&a| (a - max).exp()).sum();
    max + shifted.ln()
}

/// log(G * p) where G ~ Geometric(p) is sampled by inversion from one
/// Exp(1) draw, parameterized by ln(p) so that p far below the smallest
/// positive double still works.
///
/// G = ceil(E / -ln(1-p)); for tiny p, -ln(1-p) = p (1 + p/2 + O(p^2)), so
/// log G is computed as ln(E) - ln(p) - p/2 and the ceiling is negligible.
pub fn log_geometric_times_p(ln_p: f64, exp_draw: f64) -> f64 {
    debug_assert!(ln_p <= 0.0 && exp_draw > 0.0);
    let p = ln_p.exp();
    if p > 1e-13 {
        let rate = -(-p).ln_1p();
        let g = (exp_draw / rate).ceil();
        g.ln() + ln_p
    } else {
        // ln(G p) = ln E - ln(-ln(1-p)) + ln p  ~=  ln E - p/2
        exp_draw.ln() - p / 2.0
    }
}

/// max_{1 <= j <= n} log(G_j p_j) / n^a with p_j = exp(-j/10), sampled
/// deterministically from the given seed. The first `n` draws of the stream
/// are shared across different `n`, so the maxima are coupled.
pub fn geometric_max_statistic(n: u64, a: f64, seed: u64) -> f64 {
    assert!(n >= 1 && a > 0.0);
    let mut rng = CounterRng::stream(seed, 0, 0, StreamPurpose::Auxiliary);
    let mut max = f64::NEG_INFINITY;
    for j in 1..=n {
        let exp_draw = -rng.next_uniform().ln();
        let v = log_geometric_times_p(-(j as f64) / 10.0, exp_draw);
        if v > max {
            max = v;
        }
    }
    max / (n as f64).powf(a)
}
