//! Independent oracles shared by the integration suites. Everything here
//! recomputes results from first principles (dense scans, Monte Carlo,
//! closed-form moments) without touching the solver paths under test.

use aircap_core::cost::{CorrectedCostCurve, ShiftedLogNormal};
use aircap_core::model::CostCoefficients;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Result of the dense-scan equilibrium oracle.
pub struct GridOracle {
    pub root: f64,
    pub sign_changes: usize,
}

/// Scans the implicit equation on a dense grid, counts sign changes, and
/// polishes the last crossing by bisection to 1e-12 minutes.
pub fn grid_bisect_oracle(
    curve: &CorrectedCostCurve,
    beta: f64,
    capacity: f64,
    smoothness: f64,
    delay_offset: f64,
    points: usize,
) -> GridOracle {
    let g = |delay: f64| {
        let demand = 2.0 / (1.0 + (curve.value(delay) / smoothness).exp());
        let supply = (capacity / beta) * (delay / 120.0 + delay_offset).ln();
        demand - supply
    };
    let lo = 120.0 * (1.0 - delay_offset) - 1.0;
    let hi = 120.0 * ((beta / capacity).exp() - delay_offset) + 1.0;

    let mut sign_changes = 0;
    let mut root = f64::NAN;
    let mut prev_x = lo;
    let mut prev_g = g(lo);
    for i in 1..=points {
        let x = lo + (hi - lo) * i as f64 / points as f64;
        let cur = g(x);
        if prev_g == 0.0 {
            sign_changes += 1;
            root = prev_x;
        } else if prev_g.signum() != cur.signum() {
            sign_changes += 1;
            let (mut a, mut b) = (prev_x, x);
            while b - a > 1e-12 {
                let mid = 0.5 * (a + b);
                if g(a).signum() == g(mid).signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            root = 0.5 * (a + b);
        }
        prev_x = x;
        prev_g = cur;
    }
    GridOracle { root, sign_changes }
}

/// Monte Carlo estimate of the expected floored-quadratic delay cost.
pub fn mc_expected_cost(
    dist: &ShiftedLogNormal,
    sqrt_mtow: f64,
    coeffs: &CostCoefficients,
    draws: usize,
    seed: u64,
) -> f64 {
    let (a_eff, b_eff) = coeffs.effective(sqrt_mtow);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..draws {
        let z: f64 = rng.sample(rand_distr::StandardNormal);
        let delay = dist.shift + (dist.mu + dist.sigma * z).exp();
        if delay >= 0.0 {
            acc += (a_eff + b_eff * delay) * delay;
        }
    }
    acc / draws as f64
}

/// Relative difference with a floor on the denominator.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}
