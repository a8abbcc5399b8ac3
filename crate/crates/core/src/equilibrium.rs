//! Per-window delay equilibrium: the fixed point where the airline's
//! willingness to operate (a falling function of expected delay cost) meets
//! the traffic level the capacity can carry at that delay (the inverted
//! delay–traffic law). With the mean delay read as a price, the two sides
//! are a demand curve and a supply curve.

use serde::{Deserialize, Serialize};

use crate::cost::CorrectedCostCurve;
use crate::error::{Error, Result};
use crate::model::{
    delay_from_traffic, operate_probability_kernel, HourWindow, DELAY_SCALE_MIN,
};
use crate::numerics::brent::{brent_root, expand_bracket_up, RootOptions, RootResult};

/// Maximum geometric bracket expansions before giving up.
const MAX_EXPANSIONS: usize = 60;

/// Solved equilibrium for one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    /// Equilibrium mean delay, minutes.
    pub mean_delay: f64,
    /// Operate probability at the equilibrium delay.
    pub operate_prob: f64,
    /// Realized traffic `P_a·β`, flights/hour.
    pub realized_traffic: f64,
    /// Demand-minus-supply residual at the root.
    pub residual: f64,
    pub iterations: usize,
    /// Final solver bracket, minutes.
    pub bracket: (f64, f64),
    /// Set when a non-validated curve produced several crossings and the
    /// root nearest the supply-side anchor was returned.
    pub multiplicity_warning: bool,
}

fn demand_side(delay: f64, curve: &CorrectedCostCurve, smoothness: f64) -> f64 {
    operate_probability_kernel(curve.value(delay), smoothness)
}

fn supply_side(delay: f64, capacity: f64, demand: f64, delay_offset: f64) -> f64 {
    (capacity / demand) * (delay / DELAY_SCALE_MIN + delay_offset).ln()
}

/// Solves the implicit delay equation for one window at capacity `C`.
///
/// The residual is `2/(1+e^{cost(δ)/s}) − (C/β)·ln(δ/120 + cc)`; the initial
/// bracket spans the supply delays between zero traffic and full demand and
/// is doubled upward when the demand side exceeds 1 (non-validated curves).
pub fn solve_window(
    window: &HourWindow,
    capacity: f64,
    curve: &CorrectedCostCurve,
    smoothness: f64,
    delay_offset: f64,
) -> Result<EquilibriumResult> {
    if capacity <= 0.0 || !capacity.is_finite() {
        return Err(Error::InvalidParameter {
            name: "capacity",
            value: capacity,
            reason: "must be > 0",
        });
    }
    if smoothness <= 0.0 || !smoothness.is_finite() {
        return Err(Error::InvalidParameter {
            name: "smoothness",
            value: smoothness,
            reason: "must be > 0",
        });
    }
    let beta = window.demand;
    if beta < 0.0 || !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "demand",
            value: beta,
            reason: "must be >= 0",
        });
    }

    if beta == 0.0 {
        // No demand: nothing flies and the window sits at its zero-traffic
        // delay. The operate probability is 1 by convention (zero cost of an
        // unused airport does not deter anyone).
        let delay = delay_from_traffic(0.0, capacity, delay_offset)?;
        return Ok(EquilibriumResult {
            mean_delay: delay,
            operate_prob: 1.0,
            realized_traffic: 0.0,
            residual: 0.0,
            iterations: 0,
            bracket: (delay, delay),
            multiplicity_warning: false,
        });
    }

    let residual =
        |d: f64| demand_side(d, curve, smoothness) - supply_side(d, capacity, beta, delay_offset);

    // Supply passes 0 at 120(1−cc) and 1 at the full-demand delay. Very
    // large demand overflows the full-demand delay; the root stays modest
    // because the cost side saturates, so the bracket is capped.
    const DELAY_CAP_MIN: f64 = 1e9;
    let lo = DELAY_SCALE_MIN * (1.0 - delay_offset) - 1.0;
    let growth = (beta / capacity).exp();
    let hi = if growth.is_finite() {
        (DELAY_SCALE_MIN * (growth - delay_offset) + 1.0).min(DELAY_CAP_MIN)
    } else {
        DELAY_CAP_MIN
    };
    let (lo, hi) = expand_bracket_up(residual, lo, hi, MAX_EXPANSIONS)?;

    let opts = RootOptions::default();
    if curve.is_validated() {
        let root = brent_root(residual, lo, hi, opts)?;
        return Ok(finish(root, beta, curve, smoothness, false));
    }

    // Non-monotone demand: scan for every crossing, refine each, and return
    // the one nearest the supply anchor at the a-priori operate guess.
    const SCAN: usize = 4096;
    let mut roots = Vec::new();
    let mut prev_x = lo;
    let mut prev_f = residual(lo);
    for i in 1..=SCAN {
        let x = lo + (hi - lo) * i as f64 / SCAN as f64;
        let f = residual(x);
        if prev_f == 0.0 {
            roots.push(RootResult {
                root: prev_x,
                residual: 0.0,
                iterations: 0,
                bracket: (prev_x, prev_x),
            });
        } else if prev_f.signum() != f.signum() {
            roots.push(brent_root(residual, prev_x, x, opts)?);
        }
        prev_x = x;
        prev_f = f;
    }
    if roots.is_empty() {
        roots.push(brent_root(residual, lo, hi, opts)?);
    }
    let multiple = roots.len() > 1;
    let guess = demand_side(hi, curve, smoothness).clamp(0.0, 2.0);
    let anchor_traffic = (beta * guess).min(beta);
    let anchor_growth = (anchor_traffic / capacity).exp();
    let anchor = if anchor_growth.is_finite() {
        (DELAY_SCALE_MIN * (anchor_growth - delay_offset)).min(DELAY_CAP_MIN)
    } else {
        DELAY_CAP_MIN
    };
    let nearest = roots
        .into_iter()
        .min_by(|a, b| {
            (a.root - anchor)
                .abs()
                .total_cmp(&(b.root - anchor).abs())
        })
        .unwrap();
    Ok(finish(nearest, beta, curve, smoothness, multiple))
}

fn finish(
    root: RootResult,
    beta: f64,
    curve: &CorrectedCostCurve,
    smoothness: f64,
    multiplicity_warning: bool,
) -> EquilibriumResult {
    let operate_prob = demand_side(root.root, curve, smoothness);
    EquilibriumResult {
        mean_delay: root.root,
        operate_prob,
        realized_traffic: operate_prob * beta,
        residual: root.residual,
        iterations: root.iterations,
        bracket: root.bracket,
        multiplicity_warning,
    }
}

/// One row of a demand/supply trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// Mean delay abscissa, minutes.
    pub delay: f64,
    /// Demand-side operate probability.
    pub demand: f64,
    /// Supply-side operate probability; `None` when the grid point falls
    /// outside the log domain (`delay/120 + cc ≤ 0`).
    pub supply: Option<f64>,
}

/// Evaluates both sides of the implicit equation over `delay_grid` so the
/// curves can be plotted; rows outside the log domain carry no supply value.
pub fn demand_supply_trace(
    window: &HourWindow,
    capacity: f64,
    curve: &CorrectedCostCurve,
    smoothness: f64,
    delay_offset: f64,
    delay_grid: &[f64],
) -> Result<Vec<TraceRow>> {
    if delay_grid.is_empty() {
        return Err(Error::InvalidGrid {
            reason: "empty delay grid".into(),
        });
    }
    if window.demand <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "demand",
            value: window.demand,
            reason: "trace needs post-calibrated demand > 0",
        });
    }
    Ok(delay_grid
        .iter()
        .map(|&d| {
            let in_domain = d / DELAY_SCALE_MIN + delay_offset > 0.0;
            TraceRow {
                delay: d,
                demand: demand_side(d, curve, smoothness),
                supply: in_domain
                    .then(|| supply_side(d, capacity, window.demand, delay_offset)),
            }
        })
        .collect())
}

/// Convenience used by calibration and experiments: realized traffic at the
/// equilibrium of a window with demand `beta`.
pub fn realized_traffic(
    window: &HourWindow,
    beta: f64,
    capacity: f64,
    curve: &CorrectedCostCurve,
    smoothness: f64,
    delay_offset: f64,
) -> Result<f64> {
    let mut probe = window.clone();
    probe.demand = beta;
    Ok(solve_window(&probe, capacity, curve, smoothness, delay_offset)?.realized_traffic)
}
