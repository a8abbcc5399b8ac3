//! The result suite: capacity/profit sweeps, passengers-per-flight optimum,
//! predictability trade-off, cross-airport break-even marginal cost, the
//! exploratory passenger-spend model, and smoothness sensitivity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{post_calibrate_beta, CalibratedAirport};
use crate::cost::validate_family;
use crate::equilibrium::solve_window;
use crate::error::{Error, Result};
use crate::model::{
    capacity_cost, daily_profit, daily_profit_with_spend, ProfitBreakdown, WINDOWS_PER_DAY,
};
use crate::numerics::brent::{brent_root, RootOptions};
use crate::numerics::golden::golden_max;
use crate::numerics::leastsq::linear_fit;

/// Abscissa tolerance for refined optima, flights/hour.
const OPTIMUM_XTOL: f64 = 1e-3;

/// Uniform evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.min >= self.max {
            return Err(Error::InvalidGrid {
                reason: format!("min {} must be < max {}", self.min, self.max),
            });
        }
        if self.steps < 2 {
            return Err(Error::InvalidGrid {
                reason: format!("steps {} must be >= 2", self.steps),
            });
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Variable swept by a [`SweepSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Capacity,
    PaxPerFlight,
    SigmaScale,
    Smoothness,
    Alpha,
}

/// A declarative sweep request (used by configuration files).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Grid,
    /// Fixed marginal capacity cost where the sweep needs one.
    pub alpha: Option<f64>,
}

/// One evaluated capacity point; failures are isolated per point.
#[derive(Debug, Clone)]
pub struct CapacityPoint {
    pub capacity: f64,
    pub outcome: std::result::Result<ProfitBreakdown, String>,
}

/// Location and value of a (refined) profit optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub capacity: f64,
    pub profit: f64,
    /// True when the reported capacity was clamped up to the current one.
    pub capped: bool,
}

#[derive(Debug, Clone)]
pub struct CapacitySweep {
    pub rows: Vec<CapacityPoint>,
    pub optimum: Optimum,
}

fn profit_at(model: &CalibratedAirport, capacity: f64, alpha: f64) -> Result<f64> {
    Ok(daily_profit(model, capacity, alpha)?.operating_profit)
}

/// Finds the best grid point and refines the surrounding bracket by
/// golden-section. Terminal grid points are reported as-is (monotone
/// regimes have their optimum on the boundary).
fn refine_optimum(
    model: &CalibratedAirport,
    alpha: f64,
    grid_values: &[f64],
    profits: &[Option<f64>],
) -> Result<(f64, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in profits.iter().enumerate() {
        if let Some(v) = *p {
            if best.map(|(_, b)| v > b).unwrap_or(true) {
                best = Some((i, v));
            }
        }
    }
    let (best_i, best_v) = best.ok_or_else(|| Error::FitDivergence {
        reason: "no capacity point evaluated successfully".into(),
    })?;

    if best_i == 0 || best_i == grid_values.len() - 1 {
        return Ok((grid_values[best_i], best_v));
    }
    let lo = grid_values[best_i - 1];
    let hi = grid_values[best_i + 1];
    let (c, v) = golden_max(
        |c| profit_at(model, c, alpha).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        OPTIMUM_XTOL,
    );
    if v >= best_v {
        Ok((c, v))
    } else {
        Ok((grid_values[best_i], best_v))
    }
}

/// Profit-vs-capacity sweep with golden-section refinement of the best grid
/// bracket. With `cap_at_current`, optima below the current capacity are
/// reported at the current capacity instead.
pub fn sweep_capacity(
    model: &CalibratedAirport,
    alpha: f64,
    grid: &Grid,
    cap_at_current: bool,
) -> Result<CapacitySweep> {
    grid.validate()?;
    let values = grid.values();
    let rows: Vec<CapacityPoint> = values
        .par_iter()
        .map(|&c| CapacityPoint {
            capacity: c,
            outcome: daily_profit(model, c, alpha).map_err(|e| e.to_string()),
        })
        .collect();

    let profits: Vec<Option<f64>> = rows
        .iter()
        .map(|r| r.outcome.as_ref().ok().map(|p| p.operating_profit))
        .collect();
    let (mut c_opt, mut p_opt) = refine_optimum(model, alpha, &values, &profits)?;

    let mut capped = false;
    if cap_at_current && c_opt < model.params.capacity {
        c_opt = model.params.capacity;
        p_opt = profit_at(model, c_opt, alpha)?;
        capped = true;
    }
    Ok(CapacitySweep {
        rows,
        optimum: Optimum {
            capacity: c_opt,
            profit: p_opt,
            capped,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NfPoint {
    pub pax_per_flight: f64,
    pub optimal_capacity: f64,
    pub max_profit: f64,
}

/// Least-squares line over the uncapped tail of an n_f sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Debug, Clone)]
pub struct NfSweep {
    pub rows: Vec<NfPoint>,
    /// Present when at least two points escape the cap.
    pub tail: Option<TailFit>,
}

/// Optimal (capped) capacity as a function of passengers per flight.
/// Changing n_f reshapes revenue only; the delay side stays calibrated.
pub fn sweep_nf(
    model: &CalibratedAirport,
    alpha: f64,
    nf_grid: &Grid,
    capacity_grid: &Grid,
) -> Result<NfSweep> {
    nf_grid.validate()?;
    capacity_grid.validate()?;

    let rows: Vec<Result<NfPoint>> = nf_grid
        .values()
        .par_iter()
        .map(|&nf| {
            let mut variant = model.clone();
            variant.params.pax_per_flight = nf;
            let sweep = sweep_capacity(&variant, alpha, capacity_grid, true)?;
            Ok(NfPoint {
                pax_per_flight: nf,
                optimal_capacity: sweep.optimum.capacity,
                max_profit: sweep.optimum.profit,
            })
        })
        .collect();
    let rows: Vec<NfPoint> = rows.into_iter().collect::<Result<_>>()?;

    // Linear tail over the points strictly above the cap.
    let cap = model.params.capacity;
    let tail_points: Vec<&NfPoint> = rows
        .iter()
        .filter(|p| p.optimal_capacity > cap + 10.0 * OPTIMUM_XTOL)
        .collect();
    let tail = if tail_points.len() >= 2 {
        let xs: Vec<f64> = tail_points.iter().map(|p| p.pax_per_flight).collect();
        let ys: Vec<f64> = tail_points.iter().map(|p| p.optimal_capacity).collect();
        let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
        Some(TailFit {
            slope,
            intercept,
            r_squared,
            points: tail_points.len(),
        })
    } else {
        None
    };
    Ok(NfSweep { rows, tail })
}

#[derive(Debug, Clone)]
pub struct PredictabilityPoint {
    pub sigma_scale: f64,
    pub outcome: std::result::Result<PredictabilityOutcome, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictabilityOutcome {
    /// Daily profit at the current capacity.
    pub profit_at_current: f64,
    /// Traffic-weighted mean equilibrium delay at the current capacity.
    pub mean_delay: f64,
    /// Uncapped optimal capacity at the given alpha.
    pub optimal_capacity: f64,
}

/// Predictability sweep: each sigma scale k rescales every window's delay
/// standard deviation (means fixed), rebuilds the corrected-cost curve, and
/// re-solves. The curve family ordering is validated across the sweep.
pub fn sweep_predictability(
    model: &CalibratedAirport,
    alpha: f64,
    k_grid: &[f64],
    capacity_grid: &Grid,
) -> Result<Vec<PredictabilityPoint>> {
    if k_grid.is_empty() {
        return Err(Error::InvalidGrid {
            reason: "empty sigma-scale grid".into(),
        });
    }
    if k_grid.iter().any(|&k| !(k > 0.0 && k <= 1.0)) {
        return Err(Error::InvalidGrid {
            reason: "sigma scales must lie in (0, 1]".into(),
        });
    }
    capacity_grid.validate()?;

    // Build and family-validate the curves first, then evaluate.
    let curves: Vec<std::result::Result<crate::cost::CorrectedCostCurve, String>> = k_grid
        .par_iter()
        .map(|&k| model.curve_at_scale(k).map_err(|e| e.to_string()))
        .collect();
    let mut good: Vec<crate::cost::CorrectedCostCurve> =
        curves.iter().filter_map(|c| c.clone().ok()).collect();
    validate_family(&mut good);
    let mut good_iter = good.into_iter();
    let curves: Vec<std::result::Result<crate::cost::CorrectedCostCurve, String>> = curves
        .into_iter()
        .map(|c| c.map(|_| good_iter.next().expect("one validated curve per ok slot")))
        .collect();

    let points: Vec<PredictabilityPoint> = k_grid
        .par_iter()
        .zip(curves)
        .map(|(&k, curve)| {
            let outcome = (|| -> std::result::Result<PredictabilityOutcome, String> {
                let curve = curve?;
                let mut variant = model.clone();
                variant.curve = curve;
                let at_current =
                    daily_profit(&variant, model.params.capacity, alpha)
                        .map_err(|e| e.to_string())?;
                let sweep = sweep_capacity(&variant, alpha, capacity_grid, false)
                    .map_err(|e| e.to_string())?;
                Ok(PredictabilityOutcome {
                    profit_at_current: at_current.operating_profit,
                    mean_delay: at_current.mean_delay(),
                    optimal_capacity: sweep.optimum.capacity,
                })
            })();
            PredictabilityPoint {
                sigma_scale: k,
                outcome,
            }
        })
        .collect();
    Ok(points)
}

/// Break-even marginal capacity cost, computed along two routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakevenAlpha {
    /// Revenue difference divided by 18·ΔC (the profit is affine in alpha).
    pub analytic: f64,
    /// Root of profit(C+ΔC, α) − profit(C, α).
    pub root_found: f64,
    pub relative_gap: f64,
}

/// The largest alpha at which adding `delta_c` flights/hour of capacity
/// leaves daily operating profit unchanged.
pub fn breakeven_alpha(model: &CalibratedAirport, delta_c: f64) -> Result<BreakevenAlpha> {
    if delta_c <= 0.0 || !delta_c.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta_c",
            value: delta_c,
            reason: "must be > 0",
        });
    }
    let c0 = model.params.capacity;
    let base = profit_at(model, c0, 0.0)?;
    let bumped = profit_at(model, c0 + delta_c, 0.0)?;
    // At alpha = 0 the capacity-cost terms cancel, leaving pure revenue gain.
    let revenue_gain = bumped - base;
    let analytic = revenue_gain / (WINDOWS_PER_DAY as f64 * delta_c);

    let gap = |alpha: f64| -> f64 {
        let a = profit_at(model, c0 + delta_c, alpha).unwrap_or(f64::NAN);
        let b = profit_at(model, c0, alpha).unwrap_or(f64::NAN);
        a - b
    };
    let root_found = if revenue_gain.abs() <= 1e-9 * base.abs().max(1.0) {
        0.0
    } else {
        let hi = 2.0 * analytic.abs() + 1.0;
        brent_root(
            gap,
            -1.0,
            hi,
            RootOptions {
                width_tol: 1e-10 * hi,
                residual_tol: 1e-6 * revenue_gain.abs().max(1.0),
                max_iterations: 200,
            },
        )?
        .root
    };
    let scale = analytic.abs().max(1e-12);
    Ok(BreakevenAlpha {
        analytic,
        root_found,
        relative_gap: (analytic - root_found).abs() / scale,
    })
}

/// Per-airport break-even comparison row.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub name: String,
    pub outcome: std::result::Result<ComparisonOutcome, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonOutcome {
    pub alpha_star: f64,
    /// alpha* normalized by the daily operating cost at current capacity.
    pub cost_ratio: f64,
}

/// Break-even alpha and its cost-normalized ratio across several airports.
pub fn compare_airports(
    models: &[(String, CalibratedAirport)],
    delta_c: f64,
) -> Result<Vec<ComparisonRow>> {
    if models.len() < 2 {
        return Err(Error::InsufficientSamples {
            got: models.len(),
            required: 2,
        });
    }
    Ok(models
        .par_iter()
        .map(|(name, model)| {
            let outcome = breakeven_alpha(model, delta_c)
                .map(|b| {
                    let daily_cost =
                        WINDOWS_PER_DAY as f64 * model.params.operating_cost_per_hour;
                    ComparisonOutcome {
                        alpha_star: b.analytic,
                        cost_ratio: b.analytic / daily_cost,
                    }
                })
                .map_err(|e| e.to_string());
            ComparisonRow {
                name: name.clone(),
                outcome,
            }
        })
        .collect())
}

/// Exploratory passenger-spend parameters. The reference delay is always
/// the calibrated airport-level mean, never user-set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExploratorySpendParams {
    /// Dwell-time elasticity t_e: longer waits mean more shopping time.
    pub time_elasticity: f64,
    /// Satisfaction elasticity s_e: delays beyond the accustomed level sour
    /// the spend, delays below it sweeten it, quadratically.
    pub satisfaction_elasticity: f64,
}

impl ExploratorySpendParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("time_elasticity", self.time_elasticity),
            ("satisfaction_elasticity", self.satisfaction_elasticity),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite { name });
            }
        }
        Ok(())
    }

    /// Non-aeronautical revenue per passenger at mean delay `delay`:
    /// `w_init + t_e·((δ−δ₀)/120)·w_init ± s_e·((δ−δ₀)/120)²·w_init`,
    /// the quadratic term positive below the reference delay and negative
    /// above it.
    pub fn revenue_per_pax(&self, w_init: f64, delay: f64, reference_delay: f64) -> f64 {
        let x = (delay - reference_delay) / 120.0;
        let shop = self.time_elasticity * x * w_init;
        let sat = if delay < reference_delay {
            self.satisfaction_elasticity * x * x * w_init
        } else {
            -self.satisfaction_elasticity * x * x * w_init
        };
        w_init + shop + sat
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalMaximum {
    pub capacity: f64,
    pub profit: f64,
}

#[derive(Debug, Clone)]
pub struct ExploratorySweep {
    pub rows: Vec<CapacityPoint>,
    /// Every interior local maximum, refined; plateaus report their midpoint.
    pub maxima: Vec<LocalMaximum>,
}

/// Capacity sweep under the delay-dependent spend model. Equilibria are
/// solved with the cost side unchanged; the spend model then reshapes each
/// window's revenue through its equilibrium mean delay.
pub fn exploratory_profit(
    model: &CalibratedAirport,
    alpha: f64,
    spend: &ExploratorySpendParams,
    capacity_grid: &Grid,
) -> Result<ExploratorySweep> {
    spend.validate()?;
    capacity_grid.validate()?;
    let w_init = model.params.non_aero_revenue_per_pax;
    let reference = model.baseline_mean_delay;

    let eval = |c: f64| -> Result<ProfitBreakdown> {
        daily_profit_with_spend(model, c, alpha, |delay| {
            spend.revenue_per_pax(w_init, delay, reference)
        })
    };

    let values = capacity_grid.values();
    let rows: Vec<CapacityPoint> = values
        .par_iter()
        .map(|&c| CapacityPoint {
            capacity: c,
            outcome: eval(c).map_err(|e| e.to_string()),
        })
        .collect();

    let profits: Vec<Option<f64>> = rows
        .iter()
        .map(|r| r.outcome.as_ref().ok().map(|p| p.operating_profit))
        .collect();

    let mut maxima = Vec::new();
    let n = values.len();
    let mut i = 1;
    while i + 1 < n {
        let Some(y) = profits[i] else {
            i += 1;
            continue;
        };
        // Extend over a plateau of equal values.
        let mut j = i;
        while j + 1 < n && profits[j + 1] == Some(y) {
            j += 1;
        }
        if j + 1 >= n {
            break;
        }
        let left = profits[i - 1];
        let right = profits[j + 1];
        let higher_than = |v: Option<f64>| v.map(|p| y > p).unwrap_or(false);
        if higher_than(left) && higher_than(right) {
            let (c, p) = golden_max(
                |c| {
                    eval(c)
                        .map(|b| b.operating_profit)
                        .unwrap_or(f64::NEG_INFINITY)
                },
                values[i - 1],
                values[j + 1],
                OPTIMUM_XTOL,
            );
            if p >= y {
                maxima.push(LocalMaximum {
                    capacity: c,
                    profit: p,
                });
            } else {
                maxima.push(LocalMaximum {
                    capacity: 0.5 * (values[i] + values[j]),
                    profit: y,
                });
            }
        }
        i = j + 1;
    }

    Ok(ExploratorySweep { rows, maxima })
}

#[derive(Debug, Clone)]
pub struct SmoothnessPoint {
    pub smoothness: f64,
    pub outcome: std::result::Result<SmoothnessOutcome, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessOutcome {
    /// Traffic-weighted mean equilibrium delay at current capacity.
    pub mean_delay: f64,
    /// Total daily expected delay cost across windows, euros.
    pub airline_delay_cost: f64,
}

/// Smoothness sensitivity: the demand profile is re-post-calibrated at each
/// smoothness value (β depends on s through the equilibrium), then the
/// model is re-solved at the current capacity.
pub fn sensitivity_smoothness(
    model: &CalibratedAirport,
    s_grid: &[f64],
) -> Result<Vec<SmoothnessPoint>> {
    if s_grid.is_empty() {
        return Err(Error::InvalidGrid {
            reason: "empty smoothness grid".into(),
        });
    }
    if s_grid.iter().any(|&s| s.is_nan() || s <= 0.0) {
        return Err(Error::InvalidGrid {
            reason: "smoothness values must be > 0".into(),
        });
    }

    Ok(s_grid
        .par_iter()
        .map(|&s| {
            let outcome = (|| -> std::result::Result<SmoothnessOutcome, String> {
                let capacity = model.params.capacity;
                let offset = model.params.delay_offset;
                let mut traffic_sum = 0.0;
                let mut delay_weighted = 0.0;
                let mut cost_total = 0.0;
                for window in &model.windows {
                    let beta =
                        post_calibrate_beta(window, capacity, &model.curve, s, offset)
                            .map_err(|e| e.to_string())?;
                    let mut w = window.clone();
                    w.demand = beta;
                    let eq = solve_window(&w, capacity, &model.curve, s, offset)
                        .map_err(|e| e.to_string())?;
                    traffic_sum += eq.realized_traffic;
                    delay_weighted += eq.realized_traffic * eq.mean_delay;
                    cost_total += model.curve.value(eq.mean_delay) * eq.realized_traffic;
                }
                Ok(SmoothnessOutcome {
                    mean_delay: if traffic_sum > 0.0 {
                        delay_weighted / traffic_sum
                    } else {
                        0.0
                    },
                    airline_delay_cost: cost_total,
                })
            })();
            SmoothnessPoint {
                smoothness: s,
                outcome,
            }
        })
        .collect())
}

/// Daily revenue (profit gross of capacity cost) at a capacity; used by the
/// CLI summaries.
pub fn daily_revenue(model: &CalibratedAirport, capacity: f64) -> Result<f64> {
    let breakdown = daily_profit(model, capacity, 0.0)?;
    let fixed = WINDOWS_PER_DAY as f64
        * capacity_cost(0.0, capacity, &model.params)?;
    Ok(breakdown.operating_profit + fixed)
}
