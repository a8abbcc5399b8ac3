//! Three-stage calibration: direct parameter extraction from financial and
//! flight data, functional-relationship fitting (delay–capacity law and
//! per-window delay distributions), and post-calibration of the per-window
//! potential demand.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::cost::{build_corrected_curve, fit_shifted_lognormal, CorrectedCostCurve};
use crate::equilibrium;
use crate::error::{Error, Result};
use crate::model::{
    AirportParameters, CostCoefficients, HourWindow, FIRST_HOUR, LAST_HOUR, WINDOWS_PER_DAY,
};
use crate::numerics::brent::{brent_root, RootOptions};
use crate::numerics::golden::golden_min;
use crate::numerics::leastsq::{linear_fit, r_squared};

/// One departure record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightRecord {
    pub date: NaiveDate,
    pub hour: u8,
    pub minute: u8,
    /// Departure delay in minutes; negative for early departures.
    pub delay_min: f64,
    /// Maximum take-off weight, tonnes (> 0).
    pub mtow_t: f64,
    pub pax: Option<u32>,
}

impl FlightRecord {
    pub fn validate(&self) -> Result<()> {
        if !self.delay_min.is_finite() {
            return Err(Error::NonFinite { name: "delay_min" });
        }
        if !self.mtow_t.is_finite() || self.mtow_t <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "mtow_t",
                value: self.mtow_t,
                reason: "must be > 0",
            });
        }
        if self.hour > 23 || self.minute > 59 {
            return Err(Error::InvalidParameter {
                name: "hour/minute",
                value: self.hour as f64,
                reason: "must be a valid time of day",
            });
        }
        Ok(())
    }
}

/// Airport-level financial and operational totals over the record period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirportFinancials {
    pub total_flights: f64,
    pub total_passengers: f64,
    pub total_aero_revenue: f64,
    pub total_non_aero_revenue: f64,
    pub total_operating_cost: f64,
    pub period_days: u32,
    /// Value of time, euros/minute. Ingested and carried; unused by any
    /// relationship in the model.
    #[serde(default)]
    pub value_of_time: f64,
}

impl AirportFinancials {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("total_flights", self.total_flights),
            ("total_passengers", self.total_passengers),
            ("total_aero_revenue", self.total_aero_revenue),
            ("total_non_aero_revenue", self.total_non_aero_revenue),
            ("total_operating_cost", self.total_operating_cost),
            ("value_of_time", self.value_of_time),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::NonFinite { name });
            }
            if value < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be >= 0",
                });
            }
        }
        if self.period_days < 1 {
            return Err(Error::InvalidParameter {
                name: "period_days",
                value: self.period_days as f64,
                reason: "must be >= 1",
            });
        }
        Ok(())
    }
}

/// Output of the direct-calibration stage.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectCalibration {
    pub pax_per_flight: f64,
    pub aero_revenue_per_flight: f64,
    pub non_aero_revenue_per_pax: f64,
    pub sqrt_mtow: f64,
    /// Total operating cost converted to euros per operating hour
    /// (period total / (days × 18 windows)).
    pub operating_cost_per_hour: f64,
    /// Mean departures per window over the period, hours 05..=22.
    pub observed_traffic: [f64; WINDOWS_PER_DAY],
    pub value_of_time: f64,
}

/// Ratios and averages that map straight from the data to parameters.
pub fn direct_calibrate(
    financials: &AirportFinancials,
    records: &[FlightRecord],
) -> Result<DirectCalibration> {
    financials.validate()?;
    if records.is_empty() {
        return Err(Error::InsufficientSamples {
            got: 0,
            required: 1,
        });
    }
    if financials.total_flights <= 0.0 {
        return Err(Error::ZeroDenominator {
            name: "total_flights",
        });
    }
    if financials.total_passengers <= 0.0 {
        return Err(Error::ZeroDenominator {
            name: "total_passengers",
        });
    }

    let sqrt_mtow =
        records.iter().map(|r| r.mtow_t.sqrt()).sum::<f64>() / records.len() as f64;

    let mut counts = [0u64; WINDOWS_PER_DAY];
    for r in records {
        if (FIRST_HOUR..=LAST_HOUR).contains(&r.hour) {
            counts[(r.hour - FIRST_HOUR) as usize] += 1;
        }
    }
    let days = financials.period_days as f64;
    let mut observed_traffic = [0.0; WINDOWS_PER_DAY];
    for (slot, &count) in observed_traffic.iter_mut().zip(&counts) {
        *slot = count as f64 / days;
    }

    Ok(DirectCalibration {
        pax_per_flight: financials.total_passengers / financials.total_flights,
        aero_revenue_per_flight: financials.total_aero_revenue / financials.total_flights,
        non_aero_revenue_per_pax: financials.total_non_aero_revenue
            / financials.total_passengers,
        sqrt_mtow,
        operating_cost_per_hour: financials.total_operating_cost
            / (days * WINDOWS_PER_DAY as f64),
        observed_traffic,
        value_of_time: financials.value_of_time,
    })
}

/// Result of the delay–capacity regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayCapacityFit {
    /// Fitted capacity, flights/hour.
    pub capacity: f64,
    /// Fitted zero-traffic offset.
    pub delay_offset: f64,
    /// R² of the exponential fit.
    pub r_squared: f64,
    /// R² of a plain linear fit of delay on traffic, for comparison.
    pub linear_r_squared: f64,
    pub n_points: usize,
}

/// Minimum (traffic, mean delay) observations for the regression.
pub const MIN_FIT_POINTS: usize = 50;

/// Groups records into per-(day, hour) observations of (departures, mean
/// delay), hours 05..=22 only.
fn hourly_observations(records: &[FlightRecord]) -> Vec<(f64, f64)> {
    let mut bins: BTreeMap<(NaiveDate, u8), (u64, f64)> = BTreeMap::new();
    for r in records {
        if (FIRST_HOUR..=LAST_HOUR).contains(&r.hour) {
            let entry = bins.entry((r.date, r.hour)).or_insert((0, 0.0));
            entry.0 += 1;
            entry.1 += r.delay_min;
        }
    }
    bins.values()
        .map(|&(count, delay_sum)| (count as f64, delay_sum / count as f64))
        .collect()
}

/// Least-squares fit of the exponential delay–traffic law over per-hour
/// observations. The offset is profiled out analytically (the law is linear
/// in it), leaving a one-dimensional search over the capacity.
pub fn fit_delay_capacity(records: &[FlightRecord]) -> Result<DelayCapacityFit> {
    let points = hourly_observations(records);
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientSamples {
            got: points.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let t_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if t_min == t_max {
        return Err(Error::DegenerateRegressor { value: t_min });
    }

    let n = points.len() as f64;
    let mean_delay = points.iter().map(|p| p.1).sum::<f64>() / n;

    // SSE with the offset profiled out at fixed capacity.
    let sse_at = |capacity: f64| -> f64 {
        let mean_exp = points
            .iter()
            .map(|p| (p.0 / capacity).exp())
            .sum::<f64>()
            / n;
        points
            .iter()
            .map(|p| {
                let r = 120.0 * ((p.0 / capacity).exp() - mean_exp) - (p.1 - mean_delay);
                r * r
            })
            .sum()
    };

    // Coarse log-spaced scan, then golden refinement of the best bracket.
    let c_lo = (t_max / 10.0).max(1e-3);
    let c_hi = t_max * 1000.0;
    const SCAN: usize = 256;
    let ratio = (c_hi / c_lo).ln();
    let mut best_i = 0;
    let mut best_sse = f64::INFINITY;
    for i in 0..=SCAN {
        let c = c_lo * (ratio * i as f64 / SCAN as f64).exp();
        let sse = sse_at(c);
        if sse < best_sse {
            best_sse = sse;
            best_i = i;
        }
    }
    let bracket_lo = c_lo * (ratio * best_i.saturating_sub(1) as f64 / SCAN as f64).exp();
    let bracket_hi = c_lo * (ratio * (best_i + 1).min(SCAN) as f64 / SCAN as f64).exp();
    let (capacity, _) = golden_min(sse_at, bracket_lo, bracket_hi, 1e-10 * bracket_hi);

    let mean_exp = points
        .iter()
        .map(|p| (p.0 / capacity).exp())
        .sum::<f64>()
        / n;
    let delay_offset = mean_exp - mean_delay / 120.0;
    if !capacity.is_finite() || !delay_offset.is_finite() || delay_offset <= 0.0 {
        return Err(Error::FitDivergence {
            reason: format!(
                "delay-capacity fit produced capacity {capacity}, offset {delay_offset}"
            ),
        });
    }

    let observed: Vec<f64> = points.iter().map(|p| p.1).collect();
    let predicted: Vec<f64> = points
        .iter()
        .map(|p| 120.0 * ((p.0 / capacity).exp() - delay_offset))
        .collect();
    let traffic: Vec<f64> = points.iter().map(|p| p.0).collect();
    let (_, _, linear_r2) = linear_fit(&traffic, &observed);

    Ok(DelayCapacityFit {
        capacity,
        delay_offset,
        r_squared: r_squared(&observed, &predicted),
        linear_r_squared: linear_r2,
        n_points: points.len(),
    })
}

/// Upper cap on the demand search; beyond this the observed traffic is
/// declared unreachable for the given smoothness.
const DEMAND_CAP: f64 = 1e12;

/// Finds the potential demand β whose equilibrium reproduces the window's
/// observed traffic to 1e-6 flights/hour. Realized traffic is monotone
/// non-decreasing in β, so a bracketing search suffices.
pub fn post_calibrate_beta(
    window: &HourWindow,
    capacity: f64,
    curve: &CorrectedCostCurve,
    smoothness: f64,
    delay_offset: f64,
) -> Result<f64> {
    let target = window.observed_traffic;
    if target == 0.0 {
        return Ok(0.0);
    }

    let shortfall = |beta: f64| -> Result<f64> {
        Ok(
            equilibrium::realized_traffic(window, beta, capacity, curve, smoothness, delay_offset)?
                - target,
        )
    };

    // realized(target) <= target because P_a <= 1 on validated curves, so
    // the target itself is a valid lower bracket; for robustness fall back
    // to zero when an unvalidated curve breaks that.
    let mut lo = target;
    let mut f_lo = shortfall(lo)?;
    if f_lo > 0.0 {
        lo = 0.0;
        f_lo = -target;
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let mut hi = (2.0 * target).max(1.0);
    let mut f_hi = shortfall(hi)?;
    while f_hi < 0.0 {
        hi *= 2.0;
        if hi > DEMAND_CAP {
            let max_achievable = shortfall(DEMAND_CAP)? + target;
            return Err(Error::DemandUnreachable {
                target,
                max_achievable,
                cap: DEMAND_CAP,
            });
        }
        f_hi = shortfall(hi)?;
    }

    let root = brent_root(
        |beta| shortfall(beta).unwrap_or(f64::NAN),
        lo,
        hi,
        RootOptions {
            width_tol: 1e-9 * hi.max(1.0),
            residual_tol: 1e-6,
            max_iterations: 200,
        },
    )?;
    Ok(root.root)
}

/// Per-window distribution-fit diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowDiagnostics {
    pub hour: u8,
    pub n_samples: usize,
    pub sample_mean: f64,
    pub fitted_mean: f64,
    pub mean_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationDiagnostics {
    pub delay_traffic_r_squared: f64,
    pub linear_fit_r_squared: f64,
    pub regression_points: usize,
    pub per_window: Vec<WindowDiagnostics>,
}

/// A fully calibrated airport model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedAirport {
    pub params: AirportParameters,
    pub coeffs: CostCoefficients,
    /// The 18 windows, sorted by hour, each with distribution and demand.
    pub windows: Vec<HourWindow>,
    /// Corrected-cost curve at sigma scale 1.
    pub curve: CorrectedCostCurve,
    pub diagnostics: CalibrationDiagnostics,
    /// Traffic-weighted mean of the window distribution means, minutes.
    pub baseline_mean_delay: f64,
}

impl CalibratedAirport {
    /// Rebuilds the corrected-cost curve (used by predictability sweeps).
    pub fn curve_at_scale(&self, sigma_scale: f64) -> Result<CorrectedCostCurve> {
        build_corrected_curve(
            &self.windows,
            sigma_scale,
            self.params.sqrt_mtow,
            &self.coeffs,
        )
    }
}

/// Traffic-weighted mean of the window distribution means.
pub fn traffic_weighted_mean_delay(windows: &[HourWindow]) -> f64 {
    let total: f64 = windows.iter().map(|w| w.observed_traffic).sum();
    if total <= 0.0 {
        return 0.0;
    }
    windows
        .iter()
        .map(|w| w.observed_traffic * w.delay_dist.mean())
        .sum::<f64>()
        / total
}

fn stage<T>(name: &'static str, result: Result<T>) -> Result<T> {
    result.map_err(|e| Error::CalibrationStage {
        stage: name,
        source: Box::new(e),
    })
}

/// Runs the full pipeline: direct calibration, delay–capacity fit,
/// per-window lognormal fits, corrected-cost curve at scale 1, and
/// per-window demand post-calibration.
pub fn calibrate_airport(
    financials: &AirportFinancials,
    records: &[FlightRecord],
    smoothness: f64,
    coeffs: &CostCoefficients,
) -> Result<CalibratedAirport> {
    if smoothness <= 0.0 || !smoothness.is_finite() {
        return Err(Error::InvalidParameter {
            name: "smoothness",
            value: smoothness,
            reason: "must be > 0",
        });
    }
    stage("validate", coeffs.validate())?;
    for r in records {
        stage("validate", r.validate())?;
    }

    // Pool delays per hour of day across the period; every window must be
    // covered before any fitting starts.
    let mut per_hour: BTreeMap<u8, Vec<f64>> = BTreeMap::new();
    for r in records {
        if (FIRST_HOUR..=LAST_HOUR).contains(&r.hour) {
            per_hour.entry(r.hour).or_default().push(r.delay_min);
        }
    }
    let missing: Vec<u8> = (FIRST_HOUR..=LAST_HOUR)
        .filter(|h| !per_hour.contains_key(h))
        .collect();
    if !missing.is_empty() {
        return Err(Error::CalibrationStage {
            stage: "distributions",
            source: Box::new(Error::MissingWindows { hours: missing }),
        });
    }

    let direct = stage("direct", direct_calibrate(financials, records))?;
    let dc_fit = stage("delay-capacity", fit_delay_capacity(records))?;

    let mut windows = Vec::with_capacity(WINDOWS_PER_DAY);
    let mut per_window_diag = Vec::with_capacity(WINDOWS_PER_DAY);
    for (&hour, delays) in &per_hour {
        let fitted = stage("distributions", fit_shifted_lognormal(delays))?;
        per_window_diag.push(WindowDiagnostics {
            hour,
            n_samples: delays.len(),
            sample_mean: fitted.sample_mean,
            fitted_mean: fitted.fitted_mean,
            mean_warning: fitted.mean_warning,
        });
        windows.push(HourWindow {
            hour,
            observed_traffic: direct.observed_traffic[(hour - FIRST_HOUR) as usize],
            demand: 0.0,
            delay_dist: fitted.dist,
        });
    }

    let curve = stage(
        "cost-curve",
        build_corrected_curve(&windows, 1.0, direct.sqrt_mtow, coeffs),
    )?;

    for window in &mut windows {
        window.demand = stage(
            "post-calibration",
            post_calibrate_beta(
                window,
                dc_fit.capacity,
                &curve,
                smoothness,
                dc_fit.delay_offset,
            ),
        )?;
    }

    let params = stage(
        "assembly",
        AirportParameters {
            pax_per_flight: direct.pax_per_flight,
            aero_revenue_per_flight: direct.aero_revenue_per_flight,
            non_aero_revenue_per_pax: direct.non_aero_revenue_per_pax,
            capacity: dc_fit.capacity,
            delay_offset: dc_fit.delay_offset,
            operating_cost_per_hour: direct.operating_cost_per_hour,
            sqrt_mtow: direct.sqrt_mtow,
            smoothness,
            value_of_time: direct.value_of_time,
        }
        .validated(),
    )?;

    let baseline_mean_delay = traffic_weighted_mean_delay(&windows);
    Ok(CalibratedAirport {
        params,
        coeffs: *coeffs,
        windows,
        curve,
        diagnostics: CalibrationDiagnostics {
            delay_traffic_r_squared: dc_fit.r_squared,
            linear_fit_r_squared: dc_fit.linear_r_squared,
            regression_points: dc_fit.n_points,
            per_window: per_window_diag,
        },
        baseline_mean_delay,
    })
}
