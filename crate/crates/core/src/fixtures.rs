//! Deterministic built-in airports: a mid-size demo model constructed
//! directly (no data files), and a proportional scaling transform for
//! cross-airport comparisons. Used by the test suites, the CLI demo paths,
//! and the browser demo.

use crate::calibration::{
    post_calibrate_beta, traffic_weighted_mean_delay, CalibratedAirport,
    CalibrationDiagnostics, WindowDiagnostics,
};
use crate::cost::{build_corrected_curve, ShiftedLogNormal};
use crate::error::Result;
use crate::model::{
    delay_from_traffic, AirportParameters, CostCoefficients, HourWindow, FIRST_HOUR,
};
use crate::numerics::leastsq::linear_fit;

/// Hourly departure profile of the demo airport (flights/hour, 05:00–22:00):
/// a morning and an evening peak around a midday shoulder.
pub const DEMO_TRAFFIC: [f64; 18] = [
    10.0, 14.0, 22.0, 32.0, 38.0, 40.0, 37.0, 33.0, 30.0, 28.0, 27.0, 28.0, 30.0, 33.0,
    37.0, 39.0, 34.0, 20.0,
];

/// Builds the demo airport: a self-consistent calibrated model whose window
/// distribution means sit exactly on the delay–traffic law, with demand
/// post-calibrated so each window's equilibrium reproduces its observed
/// traffic.
pub fn demo_airport() -> CalibratedAirport {
    try_demo_airport().expect("demo fixture construction is infallible")
}

fn try_demo_airport() -> Result<CalibratedAirport> {
    let params = AirportParameters {
        pax_per_flight: 120.0,
        aero_revenue_per_flight: 2500.0,
        non_aero_revenue_per_pax: 12.0,
        capacity: 100.0,
        delay_offset: 1.15,
        operating_cost_per_hour: 50_000.0,
        sqrt_mtow: 0.8,
        smoothness: 500.0,
        value_of_time: 0.0,
    }
    .validated()?;
    let coeffs = CostCoefficients::PAPER;

    let mut windows = Vec::with_capacity(DEMO_TRAFFIC.len());
    for (i, &traffic) in DEMO_TRAFFIC.iter().enumerate() {
        let mean = delay_from_traffic(traffic, params.capacity, params.delay_offset)?;
        let sigma = 0.55 + 0.01 * i as f64;
        let spread = 20.0 + 0.4 * i as f64;
        windows.push(HourWindow {
            hour: FIRST_HOUR + i as u8,
            observed_traffic: traffic,
            demand: 0.0,
            delay_dist: ShiftedLogNormal::from_mean_spread(mean, spread, sigma)?,
        });
    }

    let curve = build_corrected_curve(&windows, 1.0, params.sqrt_mtow, &coeffs)?;
    for window in &mut windows {
        window.demand = post_calibrate_beta(
            window,
            params.capacity,
            &curve,
            params.smoothness,
            params.delay_offset,
        )?;
    }

    let traffic: Vec<f64> = windows.iter().map(|w| w.observed_traffic).collect();
    let means: Vec<f64> = windows.iter().map(|w| w.delay_dist.mean()).collect();
    let (_, _, linear_r2) = linear_fit(&traffic, &means);
    let per_window = windows
        .iter()
        .map(|w| WindowDiagnostics {
            hour: w.hour,
            n_samples: 0,
            sample_mean: w.delay_dist.mean(),
            fitted_mean: w.delay_dist.mean(),
            mean_warning: false,
        })
        .collect();

    let baseline_mean_delay = traffic_weighted_mean_delay(&windows);
    Ok(CalibratedAirport {
        params,
        coeffs,
        windows,
        curve,
        diagnostics: CalibrationDiagnostics {
            delay_traffic_r_squared: 1.0,
            linear_fit_r_squared: linear_r2,
            regression_points: DEMO_TRAFFIC.len(),
            per_window,
        },
        baseline_mean_delay,
    })
}

/// Proportional scaling of an airport by `factor`: monetary rates per
/// flight/passenger, operating cost, capacity, traffic, and demand all
/// scale together, which leaves the per-flight delay economics (and hence
/// every equilibrium delay) unchanged.
pub fn scale_airport(model: &CalibratedAirport, factor: f64) -> CalibratedAirport {
    assert!(factor > 0.0 && factor.is_finite());
    let mut scaled = model.clone();
    scaled.params.aero_revenue_per_flight *= factor;
    scaled.params.non_aero_revenue_per_pax *= factor;
    scaled.params.operating_cost_per_hour *= factor;
    scaled.params.capacity *= factor;
    for window in &mut scaled.windows {
        window.observed_traffic *= factor;
        window.demand *= factor;
    }
    scaled.baseline_mean_delay = traffic_weighted_mean_delay(&scaled.windows);
    scaled
}
