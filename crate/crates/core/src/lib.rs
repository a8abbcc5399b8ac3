//! Economic value of additional airport departure capacity.
//!
//! The model links hourly departure traffic to the delay it generates, the
//! delay to an expected cost for airlines (over the full per-window delay
//! distribution, not just its mean), that cost to the airlines' willingness
//! to operate, and the resulting traffic to airport revenue against the
//! operating cost of the capacity. Each of the 18 one-hour windows of the
//! operating day is solved as a small demand/supply equilibrium in the mean
//! delay; daily sweeps over capacity, fleet mix, predictability, and cost
//! parameters locate profit-optimal capacity.
//!
//! Modules:
//! - [`model`]: domain types and the constituent relationships.
//! - [`cost`]: expected delay cost and the corrected-cost curve.
//! - [`equilibrium`]: the per-window implicit-equation solver.
//! - [`calibration`]: the three-stage calibration pipeline.
//! - [`experiments`]: the sweep and comparison suite.
//! - [`data_io`]: CSV/JSON ingestion and output, synthetic data generation.
//! - [`fixtures`]: deterministic built-in demo airports.

pub mod calibration;
pub mod cost;
pub mod data_io;
pub mod equilibrium;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod model;
pub mod numerics;

pub use calibration::{
    calibrate_airport, AirportFinancials, CalibratedAirport, FlightRecord,
};
pub use cost::{
    build_corrected_curve, expected_cost, fit_shifted_lognormal, scale_sigma,
    CorrectedCostCurve, ShiftedLogNormal,
};
pub use equilibrium::{demand_supply_trace, solve_window, EquilibriumResult};
pub use error::{Error, Result};
pub use experiments::{
    breakeven_alpha, compare_airports, exploratory_profit, sensitivity_smoothness,
    sweep_capacity, sweep_nf, sweep_predictability, ExploratorySpendParams, Grid,
};
pub use model::{
    daily_profit, delay_from_traffic, operate_probability, raw_cost_of_delay,
    traffic_from_delay, AirportParameters, CostCoefficients, HourWindow, ProfitBreakdown,
};
