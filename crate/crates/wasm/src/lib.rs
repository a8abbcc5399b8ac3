//! Browser bindings for the capacity-economics engine. A built-in demo
//! airport is calibrated once at startup; three interactive operations
//! drive the plots: the profit-vs-capacity sweep (with an optional
//! delay-dependent passenger-spend model), the per-window demand/supply
//! trace, and the corrected-cost curve family across sigma scales.

use aircap_core::cost::scale_sigma;
use aircap_core::equilibrium::{demand_supply_trace, solve_window};
use aircap_core::experiments::{exploratory_profit, ExploratorySpendParams, Grid};
use aircap_core::fixtures;
use aircap_core::model::delay_from_traffic;
use aircap_core::CalibratedAirport;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn stringify(e: impl std::fmt::Display) -> String {
    e.to_string()
}

#[wasm_bindgen]
pub struct DemoAirport {
    model: CalibratedAirport,
}

#[wasm_bindgen]
impl DemoAirport {
    /// Builds the demo airport (deterministic, no inputs).
    #[wasm_bindgen(constructor)]
    pub fn new() -> DemoAirport {
        DemoAirport {
            model: fixtures::demo_airport(),
        }
    }

    /// Headline facts for the page: capacity, traffic profile, revenue
    /// parameters.
    pub fn describe(&self) -> String {
        let p = &self.model.params;
        json!({
            "capacity": p.capacity,
            "delay_offset": p.delay_offset,
            "pax_per_flight": p.pax_per_flight,
            "aero_revenue_per_flight": p.aero_revenue_per_flight,
            "non_aero_revenue_per_pax": p.non_aero_revenue_per_pax,
            "operating_cost_per_hour": p.operating_cost_per_hour,
            "smoothness": p.smoothness,
            "baseline_mean_delay": self.model.baseline_mean_delay,
            "hours": self.model.windows.iter().map(|w| w.hour).collect::<Vec<_>>(),
            "traffic": self.model.windows.iter()
                .map(|w| w.observed_traffic).collect::<Vec<_>>(),
        })
        .to_string()
    }

    /// Daily profit over a capacity grid at marginal capacity cost `alpha`,
    /// with the delay-dependent spend model applied when `time_elasticity`
    /// or `satisfaction_elasticity` are nonzero. Returns rows plus every
    /// local maximum.
    pub fn profit_curve(
        &self,
        alpha: f64,
        time_elasticity: f64,
        satisfaction_elasticity: f64,
        c_min: f64,
        c_max: f64,
        steps: usize,
    ) -> Result<String, JsValue> {
        self.profit_curve_impl(alpha, time_elasticity, satisfaction_elasticity, c_min, c_max, steps)
            .map_err(|e| JsValue::from_str(&e))
    }

    /// Demand and supply sides of the implicit delay equation for one hour
    /// window at the given capacity, plus the solved equilibrium.
    pub fn trace_window(&self, hour: u8, capacity: f64) -> Result<String, JsValue> {
        self.trace_window_impl(hour, capacity).map_err(|e| JsValue::from_str(&e))
    }

    /// Expected-cost points and the fitted corrected-cost curve at a sigma
    /// scale `k`, sampled over the data range, with the uncorrected cost
    /// for reference.
    pub fn cost_curve(&self, sigma_scale: f64) -> Result<String, JsValue> {
        self.cost_curve_impl(sigma_scale).map_err(|e| JsValue::from_str(&e))
    }
}

impl DemoAirport {
    fn profit_curve_impl(
        &self,
        alpha: f64,
        time_elasticity: f64,
        satisfaction_elasticity: f64,
        c_min: f64,
        c_max: f64,
        steps: usize,
    ) -> Result<String, String> {
        let spend = ExploratorySpendParams {
            time_elasticity,
            satisfaction_elasticity,
        };
        let grid = Grid {
            min: c_min,
            max: c_max,
            steps,
        };
        let sweep =
            exploratory_profit(&self.model, alpha, &spend, &grid).map_err(stringify)?;
        let rows: Vec<_> = sweep
            .rows
            .iter()
            .filter_map(|r| {
                r.outcome.as_ref().ok().map(|p| {
                    json!({
                        "capacity": r.capacity,
                        "profit": p.operating_profit,
                        "mean_delay": p.mean_delay(),
                    })
                })
            })
            .collect();
        Ok(json!({
            "rows": rows,
            "maxima": sweep.maxima.iter().map(|m| json!({
                "capacity": m.capacity, "profit": m.profit,
            })).collect::<Vec<_>>(),
            "current_capacity": self.model.params.capacity,
        })
        .to_string())
    }

    fn trace_window_impl(&self, hour: u8, capacity: f64) -> Result<String, String> {
        let window = self
            .model
            .windows
            .iter()
            .find(|w| w.hour == hour)
            .ok_or_else(|| format!("no window for hour {hour}"))?;
        let params = &self.model.params;
        let lo = 120.0 * (1.0 - params.delay_offset) - 5.0;
        let hi = delay_from_traffic(window.demand, capacity, params.delay_offset)
            .map_err(stringify)?
            + 5.0;
        let grid: Vec<f64> = (0..300)
            .map(|i| lo + (hi - lo) * i as f64 / 299.0)
            .collect();
        let rows = demand_supply_trace(
            window,
            capacity,
            &self.model.curve,
            params.smoothness,
            params.delay_offset,
            &grid,
        )
        .map_err(stringify)?;
        let eq = solve_window(
            window,
            capacity,
            &self.model.curve,
            params.smoothness,
            params.delay_offset,
        )
        .map_err(stringify)?;
        Ok(json!({
            "rows": rows.iter().map(|r| json!({
                "delay": r.delay,
                "demand": r.demand,
                "supply": r.supply,
            })).collect::<Vec<_>>(),
            "equilibrium": {
                "mean_delay": eq.mean_delay,
                "operate_prob": eq.operate_prob,
                "realized_traffic": eq.realized_traffic,
            },
            "demand_beta": window.demand,
            "observed_traffic": window.observed_traffic,
        })
        .to_string())
    }

    fn cost_curve_impl(&self, sigma_scale: f64) -> Result<String, String> {
        let curve = self
            .model
            .curve_at_scale(sigma_scale)
            .map_err(stringify)?;
        let (lo, hi) = curve.data_range;
        let span = hi - lo;
        let xs: Vec<f64> = (0..200)
            .map(|i| lo - 0.1 * span + 1.2 * span * i as f64 / 199.0)
            .collect();
        let scaled_sd: Vec<f64> = self
            .model
            .windows
            .iter()
            .map(|w| {
                scale_sigma(&w.delay_dist, sigma_scale)
                    .map(|d| d.std_dev())
                    .unwrap_or(f64::NAN)
            })
            .collect();
        Ok(json!({
            "sigma_scale": sigma_scale,
            "r_squared": curve.fit.r_squared,
            "points": curve.points.iter().map(|p| json!({
                "mean_delay": p.mean_delay, "expected_cost": p.expected_cost,
            })).collect::<Vec<_>>(),
            "fitted": xs.iter().map(|&x| json!({
                "mean_delay": x, "cost": curve.value(x),
            })).collect::<Vec<_>>(),
            "raw": xs.iter().map(|&x| json!({
                "mean_delay": x, "cost": curve.raw(x),
            })).collect::<Vec<_>>(),
            "window_sd": scaled_sd,
        })
        .to_string())
    }
}

impl Default for DemoAirport {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exports_produce_valid_json() {
        let demo = DemoAirport::new();
        let described: serde_json::Value =
            serde_json::from_str(&demo.describe()).unwrap();
        assert_eq!(described["hours"].as_array().unwrap().len(), 18);

        let profit: serde_json::Value = serde_json::from_str(
            &demo.profit_curve_impl(200.0, 0.0, 0.0, 60.0, 300.0, 25).unwrap(),
        )
        .unwrap();
        assert_eq!(profit["rows"].as_array().unwrap().len(), 25);

        let trace: serde_json::Value =
            serde_json::from_str(&demo.trace_window_impl(10, 100.0).unwrap()).unwrap();
        assert!(trace["equilibrium"]["mean_delay"].as_f64().unwrap() > 0.0);
        assert!(demo.trace_window_impl(3, 100.0).is_err());

        let curve: serde_json::Value =
            serde_json::from_str(&demo.cost_curve_impl(0.5).unwrap()).unwrap();
        assert_eq!(curve["points"].as_array().unwrap().len(), 18);
        assert!(curve["r_squared"].as_f64().unwrap() > 0.9);
        assert!(demo.cost_curve_impl(1.5).is_err());
    }

    #[test]
    fn exploratory_parameters_reshape_profit() {
        let demo = DemoAirport::new();
        let plain: serde_json::Value = serde_json::from_str(
            &demo.profit_curve_impl(700.0, 0.0, 0.0, 60.0, 360.0, 31).unwrap(),
        )
        .unwrap();
        let shaped: serde_json::Value = serde_json::from_str(
            &demo.profit_curve_impl(700.0, 4.0, 60.0, 60.0, 360.0, 31).unwrap(),
        )
        .unwrap();
        assert_ne!(plain["rows"], shaped["rows"]);
    }
}
