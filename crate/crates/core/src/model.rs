//! Domain types and the constituent relationships of the airport model:
//! delay formation, airline delay cost, the operate decision, revenues,
//! and the operating cost of capacity, plus daily aggregation over the
//! 18 one-hour windows of the operating day (0500–2200).

use serde::{Deserialize, Serialize};

use crate::calibration::CalibratedAirport;
use crate::cost::ShiftedLogNormal;
use crate::equilibrium;
use crate::error::{Error, Result};

/// First hour window of the operating day.
pub const FIRST_HOUR: u8 = 5;
/// Last hour window of the operating day (window covers 22:00–23:00).
pub const LAST_HOUR: u8 = 22;
/// Number of one-hour windows per operating day.
pub const WINDOWS_PER_DAY: usize = (LAST_HOUR - FIRST_HOUR) as usize + 1;

/// Minutes scale of the delay–traffic law.
pub(crate) const DELAY_SCALE_MIN: f64 = 120.0;

fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { name })
    }
}

/// Quadratic delay-cost coefficients. The effective per-minute and
/// per-minute² coefficients are `linear + linear_mtow·√MTOW` and
/// `quadratic + quadratic_mtow·√MTOW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostCoefficients {
    /// euros per minute
    pub linear: f64,
    /// euros per minute²
    pub quadratic: f64,
    /// euros per minute per √tonne
    pub linear_mtow: f64,
    /// euros per minute² per √tonne
    pub quadratic_mtow: f64,
}

impl CostCoefficients {
    /// Published reference values.
    pub const PAPER: Self = Self {
        linear: 7.0,
        quadratic: 0.18,
        linear_mtow: -6.0,
        quadratic_mtow: -0.092,
    };

    /// Same magnitudes with the MTOW-free and MTOW terms transposed. The
    /// published signs make the effective coefficients negative for
    /// √MTOW ≳ 1.17, i.e. negative delay costs for any realistic fleet;
    /// this preset keeps them positive instead.
    pub const SIGN_SWAPPED: Self = Self {
        linear: -7.0,
        quadratic: -0.18,
        linear_mtow: 6.0,
        quadratic_mtow: 0.092,
    };

    /// All-zero coefficients (costless delay).
    pub const ZERO: Self = Self {
        linear: 0.0,
        quadratic: 0.0,
        linear_mtow: 0.0,
        quadratic_mtow: 0.0,
    };

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "paper" => Some(Self::PAPER),
            "sign-swapped" => Some(Self::SIGN_SWAPPED),
            _ => None,
        }
    }

    /// Effective `(per-minute, per-minute²)` coefficients for a fleet.
    pub fn effective(&self, sqrt_mtow: f64) -> (f64, f64) {
        (
            self.linear + self.linear_mtow * sqrt_mtow,
            self.quadratic + self.quadratic_mtow * sqrt_mtow,
        )
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("linear", self.linear)?;
        ensure_finite("quadratic", self.quadratic)?;
        ensure_finite("linear_mtow", self.linear_mtow)?;
        ensure_finite("quadratic_mtow", self.quadratic_mtow)
    }
}

impl Default for CostCoefficients {
    fn default() -> Self {
        Self::PAPER
    }
}

/// Per-airport calibrated constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirportParameters {
    /// Average passengers per flight (> 0).
    pub pax_per_flight: f64,
    /// Aeronautical revenue per flight, euros (≥ 0).
    pub aero_revenue_per_flight: f64,
    /// Non-aeronautical revenue per passenger, euros (≥ 0).
    pub non_aero_revenue_per_pax: f64,
    /// Current departure capacity, flights/hour (> 0).
    pub capacity: f64,
    /// Dimensionless delay offset at zero traffic (> 0).
    pub delay_offset: f64,
    /// Current total operating cost, euros/hour (≥ 0).
    pub operating_cost_per_hour: f64,
    /// Fleet-average √MTOW, √tonnes (≥ 0).
    pub sqrt_mtow: f64,
    /// Airline decision smoothness, euros (> 0).
    pub smoothness: f64,
    /// Value of time, euros/minute (≥ 0). Stored and ingested for
    /// completeness; no relationship in the model consumes it.
    pub value_of_time: f64,
}

impl AirportParameters {
    /// Bounds-checks every field; returns `self` unchanged when valid.
    pub fn validated(self) -> Result<Self> {
        let positive = |name, value: f64| -> Result<()> {
            ensure_finite(name, value)?;
            if value > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be > 0",
                })
            }
        };
        let non_negative = |name, value: f64| -> Result<()> {
            ensure_finite(name, value)?;
            if value >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be >= 0",
                })
            }
        };
        positive("pax_per_flight", self.pax_per_flight)?;
        non_negative("aero_revenue_per_flight", self.aero_revenue_per_flight)?;
        non_negative("non_aero_revenue_per_pax", self.non_aero_revenue_per_pax)?;
        positive("capacity", self.capacity)?;
        positive("delay_offset", self.delay_offset)?;
        non_negative("operating_cost_per_hour", self.operating_cost_per_hour)?;
        non_negative("sqrt_mtow", self.sqrt_mtow)?;
        positive("smoothness", self.smoothness)?;
        non_negative("value_of_time", self.value_of_time)?;
        Ok(self)
    }
}

/// One one-hour slice of the operating day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourWindow {
    /// Start hour, in `FIRST_HOUR..=LAST_HOUR`.
    pub hour: u8,
    /// Observed mean departures in this window, flights/hour.
    pub observed_traffic: f64,
    /// Potential demand β, flights/hour. Zero until post-calibration.
    pub demand: f64,
    /// Fitted delay distribution for this window.
    pub delay_dist: ShiftedLogNormal,
}

impl HourWindow {
    pub fn validate(&self) -> Result<()> {
        if !(FIRST_HOUR..=LAST_HOUR).contains(&self.hour) {
            return Err(Error::InvalidParameter {
                name: "hour",
                value: self.hour as f64,
                reason: "must be in 5..=22",
            });
        }
        ensure_finite("observed_traffic", self.observed_traffic)?;
        if self.observed_traffic < 0.0 {
            return Err(Error::InvalidParameter {
                name: "observed_traffic",
                value: self.observed_traffic,
                reason: "must be >= 0",
            });
        }
        ensure_finite("demand", self.demand)?;
        if self.demand < 0.0 {
            return Err(Error::InvalidParameter {
                name: "demand",
                value: self.demand,
                reason: "must be >= 0",
            });
        }
        self.delay_dist.validate()
    }
}

/// Checks that `windows` is exactly the 18 hours 05..=22, in order.
pub fn validate_day(windows: &[HourWindow]) -> Result<()> {
    let missing: Vec<u8> = (FIRST_HOUR..=LAST_HOUR)
        .filter(|h| !windows.iter().any(|w| w.hour == *h))
        .collect();
    if !missing.is_empty() || windows.len() != WINDOWS_PER_DAY {
        return Err(Error::MissingWindows { hours: missing });
    }
    for pair in windows.windows(2) {
        if pair[1].hour <= pair[0].hour {
            return Err(Error::InvalidParameter {
                name: "hour",
                value: pair[1].hour as f64,
                reason: "windows must be sorted by hour without duplicates",
            });
        }
    }
    for w in windows {
        w.validate()?;
    }
    Ok(())
}

/// Mean departure delay (minutes) generated by traffic `T` at capacity `C`:
/// `120·(exp(T/C) − cc)`. Negative values are the early-departure regime.
pub fn delay_from_traffic(traffic: f64, capacity: f64, delay_offset: f64) -> Result<f64> {
    ensure_finite("traffic", traffic)?;
    ensure_finite("capacity", capacity)?;
    ensure_finite("delay_offset", delay_offset)?;
    if capacity <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "capacity",
            value: capacity,
            reason: "must be > 0",
        });
    }
    if delay_offset <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "delay_offset",
            value: delay_offset,
            reason: "must be > 0",
        });
    }
    if traffic < 0.0 {
        return Err(Error::InvalidParameter {
            name: "traffic",
            value: traffic,
            reason: "must be >= 0",
        });
    }
    Ok(DELAY_SCALE_MIN * ((traffic / capacity).exp() - delay_offset))
}

/// Exact inverse of [`delay_from_traffic`]: `C·ln(delay/120 + cc)`.
pub fn traffic_from_delay(mean_delay: f64, capacity: f64, delay_offset: f64) -> Result<f64> {
    ensure_finite("mean_delay", mean_delay)?;
    ensure_finite("capacity", capacity)?;
    if capacity <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "capacity",
            value: capacity,
            reason: "must be > 0",
        });
    }
    let argument = mean_delay / DELAY_SCALE_MIN + delay_offset;
    if argument <= 0.0 {
        return Err(Error::LogDomain { argument });
    }
    Ok(capacity * argument.ln())
}

/// Cost kernel without validation; used by the quadrature inner loop.
/// `a_eff`/`b_eff` are the effective coefficients for the fleet.
#[inline]
pub(crate) fn raw_cost_kernel(delay: f64, a_eff: f64, b_eff: f64) -> f64 {
    if delay < 0.0 {
        0.0
    } else {
        (a_eff + b_eff * delay) * delay
    }
}

/// Cost of an individual flight delay (euros): quadratic in the delay for
/// non-negative delays, zero otherwise (early departures yield no gain).
pub fn raw_cost_of_delay(delay: f64, sqrt_mtow: f64, coeffs: &CostCoefficients) -> Result<f64> {
    ensure_finite("delay", delay)?;
    ensure_finite("sqrt_mtow", sqrt_mtow)?;
    coeffs.validate()?;
    let (a_eff, b_eff) = coeffs.effective(sqrt_mtow);
    Ok(raw_cost_kernel(delay, a_eff, b_eff))
}

/// Logistic kernel without validation.
#[inline]
pub(crate) fn operate_probability_kernel(cost: f64, smoothness: f64) -> f64 {
    // exp overflows to +inf for large cost; 2/(1+inf) saturates to 0 cleanly.
    2.0 / (1.0 + (cost / smoothness).exp())
}

/// Probability that the airline operates a flight facing `cost` euros of
/// expected delay cost: `2/(1 + e^{cost/s})`. Equals 1 at zero cost and
/// decreases monotonically; values above 1 only arise from negative costs.
pub fn operate_probability(cost: f64, smoothness: f64) -> Result<f64> {
    ensure_finite("cost", cost)?;
    ensure_finite("smoothness", smoothness)?;
    if smoothness <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "smoothness",
            value: smoothness,
            reason: "must be > 0",
        });
    }
    Ok(operate_probability_kernel(cost, smoothness))
}

/// Revenue for one window, split into its aeronautical and non-aeronautical
/// parts (euros/hour).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HourlyRevenue {
    pub aero: f64,
    pub non_aero: f64,
}

impl HourlyRevenue {
    pub fn total(&self) -> f64 {
        self.aero + self.non_aero
    }
}

/// Airport revenue for one window: `(P + n_f·w)·P_a·β`, reported with the
/// aeronautical (per flight) and non-aeronautical (per passenger) parts
/// separated. `w` is passed explicitly so spend models can vary it.
pub fn hourly_revenue(
    params: &AirportParameters,
    revenue_per_pax: f64,
    operate_prob: f64,
    demand: f64,
) -> HourlyRevenue {
    let realized = operate_prob * demand;
    HourlyRevenue {
        aero: params.aero_revenue_per_flight * realized,
        non_aero: params.pax_per_flight * revenue_per_pax * realized,
    }
}

/// Operating cost of holding capacity `C` (euros/hour):
/// `alpha·(C − C_init) + c_init`. Valid below the current capacity as well.
pub fn capacity_cost(alpha: f64, capacity: f64, params: &AirportParameters) -> Result<f64> {
    ensure_finite("alpha", alpha)?;
    ensure_finite("capacity", capacity)?;
    if capacity <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "capacity",
            value: capacity,
            reason: "must be > 0",
        });
    }
    Ok(alpha * (capacity - params.capacity) + params.operating_cost_per_hour)
}

/// Per-window outcome inside a [`ProfitBreakdown`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowOutcome {
    pub hour: u8,
    /// Total revenue in this window, euros/hour.
    pub revenue: f64,
    /// Realized traffic, flights/hour.
    pub traffic: f64,
    /// Equilibrium mean delay, minutes.
    pub mean_delay: f64,
}

/// Daily operating-profit aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfitBreakdown {
    pub aero_revenue: f64,
    pub non_aero_revenue: f64,
    pub capacity_cost: f64,
    /// Aero + non-aero − capacity cost, computed exactly in that order.
    pub operating_profit: f64,
    pub per_window: Vec<WindowOutcome>,
}

impl ProfitBreakdown {
    /// Traffic-weighted mean equilibrium delay across windows (minutes).
    pub fn mean_delay(&self) -> f64 {
        let total: f64 = self.per_window.iter().map(|w| w.traffic).sum();
        if total <= 0.0 {
            return 0.0;
        }
        self.per_window
            .iter()
            .map(|w| w.traffic * w.mean_delay)
            .sum::<f64>()
            / total
    }
}

/// Daily profit at capacity `C` and marginal capacity cost `alpha`:
/// each window's equilibrium is solved independently, revenues are summed,
/// and one hourly capacity cost is charged per window.
pub fn daily_profit(
    airport: &CalibratedAirport,
    capacity: f64,
    alpha: f64,
) -> Result<ProfitBreakdown> {
    let w_init = airport.params.non_aero_revenue_per_pax;
    daily_profit_with_spend(airport, capacity, alpha, |_| w_init)
}

/// Shared daily evaluator: `revenue_per_pax(mean_delay)` supplies the
/// non-aeronautical revenue per passenger for each window, letting spend
/// models reshape revenue without touching the equilibrium.
pub fn daily_profit_with_spend(
    airport: &CalibratedAirport,
    capacity: f64,
    alpha: f64,
    revenue_per_pax: impl Fn(f64) -> f64,
) -> Result<ProfitBreakdown> {
    let params = &airport.params;
    let mut aero = 0.0;
    let mut non_aero = 0.0;
    let mut per_window = Vec::with_capacity(airport.windows.len());

    for window in &airport.windows {
        let eq = equilibrium::solve_window(
            window,
            capacity,
            &airport.curve,
            params.smoothness,
            params.delay_offset,
        )
        .map_err(|e| Error::WindowSolve {
            hour: window.hour,
            source: Box::new(e),
        })?;

        let w = revenue_per_pax(eq.mean_delay);
        let revenue = hourly_revenue(params, w, eq.operate_prob, window.demand);
        aero += revenue.aero;
        non_aero += revenue.non_aero;
        per_window.push(WindowOutcome {
            hour: window.hour,
            revenue: revenue.total(),
            traffic: eq.realized_traffic,
            mean_delay: eq.mean_delay,
        });
    }

    let hourly_cost = capacity_cost(alpha, capacity, params)?;
    let total_cost = WINDOWS_PER_DAY as f64 * hourly_cost;
    Ok(ProfitBreakdown {
        aero_revenue: aero,
        non_aero_revenue: non_aero,
        capacity_cost: total_cost,
        operating_profit: aero + non_aero - total_cost,
        per_window,
    })
}
