//! Scenario configuration: a JSON file validated strictly (unknown keys are
//! rejected) with documented defaults for everything an experiment needs.

use std::path::{Path, PathBuf};

use aircap_core::experiments::Grid;
use aircap_core::model::CostCoefficients;
use aircap_core::CalibratedAirport;
use serde::{Deserialize, Serialize};

/// Default marginal capacity operating cost, euros per flight per hour.
pub const DEFAULT_ALPHA: f64 = 60_000.0;
/// Default airline decision smoothness, euros.
pub const DEFAULT_SMOOTHNESS: f64 = 500.0;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Flight-record CSV (`date,hour,minute,delay_min,mtow_t[,pax]`).
    pub records: Option<PathBuf>,
    /// Financials key=value file.
    pub financials: Option<PathBuf>,
    /// Output directory; overridden by `--out`.
    pub output_dir: Option<PathBuf>,
    /// Calibrated model file written by `calibrate` and read by `run`.
    pub model: Option<PathBuf>,
    /// Model files for `run compare-airports`.
    pub models: Option<Vec<PathBuf>>,
    /// Cost-coefficient preset name (`paper`, `sign-swapped`) or explicit
    /// values; overridden by `--coeffs`.
    pub coefficients: Option<CoefficientsSpec>,
    pub smoothness: Option<f64>,
    /// Marginal capacity operating cost used by sweeps.
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub capacity_grid: Option<Grid>,
    pub nf_grid: Option<Grid>,
    /// Sigma scales for the predictability sweep, each in (0, 1].
    pub predictability_grid: Option<Vec<f64>>,
    pub smoothness_grid: Option<Vec<f64>>,
    pub exploratory: Option<ExploratoryConfig>,
    /// Capacity increment for break-even analysis, flights/hour.
    pub breakeven_delta_c: Option<f64>,
    pub trace: Option<TraceConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientsSpec {
    Preset(String),
    Explicit(CostCoefficients),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExploratoryConfig {
    pub time_elasticity: f64,
    pub satisfaction_elasticity: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    /// Hour window to trace; defaults to the busiest window.
    pub hour: Option<u8>,
    /// Capacity at which to trace; defaults to the calibrated capacity.
    pub capacity: Option<f64>,
    pub min_delay: Option<f64>,
    pub max_delay: Option<f64>,
    pub points: Option<usize>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(DEFAULT_ALPHA)
    }

    pub fn smoothness(&self) -> f64 {
        self.smoothness.unwrap_or(DEFAULT_SMOOTHNESS)
    }

    /// Capacity grid: defaults to 0.6–3× the calibrated capacity.
    pub fn capacity_grid(&self, model: &CalibratedAirport) -> Grid {
        self.capacity_grid.unwrap_or(Grid {
            min: 0.6 * model.params.capacity,
            max: 3.0 * model.params.capacity,
            steps: 49,
        })
    }

    /// Passengers-per-flight grid: defaults to 0.5–3× the calibrated value.
    pub fn nf_grid(&self, model: &CalibratedAirport) -> Grid {
        self.nf_grid.unwrap_or(Grid {
            min: 0.5 * model.params.pax_per_flight,
            max: 3.0 * model.params.pax_per_flight,
            steps: 18,
        })
    }

    pub fn predictability_grid(&self) -> Vec<f64> {
        self.predictability_grid
            .clone()
            .unwrap_or_else(|| vec![1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1])
    }

    /// Smoothness grid: defaults to a log-spaced decade around the default.
    pub fn smoothness_grid(&self) -> Vec<f64> {
        self.smoothness_grid.clone().unwrap_or_else(|| {
            (0..9)
                .map(|i| DEFAULT_SMOOTHNESS * 10f64.powf(-0.5 + i as f64 / 8.0))
                .collect()
        })
    }

    pub fn breakeven_delta_c(&self) -> f64 {
        self.breakeven_delta_c.unwrap_or(1.0)
    }
}

/// Resolves coefficients with precedence: `--coeffs` flag, then config,
/// then the published defaults.
pub fn resolve_coefficients(
    flag: Option<&str>,
    config: &ScenarioConfig,
) -> Result<CostCoefficients, String> {
    if let Some(raw) = flag {
        if let Some(preset) = CostCoefficients::preset(raw) {
            return Ok(preset);
        }
        let path = Path::new(raw);
        if path.exists() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            let coeffs: CostCoefficients = serde_json::from_str(&text)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            return Ok(coeffs);
        }
        return Err(format!(
            "--coeffs `{raw}` is neither a preset (paper, sign-swapped) nor a file"
        ));
    }
    match &config.coefficients {
        None => Ok(CostCoefficients::PAPER),
        Some(CoefficientsSpec::Explicit(c)) => Ok(*c),
        Some(CoefficientsSpec::Preset(name)) => CostCoefficients::preset(name)
            .ok_or_else(|| format!("unknown coefficient preset `{name}`")),
    }
}
