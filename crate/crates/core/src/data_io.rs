//! File ingestion, result writing, model persistence, and the synthetic
//! airport generator that provides ground truth for round-trip tests.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::calibration::{AirportFinancials, CalibratedAirport, FlightRecord};
use crate::cost::{build_corrected_curve, CorrectedCostCurve, ShiftedLogNormal};
use crate::equilibrium;
use crate::error::{Error, Result};
use crate::model::{AirportParameters, CostCoefficients, HourWindow, FIRST_HOUR, WINDOWS_PER_DAY};

/// Schema version written into model files.
pub const MODEL_SCHEMA_VERSION: u32 = 1;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Formats a number with 12 significant digits, plain decimal in the
/// common range, scientific for extremes. Locale independent.
pub fn fmt_sig12(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    if (-5..12).contains(&magnitude) {
        let decimals = (11 - magnitude).max(0) as usize;
        let mut s = format!("{value:.decimals$}");
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        s
    } else {
        format!("{value:.11e}")
    }
}

/// A typed cell of a result table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    /// Rendered as an empty CSV field.
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => fmt_sig12(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// Columnar result table with a stable column order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Writes a table as CSV with 12-significant-digit numbers. Empty tables
/// are rejected rather than silently producing a header-only file.
pub fn write_results(table: &Table, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(&table.columns)
        .map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            reason: e.to_string(),
        })?;
    for row in &table.rows {
        let rendered: Vec<String> = row.iter().map(Cell::render).collect();
        writer.write_record(&rendered).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            reason: e.to_string(),
        })?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        reason: e.to_string(),
    })?;
    fs::write(path, bytes).map_err(io_err(path))
}

/// Writes a JSON document with stable key order.
pub fn write_json(value: &Value, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Parsed CSV payload: headers plus per-cell numeric values.
pub type NumericCsv = (Vec<String>, Vec<Vec<Option<f64>>>);

/// Reads a CSV back as numbers; test helper for round-trip checks.
pub fn read_csv_numeric(path: &Path) -> Result<NumericCsv> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        reason: e.to_string(),
    })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            reason: e.to_string(),
        })?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            reason: e.to_string(),
        })?;
        rows.push(record.iter().map(|f| f.parse::<f64>().ok()).collect());
    }
    Ok((headers, rows))
}

/// Outcome of loading a record CSV: parsed rows plus per-line skip reasons.
#[derive(Debug)]
pub struct LoadReport {
    pub records: Vec<FlightRecord>,
    /// (1-based line number, reason) for every skipped row.
    pub skipped: Vec<(usize, String)>,
}

/// Loads flight records from the documented CSV schema:
/// `date,hour,minute,delay_min,mtow_t[,pax]`. Malformed rows are skipped
/// and reported with their line numbers.
pub fn load_records(path: &Path) -> Result<LoadReport> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| Error::EmptyInput {
        path: path.to_path_buf(),
    })?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let required = ["date", "hour", "minute", "delay_min", "mtow_t"];
    for name in required {
        if !columns.contains(&name) {
            return Err(Error::MissingColumn {
                path: path.to_path_buf(),
                column: name.to_string(),
            });
        }
    }
    let index =
        |name: &str| -> usize { columns.iter().position(|c| *c == name).unwrap() };
    let idx_date = index("date");
    let idx_hour = index("hour");
    let idx_minute = index("minute");
    let idx_delay = index("delay_min");
    let idx_mtow = index("mtow_t");
    let idx_pax = columns.iter().position(|c| *c == "pax");

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (line_zero, line) in lines {
        let line_no = line_zero + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = (|| -> std::result::Result<FlightRecord, String> {
            let get = |i: usize| -> std::result::Result<&str, String> {
                fields.get(i).copied().ok_or_else(|| "short row".to_string())
            };
            let date: NaiveDate = get(idx_date)?
                .parse()
                .map_err(|e| format!("bad date: {e}"))?;
            let hour: u8 = get(idx_hour)?
                .parse()
                .map_err(|e| format!("bad hour: {e}"))?;
            let minute: u8 = get(idx_minute)?
                .parse()
                .map_err(|e| format!("bad minute: {e}"))?;
            let delay_min: f64 = get(idx_delay)?
                .parse()
                .map_err(|e| format!("bad delay_min: {e}"))?;
            let mtow_t: f64 = get(idx_mtow)?
                .parse()
                .map_err(|e| format!("bad mtow_t: {e}"))?;
            let pax = match idx_pax {
                Some(i) => match fields.get(i).copied().unwrap_or("") {
                    "" => None,
                    raw => Some(raw.parse().map_err(|e| format!("bad pax: {e}"))?),
                },
                None => None,
            };
            let record = FlightRecord {
                date,
                hour,
                minute,
                delay_min,
                mtow_t,
                pax,
            };
            record.validate().map_err(|e| e.to_string())?;
            Ok(record)
        })();
        match parsed {
            Ok(r) => records.push(r),
            Err(reason) => skipped.push((line_no, reason)),
        }
    }

    if records.is_empty() {
        return Err(Error::EmptyInput {
            path: path.to_path_buf(),
        });
    }
    Ok(LoadReport { records, skipped })
}

/// Loads the flat `key=value` financials file.
pub fn load_financials(path: &Path) -> Result<AirportFinancials> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut fin = AirportFinancials {
        total_flights: f64::NAN,
        total_passengers: f64::NAN,
        total_aero_revenue: f64::NAN,
        total_non_aero_revenue: f64::NAN,
        total_operating_cost: f64::NAN,
        period_days: 0,
        value_of_time: 0.0,
    };
    for (line_zero, line) in text.lines().enumerate() {
        let line_no = line_zero + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            reason: "expected key=value".into(),
        })?;
        let parse = |v: &str| -> Result<f64> {
            v.trim().parse().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                reason: format!("bad number: {e}"),
            })
        };
        match key.trim() {
            "total_flights" => fin.total_flights = parse(value)?,
            "total_passengers" => fin.total_passengers = parse(value)?,
            "total_aero_revenue" => fin.total_aero_revenue = parse(value)?,
            "total_non_aero_revenue" => fin.total_non_aero_revenue = parse(value)?,
            "total_operating_cost" => fin.total_operating_cost = parse(value)?,
            "period_days" => fin.period_days = parse(value)? as u32,
            "value_of_time" => fin.value_of_time = parse(value)?,
            other => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    reason: format!("unknown key `{other}`"),
                })
            }
        }
    }
    for (name, v) in [
        ("total_flights", fin.total_flights),
        ("total_passengers", fin.total_passengers),
        ("total_aero_revenue", fin.total_aero_revenue),
        ("total_non_aero_revenue", fin.total_non_aero_revenue),
        ("total_operating_cost", fin.total_operating_cost),
    ] {
        if v.is_nan() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                reason: format!("missing key `{name}`"),
            });
        }
    }
    fin.validate()?;
    Ok(fin)
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    model: CalibratedAirport,
}

/// Saves a calibrated model as versioned JSON.
pub fn save_model(model: &CalibratedAirport, path: &Path) -> Result<()> {
    let file = ModelFile {
        schema_version: MODEL_SCHEMA_VERSION,
        model: model.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Loads a model file, rejecting unknown schema versions.
pub fn load_model(path: &Path) -> Result<CalibratedAirport> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        reason: e.to_string(),
    })?;
    if file.schema_version != MODEL_SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            got: file.schema_version,
            expected: MODEL_SCHEMA_VERSION,
        });
    }
    Ok(file.model)
}

/// Diagnostic table for one corrected-cost fit.
pub fn curve_diagnostics_table(curve: &CorrectedCostCurve) -> Table {
    let mut table = Table::new(&[
        "mean_delay_min",
        "expected_cost_eur",
        "fitted_cost_eur",
        "raw_cost_eur",
    ]);
    for p in &curve.points {
        table.push(vec![
            Cell::Num(p.mean_delay),
            Cell::Num(p.expected_cost),
            Cell::Num(curve.value(p.mean_delay)),
            Cell::Num(curve.raw(p.mean_delay)),
        ]);
    }
    table
}

/// Specification of a synthetic airport with known ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticAirportSpec {
    /// Ground-truth airport parameters (capacity, offset, money, fleet).
    pub params: AirportParameters,
    pub coeffs: CostCoefficients,
    /// Per-window potential demand β, 18 entries for hours 05..=22.
    pub window_demand: Vec<f64>,
    /// Per-window lognormal shape σ, 18 entries.
    pub window_sigma: Vec<f64>,
    /// Per-window spread `mean − shift` in minutes, 18 entries (> 0).
    pub window_spread: Vec<f64>,
    /// Approximate number of flight records to emit; the period length is
    /// derived from it.
    pub records: u64,
    /// Poisson day-to-day traffic variation switch (0 = fixed schedule).
    pub traffic_noise: f64,
    /// Multiplicative jitter of per-(day,hour) mean delays (0 = exact law).
    pub delay_mean_noise: f64,
    pub seed: u64,
}

impl SyntheticAirportSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.validated()?;
        self.coeffs.validate()?;
        for (name, list) in [
            ("window_demand", &self.window_demand),
            ("window_sigma", &self.window_sigma),
            ("window_spread", &self.window_spread),
        ] {
            if list.len() != WINDOWS_PER_DAY {
                return Err(Error::InvalidSpec {
                    reason: format!("{name} must have {WINDOWS_PER_DAY} entries"),
                });
            }
            if list.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSpec {
                    reason: format!("{name} contains non-finite values"),
                });
            }
        }
        if self.window_demand.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidSpec {
                reason: "window_demand must be >= 0".into(),
            });
        }
        if self.window_sigma.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidSpec {
                reason: "window_sigma must be > 0".into(),
            });
        }
        if self.window_spread.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidSpec {
                reason: "window_spread must be > 0".into(),
            });
        }
        if self.records == 0 {
            return Err(Error::InvalidSpec {
                reason: "records must be > 0".into(),
            });
        }
        if self.traffic_noise < 0.0 || self.delay_mean_noise < 0.0 {
            return Err(Error::InvalidSpec {
                reason: "noise levels must be >= 0".into(),
            });
        }
        Ok(())
    }
}

/// The generator's self-consistent true model: window distributions whose
/// means are the equilibrium delays of the true parameters.
#[derive(Debug, Clone)]
pub struct SyntheticTruth {
    pub windows: Vec<HourWindow>,
    pub curve: CorrectedCostCurve,
    /// Equilibrium traffic per window, flights/hour.
    pub traffic: Vec<f64>,
}

/// Iterates window means to the fixed point where each window's
/// distribution mean equals its own equilibrium delay under the curve the
/// distributions induce.
pub fn solve_synthetic_truth(spec: &SyntheticAirportSpec) -> Result<SyntheticTruth> {
    let params = &spec.params;
    let capacity = params.capacity;
    let offset = params.delay_offset;

    let mut means: Vec<f64> = spec
        .window_demand
        .iter()
        .map(|&beta| {
            crate::model::delay_from_traffic(
                (0.7 * beta).min(capacity * 2.0),
                capacity,
                offset,
            )
            .unwrap_or(0.0)
        })
        .collect();

    let mut windows = Vec::new();
    let mut curve = None;
    for iteration in 0..500 {
        windows = means
            .iter()
            .enumerate()
            .map(|(i, &mean)| {
                Ok(HourWindow {
                    hour: FIRST_HOUR + i as u8,
                    observed_traffic: 0.0,
                    demand: spec.window_demand[i],
                    delay_dist: ShiftedLogNormal::from_mean_spread(
                        mean,
                        spec.window_spread[i],
                        spec.window_sigma[i],
                    )?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let fitted =
            build_corrected_curve(&windows, 1.0, params.sqrt_mtow, &spec.coeffs)?;

        let mut next = Vec::with_capacity(means.len());
        let mut shift = 0.0f64;
        for window in &windows {
            let eq = equilibrium::solve_window(
                window,
                capacity,
                &fitted,
                params.smoothness,
                offset,
            )?;
            shift = shift.max((eq.mean_delay - window.delay_dist.mean()).abs());
            next.push(eq.mean_delay);
        }
        // Damped update keeps the map contractive on stiff specs. The curve
        // refit jitters at the 1e-7 level between iterations, so demanding
        // much below a microminute never settles.
        for (m, n) in means.iter_mut().zip(&next) {
            *m = 0.5 * *m + 0.5 * *n;
        }
        curve = Some(fitted);
        if shift < 1e-6 {
            break;
        }
        if iteration == 499 {
            return Err(Error::FitDivergence {
                reason: format!("synthetic truth fixed point stalled at shift {shift:.3e}"),
            });
        }
    }
    let curve = curve.unwrap();

    // Anchor the emitted truth on the realizable integer schedule: traffic
    // rounds to whole departures and each window's distribution mean sits
    // exactly on the delay law at that count.
    let mut traffic = Vec::with_capacity(windows.len());
    for (i, window) in windows.iter_mut().enumerate() {
        let eq = equilibrium::solve_window(
            window,
            capacity,
            &curve,
            params.smoothness,
            offset,
        )?;
        let count = eq.realized_traffic.round().max(0.0);
        window.observed_traffic = count;
        if count > 0.0 {
            let mean = crate::model::delay_from_traffic(count, capacity, offset)?;
            window.delay_dist = ShiftedLogNormal::from_mean_spread(
                mean,
                spec.window_spread[i],
                spec.window_sigma[i],
            )?;
        }
        traffic.push(count);
    }
    Ok(SyntheticTruth {
        windows,
        curve,
        traffic,
    })
}

/// Stratified draw of `n` samples: one uniform per probability stratum.
/// The sample mean's variance shrinks by roughly the stratum count, which
/// keeps the exact-mean correction applied afterwards small. Both end
/// strata sit at their midpoints, so the pooled per-window extremes are
/// fixed quantiles rather than extreme-value draws; the shift anchor of
/// the downstream lognormal fit then lands reproducibly.
fn stratified_bin(
    dist: &ShiftedLogNormal,
    n: usize,
    rng: &mut impl rand::Rng,
) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let draw: f64 = rng.random();
            let offset = if j == 0 || j == n - 1 { 0.5 } else { draw };
            let u = (j as f64 + offset) / n as f64;
            dist.quantile(u.clamp(1e-12, 1.0 - 1e-12))
        })
        .collect()
}

/// Paths produced by [`generate_synthetic`].
#[derive(Debug, Clone)]
pub struct SyntheticOutput {
    pub records_path: PathBuf,
    pub financials_path: PathBuf,
    pub manifest_path: PathBuf,
    pub record_count: u64,
    pub period_days: u32,
}

/// Generates a synthetic dataset: per-(day, window) departures whose counts
/// follow the true equilibrium traffic and whose delays are drawn from the
/// true distributions, recentered so every (traffic, mean delay) bin sits
/// exactly on the true delay–traffic law (up to the requested noise).
/// Identical specs produce byte-identical files.
pub fn generate_synthetic(spec: &SyntheticAirportSpec, out_dir: &Path) -> Result<SyntheticOutput> {
    spec.validate()?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let truth = solve_synthetic_truth(spec)?;
    let per_day: f64 = truth.traffic.iter().map(|t| t.round().max(0.0)).sum();
    if per_day < 1.0 {
        return Err(Error::InvalidSpec {
            reason: "ground-truth traffic rounds to zero flights per day".into(),
        });
    }
    let period_days = ((spec.records as f64 / per_day).ceil() as u32).max(1);

    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let params = &spec.params;
    let start_date = NaiveDate::from_ymd_opt(2014, 1, 1).unwrap();

    let records_path = out_dir.join("records.csv");
    let mut csv_text = String::from("date,hour,minute,delay_min,mtow_t\n");
    let mut total_flights: u64 = 0;

    for day in 0..period_days {
        let date = start_date + chrono::Days::new(day as u64);
        for (i, window) in truth.windows.iter().enumerate() {
            let lambda = truth.traffic[i];
            let count = if spec.traffic_noise > 0.0 && lambda > 0.0 {
                rng.sample(rand_distr::Poisson::new(lambda).expect("lambda > 0")) as u64
            } else {
                lambda.round().max(0.0) as u64
            };
            if count == 0 {
                continue;
            }

            // Bin target mean from the law at the realized count.
            let mut target = crate::model::delay_from_traffic(
                count as f64,
                params.capacity,
                params.delay_offset,
            )?;
            if spec.delay_mean_noise > 0.0 {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                target *= 1.0 + spec.delay_mean_noise * z;
            }

            // Exact bin mean via a multiplicative correction above the
            // shift; unlike an additive one this preserves the log-scale
            // shape of the pooled per-window sample.
            let shift = window.delay_dist.shift;
            if target <= shift {
                return Err(Error::InvalidSpec {
                    reason: format!(
                        "window {:02}: bin target {target:.2} fell below the \
                         distribution shift {shift:.2}; reduce noise",
                        window.hour
                    ),
                });
            }
            let mut delays = stratified_bin(&window.delay_dist, count as usize, &mut rng);
            let mean = delays.iter().sum::<f64>() / count as f64;
            let ratio = (target - shift) / (mean - shift);
            for d in &mut delays {
                *d = shift + (*d - shift) * ratio;
            }

            let hour = window.hour;
            for (j, delay) in delays.iter().enumerate() {
                let minute = ((j as u64 * 60) / count) as u8;
                let mtow = if spec.traffic_noise > 0.0 {
                    let jitter: f64 = rng.sample(rand_distr::StandardNormal);
                    let root = (params.sqrt_mtow * (1.0 + 0.05 * jitter)).max(0.1);
                    root * root
                } else {
                    params.sqrt_mtow * params.sqrt_mtow
                };
                csv_text.push_str(&format!(
                    "{date},{hour},{minute},{},{}\n",
                    fmt_sig12(*delay),
                    fmt_sig12(mtow)
                ));
            }
            total_flights += count;
        }
    }

    let mut file = fs::File::create(&records_path).map_err(io_err(&records_path))?;
    file.write_all(csv_text.as_bytes())
        .map_err(io_err(&records_path))?;

    // Financial totals consistent with the emitted schedule.
    let flights = total_flights as f64;
    let financials = AirportFinancials {
        total_flights: flights,
        total_passengers: params.pax_per_flight * flights,
        total_aero_revenue: params.aero_revenue_per_flight * flights,
        total_non_aero_revenue: params.non_aero_revenue_per_pax
            * params.pax_per_flight
            * flights,
        total_operating_cost: params.operating_cost_per_hour
            * WINDOWS_PER_DAY as f64
            * period_days as f64,
        period_days,
        value_of_time: params.value_of_time,
    };
    let financials_path = out_dir.join("financials.txt");
    let fin_text = format!(
        "total_flights={}\ntotal_passengers={}\ntotal_aero_revenue={}\n\
         total_non_aero_revenue={}\ntotal_operating_cost={}\nperiod_days={}\n\
         value_of_time={}\n",
        fmt_sig12(financials.total_flights),
        fmt_sig12(financials.total_passengers),
        fmt_sig12(financials.total_aero_revenue),
        fmt_sig12(financials.total_non_aero_revenue),
        fmt_sig12(financials.total_operating_cost),
        financials.period_days,
        fmt_sig12(financials.value_of_time),
    );
    fs::write(&financials_path, fin_text).map_err(io_err(&financials_path))?;

    // Flat ground-truth manifest for round-trip assertions.
    let mut manifest = serde_json::Map::new();
    manifest.insert("capacity".into(), json!(params.capacity));
    manifest.insert("delay_offset".into(), json!(params.delay_offset));
    manifest.insert("pax_per_flight".into(), json!(params.pax_per_flight));
    manifest.insert(
        "aero_revenue_per_flight".into(),
        json!(params.aero_revenue_per_flight),
    );
    manifest.insert(
        "non_aero_revenue_per_pax".into(),
        json!(params.non_aero_revenue_per_pax),
    );
    manifest.insert(
        "operating_cost_per_hour".into(),
        json!(params.operating_cost_per_hour),
    );
    manifest.insert("sqrt_mtow".into(), json!(params.sqrt_mtow));
    manifest.insert("smoothness".into(), json!(params.smoothness));
    manifest.insert("seed".into(), json!(spec.seed));
    manifest.insert("period_days".into(), json!(period_days));
    manifest.insert("record_count".into(), json!(total_flights));
    for (i, window) in truth.windows.iter().enumerate() {
        let h = window.hour;
        manifest.insert(format!("window_{h:02}_demand"), json!(spec.window_demand[i]));
        manifest.insert(format!("window_{h:02}_sigma"), json!(window.delay_dist.sigma));
        manifest.insert(format!("window_{h:02}_mu"), json!(window.delay_dist.mu));
        manifest.insert(format!("window_{h:02}_shift"), json!(window.delay_dist.shift));
        manifest.insert(
            format!("window_{h:02}_mean_delay"),
            json!(window.delay_dist.mean()),
        );
        manifest.insert(format!("window_{h:02}_traffic"), json!(truth.traffic[i]));
    }
    let manifest_path = out_dir.join("ground_truth.json");
    write_json(&Value::Object(manifest), &manifest_path)?;

    Ok(SyntheticOutput {
        records_path,
        financials_path,
        manifest_path,
        record_count: total_flights,
        period_days,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LAST_HOUR;

    fn small_spec() -> SyntheticAirportSpec {
        SyntheticAirportSpec {
            params: AirportParameters {
                pax_per_flight: 120.0,
                aero_revenue_per_flight: 2500.0,
                non_aero_revenue_per_pax: 12.0,
                capacity: 100.0,
                delay_offset: 1.15,
                operating_cost_per_hour: 50_000.0,
                sqrt_mtow: 0.8,
                smoothness: 500.0,
                value_of_time: 0.0,
            },
            coeffs: CostCoefficients::PAPER,
            window_demand: vec![
                12.0, 16.0, 24.0, 34.0, 40.0, 42.0, 39.0, 35.0, 32.0, 30.0, 29.0, 30.0,
                32.0, 35.0, 39.0, 41.0, 36.0, 22.0,
            ],
            window_sigma: vec![0.6; 18],
            window_spread: vec![22.0; 18],
            records: 4000,
            traffic_noise: 0.0,
            delay_mean_noise: 0.0,
            seed: 7,
        }
    }

    #[test]
    fn fmt_sig12_behaviour() {
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(1.0), "1");
        assert_eq!(fmt_sig12(-2.5), "-2.5");
        assert_eq!(fmt_sig12(123.456), "123.456");
        assert_eq!(fmt_sig12(1.0 / 3.0), "0.333333333333");
        assert!(fmt_sig12(1e20).contains('e'));
        // Round-trips to 12 significant digits.
        let v = 206.19381941508536;
        let parsed: f64 = fmt_sig12(v).parse().unwrap();
        assert!((parsed - v).abs() < 1e-9);
    }

    #[test]
    fn table_round_trip_and_empty_rejection() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut table = Table::new(&["a", "b"]);
        table.push(vec![Cell::Num(1.5), Cell::Text("x".into())]);
        table.push(vec![Cell::Num(-2.25), Cell::Empty]);
        write_results(&table, &path).unwrap();
        let (headers, rows) = read_csv_numeric(&path).unwrap();
        assert_eq!(headers, vec!["a", "b"]);
        assert_eq!(rows[0][0], Some(1.5));
        assert_eq!(rows[1][0], Some(-2.25));
        assert_eq!(rows[1][1], None);

        let empty = Table::new(&["a"]);
        assert!(matches!(
            write_results(&empty, &path).unwrap_err(),
            Error::EmptyTable
        ));
    }

    #[test]
    fn load_records_well_formed_and_skips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        fs::write(
            &path,
            "date,hour,minute,delay_min,mtow_t\n\
             2014-01-01,8,30,5.5,77\n\
             2014-01-01,9,10,-3.0,64\n\
             2014-01-01,9,10,bad,64\n\
             2014-01-02,22,5,12.25,77\n",
        )
        .unwrap();
        let report = load_records(&path).unwrap();
        assert_eq!(report.records.len(), 3);
        assert_eq!(report.skipped.len(), 1);
        assert_eq!(report.skipped[0].0, 4);
        assert!(report.skipped[0].1.contains("delay_min"));
    }

    #[test]
    fn load_records_missing_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        fs::write(&path, "date,hour,minute,delay_min\n2014-01-01,8,30,5.5\n").unwrap();
        assert!(matches!(
            load_records(&path).unwrap_err(),
            Error::MissingColumn { .. }
        ));
    }

    #[test]
    fn financials_round_trip_and_unknown_key() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        fs::write(
            &path,
            "total_flights=1000\ntotal_passengers=120000\ntotal_aero_revenue=2.5e6\n\
             total_non_aero_revenue=1.4e6\ntotal_operating_cost=9e6\nperiod_days=30\n",
        )
        .unwrap();
        let fin = load_financials(&path).unwrap();
        assert_eq!(fin.total_flights, 1000.0);
        assert_eq!(fin.period_days, 30);
        assert_eq!(fin.value_of_time, 0.0);

        fs::write(&path, "total_flights=10\nnonsense=1\n").unwrap();
        assert!(load_financials(&path).is_err());
    }

    #[test]
    fn synthetic_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let spec = small_spec();
        let a = generate_synthetic(&spec, &dir.path().join("a")).unwrap();
        let b = generate_synthetic(&spec, &dir.path().join("b")).unwrap();
        assert_eq!(
            fs::read(&a.records_path).unwrap(),
            fs::read(&b.records_path).unwrap()
        );
        assert_eq!(
            fs::read(&a.manifest_path).unwrap(),
            fs::read(&b.manifest_path).unwrap()
        );
        assert_eq!(
            fs::read(&a.financials_path).unwrap(),
            fs::read(&b.financials_path).unwrap()
        );
    }

    #[test]
    fn synthetic_covers_all_windows() {
        let dir = tempfile::tempdir().unwrap();
        let out = generate_synthetic(&small_spec(), dir.path()).unwrap();
        let report = load_records(&out.records_path).unwrap();
        assert!(report.skipped.is_empty());
        for hour in FIRST_HOUR..=LAST_HOUR {
            assert!(
                report.records.iter().any(|r| r.hour == hour),
                "hour {hour} missing"
            );
        }
    }

    #[test]
    fn synthetic_rejects_invalid_spec() {
        let mut spec = small_spec();
        spec.records = 0;
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            generate_synthetic(&spec, dir.path()).unwrap_err(),
            Error::InvalidSpec { .. }
        ));
        let mut spec = small_spec();
        spec.window_sigma = vec![0.6; 3];
        assert!(generate_synthetic(&spec, dir.path()).is_err());
    }

    #[test]
    fn model_file_round_trip_and_version_gate() {
        let dir = tempfile::tempdir().unwrap();
        let out = generate_synthetic(&small_spec(), dir.path()).unwrap();
        let report = load_records(&out.records_path).unwrap();
        let fin = load_financials(&out.financials_path).unwrap();
        let model = crate::calibration::calibrate_airport(
            &fin,
            &report.records,
            500.0,
            &CostCoefficients::PAPER,
        )
        .unwrap();
        let path = dir.path().join("model.json");
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(model, loaded);

        let mut text = fs::read_to_string(&path).unwrap();
        text = text.replace("\"schema_version\": 1", "\"schema_version\": 99");
        fs::write(&path, text).unwrap();
        assert!(matches!(
            load_model(&path).unwrap_err(),
            Error::SchemaVersion { got: 99, .. }
        ));
    }
}
