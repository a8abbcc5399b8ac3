//! `aircap` — calibrate airport delay-economics models and run the
//! capacity/predictability/demand experiment suite from a scenario config.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aircap_core::calibration::calibrate_airport;
use aircap_core::data_io::{
    curve_diagnostics_table, generate_synthetic, load_financials, load_model,
    load_records, save_model, write_json, write_results, Cell, SyntheticAirportSpec, Table,
};
use aircap_core::equilibrium::{demand_supply_trace, solve_window};
use aircap_core::experiments::{
    breakeven_alpha, compare_airports, exploratory_profit, sensitivity_smoothness,
    sweep_capacity, sweep_nf, sweep_predictability, ExploratorySpendParams,
};
use aircap_core::model::delay_from_traffic;
use aircap_core::CalibratedAirport;
use clap::{Parser, Subcommand};
use config::{resolve_coefficients, ScenarioConfig};
use serde_json::json;

const EXPERIMENTS: &[&str] = &[
    "sweep-capacity",
    "sweep-nf",
    "sweep-predictability",
    "breakeven-alpha",
    "compare-airports",
    "exploratory",
    "sensitivity-smoothness",
];

#[derive(Parser)]
#[command(
    name = "aircap",
    version,
    about = "Economic value of additional airport departure capacity",
    arg_required_else_help = true
)]
struct Cli {
    /// Scenario configuration file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Random seed override for synthetic generation.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Cost coefficients: `paper`, `sign-swapped`, or a JSON file.
    #[arg(long, global = true)]
    coeffs: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate a model from flight records and financials.
    Calibrate,
    /// Run one experiment on a calibrated model.
    Run {
        /// One of: sweep-capacity, sweep-nf, sweep-predictability,
        /// breakeven-alpha, compare-airports, exploratory,
        /// sensitivity-smoothness.
        experiment: String,
    },
    /// Generate a synthetic airport dataset with known ground truth.
    Synth {
        /// Synthetic airport spec (JSON).
        spec: PathBuf,
    },
    /// Write the demand/supply curves of one hour window.
    Trace,
}

enum AppError {
    /// Bad input: missing files, invalid config, unknown names. Exit 2.
    Usage(String),
    /// A numerical procedure failed. Exit 1.
    Numerical(String),
}

impl From<aircap_core::Error> for AppError {
    fn from(e: aircap_core::Error) -> Self {
        if e.is_usage() {
            AppError::Usage(e.to_string())
        } else {
            AppError::Numerical(e.to_string())
        }
    }
}

type AppResult<T> = Result<T, AppError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Numerical(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(AppError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> AppResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(AppError::Usage("--threads must be at least 1".into()));
        }
        // Ignore the error if a pool already exists (e.g. under tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    let config = match &cli.config {
        Some(path) => ScenarioConfig::load(path).map_err(AppError::Usage)?,
        None => ScenarioConfig::default(),
    };
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| AppError::Usage(format!("{}: {e}", out_dir.display())))?;

    match &cli.command {
        Command::Calibrate => cmd_calibrate(&cli, &config, &out_dir),
        Command::Run { experiment } => cmd_run(&cli, &config, &out_dir, experiment),
        Command::Synth { spec } => cmd_synth(&cli, spec, &out_dir),
        Command::Trace => cmd_trace(&config, &out_dir),
    }
}

/// Model file location: the configured path (relative paths are anchored at
/// the output directory) or `<out>/model.json`.
fn model_path(config: &ScenarioConfig, out_dir: &Path) -> PathBuf {
    match &config.model {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => out_dir.join(p),
        None => out_dir.join("model.json"),
    }
}

fn cmd_calibrate(cli: &Cli, config: &ScenarioConfig, out_dir: &Path) -> AppResult<()> {
    let records_path = config.records.as_ref().ok_or_else(|| {
        AppError::Usage("config must set `records` for calibrate".into())
    })?;
    let financials_path = config.financials.as_ref().ok_or_else(|| {
        AppError::Usage("config must set `financials` for calibrate".into())
    })?;
    let coeffs = resolve_coefficients(cli.coeffs.as_deref(), config)
        .map_err(AppError::Usage)?;

    let report = load_records(records_path)?;
    for (line, reason) in &report.skipped {
        eprintln!("warning: {}:{line}: skipped row ({reason})", records_path.display());
    }
    let financials = load_financials(financials_path)?;
    let model =
        calibrate_airport(&financials, &report.records, config.smoothness(), &coeffs)?;

    let model_file = model_path(config, out_dir);
    save_model(&model, &model_file)?;

    let mut table = Table::new(&[
        "hour",
        "observed_traffic",
        "demand_beta",
        "dist_shift",
        "dist_mu",
        "dist_sigma",
        "dist_mean_delay",
        "expected_cost_eur",
        "n_samples",
        "mean_warning",
    ]);
    for (window, diag) in model.windows.iter().zip(&model.diagnostics.per_window) {
        let point = model
            .curve
            .points
            .iter()
            .min_by(|a, b| {
                (a.mean_delay - window.delay_dist.mean())
                    .abs()
                    .total_cmp(&(b.mean_delay - window.delay_dist.mean()).abs())
            })
            .map(|p| p.expected_cost)
            .unwrap_or(f64::NAN);
        table.push(vec![
            Cell::Int(window.hour as i64),
            Cell::Num(window.observed_traffic),
            Cell::Num(window.demand),
            Cell::Num(window.delay_dist.shift),
            Cell::Num(window.delay_dist.mu),
            Cell::Num(window.delay_dist.sigma),
            Cell::Num(window.delay_dist.mean()),
            Cell::Num(point),
            Cell::Int(diag.n_samples as i64),
            Cell::Int(diag.mean_warning as i64),
        ]);
    }
    write_results(&table, &out_dir.join("calibration_report.csv"))?;
    write_results(
        &curve_diagnostics_table(&model.curve),
        &out_dir.join("cost_fit.csv"),
    )?;

    let p = &model.params;
    let summary = format!(
        "calibrated airport\n\
         capacity:               {:.4} flights/hour\n\
         delay offset (cc):      {:.6}\n\
         passengers per flight:  {:.2}\n\
         aero revenue/flight:    {:.2} eur\n\
         non-aero revenue/pax:   {:.4} eur\n\
         operating cost/hour:    {:.2} eur\n\
         sqrt(MTOW):             {:.4}\n\
         smoothness:             {:.1} eur\n\
         delay-traffic R2:       {:.4} (linear fit {:.4}, {} points)\n\
         cost-curve R2:          {:.4}\n\
         baseline mean delay:    {:.3} min\n",
        p.capacity,
        p.delay_offset,
        p.pax_per_flight,
        p.aero_revenue_per_flight,
        p.non_aero_revenue_per_pax,
        p.operating_cost_per_hour,
        p.sqrt_mtow,
        p.smoothness,
        model.diagnostics.delay_traffic_r_squared,
        model.diagnostics.linear_fit_r_squared,
        model.diagnostics.regression_points,
        model.curve.fit.r_squared,
        model.baseline_mean_delay,
    );
    std::fs::write(out_dir.join("calibration_summary.txt"), &summary)
        .map_err(|e| AppError::Usage(format!("{}: {e}", out_dir.display())))?;
    print!("{summary}");
    println!("model written to {}", model_file.display());
    Ok(())
}

fn load_or_calibrate(
    cli: &Cli,
    config: &ScenarioConfig,
    out_dir: &Path,
) -> AppResult<CalibratedAirport> {
    let path = model_path(config, out_dir);
    if path.exists() {
        return Ok(load_model(&path)?);
    }
    if config.records.is_some() && config.financials.is_some() {
        cmd_calibrate(cli, config, out_dir)?;
        return Ok(load_model(&path)?);
    }
    Err(AppError::Usage(format!(
        "model file {} not found; run `aircap calibrate` first or set \
         `records`/`financials` in the config",
        path.display()
    )))
}

fn cmd_run(
    cli: &Cli,
    config: &ScenarioConfig,
    out_dir: &Path,
    experiment: &str,
) -> AppResult<()> {
    if !EXPERIMENTS.contains(&experiment) {
        return Err(AppError::Usage(format!(
            "unknown experiment `{experiment}`; valid names: {}",
            EXPERIMENTS.join(", ")
        )));
    }
    let alpha = config.alpha();

    if experiment == "compare-airports" {
        let model_paths = config.models.as_ref().ok_or_else(|| {
            AppError::Usage("config must set `models` (>= 2 paths) for compare-airports".into())
        })?;
        let mut models = Vec::new();
        for p in model_paths {
            let name = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string());
            models.push((name, load_model(p)?));
        }
        let rows = compare_airports(&models, config.breakeven_delta_c())?;
        let mut table = Table::new(&["airport", "alpha_star", "cost_ratio", "error"]);
        for row in &rows {
            match &row.outcome {
                Ok(o) => table.push(vec![
                    Cell::Text(row.name.clone()),
                    Cell::Num(o.alpha_star),
                    Cell::Num(o.cost_ratio),
                    Cell::Empty,
                ]),
                Err(e) => table.push(vec![
                    Cell::Text(row.name.clone()),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Text(e.clone()),
                ]),
            }
        }
        write_results(&table, &out_dir.join("compare_airports.csv"))?;
        let summary = json!({
            "delta_c": config.breakeven_delta_c(),
            "airports": rows.iter().map(|r| match &r.outcome {
                Ok(o) => json!({"name": r.name, "alpha_star": o.alpha_star,
                                "cost_ratio": o.cost_ratio}),
                Err(e) => json!({"name": r.name, "error": e}),
            }).collect::<Vec<_>>(),
        });
        write_json(&summary, &out_dir.join("compare_airports_summary.json"))?;
        for row in &rows {
            match &row.outcome {
                Ok(o) => println!(
                    "{}: alpha* = {:.2} eur/flight/hour (ratio to daily cost {:.5})",
                    row.name, o.alpha_star, o.cost_ratio
                ),
                Err(e) => println!("{}: failed ({e})", row.name),
            }
        }
        return Ok(());
    }

    let model = load_or_calibrate(cli, config, out_dir)?;

    match experiment {
        "sweep-capacity" => {
            let grid = config.capacity_grid(&model);
            let sweep = sweep_capacity(&model, alpha, &grid, false)?;
            let mut table = Table::new(&[
                "capacity",
                "aero_revenue",
                "non_aero_revenue",
                "capacity_cost",
                "operating_profit",
                "mean_delay",
                "error",
            ]);
            for row in &sweep.rows {
                match &row.outcome {
                    Ok(p) => table.push(vec![
                        Cell::Num(row.capacity),
                        Cell::Num(p.aero_revenue),
                        Cell::Num(p.non_aero_revenue),
                        Cell::Num(p.capacity_cost),
                        Cell::Num(p.operating_profit),
                        Cell::Num(p.mean_delay()),
                        Cell::Empty,
                    ]),
                    Err(e) => table.push(vec![
                        Cell::Num(row.capacity),
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Text(e.clone()),
                    ]),
                }
            }
            write_results(&table, &out_dir.join("sweep_capacity.csv"))?;
            let summary = json!({
                "alpha": alpha,
                "optimal_capacity": sweep.optimum.capacity,
                "max_profit": sweep.optimum.profit,
                "capped": sweep.optimum.capped,
            });
            write_json(&summary, &out_dir.join("sweep_capacity_summary.json"))?;
            println!(
                "optimal capacity {:.3} flights/hour, daily profit {:.2} eur (alpha {alpha})",
                sweep.optimum.capacity, sweep.optimum.profit
            );
        }
        "sweep-nf" => {
            let sweep = sweep_nf(
                &model,
                alpha,
                &config.nf_grid(&model),
                &config.capacity_grid(&model),
            )?;
            let mut table =
                Table::new(&["pax_per_flight", "optimal_capacity", "max_profit"]);
            for row in &sweep.rows {
                table.push(vec![
                    Cell::Num(row.pax_per_flight),
                    Cell::Num(row.optimal_capacity),
                    Cell::Num(row.max_profit),
                ]);
            }
            write_results(&table, &out_dir.join("sweep_nf.csv"))?;
            let summary = json!({
                "alpha": alpha,
                "tail": sweep.tail.map(|t| json!({
                    "slope": t.slope,
                    "intercept": t.intercept,
                    "r_squared": t.r_squared,
                    "points": t.points,
                })),
            });
            write_json(&summary, &out_dir.join("sweep_nf_summary.json"))?;
            match sweep.tail {
                Some(t) => println!(
                    "optimal capacity grows {:.4} flights/hour per passenger \
                     (tail R2 {:.4}, {} points above the cap)",
                    t.slope, t.r_squared, t.points
                ),
                None => println!("optimal capacity pinned at the current capacity"),
            }
        }
        "sweep-predictability" => {
            let points = sweep_predictability(
                &model,
                alpha,
                &config.predictability_grid(),
                &config.capacity_grid(&model),
            )?;
            let mut table = Table::new(&[
                "sigma_scale",
                "profit_at_current_capacity",
                "mean_delay",
                "optimal_capacity",
                "error",
            ]);
            for p in &points {
                match &p.outcome {
                    Ok(o) => table.push(vec![
                        Cell::Num(p.sigma_scale),
                        Cell::Num(o.profit_at_current),
                        Cell::Num(o.mean_delay),
                        Cell::Num(o.optimal_capacity),
                        Cell::Empty,
                    ]),
                    Err(e) => table.push(vec![
                        Cell::Num(p.sigma_scale),
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Text(e.clone()),
                    ]),
                }
            }
            write_results(&table, &out_dir.join("sweep_predictability.csv"))?;
            let summary = json!({
                "alpha": alpha,
                "points": points.iter().map(|p| match &p.outcome {
                    Ok(o) => json!({"sigma_scale": p.sigma_scale,
                        "profit_at_current_capacity": o.profit_at_current,
                        "mean_delay": o.mean_delay,
                        "optimal_capacity": o.optimal_capacity}),
                    Err(e) => json!({"sigma_scale": p.sigma_scale, "error": e}),
                }).collect::<Vec<_>>(),
            });
            write_json(&summary, &out_dir.join("sweep_predictability_summary.json"))?;
            if let (Some(Ok(first)), Some(Ok(last))) = (
                points.first().map(|p| p.outcome.clone()),
                points.last().map(|p| p.outcome.clone()),
            ) {
                println!(
                    "sigma scale {:.2} -> {:.2}: profit {:.0} -> {:.0}, \
                     mean delay {:.2} -> {:.2} min",
                    points.first().unwrap().sigma_scale,
                    points.last().unwrap().sigma_scale,
                    first.profit_at_current,
                    last.profit_at_current,
                    first.mean_delay,
                    last.mean_delay
                );
            }
        }
        "breakeven-alpha" => {
            let b = breakeven_alpha(&model, config.breakeven_delta_c())?;
            let mut table = Table::new(&[
                "delta_c",
                "alpha_star_analytic",
                "alpha_star_root",
                "relative_gap",
            ]);
            table.push(vec![
                Cell::Num(config.breakeven_delta_c()),
                Cell::Num(b.analytic),
                Cell::Num(b.root_found),
                Cell::Num(b.relative_gap),
            ]);
            write_results(&table, &out_dir.join("breakeven_alpha.csv"))?;
            write_json(
                &json!({
                    "delta_c": config.breakeven_delta_c(),
                    "alpha_star_analytic": b.analytic,
                    "alpha_star_root": b.root_found,
                    "relative_gap": b.relative_gap,
                }),
                &out_dir.join("breakeven_alpha_summary.json"),
            )?;
            println!(
                "alpha* = {:.4} eur/flight/hour (root-found {:.4}, relative gap {:.2e})",
                b.analytic, b.root_found, b.relative_gap
            );
        }
        "exploratory" => {
            let spend_config = config.exploratory.ok_or_else(|| {
                AppError::Usage("config must set `exploratory` parameters".into())
            })?;
            let spend = ExploratorySpendParams {
                time_elasticity: spend_config.time_elasticity,
                satisfaction_elasticity: spend_config.satisfaction_elasticity,
            };
            let sweep =
                exploratory_profit(&model, alpha, &spend, &config.capacity_grid(&model))?;
            let mut table = Table::new(&[
                "capacity",
                "operating_profit",
                "avg_revenue_per_pax",
                "mean_delay",
                "error",
            ]);
            for row in &sweep.rows {
                match &row.outcome {
                    Ok(p) => {
                        let traffic: f64 =
                            p.per_window.iter().map(|w| w.traffic).sum();
                        let revenue_per_pax = if traffic > 0.0 {
                            p.non_aero_revenue / (model.params.pax_per_flight * traffic)
                        } else {
                            model.params.non_aero_revenue_per_pax
                        };
                        table.push(vec![
                            Cell::Num(row.capacity),
                            Cell::Num(p.operating_profit),
                            Cell::Num(revenue_per_pax),
                            Cell::Num(p.mean_delay()),
                            Cell::Empty,
                        ]);
                    }
                    Err(e) => table.push(vec![
                        Cell::Num(row.capacity),
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Text(e.clone()),
                    ]),
                }
            }
            write_results(&table, &out_dir.join("exploratory.csv"))?;
            let summary = json!({
                "alpha": alpha,
                "time_elasticity": spend.time_elasticity,
                "satisfaction_elasticity": spend.satisfaction_elasticity,
                "local_maxima": sweep.maxima.iter().map(|m| json!({
                    "capacity": m.capacity, "profit": m.profit,
                })).collect::<Vec<_>>(),
            });
            write_json(&summary, &out_dir.join("exploratory_summary.json"))?;
            println!("{} local maxima:", sweep.maxima.len());
            for m in &sweep.maxima {
                println!("  capacity {:.3}, profit {:.2}", m.capacity, m.profit);
            }
        }
        "sensitivity-smoothness" => {
            let points = sensitivity_smoothness(&model, &config.smoothness_grid())?;
            let mut table = Table::new(&[
                "smoothness",
                "mean_delay",
                "airline_delay_cost",
                "error",
            ]);
            for p in &points {
                match &p.outcome {
                    Ok(o) => table.push(vec![
                        Cell::Num(p.smoothness),
                        Cell::Num(o.mean_delay),
                        Cell::Num(o.airline_delay_cost),
                        Cell::Empty,
                    ]),
                    Err(e) => table.push(vec![
                        Cell::Num(p.smoothness),
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Text(e.clone()),
                    ]),
                }
            }
            write_results(&table, &out_dir.join("sensitivity_smoothness.csv"))?;
            let summary = json!({
                "points": points.iter().map(|p| match &p.outcome {
                    Ok(o) => json!({"smoothness": p.smoothness,
                        "mean_delay": o.mean_delay,
                        "airline_delay_cost": o.airline_delay_cost}),
                    Err(e) => json!({"smoothness": p.smoothness, "error": e}),
                }).collect::<Vec<_>>(),
            });
            write_json(&summary, &out_dir.join("sensitivity_smoothness_summary.json"))?;
            let ok: Vec<&aircap_core::experiments::SmoothnessOutcome> = points
                .iter()
                .filter_map(|p| p.outcome.as_ref().ok())
                .collect();
            if let (Some(lo), Some(hi)) = (
                ok.iter().map(|o| o.mean_delay).min_by(f64::total_cmp),
                ok.iter().map(|o| o.mean_delay).max_by(f64::total_cmp),
            ) {
                println!(
                    "mean delay spans {:.3}..{:.3} min over the smoothness grid",
                    lo, hi
                );
            }
        }
        other => unreachable!("validated experiment name {other}"),
    }
    Ok(())
}

fn cmd_synth(cli: &Cli, spec_path: &Path, out_dir: &Path) -> AppResult<()> {
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| AppError::Usage(format!("{}: {e}", spec_path.display())))?;
    let mut spec: SyntheticAirportSpec = serde_json::from_str(&text)
        .map_err(|e| AppError::Usage(format!("{}: {e}", spec_path.display())))?;
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    let out = generate_synthetic(&spec, out_dir)?;
    println!(
        "wrote {} records over {} days\n  {}\n  {}\n  {}",
        out.record_count,
        out.period_days,
        out.records_path.display(),
        out.financials_path.display(),
        out.manifest_path.display()
    );
    Ok(())
}

fn cmd_trace(config: &ScenarioConfig, out_dir: &Path) -> AppResult<()> {
    let path = model_path(config, out_dir);
    let model = load_model(&path)?;
    let trace_config = config.trace.unwrap_or(config::TraceConfig {
        hour: None,
        capacity: None,
        min_delay: None,
        max_delay: None,
        points: None,
    });

    let window = match trace_config.hour {
        Some(h) => model
            .windows
            .iter()
            .find(|w| w.hour == h)
            .ok_or_else(|| AppError::Usage(format!("no window for hour {h}")))?,
        None => model
            .windows
            .iter()
            .max_by(|a, b| a.observed_traffic.total_cmp(&b.observed_traffic))
            .expect("calibrated model has windows"),
    };
    let capacity = trace_config.capacity.unwrap_or(model.params.capacity);
    let offset = model.params.delay_offset;

    let default_lo = 120.0 * (1.0 - offset) - 10.0;
    let default_hi =
        delay_from_traffic(window.demand, capacity, offset).unwrap_or(120.0) + 10.0;
    let lo = trace_config.min_delay.unwrap_or(default_lo);
    let hi = trace_config.max_delay.unwrap_or(default_hi);
    let points = trace_config.points.unwrap_or(400);
    if hi.is_nan() || lo.is_nan() || hi <= lo || points < 2 {
        return Err(AppError::Usage(format!(
            "invalid trace grid [{lo}, {hi}] with {points} points"
        )));
    }
    let grid: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();

    let rows = demand_supply_trace(
        window,
        capacity,
        &model.curve,
        model.params.smoothness,
        offset,
        &grid,
    )?;
    let mut table = Table::new(&["delay_min", "demand_Pa", "supply_Pa"]);
    for row in &rows {
        table.push(vec![
            Cell::Num(row.delay),
            Cell::Num(row.demand),
            row.supply.map(Cell::Num).unwrap_or(Cell::Empty),
        ]);
    }
    write_results(&table, &out_dir.join("trace.csv"))?;

    let eq = solve_window(
        window,
        capacity,
        &model.curve,
        model.params.smoothness,
        offset,
    )?;
    println!(
        "window {:02}:00 at capacity {capacity:.2}: equilibrium delay {:.3} min, \
         operate probability {:.4}, traffic {:.3} flights/hour",
        window.hour, eq.mean_delay, eq.operate_prob, eq.realized_traffic
    );
    println!("trace written to {}", out_dir.join("trace.csv").display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn experiment_names_cover_suite() {
        assert_eq!(EXPERIMENTS.len(), 7);
    }
}
