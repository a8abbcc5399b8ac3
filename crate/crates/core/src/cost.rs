//! Expected delay cost under per-window shifted-lognormal delay
//! distributions, and the corrected-cost curve that turns those expected
//! values into a continuous function of the mean delay.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{raw_cost_kernel, CostCoefficients, HourWindow};
use crate::numerics::hermite::GaussHermite;
use crate::numerics::leastsq::{self, LmOptions};

/// Standard normal CDF.
fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Three-parameter lognormal: `shift + exp(mu + sigma·Z)` with `Z ~ N(0,1)`.
/// Support is `(shift, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftedLogNormal {
    /// Log-scale location.
    pub mu: f64,
    /// Log-scale shape (> 0).
    pub sigma: f64,
    /// Location shift, minutes.
    pub shift: f64,
}

impl ShiftedLogNormal {
    pub fn new(mu: f64, sigma: f64, shift: f64) -> Result<Self> {
        let dist = Self { mu, sigma, shift };
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("mu", self.mu), ("sigma", self.sigma), ("shift", self.shift)] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name });
            }
        }
        if self.sigma <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: self.sigma,
                reason: "must be > 0",
            });
        }
        if !self.mean().is_finite() {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: self.mu,
                reason: "distribution mean overflows",
            });
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.shift + (self.mu + 0.5 * self.sigma * self.sigma).exp()
    }

    pub fn variance(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        libm::expm1(s2) * (2.0 * self.mu + s2).exp()
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Constructs the distribution with a prescribed mean: given the shape
    /// `sigma` and the spread `mean − shift` (> 0), solves for `mu`.
    pub fn from_mean_spread(mean: f64, spread: f64, sigma: f64) -> Result<Self> {
        if spread.is_nan() || spread <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "spread",
                value: spread,
                reason: "must be > 0",
            });
        }
        Self::new(spread.ln() - 0.5 * sigma * sigma, sigma, mean - spread)
    }

    pub fn sample(&self, rng: &mut impl rand::Rng) -> f64 {
        let z: f64 = rng.sample(rand_distr::StandardNormal);
        self.shift + (self.mu + self.sigma * z).exp()
    }

    /// Quantile function (inverse CDF).
    pub fn quantile(&self, p: f64) -> f64 {
        let z = crate::numerics::stats::inverse_normal_cdf(p);
        self.shift + (self.mu + self.sigma * z).exp()
    }
}

/// Result of fitting a shifted lognormal to delay samples.
#[derive(Debug, Clone, Copy)]
pub struct FittedDistribution {
    pub dist: ShiftedLogNormal,
    pub sample_mean: f64,
    pub fitted_mean: f64,
    /// Set when the fitted mean strays more than 5% from the sample mean.
    pub mean_warning: bool,
}

/// Minimum sample count accepted by [`fit_shifted_lognormal`].
pub const MIN_FIT_SAMPLES: usize = 30;

/// Fits a shifted lognormal: the shift is anchored just below the sample
/// minimum (`min − max(1 minute, 1% of range)`), then `mu`/`sigma` are the
/// maximum-likelihood estimates on `log(x − shift)`.
pub fn fit_shifted_lognormal(delays: &[f64]) -> Result<FittedDistribution> {
    if delays.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: delays.len(),
            required: MIN_FIT_SAMPLES,
        });
    }
    if delays.iter().any(|d| !d.is_finite()) {
        return Err(Error::NonFinite { name: "delays" });
    }
    let min = delays.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = delays.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Err(Error::DegenerateSamples {
            count: delays.len(),
            value: min,
        });
    }

    let shift = min - (0.01 * (max - min)).max(1.0);
    let n = delays.len() as f64;
    let mut log_sum = 0.0;
    for &d in delays {
        log_sum += (d - shift).ln();
    }
    let mu = log_sum / n;
    let mut sq_sum = 0.0;
    for &d in delays {
        let r = (d - shift).ln() - mu;
        sq_sum += r * r;
    }
    let sigma = (sq_sum / n).sqrt();

    let dist = ShiftedLogNormal::new(mu, sigma, shift)?;
    let sample_mean = delays.iter().sum::<f64>() / n;
    let fitted_mean = dist.mean();
    let mean_warning = (fitted_mean - sample_mean).abs() > 0.05 * sample_mean.abs().max(1.0);
    Ok(FittedDistribution {
        dist,
        sample_mean,
        fitted_mean,
        mean_warning,
    })
}

/// Rescales the standard deviation by `k ∈ (0, 1]` while keeping the mean
/// and the shift fixed. Solved exactly on the moments:
/// `σ'² = ln(1 + k²(e^{σ²} − 1))`, `μ' = (μ + σ²/2) − σ'²/2`.
pub fn scale_sigma(dist: &ShiftedLogNormal, k: f64) -> Result<ShiftedLogNormal> {
    dist.validate()?;
    if !k.is_finite() || k <= 0.0 || k > 1.0 {
        return Err(Error::InvalidParameter {
            name: "sigma_scale",
            value: k,
            reason: "must be in (0, 1]",
        });
    }
    if k == 1.0 {
        return Ok(*dist);
    }
    let s2 = dist.sigma * dist.sigma;
    let log_mean = dist.mu + 0.5 * s2;
    let s2_new = libm::log1p(k * k * libm::expm1(s2));
    ShiftedLogNormal::new(log_mean - 0.5 * s2_new, s2_new.sqrt(), dist.shift)
}

/// Relative stability demanded of the quadrature under order doubling.
const QUADRATURE_RTOL: f64 = 1e-8;
/// Hard cap on the Gauss–Hermite order.
const QUADRATURE_MAX_ORDER: usize = 512;

/// Expected cost of delay under `dist` (Eq. of the expected value over the
/// delay distribution): only the non-negative-delay region contributes.
///
/// The integral is split at delay 0. The smooth unfloored quadratic is
/// integrated over the whole line by Gauss–Hermite after substituting the
/// standard normal variable (order doubled until stable to 1e-8 relative,
/// capped at 512); the below-zero region is then removed exactly through
/// truncated lognormal partial moments.
pub fn expected_cost(
    dist: &ShiftedLogNormal,
    sqrt_mtow: f64,
    coeffs: &CostCoefficients,
) -> Result<f64> {
    dist.validate()?;
    coeffs.validate()?;
    if !sqrt_mtow.is_finite() {
        return Err(Error::NonFinite { name: "sqrt_mtow" });
    }
    let (a_eff, b_eff) = coeffs.effective(sqrt_mtow);

    // Below-zero partial moments E[X·1{X<0}], E[X²·1{X<0}].
    let correction = if dist.shift >= 0.0 {
        0.0
    } else {
        let z0 = ((-dist.shift).ln() - dist.mu) / dist.sigma;
        let l1 = (dist.mu + 0.5 * dist.sigma * dist.sigma).exp();
        let l2 = (2.0 * dist.mu + 2.0 * dist.sigma * dist.sigma).exp();
        let m1 = dist.shift * normal_cdf(z0) + l1 * normal_cdf(z0 - dist.sigma);
        let m2 = dist.shift * dist.shift * normal_cdf(z0)
            + 2.0 * dist.shift * l1 * normal_cdf(z0 - dist.sigma)
            + l2 * normal_cdf(z0 - 2.0 * dist.sigma);
        a_eff * m1 + b_eff * m2
    };

    let integrand = |z: f64| {
        let delay = dist.shift + (dist.mu + dist.sigma * z).exp();
        (a_eff + b_eff * delay) * delay
    };

    let mut order = 16;
    let mut previous = GaussHermite::cached(order)?.normal_expectation(integrand);
    loop {
        order *= 2;
        let current = GaussHermite::cached(order)?.normal_expectation(integrand);
        let scale = current.abs().max(correction.abs()).max(1e-6);
        let delta = (current - previous).abs();
        if delta <= QUADRATURE_RTOL * scale {
            let value = current - correction;
            // Rounding dust from the subtraction; the true value is >= 0
            // whenever the effective coefficients are.
            if value < 0.0 && value >= -1e-9 * scale {
                return Ok(0.0);
            }
            return Ok(value);
        }
        if order >= QUADRATURE_MAX_ORDER {
            return Err(Error::QuadratureDivergence {
                order,
                delta: delta / scale,
            });
        }
        previous = current;
    }
}

/// One calibration point of a corrected-cost fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub mean_delay: f64,
    pub expected_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitQuality {
    pub r_squared: f64,
    pub residual_norm: f64,
}

/// The four required properties of a corrected-cost fit, surfaced as flags
/// rather than hard failures so pathological calibrations stay inspectable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveValidation {
    /// Non-negative over the data range.
    pub nonnegative: bool,
    /// Monotone non-decreasing over the data range.
    pub monotone: bool,
    /// At or above the uncorrected cost over the data range.
    pub dominates_raw: bool,
    /// Family ordering in the sigma scale; set by [`validate_family`].
    pub family_ordered: Option<bool>,
}

impl CurveValidation {
    /// True when the per-curve properties hold (family ordering may be
    /// unknown for a lone curve).
    pub fn is_valid(&self) -> bool {
        self.nonnegative && self.monotone && self.dominates_raw
    }
}

/// Smooth blend between an exponential floor at low mean delay and the
/// uncorrected cost at high mean delay:
///
/// `½(1 − tanh(x/s'))(c + d·e^{f·x}) + ½(1 + tanh(x/s'))·raw(x)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectedCostCurve {
    /// Low-delay cost floor `c`, euros.
    pub floor: f64,
    /// Exponential amplitude `d`, euros.
    pub amplitude: f64,
    /// Exponential growth rate `f`, per minute (> 0).
    pub growth: f64,
    /// Blend width `s'`, minutes (> 0).
    pub blend_width: f64,
    pub coeffs: CostCoefficients,
    pub sqrt_mtow: f64,
    /// Sigma scale the curve was fitted for.
    pub sigma_scale: f64,
    pub fit: FitQuality,
    /// Abscissa range spanned by the calibration points.
    pub data_range: (f64, f64),
    pub points: Vec<CurvePoint>,
    pub validation: CurveValidation,
}

impl CorrectedCostCurve {
    /// Direct constructor for synthetic and test curves; validation flags
    /// are recomputed over `data_range`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_params(
        floor: f64,
        amplitude: f64,
        growth: f64,
        blend_width: f64,
        coeffs: CostCoefficients,
        sqrt_mtow: f64,
        sigma_scale: f64,
        data_range: (f64, f64),
    ) -> Self {
        let mut curve = Self {
            floor,
            amplitude,
            growth,
            blend_width,
            coeffs,
            sqrt_mtow,
            sigma_scale,
            fit: FitQuality {
                r_squared: 1.0,
                residual_norm: 0.0,
            },
            data_range,
            points: Vec::new(),
            validation: CurveValidation {
                nonnegative: true,
                monotone: true,
                dominates_raw: true,
                family_ordered: None,
            },
        };
        curve.validation = curve.check_validation();
        curve
    }

    /// A curve that evaluates to zero everywhere (costless delay).
    pub fn zero() -> Self {
        Self::from_params(
            0.0,
            0.0,
            1.0,
            1.0,
            CostCoefficients::ZERO,
            0.0,
            1.0,
            (-10.0, 60.0),
        )
    }

    /// Uncorrected cost at `delay`.
    pub fn raw(&self, delay: f64) -> f64 {
        let (a_eff, b_eff) = self.coeffs.effective(self.sqrt_mtow);
        raw_cost_kernel(delay, a_eff, b_eff)
    }

    /// Corrected cost at mean delay `x` (euros).
    pub fn value(&self, mean_delay: f64) -> f64 {
        blend_value(
            mean_delay,
            self.floor,
            self.amplitude,
            self.growth,
            self.blend_width,
            |x| self.raw(x),
        )
    }

    pub fn is_validated(&self) -> bool {
        self.validation.is_valid()
    }

    fn check_validation(&self) -> CurveValidation {
        const GRID: usize = 512;
        let (lo, hi) = self.data_range;
        let scale = self
            .points
            .iter()
            .map(|p| p.expected_cost.abs())
            .fold(self.value(hi).abs(), f64::max)
            .max(1.0);
        let tol = 1e-6 * scale;
        let mut nonnegative = true;
        let mut monotone = true;
        let mut dominates = true;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=GRID {
            let x = lo + (hi - lo) * i as f64 / GRID as f64;
            let v = self.value(x);
            if v < -tol {
                nonnegative = false;
            }
            if v < prev - tol {
                monotone = false;
            }
            if v < self.raw(x) - tol {
                dominates = false;
            }
            prev = v;
        }
        CurveValidation {
            nonnegative,
            monotone,
            dominates_raw: dominates,
            family_ordered: self.validation.family_ordered,
        }
    }
}

fn blend_value(
    x: f64,
    floor: f64,
    amplitude: f64,
    growth: f64,
    blend_width: f64,
    raw: impl Fn(f64) -> f64,
) -> f64 {
    // ½(1 ∓ tanh(u)) written as logistics: the tanh form cancels
    // catastrophically once u is a few units from zero, and the lost
    // precision multiplies into the exponential branch.
    let u = x / blend_width;
    let w_low = 1.0 / (1.0 + (2.0 * u).exp());
    let w_high = 1.0 / (1.0 + (-2.0 * u).exp());
    // Skip a branch whose weight underflowed; avoids 0·inf at extreme x.
    let low = if w_low == 0.0 {
        0.0
    } else {
        w_low * (floor + amplitude * (growth * x).exp())
    };
    let high = if w_high == 0.0 { 0.0 } else { w_high * raw(x) };
    low + high
}

/// Builds the corrected-cost curve for one sigma scale: computes the
/// per-window (mean delay, expected cost) points, then least-squares fits
/// the blend with a multi-start damped Gauss–Newton search.
pub fn build_corrected_curve(
    windows: &[HourWindow],
    sigma_scale: f64,
    sqrt_mtow: f64,
    coeffs: &CostCoefficients,
) -> Result<CorrectedCostCurve> {
    if windows.len() < 5 {
        return Err(Error::InsufficientSamples {
            got: windows.len(),
            required: 5,
        });
    }

    let mut points = Vec::with_capacity(windows.len());
    for window in windows {
        let scaled = scale_sigma(&window.delay_dist, sigma_scale)?;
        let mean_delay = window.delay_dist.mean();
        let cost = expected_cost(&scaled, sqrt_mtow, coeffs)?;
        points.push(CurvePoint {
            mean_delay,
            expected_cost: cost,
        });
    }
    points.sort_by(|a, b| a.mean_delay.total_cmp(&b.mean_delay));

    let lo = points.first().unwrap().mean_delay;
    let hi = points.last().unwrap().mean_delay;
    let range = hi - lo;
    if range.is_nan() || range <= 1e-9 {
        return Err(Error::FitDivergence {
            reason: format!("degenerate mean-delay range [{lo}, {hi}]"),
        });
    }

    let fit = fit_blend(&points, sqrt_mtow, coeffs, (lo, hi))?;
    let predicted: Vec<f64> = points
        .iter()
        .map(|p| {
            blend_value(p.mean_delay, fit[0], fit[1], fit[2], fit[3], |x| {
                let (a_eff, b_eff) = coeffs.effective(sqrt_mtow);
                raw_cost_kernel(x, a_eff, b_eff)
            })
        })
        .collect();
    let observed: Vec<f64> = points.iter().map(|p| p.expected_cost).collect();
    let r_squared = leastsq::r_squared(&observed, &predicted);
    let residual_norm = observed
        .iter()
        .zip(&predicted)
        .map(|(o, p)| (o - p) * (o - p))
        .sum::<f64>()
        .sqrt();

    let mut curve = CorrectedCostCurve {
        floor: fit[0],
        amplitude: fit[1],
        growth: fit[2],
        blend_width: fit[3],
        coeffs: *coeffs,
        sqrt_mtow,
        sigma_scale,
        fit: FitQuality {
            r_squared,
            residual_norm,
        },
        data_range: (lo, hi),
        points,
        validation: CurveValidation {
            nonnegative: true,
            monotone: true,
            dominates_raw: true,
            family_ordered: None,
        },
    };
    curve.validation = curve.check_validation();
    Ok(curve)
}

/// Fits `(c, d, f, s')`; `f` and `s'` are kept positive through a log
/// transform. Runs 8 starts (the data-scaled base guess with `d`, `f`, `s'`
/// each perturbed a factor of four both ways); candidates whose exponential
/// branch has died out far above the data range are preferred, then the
/// best residual wins, ties broken by the smaller parameter norm.
fn fit_blend(
    points: &[CurvePoint],
    sqrt_mtow: f64,
    coeffs: &CostCoefficients,
    range: (f64, f64),
) -> Result<[f64; 4]> {
    let (a_eff, b_eff) = coeffs.effective(sqrt_mtow);
    let raw = move |x: f64| raw_cost_kernel(x, a_eff, b_eff);
    let (lo, hi) = range;
    let span = hi - lo;

    let c0 = points[0].expected_cost;
    let d0 = c0.abs().max(1e-3);
    let f0 = 1.0 / span;
    let s0 = 0.5 * span;

    let residuals = |p: &[f64], out: &mut [f64]| {
        let (c, d, f, s) = (p[0], p[1], p[2].exp(), p[3].exp());
        for (i, pt) in points.iter().enumerate() {
            out[i] = blend_value(pt.mean_delay, c, d, f, s, raw) - pt.expected_cost;
        }
    };

    // The blend only converges onto the raw cost when the low branch decays
    // (growth < 2/width); check that directly well beyond the data.
    let x_far = (3.0 * hi.abs()).max(hi + 2.0 * span);
    let far_ok = |p: &[f64; 4]| {
        let raw_far = raw(x_far);
        raw_far > 0.0
            && (blend_value(x_far, p[0], p[1], p[2], p[3], raw) - raw_far).abs()
                <= 0.005 * raw_far
    };

    let mut best: Option<([f64; 4], f64, bool)> = None;
    for &df in &[0.25, 4.0] {
        for &ff in &[0.25, 4.0] {
            for &sf in &[0.25, 4.0] {
                let start = [c0, d0 * df, (f0 * ff).ln(), (s0 * sf).ln()];
                let fit = leastsq::levenberg_marquardt(
                    residuals,
                    points.len(),
                    &start,
                    &LmOptions::default(),
                );
                if !fit.sse.is_finite() {
                    continue;
                }
                let params = [
                    fit.params[0],
                    fit.params[1],
                    fit.params[2].exp(),
                    fit.params[3].exp(),
                ];
                if !params.iter().all(|v| v.is_finite()) {
                    continue;
                }
                let admissible = far_ok(&params);
                let replace = match &best {
                    None => true,
                    Some((held, held_sse, held_adm)) => {
                        if admissible != *held_adm {
                            admissible
                        } else if fit.sse < held_sse - 1e-12 * (1.0 + held_sse) {
                            true
                        } else if (fit.sse - held_sse).abs() <= 1e-12 * (1.0 + held_sse) {
                            let norm = |p: &[f64; 4]| p.iter().map(|v| v * v).sum::<f64>();
                            norm(&params) < norm(held)
                        } else {
                            false
                        }
                    }
                };
                if replace {
                    best = Some((params, fit.sse, admissible));
                }
            }
        }
    }

    best.map(|(p, _, _)| p).ok_or_else(|| Error::FitDivergence {
        reason: "all starts diverged".into(),
    })
}

/// Checks the sigma-scale ordering across a family of curves fitted on the
/// same windows: a more predictable day (smaller k) must not cost more at
/// any shared mean delay. Sets `family_ordered` on every curve.
pub fn validate_family(curves: &mut [CorrectedCostCurve]) {
    const GRID: usize = 256;
    if curves.len() < 2 {
        for c in curves {
            c.validation.family_ordered = None;
        }
        return;
    }
    let mut order: Vec<usize> = (0..curves.len()).collect();
    order.sort_by(|&a, &b| curves[a].sigma_scale.total_cmp(&curves[b].sigma_scale));

    let lo = curves
        .iter()
        .map(|c| c.data_range.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = curves
        .iter()
        .map(|c| c.data_range.1)
        .fold(f64::INFINITY, f64::min);
    let scale = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.expected_cost.abs()))
        .fold(1.0, f64::max);
    let tol = 1e-6 * scale;

    let mut ordered = true;
    if hi > lo {
        for pair in order.windows(2) {
            let (small_k, large_k) = (&curves[pair[0]], &curves[pair[1]]);
            for i in 0..=GRID {
                let x = lo + (hi - lo) * i as f64 / GRID as f64;
                if small_k.value(x) > large_k.value(x) + tol {
                    ordered = false;
                    break;
                }
            }
        }
    }
    for c in curves {
        c.validation.family_ordered = Some(ordered);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::raw_cost_of_delay;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn mild_coeffs() -> CostCoefficients {
        CostCoefficients::PAPER
    }

    #[test]
    fn fit_recovers_known_distribution() {
        let truth = ShiftedLogNormal::new(2.0, 0.5, -10.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let samples: Vec<f64> = (0..100_000).map(|_| truth.sample(&mut rng)).collect();
        let fit = fit_shifted_lognormal(&samples).unwrap();
        assert!(
            (fit.dist.mu - truth.mu).abs() / truth.mu.abs() < 0.02,
            "mu {} vs {}",
            fit.dist.mu,
            truth.mu
        );
        assert!(
            (fit.dist.sigma - truth.sigma).abs() / truth.sigma < 0.02,
            "sigma {} vs {}",
            fit.dist.sigma,
            truth.sigma
        );
        assert!(!fit.mean_warning);
    }

    #[test]
    fn fit_rejects_degenerate_and_small_samples() {
        let constant = vec![4.2; 50];
        assert!(matches!(
            fit_shifted_lognormal(&constant).unwrap_err(),
            Error::DegenerateSamples { .. }
        ));
        let few = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        assert!(matches!(
            fit_shifted_lognormal(&few).unwrap_err(),
            Error::InsufficientSamples { got: 10, .. }
        ));
    }

    #[test]
    fn scale_sigma_identity_at_one() {
        let dist = ShiftedLogNormal::new(2.0, 0.5, 0.0).unwrap();
        let same = scale_sigma(&dist, 1.0).unwrap();
        assert_eq!(dist, same);
    }

    #[test]
    fn scale_sigma_moments() {
        let dist = ShiftedLogNormal::new(2.0, 0.5, 0.0).unwrap();
        let half = scale_sigma(&dist, 0.5).unwrap();
        assert!((half.mean() - dist.mean()).abs() < 1e-12 * dist.mean().abs());
        assert!((half.std_dev() - 0.5 * dist.std_dev()).abs() < 1e-12 * dist.std_dev());

        // Monte Carlo confirmation of the moment identities.
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..n {
            let x = half.sample(&mut rng);
            sum += x;
            sq += x * x;
        }
        let mc_mean = sum / n as f64;
        let mc_sd = (sq / n as f64 - mc_mean * mc_mean).sqrt();
        assert!((mc_mean - dist.mean()).abs() / dist.mean() < 0.002);
        assert!((mc_sd - 0.5 * dist.std_dev()).abs() / (0.5 * dist.std_dev()) < 0.005);
    }

    #[test]
    fn scale_sigma_small_k_contracts_to_mean() {
        let dist = ShiftedLogNormal::new(2.0, 0.8, -5.0).unwrap();
        let tight = scale_sigma(&dist, 1e-6).unwrap();
        assert!((tight.mean() - dist.mean()).abs() < 1e-9 * dist.mean().abs());
        assert!(tight.std_dev() < 2e-6 * dist.std_dev());
    }

    #[test]
    fn scale_sigma_rejects_bad_k() {
        let dist = ShiftedLogNormal::new(2.0, 0.5, 0.0).unwrap();
        assert!(scale_sigma(&dist, 0.0).is_err());
        assert!(scale_sigma(&dist, 1.5).is_err());
        assert!(scale_sigma(&dist, -0.2).is_err());
    }

    #[test]
    fn expected_cost_point_mass_positive_mean() {
        // Nearly zero spread around a positive mean: expected cost matches
        // the raw cost at that mean.
        let mean = 17.0;
        let dist = ShiftedLogNormal::from_mean_spread(mean, 1.0, 1e-9).unwrap();
        let coeffs = mild_coeffs();
        let expected = expected_cost(&dist, 0.4, &coeffs).unwrap();
        let raw = raw_cost_of_delay(mean, 0.4, &coeffs).unwrap();
        assert!(
            ((expected - raw) / raw).abs() < 1e-6,
            "{expected} vs {raw}"
        );
    }

    #[test]
    fn expected_cost_point_mass_negative_mean() {
        let dist = ShiftedLogNormal::from_mean_spread(-8.0, 1.0, 1e-9).unwrap();
        let v = expected_cost(&dist, 0.4, &mild_coeffs()).unwrap();
        assert!(v.abs() < 1e-9, "expected ~0, got {v}");
    }

    #[test]
    fn expected_cost_matches_monte_carlo() {
        let dist = ShiftedLogNormal::new(2.0, 0.8, -20.0).unwrap();
        let coeffs = mild_coeffs();
        let quad = expected_cost(&dist, 0.0, &coeffs).unwrap();

        let mut rng = ChaCha12Rng::seed_from_u64(20240901);
        let n = 2_000_000usize;
        let mut acc = 0.0;
        for _ in 0..n {
            let delay = dist.sample(&mut rng);
            acc += raw_cost_kernel(delay, 7.0, 0.18);
        }
        let mc = acc / n as f64;
        assert!(
            ((quad - mc) / mc).abs() < 0.003,
            "quadrature {quad} vs MC {mc}"
        );
    }

    #[test]
    fn expected_cost_matches_closed_form() {
        // Independent analytic route: E[cost] for the floored quadratic has
        // a closed form in truncated lognormal moments.
        let dist = ShiftedLogNormal::new(2.3, 0.6, -12.0).unwrap();
        let (a, b) = mild_coeffs().effective(0.5);
        let z0 = ((12.0f64).ln() - dist.mu) / dist.sigma;
        let l1 = (dist.mu + 0.5 * dist.sigma * dist.sigma).exp();
        let l2 = (2.0 * dist.mu + 2.0 * dist.sigma * dist.sigma).exp();
        let sf = |x: f64| 1.0 - normal_cdf(x);
        let m1 = dist.shift * sf(z0) + l1 * sf(z0 - dist.sigma);
        let m2 = dist.shift * dist.shift * sf(z0)
            + 2.0 * dist.shift * l1 * sf(z0 - dist.sigma)
            + l2 * sf(z0 - 2.0 * dist.sigma);
        let closed = a * m1 + b * m2;

        let quad = expected_cost(&dist, 0.5, &mild_coeffs()).unwrap();
        assert!(
            ((quad - closed) / closed).abs() < 1e-7,
            "quadrature {quad} vs closed form {closed}"
        );
    }

    fn fixture_windows() -> Vec<HourWindow> {
        // 18 windows whose means rise through the day; shapes vary mildly.
        (0..18)
            .map(|i| {
                let mean = -5.0 + 3.0 * i as f64;
                let sigma = 0.55 + 0.015 * i as f64;
                let spread = 22.0 + 0.5 * i as f64;
                HourWindow {
                    hour: 5 + i as u8,
                    observed_traffic: 20.0,
                    demand: 0.0,
                    delay_dist: ShiftedLogNormal::from_mean_spread(mean, spread, sigma).unwrap(),
                }
            })
            .collect()
    }

    #[test]
    fn curve_fits_fixture_points() {
        let windows = fixture_windows();
        let curve = build_corrected_curve(&windows, 1.0, 0.6, &mild_coeffs()).unwrap();
        assert!(
            curve.fit.r_squared > 0.95,
            "r² = {}",
            curve.fit.r_squared
        );
        // Reproduces its own calibration points within a few residual norms.
        let tol = (3.0 * curve.fit.residual_norm).max(1e-6);
        for p in &curve.points {
            let v = curve.value(p.mean_delay);
            assert!(
                (v - p.expected_cost).abs() <= tol,
                "at {}: {v} vs {}",
                p.mean_delay,
                p.expected_cost
            );
        }
    }

    #[test]
    fn curve_asymptotics() {
        let windows = fixture_windows();
        let curve = build_corrected_curve(&windows, 1.0, 0.6, &mild_coeffs()).unwrap();
        // Far above the data range the blend saturates onto the raw cost.
        let far = curve.data_range.1 + 3.0 * (curve.data_range.1 - curve.data_range.0);
        let rel = (curve.value(far) - curve.raw(far)).abs() / curve.raw(far);
        assert!(rel < 0.01, "relative gap {rel}");
        // Far below, it approaches the floor c.
        let low = curve.value(-1e4);
        assert!(
            (low - curve.floor).abs() <= 1e-6 * curve.floor.abs().max(1.0),
            "low asymptote {low} vs floor {}",
            curve.floor
        );
    }

    #[test]
    fn curve_degenerate_sigma_tracks_raw() {
        let windows = fixture_windows();
        let curve = build_corrected_curve(&windows, 1e-9, 0.6, &mild_coeffs()).unwrap();
        let (lo, hi) = curve.data_range;
        let mut worst: f64 = 0.0;
        for i in 0..=100 {
            let x = lo + (hi - lo) * i as f64 / 100.0;
            let raw = curve.raw(x);
            if raw > 1.0 {
                worst = worst.max((curve.value(x) - raw).abs() / raw);
            }
        }
        assert!(worst < 0.01, "max relative gap {worst}");
    }

    #[test]
    fn curve_round_trip_from_known_blend() {
        // Points generated from a known blend; the fit must recover the
        // curve shape to well under 0.5% of its range.
        let coeffs = mild_coeffs();
        let truth = CorrectedCostCurve::from_params(
            80.0,
            60.0,
            0.05,
            12.0,
            coeffs,
            0.6,
            1.0,
            (-10.0, 45.0),
        );
        let xs: Vec<f64> = (0..18).map(|i| -10.0 + 55.0 * i as f64 / 17.0).collect();
        let points: Vec<CurvePoint> = xs
            .iter()
            .map(|&x| CurvePoint {
                mean_delay: x,
                expected_cost: truth.value(x),
            })
            .collect();
        let fit = fit_blend(&points, 0.6, &coeffs, (-10.0, 45.0)).unwrap();
        let fitted = CorrectedCostCurve::from_params(
            fit[0],
            fit[1],
            fit[2],
            fit[3],
            coeffs,
            0.6,
            1.0,
            (-10.0, 45.0),
        );
        let range: f64 = points
            .iter()
            .map(|p| p.expected_cost)
            .fold(f64::NEG_INFINITY, f64::max)
            - points
                .iter()
                .map(|p| p.expected_cost)
                .fold(f64::INFINITY, f64::min);
        let rmse = (xs
            .iter()
            .map(|&x| (fitted.value(x) - truth.value(x)).powi(2))
            .sum::<f64>()
            / xs.len() as f64)
            .sqrt();
        assert!(
            rmse < 0.005 * range,
            "rmse {rmse} vs 0.5% of range {range}"
        );
    }

    #[test]
    fn family_ordering_flag() {
        let windows = fixture_windows();
        let mut family: Vec<CorrectedCostCurve> = [1.0, 0.75, 0.5, 0.25]
            .iter()
            .map(|&k| build_corrected_curve(&windows, k, 0.6, &mild_coeffs()).unwrap())
            .collect();
        validate_family(&mut family);
        for c in &family {
            assert_eq!(c.validation.family_ordered, Some(true), "k={}", c.sigma_scale);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn expected_cost_jensen_bound(
            mu in 1.0f64..3.0,
            sigma in 0.2f64..1.0,
            shift in -25.0f64..5.0,
            mtow in 0.0f64..1.1,
        ) {
            let dist = ShiftedLogNormal::new(mu, sigma, shift).unwrap();
            let coeffs = CostCoefficients::PAPER;
            let e = expected_cost(&dist, mtow, &coeffs).unwrap();
            prop_assert!(e >= 0.0);
            let raw_at_mean = raw_cost_of_delay(dist.mean(), mtow, &coeffs).unwrap();
            prop_assert!(e >= raw_at_mean - 1e-8 * raw_at_mean.abs().max(1.0));
        }

        #[test]
        fn expected_cost_monotone_in_sigma_scale(
            mu in 1.0f64..3.0,
            sigma in 0.2f64..1.0,
            shift in -25.0f64..5.0,
        ) {
            let dist = ShiftedLogNormal::new(mu, sigma, shift).unwrap();
            let coeffs = CostCoefficients::PAPER;
            let mut last = f64::INFINITY;
            for k in [1.0, 0.75, 0.5, 0.25, 0.05] {
                let scaled = scale_sigma(&dist, k).unwrap();
                let e = expected_cost(&scaled, 0.8, &coeffs).unwrap();
                prop_assert!(e <= last + 1e-8 * last.abs().max(1.0),
                    "k={k}: {e} > previous {last}");
                last = e;
            }
        }

        #[test]
        fn scale_sigma_preserves_mean(
            mu in -1.0f64..3.0,
            sigma in 0.05f64..1.5,
            shift in -30.0f64..30.0,
            k in 0.01f64..1.0,
        ) {
            let dist = ShiftedLogNormal::new(mu, sigma, shift).unwrap();
            let scaled = scale_sigma(&dist, k).unwrap();
            prop_assert!((scaled.mean() - dist.mean()).abs()
                <= 1e-12 * dist.mean().abs().max(1.0));
            prop_assert!((scaled.std_dev() - k * dist.std_dev()).abs()
                <= 1e-9 * dist.std_dev().max(1e-12));
            prop_assert_eq!(scaled.shift, dist.shift);
        }
    }
}
